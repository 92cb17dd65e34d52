//! Compound LDGM-LDPC code construction.
//!
//! A half matrix `A` is grown by PEG, permuted to an all-one diagonal,
//! doubled into `H = [[I, A0], [A0, I]]` and split into `H1` (shared
//! constraints) and `H2` (syndrome-bearing constraints). The LDGM generator
//! `G1` is then designed row by row in the null space of `H1`.

mod assemble;
mod diagonal;
mod generator;
mod peg;

pub use assemble::{assemble_compound, CompoundParity};
pub use diagonal::all_one_diagonalize;
pub use generator::{design_poisson_generator, GeneratorStats, SystematicLayout};
pub use peg::{natural_check_count, peg_generate};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::degree::{DegreeDistribution, DegreeError, PoissonWeightSpec};
use crate::fixtures;
use crate::gf2::{BitMatrix, Gf2Error};
use crate::seed::derive_seed;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BuildError {
    #[error("invalid code parameters: {0}")]
    Params(String),
    #[error("unrealizable degree sequence: {0}")]
    Unrealizable(String),
    #[error("half matrix stayed rank deficient after repair: rank {rank} of {rows}")]
    RankRepair { rank: usize, rows: usize },
    #[error("cannot place an all-one diagonal: {0}")]
    NotDiagonalizable(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("H1 is not in (I O B) form: {0}")]
    NotSystematic(String),
    #[error("generator weight budget: {0}")]
    WeightBudget(String),
    #[error("generator rows reached rank {achieved} of {needed} before the redraw budget ran out")]
    GeneratorRank { achieved: usize, needed: usize },
    #[error(transparent)]
    Degree(#[from] DegreeError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// Dimensions and generator-weight settings of a compound code.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodeParams {
    pub n: usize,
    pub m: usize,
    pub k1: usize,
    pub k2: usize,
    pub zeta: usize,
    pub poisson_lambda: f64,
    pub i_max: usize,
}

impl CodeParams {
    /// Row count of `H1`, `n - m + k1` (zero if negative).
    pub fn h1_rows(&self) -> usize {
        (self.n + self.k1).saturating_sub(self.m)
    }

    /// Row count of `H`, `n - m + k1 + k2`.
    pub fn h_rows(&self) -> usize {
        self.h1_rows() + self.k2
    }

    /// Shape of the half matrix `A`.
    pub fn half_shape(&self) -> Result<(usize, usize), BuildError> {
        let rows = self.h_rows();
        if !self.n.is_multiple_of(2) || !rows.is_multiple_of(2) || self.h1_rows() == 0 {
            return Err(BuildError::Params(format!(
                "n = {} and n-m+k1+k2 = {rows} must be even, and n-m+k1 positive",
                self.n
            )));
        }
        Ok((rows / 2, self.n / 2))
    }

    /// LDGM rate `(m - k1) / n`.
    pub fn r1(&self) -> f64 {
        (self.m - self.k1) as f64 / self.n as f64
    }

    /// LDPC rate `(m - k1 - k2) / n`.
    pub fn r2(&self) -> f64 {
        (self.m as f64 - self.k1 as f64 - self.k2 as f64) / self.n as f64
    }

    /// Transmitted rate `k2 / n`.
    pub fn rt(&self) -> f64 {
        self.k2 as f64 / self.n as f64
    }

    pub fn poisson_spec(&self) -> PoissonWeightSpec {
        PoissonWeightSpec {
            lambda_p: self.poisson_lambda,
            i_max: self.i_max,
            count: self.m.saturating_sub(self.k1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, holds: bool, detail: String) -> Check {
        Check {
            name: name.to_string(),
            holds,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamReport {
    pub checks: Vec<Check>,
}

impl ParamReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.holds).collect()
    }
}

/// Pass/fail for each dimension constraint, with the numbers involved.
pub fn validate_params(p: &CodeParams) -> ParamReport {
    let (n, m, k1, k2) = (p.n as i64, p.m as i64, p.k1 as i64, p.k2 as i64);
    let t = n - m + k1;
    let checks = vec![
        Check::new("n even", n % 2 == 0, format!("n = {n}")),
        Check::new(
            "n-m+k1+k2 even",
            (t + k2) % 2 == 0,
            format!("n-m+k1+k2 = {}", t + k2),
        ),
        Check::new("n-m+k1 >= 1", t >= 1, format!("n-m+k1 = {t}")),
        Check::new(
            "n-k2 <= m-k1",
            n - k2 <= m - k1,
            format!("{} <= {}", n - k2, m - k1),
        ),
        Check::new(
            "n/2 <= m-k1",
            n / 2 <= m - k1,
            format!("{} <= {}", n / 2, m - k1),
        ),
        Check::new("k1+k2 <= m", k1 + k2 <= m, format!("{} <= {m}", k1 + k2)),
        Check::new("m <= 2k1+k2", m <= 2 * k1 + k2, format!("{m} <= {}", 2 * k1 + k2)),
        Check::new("n-m+k1 <= k2", t <= k2, format!("{t} <= {k2}")),
        Check::new(
            "1 <= zeta <= n/2",
            p.zeta >= 1 && p.zeta as i64 <= n / 2,
            format!("zeta = {}", p.zeta),
        ),
        Check::new(
            "zeta < i_max",
            p.zeta < p.i_max,
            format!("{} < {}", p.zeta, p.i_max),
        ),
    ];
    ParamReport { checks }
}

/// A built compound code. `h1` and `h2` partition the rows of `h`, and every
/// row of `g1` lies in the null space of `h1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompoundCode {
    params: CodeParams,
    h: BitMatrix,
    h1: BitMatrix,
    h2: BitMatrix,
    g1: BitMatrix,
}

impl CompoundCode {
    /// Assembles a code from stored matrices, checking shapes, the row split
    /// and `G1 H1^T = 0`.
    pub fn from_parts(
        params: CodeParams,
        h: BitMatrix,
        h1: BitMatrix,
        h2: BitMatrix,
        g1: BitMatrix,
    ) -> Result<CompoundCode, BuildError> {
        let n = params.n;
        let k = params.m.saturating_sub(params.k1);
        let shapes = [
            ("H", h.shape(), (params.h_rows(), n)),
            ("H1", h1.shape(), (params.h1_rows(), n)),
            ("H2", h2.shape(), (params.k2, n)),
            ("G1", g1.shape(), (k, n)),
        ];
        for (name, got, want) in shapes {
            if got != want {
                return Err(BuildError::Shape(format!(
                    "{name} is {}x{}, parameters need {}x{}",
                    got.0, got.1, want.0, want.1
                )));
            }
        }
        if h1.stack(&h2)? != h {
            return Err(BuildError::Shape("H1 stacked on H2 differs from H".into()));
        }
        if g1.mat_mul(&h1.transpose())?.nnz() != 0 {
            return Err(BuildError::Shape("a row of G1 violates H1".into()));
        }
        Ok(CompoundCode {
            params,
            h,
            h1,
            h2,
            g1,
        })
    }

    /// The ten-bit worked example: systematic `H`, its first six rows as
    /// `H1`, and the four-row LDGM generator.
    pub fn example() -> CompoundCode {
        let h = fixtures::systematic_parity_check();
        let params = CodeParams {
            n: fixtures::N,
            m: fixtures::M,
            k1: fixtures::K1,
            k2: fixtures::K2,
            zeta: 1,
            poisson_lambda: 3.0,
            i_max: 5,
        };
        let t = params.h1_rows();
        let h1 = h.select_rows(0, t).expect("fixture rows");
        let h2 = h.select_rows(t, h.rows()).expect("fixture rows");
        CompoundCode::from_parts(params, h, h1, h2, fixtures::ldgm_generator())
            .expect("fixture is consistent")
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn h(&self) -> &BitMatrix {
        &self.h
    }

    pub fn h1(&self) -> &BitMatrix {
        &self.h1
    }

    pub fn h2(&self) -> &BitMatrix {
        &self.h2
    }

    pub fn g1(&self) -> &BitMatrix {
        &self.g1
    }

    pub fn n(&self) -> usize {
        self.params.n
    }
}

/// Outcome of the per-build invariant checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuildReport {
    pub params: ParamReport,
    pub invariants: Vec<Check>,
    pub generator: GeneratorStats,
    /// Whether `zeta (max_l w(b_l) + 1) <= i_max`, under which every row
    /// weight bound holds without rejection sampling.
    pub weight_bound_premise: bool,
}

impl BuildReport {
    pub fn all_hold(&self) -> bool {
        self.params.all_hold() && self.invariants.iter().all(|c| c.holds)
    }
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

fn doubled(v: Vec<usize>) -> Vec<usize> {
    let mut out = v.clone();
    out.extend(v);
    sorted(out)
}

/// Full construction. Stream 1 of `seed` drives PEG, stream 2 the generator.
pub fn build_compound(
    params: &CodeParams,
    dist: &DegreeDistribution,
    seed: u64,
) -> Result<(CompoundCode, BuildReport), BuildError> {
    let report = validate_params(params);
    if !report.all_hold() {
        let msg = report
            .failures()
            .iter()
            .map(|c| format!("{} ({})", c.name, c.detail))
            .collect::<Vec<_>>()
            .join("; ");
        return Err(BuildError::Params(msg));
    }
    let (r, c) = params.half_shape()?;
    let a = peg_generate(r, c, dist, derive_seed(seed, 1))?;
    let (rp, cp) = all_one_diagonalize(&a)?;
    let a = a.permute(&rp, &cp)?;
    let parity = assemble_compound(&a, params)?;
    let (g1, stats) = generator::design_with_stats(&parity.h1, params, derive_seed(seed, 2))?;

    let k = params.m - params.k1;
    let mut invariants = Vec::new();
    let violations = g1.mat_mul(&parity.h1.transpose())?.nnz();
    invariants.push(Check::new(
        "G1 H1^T = 0",
        violations == 0,
        format!("{violations} nonzero entries"),
    ));
    invariants.push(Check::new(
        "rank(G1) = m-k1",
        stats.rank == k,
        format!("{} of {k}", stats.rank),
    ));
    let max_w = g1.row_weights().into_iter().max().unwrap_or(0);
    invariants.push(Check::new(
        "max row weight of G1 <= i_max",
        max_w <= params.i_max,
        format!("{max_w} <= {}", params.i_max),
    ));
    invariants.push(Check::new(
        "H1 stacked on H2 = H",
        parity.h1.stack(&parity.h2)? == parity.h,
        String::new(),
    ));
    let rows_ok = sorted(parity.h.row_weights()) == doubled(a.row_weights());
    let cols_ok = sorted(parity.h.col_weights()) == doubled(a.col_weights());
    invariants.push(Check::new(
        "degree multisets of H double those of A",
        rows_ok && cols_ok,
        format!("rows {rows_ok}, columns {cols_ok}"),
    ));
    invariants.push(Check::new(
        "H1 in (I O B) form",
        SystematicLayout::of(&parity.h1).is_ok(),
        String::new(),
    ));
    let premise = params.zeta * (stats.max_b_weight + 1) <= params.i_max;
    let report = BuildReport {
        params: report,
        invariants,
        generator: stats,
        weight_bound_premise: premise,
    };
    let code = CompoundCode {
        params: *params,
        h: parity.h,
        h1: parity.h1,
        h2: parity.h2,
        g1,
    };
    Ok((code, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::Catalog;

    fn p(n: usize, m: usize, k1: usize, k2: usize) -> CodeParams {
        CodeParams { n, m, k1, k2, zeta: 10, poisson_lambda: 70.0, i_max: 160 }
    }

    #[test]
    fn table_code_one_is_valid() {
        let r = validate_params(&CodeParams {
            poisson_lambda: 873.2,
            i_max: 2000,
            ..p(100_000, 76_800, 20_000, 44_400)
        });
        assert!(r.all_hold(), "{:?}", r.failures());
    }

    #[test]
    fn worked_example_fails_first_dimension_check() {
        let r = validate_params(&CodeParams { zeta: 1, i_max: 5, ..p(10, 8, 4, 2) });
        let failed: Vec<&str> = r.failures().iter().map(|c| c.name.as_str()).collect();
        assert!(failed.contains(&"n-k2 <= m-k1"));
        let c = r.checks.iter().find(|c| c.name == "n-k2 <= m-k1").unwrap();
        assert_eq!(c.detail, "8 <= 4");
    }

    #[test]
    fn window_violation() {
        let r = validate_params(&p(100, 50, 30, 30));
        assert!(r.failures().iter().any(|c| c.name == "k1+k2 <= m"));
    }

    #[test]
    fn code_three_shapes() {
        let params = p(100_000, 95_700, 20_000, 60_000);
        assert!(validate_params(&params).all_hold());
        assert_eq!(params.h_rows(), 84_300);
        assert_eq!(params.h1_rows(), 24_300);
        assert_eq!(params.half_shape().unwrap(), (42_150, 50_000));
        assert!((params.r1() - 0.757).abs() < 1e-12);
        assert!((params.r2() - 0.157).abs() < 1e-12);
        assert!((params.rt() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn example_code_is_consistent() {
        let code = CompoundCode::example();
        assert_eq!(code.h1().rows(), 6);
        assert_eq!(code.h2().rows(), 2);
        assert_eq!(code.g1().rank(), 4);
    }

    #[test]
    fn small_irregular_build() {
        let cat = Catalog::builtin();
        let params = CodeParams { n: 1000, m: 956, k1: 200, k2: 600, zeta: 5, poisson_lambda: 30.0, i_max: 80 };
        let (code, report) = build_compound(&params, &cat.get("3").unwrap().distribution, 4).unwrap();
        assert!(report.all_hold(), "{report:?}");
        assert_eq!(code.g1().rank(), 756);
        assert_eq!(code.h().shape(), (844, 1000));
    }

    #[test]
    fn invalid_params_are_reported() {
        let d = DegreeDistribution::regular(3, 6).unwrap();
        let err = build_compound(&p(10, 8, 4, 2), &d, 0).unwrap_err();
        assert!(err.to_string().contains("n-k2 <= m-k1"), "{err}");
    }
}
