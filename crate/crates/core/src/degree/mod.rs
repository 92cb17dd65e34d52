//! Edge-perspective degree distributions, the shipped catalog, and Poisson
//! weight profiles for generator rows.
//!
//! Text uses polynomial exponents, `lambda(x) = sum lambda_i x^(i-1)`, so the
//! term `0.5 x^2` describes degree-3 nodes. Stored degrees are always node
//! degrees.

mod catalog;
mod poisson;

pub use catalog::{Catalog, CatalogEntry};
pub use poisson::{poisson_counts, PoissonProfile, PoissonWeightSpec};

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Allowed deviation of a parsed coefficient sum from one.
pub const SUM_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DegreeError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{side} fractions sum to {sum}, expected 1 within {SUM_TOLERANCE}")]
    BadSum { side: &'static str, sum: f64 },
    #[error("unknown catalog entry {0:?}")]
    UnknownEntry(String),
    #[error("poisson profile is empty: no degree in 1..={i_max} has a nonzero count at lambda {lambda}")]
    EmptyProfile { lambda: f64, i_max: usize },
    #[error("invalid poisson spec: {0}")]
    InvalidSpec(String),
}

/// Pair of edge-perspective polynomials `(lambda, rho)` keyed by node degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeDistribution {
    lambda: Vec<(usize, f64)>,
    rho: Vec<(usize, f64)>,
}

impl DegreeDistribution {
    /// Validates and normalizes term lists of `(node degree, fraction)`.
    pub fn new(lambda: Vec<(usize, f64)>, rho: Vec<(usize, f64)>) -> Result<Self, DegreeError> {
        Ok(DegreeDistribution {
            lambda: normalize_side("lambda", lambda, 0)?,
            rho: normalize_side("rho", rho, 0)?,
        })
    }

    /// `(dv, dc)`-regular pair.
    pub fn regular(var_degree: usize, check_degree: usize) -> Result<Self, DegreeError> {
        DegreeDistribution::new(vec![(var_degree, 1.0)], vec![(check_degree, 1.0)])
    }

    pub fn lambda(&self) -> &[(usize, f64)] {
        &self.lambda
    }

    pub fn rho(&self) -> &[(usize, f64)] {
        &self.rho
    }

    /// `1 - (sum rho_i / i) / (sum lambda_i / i)`.
    pub fn design_rate(&self) -> f64 {
        1.0 - inverse_mean(&self.rho) / inverse_mean(&self.lambda)
    }

    /// Ratio of check nodes to variable nodes, `1 - design_rate`.
    pub fn check_ratio(&self) -> f64 {
        inverse_mean(&self.rho) / inverse_mean(&self.lambda)
    }

    /// Fraction of variable nodes with each degree.
    pub fn variable_node_fractions(&self) -> Vec<(usize, f64)> {
        node_fractions(&self.lambda)
    }

    /// Fraction of check nodes with each degree.
    pub fn check_node_fractions(&self) -> Vec<(usize, f64)> {
        node_fractions(&self.rho)
    }

    pub fn mean_variable_degree(&self) -> f64 {
        1.0 / inverse_mean(&self.lambda)
    }

    pub fn mean_check_degree(&self) -> f64 {
        1.0 / inverse_mean(&self.rho)
    }

    /// Text form accepted by [`parse_distribution`]; a parse of the output
    /// reproduces `self` exactly.
    pub fn to_expr(&self) -> String {
        format!("{} | {}", side_expr(&self.lambda), side_expr(&self.rho))
    }
}

impl fmt::Display for DegreeDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expr())
    }
}

fn inverse_mean(terms: &[(usize, f64)]) -> f64 {
    terms.iter().map(|&(d, f)| f / d as f64).sum()
}

fn node_fractions(terms: &[(usize, f64)]) -> Vec<(usize, f64)> {
    let total = inverse_mean(terms);
    terms.iter().map(|&(d, f)| (d, f / d as f64 / total)).collect()
}

fn side_expr(terms: &[(usize, f64)]) -> String {
    terms
        .iter()
        .map(|&(d, f)| format!("{f} x^{}", d - 1))
        .collect::<Vec<_>>()
        .join(" + ")
}

fn normalize_side(
    side: &'static str,
    mut terms: Vec<(usize, f64)>,
    line: usize,
) -> Result<Vec<(usize, f64)>, DegreeError> {
    let err = |message: String| {
        if line == 0 {
            DegreeError::Parse { line: 1, message }
        } else {
            DegreeError::Parse { line, message }
        }
    };
    if terms.is_empty() {
        return Err(err(format!("{side} has no terms")));
    }
    for &(d, f) in &terms {
        if d < 2 {
            return Err(err(format!("{side} degree {d} is below 2")));
        }
        if !(f > 0.0 && f <= 1.0) {
            return Err(err(format!("{side} fraction {f} outside (0, 1]")));
        }
    }
    terms.sort_by_key(|&(d, _)| d);
    if let Some(w) = terms.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(err(format!("{side} lists degree {} twice", w[0].0)));
    }
    let sum: f64 = terms.iter().map(|&(_, f)| f).sum();
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(DegreeError::BadSum { side, sum });
    }
    // Leave already-normalized input untouched so text round trips are exact.
    if (sum - 1.0).abs() > 1e-12 {
        for t in &mut terms {
            t.1 /= sum;
        }
    }
    Ok(terms)
}

/// Parses one polynomial: `c x^e + c x + ...`. Exponent `e` maps to node
/// degree `e + 1`.
fn parse_polynomial(text: &str, line: usize) -> Result<Vec<(usize, f64)>, DegreeError> {
    let perr = |message: String| DegreeError::Parse { line, message };
    let mut terms = Vec::new();
    for raw in text.split('+') {
        let term: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
        if term.is_empty() {
            return Err(perr(format!("empty term in {text:?}")));
        }
        let (coef, exp) = match term.find('x') {
            Some(pos) => {
                let coef = &term[..pos];
                let rest = term[pos + 1..].trim_start_matches('*');
                let exp = if rest.is_empty() {
                    1
                } else {
                    let e = rest
                        .strip_prefix('^')
                        .ok_or_else(|| perr(format!("malformed term {term:?}")))?;
                    let e = e.trim_start_matches('{').trim_end_matches('}');
                    e.parse::<usize>()
                        .map_err(|_| perr(format!("bad exponent in {term:?}")))?
                };
                (coef.trim_end_matches('*'), exp)
            }
            None => return Err(perr(format!("term {term:?} has no x (degree-1 nodes are not allowed)"))),
        };
        let coef: f64 = if coef.is_empty() {
            1.0
        } else {
            coef.parse()
                .map_err(|_| perr(format!("bad coefficient in {term:?}")))?
        };
        if exp == 0 {
            return Err(perr(format!("term {term:?} describes degree-1 nodes")));
        }
        terms.push((exp + 1, coef));
    }
    Ok(terms)
}

/// Parses a distribution from either `lambda-poly | rho-poly` on one line or
/// `lambda: ...` and `rho: ...` lines.
pub fn parse_distribution(text: &str) -> Result<DegreeDistribution, DegreeError> {
    let mut lambda = None;
    let mut rho = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        if let Some(rest) = l.strip_prefix("lambda:") {
            lambda = Some((parse_polynomial(rest, line)?, line));
        } else if let Some(rest) = l.strip_prefix("rho:") {
            rho = Some((parse_polynomial(rest, line)?, line));
        } else if let Some((lp, rp)) = l.split_once('|') {
            lambda = Some((parse_polynomial(lp, line)?, line));
            rho = Some((parse_polynomial(rp, line)?, line));
        } else {
            return Err(DegreeError::Parse {
                line,
                message: format!("expected `lambda | rho`, `lambda:` or `rho:`, got {l:?}"),
            });
        }
    }
    let (lambda, lline) = lambda.ok_or(DegreeError::Parse {
        line: 1,
        message: "missing lambda polynomial".into(),
    })?;
    let (rho, rline) = rho.ok_or(DegreeError::Parse {
        line: 1,
        message: "missing rho polynomial".into(),
    })?;
    Ok(DegreeDistribution {
        lambda: normalize_side("lambda", lambda, lline)?,
        rho: normalize_side("rho", rho, rline)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exponent_plus_one_convention() {
        let d = parse_distribution("0.5 x^2 + 0.5 x^3 | 1.0 x^5").unwrap();
        assert_eq!(d.lambda(), &[(3, 0.5), (4, 0.5)]);
        assert_eq!(d.rho(), &[(6, 1.0)]);
    }

    #[test]
    fn accepts_bare_x_and_braces() {
        let d = parse_distribution("0.3424x + 0.6576x^{2} | 0.8x^3 + 0.2 x^4").unwrap();
        assert_eq!(d.lambda()[0].0, 2);
        assert_eq!(d.lambda()[1].0, 3);
    }

    #[test]
    fn rejects_bad_sums_and_terms() {
        assert!(matches!(
            parse_distribution("0.5 x^2 + 0.4 x^3 | 1.0 x^5"),
            Err(DegreeError::BadSum { side: "lambda", .. })
        ));
        assert!(matches!(
            parse_distribution("lambda: 1.0 x^2\nrho: 1.5 x^3"),
            Err(DegreeError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_distribution("1.0 | 1.0 x^3"),
            Err(DegreeError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_distribution("1.0 x^^2 | 1.0 x^3"),
            Err(DegreeError::Parse { .. })
        ));
        assert!(parse_distribution("0.5 x^2 + 0.5 x^2 | 1.0 x^3").is_err());
    }

    #[test]
    fn design_rate_of_regular_pair() {
        let d = DegreeDistribution::regular(3, 6).unwrap();
        assert!((d.design_rate() - 0.5).abs() < 1e-12);
        let fr = d.variable_node_fractions();
        assert_eq!(fr, vec![(3, 1.0)]);
    }

    #[test]
    fn node_fractions_sum_to_one() {
        let d = parse_distribution("0.5 x + 0.5 x^3 | 1.0 x^5").unwrap();
        let v = d.variable_node_fractions();
        // Edge fractions 1/2 on degrees 2 and 4 give node fractions 2/3, 1/3.
        assert!((v[0].1 - 2.0 / 3.0).abs() < 1e-12);
        assert!((v[1].1 - 1.0 / 3.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn serialize_parse_fixed_point(
            raw in prop::collection::btree_map(2usize..60, 1u32..1000, 1..8),
            raw_rho in prop::collection::btree_map(2usize..30, 1u32..1000, 1..4),
        ) {
            let norm = |m: &std::collections::BTreeMap<usize, u32>| {
                let s: u32 = m.values().sum();
                m.iter().map(|(&d, &c)| (d, c as f64 / s as f64)).collect::<Vec<_>>()
            };
            let d = DegreeDistribution::new(norm(&raw), norm(&raw_rho)).unwrap();
            let once = parse_distribution(&d.to_expr()).unwrap();
            let twice = parse_distribution(&once.to_expr()).unwrap();
            prop_assert_eq!(&once, &twice);
            prop_assert_eq!(once.to_expr(), twice.to_expr());
            let s: f64 = once.lambda().iter().map(|t| t.1).sum();
            prop_assert!((s - 1.0).abs() < 1e-6);
        }
    }
}
