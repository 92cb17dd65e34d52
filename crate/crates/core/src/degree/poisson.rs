use serde::{Deserialize, Serialize};

use super::DegreeError;

/// Poisson row-weight profile: `count` draws from `p(i) = e^-l l^i / i!`
/// restricted to `1..=i_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonWeightSpec {
    pub lambda_p: f64,
    pub i_max: usize,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoissonProfile {
    /// `(i, n_i)` for every `i` with a nonzero rounded count.
    pub counts: Vec<(usize, usize)>,
    /// Non-decreasing target weights, exactly `count` long.
    pub sequence: Vec<usize>,
}

impl PoissonProfile {
    pub fn total(&self) -> usize {
        self.counts.iter().map(|&(_, c)| c).sum()
    }
}

fn ln_pmf(lambda: f64, i: usize) -> f64 {
    let mut ln_fact = 0.0;
    for k in 2..=i {
        ln_fact += (k as f64).ln();
    }
    -lambda + i as f64 * lambda.ln() - ln_fact
}

pub fn poisson_counts(spec: &PoissonWeightSpec) -> Result<PoissonProfile, DegreeError> {
    if !(spec.lambda_p > 0.0 && spec.lambda_p.is_finite()) {
        return Err(DegreeError::InvalidSpec(format!(
            "lambda_p must be positive, got {}",
            spec.lambda_p
        )));
    }
    if spec.i_max == 0 || spec.count == 0 {
        return Err(DegreeError::InvalidSpec(format!(
            "i_max and count must be at least 1, got {} and {}",
            spec.i_max, spec.count
        )));
    }
    let mut counts = Vec::new();
    let ln_l = spec.lambda_p.ln();
    let mut ln_p = ln_pmf(spec.lambda_p, 1);
    for i in 1..=spec.i_max {
        if i > 1 {
            ln_p += ln_l - (i as f64).ln();
        }
        let n = (ln_p.exp() * spec.count as f64).round() as usize;
        if n > 0 {
            counts.push((i, n));
        }
    }
    if counts.is_empty() {
        return Err(DegreeError::EmptyProfile {
            lambda: spec.lambda_p,
            i_max: spec.i_max,
        });
    }

    let mut adjusted = counts.clone();
    let total: usize = adjusted.iter().map(|&(_, c)| c).sum();
    if total < spec.count {
        let modal = adjusted
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.cmp(&b.1 .1).then(b.0.cmp(&a.0)))
            .map(|(k, _)| k)
            .expect("nonempty");
        adjusted[modal].1 += spec.count - total;
    } else {
        let mut excess = total - spec.count;
        for slot in adjusted.iter_mut().rev() {
            let take = excess.min(slot.1);
            slot.1 -= take;
            excess -= take;
            if excess == 0 {
                break;
            }
        }
    }
    let sequence = adjusted
        .iter()
        .flat_map(|&(i, c)| std::iter::repeat_n(i, c))
        .collect();
    Ok(PoissonProfile { counts, sequence })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_lambda_first_bucket() {
        let p = poisson_counts(&PoissonWeightSpec { lambda_p: 2.0, i_max: 10, count: 100 }).unwrap();
        assert_eq!(p.counts[0], (1, 27));
        assert_eq!(p.sequence.len(), 100);
    }

    #[test]
    fn large_lambda_stays_finite() {
        let spec = PoissonWeightSpec { lambda_p: 873.2, i_max: 2000, count: 56800 };
        let p = poisson_counts(&spec).unwrap();
        let t = p.total() as f64;
        assert!((t - 56800.0).abs() <= 568.0, "{t}");
        assert_eq!(p.sequence.len(), 56800);
        let mean = p.sequence.iter().sum::<usize>() as f64 / 56800.0;
        assert!((mean - 873.2).abs() < 1.0, "{mean}");
    }

    #[test]
    fn degenerate_spec_is_rejected() {
        let spec = PoissonWeightSpec { lambda_p: 5000.0, i_max: 10, count: 100 };
        assert!(matches!(poisson_counts(&spec), Err(DegreeError::EmptyProfile { .. })));
        let spec = PoissonWeightSpec { lambda_p: -1.0, i_max: 10, count: 100 };
        assert!(matches!(poisson_counts(&spec), Err(DegreeError::InvalidSpec(_))));
    }

    #[test]
    fn matches_direct_pmf() {
        // Direct evaluation with exact factorials for small i.
        let spec = PoissonWeightSpec { lambda_p: 4.5, i_max: 15, count: 10_000 };
        let p = poisson_counts(&spec).unwrap();
        let mut fact = 1.0f64;
        for i in 1..=15usize {
            fact *= i as f64;
            let expect = ((-4.5f64).exp() * 4.5f64.powi(i as i32) / fact * 10_000.0).round() as usize;
            let got = p.counts.iter().find(|c| c.0 == i).map_or(0, |c| c.1);
            assert_eq!(got, expect, "i = {i}");
        }
    }

    proptest! {
        #[test]
        fn sequence_is_sorted_and_exact(lambda in 3.0f64..400.0, count in 50usize..5000) {
            let i_max = (lambda * 3.0) as usize + 10;
            let p = poisson_counts(&PoissonWeightSpec { lambda_p: lambda, i_max, count }).unwrap();
            prop_assert_eq!(p.sequence.len(), count);
            prop_assert!(p.sequence.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(p.sequence.iter().all(|&a| a >= 1 && a <= i_max));
        }
    }
}
