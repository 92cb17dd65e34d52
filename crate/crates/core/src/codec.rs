//! Wyner-Ziv encoding and decoding with the compound code, plus the binary
//! rate-distortion bound.

use serde::Serialize;
use thiserror::Error;

use crate::bip::{self, BipDiagnostics, BipError, BipParams, QuantizerGraph};
use crate::builder::CompoundCode;
use crate::gf2::BitVector;
use crate::sp::{self, SpError, SpGraph, SpOutcome, SpParams};

const BISECTION_TOL: f64 = 1e-9;
/// Range the decoder crossover is clamped to.
pub const CROSSOVER_RANGE: (f64, f64) = (1e-6, 0.5 - 1e-6);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodecError {
    #[error("{name} = {value} outside {range}")]
    Domain {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("length mismatch: {0}")]
    Length(String),
    #[error(transparent)]
    Quantizer(#[from] BipError),
    #[error(transparent)]
    Decoder(#[from] SpError),
}

fn in_unit(name: &'static str, value: f64) -> Result<(), CodecError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(CodecError::Domain {
            name,
            value,
            range: "[0, 1]",
        })
    }
}

fn h(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
    }
}

fn conv(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + b * (1.0 - a)
}

/// `h'(x) = log2((1 - x) / x)`.
fn h_prime(x: f64) -> f64 {
    ((1.0 - x) / x).log2()
}

pub fn binary_entropy(x: f64) -> Result<f64, CodecError> {
    in_unit("x", x)?;
    Ok(h(x))
}

/// `a * b = a(1 - b) + b(1 - a)`.
pub fn binary_convolve(a: f64, b: f64) -> Result<f64, CodecError> {
    in_unit("a", a)?;
    in_unit("b", b)?;
    Ok(conv(a, b))
}

fn check_p(p: f64) -> Result<(), CodecError> {
    if p > 0.0 && p <= 0.5 {
        Ok(())
    } else {
        Err(CodecError::Domain {
            name: "p",
            value: p,
            range: "(0, 0.5]",
        })
    }
}

/// `h(D * p) - h(D)` without the convex envelope.
fn curve(p: f64, d: f64) -> f64 {
    h(conv(d, p)) - h(d)
}

fn tangency(p: f64, d: f64) -> f64 {
    let slope = (1.0 - 2.0 * p) * h_prime(conv(d, p)) - h_prime(d);
    curve(p, d) + slope * (p - d)
}

fn bisect(mut lo: f64, mut hi: f64, tol: f64, lo_side: impl Fn(f64) -> bool) -> f64 {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if lo_side(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The point where the line from `(p, 0)` touches `h(D * p) - h(D)`.
pub fn wz_boundary(p: f64) -> Result<(f64, f64), CodecError> {
    check_p(p)?;
    if tangency(p, p) <= 0.0 {
        return Ok((p, 0.0));
    }
    let d = bisect(1e-300, p, 1e-15, |d| tangency(p, d) < 0.0);
    Ok((d, curve(p, d)))
}

/// Binary Wyner-Ziv rate at distortion `d`, with the lower convex envelope.
pub fn wz_rate(p: f64, d: f64) -> Result<f64, CodecError> {
    check_p(p)?;
    if !(0.0..=p).contains(&d) {
        return Err(CodecError::Domain {
            name: "D",
            value: d,
            range: "[0, p]",
        });
    }
    let (db, rb) = wz_boundary(p)?;
    Ok(if d <= db {
        curve(p, d)
    } else {
        rb * (p - d) / (p - db)
    })
}

/// Smallest distortion the bound allows at rate `rate`.
pub fn wz_distortion(p: f64, rate: f64) -> Result<f64, CodecError> {
    check_p(p)?;
    if !(rate >= 0.0 && rate.is_finite()) {
        return Err(CodecError::Domain {
            name: "R",
            value: rate,
            range: "[0, inf)",
        });
    }
    if rate >= h(p) {
        return Ok(0.0);
    }
    Ok(bisect(0.0, p, BISECTION_TOL, |d| wz_rate(p, d).unwrap_or(0.0) > rate))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePlan {
    pub p: f64,
    pub d1_target: f64,
    /// `1 - h(d1)`.
    pub rs_min: f64,
    /// `1 - h(d1 * p)`.
    pub rc_max: f64,
    /// `h(d1 * p) - h(d1)`.
    pub rt_min: f64,
    pub eps_s: f64,
    pub eps_c: f64,
}

pub fn plan_rates(p: f64, d1: f64) -> Result<RatePlan, CodecError> {
    in_unit("p", p)?;
    in_unit("d1", d1)?;
    if p >= 0.5 || d1 > 0.5 {
        return Err(CodecError::Domain {
            name: "p",
            value: p,
            range: "[0, 0.5) with d1 <= 0.5",
        });
    }
    Ok(RatePlan {
        p,
        d1_target: d1,
        rs_min: 1.0 - h(d1),
        rc_max: 1.0 - h(conv(d1, p)),
        rt_min: h(conv(d1, p)) - h(d1),
        eps_s: 0.0,
        eps_c: 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateDistortionPoint {
    pub rt: f64,
    pub dt: f64,
    pub d1: f64,
    pub d2: f64,
    pub dwz: f64,
    pub gap: f64,
}

impl RateDistortionPoint {
    pub fn new(p: f64, rt: f64, dt: f64, d1: f64, d2: f64) -> Result<Self, CodecError> {
        let dwz = wz_distortion(p, rt)?;
        Ok(RateDistortionPoint {
            rt,
            dt,
            d1,
            d2,
            dwz,
            gap: dt - dwz,
        })
    }
}

/// Mix with the zero-rate point `(0, p)`.
pub fn time_share(point: &RateDistortionPoint, p: f64, alpha: f64) -> Result<RateDistortionPoint, CodecError> {
    in_unit("alpha", alpha)?;
    let rt = alpha * point.rt;
    let dt = alpha * point.dt + (1.0 - alpha) * p;
    let dwz = wz_distortion(p, rt)?;
    Ok(RateDistortionPoint {
        rt,
        dt,
        d1: point.d1,
        d2: point.d2,
        dwz,
        gap: dt - dwz,
    })
}

/// Decoder crossover `p * d1`, clamped into the decoder's valid range.
pub fn effective_crossover(p: f64, d1: f64) -> Result<f64, CodecError> {
    Ok(binary_convolve(p, d1)?.clamp(CROSSOVER_RANGE.0, CROSSOVER_RANGE.1))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quantizer {
    Bip(BipParams),
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Encoded {
    pub z2: BitVector,
    pub x: BitVector,
    pub u: BitVector,
    pub d1: f64,
    pub diagnostics: BipDiagnostics,
}

/// A code with its message-passing graphs built once.
#[derive(Debug, Clone)]
pub struct Codec<'a> {
    code: &'a CompoundCode,
    quantizer: QuantizerGraph,
    decoder: SpGraph,
}

impl<'a> Codec<'a> {
    pub fn new(code: &'a CompoundCode) -> Codec<'a> {
        Codec {
            code,
            quantizer: QuantizerGraph::new(code.g1()),
            decoder: SpGraph::new(code.h()),
        }
    }

    pub fn code(&self) -> &CompoundCode {
        self.code
    }

    pub fn encode(&self, s: &BitVector, quantizer: &Quantizer, seed: u64) -> Result<Encoded, CodecError> {
        let n = self.code.n();
        if s.len() != n {
            return Err(CodecError::Length(format!("source has {} bits, code length is {n}", s.len())));
        }
        let q = match quantizer {
            Quantizer::Bip(params) => bip::bip_quantize_on(&self.quantizer, self.code.g1(), s, params, seed)?,
            Quantizer::Exhaustive => bip::exhaustive_quantize(self.code.g1(), s)?,
        };
        let z2 = self.code.h2().mul_vec(&q.x).expect("codeword has length n");
        Ok(Encoded {
            z2,
            x: q.x,
            u: q.u,
            d1: q.d1,
            diagnostics: q.diagnostics,
        })
    }

    /// Total syndrome: zeros for the `H1` rows followed by `z2`.
    pub fn total_syndrome(&self, z2: &BitVector) -> Result<BitVector, CodecError> {
        let k2 = self.code.h2().rows();
        if z2.len() != k2 {
            return Err(CodecError::Length(format!("z2 has {} bits, expected {k2}", z2.len())));
        }
        Ok(BitVector::zeros(self.code.h1().rows()).concat(z2))
    }

    pub fn decode(&self, z2: &BitVector, j: &BitVector, sp: &SpParams) -> Result<SpOutcome, CodecError> {
        let z = self.total_syndrome(z2)?;
        Ok(sp::sp_decode_on(&self.decoder, &z, j, sp)?)
    }
}

pub fn encode(code: &CompoundCode, s: &BitVector, bip: &BipParams, seed: u64) -> Result<Encoded, CodecError> {
    Codec::new(code).encode(s, &Quantizer::Bip(*bip), seed)
}

/// Decoding with crossover `p * d1_est`.
pub fn decode(
    code: &CompoundCode,
    z2: &BitVector,
    j: &BitVector,
    p: f64,
    d1_est: f64,
    max_iter: usize,
) -> Result<SpOutcome, CodecError> {
    let sp = SpParams {
        max_iter,
        crossover: effective_crossover(p, d1_est)?,
    };
    Codec::new(code).decode(z2, j, &sp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    /// Tangency by brute force: the flattest chord from `(p, 0)` to the curve.
    fn boundary_by_scan(p: f64) -> (f64, f64) {
        let mut best = (0.0, 0.0, f64::INFINITY);
        let steps = 200_000;
        for i in 1..steps {
            let d = p * i as f64 / steps as f64;
            let r = curve(p, d);
            let slope = r / (p - d);
            if slope < best.2 {
                best = (d, r, slope);
            }
        }
        (best.0, best.1)
    }

    #[test]
    fn entropy_and_convolution_identities() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!(close(binary_entropy(0.25).unwrap(), 0.811278, 1e-6));
        assert_eq!(binary_convolve(0.3, 0.0).unwrap(), 0.3);
        assert_eq!(binary_convolve(0.3, 0.5).unwrap(), 0.5);
        assert!(close(binary_convolve(0.088, 0.25).unwrap(), 0.294, 1e-12));
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_convolve(-0.1, 0.2).is_err());
    }

    #[test]
    fn boundary_points() {
        let (d, r) = wz_boundary(0.25).unwrap();
        assert!(close(d, 0.088, 1e-3) && close(r, 0.444, 1e-3), "{d} {r}");
        let (d, r) = wz_boundary(0.05).unwrap();
        assert!(close(d, 0.0014, 5e-4) && close(r, 0.2764, 1e-3), "{d} {r}");
    }

    #[test]
    fn boundary_matches_chord_scan() {
        for p in [0.05, 0.1, 0.25, 0.4] {
            let (d, r) = wz_boundary(p).unwrap();
            let (ds, rs) = boundary_by_scan(p);
            assert!(close(d, ds, 2.0 * p / 200_000.0 + 1e-9), "{p}: {d} vs {ds}");
            assert!(close(r, rs, 1e-4), "{p}: {r} vs {rs}");
        }
    }

    #[test]
    fn rate_endpoints_and_errors() {
        assert!(close(wz_rate(0.25, 0.25).unwrap(), 0.0, 1e-15));
        assert!(close(wz_rate(0.25, 0.0).unwrap(), h(0.25), 1e-15));
        assert_eq!(wz_boundary(0.5).unwrap(), (0.5, 0.0));
        assert!(wz_rate(0.25, 0.3).is_err());
        assert!(wz_rate(0.0, 0.0).is_err());
        assert!(wz_rate(0.6, 0.1).is_err());
    }

    #[test]
    fn distortion_inverts_rate() {
        assert!(close(wz_distortion(0.25, 0.6).unwrap(), 0.039786, 1e-6));
        assert_eq!(wz_distortion(0.25, 0.9).unwrap(), 0.0);
        assert!(close(wz_distortion(0.25, 0.0).unwrap(), 0.25, 1e-8));
        for r in [0.05, 0.2, 0.444, 0.5, 0.7] {
            let d = wz_distortion(0.25, r).unwrap();
            assert!(close(wz_rate(0.25, d).unwrap(), r, 1e-7));
        }
    }

    #[test]
    fn rate_plans() {
        let plan = plan_rates(0.25, 0.5).unwrap();
        assert!(close(plan.rt_min, 0.0, 1e-15));
        let plan = plan_rates(0.25, 0.0).unwrap();
        assert!(close(plan.rt_min, h(0.25), 1e-15));
        let plan = plan_rates(0.25, 0.088).unwrap();
        assert!(close(plan.rt_min, 0.444, 1e-3));
        assert!(close(plan.rs_min - plan.rc_max, plan.rt_min, 1e-12));
    }

    #[test]
    fn time_sharing() {
        let p = 0.25;
        let point = RateDistortionPoint::new(p, 0.444, 0.092, 0.088, 0.0).unwrap();
        assert_eq!(time_share(&point, p, 1.0).unwrap(), point);
        let zero = time_share(&point, p, 0.0).unwrap();
        assert_eq!((zero.rt, zero.dt), (0.0, p));
        let half = time_share(&point, p, 0.5).unwrap();
        assert!(close(half.rt, 0.222, 1e-12) && close(half.dt, 0.171, 1e-12));
        assert!(time_share(&point, p, 1.5).is_err());
    }

    #[test]
    fn example_round_trip() {
        let code = CompoundCode::example();
        let codec = Codec::new(&code);
        let enc = codec.encode(&fixtures::source(), &Quantizer::Exhaustive, 0).unwrap();
        assert_eq!(enc.x, fixtures::expected_codeword());
        assert_eq!(enc.u, fixtures::expected_message());
        assert_eq!(enc.z2, fixtures::expected_z2());
        assert_eq!(codec.total_syndrome(&enc.z2).unwrap(), fixtures::expected_total_syndrome());
        let out = decode(&code, &enc.z2, &fixtures::side_information(), 0.25, enc.d1, 100).unwrap();
        assert_eq!(out.s_hat, enc.x);
        // Noiseless side information: j = s, so the decoder sees p = 0.
        let out = decode(&code, &enc.z2, &fixtures::source(), 0.0, enc.d1, 100).unwrap();
        assert_eq!(out.s_hat, enc.x);
        let dt = out.s_hat.hamming_distance(&fixtures::source()).unwrap() as f64 / 10.0;
        assert_eq!(dt, 0.3);
        assert_eq!(enc.d1, 0.3);
    }

    #[test]
    fn zero_source_encodes_to_zero() {
        let code = CompoundCode::example();
        let enc = encode(&code, &BitVector::zeros(10), &BipParams::default(), 0).unwrap();
        assert!(enc.x.is_zero() && enc.z2.is_zero());
    }

    #[test]
    fn planted_codeword_syndrome() {
        let code = CompoundCode::example();
        let u = BitVector::from_bits(&[1, 0, 1, 1]);
        let x = code.g1().left_mul(&u).unwrap();
        let enc = Codec::new(&code).encode(&x, &Quantizer::Exhaustive, 0).unwrap();
        assert_eq!(enc.x, x);
        assert_eq!(enc.z2, code.h2().mul_vec(&x).unwrap());
    }

    #[test]
    fn noiseless_side_information_returns_x() {
        let code = CompoundCode::example();
        let x = fixtures::expected_codeword();
        let out = decode(&code, &fixtures::expected_z2(), &x, 0.1, 0.05, 100).unwrap();
        assert!(out.converged);
        assert_eq!(out.s_hat, x);
        assert_eq!(out.iters, 0);
    }

    #[test]
    fn length_checks() {
        let code = CompoundCode::example();
        let codec = Codec::new(&code);
        assert!(matches!(codec.encode(&BitVector::zeros(3), &Quantizer::Exhaustive, 0), Err(CodecError::Length(_))));
        assert!(matches!(codec.total_syndrome(&BitVector::zeros(5)), Err(CodecError::Length(_))));
    }

    #[test]
    fn crossover_is_clamped() {
        assert_eq!(effective_crossover(0.0, 0.0).unwrap(), CROSSOVER_RANGE.0);
        assert_eq!(effective_crossover(0.5, 0.2).unwrap(), CROSSOVER_RANGE.1);
        assert!(close(effective_crossover(0.25, 0.0403).unwrap(), 0.27015, 1e-5));
    }

    proptest! {
        #[test]
        fn rate_is_monotone_and_convex(p in 0.01f64..0.5) {
            let samples = 1000;
            let rates: Vec<f64> = (0..=samples)
                .map(|i| wz_rate(p, p * (i as f64 / samples as f64)).unwrap())
                .collect();
            for w in rates.windows(3) {
                prop_assert!(w[1] <= w[0] + 1e-12);
                prop_assert!(w[1] <= 0.5 * (w[0] + w[2]) + 1e-9);
            }
        }

        #[test]
        fn curve_is_non_increasing(p in 0.01f64..0.5) {
            let mut prev = f64::INFINITY;
            for i in 0..=1000 {
                let v = curve(p, 0.5 * i as f64 / 1000.0);
                prop_assert!(v <= prev + 1e-12);
                prev = v;
            }
        }

        #[test]
        fn convolution_stays_in_envelope(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let c = binary_convolve(a, b).unwrap();
            prop_assert_eq!(c, binary_convolve(b, a).unwrap());
            if a <= 0.5 && b <= 0.5 {
                prop_assert!(c >= a.max(b) - 1e-15 && c <= 0.5 + 1e-15);
            }
        }
    }
}
