//! The worked example run end to end against its printed values.

use crate::bip::exhaustive_quantize;
use crate::builder::{Check, CompoundCode};
use crate::codec::{Codec, Quantizer};
use crate::fixtures;
use crate::gf2::BitVector;
use crate::sp::{coset_members, coset_nearest, sp_decode, SpParams};

fn first_difference(got: &BitVector, want: &BitVector) -> String {
    if got.len() != want.len() {
        return format!("length {} != {}", got.len(), want.len());
    }
    match (0..got.len()).find(|&i| got.get(i) != want.get(i)) {
        Some(i) => format!("first difference at bit {i}: got {got}, expected {want}"),
        None => got.to_string(),
    }
}

fn compare(name: &str, got: &BitVector, want: &BitVector) -> Check {
    Check::new(name, got == want, first_difference(got, want))
}

/// Every printed quantity of the example, recomputed.
pub fn verify_example() -> Vec<Check> {
    let code = CompoundCode::example();
    let codec = Codec::new(&code);
    let s = fixtures::source();
    let j = fixtures::side_information();
    let mut checks = Vec::new();

    let q = exhaustive_quantize(code.g1(), &s).expect("four message bits");
    checks.push(compare("x", &q.x, &fixtures::expected_codeword()));
    checks.push(compare("u", &q.u, &fixtures::expected_message()));

    let y = fixtures::expected_intermediate();
    let inner = fixtures::inner_parity_check();
    let y_g = fixtures::inner_generator().left_mul(&y).expect("fixture shapes");
    checks.push(compare("y G", &y_g, &fixtures::expected_codeword()));
    let inner_syndrome = inner.mul_vec(&y).expect("fixture shapes");
    let k1 = fixtures::K1;
    checks.push(compare(
        "H1 y",
        &inner_syndrome.slice(0, k1),
        &BitVector::zeros(k1),
    ));
    checks.push(compare(
        "z2 = y H2^T",
        &inner_syndrome.slice(k1, inner.rows()),
        &fixtures::expected_z2(),
    ));

    let enc = codec.encode(&s, &Quantizer::Exhaustive, 0).expect("fixture encode");
    checks.push(compare("z2 = H2 x", &enc.z2, &fixtures::expected_z2()));
    let z = codec.total_syndrome(&enc.z2).expect("k2 bits");
    checks.push(compare("z", &z, &fixtures::expected_total_syndrome()));

    match coset_members(code.h(), &z) {
        Ok(mut members) => {
            members.sort_by_key(|v| v.to_bits());
            let mut want = fixtures::expected_coset().to_vec();
            want.sort_by_key(|v| v.to_bits());
            let listed: Vec<String> = members.iter().map(|v| v.to_string()).collect();
            checks.push(Check::new("coset {a, b, c, d}", members == want, listed.join(" ")));
        }
        Err(e) => checks.push(Check::new("coset {a, b, c, d}", false, e.to_string())),
    }

    match coset_nearest(code.h(), &z, &j) {
        Ok(c) => checks.push(compare("nearest coset word", &c, &fixtures::expected_codeword())),
        Err(e) => checks.push(Check::new("nearest coset word", false, e.to_string())),
    }
    match sp_decode(code.h(), &z, &j, &SpParams::new(0.25)) {
        Ok(out) => {
            checks.push(compare("s_hat", &out.s_hat, &q.x));
            checks.push(Check::new(
                "decoder distortion 0",
                out.s_hat == q.x,
                format!("converged {} after {} iterations", out.converged, out.iters),
            ));
        }
        Err(e) => checks.push(Check::new("s_hat", false, e.to_string())),
    }
    checks
}
