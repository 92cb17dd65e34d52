//! The ten-bit worked example: a four-message LDGM code nested with a
//! two-dimensional LDPC code, one source word, one side-information word.

use crate::gf2::{BitMatrix, BitVector};

fn matrix(rows: &[&str]) -> BitMatrix {
    let dense: Vec<Vec<u8>> = rows
        .iter()
        .map(|r| r.bytes().map(|b| b - b'0').collect())
        .collect();
    BitMatrix::from_dense(&dense).expect("fixture matrix")
}

fn vector(bits: &str) -> BitVector {
    BitVector::parse_ascii(bits).expect("fixture vector")
}

/// Inner `m x n` generator, m = 8.
pub fn inner_generator() -> BitMatrix {
    matrix(&[
        "1111111111",
        "1111111111",
        "1111111111",
        "1111111011",
        "0000001000",
        "0000000100",
        "1010100010",
        "0110010001",
    ])
}

/// Inner parity-check `[H1; H2]` over the length-8 intermediate word.
pub fn inner_parity_check() -> BitMatrix {
    matrix(&[
        "10000011", "01000011", "00100011", "00010011", "00001011", "00000111",
    ])
}

/// Generator of the nested LDPC code.
pub fn ldpc_generator() -> BitMatrix {
    matrix(&["1010101010", "0110011001"])
}

/// Generator of the LDGM quantization code.
pub fn ldgm_generator() -> BitMatrix {
    matrix(&[
        "0000001000",
        "0000000100",
        "1010100110",
        "0110010101",
    ])
}

/// Sparse parity-check matrix of the LDPC code.
pub fn parity_check() -> BitMatrix {
    matrix(&[
        "1000100000",
        "0100010000",
        "0010001000",
        "0001000100",
        "0000100010",
        "0000010001",
        "1010000101",
        "1001100000",
    ])
}

/// Systematic parity-check matrix; its first six rows are shared with the
/// LDGM code and its last two rows carry the transmitted syndrome.
pub fn systematic_parity_check() -> BitMatrix {
    matrix(&[
        "1000000010",
        "0100000001",
        "0010000011",
        "0001000000",
        "0000100010",
        "0000010001",
        "0000001011",
        "0000000100",
    ])
}

pub fn source() -> BitVector {
    vector("1001100100")
}

pub fn side_information() -> BitVector {
    vector("1011100101")
}

pub fn expected_codeword() -> BitVector {
    vector("1010100110")
}

pub fn expected_message() -> BitVector {
    vector("0010")
}

pub fn expected_intermediate() -> BitVector {
    vector("11110010")
}

pub fn expected_z2() -> BitVector {
    vector("11")
}

pub fn expected_total_syndrome() -> BitVector {
    vector("00000011")
}

/// The four words sharing the total syndrome, in printed order a, b, c, d.
pub fn expected_coset() -> [BitVector; 4] {
    [
        vector("0000001100"),
        vector("0110010101"),
        vector("1010100110"),
        vector("1100111111"),
    ]
}

pub const N: usize = 10;
pub const M: usize = 8;
pub const K1: usize = 4;
pub const K2: usize = 2;
