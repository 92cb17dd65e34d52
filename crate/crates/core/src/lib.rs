//! Binary Wyner-Ziv coding with compound LDGM-LDPC codes.
//!
//! The encoder quantizes a source word onto an LDGM code with bias
//! propagation and sends the syndrome of the quantized word with respect to
//! the extra parity checks of a nested LDPC code. The decoder runs syndrome
//! sum-product decoding against its side information.

pub mod bip;
pub mod builder;
pub mod codec;
pub mod degree;
pub mod experiment;
pub mod fixtures;
pub mod gf2;
pub mod seed;
pub mod sp;
pub mod verify;
