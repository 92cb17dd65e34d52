//! Bit files and code directories.
//!
//! A bit file holds one word per line as ASCII `0`/`1`; blank lines and lines
//! starting with `#` are skipped. A code directory holds `H.txt`, `H1.txt`,
//! `H2.txt` and `G1.txt` in the sparse interchange format plus
//! `manifest.json`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use wz_core::builder::{CodeParams, CompoundCode};
use wz_core::gf2::io::{read_sparse, write_sparse};
use wz_core::gf2::{BitMatrix, BitVector};

use crate::Failure;

pub const MANIFEST_FORMAT: &str = "wz-code v1";
const MATRICES: [&str; 4] = ["H", "H1", "H2", "G1"];

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub params: CodeParams,
    pub dist: String,
    pub seed: u64,
    pub invariants_hold: bool,
    /// Full build report; absent for fixture codes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<serde_json::Value>,
}

pub fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::runtime(format!("cannot read {}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::runtime(format!("cannot write {}: {e}", path.display())))
}

pub fn parse_bit_words(text: &str, source: &str) -> Result<Vec<BitVector>, Failure> {
    let mut words = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(bad) = line.chars().find(|c| !matches!(c, '0' | '1')) {
            return Err(Failure::validation(format!(
                "{source} line {}: unexpected character {bad:?}",
                i + 1
            )));
        }
        words.push(BitVector::parse_ascii(line).expect("checked characters"));
    }
    Ok(words)
}

pub fn format_bit_words(words: &[BitVector]) -> String {
    let mut out = String::new();
    for w in words {
        out.push_str(&w.to_string());
        out.push('\n');
    }
    out
}

pub fn read_bit_words(path: &Path, len: usize) -> Result<Vec<BitVector>, Failure> {
    let words = parse_bit_words(&read_text(path)?, &path.display().to_string())?;
    if let Some((i, w)) = words.iter().enumerate().find(|(_, w)| w.len() != len) {
        return Err(Failure::validation(format!(
            "{} word {} has {} bits, expected {len}",
            path.display(),
            i + 1,
            w.len()
        )));
    }
    Ok(words)
}

pub fn write_code(dir: &Path, code: &CompoundCode, manifest: &Manifest) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::runtime(format!("cannot create {}: {e}", dir.display())))?;
    let mats = [code.h(), code.h1(), code.h2(), code.g1()];
    for (name, m) in MATRICES.iter().zip(mats) {
        write_text(&dir.join(format!("{name}.txt")), &write_sparse(m))?;
    }
    let json = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    write_text(&dir.join("manifest.json"), &(json + "\n"))
}

pub fn read_code(dir: &Path) -> Result<(CompoundCode, Manifest), Failure> {
    let path = dir.join("manifest.json");
    let manifest: Manifest = serde_json::from_str(&read_text(&path)?)
        .map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?;
    if manifest.format != MANIFEST_FORMAT {
        return Err(Failure::validation(format!(
            "{}: format {:?}, expected {MANIFEST_FORMAT:?}",
            path.display(),
            manifest.format
        )));
    }
    let mut mats: Vec<BitMatrix> = Vec::with_capacity(4);
    for name in MATRICES {
        let path = dir.join(format!("{name}.txt"));
        let m = read_sparse(&read_text(&path)?).map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?;
        mats.push(m);
    }
    let g1 = mats.pop().unwrap();
    let h2 = mats.pop().unwrap();
    let h1 = mats.pop().unwrap();
    let h = mats.pop().unwrap();
    let code = CompoundCode::from_parts(manifest.params, h, h1, h2, g1)
        .map_err(|e| Failure::validation(format!("{}: {e}", dir.display())))?;
    Ok((code, manifest))
}
