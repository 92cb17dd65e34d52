use std::fmt::Write as _;

use super::{parse_polynomial, normalize_side, DegreeDistribution, DegreeError};

const BUILTIN: &str = include_str!("../../data/catalog.txt");

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub id: String,
    pub distribution: DegreeDistribution,
    /// Listed parity-check row ratio.
    pub one_minus_r2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
}

impl Catalog {
    /// The shipped irregular codes 1-5, 11, 13, 14 and the regular
    /// profiles `reg-9-10`, `reg-7-8`, `reg-3-10`.
    pub fn builtin() -> Catalog {
        Catalog::parse(BUILTIN).expect("shipped catalog parses")
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn get(&self, id: &str) -> Result<&CatalogEntry, DegreeError> {
        self.entries
            .iter()
            .find(|e| e.id == id)
            .ok_or_else(|| DegreeError::UnknownEntry(id.to_string()))
    }

    pub fn parse(text: &str) -> Result<Catalog, DegreeError> {
        let mut entries = Vec::new();
        let mut cur: Option<Pending> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let l = raw.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            let perr = |message: String| DegreeError::Parse { line, message };
            if let Some(id) = l.strip_prefix("code ") {
                if let Some(p) = cur.take() {
                    entries.push(p.finish()?);
                }
                let id = id.trim();
                if id.is_empty() {
                    return Err(perr("empty code id".into()));
                }
                if entries.iter().any(|e: &CatalogEntry| e.id == id) {
                    return Err(perr(format!("duplicate code id {id:?}")));
                }
                cur = Some(Pending {
                    id: id.to_string(),
                    line,
                    lambda: None,
                    rho: None,
                    header: None,
                });
                continue;
            }
            let p = cur
                .as_mut()
                .ok_or_else(|| perr("field before any `code <id>` line".into()))?;
            if let Some(rest) = l.strip_prefix("lambda:") {
                p.lambda = Some((parse_polynomial(rest, line)?, line));
            } else if let Some(rest) = l.strip_prefix("rho:") {
                p.rho = Some((parse_polynomial(rest, line)?, line));
            } else if let Some(rest) = l.strip_prefix("one_minus_r2:") {
                let v: f64 = rest
                    .trim()
                    .parse()
                    .map_err(|_| perr(format!("bad one_minus_r2 value {:?}", rest.trim())))?;
                if !(v > 0.0 && v < 1.0) {
                    return Err(perr(format!("one_minus_r2 {v} outside (0, 1)")));
                }
                p.header = Some(v);
            } else {
                return Err(perr(format!("unrecognized line {l:?}")));
            }
        }
        if let Some(p) = cur.take() {
            entries.push(p.finish()?);
        }
        Ok(Catalog { entries })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let expr = e.distribution.to_expr();
            let (l, r) = expr.split_once(" | ").expect("expr has two sides");
            let _ = writeln!(out, "code {}\nlambda: {l}\nrho: {r}\none_minus_r2: {}\n", e.id, e.one_minus_r2);
        }
        out
    }
}

struct Pending {
    id: String,
    line: usize,
    lambda: Option<(Vec<(usize, f64)>, usize)>,
    rho: Option<(Vec<(usize, f64)>, usize)>,
    header: Option<f64>,
}

impl Pending {
    fn finish(self) -> Result<CatalogEntry, DegreeError> {
        let missing = |what: &str| DegreeError::Parse {
            line: self.line,
            message: format!("code {} is missing `{what}`", self.id),
        };
        let (lambda, ll) = self.lambda.clone().ok_or_else(|| missing("lambda:"))?;
        let (rho, rl) = self.rho.clone().ok_or_else(|| missing("rho:"))?;
        let one_minus_r2 = self.header.ok_or_else(|| missing("one_minus_r2:"))?;
        Ok(CatalogEntry {
            id: self.id,
            distribution: DegreeDistribution {
                lambda: normalize_side("lambda", lambda, ll)?,
                rho: normalize_side("rho", rho, rl)?,
            },
            one_minus_r2,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_has_all_entries() {
        let c = Catalog::builtin();
        let ids: Vec<&str> = c.entries().iter().map(|e| e.id.as_str()).collect();
        assert_eq!(
            ids,
            ["1", "2", "3", "4", "5", "11", "13", "14", "reg-9-10", "reg-7-8", "reg-3-10"]
        );
    }

    #[test]
    fn code_one_shape() {
        let c = Catalog::builtin();
        let d = &c.get("1").unwrap().distribution;
        assert_eq!(d.lambda().len(), 14);
        assert_eq!(d.rho().len(), 2);
        assert_eq!(d.lambda()[0].0, 2);
        assert_eq!(d.lambda()[13].0, 100);
        assert_eq!(d.rho(), &[(4, 0.8), (5, 0.2)]);
        let s: f64 = d.lambda().iter().map(|t| t.1).sum();
        assert!((s - 1.0).abs() < 1e-4);
    }

    #[test]
    fn regular_design_rates() {
        let c = Catalog::builtin();
        for e in c.entries().iter().filter(|e| e.id.starts_with("reg")) {
            assert!((e.distribution.check_ratio() - e.one_minus_r2).abs() < 1e-12, "{}", e.id);
        }
    }

    #[test]
    fn text_round_trip() {
        let c = Catalog::builtin();
        let again = Catalog::parse(&c.to_text()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn unknown_id_and_bad_blocks() {
        assert!(matches!(
            Catalog::builtin().get("99"),
            Err(DegreeError::UnknownEntry(_))
        ));
        let err = Catalog::parse("code a\nlambda: 1.0 x^2\none_minus_r2: 0.5\n").unwrap_err();
        assert!(err.to_string().contains("rho"), "{err}");
        let err = Catalog::parse("lambda: 1.0 x^2\n").unwrap_err();
        assert!(matches!(err, DegreeError::Parse { line: 1, .. }));
        let err = Catalog::parse("code a\nlambda: 1.0 x^2\nrho: 1.0 x^3\nfoo\n").unwrap_err();
        assert!(matches!(err, DegreeError::Parse { line: 4, .. }));
    }
}
