use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use wz_core::bip::BipParams;
use wz_core::builder::{self, validate_params, BuildError, CodeParams, CompoundCode};
use wz_core::codec::{self, Codec, CodecError, Quantizer};
use wz_core::degree::{Catalog, CatalogEntry};
use wz_core::experiment::{
    plot_data, results_csv, run_experiment, ConfigFile, ExperimentError, ExperimentResult, EXAMPLE_PROFILE,
};
use wz_core::seed::derive_seed;
use wz_core::sp::SpParams;
use wz_core::verify::verify_example;

use crate::args::{BoundArgs, BuildArgs, DecodeArgs, QuantizeArgs, RunArgs};
use crate::files::{self, Manifest, MANIFEST_FORMAT};
use crate::Failure;

pub struct Globals {
    pub seed: Option<u64>,
    pub workers: usize,
    pub out: Option<PathBuf>,
}

impl Globals {
    fn emit(&self, text: &str) -> Result<(), Failure> {
        match &self.out {
            Some(path) => files::write_text(path, text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

impl From<BuildError> for Failure {
    fn from(e: BuildError) -> Failure {
        match e {
            BuildError::Params(_) | BuildError::Degree(_) => Failure::validation(e.to_string()),
            _ => Failure::runtime(e.to_string()),
        }
    }
}

impl From<CodecError> for Failure {
    fn from(e: CodecError) -> Failure {
        match e {
            CodecError::Domain { .. } | CodecError::Length(_) => Failure::validation(e.to_string()),
            _ => Failure::runtime(e.to_string()),
        }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Failure {
        match e {
            ExperimentError::Build(b) => b.into(),
            ExperimentError::Codec(c) => c.into(),
            other => Failure::validation(other.to_string()),
        }
    }
}

fn lookup_dist(spec: &str) -> Result<CatalogEntry, Failure> {
    let builtin = Catalog::builtin();
    if let Ok(entry) = builtin.get(spec) {
        return Ok(entry.clone());
    }
    let path = Path::new(spec);
    if !path.exists() {
        let ids: Vec<&str> = builtin.entries().iter().map(|e| e.id.as_str()).collect();
        return Err(Failure::validation(format!(
            "--dist {spec:?} is neither a catalog id ({}) nor a file",
            ids.join(", ")
        )));
    }
    let catalog = Catalog::parse(&files::read_text(path)?)
        .map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?;
    match catalog.entries() {
        [only] => Ok(only.clone()),
        entries => Err(Failure::validation(format!(
            "{} holds {} entries; pass a file with exactly one",
            path.display(),
            entries.len()
        ))),
    }
}

pub fn build(args: &BuildArgs, g: &Globals) -> Result<(), Failure> {
    let dir = g
        .out
        .as_deref()
        .ok_or_else(|| Failure::usage("build needs --out <dir>"))?;
    let seed = g.seed.unwrap_or(0);
    if args.dist == EXAMPLE_PROFILE {
        let code = CompoundCode::example();
        let manifest = Manifest {
            format: MANIFEST_FORMAT.into(),
            params: *code.params(),
            dist: EXAMPLE_PROFILE.into(),
            seed,
            invariants_hold: true,
            report: None,
        };
        files::write_code(dir, &code, &manifest)?;
        eprintln!("wrote the ten-bit example code to {}", dir.display());
        return Ok(());
    }
    let (Some(n), Some(m), Some(k1), Some(k2)) = (args.n, args.m, args.k1, args.k2) else {
        return Err(Failure::usage("build needs --n, --m, --k1 and --k2"));
    };
    let params = CodeParams {
        n,
        m,
        k1,
        k2,
        zeta: args.zeta,
        poisson_lambda: args.poisson_lambda,
        i_max: args.imax,
    };
    let check = validate_params(&params);
    if !check.all_hold() {
        let failed: Vec<String> = check
            .failures()
            .iter()
            .map(|c| format!("{}: {}", c.name, c.detail))
            .collect();
        return Err(Failure::validation(format!("invalid code parameters\n  {}", failed.join("\n  "))));
    }
    let entry = lookup_dist(&args.dist)?;
    let start = Instant::now();
    let (code, report) = builder::build_compound(&params, &entry.distribution, seed)?;
    let manifest = Manifest {
        format: MANIFEST_FORMAT.into(),
        params,
        dist: entry.id.clone(),
        seed,
        invariants_hold: report.all_hold(),
        report: Some(serde_json::to_value(&report).expect("report serializes")),
    };
    files::write_code(dir, &code, &manifest)?;
    eprintln!(
        "built n={n} R1={:.4} R2={:.4} Rt={:.4} in {:.1} s; invariants {}",
        params.r1(),
        params.r2(),
        params.rt(),
        start.elapsed().as_secs_f64(),
        if report.all_hold() { "hold" } else { "FAIL" }
    );
    for c in report.invariants.iter().filter(|c| !c.holds) {
        eprintln!("  {}: {}", c.name, c.detail);
    }
    Ok(())
}

fn quantizer(args: &QuantizeArgs) -> Result<Quantizer, Failure> {
    if args.exhaustive {
        return Ok(Quantizer::Exhaustive);
    }
    let params = BipParams {
        gamma: args.gamma,
        threshold: args.t,
        iters_per_round: args.iters,
        damping: args.damping,
        warm_start: args.warm_start,
    };
    params
        .validate()
        .map_err(|e| Failure::validation(e.to_string()))?;
    Ok(Quantizer::Bip(params))
}

/// Quantizes every word; `syndromes` selects `z2` output over `x`.
pub fn quantize(args: &QuantizeArgs, g: &Globals, syndromes: bool) -> Result<(), Failure> {
    let (code, _) = files::read_code(&args.code)?;
    let words = files::read_bit_words(&args.input, code.n())?;
    let q = quantizer(args)?;
    let codec = Codec::new(&code);
    let seed = g.seed.unwrap_or(0);
    let mut out = Vec::with_capacity(words.len());
    for (i, s) in words.iter().enumerate() {
        let enc = codec.encode(s, &q, derive_seed(seed, i as u64))?;
        let rounds = enc.diagnostics.rounds;
        eprintln!("word {}: d1 = {:.6}, rounds = {rounds}", i + 1, enc.d1);
        out.push(if syndromes { enc.z2 } else { enc.x });
    }
    g.emit(&files::format_bit_words(&out))
}

pub fn decode(args: &DecodeArgs, g: &Globals) -> Result<(), Failure> {
    let (code, manifest) = files::read_code(&args.code)?;
    let z2s = files::read_bit_words(&args.syndrome, manifest.params.k2)?;
    let sides = files::read_bit_words(&args.side, code.n())?;
    if z2s.len() != sides.len() {
        return Err(Failure::validation(format!(
            "{} syndromes but {} side-information words",
            z2s.len(),
            sides.len()
        )));
    }
    let sp = SpParams {
        max_iter: args.max_iter,
        crossover: codec::effective_crossover(args.p, args.d1)?,
    };
    let codec = Codec::new(&code);
    let mut out = Vec::with_capacity(z2s.len());
    for (i, (z2, j)) in z2s.iter().zip(&sides).enumerate() {
        let dec = codec.decode(z2, j, &sp)?;
        if dec.converged {
            eprintln!("word {}: converged after {} iterations", i + 1, dec.iters);
        } else {
            eprintln!("word {}: no convergence in {} iterations", i + 1, dec.iters);
        }
        out.push(dec.s_hat);
    }
    g.emit(&files::format_bit_words(&out))
}

pub fn run(args: &RunArgs, g: &Globals) -> Result<(), Failure> {
    let text = files::read_text(&args.config)?;
    let file = ConfigFile::parse(&text)
        .map_err(|e| Failure::validation(format!("{}: {e}", args.config.display())))?;
    let mut experiments = file.experiments;
    if !args.only.is_empty() {
        if let Some(missing) = args.only.iter().find(|n| !experiments.iter().any(|e| &e.name == *n)) {
            return Err(Failure::validation(format!("no experiment named {missing:?}")));
        }
        experiments.retain(|e| args.only.contains(&e.name));
    }
    for e in &mut experiments {
        if let Some(seed) = g.seed {
            e.master_seed = seed;
        }
        if let Some(t) = args.trials {
            e.trials = t;
        }
        e.validate()?;
    }
    if let Some(dir) = &g.out {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::runtime(format!("cannot create {}: {e}", dir.display())))?;
    }

    let mut results: Vec<ExperimentResult> = Vec::new();
    let mut worst: Option<Failure> = None;
    for cfg in &experiments {
        let start = Instant::now();
        eprintln!("[{}] building", cfg.name);
        let outcome = cfg.build_code().map_err(Failure::from).and_then(|(code, report)| {
            if let Some(r) = report.filter(|r| !r.all_hold()) {
                let failed: Vec<&str> = r.invariants.iter().filter(|c| !c.holds).map(|c| c.name.as_str()).collect();
                return Err(Failure::runtime(format!("build invariants failed: {}", failed.join(", "))));
            }
            let name = cfg.name.clone();
            let progress = move |phase: &str, k: usize, total: usize| {
                if k == total || k.is_multiple_of((total / 10).max(1)) {
                    eprintln!("[{name}] {phase} {k}/{total}");
                }
            };
            Ok(run_experiment(cfg, &code, g.workers, Some(&progress))?)
        });
        match outcome {
            Ok(r) => {
                eprintln!(
                    "[{}] Rt={:.4} d1={:.4} d2={:.4} Dt={:.4} Dwz={:.4} in {:.1} s",
                    r.name,
                    r.rt,
                    r.d1,
                    r.d2,
                    r.dt,
                    r.dwz,
                    start.elapsed().as_secs_f64()
                );
                results.push(r);
            }
            Err(f) => {
                eprintln!("[{}] failed: {}", cfg.name, f.message);
                if worst.as_ref().is_none_or(|w| f.code > w.code) {
                    worst = Some(f);
                }
            }
        }
    }

    let csv = results_csv(&results);
    match &g.out {
        Some(dir) => {
            files::write_text(&dir.join("results.csv"), &csv)?;
            let mut by_p: BTreeMap<String, (f64, Vec<_>)> = BTreeMap::new();
            for r in &results {
                by_p.entry(format!("{}", r.p)).or_insert((r.p, Vec::new())).1.push(r.point());
            }
            for (label, (p, points)) in by_p {
                if p > 0.0 {
                    files::write_text(&dir.join(format!("plot-p{label}.dat")), &plot_data(p, 200, &points)?)?;
                }
            }
        }
        None => print!("{csv}"),
    }
    match worst {
        Some(f) => Err(Failure {
            code: f.code,
            message: format!("{} of {} experiments failed", experiments.len() - results.len(), experiments.len()),
        }),
        None => Ok(()),
    }
}

pub fn bound(args: &BoundArgs, g: &Globals) -> Result<(), Failure> {
    if !(args.p > 0.0 && args.p <= 0.5) {
        return Err(Failure::validation(format!("--p {} outside (0, 0.5]", args.p)));
    }
    g.emit(&plot_data(args.p, args.samples, &[])?)
}

pub fn verify(g: &Globals) -> Result<(), Failure> {
    let start = Instant::now();
    let checks = verify_example();
    let mut report = String::new();
    for c in &checks {
        report.push_str(&format!("{} {}: {}\n", if c.holds { "ok  " } else { "FAIL" }, c.name, c.detail));
    }
    let failed = checks.iter().filter(|c| !c.holds).count();
    report.push_str(&format!(
        "{}/{} values reproduced in {:.1} ms\n",
        checks.len() - failed,
        checks.len(),
        start.elapsed().as_secs_f64() * 1e3
    ));
    g.emit(&report)?;
    if failed > 0 {
        return Err(Failure::runtime(format!("{failed} example values differ")));
    }
    Ok(())
}
