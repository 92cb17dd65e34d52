//! Monte-Carlo rate-distortion experiments.
//!
//! A run first encodes every trial, then decodes every trial with the
//! crossover `p * mean(d1)` taken over the whole run. Trials are keyed by
//! `(master_seed, index)` and reduced in index order, so results do not depend
//! on the worker count.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bip::BipParams;
use crate::builder::{build_compound, BuildError, BuildReport, CodeParams, CompoundCode};
use crate::codec::{self, Codec, CodecError, Quantizer, RateDistortionPoint};
use crate::degree::{Catalog, DegreeError};
use crate::gf2::BitVector;
use crate::seed;
use crate::sp::SpParams;

/// Profile id selecting the embedded worked-example code.
pub const EXAMPLE_PROFILE: &str = "example";
pub const CSV_VERSION: &str = "# wz-results v1";
pub const CSV_HEADER: &str = "code_id,n,m,k1,k2,zeta,p,R1,R2,Rt,d1,d2,Dt,Dt_pred,Dwz,gap,trials,failures,seed";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("experiment '{name}': {message}")]
    Invalid { name: String, message: String },
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Degree(#[from] DegreeError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpOverrides {
    pub max_iter: Option<usize>,
    /// Fixed decoder crossover instead of `p * d1`.
    pub crossover: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    /// Catalog id of the degree distribution, or `example`.
    pub dist_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code: Option<CodeParams>,
    pub p: f64,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub bip: BipParams,
    #[serde(default)]
    pub sp: SpOverrides,
    /// Use exhaustive search instead of BiP (small codes only).
    #[serde(default)]
    pub exhaustive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub experiments: Vec<ExperimentConfig>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<ConfigFile, ExperimentError> {
        let file: ConfigFile = serde_json::from_str(text).map_err(|e| ExperimentError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        for exp in &file.experiments {
            exp.validate()?;
        }
        Ok(file)
    }
}

impl ExperimentConfig {
    fn invalid(&self, message: impl Into<String>) -> ExperimentError {
        ExperimentError::Invalid {
            name: self.name.clone(),
            message: message.into(),
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.trials == 0 {
            return Err(self.invalid("trials must be at least 1"));
        }
        if !(0.0..0.5).contains(&self.p) {
            return Err(self.invalid(format!("p = {} outside [0, 0.5)", self.p)));
        }
        if self.dist_id == EXAMPLE_PROFILE {
            return Ok(());
        }
        let Some(params) = &self.code else {
            return Err(self.invalid("missing code parameters"));
        };
        let report = crate::builder::validate_params(params);
        if !report.all_hold() {
            let failed: Vec<String> = report
                .failures()
                .iter()
                .map(|c| format!("{} ({})", c.name, c.detail))
                .collect();
            return Err(self.invalid(failed.join("; ")));
        }
        if Catalog::builtin().get(&self.dist_id).is_err() {
            return Err(self.invalid(format!("unknown degree distribution '{}'", self.dist_id)));
        }
        Ok(())
    }

    /// The code this experiment runs on, built from `master_seed`.
    pub fn build_code(&self) -> Result<(CompoundCode, Option<BuildReport>), ExperimentError> {
        self.validate()?;
        if self.dist_id == EXAMPLE_PROFILE {
            return Ok((CompoundCode::example(), None));
        }
        let params = self.code.expect("validated");
        let catalog = Catalog::builtin();
        let entry = catalog.get(&self.dist_id)?;
        let (code, report) = build_compound(&params, &entry.distribution, self.master_seed)?;
        Ok((code, Some(report)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    pub index: usize,
    pub d1: f64,
    pub d2: f64,
    pub dt: f64,
    pub converged: bool,
    pub sp_iters: usize,
    pub bip_rounds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub name: String,
    pub dist_id: String,
    pub params: CodeParams,
    pub p: f64,
    pub r1: f64,
    pub r2: f64,
    pub rt: f64,
    pub d1: f64,
    pub d2: f64,
    pub dt: f64,
    /// `d1 * d2` by binary convolution.
    pub dt_pred: f64,
    pub dwz: f64,
    pub gap: f64,
    pub crossover: f64,
    pub trials: usize,
    pub failures: usize,
    pub seed: u64,
    pub per_trial: Vec<TrialResult>,
}

impl ExperimentResult {
    pub fn point(&self) -> RateDistortionPoint {
        RateDistortionPoint {
            rt: self.rt,
            dt: self.dt,
            d1: self.d1,
            d2: self.d2,
            dwz: self.dwz,
            gap: self.gap,
        }
    }

    pub fn csv_row(&self) -> String {
        let c = &self.params;
        format!(
            "{},{},{},{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{},{},{}",
            self.dist_id,
            c.n,
            c.m,
            c.k1,
            c.k2,
            c.zeta,
            self.p,
            self.r1,
            self.r2,
            self.rt,
            self.d1,
            self.d2,
            self.dt,
            self.dt_pred,
            self.dwz,
            self.gap,
            self.trials,
            self.failures,
            self.seed
        )
    }
}

pub fn results_csv(results: &[ExperimentResult]) -> String {
    let mut out = format!("{CSV_VERSION}\n{CSV_HEADER}\n");
    for r in results {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// Bound samples `D R` on `[0, p]`, then the achieved `(Dt, Rt)` points as a
/// second block.
pub fn plot_data(p: f64, samples: usize, points: &[RateDistortionPoint]) -> Result<String, CodecError> {
    let (db, rb) = codec::wz_boundary(p)?;
    let mut out = format!("# wz-plot v1 p={p}\n# boundary D={db:.6} R={rb:.6}\n# bound\n");
    let samples = samples.max(2);
    for i in 0..samples {
        let d = p * (i as f64 / (samples - 1) as f64);
        let _ = writeln!(out, "{d:.6} {:.6}", codec::wz_rate(p, d)?);
    }
    out.push_str("\n\n# achieved\n");
    for pt in points {
        let _ = writeln!(out, "{:.6} {:.6}", pt.dt, pt.rt);
    }
    Ok(out)
}

struct Encoded {
    x: BitVector,
    z2: BitVector,
    j: BitVector,
    s: BitVector,
    d1: f64,
    rounds: usize,
}

fn trial_seed(master: u64, index: usize) -> u64 {
    seed::derive_seed(master, (1u64 << 40) + index as u64)
}

/// Runs `job` over `0..count` on `workers` threads, returning results in
/// index order.
fn fan_out<T: Send>(
    count: usize,
    workers: usize,
    job: impl Fn(usize) -> Result<T, ExperimentError> + Sync,
) -> Result<Vec<T>, ExperimentError> {
    let workers = workers.clamp(1, count.max(1));
    if workers == 1 {
        return (0..count).map(job).collect();
    }
    let slots: Vec<Mutex<Option<Result<T, ExperimentError>>>> = (0..count).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= count {
                    break;
                }
                let out = job(i);
                *slots[i].lock().expect("slot lock") = Some(out);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().expect("slot lock").expect("every slot filled"))
        .collect()
}

/// Progress callback: `(phase, completed, total)`.
pub type Progress<'a> = &'a (dyn Fn(&str, usize, usize) + Sync);

pub fn run_experiment(
    config: &ExperimentConfig,
    code: &CompoundCode,
    workers: usize,
    progress: Option<Progress>,
) -> Result<ExperimentResult, ExperimentError> {
    config.validate()?;
    let codec = Codec::new(code);
    let n = code.n();
    let quantizer = if config.exhaustive {
        Quantizer::Exhaustive
    } else {
        Quantizer::Bip(config.bip)
    };
    let done = AtomicUsize::new(0);
    let tick = |phase: &str| {
        let k = done.fetch_add(1, Ordering::Relaxed) + 1;
        if let Some(cb) = progress {
            cb(phase, k, config.trials);
        }
    };

    let encoded = fan_out(config.trials, workers, |i| {
        let ts = trial_seed(config.master_seed, i);
        let mut src = seed::stream(ts, 0);
        let s_bits: Vec<bool> = (0..n).map(|_| src.gen_bool(0.5)).collect();
        let mut noise = seed::stream(ts, 1);
        let j_bits: Vec<bool> = s_bits
            .iter()
            .map(|&b| b ^ (config.p > 0.0 && noise.gen_bool(config.p)))
            .collect();
        let s = BitVector::from_bools(&s_bits);
        let enc = codec.encode(&s, &quantizer, seed::derive_seed(ts, 2))?;
        tick("encode");
        Ok(Encoded {
            j: BitVector::from_bools(&j_bits),
            s,
            x: enc.x,
            z2: enc.z2,
            d1: enc.d1,
            rounds: enc.diagnostics.rounds,
        })
    })?;

    let mean_d1 = encoded.iter().map(|e| e.d1).sum::<f64>() / config.trials as f64;
    let crossover = match config.sp.crossover {
        Some(q) => q,
        None => codec::effective_crossover(config.p, mean_d1)?,
    };
    let sp = SpParams {
        max_iter: config.sp.max_iter.unwrap_or(100),
        crossover,
    };
    done.store(0, Ordering::Relaxed);
    let per_trial = fan_out(config.trials, workers, |i| {
        let e = &encoded[i];
        let out = codec.decode(&e.z2, &e.j, &sp)?;
        tick("decode");
        let dist = |a: &BitVector, b: &BitVector| a.hamming_distance(b).expect("length n") as f64 / n as f64;
        Ok(TrialResult {
            index: i,
            d1: e.d1,
            d2: dist(&e.x, &out.s_hat),
            dt: dist(&e.s, &out.s_hat),
            converged: out.converged,
            sp_iters: out.iters,
            bip_rounds: e.rounds,
        })
    })?;

    let mean = |f: fn(&TrialResult) -> f64| per_trial.iter().map(f).sum::<f64>() / config.trials as f64;
    let (d1, d2, dt) = (mean(|t| t.d1), mean(|t| t.d2), mean(|t| t.dt));
    let params = *code.params();
    let rt = params.rt();
    let dwz = if config.p > 0.0 {
        codec::wz_distortion(config.p, rt)?
    } else {
        0.0
    };
    Ok(ExperimentResult {
        name: config.name.clone(),
        dist_id: config.dist_id.clone(),
        params,
        p: config.p,
        r1: params.r1(),
        r2: params.r2(),
        rt,
        d1,
        d2,
        dt,
        dt_pred: codec::binary_convolve(d1, d2)?,
        dwz,
        gap: dt - dwz,
        crossover,
        trials: config.trials,
        failures: per_trial.iter().filter(|t| !t.converged).count(),
        seed: config.master_seed,
        per_trial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_config(p: f64, trials: usize) -> ExperimentConfig {
        ExperimentConfig {
            name: "example".into(),
            dist_id: EXAMPLE_PROFILE.into(),
            code: None,
            p,
            trials,
            master_seed: 9,
            bip: BipParams::default(),
            sp: SpOverrides::default(),
            exhaustive: true,
        }
    }

    fn small_config(trials: usize) -> ExperimentConfig {
        ExperimentConfig {
            name: "small".into(),
            dist_id: "reg-7-8".into(),
            code: Some(CodeParams {
                n: 200,
                m: 190,
                k1: 40,
                k2: 120,
                zeta: 3,
                poisson_lambda: 12.0,
                i_max: 30,
            }),
            p: 0.05,
            trials,
            master_seed: 5,
            bip: BipParams::default(),
            sp: SpOverrides::default(),
            exhaustive: false,
        }
    }

    #[test]
    fn noiseless_decoding_never_exceeds_d1() {
        // With j = s the decoder returns the coset word nearest to s, which
        // is x or something closer.
        let cfg = example_config(0.0, 12);
        let (code, _) = cfg.build_code().unwrap();
        let res = run_experiment(&cfg, &code, 1, None).unwrap();
        for t in &res.per_trial {
            assert!(t.dt <= t.d1, "{t:?}");
        }
    }

    #[test]
    fn rates_follow_dimensions() {
        let cfg = small_config(2);
        let (code, report) = cfg.build_code().unwrap();
        assert!(report.unwrap().all_hold());
        let res = run_experiment(&cfg, &code, 1, None).unwrap();
        assert_eq!(res.r1, 150.0 / 200.0);
        assert_eq!(res.r2, 30.0 / 200.0);
        assert_eq!(res.rt, 120.0 / 200.0);
        assert!((res.r1 - res.r2 - res.rt).abs() < 1e-15);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let cfg = small_config(4);
        let (code, _) = cfg.build_code().unwrap();
        let one = run_experiment(&cfg, &code, 1, None).unwrap();
        let three = run_experiment(&cfg, &code, 3, None).unwrap();
        assert_eq!(one, three);
        assert_eq!(results_csv(&[one]), results_csv(&[three]));
    }

    #[test]
    fn converged_runs_match_the_prediction() {
        let cfg = small_config(6);
        let (code, _) = cfg.build_code().unwrap();
        let res = run_experiment(&cfg, &code, 1, None).unwrap();
        if res.failures == 0 {
            assert!((res.dt - res.dt_pred).abs() <= 0.01, "{} vs {}", res.dt, res.dt_pred);
        }
        assert_eq!(res.per_trial.len(), 6);
    }

    #[test]
    fn csv_shape() {
        let cfg = example_config(0.25, 2);
        let (code, _) = cfg.build_code().unwrap();
        let res = run_experiment(&cfg, &code, 1, None).unwrap();
        let csv = results_csv(&[res]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_VERSION);
        assert_eq!(lines[1], CSV_HEADER);
        assert_eq!(lines[2].split(',').count(), CSV_HEADER.split(',').count());
    }

    #[test]
    fn plot_data_endpoints() {
        let text = plot_data(0.25, 11, &[]).unwrap();
        let rows: Vec<(f64, f64)> = text
            .lines()
            .filter(|l| !l.starts_with('#') && !l.is_empty())
            .map(|l| {
                let mut it = l.split_whitespace().map(|v| v.parse::<f64>().unwrap());
                (it.next().unwrap(), it.next().unwrap())
            })
            .collect();
        assert_eq!(rows.len(), 11);
        assert!((rows[0].1 - 0.811278).abs() < 1e-6);
        assert_eq!(rows[10], (0.25, 0.0));
        assert!(text.contains("D=0.088"));
    }

    #[test]
    fn config_errors_are_anchored() {
        let err = ConfigFile::parse("{\n  \"experiments\": [\n    {\"name\": 3}\n  ]\n}").unwrap_err();
        match err {
            ExperimentError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("{other}"),
        }
        let mut bad = small_config(1);
        bad.trials = 0;
        assert!(bad.validate().is_err());
        let mut bad = small_config(1);
        bad.dist_id = "nope".into();
        assert!(bad.validate().is_err());
        let mut bad = small_config(1);
        bad.code.as_mut().unwrap().k2 = 10;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn config_round_trips() {
        let file = ConfigFile {
            experiments: vec![small_config(3), example_config(0.1, 2)],
        };
        let text = serde_json::to_string_pretty(&file).unwrap();
        assert_eq!(ConfigFile::parse(&text).unwrap(), file);
    }
}
