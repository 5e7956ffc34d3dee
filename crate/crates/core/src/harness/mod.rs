//! Batch driver: configured scans, their CSV reports and JSON verdicts.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

pub mod config;
pub mod fit;
pub mod scans;

pub use config::{BesovConfig, CrossSectionKind, ModelConfig, RunConfig, ScanConfig, Tolerances};
pub use fit::{fit_loglog, log_grid, LogLogFit};
pub use scans::{ScanOutput, Table, Verdict};

use crate::cross_section::{check_hypothesis, ConeModel, HypothesisReport};
use crate::error::{ConeError, Result};
use crate::lp_theory::BesovParams;
use scans::LpScan;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    CheckHypothesis,
    DistanceSpectrum,
    Weber,
    Hankel,
    Heat,
    SchrodingerDecay,
    HalfwaveDecay,
    PoissonDecay,
    Bernstein,
    Square,
    Besov,
    Report,
}

impl Command {
    pub const ALL: [Command; 13] = [
        Command::Spectrum,
        Command::CheckHypothesis,
        Command::DistanceSpectrum,
        Command::Weber,
        Command::Hankel,
        Command::Heat,
        Command::SchrodingerDecay,
        Command::HalfwaveDecay,
        Command::PoissonDecay,
        Command::Bernstein,
        Command::Square,
        Command::Besov,
        Command::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::CheckHypothesis => "check-hypothesis",
            Command::DistanceSpectrum => "distance-spectrum",
            Command::Weber => "weber",
            Command::Hankel => "hankel",
            Command::Heat => "heat",
            Command::SchrodingerDecay => "schrodinger-decay",
            Command::HalfwaveDecay => "halfwave-decay",
            Command::PoissonDecay => "poisson-decay",
            Command::Bernstein => "bernstein",
            Command::Square => "square",
            Command::Besov => "besov",
            Command::Report => "report",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = ConeError;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| ConeError::Config(format!("unknown command {s}")))
    }
}

/// The JSON verdict written next to each CSV.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub command: String,
    pub slope: Option<f64>,
    pub slope_target: Option<f64>,
    pub pass: bool,
    pub constant: Option<f64>,
    pub max_ratio: Option<f64>,
    pub config_hash: String,
    /// "pass", "fail", "partial" or "outside theorem hypotheses".
    pub verdict: String,
    pub partial: bool,
    pub extra: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
struct Metadata<'a> {
    command: &'a str,
    config_hash: String,
    crate_version: &'static str,
    unix_time: u64,
    threads: usize,
    seed: u64,
    tolerances: Tolerances,
    hypothesis: Option<HypothesisReport>,
}

/// Worker count from CONELAB_THREADS, if set to a positive integer.
pub fn configured_threads() -> Result<Option<usize>> {
    match std::env::var("CONELAB_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(ConeError::Config(format!("CONELAB_THREADS must be a positive integer, got {v:?}"))),
        },
    }
}

/// Runs a command with outputs in `out`. Relative paths in the config
/// resolve against `base`. A failed verdict is not an error; an aborted scan
/// is, after a partial summary has been written.
pub fn run(command: Command, cfg: &RunConfig, base: Option<&Path>, out: &Path) -> Result<Summary> {
    std::fs::create_dir_all(out).map_err(|e| io_context(e, format!("creating {}", out.display())))?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = configured_threads()? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| ConeError::Config(format!("thread pool: {e}")))?;
    let threads = pool.current_num_threads();
    pool.install(|| run_in_pool(command, cfg, base, out, threads))
}

fn run_in_pool(command: Command, cfg: &RunConfig, base: Option<&Path>, out: &Path, threads: usize) -> Result<Summary> {
    let hash = cfg.hash();
    if command == Command::Report {
        return report(out, &hash);
    }
    let model = cfg.model.build(base)?;
    let hypothesis = check_hypothesis(&model);
    let meta = Metadata {
        command: command.name(),
        config_hash: hash.clone(),
        crate_version: env!("CARGO_PKG_VERSION"),
        unix_time: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        threads,
        seed: cfg.seed,
        tolerances: cfg.tolerances,
        hypothesis: Some(hypothesis),
    };
    write_json(&out.join(format!("{command}_metadata.json")), &meta)?;
    let outside = hypothesis.rconj.is_some() && !hypothesis.rconj_ok;
    if outside {
        eprintln!("warning: conjugate radius of Y is at most pi; results are outside the theorem hypotheses");
    }
    let summary = match execute(command, cfg, &model) {
        Ok(o) => {
            write_text(&out.join(format!("{command}.csv")), &o.table.to_csv())?;
            let verdict = if outside {
                "outside theorem hypotheses"
            } else if o.verdict.pass {
                "pass"
            } else {
                "fail"
            };
            summary_from(command, &hash, o.verdict, verdict, None)
        }
        Err(e) => {
            let partial = matches!(e, ConeError::BudgetExceeded { .. });
            let s = summary_from(
                command,
                &hash,
                Verdict { pass: false, ..empty_verdict() },
                if partial { "partial" } else { "fail" },
                Some(e.to_string()),
            );
            let s = Summary { partial, ..s };
            write_json(&out.join(format!("{command}_summary.json")), &s)?;
            return Err(e);
        }
    };
    write_json(&out.join(format!("{command}_summary.json")), &summary)?;
    Ok(summary)
}

fn empty_verdict() -> Verdict {
    Verdict { slope: None, slope_target: None, pass: false, constant: None, max_ratio: None, extra: BTreeMap::new() }
}

fn summary_from(command: Command, hash: &str, v: Verdict, verdict: &str, error: Option<String>) -> Summary {
    Summary {
        command: command.name().to_string(),
        slope: v.slope,
        slope_target: v.slope_target,
        pass: v.pass,
        constant: v.constant,
        max_ratio: v.max_ratio,
        config_hash: hash.to_string(),
        verdict: verdict.to_string(),
        partial: false,
        extra: v.extra,
        error,
    }
}

fn lp_scan(cfg: &RunConfig, functions: usize) -> LpScan {
    let s = &cfg.scan;
    LpScan {
        j_window: s.j_window.unwrap_or([-6, 8]),
        band_range: s.band_range.unwrap_or([-3, 5]),
        functions: s.functions.unwrap_or(functions),
        data_nu_max: s.data_nu_max.unwrap_or(1.2),
        seed: cfg.seed,
    }
}

fn execute(command: Command, cfg: &RunConfig, model: &ConeModel) -> Result<ScanOutput> {
    let s = &cfg.scan;
    let tol = &cfg.tolerances;
    let rs = || s.r_samples.clone().unwrap_or_else(|| vec![0.25, 0.5, 1.0, 2.0, 4.0]);
    match command {
        Command::Spectrum => scans::spectrum_scan(model, s.weyl_modes.unwrap_or(500), tol.slope),
        Command::CheckHypothesis => Ok(scans::hypothesis_scan(model)),
        Command::DistanceSpectrum => scans::distance_scan(model, s.distance_cutoff.unwrap_or(PI)),
        Command::Weber => scans::weber_scan(tol.kernel),
        Command::Hankel => {
            let nus = s.nus.clone().unwrap_or_else(|| vec![0.5, 1.0, 2.3]);
            scans::hankel_scan(model, &nus, cfg.seed, s.data_nu_max.unwrap_or(2.0))
        }
        Command::Heat => {
            let sigmas = s.sigma_samples.clone().unwrap_or_else(|| vec![0.05, 0.3, 1.0, 4.0]);
            scans::heat_scan(model, &sigmas, &rs(), s.heat_width.unwrap_or(5.0), tol.kernel, tol.slope)
        }
        Command::SchrodingerDecay => match s.regime.as_deref().unwrap_or("dispersive") {
            "small-z" => scans::small_z_scan(model, s.z_range.unwrap_or([1e-3, 0.5]), s.z_count.unwrap_or(30), tol.kernel),
            "large-z" => scans::large_z_scan(
                model,
                s.z_range.unwrap_or([5.0, 100.0]),
                s.z_count.unwrap_or(400),
                20,
                s.nu_budget.unwrap_or(250.0),
                tol.kernel,
                tol.boundedness,
                tol.slope,
            ),
            "representation" => scans::representation_scan(model, tol.kernel),
            _ => {
                let ts = s.t_samples.clone().unwrap_or_else(|| (-4..=6).map(|k| 2f64.powi(k)).collect());
                let pairs = s.y_pairs.clone().unwrap_or_else(|| (0..8).collect());
                scans::dispersive_scan(model, &ts, &rs(), &pairs, tol.kernel, tol.slope)
            }
        },
        Command::HalfwaveDecay => {
            let js = s.j_values.clone().unwrap_or_else(|| vec![1, 2, 3]);
            scans::halfwave_scan(
                model,
                &js,
                s.phase_range.unwrap_or([1.0, 64.0]),
                s.phase_count.unwrap_or(7),
                tol.kernel.max(1e-8),
                tol.slope,
            )
        }
        Command::PoissonDecay => {
            let segs = s.s_segments.clone().unwrap_or_else(|| vec![[0.1, 2.0 * PI], [2.0 * PI, 30.0]]);
            scans::poisson_scan(model, &segs, s.s_count.unwrap_or(12), tol.kernel)
        }
        Command::Bernstein => {
            let js = s.j_range.unwrap_or([-2, 4]);
            scans::bernstein_scan(model, &lp_scan(cfg, 20), js, s.p.unwrap_or(4.0), s.q.unwrap_or(2.0), 10.0)
        }
        Command::Square => scans::square_scan(model, &lp_scan(cfg, 40), s.p.unwrap_or(4.0)),
        Command::Besov => {
            let b = s.besov.unwrap_or(BesovConfig { s: 0.5, p: 2.0, r: 2.0 });
            scans::besov_scan(model, &lp_scan(cfg, 5), BesovParams::new(b.s, b.p, b.r)?)
        }
        Command::Report => unreachable!("handled before the model is built"),
    }
}

/// Collects every summary in `out` into report.csv and report.json.
fn report(out: &Path, hash: &str) -> Result<Summary> {
    let mut rows = Vec::new();
    for c in Command::ALL {
        let path = out.join(format!("{c}_summary.json"));
        if let Ok(text) = std::fs::read_to_string(&path) {
            let v: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| ConeError::Config(format!("parsing {}: {e}", path.display())))?;
            rows.push((c, v));
        }
    }
    if rows.is_empty() {
        return Err(ConeError::InsufficientData(format!("no command summaries found in {}", out.display())));
    }
    let mut table =
        Table { header: vec!["command", "verdict", "pass", "slope", "slope_target", "max_ratio", "constant"], rows: Vec::new() };
    let field = |v: &serde_json::Value, k: &str| match &v[k] {
        serde_json::Value::Null => String::new(),
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    let mut all = true;
    for (c, v) in &rows {
        all &= v["pass"].as_bool().unwrap_or(false);
        table.rows.push(vec![
            c.name().to_string(),
            field(v, "verdict"),
            field(v, "pass"),
            field(v, "slope"),
            field(v, "slope_target"),
            field(v, "max_ratio"),
            field(v, "constant"),
        ]);
    }
    write_text(&out.join("report.csv"), &table.to_csv())?;
    let summary = Summary {
        command: "report".into(),
        slope: None,
        slope_target: None,
        pass: all,
        constant: None,
        max_ratio: None,
        config_hash: hash.to_string(),
        verdict: if all { "pass" } else { "fail" }.into(),
        partial: false,
        extra: BTreeMap::from([("commands".to_string(), rows.len() as f64)]),
        error: None,
    };
    write_json(&out.join("report.json"), &summary)?;
    Ok(summary)
}

/// The I/O error with the path or action prefixed.
pub(crate) fn io_context(e: std::io::Error, context: String) -> ConeError {
    ConeError::Io(std::io::Error::new(e.kind(), format!("{context}: {e}")))
}

fn write_text(path: &PathBuf, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| io_context(e, format!("writing {}", path.display())))
}

fn write_json(path: &PathBuf, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| ConeError::Config(e.to_string()))?;
    write_text(path, &(text + "\n"))
}
