//! Config-driven runs: a TOML file names a protocol and overrides any of its
//! defaults; a run writes CSV tables plus a JSON sidecar holding the fully
//! resolved configuration.
//!
//! ```toml
//! protocol = "dpt"
//! j = 4
//! h = 0.0
//!
//! [options.noise]
//! enabled = true
//! ```
//!
//! Several runs can share a file as `[[run]]` tables.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::Error;
use crate::evolve::NoiseModel;
use crate::io::CsvTable;
use crate::lmg::{self, LmgParams};
use crate::protocols::esqpt::esqpt_oracle;
use crate::protocols::gap::{delta_t_grid, DEFAULT_PERIODS, DEFAULT_POINTS};
use crate::protocols::{
    self, classical_order_peak, kz_fast_limit, run_dpt, run_esqpt, run_gap_ramsey, run_kibble_zurek,
    run_order_parameter, DptConfig, EsqptConfig, GapRamseyConfig, KibbleZurekConfig, OrderParameterConfig,
    Preparation, ProtocolOptions, RamseyGap,
};
use crate::semiclassics::{self, dos, EnergySurface};
use crate::spin::SpinSize;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Sim(#[from] Error),
}

impl RunError {
    /// 2 for anything the user can fix in the config, 3 for numerical
    /// failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Sim(e) => match e {
                Error::StepUnderflow { .. }
                | Error::NonFinite(_)
                | Error::QuadratureFailed(_)
                | Error::EllipticDomain(_)
                | Error::ParityViolation(_)
                | Error::NotNormalized(_)
                | Error::DimensionMismatch { .. } => 3,
                _ => 2,
            },
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            2 => "config",
            _ => "numerical",
        }
    }

    /// One-line JSON record for stderr.
    pub fn record(&self) -> String {
        json!({ "error": self.kind(), "message": self.to_string(), "exit_code": self.exit_code() }).to_string()
    }
}

fn config_err(e: impl std::fmt::Display) -> RunError {
    RunError::Config(e.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapJob {
    pub j: u32,
    pub h_over_gx: Vec<f64>,
    pub kinds: Vec<RamseyGap>,
    pub below_ramp_duration: f64,
    pub above_ramp_duration: f64,
    pub shape: crate::drive::RampShape,
    pub omega: f64,
    /// Periods of the expected gap covered by each `delta_t` grid.
    pub periods: f64,
    pub n_points: usize,
    pub preparation: Preparation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DosJob {
    pub h: f64,
    pub n_points: usize,
    /// Adds a normalized eigenvalue histogram of this spin.
    #[serde(default)]
    pub histogram_j: Option<u32>,
    pub bins: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumJob {
    pub j: u32,
    pub gamma_x: f64,
    pub h_over_gx: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceJob {
    pub h: f64,
    pub gamma_x: f64,
    pub n_theta: usize,
    pub n_phi: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", content = "params", rename_all = "snake_case")]
pub enum Job {
    Dpt(DptConfig),
    Gap(GapJob),
    Kz(KibbleZurekConfig),
    Order(OrderParameterConfig),
    Esqpt(EsqptConfig),
    Dos(DosJob),
    Spectrum(SpectrumJob),
    Surface(SurfaceJob),
}

pub const PROTOCOLS: [&str; 8] = ["dpt", "gap", "kz", "order", "esqpt", "dos", "spectrum", "surface"];

impl Job {
    pub fn protocol(&self) -> &'static str {
        match self {
            Job::Dpt(_) => "dpt",
            Job::Gap(_) => "gap",
            Job::Kz(_) => "kz",
            Job::Order(_) => "order",
            Job::Esqpt(_) => "esqpt",
            Job::Dos(_) => "dos",
            Job::Spectrum(_) => "spectrum",
            Job::Surface(_) => "surface",
        }
    }

    /// Largest transmon block any run of this job drives.
    fn levels(&self) -> usize {
        let d = |j: u32| 2 * j as usize + 1;
        match self {
            Job::Dpt(c) => d(c.j),
            Job::Gap(c) => d(c.j),
            Job::Kz(c) => d(c.j),
            Job::Order(c) => d(c.j),
            Job::Esqpt(c) => d(c.j),
            Job::Spectrum(c) => d(c.j),
            Job::Dos(_) | Job::Surface(_) => 2,
        }
    }
}

/// A fully resolved run. Serializing and reading it back reproduces the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Output file names start with this.
    pub prefix: String,
    /// Reserved for a sampling layer; no current protocol draws random numbers.
    pub seed: u64,
    pub options: ProtocolOptions,
    #[serde(flatten)]
    pub job: Job,
}

fn required<'a>(t: &'a toml::Table, key: &str) -> Result<&'a toml::Value, RunError> {
    t.get(key).ok_or_else(|| RunError::Config(format!("missing field `{key}`")))
}

fn required_u32(t: &toml::Table, key: &str) -> Result<u32, RunError> {
    required(t, key)?
        .as_integer()
        .and_then(|v| u32::try_from(v).ok())
        .ok_or_else(|| RunError::Config(format!("field `{key}` must be a non-negative integer")))
}

fn required_f64(t: &toml::Table, key: &str) -> Result<f64, RunError> {
    let v = required(t, key)?;
    v.as_float()
        .or_else(|| v.as_integer().map(|i| i as f64))
        .ok_or_else(|| RunError::Config(format!("field `{key}` must be a number")))
}

/// Scalars are accepted where a grid is expected.
fn required_grid(t: &toml::Table, key: &str) -> Result<Vec<f64>, RunError> {
    let v = required(t, key)?;
    let num = |v: &toml::Value| v.as_float().or_else(|| v.as_integer().map(|i| i as f64));
    match v {
        toml::Value::Array(a) => a
            .iter()
            .map(|x| num(x).ok_or_else(|| RunError::Config(format!("field `{key}` must hold numbers"))))
            .collect(),
        x => num(x).map(|n| vec![n]).ok_or_else(|| RunError::Config(format!("field `{key}` must be a number or list"))),
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// Defaults for `protocol`, built from the keys they depend on.
fn default_job(protocol: &str, t: &toml::Table) -> Result<Job, RunError> {
    Ok(match protocol {
        "dpt" => Job::Dpt(DptConfig::new(required_u32(t, "j")?, required_f64(t, "h")?, 1.0)),
        "gap" => Job::Gap(GapJob {
            j: required_u32(t, "j")?,
            h_over_gx: required_grid(t, "h_over_gx")?,
            kinds: vec![RamseyGap::EvenOdd, RamseyGap::EvenEven],
            below_ramp_duration: protocols::gap::DEFAULT_BELOW_RAMP,
            above_ramp_duration: protocols::gap::DEFAULT_ABOVE_RAMP,
            shape: crate::drive::RampShape::RaisedCosine,
            omega: lmg::DEFAULT_OMEGA_OVER_2PI,
            periods: DEFAULT_PERIODS,
            n_points: DEFAULT_POINTS,
            preparation: Preparation::Adiabatic,
        }),
        "kz" => Job::Kz(KibbleZurekConfig::new(required_u32(t, "j")?)),
        "order" => Job::Order(OrderParameterConfig::new(required_u32(t, "j")?, required_grid(t, "h_over_gx")?)),
        "esqpt" => {
            let mut c = EsqptConfig::new(required_u32(t, "j")?, required_f64(t, "h")?);
            if let Some(g) = t.get("gamma_x").and_then(|v| v.as_float().or_else(|| v.as_integer().map(|i| i as f64))) {
                c.gamma_x = g;
            }
            Job::Esqpt(c)
        }
        "dos" => Job::Dos(DosJob {
            h: required_f64(t, "h")?,
            n_points: 400,
            histogram_j: None,
            bins: 20,
        }),
        "spectrum" => Job::Spectrum(SpectrumJob {
            j: required_u32(t, "j")?,
            gamma_x: 1.0,
            h_over_gx: linspace(0.0, 2.0, 101),
        }),
        "surface" => Job::Surface(SurfaceJob {
            h: required_f64(t, "h")?,
            gamma_x: 1.0,
            n_theta: 91,
            n_phi: 181,
        }),
        other => {
            return Err(RunError::Config(format!(
                "unknown protocol `{other}` (expected one of {})",
                PROTOCOLS.join(", ")
            )))
        }
    })
}

/// Overlays `user` onto `base`, recursing into tables.
fn merge(base: &mut toml::Value, user: &toml::Value) {
    match (base, user) {
        (toml::Value::Table(b), toml::Value::Table(u)) => {
            for (k, v) in u {
                match b.get_mut(k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (b, u) => *b = u.clone(),
    }
}

fn resolve_table(t: &toml::Table) -> Result<RunConfig, RunError> {
    let protocol = required(t, "protocol")?
        .as_str()
        .ok_or_else(|| RunError::Config("field `protocol` must be a string".into()))?;
    let default = default_job(protocol, t)?;
    let mut params = toml::Value::try_from(&default).map_err(config_err)?;
    let mut user = t.clone();
    let prefix = match user.remove("prefix") {
        Some(v) => v.as_str().ok_or_else(|| RunError::Config("field `prefix` must be a string".into()))?.to_owned(),
        None => protocol.to_owned(),
    };
    let seed = match user.remove("seed") {
        Some(v) => v
            .as_integer()
            .and_then(|s| u64::try_from(s).ok())
            .ok_or_else(|| RunError::Config("field `seed` must be a non-negative integer".into()))?,
        None => 0,
    };
    let user_options = user.remove("options");
    user.remove("protocol");
    for key in ["h_over_gx", "ramp_times", "delta_ts"] {
        if let Some(v) = user.get_mut(key) {
            if !v.is_array() {
                *v = toml::Value::Array(vec![v.clone()]);
            }
        }
    }
    if let Some(slot) = params.get_mut("params") {
        merge(slot, &toml::Value::Table(user));
    }
    let job: Job = params.try_into().map_err(config_err)?;

    let mut options = toml::Value::try_from(ProtocolOptions::default()).map_err(config_err)?;
    if let Some(o) = user_options {
        merge(&mut options, &o);
    }
    let mut options: ProtocolOptions = options.try_into().map_err(config_err)?;
    if let Some(n) = options.noise.as_mut() {
        if n.t1.is_empty() {
            n.t1 = NoiseModel::default_for(job.levels()).t1;
        }
    }
    options.propagator.validate()?;
    Ok(RunConfig { prefix, seed, options, job })
}

/// Parses a config file: TOML (one run, or `[[run]]` tables) or a JSON
/// sidecar written by an earlier run.
pub fn parse_config(text: &str, json: bool) -> Result<Vec<RunConfig>, RunError> {
    if json {
        let v: serde_json::Value = serde_json::from_str(text).map_err(config_err)?;
        let resolved = v.get("resolved").cloned().unwrap_or(v);
        return Ok(vec![serde_json::from_value(resolved).map_err(config_err)?]);
    }
    let table: toml::Table = text.parse().map_err(config_err)?;
    match table.get("run") {
        Some(toml::Value::Array(runs)) => runs
            .iter()
            .map(|r| match r {
                toml::Value::Table(t) => resolve_table(t),
                _ => Err(RunError::Config("every `run` entry must be a table".into())),
            })
            .collect(),
        _ => Ok(vec![resolve_table(&table)?]),
    }
}

pub fn load_config(path: &Path) -> Result<Vec<RunConfig>, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text, path.extension().is_some_and(|e| e == "json"))
}

/// Tables produced by one run, in write order.
pub struct RunOutput {
    pub tables: Vec<(String, CsvTable)>,
    pub summary: serde_json::Value,
}

fn kind_code(k: RamseyGap) -> f64 {
    match k {
        RamseyGap::EvenOdd => 0.0,
        RamseyGap::EvenEven => 1.0,
    }
}

fn run_gap_job(c: &GapJob, opts: &ProtocolOptions) -> Result<RunOutput, RunError> {
    let spin = SpinSize::new(c.j)?;
    let points: Vec<(RamseyGap, f64)> = c.kinds.iter().flat_map(|&k| c.h_over_gx.iter().map(move |&r| (k, r))).collect();
    let results = points
        .par_iter()
        .map(|&(kind, r)| {
            let mut cfg = GapRamseyConfig::standard(c.j, r, kind)?;
            if let Some(ramp) = cfg.ramp.as_mut() {
                ramp.duration = if r <= 1.0 { c.below_ramp_duration } else { c.above_ramp_duration };
                ramp.shape = c.shape;
                ramp.omega_during_ramp = c.omega;
            }
            let oracle = lmg::sector_gap(spin, &LmgParams::new(r, 1.0), kind.lmg_kind())?;
            cfg.omega_hold = c.omega;
            cfg.delta_ts = delta_t_grid(oracle, c.omega, c.periods, c.n_points);
            cfg.preparation = c.preparation;
            Ok((run_gap_ramsey(&cfg, opts)?, oracle))
        })
        .collect::<crate::error::Result<Vec<_>>>()?;

    let mut estimates = CsvTable::new(&["kind", "h_over_gx", "gap_over_omega", "oracle_over_omega", "bin_over_omega", "peaks", "resolved"]);
    let mut spectrogram = CsvTable::new(&["kind", "h_over_gx", "freq_over_omega", "magnitude"]);
    let mut traces = CsvTable::new(&["kind", "h_over_gx", "delta_t", "signal"]);
    for ((kind, r), (res, oracle)) in points.iter().zip(&results) {
        let k = kind_code(*kind);
        estimates.row(&[k, *r, res.gap_over_omega, *oracle, res.bin_over_omega, res.spectrum.peaks.len() as f64, f64::from(u8::from(res.resolved()))]);
        let peak = res.spectrum.magnitudes.iter().cloned().fold(0.0, f64::max);
        for (f, m) in res.spectrum.freq_grid.iter().zip(&res.spectrum.magnitudes) {
            let m = if peak > 0.0 { m / peak } else { 0.0 };
            spectrogram.row(&[k, *r, f / c.omega, m]);
        }
        for (t, s) in res.delta_ts.iter().zip(&res.signal) {
            traces.row(&[k, *r, *t, *s]);
        }
    }
    Ok(RunOutput {
        tables: vec![
            ("spectrogram".into(), spectrogram),
            ("estimates".into(), estimates),
            ("traces".into(), traces),
        ],
        summary: json!({ "kind_codes": { "even_odd": 0, "even_even": 1 } }),
    })
}

/// Runs one resolved config and returns its tables (nothing is written).
pub fn execute(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let opts = &cfg.options;
    Ok(match &cfg.job {
        Job::Dpt(c) => {
            let r = run_dpt(c, opts)?;
            let min_echo = r.echo.iter().cloned().fold(1.0, f64::min);
            RunOutput {
                tables: vec![("trace".into(), r.to_csv())],
                summary: json!({ "min_echo": min_echo }),
            }
        }
        Job::Gap(c) => run_gap_job(c, opts)?,
        Job::Kz(c) => {
            let pts = run_kibble_zurek(c, opts)?;
            let mut t = CsvTable::new(&["ramp_time", "ramp_speed", "ground_population"]);
            for p in &pts {
                t.row(&[p.ramp_time, p.ramp_speed, p.ground_population]);
            }
            RunOutput {
                tables: vec![("populations".into(), t)],
                summary: json!({ "fast_limit": kz_fast_limit(c)? }),
            }
        }
        Job::Order(c) => {
            let d = run_order_parameter(c, opts)?;
            let mut t = CsvTable::new(&["h_over_gx", "m", "probability"]);
            for dist in &d {
                for (m, p) in dist.m_values.iter().zip(&dist.probabilities) {
                    t.row(&[dist.h_over_gx, *m as f64, *p]);
                }
            }
            let peaks: Vec<f64> = c.h_over_gx.iter().map(|&r| classical_order_peak(c.j as f64, r)).collect();
            RunOutput {
                tables: vec![("distribution".into(), t)],
                summary: json!({ "classical_peak": peaks }),
            }
        }
        Job::Esqpt(c) => {
            let r = run_esqpt(c, opts)?;
            let (even, odd) = esqpt_oracle(c.j, c.h, c.gamma_x)?;
            let mut spec = CsvTable::new(&["parity", "n", "energy", "oracle"]);
            for (sign, measured, exact) in [(1.0, &r.even_energies, &even), (-1.0, &r.odd_energies, &odd)] {
                for (n, (e, o)) in measured.iter().zip(exact).enumerate() {
                    spec.row(&[sign, n as f64, *e, *o]);
                }
            }
            RunOutput {
                tables: vec![("pairs".into(), r.pairs_csv()), ("spectrum".into(), spec)],
                summary: json!({
                    "bin_over_omega": r.bin_over_omega,
                    "crossing_energy": r.crossing_energy,
                    "critical_energy": r.critical_energy,
                    "unresolved": r.unresolved,
                }),
            }
        }
        Job::Dos(c) => {
            let curve = dos::dos_grid(c.h, c.n_points)?;
            let mut tables = vec![("curve".into(), curve.to_csv())];
            if let Some(j) = c.histogram_j {
                let (edges, density) = dos::eigenvalue_histogram(SpinSize::new(j)?, c.h, c.bins)?;
                let mut t = CsvTable::new(&["e_low", "e_high", "density"]);
                for (k, d) in density.iter().enumerate() {
                    t.row(&[edges[k], edges[k + 1], *d]);
                }
                tables.push(("histogram".into(), t));
            }
            let (lo, hi) = dos::band(c.h);
            RunOutput {
                tables,
                summary: json!({ "band": [lo, hi] }),
            }
        }
        Job::Spectrum(c) => {
            let rows = lmg::spectrum_sweep(SpinSize::new(c.j)?, c.gamma_x, &c.h_over_gx)?;
            RunOutput {
                tables: vec![("levels".into(), lmg::spectrum_csv(&rows))],
                summary: json!({}),
            }
        }
        Job::Surface(c) => {
            let s = EnergySurface::new(c.h, c.gamma_x)?;
            let thetas = linspace(0.0, std::f64::consts::PI, c.n_theta.max(2));
            let phis = linspace(0.0, 2.0 * std::f64::consts::PI, c.n_phi.max(2));
            let minima = semiclassics::ground_minima(c.h, c.gamma_x)?;
            let critical = semiclassics::critical_energy(c.h, c.gamma_x).ok();
            RunOutput {
                tables: vec![("grid".into(), s.grid_csv(&thetas, &phis))],
                summary: json!({
                    "minima_theta": minima.thetas,
                    "e_min": minima.e_min,
                    "critical_energy": critical.map(|c| c.barrier),
                }),
            }
        }
    })
}

/// Writes a run's tables, its sidecar and optionally a plot script into
/// `out`. Returns the written paths.
pub fn run_to_dir(cfg: &RunConfig, out: &Path, plot: bool) -> Result<Vec<PathBuf>, RunError> {
    std::fs::create_dir_all(out).map_err(|e| RunError::Config(format!("cannot create {}: {e}", out.display())))?;
    let output = execute(cfg)?;
    let mut written = Vec::new();
    let mut names = Vec::new();
    for (suffix, table) in &output.tables {
        let name = format!("{}_{suffix}.csv", cfg.prefix);
        let path = out.join(&name);
        std::fs::write(&path, table.as_str()).map_err(|e| RunError::Config(format!("cannot write {}: {e}", path.display())))?;
        names.push(name);
        written.push(path);
    }
    if plot {
        let name = format!("{}_plot.py", cfg.prefix);
        let path = out.join(&name);
        std::fs::write(&path, crate::plots::script(cfg)).map_err(|e| RunError::Config(format!("cannot write {}: {e}", path.display())))?;
        names.push(name);
        written.push(path);
    }
    let main = &output.tables[0].0;
    let sidecar = out.join(format!("{}_{main}.json", cfg.prefix));
    let doc = json!({ "resolved": cfg, "outputs": names, "summary": output.summary });
    let text = serde_json::to_string_pretty(&doc).map_err(config_err)? + "\n";
    std::fs::write(&sidecar, text).map_err(|e| RunError::Config(format!("cannot write {}: {e}", sidecar.display())))?;
    written.push(sidecar);
    Ok(written)
}

/// A figure reproduced from bundled configs.
pub struct Figure {
    pub id: &'static str,
    pub description: &'static str,
    pub config: &'static str,
}

pub const FIGURES: [Figure; 8] = [
    Figure {
        id: "1f",
        description: "quench dynamics at j = 4, h = 0 and h = 2, with T1 decay",
        config: include_str!("../configs/fig_1f.toml"),
    },
    Figure {
        id: "2d",
        description: "single Ramsey gap measurement, j = 4, h/gamma_x = 0.6",
        config: include_str!("../configs/fig_2d.toml"),
    },
    Figure {
        id: "2e",
        description: "gap spectroscopy versus h/gamma_x for j = 1..4",
        config: include_str!("../configs/fig_2e.toml"),
    },
    Figure {
        id: "3b",
        description: "Kibble-Zurek ground population versus ramp speed",
        config: include_str!("../configs/fig_3b.toml"),
    },
    Figure {
        id: "4d",
        description: "order-parameter distributions for j = 4",
        config: include_str!("../configs/fig_4d.toml"),
    },
    Figure {
        id: "4f",
        description: "order-parameter distributions for the doubled j = 8 spin",
        config: include_str!("../configs/fig_4f.toml"),
    },
    Figure {
        id: "5d",
        description: "ESQPT pair splittings, j = 8, h/gamma_x = 0.18",
        config: include_str!("../configs/fig_5d.toml"),
    },
    Figure {
        id: "S2c",
        description: "semiclassical density of states against j = 500 histograms",
        config: include_str!("../configs/fig_s2c.toml"),
    },
];

pub fn figure(id: &str) -> Result<&'static Figure, RunError> {
    FIGURES
        .iter()
        .find(|f| f.id.eq_ignore_ascii_case(id))
        .ok_or_else(|| RunError::Config(format!("unknown figure `{id}`")))
}
