//! Scenario registry and runner producing CSV tables and JSON run metadata.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chu::ChuCircuit;
use crate::error::{Error, Result};
use crate::interference::{
    gamma_match, rate_adaptive_antenna, rate_fixed_antenna_closed_form, rate_fixed_antenna_numeric,
    shannon_rate_averaged, AveragingOptions, InterferenceField,
};
use crate::model::{ConfigDocument, Link, SystemConfig};
use crate::rate::{achievable_rate, rate_for_mode, Matching, RateOptions, RowStatus, Transmission};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    SnrProfile,
    FractionVsSize,
    RateVsBw,
    FractionVsPower,
    InterferenceVsDensity,
}

impl ScenarioKind {
    pub fn header(self) -> &'static str {
        match self {
            ScenarioKind::SnrProfile => "f_hz,lambda_over_a,mode,snr",
            ScenarioKind::FractionVsSize => "lambda_over_a,bw_over_fc,mode,fraction,status",
            ScenarioKind::RateVsBw => "bw_over_fc,mode,rate_bps",
            ScenarioKind::FractionVsPower => "lambda_over_a,power_w,mode,fraction",
            ScenarioKind::InterferenceVsDensity => "rho,lambda_over_a,mode,rate_ratio,status",
        }
    }

    /// Sweep parameters the kind needs, outermost last.
    fn axes(self) -> &'static [&'static str] {
        match self {
            ScenarioKind::SnrProfile => &["lambda_over_a"],
            ScenarioKind::FractionVsSize => &["lambda_over_a", "bw_over_fc"],
            ScenarioKind::RateVsBw => &["bw_over_fc"],
            ScenarioKind::FractionVsPower => &["lambda_over_a", "power_w"],
            ScenarioKind::InterferenceVsDensity => &["rho", "lambda_over_a"],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub parameter: String,
    pub values: Vec<f64>,
}

impl Sweep {
    pub fn new(parameter: &str, values: Vec<f64>) -> Self {
        Self {
            parameter: parameter.to_owned(),
            values,
        }
    }
}

/// Interference geometry for density sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferenceSetup {
    pub alpha: f64,
    /// Link distance as a fraction of the cell radius `R0 = 1/sqrt(πρ)`.
    #[serde(default = "default_distance_over_r0")]
    pub distance_over_r0: f64,
    /// Also emit the closed-form approximation for the unmatched antenna.
    #[serde(default)]
    pub closed_form: bool,
}

fn default_distance_over_r0() -> f64 {
    1.0 / 3.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub kind: ScenarioKind,
    pub base: SystemConfig,
    pub sweeps: Vec<Sweep>,
    pub matching_modes: Vec<Matching>,
    pub interference: Option<InterferenceSetup>,
}

/// On-disk form of a scenario; `base` uses the flat config keys.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub kind: ScenarioKind,
    #[serde(default)]
    pub base: ConfigDocument,
    pub sweeps: Vec<Sweep>,
    pub matching_modes: Vec<Matching>,
    #[serde(default)]
    pub interference: Option<InterferenceSetup>,
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<Scenario> {
        let file: ScenarioFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let s = Scenario {
            name: file.name,
            description: file.description,
            kind: file.kind,
            base: file.base.into_config()?,
            sweeps: file.sweeps,
            matching_modes: file.matching_modes,
            interference: file.interference,
        };
        s.validate()?;
        Ok(s)
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(format!("scenario {}: {msg}", self.name)));
        self.base.validate()?;
        if self.matching_modes.is_empty() {
            return bad("no matching modes".into());
        }
        let axes = self.kind.axes();
        for s in &self.sweeps {
            if !axes.contains(&s.parameter.as_str()) {
                return bad(format!("sweep parameter {} does not apply to {:?}", s.parameter, self.kind));
            }
        }
        for axis in axes {
            let n = self.sweeps.iter().filter(|s| s.parameter == *axis).count();
            if n != 1 {
                return bad(format!("needs exactly one sweep over {axis}, found {n}"));
            }
        }
        for s in &self.sweeps {
            if s.values.is_empty() {
                return bad(format!("empty sweep over {}", s.parameter));
            }
            if let Some(v) = s.values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
                return bad(format!("{} value {v} must be positive", s.parameter));
            }
        }
        if self.kind == ScenarioKind::InterferenceVsDensity {
            match self.interference {
                None => return bad("density sweep needs an interference setup".into()),
                Some(i) if !(i.alpha > 2.0) => return bad(format!("alpha must exceed 2, got {}", i.alpha)),
                Some(i) if !(i.distance_over_r0 > 0.0) => {
                    return bad(format!("distance_over_r0 must be positive, got {}", i.distance_over_r0))
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn values(&self, parameter: &str) -> &[f64] {
        self.sweeps
            .iter()
            .find(|s| s.parameter == parameter)
            .map(|s| s.values.as_slice())
            .unwrap_or(&[])
    }

    /// Every link configuration the scenario evaluates, for the kinds that
    /// do not involve interference.
    pub fn configs(&self) -> Vec<SystemConfig> {
        let b = self.base;
        match self.kind {
            ScenarioKind::SnrProfile => self
                .values("lambda_over_a")
                .iter()
                .map(|&r| b.with_lambda_over_a(r))
                .collect(),
            ScenarioKind::FractionVsSize => self
                .values("bw_over_fc")
                .iter()
                .flat_map(|&bw| {
                    self.values("lambda_over_a")
                        .iter()
                        .map(move |&r| b.with_bandwidth_keep_power(bw * b.fc).with_lambda_over_a(r))
                })
                .collect(),
            ScenarioKind::RateVsBw => self
                .values("bw_over_fc")
                .iter()
                .map(|&bw| b.with_bandwidth_keep_power(bw * b.fc))
                .collect(),
            ScenarioKind::FractionVsPower => self
                .values("power_w")
                .iter()
                .flat_map(|&p| {
                    self.values("lambda_over_a")
                        .iter()
                        .map(move |&r| b.with_power(p).with_lambda_over_a(r))
                })
                .collect(),
            ScenarioKind::InterferenceVsDensity => Vec::new(),
        }
    }
}

fn reference_link(fc: f64, bw_over_fc: f64, power: f64) -> SystemConfig {
    let mut c = SystemConfig::baseline();
    c.fc = fc;
    c.bw = bw_over_fc * fc;
    c.with_power(power)
}

fn range(lo: usize, hi: usize) -> Vec<f64> {
    (lo..=hi).map(|v| v as f64).collect()
}

const BOTH: [Matching; 2] = [Matching::Optimal, Matching::None];
const ALL: [Matching; 3] = [Matching::Shannon, Matching::Optimal, Matching::None];

fn snr_scenario(name: &str, description: &str, fc: f64, bw_over_fc: f64) -> Scenario {
    Scenario {
        name: name.into(),
        description: description.into(),
        kind: ScenarioKind::SnrProfile,
        base: reference_link(fc, bw_over_fc, 4.0),
        sweeps: vec![Sweep::new("lambda_over_a", vec![20.0, 15.0, 10.0])],
        matching_modes: BOTH.to_vec(),
        interference: None,
    }
}

fn bw_scenario(name: &str, description: &str, fc: f64, power: f64) -> Scenario {
    Scenario {
        name: name.into(),
        description: description.into(),
        kind: ScenarioKind::RateVsBw,
        base: reference_link(fc, 0.2, power).with_lambda_over_a(20.0),
        sweeps: vec![Sweep::new("bw_over_fc", (1..=20).map(|i| i as f64 / 20.0).collect())],
        matching_modes: ALL.to_vec(),
        interference: None,
    }
}

/// The built-in scenarios.
pub fn builtin_scenarios() -> Vec<Scenario> {
    vec![
        snr_scenario("fig7a", "SNR over the band, fc = 600 MHz, BW = 0.2 fc, P = 4 W", 600e6, 0.2),
        snr_scenario("fig7b", "SNR over the band, fc = 5 GHz, BW = 0.2 fc, P = 4 W", 5e9, 0.2),
        snr_scenario("fig7c", "SNR over the band, fc = 30 GHz, BW = 0.2 fc, P = 4 W", 30e9, 0.2),
        snr_scenario("fig7d", "SNR over the band, fc = 60 GHz, BW = 120 GHz, P = 4 W", 60e9, 2.0),
        Scenario {
            name: "fig8".into(),
            description: "Capacity fraction vs λ/a at fc = 5 GHz, P = 4 W, BW/fc in {0.2, 0.4, 0.6, 0.8}".into(),
            kind: ScenarioKind::FractionVsSize,
            base: reference_link(5e9, 0.2, 4.0),
            sweeps: vec![
                Sweep::new("lambda_over_a", range(5, 20)),
                Sweep::new("bw_over_fc", vec![0.2, 0.4, 0.6, 0.8]),
            ],
            matching_modes: BOTH.to_vec(),
            interference: None,
        },
        bw_scenario("fig9a", "Rate vs BW/fc at λ/a = 20, fc = 600 MHz, P = 4 W", 600e6, 4.0),
        bw_scenario("fig9b", "Rate vs BW/fc at λ/a = 20, fc = 5 GHz, P = 4 W", 5e9, 4.0),
        bw_scenario("fig9c", "Rate vs BW/fc at λ/a = 20, fc = 600 MHz, P = 10 mW", 600e6, 0.01),
        Scenario {
            name: "fig10".into(),
            description: "Capacity fraction vs λ/a at fc = 5 GHz, BW = 0.2 fc, P in {4, 40, 400} W".into(),
            kind: ScenarioKind::FractionVsPower,
            base: reference_link(5e9, 0.2, 4.0),
            sweeps: vec![
                Sweep::new("lambda_over_a", range(5, 20)),
                Sweep::new("power_w", vec![4.0, 40.0, 400.0]),
            ],
            matching_modes: BOTH.to_vec(),
            interference: None,
        },
        Scenario {
            name: "fig11".into(),
            description: "Rate ratio to the interference-limited Shannon rate vs interferer density, \
                          fc = 600 MHz, BW = 0.25 fc, P = 6 W, α = 2.5, d = R0/3"
                .into(),
            kind: ScenarioKind::InterferenceVsDensity,
            base: reference_link(600e6, 0.25, 6.0),
            sweeps: vec![
                Sweep::new("rho", (0..=20).map(|i| 10f64.powf(-9.0 + i as f64 / 4.0)).collect()),
                Sweep::new("lambda_over_a", vec![50.0, 33.33]),
            ],
            matching_modes: BOTH.to_vec(),
            interference: Some(InterferenceSetup {
                alpha: 2.5,
                distance_over_r0: 1.0 / 3.0,
                closed_form: true,
            }),
        },
    ]
}

pub fn find_scenario(name: &str) -> Result<Scenario> {
    builtin_scenarios()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::InvalidConfig(format!("unknown scenario {name}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunOptions {
    pub rate: RateOptions,
    pub averaging: AveragingOptions,
    pub seed: u64,
}

impl RunOptions {
    /// Set the relative tolerance of every rate integral.
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rate.quad.rel_tol = rel_tol;
        self.averaging.quad.rel_tol = rel_tol;
        self
    }
}

/// A finished table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: &'static str,
    pub rows: Vec<String>,
    /// Configurations the solver could not handle. For schemas without a
    /// status column these rows are left out of the table.
    pub infeasible: Vec<String>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.rows.iter().map(|r| r.len() + 1).sum::<usize>() + 64);
        s.push_str(self.header);
        s.push('\n');
        for r in &self.rows {
            s.push_str(r);
            s.push('\n');
        }
        s
    }
}

/// Nine significant digits in scientific notation.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.8e}")
}

fn row(fields: &[&str]) -> String {
    fields.join(",")
}

/// What one work item produced.
struct Part {
    rows: Vec<String>,
    infeasible: Option<String>,
}

impl Part {
    fn rows(rows: Vec<String>) -> Self {
        Self { rows, infeasible: None }
    }

    fn skipped(note: String) -> Self {
        Self {
            rows: Vec::new(),
            infeasible: Some(note),
        }
    }
}

/// Rate, Shannon rate and fraction for one link, or `None` if infeasible.
fn fraction(cfg: &SystemConfig, mode: Matching, opts: &RateOptions) -> Result<Option<(f64, f64, f64)>> {
    match rate_for_mode(cfg, mode, opts) {
        Ok(r) => Ok(Some((r.rate_bps, r.shannon_bps, r.fraction))),
        Err(Error::Infeasible { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn describe(cfg: &SystemConfig, mode: Matching) -> String {
    format!(
        "{mode} at fc={:e} Hz, bw={:e} Hz, P={:e} W, λ/a={:.6}",
        cfg.fc,
        cfg.bw,
        cfg.power(),
        cfg.lambda_over_a()
    )
}

/// Evaluate a scenario. Rows are computed in parallel and assembled in
/// input order, so the table does not depend on the thread count.
pub fn run(scenario: &Scenario, opts: &RunOptions) -> Result<Table> {
    scenario.validate()?;
    let parts: Vec<Part> = match scenario.kind {
        ScenarioKind::SnrProfile => run_snr(scenario, opts)?,
        ScenarioKind::FractionVsSize => run_fraction_vs_size(scenario, opts)?,
        ScenarioKind::RateVsBw => run_rate_vs_bw(scenario, opts)?,
        ScenarioKind::FractionVsPower => run_fraction_vs_power(scenario, opts)?,
        ScenarioKind::InterferenceVsDensity => run_interference(scenario, opts)?,
    };
    let mut table = Table {
        header: scenario.kind.header(),
        rows: Vec::new(),
        infeasible: Vec::new(),
    };
    for p in parts {
        table.rows.extend(p.rows);
        table.infeasible.extend(p.infeasible);
    }
    Ok(table)
}

fn run_snr(s: &Scenario, opts: &RunOptions) -> Result<Vec<Part>> {
    let items: Vec<(f64, Matching)> = s
        .values("lambda_over_a")
        .iter()
        .flat_map(|&r| s.matching_modes.iter().map(move |&m| (r, m)))
        .collect();
    items
        .par_iter()
        .map(|&(ratio, mode)| {
            let cfg = s.base.with_lambda_over_a(ratio);
            let link = Link::new(cfg)?;
            let t = match Transmission::for_link(&link, mode, &opts.rate.solver) {
                Ok(t) => t,
                Err(Error::Infeasible { reason, .. }) => {
                    return Ok(Part::skipped(format!("{}: {reason}", describe(&cfg, mode))))
                }
                Err(e) => return Err(e),
            };
            let report = achievable_rate(&link, |f| t.at(&link, f), &opts.rate)?;
            let r = fmt_num(ratio);
            let m = mode.to_string();
            Ok(Part::rows(
                report
                    .snr_trace
                    .iter()
                    .map(|&(f, snr)| row(&[&fmt_num(f), &r, &m, &fmt_num(snr)]))
                    .collect(),
            ))
        })
        .collect()
}

fn run_fraction_vs_size(s: &Scenario, opts: &RunOptions) -> Result<Vec<Part>> {
    let mut items = Vec::new();
    for &bw in s.values("bw_over_fc") {
        for &mode in &s.matching_modes {
            for &ratio in s.values("lambda_over_a") {
                items.push((bw, mode, ratio));
            }
        }
    }
    items
        .par_iter()
        .map(|&(bw, mode, ratio)| {
            let cfg = s.base.with_bandwidth_keep_power(bw * s.base.fc).with_lambda_over_a(ratio);
            let (frac, status) = match fraction(&cfg, mode, &opts.rate)? {
                Some((_, _, f)) => (f, RowStatus::Ok),
                None => (f64::NAN, RowStatus::Infeasible),
            };
            let line = row(&[
                &fmt_num(ratio),
                &fmt_num(bw),
                &mode.to_string(),
                &fmt_num(frac),
                &status.to_string(),
            ]);
            Ok(Part {
                rows: vec![line],
                infeasible: (status == RowStatus::Infeasible).then(|| describe(&cfg, mode)),
            })
        })
        .collect()
}

fn run_rate_vs_bw(s: &Scenario, opts: &RunOptions) -> Result<Vec<Part>> {
    let items: Vec<(Matching, f64)> = s
        .matching_modes
        .iter()
        .flat_map(|&m| s.values("bw_over_fc").iter().map(move |&b| (m, b)))
        .collect();
    items
        .par_iter()
        .map(|&(mode, bw)| {
            let cfg = s.base.with_bandwidth_keep_power(bw * s.base.fc);
            Ok(match fraction(&cfg, mode, &opts.rate)? {
                Some((rate, _, _)) => Part::rows(vec![row(&[&fmt_num(bw), &mode.to_string(), &fmt_num(rate)])]),
                None => Part::skipped(describe(&cfg, mode)),
            })
        })
        .collect()
}

fn run_fraction_vs_power(s: &Scenario, opts: &RunOptions) -> Result<Vec<Part>> {
    let mut items = Vec::new();
    for &p in s.values("power_w") {
        for &mode in &s.matching_modes {
            for &ratio in s.values("lambda_over_a") {
                items.push((p, mode, ratio));
            }
        }
    }
    items
        .par_iter()
        .map(|&(p, mode, ratio)| {
            let cfg = s.base.with_power(p).with_lambda_over_a(ratio);
            Ok(match fraction(&cfg, mode, &opts.rate)? {
                Some((_, _, f)) => Part::rows(vec![row(&[
                    &fmt_num(ratio),
                    &fmt_num(p),
                    &mode.to_string(),
                    &fmt_num(f),
                ])]),
                None => Part::skipped(describe(&cfg, mode)),
            })
        })
        .collect()
}

/// Link and interference law at density `rho` for a density sweep.
pub fn density_point(
    base: &SystemConfig,
    setup: &InterferenceSetup,
    rho: f64,
    lambda_over_a: f64,
) -> Result<(Link, crate::interference::GammaModel)> {
    let r0 = 1.0 / (PI * rho).sqrt();
    let mut cfg = base.with_lambda_over_a(lambda_over_a);
    cfg.distance = setup.distance_over_r0 * r0;
    let link = Link::new(cfg)?;
    let field = InterferenceField {
        density: rho,
        alpha: setup.alpha,
        r0,
        pt: cfg.power(),
        lambda_c: cfg.wavelength(),
    };
    Ok((link, gamma_match(&field)?))
}

fn run_interference(s: &Scenario, opts: &RunOptions) -> Result<Vec<Part>> {
    let setup = s.interference.expect("validated");
    let mut items = Vec::new();
    for &ratio in s.values("lambda_over_a") {
        for &rho in s.values("rho") {
            items.push((ratio, rho));
        }
    }
    items
        .par_iter()
        .map(|&(ratio, rho)| {
            let (link, gm) = density_point(&s.base, &setup, rho, ratio)?;
            let av = &opts.averaging;
            let shannon = shannon_rate_averaged(&link, &gm, av)?;
            let chu = ChuCircuit::new(link.cfg.radius, link.cfg.constants.c)?;
            let mut rows = Vec::new();
            let mut infeasible = None;
            let mut push = |mode: &str, ratio_value: f64, status: RowStatus| {
                rows.push(row(&[
                    &fmt_num(rho),
                    &fmt_num(ratio),
                    mode,
                    &fmt_num(ratio_value),
                    &status.to_string(),
                ]));
            };
            for &mode in &s.matching_modes {
                match mode {
                    Matching::Shannon => push("shannon", 1.0, RowStatus::Ok),
                    Matching::None => {
                        let r = rate_fixed_antenna_numeric(&link, |f| chu.transmission_power(f), &gm, av)?;
                        push("none", r / shannon, RowStatus::Ok);
                        if setup.closed_form {
                            let cf = rate_fixed_antenna_closed_form(
                                &link,
                                |f| chu.transmission_power(f),
                                &gm,
                                &av.quad,
                            )?;
                            push("none_closed_form", cf.rate_bps / shannon, RowStatus::Ok);
                        }
                    }
                    Matching::Optimal => match rate_adaptive_antenna(&link, &gm, av) {
                        Ok(a) => {
                            let status = if a.excluded.is_empty() {
                                RowStatus::Ok
                            } else {
                                RowStatus::Excluded
                            };
                            push("optimal", a.rate_bps / shannon, status);
                        }
                        Err(Error::Infeasible { reason, .. }) => {
                            push("optimal", f64::NAN, RowStatus::Infeasible);
                            infeasible = Some(format!("optimal at rho={rho:e}, λ/a={ratio}: {reason}"));
                        }
                        Err(e) => return Err(e),
                    },
                }
            }
            Ok(Part { rows, infeasible })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    pub rate_rel_tol: f64,
    pub solver_rel_tol: f64,
    pub size_tol: f64,
    pub residual_tol: f64,
    pub trace_points: usize,
    pub gamma_nodes: usize,
    pub adaptive_nodes: usize,
}

impl From<&RunOptions> for Tolerances {
    fn from(o: &RunOptions) -> Self {
        Self {
            rate_rel_tol: o.rate.quad.rel_tol,
            solver_rel_tol: o.rate.solver.quad.rel_tol,
            size_tol: o.rate.solver.size_tol,
            residual_tol: o.rate.solver.residual_tol,
            trace_points: o.rate.trace_points,
            gamma_nodes: o.averaging.nodes,
            adaptive_nodes: o.averaging.adaptive_nodes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetadata {
    pub scenario: String,
    pub description: String,
    pub kind: ScenarioKind,
    pub crate_version: &'static str,
    pub git_hash: String,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub base: SystemConfig,
    pub started_unix_s: f64,
    pub wall_time_s: f64,
    pub rows: usize,
    pub infeasible: Vec<String>,
    pub csv: String,
}

fn git_hash() -> String {
    std::process::Command::new("git")
        .args(["rev-parse", "HEAD"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_owned())
        .unwrap_or_else(|| "unknown".into())
}

/// Run a scenario and write `<name>.csv` and `<name>.json` into `out_dir`.
pub fn run_to_dir(scenario: &Scenario, opts: &RunOptions, out_dir: &Path) -> Result<(PathBuf, RunMetadata)> {
    let started = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0);
    let clock = Instant::now();
    let table = run(scenario, opts)?;
    let wall = clock.elapsed().as_secs_f64();
    std::fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join(format!("{}.csv", scenario.name));
    std::fs::write(&csv_path, table.to_csv())?;
    let meta = RunMetadata {
        scenario: scenario.name.clone(),
        description: scenario.description.clone(),
        kind: scenario.kind,
        crate_version: env!("CARGO_PKG_VERSION"),
        git_hash: git_hash(),
        seed: opts.seed,
        tolerances: opts.into(),
        base: scenario.base,
        started_unix_s: started,
        wall_time_s: wall,
        rows: table.rows.len(),
        infeasible: table.infeasible,
        csv: csv_path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
    };
    std::fs::write(
        out_dir.join(format!("{}.json", scenario.name)),
        serde_json::to_string_pretty(&meta)?,
    )?;
    Ok((csv_path, meta))
}

/// `name  description` lines for the registry.
pub fn list_scenarios() -> String {
    let mut s = String::new();
    for sc in builtin_scenarios() {
        let _ = writeln!(s, "{:<7} {}", sc.name, sc.description);
    }
    s
}
