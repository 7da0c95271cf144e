//! Run configuration and the command implementations behind the CLI.
//!
//! Every command is a pure function of its [`RunConfig`] and returns the full
//! output text together with an exit status, so reruns with the same config
//! are byte-identical.

use std::f64::consts::{FRAC_PI_4, PI, TAU};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::algebra::OperatorSet;
use crate::catalog::{random_state_suite, realize_with_guard, MixtureComponent, StateSpec};
use crate::criteria::{
    covariance_record, evaluate_with_guard, verify_pt_covariance_with_guard, verify_pt_moments_with_guard, witness_w12,
    witness_w14, witness_w9, CriterionReport, Verdict, DEFAULT_TOL, DEFAULT_Z_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::fock::{FockSpace, QuantumState, DEFAULT_CUTOFF, DEFAULT_GUARD_TOL, DEFAULT_TAIL_GUARD};
use crate::measurement::{estimated_report, reconstruct, simulate_protocol, PHASE_SETTINGS};
use crate::transforms::{invariance_scan, mode_map_residual, rotation_consistency};

pub const SCHEMA_VERSION: u32 = 1;
pub const LIBRARY_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const SCAN_HEADER: &str = "theta,w9,w12,w14,mean_n,var_jx,var_jy,cov_xy,verdict_w12";
pub const DEFAULT_SHOTS: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 1;

/// Thresholds used by `verify`.
pub const COMMUTATOR_TOL: f64 = 1e-12;
pub const IDENTITY_TOL: f64 = 1e-10;
pub const UNITARITY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!(
                "unknown format `{other}` (expected csv or json)"
            ))),
        }
    }
}

/// Flat key-value configuration as read from a TOML file or from flags.
/// Every field is optional; [`RawConfig::overlay`] lets flags win.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub cutoff_a: Option<usize>,
    pub cutoff_b: Option<usize>,
    pub guard: Option<usize>,
    pub guard_tol: Option<f64>,
    pub tol: Option<f64>,
    pub z_threshold: Option<f64>,
    pub family: Option<String>,
    pub theta: Option<f64>,
    pub r: Option<f64>,
    pub n: Option<usize>,
    pub n_a: Option<usize>,
    pub n_b: Option<usize>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub components: Option<Vec<MixtureComponent>>,
    pub phi_grid: Option<Vec<f64>>,
    pub theta_grid: Option<Vec<f64>>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

macro_rules! overlay_fields {
    ($base:ident, $top:ident; $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f; } )*
    };
}

impl RawConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("invalid config file: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Fields set in `top` replace those in `self`.
    pub fn overlay(mut self, top: RawConfig) -> Self {
        overlay_fields!(self, top; cutoff_a, cutoff_b, guard, guard_tol, tol, z_threshold, family,
            theta, r, n, n_a, n_b, alpha, beta, components, phi_grid, theta_grid, shots, seed, out, format);
        self
    }

    pub fn resolve(self) -> Result<RunConfig> {
        let cutoff_a = self.cutoff_a.unwrap_or(DEFAULT_CUTOFF);
        let cutoff_b = self.cutoff_b.unwrap_or(DEFAULT_CUTOFF);
        let space = FockSpace::new(cutoff_a, cutoff_b)?;
        let guard = self.guard.unwrap_or(DEFAULT_TAIL_GUARD.min(space.min_cutoff() - 1));
        space.check_guard(guard)?;
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        let tol = positive("tol", self.tol.unwrap_or(DEFAULT_TOL))?;
        let guard_tol = positive("guard_tol", self.guard_tol.unwrap_or(DEFAULT_GUARD_TOL))?;
        let z_threshold = positive("z_threshold", self.z_threshold.unwrap_or(DEFAULT_Z_THRESHOLD))?;
        let non_empty = |name: &str, grid: Option<Vec<f64>>, default: Vec<f64>| match grid {
            Some(g) if g.is_empty() => Err(Error::Config(format!("{name} must not be empty"))),
            Some(g) if g.iter().any(|x| !x.is_finite()) => Err(Error::Config(format!("{name} has non-finite entries"))),
            Some(g) => Ok(g),
            None => Ok(default),
        };
        let theta_grid = non_empty(
            "theta_grid",
            self.theta_grid.clone(),
            (0..64).map(|k| k as f64 * PI / 32.0).collect(),
        )?;
        let phi_grid = non_empty(
            "phi_grid",
            self.phi_grid.clone(),
            (0..32).map(|k| k as f64 * TAU / 32.0).collect(),
        )?;
        let shots = self.shots.unwrap_or(DEFAULT_SHOTS);
        if shots == 0 {
            return Err(Error::Config("shots must be at least 1".into()));
        }
        let state = match self.family.as_deref() {
            None => None,
            Some(family) => Some(state_spec(family, &self)?),
        };
        Ok(RunConfig {
            space,
            guard,
            guard_tol,
            tol,
            z_threshold,
            state,
            phi_grid,
            theta_grid,
            shots,
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            out: self.out,
            format: self.format.unwrap_or_default(),
        })
    }
}

fn state_spec(family: &str, raw: &RawConfig) -> Result<StateSpec> {
    let need_f =
        |name: &str, v: Option<f64>| v.ok_or_else(|| Error::Config(format!("family `{family}` needs `{name}`")));
    let need_u =
        |name: &str, v: Option<usize>| v.ok_or_else(|| Error::Config(format!("family `{family}` needs `{name}`")));
    Ok(match family {
        "two-photon-theta" => StateSpec::TwoPhotonTheta {
            theta: need_f("theta", raw.theta)?,
        },
        "single-photon-theta" => StateSpec::SinglePhotonTheta {
            theta: need_f("theta", raw.theta)?,
        },
        "noon" => StateSpec::Noon {
            n: need_u("n", raw.n)?,
            theta: raw.theta.unwrap_or(0.0),
        },
        "tmsv" => StateSpec::Tmsv { r: need_f("r", raw.r)? },
        "fock-product" => StateSpec::FockProduct {
            n_a: need_u("n_a", raw.n_a)?,
            n_b: need_u("n_b", raw.n_b)?,
        },
        "coherent-product" => StateSpec::CoherentProduct {
            alpha: need_f("alpha", raw.alpha)?,
            beta: need_f("beta", raw.beta)?,
        },
        "mixed-product" => StateSpec::MixedProduct {
            components: raw
                .components
                .clone()
                .ok_or_else(|| Error::Config("family `mixed-product` needs `components`".into()))?,
        },
        other => return Err(Error::Config(format!("unknown family `{other}`"))),
    })
}

/// Validated configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub space: FockSpace,
    pub guard: usize,
    pub guard_tol: f64,
    pub tol: f64,
    pub z_threshold: f64,
    pub state: Option<StateSpec>,
    pub phi_grid: Vec<f64>,
    pub theta_grid: Vec<f64>,
    pub shots: u64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RawConfig::default().resolve().expect("defaults are valid")
    }
}

impl RunConfig {
    /// Opens the output path for writing, so that unwritable destinations are
    /// reported before any computation.
    pub fn check_output(&self) -> Result<()> {
        if let Some(path) = &self.out {
            std::fs::OpenOptions::new()
                .write(true)
                .create(true)
                .truncate(false)
                .open(path)
                .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
        }
        Ok(())
    }

    fn require_state(&self) -> Result<&StateSpec> {
        self.state
            .as_ref()
            .ok_or_else(|| Error::Config("a state family is required (--family)".into()))
    }

    fn realize_state(&self) -> Result<QuantumState> {
        let spec = self.require_state()?;
        realize_with_guard(spec, self.space, self.guard_tol)?.with_tail_guard(self.guard)
    }
}

/// Exit statuses of the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    CheckFailed,
    UsageError,
}

impl Status {
    pub fn code(&self) -> i32 {
        match self {
            Status::Success => 0,
            Status::CheckFailed => 1,
            Status::UsageError => 2,
        }
    }

    fn from_pass(pass: bool) -> Self {
        if pass {
            Status::Success
        } else {
            Status::CheckFailed
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommandOutput {
    pub text: String,
    pub status: Status,
}

impl CommandOutput {
    fn ok(text: String) -> Self {
        Self {
            text,
            status: Status::Success,
        }
    }
}

/// Formats like C's `%.12g`: 12 significant digits, trailing zeros trimmed,
/// scientific notation outside `1e-5 <= |x| < 1e12`.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}"))
    } else {
        format!(
            "{}e{}{:02}",
            trim_fraction(mantissa),
            if exp < 0 { "-" } else { "+" },
            exp.abs()
        )
    }
}

fn trim_fraction(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn envelope(command: &str, config: &RunConfig, body: serde_json::Value) -> String {
    let mut doc = json!({
        "schema_version": SCHEMA_VERSION,
        "library_version": LIBRARY_VERSION,
        "command": command,
        "cutoffs": [config.space.cutoff_a(), config.space.cutoff_b()],
        "guard": config.guard,
        "guard_tol": config.guard_tol,
        "tol": config.tol,
    });
    if let (Some(obj), serde_json::Value::Object(extra)) = (doc.as_object_mut(), body) {
        obj.extend(extra);
    }
    let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
    text.push('\n');
    text
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Algebra, partial-transpose, rotation and beamsplitter checks.
pub fn cmd_verify(config: &RunConfig) -> Result<CommandOutput> {
    let space = config.space;
    let set = OperatorSet::new(space)?;
    let mut checks = Vec::new();
    let mut push = |name: String, value: f64, threshold: f64| {
        checks.push(CheckLine {
            name,
            value,
            threshold,
            pass: value <= threshold,
        })
    };

    for (name, r) in set.commutator_residuals(config.guard)? {
        push(format!("commutator {name}"), r, COMMUTATOR_TOL);
    }

    let mut states = match &config.state {
        Some(_) => vec![config.realize_state()?],
        None => random_state_suite(space, 5, config.seed)?,
    };
    if config.state.is_none() && space.min_cutoff() >= 3 + space.default_tail_guard() {
        states.push(realize_with_guard(
            &StateSpec::TwoPhotonTheta { theta: FRAC_PI_4 },
            space,
            config.guard_tol,
        )?);
    }
    let phases: Vec<f64> = (0..16).map(|k| k as f64 * TAU / 16.0 + 0.1).collect();
    let (mut pt_moments, mut pt_cov, mut rotation) = (0.0f64, 0.0f64, 0.0f64);
    for st in &states {
        pt_moments = pt_moments.max(verify_pt_moments_with_guard(st, 4, config.guard_tol)?.max_residual);
        pt_cov = pt_cov.max(verify_pt_covariance_with_guard(st, &set, config.guard_tol)?.max_residual());
        rotation = rotation.max(rotation_consistency(st, &set, &phases)?);
    }
    push("pt-moments order<=4".into(), pt_moments, IDENTITY_TOL);
    push("pt-covariance bridge".into(), pt_cov, IDENTITY_TOL);
    push("phase-rotation consistency".into(), rotation, IDENTITY_TOL);

    let bs_guard = 1.min(space.min_cutoff() - 1);
    let (mut mode_map, mut unitarity) = (0.0f64, 0.0f64);
    for (_, phi) in PHASE_SETTINGS {
        let r = mode_map_residual(space, phi, bs_guard)?;
        mode_map = mode_map.max(r.max());
        unitarity = unitarity.max(r.unitarity);
    }
    push("beamsplitter mode map".into(), mode_map, IDENTITY_TOL);
    push("beamsplitter unitarity".into(), unitarity, UNITARITY_TOL);

    let pass = checks.iter().all(|c| c.pass);
    let text = match config.format {
        Format::Json => envelope(
            "verify",
            config,
            json!({ "pass": pass, "states_checked": states.len(), "checks": checks }),
        ),
        Format::Csv => {
            let mut t = String::new();
            for c in &checks {
                let _ = writeln!(
                    t,
                    "{} {}: residual {} (threshold {})",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    format_sig(c.value),
                    format_sig(c.threshold)
                );
            }
            let _ = writeln!(
                t,
                "{}",
                if pass {
                    "all checks passed"
                } else {
                    "some checks failed"
                }
            );
            t
        }
    };
    Ok(CommandOutput {
        text,
        status: Status::from_pass(pass),
    })
}

fn report_json(report: &CriterionReport) -> serde_json::Value {
    json!({
        "w9": report.w9.value,
        "w12": report.w12.value,
        "w14": report.w14.value,
        "verdicts": {
            "w9": report.w9.verdict,
            "w12": report.w12.verdict,
            "w14": report.w14.verdict,
        },
        "witnesses": { "w9": report.w9, "w12": report.w12, "w14": report.w14 },
        "guard_status": report.guard,
        "record": report.record,
        "z_threshold": report.z_threshold,
    })
}

/// Witness report for the configured state (always JSON).
pub fn cmd_witness(config: &RunConfig) -> Result<CommandOutput> {
    let spec = config.require_state()?;
    let state = config.realize_state()?;
    let set = OperatorSet::new(config.space)?;
    let report = evaluate_with_guard(&state, &set, config.tol, config.guard_tol)?;
    let mut body = report_json(&report);
    body["family"] = json!(spec.family());
    body["parameters"] = serde_json::to_value(spec).expect("serializable");
    Ok(CommandOutput::ok(envelope("witness", config, body)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub theta: f64,
    pub w9: f64,
    pub w12: f64,
    pub w14: f64,
    pub mean_n: f64,
    pub var_jx: f64,
    pub var_jy: f64,
    pub cov_xy: f64,
    pub verdict_w12: Verdict,
}

pub fn scan_rows(config: &RunConfig) -> Result<Vec<ScanRow>> {
    if let Some(spec) = &config.state {
        if !matches!(spec, StateSpec::TwoPhotonTheta { .. }) {
            return Err(Error::Config("scan sweeps the two-photon-theta family only".into()));
        }
    }
    let set = OperatorSet::new(config.space)?;
    config
        .theta_grid
        .par_iter()
        .map(|&theta| {
            let spec = StateSpec::TwoPhotonTheta {
                theta: theta.rem_euclid(TAU),
            };
            let state = realize_with_guard(&spec, config.space, config.guard_tol)?;
            let record = covariance_record(&state, &set)?;
            let report = CriterionReport::from_exact(record.clone(), config.tol, None)?;
            Ok(ScanRow {
                theta,
                w9: witness_w9(&record),
                w12: witness_w12(&record),
                w14: witness_w14(&record),
                mean_n: record.mean_n,
                var_jx: record.var_jx,
                var_jy: record.var_jy,
                cov_xy: record.cov_xy,
                verdict_w12: report.w12.verdict,
            })
        })
        .collect()
}

/// θ sweep of the two-photon family.
pub fn cmd_scan(config: &RunConfig) -> Result<CommandOutput> {
    let rows = scan_rows(config)?;
    let text = match config.format {
        Format::Csv => {
            let mut t = String::with_capacity(64 * (rows.len() + 1));
            t.push_str(SCAN_HEADER);
            t.push('\n');
            for r in &rows {
                let nums = [r.theta, r.w9, r.w12, r.w14, r.mean_n, r.var_jx, r.var_jy, r.cov_xy];
                for x in nums {
                    t.push_str(&format_sig(x));
                    t.push(',');
                }
                t.push_str(r.verdict_w12.as_str());
                t.push('\n');
            }
            t
        }
        Format::Json => envelope("scan", config, json!({ "family": "two-photon-theta", "rows": rows })),
    };
    Ok(CommandOutput::ok(text))
}

/// Phase-invariance of w14 (and the lack of it for w9).
pub fn cmd_invariance(config: &RunConfig) -> Result<CommandOutput> {
    let spec = config.require_state()?;
    let state = config.realize_state()?;
    let set = OperatorSet::new(config.space)?;
    let scan = invariance_scan(&state, &set, &config.phi_grid)?;
    let pass = scan.max_delta_w14 <= config.tol;
    let text = match config.format {
        Format::Json => envelope(
            "invariance",
            config,
            json!({
                "family": spec.family(),
                "parameters": spec,
                "pass": pass,
                "max_delta_w14": scan.max_delta_w14,
                "max_delta_w9": scan.max_delta_w9,
                "reference_w14": scan.reference_w14,
                "reference_w9": scan.reference_w9,
                "phases": scan.phases,
                "w14": scan.w14,
                "w9": scan.w9,
            }),
        ),
        Format::Csv => {
            let mut t = String::from("phi,w9,w14\n");
            for ((phi, w9), w14) in scan.phases.iter().zip(&scan.w9).zip(&scan.w14) {
                let _ = writeln!(t, "{},{},{}", format_sig(*phi), format_sig(*w9), format_sig(*w14));
            }
            t
        }
    };
    Ok(CommandOutput {
        text,
        status: Status::from_pass(pass),
    })
}

/// Finite-shot run of the four-setting measurement protocol (always JSON).
pub fn cmd_simulate(config: &RunConfig) -> Result<CommandOutput> {
    let spec = config.require_state()?;
    let state = config.realize_state()?;
    let records = simulate_protocol(&state, config.shots, config.seed)?;
    let recon = reconstruct(&records)?;
    let report = estimated_report(recon, config.tol, config.z_threshold)?;
    let settings: Vec<_> = records
        .iter()
        .zip(PHASE_SETTINGS)
        .map(|(r, (name, _))| {
            json!({
                "setting": name,
                "phi": r.phi,
                "seed": r.seed,
                "shots": r.shots,
                "mean_n_minus": r.mean_n_minus,
                "mean_n_minus_sq": r.mean_n_minus_sq,
                "mean_n_plus": r.mean_n_plus,
                "stderr_n_minus": r.stderr_n_minus,
                "stderr_n_minus_sq": r.stderr_n_minus_sq,
                "stderr_n_plus": r.stderr_n_plus,
                "counts": r.counts.iter().map(|((c, d), k)| json!([c, d, k])).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut body = report_json(&report);
    body["family"] = json!(spec.family());
    body["parameters"] = serde_json::to_value(spec).expect("serializable");
    body["shots_per_setting"] = json!(config.shots);
    body["seed"] = json!(config.seed);
    body["settings"] = json!(settings);
    Ok(CommandOutput::ok(envelope("simulate", config, body)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Verify,
    Witness,
    Scan,
    Invariance,
    Simulate,
}

pub fn run(command: Command, config: &RunConfig) -> Result<CommandOutput> {
    match command {
        Command::Verify => cmd_verify(config),
        Command::Witness => cmd_witness(config),
        Command::Scan => cmd_scan(config),
        Command::Invariance => cmd_invariance(config),
        Command::Simulate => cmd_simulate(config),
    }
}
