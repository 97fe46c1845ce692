//! Monte Carlo experiments on simulated traces.
//!
//! Every experiment is described by one [`ExperimentConfig`]. Traces are
//! independent jobs (trace `i` draws from random stream `i` of the seed) and
//! are reduced in index order, so results do not depend on the thread count.
//! Constants in the moment bounds are never assumed: each table fits its own
//! constant and only shape statements are checked.

use serde::{Deserialize, Serialize};
use slereg_core::exponents::{
    admissible_besov, alpha_star, alpha_zero, check_delta, interval_i, p_star, q_of_r, r_critical, zeta_of_r, BesovParams, WindowMode,
};
use slereg_core::regularity::{besov_seminorm_pow, dyadic_variation_sums, embedding_check, SampledPath};
use slereg_core::{rng, Complex64, DrivingPath, Kappa};

use crate::error::{Error, Result};
use crate::manifest::config_hash;
use crate::runner::{Runner, TraceRecord};
use crate::stats::{self, LinearFit};

pub const SCHEMA_VERSION: u32 = 1;
/// Largest tolerated fraction of flagged derivative samples.
pub const FLAGGED_LIMIT: f64 = 0.01;
/// Blocks used by the median-of-means cross-check.
pub const MOM_BLOCKS: usize = 16;
/// Allowed shortfall of a fitted decay exponent below its bound.
pub const EXPONENT_SLACK: f64 = 0.15;
/// Relative change allowed between the half-sample and full-sample means.
pub const STABILITY_TOL: f64 = 0.05;
/// Random stream reserved for bootstrap resampling.
const BOOTSTRAP_STREAM: u64 = u64::MAX;
/// First random stream of the synthetic paths in the embedding experiment.
const SYNTHETIC_STREAM: u64 = 1 << 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    DerivativeMomentScan,
    IncrementMomentScan,
    BesovFiniteness,
    CriticalPvar,
    CriticalHoelder,
    ScalingLaw,
    Embedding,
}

/// One experiment. Fields not used by a kind must be absent or are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub kind: ExperimentKind,
    pub kappa: f64,
    pub n_traces: usize,
    pub dt: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_tilde: Option<f64>,
    /// `(s, y)` pairs for derivative scans and the scaling test, `(s, t)` for
    /// increment scans.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub grid: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Finest dyadic level of the sampled trace (`2^max_level` intervals).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_level: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_levels: Option<[u32; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_grid: Option<Vec<f64>>,
    /// Trace evaluation height as a multiple of `√dt`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_factor: Option<f64>,
    /// Mesh levels `L` (`2^L` intervals) at which Besov norms are evaluated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_levels: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic_paths: Option<usize>,
    /// Run a Besov experiment outside the admissible window on purpose.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub contrast: bool,
    /// Output directory. Not part of the configuration hash.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl ExperimentConfig {
    /// Skeleton with the required fields; everything else unset.
    pub fn new(kind: ExperimentKind, kappa: f64, n_traces: usize, dt: f64, seed: u64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            kind,
            kappa,
            n_traces,
            dt,
            seed,
            r: None,
            r_tilde: None,
            grid: Vec::new(),
            delta: None,
            q: None,
            epsilon: None,
            max_level: None,
            fit_levels: None,
            p_grid: None,
            y_factor: None,
            sample_levels: None,
            bootstrap: None,
            synthetic_paths: None,
            contrast: false,
            output: None,
        }
    }

    /// Parses a JSON document, reporting the JSON path of schema violations.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(format!("$.{}", if path == "." { "" } else { &path }), e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Configuration text the hash is computed over (the output location is
    /// left out, so the same experiment hashes the same wherever it is written).
    pub fn canonical_json(&self) -> String {
        let mut c = self.clone();
        c.output = None;
        serde_json::to_string(&c).expect("config serializes")
    }

    pub fn hash(&self) -> String {
        config_hash(&self.canonical_json())
    }

    pub fn kappa(&self) -> Result<Kappa> {
        Kappa::new(self.kappa).map_err(|e| Error::config("$.kappa", e.to_string()))
    }

    fn y_factor(&self) -> f64 {
        self.y_factor.unwrap_or(match self.kind {
            ExperimentKind::CriticalHoelder => 0.01,
            _ => 1.0,
        })
    }

    fn bootstrap(&self) -> usize {
        self.bootstrap.unwrap_or(1000)
    }

    fn r(&self) -> Result<f64> {
        self.r.ok_or_else(|| Error::config("$.r", "required for this experiment"))
    }

    fn n_steps_unit(&self) -> Result<usize> {
        let n = (1.0 / self.dt).round();
        if (n * self.dt - 1.0).abs() > 1e-9 {
            return Err(Error::config("$.dt", format!("1/dt must be an integer, got {}", 1.0 / self.dt)));
        }
        Ok(n as usize)
    }

    fn dyadic_stride(&self, level: u32, field: &str) -> Result<usize> {
        let steps = self.n_steps_unit()?;
        let pieces = 1usize.checked_shl(level).filter(|&p| p <= steps && steps % p == 0);
        pieces
            .map(|p| steps / p)
            .ok_or_else(|| Error::config(field, format!("2^{level} must divide the {steps} steps of [0, 1]")))
    }

    fn max_level(&self) -> u32 {
        self.max_level.unwrap_or(13)
    }

    fn sample_levels(&self) -> Vec<u32> {
        self.sample_levels.clone().unwrap_or_else(|| vec![10])
    }

    fn epsilon(&self) -> f64 {
        self.epsilon.unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::config("$.schema_version", format!("expected {SCHEMA_VERSION}, got {}", self.schema_version)));
        }
        let kappa = self.kappa()?;
        if self.n_traces < 1 {
            return Err(Error::config("$.n_traces", "must be at least 1"));
        }
        if !(self.dt > 0.0 && self.dt < 1.0) {
            return Err(Error::config("$.dt", format!("need 0 < dt < 1, got {}", self.dt)));
        }
        if let Some(y) = self.y_factor {
            if !(y > 0.0 && y.is_finite()) {
                return Err(Error::config("$.y_factor", "must be positive"));
            }
        }
        if let Some(e) = self.epsilon {
            let hi_ok = if self.kind == ExperimentKind::CriticalHoelder { e < 1.0 } else { e <= 1.0 };
            if !(e >= 0.0 && hi_ok) {
                return Err(Error::config("$.epsilon", format!("out of range: {e}")));
            }
        }
        match self.kind {
            ExperimentKind::DerivativeMomentScan => {
                self.require_in_i(kappa)?;
                self.require_grid(|i, [s, y]| {
                    if s > 0.0 && s <= 1.0 && y > 0.0 && y <= 1.0 {
                        self.grid_index(s, &format!("$.grid[{i}][0]")).map(|_| ())
                    } else {
                        Err(Error::config(format!("$.grid[{i}]"), "need s, y in (0, 1]"))
                    }
                })?;
            }
            ExperimentKind::IncrementMomentScan => {
                let r = self.require_in_i(kappa)?;
                let rc = r_critical(kappa);
                let rt = self.r_tilde.unwrap_or(0.5 * (r + rc));
                if !(rt > r && rt < rc) {
                    return Err(Error::config("$.r_tilde", format!("need r < r_tilde < r_c = {rc}, got {rt}")));
                }
                self.require_grid(|i, [s, t]| {
                    if s > 0.0 && s <= t && t <= 1.0 {
                        self.grid_index(s, &format!("$.grid[{i}][0]"))?;
                        self.grid_index(t, &format!("$.grid[{i}][1]")).map(|_| ())
                    } else {
                        Err(Error::config(format!("$.grid[{i}]"), "need 0 < s <= t <= 1"))
                    }
                })?;
            }
            ExperimentKind::BesovFiniteness => {
                let r = self.r()?;
                let delta = self.delta.ok_or_else(|| Error::config("$.delta", "required"))?;
                if self.contrast {
                    BesovParams::new(delta, q_of_r(r, kappa)).map_err(|e| Error::config("$.delta", e.to_string()))?;
                } else {
                    if !admissible_besov(kappa).contains(r) {
                        return Err(Error::config("$.r", format!("r = {r} is not in I ∩ J1 = {}", admissible_besov(kappa))));
                    }
                    check_delta(r, kappa, WindowMode::Besov, delta).map_err(|e| Error::config("$.delta", e.to_string()))?;
                }
                let levels = self.sample_levels();
                if levels.is_empty() {
                    return Err(Error::config("$.sample_levels", "must not be empty"));
                }
                for (i, &l) in levels.iter().enumerate() {
                    self.dyadic_stride(l, &format!("$.sample_levels[{i}]"))?;
                }
            }
            ExperimentKind::CriticalPvar => {
                if self.n_traces < 50 {
                    return Err(Error::config("$.n_traces", "critical exponent estimation needs at least 50 traces"));
                }
                let ml = self.max_level();
                self.dyadic_stride(ml, "$.max_level")?;
                let [lo, hi] = self.fit_levels.unwrap_or([4.min(ml), ml.saturating_sub(2).max(1)]);
                if !(1 <= lo && lo < hi && hi <= ml) {
                    return Err(Error::config("$.fit_levels", format!("need 1 <= lo < hi <= max_level = {ml}")));
                }
                if let Some(ps) = &self.p_grid {
                    if ps.len() < 2 || ps.windows(2).any(|w| !(w[0] < w[1])) || ps[0] < 1.0 {
                        return Err(Error::config("$.p_grid", "need an increasing grid of at least two values >= 1"));
                    }
                }
            }
            ExperimentKind::CriticalHoelder => {
                if self.n_traces < 2 {
                    return Err(Error::config("$.n_traces", "need at least 2 traces"));
                }
                let ml = self.max_level();
                self.dyadic_stride(ml, "$.max_level")?;
                let [lo, hi] = self.hoelder_fit_levels();
                if !(1 <= lo && lo < hi && hi < ml) {
                    return Err(Error::config("$.fit_levels", format!("need 1 <= lo < hi < max_level = {ml}")));
                }
            }
            ExperimentKind::ScalingLaw => {
                if self.grid.len() != 1 {
                    return Err(Error::config("$.grid", "exactly one (s, y) pair"));
                }
                let [s, y] = self.grid[0];
                if !(s > 0.0 && y > 0.0) {
                    return Err(Error::config("$.grid[0]", "need s, y > 0"));
                }
                self.grid_index(s, "$.grid[0][0]")?;
                self.grid_index(s / (y * y), "$.grid[0]")?;
            }
            ExperimentKind::Embedding => {
                self.embedding_params(kappa)?;
                for (i, &l) in self.sample_levels().iter().enumerate() {
                    self.dyadic_stride(l, &format!("$.sample_levels[{i}]"))?;
                }
            }
        }
        Ok(())
    }

    fn require_in_i(&self, kappa: Kappa) -> Result<f64> {
        let r = self.r()?;
        if !interval_i(kappa).contains(r) {
            return Err(Error::config("$.r", format!("r = {r} is not in I = {}", interval_i(kappa))));
        }
        Ok(r)
    }

    fn require_grid(&self, check: impl Fn(usize, [f64; 2]) -> Result<()>) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::config("$.grid", "must not be empty"));
        }
        self.grid.iter().enumerate().try_for_each(|(i, &g)| check(i, g))
    }

    /// Index of time `t` on the `dt` grid; `t` must sit on it.
    fn grid_index(&self, t: f64, field: &str) -> Result<usize> {
        let k = (t / self.dt).round();
        if (k * self.dt - t).abs() > 1e-9 * t.max(self.dt) {
            return Err(Error::config(field, format!("{t} is not a multiple of dt = {}", self.dt)));
        }
        Ok(k as usize)
    }

    fn hoelder_fit_levels(&self) -> [u32; 2] {
        let ml = self.max_level();
        self.fit_levels.unwrap_or([ml.saturating_sub(5).max(1), ml.saturating_sub(1)])
    }

    fn embedding_params(&self, kappa: Kappa) -> Result<BesovParams> {
        let delta = self.delta.ok_or_else(|| Error::config("$.delta", "required"))?;
        match (self.q, self.r) {
            (Some(q), _) => BesovParams::for_embedding(delta, q).map_err(|e| Error::config("$.q", e.to_string())),
            (None, Some(r)) => check_delta(r, kappa, WindowMode::Pvar, delta).map_err(|e| Error::config("$.delta", e.to_string())),
            (None, None) => Err(Error::config("$.r", "give r (window-checked) or q")),
        }
    }
}

/// Plain numeric table written as CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }
}

/// Held-out check of `mean ≤ ĉ · envelope`: `ĉ` is fitted on the even-indexed
/// traces as the largest ratio over rows, then every row of the odd-indexed
/// traces must satisfy it up to three standard errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Domination {
    pub c_hat: f64,
    /// Largest ratio over all traces (not used for the check).
    pub c_hat_all: f64,
    pub failed_rows: Vec<usize>,
    pub pass: bool,
}

fn domination(columns: &[Vec<f64>], even: &[Vec<f64>], odd: &[Vec<f64>], envelope: &[f64]) -> Domination {
    let ratio = |col: &Vec<f64>, env: f64| if env > 0.0 { stats::mean(col) / env } else { f64::NAN };
    let max_finite = |it: &mut dyn Iterator<Item = f64>| it.filter(|v| v.is_finite()).fold(0.0f64, f64::max);
    let c_hat = max_finite(&mut even.iter().zip(envelope).map(|(c, &e)| ratio(c, e)));
    let c_hat_all = max_finite(&mut columns.iter().zip(envelope).map(|(c, &e)| ratio(c, e)));
    let failed_rows: Vec<usize> = odd
        .iter()
        .zip(envelope)
        .enumerate()
        .filter(|(_, (col, &env))| stats::mean(col) - 3.0 * stats::std_err(col) > c_hat * env)
        .map(|(i, _)| i)
        .collect();
    Domination { c_hat, c_hat_all, pass: failed_rows.is_empty(), failed_rows }
}

/// Row of a [`MomentTable`]: `a, b` are `(s, y)` or `(s, t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentRow {
    pub a: f64,
    pub b: f64,
    pub samples: usize,
    pub mean: f64,
    pub std_err: f64,
    pub median_of_means: f64,
    pub envelope: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub envelope_alt: Option<f64>,
    pub flagged: usize,
    pub unreliable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentTable {
    pub config_hash: String,
    pub q: f64,
    pub zeta: f64,
    pub rows: Vec<MomentRow>,
    /// Rows share traces, so rows are correlated; error bars ignore this.
    pub rows_share_traces: bool,
}

impl MomentTable {
    fn to_table(&self) -> Table {
        let mut t = Table::new(&["a", "b", "samples", "mean", "std_err", "median_of_means", "envelope", "envelope_alt", "flagged", "unreliable"]);
        for r in &self.rows {
            t.rows.push(vec![
                r.a,
                r.b,
                r.samples as f64,
                r.mean,
                r.std_err,
                r.median_of_means,
                r.envelope,
                r.envelope_alt.unwrap_or(f64::NAN),
                r.flagged as f64,
                f64::from(u8::from(r.unreliable)),
            ]);
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentFit {
    /// The abscissa held fixed (`s`).
    pub fixed: f64,
    pub points: usize,
    pub fit: LinearFit,
    pub target: f64,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollapseCheck {
    pub rows: (usize, usize),
    pub ratio: f64,
    pub z: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeReport {
    pub table: MomentTable,
    pub domination: Domination,
    /// Fits of `log E|f̂'_s(iy)|^q` against `log y` at fixed `s`, over rows
    /// with `s ≥ y²`, compared with `ζ`.
    pub y_exponents: Vec<ExponentFit>,
    /// Rows with equal `s/y²` (computed on shared traces).
    pub collapse: Vec<CollapseCheck>,
    pub flagged_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncrementReport {
    pub table: MomentTable,
    pub r_tilde: f64,
    pub r_tilde_alt: f64,
    pub domination: Domination,
    pub domination_alt: Domination,
    /// Fits of `log E|γ(t)−γ(s)|^q` against `log(t−s)` at fixed `s`,
    /// compared with `(q+ζ)/2`.
    pub lag_exponents: Vec<ExponentFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BesovLevel {
    pub level: u32,
    pub mean: f64,
    pub variance: f64,
    pub std_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BesovReport {
    pub q: f64,
    pub delta: f64,
    pub window: (f64, f64),
    pub epsilon: f64,
    pub contrast: bool,
    pub levels: Vec<BesovLevel>,
    /// Running mean at the finest level after each doubling of the sample.
    pub running_means: Vec<(usize, f64)>,
    pub half_change: f64,
    pub stable: bool,
    /// Mean at each level divided by the mean at the previous level.
    pub refinement_growth: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPvarReport {
    pub p_grid: Vec<f64>,
    pub mean_slopes: Vec<f64>,
    pub slope_std_errs: Vec<f64>,
    pub fit_levels: [u32; 2],
    pub p_hat: Option<f64>,
    pub interval: (f64, f64),
    pub monotone: bool,
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalHoelderReport {
    pub levels: Vec<u32>,
    pub mean_log2_sup: Vec<f64>,
    pub fit_levels: [u32; 2],
    pub alpha_hat: f64,
    pub interval: (f64, f64),
    pub target: f64,
    pub target_name: &'static str,
    pub epsilon: f64,
    pub y_factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub s: f64,
    pub y: f64,
    pub samples: (usize, usize),
    pub means: (f64, f64),
    pub ks: stats::KsResult,
    pub rejected_at_1pct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingSummary {
    pub delta: f64,
    pub q: f64,
    pub windows: Vec<(f64, f64)>,
    pub simulated: usize,
    pub synthetic: usize,
    pub c_hat: f64,
    pub c_hat_first_half: f64,
    pub c_hat_simulated: f64,
    pub c_hat_synthetic: f64,
    pub hoelder_c_hat: f64,
    pub vacuous: usize,
    pub inconsistent: usize,
    /// `c_hat` exceeds the half-sample constant by at most 10%.
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Report {
    DerivativeMomentScan(DerivativeReport),
    IncrementMomentScan(IncrementReport),
    BesovFiniteness(BesovReport),
    CriticalPvar(CriticalPvarReport),
    CriticalHoelder(CriticalHoelderReport),
    ScalingLaw(ScalingReport),
    Embedding(EmbeddingSummary),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub config_hash: String,
    pub report: Report,
    pub table: Table,
}

/// Runs `cfg` on `runner`.
pub fn run(cfg: &ExperimentConfig, runner: &Runner) -> Result<Outcome> {
    cfg.validate()?;
    let report = match cfg.kind {
        ExperimentKind::DerivativeMomentScan => Report::DerivativeMomentScan(derivative_moment_scan(cfg, runner)?),
        ExperimentKind::IncrementMomentScan => Report::IncrementMomentScan(increment_moment_scan(cfg, runner)?),
        ExperimentKind::BesovFiniteness => Report::BesovFiniteness(besov_finiteness(cfg, runner)?),
        ExperimentKind::CriticalPvar => Report::CriticalPvar(critical_pvar_estimate(cfg, runner)?),
        ExperimentKind::CriticalHoelder => Report::CriticalHoelder(critical_hoelder_estimate(cfg, runner)?),
        ExperimentKind::ScalingLaw => Report::ScalingLaw(scaling_law(cfg, runner)?),
        ExperimentKind::Embedding => Report::Embedding(embedding(cfg, runner)?),
    };
    let table = report_table(&report);
    Ok(Outcome { config_hash: cfg.hash(), report, table })
}

fn report_table(report: &Report) -> Table {
    match report {
        Report::DerivativeMomentScan(r) => r.table.to_table(),
        Report::IncrementMomentScan(r) => r.table.to_table(),
        Report::BesovFiniteness(r) => {
            let mut t = Table::new(&["level", "mean", "variance", "std_err"]);
            t.rows = r.levels.iter().map(|l| vec![l.level as f64, l.mean, l.variance, l.std_err]).collect();
            t
        }
        Report::CriticalPvar(r) => {
            let mut t = Table::new(&["p", "mean_slope", "std_err"]);
            t.rows = (0..r.p_grid.len()).map(|i| vec![r.p_grid[i], r.mean_slopes[i], r.slope_std_errs[i]]).collect();
            t
        }
        Report::CriticalHoelder(r) => {
            let mut t = Table::new(&["level", "mean_log2_sup"]);
            t.rows = r.levels.iter().zip(&r.mean_log2_sup).map(|(&l, &v)| vec![l as f64, v]).collect();
            t
        }
        Report::ScalingLaw(r) => {
            let mut t = Table::new(&["s", "y", "mean_direct", "mean_rescaled", "ks_statistic", "p_value"]);
            t.rows.push(vec![r.s, r.y, r.means.0, r.means.1, r.ks.statistic, r.ks.p_value]);
            t
        }
        Report::Embedding(r) => {
            let mut t = Table::new(&["c_hat", "c_hat_first_half", "c_hat_simulated", "c_hat_synthetic", "hoelder_c_hat"]);
            t.rows.push(vec![r.c_hat, r.c_hat_first_half, r.c_hat_simulated, r.c_hat_synthetic, r.hoelder_c_hat]);
            t
        }
    }
}

/// Per-column samples of the non-flagged values.
fn columns(records: &[TraceRecord], width: usize, keep: impl Fn(u64) -> bool) -> Vec<Vec<f64>> {
    let mut cols = vec![Vec::with_capacity(records.len()); width];
    for r in records.iter().filter(|r| keep(r.index)) {
        for (c, v) in cols.iter_mut().zip(&r.values) {
            if let Some(v) = v {
                c.push(*v);
            }
        }
    }
    cols
}

fn check_flagged(records: &[TraceRecord]) -> Result<f64> {
    let total: usize = records.iter().map(|r| r.values.len()).sum();
    let flagged: usize = records.iter().map(TraceRecord::flagged).sum();
    let frac = if total == 0 { 0.0 } else { flagged as f64 / total as f64 };
    if frac > FLAGGED_LIMIT {
        return Err(Error::TooManyFlagged { flagged, total, limit: FLAGGED_LIMIT });
    }
    Ok(frac)
}

fn moment_rows(grid: &[[f64; 2]], records: &[TraceRecord], cols: &[Vec<f64>], envelope: &[f64], alt: Option<&[f64]>) -> Vec<MomentRow> {
    grid.iter()
        .enumerate()
        .map(|(j, &[a, b])| {
            let col = &cols[j];
            let flagged = records.len() - col.len();
            MomentRow {
                a,
                b,
                samples: col.len(),
                mean: stats::mean(col),
                std_err: stats::std_err(col),
                median_of_means: stats::median_of_means(col, MOM_BLOCKS),
                envelope: envelope[j],
                envelope_alt: alt.map(|e| e[j]),
                flagged,
                unreliable: flagged as f64 >= FLAGGED_LIMIT * records.len() as f64,
            }
        })
        .collect()
}

/// Fits `ln mean` against `ln x` for each group of rows sharing `fixed`.
fn exponent_fits(rows: &[(f64, f64, f64)], target: f64, slack: impl Fn(f64) -> bool) -> Vec<ExponentFit> {
    let mut keys: Vec<f64> = rows.iter().map(|r| r.0).collect();
    keys.sort_by(f64::total_cmp);
    keys.dedup();
    keys.into_iter()
        .filter_map(|fixed| {
            let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.0 == fixed && r.1 > 0.0 && r.2 > 0.0).map(|r| (r.1.ln(), r.2.ln())).collect();
            let distinct = {
                let mut xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
                xs.sort_by(f64::total_cmp);
                xs.dedup();
                xs.len()
            };
            if distinct < 3 {
                return None;
            }
            let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
            let fit = stats::ols(&x, &y);
            Some(ExponentFit { fixed, points: x.len(), fit, target, consistent: slack(fit.slope) })
        })
        .collect()
}

/// `E|f̂'_s(iy)|^q` over the `(s, y)` grid with the bound `A_s y^ζ`,
/// `A_s = max(s^{−ζ/2}, 1)`.
pub fn derivative_moment_scan(cfg: &ExperimentConfig, runner: &Runner) -> Result<DerivativeReport> {
    let kappa = cfg.kappa()?;
    let r = cfg.r()?;
    let (q, zeta) = (q_of_r(r, kappa), zeta_of_r(r, kappa));
    let ks: Vec<usize> = cfg.grid.iter().map(|g| cfg.grid_index(g[0], "$.grid")).collect::<Result<_>>()?;
    let steps = *ks.iter().max().unwrap();
    let queries: Vec<(usize, Complex64)> = ks.iter().zip(&cfg.grid).map(|(&k, g)| (k, Complex64::new(0.0, g[1]))).collect();
    let records = runner.run(cfg.n_traces, |i| {
        let d = DrivingPath::sample_stream(kappa, steps as f64 * cfg.dt, steps, cfg.seed, i)?;
        let samples = d.fhat_derivatives(&queries)?;
        let values = samples.iter().map(|s| (!s.flagged).then(|| s.value.powf(q))).collect();
        Ok(TraceRecord::new(i, values, 0))
    })?;
    let flagged_fraction = check_flagged(&records)?;
    let width = cfg.grid.len();
    let cols = columns(&records, width, |_| true);
    let even = columns(&records, width, |i| i % 2 == 0);
    let odd = columns(&records, width, |i| i % 2 == 1);
    let envelope: Vec<f64> = cfg.grid.iter().map(|&[s, y]| s.powf(-zeta / 2.0).max(1.0) * y.powf(zeta)).collect();
    let rows = moment_rows(&cfg.grid, &records, &cols, &envelope, None);
    let dom = domination(&cols, &even, &odd, &envelope);
    let fit_rows: Vec<(f64, f64, f64)> = rows.iter().filter(|r| r.a >= r.b * r.b).map(|r| (r.a, r.b, r.mean)).collect();
    let y_exponents = exponent_fits(&fit_rows, zeta, |slope| slope >= zeta - EXPONENT_SLACK);
    let mut collapse = Vec::new();
    for i in 0..width {
        for j in i + 1..width {
            let (ri, rj) = (cfg.grid[i][0] / cfg.grid[i][1].powi(2), cfg.grid[j][0] / cfg.grid[j][1].powi(2));
            if ((ri - rj) / ri).abs() < 1e-12 {
                let (z, p_value) = stats::welch_p_value(&cols[i], &cols[j]);
                collapse.push(CollapseCheck { rows: (i, j), ratio: ri, z, p_value });
            }
        }
    }
    let table = MomentTable { config_hash: cfg.hash(), q, zeta, rows, rows_share_traces: true };
    Ok(DerivativeReport { table, domination: dom, y_exponents, collapse, flagged_fraction })
}

/// `E|γ(t)−γ(s)|^q` over the `(s, t)` grid with the two-term bound evaluated
/// for two choices of `r̃`.
pub fn increment_moment_scan(cfg: &ExperimentConfig, runner: &Runner) -> Result<IncrementReport> {
    let kappa = cfg.kappa()?;
    let r = cfg.r()?;
    let rc = r_critical(kappa);
    let (q, zeta) = (q_of_r(r, kappa), zeta_of_r(r, kappa));
    let r_tilde = cfg.r_tilde.unwrap_or(0.5 * (r + rc));
    let r_tilde_alt = r + 0.9 * (rc - r);
    let idx: Vec<(usize, usize)> = cfg
        .grid
        .iter()
        .map(|&[s, t]| Ok((cfg.grid_index(s, "$.grid")?, cfg.grid_index(t, "$.grid")?)))
        .collect::<Result<_>>()?;
    let steps = idx.iter().map(|p| p.1).max().unwrap();
    let mut needed: Vec<usize> = idx.iter().flat_map(|&(a, b)| [a, b]).collect();
    needed.sort_unstable();
    needed.dedup();
    let y_eval = cfg.y_factor() * cfg.dt.sqrt();
    let queries: Vec<(usize, Complex64)> = needed.iter().map(|&k| (k, Complex64::new(0.0, y_eval))).collect();
    let records = runner.run(cfg.n_traces, |i| {
        let d = DrivingPath::sample_stream(kappa, steps as f64 * cfg.dt, steps, cfg.seed, i)?;
        let (pts, clamps) = d.fhat_many(&queries)?;
        let at = |k: usize| pts[needed.binary_search(&k).unwrap()];
        let values = idx.iter().map(|&(a, b)| Some(if a == b { 0.0 } else { (at(b) - at(a)).norm().powf(q) })).collect();
        Ok(TraceRecord::new(i, values, clamps))
    })?;
    let envelope_for = |rt: f64| -> Vec<f64> {
        let (qt, zt) = (q_of_r(rt, kappa), zeta_of_r(rt, kappa));
        let theta = qt / q;
        cfg.grid
            .iter()
            .map(|&[s, t]| {
                let h = t - s;
                if h == 0.0 {
                    return 0.0;
                }
                let a_s = s.powf(-zeta / 2.0).max(1.0);
                h.powf((q + zeta) / 2.0) * (a_s + t.powf(-zeta / 2.0)) + h.powf(0.5 * (q + zt / theta)) * t.powf(-zt / (2.0 * theta))
            })
            .collect()
    };
    let width = cfg.grid.len();
    let cols = columns(&records, width, |_| true);
    let even = columns(&records, width, |i| i % 2 == 0);
    let odd = columns(&records, width, |i| i % 2 == 1);
    let env = envelope_for(r_tilde);
    let env_alt = envelope_for(r_tilde_alt);
    let rows = moment_rows(&cfg.grid, &records, &cols, &env, Some(&env_alt));
    let target = (q + zeta) / 2.0;
    let fit_rows: Vec<(f64, f64, f64)> = rows.iter().map(|r| (r.a, r.b - r.a, r.mean)).collect();
    let lag_exponents = exponent_fits(&fit_rows, target, |slope| (slope - target).abs() <= 0.1);
    Ok(IncrementReport {
        domination: domination(&cols, &even, &odd, &env),
        domination_alt: domination(&cols, &even, &odd, &env_alt),
        table: MomentTable { config_hash: cfg.hash(), q, zeta, rows, rows_share_traces: true },
        r_tilde,
        r_tilde_alt,
        lag_exponents,
    })
}

/// Distribution of `‖γ‖^q_{W^{δ,q};[ε,1]}` over traces.
pub fn besov_finiteness(cfg: &ExperimentConfig, runner: &Runner) -> Result<BesovReport> {
    let kappa = cfg.kappa()?;
    let r = cfg.r()?;
    let delta = cfg.delta.unwrap();
    let q = q_of_r(r, kappa);
    let params = BesovParams::new(delta, q)?;
    let window = (0.0, (zeta_of_r(r, kappa) + q) / (2.0 * q));
    let epsilon = cfg.epsilon();
    let mut levels = cfg.sample_levels();
    levels.sort_unstable();
    levels.dedup();
    let finest = *levels.last().unwrap();
    let fine_stride = cfg.dyadic_stride(finest, "$.sample_levels")?;
    let steps = cfg.n_steps_unit()?;
    let y_eval = cfg.y_factor() * cfg.dt.sqrt();
    let records = runner.run(cfg.n_traces, |i| {
        let d = DrivingPath::sample_stream(kappa, 1.0, steps, cfg.seed, i)?;
        let trace = d.trace_strided(fine_stride, y_eval)?;
        let full = trace.to_sampled()?;
        let values = levels
            .iter()
            .map(|&l| {
                let path = match full.subsample(1 << (finest - l)).window(epsilon, 1.0) {
                    Ok(p) if p.len() >= 2 => p,
                    Ok(_) | Err(slereg_core::Error::TooFewSamples { .. }) => return Ok(Some(0.0)),
                    Err(e) => return Err(e.into()),
                };
                Ok(Some(besov_seminorm_pow(&path, params)?.value))
            })
            .collect::<Result<_>>()?;
        Ok(TraceRecord::new(i, values, trace.clamps))
    })?;
    let cols = columns(&records, levels.len(), |_| true);
    let level_stats: Vec<BesovLevel> = levels
        .iter()
        .zip(&cols)
        .map(|(&level, c)| BesovLevel { level, mean: stats::mean(c), variance: stats::variance(c), std_err: stats::std_err(c) })
        .collect();
    let fine = cols.last().unwrap();
    let mut running_means = Vec::new();
    let mut n = 1;
    while n < fine.len() {
        running_means.push((n, stats::mean(&fine[..n])));
        n *= 2;
    }
    running_means.push((fine.len(), stats::mean(fine)));
    let half = stats::mean(&fine[..fine.len().div_ceil(2)]);
    let all = stats::mean(fine);
    let half_change = if all == 0.0 { 0.0 } else { ((half - all) / all).abs() };
    let refinement_growth = level_stats.windows(2).map(|w| w[1].mean / w[0].mean).collect();
    Ok(BesovReport {
        q,
        delta,
        window,
        epsilon,
        contrast: cfg.contrast,
        levels: level_stats,
        running_means,
        half_change,
        stable: half_change < STABILITY_TOL,
        refinement_growth,
    })
}

fn default_p_grid(target: f64) -> Vec<f64> {
    (0..=40).map(|i| (target - 0.4).max(1.0) + 0.02 * f64::from(i)).collect()
}

/// Critical p from the level dependence of dyadic variation sums: for each
/// trace and `p`, the OLS slope of `log2 S_p(m)` in `m` over the fit levels;
/// `p̂` is where the mean slope changes sign.
pub fn critical_pvar_estimate(cfg: &ExperimentConfig, runner: &Runner) -> Result<CriticalPvarReport> {
    let kappa = cfg.kappa()?;
    let target = p_star(kappa);
    let ml = cfg.max_level();
    let stride = cfg.dyadic_stride(ml, "$.max_level")?;
    let steps = cfg.n_steps_unit()?;
    let [lo, hi] = cfg.fit_levels.unwrap_or([4.min(ml), ml.saturating_sub(2).max(1)]);
    let p_grid = cfg.p_grid.clone().unwrap_or_else(|| default_p_grid(target));
    let y_eval = cfg.y_factor() * cfg.dt.sqrt();
    let xs: Vec<f64> = (lo..=hi).map(f64::from).collect();
    let records = runner.run(cfg.n_traces, |i| {
        let d = DrivingPath::sample_stream(kappa, 1.0, steps, cfg.seed, i)?;
        let trace = d.trace_strided(stride, y_eval)?;
        let path = trace.to_sampled()?;
        let slopes = p_grid
            .iter()
            .map(|&p| {
                let sums = dyadic_variation_sums(&path, p, ml)?;
                let ys: Vec<f64> = (lo..=hi).map(|m| sums[m as usize - 1].log2()).collect();
                Ok(stats::ols(&xs, &ys).slope)
            })
            .collect::<Result<_>>()?;
        Ok(TraceRecord::dense(i, slopes, trace.clamps))
    })?;
    let rows: Vec<Vec<f64>> = records.iter().map(|r| r.values.iter().map(|v| v.unwrap()).collect()).collect();
    let mean_curve = |rows: &[Vec<f64>]| -> Vec<f64> { (0..p_grid.len()).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / rows.len() as f64).collect() };
    let mean_slopes = mean_curve(&rows);
    let slope_std_errs = (0..p_grid.len()).map(|j| stats::std_err(&rows.iter().map(|r| r[j]).collect::<Vec<_>>())).collect();
    let p_hat = stats::zero_crossing(&p_grid, &mean_slopes);
    let monotone = mean_slopes.windows(2).all(|w| w[1] < w[0]);
    let mut rng = rng::stream(cfg.seed, BOOTSTRAP_STREAM);
    let (mut a, mut b) = stats::bootstrap_interval(&rows, cfg.bootstrap(), 0.95, &mut rng, |sample| {
        stats::zero_crossing(&p_grid, &mean_curve(sample)).unwrap_or(f64::NAN)
    });
    if !monotone {
        // every sign change is a candidate; widen to cover all of them
        for w in 1..p_grid.len() {
            if (mean_slopes[w - 1] > 0.0) != (mean_slopes[w] > 0.0) {
                a = a.min(p_grid[w - 1]);
                b = b.max(p_grid[w]);
            }
        }
    }
    Ok(CriticalPvarReport { p_grid, mean_slopes, slope_std_errs, fit_levels: [lo, hi], p_hat, interval: (a, b), monotone, target })
}

/// Hölder exponent from the decay of the largest increment at dyadic lags on
/// `[ε, 1]`: the OLS slope of `log2 sup|γ(t+h) − γ(t)|` against `log2 h`.
pub fn critical_hoelder_estimate(cfg: &ExperimentConfig, runner: &Runner) -> Result<CriticalHoelderReport> {
    let kappa = cfg.kappa()?;
    let epsilon = cfg.epsilon();
    let (target, target_name) = if epsilon > 0.0 { (alpha_star(kappa), "alpha_star") } else { (alpha_zero(kappa), "alpha_zero") };
    let ml = cfg.max_level();
    let stride = cfg.dyadic_stride(ml, "$.max_level")?;
    let steps = cfg.n_steps_unit()?;
    let [lo, hi] = cfg.hoelder_fit_levels();
    let levels: Vec<u32> = (1..ml).collect();
    let y_factor = cfg.y_factor();
    let y_eval = y_factor * cfg.dt.sqrt();
    let first = (epsilon * (1u64 << ml) as f64 - 1e-9).ceil() as usize;
    let indices: Vec<usize> = (first..=(1usize << ml)).map(|j| j * stride).collect();
    let records = runner.run(cfg.n_traces, |i| {
        let d = DrivingPath::sample_stream(kappa, 1.0, steps, cfg.seed, i)?;
        let trace = d.trace_at(&indices, y_eval)?;
        let pts = &trace.points;
        let values = levels
            .iter()
            .map(|&m| {
                let lag = 1usize << (ml - m);
                let sup = (0..pts.len().saturating_sub(lag)).map(|j| (pts[j + lag] - pts[j]).norm()).fold(0.0, f64::max);
                sup.log2()
            })
            .collect();
        Ok(TraceRecord::dense(i, values, trace.clamps))
    })?;
    let rows: Vec<Vec<f64>> = records.iter().map(|r| r.values.iter().map(|v| v.unwrap()).collect()).collect();
    let fit_pos: Vec<usize> = (lo..=hi).map(|m| m as usize - 1).collect();
    let xs: Vec<f64> = (lo..=hi).map(|m| -f64::from(m)).collect();
    let estimate = |rows: &[Vec<f64>]| -> f64 {
        let ys: Vec<f64> = fit_pos.iter().map(|&j| rows.iter().map(|r| r[j]).sum::<f64>() / rows.len() as f64).collect();
        stats::ols(&xs, &ys).slope
    };
    let mean_log2_sup = (0..levels.len()).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / rows.len() as f64).collect();
    let alpha_hat = estimate(&rows);
    let mut rng = rng::stream(cfg.seed, BOOTSTRAP_STREAM);
    let interval = stats::bootstrap_interval(&rows, cfg.bootstrap(), 0.95, &mut rng, estimate);
    Ok(CriticalHoelderReport { levels, mean_log2_sup, fit_levels: [lo, hi], alpha_hat, interval, target, target_name, epsilon, y_factor })
}

/// Two-sample comparison of `|f̂'_s(iy)|` with `|f̂'_{s/y²}(i)|`, both
/// simulated on the same `dt` grid from independent streams.
pub fn scaling_law(cfg: &ExperimentConfig, runner: &Runner) -> Result<ScalingReport> {
    let kappa = cfg.kappa()?;
    let [s, y] = cfg.grid[0];
    let k_direct = cfg.grid_index(s, "$.grid[0][0]")?;
    let k_rescaled = cfg.grid_index(s / (y * y), "$.grid[0]")?;
    let records = runner.run(cfg.n_traces, |i| {
        let a = DrivingPath::sample_stream(kappa, k_direct as f64 * cfg.dt, k_direct, cfg.seed, 2 * i)?.fhat_derivative(k_direct, y)?;
        let b = DrivingPath::sample_stream(kappa, k_rescaled as f64 * cfg.dt, k_rescaled, cfg.seed, 2 * i + 1)?.fhat_derivative(k_rescaled, 1.0)?;
        let pick = |d: slereg_core::loewner::DerivativeSample| (!d.flagged).then_some(d.value);
        Ok(TraceRecord::new(i, vec![pick(a), pick(b)], 0))
    })?;
    check_flagged(&records)?;
    let cols = columns(&records, 2, |_| true);
    let ks = stats::ks_two_sample(&cols[0], &cols[1]);
    Ok(ScalingReport {
        s,
        y,
        samples: (cols[0].len(), cols[1].len()),
        means: (stats::mean(&cols[0]), stats::mean(&cols[1])),
        ks,
        rejected_at_1pct: ks.p_value < 0.01,
    })
}

/// Dyadic windows `[k 2^{-j}, (k+1) 2^{-j}]` of `[0, 1]` for `j = 0..=2`.
pub fn embedding_windows() -> Vec<(f64, f64)> {
    (0..=2u32).flat_map(|j| (0..1u32 << j).map(move |k| (f64::from(k) / f64::from(1u32 << j), f64::from(k + 1) / f64::from(1u32 << j)))).collect()
}

/// Random piecewise-linear path on `[0, 1]` with `2^level + 1` vertices:
/// a planar Gaussian walk with random step scale and drift.
pub fn synthetic_path(seed: u64, index: u64, level: u32) -> Result<SampledPath> {
    use rand::Rng;
    use rand_distr_free::standard_normal;
    let mut rng = rng::stream(seed, SYNTHETIC_STREAM + index);
    let n = 1usize << level;
    let scale = 10f64.powf(rng.random_range(-1.0..1.0));
    let drift = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
    let h = 1.0 / n as f64;
    let mut z = Complex64::new(0.0, 0.0);
    let mut pts = Vec::with_capacity(n + 1);
    pts.push(z);
    for _ in 0..n {
        let step = Complex64::new(standard_normal(&mut rng), standard_normal(&mut rng)) * (scale * h.sqrt()) + drift * h;
        z += step;
        pts.push(z);
    }
    Ok(SampledPath::uniform(0.0, 1.0, pts)?)
}

mod rand_distr_free {
    use rand::Rng;

    /// Standard normal draw by the Box-Muller transform.
    pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
        let u: f64 = 1.0 - rng.random::<f64>();
        let v: f64 = rng.random();
        (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
    }
}

/// Largest embedding ratios over the dyadic windows, for `n_traces` simulated
/// traces followed by `synthetic_paths` random piecewise-linear paths.
pub fn embedding(cfg: &ExperimentConfig, runner: &Runner) -> Result<EmbeddingSummary> {
    let kappa = cfg.kappa()?;
    let params = cfg.embedding_params(kappa)?;
    let windows = embedding_windows();
    let level = *cfg.sample_levels().iter().max().unwrap();
    let stride = cfg.dyadic_stride(level, "$.sample_levels")?;
    let steps = cfg.n_steps_unit()?;
    let y_eval = cfg.y_factor() * cfg.dt.sqrt();
    let simulated = cfg.n_traces;
    let synthetic = cfg.synthetic_paths.unwrap_or(1000);
    let records = runner.run(simulated + synthetic, |i| {
        let path = if (i as usize) < simulated {
            let d = DrivingPath::sample_stream(kappa, 1.0, steps, cfg.seed, i)?;
            d.trace_strided(stride, y_eval)?.to_sampled()?
        } else {
            synthetic_path(cfg.seed, i - simulated as u64, level)?
        };
        let rep = embedding_check(&path, params, &windows)?;
        Ok(TraceRecord::dense(i, vec![rep.max_ratio, rep.max_hoelder_ratio, rep.vacuous as f64, rep.inconsistent as f64], 0))
    })?;
    let col = |j: usize, keep: &dyn Fn(usize) -> bool| -> f64 {
        records.iter().filter(|r| keep(r.index as usize)).map(|r| r.values[j].unwrap()).fold(0.0, f64::max)
    };
    let first_half = |i: usize| if i < simulated { i < simulated.div_ceil(2) } else { i - simulated < synthetic.div_ceil(2) };
    let c_hat = col(0, &|_| true);
    let c_hat_first_half = col(0, &first_half);
    let sum = |j: usize| records.iter().map(|r| r.values[j].unwrap() as usize).sum();
    Ok(EmbeddingSummary {
        delta: params.delta,
        q: params.q,
        windows,
        simulated,
        synthetic,
        c_hat,
        c_hat_first_half,
        c_hat_simulated: col(0, &|i| i < simulated),
        c_hat_synthetic: col(0, &|i| i >= simulated),
        hoelder_c_hat: col(1, &|_| true),
        vacuous: sum(2),
        inconsistent: sum(3),
        stable: c_hat <= 1.1 * c_hat_first_half,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scan() -> ExperimentConfig {
        let mut c = ExperimentConfig::new(ExperimentKind::DerivativeMomentScan, 2.0, 64, 1.0 / 256.0, 1);
        c.r = Some(1.0);
        c.grid = vec![[1.0, 0.5], [1.0, 0.25], [1.0, 0.125], [0.25, 0.25], [0.25, 0.125]];
        c
    }

    fn config_error(text: &str) -> String {
        match ExperimentConfig::from_json(text).unwrap_err() {
            Error::Config { path, .. } => path,
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn json_round_trip_and_hash() {
        let c = scan();
        let back = ExperimentConfig::from_json(&c.canonical_json()).unwrap();
        assert_eq!(back, c);
        let mut moved = c.clone();
        moved.output = Some("elsewhere".into());
        assert_eq!(moved.hash(), c.hash());
        let mut reseeded = c.clone();
        reseeded.seed = 2;
        assert_ne!(reseeded.hash(), c.hash());
    }

    #[test]
    fn schema_errors_name_the_field() {
        assert_eq!(config_error(r#"{"schema_version":1,"kind":"scaling_law","kappa":2,"n_traces":-3,"dt":0.1,"seed":1}"#), "$.n_traces");
        assert_eq!(config_error(r#"{"schema_version":1,"kind":"scaling_law","kappa":2,"n_traces":3,"dt":0.1}"#), "$.");
        assert_eq!(config_error(r#"{"schema_version":1,"kind":"scaling_law","kappa":0,"n_traces":3,"dt":0.1,"seed":1}"#), "$.kappa");
        assert_eq!(config_error(r#"{"schema_version":1,"kind":"scaling_law","kappa":2,"n_traces":3,"dt":0.1,"seed":1,"grid":[[0.5]]}"#), "$.grid[0]");
    }

    #[test]
    fn kind_specific_validation() {
        let mut c = scan();
        c.grid.push([0.3, 0.1]);
        assert!(matches!(c.validate(), Err(Error::Config { path, .. }) if path == "$.grid[5][0]"));

        let mut inc = ExperimentConfig::new(ExperimentKind::IncrementMomentScan, 2.0, 10, 1.0 / 256.0, 1);
        inc.r = Some(1.0);
        inc.grid = vec![[0.5, 1.0]];
        inc.r_tilde = Some(3.0);
        assert!(matches!(inc.validate(), Err(Error::Config { path, .. }) if path == "$.r_tilde"));
        inc.r_tilde = None;
        inc.validate().unwrap();

        let mut b = ExperimentConfig::new(ExperimentKind::BesovFiniteness, 2.0, 10, 1.0 / 1024.0, 1);
        b.r = Some(1.2);
        b.delta = Some(0.9);
        let Err(Error::Config { detail, .. }) = b.validate() else { panic!() };
        assert!(detail.contains("(zeta+q)/(2q)"), "{detail}");
        b.contrast = true;
        b.validate().unwrap();

        let mut p = ExperimentConfig::new(ExperimentKind::CriticalPvar, 2.0, 49, 1.0 / 1024.0, 1);
        p.max_level = Some(8);
        assert!(matches!(p.validate(), Err(Error::Config { path, .. }) if path == "$.n_traces"));
        p.n_traces = 50;
        p.validate().unwrap();
        p.max_level = Some(11);
        assert!(matches!(p.validate(), Err(Error::Config { path, .. }) if path == "$.max_level"));

        let mut h = ExperimentConfig::new(ExperimentKind::CriticalHoelder, 1.0, 10, 1.0 / 1024.0, 1);
        h.max_level = Some(9);
        h.epsilon = Some(1.0);
        assert!(matches!(h.validate(), Err(Error::Config { path, .. }) if path == "$.epsilon"));
        assert_eq!(h.y_factor(), 0.01);
    }

    #[test]
    fn domination_uses_calibration_half_only() {
        let env = vec![1.0, 2.0];
        let even = vec![vec![0.5, 0.5], vec![1.0, 1.0]];
        let odd_ok = vec![vec![0.5, 0.5], vec![1.0, 1.0]];
        let odd_bad = vec![vec![0.5, 0.5], vec![3.0, 3.0]];
        assert!(domination(&even, &even, &odd_ok, &env).pass);
        let d = domination(&even, &even, &odd_bad, &env);
        assert_eq!(d.c_hat, 0.5);
        assert_eq!(d.failed_rows, vec![1]);
    }

    #[test]
    fn derivative_scan_is_thread_independent() {
        let c = scan();
        let a = run(&c, &Runner::new(1)).unwrap();
        let b = run(&c, &Runner::new(3)).unwrap();
        // NaN placeholders in the table defeat ==, so compare renderings
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
        let Report::DerivativeMomentScan(r) = &a.report else { panic!() };
        assert_eq!(r.table.rows.len(), 5);
        assert!(r.table.rows.iter().all(|row| row.samples == 64 && row.mean > 0.0));
        let pairs: Vec<(usize, usize)> = r.collapse.iter().map(|c| c.rows).collect();
        assert_eq!(pairs, vec![(0, 3), (1, 4)]);
        assert!(r.domination.c_hat > 0.0);
    }

    #[test]
    fn increment_scan_runs() {
        let mut c = ExperimentConfig::new(ExperimentKind::IncrementMomentScan, 2.0, 32, 1.0 / 256.0, 4);
        c.r = Some(1.0);
        c.grid = vec![[0.5, 0.5], [0.5, 0.5625], [0.5, 0.625], [0.5, 0.75], [0.5, 1.0]];
        let Report::IncrementMomentScan(r) = run(&c, &Runner::new(2)).unwrap().report else { panic!() };
        assert_eq!(r.table.rows[0].mean, 0.0);
        assert!(r.table.rows.windows(2).skip(1).all(|w| w[1].mean > w[0].mean));
        assert!(r.r_tilde > 1.0 && r.r_tilde < r.r_tilde_alt);
        assert_eq!(r.lag_exponents.len(), 1);
    }

    #[test]
    fn besov_on_empty_window_is_zero() {
        let mut c = ExperimentConfig::new(ExperimentKind::BesovFiniteness, 2.0, 4, 1.0 / 256.0, 4);
        c.r = Some(1.2);
        c.delta = Some(0.4);
        c.epsilon = Some(1.0);
        c.sample_levels = Some(vec![6]);
        let Report::BesovFiniteness(r) = run(&c, &Runner::new(1)).unwrap().report else { panic!() };
        assert_eq!(r.levels[0].mean, 0.0);
        assert!(r.stable);
    }

    #[test]
    fn synthetic_paths_are_reproducible() {
        let a = synthetic_path(5, 3, 6).unwrap();
        let b = synthetic_path(5, 3, 6).unwrap();
        let c = synthetic_path(5, 4, 6).unwrap();
        assert_eq!(a.points(), b.points());
        assert_ne!(a.points(), c.points());
        assert_eq!(a.len(), 65);
    }

    #[test]
    fn too_many_flagged_samples_abort() {
        let records: Vec<TraceRecord> = (0..10).map(|i| TraceRecord::new(i, vec![if i == 0 { None } else { Some(1.0) }], 0)).collect();
        assert!(matches!(check_flagged(&records), Err(Error::TooManyFlagged { flagged: 1, total: 10, .. })));
        assert_eq!(check_flagged(&records[1..]).unwrap(), 0.0);
    }
}
