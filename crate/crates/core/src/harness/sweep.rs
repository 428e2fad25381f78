use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::beamforming::RfConfig;
use crate::capacity::{inner_capacity, outer_search, InnerSolution};
use crate::channel::build_paths;
use crate::error::{ConfigError, Result};
use crate::geometry::ScenarioConfig;

use super::rows::SweepRow;

/// Step of the fine height grid, fine enough to resolve the millimetric
/// LoS/reflection interference period.
pub const FINE_HEIGHT_STEP: f64 = 0.0005;
pub const DEFAULT_HEIGHT_STEP: f64 = 0.25;

/// `β₂ ∈ {π/8, 2π/8, 3π/8, 4π/8}`
pub fn default_beam_candidates() -> Vec<f64> {
    (1..=4).map(|k| k as f64 * PI / 8.0).collect()
}

/// A system is identified by its subarray count N and path count P.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SystemTag {
    pub n_subarrays: usize,
    pub n_paths: usize,
}

impl SystemTag {
    pub const fn new(n_subarrays: usize, n_paths: usize) -> Self {
        Self {
            n_subarrays,
            n_paths,
        }
    }

    /// The four systems compared over transmit power.
    pub fn all() -> [SystemTag; 4] {
        [
            SystemTag::new(1, 1),
            SystemTag::new(1, 2),
            SystemTag::new(2, 1),
            SystemTag::new(2, 2),
        ]
    }
}

impl fmt::Display for SystemTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.n_subarrays, self.n_paths)
    }
}

impl FromStr for SystemTag {
    type Err = ConfigError;

    /// Parses `"N,P"`, e.g. `"2,1"`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let bad = || ConfigError::new("normalization", format!("expected `N,P` with P in {{1,2}}, got `{s}`"));
        let (n, p) = s.split_once(',').ok_or_else(bad)?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        let p: usize = p.trim().parse().map_err(|_| bad())?;
        if n == 0 || !(1..=2).contains(&p) {
            return Err(bad());
        }
        Ok(SystemTag::new(n, p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    Height,
    TxPower,
}

/// Grid, beams and normalization of one sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    /// Explicit grid overriding `start..=stop`.
    pub values: Option<Vec<f64>>,
    pub beam_candidates: Vec<f64>,
    pub normalization: SystemTag,
    /// Divide singular values by the reference system's largest one.
    pub normalize_singular_values: bool,
    /// Systems traced by a power sweep.
    pub systems: Vec<SystemTag>,
}

impl SweepSpec {
    pub fn height(start: f64, stop: f64, step: f64) -> Self {
        Self {
            variable: SweepVariable::Height,
            start,
            stop,
            step,
            values: None,
            beam_candidates: default_beam_candidates(),
            normalization: SystemTag::new(1, 1),
            normalize_singular_values: false,
            systems: Vec::new(),
        }
    }

    /// Heights 5 m to 35 m on the default step.
    pub fn default_height() -> Self {
        Self::height(5.0, 35.0, DEFAULT_HEIGHT_STEP)
    }

    pub fn tx_power(start: f64, stop: f64, step: f64) -> Self {
        Self {
            variable: SweepVariable::TxPower,
            start,
            stop,
            step,
            values: None,
            beam_candidates: default_beam_candidates(),
            normalization: SystemTag::new(1, 1),
            normalize_singular_values: false,
            systems: SystemTag::all().to_vec(),
        }
    }

    /// 5 dBm to 25 dBm in 1 dB steps.
    pub fn default_tx_power() -> Self {
        Self::tx_power(5.0, 25.0, 1.0)
    }

    pub fn validate(&self) -> std::result::Result<(), ConfigError> {
        if self.values.is_none() {
            if !(self.start.is_finite() && self.stop.is_finite()) {
                return Err(ConfigError::new("start", "grid bounds must be finite"));
            }
            if self.start > self.stop {
                return Err(ConfigError::new("start", format!("start {} exceeds stop {}", self.start, self.stop)));
            }
            if !(self.step.is_finite() && self.step > 0.0) {
                return Err(ConfigError::new("step", format!("must be finite and > 0, got {}", self.step)));
            }
        }
        if let Some(v) = &self.values {
            if v.iter().any(|x| !x.is_finite()) {
                return Err(ConfigError::new("values", "grid values must be finite"));
            }
        }
        if self.beam_candidates.is_empty() {
            return Err(ConfigError::new("beam_candidates", "at least one candidate is required"));
        }
        if self.beam_candidates.iter().any(|b| !b.is_finite()) {
            return Err(ConfigError::new("beam_candidates", "candidates must be finite"));
        }
        if self.variable == SweepVariable::TxPower && self.systems.is_empty() {
            return Err(ConfigError::new("systems", "at least one system is required"));
        }
        Ok(())
    }

    /// Grid points in ascending order of index. Computed as `start + i·step`
    /// so points do not accumulate rounding.
    pub fn grid(&self) -> Vec<f64> {
        if let Some(v) = &self.values {
            return v.clone();
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

fn scene_for(cfg: &ScenarioConfig, n_subarrays: usize) -> ScenarioConfig {
    if n_subarrays == cfg.n_subarrays {
        cfg.clone()
    } else {
        cfg.with_subarrays(n_subarrays)
    }
}

/// Capacity solution of one system with beams `{0, β₂}` (or `{0}` when P = 1).
pub fn evaluate_system(cfg: &ScenarioConfig, tag: SystemTag, beta2: Option<f64>) -> Result<InnerSolution> {
    let scene = scene_for(cfg, tag.n_subarrays);
    let mut paths = build_paths(&scene)?;
    paths.truncate(tag.n_paths);
    let betas: Vec<f64> = match (tag.n_paths, beta2) {
        (1, _) => vec![0.0],
        (_, Some(b)) => vec![0.0, b],
        (_, None) => return Err(ConfigError::new("beta2", "a two-path system needs a second beam").into()),
    };
    let rf = RfConfig::symmetric(&betas, scene.layout(), tag.n_subarrays)?;
    inner_capacity(&paths, &rf, scene.noise_power_w(), scene.power_budget_w())
}

/// Best solution of one system: P = 1 uses the broadside beam, P = 2 the
/// outer search over `candidates`. Returns the chosen `β₂` alongside.
pub fn best_system(cfg: &ScenarioConfig, tag: SystemTag, candidates: &[f64]) -> Result<(Option<f64>, InnerSolution)> {
    if tag.n_paths == 1 {
        return Ok((None, evaluate_system(cfg, tag, None)?));
    }
    let scene = scene_for(cfg, tag.n_subarrays);
    let mut paths = build_paths(&scene)?;
    paths.truncate(tag.n_paths);
    let found = outer_search(
        &paths,
        scene.layout(),
        tag.n_subarrays,
        0.0,
        candidates,
        scene.noise_power_w(),
        scene.power_budget_w(),
    )?;
    Ok((Some(found.beta2), found.solution))
}

fn make_row(
    tag: SystemTag,
    h: f64,
    pt_dbm: f64,
    beta2: Option<f64>,
    sol: &InnerSolution,
    reference: &InnerSolution,
    normalize_sigma: bool,
) -> SweepRow {
    let wf = &sol.waterfilling;
    let ref_c = reference.capacity();
    let ref_sigma = reference.waterfilling.singular_values.first().copied().unwrap_or(0.0);
    let sigma = if normalize_sigma {
        wf.singular_values.iter().map(|s| s / ref_sigma).collect()
    } else {
        wf.singular_values.clone()
    };
    SweepRow {
        n_subarrays: tag.n_subarrays,
        n_paths: tag.n_paths,
        h_m: h,
        pt_dbm,
        beta2_rad: beta2,
        capacity_bps_hz: wf.capacity,
        normalized_capacity: wf.capacity / ref_c,
        sigma,
        power: wf.powers.clone(),
        snr_db: wf.snrs_db(),
        n_streams: wf.n_streams,
    }
}

fn dedup_candidates(c: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(c.len());
    for &b in c {
        if b != 0.0 && !out.contains(&b) {
            out.push(b);
        }
    }
    out
}

/// One row per height and `β₂` candidate for the configured subarray count
/// with both paths present, normalized by the reference system at the same
/// height.
pub fn run_height_sweep(cfg: &ScenarioConfig, spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    spec.validate()?;
    let tag = SystemTag::new(cfg.n_subarrays, 2);
    let candidates = dedup_candidates(&spec.beam_candidates);
    let grid = spec.grid();
    let chunks: Vec<Result<Vec<SweepRow>>> = grid
        .par_iter()
        .map(|&h| {
            let scene = cfg.with_height(h);
            let (_, reference) = best_system(&scene, spec.normalization, &spec.beam_candidates)?;
            candidates
                .iter()
                .map(|&b| {
                    let sol = evaluate_system(&scene, tag, Some(b))?;
                    Ok(make_row(tag, h, scene.tx_power_dbm, Some(b), &sol, &reference, spec.normalize_singular_values))
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::new();
    for c in chunks {
        rows.extend(c?);
    }
    Ok(rows)
}

/// One row per transmit power and system at the configured height. Two-path
/// systems report the `β₂` chosen by the outer search.
pub fn run_power_sweep(cfg: &ScenarioConfig, spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    spec.validate()?;
    let grid = spec.grid();
    let chunks: Vec<Result<Vec<SweepRow>>> = grid
        .par_iter()
        .map(|&pt| {
            let scene = cfg.with_tx_power_dbm(pt);
            let (_, reference) = best_system(&scene, spec.normalization, &spec.beam_candidates)?;
            spec.systems
                .iter()
                .map(|&tag| {
                    let (beta2, sol) = best_system(&scene, tag, &spec.beam_candidates)?;
                    Ok(make_row(tag, scene.height, pt, beta2, &sol, &reference, spec.normalize_singular_values))
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::new();
    for c in chunks {
        rows.extend(c?);
    }
    Ok(rows)
}

/// Capacity of the two-path system with fixed beams over an arbitrary list of
/// heights, evaluated in parallel, order preserved.
pub fn capacity_height_scan(cfg: &ScenarioConfig, heights: &[f64], beta2: f64) -> Result<Vec<f64>> {
    let tag = SystemTag::new(cfg.n_subarrays, 2);
    heights
        .par_iter()
        .map(|&h| Ok(evaluate_system(&cfg.with_height(h), tag, Some(beta2))?.capacity()))
        .collect()
}
