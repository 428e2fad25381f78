//! Capacity-optimal digital processing on top of fixed analog beams:
//! extended-channel whitening, SVD, waterfilling and precoder synthesis, plus
//! the outer search over the second beam.

use num_complex::Complex64;

use crate::beamforming::{effective_channel, effective_channel_from_physical, RfConfig};
use crate::channel::{ArrayLayout, PathCoupling};
use crate::error::{ConfigError, Error, Result, Side};
use crate::numkit::{inv_sqrt_psd, svd, ComplexMatrix, SvdResult, DEFAULT_RANK_EPS};

/// Allocations at or below `P_C·STREAM_POWER_TOL` are not counted as streams.
pub const STREAM_POWER_TOL: f64 = 1e-12;
/// Candidates closer than this (radians) are treated as the same beam.
pub const DUPLICATE_BEAM_TOL: f64 = 1e-12;
/// Relative capacity gap below which two candidates count as tied.
pub const CAPACITY_TIE_TOL: f64 = 1e-12;

/// Whitened channel `G = R_w^{-1/2} H_eff R_f^{-1/2}` together with the
/// whiteners that produced it.
#[derive(Debug, Clone)]
pub struct ExtendedChannel {
    pub matrix: ComplexMatrix,
    /// `(F_{RF,N}^H F_{RF,N})^{-1/2}`
    pub tx_whitener: ComplexMatrix,
    /// `(W_{RF,N}^T W_{RF,N}^*)^{-1/2}`
    pub rx_whitener: ComplexMatrix,
}

fn whitener(gram: &ComplexMatrix, side: Side) -> Result<ComplexMatrix> {
    let inv = inv_sqrt_psd(gram, DEFAULT_RANK_EPS)?;
    if !inv.is_full_rank() {
        return Err(Error::RankDeficientGram {
            side,
            rank: inv.rank,
            dim: inv.dim,
        });
    }
    Ok(inv.matrix)
}

pub fn extended_channel(h_eff: &ComplexMatrix, rf: &RfConfig) -> Result<ExtendedChannel> {
    let f = rf.f_rf_n();
    let w_t = rf.w_rf_n().transpose();
    let tx_whitener = whitener(&(&f.adjoint() * &f), Side::Tx)?;
    let rx_whitener = whitener(&(&w_t * &w_t.adjoint()), Side::Rx)?;
    let matrix = rx_whitener.try_matmul(h_eff)?.try_matmul(&tx_whitener)?;
    Ok(ExtendedChannel {
        matrix,
        tx_whitener,
        rx_whitener,
    })
}

/// Waterfilling allocation over parallel subchannels.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterfillingResult {
    pub singular_values: Vec<f64>,
    pub powers: Vec<f64>,
    /// `None` when every subchannel is dead.
    pub water_level: Option<f64>,
    pub snrs: Vec<f64>,
    pub capacity: f64,
    pub n_streams: usize,
    pub noise_power: f64,
    pub power_budget: f64,
}

impl WaterfillingResult {
    pub fn snrs_db(&self) -> Vec<f64> {
        self.snrs.iter().map(|g| 10.0 * g.log10()).collect()
    }
}

/// Capacity of parallel channels with gains `σ_q²` under allocation `p`.
pub fn parallel_capacity(sigma: &[f64], powers: &[f64], noise_power: f64) -> f64 {
    sigma
        .iter()
        .zip(powers)
        .map(|(s, p)| (s * s * p / noise_power).ln_1p())
        .sum::<f64>()
        / std::f64::consts::LN_2
}

/// Exact active-set waterfilling. `sigma` must be nonnegative and descending.
pub fn waterfill(sigma: &[f64], noise_power: f64, power_budget: f64) -> Result<WaterfillingResult> {
    if !(noise_power.is_finite() && noise_power > 0.0) {
        return Err(ConfigError::new("noise_power", "must be finite and > 0").into());
    }
    if !(power_budget.is_finite() && power_budget > 0.0) {
        return Err(ConfigError::new("power_budget", "must be finite and > 0").into());
    }
    if sigma.iter().any(|s| !s.is_finite() || *s < 0.0) {
        return Err(ConfigError::new("singular_values", "must be finite and >= 0").into());
    }
    if sigma.windows(2).any(|w| w[0] < w[1]) {
        return Err(ConfigError::new("singular_values", "must be sorted in descending order").into());
    }

    let floors: Vec<f64> = sigma
        .iter()
        .take_while(|s| **s > 0.0)
        .map(|s| noise_power / (s * s))
        .collect();
    // Work with offsets from the strongest floor: every active offset is at
    // most P_C, so the powers sum to the budget without cancellation.
    let base = floors.first().copied().unwrap_or(0.0);
    let offsets: Vec<f64> = floors.iter().map(|f| f - base).collect();
    let mut active = 0;
    let mut rise = None;
    let mut prefix = 0.0;
    for (m, offset) in offsets.iter().enumerate() {
        prefix += offset;
        let w = (power_budget + prefix) / (m + 1) as f64;
        if w > *offset {
            active = m + 1;
            rise = Some(w);
        }
    }

    let mut powers = vec![0.0; sigma.len()];
    if let Some(w) = rise {
        for q in 0..active {
            powers[q] = (w - offsets[q]).max(0.0);
        }
    }
    let level = rise.map(|w| base + w);
    let snrs: Vec<f64> = sigma
        .iter()
        .zip(&powers)
        .map(|(s, p)| s * s * p / noise_power)
        .collect();
    let capacity = parallel_capacity(sigma, &powers, noise_power);
    let n_streams = powers
        .iter()
        .filter(|&&p| p > power_budget * STREAM_POWER_TOL)
        .count();
    Ok(WaterfillingResult {
        singular_values: sigma.to_vec(),
        powers,
        water_level: level,
        snrs,
        capacity,
        n_streams,
        noise_power,
        power_budget,
    })
}

/// Digital precoder and equalizer.
#[derive(Debug, Clone)]
pub struct PrecoderSet {
    pub f_bb: ComplexMatrix,
    pub w_bb_t: ComplexMatrix,
    /// `diag(sqrt(P_q))`
    pub psi: ComplexMatrix,
}

/// `F_BB = R_f^{-1/2} V Ψ`, `W_BB^T = U^H R_w^{-1/2}`.
pub fn baseband_precoders(ext: &ExtendedChannel, svd: &SvdResult, wf: &WaterfillingResult) -> Result<PrecoderSet> {
    let roots: Vec<f64> = wf.powers.iter().map(|p| p.sqrt()).collect();
    let psi = ComplexMatrix::from_real_diag(&roots);
    let f_bb = ext.tx_whitener.try_matmul(&svd.v)?.try_matmul(&psi)?;
    let w_bb_t = svd.u.adjoint().try_matmul(&ext.rx_whitener)?;
    Ok(PrecoderSet { f_bb, w_bb_t, psi })
}

/// Spectral efficiency `log₂det(I + R_n^{-1} A A^H)` of a given baseband
/// design on the effective channel, with `R_s = I`.
pub fn spectral_efficiency_effective(
    h_eff: &ComplexMatrix,
    rf: &RfConfig,
    f_bb: &ComplexMatrix,
    w_bb_t: &ComplexMatrix,
    noise_power: f64,
) -> Result<f64> {
    let a = w_bb_t.try_matmul(h_eff)?.try_matmul(f_bb)?;
    let combiner = w_bb_t.try_matmul(&rf.w_rf_n().transpose())?;
    let r_n = (&combiner * &combiner.adjoint()).scale_real(noise_power);
    let white = inv_sqrt_psd(&r_n, DEFAULT_RANK_EPS)?;
    if !white.is_full_rank() {
        return Err(Error::SingularNoise {
            rank: white.rank,
            dim: white.dim,
        });
    }
    let k = white.matrix.try_matmul(&a)?;
    let s = svd(&k)?;
    Ok(s.sigma.iter().map(|x| (x * x).ln_1p()).sum::<f64>() / std::f64::consts::LN_2)
}

/// As [`spectral_efficiency_effective`], starting from the physical channel.
pub fn spectral_efficiency(
    h: &ComplexMatrix,
    rf: &RfConfig,
    f_bb: &ComplexMatrix,
    w_bb_t: &ComplexMatrix,
    noise_power: f64,
) -> Result<f64> {
    let h_eff = effective_channel_from_physical(h, rf)?;
    spectral_efficiency_effective(&h_eff, rf, f_bb, w_bb_t, noise_power)
}

/// Full inner solution for fixed analog beams.
#[derive(Debug, Clone)]
pub struct InnerSolution {
    pub h_eff: ComplexMatrix,
    pub extended: ExtendedChannel,
    pub svd: SvdResult,
    pub waterfilling: WaterfillingResult,
    pub precoders: PrecoderSet,
}

impl InnerSolution {
    pub fn capacity(&self) -> f64 {
        self.waterfilling.capacity
    }
}

pub fn inner_capacity(
    paths: &[PathCoupling],
    rf: &RfConfig,
    noise_power: f64,
    power_budget: f64,
) -> Result<InnerSolution> {
    let h_eff = effective_channel(paths, rf)?;
    let extended = extended_channel(&h_eff, rf)?;
    let svd = svd(&extended.matrix)?;
    let waterfilling = waterfill(&svd.sigma, noise_power, power_budget)?;
    let precoders = baseband_precoders(&extended, &svd, &waterfilling)?;
    Ok(InnerSolution {
        h_eff,
        extended,
        svd,
        waterfilling,
        precoders,
    })
}

/// Result of searching the second beam with the first held fixed.
#[derive(Debug, Clone)]
pub struct OuterSearch {
    pub beta1: f64,
    pub beta2: f64,
    pub solution: InnerSolution,
    /// `(β₂, C)` for every evaluated candidate, ascending in `β₂`.
    pub evaluated: Vec<(f64, f64)>,
}

/// Exhaustive search over `β₂` candidates with identical beams at both ends.
/// Candidates duplicating `β₁` or each other are skipped; ties go to the
/// smaller `β₂`.
pub fn outer_search(
    paths: &[PathCoupling],
    layout: ArrayLayout,
    n_subarrays: usize,
    beta1: f64,
    candidates: &[f64],
    noise_power: f64,
    power_budget: f64,
) -> Result<OuterSearch> {
    let mut sorted: Vec<f64> = candidates.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let mut kept: Vec<f64> = Vec::with_capacity(sorted.len());
    for b in sorted {
        if (b - beta1).abs() <= DUPLICATE_BEAM_TOL || kept.iter().any(|k| (b - k).abs() <= DUPLICATE_BEAM_TOL) {
            continue;
        }
        kept.push(b);
    }
    if kept.is_empty() {
        return Err(ConfigError::new("beam_candidates", "no candidate distinct from the first beam").into());
    }

    let mut best: Option<(f64, InnerSolution)> = None;
    let mut evaluated = Vec::with_capacity(kept.len());
    for b2 in kept {
        let rf = RfConfig::symmetric(&[beta1, b2], layout, n_subarrays)?;
        let sol = inner_capacity(paths, &rf, noise_power, power_budget)?;
        evaluated.push((b2, sol.capacity()));
        if best.as_ref().is_none_or(|(_, s)| sol.capacity() > s.capacity() * (1.0 + CAPACITY_TIE_TOL)) {
            best = Some((b2, sol));
        }
    }
    let (beta2, solution) = best.expect("at least one candidate");
    Ok(OuterSearch {
        beta1,
        beta2,
        solution,
        evaluated,
    })
}

/// Unit-modulus scalar multiple of a matrix, used to probe phase invariance.
pub fn rotate_phase(m: &ComplexMatrix, angle: f64) -> ComplexMatrix {
    m.scale(Complex64::from_polar(1.0, angle))
}
