use std::f64::consts::PI;
use std::fmt;

use crate::channel::fresnel_te_reflection;
use crate::error::Result;
use crate::geometry::{linear_to_db, watts_to_dbm, ScenarioConfig};

use super::sweep::{evaluate_system, SystemTag};

/// Regulatory EIRP ceiling for 60 GHz outdoor links, dBm.
pub const EIRP_CAP_DBM: f64 = 43.0;
/// Height range over which reflection losses are summarized, meters.
pub const HEIGHT_RANGE: (f64, f64) = (5.0, 35.0);
const RANGE_SAMPLES: usize = 121;

#[derive(Debug, Clone, PartialEq)]
pub struct LinkBudget {
    pub tx_power_dbm: f64,
    /// Peak gain of one subarray, `10·log10(M²)`.
    pub antenna_gain_dbi: f64,
    pub eirp_dbm: f64,
    pub eirp_headroom_db: f64,
    /// `20·log10(λ/(4πD))`, negative.
    pub free_space_path_loss_db: f64,
    pub noise_power_dbm: f64,
    /// Extra spreading loss of the reflected path relative to LoS over the
    /// height range, (min, max) in dB.
    pub reflected_extra_loss_db: (f64, f64),
    /// `−20·log10|Γ|` over the height range, (min, max) in dB.
    pub reflection_loss_db: (f64, f64),
    pub los_mimo_subarrays: usize,
    pub los_mimo_snr_db: f64,
    pub los_mimo_spectral_efficiency: f64,
}

pub fn link_budget_report(cfg: &ScenarioConfig) -> Result<LinkBudget> {
    cfg.validate()?;
    let m2 = (cfg.subarray_side * cfg.subarray_side) as f64;
    let antenna_gain_dbi = linear_to_db(m2);
    let eirp_dbm = cfg.tx_power_dbm + antenna_gain_dbi;
    let d = cfg.link_distance;
    let fspl = 20.0 * (cfg.carrier_wavelength / (4.0 * PI * d)).log10();

    let mut extra = (f64::INFINITY, f64::NEG_INFINITY);
    let mut refl = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..RANGE_SAMPLES {
        let h = HEIGHT_RANGE.0 + (HEIGHT_RANGE.1 - HEIGHT_RANGE.0) * i as f64 / (RANGE_SAMPLES - 1) as f64;
        let e = 20.0 * ((2.0 * h).hypot(d) / d).log10();
        let g = fresnel_te_reflection((d / (2.0 * h)).atan(), &cfg.ground);
        let r = -20.0 * g.norm().log10();
        extra = (extra.0.min(e), extra.1.max(e));
        refl = (refl.0.min(r), refl.1.max(r));
    }

    let tag = SystemTag::new(cfg.n_subarrays, 1);
    let los = evaluate_system(cfg, tag, None)?;
    Ok(LinkBudget {
        tx_power_dbm: cfg.tx_power_dbm,
        antenna_gain_dbi,
        eirp_dbm,
        eirp_headroom_db: EIRP_CAP_DBM - eirp_dbm,
        free_space_path_loss_db: fspl,
        noise_power_dbm: watts_to_dbm(cfg.noise_power_w()),
        reflected_extra_loss_db: extra,
        reflection_loss_db: refl,
        los_mimo_subarrays: cfg.n_subarrays,
        los_mimo_snr_db: linear_to_db(los.waterfilling.snrs[0]),
        los_mimo_spectral_efficiency: los.capacity(),
    })
}

impl fmt::Display for LinkBudget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "transmit power          {:8.2} dBm", self.tx_power_dbm)?;
        writeln!(f, "subarray gain           {:8.2} dBi", self.antenna_gain_dbi)?;
        writeln!(
            f,
            "EIRP                    {:8.2} dBm  (cap {EIRP_CAP_DBM:.0} dBm, headroom {:.2} dB)",
            self.eirp_dbm, self.eirp_headroom_db
        )?;
        writeln!(f, "free-space path loss    {:8.2} dB", self.free_space_path_loss_db)?;
        writeln!(f, "noise power             {:8.2} dBm", self.noise_power_dbm)?;
        writeln!(
            f,
            "reflected path extra    {:.2} .. {:.2} dB  (h {}..{} m)",
            self.reflected_extra_loss_db.0, self.reflected_extra_loss_db.1, HEIGHT_RANGE.0, HEIGHT_RANGE.1
        )?;
        writeln!(
            f,
            "reflection loss         {:.2} .. {:.2} dB  (h {}..{} m)",
            self.reflection_loss_db.0, self.reflection_loss_db.1, HEIGHT_RANGE.0, HEIGHT_RANGE.1
        )?;
        writeln!(
            f,
            "LoS MIMO, N = {}: SNR {:.2} dB per stream, {:.2} b/s/Hz",
            self.los_mimo_subarrays, self.los_mimo_snr_db, self.los_mimo_spectral_efficiency
        )
    }
}
