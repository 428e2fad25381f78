//! Scene description and propagation geometry.
//!
//! Both ends carry a vertical stack of `N` subarrays, lowest one at height
//! `h`, subarray `l` (1-based) at `h + (l - 1)·d_sub`. The arrays face each
//! other across a flat ground at horizontal distance `D`. Elevation angles are
//! measured from broadside (the LoS direction) and are negative below it at
//! both ends.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::channel::{ArrayLayout, GroundMaterial};
use crate::error::ConfigError;

/// Boltzmann constant in J/K.
pub const BOLTZMANN: f64 = 1.380649e-23;

/// Ratio used to decide whether one length is "much smaller" than another
/// when checking the intended operating regime.
pub const REGIME_RATIO: f64 = 10.0;

fn default_subcarriers() -> usize {
    1
}

/// Full deterministic description of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Carrier wavelength λ in meters.
    pub carrier_wavelength: f64,
    /// Horizontal link distance D in meters.
    pub link_distance: f64,
    /// Height of the lowest subarray above ground, meters.
    pub height: f64,
    /// Subarrays per side, stacked vertically.
    pub n_subarrays: usize,
    /// Vertical spacing between subarray centers. Defaults to the spacing that
    /// makes the LoS coupling matrix orthogonal.
    #[serde(default)]
    pub subarray_spacing: Option<f64>,
    /// Each subarray is `subarray_side × subarray_side` elements.
    pub subarray_side: usize,
    pub element_spacing: f64,
    pub ground: GroundMaterial,
    pub tx_power_dbm: f64,
    /// Signal bandwidth in Hz.
    pub bandwidth: f64,
    /// Receiver noise figure in dB.
    pub noise_figure: f64,
    /// Noise temperature in kelvin.
    pub temperature: f64,
    #[serde(default = "default_subcarriers")]
    pub subcarriers: usize,
}

impl ScenarioConfig {
    /// 60 GHz backhaul link over concrete: 100 m, two 8×8 subarrays per side,
    /// 2.16 GHz bandwidth, 20 dBm.
    pub fn backhaul_60ghz() -> Self {
        let wavelength = 0.005;
        let distance = 100.0;
        Self {
            carrier_wavelength: wavelength,
            link_distance: distance,
            height: reflection_height_for_elevation(distance, 14.48_f64.to_radians()),
            n_subarrays: 2,
            subarray_spacing: None,
            subarray_side: 8,
            element_spacing: wavelength / 2.0,
            ground: GroundMaterial::concrete(),
            tx_power_dbm: 20.0,
            bandwidth: 2.16e9,
            noise_figure: 5.0,
            temperature: 300.0,
            subcarriers: 1,
        }
    }

    /// Same scene with a different subarray count. An explicit spacing is
    /// dropped so the optimal spacing for the new count applies.
    pub fn with_subarrays(&self, n: usize) -> Self {
        Self {
            n_subarrays: n,
            subarray_spacing: None,
            ..self.clone()
        }
    }

    pub fn with_height(&self, h: f64) -> Self {
        Self {
            height: h,
            ..self.clone()
        }
    }

    pub fn with_tx_power_dbm(&self, p: f64) -> Self {
        Self {
            tx_power_dbm: p,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        positive("carrier_wavelength", self.carrier_wavelength)?;
        positive("link_distance", self.link_distance)?;
        positive("height", self.height)?;
        positive("element_spacing", self.element_spacing)?;
        positive("bandwidth", self.bandwidth)?;
        positive("temperature", self.temperature)?;
        finite("tx_power_dbm", self.tx_power_dbm)?;
        finite("noise_figure", self.noise_figure)?;
        if self.noise_figure < 0.0 {
            return Err(ConfigError::new("noise_figure", "must be >= 0 dB"));
        }
        if self.n_subarrays == 0 {
            return Err(ConfigError::new("n_subarrays", "must be >= 1"));
        }
        if self.subarray_side == 0 {
            return Err(ConfigError::new("subarray_side", "must be >= 1"));
        }
        if self.subcarriers == 0 {
            return Err(ConfigError::new("subcarriers", "must be >= 1"));
        }
        if let Some(d) = self.subarray_spacing {
            finite("subarray_spacing", d)?;
            if d < 0.0 {
                return Err(ConfigError::new("subarray_spacing", "must be >= 0"));
            }
        }
        self.ground.validate()
    }

    /// Human-readable notes for parameters outside `λ ≪ d_sub ≪ h < D`.
    pub fn regime_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let d = self.subarray_spacing();
        let h = self.height;
        if self.n_subarrays > 1 {
            if d < REGIME_RATIO * self.carrier_wavelength {
                out.push(format!(
                    "subarray spacing {d} m is not much larger than the wavelength {} m",
                    self.carrier_wavelength
                ));
            }
            if h < REGIME_RATIO * d {
                out.push(format!(
                    "height {h} m is not much larger than the subarray spacing {d} m"
                ));
            }
        }
        if h >= self.link_distance {
            out.push(format!(
                "height {h} m is not below the link distance {} m",
                self.link_distance
            ));
        }
        out
    }

    /// Explicit spacing, or the LoS-orthogonal optimum when unset.
    pub fn subarray_spacing(&self) -> f64 {
        self.subarray_spacing.unwrap_or_else(|| {
            (self.carrier_wavelength * self.link_distance / self.n_subarrays.max(1) as f64).sqrt()
        })
    }

    pub fn layout(&self) -> ArrayLayout {
        ArrayLayout {
            side: self.subarray_side,
            element_spacing: self.element_spacing,
            wavelength: self.carrier_wavelength,
        }
    }

    /// Per-subcarrier transmit power budget P_C in watts.
    pub fn power_budget_w(&self) -> f64 {
        dbm_to_watts(self.tx_power_dbm) / self.subcarriers as f64
    }

    /// Per-subcarrier thermal noise power σ_n² = k_B·T·F·W / K in watts.
    pub fn noise_power_w(&self) -> f64 {
        BOLTZMANN * self.temperature * db_to_linear(self.noise_figure) * self.bandwidth
            / self.subcarriers as f64
    }

    /// Heights of the subarray centers, lowest first.
    pub fn subarray_heights(&self) -> Vec<f64> {
        let d = self.subarray_spacing();
        (0..self.n_subarrays)
            .map(|l| self.height + l as f64 * d)
            .collect()
    }
}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::new(field, format!("must be finite and > 0, got {v}")))
    }
}

fn finite(field: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::new(field, format!("must be finite, got {v}")))
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * 10f64.powf(dbm / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * (w / 1e-3).log10()
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Height at which the ground reflection, with the reflection point midway,
/// leaves and arrives at `elevation` below broadside.
pub fn reflection_height_for_elevation(link_distance: f64, elevation: f64) -> f64 {
    0.5 * link_distance * elevation.abs().tan()
}

/// Subarray spacing `sqrt(λ·D/N)` that makes the LoS coupling matrix
/// orthogonal.
pub fn optimal_subarray_spacing(wavelength: f64, distance: f64, n: usize) -> Result<f64, ConfigError> {
    positive("carrier_wavelength", wavelength)?;
    positive("link_distance", distance)?;
    if n == 0 {
        return Err(ConfigError::new("n_subarrays", "must be >= 1"));
    }
    Ok((wavelength * distance / n as f64).sqrt())
}

/// One propagation path between the two subarray stacks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathGeometry {
    /// 1-based path index; path 1 is the LoS path.
    pub index: usize,
    pub departure_elevation: f64,
    pub departure_azimuth: f64,
    pub arrival_elevation: f64,
    pub arrival_azimuth: f64,
    /// Length between the lowest subarrays' reference points along the path.
    pub center_length: f64,
    /// `pair_lengths[l][k]`: length from transmit subarray `k` to receive
    /// subarray `l` along this path.
    pub pair_lengths: Vec<Vec<f64>>,
    /// Incidence angle from the ground normal, reflected paths only.
    pub incidence_angle: Option<f64>,
    pub is_los: bool,
}

impl PathGeometry {
    pub fn n_subarrays(&self) -> usize {
        self.pair_lengths.len()
    }
}

/// LoS path and ground-reflected path for the facing vertical stacks.
pub fn build_two_path_geometry(cfg: &ScenarioConfig) -> Result<Vec<PathGeometry>, ConfigError> {
    cfg.validate()?;
    let n = cfg.n_subarrays;
    let d = cfg.subarray_spacing();
    let dist = cfg.link_distance;
    let h = cfg.height;

    let los_pairs = (0..n)
        .map(|l| {
            (0..n)
                .map(|k| ((l as f64 - k as f64) * d).hypot(dist))
                .collect()
        })
        .collect();
    let los = PathGeometry {
        index: 1,
        departure_elevation: 0.0,
        departure_azimuth: 0.0,
        arrival_elevation: 0.0,
        arrival_azimuth: 0.0,
        center_length: dist,
        pair_lengths: los_pairs,
        incidence_angle: None,
        is_los: true,
    };

    // Image source: mirror the receive subarray below ground.
    let reflected_pairs = (0..n)
        .map(|l| {
            (0..n)
                .map(|k| (2.0 * h + (l + k) as f64 * d).hypot(dist))
                .collect()
        })
        .collect();
    let elevation = -(2.0 * h / dist).atan();
    let reflected = PathGeometry {
        index: 2,
        departure_elevation: elevation,
        departure_azimuth: 0.0,
        arrival_elevation: elevation,
        arrival_azimuth: 0.0,
        center_length: (2.0 * h).hypot(dist),
        pair_lengths: reflected_pairs,
        incidence_angle: Some((dist / (2.0 * h)).atan()),
        is_los: false,
    };
    Ok(vec![los, reflected])
}

/// Wraps a phase into `(-π, π]`.
pub fn wrap_phase(phi: f64) -> f64 {
    let mut w = phi.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

/// Phase of the wavefront at offset `d_i` along the array relative to the
/// reference element at height offset `h_bar`, from exact path lengths.
pub fn relative_phase_exact(d_i: f64, h_bar: f64, distance: f64, wavelength: f64) -> f64 {
    let r0 = h_bar.hypot(distance);
    let r1 = (h_bar + d_i).hypot(distance);
    // (r1² − r0²)/(r1 + r0) avoids cancellation for small d_i
    let diff = d_i * (2.0 * h_bar + d_i) / (r1 + r0);
    -2.0 * PI * diff / wavelength
}

/// Plane-wave approximation `−(2π/λ)·d_i·sinθ`.
pub fn relative_phase_planar(d_i: f64, theta: f64, wavelength: f64) -> f64 {
    -2.0 * PI * d_i * theta.sin() / wavelength
}

/// Distance ratio `a_i = d_i / sqrt(λ·R)`, `R = sqrt(h̄² + D²)`.
pub fn distance_ratio(d_i: f64, h_bar: f64, distance: f64, wavelength: f64) -> f64 {
    d_i / (wavelength * h_bar.hypot(distance)).sqrt()
}

/// Second-order Taylor expansion of [`relative_phase_exact`] in `d_i`.
pub fn relative_phase_second_order(d_i: f64, h_bar: f64, distance: f64, wavelength: f64) -> f64 {
    let r = h_bar.hypot(distance);
    let sin_t = h_bar / r;
    let a = distance_ratio(d_i, h_bar, distance, wavelength);
    -2.0 * PI * (sin_t * d_i / wavelength + 0.5 * (1.0 - sin_t * sin_t) * a * a)
}
