//! Physical channel: array responses, path gains, inter-subarray phase
//! coupling and the assembled `NM² × NM²` channel matrix.
//!
//! Element `(m_x, m_y)` of a subarray has flat index `m_x·M + m_y`. In the
//! assembled channel, row/column `e·N + l` addresses element `e` of subarray
//! `l`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, Error, Result};
use crate::geometry::{build_two_path_geometry, PathGeometry, ScenarioConfig};
use crate::numkit::{kron, ComplexMatrix};

/// Dielectric ground described by its complex permittivity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundMaterial {
    pub relative_permittivity: f64,
    pub loss_tangent: f64,
}

impl GroundMaterial {
    /// Concrete at 60 GHz.
    pub fn concrete() -> Self {
        Self {
            relative_permittivity: 3.6478,
            loss_tangent: 0.2053,
        }
    }

    pub fn vacuum() -> Self {
        Self {
            relative_permittivity: 1.0,
            loss_tangent: 0.0,
        }
    }

    pub fn validate(&self) -> std::result::Result<(), ConfigError> {
        if !(self.relative_permittivity.is_finite() && self.relative_permittivity >= 1.0) {
            return Err(ConfigError::new(
                "ground.relative_permittivity",
                format!("must be >= 1, got {}", self.relative_permittivity),
            ));
        }
        if !(self.loss_tangent.is_finite() && self.loss_tangent >= 0.0) {
            return Err(ConfigError::new(
                "ground.loss_tangent",
                format!("must be >= 0, got {}", self.loss_tangent),
            ));
        }
        Ok(())
    }

    /// `ε_r·(1 − j·tanδ)`
    pub fn complex_permittivity(&self) -> Complex64 {
        Complex64::new(self.relative_permittivity, -self.relative_permittivity * self.loss_tangent)
    }
}

/// Geometry of one square subarray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayLayout {
    /// Elements per side, `M`.
    pub side: usize,
    pub element_spacing: f64,
    pub wavelength: f64,
}

impl ArrayLayout {
    pub fn n_elements(&self) -> usize {
        self.side * self.side
    }

    /// `2π·d_e/λ`
    pub fn phase_per_sine(&self) -> f64 {
        2.0 * PI * self.element_spacing / self.wavelength
    }
}

/// Response of an `M×M` planar subarray to a plane wave from `(θ, φ)`.
pub fn array_response(theta: f64, phi: f64, layout: &ArrayLayout) -> Vec<Complex64> {
    let k = layout.phase_per_sine();
    let ux = k * theta.sin() * phi.cos();
    let uy = k * theta.sin() * phi.sin();
    let m = layout.side;
    let mut out = Vec::with_capacity(m * m);
    for mx in 0..m {
        for my in 0..m {
            out.push(Complex64::from_polar(1.0, mx as f64 * ux + my as f64 * uy));
        }
    }
    out
}

/// TE (perpendicular) Fresnel reflection coefficient, `theta_i` measured from
/// the surface normal.
pub fn fresnel_te_reflection(theta_i: f64, ground: &GroundMaterial) -> Complex64 {
    let cos_i = theta_i.cos();
    let sin_i = theta_i.sin();
    // principal branch: Re ≥ 0
    let root = (ground.complex_permittivity() - sin_i * sin_i).sqrt();
    (cos_i - root) / (cos_i + root)
}

/// Friis amplitude `Γ·λ/(4π·D_p)`.
pub fn path_gain(reflection: Complex64, length: f64, wavelength: f64) -> Complex64 {
    reflection * (wavelength / (4.0 * PI * length))
}

/// `{H_p}_lk = exp(−j·2π·D_p^(lk)/λ)`.
pub fn coupling_matrix(path: &PathGeometry, wavelength: f64) -> ComplexMatrix {
    let n = path.n_subarrays();
    ComplexMatrix::from_fn(n, n, |l, k| {
        Complex64::from_polar(1.0, -2.0 * PI * path.pair_lengths[l][k] / wavelength)
    })
}

/// Fraunhofer approximation `exp(−jπ(l−k)²/N)` of the LoS coupling matrix at
/// optimal spacing, global phase dropped.
pub fn los_coupling_fraunhofer(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |l, k| {
        let d = l as f64 - k as f64;
        Complex64::from_polar(1.0, -PI * d * d / n as f64)
    })
}

/// Coupling of a uniform rectangular arrangement of subarrays, separable
/// into horizontal and vertical factors.
pub fn ura_coupling_factorized(hx: &ComplexMatrix, hy: &ComplexMatrix) -> Result<ComplexMatrix> {
    for h in [hx, hy] {
        if !h.is_square() {
            return Err(crate::numkit::NumError::NotSquare {
                rows: h.rows(),
                cols: h.cols(),
            }
            .into());
        }
    }
    Ok(kron(hx, hy)?)
}

/// Everything the channel needs to know about one path.
#[derive(Debug, Clone)]
pub struct PathCoupling {
    pub geometry: PathGeometry,
    pub reflection: Complex64,
    pub gain: Complex64,
    pub coupling: ComplexMatrix,
    pub tx_response: Vec<Complex64>,
    pub rx_response: Vec<Complex64>,
}

impl PathCoupling {
    /// LoS paths get `Γ = 1` exactly; reflected paths the TE coefficient at
    /// their incidence angle.
    pub fn from_geometry(geometry: PathGeometry, layout: &ArrayLayout, ground: &GroundMaterial) -> Self {
        let reflection = match geometry.incidence_angle {
            Some(theta_i) if !geometry.is_los => fresnel_te_reflection(theta_i, ground),
            _ => Complex64::new(1.0, 0.0),
        };
        let gain = path_gain(reflection, geometry.center_length, layout.wavelength);
        let coupling = coupling_matrix(&geometry, layout.wavelength);
        let tx_response = array_response(geometry.departure_elevation, geometry.departure_azimuth, layout);
        let rx_response = array_response(geometry.arrival_elevation, geometry.arrival_azimuth, layout);
        Self {
            geometry,
            reflection,
            gain,
            coupling,
            tx_response,
            rx_response,
        }
    }

    pub fn n_subarrays(&self) -> usize {
        self.coupling.rows()
    }
}

/// LoS and ground-reflected paths of `cfg`, ready for channel assembly.
pub fn build_paths(cfg: &ScenarioConfig) -> Result<Vec<PathCoupling>> {
    let layout = cfg.layout();
    Ok(build_two_path_geometry(cfg)?
        .into_iter()
        .map(|g| PathCoupling::from_geometry(g, &layout, &cfg.ground))
        .collect())
}

/// `H = Σ_p α_p·(a_r a_t^T) ⊗ H_p`.
pub fn assemble_channel(paths: &[PathCoupling], n: usize, m: usize) -> Result<ComplexMatrix> {
    let dim = n * m * m;
    let mut h = ComplexMatrix::zeros(dim, dim);
    for p in paths {
        if p.n_subarrays() != n || p.tx_response.len() != m * m || p.rx_response.len() != m * m {
            return Err(Error::Numerical(crate::numkit::NumError::DimensionMismatch {
                op: "assemble_channel",
                left: (n, m * m),
                right: (p.n_subarrays(), p.tx_response.len()),
            }));
        }
        let outer = ComplexMatrix::outer(&p.rx_response, &p.tx_response).scale(p.gain);
        h = h.try_add(&kron(&outer, &p.coupling)?)?;
    }
    Ok(h)
}
