//! Analog codebook beams, subarray pattern gains and the baseband-visible
//! effective channel.
//!
//! Gains use the unconjugated product `a^T f`, so a beam with progressive
//! phase `β_x > 0` points at `sinθ = −β_x·λ/(2π·d_e)`, i.e. below broadside
//! under the geometry's sign convention.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::channel::{array_response, ArrayLayout, PathCoupling};
use crate::error::{ConfigError, Error, Result, Side};
use crate::geometry::PathGeometry;
use crate::numkit::{kron, ComplexMatrix, NumError};

/// Below this `|sin(ψ/2)|` the array factor is evaluated by its limit.
pub const DIRICHLET_SINGULAR_TOL: f64 = 1e-12;

/// One analog beam: constant-modulus weights with progressive phases.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamPattern {
    pub beta_x: f64,
    pub beta_y: f64,
    pub vector: Vec<Complex64>,
}

impl BeamPattern {
    pub fn new(beta_x: f64, beta_y: f64, side: usize) -> Self {
        let mut vector = Vec::with_capacity(side * side);
        for mx in 0..side {
            for my in 0..side {
                vector.push(Complex64::from_polar(1.0, mx as f64 * beta_x + my as f64 * beta_y));
            }
        }
        Self {
            beta_x,
            beta_y,
            vector,
        }
    }

    /// Elevation-only beam (`β_y = 0`).
    pub fn elevation(beta_x: f64, side: usize) -> Self {
        Self::new(beta_x, 0.0, side)
    }

    pub fn side(&self) -> usize {
        (self.vector.len() as f64).sqrt().round() as usize
    }

    /// `sinθ` of the main lobe in the `φ = 0` plane.
    pub fn steering_sine(&self, layout: &ArrayLayout) -> f64 {
        -self.beta_x / layout.phase_per_sine()
    }
}

/// Ordered list of beams with their codeword indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    pub indices: Vec<i32>,
    pub patterns: Vec<BeamPattern>,
}

impl Codebook {
    /// 16 elevation beams with `β_x = n·π/8`, `n = −7..=8`, ascending.
    pub fn elevation_default(side: usize) -> Self {
        let indices: Vec<i32> = (-7..=8).collect();
        let patterns = indices
            .iter()
            .map(|&n| BeamPattern::elevation(n as f64 * PI / 8.0, side))
            .collect();
        Self { indices, patterns }
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn by_index(&self, n: i32) -> Option<&BeamPattern> {
        self.indices
            .iter()
            .position(|&i| i == n)
            .map(|k| &self.patterns[k])
    }
}

/// Analog beams selected at both ends. The same beams drive every subarray.
#[derive(Debug, Clone)]
pub struct RfConfig {
    pub tx: Vec<BeamPattern>,
    pub rx: Vec<BeamPattern>,
    pub layout: ArrayLayout,
    pub n_subarrays: usize,
}

impl RfConfig {
    pub fn new(
        tx: Vec<BeamPattern>,
        rx: Vec<BeamPattern>,
        layout: ArrayLayout,
        n_subarrays: usize,
    ) -> std::result::Result<Self, ConfigError> {
        if tx.is_empty() {
            return Err(ConfigError::new("beams", "at least one beam is required"));
        }
        if tx.len() != rx.len() {
            return Err(ConfigError::new(
                "beams",
                format!("{} transmit beams but {} receive beams", tx.len(), rx.len()),
            ));
        }
        if n_subarrays == 0 {
            return Err(ConfigError::new("n_subarrays", "must be >= 1"));
        }
        let m2 = layout.n_elements();
        if tx.iter().chain(rx.iter()).any(|b| b.vector.len() != m2) {
            return Err(ConfigError::new(
                "beams",
                format!("beam vectors must have {m2} entries"),
            ));
        }
        Ok(Self {
            tx,
            rx,
            layout,
            n_subarrays,
        })
    }

    /// Identical elevation beams at both ends.
    pub fn symmetric(betas: &[f64], layout: ArrayLayout, n_subarrays: usize) -> std::result::Result<Self, ConfigError> {
        let beams: Vec<BeamPattern> = betas
            .iter()
            .map(|&b| BeamPattern::elevation(b, layout.side))
            .collect();
        Self::new(beams.clone(), beams, layout, n_subarrays)
    }

    pub fn n_beams(&self) -> usize {
        self.tx.len()
    }

    /// `N·B`, the baseband dimension.
    pub fn baseband_dim(&self) -> usize {
        self.n_subarrays * self.n_beams()
    }

    fn stack(beams: &[BeamPattern]) -> ComplexMatrix {
        let m2 = beams[0].vector.len();
        ComplexMatrix::from_fn(m2, beams.len(), |i, b| beams[b].vector[i])
    }

    /// `F_RF`, `M² × B`.
    pub fn f_rf(&self) -> ComplexMatrix {
        Self::stack(&self.tx)
    }

    /// `W_RF`, `M² × B`.
    pub fn w_rf(&self) -> ComplexMatrix {
        Self::stack(&self.rx)
    }

    /// `F_RF ⊗ I_N`
    pub fn f_rf_n(&self) -> ComplexMatrix {
        kron(&self.f_rf(), &ComplexMatrix::identity(self.n_subarrays)).expect("small dimensions")
    }

    /// `W_RF ⊗ I_N`
    pub fn w_rf_n(&self) -> ComplexMatrix {
        kron(&self.w_rf(), &ComplexMatrix::identity(self.n_subarrays)).expect("small dimensions")
    }
}

/// `a(θ, φ)^T · f` by direct summation.
pub fn beam_gain(theta: f64, phi: f64, pattern: &BeamPattern, layout: &ArrayLayout) -> Complex64 {
    array_response(theta, phi, layout)
        .iter()
        .zip(&pattern.vector)
        .map(|(a, f)| a * f)
        .sum()
}

/// `sin(Mψ/2)/sin(ψ/2)`, continuous through its removable singularities.
pub fn dirichlet_kernel(psi: f64, m: usize) -> f64 {
    let m = m as f64;
    let den = (psi / 2.0).sin();
    if den.abs() < DIRICHLET_SINGULAR_TOL {
        m * (m * psi / 2.0).cos() / (psi / 2.0).cos()
    } else {
        (m * psi / 2.0).sin() / den
    }
}

/// Deviations `(ψ_x, ψ_y)` between the arrival direction and the beam.
pub fn pattern_deviations(theta: f64, phi: f64, beta_x: f64, beta_y: f64, layout: &ArrayLayout) -> (f64, f64) {
    let k = layout.phase_per_sine();
    (
        k * theta.sin() * phi.cos() + beta_x,
        k * theta.sin() * phi.sin() + beta_y,
    )
}

/// Closed-form array factor, equal to [`beam_gain`] for the pattern with
/// phases `(β_x, β_y)`.
pub fn beam_gain_closed_form(theta: f64, phi: f64, beta_x: f64, beta_y: f64, layout: &ArrayLayout) -> Complex64 {
    let (px, py) = pattern_deviations(theta, phi, beta_x, beta_y, layout);
    let m = layout.side;
    let phase = Complex64::from_polar(1.0, (m as f64 - 1.0) * (px + py) / 2.0);
    phase * (dirichlet_kernel(px, m) * dirichlet_kernel(py, m))
}

/// Gains of every selected beam towards one path.
pub fn gain_vector(path: &PathGeometry, rf: &RfConfig, side: Side) -> Vec<Complex64> {
    let (beams, theta, phi) = match side {
        Side::Tx => (&rf.tx, path.departure_elevation, path.departure_azimuth),
        Side::Rx => (&rf.rx, path.arrival_elevation, path.arrival_azimuth),
    };
    beams
        .iter()
        .map(|b| beam_gain(theta, phi, b, &rf.layout))
        .collect()
}

fn check_paths(paths: &[PathCoupling], rf: &RfConfig, op: &'static str) -> Result<()> {
    let m2 = rf.layout.n_elements();
    for p in paths {
        if p.n_subarrays() != rf.n_subarrays || p.tx_response.len() != m2 {
            return Err(Error::Numerical(NumError::DimensionMismatch {
                op,
                left: (rf.n_subarrays, m2),
                right: (p.n_subarrays(), p.tx_response.len()),
            }));
        }
    }
    Ok(())
}

/// `H_eff = Σ_p α_p·(g_r g_t^T) ⊗ H_p`, `NB × NB`.
pub fn effective_channel(paths: &[PathCoupling], rf: &RfConfig) -> Result<ComplexMatrix> {
    check_paths(paths, rf, "effective_channel")?;
    let nb = rf.baseband_dim();
    let mut h = ComplexMatrix::zeros(nb, nb);
    for p in paths {
        let gt = gain_vector(&p.geometry, rf, Side::Tx);
        let gr = gain_vector(&p.geometry, rf, Side::Rx);
        let outer = ComplexMatrix::outer(&gr, &gt).scale(p.gain);
        h = h.try_add(&kron(&outer, &p.coupling)?)?;
    }
    Ok(h)
}

/// `W_{RF,N}^T · H · F_{RF,N}` from an assembled physical channel.
pub fn effective_channel_from_physical(h: &ComplexMatrix, rf: &RfConfig) -> Result<ComplexMatrix> {
    let left = rf.w_rf_n().transpose().try_matmul(h)?;
    Ok(left.try_matmul(&rf.f_rf_n())?)
}

/// `σ_n²·(W_RF^T W_RF^*) ⊗ I_N`, the covariance of `W_{RF,N}^T n`.
pub fn effective_noise_covariance(rf: &RfConfig, noise_power: f64) -> ComplexMatrix {
    let w = rf.w_rf();
    let gram = &w.transpose() * &w.conj();
    kron(&gram, &ComplexMatrix::identity(rf.n_subarrays))
        .expect("small dimensions")
        .scale_real(noise_power)
}

/// Intermediate and output signals of one channel use.
#[derive(Debug, Clone)]
pub struct LinkSignals {
    pub s: Vec<Complex64>,
    pub z: Vec<Complex64>,
    pub x: Vec<Complex64>,
    pub n: Vec<Complex64>,
    pub y: Vec<Complex64>,
}

/// `y = W_BB^T W_{RF,N}^T (H·F_{RF,N}·F_BB·s + n)`.
pub fn apply_link(
    s: &[Complex64],
    f_bb: &ComplexMatrix,
    rf: &RfConfig,
    h: &ComplexMatrix,
    w_bb_t: &ComplexMatrix,
    noise: &[Complex64],
) -> Result<LinkSignals> {
    let z = f_bb.matvec(s)?;
    let x = rf.f_rf_n().matvec(&z)?;
    let mut r = h.matvec(&x)?;
    if noise.len() != r.len() {
        return Err(Error::Numerical(NumError::DimensionMismatch {
            op: "apply_link",
            left: (r.len(), 1),
            right: (noise.len(), 1),
        }));
    }
    for (ri, ni) in r.iter_mut().zip(noise) {
        *ri += ni;
    }
    let combined = rf.w_rf_n().transpose().matvec(&r)?;
    let y = w_bb_t.matvec(&combined)?;
    Ok(LinkSignals {
        s: s.to_vec(),
        z,
        x,
        n: noise.to_vec(),
        y,
    })
}
