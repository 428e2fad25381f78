use crate::beamforming::{beam_gain, Codebook};
use crate::channel::ArrayLayout;

use super::rows::PatternRow;

/// Normalized elevation patterns (`φ = 0`) of every codeword over
/// `θ ∈ [−90°, 90°]` in steps of `step_deg`.
pub fn pattern_dump(codebook: &Codebook, layout: &ArrayLayout, step_deg: f64) -> Vec<PatternRow> {
    let n = (180.0 / step_deg + 1e-9).floor() as usize;
    let peak = layout.n_elements() as f64;
    let mut rows = Vec::with_capacity((n + 1) * codebook.len());
    for (idx, pattern) in codebook.indices.iter().zip(&codebook.patterns) {
        for i in 0..=n {
            let theta_deg = -90.0 + i as f64 * step_deg;
            let g = beam_gain(theta_deg.to_radians(), 0.0, pattern, layout);
            rows.push(PatternRow {
                theta_deg,
                codeword_n: *idx,
                beta_x_rad: pattern.beta_x,
                normalized_gain: g.norm() / peak,
            });
        }
    }
    rows
}
