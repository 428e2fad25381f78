use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::geometry::ScenarioConfig;

/// Zero-padding factor applied before the FFT.
const PAD_FACTOR: usize = 8;

/// Rate, in cycles per meter of height, at which the LoS and reflected path
/// lengths slip by one wavelength: `(1/λ)·d(D₂ − D₁)/dh`.
pub fn oscillation_frequency_estimate(cfg: &ScenarioConfig, h: f64) -> f64 {
    let half = cfg.link_distance / 2.0;
    2.0 / cfg.carrier_wavelength * h / h.hypot(half)
}

/// Removes the least-squares quadratic trend of uniformly spaced samples.
fn detrend_quadratic(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let mid = (n as f64 - 1.0) / 2.0;
    let xs: Vec<f64> = (0..n).map(|i| (i as f64 - mid) / n.max(1) as f64).collect();
    // normal equations for [1, x, x²]
    let mut a = [[0.0f64; 3]; 3];
    let mut b = [0.0f64; 3];
    for (x, v) in xs.iter().zip(y) {
        let basis = [1.0, *x, x * x];
        for r in 0..3 {
            b[r] += basis[r] * v;
            for c in 0..3 {
                a[r][c] += basis[r] * basis[c];
            }
        }
    }
    let coef = solve3(a, b).unwrap_or([y.iter().sum::<f64>() / n as f64, 0.0, 0.0]);
    xs.iter()
        .zip(y)
        .map(|(x, v)| v - (coef[0] + coef[1] * x + coef[2] * x * x))
        .collect()
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..3 {
            let f = a[r][col] / a[col][col];
            for c in col..3 {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let s: f64 = (r + 1..3).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Strongest spatial frequency (cycles per unit of `step`) of uniformly
/// sampled data after quadratic detrending and a Hann window. `None` for
/// fewer than 8 samples or a flat signal.
pub fn dominant_spatial_frequency(samples: &[f64], step: f64) -> Option<f64> {
    let n = samples.len();
    if n < 8 || !(step > 0.0) {
        return None;
    }
    let detrended = detrend_quadratic(samples);
    let n_fft = (n * PAD_FACTOR).next_power_of_two();
    let mut buf = vec![Complex::new(0.0, 0.0); n_fft];
    for (i, v) in detrended.iter().enumerate() {
        let w = 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64).cos();
        buf[i] = Complex::new(v * w, 0.0);
    }
    FftPlanner::new().plan_fft_forward(n_fft).process(&mut buf);

    let mag: Vec<f64> = buf[..=n_fft / 2].iter().map(|z| z.norm()).collect();
    let (k, peak) = mag
        .iter()
        .enumerate()
        .skip(1)
        .max_by(|a, b| a.1.total_cmp(b.1))?;
    if *peak <= 0.0 {
        return None;
    }
    // parabolic refinement on the log magnitude
    let offset = if k + 1 < mag.len() && mag[k - 1] > 0.0 && mag[k + 1] > 0.0 {
        let (a, b, c) = (mag[k - 1].ln(), mag[k].ln(), mag[k + 1].ln());
        let den = a - 2.0 * b + c;
        if den.abs() > 0.0 { 0.5 * (a - c) / den } else { 0.0 }
    } else {
        0.0
    };
    Some((k as f64 + offset) / (n_fft as f64 * step))
}
