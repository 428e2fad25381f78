#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use twolevel_mimo::beamforming::RfConfig;
use twolevel_mimo::channel::{ArrayLayout, GroundMaterial, PathCoupling};
use twolevel_mimo::geometry::PathGeometry;
use twolevel_mimo::numkit::ComplexMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cnormal(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| cnormal(rng))
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let a = random_matrix(rng, n, n);
    (&a + &a.adjoint()).scale_real(0.5)
}

/// `M^H M` for a random square `M`, full rank with probability one.
pub fn random_psd(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let m = random_matrix(rng, n, n);
    &m.adjoint() * &m
}

pub fn matrix_strategy(max_dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    (1..=max_dim).prop_flat_map(|n| {
        proptest::collection::vec((-10.0..10.0f64, -10.0..10.0f64), n * n).prop_map(move |v| {
            let data = v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
            ComplexMatrix::new(n, n, data).unwrap()
        })
    })
}

pub fn rel_frobenius(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let d = a.try_sub(b).unwrap().frobenius_norm();
    d / b.frobenius_norm().max(1.0)
}

pub fn layout8() -> ArrayLayout {
    ArrayLayout {
        side: 8,
        element_spacing: 0.0025,
        wavelength: 0.005,
    }
}

/// Arbitrary path: random angles within the visible half-space, random
/// lengths around 100 m, random subarray pair lengths, and for non-LoS paths
/// a reflection coefficient inside the unit disc.
pub fn random_path(rng: &mut ChaCha8Rng, index: usize, n: usize, layout: &ArrayLayout) -> PathCoupling {
    let mut angle = || rng.random_range(-PI / 3.0..PI / 3.0);
    let (te, ta, re, ra) = (angle(), angle(), angle(), angle());
    let center = rng.random_range(80.0..140.0);
    let pairs = (0..n)
        .map(|_| (0..n).map(|_| center + rng.random_range(0.0..2.0)).collect())
        .collect();
    let is_los = index == 1;
    let geometry = PathGeometry {
        index,
        departure_elevation: te,
        departure_azimuth: ta,
        arrival_elevation: re,
        arrival_azimuth: ra,
        center_length: center,
        pair_lengths: pairs,
        incidence_angle: if is_los { None } else { Some(rng.random_range(0.1..1.5)) },
        is_los,
    };
    PathCoupling::from_geometry(geometry, layout, &GroundMaterial::concrete())
}

/// Random scene with up to `max_paths` paths and a random set of distinct
/// codebook beams at each end.
pub fn random_scene(
    rng: &mut ChaCha8Rng,
    max_n: usize,
    max_beams: usize,
    max_paths: usize,
) -> (Vec<PathCoupling>, RfConfig) {
    let layout = layout8();
    let n = rng.random_range(1..=max_n);
    let p = rng.random_range(1..=max_paths);
    let b = rng.random_range(1..=max_beams);
    let paths = (1..=p).map(|i| random_path(rng, i, n, &layout)).collect();
    let mut codewords: Vec<i32> = (-7..=8).collect();
    codewords.shuffle(rng);
    let tx: Vec<f64> = codewords[..b].iter().map(|&c| c as f64 * PI / 8.0).collect();
    codewords.shuffle(rng);
    let rx: Vec<f64> = codewords[..b].iter().map(|&c| c as f64 * PI / 8.0).collect();
    let beams = |betas: &[f64]| {
        betas
            .iter()
            .map(|&x| twolevel_mimo::beamforming::BeamPattern::elevation(x, layout.side))
            .collect::<Vec<_>>()
    };
    let rf = RfConfig::new(beams(&tx), beams(&rx), layout, n).unwrap();
    (paths, rf)
}
