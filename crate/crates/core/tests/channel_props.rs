mod common;

use std::f64::consts::PI;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use twolevel_mimo::channel::*;
use twolevel_mimo::geometry::*;
use twolevel_mimo::numkit::{svd, ComplexMatrix};

fn scene(h: f64, n: usize, d: f64) -> ScenarioConfig {
    let mut c = ScenarioConfig::backhaul_60ghz().with_height(h).with_subarrays(n);
    c.subarray_spacing = Some(d);
    c
}

/// Phase of `z` relative to `reference`, wrapped.
fn phase_gap(z: Complex64, reference: Complex64) -> f64 {
    (z * reference.conj()).arg()
}

proptest! {
    #[test]
    fn pair_lengths_symmetric_and_bounded(h in 1.0..90.0f64, n in 1usize..5, d in 0.0..2.0f64) {
        let paths = build_two_path_geometry(&scene(h, n, d)).unwrap();
        for p in &paths {
            prop_assert!(p.center_length > 0.0);
            prop_assert!(p.departure_elevation.abs() <= PI / 2.0);
            for l in 0..n {
                for k in 0..n {
                    prop_assert_eq!(p.pair_lengths[l][k], p.pair_lengths[k][l]);
                    prop_assert!(p.pair_lengths[l][k] >= 100.0);
                }
            }
        }
        for l in 0..n {
            prop_assert_eq!(paths[0].pair_lengths[l][l], 100.0);
        }
    }

    #[test]
    fn reflected_length_increases_with_index_sum(h in 1.0..90.0f64, n in 2usize..5, d in 0.01..2.0f64) {
        let r = &build_two_path_geometry(&scene(h, n, d)).unwrap()[1];
        for l in 0..n {
            for k in 0..n {
                if l + 1 < n {
                    prop_assert!(r.pair_lengths[l + 1][k] > r.pair_lengths[l][k]);
                }
                if k + 1 < n {
                    prop_assert!(r.pair_lengths[l][k + 1] > r.pair_lengths[l][k]);
                }
            }
        }
    }

    #[test]
    fn te_reflection_is_passive(theta in 0.0..(PI / 2.0 - 1e-6), er in 1.0..30.0f64, tand in 0.0..5.0f64) {
        let g = fresnel_te_reflection(theta, &GroundMaterial { relative_permittivity: er, loss_tangent: tand });
        prop_assert!(g.norm() <= 1.0);
    }

    #[test]
    fn array_response_unit_modulus(theta in -PI..PI, phi in -PI..PI, m in 1usize..9) {
        let l = ArrayLayout { side: m, element_spacing: 0.0025, wavelength: 0.005 };
        let a = array_response(theta, phi, &l);
        prop_assert_eq!(a.len(), m * m);
        for z in a {
            prop_assert!((z.norm() - 1.0).abs() < 1e-15);
        }
    }
}

#[test]
fn reflected_pairs_match_centered_indexing() {
    // Centering the stack between the two subarrays turns our lengths into
    // the three lengths sqrt((2h ± d)² + D²), sqrt((2h)² + D²).
    let d = 0.5;
    let h = 12.0;
    let r = &build_two_path_geometry(&scene(h, 2, d)).unwrap()[1];
    let hc = h + d / 2.0;
    let expected = [
        [(2.0 * hc - d).hypot(100.0), (2.0 * hc).hypot(100.0)],
        [(2.0 * hc).hypot(100.0), (2.0 * hc + d).hypot(100.0)],
    ];
    for l in 0..2 {
        for k in 0..2 {
            assert!((r.pair_lengths[l][k] - expected[l][k]).abs() < 1e-12);
        }
    }
}

#[test]
fn planar_model_error_bound_and_tightness() {
    let (dist, lam) = (100.0, 0.005);
    let d_max = lam / 2.0 * 8.0;
    let mut worst_ratio: f64 = 0.0;
    for i in 0..=240 {
        let theta = -PI / 3.0 + i as f64 * (2.0 * PI / 3.0) / 240.0;
        let h_bar = dist * theta.tan();
        for j in 1..=16 {
            let di = d_max * j as f64 / 16.0;
            let a = distance_ratio(di, h_bar, dist, lam);
            let gap = (relative_phase_exact(di, h_bar, dist, lam) - relative_phase_planar(di, theta, lam)).abs();
            let bound = 2.0 * PI * a * a;
            assert!(gap <= bound, "theta {theta} d {di}: {gap} > {bound}");
            worst_ratio = worst_ratio.max(gap / bound);
        }
    }
    assert!(worst_ratio >= 0.5 * (1.0 - 1e-6), "bound not tight: {worst_ratio}");
}

#[test]
fn second_order_expansion_at_subarray_spacing() {
    let (h, dist, lam) = (10.0, 100.0, 0.005);
    let theta = (h / f64::hypot(h, dist)).asin();
    let exact = relative_phase_exact(0.5, h, dist, lam);
    assert!((exact - relative_phase_second_order(0.5, h, dist, lam)).abs() <= 1e-3);
    let a = distance_ratio(0.5, h, dist, lam);
    let planar_gap = (exact - relative_phase_planar(0.5, theta, lam)).abs();
    assert!(planar_gap > 0.5 * PI * a * a);
}

#[test]
fn reflection_loss_over_height_range() {
    let concrete = GroundMaterial::concrete();
    let loss = |h: f64| -20.0 * fresnel_te_reflection((100.0 / (2.0 * h)).atan(), &concrete).norm().log10();
    let low = loss(5.0);
    let high = loss(35.0);
    // monotone in h over the range
    let mut prev = low;
    for i in 1..=60 {
        let l = loss(5.0 + i as f64 * 0.5);
        assert!(l > prev);
        prev = l;
    }
    assert!((low - 1.0).abs() <= 1.0);
    assert!((high - 5.0).abs() <= 1.0);
}

#[test]
fn exact_los_coupling_matches_three_subarray_matrix() {
    let n = 3;
    let d = optimal_subarray_spacing(0.005, 100.0, n).unwrap();
    let los = &build_two_path_geometry(&scene(20.0, n, d)).unwrap()[0];
    let h = coupling_matrix(los, 0.005);
    let global = Complex64::from_polar(1.0, -2.0 * PI * 100.0 / 0.005);
    let w = Complex64::from_polar(1.0, -PI / 3.0);
    let w4 = Complex64::from_polar(1.0, -4.0 * PI / 3.0);
    let one = Complex64::new(1.0, 0.0);
    let eq3 = [[one, w, w4], [w, one, w], [w4, w, one]];
    for l in 0..3 {
        for k in 0..3 {
            assert!(phase_gap(h[(l, k)], global * eq3[l][k]).abs() <= 1e-2);
            assert!(phase_gap(los_coupling_fraunhofer(3)[(l, k)], eq3[l][k]).abs() <= 1e-14);
        }
    }
}

#[test]
fn exact_los_coupling_is_nearly_orthogonal() {
    for n in 2..=4 {
        let d = optimal_subarray_spacing(0.005, 100.0, n).unwrap();
        let los = &build_two_path_geometry(&scene(20.0, n, d)).unwrap()[0];
        let h = coupling_matrix(los, 0.005);
        let g = &h.adjoint() * &h;
        let target = ComplexMatrix::identity(n).scale_real(n as f64);
        assert!(rel_frobenius(&g, &target) <= 1e-3, "n = {n}");
        assert!(h.data().iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
    }
}

#[test]
fn fraunhofer_matches_exact_phases() {
    for n in 2..=6 {
        let d = optimal_subarray_spacing(0.005, 100.0, n).unwrap();
        let los = &build_two_path_geometry(&scene(20.0, n, d)).unwrap()[0];
        let exact = coupling_matrix(los, 0.005);
        let approx = los_coupling_fraunhofer(n);
        let global = Complex64::from_polar(1.0, -2.0 * PI * 100.0 / 0.005);
        for l in 0..n {
            for k in 0..n {
                assert!(phase_gap(exact[(l, k)], global * approx[(l, k)]).abs() <= 2e-2);
            }
        }
    }
}

#[test]
fn ura_factorization_matches_planar_spherical_geometry() {
    let (lam, dist) = (0.005, 100.0);
    let (nx, ny) = (2usize, 3usize);
    let dx = optimal_subarray_spacing(lam, dist, nx).unwrap();
    let dy = optimal_subarray_spacing(lam, dist, ny).unwrap();
    let h = ura_coupling_factorized(&los_coupling_fraunhofer(nx), &los_coupling_fraunhofer(ny)).unwrap();
    let g = &h.adjoint() * &h;
    assert!(g.max_abs_diff(&ComplexMatrix::identity(6).scale_real(6.0)) < 1e-12);
    for (i, (ix, iy)) in (0..nx).flat_map(|a| (0..ny).map(move |b| (a, b))).enumerate() {
        for (j, (jx, jy)) in (0..nx).flat_map(|a| (0..ny).map(move |b| (a, b))).enumerate() {
            let ex = (ix as f64 - jx as f64) * dx;
            let ey = (iy as f64 - jy as f64) * dy;
            let len = (ex * ex + ey * ey + dist * dist).sqrt();
            let direct = Complex64::from_polar(1.0, -2.0 * PI * (len - dist) / lam);
            assert!(phase_gap(h[(i, j)], direct).abs() <= 2e-2);
        }
    }
    let block = ura_coupling_factorized(&ComplexMatrix::identity(2), &los_coupling_fraunhofer(3)).unwrap();
    assert_eq!(block[(0, 3)], Complex64::new(0.0, 0.0));
    assert_eq!(block[(4, 5)], los_coupling_fraunhofer(3)[(1, 2)]);
}

#[test]
fn los_only_single_element_reduces_to_scaled_coupling() {
    let mut cfg = scene(20.0, 3, optimal_subarray_spacing(0.005, 100.0, 3).unwrap());
    cfg.subarray_side = 1;
    let paths = build_paths(&cfg).unwrap();
    let h = assemble_channel(&paths[..1], 3, 1).unwrap();
    let expected = paths[0].coupling.scale(paths[0].gain);
    assert!(h.max_abs_diff(&expected) < 1e-20);
    assert_eq!(paths[0].reflection, Complex64::new(1.0, 0.0));
}

#[test]
fn two_path_channel_has_four_dominant_modes() {
    let cfg = ScenarioConfig::backhaul_60ghz();
    let paths = build_paths(&cfg).unwrap();
    let h = assemble_channel(&paths, 2, 8).unwrap();
    assert_eq!(h.shape(), (128, 128));
    let s = svd(&h).unwrap().sigma;
    assert!(s[3] / s[0] > 1e-2);
    assert!(s[4] / s[0] < 1e-10);
}
