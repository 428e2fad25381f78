//! Jacobi-based decompositions for small dense complex matrices.
//!
//! Both routines iterate cyclic sweeps in a fixed `(p, q)` order, so identical
//! inputs produce bitwise-identical outputs. Results carry a phase convention
//! on the eigen/right-singular vectors: the first component whose modulus
//! exceeds [`PHASE_PIVOT_TOL`] is made real and nonnegative.

use num_complex::Complex64;

use super::{ComplexMatrix, NumError};

/// Sweep cap shared by both Jacobi iterations.
pub const MAX_SWEEPS: usize = 100;
/// Off-diagonal Frobenius mass, relative to `‖A‖_F`, at which the Hermitian
/// iteration stops.
pub const OFF_DIAGONAL_TOL: f64 = 1e-14;
/// Largest tolerated relative Hermitian defect `‖A − A^H‖_F / ‖A‖_F`.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Negative eigenvalues are tolerated down to `-NEGATIVE_EIG_TOL · λ_max`.
pub const NEGATIVE_EIG_TOL: f64 = 1e-10;
pub const PHASE_PIVOT_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Eigen-decomposition of a Hermitian matrix, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct HermEig {
    pub values: Vec<f64>,
    /// Eigenvectors stored as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

/// `A = U · diag(sigma) · V^H` with `sigma` descending.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: ComplexMatrix,
    pub sigma: Vec<f64>,
    pub v: ComplexMatrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut us = self.u.clone();
        for (j, s) in self.sigma.iter().enumerate() {
            for i in 0..us.rows() {
                us[(i, j)] *= *s;
            }
        }
        &us * &self.v.adjoint()
    }

    /// Number of singular values above `rel_eps · σ_1`.
    pub fn rank(&self, rel_eps: f64) -> usize {
        let top = self.sigma.first().copied().unwrap_or(0.0);
        self.sigma.iter().filter(|&&s| s > rel_eps * top).count()
    }
}

/// Result of [`inv_sqrt_psd`]. `rank < dim` signals that eigenvalues at or
/// below the cutoff were dropped.
#[derive(Debug, Clone)]
pub struct InvSqrtPsd {
    pub matrix: ComplexMatrix,
    pub rank: usize,
    pub dim: usize,
    pub dropped: Vec<f64>,
}

impl InvSqrtPsd {
    pub fn is_full_rank(&self) -> bool {
        self.rank == self.dim
    }
}

fn require_square_finite(a: &ComplexMatrix) -> Result<(), NumError> {
    if !a.is_square() {
        return Err(NumError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if !a.is_finite() {
        return Err(NumError::NonFinite);
    }
    Ok(())
}

/// Multiplies each column by a unit phase so its first significant entry is
/// real nonnegative. Returns the applied phase per column.
fn normalize_column_phases(m: &mut ComplexMatrix) -> Vec<Complex64> {
    let mut phases = Vec::with_capacity(m.cols());
    for j in 0..m.cols() {
        let pivot = (0..m.rows())
            .map(|i| m[(i, j)])
            .find(|z| z.norm() > PHASE_PIVOT_TOL);
        let rot = match pivot {
            Some(z) => (z / z.norm()).conj(),
            None => Complex64::new(1.0, 0.0),
        };
        for i in 0..m.rows() {
            m[(i, j)] *= rot;
        }
        phases.push(rot);
    }
    phases
}

fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    order
}

fn permute_columns(m: &ComplexMatrix, order: &[usize]) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.rows(), order.len(), |i, j| m[(i, order[j])])
}

/// Jacobi rotation parameters `(c, s)` zeroing the off-diagonal of the real
/// symmetric pair `[[app, m], [m, aqq]]`, `m > 0`.
fn jacobi_rotation(app: f64, aqq: f64, m: f64) -> (f64, f64) {
    let theta = (aqq - app) / (2.0 * m);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, c * t)
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi.
pub fn herm_eig(a: &ComplexMatrix) -> Result<HermEig, NumError> {
    require_square_finite(a)?;
    let defect = a.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(NumError::NotHermitian { defect });
    }
    let n = a.rows();
    // Work on the exact Hermitian part.
    let mut w = ComplexMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)].conj()));
    for i in 0..n {
        w[(i, i)].im = 0.0;
    }
    let mut v = ComplexMatrix::identity(n);
    let norm = w.frobenius_norm();

    let mut converged = norm == 0.0 || n < 2;
    for _sweep in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| w[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= OFF_DIAGONAL_TOL * norm {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = w[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let app = w[(p, p)].re;
                let aqq = w[(q, q)].re;
                // Negligible against both diagonal entries: drop it outright.
                if app.abs() + 100.0 * mag == app.abs() && aqq.abs() + 100.0 * mag == aqq.abs() {
                    w[(p, q)] = ZERO;
                    w[(q, p)] = ZERO;
                    continue;
                }
                let phase_conj = (apq / mag).conj();
                let (c, s) = jacobi_rotation(app, aqq, mag);
                // J = diag(1, e^{-jφ}) · [[c, s], [-s, c]]
                let j11 = Complex64::new(c, 0.0);
                let j12 = Complex64::new(s, 0.0);
                let j21 = -s * phase_conj;
                let j22 = c * phase_conj;

                for i in 0..n {
                    let (wip, wiq) = (w[(i, p)], w[(i, q)]);
                    w[(i, p)] = wip * j11 + wiq * j21;
                    w[(i, q)] = wip * j12 + wiq * j22;
                }
                for k in 0..n {
                    let (wpk, wqk) = (w[(p, k)], w[(q, k)]);
                    w[(p, k)] = j11.conj() * wpk + j21.conj() * wqk;
                    w[(q, k)] = j12.conj() * wpk + j22.conj() * wqk;
                }
                w[(p, q)] = ZERO;
                w[(q, p)] = ZERO;
                w[(p, p)].im = 0.0;
                w[(q, q)].im = 0.0;

                for i in 0..n {
                    let (vip, viq) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = vip * j11 + viq * j21;
                    v[(i, q)] = vip * j12 + viq * j22;
                }
            }
        }
    }
    if !converged {
        return Err(NumError::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let raw: Vec<f64> = (0..n).map(|i| w[(i, i)].re).collect();
    let order = descending_order(&raw);
    let values = order.iter().map(|&k| raw[k]).collect();
    let mut vectors = permute_columns(&v, &order);
    normalize_column_phases(&mut vectors);
    Ok(HermEig { values, vectors })
}

/// Singular value decomposition of a square matrix by one-sided (Hestenes)
/// Jacobi.
pub fn svd(a: &ComplexMatrix) -> Result<SvdResult, NumError> {
    require_square_finite(a)?;
    let n = a.rows();
    let mut g = a.clone();
    let mut v = ComplexMatrix::identity(n);
    let tol = f64::EPSILON * (n.max(2) as f64);
    // Columns below this squared norm are numerically zero; rotating them
    // against large columns only stirs rounding noise.
    let negligible = (tol * a.frobenius_norm()).powi(2);

    let mut converged = n < 2;
    for _sweep in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = ZERO;
                for i in 0..n {
                    let (gp, gq) = (g[(i, p)], g[(i, q)]);
                    alpha += gp.norm_sqr();
                    beta += gq.norm_sqr();
                    gamma += gp.conj() * gq;
                }
                let mag = gamma.norm();
                if mag == 0.0 || mag <= tol * (alpha * beta).sqrt() || alpha.min(beta) <= negligible {
                    continue;
                }
                rotated = true;
                let phase_conj = (gamma / mag).conj();
                let (c, s) = jacobi_rotation(alpha, beta, mag);
                for i in 0..n {
                    let gp = g[(i, p)];
                    let gq = g[(i, q)] * phase_conj;
                    g[(i, p)] = c * gp - s * gq;
                    g[(i, q)] = s * gp + c * gq;
                    let vp = v[(i, p)];
                    let vq = v[(i, q)] * phase_conj;
                    v[(i, p)] = c * vp - s * vq;
                    v[(i, q)] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(NumError::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let raw: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| g[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let order = descending_order(&raw);
    let sigma: Vec<f64> = order.iter().map(|&k| raw[k]).collect();
    let g = permute_columns(&g, &order);
    let mut v = permute_columns(&v, &order);

    let mut u = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        if sigma[j] > 0.0 {
            let col: Vec<Complex64> = g.column(j).iter().map(|z| z / sigma[j]).collect();
            u.set_column(j, &col);
        }
    }
    orthonormalize_with_completion(&mut u);

    let phases = normalize_column_phases(&mut v);
    for (j, rot) in phases.iter().enumerate() {
        for i in 0..n {
            u[(i, j)] *= *rot;
        }
    }
    Ok(SvdResult { u, sigma, v })
}

/// Modified Gram–Schmidt over the columns in order. Columns that collapse
/// (zero singular values) are replaced by the standard basis vector with the
/// largest residual against the columns already fixed.
fn orthonormalize_with_completion(u: &mut ComplexMatrix) {
    let n = u.rows();
    let project_out = |col: &mut Vec<Complex64>, u: &ComplexMatrix, upto: usize| {
        for k in 0..upto {
            let dot: Complex64 = (0..n).map(|i| u[(i, k)].conj() * col[i]).sum();
            for (i, c) in col.iter_mut().enumerate() {
                *c -= dot * u[(i, k)];
            }
        }
    };
    let norm = |col: &[Complex64]| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

    for j in 0..u.cols() {
        let mut col = u.column(j);
        let original = norm(&col);
        project_out(&mut col, u, j);
        let mut residual = norm(&col);
        if original == 0.0 || residual < 0.5 * original {
            let mut best: Option<(f64, Vec<Complex64>)> = None;
            for e in 0..n {
                let mut cand = vec![ZERO; n];
                cand[e] = Complex64::new(1.0, 0.0);
                project_out(&mut cand, u, j);
                let r = norm(&cand);
                if best.as_ref().is_none_or(|(br, _)| r > *br) {
                    best = Some((r, cand));
                }
            }
            let (_, cand) = best.expect("nonempty basis");
            col = cand;
            // second pass keeps the completion orthogonal to working precision
            project_out(&mut col, u, j);
            residual = norm(&col);
        }
        for c in col.iter_mut() {
            *c /= residual;
        }
        u.set_column(j, &col);
    }
}

/// Inverse square root of a Hermitian positive semidefinite matrix on the
/// eigen-subspace above `rel_eps · λ_max`.
pub fn inv_sqrt_psd(a: &ComplexMatrix, rel_eps: f64) -> Result<InvSqrtPsd, NumError> {
    let eig = herm_eig(a)?;
    let n = a.rows();
    let lmax = eig.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if let Some(&neg) = eig
        .values
        .iter()
        .find(|&&l| l < -NEGATIVE_EIG_TOL * lmax)
    {
        return Err(NumError::NegativeEigenvalue { value: neg });
    }
    let cutoff = rel_eps * lmax;
    let mut matrix = ComplexMatrix::zeros(n, n);
    let mut rank = 0;
    let mut dropped = Vec::new();
    for (k, &lambda) in eig.values.iter().enumerate() {
        if lmax == 0.0 || lambda <= cutoff {
            dropped.push(lambda);
            continue;
        }
        rank += 1;
        let w = 1.0 / lambda.sqrt();
        for i in 0..n {
            let vi = eig.vectors[(i, k)] * w;
            for j in 0..n {
                matrix[(i, j)] += vi * eig.vectors[(j, k)].conj();
            }
        }
    }
    Ok(InvSqrtPsd {
        matrix,
        rank,
        dim: n,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_svd_is_trivial() {
        let a = ComplexMatrix::from_real_diag(&[3.0, 1.0]);
        let r = svd(&a).unwrap();
        assert_eq!(r.sigma, vec![3.0, 1.0]);
        assert_eq!(r.u, ComplexMatrix::identity(2));
        assert_eq!(r.v, ComplexMatrix::identity(2));
    }

    #[test]
    fn zero_svd() {
        let r = svd(&ComplexMatrix::zeros(2, 2)).unwrap();
        assert_eq!(r.sigma, vec![0.0, 0.0]);
        assert!(r.u.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn unsorted_diagonal_is_sorted() {
        let a = ComplexMatrix::from_real_diag(&[1.0, 5.0, 2.0]);
        let r = svd(&a).unwrap();
        assert_eq!(r.sigma, vec![5.0, 2.0, 1.0]);
        assert!(r.reconstruct().max_abs_diff(&a) < 1e-15);
    }

    #[test]
    fn rank_one_svd_completes_u() {
        let x = [c(1.0, 0.5), c(-0.3, 2.0), c(0.0, 1.0)];
        let y = [c(0.2, 0.0), c(1.0, -1.0), c(0.5, 0.5)];
        let a = ComplexMatrix::outer(&x, &y);
        let r = svd(&a).unwrap();
        assert!(r.sigma[1] < 1e-14 * r.sigma[0]);
        let uhu = &r.u.adjoint() * &r.u;
        assert!(uhu.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-12);
        assert!(r.reconstruct().max_abs_diff(&a) < 1e-13);
    }

    #[test]
    fn svd_rejects_nonsquare_and_nonfinite() {
        assert!(matches!(
            svd(&ComplexMatrix::zeros(2, 3)),
            Err(NumError::NotSquare { rows: 2, cols: 3 })
        ));
        let mut a = ComplexMatrix::identity(2);
        a[(0, 1)] = c(f64::NAN, 0.0);
        assert_eq!(svd(&a).unwrap_err(), NumError::NonFinite);
    }

    #[test]
    fn herm_eig_diag_and_identity() {
        let e = herm_eig(&ComplexMatrix::from_real_diag(&[2.0, 5.0])).unwrap();
        assert_eq!(e.values, vec![5.0, 2.0]);
        let e = herm_eig(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn herm_eig_rejects_non_hermitian() {
        let a = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]]);
        assert!(matches!(herm_eig(&a), Err(NumError::NotHermitian { .. })));
    }

    #[test]
    fn herm_eig_two_by_two_complex() {
        // [[2, 1+i], [1-i, 3]] has eigenvalues (5 ± sqrt(9))/2 = 4, 1
        let a = ComplexMatrix::from_rows(&[vec![c(2.0, 0.0), c(1.0, 1.0)], vec![c(1.0, -1.0), c(3.0, 0.0)]]);
        let e = herm_eig(&a).unwrap();
        assert!((e.values[0] - 4.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        for k in 0..2 {
            let vk = e.vectors.column(k);
            let av = a.matvec(&vk).unwrap();
            for i in 0..2 {
                assert!((av[i] - vk[i] * e.values[k]).norm() < 1e-13);
            }
            // phase convention: first entry real nonnegative
            assert!(vk[0].im.abs() < 1e-15 && vk[0].re >= 0.0);
        }
    }

    #[test]
    fn inv_sqrt_identity_and_diag() {
        let b = inv_sqrt_psd(&ComplexMatrix::identity(3), 1e-12).unwrap();
        assert!(b.is_full_rank());
        assert!(b.matrix.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-15);
        let b = inv_sqrt_psd(&ComplexMatrix::from_real_diag(&[4.0, 9.0]), 1e-12).unwrap();
        assert!(b.matrix.max_abs_diff(&ComplexMatrix::from_real_diag(&[0.5, 1.0 / 3.0])) < 1e-15);
    }

    #[test]
    fn inv_sqrt_reports_rank_deficiency() {
        let a = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(1.0, 0.0)]]);
        let b = inv_sqrt_psd(&a, 1e-12).unwrap();
        assert_eq!(b.rank, 1);
        assert!(!b.is_full_rank());
        assert_eq!(b.dropped.len(), 1);
    }

    #[test]
    fn inv_sqrt_rejects_negative_eigenvalue() {
        let a = ComplexMatrix::from_real_diag(&[1.0, -0.5]);
        assert!(matches!(
            inv_sqrt_psd(&a, 1e-12),
            Err(NumError::NegativeEigenvalue { .. })
        ));
    }
}
