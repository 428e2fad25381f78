//! Dense complex linear algebra for the small (NB×NB) matrices of the link model.

mod decomp;
mod matrix;

pub use decomp::{
    herm_eig, inv_sqrt_psd, svd, HermEig, InvSqrtPsd, SvdResult, HERMITIAN_TOL, MAX_SWEEPS,
    NEGATIVE_EIG_TOL, OFF_DIAGONAL_TOL,
};
pub use matrix::{frobenius_norm_sq, kron, ComplexMatrix};

/// Default relative cutoff for rank decisions.
pub const DEFAULT_RANK_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumError {
    #[error("matrix dimensions overflow usize")]
    DimensionOverflow,
    #[error("{op}: incompatible shapes {left:?} and {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (relative defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("matrix has a negative eigenvalue {value:e}")]
    NegativeEigenvalue { value: f64 },
    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("non-finite matrix entry")]
    NonFinite,
}
