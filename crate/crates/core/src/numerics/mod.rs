//! Dense real linear algebra, seeded randomness, and operation-count
//! instrumentation shared by all samplers.
//!
//! Scalars are `f64` throughout. The formulas admit complex amplitudes but
//! every experiment in this crate is real; complex support is a non-goal.

mod eig;
mod ledger;
mod matrix;
mod orth;
mod rng;

pub use eig::symmetric_eig;
pub(crate) use ledger::dot_counted;
pub use ledger::{FlopLedger, LedgerDelta};
pub use matrix::{Matrix, OrbitalMatrix, ORTHONORMALITY_TOL};
pub use orth::{orthonormalize_columns, random_orthonormal};
pub use rng::RngStream;

use thiserror::Error;

/// Determinant by Gaussian elimination with partial pivoting. Uncounted
/// (oracle/setup use only; the samplers never call this in their loops).
pub fn determinant(m: &Matrix) -> f64 {
    assert_eq!(m.rows(), m.cols(), "determinant needs a square matrix");
    let n = m.rows();
    let mut a = m.clone();
    let mut det = 1.0;
    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, a.at(r, col)))
            .max_by(|x, y| x.1.abs().partial_cmp(&y.1.abs()).unwrap())
            .unwrap();
        if pivot == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = a.at(col, j);
                a.set(col, j, a.at(pivot_row, j));
                a.set(pivot_row, j, tmp);
            }
            det = -det;
        }
        det *= a.at(col, col);
        for r in (col + 1)..n {
            let f = a.at(r, col) / a.at(col, col);
            for j in col..n {
                a.set(r, j, a.at(r, j) - f * a.at(col, j));
            }
        }
    }
    det
}

/// Errors from the dense linear-algebra layer.
#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("matrix is not symmetric (max asymmetry {max_asym:.3e})")]
    NotSymmetric { max_asym: f64 },
    #[error("Jacobi eigensolver did not converge in {0} sweeps")]
    NoConvergence(usize),
    #[error("columns are not orthonormal (max |U^T U - I| = {deviation:.3e})")]
    NotOrthonormal { deviation: f64 },
    #[error("rank-deficient input: column {col} has no component outside the span of earlier columns")]
    RankDeficient { col: usize },
    #[error("matrix file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
