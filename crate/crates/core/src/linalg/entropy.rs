//! Von Neumann and relative entropies, in nats.

use super::dense::{self, Op};
use super::spectrum::eig_hermitian_matrix;
use super::state::DensityMatrix;
use crate::error::Result;

/// Eigenvalues below this are treated as exact zeros before taking logs.
pub const EIGEN_CLIP: f64 = 1e-12;

/// Populations of `rho` outside the support of `sigma` above this make the
/// relative entropy infinite.
pub const SUPPORT_TOL: f64 = 1e-10;

/// `-Σ λ ln λ` with `0 ln 0 = 0`.
pub fn entropy_of_eigenvalues(eigenvalues: impl IntoIterator<Item = f64>) -> f64 {
    -eigenvalues
        .into_iter()
        .filter(|&l| l > EIGEN_CLIP)
        .map(|l| l * l.ln())
        .sum::<f64>()
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let eig = rho.matrix().clone().symmetric_eigenvalues();
    entropy_of_eigenvalues(eig.iter().copied()).max(0.0)
}

/// `tr[rho (ln rho - ln sigma)]`.
///
/// Returns `f64::INFINITY` when `rho` has weight outside the support of `sigma`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    rho.operator().check_same_dim(sigma.operator())?;
    let neg_entropy = -von_neumann_entropy(rho);
    let spec = eig_hermitian_matrix(&dense::hermitize(sigma.matrix()));
    let v = spec.eigenvectors();
    // populations of rho in sigma's eigenbasis
    let rotated = dense::matmul(&dense::matmul_op(v, Op::H, rho.matrix(), Op::N), v);
    let mut cross = 0.0;
    for (j, &mu) in spec.eigenvalues().iter().enumerate() {
        let p = rotated[(j, j)].re;
        if mu <= EIGEN_CLIP {
            if p > SUPPORT_TOL {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        cross += p * mu.ln();
    }
    Ok((neg_entropy - cross).max(0.0))
}
