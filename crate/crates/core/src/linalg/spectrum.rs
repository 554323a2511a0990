use nalgebra::linalg::SymmetricEigen;

use super::dense::{self, Matrix, Op, C64};
use super::operator::{Operator, HERMITIAN_TOL};
use crate::error::Result;

/// Eigen-decomposition `H = U diag(λ) U^dagger` of a Hermitian operator.
#[derive(Clone, Debug)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: Matrix,
}

impl Spectrum {
    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unitary whose columns are the eigenvectors.
    pub fn eigenvectors(&self) -> &Matrix {
        &self.eigenvectors
    }

    pub fn eigenvector_operator(&self) -> Operator {
        Operator::from_matrix(self.eigenvectors.clone())
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Largest |λ|, the spectral norm.
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0f64, |a, l| a.max(l.abs()))
    }

    /// `U diag(f(λ)) U^dagger`.
    pub fn map(&self, f: impl Fn(f64) -> C64) -> Matrix {
        let mut scaled = self.eigenvectors.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let factor = f(lambda);
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= factor);
        }
        dense::matmul_op(&scaled, Op::N, &self.eigenvectors, Op::H)
    }

    /// `e^{-iHt}`.
    pub fn propagator(&self, t: f64) -> Operator {
        Operator::from_matrix(self.map(|lambda| C64::from_polar(1.0, -lambda * t)))
    }

    pub fn reconstruct(&self) -> Operator {
        Operator::from_matrix(self.map(|lambda| C64::new(lambda, 0.0)))
    }

    /// Relative Frobenius error of `U diag(λ) U^dagger` against `h`.
    pub fn reconstruction_error(&self, h: &Operator) -> f64 {
        let diff = self.reconstruct().matrix() - h.matrix();
        dense::frobenius_norm(&diff) / h.frobenius_norm().max(f64::MIN_POSITIVE)
    }

    /// Groups of eigenvector indices whose eigenvalues agree within `tol`
    /// (consecutive in the ascending order).
    pub fn degenerate_groups(&self, tol: f64) -> Vec<Vec<usize>> {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (i, &lambda) in self.eigenvalues.iter().enumerate() {
            match groups.last_mut() {
                Some(g) if (lambda - self.eigenvalues[g[0]]).abs() <= tol => g.push(i),
                _ => groups.push(vec![i]),
            }
        }
        groups
    }
}

/// Hermitian eigendecomposition with ascending eigenvalues.
pub fn eig_hermitian(h: &Operator) -> Result<Spectrum> {
    h.require_hermitian(HERMITIAN_TOL)?;
    Ok(eig_hermitian_matrix(&dense::hermitize(h.matrix())))
}

/// Decomposes a matrix the caller knows to be Hermitian.
pub(crate) fn eig_hermitian_matrix(m: &Matrix) -> Spectrum {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = Matrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    Spectrum {
        eigenvalues,
        eigenvectors,
    }
}

/// `e^{-iht}` through the eigendecomposition of `h`.
pub fn unitary_exp(h: &Operator, t: f64) -> Result<Operator> {
    Ok(eig_hermitian(h)?.propagator(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli::Pauli;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn random_hermitian(d: usize, seed: u64) -> Operator {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = Matrix::from_fn(d, d, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        Operator::new(dense::hermitize(&g)).unwrap()
    }

    #[test]
    fn z_spectrum() {
        let s = eig_hermitian(&Pauli::Z.operator()).unwrap();
        assert_eq!(s.eigenvalues().len(), 2);
        assert!((s.eigenvalues()[0] + 1.0).abs() < 1e-14);
        assert!((s.eigenvalues()[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn x_eigenvectors_are_plus_minus() {
        let s = eig_hermitian(&Pauli::X.operator()).unwrap();
        assert!((s.eigenvalues()[0] + 1.0).abs() < 1e-14);
        let v = s.eigenvectors();
        // eigenvector for -1 is (|0> - |1>)/√2 up to a global phase
        let overlap = (v[(0, 0)] * FRAC_1_SQRT_2 - v[(1, 0)] * FRAC_1_SQRT_2).norm();
        assert!((overlap - 1.0).abs() < 1e-12);
        let overlap = (v[(0, 1)] * FRAC_1_SQRT_2 + v[(1, 1)] * FRAC_1_SQRT_2).norm();
        assert!((overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_reconstruction() {
        let h = random_hermitian(8, 3);
        let s = eig_hermitian(&h).unwrap();
        assert!(s.reconstruction_error(&h) < 1e-10);
        assert!(s.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
        assert!(s.eigenvector_operator().unitarity_residual() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = Operator::from_rows(&[
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
        ])
        .unwrap();
        assert!(eig_hermitian(&m).is_err());
        assert!(unitary_exp(&m, 1.0).is_err());
    }

    #[test]
    fn z_exponential_is_diagonal_phases() {
        let u = unitary_exp(&Pauli::Z.operator(), PI / 2.0).unwrap();
        assert!((u.get(0, 0) - C64::from_polar(1.0, -PI / 2.0)).norm() < 1e-14);
        assert!((u.get(1, 1) - C64::from_polar(1.0, PI / 2.0)).norm() < 1e-14);
        assert!(u.get(0, 1).norm() < 1e-14);
    }

    #[test]
    fn zero_time_is_identity() {
        let h = random_hermitian(4, 9);
        assert!(unitary_exp(&h, 0.0).unwrap().distance(&Operator::identity(2)) < 1e-13);
    }

    #[test]
    fn x_exponential_matches_rotation_formula() {
        let x = Pauli::X.operator();
        for &t in &[0.3, 1.1, 2.7, -0.8] {
            let u = unitary_exp(&x, t).unwrap();
            let expected = &(&Operator::identity(1) * t.cos()) - &x.scale(C64::new(0.0, t.sin()));
            assert!(u.distance(&expected) < 1e-13, "t = {t}");
        }
    }

    #[test]
    fn degenerate_grouping() {
        let h = Operator::diagonal(&[C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)])
            .unwrap();
        let groups = eig_hermitian(&h).unwrap().degenerate_groups(1e-9);
        assert_eq!(groups, vec![vec![0], vec![1], vec![2, 3]]);
    }
}
