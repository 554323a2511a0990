use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::dense::{self, Matrix, C64};
use crate::error::{Result, ScrambleError};

/// Largest supported register: 12 qubits (dimension 4096).
pub const MAX_QUBITS: usize = 12;

/// Default tolerance for treating an operator as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// A dense complex square matrix acting on `n >= 1` qubits.
///
/// Qubit 0 is the leftmost tensor factor, i.e. the most significant bit of a
/// computational-basis index.
#[derive(Clone, PartialEq)]
pub struct Operator {
    mat: Matrix,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Operator(dim={}) {}", self.dim(), self.mat)
    }
}

impl Operator {
    pub fn new(mat: Matrix) -> Result<Self> {
        let (rows, cols) = mat.shape();
        if rows != cols || rows < 2 || !rows.is_power_of_two() || rows > 1 << MAX_QUBITS {
            return Err(ScrambleError::InvalidDimension { rows, cols });
        }
        Ok(Operator { mat })
    }

    /// Wraps a matrix already known to have a valid shape.
    pub(crate) fn from_matrix(mat: Matrix) -> Self {
        debug_assert!(mat.is_square() && mat.nrows().is_power_of_two() && mat.nrows() >= 2);
        Operator { mat }
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        Operator::new(Matrix::from_fn(dim, dim, f))
    }

    /// Row-major construction from nested rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            let cols = rows.first().map_or(0, Vec::len);
            return Err(ScrambleError::InvalidDimension { rows: d, cols });
        }
        Operator::new(Matrix::from_fn(d, d, |i, j| rows[i][j]))
    }

    pub fn identity(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        Operator::from_matrix(Matrix::identity(d, d))
    }

    pub fn zeros(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        Operator::from_matrix(Matrix::zeros(d, d))
    }

    pub fn diagonal(entries: &[C64]) -> Result<Self> {
        let d = entries.len();
        Operator::new(Matrix::from_fn(d, d, |i, j| if i == j { entries[i] } else { dense::ZERO }))
    }

    /// `|psi><psi|` for a state vector (not normalized here).
    pub fn projector(psi: &[C64]) -> Result<Self> {
        let d = psi.len();
        Operator::new(Matrix::from_fn(d, d, |i, j| psi[i] * psi[j].conj()))
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    pub fn into_matrix(self) -> Matrix {
        self.mat
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.mat[(row, col)]
    }

    /// Row-major copy of the entries.
    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.mat[(i, j)]).collect())
            .collect()
    }

    pub fn adjoint(&self) -> Operator {
        Operator::from_matrix(self.mat.adjoint())
    }

    pub fn trace(&self) -> C64 {
        dense::trace(&self.mat)
    }

    pub fn scale(&self, factor: C64) -> Operator {
        Operator::from_matrix(&self.mat * factor)
    }

    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        self.check_same_dim(other)?;
        Ok(Operator::from_matrix(dense::commutator(&self.mat, &other.mat)))
    }

    pub fn anticommutator(&self, other: &Operator) -> Result<Operator> {
        self.check_same_dim(other)?;
        let mut out = dense::matmul(&self.mat, &other.mat);
        dense::gemm(dense::ONE, &other.mat, dense::Op::N, &self.mat, dense::Op::N, dense::ONE, &mut out);
        Ok(Operator::from_matrix(out))
    }

    /// Largest entry of `|M - M^dagger|`.
    pub fn hermiticity_residual(&self) -> f64 {
        dense::hermiticity_residual(&self.mat)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() < tol
    }

    pub fn require_hermitian(&self, tol: f64) -> Result<()> {
        let residual = self.hermiticity_residual();
        if residual < tol * self.max_abs().max(1.0) {
            Ok(())
        } else {
            Err(ScrambleError::NotHermitian { residual })
        }
    }

    /// `(M + M^dagger) / 2`.
    pub fn hermitian_part(&self) -> Operator {
        Operator::from_matrix(dense::hermitize(&self.mat))
    }

    /// Largest deviation of `M^dagger M` from the identity.
    pub fn unitarity_residual(&self) -> f64 {
        let prod = dense::matmul_op(&self.mat, dense::Op::H, &self.mat, dense::Op::N);
        let id = Matrix::identity(self.dim(), self.dim());
        dense::max_abs(&(prod - id))
    }

    pub fn max_abs(&self) -> f64 {
        dense::max_abs(&self.mat)
    }

    pub fn frobenius_norm(&self) -> f64 {
        dense::frobenius_norm(&self.mat)
    }

    /// Hilbert-Schmidt inner product `tr(A^dagger B)`.
    pub fn hs_inner(&self, other: &Operator) -> C64 {
        dense::hs_inner(&self.mat, &other.mat)
    }

    /// Max-entry distance to another operator.
    pub fn distance(&self, other: &Operator) -> f64 {
        dense::max_abs(&(&self.mat - &other.mat))
    }

    pub fn check_same_dim(&self, other: &Operator) -> Result<()> {
        if self.dim() == other.dim() {
            Ok(())
        } else {
            Err(ScrambleError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            })
        }
    }

    pub fn matmul(&self, other: &Operator) -> Result<Operator> {
        self.check_same_dim(other)?;
        Ok(Operator::from_matrix(dense::matmul(&self.mat, &other.mat)))
    }

    /// `self * x * self^dagger`.
    pub fn conjugate(&self, x: &Operator) -> Operator {
        Operator::from_matrix(dense::conjugate(&self.mat, &x.mat))
    }

    /// `self^dagger * x * self`.
    pub fn conjugate_adj(&self, x: &Operator) -> Operator {
        Operator::from_matrix(dense::conjugate_adj(&self.mat, &x.mat))
    }
}

/// Kronecker product `a ⊗ b`; `a` occupies the leading (leftmost) qubits.
pub fn tensor_product(a: &Operator, b: &Operator) -> Operator {
    Operator::from_matrix(dense::kron(&a.mat, &b.mat))
}

/// Panics on a dimension mismatch; use [`Operator::matmul`] for the checked form.
impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimensions differ");
        Operator::from_matrix(dense::matmul(&self.mat, &rhs.mat))
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        Operator::from_matrix(&self.mat + &rhs.mat)
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        Operator::from_matrix(&self.mat - &rhs.mat)
    }
}

impl Neg for &Operator {
    type Output = Operator;

    fn neg(self) -> Operator {
        Operator::from_matrix(-&self.mat)
    }
}

impl Mul<C64> for &Operator {
    type Output = Operator;

    fn mul(self, rhs: C64) -> Operator {
        self.scale(rhs)
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;

    fn mul(self, rhs: f64) -> Operator {
        Operator::from_matrix(&self.mat * C64::new(rhs, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli::{Pauli, PauliString};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn rejects_non_power_of_two() {
        let err = Operator::new(Matrix::identity(3, 3)).unwrap_err();
        assert!(matches!(err, ScrambleError::InvalidDimension { rows: 3, cols: 3 }));
        assert!(Operator::new(Matrix::identity(1, 1)).is_err());
        assert!(Operator::new(Matrix::zeros(2, 4)).is_err());
    }

    #[test]
    fn identity_tensor_identity() {
        let id2 = Operator::identity(1);
        assert_eq!(tensor_product(&id2, &id2), Operator::identity(2));
    }

    #[test]
    fn x_tensor_identity_places_blocks_off_diagonal() {
        let x = Pauli::X.operator();
        let xi = tensor_product(&x, &Operator::identity(1));
        for i in 0..4 {
            for j in 0..4 {
                let expected = if (i ^ j) == 2 { c(1.0) } else { c(0.0) };
                assert_eq!(xi.get(i, j), expected, "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn mixed_product_property_on_fixed_matrices() {
        let m = |s: f64| {
            Operator::from_fn(2, |i, j| C64::new((s + i as f64).sin() * (j as f64 + 1.0), (s * j as f64).cos()))
                .unwrap()
        };
        let (a, b, cc, d) = (m(0.1), m(0.7), m(1.3), m(2.9));
        // direct oracle: (A⊗B)(C⊗D) entrywise vs AC⊗BD
        let lhs = &tensor_product(&a, &b) * &tensor_product(&cc, &d);
        let rhs = tensor_product(&(&a * &cc), &(&b * &d));
        assert!(lhs.distance(&rhs) < 1e-12);
    }

    #[test]
    fn commutator_of_paulis() {
        let x = PauliString::parse("X").unwrap().operator();
        let y = PauliString::parse("Y").unwrap().operator();
        let z = PauliString::parse("Z").unwrap().operator();
        let comm = x.commutator(&y).unwrap();
        assert!(comm.distance(&z.scale(C64::new(0.0, 2.0))) < 1e-14);
        let anti = x.anticommutator(&y).unwrap();
        assert!(anti.max_abs() < 1e-14);
    }
}
