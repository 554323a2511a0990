use serde::{Deserialize, Serialize};

use super::dense::{self, Matrix, C64};
use super::operator::Operator;
use crate::error::{Result, ScrambleError};

pub const TRACE_TOL: f64 = 1e-9;
pub const STATE_HERMITIAN_TOL: f64 = 1e-12;
pub const MIN_EIGENVALUE_TOL: f64 = -1e-9;

/// Sorted, distinct qubit indices naming a subsystem.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct SubsystemMask {
    indices: Vec<usize>,
}

impl SubsystemMask {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(ScrambleError::InvalidMask("mask is empty".into()));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ScrambleError::InvalidMask(format!(
                "indices {indices:?} are not strictly increasing"
            )));
        }
        Ok(SubsystemMask { indices })
    }

    /// Sorts and deduplicates before validating.
    pub fn from_unsorted(mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        SubsystemMask::new(indices)
    }

    pub fn single(index: usize) -> Self {
        SubsystemMask { indices: vec![index] }
    }

    pub fn range(start: usize, end: usize) -> Result<Self> {
        SubsystemMask::new((start..end).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, q: usize) -> bool {
        self.indices.binary_search(&q).is_ok()
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        match self.indices.last() {
            Some(&last) if last >= n_qubits => Err(ScrambleError::IndexOutOfRange {
                index: last,
                n_qubits,
            }),
            _ => Ok(()),
        }
    }

    /// Qubits of an `n`-qubit register not in this mask; `None` when empty.
    pub fn complement(&self, n_qubits: usize) -> Option<SubsystemMask> {
        let rest: Vec<usize> = (0..n_qubits).filter(|q| !self.contains(*q)).collect();
        SubsystemMask::new(rest).ok()
    }

    pub fn union(&self, other: &SubsystemMask) -> SubsystemMask {
        let mut all = self.indices.clone();
        all.extend_from_slice(&other.indices);
        SubsystemMask::from_unsorted(all).expect("union of non-empty masks is non-empty")
    }

    /// Errors naming the first shared qubit.
    pub fn check_disjoint(&self, other: &SubsystemMask) -> Result<()> {
        match self.indices.iter().find(|q| other.contains(**q)) {
            Some(&q) => Err(ScrambleError::OverlappingSubsystems(q)),
            None => Ok(()),
        }
    }
}

impl TryFrom<Vec<usize>> for SubsystemMask {
    type Error = ScrambleError;

    fn try_from(value: Vec<usize>) -> Result<Self> {
        SubsystemMask::new(value)
    }
}

impl From<SubsystemMask> for Vec<usize> {
    fn from(mask: SubsystemMask) -> Self {
        mask.indices
    }
}

/// Partial trace of an arbitrary operator onto the kept qubits.
pub fn partial_trace_operator(op: &Operator, keep: &SubsystemMask) -> Result<Operator> {
    let n = op.n_qubits();
    keep.validate(n)?;
    if keep.len() == n {
        return Ok(op.clone());
    }
    let k = keep.len();
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(*q)).collect();
    let offsets = |qubits: &[usize]| -> Vec<usize> {
        let m = qubits.len();
        (0..1usize << m)
            .map(|r| {
                qubits
                    .iter()
                    .enumerate()
                    .filter(|(p, _)| (r >> (m - 1 - p)) & 1 == 1)
                    .fold(0, |acc, (_, &q)| acc | 1 << (n - 1 - q))
            })
            .collect()
    };
    let kept_off = offsets(keep.indices());
    let traced_off = offsets(&traced);
    let m = op.matrix();
    let dk = 1usize << k;
    let out = Matrix::from_fn(dk, dk, |r1, r2| {
        traced_off
            .iter()
            .map(|&s| m[(kept_off[r1] | s, kept_off[r2] | s)])
            .sum::<C64>()
    });
    Ok(Operator::from_matrix(out))
}

/// A Hermitian, unit-trace, positive-semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    op: Operator,
}

impl DensityMatrix {
    /// Validates trace, Hermiticity and positivity.
    pub fn new(op: Operator) -> Result<Self> {
        let tr = op.trace();
        if (tr - dense::ONE).norm() > TRACE_TOL {
            return Err(ScrambleError::InvalidState(format!("trace is {tr}")));
        }
        let residual = op.hermiticity_residual();
        if residual > STATE_HERMITIAN_TOL {
            return Err(ScrambleError::InvalidState(format!(
                "not Hermitian (residual {residual:.3e})"
            )));
        }
        let min = op.matrix().clone().symmetric_eigenvalues().min();
        if min < MIN_EIGENVALUE_TOL {
            return Err(ScrambleError::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(DensityMatrix { op })
    }

    /// Symmetrizes before wrapping; for outputs of trusted propagators.
    pub(crate) fn from_hermitized(op: Operator) -> Self {
        DensityMatrix {
            op: op.hermitian_part(),
        }
    }

    /// `|psi><psi|` for a vector normalized here.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(ScrambleError::InvalidState("zero state vector".into()));
        }
        let scaled: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Ok(DensityMatrix::from_hermitized(Operator::projector(&scaled)?))
    }

    /// `|b><b|` for a computational basis index.
    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self> {
        let d = 1usize << n_qubits;
        if index >= d {
            return Err(ScrambleError::IndexOutOfRange {
                index,
                n_qubits,
            });
        }
        let mut m = Matrix::zeros(d, d);
        m[(index, index)] = dense::ONE;
        Ok(DensityMatrix {
            op: Operator::new(m)?,
        })
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        DensityMatrix {
            op: Operator::identity(n_qubits).scale(C64::new(1.0 / d as f64, 0.0)),
        }
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn matrix(&self) -> &Matrix {
        self.op.matrix()
    }

    pub fn into_operator(self) -> Operator {
        self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn n_qubits(&self) -> usize {
        self.op.n_qubits()
    }

    pub fn trace(&self) -> f64 {
        self.op.trace().re
    }

    pub fn purity(&self) -> f64 {
        dense::hs_inner(self.matrix(), self.matrix()).re
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.matrix().clone().symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// `tr(rho O)`.
    pub fn expectation(&self, obs: &Operator) -> Result<C64> {
        self.op.check_same_dim(obs)?;
        Ok(dense::trace_of_product(self.matrix(), obs.matrix()))
    }
}

/// Reduced state on the kept qubits.
pub fn partial_trace(rho: &DensityMatrix, keep: &SubsystemMask) -> Result<DensityMatrix> {
    let reduced = partial_trace_operator(rho.operator(), keep)?;
    Ok(DensityMatrix::from_hermitized(reduced))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::operator::tensor_product;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn bell() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::pure(&[r(s), r(0.0), r(0.0), r(s)]).unwrap()
    }

    #[test]
    fn mask_validation() {
        assert!(SubsystemMask::new(vec![]).is_err());
        assert!(SubsystemMask::new(vec![1, 1]).is_err());
        assert!(SubsystemMask::new(vec![2, 1]).is_err());
        let m = SubsystemMask::new(vec![0, 3]).unwrap();
        assert!(m.validate(4).is_ok());
        assert!(matches!(
            m.validate(3),
            Err(ScrambleError::IndexOutOfRange { index: 3, n_qubits: 3 })
        ));
        assert_eq!(m.complement(4).unwrap().indices(), &[1, 2]);
        assert!(m.check_disjoint(&SubsystemMask::new(vec![1, 2]).unwrap()).is_ok());
        assert!(matches!(
            m.check_disjoint(&SubsystemMask::new(vec![3]).unwrap()),
            Err(ScrambleError::OverlappingSubsystems(3))
        ));
    }

    #[test]
    fn bell_reduces_to_maximally_mixed() {
        let reduced = partial_trace(&bell(), &SubsystemMask::single(0)).unwrap();
        assert!(reduced.operator().distance(DensityMatrix::maximally_mixed(1).operator()) < 1e-14);
    }

    #[test]
    fn product_state_reduces_to_factor() {
        let a = DensityMatrix::new(
            Operator::from_rows(&[vec![r(0.7), C64::new(0.1, 0.2)], vec![C64::new(0.1, -0.2), r(0.3)]]).unwrap(),
        )
        .unwrap();
        let b = DensityMatrix::basis_state(2, 2).unwrap();
        let joint = DensityMatrix::new(tensor_product(a.operator(), b.operator())).unwrap();
        let ra = partial_trace(&joint, &SubsystemMask::single(0)).unwrap();
        assert!(ra.operator().distance(a.operator()) < 1e-14);
        let rb = partial_trace(&joint, &SubsystemMask::new(vec![1, 2]).unwrap()).unwrap();
        assert!(rb.operator().distance(b.operator()) < 1e-14);
    }

    #[test]
    fn ghz_keep_first_two() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut psi = vec![r(0.0); 8];
        psi[0] = r(s);
        psi[7] = r(s);
        let ghz = DensityMatrix::pure(&psi).unwrap();
        let reduced = partial_trace(&ghz, &SubsystemMask::new(vec![0, 1]).unwrap()).unwrap();
        // explicit sum over the traced bit: only |000><000| and |111><111| survive
        let mut expected = Matrix::zeros(4, 4);
        for (full, red) in [(0usize, 0usize), (7, 3)] {
            for traced_bit in 0..2 {
                if full & 1 == traced_bit {
                    expected[(red, red)] += r(0.5);
                }
            }
        }
        assert!(dense::max_abs(&(reduced.matrix() - expected)) < 1e-14);
    }

    #[test]
    fn keeps_non_contiguous_qubits_in_order() {
        // |q0 q1 q2> = |1 0 1>: keeping {0, 2} leaves |11>
        let rho = DensityMatrix::basis_state(3, 0b101).unwrap();
        let kept = partial_trace(&rho, &SubsystemMask::new(vec![0, 2]).unwrap()).unwrap();
        assert!(kept.operator().distance(DensityMatrix::basis_state(2, 0b11).unwrap().operator()) < 1e-15);
        let kept = partial_trace(&rho, &SubsystemMask::single(1)).unwrap();
        assert!(kept.operator().distance(DensityMatrix::basis_state(1, 0).unwrap().operator()) < 1e-15);
    }

    #[test]
    fn out_of_range_keep_is_rejected() {
        assert!(partial_trace(&bell(), &SubsystemMask::single(2)).is_err());
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(Operator::identity(1)).is_err());
        let neg = Operator::diagonal(&[r(1.5), r(-0.5)]).unwrap();
        assert!(DensityMatrix::new(neg).is_err());
        let non_herm = Operator::from_rows(&[vec![r(0.5), r(0.1)], vec![r(0.0), r(0.5)]]).unwrap();
        assert!(DensityMatrix::new(non_herm).is_err());
    }
}
