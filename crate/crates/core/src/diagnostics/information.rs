//! Mutual information, its OTOC bound, and tripartite mutual information.

use serde::{Deserialize, Serialize};

use super::pauli_average::{pauli_averaged_otoc_series, PauliAverageOptions};
use crate::error::{Result, ScrambleError};
use crate::linalg::entropy::von_neumann_entropy;
use crate::linalg::dense::{self, Matrix, C64};
use crate::linalg::operator::{Operator, MAX_QUBITS};
use crate::linalg::spectrum::eig_hermitian;
use crate::linalg::state::{partial_trace, DensityMatrix, SubsystemMask};

/// `S(ρ_S)` for the reduced state on `mask`.
pub fn subsystem_entropy(rho: &DensityMatrix, mask: &SubsystemMask) -> Result<f64> {
    if mask.len() == rho.n_qubits() {
        return Ok(von_neumann_entropy(rho));
    }
    Ok(von_neumann_entropy(&partial_trace(rho, mask)?))
}

/// `ℐ(A:B) = S_A + S_B - S_AB` in nats. `A ∪ B` need not cover the register;
/// the remaining qubits are traced out.
pub fn mutual_information(rho: &DensityMatrix, part_a: &SubsystemMask, part_b: &SubsystemMask) -> Result<f64> {
    let n = rho.n_qubits();
    part_a.validate(n)?;
    part_b.validate(n)?;
    part_a.check_disjoint(part_b)?;
    let s_a = subsystem_entropy(rho, part_a)?;
    let s_b = subsystem_entropy(rho, part_b)?;
    let s_ab = subsystem_entropy(rho, &part_a.union(part_b))?;
    Ok((s_a + s_b - s_ab).max(0.0))
}

/// `ℐ(A:B) + ℐ(A:C) - ℐ(A:BC)`; negative values signal scrambling.
pub fn tripartite_mutual_information(
    rho: &DensityMatrix,
    a: &SubsystemMask,
    b: &SubsystemMask,
    c: &SubsystemMask,
) -> Result<f64> {
    b.check_disjoint(c)?;
    Ok(mutual_information(rho, a, b)? + mutual_information(rho, a, c)? - mutual_information(rho, a, &b.union(c))?)
}

/// Deviation of `U†U` from the identity tolerated by [`operator_state`].
pub const UNITARITY_TOL: f64 = 1e-10;

/// Normalized operator state `|U⟩⟩ = (I ⊗ U)|Φ⁺⟩` of an `n`-qubit unitary, a
/// pure state on `2n` qubits: qubits `0..n` are the inputs, `n..2n` the
/// outputs. Correlations between input and output regions of this state
/// measure how `U` spreads information; in particular the tripartite
/// information between one input region and a split of the outputs is
/// negative for scrambling unitaries. (For a pure state on `A ∪ B ∪ C` the
/// tripartite information vanishes identically, so it must be evaluated on
/// this state rather than on `U|ψ⟩`.)
pub fn operator_state(u: &Matrix) -> Result<DensityMatrix> {
    let d = u.nrows();
    if !u.is_square() || d < 2 || !d.is_power_of_two() || 2 * d.trailing_zeros() as usize > MAX_QUBITS {
        return Err(ScrambleError::InvalidDimension {
            rows: u.nrows(),
            cols: u.ncols(),
        });
    }
    let residual = (dense::matmul_op(u, dense::Op::H, u, dense::Op::N) - Matrix::identity(d, d)).camax();
    if residual > UNITARITY_TOL {
        return Err(ScrambleError::ContractViolation(format!(
            "operator is not unitary (max |U†U - I| = {residual:.3e})"
        )));
    }
    let norm = (d as f64).sqrt();
    let psi: Vec<C64> = (0..d * d).map(|k| u[(k % d, k / d)] / norm).collect();
    DensityMatrix::pure(&psi)
}

/// Both sides of the mutual-information / OTOC bound at one time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundSample {
    pub time: f64,
    pub mutual_info: f64,
    pub otoc: f64,
    /// `ℐ(t) - [Ō(0) - Ō(t)]`.
    pub residual: f64,
}

fn check_bipartition(n: usize, a: &SubsystemMask, b: &SubsystemMask) -> Result<()> {
    a.validate(n)?;
    b.validate(n)?;
    a.check_disjoint(b)?;
    if a.len() + b.len() != n {
        return Err(ScrambleError::InvalidMask(format!(
            "A = {:?} and B = {:?} must together cover all {n} qubits",
            a.indices(),
            b.indices()
        )));
    }
    Ok(())
}

/// `ℐ(t) - [Ō(0) - Ō(t)]` under closed evolution from `rho0`, with the
/// Pauli average including identity strings.
pub fn bound_residual(
    rho0: &DensityMatrix,
    part_a: &SubsystemMask,
    part_b: &SubsystemMask,
    h: &Operator,
    t: f64,
) -> Result<f64> {
    Ok(bound_series(rho0, part_a, part_b, h, &[t], &PauliAverageOptions::default())?[0].residual)
}

/// Bound samples on a time grid; `Ō` is evaluated with `opts`.
pub fn bound_series(
    rho0: &DensityMatrix,
    part_a: &SubsystemMask,
    part_b: &SubsystemMask,
    h: &Operator,
    times: &[f64],
    opts: &PauliAverageOptions,
) -> Result<Vec<BoundSample>> {
    check_bipartition(rho0.n_qubits(), part_a, part_b)?;
    rho0.operator().check_same_dim(h)?;
    let mut grid = Vec::with_capacity(times.len() + 1);
    grid.push(0.0);
    grid.extend_from_slice(times);
    let otocs = pauli_averaged_otoc_series(rho0, part_a, part_b, h, &grid, opts)?;
    let o0 = otocs[0].value;
    let spectrum = eig_hermitian(h)?;
    times
        .iter()
        .zip(&otocs[1..])
        .map(|(&time, o)| {
            let u = spectrum.propagator(time);
            let rho_t = DensityMatrix::from_hermitized(u.conjugate(rho0.operator()));
            let mi = mutual_information(&rho_t, part_a, part_b)?;
            Ok(BoundSample {
                time,
                mutual_info: mi,
                otoc: o.value,
                residual: mi - (o0 - o.value),
            })
        })
        .collect()
}
