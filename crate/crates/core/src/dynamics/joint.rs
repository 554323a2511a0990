//! System + environment model: one environment qubit per system qubit,
//! coupled by `Z⊗Z` (pure dephasing, no energy exchange through the coupling),
//! with the environment starting at infinite temperature.

use crate::error::{Result, ScrambleError};
use crate::linalg::dense::C64;
use crate::linalg::operator::{tensor_product, Operator, HERMITIAN_TOL, MAX_QUBITS};
use crate::linalg::pauli::{Pauli, PauliString};
use crate::linalg::spectrum::{eig_hermitian, Spectrum};
use crate::linalg::state::{DensityMatrix, SubsystemMask};

/// System qubits occupy indices `0..n_sys`, environment qubits
/// `n_sys..n_sys + n_env`; environment qubit `k` mirrors system qubit `k`.
#[derive(Clone, Debug)]
pub struct JointModel {
    n_sys: usize,
    n_env: usize,
    joint_hamiltonian: Operator,
    env_equilibrium: DensityMatrix,
    spectrum: Spectrum,
}

impl JointModel {
    pub fn n_sys(&self) -> usize {
        self.n_sys
    }

    pub fn n_env(&self) -> usize {
        self.n_env
    }

    pub fn joint_hamiltonian(&self) -> &Operator {
        &self.joint_hamiltonian
    }

    pub fn env_equilibrium(&self) -> &DensityMatrix {
        &self.env_equilibrium
    }

    pub fn system_mask(&self) -> SubsystemMask {
        SubsystemMask::range(0, self.n_sys).expect("n_sys >= 1")
    }

    pub fn environment_mask(&self) -> SubsystemMask {
        SubsystemMask::range(self.n_sys, self.n_sys + self.n_env).expect("n_env >= 1")
    }

    /// `ρ_sys ⊗ ρ_env^eq`.
    pub fn initial_state(&self, rho_sys: &DensityMatrix) -> Result<DensityMatrix> {
        if rho_sys.n_qubits() != self.n_sys {
            return Err(ScrambleError::DimensionMismatch {
                expected: 1 << self.n_sys,
                found: rho_sys.dim(),
            });
        }
        Ok(DensityMatrix::from_hermitized(tensor_product(
            rho_sys.operator(),
            self.env_equilibrium.operator(),
        )))
    }
}

/// `H_sys⊗I + γ Σ_k Z_k^{sys} Z_k^{env}` with `ρ_env^eq = (I/2)^{⊗n_sys}`.
pub fn build_joint_dephasing_model(n_sys: usize, h_sys: &Operator, gamma: f64) -> Result<JointModel> {
    if n_sys < 2 {
        return Err(ScrambleError::InvalidModel(format!(
            "joint model needs at least 2 system qubits, got {n_sys}"
        )));
    }
    if 2 * n_sys > MAX_QUBITS {
        return Err(ScrambleError::InvalidModel(format!(
            "joint model on {} qubits exceeds the {MAX_QUBITS}-qubit limit",
            2 * n_sys
        )));
    }
    if h_sys.n_qubits() != n_sys {
        return Err(ScrambleError::DimensionMismatch {
            expected: 1 << n_sys,
            found: h_sys.dim(),
        });
    }
    if !gamma.is_finite() {
        return Err(ScrambleError::InvalidModel(format!("coupling must be finite, got {gamma}")));
    }
    h_sys.require_hermitian(HERMITIAN_TOL)?;
    let n = 2 * n_sys;
    let mut h = tensor_product(h_sys, &Operator::identity(n_sys)).into_matrix();
    for k in 0..n_sys {
        let mut letters = vec![Pauli::I; n];
        letters[k] = Pauli::Z;
        letters[n_sys + k] = Pauli::Z;
        PauliString::new(letters)?.accumulate_into(C64::new(gamma, 0.0), &mut h);
    }
    let joint_hamiltonian = Operator::new(h)?;
    let spectrum = eig_hermitian(&joint_hamiltonian)?;
    Ok(JointModel {
        n_sys,
        n_env: n_sys,
        joint_hamiltonian,
        env_equilibrium: DensityMatrix::maximally_mixed(n_sys),
        spectrum,
    })
}

/// Joint state at time `t` starting from `ρ_sys ⊗ ρ_env^eq`.
pub fn evolve_joint(model: &JointModel, rho_sys: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    let initial = model.initial_state(rho_sys)?;
    if t == 0.0 {
        return Ok(initial);
    }
    let u = model.spectrum.propagator(t);
    Ok(DensityMatrix::from_hermitized(u.conjugate(initial.operator())))
}
