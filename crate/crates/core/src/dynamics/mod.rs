//! Closed and open (Lindblad) propagation, the adjoint channel, and an explicit
//! system + environment dephasing model.

mod joint;
mod propagator;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ScrambleError};
use crate::linalg::dense::{self, Matrix, C64, I, ONE};
use crate::linalg::operator::{Operator, HERMITIAN_TOL};
use crate::linalg::pauli::{Pauli, PauliString};
use crate::linalg::spectrum::{eig_hermitian, unitary_exp};
use crate::linalg::state::DensityMatrix;

pub use joint::{build_joint_dephasing_model, evolve_joint, JointModel};
pub use propagator::{LindbladPropagator, Picture, Strategy};

/// Eigenvalues closer than this are treated as one energy level.
pub const ENERGY_GROUPING_TOL: f64 = 1e-9;

/// Largest Hilbert-space dimension for which the dense Liouvillian is built.
pub const MAX_LIOUVILLIAN_DIM: usize = 64;

/// Basis in which the environment destroys coherences.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoherenceBasis {
    Computational,
    Energy,
}

impl DecoherenceBasis {
    pub fn as_str(self) -> &'static str {
        match self {
            DecoherenceBasis::Computational => "computational",
            DecoherenceBasis::Energy => "energy",
        }
    }
}

impl std::fmt::Display for DecoherenceBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for DecoherenceBasis {
    type Err = ScrambleError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "computational" => Ok(DecoherenceBasis::Computational),
            "energy" => Ok(DecoherenceBasis::Energy),
            other => Err(ScrambleError::config(
                "basis",
                format!("expected `computational` or `energy`, got `{other}`"),
            )),
        }
    }
}

/// Jump operators used for computational-basis dephasing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComputationalJumps {
    /// One `σ_z` per qubit.
    #[default]
    LocalZ,
    /// Projectors onto every computational basis state.
    Projectors,
}

/// Hamiltonian, jump operators and coupling strength of a Lindblad generator.
#[derive(Clone, Debug)]
pub struct LindbladSpec {
    hamiltonian: Operator,
    jump_ops: Vec<Operator>,
    gamma: f64,
}

impl LindbladSpec {
    pub fn new(hamiltonian: Operator, jump_ops: Vec<Operator>, gamma: f64) -> Result<Self> {
        hamiltonian.require_hermitian(HERMITIAN_TOL)?;
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(ScrambleError::InvalidModel(format!(
                "dephasing strength must be finite and non-negative, got {gamma}"
            )));
        }
        for l in &jump_ops {
            hamiltonian.check_same_dim(l)?;
        }
        Ok(LindbladSpec {
            hamiltonian,
            jump_ops,
            gamma,
        })
    }

    /// Closed dynamics.
    pub fn unitary(hamiltonian: Operator) -> Result<Self> {
        Self::new(hamiltonian, Vec::new(), 0.0)
    }

    /// Dephasing in `basis` with the default (local `σ_z`) computational jumps.
    pub fn dephasing(hamiltonian: Operator, basis: DecoherenceBasis, gamma: f64) -> Result<Self> {
        Self::dephasing_with(hamiltonian, basis, ComputationalJumps::LocalZ, gamma)
    }

    pub fn dephasing_with(
        hamiltonian: Operator,
        basis: DecoherenceBasis,
        jumps: ComputationalJumps,
        gamma: f64,
    ) -> Result<Self> {
        let n = hamiltonian.n_qubits();
        let ops = match (basis, jumps) {
            (DecoherenceBasis::Computational, ComputationalJumps::Projectors) => computational_projector_jumps(n),
            _ => dephasing_jumps(basis, &hamiltonian, n)?,
        };
        Self::new(hamiltonian, ops, gamma)
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn jump_ops(&self) -> &[Operator] {
        &self.jump_ops
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn n_qubits(&self) -> usize {
        self.hamiltonian.n_qubits()
    }
}

/// `e^{-iht} ρ e^{iht}`.
pub fn evolve_unitary(rho: &DensityMatrix, h: &Operator, t: f64) -> Result<DensityMatrix> {
    rho.operator().check_same_dim(h)?;
    let u = unitary_exp(h, t)?;
    Ok(DensityMatrix::from_hermitized(u.conjugate(rho.operator())))
}

/// Jump operators for dephasing in `basis`.
///
/// Computational: `σ_z` on each qubit. Energy: projectors onto the distinct
/// eigenvalues of `h` (eigenvalues within [`ENERGY_GROUPING_TOL`] share a
/// projector).
pub fn dephasing_jumps(basis: DecoherenceBasis, h: &Operator, n_qubits: usize) -> Result<Vec<Operator>> {
    if h.n_qubits() != n_qubits {
        return Err(ScrambleError::DimensionMismatch {
            expected: 1 << n_qubits,
            found: h.dim(),
        });
    }
    match basis {
        DecoherenceBasis::Computational => Ok((0..n_qubits)
            .map(|k| {
                let mut letters = vec![Pauli::I; n_qubits];
                letters[k] = Pauli::Z;
                PauliString::new(letters).expect("non-empty").operator()
            })
            .collect()),
        DecoherenceBasis::Energy => {
            let spectrum = eig_hermitian(h)?;
            let v = spectrum.eigenvectors();
            Ok(spectrum
                .degenerate_groups(ENERGY_GROUPING_TOL)
                .into_iter()
                .map(|group| {
                    let mut p = Matrix::zeros(h.dim(), h.dim());
                    for &j in &group {
                        let col = v.column(j);
                        p += &col * col.adjoint();
                    }
                    Operator::from_matrix(dense::hermitize(&p))
                })
                .collect())
        }
    }
}

/// `|b⟩⟨b|` for every computational basis state `b`.
pub fn computational_projector_jumps(n_qubits: usize) -> Vec<Operator> {
    let d = 1usize << n_qubits;
    (0..d)
        .map(|b| {
            let mut entries = vec![C64::new(0.0, 0.0); d];
            entries[b] = ONE;
            Operator::diagonal(&entries).expect("power-of-two dimension")
        })
        .collect()
}

/// Dense superoperator acting on column-stacked `vec(ρ)`:
/// `𝓛 = -i(I⊗H - Hᵀ⊗I) + γ Σ_k [L̄_k⊗L_k - ½(I⊗L_k†L_k + (L_k†L_k)ᵀ⊗I)]`.
///
/// Only built for dimensions up to [`MAX_LIOUVILLIAN_DIM`]; propagation never
/// needs it.
pub fn liouvillian(spec: &LindbladSpec) -> Result<Matrix> {
    let d = spec.dim();
    if d > MAX_LIOUVILLIAN_DIM {
        return Err(ScrambleError::InvalidDimension { rows: d * d, cols: d * d });
    }
    let id = Matrix::identity(d, d);
    let h = spec.hamiltonian().matrix();
    let mut l = (dense::kron(&id, h) - dense::kron(&h.transpose(), &id)) * (-I);
    let g = C64::new(spec.gamma(), 0.0);
    for jump in spec.jump_ops() {
        let lk = jump.matrix();
        let k = dense::matmul_op(lk, dense::Op::H, lk, dense::Op::N);
        let term = dense::kron(&lk.conjugate(), lk)
            - (dense::kron(&id, &k) + dense::kron(&k.transpose(), &id)) * C64::new(0.5, 0.0);
        l += term * g;
    }
    Ok(l)
}

/// Column-stacking vectorisation.
pub fn vectorize(m: &Matrix) -> Vec<C64> {
    m.iter().copied().collect()
}

/// Inverse of [`vectorize`].
pub fn devectorize(v: &[C64], d: usize) -> Matrix {
    Matrix::from_column_slice(d, d, v)
}

/// `exp(𝓛t) ρ`, re-symmetrised to remove rounding drift.
pub fn evolve_lindblad(rho: &DensityMatrix, spec: &LindbladSpec, t: f64) -> Result<DensityMatrix> {
    if t < 0.0 {
        return Err(ScrambleError::NegativeTime(t));
    }
    rho.operator().check_same_dim(spec.hamiltonian())?;
    let prop = LindbladPropagator::new(spec, Picture::Schrodinger)?;
    let out = prop.apply(rho.matrix(), t)?;
    Ok(DensityMatrix::from_hermitized(Operator::from_matrix(out)))
}

/// States `ρ(t)` on a non-decreasing time grid.
pub fn evolve_lindblad_series(rho: &DensityMatrix, spec: &LindbladSpec, times: &[f64]) -> Result<Vec<DensityMatrix>> {
    rho.operator().check_same_dim(spec.hamiltonian())?;
    if let Some(&t) = times.iter().find(|&&t| t < 0.0) {
        return Err(ScrambleError::NegativeTime(t));
    }
    let prop = LindbladPropagator::new(spec, Picture::Schrodinger)?;
    Ok(prop
        .series(rho.matrix(), times)?
        .into_iter()
        .map(|m| DensityMatrix::from_hermitized(Operator::from_matrix(m)))
        .collect())
}

/// Adjoint channel `ℰ†_t(W) = exp(𝓛†t) W`.
pub fn heisenberg_adjoint(w: &Operator, spec: &LindbladSpec, t: f64) -> Result<Operator> {
    if t < 0.0 {
        return Err(ScrambleError::NegativeTime(t));
    }
    w.check_same_dim(spec.hamiltonian())?;
    let prop = LindbladPropagator::new(spec, Picture::Heisenberg)?;
    Ok(Operator::from_matrix(prop.apply(w.matrix(), t)?))
}

/// Largest entry of `ℰ†_t(I) - I`.
pub fn unitality_residual(spec: &LindbladSpec, t: f64) -> Result<f64> {
    let id = Operator::identity(spec.n_qubits());
    Ok(heisenberg_adjoint(&id, spec, t)?.distance(&id))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli::pauli_matrix;
    use crate::linalg::von_neumann_entropy;
    use crate::models::{build_syk, sample_syk_couplings, SykSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_matrix(d: usize, rng: &mut ChaCha8Rng) -> Matrix {
        Matrix::from_fn(d, d, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
    }

    fn random_hermitian(d: usize, rng: &mut ChaCha8Rng) -> Operator {
        Operator::new(dense::hermitize(&random_matrix(d, rng))).unwrap()
    }

    fn random_state(d: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
        let g = random_matrix(d, rng);
        let mut p = dense::matmul_op(&g, dense::Op::N, &g, dense::Op::H);
        let tr = dense::trace(&p);
        p /= tr;
        DensityMatrix::new(Operator::new(dense::hermitize(&p)).unwrap()).unwrap()
    }

    /// Reference `exp(m)` by scaling and squaring of a long Taylor series.
    fn expm(m: &Matrix) -> Matrix {
        let norm = dense::frobenius_norm(m);
        let s = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
        let a = m / C64::new(2f64.powi(s), 0.0);
        let n = m.nrows();
        let mut sum = Matrix::identity(n, n);
        let mut term = Matrix::identity(n, n);
        for k in 1..40 {
            term = dense::matmul(&term, &a) / C64::new(k as f64, 0.0);
            sum += &term;
        }
        for _ in 0..s {
            sum = dense::matmul(&sum, &sum);
        }
        sum
    }

    fn syk8(seed: u64) -> Operator {
        let spec = SykSpec::new(8, 4, 1.0, seed).unwrap();
        build_syk(&spec, &sample_syk_couplings(&spec).unwrap()).unwrap()
    }

    #[test]
    fn unitary_z_rotation_of_plus_state() {
        let plus = DensityMatrix::pure(&[C64::new(0.5f64.sqrt(), 0.0), C64::new(0.5f64.sqrt(), 0.0)]).unwrap();
        let out = evolve_unitary(&plus, &Pauli::Z.operator(), PI / 4.0).unwrap();
        // e^{-iZπ/4}|+⟩ has Bloch vector (0, 1, 0): ρ = (I + Y)/2
        let expected = (&Operator::identity(1) + &Pauli::Y.operator()).scale(C64::new(0.5, 0.0));
        assert!(out.operator().distance(&expected) < 1e-14);
    }

    #[test]
    fn unitary_preserves_entropy() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random_state(8, &mut rng);
        let h = random_hermitian(8, &mut rng);
        let out = evolve_unitary(&rho, &h, 2.3).unwrap();
        assert!((von_neumann_entropy(&out) - von_neumann_entropy(&rho)).abs() < 1e-10);
    }

    #[test]
    fn computational_jumps_are_local_z() {
        let jumps = dephasing_jumps(DecoherenceBasis::Computational, &Operator::zeros(2), 2).unwrap();
        assert_eq!(jumps.len(), 2);
        assert!(jumps[0].distance(&pauli_matrix(&"ZI".parse().unwrap())) < 1e-15);
        assert!(jumps[1].distance(&pauli_matrix(&"IZ".parse().unwrap())) < 1e-15);
    }

    #[test]
    fn energy_jumps_resolve_identity() {
        let h = syk8(3);
        let jumps = dephasing_jumps(DecoherenceBasis::Energy, &h, 4).unwrap();
        let mut sum = Operator::zeros(4);
        for p in &jumps {
            sum = &sum + p;
            assert!((p * p).distance(p) < 1e-10);
        }
        assert!(sum.distance(&Operator::identity(4)) < 1e-10);
        for (i, p) in jumps.iter().enumerate() {
            for q in &jumps[i + 1..] {
                assert!((p * q).max_abs() < 1e-10);
            }
        }
    }

    #[test]
    fn energy_jumps_for_z() {
        let jumps = dephasing_jumps(DecoherenceBasis::Energy, &Pauli::Z.operator(), 1).unwrap();
        assert_eq!(jumps.len(), 2);
        // ascending energies: |1⟩ (E = -1) first
        assert!((jumps[0].get(1, 1).re - 1.0).abs() < 1e-14);
        assert!((jumps[1].get(0, 0).re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn liouvillian_commutator_limit_and_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = random_hermitian(4, &mut rng);
        let rho = random_state(4, &mut rng);
        let l0 = liouvillian(&LindbladSpec::unitary(h.clone()).unwrap()).unwrap();
        let out = devectorize((&l0 * nalgebra::DVector::from_vec(vectorize(rho.matrix()))).as_slice(), 4);
        let expected = dense::commutator(h.matrix(), rho.matrix()) * (-I);
        assert!(dense::max_abs(&(out - expected)) < 1e-12);

        for basis in [DecoherenceBasis::Computational, DecoherenceBasis::Energy] {
            let spec = LindbladSpec::dephasing(h.clone(), basis, 0.7).unwrap();
            let l = liouvillian(&spec).unwrap();
            let id = nalgebra::DVector::from_vec(vectorize(&Matrix::identity(4, 4)));
            assert!((&l * &id).camax() < 1e-12);
            assert!((l.adjoint() * &id).camax() < 1e-12);
        }
    }

    #[test]
    fn propagation_matches_dense_superoperator() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random_hermitian(8, &mut rng);
        let rho = random_state(8, &mut rng);
        let w = random_hermitian(8, &mut rng);
        let generic = vec![Operator::new(random_matrix(8, &mut rng)).unwrap()];
        let specs = [
            LindbladSpec::dephasing(h.clone(), DecoherenceBasis::Computational, 0.4).unwrap(),
            LindbladSpec::dephasing(h.clone(), DecoherenceBasis::Energy, 0.4).unwrap(),
            LindbladSpec::dephasing_with(h.clone(), DecoherenceBasis::Computational, ComputationalJumps::Projectors, 0.4)
                .unwrap(),
            LindbladSpec::new(h.clone(), generic, 0.3).unwrap(),
        ];
        for spec in &specs {
            let l = liouvillian(spec).unwrap();
            let t = 1.7;
            let prop = expm(&(&l * C64::new(t, 0.0)));
            let reference = devectorize(
                (&prop * nalgebra::DVector::from_vec(vectorize(rho.matrix()))).as_slice(),
                8,
            );
            for strategy in [Strategy::Auto, Strategy::Taylor] {
                let p = LindbladPropagator::with_strategy(spec, Picture::Schrodinger, strategy).unwrap();
                let out = p.apply(rho.matrix(), t).unwrap();
                assert!(dense::max_abs(&(out - &reference)) < 1e-11, "{strategy:?}");
            }
            let prop_adj = expm(&(l.adjoint() * C64::new(t, 0.0)));
            let reference_adj = devectorize(
                (&prop_adj * nalgebra::DVector::from_vec(vectorize(w.matrix()))).as_slice(),
                8,
            );
            let out = heisenberg_adjoint(&w, spec, t).unwrap();
            assert!(dense::max_abs(&(out.matrix() - reference_adj)) < 1e-11);
        }
    }

    #[test]
    fn single_qubit_dephasing_rate() {
        let gamma = 0.3;
        let spec = LindbladSpec::new(Operator::zeros(1), vec![Pauli::Z.operator()], gamma).unwrap();
        let plus = DensityMatrix::pure(&[C64::new(0.5f64.sqrt(), 0.0), C64::new(0.5f64.sqrt(), 0.0)]).unwrap();
        for &t in &[0.0, 0.5, 2.0, 5.0] {
            let out = evolve_lindblad(&plus, &spec, t).unwrap();
            assert!((out.operator().get(0, 1).re - 0.5 * (-2.0 * gamma * t).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn gamma_zero_matches_unitary() {
        let h = syk8(11);
        let rho = crate::models::all_up_state(4).unwrap();
        for basis in [DecoherenceBasis::Computational, DecoherenceBasis::Energy] {
            let spec = LindbladSpec::dephasing(h.clone(), basis, 0.0).unwrap();
            let times: Vec<f64> = (0..=20).map(|k| 0.5 * k as f64).collect();
            let series = evolve_lindblad_series(&rho, &spec, &times).unwrap();
            for (t, state) in times.iter().zip(&series) {
                let exact = evolve_unitary(&rho, &h, *t).unwrap();
                assert!(state.operator().distance(exact.operator()) < 1e-10, "t = {t}");
            }
        }
    }

    #[test]
    fn heisenberg_unitary_limit_and_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let h = random_hermitian(8, &mut rng);
        let w = random_hermitian(8, &mut rng);
        let spec = LindbladSpec::unitary(h.clone()).unwrap();
        let t = 2.5;
        let u = unitary_exp(&h, t).unwrap();
        let expected = u.conjugate_adj(&w);
        assert!(heisenberg_adjoint(&w, &spec, t).unwrap().distance(&expected) < 1e-10);
        let composed = heisenberg_adjoint(&heisenberg_adjoint(&w, &spec, 1.0).unwrap(), &spec, 1.5).unwrap();
        assert!(composed.distance(&expected) < 1e-10);
    }

    #[test]
    fn adjoint_pairing_and_unitality() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = random_hermitian(8, &mut rng);
        for basis in [DecoherenceBasis::Computational, DecoherenceBasis::Energy] {
            let spec = LindbladSpec::dephasing(h.clone(), basis, 0.5).unwrap();
            for _ in 0..3 {
                let rho = random_state(8, &mut rng);
                let w = random_hermitian(8, &mut rng);
                let lhs = w.hs_inner(evolve_lindblad(&rho, &spec, 1.3).unwrap().operator());
                let rhs = heisenberg_adjoint(&w, &spec, 1.3).unwrap().hs_inner(rho.operator());
                assert!((lhs - rhs).norm() < 1e-10);
            }
            assert!(unitality_residual(&spec, 3.0).unwrap() < 1e-10);
        }
    }

    #[test]
    fn negative_time_rejected() {
        let spec = LindbladSpec::unitary(Pauli::Z.operator()).unwrap();
        let rho = DensityMatrix::maximally_mixed(1);
        assert_eq!(evolve_lindblad(&rho, &spec, -1.0).unwrap_err(), ScrambleError::NegativeTime(-1.0));
        assert!(heisenberg_adjoint(&Pauli::X.operator(), &spec, -0.1).is_err());
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(LindbladSpec::new(Pauli::Z.operator(), vec![], -0.1).is_err());
        assert!(LindbladSpec::new(Pauli::Z.operator(), vec![Operator::identity(2)], 0.1).is_err());
    }
}
