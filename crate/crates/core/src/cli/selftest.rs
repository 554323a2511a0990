//! Fast oracle checks runnable from the command line: analytic values,
//! cross-implementation identities and determinism contracts.

use std::f64::consts::LN_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::{
    bound_residual, entropy_decomposition, mutual_information, open_bipartite_otoc, otoc, pauli_averaged_otoc,
    squared_commutator, tripartite_mutual_information, wingflap_distribution, dephase_in_eigenbasis,
    phase_operator,
};
use crate::dynamics::{build_joint_dephasing_model, evolve_lindblad, DecoherenceBasis, LindbladSpec};
use crate::ensemble::realization_seed;
use crate::error::Result;
use crate::linalg::dense::{self, Matrix, C64};
use crate::linalg::operator::Operator;
use crate::linalg::pauli::{Pauli, PauliString};
use crate::linalg::state::{DensityMatrix, SubsystemMask};
use crate::models::{build_syk, sample_syk_couplings, SykSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct SelftestOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn random_hermitian(d: usize, rng: &mut ChaCha8Rng) -> Operator {
    let g = Matrix::from_fn(d, d, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    Operator::new(dense::hermitize(&g)).expect("square power-of-two matrix")
}

fn random_pure_state(d: usize, rng: &mut ChaCha8Rng) -> Result<DensityMatrix> {
    let psi: Vec<C64> = (0..d).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    DensityMatrix::pure(&psi.iter().map(|z| z / norm).collect::<Vec<_>>())
}

fn random_pauli(n: usize, rng: &mut ChaCha8Rng) -> Operator {
    let letters = (0..n)
        .map(|_| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..4)])
        .collect();
    PauliString::new(letters).expect("non-empty string").operator()
}

/// Largest deviation found by a check, compared against its tolerance.
fn within(name: &'static str, worst: Result<f64>, tol: f64) -> SelftestOutcome {
    match worst {
        Ok(w) => SelftestOutcome {
            name,
            passed: w <= tol,
            detail: format!("max deviation {w:.3e} (tolerance {tol:.0e})"),
        },
        Err(e) => SelftestOutcome {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn single_qubit_otoc() -> Result<f64> {
    // H = Z, W = V = X, ρ = |0⟩⟨0|: F(t) = e^{4it}
    let rho = DensityMatrix::basis_state(1, 0)?;
    let (x, z) = (Pauli::X.operator(), Pauli::Z.operator());
    let mut worst: f64 = 0.0;
    for &t in &[0.0, 0.3, 1.1, 2.7] {
        let f = otoc(&rho, &x, &x, &z, t)?;
        worst = worst.max((f - C64::from_polar(1.0, 4.0 * t)).norm());
    }
    Ok(worst)
}

fn commutator_identity() -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let h = random_hermitian(8, &mut rng);
        let (w, v) = (random_pauli(3, &mut rng), random_pauli(3, &mut rng));
        let rho = random_pure_state(8, &mut rng)?;
        let t = rng.random::<f64>() * 3.0;
        let c = squared_commutator(&rho, &w, &v, &h, t)?;
        let f = otoc(&rho, &w, &v, &h, t)?;
        worst = worst.max((c - 2.0 * (1.0 - f.re)).abs());
    }
    Ok(worst)
}

fn pauli_average_at_zero() -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let h = random_hermitian(8, &mut rng);
    let rho = random_pure_state(8, &mut rng)?;
    let a = SubsystemMask::single(0);
    let b = SubsystemMask::new(vec![1, 2])?;
    let mut worst: f64 = 0.0;
    for include in [true, false] {
        worst = worst.max((pauli_averaged_otoc(&rho, &a, &b, &h, 0.0, include)?.value - 1.0).abs());
    }
    Ok(worst)
}

fn entanglement_values() -> Result<f64> {
    let s = C64::new(0.5f64.sqrt(), 0.0);
    let zero = C64::new(0.0, 0.0);
    let bell = DensityMatrix::pure(&[s, zero, zero, s])?;
    let mut ghz = vec![zero; 8];
    ghz[0] = s;
    ghz[7] = s;
    let ghz = DensityMatrix::pure(&ghz)?;
    let (q0, q1, q2) = (SubsystemMask::single(0), SubsystemMask::single(1), SubsystemMask::single(2));
    let deviations = [
        mutual_information(&bell, &q0, &q1)? - 2.0 * LN_2,
        mutual_information(&ghz, &q0, &q1.union(&q2))? - 2.0 * LN_2,
        tripartite_mutual_information(&ghz, &q0, &q1, &q2)?,
        mutual_information(&DensityMatrix::basis_state(2, 1)?, &q0, &q1)?,
    ];
    Ok(deviations.iter().fold(0.0, |m, d| m.max(d.abs())))
}

fn lindblad_contracts() -> Result<f64> {
    let spec = SykSpec::new(8, 4, 1.0, 7)?;
    let h = build_syk(&spec, &sample_syk_couplings(&spec)?)?;
    let rho = DensityMatrix::basis_state(4, 0)?;
    let mut worst: f64 = 0.0;
    for basis in [DecoherenceBasis::Computational, DecoherenceBasis::Energy] {
        let lindblad = LindbladSpec::dephasing(h.clone(), basis, 0.5)?;
        let evolved = evolve_lindblad(&rho, &lindblad, 2.0)?;
        worst = worst.max((evolved.trace() - 1.0).abs()).max((-evolved.min_eigenvalue()).max(0.0));
        let closed = evolve_lindblad(&rho, &LindbladSpec::dephasing(h.clone(), basis, 0.0)?, 2.0)?;
        let unitary = crate::dynamics::evolve_unitary(&rho, &h, 2.0)?;
        worst = worst.max(closed.operator().distance(unitary.operator()));
    }
    Ok(worst)
}

fn decomposition_identity() -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let model = build_joint_dephasing_model(2, &random_hermitian(4, &mut rng), 0.5)?;
    let rho = DensityMatrix::basis_state(2, 0)?;
    let mut worst: f64 = 0.0;
    for &t in &[1.0, 5.0, 10.0] {
        worst = worst.max(entropy_decomposition(&model, &rho, t)?.residual().abs());
    }
    Ok(worst)
}

fn wingflap_equivalence() -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let h = random_hermitian(8, &mut rng);
    let o = random_hermitian(8, &mut rng);
    let w = random_pauli(3, &mut rng);
    let rho = random_pure_state(8, &mut rng)?;
    let dist = wingflap_distribution(&rho, &o, &w, &h, 0.8)?;
    let rho_d = dephase_in_eigenbasis(&rho, &o)?;
    let mut worst = (dist.total_probability() - 1.0).abs();
    for &u in &[0.1, 0.5, 1.0] {
        let direct = otoc(&rho_d, &w, &phase_operator(&o, u)?, &h, 0.8)?;
        worst = worst.max((dist.characteristic_function(u) - direct).norm());
    }
    Ok(worst)
}

fn open_otoc_at_zero() -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let spec = LindbladSpec::dephasing(random_hermitian(8, &mut rng), DecoherenceBasis::Computational, 0.3)?;
    open_bipartite_otoc(&spec, &SubsystemMask::single(0), &SubsystemMask::new(vec![1, 2])?, 0.0).map(f64::abs)
}

fn bound_at_zero() -> Result<f64> {
    // the residual at t = 0 is ℐ(0), which vanishes for a product state
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let h = random_hermitian(8, &mut rng);
    let rho = DensityMatrix::basis_state(3, 5)?;
    bound_residual(&rho, &SubsystemMask::single(0), &SubsystemMask::new(vec![1, 2])?, &h, 0.0).map(f64::abs)
}

fn seeds_and_couplings() -> SelftestOutcome {
    let repeat = realization_seed(9, 4) == realization_seed(9, 4);
    let distinct = (0..1000u64).all(|m| realization_seed(m, 0) != realization_seed(m, 1));
    let same_couplings = SykSpec::new(8, 4, 1.0, 3)
        .and_then(|s| Ok(sample_syk_couplings(&s)? == sample_syk_couplings(&s)?))
        .unwrap_or(false);
    SelftestOutcome {
        name: "seed determinism",
        passed: repeat && distinct && same_couplings,
        detail: format!("repeatable = {repeat}, distinct children = {distinct}, reproducible couplings = {same_couplings}"),
    }
}

/// Runs every check; each outcome reports its largest deviation.
pub fn run_selftest() -> Vec<SelftestOutcome> {
    vec![
        within("single-qubit OTOC e^{4it}", single_qubit_otoc(), 1e-10),
        within("C(t) = 2(1 - Re F(t))", commutator_identity(), 1e-10),
        within("Pauli-averaged OTOC at t = 0", pauli_average_at_zero(), 1e-10),
        within("Bell / GHZ / product information", entanglement_values(), 1e-10),
        within("Lindblad trace, positivity, unitary limit", lindblad_contracts(), 1e-8),
        within("entropy decomposition identity", decomposition_identity(), 1e-8),
        within("wing-flap characteristic function", wingflap_equivalence(), 1e-10),
        within("open bipartite OTOC at t = 0", open_otoc_at_zero(), 1e-10),
        within("bound residual at t = 0", bound_at_zero(), 1e-10),
        seeds_and_couplings(),
    ]
}
