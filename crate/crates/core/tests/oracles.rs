//! Library results against independent references: brute-force Pauli sums,
//! index-arithmetic partial traces, a fixed-step integrator for the master
//! equation, and Monte-Carlo error scaling.

mod common;

use std::collections::HashSet;

use rand::Rng;

use common::*;
use scramble::diagnostics::{
    mutual_information, operator_state, pauli_averaged_otoc_series, tripartite_mutual_information, Enumeration, PauliAverageOptions,
};
use scramble::dynamics::{evolve_lindblad, DecoherenceBasis, LindbladSpec};
use scramble::ensemble::{realization_seed, run_ensemble, Diagnostic, ExperimentConfig, ModelConfig};
use scramble::linalg::{DensityMatrix, Matrix, Operator, SubsystemMask, C64};

fn mask(q: &[usize]) -> SubsystemMask {
    SubsystemMask::new(q.to_vec()).unwrap()
}

#[test]
fn exact_pauli_average_matches_materialized_sum() {
    let mut r = rng(1);
    for include_identity in [true, false] {
        for _ in 0..4 {
            let h = random_hermitian(16, &mut r);
            let rho = random_pure_state(4, &mut r);
            let (a, b) = (mask(&[0]), mask(&[2, 3]));
            let times = [0.0, 0.7, 2.3];
            let opts = PauliAverageOptions {
                include_identity,
                enumeration: Enumeration::Exact,
                ..PauliAverageOptions::default()
            };
            let lib = pauli_averaged_otoc_series(&rho, &a, &b, &h, &times, &opts).unwrap();
            for (avg, &t) in lib.iter().zip(&times) {
                let brute = brute_pauli_average(&rho, &a, &b, &propagator(&h, t), include_identity);
                assert!((avg.value - brute).abs() < 1e-10, "t = {t}: {} vs {brute}", avg.value);
                assert_eq!(avg.stderr, 0.0);
            }
        }
    }
}

#[test]
fn sampled_pauli_average_agrees_with_exact_within_three_sigma() {
    let mut r = rng(2);
    let h = random_hermitian(16, &mut r);
    let rho = random_pure_state(4, &mut r);
    let (a, b) = (mask(&[0, 1]), mask(&[2, 3]));
    let times = [0.5, 1.5, 4.0];
    let exact_opts = PauliAverageOptions {
        enumeration: Enumeration::Exact,
        ..PauliAverageOptions::default()
    };
    let exact = pauli_averaged_otoc_series(&rho, &a, &b, &h, &times, &exact_opts).unwrap();
    let mut outside = 0;
    for seed in 0..10 {
        let opts = PauliAverageOptions {
            enumeration: Enumeration::Sampled,
            samples: 400,
            seed,
            ..PauliAverageOptions::default()
        };
        let sampled = pauli_averaged_otoc_series(&rho, &a, &b, &h, &times, &opts).unwrap();
        for (s, e) in sampled.iter().zip(&exact) {
            assert!(!s.exact && s.stderr > 0.0);
            outside += usize::from((s.value - e.value).abs() > 3.0 * s.stderr);
        }
    }
    // 30 comparisons; a 3σ excursion has probability ≈ 0.3% each
    assert!(outside <= 1, "{outside} of 30 sampled averages beyond 3σ");
}

#[test]
fn mutual_information_matches_index_arithmetic_reference() {
    let mut r = rng(3);
    for _ in 0..10 {
        let rho = random_pure_state(4, &mut r);
        let u = haar_unitary(16, &mut r);
        let mixed = {
            // a mixed state: half a pure state, half its Haar rotation
            let m = (rho.matrix() + &u * rho.matrix() * u.adjoint()).scale(0.5);
            DensityMatrix::new(Operator::new(m).unwrap()).unwrap()
        };
        for (a, b) in [(&[0][..], &[1, 2, 3][..]), (&[1][..], &[3][..]), (&[0, 2][..], &[1][..])] {
            let lib = mutual_information(&mixed, &mask(a), &mask(b)).unwrap();
            let brute = brute_mutual_information(mixed.matrix(), 4, a, b);
            assert!((lib - brute).abs() < 1e-10, "{lib} vs {brute}");
        }
    }
}

#[test]
fn tmi_of_haar_unitaries_is_negative() {
    let mut r = rng(4);
    let mut negative = 0;
    for _ in 0..30 {
        let u = haar_unitary(8, &mut r);
        let rho = operator_state(&u).unwrap();
        // inputs 0..3, outputs 3..6
        let tmi = tripartite_mutual_information(&rho, &mask(&[0]), &mask(&[3]), &mask(&[4, 5])).unwrap();
        let brute = brute_mutual_information(rho.matrix(), 6, &[0], &[3]) + brute_mutual_information(rho.matrix(), 6, &[0], &[4, 5])
            - brute_mutual_information(rho.matrix(), 6, &[0], &[3, 4, 5]);
        assert!((tmi - brute).abs() < 1e-10);
        negative += usize::from(tmi < 0.0);
        // on the pure state U|000⟩ the same quantity vanishes identically
        let psi: Vec<C64> = u.column(0).iter().copied().collect();
        let pure = DensityMatrix::pure(&psi).unwrap();
        assert!(tripartite_mutual_information(&pure, &mask(&[0]), &mask(&[1]), &mask(&[2])).unwrap().abs() < 1e-10);
    }
    assert_eq!(negative, 30);
}

/// `dρ/dt = -i[H, ρ] + γ Σ (LρL† - ½{L†L, ρ})`, integrated with classical
/// RK4 directly on matrices.
fn rk4_master_equation(rho: &Matrix, h: &Matrix, jumps: &[Matrix], gamma: f64, t: f64, steps: usize) -> Matrix {
    let i = C64::new(0.0, 1.0);
    let rhs = |x: &Matrix| -> Matrix {
        let mut out = (h * x - x * h) * (-i);
        for l in jumps {
            let ldl = l.adjoint() * l;
            out += (l * x * l.adjoint() - (&ldl * x + x * &ldl).scale(0.5)).scale(gamma);
        }
        out
    };
    let dt = t / steps as f64;
    let mut x = rho.clone();
    for _ in 0..steps {
        let k1 = rhs(&x);
        let k2 = rhs(&(&x + k1.scale(dt / 2.0)));
        let k3 = rhs(&(&x + k2.scale(dt / 2.0)));
        let k4 = rhs(&(&x + k3.scale(dt)));
        x += (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(dt / 6.0);
    }
    x
}

#[test]
fn lindblad_evolution_matches_direct_integration() {
    let mut r = rng(5);
    let h = random_hermitian(8, &mut r).scale(C64::new(0.5, 0.0));
    let rho = random_pure_state(3, &mut r);
    for basis in [DecoherenceBasis::Computational, DecoherenceBasis::Energy] {
        let spec = LindbladSpec::dephasing(h.clone(), basis, 0.4).unwrap();
        let jumps: Vec<Matrix> = spec.jump_ops().iter().map(|j| j.matrix().clone()).collect();
        for t in [0.3, 1.7] {
            let lib = evolve_lindblad(&rho, &spec, t).unwrap();
            let reference = rk4_master_equation(rho.matrix(), h.matrix(), &jumps, 0.4, t, 4000);
            let err = (lib.matrix() - reference).camax();
            assert!(err < 1e-9, "{basis:?} t = {t}: {err:.2e}");
        }
    }
    // arbitrary (non-Hermitian) jump operators take the general route
    let jumps = vec![common::gaussian_matrix(8, &mut r).scale(0.3), common::gaussian_matrix(8, &mut r).scale(0.3)];
    let spec = LindbladSpec::new(
        h.clone(),
        jumps.iter().map(|j| Operator::new(j.clone()).unwrap()).collect(),
        0.7,
    )
    .unwrap();
    let lib = evolve_lindblad(&rho, &spec, 1.2).unwrap();
    let reference = rk4_master_equation(rho.matrix(), h.matrix(), &jumps, 0.7, 1.2, 4000);
    assert!((lib.matrix() - reference).camax() < 1e-9);
}

#[test]
fn realization_seeds_do_not_collide() {
    let children: HashSet<u64> = (0..100_000u64).map(|i| realization_seed(42, i)).collect();
    assert_eq!(children.len(), 100_000);
    let firsts: HashSet<u64> = (0..10_000u64).map(|m| realization_seed(m, 0)).collect();
    assert_eq!(firsts.len(), 10_000);
    let mut r = rng(6);
    let master: u64 = r.random();
    assert_eq!(realization_seed(master, 17), realization_seed(master, 17));
}

fn small_syk(seed: u64, realizations: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(
        ModelConfig::Syk {
            n_majorana: 6,
            q: 4,
            j_scale: 1.0,
        },
        seed,
        vec![Diagnostic::MutualInfo],
    )
    .unwrap();
    cfg.n_realizations = realizations;
    cfg.time_grid.n_points = 11;
    cfg.time_grid.t_max = 3.0;
    cfg
}

#[test]
fn standard_error_shrinks_as_one_over_root_m() {
    let small = run_ensemble(&small_syk(77, 25), Some(1)).unwrap();
    let large = run_ensemble(&small_syk(77, 100), Some(1)).unwrap();
    let (s, l) = (small.trace("mutual_info").unwrap(), large.trace("mutual_info").unwrap());
    // average the ratio over late times, where the spread has developed
    let ratios: Vec<f64> = (5..11).map(|j| s.stderr[j] / l.stderr[j]).collect();
    let ratio = ratios.iter().sum::<f64>() / ratios.len() as f64;
    assert!((ratio - 2.0).abs() < 0.6, "stderr ratio {ratio:.3} (expected ≈ 2)");
    // the first 25 realizations are shared, so the means are consistent
    for j in 0..11 {
        assert!((s.mean[j] - l.mean[j]).abs() < 4.0 * s.stderr[j] + 1e-12);
    }
}
