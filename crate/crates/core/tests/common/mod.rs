//! Shared random instances and brute-force reference implementations.
//!
//! The references here deliberately avoid the library's fast paths: Pauli
//! averages loop over materialized matrices, entropies come from explicit
//! eigenvalues, and evolution uses a dense eigendecomposition built locally.

#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use scramble::linalg::{enumerate_pauli_group, DensityMatrix, Matrix, Operator, Pauli, PauliString, SubsystemMask, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(d: usize, rng: &mut ChaCha8Rng) -> Matrix {
    DMatrix::from_fn(d, d, |_, _| {
        C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

/// GUE-like Hermitian matrix.
pub fn random_hermitian(d: usize, rng: &mut ChaCha8Rng) -> Operator {
    let g = gaussian_matrix(d, rng);
    Operator::new((&g + g.adjoint()).scale(0.5)).unwrap()
}

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// `R`'s diagonal absorbed into `Q`.
pub fn haar_unitary(d: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let qr = gaussian_matrix(d, rng).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let phase = r[(j, j)] / r[(j, j)].norm();
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_pure_state(n_qubits: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let d = 1 << n_qubits;
    let psi: Vec<C64> = (0..d)
        .map(|_| C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)))
        .collect();
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    DensityMatrix::pure(&psi.iter().map(|z| z / norm).collect::<Vec<_>>()).unwrap()
}

/// Tensor product of independent random single-qubit pure states.
pub fn random_product_state(n_qubits: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let mut psi = vec![C64::new(1.0, 0.0)];
    for _ in 0..n_qubits {
        let theta: f64 = rng.random::<f64>() * std::f64::consts::PI;
        let phi: f64 = rng.random::<f64>() * 2.0 * std::f64::consts::PI;
        let q = [C64::new((theta / 2.0).cos(), 0.0), C64::from_polar((theta / 2.0).sin(), phi)];
        psi = psi.iter().flat_map(|a| q.iter().map(move |b| a * b)).collect();
    }
    DensityMatrix::pure(&psi).unwrap()
}

pub fn random_pauli(n_qubits: usize, rng: &mut ChaCha8Rng) -> Operator {
    let letters = (0..n_qubits)
        .map(|_| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..4)])
        .collect();
    PauliString::new(letters).unwrap().operator()
}

/// `e^{-iHt}` from a locally computed eigendecomposition.
pub fn propagator(h: &Operator, t: f64) -> Matrix {
    let eig = h.matrix().clone().symmetric_eigen();
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| C64::from_polar(1.0, -e * t)));
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

/// `U† O U`.
pub fn heisenberg(u: &Matrix, o: &Matrix) -> Matrix {
    u.adjoint() * o * u
}

/// `-Σ λ ln λ` over explicit eigenvalues (clipped at 1e-12).
pub fn entropy(m: &Matrix) -> f64 {
    let herm = (m + m.adjoint()).scale(0.5);
    herm.symmetric_eigenvalues()
        .iter()
        .filter(|&&l| l > 1e-12)
        .map(|&l| -l * l.ln())
        .sum()
}

/// Partial trace by index arithmetic, keeping the sorted qubits `keep`
/// (qubit 0 is the most significant bit).
pub fn reduce(m: &Matrix, n_qubits: usize, keep: &[usize]) -> Matrix {
    let traced: Vec<usize> = (0..n_qubits).filter(|q| !keep.contains(q)).collect();
    let dk = 1 << keep.len();
    let compose = |kept: usize, rest: usize| {
        let mut x = 0;
        for (k, &q) in keep.iter().enumerate() {
            x |= ((kept >> (keep.len() - 1 - k)) & 1) << (n_qubits - 1 - q);
        }
        for (k, &q) in traced.iter().enumerate() {
            x |= ((rest >> (traced.len() - 1 - k)) & 1) << (n_qubits - 1 - q);
        }
        x
    };
    DMatrix::from_fn(dk, dk, |i, j| {
        (0..1usize << traced.len())
            .map(|r| m[(compose(i, r), compose(j, r))])
            .sum()
    })
}

pub fn brute_mutual_information(rho: &Matrix, n_qubits: usize, a: &[usize], b: &[usize]) -> f64 {
    let mut ab: Vec<usize> = a.iter().chain(b).copied().collect();
    ab.sort_unstable();
    entropy(&reduce(rho, n_qubits, a)) + entropy(&reduce(rho, n_qubits, b)) - entropy(&reduce(rho, n_qubits, &ab))
}

/// `mean Re tr[ρ O_A O_B(t) O_A O_B(t)]` over every pair of materialized
/// Pauli strings, with `O_B(t) = U† O_B U`.
pub fn brute_pauli_average(
    rho: &DensityMatrix,
    a: &SubsystemMask,
    b: &SubsystemMask,
    u: &Matrix,
    include_identity: bool,
) -> f64 {
    let n = rho.n_qubits();
    let skip = usize::from(!include_identity);
    let oas = enumerate_pauli_group(a, n).unwrap();
    let obs = enumerate_pauli_group(b, n).unwrap();
    let mut total = 0.0;
    let mut count = 0;
    for oa in oas.iter().skip(skip) {
        for ob in obs.iter().skip(skip) {
            let obt = heisenberg(u, ob.matrix());
            let prod = oa.matrix() * &obt * oa.matrix() * &obt;
            total += (rho.matrix() * prod).trace().re;
            count += 1;
        }
    }
    total / count as f64
}

/// `(1/2d) mean ‖[U† V_A U, W_B]‖₂²` over materialized Pauli strings.
pub fn brute_commutator_norm_average(u: &Matrix, n_qubits: usize, a: &SubsystemMask, b: &SubsystemMask) -> f64 {
    let d = (1usize << n_qubits) as f64;
    let ws = enumerate_pauli_group(b, n_qubits).unwrap();
    let mut total = 0.0;
    let mut count = 0;
    for v in enumerate_pauli_group(a, n_qubits).unwrap() {
        let vt = heisenberg(u, v.matrix());
        for w in &ws {
            let c = &vt * w.matrix() - w.matrix() * &vt;
            total += c.norm_squared();
            count += 1;
        }
    }
    total / count as f64 / (2.0 * d)
}
