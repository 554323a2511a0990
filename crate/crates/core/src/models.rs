//! Model Hamiltonians (SYK, LMG), Majorana operators and canonical initial states.
//!
//! Majoranas are realized on `N/2` qubits through the Jordan–Wigner map
//!
//! ```text
//! ψ_{2k-1} = Z_1 ⋯ Z_{k-1} X_k / √2,    ψ_{2k} = Z_1 ⋯ Z_{k-1} Y_k / √2,
//! ```
//!
//! normalized so that `{ψ_i, ψ_j} = δ_ij`.
//!
//! Coupling draws use ChaCha20 (a counter-based stream cipher generator,
//! `rand_chacha::ChaCha20Rng`) seeded from a 64-bit integer, and standard
//! normals from `rand_distr`'s ziggurat sampler. Both are platform independent,
//! so a seed pins a realization bit-for-bit.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScrambleError};
use crate::linalg::dense::{Matrix, C64};
use crate::linalg::{DensityMatrix, Operator, Pauli, PauliString, MAX_QUBITS};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SykSpec {
    pub n_majorana: usize,
    pub q: usize,
    pub j_scale: f64,
    pub seed: u64,
}

impl SykSpec {
    pub fn new(n_majorana: usize, q: usize, j_scale: f64, seed: u64) -> Result<Self> {
        let spec = SykSpec {
            n_majorana,
            q,
            j_scale,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_majorana;
        if n < 4 || n % 2 != 0 {
            return Err(ScrambleError::InvalidModel(format!(
                "n_majorana must be an even integer >= 4, got {n}"
            )));
        }
        if n / 2 > MAX_QUBITS {
            return Err(ScrambleError::InvalidModel(format!(
                "n_majorana = {n} needs more than {MAX_QUBITS} qubits"
            )));
        }
        if self.q < 2 || self.q % 2 != 0 || self.q > n {
            return Err(ScrambleError::InvalidModel(format!(
                "q must be even with 2 <= q <= N, got q = {}",
                self.q
            )));
        }
        if !(self.j_scale > 0.0 && self.j_scale.is_finite()) {
            return Err(ScrambleError::InvalidModel(format!(
                "j_scale must be positive, got {}",
                self.j_scale
            )));
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_majorana / 2
    }

    /// Coupling variance `J² (q-1)! / N^(q-1)`.
    pub fn coupling_variance(&self) -> f64 {
        let factorial: f64 = (1..self.q).map(|k| k as f64).product();
        self.j_scale * self.j_scale * factorial / (self.n_majorana as f64).powi(self.q as i32 - 1)
    }
}

/// One coupling `J_{i1…iq}`; indices are 1-based and strictly increasing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SykTerm {
    pub indices: Vec<usize>,
    pub value: f64,
}

/// All `C(N, q)` couplings of one disorder realization, in lexicographic order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SykCouplings {
    pub terms: Vec<SykTerm>,
}

impl SykCouplings {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.terms.iter().map(|t| t.value)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("couplings serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| ScrambleError::Parse(e.to_string()))
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Strictly increasing `k`-subsets of `1..=n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(n, k));
    let mut current: Vec<usize> = (1..=k).collect();
    if k == 0 || k > n {
        return out;
    }
    loop {
        out.push(current.clone());
        let mut pos = k;
        while pos > 0 && current[pos - 1] == n - k + pos {
            pos -= 1;
        }
        if pos == 0 {
            return out;
        }
        current[pos - 1] += 1;
        for j in pos..k {
            current[j] = current[j - 1] + 1;
        }
    }
}

fn majorana_string(i: usize, n_majorana: usize) -> Result<PauliString> {
    if n_majorana < 2 || n_majorana % 2 != 0 {
        return Err(ScrambleError::InvalidModel(format!(
            "Majorana count must be even, got {n_majorana}"
        )));
    }
    if i == 0 || i > n_majorana {
        return Err(ScrambleError::IndexOutOfRange {
            index: i,
            n_qubits: n_majorana,
        });
    }
    let n_qubits = n_majorana / 2;
    let site = (i - 1) / 2;
    let mut letters = vec![Pauli::I; n_qubits];
    letters[..site].fill(Pauli::Z);
    letters[site] = if i % 2 == 1 { Pauli::X } else { Pauli::Y };
    PauliString::new(letters)
}

/// Jordan–Wigner Majorana `ψ_i` (1-based) on `n_majorana / 2` qubits.
pub fn majorana(i: usize, n_majorana: usize) -> Result<Operator> {
    let string = majorana_string(i, n_majorana)?;
    Ok(string.operator().scale(C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)))
}

pub fn sample_syk_couplings(spec: &SykSpec) -> Result<SykCouplings> {
    spec.validate()?;
    let sigma = spec.coupling_variance().sqrt();
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let terms = combinations(spec.n_majorana, spec.q)
        .into_iter()
        .map(|indices| {
            let z: f64 = StandardNormal.sample(&mut rng);
            SykTerm {
                indices,
                value: sigma * z,
            }
        })
        .collect();
    Ok(SykCouplings { terms })
}

/// `H = i^{q/2} Σ J_{i1…iq} ψ_{i1} ⋯ ψ_{iq}`.
pub fn build_syk(spec: &SykSpec, couplings: &SykCouplings) -> Result<Operator> {
    spec.validate()?;
    let (n, q) = (spec.n_majorana, spec.q);
    let expected = binomial(n, q);
    if couplings.len() != expected {
        return Err(ScrambleError::InvalidModel(format!(
            "expected {expected} couplings for N = {n}, q = {q}, found {}",
            couplings.len()
        )));
    }
    let strings: Vec<PauliString> = (1..=n).map(|i| majorana_string(i, n)).collect::<Result<_>>()?;
    let prefactor = C64::new(0.0, 1.0).powu((q / 2) as u32) * 0.5f64.powf(q as f64 / 2.0);
    let d = 1usize << spec.n_qubits();
    let mut h = Matrix::zeros(d, d);
    for term in &couplings.terms {
        let idx = &term.indices;
        if idx.len() != q || idx.windows(2).any(|w| w[0] >= w[1]) || idx[0] == 0 || idx[q - 1] > n {
            return Err(ScrambleError::InvalidModel(format!(
                "coupling indices {idx:?} are not a strictly increasing {q}-subset of 1..={n}"
            )));
        }
        let mut phase = C64::new(1.0, 0.0);
        let mut product = strings[idx[0] - 1].clone();
        for &i in &idx[1..] {
            let (ph, next) = product.product(&strings[i - 1])?;
            phase *= ph;
            product = next;
        }
        product.accumulate_into(prefactor * phase * term.value, &mut h);
    }
    Operator::new(h)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LmgSpec {
    pub n_spins: usize,
    pub j_scale: f64,
}

impl LmgSpec {
    pub fn new(n_spins: usize, j_scale: f64) -> Result<Self> {
        let spec = LmgSpec { n_spins, j_scale };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_spins < 2 || self.n_spins > MAX_QUBITS {
            return Err(ScrambleError::InvalidModel(format!(
                "n_spins must be in 2..={MAX_QUBITS}, got {}",
                self.n_spins
            )));
        }
        if !(self.j_scale > 0.0 && self.j_scale.is_finite()) {
            return Err(ScrambleError::InvalidModel(format!(
                "j_scale must be positive, got {}",
                self.j_scale
            )));
        }
        Ok(())
    }
}

/// `H = -(J/N) Σ_{i<j} (X_i X_j + Y_i Y_j) - Σ_i Z_i`.
pub fn build_lmg(spec: &LmgSpec) -> Result<Operator> {
    spec.validate()?;
    let n = spec.n_spins;
    let d = 1usize << n;
    let mut h = Matrix::zeros(d, d);
    let coupling = C64::new(-spec.j_scale / n as f64, 0.0);
    for i in 0..n {
        for j in (i + 1)..n {
            for p in [Pauli::X, Pauli::Y] {
                let mut letters = vec![Pauli::I; n];
                letters[i] = p;
                letters[j] = p;
                PauliString::new(letters)?.accumulate_into(coupling, &mut h);
            }
        }
        let mut letters = vec![Pauli::I; n];
        letters[i] = Pauli::Z;
        PauliString::new(letters)?.accumulate_into(C64::new(-1.0, 0.0), &mut h);
    }
    Operator::new(h)
}

/// `|0…0><0…0|`.
pub fn all_up_state(n_qubits: usize) -> Result<DensityMatrix> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(ScrambleError::InvalidModel(format!("invalid qubit count {n_qubits}")));
    }
    DensityMatrix::basis_state(n_qubits, 0)
}

/// Computational-basis index of `|0101…>` (qubit 0 in `|0>`).
pub fn neel_index(n_qubits: usize) -> usize {
    (0..n_qubits).filter(|q| q % 2 == 1).fold(0, |acc, q| acc | 1 << (n_qubits - 1 - q))
}

/// `|0101…><0101…|`.
pub fn neel_state(n_qubits: usize) -> Result<DensityMatrix> {
    if n_qubits < 2 || n_qubits > MAX_QUBITS {
        return Err(ScrambleError::InvalidModel(format!(
            "Néel state needs 2..={MAX_QUBITS} qubits, got {n_qubits}"
        )));
    }
    DensityMatrix::basis_state(n_qubits, neel_index(n_qubits))
}
