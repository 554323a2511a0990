//! Single-qubit Pauli letters, Pauli strings and Pauli-group enumeration.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::dense::{Matrix, C64, ONE, ZERO};
use super::operator::Operator;
use super::state::SubsystemMask;
use crate::error::{Result, ScrambleError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn operator(self) -> Operator {
        let m = match self {
            Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
            Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
            Pauli::Y => [[ZERO, C64::new(0.0, -1.0)], [C64::new(0.0, 1.0), ZERO]],
            Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
        };
        Operator::from_matrix(Matrix::from_fn(2, 2, |i, j| m[i][j]))
    }

    /// Whether the letter flips the computational-basis bit.
    fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    /// Phase picked up by `<b xor flip| P |b>` for input bit `b`.
    fn phase(self, bit: bool) -> C64 {
        match (self, bit) {
            (Pauli::I, _) | (Pauli::X, _) => ONE,
            (Pauli::Y, false) => C64::new(0.0, 1.0),
            (Pauli::Y, true) => C64::new(0.0, -1.0),
            (Pauli::Z, false) => ONE,
            (Pauli::Z, true) => -ONE,
        }
    }

    fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// `self * other = phase * result`.
    pub fn product(self, other: Pauli) -> (C64, Pauli) {
        use Pauli::*;
        let i = C64::new(0.0, 1.0);
        match (self, other) {
            (I, p) | (p, I) => (ONE, p),
            (a, b) if a == b => (ONE, I),
            (X, Y) => (i, Z),
            (Y, X) => (-i, Z),
            (Y, Z) => (i, X),
            (Z, Y) => (-i, X),
            (Z, X) => (i, Y),
            (X, Z) => (-i, Y),
            _ => unreachable!(),
        }
    }
}

/// Tensor product of Pauli letters, one per qubit (qubit 0 first).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Result<Self> {
        if letters.is_empty() {
            return Err(ScrambleError::InvalidPauli("empty string".into()));
        }
        Ok(PauliString { letters })
    }

    pub fn identity(n_qubits: usize) -> Self {
        PauliString {
            letters: vec![Pauli::I; n_qubits],
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        text.parse()
    }

    /// The string acting as `letters` on `support` and identity elsewhere.
    pub fn embedded(support: &SubsystemMask, letters: &[Pauli], n_qubits: usize) -> Result<Self> {
        support.validate(n_qubits)?;
        if support.len() != letters.len() {
            return Err(ScrambleError::InvalidPauli(format!(
                "{} letters for a support of {} qubits",
                letters.len(),
                support.len()
            )));
        }
        let mut out = vec![Pauli::I; n_qubits];
        for (&q, &p) in support.indices().iter().zip(letters) {
            out[q] = p;
        }
        Ok(PauliString { letters: out })
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    /// Bit mask of flipped basis bits (qubit 0 is the most significant bit).
    pub(crate) fn flip_mask(&self) -> usize {
        let n = self.n_qubits();
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, p)| p.flips())
            .fold(0, |acc, (q, _)| acc | 1 << (n - 1 - q))
    }

    /// Nonzero entry of column `col`: returns `(row, value)`.
    pub(crate) fn column_entry(&self, col: usize) -> (usize, C64) {
        let n = self.n_qubits();
        let mut phase = ONE;
        for (q, &p) in self.letters.iter().enumerate() {
            let bit = (col >> (n - 1 - q)) & 1 == 1;
            phase *= p.phase(bit);
        }
        (col ^ self.flip_mask(), phase)
    }

    /// `P x P†` in `O(d²)` using the permutation-with-phases structure of `P`.
    pub(crate) fn conjugate_matrix(&self, x: &Matrix) -> Matrix {
        let d = x.nrows();
        let entries: Vec<(usize, C64)> = (0..d).map(|c| self.column_entry(c)).collect();
        let mut out = Matrix::zeros(d, d);
        for (c2, &(r2, v2)) in entries.iter().enumerate() {
            let v2 = v2.conj();
            for (c1, &(r1, v1)) in entries.iter().enumerate() {
                out[(r1, r2)] = v1 * x[(c1, c2)] * v2;
            }
        }
        out
    }

    /// Adds `coeff * P` into `target` in place.
    pub(crate) fn accumulate_into(&self, coeff: C64, target: &mut Matrix) {
        for col in 0..(1usize << self.n_qubits()) {
            let (row, value) = self.column_entry(col);
            target[(row, col)] += coeff * value;
        }
    }

    /// `self * other = phase * result`.
    pub fn product(&self, other: &PauliString) -> Result<(C64, PauliString)> {
        if self.n_qubits() != other.n_qubits() {
            return Err(ScrambleError::DimensionMismatch {
                expected: self.n_qubits(),
                found: other.n_qubits(),
            });
        }
        let mut phase = ONE;
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&a, &b)| {
                let (ph, p) = a.product(b);
                phase *= ph;
                p
            })
            .collect();
        Ok((phase, PauliString { letters }))
    }

    /// Materialized operator `P_0 ⊗ P_1 ⊗ …`.
    pub fn operator(&self) -> Operator {
        let d = 1usize << self.n_qubits();
        let mut m = Matrix::zeros(d, d);
        self.accumulate_into(ONE, &mut m);
        Operator::from_matrix(m)
    }
}

impl FromStr for PauliString {
    type Err = ScrambleError;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|ch| match ch.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(ScrambleError::InvalidPauli(format!("unknown letter `{other}` in `{s}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        PauliString::new(letters)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.letters.iter().try_for_each(|p| write!(f, "{}", p.letter()))
    }
}

pub fn pauli_matrix(p: &PauliString) -> Operator {
    p.operator()
}

/// The string with base-4 `code` on `support` (letters I < X < Y < Z, first
/// support qubit most significant), identity elsewhere.
pub fn pauli_string_on(support: &SubsystemMask, n_qubits: usize, code: usize) -> Result<PauliString> {
    let k = support.len();
    if code >= 1usize << (2 * k) {
        return Err(ScrambleError::InvalidPauli(format!(
            "code {code} out of range for a {k}-qubit support"
        )));
    }
    let letters: Vec<Pauli> = (0..k).map(|pos| Pauli::ALL[(code >> (2 * (k - 1 - pos))) & 3]).collect();
    PauliString::embedded(support, &letters, n_qubits)
}

/// All `4^|support|` strings supported on `support`, in lexicographic order
/// of the letters I < X < Y < Z with the first support qubit most significant.
pub fn pauli_strings_on(support: &SubsystemMask, n_qubits: usize) -> Result<Vec<PauliString>> {
    support.validate(n_qubits)?;
    let count = 1usize << (2 * support.len());
    (0..count).map(|code| pauli_string_on(support, n_qubits, code)).collect()
}

/// Materialized Pauli group on `support`, embedded in an `n`-qubit register.
pub fn enumerate_pauli_group(support: &SubsystemMask, n_qubits: usize) -> Result<Vec<Operator>> {
    Ok(pauli_strings_on(support, n_qubits)?.iter().map(PauliString::operator).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::operator::tensor_product;

    #[test]
    fn fast_conjugation_matches_dense_product() {
        let x = Matrix::from_fn(8, 8, |i, j| C64::new((i as f64 * 1.3 + j as f64).sin(), (i * j) as f64 * 0.1));
        for s in ["XYZ", "IZY", "YYI"] {
            let p = PauliString::parse(s).unwrap();
            let pm = p.operator();
            let expected = pm.matrix() * &x * pm.matrix().adjoint();
            assert!((p.conjugate_matrix(&x) - expected).iter().all(|z| z.norm() < 1e-14), "{s}");
        }
    }

    #[test]
    fn identity_string_is_identity() {
        assert_eq!(PauliString::parse("III").unwrap().operator(), Operator::identity(3));
    }

    #[test]
    fn xz_is_x_tensor_z() {
        let xz = PauliString::parse("XZ").unwrap().operator();
        assert_eq!(xz, tensor_product(&Pauli::X.operator(), &Pauli::Z.operator()));
    }

    #[test]
    fn every_two_qubit_string_squares_to_identity() {
        let support = SubsystemMask::new(vec![0, 1]).unwrap();
        for p in pauli_strings_on(&support, 2).unwrap() {
            let m = p.operator();
            assert!((&m * &m).distance(&Operator::identity(2)) < 1e-14, "{p}");
            assert!(m.is_hermitian(1e-14));
        }
    }

    #[test]
    fn single_qubit_support_embeds_ixyz() {
        let support = SubsystemMask::new(vec![1]).unwrap();
        let group = pauli_strings_on(&support, 2).unwrap();
        let names: Vec<String> = group.iter().map(ToString::to_string).collect();
        assert_eq!(names, ["II", "IX", "IY", "IZ"]);
    }

    #[test]
    fn two_qubit_group_is_hilbert_schmidt_orthogonal() {
        let support = SubsystemMask::new(vec![0, 2]).unwrap();
        let group = enumerate_pauli_group(&support, 3).unwrap();
        assert_eq!(group.len(), 16);
        // Gram matrix oracle: tr(P_i^dagger P_j) = d δ_ij
        for (i, a) in group.iter().enumerate() {
            for (j, b) in group.iter().enumerate() {
                let g = a.hs_inner(b);
                let expected = if i == j { 8.0 } else { 0.0 };
                assert!((g - C64::new(expected, 0.0)).norm() < 1e-12, "({i},{j}) -> {g}");
            }
        }
    }

    #[test]
    fn group_size_is_four_to_the_support() {
        for k in 1..=3 {
            let support = SubsystemMask::new((0..k).collect()).unwrap();
            assert_eq!(pauli_strings_on(&support, 4).unwrap().len(), 1 << (2 * k));
        }
    }

    #[test]
    fn string_product_matches_matrix_product() {
        let a = PauliString::parse("XYZI").unwrap();
        let b = PauliString::parse("YYXZ").unwrap();
        let (phase, p) = a.product(&b).unwrap();
        let direct = &a.operator() * &b.operator();
        assert!(direct.distance(&p.operator().scale(phase)) < 1e-14);
    }

    #[test]
    fn rejects_bad_letters() {
        assert!(PauliString::parse("XQ").is_err());
        assert!(PauliString::parse("").is_err());
    }
}
