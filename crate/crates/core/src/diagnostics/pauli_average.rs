//! Pauli-group averages of the four-point correlator
//! `Ō(t) = mean_{O_A, O_B} Re tr[ρ O_A O_B(t) O_A O_B(t)]`.
//!
//! Exact averages never loop over both groups: the mean over the Pauli group
//! on a support `S` acts as the twirl `mean_P P X P = (I_S/d_S) ⊗ tr_S X`,
//! so one of the two sums collapses to a partial trace.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{LindbladPropagator, LindbladSpec, Picture};
use crate::error::{Result, ScrambleError};
use crate::linalg::dense::{self, pairwise_sum, Matrix, Op};
use crate::linalg::operator::Operator;
use crate::linalg::pauli::{pauli_string_on, PauliString};
use crate::linalg::spectrum::{eig_hermitian, Spectrum};
use crate::linalg::state::{partial_trace_operator, DensityMatrix, SubsystemMask};

/// Pair count up to which closed-dynamics averages are enumerated exactly.
pub const EXACT_PAIR_LIMIT: usize = 4096;

/// Default number of sampled pairs when enumeration is too large.
pub const DEFAULT_PAIR_SAMPLES: usize = 1000;

/// Number of `O_B` strings up to which open-dynamics averages are exact.
pub const OPEN_EXACT_LIMIT: usize = 64;

/// How the group average is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Enumeration {
    /// Exact below the size limit, sampled above it.
    #[default]
    Auto,
    Exact,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliAverageOptions {
    /// Whether the identity string on each support takes part in the average.
    pub include_identity: bool,
    pub enumeration: Enumeration,
    /// Number of draws when sampling.
    pub samples: usize,
    pub seed: u64,
}

impl Default for PauliAverageOptions {
    fn default() -> Self {
        PauliAverageOptions {
            include_identity: true,
            enumeration: Enumeration::Auto,
            samples: DEFAULT_PAIR_SAMPLES,
            seed: 0,
        }
    }
}

impl PauliAverageOptions {
    pub fn with_identity(include_identity: bool) -> Self {
        PauliAverageOptions {
            include_identity,
            ..Self::default()
        }
    }
}

/// A group average together with its Monte-Carlo uncertainty (0 when exact).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliAverage {
    pub value: f64,
    pub stderr: f64,
    /// Number of terms (exact) or draws (sampled) entering `value`.
    pub n_terms: usize,
    pub exact: bool,
}

/// Sample mean and standard error of the mean (0 for a single value).
pub(crate) fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = pairwise_sum(values) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
    let var = pairwise_sum(&sq) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Converts a full-group mean into the mean over non-identity pairs, using
/// that every pair containing an identity contributes exactly 1.
fn exclude_identity(full_mean: f64, na: usize, nb: usize) -> f64 {
    let (na, nb) = (na as f64, nb as f64);
    (full_mean * na * nb - na - nb + 1.0) / ((na - 1.0) * (nb - 1.0))
}

fn group_size(mask: &SubsystemMask) -> usize {
    1usize << (2 * mask.len())
}

fn validate(rho: &DensityMatrix, a: &SubsystemMask, b: &SubsystemMask, dim_of: &Operator) -> Result<usize> {
    let n = rho.n_qubits();
    rho.operator().check_same_dim(dim_of)?;
    a.validate(n)?;
    b.validate(n)?;
    a.check_disjoint(b)?;
    Ok(n)
}

fn draw_code(rng: &mut ChaCha20Rng, size: usize, include_identity: bool) -> usize {
    if include_identity {
        rng.random_range(0..size)
    } else {
        rng.random_range(1..size)
    }
}

/// `Ō(t)` with default options and the given identity convention.
pub fn pauli_averaged_otoc(
    rho: &DensityMatrix,
    support_a: &SubsystemMask,
    support_b: &SubsystemMask,
    h: &Operator,
    t: f64,
    include_identity: bool,
) -> Result<PauliAverage> {
    let opts = PauliAverageOptions::with_identity(include_identity);
    Ok(pauli_averaged_otoc_series(rho, support_a, support_b, h, &[t], &opts)?[0])
}

/// `Ō(t)` on a time grid. Sampled averages reuse the same pairs at every time.
pub fn pauli_averaged_otoc_series(
    rho: &DensityMatrix,
    support_a: &SubsystemMask,
    support_b: &SubsystemMask,
    h: &Operator,
    times: &[f64],
    opts: &PauliAverageOptions,
) -> Result<Vec<PauliAverage>> {
    let n = validate(rho, support_a, support_b, h)?;
    let spectrum = eig_hermitian(h)?;
    let pairs = group_size(support_a) * group_size(support_b);
    let exact = match opts.enumeration {
        Enumeration::Exact => true,
        Enumeration::Sampled => false,
        Enumeration::Auto => pairs <= EXACT_PAIR_LIMIT,
    };
    if exact {
        Ok(times
            .iter()
            .map(|&t| exact_closed(rho, support_a, support_b, &spectrum, t, n, opts.include_identity))
            .collect())
    } else {
        sampled_closed(rho, support_a, support_b, &spectrum, times, n, opts)
    }
}

fn exact_closed(
    rho: &DensityMatrix,
    a: &SubsystemMask,
    b: &SubsystemMask,
    spectrum: &Spectrum,
    t: f64,
    n: usize,
    include_identity: bool,
) -> PauliAverage {
    let na = group_size(a);
    let nb = group_size(b);
    let d_b = (1usize << b.len()) as f64;
    let keep = b.complement(n).expect("A is non-empty and disjoint from B");
    let u = spectrum.propagator(t);
    let rho_t = u.conjugate(rho.operator());
    let terms: Vec<f64> = (0..na)
        .into_par_iter()
        .map(|code| {
            let o_a = pauli_string_on(a, n, code).expect("valid support").operator();
            let x = u.conjugate(&o_a);
            let y = Operator::from_matrix(dense::matmul(rho_t.matrix(), x.matrix()));
            let ry = partial_trace_operator(&y, &keep).expect("valid mask");
            let rx = partial_trace_operator(&x, &keep).expect("valid mask");
            dense::trace_of_product(ry.matrix(), rx.matrix()).re / d_b
        })
        .collect();
    let full = pairwise_sum(&terms) / na as f64;
    let value = if include_identity {
        full
    } else {
        exclude_identity(full, na, nb)
    };
    PauliAverage {
        value,
        stderr: 0.0,
        n_terms: if include_identity { na * nb } else { (na - 1) * (nb - 1) },
        exact: true,
    }
}

fn sampled_closed(
    rho: &DensityMatrix,
    a: &SubsystemMask,
    b: &SubsystemMask,
    spectrum: &Spectrum,
    times: &[f64],
    n: usize,
    opts: &PauliAverageOptions,
) -> Result<Vec<PauliAverage>> {
    if opts.samples == 0 {
        return Err(ScrambleError::config("otoc_samples", "must be at least 1"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(opts.seed);
    let draws: Vec<(PauliString, PauliString)> = (0..opts.samples)
        .map(|_| {
            let ca = draw_code(&mut rng, group_size(a), opts.include_identity);
            let cb = draw_code(&mut rng, group_size(b), opts.include_identity);
            Ok((pauli_string_on(a, n, ca)?, pauli_string_on(b, n, cb)?))
        })
        .collect::<Result<_>>()?;
    Ok(times
        .iter()
        .map(|&t| {
            let u = spectrum.propagator(t);
            let values: Vec<f64> = draws
                .par_iter()
                .map(|(pa, pb)| {
                    let x = u.conjugate_adj(&pb.operator());
                    let m = dense::matmul(pa.operator().matrix(), x.matrix());
                    let mm = dense::matmul(&m, &m);
                    dense::trace_of_product(rho.matrix(), &mm).re
                })
                .collect();
            let (value, stderr) = mean_and_stderr(&values);
            PauliAverage {
                value,
                stderr,
                n_terms: values.len(),
                exact: false,
            }
        })
        .collect())
}

/// Open-system analogue of `Ō(t)`: `O_B(t)` is replaced by the adjoint-channel
/// image `ℰ†_t(O_B)`, i.e. `mean Re tr[ρ O_A ℰ†_t(O_B) O_A ℰ†_t(O_B)]`.
///
/// The `O_A` average is exact (twirl); the `O_B` average is enumerated when the
/// group on `B` has at most [`OPEN_EXACT_LIMIT`] elements (or when forced) and
/// sampled with `opts.samples` draws otherwise. With `γ = 0` this coincides
/// with [`pauli_averaged_otoc_series`].
pub fn open_pauli_averaged_otoc_series(
    rho: &DensityMatrix,
    support_a: &SubsystemMask,
    support_b: &SubsystemMask,
    spec: &LindbladSpec,
    times: &[f64],
    opts: &PauliAverageOptions,
) -> Result<Vec<PauliAverage>> {
    let n = validate(rho, support_a, support_b, spec.hamiltonian())?;
    let propagator = LindbladPropagator::new(spec, Picture::Heisenberg)?;
    let na = group_size(support_a);
    let nb = group_size(support_b);
    let exact = match opts.enumeration {
        Enumeration::Exact => true,
        Enumeration::Sampled => false,
        Enumeration::Auto => nb <= OPEN_EXACT_LIMIT,
    };
    let codes: Vec<usize> = if exact {
        let start = if opts.include_identity { 0 } else { 1 };
        (start..nb).collect()
    } else {
        if opts.samples == 0 {
            return Err(ScrambleError::config("otoc_samples", "must be at least 1"));
        }
        let mut rng = ChaCha20Rng::seed_from_u64(opts.seed);
        (0..opts.samples)
            .map(|_| draw_code(&mut rng, nb, opts.include_identity))
            .collect()
    };
    let twirl: Vec<PauliString> = (0..na)
        .map(|code| pauli_string_on(support_a, n, code))
        .collect::<Result<_>>()?;

    // per O_B: the value at every time
    let per_b: Vec<Vec<f64>> = codes
        .par_iter()
        .map(|&code| -> Result<Vec<f64>> {
            let o_b = pauli_string_on(support_b, n, code)?.operator();
            let series = propagator.series(o_b.matrix(), times)?;
            Ok(series
                .iter()
                .map(|x| open_term(rho.matrix(), x, &twirl, opts.include_identity))
                .collect())
        })
        .collect::<Result<_>>()?;

    Ok((0..times.len())
        .map(|k| {
            let values: Vec<f64> = per_b.iter().map(|v| v[k]).collect();
            let (value, stderr) = if exact {
                (pairwise_sum(&values) / values.len() as f64, 0.0)
            } else {
                mean_and_stderr(&values)
            };
            PauliAverage {
                value,
                stderr,
                n_terms: values.len(),
                exact,
            }
        })
        .collect())
}

/// `mean_{O_A} Re tr[ρ O_A X O_A X]` for a fixed `X`.
fn open_term(rho: &Matrix, x: &Matrix, twirl: &[PauliString], include_identity: bool) -> f64 {
    let na = twirl.len();
    let mut averaged = Matrix::zeros(x.nrows(), x.ncols());
    for p in twirl {
        averaged += p.conjugate_matrix(x);
    }
    averaged /= dense::C64::new(na as f64, 0.0);
    let xr = dense::matmul(x, rho);
    let full = dense::trace_of_product(&averaged, &xr).re;
    if include_identity {
        full
    } else {
        // drop the O_A = I term tr[ρ X X]
        let xx = dense::matmul_op(x, Op::N, x, Op::N);
        let identity_term = dense::trace_of_product(rho, &xx).re;
        (full * na as f64 - identity_term) / (na as f64 - 1.0)
    }
}
