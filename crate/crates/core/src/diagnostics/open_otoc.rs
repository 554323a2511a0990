//! Bipartite OTOC of an open system: the averaged Hilbert–Schmidt norm of the
//! commutator between an evolved operator on `A` and a static one on `B`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use super::pauli_average::{mean_and_stderr, Enumeration, PauliAverage, PauliAverageOptions};
use crate::dynamics::{LindbladPropagator, LindbladSpec, Picture};
use crate::error::{Result, ScrambleError};
use crate::linalg::dense::{self, pairwise_sum, Matrix};
use crate::linalg::operator::Operator;
use crate::linalg::pauli::pauli_string_on;
use crate::linalg::state::{partial_trace_operator, SubsystemMask};

/// Size of `A` up to which the `V_A` average is enumerated exactly.
pub const OPEN_OTOC_EXACT_QUBITS: usize = 3;

/// Allowed deviation of `ℰ†(I)` from `I`.
pub const UNITALITY_TOL: f64 = 1e-8;

/// `(1/2d) · mean_{V_A, W_B} ‖[ℰ†_t(V_A), W_B]‖₂²` with Pauli `V_A`, `W_B`
/// (identity strings included).
pub fn open_bipartite_otoc(spec: &LindbladSpec, support_a: &SubsystemMask, support_b: &SubsystemMask, t: f64) -> Result<f64> {
    Ok(open_bipartite_otoc_series(spec, support_a, support_b, &[t], &PauliAverageOptions::default())?[0].value)
}

/// The bipartite OTOC on a time grid.
///
/// The `W_B` average is always exact through the twirl
/// `mean_W ‖[X, W]‖² = 2‖X‖² - (2/d_B)‖tr_B X‖²`; the `V_A` average is
/// enumerated when `A` has at most [`OPEN_OTOC_EXACT_QUBITS`] qubits and
/// sampled otherwise, so the result is exact whatever the size of `B`.
pub fn open_bipartite_otoc_series(
    spec: &LindbladSpec,
    support_a: &SubsystemMask,
    support_b: &SubsystemMask,
    times: &[f64],
    opts: &PauliAverageOptions,
) -> Result<Vec<PauliAverage>> {
    let n = spec.n_qubits();
    support_a.validate(n)?;
    support_b.validate(n)?;
    support_a.check_disjoint(support_b)?;
    let propagator = LindbladPropagator::new(spec, Picture::Heisenberg)?;

    let identity = Operator::identity(n);
    for (t, image) in times.iter().zip(propagator.series(identity.matrix(), times)?) {
        let residual = dense::max_abs(&(image - identity.matrix()));
        if residual > UNITALITY_TOL {
            return Err(ScrambleError::ContractViolation(format!(
                "adjoint channel is not unital at t = {t}: max |E†(I) - I| = {residual:.3e}"
            )));
        }
    }

    let na = 1usize << (2 * support_a.len());
    let nb = 1usize << (2 * support_b.len());
    let d = spec.dim() as f64;
    let d_b = (1usize << support_b.len()) as f64;
    let keep = support_b.complement(n).expect("A is non-empty and disjoint from B");
    let exact = match opts.enumeration {
        Enumeration::Exact => true,
        Enumeration::Sampled => false,
        Enumeration::Auto => support_a.len() <= OPEN_OTOC_EXACT_QUBITS,
    };
    let first = usize::from(!opts.include_identity);
    let codes: Vec<usize> = if exact {
        (first..na).collect()
    } else {
        if opts.samples == 0 {
            return Err(ScrambleError::config("otoc_samples", "must be at least 1"));
        }
        let mut rng = ChaCha20Rng::seed_from_u64(opts.seed);
        (0..opts.samples).map(|_| rng.random_range(first..na)).collect()
    };
    // the identity W_B commutes with everything; excluding it rescales the mean
    let w_factor = if opts.include_identity {
        1.0
    } else {
        nb as f64 / (nb as f64 - 1.0)
    };

    let per_a: Vec<Vec<f64>> = codes
        .par_iter()
        .map(|&code| -> Result<Vec<f64>> {
            let v_a = pauli_string_on(support_a, n, code)?.operator();
            Ok(propagator
                .series(v_a.matrix(), times)?
                .iter()
                .map(|x| w_factor * twirled_commutator_norm(x, &keep, d_b) / (2.0 * d))
                .collect())
        })
        .collect::<Result<_>>()?;

    Ok((0..times.len())
        .map(|k| {
            let values: Vec<f64> = per_a.iter().map(|v| v[k]).collect();
            let (value, stderr) = if exact {
                (pairwise_sum(&values) / values.len() as f64, 0.0)
            } else {
                mean_and_stderr(&values)
            };
            PauliAverage {
                value: value.max(0.0),
                stderr,
                n_terms: values.len(),
                exact,
            }
        })
        .collect())
}

/// `mean_{W_B} ‖[X, W_B]‖₂²` over the full Pauli group on `B`.
fn twirled_commutator_norm(x: &Matrix, keep: &SubsystemMask, d_b: f64) -> f64 {
    let reduced = partial_trace_operator(&Operator::from_matrix(x.clone()), keep).expect("valid mask");
    2.0 * dense::frobenius_norm(x).powi(2) - 2.0 / d_b * reduced.frobenius_norm().powi(2)
}
