//! Disorder-realization orchestration: seeded per-realization experiments run
//! on a worker pool and reduced into mean / standard-error time series.

mod config;

pub use config::{
    Diagnostic, ExperimentConfig, InitialState, ModelConfig, Partition, SamplingConfig, TimeGrid,
    DEFAULT_OPEN_OTOC_SAMPLES, MAX_DECOMPOSITION_QUBITS,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{
    bound_series, decomposition_series, mutual_information, open_bipartite_otoc_series,
    open_pauli_averaged_otoc_series, pauli_averaged_otoc_series, tripartite_mutual_information, Enumeration,
    PauliAverageOptions,
};
use crate::dynamics::{build_joint_dephasing_model, evolve_lindblad_series, LindbladSpec};
use crate::error::{Result, ScrambleError};
use crate::linalg::dense::pairwise_sum;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Stream label for the Pauli-sampling seed derived from a realization seed.
const PAULI_STREAM: u64 = 0x5041_554C_4921;

/// SplitMix64 finalizer: a bijection on `u64`.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed of realization `index`: the SplitMix64 output at counter
/// position `index + 1` of the stream started at `master_seed`, i.e.
/// `mix64(master_seed + (index + 1)·φ)` with `φ` the 64-bit golden ratio.
///
/// `φ` is odd, so `index ↦ master_seed + (index + 1)·φ` is injective modulo
/// 2⁶⁴ and `mix64` is a bijection: distinct indices never collide.
pub fn realization_seed(master_seed: u64, index: u64) -> u64 {
    mix64(master_seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Traces of one realization, aligned with [`RealizationTraces::names`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealizationTraces {
    pub index: usize,
    pub seed: u64,
    pub times: Vec<f64>,
    pub names: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl RealizationTraces {
    pub fn trace(&self, name: &str) -> Option<&[f64]> {
        self.names.iter().position(|n| n == name).map(|k| self.values[k].as_slice())
    }
}

/// One aggregated quantity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub name: String,
    pub mean: Vec<f64>,
    /// Standard error of the mean, `std / √n` (0 for a single realization).
    pub stderr: Vec<f64>,
    /// Pointwise minimum over realizations.
    pub min: Vec<f64>,
    /// Number of realizations entering the statistics.
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealizationFailure {
    pub index: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub traces: Vec<Trace>,
    /// Realizations that errored and were left out of the statistics.
    pub failures: Vec<RealizationFailure>,
}

impl TimeSeries {
    pub fn trace(&self, name: &str) -> Option<&Trace> {
        self.traces.iter().find(|t| t.name == name)
    }
}

/// Runs realization `index` of `cfg` on the configured time grid.
///
/// The Hamiltonian is drawn from [`realization_seed`]; Pauli sampling (where
/// needed) uses a separate stream of the same seed, so it is shared between
/// runs that differ only in `γ` or the decoherence basis. Models without
/// disorder derive every seed from the master seed, which makes all their
/// realizations identical.
pub fn run_realization(cfg: &ExperimentConfig, index: usize) -> Result<RealizationTraces> {
    cfg.validate()?;
    realization_inner(cfg, index).map_err(|e| ScrambleError::Realization {
        index,
        source: Box::new(e),
    })
}

fn realization_inner(cfg: &ExperimentConfig, index: usize) -> Result<RealizationTraces> {
    let seed = realization_seed(cfg.master_seed, index as u64);
    let stream_base = if cfg.model.is_disordered() { seed } else { cfg.master_seed };
    let pauli_seed = realization_seed(stream_base, PAULI_STREAM);

    let n = cfg.n_qubits();
    let h = cfg.model.build(seed)?;
    let rho0 = cfg.initial_state.build(n)?;
    let times = cfg.time_grid.times();
    let spec = match cfg.decoherence {
        Some(basis) if cfg.is_open() => {
            LindbladSpec::dephasing_with(h.clone(), basis, cfg.computational_jumps, cfg.gamma())?
        }
        _ => LindbladSpec::unitary(h.clone())?,
    };
    let Partition { a, b, c } = &cfg.partition;
    let closed_opts = PauliAverageOptions {
        include_identity: cfg.sampling.include_identity,
        enumeration: Enumeration::Auto,
        samples: cfg.sampling.otoc_samples,
        seed: pauli_seed,
    };
    let open_opts = PauliAverageOptions {
        samples: cfg.sampling.open_otoc_samples,
        ..closed_opts.clone()
    };

    let mut names = Vec::new();
    let mut values = Vec::new();
    let mut push = |name: &str, v: Vec<f64>| {
        names.push(name.to_string());
        values.push(v);
    };

    // closed runs asking for the bound get Ō and ℐ from the same evaluation
    let bound = if cfg.wants(Diagnostic::Bound) {
        Some(bound_series(&rho0, a, b, &h, &times, &closed_opts)?)
    } else {
        None
    };
    let states = if cfg.wants(Diagnostic::Tmi) || (cfg.wants(Diagnostic::MutualInfo) && bound.is_none()) {
        Some(evolve_lindblad_series(&rho0, &spec, &times)?)
    } else {
        None
    };

    for diag in &cfg.diagnostics {
        match diag {
            Diagnostic::OtocAvg => {
                let otoc: Vec<f64> = match &bound {
                    Some(samples) => samples.iter().map(|s| s.otoc).collect(),
                    None if cfg.is_open() => open_pauli_averaged_otoc_series(&rho0, a, b, &spec, &times, &open_opts)?
                        .iter()
                        .map(|p| p.value)
                        .collect(),
                    None => pauli_averaged_otoc_series(&rho0, a, b, &h, &times, &closed_opts)?
                        .iter()
                        .map(|p| p.value)
                        .collect(),
                };
                let growth = otoc.iter().map(|o| 1.0 - o).collect();
                push("otoc_avg", otoc);
                push("one_minus_otoc_avg", growth);
            }
            Diagnostic::MutualInfo => {
                let mi = match (&bound, &states) {
                    (Some(samples), _) => samples.iter().map(|s| s.mutual_info).collect(),
                    (None, Some(states)) => states
                        .iter()
                        .map(|rho| mutual_information(rho, a, b))
                        .collect::<Result<Vec<_>>>()?,
                    (None, None) => unreachable!("states are evolved when mutual information is requested"),
                };
                push("mutual_info", mi);
            }
            Diagnostic::Tmi => {
                let c = c.as_ref().expect("validated: tmi has a third party");
                let states = states.as_ref().expect("states are evolved for tmi");
                let tmi = states
                    .iter()
                    .map(|rho| tripartite_mutual_information(rho, a, b, c))
                    .collect::<Result<Vec<_>>>()?;
                push("tmi", tmi);
            }
            Diagnostic::OpenOtoc => {
                let v = open_bipartite_otoc_series(&spec, a, b, &times, &open_opts)?
                    .iter()
                    .map(|p| p.value)
                    .collect();
                push("open_otoc", v);
            }
            Diagnostic::Bound => {
                let samples = bound.as_ref().expect("computed above");
                push("bound_residual", samples.iter().map(|s| s.residual).collect());
            }
            Diagnostic::Decomposition => {
                let model = build_joint_dephasing_model(n, &h, cfg.gamma())?;
                let records = decomposition_series(&model, &rho0, &times)?;
                push("mutual_info_se", records.iter().map(|r| r.mutual_info_se).collect());
                push("delta_s_exchange", records.iter().map(|r| r.delta_s_exchange).collect());
                push("rel_entropy_env", records.iter().map(|r| r.rel_entropy_env).collect());
                push("delta_s_system", records.iter().map(|r| r.delta_s_system).collect());
                push("decomposition_residual", records.iter().map(|r| r.residual()).collect());
            }
        }
    }

    Ok(RealizationTraces {
        index,
        seed,
        times,
        names,
        values,
    })
}

/// Runs every realization of `cfg` and aggregates them pointwise in time.
///
/// `threads = None` uses rayon's global pool. Results are collected in
/// realization order and reduced by a fixed pairwise tree, so the output is
/// bit-identical for any number of workers. Failed realizations are left out
/// and listed in [`TimeSeries::failures`]; the call errors only when every
/// realization fails.
pub fn run_ensemble(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<TimeSeries> {
    cfg.validate()?;
    let work = || -> Vec<Result<RealizationTraces>> {
        (0..cfg.n_realizations)
            .into_par_iter()
            .map(|index| run_realization(cfg, index))
            .collect()
    };
    let results = match threads {
        Some(count) => rayon::ThreadPoolBuilder::new()
            .num_threads(count)
            .build()
            .map_err(|e| ScrambleError::config("threads", e.to_string()))?
            .install(work),
        None => work(),
    };

    let mut successes = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    let mut first_error = None;
    for (index, result) in results.into_iter().enumerate() {
        match result {
            Ok(traces) => successes.push(traces),
            Err(e) => {
                failures.push(RealizationFailure {
                    index,
                    message: e.to_string(),
                });
                first_error.get_or_insert(e);
            }
        }
    }
    if successes.is_empty() {
        return Err(first_error.expect("at least one realization ran"));
    }
    let mut series = aggregate(&successes)?;
    series.failures = failures;
    Ok(series)
}

/// Pointwise mean, standard error and minimum over realizations (in the given
/// order) of traces that share names and time grid.
pub fn aggregate(realizations: &[RealizationTraces]) -> Result<TimeSeries> {
    let first = realizations
        .first()
        .ok_or_else(|| ScrambleError::ContractViolation("no realizations to aggregate".into()))?;
    for r in realizations {
        if r.names != first.names || r.times != first.times {
            return Err(ScrambleError::ContractViolation(format!(
                "realization {} has a different layout from realization {}",
                r.index, first.index
            )));
        }
    }
    let m = realizations.len();
    let traces = first
        .names
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let n_times = first.times.len();
            let mut mean = Vec::with_capacity(n_times);
            let mut stderr = Vec::with_capacity(n_times);
            let mut min = Vec::with_capacity(n_times);
            for j in 0..n_times {
                let column: Vec<f64> = realizations.iter().map(|r| r.values[k][j]).collect();
                let (mu, se) = mean_and_stderr(&column);
                mean.push(mu);
                stderr.push(se);
                min.push(column.iter().copied().fold(f64::INFINITY, f64::min));
            }
            Trace {
                name: name.clone(),
                mean,
                stderr,
                min,
                n: m,
            }
        })
        .collect();
    Ok(TimeSeries {
        times: first.times.clone(),
        traces,
        failures: Vec::new(),
    })
}

/// Mean and `sample std / √n` (0 for a single value).
fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = pairwise_sum(values) / m;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
    let var = pairwise_sum(&sq) / (m - 1.0);
    (mean, (var / m).sqrt())
}
