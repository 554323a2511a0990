//! Flat key–value TOML configuration documents.
//!
//! ```toml
//! schema_version = 1
//! model = "syk"
//! n_majorana = 12
//! seed = 7
//! gamma_levels = [0.0, 0.05, 1.0]
//! ```
//!
//! Every key except `model` is optional; unknown keys are rejected.

use serde::Deserialize;

use crate::dynamics::{ComputationalJumps, DecoherenceBasis};
use crate::ensemble::{Diagnostic, ExperimentConfig, InitialState, ModelConfig, Partition, SamplingConfig, TimeGrid};
use crate::error::{Result, ScrambleError};
use crate::linalg::state::SubsystemMask;

/// Schema version understood by this build.
pub const SCHEMA_VERSION: u32 = 1;

/// Coupling order used when a SYK document leaves `q` out.
pub const DEFAULT_Q: usize = 4;

/// Disorder realizations when a document leaves `n_realizations` out.
pub const DEFAULT_REALIZATIONS: usize = 100;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    schema_version: Option<u32>,
    model: Option<String>,
    n_majorana: Option<usize>,
    q: Option<usize>,
    n_spins: Option<usize>,
    j_scale: Option<f64>,
    seed: Option<u64>,
    initial_state: Option<InitialState>,
    decoherence: Option<String>,
    computational_jumps: Option<ComputationalJumps>,
    gamma_over_j: Option<f64>,
    gamma_levels: Option<Vec<f64>>,
    t_max: Option<f64>,
    n_points: Option<usize>,
    n_realizations: Option<usize>,
    diagnostics: Option<Vec<Diagnostic>>,
    subsystem_a: Option<Vec<usize>>,
    subsystem_b: Option<Vec<usize>>,
    subsystem_c: Option<Vec<usize>>,
    include_identity: Option<bool>,
    otoc_samples: Option<usize>,
    open_otoc_samples: Option<usize>,
}

/// A parsed document: the experiment plus the `γ/J` levels to sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigDocument {
    pub experiment: ExperimentConfig,
    /// `gamma_levels`, or the single `gamma_over_j`; `None` when the document
    /// sets neither.
    pub gamma_levels: Option<Vec<f64>>,
    /// Whether the document sets `decoherence` explicitly.
    pub decoherence_given: bool,
}

/// Parses and validates a configuration document, applying defaults
/// (`q = 4`, `j_scale = 1`, grid `[0, 10]` with 101 points, 100
/// realizations, closed dynamics, diagnostics `otoc_avg` and `mutual_info`).
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    Ok(parse_document(text)?.experiment)
}

pub fn parse_document(text: &str) -> Result<ConfigDocument> {
    let raw: RawDocument = toml::from_str(text).map_err(|e| ScrambleError::Parse(e.to_string().trim_end().to_string()))?;
    resolve(raw)
}

fn mask(field: &str, indices: Vec<usize>) -> Result<SubsystemMask> {
    SubsystemMask::new(indices).map_err(|e| ScrambleError::config(field, e.to_string()))
}

fn forbid<T>(value: &Option<T>, field: &str, model: &str) -> Result<()> {
    match value {
        Some(_) => Err(ScrambleError::config(field, format!("not a parameter of the `{model}` model"))),
        None => Ok(()),
    }
}

fn resolve(raw: RawDocument) -> Result<ConfigDocument> {
    match raw.schema_version {
        None | Some(SCHEMA_VERSION) => {}
        Some(other) => {
            return Err(ScrambleError::config(
                "schema_version",
                format!("unsupported version {other}; this build reads version {SCHEMA_VERSION}"),
            ))
        }
    }
    let model_name = raw.model.as_deref().ok_or_else(|| ScrambleError::config("model", "missing"))?;
    let j_scale = raw.j_scale.unwrap_or(1.0);
    let model = match model_name {
        "syk" => {
            forbid(&raw.n_spins, "n_spins", "syk")?;
            ModelConfig::Syk {
                n_majorana: raw.n_majorana.ok_or_else(|| ScrambleError::config("n_majorana", "missing"))?,
                q: raw.q.unwrap_or(DEFAULT_Q),
                j_scale,
            }
        }
        "lmg" => {
            forbid(&raw.n_majorana, "n_majorana", "lmg")?;
            forbid(&raw.q, "q", "lmg")?;
            ModelConfig::Lmg {
                n_spins: raw.n_spins.ok_or_else(|| ScrambleError::config("n_spins", "missing"))?,
                j_scale,
            }
        }
        other => {
            return Err(ScrambleError::config(
                "model",
                format!("unknown model `{other}` (expected `syk` or `lmg`)"),
            ))
        }
    };
    model.validate()?;
    let n = model.n_qubits();

    let diagnostics = raw
        .diagnostics
        .unwrap_or_else(|| vec![Diagnostic::OtocAvg, Diagnostic::MutualInfo]);
    let wants_tmi = diagnostics.contains(&Diagnostic::Tmi) || raw.subsystem_c.is_some();
    let a = match raw.subsystem_a {
        Some(v) => mask("subsystem_a", v)?,
        None => SubsystemMask::single(0),
    };
    let b = match raw.subsystem_b {
        Some(v) => mask("subsystem_b", v)?,
        None if wants_tmi => SubsystemMask::single(if a.contains(1) { 0 } else { 1 }),
        None => a
            .complement(n)
            .ok_or_else(|| ScrambleError::config("subsystem_a", "leaves no qubits for B"))?,
    };
    let c = match raw.subsystem_c {
        Some(v) => Some(mask("subsystem_c", v)?),
        None if wants_tmi => Partition::default_third(&a, &b, n),
        None => None,
    };
    let defaults = TimeGrid {
        t_max: 10.0,
        n_points: 101,
    };
    let mut cfg = ExperimentConfig {
        model,
        initial_state: InitialState::default(),
        decoherence: None,
        computational_jumps: ComputationalJumps::default(),
        gamma_over_j: 0.0,
        time_grid: TimeGrid {
            t_max: raw.t_max.unwrap_or(defaults.t_max),
            n_points: raw.n_points.unwrap_or(defaults.n_points),
        },
        n_realizations: raw.n_realizations.unwrap_or(DEFAULT_REALIZATIONS),
        master_seed: raw.seed.unwrap_or(0),
        diagnostics,
        partition: Partition { a, b, c },
        sampling: SamplingConfig::default(),
    };

    let decoherence_given = raw.decoherence.is_some();
    if let Some(state) = raw.initial_state {
        cfg.initial_state = state;
    }
    cfg.decoherence = match raw.decoherence.as_deref() {
        None | Some("none") => None,
        Some(name) => Some(name.parse::<DecoherenceBasis>().map_err(|_| {
            ScrambleError::config(
                "decoherence",
                format!("unknown basis `{name}` (expected `none`, `computational` or `energy`)"),
            )
        })?),
    };
    if let Some(jumps) = raw.computational_jumps {
        cfg.computational_jumps = jumps;
    }
    let gamma_levels = match (raw.gamma_levels, raw.gamma_over_j) {
        (Some(_), Some(_)) => {
            return Err(ScrambleError::config(
                "gamma_levels",
                "give either `gamma_levels` or `gamma_over_j`, not both",
            ))
        }
        (Some(levels), None) if levels.is_empty() => {
            return Err(ScrambleError::config("gamma_levels", "must list at least one level"))
        }
        (Some(levels), None) => Some(levels),
        (None, g) => g.map(|g| vec![g]),
    };
    let levels = gamma_levels.clone().unwrap_or_else(|| vec![0.0]);
    for &g in &levels {
        if !(g >= 0.0 && g.is_finite()) {
            return Err(ScrambleError::config(
                "gamma_levels",
                format!("levels must be finite and non-negative, got {g}"),
            ));
        }
    }
    cfg.gamma_over_j = levels[0];

    if let Some(flag) = raw.include_identity {
        cfg.sampling.include_identity = flag;
    }
    if let Some(s) = raw.otoc_samples {
        cfg.sampling.otoc_samples = s;
    }
    if let Some(s) = raw.open_otoc_samples {
        cfg.sampling.open_otoc_samples = s;
    }
    cfg.normalize();
    for &g in &levels {
        let mut level = cfg.clone();
        level.gamma_over_j = g;
        level.validate()?;
    }
    Ok(ConfigDocument {
        experiment: cfg,
        gamma_levels,
        decoherence_given,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_syk_document_gets_defaults() {
        let cfg = parse_config("model = \"syk\"\nn_majorana = 12\nseed = 7\n").unwrap();
        assert_eq!(
            cfg.model,
            ModelConfig::Syk {
                n_majorana: 12,
                q: 4,
                j_scale: 1.0
            }
        );
        assert_eq!(cfg.master_seed, 7);
        assert_eq!(cfg.time_grid.t_max, 10.0);
        assert_eq!(cfg.time_grid.n_points, 101);
        assert_eq!(cfg.n_realizations, 100);
        assert_eq!(cfg.decoherence, None);
        assert_eq!(cfg.partition.a.indices(), &[0]);
        assert_eq!(cfg.partition.b.indices(), &[1, 2, 3, 4, 5]);
    }

    #[test]
    fn odd_majorana_count_names_the_field() {
        let err = parse_config("model = \"syk\"\nn_majorana = 13\n").unwrap_err();
        assert!(matches!(&err, ScrambleError::Config { field, .. } if field == "n_majorana"), "{err}");
    }

    #[test]
    fn unknown_key_is_rejected_by_name() {
        let err = parse_config("model = \"syk\"\nn_majorana = 12\nfoo = 1\n").unwrap_err();
        assert!(matches!(err, ScrambleError::Parse(_)));
        assert!(err.to_string().contains("foo"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_line_context() {
        let err = parse_config("model = \"syk\"\nn_majorana = = 12\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn schema_version_is_checked() {
        assert!(parse_config("schema_version = 1\nmodel = \"lmg\"\nn_spins = 4\n").is_ok());
        let err = parse_config("schema_version = 2\nmodel = \"lmg\"\nn_spins = 4\n").unwrap_err();
        assert!(matches!(&err, ScrambleError::Config { field, .. } if field == "schema_version"));
    }

    #[test]
    fn sweep_and_partition_keys() {
        let doc = parse_document(
            "model = \"syk\"\nn_majorana = 8\ndecoherence = \"energy\"\ngamma_levels = [0.0, 0.05, 1.0]\n\
             diagnostics = [\"tmi\"]\nsubsystem_a = [3]\nsubsystem_b = [0]\n",
        )
        .unwrap();
        assert_eq!(doc.gamma_levels, Some(vec![0.0, 0.05, 1.0]));
        assert!(doc.decoherence_given);
        assert_eq!(doc.experiment.decoherence, Some(DecoherenceBasis::Energy));
        assert_eq!(doc.experiment.partition.c.as_ref().unwrap().indices(), &[1]); // qubit 2 stays out as the reference
    }

    #[test]
    fn model_specific_keys_are_checked() {
        let err = parse_config("model = \"lmg\"\nn_spins = 4\nq = 4\n").unwrap_err();
        assert!(matches!(&err, ScrambleError::Config { field, .. } if field == "q"));
        let err = parse_config("model = \"syk\"\n").unwrap_err();
        assert!(matches!(&err, ScrambleError::Config { field, .. } if field == "n_majorana"));
        let err = parse_config("model = \"syk\"\nn_majorana = 8\nt_max = -1.0\n").unwrap_err();
        assert!(matches!(&err, ScrambleError::Config { field, .. } if field == "t_max"));
    }
}
