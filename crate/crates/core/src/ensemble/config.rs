//! Fully resolved experiment description.

use serde::{Deserialize, Serialize};

use crate::dynamics::{ComputationalJumps, DecoherenceBasis};
use crate::error::{Result, ScrambleError};
use crate::linalg::operator::Operator;
use crate::linalg::state::{DensityMatrix, SubsystemMask};
use crate::models::{all_up_state, build_lmg, build_syk, neel_state, sample_syk_couplings, LmgSpec, SykSpec};

/// Largest system for which the system + environment decomposition is run
/// (the joint register has twice as many qubits).
pub const MAX_DECOMPOSITION_QUBITS: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelConfig {
    Syk { n_majorana: usize, q: usize, j_scale: f64 },
    Lmg { n_spins: usize, j_scale: f64 },
}

impl ModelConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ModelConfig::Syk { .. } => "syk",
            ModelConfig::Lmg { .. } => "lmg",
        }
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            ModelConfig::Syk { n_majorana, .. } => n_majorana / 2,
            ModelConfig::Lmg { n_spins, .. } => *n_spins,
        }
    }

    pub fn j_scale(&self) -> f64 {
        match self {
            ModelConfig::Syk { j_scale, .. } | ModelConfig::Lmg { j_scale, .. } => *j_scale,
        }
    }

    /// Whether realizations differ (disorder) or are all identical.
    pub fn is_disordered(&self) -> bool {
        matches!(self, ModelConfig::Syk { .. })
    }

    /// Checks the parameters; errors name the offending field.
    pub fn validate(&self) -> Result<()> {
        let checked = match self {
            ModelConfig::Syk { n_majorana, q, j_scale } => SykSpec::new(*n_majorana, *q, *j_scale, 0).map(|_| ()),
            ModelConfig::Lmg { n_spins, j_scale } => LmgSpec::new(*n_spins, *j_scale).map(|_| ()),
        };
        checked.map_err(|e| match e {
            ScrambleError::InvalidModel(message) => {
                // model messages lead with the parameter they reject
                let field = ["n_majorana", "n_spins", "q", "j_scale"]
                    .into_iter()
                    .find(|f| message.split_whitespace().next() == Some(*f))
                    .unwrap_or("model");
                ScrambleError::config(field, message)
            }
            other => other,
        })
    }

    /// Hamiltonian of the realization drawn from `seed` (ignored without disorder).
    pub fn build(&self, seed: u64) -> Result<Operator> {
        match self {
            ModelConfig::Syk { n_majorana, q, j_scale } => {
                let spec = SykSpec::new(*n_majorana, *q, *j_scale, seed)?;
                build_syk(&spec, &sample_syk_couplings(&spec)?)
            }
            ModelConfig::Lmg { n_spins, j_scale } => build_lmg(&LmgSpec::new(*n_spins, *j_scale)?),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// `|0…0⟩`.
    #[default]
    AllUp,
    /// `|0101…⟩`.
    Neel,
}

impl InitialState {
    pub fn build(self, n_qubits: usize) -> Result<DensityMatrix> {
        match self {
            InitialState::AllUp => all_up_state(n_qubits),
            InitialState::Neel => neel_state(n_qubits),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            InitialState::AllUp => "all_up",
            InitialState::Neel => "neel",
        }
    }
}

/// Quantities a run can record.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Diagnostic {
    OtocAvg,
    MutualInfo,
    Tmi,
    OpenOtoc,
    Bound,
    Decomposition,
}

impl Diagnostic {
    pub const ALL: [Diagnostic; 6] = [
        Diagnostic::OtocAvg,
        Diagnostic::MutualInfo,
        Diagnostic::Tmi,
        Diagnostic::OpenOtoc,
        Diagnostic::Bound,
        Diagnostic::Decomposition,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Diagnostic::OtocAvg => "otoc_avg",
            Diagnostic::MutualInfo => "mutual_info",
            Diagnostic::Tmi => "tmi",
            Diagnostic::OpenOtoc => "open_otoc",
            Diagnostic::Bound => "bound",
            Diagnostic::Decomposition => "decomposition",
        }
    }

    /// Names of the traces this diagnostic contributes, in column order.
    pub fn trace_names(self) -> &'static [&'static str] {
        match self {
            Diagnostic::OtocAvg => &["otoc_avg", "one_minus_otoc_avg"],
            Diagnostic::MutualInfo => &["mutual_info"],
            Diagnostic::Tmi => &["tmi"],
            Diagnostic::OpenOtoc => &["open_otoc"],
            Diagnostic::Bound => &["bound_residual"],
            Diagnostic::Decomposition => &[
                "mutual_info_se",
                "delta_s_exchange",
                "rel_entropy_env",
                "delta_s_system",
                "decomposition_residual",
            ],
        }
    }
}

impl std::str::FromStr for Diagnostic {
    type Err = ScrambleError;

    fn from_str(s: &str) -> Result<Self> {
        Diagnostic::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| ScrambleError::config("diagnostics", format!("unknown diagnostic `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t_max: f64,
    pub n_points: usize,
}

impl TimeGrid {
    /// `n_points` equally spaced times on `[0, t_max]`, endpoints included.
    pub fn times(&self) -> Vec<f64> {
        let last = (self.n_points - 1) as f64;
        (0..self.n_points).map(|k| self.t_max * k as f64 / last).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points < 2 {
            return Err(ScrambleError::config("n_points", format!("must be >= 2, got {}", self.n_points)));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(ScrambleError::config("t_max", format!("must be positive, got {}", self.t_max)));
        }
        Ok(())
    }
}

/// Subsystems used by the diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Partition {
    pub a: SubsystemMask,
    pub b: SubsystemMask,
    /// Third party for the tripartite information.
    pub c: Option<SubsystemMask>,
}

impl Partition {
    /// `A` = qubit 0 and `B` = every other qubit; with a third party,
    /// `B` = qubit 1 and `C` = [`Partition::default_third`].
    pub fn default_for(n_qubits: usize, with_third: bool) -> Result<Self> {
        let needed = if with_third { 3 } else { 2 };
        if n_qubits < needed {
            return Err(ScrambleError::config(
                "model",
                format!("the default partition needs at least {needed} qubits, model has {n_qubits}"),
            ));
        }
        let a = SubsystemMask::single(0);
        if with_third {
            let b = SubsystemMask::single(1);
            let c = Self::default_third(&a, &b, n_qubits);
            Ok(Partition { a, b, c })
        } else {
            Ok(Partition {
                a,
                b: SubsystemMask::range(1, n_qubits)?,
                c: None,
            })
        }
    }

    /// The qubits outside `A ∪ B`, minus the highest one when at least two
    /// remain. That qubit stays out as a reference: the tripartite
    /// information of a pure state on `A ∪ B ∪ C` vanishes identically.
    pub fn default_third(a: &SubsystemMask, b: &SubsystemMask, n_qubits: usize) -> Option<SubsystemMask> {
        let rest = a.union(b).complement(n_qubits)?;
        if rest.len() < 2 {
            return Some(rest);
        }
        SubsystemMask::new(rest.indices()[..rest.len() - 1].to_vec()).ok()
    }
}

/// Pauli-average settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingConfig {
    pub include_identity: bool,
    /// Pairs drawn when a closed-dynamics average is too large to enumerate.
    pub otoc_samples: usize,
    /// `O_B` strings drawn per realization for the open-dynamics average.
    pub open_otoc_samples: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            include_identity: true,
            otoc_samples: crate::diagnostics::DEFAULT_PAIR_SAMPLES,
            open_otoc_samples: DEFAULT_OPEN_OTOC_SAMPLES,
        }
    }
}

/// Default `O_B` draws per realization for open-dynamics averages.
pub const DEFAULT_OPEN_OTOC_SAMPLES: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub initial_state: InitialState,
    /// `None` for closed dynamics.
    pub decoherence: Option<DecoherenceBasis>,
    pub computational_jumps: ComputationalJumps,
    /// `ħγ/J`.
    pub gamma_over_j: f64,
    pub time_grid: TimeGrid,
    pub n_realizations: usize,
    pub master_seed: u64,
    /// Distinct, in canonical order.
    pub diagnostics: Vec<Diagnostic>,
    pub partition: Partition,
    pub sampling: SamplingConfig,
}

impl ExperimentConfig {
    /// Closed-dynamics defaults for `model`: all-up state, grid `[0, 10]` with
    /// 101 points, 100 realizations and [`Partition::default_for`].
    pub fn new(model: ModelConfig, master_seed: u64, diagnostics: Vec<Diagnostic>) -> Result<Self> {
        let partition = Partition::default_for(model.n_qubits(), diagnostics.contains(&Diagnostic::Tmi))?;
        let mut cfg = ExperimentConfig {
            model,
            initial_state: InitialState::AllUp,
            decoherence: None,
            computational_jumps: ComputationalJumps::LocalZ,
            gamma_over_j: 0.0,
            time_grid: TimeGrid {
                t_max: 10.0,
                n_points: 101,
            },
            n_realizations: 100,
            master_seed,
            diagnostics,
            partition,
            sampling: SamplingConfig::default(),
        };
        cfg.normalize();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn n_qubits(&self) -> usize {
        self.model.n_qubits()
    }

    /// `γ` in absolute units.
    pub fn gamma(&self) -> f64 {
        self.gamma_over_j * self.model.j_scale()
    }

    /// Whether the dynamics is open (a basis is set and `γ > 0`).
    pub fn is_open(&self) -> bool {
        self.decoherence.is_some() && self.gamma_over_j > 0.0
    }

    pub fn wants(&self, d: Diagnostic) -> bool {
        self.diagnostics.contains(&d)
    }

    /// Sorts and deduplicates the diagnostic list.
    pub fn normalize(&mut self) {
        self.diagnostics.sort();
        self.diagnostics.dedup();
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.time_grid.validate()?;
        if self.n_realizations == 0 {
            return Err(ScrambleError::config("n_realizations", "must be at least 1"));
        }
        if !(self.gamma_over_j >= 0.0 && self.gamma_over_j.is_finite()) {
            return Err(ScrambleError::config(
                "gamma_over_j",
                format!("must be finite and non-negative, got {}", self.gamma_over_j),
            ));
        }
        if self.diagnostics.is_empty() {
            return Err(ScrambleError::config("diagnostics", "at least one diagnostic is required"));
        }
        if self.initial_state == InitialState::Neel && self.n_qubits() < 2 {
            return Err(ScrambleError::config("initial_state", "Néel state needs at least 2 qubits"));
        }
        if self.sampling.otoc_samples == 0 {
            return Err(ScrambleError::config("otoc_samples", "must be at least 1"));
        }
        if self.sampling.open_otoc_samples == 0 {
            return Err(ScrambleError::config("open_otoc_samples", "must be at least 1"));
        }

        let n = self.n_qubits();
        let Partition { a, b, c } = &self.partition;
        let in_range = |mask: &SubsystemMask, field: &str| {
            mask.validate(n).map_err(|e| ScrambleError::config(field, e.to_string()))
        };
        in_range(a, "subsystem_a")?;
        in_range(b, "subsystem_b")?;
        a.check_disjoint(b)
            .map_err(|e| ScrambleError::config("subsystem_b", e.to_string()))?;
        if let Some(c) = c {
            in_range(c, "subsystem_c")?;
            for other in [a, b] {
                c.check_disjoint(other)
                    .map_err(|e| ScrambleError::config("subsystem_c", e.to_string()))?;
            }
        }
        if self.wants(Diagnostic::Tmi) && c.is_none() {
            return Err(ScrambleError::config("subsystem_c", "required by the `tmi` diagnostic"));
        }
        if self.wants(Diagnostic::Bound) {
            if self.is_open() {
                return Err(ScrambleError::config(
                    "diagnostics",
                    "`bound` applies to closed dynamics only; set gamma_over_j = 0 or decoherence = \"none\"",
                ));
            }
            if a.len() + b.len() != n {
                return Err(ScrambleError::config(
                    "subsystem_b",
                    "`bound` needs A and B to cover every qubit",
                ));
            }
        }
        if self.wants(Diagnostic::Decomposition) && !(2..=MAX_DECOMPOSITION_QUBITS).contains(&n) {
            return Err(ScrambleError::config(
                "diagnostics",
                format!("`decomposition` supports 2..={MAX_DECOMPOSITION_QUBITS} system qubits, model has {n}"),
            ));
        }
        Ok(())
    }

    /// Canonical JSON form (used by run manifests).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| ScrambleError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}
