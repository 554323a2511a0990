//! Configuration ingestion, experiment commands and CSV/JSON emission.

mod config;
mod output;
mod selftest;

pub use config::{parse_config, parse_document, ConfigDocument, DEFAULT_Q, DEFAULT_REALIZATIONS, SCHEMA_VERSION};
pub use output::{
    emit_csv, format_value, manifest_path, read_csv, render_csv, RunManifest, ARTIFACT_VERSION,
    CSV_SIGNIFICANT_DIGITS,
};
pub use selftest::{run_selftest, SelftestOutcome};

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::diagnostics::BOUND_TOL;
use crate::dynamics::DecoherenceBasis;
use crate::ensemble::{run_ensemble, Diagnostic, ExperimentConfig, InitialState, ModelConfig, TimeSeries};
use crate::error::{Result, ScrambleError};
use crate::linalg::state::SubsystemMask;

/// Exit status for success.
pub const EXIT_OK: u8 = 0;
/// Exit status for invalid input (flags, configuration).
pub const EXIT_VALIDATION: u8 = 1;
/// Exit status for failures during computation, including bound violations.
pub const EXIT_RUNTIME: u8 = 2;

/// Weak and moderate decoherence levels swept next to closed dynamics.
pub const DEFAULT_GAMMA_LEVELS: [f64; 3] = [0.0, 0.05, 1.0];

#[derive(Debug, Parser)]
#[command(name = "scramble", version, about = "Information-scrambling experiments on SYK and LMG models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct RunArgs {
    /// TOML configuration document (replaces the command's built-in model).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Master seed.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Number of disorder realizations.
    #[arg(long, value_name = "N")]
    realizations: Option<usize>,
    /// Decoherence level ħγ/J; repeat to sweep several levels.
    #[arg(long, value_name = "F")]
    gamma: Vec<f64>,
    /// Dephasing basis for γ > 0.
    #[arg(long, value_name = "BASIS")]
    basis: Option<DecoherenceBasis>,
    /// Worker threads (falls back to SCRAMBLE_THREADS, then all cores).
    #[arg(long, value_name = "N", env = "SCRAMBLE_THREADS")]
    threads: Option<usize>,
    /// Validate and print the resolved plan without computing.
    #[arg(long)]
    dry_run: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pauli-averaged OTOC Ō(t) and 1 − Ō(t) for SYK (N = 12) across γ levels.
    SykOtoc(RunArgs),
    /// Mutual information ℐ(A:B)(t) for SYK (N = 12) across γ levels.
    SykMi(RunArgs),
    /// Mutual information for the LMG model.
    LmgMi {
        #[command(flatten)]
        run: RunArgs,
        /// Number of spins.
        #[arg(long, value_name = "N")]
        n: Option<usize>,
        /// Initial state.
        #[arg(long, value_name = "STATE", value_parser = parse_state)]
        state: Option<InitialState>,
    },
    /// Checks ℐ(t) ≥ Ō(0) − Ō(t) under closed SYK (N = 8) dynamics; exits
    /// nonzero on any violation.
    BoundCheck(RunArgs),
    /// Tripartite mutual information for SYK (N = 12).
    Tmi(RunArgs),
    /// Open-system bipartite OTOC for SYK (N = 12) across γ levels.
    OpenOtoc(RunArgs),
    /// System/environment entropy decomposition for SYK (N = 6) with a
    /// dephasing environment, across coupling levels.
    Decomposition(RunArgs),
    /// Runs the built-in oracle checks.
    Selftest,
}

fn parse_state(s: &str) -> std::result::Result<InitialState, String> {
    match s {
        "all_up" | "all-up" => Ok(InitialState::AllUp),
        "neel" => Ok(InitialState::Neel),
        other => Err(format!("unknown state `{other}` (expected `all_up` or `neel`)")),
    }
}

/// Built-in defaults of one experiment command.
struct CommandPlan {
    name: &'static str,
    template: &'static str,
    diagnostics: &'static [Diagnostic],
    gamma_levels: &'static [f64],
    /// File-name tag replacing the basis (the decomposition has no dephasing basis).
    basis_tag: Option<&'static str>,
}

const SYK_OTOC: CommandPlan = CommandPlan {
    name: "syk-otoc",
    template: "model = \"syk\"\nn_majorana = 12\n",
    diagnostics: &[Diagnostic::OtocAvg],
    gamma_levels: &DEFAULT_GAMMA_LEVELS,
    basis_tag: None,
};
const SYK_MI: CommandPlan = CommandPlan {
    name: "syk-mi",
    template: "model = \"syk\"\nn_majorana = 12\n",
    diagnostics: &[Diagnostic::MutualInfo],
    gamma_levels: &DEFAULT_GAMMA_LEVELS,
    basis_tag: None,
};
const LMG_MI: CommandPlan = CommandPlan {
    name: "lmg-mi",
    template: "model = \"lmg\"\nn_spins = 6\ninitial_state = \"neel\"\n",
    diagnostics: &[Diagnostic::MutualInfo],
    gamma_levels: &DEFAULT_GAMMA_LEVELS,
    basis_tag: None,
};
const BOUND_CHECK: CommandPlan = CommandPlan {
    name: "bound-check",
    template: "model = \"syk\"\nn_majorana = 8\nn_points = 51\n",
    diagnostics: &[Diagnostic::OtocAvg, Diagnostic::MutualInfo, Diagnostic::Bound],
    gamma_levels: &[0.0],
    basis_tag: None,
};
const TMI: CommandPlan = CommandPlan {
    name: "tmi",
    template: "model = \"syk\"\nn_majorana = 12\n",
    diagnostics: &[Diagnostic::Tmi],
    gamma_levels: &[0.0],
    basis_tag: None,
};
const OPEN_OTOC: CommandPlan = CommandPlan {
    name: "open-otoc",
    template: "model = \"syk\"\nn_majorana = 12\n",
    diagnostics: &[Diagnostic::OpenOtoc],
    gamma_levels: &DEFAULT_GAMMA_LEVELS,
    basis_tag: None,
};
const DECOMPOSITION: CommandPlan = CommandPlan {
    name: "decomposition",
    template: "model = \"syk\"\nn_majorana = 6\n",
    diagnostics: &[Diagnostic::Decomposition],
    gamma_levels: &[0.1, 0.5, 1.0],
    basis_tag: Some("joint"),
};

/// One resolved ensemble run and where its output goes.
#[derive(Clone, Debug)]
pub struct PlannedRun {
    pub config: ExperimentConfig,
    pub path: PathBuf,
}

fn basis_label(cfg: &ExperimentConfig, tag: Option<&str>) -> String {
    match (tag, cfg.decoherence) {
        (Some(tag), _) => tag.to_string(),
        (None, Some(basis)) => basis.as_str().to_string(),
        (None, None) => "closed".to_string(),
    }
}

/// Output file of one run: `{out}/{command}_{basis}_g{gamma}.csv`.
pub fn output_path(out: &Path, command: &str, basis: &str, gamma_over_j: f64) -> PathBuf {
    out.join(format!("{command}_{basis}_g{gamma_over_j}.csv"))
}

fn resolve_plan(
    plan: &CommandPlan,
    args: &RunArgs,
    tweak: impl Fn(&mut ExperimentConfig) -> Result<()>,
) -> Result<Vec<PlannedRun>> {
    let text = match &args.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| ScrambleError::config("config", format!("{}: {e}", path.display())))?,
        None => plan.template.to_string(),
    };
    let doc = parse_document(&text)?;
    let mut base = doc.experiment;
    base.diagnostics = plan.diagnostics.to_vec();
    base.normalize();
    if base.wants(Diagnostic::Tmi) && base.partition.c.is_none() {
        // B shrinks to one qubit if it covers everything but A
        let n = base.n_qubits();
        let a = base.partition.a.clone();
        if a.union(&base.partition.b).complement(n).is_none() {
            base.partition.b = SubsystemMask::single(if a.contains(1) { 0 } else { 1 });
        }
        base.partition.c = crate::ensemble::Partition::default_third(&a, &base.partition.b, n);
    }
    if let Some(seed) = args.seed {
        base.master_seed = seed;
    }
    if let Some(m) = args.realizations {
        base.n_realizations = m;
    }
    tweak(&mut base)?;
    let basis = match (args.basis, doc.decoherence_given) {
        (Some(b), _) => Some(b),
        (None, true) => base.decoherence,
        (None, false) => Some(DecoherenceBasis::Computational),
    };
    let levels = if !args.gamma.is_empty() {
        args.gamma.clone()
    } else {
        doc.gamma_levels.unwrap_or_else(|| plan.gamma_levels.to_vec())
    };
    levels
        .into_iter()
        .map(|g| {
            let mut cfg = base.clone();
            cfg.gamma_over_j = g;
            // γ = 0 is closed dynamics whatever the basis
            cfg.decoherence = if plan.basis_tag.is_some() || g == 0.0 { None } else { basis };
            cfg.validate()?;
            let label = basis_label(&cfg, plan.basis_tag);
            let path = output_path(&args.out, plan.name, &label, g);
            Ok(PlannedRun { config: cfg, path })
        })
        .collect()
}

/// Prints a line to stdout; a closed pipe (e.g. `| head`) is not an error.
fn say(line: std::fmt::Arguments<'_>) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}

fn summarize(series: &TimeSeries) -> String {
    series
        .traces
        .iter()
        .map(|t| {
            let last = t.mean.last().copied().unwrap_or(f64::NAN);
            format!("{}(t_end) = {}", t.name, format_value(last))
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn execute(plan: &CommandPlan, args: &RunArgs, runs: Vec<PlannedRun>) -> Result<u8> {
    if args.threads == Some(0) {
        return Err(ScrambleError::config("threads", "must be at least 1"));
    }
    if args.dry_run {
        for run in &runs {
            say(format_args!("# {} -> {}", plan.name, run.path.display()));
            say(format_args!("{}", run.config.to_json()));
        }
        return Ok(EXIT_OK);
    }
    let mut status = EXIT_OK;
    for run in runs {
        let started = Instant::now();
        let series = run_ensemble(&run.config, args.threads)?;
        let mut manifest = RunManifest::new(plan.name, &run.config, started.elapsed().as_secs_f64(), series.failures.clone());
        if let Some(threads) = args.threads {
            manifest.flags.insert("threads".into(), threads.to_string());
        }
        if let Some(path) = &args.config {
            manifest.flags.insert("config".into(), path.display().to_string());
        }
        emit_csv(&series, &manifest, &run.path)?;
        say(format_args!("wrote {} ({:.1} s): {}", run.path.display(), manifest.elapsed_seconds, summarize(&series)));
        for failure in &series.failures {
            eprintln!("warning: realization {} excluded: {}", failure.index, failure.message);
        }
        if let Some(trace) = series.trace("bound_residual") {
            let (j, worst) = trace
                .min
                .iter()
                .copied()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (j, v)| if v < acc.1 { (j, v) } else { acc });
            if worst < -BOUND_TOL {
                eprintln!(
                    "bound violated: min residual {} at t = {} (include_identity = {})",
                    format_value(worst),
                    series.times[j],
                    run.config.sampling.include_identity
                );
                status = EXIT_RUNTIME;
            } else {
                say(format_args!("bound holds: min residual {}", format_value(worst)));
            }
        }
    }
    Ok(status)
}

fn dispatch(command: Command) -> Result<u8> {
    let (plan, args, runs) = match command {
        Command::Selftest => {
            let outcomes = run_selftest();
            let mut failed = 0;
            for o in &outcomes {
                say(format_args!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail));
                failed += usize::from(!o.passed);
            }
            say(format_args!("{} of {} checks passed", outcomes.len() - failed, outcomes.len()));
            return Ok(if failed == 0 { EXIT_OK } else { EXIT_RUNTIME });
        }
        Command::LmgMi { run, n, state } => {
            let runs = resolve_plan(&LMG_MI, &run, |cfg| {
                if let Some(n) = n {
                    cfg.model = match cfg.model {
                        ModelConfig::Lmg { j_scale, .. } => ModelConfig::Lmg { n_spins: n, j_scale },
                        ModelConfig::Syk { .. } => {
                            return Err(ScrambleError::config("n", "`--n` applies to the LMG model only"))
                        }
                    };
                    cfg.model.validate()?;
                    let mut partition = crate::ensemble::Partition::default_for(n, false)?;
                    partition.a = cfg.partition.a.clone();
                    if let Some(b) = partition.a.complement(n) {
                        partition.b = b;
                    }
                    cfg.partition = partition;
                }
                if let Some(state) = state {
                    cfg.initial_state = state;
                }
                Ok(())
            })?;
            (&LMG_MI, run, runs)
        }
        Command::SykOtoc(a) => (&SYK_OTOC, a.clone(), resolve_plan(&SYK_OTOC, &a, |_| Ok(()))?),
        Command::SykMi(a) => (&SYK_MI, a.clone(), resolve_plan(&SYK_MI, &a, |_| Ok(()))?),
        Command::BoundCheck(a) => (&BOUND_CHECK, a.clone(), resolve_plan(&BOUND_CHECK, &a, |_| Ok(()))?),
        Command::Tmi(a) => (&TMI, a.clone(), resolve_plan(&TMI, &a, |_| Ok(()))?),
        Command::OpenOtoc(a) => (&OPEN_OTOC, a.clone(), resolve_plan(&OPEN_OTOC, &a, |_| Ok(()))?),
        Command::Decomposition(a) => (&DECOMPOSITION, a.clone(), resolve_plan(&DECOMPOSITION, &a, |_| Ok(()))?),
    };
    execute(plan, &args, runs)
}

/// Parses `argv` (including the program name), runs the command and returns
/// the exit status: 0 success, 1 invalid input, 2 computation failure.
pub fn run_cli<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_RUNTIME
            }
        }
    }
}

/// Entry point for the `scramble` binary.
pub fn main() -> ExitCode {
    ExitCode::from(run_cli(std::env::args_os()))
}
