//! Batch command-line surface: loads stands, growth parameters, and
//! economic configs; runs simulations, schedule optimizations, and
//! fertilization scenarios; emits CSV curves and JSON summaries.
//!
//! Exit codes: 0 success, 2 input/schema error, 3 domain precondition,
//! 4 internal invariant breach. All outputs are written atomically
//! (temp file + rename) so a failing run leaves no partial files.

mod manifest;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use standsim::{
    bundled_stands, gen_stands, greedy_thinning_search, run_scenario_with_baseline,
    EconomicConfig, Error as CoreError, GrowthParams, OptimizationConfig, ScenarioKind, Schedule,
    SearchOutcome, StandFile, StandState, BUNDLED_COUNT, BUNDLED_SEED,
};

use manifest::RunManifest;
use output::{
    curve_csv, extension_expenses_csv, ledger_csv, scenario_curves_csv, trace_csv, write_atomic,
};

#[derive(Parser)]
#[command(name = "standsim", version, about = "Boreal stand rotation economics, batch runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Growth parameter file (JSON); built-in defaults when omitted.
    #[arg(long, env = "STANDSIM_GROWTH_PARAMS")]
    growth_params: Option<PathBuf>,
    /// Economic config file (JSON); built-in defaults when omitted.
    #[arg(long, env = "STANDSIM_ECON_CONFIG")]
    econ_config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one schedule on one stand; write rotation curve and ledger CSVs.
    Simulate {
        #[arg(long)]
        stand: PathBuf,
        /// Schedule file (JSON); clearcut-only over the window when omitted.
        #[arg(long)]
        schedule: Option<PathBuf>,
        #[command(flatten)]
        configs: ConfigArgs,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Search a thinning schedule; write the schedule, trace, and curve.
    Optimize {
        #[arg(long)]
        stand: PathBuf,
        #[command(flatten)]
        configs: ConfigArgs,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run fertilization scenarios for every (stand, kind) in a manifest.
    Scenario {
        /// Run manifest (JSON). See RunManifest.
        #[arg(long)]
        manifest: PathBuf,
        /// Output directory; overrides the manifest's.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Worker threads for the (stand, kind) fan-out.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Generate synthetic stand files.
    GenStands {
        #[arg(long, default_value_t = BUNDLED_SEED)]
        seed: u64,
        #[arg(long, default_value_t = BUNDLED_COUNT)]
        count: usize,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

enum CliError {
    /// Unreadable/unparseable inputs and I/O failures.
    Input(String),
    Core(CoreError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Core(CoreError::Schema(_)) => 2,
            CliError::Core(CoreError::Precondition(_)) => 3,
            CliError::Core(CoreError::Invariant(_)) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_stand(path: &Path) -> CliResult<(StandFile, StandState)> {
    let file = StandFile::from_json_str(&read_file(path)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let state = file.to_state()?;
    Ok((file, state))
}

fn load_growth(path: Option<&Path>) -> CliResult<GrowthParams> {
    match path {
        Some(p) => GrowthParams::from_json_str(&read_file(p)?)
            .map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => Ok(GrowthParams::default()),
    }
}

fn load_econ(path: Option<&Path>) -> CliResult<EconomicConfig> {
    match path {
        Some(p) => EconomicConfig::from_json_str(&read_file(p)?)
            .map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => Ok(EconomicConfig::default()),
    }
}

fn cli_simulate(
    stand: &Path,
    schedule: Option<&Path>,
    configs: &ConfigArgs,
    out_dir: &Path,
) -> CliResult<()> {
    let (_, state) = load_stand(stand)?;
    let growth = load_growth(configs.growth_params.as_deref())?;
    let cfg = load_econ(configs.econ_config.as_deref())?;
    let opt = OptimizationConfig::default();
    let schedule = match schedule {
        Some(p) => Schedule::from_json_str(&read_file(p)?)
            .map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?,
        None => Schedule::clearcut_only(opt.window.1),
    };
    let out = standsim::simulate_schedule(&state, &schedule, &growth, &cfg, opt.window)?;
    write_atomic(out_dir, "curve.csv", curve_csv(&out.curve).as_bytes())?;
    write_atomic(out_dir, "ledger.csv", ledger_csv(&out.ledger).as_bytes())?;
    Ok(())
}

fn cli_optimize(stand: &Path, configs: &ConfigArgs, out_dir: &Path) -> CliResult<()> {
    let (_, state) = load_stand(stand)?;
    let growth = load_growth(configs.growth_params.as_deref())?;
    let cfg = load_econ(configs.econ_config.as_deref())?;
    let opt = OptimizationConfig::default();
    let outcome = greedy_thinning_search(&state, &growth, &cfg, &opt)?;
    write_atomic(out_dir, "schedule.json", outcome.schedule.to_json_string().as_bytes())?;
    write_atomic(out_dir, "trace.csv", trace_csv(&outcome.trace).as_bytes())?;
    write_atomic(out_dir, "curve.csv", curve_csv(&outcome.curve).as_bytes())?;
    Ok(())
}

/// One (stand, kind) cell of the scenario fan-out.
enum CellOutcome {
    Done(Box<standsim::ScenarioResult>),
    /// Non-applicable combination, e.g. a second-thinning scenario on a
    /// baseline with fewer than two thinnings.
    Skipped(String),
}

fn cli_scenario(manifest_path: &Path, out_dir: Option<&Path>, jobs: usize) -> CliResult<()> {
    let manifest = RunManifest::from_json_str(&read_file(manifest_path)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", manifest_path.display())))?;
    let out_dir = out_dir.unwrap_or(&manifest.out_dir);
    let growth = load_growth(manifest.growth_params.as_deref())?;
    let cfg = load_econ(manifest.econ_config.as_deref())?;
    let opt = OptimizationConfig::default();
    let kinds = manifest.kinds()?;

    // The seed only feeds synthetic-stand generation (used when the
    // manifest lists no stand files); engine math never consumes it.
    let stands: Vec<(StandFile, StandState)> = if manifest.stands.is_empty() {
        let seed = manifest.seed.unwrap_or(BUNDLED_SEED);
        let files = if seed == BUNDLED_SEED { bundled_stands() } else { gen_stands(seed, BUNDLED_COUNT)? };
        files
            .into_iter()
            .map(|f| {
                let state = f.to_state()?;
                Ok((f, state))
            })
            .collect::<CliResult<_>>()?
    } else {
        manifest.stands.iter().map(|p| load_stand(p)).collect::<CliResult<_>>()?
    };

    // Baselines are per stand; cells fan out per (stand, kind). Results
    // land in input order so output bytes never depend on --jobs.
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Input(format!("thread pool: {e}")))?;
    let cells: Vec<CliResult<(String, ScenarioKind, CellOutcome)>> = pool.install(|| {
        use rayon::prelude::*;
        let baselines: Vec<CliResult<SearchOutcome>> = stands
            .par_iter()
            .map(|(_, state)| greedy_thinning_search(state, &growth, &cfg, &opt).map_err(CliError::from))
            .collect();
        let mut tasks = Vec::new();
        for (i, (file, state)) in stands.iter().enumerate() {
            for &kind in &kinds {
                tasks.push((i, file, state, kind));
            }
        }
        tasks
            .into_par_iter()
            .map(|(i, file, state, kind)| {
                let baseline = match &baselines[i] {
                    Ok(b) => b,
                    Err(e) => return Err(CliError::Input(format!("{}: {e}", file.id))),
                };
                let needed = match kind {
                    ScenarioKind::AfterFirstThinning => 1,
                    ScenarioKind::AfterSecondThinning => 2,
                    _ => 0,
                };
                if baseline.schedule.thinnings.len() < needed {
                    return Ok((
                        file.id.clone(),
                        kind,
                        CellOutcome::Skipped(format!(
                            "baseline has {} thinning(s), needs {needed}",
                            baseline.schedule.thinnings.len()
                        )),
                    ));
                }
                let result = run_scenario_with_baseline(kind, state, &growth, &cfg, &opt, baseline)?;
                Ok((file.id.clone(), kind, CellOutcome::Done(Box::new(result))))
            })
            .collect()
    });

    let mut results = Vec::new();
    let mut skipped = Vec::new();
    for cell in cells {
        match cell? {
            (id, kind, CellOutcome::Done(result)) => {
                write_atomic(
                    out_dir,
                    &format!("{id}.{kind}.curves.csv"),
                    scenario_curves_csv(&result).as_bytes(),
                )?;
                results.push((id, kind, *result));
            }
            (id, kind, CellOutcome::Skipped(reason)) => skipped.push((id, kind, reason)),
        }
    }

    write_atomic(out_dir, "extension_expenses.csv", extension_expenses_csv(&results).as_bytes())?;
    let summary = output::summary_json(&results, &skipped);
    write_atomic(out_dir, "summary.json", summary.as_bytes())?;
    Ok(())
}

fn cli_gen_stands(seed: u64, count: usize, out_dir: &Path) -> CliResult<()> {
    let files = gen_stands(seed, count)?;
    for file in &files {
        write_atomic(out_dir, &format!("{}.json", file.id), file.to_json_string().as_bytes())?;
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate { stand, schedule, configs, out_dir } => {
            cli_simulate(&stand, schedule.as_deref(), &configs, &out_dir)
        }
        Command::Optimize { stand, configs, out_dir } => cli_optimize(&stand, &configs, &out_dir),
        Command::Scenario { manifest, out_dir, jobs } => {
            cli_scenario(&manifest, out_dir.as_deref(), jobs)
        }
        Command::GenStands { seed, count, out_dir } => cli_gen_stands(seed, count, &out_dir),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
