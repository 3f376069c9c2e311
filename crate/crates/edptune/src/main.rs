//! Command-line frontend. Each subcommand wires input files into one library
//! operation and writes the documented file formats; JSON summaries embed a
//! manifest (command, parameters, input hashes) so runs are reproducible.

use std::path::{Path, PathBuf};
use std::process;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use edptune::autotune::{run_production, train, TuningModel};
use edptune::dynamic::plan_trace;
use edptune::error::{Error, Result};
use edptune::machine::{MachineModel, RegionModel};
use edptune::manifest::{
    compare_summaries, report_csv, report_text, RunManifest, RunSummary, TrainSummary,
};
use edptune::metrics::EdpWeight;
use edptune::sim::{simulate, ProcessConfig, Schedule};
use edptune::sweep::sweep;
use edptune::workload::{generate, GeneratorParams, WorkloadTrace};

#[derive(Parser)]
#[command(
    name = "edptune",
    version,
    about = "Model and tune energy/run-time of synchronized parallel timestep workloads"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a workload trace CSV with the bounded random-walk generator
    Gen(GenArgs),
    /// Simulate a trace under a schedule; write summary JSON and slice CSV
    Simulate(SimulateArgs),
    /// Evaluate every uniform configuration; write the trade-off CSV
    Sweep(SweepArgs),
    /// Plan per-step configurations against a reference; write the plan CSV
    Plan(PlanArgs),
    /// Train a situation-matching tuning model from one or more traces
    Train(TrainArgs),
    /// Run a trace in production mode under a trained tuning model
    Run(RunArgs),
    /// Compare run summaries against a baseline (the first file)
    Report(ReportArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Number of timesteps
    #[arg(long)]
    steps: usize,
    /// Number of processes
    #[arg(long)]
    procs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-step relative volatility of the workload walk
    #[arg(long, default_value_t = 0.05)]
    drift: f64,
    /// Workload of every process at step 0
    #[arg(long, default_value_t = 1000.0)]
    initial: f64,
    /// Lower workload bound relative to the initial value
    #[arg(long, default_value_t = 0.5)]
    min_factor: f64,
    /// Upper workload bound relative to the initial value
    #[arg(long, default_value_t = 2.0)]
    max_factor: f64,
    /// Trace CSV to write
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    machine: PathBuf,
    #[arg(long)]
    region: PathBuf,
    #[arg(long)]
    trace: PathBuf,
    /// Plan CSV to execute; defaults to the uniform highest-frequency,
    /// max-cores schedule
    #[arg(long)]
    schedule: Option<PathBuf>,
    /// EDP weight reported in the summary
    #[arg(long, default_value_t = 1)]
    weight: u32,
    /// Summary JSON to write
    #[arg(long)]
    out: PathBuf,
    /// Also write the per-slice CSV here
    #[arg(long)]
    slices: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    machine: PathBuf,
    #[arg(long)]
    region: PathBuf,
    #[arg(long)]
    trace: PathBuf,
    #[arg(long, default_value_t = 1)]
    weight: u32,
    /// Sweep CSV to write
    #[arg(long)]
    out: PathBuf,
    /// Also write the best configuration's run summary JSON here
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    machine: PathBuf,
    #[arg(long)]
    region: PathBuf,
    #[arg(long)]
    trace: PathBuf,
    /// EDP weight used when deriving the default reference
    #[arg(long, default_value_t = 1)]
    weight: u32,
    /// Reference configuration as `<f_ghz>,<cores>`; defaults to the static
    /// sweep winner for the trace and weight
    #[arg(long)]
    reference: Option<String>,
    /// Plan CSV to write
    #[arg(long)]
    out: PathBuf,
    /// Also write the planned run's summary JSON here
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    machine: PathBuf,
    #[arg(long)]
    region: PathBuf,
    /// Training trace CSV; repeat for multiple traces
    #[arg(long, required = true)]
    trace: Vec<PathBuf>,
    /// EDP weight used when deriving the default reference
    #[arg(long, default_value_t = 1)]
    weight: u32,
    /// Reference configuration as `<f_ghz>,<cores>`; defaults to the static
    /// sweep winner for the first trace and weight
    #[arg(long)]
    reference: Option<String>,
    /// Situations closer than this feature distance collapse to one entry
    #[arg(long, default_value_t = edptune::autotune::DEFAULT_DEDUPE_EPS)]
    dedupe_eps: f64,
    /// Tuning model JSON to write
    #[arg(long)]
    out: PathBuf,
    /// Also write the training summary JSON here
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    machine: PathBuf,
    #[arg(long)]
    region: PathBuf,
    #[arg(long)]
    trace: PathBuf,
    /// Tuning model JSON from `train`
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 1)]
    weight: u32,
    /// Summary JSON to write
    #[arg(long)]
    out: PathBuf,
    /// Also write the per-slice CSV here
    #[arg(long)]
    slices: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Run summary JSON files; the first is the baseline
    #[arg(required = true, num_args = 2..)]
    summaries: Vec<PathBuf>,
    /// Report CSV to write (the comparison table also prints to stdout)
    #[arg(long)]
    out: PathBuf,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            process::exit(code);
        }
    };
    if let Err(err) = dispatch(cli) {
        eprintln!("error: {err}");
        let code = match err {
            Error::Internal(_) => 3,
            _ => 2,
        };
        process::exit(code);
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Plan(args) => cmd_plan(args),
        Command::Train(args) => cmd_train(args),
        Command::Run(args) => cmd_run(args),
        Command::Report(args) => cmd_report(args),
    }
}

fn load_inputs(
    machine: &Path,
    region: &Path,
    trace: &Path,
) -> Result<(MachineModel, RegionModel, WorkloadTrace)> {
    Ok((
        MachineModel::from_json_file(machine)?,
        RegionModel::from_json_file(region)?,
        WorkloadTrace::read_csv(trace)?,
    ))
}

fn parse_reference(raw: &str, machine: &MachineModel) -> Result<ProcessConfig> {
    let parts: Vec<&str> = raw.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::Domain(format!(
            "reference must be `<f_ghz>,<cores>`, got `{raw}`"
        )));
    }
    let ghz: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| Error::Domain(format!("invalid reference frequency `{}`", parts[0])))?;
    let cores: usize = parts[1]
        .trim()
        .parse()
        .map_err(|_| Error::Domain(format!("invalid reference core count `{}`", parts[1])))?;
    let pstate = machine
        .pstate_by_ghz(ghz)
        .ok_or_else(|| Error::Domain(format!("no machine P-state with frequency {ghz} GHz")))?;
    let config = ProcessConfig::new(pstate, cores);
    config.validate(machine)?;
    Ok(config)
}

fn describe(machine: &MachineModel, config: ProcessConfig) -> String {
    let p = &machine.pstates[config.pstate];
    format!("{} GHz, {} cores", p.ghz, config.cores)
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let params = GeneratorParams {
        n_steps: args.steps,
        n_procs: args.procs,
        initial_workload: args.initial,
        drift: args.drift,
        min_factor: args.min_factor,
        max_factor: args.max_factor,
        seed: args.seed,
    };
    let trace = generate(&params)?;
    trace.write_csv(&args.out)?;
    println!(
        "trace: {} steps x {} procs, mean imbalance {:.4}",
        trace.n_steps(),
        trace.n_procs(),
        trace.mean_imbalance()
    );
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let (machine, region, trace) = load_inputs(&args.machine, &args.region, &args.trace)?;
    let schedule = match &args.schedule {
        Some(path) => Schedule::read_plan_csv(path, &machine)?,
        None => Schedule::uniform(
            trace.n_steps(),
            trace.n_procs(),
            ProcessConfig::new(machine.highest_pstate(), machine.max_cores),
        ),
    };
    let result = simulate(&machine, &region, &trace, &schedule)?;

    let mut manifest = RunManifest::new("simulate");
    manifest.add_input("machine", &args.machine)?;
    manifest.add_input("region", &args.region)?;
    manifest.add_input("trace", &args.trace)?;
    if let Some(path) = &args.schedule {
        manifest.add_input("schedule", path)?;
    }
    manifest.add_param("weight", args.weight);
    manifest.add_param("out", args.out.display());
    if let Some(path) = &args.slices {
        manifest.add_param("slices", path.display());
    }

    let weight = EdpWeight(args.weight);
    let summary =
        RunSummary::from_result(&result, weight, trace.n_steps(), trace.n_procs(), manifest);
    summary.write_json_file(&args.out)?;
    if let Some(path) = &args.slices {
        result.write_slice_csv(&machine, path)?;
    }
    println!(
        "energy {} J, time {} s, EDP {} (w={})",
        summary.total_energy_j, summary.total_time_s, summary.edp, args.weight
    );
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let (machine, region, trace) = load_inputs(&args.machine, &args.region, &args.trace)?;
    let weight = EdpWeight(args.weight);
    let result = sweep(&machine, &region, &trace, weight, None)?;
    result.write_csv(&machine, &args.out)?;
    let best = result.best_row();
    println!(
        "best: {} (energy {} J, time {} s, EDP {}, w={})",
        describe(&machine, best.config),
        best.energy_j,
        best.time_s,
        best.edp,
        args.weight
    );

    if let Some(path) = &args.summary {
        let mut manifest = RunManifest::new("sweep");
        manifest.add_input("machine", &args.machine)?;
        manifest.add_input("region", &args.region)?;
        manifest.add_input("trace", &args.trace)?;
        manifest.add_param("weight", args.weight);
        manifest.add_param("out", args.out.display());
        manifest.add_param("best", describe(&machine, best.config));
        let run = simulate(
            &machine,
            &region,
            &trace,
            &Schedule::uniform(trace.n_steps(), trace.n_procs(), best.config),
        )?;
        RunSummary::from_result(&run, weight, trace.n_steps(), trace.n_procs(), manifest)
            .write_json_file(path)?;
    }
    Ok(())
}

fn cmd_plan(args: PlanArgs) -> Result<()> {
    let (machine, region, trace) = load_inputs(&args.machine, &args.region, &args.trace)?;
    let weight = EdpWeight(args.weight);
    let reference = match &args.reference {
        Some(raw) => parse_reference(raw, &machine)?,
        None => {
            sweep(&machine, &region, &trace, weight, None)?
                .best_row()
                .config
        }
    };
    let plan = plan_trace(&machine, &region, &trace, reference)?;
    plan.schedule.write_plan_csv(&machine, &args.out)?;
    println!("reference: {}", describe(&machine, reference));

    if let Some(path) = &args.summary {
        let mut manifest = RunManifest::new("plan");
        manifest.add_input("machine", &args.machine)?;
        manifest.add_input("region", &args.region)?;
        manifest.add_input("trace", &args.trace)?;
        manifest.add_param("weight", args.weight);
        manifest.add_param("reference", describe(&machine, reference));
        manifest.add_param("out", args.out.display());
        let run = simulate(&machine, &region, &trace, &plan.schedule)?;
        RunSummary::from_result(&run, weight, trace.n_steps(), trace.n_procs(), manifest)
            .write_json_file(path)?;
    }
    Ok(())
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let machine = MachineModel::from_json_file(&args.machine)?;
    let region = RegionModel::from_json_file(&args.region)?;
    let traces: Vec<WorkloadTrace> = args
        .trace
        .iter()
        .map(WorkloadTrace::read_csv)
        .collect::<Result<_>>()?;
    let weight = EdpWeight(args.weight);
    let reference = match &args.reference {
        Some(raw) => parse_reference(raw, &machine)?,
        None => {
            sweep(&machine, &region, &traces[0], weight, None)?
                .best_row()
                .config
        }
    };
    let trace_refs: Vec<&WorkloadTrace> = traces.iter().collect();
    let model = train(&machine, &region, &trace_refs, reference, args.dedupe_eps)?;
    model.write_json_file(&args.out)?;
    println!(
        "model: {} entries from {} trace(s), reference {}",
        model.entries.len(),
        traces.len(),
        describe(&machine, reference)
    );

    if let Some(path) = &args.summary {
        let mut manifest = RunManifest::new("train");
        manifest.add_input("machine", &args.machine)?;
        manifest.add_input("region", &args.region)?;
        if args.trace.len() == 1 {
            manifest.add_input("trace", &args.trace[0])?;
        } else {
            for (i, t) in args.trace.iter().enumerate() {
                manifest.add_input(format!("trace.{i}"), t)?;
            }
        }
        manifest.add_param("weight", args.weight);
        manifest.add_param("dedupe_eps", args.dedupe_eps);
        manifest.add_param("reference", describe(&machine, reference));
        manifest.add_param("out", args.out.display());
        TrainSummary {
            entries: model.entries.len(),
            n_procs: model.n_procs,
            lambda: model.lambda,
            dedupe_eps: args.dedupe_eps,
            fingerprint: model.fingerprint.clone(),
            manifest,
        }
        .write_json_file(path)?;
    }
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let (machine, region, trace) = load_inputs(&args.machine, &args.region, &args.trace)?;
    let model = TuningModel::read_json_file(&args.model)?;
    if !model.fingerprint_matches(&machine, &region) {
        eprintln!(
            "warning: model fingerprint does not match the supplied machine/region files; \
             stored configurations were trained for different hardware"
        );
    }
    let result = run_production(&machine, &region, &trace, &model)?;

    let mut manifest = RunManifest::new("run");
    manifest.add_input("machine", &args.machine)?;
    manifest.add_input("region", &args.region)?;
    manifest.add_input("trace", &args.trace)?;
    manifest.add_input("model", &args.model)?;
    manifest.add_param("weight", args.weight);
    manifest.add_param("out", args.out.display());
    if let Some(path) = &args.slices {
        manifest.add_param("slices", path.display());
    }

    let weight = EdpWeight(args.weight);
    let summary =
        RunSummary::from_result(&result, weight, trace.n_steps(), trace.n_procs(), manifest);
    summary.write_json_file(&args.out)?;
    if let Some(path) = &args.slices {
        result.write_slice_csv(&machine, path)?;
    }
    println!(
        "energy {} J, time {} s, EDP {} (w={})",
        summary.total_energy_j, summary.total_time_s, summary.edp, args.weight
    );
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    let mut summaries = Vec::with_capacity(args.summaries.len());
    for path in &args.summaries {
        summaries.push((
            path.display().to_string(),
            RunSummary::read_json_file(path)?,
        ));
    }
    let (baseline_label, baseline) = &summaries[0];
    let rows = compare_summaries(baseline, &summaries[1..])?;

    let mut manifest = RunManifest::new("report");
    for (i, path) in args.summaries.iter().enumerate() {
        manifest.add_input(format!("summary.{i}"), path)?;
    }
    manifest.add_param("out", args.out.display());

    let csv = report_csv(&rows, &manifest);
    std::fs::write(&args.out, csv).map_err(|e| Error::io(args.out.display().to_string(), e))?;
    print!("{}", report_text(baseline_label, baseline, &rows));
    Ok(())
}
