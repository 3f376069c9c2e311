//! The whole workflow through the on-disk formats, exactly as the `edptune`
//! binary wires them: machine/region JSON in, trace/plan/sweep CSV and
//! summary/model JSON out. Everything lands in a temporary directory that is
//! printed at the end so you can poke at the files.
//!
//! ```bash
//! cargo run -p edptune --example full_pipeline
//! ```

use std::fs;

use edptune::autotune::{run_production, train, TuningModel};
use edptune::dynamic::plan_trace;
use edptune::machine::{MachineModel, PState, RegionModel};
use edptune::manifest::{compare_summaries, report_csv, report_text, RunManifest, RunSummary};
use edptune::metrics::EdpWeight;
use edptune::sim::{simulate, Schedule};
use edptune::sweep::sweep;
use edptune::workload::{generate, GeneratorParams, WorkloadTrace};

fn main() -> edptune::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let path = |name: &str| dir.path().join(name);

    // 1. Hardware and region descriptions, as the CLI would read them.
    let machine = MachineModel {
        pstates: vec![
            PState::new(1.0, 0.8),
            PState::new(1.5, 0.9),
            PState::new(2.0, 1.0),
            PState::new(2.5, 1.2),
        ],
        static_power_w: 20.0,
        dyn_coeff: 30.0,
        max_cores: 1,
        serial_fraction: 0.0,
        switch_latency_s: 0.0,
        switch_energy_j: 0.0,
    };
    fs::write(
        path("machine.json"),
        serde_json::to_string_pretty(&machine).unwrap(),
    )
    .unwrap();
    let region = RegionModel::new(1e6, 0.0);
    fs::write(
        path("region.json"),
        serde_json::to_string_pretty(&region).unwrap(),
    )
    .unwrap();
    let machine = MachineModel::from_json_file(path("machine.json"))?;
    let region = RegionModel::from_json_file(path("region.json"))?;

    // 2. gen: a reproducible workload trace.
    let trace = generate(&GeneratorParams {
        n_steps: 100,
        n_procs: 4,
        initial_workload: 1000.0,
        drift: 0.05,
        min_factor: 0.5,
        max_factor: 2.0,
        seed: 42,
    })?;
    trace.write_csv(path("trace.csv"))?;
    let trace = WorkloadTrace::read_csv(path("trace.csv"))?;
    println!(
        "trace.csv: {} steps x {} procs, mean imbalance {:.3}",
        trace.n_steps(),
        trace.n_procs(),
        trace.mean_imbalance()
    );

    let weight = EdpWeight(1);
    let manifest_for = |command: &str| -> edptune::Result<RunManifest> {
        let mut m = RunManifest::new(command);
        m.add_input("machine", path("machine.json"))?;
        m.add_input("region", path("region.json"))?;
        m.add_input("trace", path("trace.csv"))?;
        m.add_param("weight", weight.0);
        Ok(m)
    };

    // 3. simulate: the untuned baseline (highest P-state everywhere).
    let uniform = Schedule::uniform(
        trace.n_steps(),
        trace.n_procs(),
        edptune::sim::ProcessConfig::new(machine.highest_pstate(), machine.max_cores),
    );
    let baseline = simulate(&machine, &region, &trace, &uniform)?;
    baseline.write_slice_csv(&machine, path("baseline_slices.csv"))?;
    let baseline_summary = RunSummary::from_result(
        &baseline,
        weight,
        trace.n_steps(),
        trace.n_procs(),
        manifest_for("simulate")?,
    );
    baseline_summary.write_json_file(path("baseline.json"))?;
    println!(
        "baseline.json: {} J in {} s",
        baseline.total_energy_j, baseline.total_time_s
    );

    // 4. sweep: the static trade-off table.
    let sweep_result = sweep(&machine, &region, &trace, weight, None)?;
    sweep_result.write_csv(&machine, path("sweep.csv"))?;
    let best = sweep_result.best_row();
    println!(
        "sweep.csv: best static config {} GHz, {} core(s)",
        machine.pstates[best.config.pstate].ghz, best.config.cores
    );

    // 5. plan: per-step dynamic tuning against the untuned reference.
    let reference = edptune::sim::ProcessConfig::new(machine.highest_pstate(), 1);
    let plan = plan_trace(&machine, &region, &trace, reference)?;
    plan.schedule.write_plan_csv(&machine, path("plan.csv"))?;
    let replayed = Schedule::read_plan_csv(path("plan.csv"), &machine)?;
    let tuned = simulate(&machine, &region, &trace, &replayed)?;
    let tuned_summary = RunSummary::from_result(
        &tuned,
        weight,
        trace.n_steps(),
        trace.n_procs(),
        manifest_for("plan")?,
    );
    tuned_summary.write_json_file(path("plan.json"))?;
    println!(
        "plan.json: {} J in {} s",
        tuned.total_energy_j, tuned.total_time_s
    );

    // 6. train + run: the situation-matching model, persisted and reloaded.
    let model = train(&machine, &region, &[&trace], reference, 0.01)?;
    model.write_json_file(path("model.json"))?;
    let model = TuningModel::read_json_file(path("model.json"))?;
    assert!(model.fingerprint_matches(&machine, &region));
    let production = run_production(&machine, &region, &trace, &model)?;
    let production_summary = RunSummary::from_result(
        &production,
        weight,
        trace.n_steps(),
        trace.n_procs(),
        manifest_for("run")?,
    );
    production_summary.write_json_file(path("run.json"))?;
    println!(
        "model.json: {} situations; run.json: {} J",
        model.entries.len(),
        production.total_energy_j
    );

    // 7. report: everything against the untuned baseline.
    let rows = compare_summaries(
        &baseline_summary,
        &[
            ("plan.json".to_string(), tuned_summary),
            ("run.json".to_string(), production_summary),
        ],
    )?;
    let mut report_manifest = RunManifest::new("report");
    report_manifest.add_input("summary.0", path("baseline.json"))?;
    report_manifest.add_input("summary.1", path("plan.json"))?;
    report_manifest.add_input("summary.2", path("run.json"))?;
    fs::write(path("report.csv"), report_csv(&rows, &report_manifest)).unwrap();
    println!();
    print!("{}", report_text("baseline.json", &baseline_summary, &rows));

    println!();
    // Keep the directory around for inspection.
    println!("all artifacts written to {}", dir.keep().display());
    Ok(())
}
