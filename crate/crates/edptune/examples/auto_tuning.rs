//! Semi-automatic tuning: train a situation-matching model on a design-time
//! trace, then let the production run look up configurations at every
//! timestep boundary. On the training trace this reproduces the hand-made
//! dynamic plan exactly; on perturbed inputs it degrades gracefully.
//!
//! ```bash
//! cargo run -p edptune --example auto_tuning
//! ```

use edptune::autotune::{production_schedule, run_production, train};
use edptune::dynamic::plan_trace;
use edptune::machine::{MachineModel, PState, RegionModel};
use edptune::metrics::EdpWeight;
use edptune::sim::simulate;
use edptune::sweep::sweep;
use edptune::workload::{generate, GeneratorParams, WorkloadTrace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn perturb(trace: &WorkloadTrace, seed: u64) -> WorkloadTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<f64> = (0..trace.n_steps())
        .flat_map(|s| trace.step_workloads(s).to_vec())
        .map(|w| w * (1.0 + rng.gen_range(-0.05..0.05)))
        .collect();
    WorkloadTrace::new(trace.n_steps(), trace.n_procs(), data).unwrap()
}

fn main() {
    let machine = MachineModel {
        pstates: vec![
            PState::new(1.0, 0.8),
            PState::new(1.5, 0.9),
            PState::new(2.0, 1.0),
            PState::new(2.5, 1.2),
        ],
        static_power_w: 50.0,
        dyn_coeff: 5.0,
        max_cores: 1,
        serial_fraction: 0.0,
        switch_latency_s: 0.0,
        switch_energy_j: 0.0,
    };
    let region = RegionModel::new(1e6, 0.0);
    let design_trace = generate(&GeneratorParams {
        n_steps: 100,
        n_procs: 4,
        initial_workload: 1000.0,
        drift: 0.05,
        min_factor: 0.5,
        max_factor: 2.0,
        seed: 42,
    })
    .unwrap();

    let weight = EdpWeight(1);
    let reference = sweep(&machine, &region, &design_trace, weight, None)
        .unwrap()
        .best_row()
        .config;
    println!(
        "reference from the static sweep: {} GHz, {} core(s)",
        machine.pstates[reference.pstate].ghz, reference.cores
    );

    let model = train(&machine, &region, &[&design_trace], reference, 0.01).unwrap();
    println!(
        "trained model: {} situations from {} steps (dedupe radius 0.01)",
        model.entries.len(),
        design_trace.n_steps()
    );

    // Design-time check: production on the training trace equals the plan.
    let strict_model = train(&machine, &region, &[&design_trace], reference, 0.0).unwrap();
    let produced = production_schedule(&design_trace, &strict_model).unwrap();
    let planned = plan_trace(&machine, &region, &design_trace, reference).unwrap();
    println!(
        "production schedule equals the design-time plan: {}",
        produced == planned.schedule
    );

    // Production on unseen, noise-perturbed traces: the model only recalls,
    // the per-step planner re-optimizes; the gap is the price of recall.
    println!();
    println!(
        "{:>6} {:>14} {:>14} {:>9}",
        "seed", "production EDP", "oracle EDP", "gap"
    );
    for seed in 0..8u64 {
        let noisy = perturb(&design_trace, seed);
        let production = run_production(&machine, &region, &noisy, &model).unwrap();
        let oracle_plan = plan_trace(&machine, &region, &noisy, reference).unwrap();
        let oracle = simulate(&machine, &region, &noisy, &oracle_plan.schedule).unwrap();
        let prod_edp = production.measurement().edp(weight);
        let oracle_edp = oracle.measurement().edp(weight);
        println!(
            "{:>6} {:>14.2} {:>14.2} {:>8.3}%",
            seed,
            prod_edp,
            oracle_edp,
            100.0 * (prod_edp / oracle_edp - 1.0)
        );
    }
}
