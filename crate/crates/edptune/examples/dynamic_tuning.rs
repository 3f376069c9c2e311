//! Dynamic tuning on an imbalanced workload: per step, every non-critical
//! process drops to the cheapest configuration that still meets the critical
//! process's finish time. Run time is preserved by construction; the energy
//! of waiting at the barrier is what gets harvested.
//!
//! ```bash
//! cargo run -p edptune --example dynamic_tuning
//! ```

use edptune::dynamic::plan_trace;
use edptune::machine::{MachineModel, PState, RegionModel};
use edptune::metrics::{improvement, EdpWeight};
use edptune::sim::{simulate, ProcessConfig, Schedule};
use edptune::workload::{generate, imbalance, GeneratorParams};

fn main() {
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
    let region = RegionModel::new(1e6, 0.0);
    let trace = generate(&GeneratorParams {
        n_steps: 100,
        n_procs: 4,
        initial_workload: 1000.0,
        drift: 0.05,
        min_factor: 0.5,
        max_factor: 2.0,
        seed: 42,
    })
    .unwrap();
    println!("trace mean imbalance: {:.3}", trace.mean_imbalance());

    // Untuned default: everyone at the highest P-state, every step.
    let reference = ProcessConfig::new(machine.highest_pstate(), 1);
    let baseline = simulate(
        &machine,
        &region,
        &trace,
        &Schedule::uniform(trace.n_steps(), trace.n_procs(), reference),
    )
    .unwrap();

    let plan = plan_trace(&machine, &region, &trace, reference).unwrap();
    let tuned = simulate(&machine, &region, &trace, &plan.schedule).unwrap();

    // A few steps in detail: the chosen frequencies track the imbalance.
    println!();
    println!("{:>4} {:>10} frequencies [GHz]", "step", "imbalance");
    for step in (0..trace.n_steps()).step_by(10) {
        let freqs: Vec<String> = plan
            .schedule
            .step_configs(step)
            .iter()
            .map(|c| format!("{}", machine.pstates[c.pstate].ghz))
            .collect();
        println!(
            "{:>4} {:>10.3} {}",
            step,
            imbalance(trace.step_workloads(step)).unwrap(),
            freqs.join(" ")
        );
    }

    let savings = improvement(&baseline.measurement(), &tuned.measurement(), EdpWeight(1));
    println!();
    println!(
        "baseline: {:.1} J in {:.2} s   tuned: {:.1} J in {:.2} s",
        baseline.total_energy_j, baseline.total_time_s, tuned.total_energy_j, tuned.total_time_s
    );
    println!(
        "energy saving {:.2}%, time change {:+.2e}, EDP saving {:.2}%",
        savings.energy_saving * 100.0,
        savings.time_change,
        savings.edp_saving * 100.0
    );

    // The makespan guarantee, step by step.
    let preserved = baseline
        .step_makespans
        .iter()
        .zip(&tuned.step_makespans)
        .all(|(a, b)| (a - b).abs() <= 1e-9 * a);
    println!("every step makespan preserved: {preserved}");
}
