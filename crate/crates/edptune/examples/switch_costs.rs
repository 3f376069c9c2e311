//! What changing P-states actually costs: the planner assumes free switches,
//! the simulator charges them. This example sweeps the switch latency and
//! energy to show when per-step re-tuning stops paying off.
//!
//! ```bash
//! cargo run -p edptune --example switch_costs
//! ```

use edptune::dynamic::plan_trace;
use edptune::machine::{MachineModel, PState, RegionModel};
use edptune::sim::{simulate, ProcessConfig, Schedule};
use edptune::workload::{generate, GeneratorParams};

fn main() {
    let base_machine = MachineModel {
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
    let reference = ProcessConfig::new(base_machine.highest_pstate(), 1);

    // The plan itself never changes: planning ignores switch overheads.
    let plan = plan_trace(&base_machine, &region, &trace, reference).unwrap();
    let switches: usize = (1..trace.n_steps())
        .map(|step| {
            (0..trace.n_procs())
                .filter(|&p| {
                    plan.schedule.get(step, p).pstate != plan.schedule.get(step - 1, p).pstate
                })
                .count()
        })
        .sum();
    println!(
        "plan performs {switches} P-state switches over {} slices",
        100 * 4
    );
    println!();
    println!(
        "{:>12} {:>10} {:>12} {:>10} {:>14}",
        "latency [s]", "energy [J]", "E tuned [J]", "T tuned", "energy saving"
    );

    for (latency, energy) in [
        (0.0, 0.0),
        (0.001, 0.1),
        (0.005, 1.0),
        (0.01, 2.0),
        (0.05, 10.0),
        (0.1, 20.0),
    ] {
        let machine = MachineModel {
            switch_latency_s: latency,
            switch_energy_j: energy,
            ..base_machine.clone()
        };
        // The uniform baseline never switches, so overheads leave it alone.
        let baseline = simulate(
            &machine,
            &region,
            &trace,
            &Schedule::uniform(trace.n_steps(), trace.n_procs(), reference),
        )
        .unwrap();
        let tuned = simulate(&machine, &region, &trace, &plan.schedule).unwrap();
        let saving = 1.0 - tuned.total_energy_j / baseline.total_energy_j;
        println!(
            "{:>12} {:>10} {:>12.1} {:>10.2} {:>13.2}%",
            latency,
            energy,
            tuned.total_energy_j,
            tuned.total_time_s,
            saving * 100.0
        );
    }

    println!();
    println!("Free switches reproduce the ideal saving; as overheads grow they eat");
    println!("the margin and eventually make per-step re-tuning a net loss.");
}
