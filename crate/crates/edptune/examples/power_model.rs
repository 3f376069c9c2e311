//! Explore the machine model: per-P-state power draw and region run time.
//!
//! ```bash
//! cargo run -p edptune --example power_model
//! ```

use edptune::machine::{MachineModel, PState, RegionModel};

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
        max_cores: 4,
        serial_fraction: 0.1,
        switch_latency_s: 0.0,
        switch_energy_j: 0.0,
    };
    machine.clone().checked().expect("fixture is well formed");

    // A mildly memory-bound region: 1e6 cycles plus 50 microseconds of
    // frequency-insensitive time per workload unit.
    let region = RegionModel::new(1e6, 5e-5);
    let workload = 1000.0;

    println!(
        "process power [W] by P-state and active cores (idle = {} W):",
        machine.static_power_w
    );
    println!(
        "{:>8} {:>6} {:>8} {:>8} {:>8} {:>8}",
        "f [GHz]", "U [V]", "1 core", "2 cores", "3 cores", "4 cores"
    );
    for p in &machine.pstates {
        let row: Vec<String> = (1..=4)
            .map(|cores| format!("{:8.2}", machine.process_power(p, cores).unwrap()))
            .collect();
        println!("{:>8} {:>6} {}", p.ghz, p.volt, row.join(" "));
    }

    println!();
    println!("region time [s] for {workload} workload units:");
    println!(
        "{:>8} {:>10} {:>10} {:>10} {:>10}",
        "f [GHz]", "1 core", "2 cores", "3 cores", "4 cores"
    );
    for p in &machine.pstates {
        let row: Vec<String> = (1..=4)
            .map(|cores| {
                format!(
                    "{:10.4}",
                    region
                        .time(workload, p, cores, machine.serial_fraction)
                        .unwrap()
                )
            })
            .collect();
        println!("{:>8} {}", p.ghz, row.join(" "));
    }

    println!();
    println!("energy [J] for the same work on one core (time * power):");
    for p in &machine.pstates {
        let t = region
            .time(workload, p, 1, machine.serial_fraction)
            .unwrap();
        let e = machine.process_power(p, 1).unwrap() * t;
        println!("  {:3} GHz: {:7.2} J in {:6.4} s", p.ghz, e, t);
    }
    println!();
    println!("Raising the frequency shrinks the static share of the energy but");
    println!("inflates the dynamic share; the sweet spot depends on the weighting.");
}
