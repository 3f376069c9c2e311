//! Shared fixtures, random instance generators, and a straight-line oracle
//! for the integration suites. The oracle recomputes every quantity directly
//! from the raw model fields so it stays independent of the library's
//! simulation and planning paths.

#![allow(dead_code)]

use edptune::machine::{MachineModel, PState, RegionModel};
use edptune::sim::ProcessConfig;
use edptune::workload::{generate, GeneratorParams, WorkloadTrace};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Dynamic-power-dominated machine: lowering the frequency pays off even on
/// the pure energy objective.
pub fn fig_shape_machine() -> MachineModel {
    MachineModel {
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
    }
}

/// Idle-power-dominated machine: waiting is expensive, so stretching a step
/// is never worth small dynamic savings.
pub fn idle_heavy_machine() -> MachineModel {
    MachineModel {
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
    }
}

pub fn compute_region() -> RegionModel {
    RegionModel::new(1e6, 0.0)
}

/// The seeded imbalance fixture: 100 steps, 4 processes, drift 0.05,
/// bounds [0.5, 2.0] around an initial workload of 1000.
pub fn imbalance_fixture_trace() -> WorkloadTrace {
    generate(&GeneratorParams {
        n_steps: 100,
        n_procs: 4,
        initial_workload: 1000.0,
        drift: 0.05,
        min_factor: 0.5,
        max_factor: 2.0,
        seed: 42,
    })
    .unwrap()
}

/// Multiplies every workload by an independent factor in [0.95, 1.05).
pub fn perturb_trace(trace: &WorkloadTrace, seed: u64) -> WorkloadTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(trace.n_steps() * trace.n_procs());
    for step in 0..trace.n_steps() {
        for proc in 0..trace.n_procs() {
            let factor = 1.0 + rng.gen_range(-0.05..0.05);
            data.push(trace.get(step, proc) * factor);
        }
    }
    WorkloadTrace::new(trace.n_steps(), trace.n_procs(), data).unwrap()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    (a - b).abs() <= tol * scale
}

/// Straight-line recomputation of the model's arithmetic.
pub mod oracle {
    use super::*;

    pub fn region_time(
        region: &RegionModel,
        workload: f64,
        ghz: f64,
        cores: usize,
        sf: f64,
    ) -> f64 {
        workload
            * (region.compute_cost_cycles / (ghz * 1e9) + region.memory_time_s)
            * (sf + (1.0 - sf) / cores as f64)
    }

    pub fn process_power(machine: &MachineModel, pstate: usize, cores: usize) -> f64 {
        let p = &machine.pstates[pstate];
        machine.static_power_w + cores as f64 * machine.dyn_coeff * p.volt * p.volt * p.ghz
    }

    /// Energy and makespan of one step under per-process configs, without
    /// switch overheads.
    pub fn step_energy(
        machine: &MachineModel,
        region: &RegionModel,
        workloads: &[f64],
        configs: &[ProcessConfig],
    ) -> (f64, f64) {
        let times: Vec<f64> = workloads
            .iter()
            .zip(configs)
            .map(|(&w, c)| {
                region_time(
                    region,
                    w,
                    machine.pstates[c.pstate].ghz,
                    c.cores,
                    machine.serial_fraction,
                )
            })
            .collect();
        let makespan = times.iter().cloned().fold(0.0f64, f64::max);
        let mut energy = 0.0;
        for (t, c) in times.iter().zip(configs) {
            energy += process_power(machine, c.pstate, c.cores) * t
                + machine.static_power_w * (makespan - t);
        }
        (energy, makespan)
    }

    /// Whole-run energy and time for one uniform configuration (no switch
    /// overheads arise because the config never changes).
    pub fn uniform_run(
        machine: &MachineModel,
        region: &RegionModel,
        trace: &WorkloadTrace,
        config: ProcessConfig,
    ) -> (f64, f64) {
        let configs = vec![config; trace.n_procs()];
        let mut energy = 0.0;
        let mut time = 0.0;
        for step in 0..trace.n_steps() {
            let (e, t) = step_energy(machine, region, trace.step_workloads(step), &configs);
            energy += e;
            time += t;
        }
        (energy, time)
    }

    /// Exhaustive argmin over uniform candidates of `E * T^w`, scanning in
    /// (frequency, cores) order so ties resolve to the lower frequency and
    /// fewer cores.
    pub fn best_uniform_config(
        machine: &MachineModel,
        region: &RegionModel,
        trace: &WorkloadTrace,
        weight: u32,
    ) -> ProcessConfig {
        let mut best: Option<(ProcessConfig, f64)> = None;
        for pstate in 0..machine.pstates.len() {
            for cores in 1..=machine.max_cores {
                let cfg = ProcessConfig::new(pstate, cores);
                let (e, t) = uniform_run(machine, region, trace, cfg);
                let edp = e * t.powi(weight as i32);
                match best {
                    Some((_, b)) if edp >= b => {}
                    _ => best = Some((cfg, edp)),
                }
            }
        }
        best.unwrap().0
    }

    /// Exhaustive joint optimum for one step: the critical process is pinned
    /// to the reference config; every assignment of feasible configs to the
    /// remaining processes is enumerated lexicographically and ranked by
    /// total step energy, strict improvement only.
    pub fn step_joint_optimum(
        machine: &MachineModel,
        region: &RegionModel,
        workloads: &[f64],
        reference: ProcessConfig,
    ) -> Vec<ProcessConfig> {
        let mut critical = 0;
        for (i, &w) in workloads.iter().enumerate() {
            if w > workloads[critical] {
                critical = i;
            }
        }
        let critical_time = region_time(
            region,
            workloads[critical],
            machine.pstates[reference.pstate].ghz,
            reference.cores,
            machine.serial_fraction,
        );

        // Per-process feasible candidates in (frequency, cores) order.
        let mut free_procs = Vec::new();
        let mut candidates: Vec<Vec<ProcessConfig>> = Vec::new();
        for (proc, &w) in workloads.iter().enumerate() {
            if proc == critical {
                continue;
            }
            let mut list = Vec::new();
            for pstate in 0..machine.pstates.len() {
                for cores in 1..=machine.max_cores {
                    let t = region_time(
                        region,
                        w,
                        machine.pstates[pstate].ghz,
                        cores,
                        machine.serial_fraction,
                    );
                    if t <= critical_time {
                        list.push(ProcessConfig::new(pstate, cores));
                    }
                }
            }
            assert!(!list.is_empty(), "reference must be feasible");
            free_procs.push(proc);
            candidates.push(list);
        }

        let assignment_energy = |choice: &[usize]| -> f64 {
            let mut energy =
                process_power(machine, reference.pstate, reference.cores) * critical_time;
            for (k, &proc) in free_procs.iter().enumerate() {
                let cfg = candidates[k][choice[k]];
                let t = region_time(
                    region,
                    workloads[proc],
                    machine.pstates[cfg.pstate].ghz,
                    cfg.cores,
                    machine.serial_fraction,
                );
                energy += process_power(machine, cfg.pstate, cfg.cores) * t
                    + machine.static_power_w * (critical_time - t);
            }
            energy
        };

        let mut best_choice = vec![0usize; free_procs.len()];
        if !free_procs.is_empty() {
            let mut choice = vec![0usize; free_procs.len()];
            let mut best_energy = assignment_energy(&choice);
            loop {
                // Odometer increment over the candidate lists.
                let mut pos = choice.len();
                loop {
                    if pos == 0 {
                        pos = usize::MAX;
                        break;
                    }
                    pos -= 1;
                    choice[pos] += 1;
                    if choice[pos] < candidates[pos].len() {
                        break;
                    }
                    choice[pos] = 0;
                }
                if pos == usize::MAX {
                    break;
                }
                let energy = assignment_energy(&choice);
                if energy < best_energy {
                    best_energy = energy;
                    best_choice = choice.clone();
                }
            }
        }

        let mut out = vec![reference; workloads.len()];
        for (k, &proc) in free_procs.iter().enumerate() {
            out[proc] = candidates[k][best_choice[k]];
        }
        out
    }
}

/// Random instance generators for the property suites.
pub mod rnd {
    use super::*;

    pub fn machine(rng: &mut ChaCha8Rng, max_pstates: usize, max_cores: usize) -> MachineModel {
        let n_pstates = rng.gen_range(2..=max_pstates.max(2));
        let mut pstates = Vec::with_capacity(n_pstates);
        let mut ghz = rng.gen_range(0.8..1.6);
        let mut volt = rng.gen_range(0.7..0.9);
        for _ in 0..n_pstates {
            pstates.push(PState::new(ghz, volt));
            ghz += rng.gen_range(0.2..0.8);
            volt += rng.gen_range(0.01..0.15);
        }
        MachineModel {
            pstates,
            static_power_w: rng.gen_range(5.0..80.0),
            dyn_coeff: rng.gen_range(1.0..40.0),
            max_cores: rng.gen_range(1..=max_cores.max(1)),
            serial_fraction: rng.gen_range(0.05..0.5),
            switch_latency_s: 0.0,
            switch_energy_j: 0.0,
        }
    }

    pub fn region(rng: &mut ChaCha8Rng) -> RegionModel {
        RegionModel::new(rng.gen_range(1e5..5e6), rng.gen_range(1e-6..1e-4))
    }

    pub fn trace(rng: &mut ChaCha8Rng, max_steps: usize, max_procs: usize) -> WorkloadTrace {
        let n_steps = rng.gen_range(1..=max_steps);
        let n_procs = rng.gen_range(1..=max_procs);
        let data: Vec<f64> = (0..n_steps * n_procs)
            .map(|_| rng.gen_range(100.0..2000.0))
            .collect();
        WorkloadTrace::new(n_steps, n_procs, data).unwrap()
    }

    pub fn config(rng: &mut ChaCha8Rng, machine: &MachineModel) -> ProcessConfig {
        ProcessConfig::new(
            rng.gen_range(0..machine.pstates.len()),
            rng.gen_range(1..=machine.max_cores),
        )
    }
}
