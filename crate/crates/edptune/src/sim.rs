//! Barrier-synchronized timestep execution of a workload trace under a
//! per-step, per-process schedule.
//!
//! Every step runs the region once per process, then all processes meet at a
//! barrier. The step's makespan is the slowest process's active time plus any
//! P-state switch latency; the others wait at the barrier drawing only static
//! power. Energy integrates exactly because power is piecewise constant:
//! `(static + cores * dynamic) * active + static * (wait + switch)`, plus the
//! switch energy whenever a process changes its P-state between steps.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::machine::{MachineModel, RegionModel};
use crate::metrics::Measurement;
use crate::workload::WorkloadTrace;

pub const PLAN_CSV_HEADER: &str = "step,process,f_ghz,cores";
pub const SLICE_CSV_HEADER: &str = "step,process,f_ghz,cores,active_s,wait_s,switch_s,energy_j";

/// One process's operating point for one step: a P-state index into the
/// machine's table and the number of active cores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessConfig {
    pub pstate: usize,
    pub cores: usize,
}

impl ProcessConfig {
    pub fn new(pstate: usize, cores: usize) -> Self {
        Self { pstate, cores }
    }

    pub fn validate(&self, machine: &MachineModel) -> Result<()> {
        if self.pstate >= machine.pstates.len() {
            return Err(Error::Domain(format!(
                "P-state index {} out of range (machine has {})",
                self.pstate,
                machine.pstates.len()
            )));
        }
        if self.cores < 1 || self.cores > machine.max_cores {
            return Err(Error::Domain(format!(
                "cores {} outside 1..={}",
                self.cores, machine.max_cores
            )));
        }
        Ok(())
    }
}

/// A steps x processes matrix of `ProcessConfig`. A uniform schedule (the
/// same config everywhere) expresses static tuning; anything else is dynamic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    n_steps: usize,
    n_procs: usize,
    configs: Vec<ProcessConfig>,
}

impl Schedule {
    pub fn uniform(n_steps: usize, n_procs: usize, config: ProcessConfig) -> Self {
        Self {
            n_steps,
            n_procs,
            configs: vec![config; n_steps * n_procs],
        }
    }

    pub fn from_rows(n_steps: usize, n_procs: usize, configs: Vec<ProcessConfig>) -> Result<Self> {
        if configs.len() != n_steps * n_procs {
            return Err(Error::Domain(format!(
                "schedule has {} configs, expected {}",
                configs.len(),
                n_steps * n_procs
            )));
        }
        Ok(Self {
            n_steps,
            n_procs,
            configs,
        })
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn n_procs(&self) -> usize {
        self.n_procs
    }

    pub fn get(&self, step: usize, proc: usize) -> ProcessConfig {
        self.configs[step * self.n_procs + proc]
    }

    pub fn step_configs(&self, step: usize) -> &[ProcessConfig] {
        &self.configs[step * self.n_procs..(step + 1) * self.n_procs]
    }

    pub fn is_uniform(&self) -> bool {
        self.configs.windows(2).all(|w| w[0] == w[1])
    }

    /// Plan CSV carries frequencies, not P-state indices, so a plan can be
    /// read back against the machine that defined it.
    pub fn to_plan_csv_string(&self, machine: &MachineModel) -> Result<String> {
        let mut out = String::from(PLAN_CSV_HEADER);
        out.push('\n');
        for step in 0..self.n_steps {
            for proc in 0..self.n_procs {
                let cfg = self.get(step, proc);
                let p = machine.pstate(cfg.pstate)?;
                out.push_str(&format!("{},{},{},{}\n", step, proc, p.ghz, cfg.cores));
            }
        }
        Ok(out)
    }

    pub fn write_plan_csv(&self, machine: &MachineModel, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = self.to_plan_csv_string(machine)?;
        fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn read_plan_csv(path: impl AsRef<Path>, machine: &MachineModel) -> Result<Self> {
        let path = path.as_ref();
        let text =
            fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::from_plan_csv_str(&text, &path.display().to_string(), machine)
    }

    pub fn from_plan_csv_str(text: &str, origin: &str, machine: &MachineModel) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header.trim() == PLAN_CSV_HEADER => {}
            Some((_, header)) => {
                return Err(Error::parse(
                    origin,
                    Some(1),
                    format!("expected header `{PLAN_CSV_HEADER}`, found `{header}`"),
                ))
            }
            None => return Err(Error::parse(origin, None, "empty plan file")),
        }

        let mut cells: Vec<(usize, usize, ProcessConfig)> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let mut max_step = 0usize;
        let mut max_proc = 0usize;
        for (idx, line) in lines {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(Error::parse(
                    origin,
                    Some(line_no),
                    format!("expected 4 comma-separated fields, found {}", fields.len()),
                ));
            }
            let step: usize = fields[0].trim().parse().map_err(|_| {
                Error::parse(
                    origin,
                    Some(line_no),
                    format!("invalid step index `{}`", fields[0]),
                )
            })?;
            let proc: usize = fields[1].trim().parse().map_err(|_| {
                Error::parse(
                    origin,
                    Some(line_no),
                    format!("invalid process index `{}`", fields[1]),
                )
            })?;
            let ghz: f64 = fields[2].trim().parse().map_err(|_| {
                Error::parse(
                    origin,
                    Some(line_no),
                    format!("invalid frequency `{}`", fields[2]),
                )
            })?;
            let cores: usize = fields[3].trim().parse().map_err(|_| {
                Error::parse(
                    origin,
                    Some(line_no),
                    format!("invalid core count `{}`", fields[3]),
                )
            })?;
            let pstate = machine.pstate_by_ghz(ghz).ok_or_else(|| {
                Error::parse(
                    origin,
                    Some(line_no),
                    format!("no machine P-state with frequency {ghz} GHz"),
                )
            })?;
            if !seen.insert((step, proc)) {
                return Err(Error::parse(
                    origin,
                    Some(line_no),
                    format!("duplicate entry for (step {step}, process {proc})"),
                ));
            }
            max_step = max_step.max(step);
            max_proc = max_proc.max(proc);
            cells.push((step, proc, ProcessConfig::new(pstate, cores)));
        }
        if cells.is_empty() {
            return Err(Error::parse(origin, None, "plan file has no data rows"));
        }

        let n_steps = max_step + 1;
        let n_procs = max_proc + 1;
        let mut configs = vec![None; n_steps * n_procs];
        for (step, proc, cfg) in cells {
            configs[step * n_procs + proc] = Some(cfg);
        }
        if let Some(missing) = configs.iter().position(|c| c.is_none()) {
            return Err(Error::parse(
                origin,
                None,
                format!(
                    "incomplete matrix: missing entry (step {}, process {})",
                    missing / n_procs,
                    missing % n_procs
                ),
            ));
        }
        Self::from_rows(
            n_steps,
            n_procs,
            configs.into_iter().map(Option::unwrap).collect(),
        )
    }
}

/// What one process did during one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceRecord {
    pub step: usize,
    pub process: usize,
    pub config: ProcessConfig,
    pub active_s: f64,
    pub wait_s: f64,
    pub switch_s: f64,
    pub energy_j: f64,
}

/// Full outcome of a simulated run: per-slice records plus exact totals.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub slices: Vec<SliceRecord>,
    pub step_makespans: Vec<f64>,
    pub total_energy_j: f64,
    pub total_time_s: f64,
}

impl SimulationResult {
    pub fn measurement(&self) -> Measurement {
        Measurement {
            energy_j: self.total_energy_j,
            time_s: self.total_time_s,
        }
    }

    pub fn to_slice_csv_string(&self, machine: &MachineModel) -> Result<String> {
        let mut out = String::from(SLICE_CSV_HEADER);
        out.push('\n');
        for s in &self.slices {
            let p = machine.pstate(s.config.pstate)?;
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                s.step,
                s.process,
                p.ghz,
                s.config.cores,
                s.active_s,
                s.wait_s,
                s.switch_s,
                s.energy_j
            ));
        }
        Ok(out)
    }

    pub fn write_slice_csv(&self, machine: &MachineModel, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = self.to_slice_csv_string(machine)?;
        fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
    }
}

/// Runs the timestep loop and accounts time and energy per slice.
///
/// Per step, each process computes for `region.time(workload, pstate, cores)`
/// seconds, pays the switch latency if its P-state differs from the previous
/// step (never at step 0), and then waits for the barrier. Waiting and
/// switching draw static power only.
pub fn simulate(
    machine: &MachineModel,
    region: &RegionModel,
    trace: &WorkloadTrace,
    schedule: &Schedule,
) -> Result<SimulationResult> {
    if schedule.n_steps() != trace.n_steps() || schedule.n_procs() != trace.n_procs() {
        return Err(Error::Domain(format!(
            "schedule shape {}x{} does not match trace shape {}x{}",
            schedule.n_steps(),
            schedule.n_procs(),
            trace.n_steps(),
            trace.n_procs()
        )));
    }
    for step in 0..schedule.n_steps() {
        for proc in 0..schedule.n_procs() {
            schedule.get(step, proc).validate(machine)?;
        }
    }

    let n_steps = trace.n_steps();
    let n_procs = trace.n_procs();
    let mut slices = Vec::with_capacity(n_steps * n_procs);
    let mut step_makespans = Vec::with_capacity(n_steps);
    let mut total_energy = 0.0;
    let mut total_time = 0.0;

    let mut active = vec![0.0; n_procs];
    let mut switch = vec![0.0; n_procs];
    let mut switched = vec![false; n_procs];
    for step in 0..n_steps {
        let mut makespan = 0.0f64;
        for proc in 0..n_procs {
            let cfg = schedule.get(step, proc);
            let pstate = machine.pstate(cfg.pstate)?;
            active[proc] = region.time(
                trace.get(step, proc),
                pstate,
                cfg.cores,
                machine.serial_fraction,
            )?;
            switched[proc] = step > 0 && schedule.get(step - 1, proc).pstate != cfg.pstate;
            switch[proc] = if switched[proc] {
                machine.switch_latency_s
            } else {
                0.0
            };
            makespan = makespan.max(active[proc] + switch[proc]);
        }
        for proc in 0..n_procs {
            let cfg = schedule.get(step, proc);
            let pstate = machine.pstate(cfg.pstate)?;
            let wait = makespan - (active[proc] + switch[proc]);
            let mut energy = machine.process_power(pstate, cfg.cores)? * active[proc]
                + machine.static_power_w * (wait + switch[proc]);
            if switched[proc] {
                energy += machine.switch_energy_j;
            }
            total_energy += energy;
            slices.push(SliceRecord {
                step,
                process: proc,
                config: cfg,
                active_s: active[proc],
                wait_s: wait,
                switch_s: switch[proc],
                energy_j: energy,
            });
        }
        step_makespans.push(makespan);
        total_time += makespan;
    }

    Ok(SimulationResult {
        slices,
        step_makespans,
        total_energy_j: total_energy,
        total_time_s: total_time,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::PState;

    fn machine(pstates: Vec<PState>, static_w: f64, coeff: f64, max_cores: usize) -> MachineModel {
        MachineModel {
            pstates,
            static_power_w: static_w,
            dyn_coeff: coeff,
            max_cores,
            serial_fraction: 0.0,
            switch_latency_s: 0.0,
            switch_energy_j: 0.0,
        }
    }

    fn two_proc_fixture() -> (MachineModel, RegionModel, WorkloadTrace) {
        let m = machine(vec![PState::new(2.0, 1.0)], 50.0, 5.0, 1);
        let r = RegionModel::new(1e6, 0.0);
        let t = WorkloadTrace::new(1, 2, vec![1000.0, 500.0]).unwrap();
        (m, r, t)
    }

    // Straight-line recomputation of the two-process fixture:
    //   t1 = 1000 * 1e6 / 2e9 = 0.5 s,  t2 = 500 * 1e6 / 2e9 = 0.25 s
    //   makespan = 0.5 s
    //   e1 = (50 + 1*5*1.0^2*2.0) * 0.5            = 30 J
    //   e2 = 60 * 0.25 + 50 * (0.5 - 0.25)         = 27.5 J
    #[test]
    fn imbalanced_step_charges_idle_power_while_waiting() {
        let (m, r, t) = two_proc_fixture();
        let sched = Schedule::uniform(1, 2, ProcessConfig::new(0, 1));
        let res = simulate(&m, &r, &t, &sched).unwrap();
        assert_eq!(res.total_time_s, 0.5);
        assert!((res.total_energy_j - 57.5).abs() < 1e-12);
        assert_eq!(res.slices[0].energy_j, 30.0);
        assert!((res.slices[1].energy_j - 27.5).abs() < 1e-12);
        assert_eq!(res.slices[0].wait_s, 0.0);
        assert!((res.slices[1].wait_s - 0.25).abs() < 1e-12);
    }

    #[test]
    fn balanced_step_has_no_waiting() {
        let (m, r, _) = two_proc_fixture();
        let t = WorkloadTrace::new(1, 2, vec![1000.0, 1000.0]).unwrap();
        let sched = Schedule::uniform(1, 2, ProcessConfig::new(0, 1));
        let res = simulate(&m, &r, &t, &sched).unwrap();
        assert_eq!(res.total_time_s, 0.5);
        assert!((res.total_energy_j - 60.0).abs() < 1e-12);
        assert!(res.slices.iter().all(|s| s.wait_s == 0.0));
    }

    #[test]
    fn constant_per_process_schedule_never_switches() {
        let m = machine(
            vec![PState::new(1.0, 0.8), PState::new(2.0, 1.0)],
            50.0,
            5.0,
            1,
        );
        let m = MachineModel {
            switch_latency_s: 0.1,
            switch_energy_j: 5.0,
            ..m
        };
        let r = RegionModel::new(1e6, 0.0);
        let t = WorkloadTrace::new(3, 2, vec![1000.0; 6]).unwrap();
        // Different configs per process, but constant across steps.
        let rows = vec![
            ProcessConfig::new(0, 1),
            ProcessConfig::new(1, 1),
            ProcessConfig::new(0, 1),
            ProcessConfig::new(1, 1),
            ProcessConfig::new(0, 1),
            ProcessConfig::new(1, 1),
        ];
        let sched = Schedule::from_rows(3, 2, rows).unwrap();
        let res = simulate(&m, &r, &t, &sched).unwrap();
        assert!(res.slices.iter().all(|s| s.switch_s == 0.0));
    }

    // Hand-computed switch accounting: process 0 changes P-state at step 1.
    //   step 0: both at f=2.0: t = 0.5, makespan 0.5, e = 60*0.5 = 30 each
    //   step 1: proc 0 at f=1.0: active = 1.0, switch = 0.1, span = 1.1
    //           proc 1 at f=2.0: active = 0.5, wait = 0.6
    //   e0 = (50 + 5*0.64*1.0)*1.0 + 50*0.1 + 7 = 53.2 + 5 + 7 = 65.2
    //   e1 = 60*0.5 + 50*0.6 = 60
    #[test]
    fn pstate_switch_charges_latency_and_energy_once() {
        let m = MachineModel {
            switch_latency_s: 0.1,
            switch_energy_j: 7.0,
            ..machine(
                vec![PState::new(1.0, 0.8), PState::new(2.0, 1.0)],
                50.0,
                5.0,
                1,
            )
        };
        let r = RegionModel::new(1e6, 0.0);
        let t = WorkloadTrace::new(2, 2, vec![1000.0; 4]).unwrap();
        let rows = vec![
            ProcessConfig::new(1, 1),
            ProcessConfig::new(1, 1),
            ProcessConfig::new(0, 1),
            ProcessConfig::new(1, 1),
        ];
        let sched = Schedule::from_rows(2, 2, rows).unwrap();
        let res = simulate(&m, &r, &t, &sched).unwrap();
        assert!((res.step_makespans[0] - 0.5).abs() < 1e-12);
        assert!((res.step_makespans[1] - 1.1).abs() < 1e-12);
        let e0 = res.slices[2].energy_j;
        let e1 = res.slices[3].energy_j;
        assert!((e0 - 65.2).abs() < 1e-12, "{e0}");
        assert!((e1 - 60.0).abs() < 1e-12, "{e1}");
        // No switch charged at step 0.
        assert!(res.slices[..2].iter().all(|s| s.switch_s == 0.0));
    }

    #[test]
    fn identical_inputs_give_bit_identical_results() {
        let m = machine(
            vec![PState::new(1.0, 0.8), PState::new(1.9, 1.05)],
            37.5,
            11.0,
            2,
        );
        let r = RegionModel::new(7.7e5, 3e-6);
        let t = crate::workload::generate(&crate::workload::GeneratorParams {
            n_steps: 12,
            n_procs: 3,
            initial_workload: 1234.5,
            drift: 0.3,
            min_factor: 0.5,
            max_factor: 2.0,
            seed: 77,
        })
        .unwrap();
        let sched = Schedule::uniform(12, 3, ProcessConfig::new(1, 2));
        let a = simulate(&m, &r, &t, &sched).unwrap();
        let b = simulate(&m, &r, &t, &sched).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn totals_are_sums_of_slices_and_makespans() {
        let m = machine(
            vec![
                PState::new(1.0, 0.8),
                PState::new(1.7, 0.95),
                PState::new(2.2, 1.1),
            ],
            30.0,
            8.0,
            3,
        );
        let r = RegionModel::new(5e5, 2e-5);
        let t = crate::workload::generate(&crate::workload::GeneratorParams {
            n_steps: 10,
            n_procs: 3,
            initial_workload: 800.0,
            drift: 0.2,
            min_factor: 0.5,
            max_factor: 2.0,
            seed: 9,
        })
        .unwrap();
        let sched = Schedule::uniform(10, 3, ProcessConfig::new(2, 2));
        let res = simulate(&m, &r, &t, &sched).unwrap();
        let slice_sum: f64 = res.slices.iter().map(|s| s.energy_j).sum();
        let makespan_sum: f64 = res.step_makespans.iter().sum();
        assert!((res.total_energy_j - slice_sum).abs() <= 1e-9 * res.total_energy_j);
        assert!((res.total_time_s - makespan_sum).abs() <= 1e-9 * res.total_time_s);
        // Idle power is the floor.
        assert!(res.total_energy_j >= 3.0 * 30.0 * res.total_time_s * (1.0 - 1e-12));
    }

    #[test]
    fn raising_every_pstate_never_slows_the_run() {
        let m = machine(
            vec![
                PState::new(1.0, 0.8),
                PState::new(1.5, 0.9),
                PState::new(2.0, 1.0),
            ],
            50.0,
            5.0,
            2,
        );
        let r = RegionModel::new(1e6, 1e-5);
        let t = crate::workload::generate(&crate::workload::GeneratorParams {
            n_steps: 8,
            n_procs: 4,
            initial_workload: 500.0,
            drift: 0.3,
            min_factor: 0.5,
            max_factor: 2.0,
            seed: 11,
        })
        .unwrap();
        let lower = Schedule::uniform(8, 4, ProcessConfig::new(0, 2));
        let higher = Schedule::uniform(8, 4, ProcessConfig::new(1, 2));
        let t_lower = simulate(&m, &r, &t, &lower).unwrap().total_time_s;
        let t_higher = simulate(&m, &r, &t, &higher).unwrap().total_time_s;
        assert!(t_higher <= t_lower);
    }

    #[test]
    fn shape_and_config_mismatches_are_domain_errors() {
        let (m, r, t) = two_proc_fixture();
        let sched = Schedule::uniform(2, 2, ProcessConfig::new(0, 1));
        assert!(simulate(&m, &r, &t, &sched).is_err());
        let sched = Schedule::uniform(1, 2, ProcessConfig::new(3, 1));
        assert!(simulate(&m, &r, &t, &sched).is_err());
        let sched = Schedule::uniform(1, 2, ProcessConfig::new(0, 2));
        assert!(simulate(&m, &r, &t, &sched).is_err());
    }

    #[test]
    fn plan_csv_round_trips_against_the_machine() {
        let m = machine(
            vec![
                PState::new(1.0, 0.8),
                PState::new(1.5, 0.9),
                PState::new(2.5, 1.2),
            ],
            20.0,
            30.0,
            4,
        );
        let rows = vec![
            ProcessConfig::new(0, 1),
            ProcessConfig::new(2, 4),
            ProcessConfig::new(1, 2),
            ProcessConfig::new(2, 3),
        ];
        let sched = Schedule::from_rows(2, 2, rows).unwrap();
        let text = sched.to_plan_csv_string(&m).unwrap();
        let back = Schedule::from_plan_csv_str(&text, "test", &m).unwrap();
        assert_eq!(sched, back);
    }

    #[test]
    fn plan_csv_rejects_unknown_frequency() {
        let m = machine(vec![PState::new(1.0, 0.8)], 20.0, 30.0, 1);
        let text = "step,process,f_ghz,cores\n0,0,3.7,1\n";
        let err = Schedule::from_plan_csv_str(text, "test", &m).unwrap_err();
        assert!(err.to_string().contains("no machine P-state"), "{err}");
    }

    #[test]
    fn slice_csv_lists_one_row_per_slice() {
        let (m, r, t) = two_proc_fixture();
        let sched = Schedule::uniform(1, 2, ProcessConfig::new(0, 1));
        let res = simulate(&m, &r, &t, &sched).unwrap();
        let csv = res.to_slice_csv_string(&m).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], SLICE_CSV_HEADER);
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1], "0,0,2,1,0.5,0,0,30");
    }
}
