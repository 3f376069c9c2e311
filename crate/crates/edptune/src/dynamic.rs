//! Per-step dynamic planning: give the step's critical process the reference
//! configuration and every other process the cheapest configuration that
//! still finishes within the critical process's time, so lighter processes
//! save energy without stretching the step.
//!
//! Planning deliberately ignores switch overheads; `simulate` still charges
//! them, which quantifies what per-step re-tuning costs on machines where
//! switches are not free.

use crate::error::{Error, Result};
use crate::machine::{MachineModel, RegionModel};
use crate::sim::{ProcessConfig, Schedule};
use crate::workload::WorkloadTrace;

/// A per-step schedule produced by the planner, together with the reference
/// configuration every step's critical process runs at.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicPlan {
    pub schedule: Schedule,
    pub reference: ProcessConfig,
}

/// Index of the step's critical process: the largest workload, ties to the
/// lowest index.
pub fn critical_process(step_workloads: &[f64]) -> usize {
    let mut critical = 0;
    for (i, &w) in step_workloads.iter().enumerate() {
        if w > step_workloads[critical] {
            critical = i;
        }
    }
    critical
}

/// Plans one step. The critical process runs the reference config; each other
/// process exhaustively picks the (P-state, cores) pair minimizing its
/// full-slice energy — active energy plus idle power while waiting for the
/// critical finish time — among the pairs whose active time fits within it.
/// The reference config is always feasible, since region time is monotone in
/// workload. Ties break towards lower frequency, then fewer cores.
pub fn plan_step(
    machine: &MachineModel,
    region: &RegionModel,
    step_workloads: &[f64],
    reference: ProcessConfig,
) -> Result<Vec<ProcessConfig>> {
    if step_workloads.is_empty() {
        return Err(Error::Domain(
            "plan_step on an empty workload vector".to_string(),
        ));
    }
    reference.validate(machine)?;

    let critical = critical_process(step_workloads);
    let critical_time = region.time(
        step_workloads[critical],
        machine.pstate(reference.pstate)?,
        reference.cores,
        machine.serial_fraction,
    )?;

    let mut configs = Vec::with_capacity(step_workloads.len());
    for (proc, &workload) in step_workloads.iter().enumerate() {
        if proc == critical {
            configs.push(reference);
            continue;
        }
        let mut best: Option<(ProcessConfig, f64)> = None;
        for pstate in 0..machine.pstates.len() {
            for cores in 1..=machine.max_cores {
                let p = machine.pstate(pstate)?;
                let active = region.time(workload, p, cores, machine.serial_fraction)?;
                if active > critical_time {
                    continue;
                }
                let energy = machine.process_power(p, cores)? * active
                    + machine.static_power_w * (critical_time - active);
                match best {
                    Some((_, best_energy)) if energy >= best_energy => {}
                    _ => best = Some((ProcessConfig::new(pstate, cores), energy)),
                }
            }
        }
        let (cfg, _) = best.ok_or_else(|| {
            Error::Internal(format!(
                "no feasible config for process {proc} (workload {workload}, critical time {critical_time})"
            ))
        })?;
        configs.push(cfg);
    }
    Ok(configs)
}

/// Plans every step of the trace independently.
pub fn plan_trace(
    machine: &MachineModel,
    region: &RegionModel,
    trace: &WorkloadTrace,
    reference: ProcessConfig,
) -> Result<DynamicPlan> {
    let mut rows = Vec::with_capacity(trace.n_steps() * trace.n_procs());
    for step in 0..trace.n_steps() {
        rows.extend(plan_step(
            machine,
            region,
            trace.step_workloads(step),
            reference,
        )?);
    }
    Ok(DynamicPlan {
        schedule: Schedule::from_rows(trace.n_steps(), trace.n_procs(), rows)?,
        reference,
    })
}

/// Energy and makespan of one step under the given per-process configs,
/// ignoring switch overheads. This is the accounting the planner optimizes
/// and the value recorded per training situation.
pub(crate) fn step_cost(
    machine: &MachineModel,
    region: &RegionModel,
    step_workloads: &[f64],
    configs: &[ProcessConfig],
) -> Result<(f64, f64)> {
    if step_workloads.len() != configs.len() {
        return Err(Error::Domain(format!(
            "step has {} workloads but {} configs",
            step_workloads.len(),
            configs.len()
        )));
    }
    let mut actives = Vec::with_capacity(configs.len());
    let mut makespan = 0.0f64;
    for (&w, cfg) in step_workloads.iter().zip(configs) {
        let active = region.time(
            w,
            machine.pstate(cfg.pstate)?,
            cfg.cores,
            machine.serial_fraction,
        )?;
        makespan = makespan.max(active);
        actives.push(active);
    }
    let mut energy = 0.0;
    for (active, cfg) in actives.iter().zip(configs) {
        energy += machine.process_power(machine.pstate(cfg.pstate)?, cfg.cores)? * active
            + machine.static_power_w * (makespan - active);
    }
    Ok((energy, makespan))
}
