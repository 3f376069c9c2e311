//! Whole-run configuration sweep: simulate every candidate (P-state, cores)
//! pair as a uniform schedule, rank by the energy-delay product, and report
//! the trade-off table relative to the highest-frequency, max-cores default.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::machine::{MachineModel, RegionModel};
use crate::metrics::EdpWeight;
use crate::sim::{simulate, ProcessConfig, Schedule};
use crate::workload::WorkloadTrace;

pub const SWEEP_CSV_HEADER: &str = "f_ghz,volt,cores,energy_j,time_s,edp,rel_energy,rel_time";

/// One candidate's outcome. `rel_energy` and `rel_time` are relative to the
/// sweep's reference configuration (highest frequency, most cores), whose own
/// row carries 1.0 in both columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub config: ProcessConfig,
    pub energy_j: f64,
    pub time_s: f64,
    pub edp: f64,
    pub rel_energy: f64,
    pub rel_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Rows sorted by frequency, then cores.
    pub rows: Vec<SweepRow>,
    /// Index into `rows` of the EDP minimizer.
    pub best: usize,
}

impl SweepResult {
    pub fn best_row(&self) -> &SweepRow {
        &self.rows[self.best]
    }

    pub fn to_csv_string(&self, machine: &MachineModel) -> Result<String> {
        let mut out = String::from(SWEEP_CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let p = machine.pstate(row.config.pstate)?;
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                p.ghz,
                p.volt,
                row.config.cores,
                row.energy_j,
                row.time_s,
                row.edp,
                row.rel_energy,
                row.rel_time
            ));
        }
        let best = self.best_row();
        let p = machine.pstate(best.config.pstate)?;
        out.push_str(&format!("# best={},{}\n", p.ghz, best.config.cores));
        Ok(out)
    }

    pub fn write_csv(&self, machine: &MachineModel, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = self.to_csv_string(machine)?;
        fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
    }
}

/// Every (P-state, core count) pair of the machine.
pub fn default_candidates(machine: &MachineModel) -> Vec<ProcessConfig> {
    let mut out = Vec::with_capacity(machine.pstates.len() * machine.max_cores);
    for pstate in 0..machine.pstates.len() {
        for cores in 1..=machine.max_cores {
            out.push(ProcessConfig::new(pstate, cores));
        }
    }
    out
}

/// Simulates each candidate as a uniform schedule over the whole trace and
/// selects the EDP minimizer. Ties break towards lower frequency, then fewer
/// cores, so the outcome is independent of candidate order.
pub fn sweep(
    machine: &MachineModel,
    region: &RegionModel,
    trace: &WorkloadTrace,
    weight: EdpWeight,
    candidates: Option<&[ProcessConfig]>,
) -> Result<SweepResult> {
    let default;
    let candidates = match candidates {
        Some(c) => c,
        None => {
            default = default_candidates(machine);
            &default
        }
    };
    if candidates.is_empty() {
        return Err(Error::Domain("sweep candidate set is empty".to_string()));
    }
    for cfg in candidates {
        cfg.validate(machine)?;
    }

    let mut ordered: Vec<ProcessConfig> = candidates.to_vec();
    ordered.sort_by(|a, b| {
        let fa = machine.pstates[a.pstate].ghz;
        let fb = machine.pstates[b.pstate].ghz;
        fa.partial_cmp(&fb).unwrap().then(a.cores.cmp(&b.cores))
    });

    // Reference: the candidate holding the highest frequency and, within it,
    // the most cores — the un-tuned default configuration.
    let reference = *ordered.last().unwrap();
    let ref_run = simulate(
        machine,
        region,
        trace,
        &Schedule::uniform(trace.n_steps(), trace.n_procs(), reference),
    )?;

    let mut rows = Vec::with_capacity(ordered.len());
    let mut best = 0usize;
    for (i, cfg) in ordered.iter().enumerate() {
        let res = if *cfg == reference {
            ref_run.clone()
        } else {
            simulate(
                machine,
                region,
                trace,
                &Schedule::uniform(trace.n_steps(), trace.n_procs(), *cfg),
            )?
        };
        let edp = res.measurement().edp(weight);
        rows.push(SweepRow {
            config: *cfg,
            energy_j: res.total_energy_j,
            time_s: res.total_time_s,
            edp,
            rel_energy: res.total_energy_j / ref_run.total_energy_j,
            rel_time: res.total_time_s / ref_run.total_time_s,
        });
        if edp < rows[best].edp {
            best = i;
        }
    }

    Ok(SweepResult { rows, best })
}
