//! Semi-automatic tuning: design-time training runs record the best
//! per-process configuration for each observed workload situation; at
//! production time every timestep boundary is a switching point where the
//! closest recorded situation supplies the configuration.
//!
//! A situation is the per-process workload share vector plus the log of the
//! step's total workload, the latter scaled by `lambda` so that the shape of
//! the distribution dominates matching.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamic::{plan_step, step_cost};
use crate::error::{Error, Result};
use crate::machine::{MachineModel, RegionModel};
use crate::sim::{simulate, ProcessConfig, Schedule, SimulationResult};
use crate::workload::WorkloadTrace;

/// Weight of `log_total` in the situation feature vector.
pub const DEFAULT_LAMBDA: f64 = 0.1;
/// Default radius below which two situations are treated as the same during
/// training.
pub const DEFAULT_DEDUPE_EPS: f64 = 0.01;

/// A workload snapshot reduced to matching features: per-process shares of
/// the step total (summing to 1) and the natural log of that total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Situation {
    pub shares: Vec<f64>,
    pub log_total: f64,
}

impl Situation {
    /// Squared Euclidean distance between feature vectors
    /// `shares ++ [lambda * log_total]`.
    pub fn distance_sq(&self, other: &Situation, lambda: f64) -> f64 {
        feature_distance_sq(
            &self.shares,
            self.log_total,
            &other.shares,
            other.log_total,
            lambda,
        )
    }
}

fn feature_distance_sq(
    a_shares: &[f64],
    a_log: f64,
    b_shares: &[f64],
    b_log: f64,
    lambda: f64,
) -> f64 {
    let mut d: f64 = a_shares
        .iter()
        .zip(b_shares)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let dl = lambda * (a_log - b_log);
    d += dl * dl;
    d
}

/// Reduces one step's workloads to its situation.
pub fn situation_of(step_workloads: &[f64]) -> Result<Situation> {
    if step_workloads.is_empty() {
        return Err(Error::Domain(
            "situation of an empty workload vector".to_string(),
        ));
    }
    if let Some(bad) = step_workloads.iter().find(|w| !(**w > 0.0)) {
        return Err(Error::Domain(format!("workloads must be positive ({bad})")));
    }
    let total: f64 = step_workloads.iter().sum();
    Ok(Situation {
        shares: step_workloads.iter().map(|w| w / total).collect(),
        log_total: total.ln(),
    })
}

/// One trained situation with its optimal per-process configs and the step
/// energy recorded at training time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEntry {
    pub shares: Vec<f64>,
    pub log_total: f64,
    pub configs: Vec<ProcessConfig>,
    pub energy_j: f64,
}

impl ModelEntry {
    pub fn situation(&self) -> Situation {
        Situation {
            shares: self.shares.clone(),
            log_total: self.log_total,
        }
    }

    pub fn distance_sq(&self, s: &Situation, lambda: f64) -> f64 {
        feature_distance_sq(&self.shares, self.log_total, &s.shares, s.log_total, lambda)
    }
}

/// The learned situation -> configuration map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningModel {
    pub n_procs: usize,
    pub reference: ProcessConfig,
    pub lambda: f64,
    pub entries: Vec<ModelEntry>,
    /// Hash of the machine and region the model was trained against.
    pub fingerprint: String,
}

/// Canonical hash of a (machine, region) pair, used to detect production
/// runs against hardware descriptions other than the training ones.
pub fn fingerprint(machine: &MachineModel, region: &RegionModel) -> String {
    let mut hasher = Sha256::new();
    hasher.update(
        serde_json::to_string(machine)
            .expect("machine serializes")
            .as_bytes(),
    );
    hasher.update(b"\n");
    hasher.update(
        serde_json::to_string(region)
            .expect("region serializes")
            .as_bytes(),
    );
    hex::encode(hasher.finalize())
}

/// Learns a tuning model from one or more training traces.
///
/// Every step of every trace contributes its situation and the per-step
/// optimal configs from the dynamic planner. A situation within Euclidean
/// feature distance `dedupe_eps` of an already-stored entry is skipped, first
/// one wins, so entry order follows trace order deterministically.
pub fn train(
    machine: &MachineModel,
    region: &RegionModel,
    traces: &[&WorkloadTrace],
    reference: ProcessConfig,
    dedupe_eps: f64,
) -> Result<TuningModel> {
    if traces.is_empty() {
        return Err(Error::Domain(
            "training requires at least one trace".to_string(),
        ));
    }
    if !(dedupe_eps >= 0.0) {
        return Err(Error::Domain(format!(
            "dedupe_eps must be non-negative ({dedupe_eps})"
        )));
    }
    let n_procs = traces[0].n_procs();
    for t in traces {
        if t.n_procs() != n_procs {
            return Err(Error::Domain(format!(
                "training traces disagree on process count ({} vs {})",
                t.n_procs(),
                n_procs
            )));
        }
    }
    reference.validate(machine)?;

    let mut model = TuningModel {
        n_procs,
        reference,
        lambda: DEFAULT_LAMBDA,
        entries: Vec::new(),
        fingerprint: fingerprint(machine, region),
    };
    for trace in traces {
        for step in 0..trace.n_steps() {
            let workloads = trace.step_workloads(step);
            let situation = situation_of(workloads)?;
            let duplicate = model
                .entries
                .iter()
                .any(|e| e.distance_sq(&situation, model.lambda) <= dedupe_eps * dedupe_eps);
            if duplicate {
                continue;
            }
            let configs = plan_step(machine, region, workloads, reference)?;
            let (energy_j, _) = step_cost(machine, region, workloads, &configs)?;
            model.entries.push(ModelEntry {
                shares: situation.shares,
                log_total: situation.log_total,
                configs,
                energy_j,
            });
        }
    }
    if model.entries.is_empty() {
        return Err(Error::Internal(
            "training produced an empty model".to_string(),
        ));
    }
    Ok(model)
}

impl TuningModel {
    /// The stored entry whose feature vector lies closest to `s`; ties go to
    /// the earliest-stored entry.
    pub fn best_match(&self, s: &Situation) -> Result<&ModelEntry> {
        if self.entries.is_empty() {
            return Err(Error::Domain("tuning model has no entries".to_string()));
        }
        if s.shares.len() != self.n_procs {
            return Err(Error::Domain(format!(
                "situation has {} shares but the model expects {}",
                s.shares.len(),
                self.n_procs
            )));
        }
        let mut best = 0;
        let mut best_d = self.entries[0].distance_sq(s, self.lambda);
        for (i, entry) in self.entries.iter().enumerate().skip(1) {
            let d = entry.distance_sq(s, self.lambda);
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        Ok(&self.entries[best])
    }

    pub fn fingerprint_matches(&self, machine: &MachineModel, region: &RegionModel) -> bool {
        self.fingerprint == fingerprint(machine, region)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn write_json_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json_string()).map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn read_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let model: TuningModel = serde_json::from_str(&text)
            .map_err(|e| Error::parse(path.display().to_string(), Some(e.line()), e.to_string()))?;
        if model.entries.is_empty() {
            return Err(Error::parse(
                path.display().to_string(),
                None,
                "tuning model has no entries",
            ));
        }
        for entry in &model.entries {
            if entry.shares.len() != model.n_procs || entry.configs.len() != model.n_procs {
                return Err(Error::parse(
                    path.display().to_string(),
                    None,
                    format!("model entry does not match n_procs = {}", model.n_procs),
                ));
            }
        }
        Ok(model)
    }
}

/// The schedule a production run adopts: at every timestep boundary, match
/// the current situation and take the stored configs.
pub fn production_schedule(trace: &WorkloadTrace, model: &TuningModel) -> Result<Schedule> {
    if trace.n_procs() != model.n_procs {
        return Err(Error::Domain(format!(
            "trace has {} processes but the model expects {}",
            trace.n_procs(),
            model.n_procs
        )));
    }
    let mut rows = Vec::with_capacity(trace.n_steps() * trace.n_procs());
    for step in 0..trace.n_steps() {
        let situation = situation_of(trace.step_workloads(step))?;
        rows.extend(model.best_match(&situation)?.configs.iter().copied());
    }
    Schedule::from_rows(trace.n_steps(), trace.n_procs(), rows)
}

/// Runs the trace under the matched schedule with full simulator semantics,
/// including switch overheads where the machine defines them.
pub fn run_production(
    machine: &MachineModel,
    region: &RegionModel,
    trace: &WorkloadTrace,
    model: &TuningModel,
) -> Result<SimulationResult> {
    let schedule = production_schedule(trace, model)?;
    simulate(machine, region, trace, &schedule)
}
