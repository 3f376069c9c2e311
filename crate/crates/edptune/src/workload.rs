//! Per-step, per-process workload traces and a bounded-random-walk generator
//! that mimics the drifting load of an adaptively refined, domain-decomposed
//! simulation.
//!
//! Trace files are CSV with header `step,process,workload`, 0-based indices,
//! UTF-8 and LF line endings. Rows may appear in any order; the matrix is
//! rebuilt from the indices and must be complete.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub const TRACE_CSV_HEADER: &str = "step,process,workload";

/// A rectangular steps x processes matrix of positive workloads.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadTrace {
    n_steps: usize,
    n_procs: usize,
    data: Vec<f64>, // row-major, data[step * n_procs + proc]
}

impl WorkloadTrace {
    pub fn new(n_steps: usize, n_procs: usize, data: Vec<f64>) -> Result<Self> {
        if n_steps < 1 || n_procs < 1 {
            return Err(Error::Domain(format!(
                "trace shape must be at least 1x1 ({n_steps}x{n_procs})"
            )));
        }
        if data.len() != n_steps * n_procs {
            return Err(Error::Domain(format!(
                "trace data has {} entries, expected {}",
                data.len(),
                n_steps * n_procs
            )));
        }
        if let Some(bad) = data.iter().find(|w| !(**w > 0.0)) {
            return Err(Error::Domain(format!("workloads must be positive ({bad})")));
        }
        Ok(Self {
            n_steps,
            n_procs,
            data,
        })
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn n_procs(&self) -> usize {
        self.n_procs
    }

    pub fn get(&self, step: usize, proc: usize) -> f64 {
        self.data[step * self.n_procs + proc]
    }

    /// Workloads of all processes at one step.
    pub fn step_workloads(&self, step: usize) -> &[f64] {
        &self.data[step * self.n_procs..(step + 1) * self.n_procs]
    }

    /// Mean over steps of the per-step imbalance.
    pub fn mean_imbalance(&self) -> f64 {
        let sum: f64 = (0..self.n_steps)
            .map(|s| {
                imbalance(self.step_workloads(s)).expect("trace rows are non-empty and positive")
            })
            .sum();
        sum / self.n_steps as f64
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from(TRACE_CSV_HEADER);
        out.push('\n');
        for step in 0..self.n_steps {
            for proc in 0..self.n_procs {
                out.push_str(&format!("{},{},{}\n", step, proc, self.get(step, proc)));
            }
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::from_csv_str(&text, &path.display().to_string())
    }

    /// Parses trace CSV, reporting the first offending line on error.
    pub fn from_csv_str(text: &str, origin: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header.trim() == TRACE_CSV_HEADER => {}
            Some((_, header)) => {
                return Err(Error::parse(
                    origin,
                    Some(1),
                    format!("expected header `{TRACE_CSV_HEADER}`, found `{header}`"),
                ))
            }
            None => return Err(Error::parse(origin, None, "empty trace file")),
        }

        let mut cells: Vec<(usize, usize, f64)> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let mut max_step = 0usize;
        let mut max_proc = 0usize;
        for (idx, line) in lines {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::parse(
                    origin,
                    Some(line_no),
                    format!("expected 3 comma-separated fields, found {}", fields.len()),
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
            let workload: f64 = fields[2].trim().parse().map_err(|_| {
                Error::parse(
                    origin,
                    Some(line_no),
                    format!("invalid workload `{}`", fields[2]),
                )
            })?;
            if !(workload > 0.0) {
                return Err(Error::parse(
                    origin,
                    Some(line_no),
                    format!("non-positive workload ({workload})"),
                ));
            }
            if !seen.insert((step, proc)) {
                return Err(Error::parse(
                    origin,
                    Some(line_no),
                    format!("duplicate entry for (step {step}, process {proc})"),
                ));
            }
            max_step = max_step.max(step);
            max_proc = max_proc.max(proc);
            cells.push((step, proc, workload));
        }
        if cells.is_empty() {
            return Err(Error::parse(origin, None, "trace file has no data rows"));
        }

        let n_steps = max_step + 1;
        let n_procs = max_proc + 1;
        let mut data = vec![None; n_steps * n_procs];
        for (step, proc, w) in cells {
            data[step * n_procs + proc] = Some(w);
        }
        if let Some(missing) = data.iter().position(|c| c.is_none()) {
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
        Self::new(
            n_steps,
            n_procs,
            data.into_iter().map(Option::unwrap).collect(),
        )
    }
}

/// Parameters of the workload generator.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    pub n_steps: usize,
    pub n_procs: usize,
    pub initial_workload: f64,
    /// Per-step relative volatility of the multiplicative walk.
    pub drift: f64,
    /// Lower clamp bound relative to the initial workload, in (0, 1].
    pub min_factor: f64,
    /// Upper clamp bound relative to the initial workload, at least 1.
    pub max_factor: f64,
    pub seed: u64,
}

impl GeneratorParams {
    pub fn validate(&self) -> Vec<String> {
        let mut violations = Vec::new();
        if self.n_steps < 1 {
            violations.push("n_steps must be at least 1".to_string());
        }
        if self.n_procs < 1 {
            violations.push("n_procs must be at least 1".to_string());
        }
        if !(self.initial_workload > 0.0) {
            violations.push(format!(
                "initial_workload must be positive ({})",
                self.initial_workload
            ));
        }
        if !(self.drift >= 0.0) {
            violations.push(format!("drift must be non-negative ({})", self.drift));
        }
        if !(self.min_factor > 0.0 && self.min_factor <= 1.0) {
            violations.push(format!(
                "min_factor must lie in (0, 1] ({})",
                self.min_factor
            ));
        }
        if !(self.max_factor >= 1.0) {
            violations.push(format!(
                "max_factor must be at least 1 ({})",
                self.max_factor
            ));
        }
        if self.min_factor > self.max_factor {
            violations.push(format!(
                "min_factor {} exceeds max_factor {}",
                self.min_factor, self.max_factor
            ));
        }
        violations
    }
}

fn proc_rng(seed: u64, proc: usize) -> ChaCha8Rng {
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    bytes[8..16].copy_from_slice(&(proc as u64).to_le_bytes());
    ChaCha8Rng::from_seed(bytes)
}

/// Generates a trace as one bounded multiplicative random walk per process:
/// `w(t+1) = clamp(w(t) * exp(drift * z), initial * min_factor,
/// initial * max_factor)` with `z` standard normal. Step 0 assigns the
/// initial workload to every process. Identical parameters reproduce the
/// trace exactly; each process draws from its own (seed, process) stream.
pub fn generate(params: &GeneratorParams) -> Result<WorkloadTrace> {
    let violations = params.validate();
    if !violations.is_empty() {
        return Err(Error::Domain(violations.join("; ")));
    }

    let lo = params.initial_workload * params.min_factor;
    let hi = params.initial_workload * params.max_factor;
    let mut data = vec![0.0; params.n_steps * params.n_procs];
    for proc in 0..params.n_procs {
        let mut rng = proc_rng(params.seed, proc);
        let mut w = params.initial_workload;
        data[proc] = w;
        for step in 1..params.n_steps {
            let z: f64 = rng.sample(StandardNormal);
            w = (w * (params.drift * z).exp()).clamp(lo, hi);
            data[step * params.n_procs + proc] = w;
        }
    }
    WorkloadTrace::new(params.n_steps, params.n_procs, data)
}

/// Load imbalance of one step: max over mean. 1.0 means perfectly balanced.
pub fn imbalance(step_workloads: &[f64]) -> Result<f64> {
    if step_workloads.is_empty() {
        return Err(Error::Domain(
            "imbalance of an empty workload vector".to_string(),
        ));
    }
    if let Some(bad) = step_workloads.iter().find(|w| !(**w > 0.0)) {
        return Err(Error::Domain(format!("workloads must be positive ({bad})")));
    }
    let max = step_workloads
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let mean = step_workloads.iter().sum::<f64>() / step_workloads.len() as f64;
    Ok(max / mean)
}
