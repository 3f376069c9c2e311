//! Run manifests and the summary/report files the command-line frontend
//! emits. A manifest records the command, its parameters, the tool version,
//! and a hash of every input file, so any report can be traced back to the
//! exact invocation that produced it and reruns can be checked byte for byte.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::metrics::{improvement, EdpWeight, Measurement, Savings};
use crate::sim::SimulationResult;

pub const REPORT_CSV_HEADER: &str = "candidate,energy_saving,time_change,edp_saving";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(sha256_hex(&bytes))
}

/// One hashed input file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputFile {
    pub path: String,
    pub sha256: String,
}

/// Everything needed to reproduce a command invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub inputs: BTreeMap<String, InputFile>,
    pub params: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: BTreeMap::new(),
            params: BTreeMap::new(),
        }
    }

    /// Registers an input file under a role key (`machine`, `trace`, ...),
    /// hashing its current content.
    pub fn add_input(&mut self, key: impl Into<String>, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        self.inputs.insert(
            key.into(),
            InputFile {
                path: path.display().to_string(),
                sha256: sha256_file(path)?,
            },
        );
        Ok(())
    }

    pub fn add_param(&mut self, key: impl Into<String>, value: impl ToString) {
        self.params.insert(key.into(), value.to_string());
    }

    fn input_hash(&self, key: &str) -> Option<&str> {
        self.inputs.get(key).map(|f| f.sha256.as_str())
    }
}

/// Measurement summary of one run, with its manifest embedded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub total_energy_j: f64,
    pub total_time_s: f64,
    pub edp: f64,
    pub weight: u32,
    pub n_steps: usize,
    pub n_procs: usize,
    pub manifest: RunManifest,
}

impl RunSummary {
    pub fn from_result(
        result: &SimulationResult,
        weight: EdpWeight,
        n_steps: usize,
        n_procs: usize,
        manifest: RunManifest,
    ) -> Self {
        Self {
            total_energy_j: result.total_energy_j,
            total_time_s: result.total_time_s,
            edp: result.measurement().edp(weight),
            weight: weight.0,
            n_steps,
            n_procs,
            manifest,
        }
    }

    pub fn measurement(&self) -> Measurement {
        Measurement {
            energy_j: self.total_energy_j,
            time_s: self.total_time_s,
        }
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary serializes");
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
        serde_json::from_str(&text)
            .map_err(|e| Error::parse(path.display().to_string(), Some(e.line()), e.to_string()))
    }
}

/// Summary of a training run, with its manifest embedded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainSummary {
    pub entries: usize,
    pub n_procs: usize,
    pub lambda: f64,
    pub dedupe_eps: f64,
    pub fingerprint: String,
    pub manifest: RunManifest,
}

impl TrainSummary {
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary serializes");
        s.push('\n');
        s
    }

    pub fn write_json_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json_string()).map_err(|e| Error::io(path.display().to_string(), e))
    }
}

/// Savings of one candidate run against the report baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub candidate: String,
    pub savings: Savings,
}

/// Compares candidate summaries against a baseline.
///
/// Summaries are comparable only when they describe the same experiment:
/// wherever both manifests name a `machine`, `region` or `trace` input, the
/// hashes must agree, and all runs must use the baseline's EDP weight.
pub fn compare_summaries(
    baseline: &RunSummary,
    candidates: &[(String, RunSummary)],
) -> Result<Vec<ReportRow>> {
    let mut rows = Vec::with_capacity(candidates.len());
    for (label, candidate) in candidates {
        let mut mismatches = Vec::new();
        for key in ["machine", "region", "trace"] {
            if let (Some(a), Some(b)) = (
                baseline.manifest.input_hash(key),
                candidate.manifest.input_hash(key),
            ) {
                if a != b {
                    mismatches.push(format!("{key}: baseline {a} vs {label} {b}"));
                }
            }
        }
        if !mismatches.is_empty() {
            return Err(Error::Domain(format!(
                "incompatible manifests: {}",
                mismatches.join("; ")
            )));
        }
        if candidate.weight != baseline.weight {
            return Err(Error::Domain(format!(
                "incompatible EDP weights: baseline {} vs {} {}",
                baseline.weight, label, candidate.weight
            )));
        }
        rows.push(ReportRow {
            candidate: label.clone(),
            savings: improvement(
                &baseline.measurement(),
                &candidate.measurement(),
                EdpWeight(baseline.weight),
            ),
        });
    }
    Ok(rows)
}

/// Report CSV: one improvement row per candidate plus the manifest of the
/// report invocation as a trailing comment.
pub fn report_csv(rows: &[ReportRow], manifest: &RunManifest) -> String {
    let mut out = String::from(REPORT_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.candidate,
            row.savings.energy_saving,
            row.savings.time_change,
            row.savings.edp_saving
        ));
    }
    out.push_str(&format!(
        "# manifest={}\n",
        serde_json::to_string(manifest).expect("manifest serializes")
    ));
    out
}

/// Human-readable report text.
pub fn report_text(baseline_label: &str, baseline: &RunSummary, rows: &[ReportRow]) -> String {
    let mut out = format!(
        "baseline {}: energy {} J, time {} s, EDP {} (w={})\n",
        baseline_label,
        baseline.total_energy_j,
        baseline.total_time_s,
        baseline.edp,
        baseline.weight
    );
    for row in rows {
        out.push_str(&format!(
            "{}: energy saving {:+.2}%, time change {:+.2}%, EDP saving {:+.2}%\n",
            row.candidate,
            row.savings.energy_saving * 100.0,
            row.savings.time_change * 100.0,
            row.savings.edp_saving * 100.0
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(energy: f64, time: f64, trace_hash: &str) -> RunSummary {
        let mut manifest = RunManifest::new("simulate");
        manifest.inputs.insert(
            "trace".to_string(),
            InputFile {
                path: "trace.csv".to_string(),
                sha256: trace_hash.to_string(),
            },
        );
        RunSummary {
            total_energy_j: energy,
            total_time_s: time,
            edp: energy * time,
            weight: 1,
            n_steps: 10,
            n_procs: 4,
            manifest,
        }
    }

    #[test]
    fn sha256_matches_known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn identical_runs_report_zero_savings() {
        let base = summary(100.0, 10.0, "h1");
        let rows = compare_summaries(&base, &[("same".to_string(), base.clone())]).unwrap();
        assert_eq!(rows[0].savings.energy_saving, 0.0);
        assert_eq!(rows[0].savings.time_change, 0.0);
        assert_eq!(rows[0].savings.edp_saving, 0.0);
    }

    #[test]
    fn better_candidate_reports_positive_saving() {
        let base = summary(100.0, 10.0, "h1");
        let cand = summary(90.0, 10.0, "h1");
        let rows = compare_summaries(&base, &[("tuned".to_string(), cand)]).unwrap();
        assert!((rows[0].savings.energy_saving - 0.10).abs() < 1e-12);
    }

    #[test]
    fn mismatched_trace_hashes_are_rejected_with_both_hashes() {
        let base = summary(100.0, 10.0, "aaaa");
        let cand = summary(90.0, 10.0, "bbbb");
        let err = compare_summaries(&base, &[("other".to_string(), cand)]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("aaaa") && msg.contains("bbbb"), "{msg}");
    }

    #[test]
    fn mismatched_weights_are_rejected() {
        let base = summary(100.0, 10.0, "h1");
        let mut cand = summary(90.0, 10.0, "h1");
        cand.weight = 2;
        assert!(compare_summaries(&base, &[("w2".to_string(), cand)]).is_err());
    }

    #[test]
    fn summary_json_round_trips() {
        let base = summary(57.5, 0.5, "h1");
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("summary.json");
        base.write_json_file(&path).unwrap();
        assert_eq!(RunSummary::read_json_file(&path).unwrap(), base);
    }

    #[test]
    fn report_csv_embeds_the_manifest_trailer() {
        let base = summary(100.0, 10.0, "h1");
        let rows = compare_summaries(&base, &[("same".to_string(), base.clone())]).unwrap();
        let csv = report_csv(&rows, &base.manifest);
        assert!(csv.starts_with(REPORT_CSV_HEADER));
        assert!(csv.lines().last().unwrap().starts_with("# manifest="));
    }
}
