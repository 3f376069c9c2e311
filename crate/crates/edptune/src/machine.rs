//! Machine description: discrete P-states, the static/dynamic power split,
//! and the run-time cost of the per-step compute region.
//!
//! Power drawn by one process is `static_power_w + active_cores * dyn_coeff *
//! volt^2 * ghz`. A process parked at a barrier (zero active cores) draws
//! exactly the static power. Region run time combines a frequency-sensitive
//! compute term with a frequency-insensitive memory term and an Amdahl factor
//! for the core count.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One DVFS operating point: a clock frequency and the voltage required to
/// sustain it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PState {
    pub ghz: f64,
    pub volt: f64,
}

impl PState {
    pub fn new(ghz: f64, volt: f64) -> Self {
        Self { ghz, volt }
    }
}

/// The hardware available to a single process slot.
///
/// P-states must be ordered by strictly increasing frequency with
/// non-decreasing voltage; `validate` reports every violation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MachineModel {
    pub pstates: Vec<PState>,
    /// Power drawn regardless of activity, in watts per process slot.
    pub static_power_w: f64,
    /// Dynamic-power coefficient in W / (V^2 * GHz), applied per active core.
    pub dyn_coeff: f64,
    /// Cores available to one process.
    pub max_cores: usize,
    /// Non-parallelizable share of region work, in [0, 1).
    pub serial_fraction: f64,
    /// Latency charged when a process changes its P-state between steps.
    pub switch_latency_s: f64,
    /// Energy charged per P-state change.
    pub switch_energy_j: f64,
}

impl MachineModel {
    /// Returns one message per violated invariant; empty means well formed.
    pub fn validate(&self) -> Vec<String> {
        let mut violations = Vec::new();
        if self.pstates.is_empty() {
            violations.push("machine must define at least one P-state".to_string());
        }
        for (i, p) in self.pstates.iter().enumerate() {
            if !(p.ghz > 0.0) {
                violations.push(format!(
                    "pstates[{i}]: frequency must be positive ({})",
                    p.ghz
                ));
            }
            if !(p.volt > 0.0) {
                violations.push(format!(
                    "pstates[{i}]: voltage must be positive ({})",
                    p.volt
                ));
            }
        }
        for (i, pair) in self.pstates.windows(2).enumerate() {
            if !(pair[1].ghz > pair[0].ghz) {
                violations.push(format!(
                    "pstates[{}]: frequency must be strictly increasing ({} -> {})",
                    i + 1,
                    pair[0].ghz,
                    pair[1].ghz
                ));
            }
            if pair[1].volt < pair[0].volt {
                violations.push(format!(
                    "pstates[{}]: voltage must be non-decreasing ({} -> {})",
                    i + 1,
                    pair[0].volt,
                    pair[1].volt
                ));
            }
        }
        if !(self.static_power_w >= 0.0) {
            violations.push(format!(
                "static_power_w must be non-negative ({})",
                self.static_power_w
            ));
        }
        if !(self.dyn_coeff >= 0.0) {
            violations.push(format!(
                "dyn_coeff must be non-negative ({})",
                self.dyn_coeff
            ));
        }
        if !(self.static_power_w + self.dyn_coeff > 0.0) {
            violations.push(
                "machine draws no power: static_power_w + dyn_coeff must be positive".to_string(),
            );
        }
        if self.max_cores < 1 {
            violations.push("max_cores must be at least 1".to_string());
        }
        if !(0.0..1.0).contains(&self.serial_fraction) {
            violations.push(format!(
                "serial_fraction must lie in [0, 1) ({})",
                self.serial_fraction
            ));
        }
        if !(self.switch_latency_s >= 0.0) {
            violations.push(format!(
                "switch_latency_s must be non-negative ({})",
                self.switch_latency_s
            ));
        }
        if !(self.switch_energy_j >= 0.0) {
            violations.push(format!(
                "switch_energy_j must be non-negative ({})",
                self.switch_energy_j
            ));
        }
        violations
    }

    /// Consumes the model, returning it only if well formed.
    pub fn checked(self) -> Result<Self> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidModel(violations))
        }
    }

    /// Activity-dependent power of one core at P-state `p`, in watts.
    pub fn dynamic_power(&self, p: &PState) -> f64 {
        self.dyn_coeff * p.volt * p.volt * p.ghz
    }

    /// Power drawn by one process running `active_cores` cores at `p`.
    /// Zero active cores models idling at a barrier.
    pub fn process_power(&self, p: &PState, active_cores: usize) -> Result<f64> {
        if active_cores > self.max_cores {
            return Err(Error::Domain(format!(
                "active_cores {} exceeds max_cores {}",
                active_cores, self.max_cores
            )));
        }
        Ok(self.static_power_w + active_cores as f64 * self.dynamic_power(p))
    }

    pub fn pstate(&self, index: usize) -> Result<&PState> {
        self.pstates.get(index).ok_or_else(|| {
            Error::Domain(format!(
                "P-state index {} out of range (machine has {})",
                index,
                self.pstates.len()
            ))
        })
    }

    /// Index of the highest-frequency P-state.
    pub fn highest_pstate(&self) -> usize {
        self.pstates.len().saturating_sub(1)
    }

    /// Index of the P-state with the given frequency, matching exactly or
    /// within 1e-9 relative to absorb formatting round trips.
    pub fn pstate_by_ghz(&self, ghz: f64) -> Option<usize> {
        if let Some(i) = self.pstates.iter().position(|p| p.ghz == ghz) {
            return Some(i);
        }
        self.pstates
            .iter()
            .position(|p| (p.ghz - ghz).abs() <= 1e-9 * p.ghz.abs())
    }

    /// Loads and validates a machine description from JSON.
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let model: MachineModel = serde_json::from_str(&text)
            .map_err(|e| Error::parse(path.display().to_string(), Some(e.line()), e.to_string()))?;
        model.checked()
    }
}

/// Per-workload-unit cost of the region executed every timestep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionModel {
    /// Cycles spent per workload unit; scales inversely with frequency.
    pub compute_cost_cycles: f64,
    /// Seconds spent per workload unit independent of frequency. Zero models
    /// the purely compute-bound case.
    pub memory_time_s: f64,
}

impl RegionModel {
    pub fn new(compute_cost_cycles: f64, memory_time_s: f64) -> Self {
        Self {
            compute_cost_cycles,
            memory_time_s,
        }
    }

    pub fn validate(&self) -> Vec<String> {
        let mut violations = Vec::new();
        if !(self.compute_cost_cycles >= 0.0) {
            violations.push(format!(
                "compute_cost_cycles must be non-negative ({})",
                self.compute_cost_cycles
            ));
        }
        if !(self.memory_time_s >= 0.0) {
            violations.push(format!(
                "memory_time_s must be non-negative ({})",
                self.memory_time_s
            ));
        }
        if !(self.compute_cost_cycles + self.memory_time_s > 0.0) {
            violations.push(
                "region has no cost: compute_cost_cycles + memory_time_s must be positive"
                    .to_string(),
            );
        }
        violations
    }

    pub fn checked(self) -> Result<Self> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidModel(violations))
        }
    }

    /// Run time in seconds for `workload` units at P-state `p` on `cores`
    /// cores with the given serial fraction. Cycles divided by GHz yield
    /// nanoseconds, hence the 1e9 scale.
    pub fn time(
        &self,
        workload: f64,
        p: &PState,
        cores: usize,
        serial_fraction: f64,
    ) -> Result<f64> {
        if !(workload > 0.0) {
            return Err(Error::Domain(format!(
                "workload must be positive ({workload})"
            )));
        }
        if cores < 1 {
            return Err(Error::Domain("cores must be at least 1".to_string()));
        }
        let per_unit = self.compute_cost_cycles / (p.ghz * 1e9) + self.memory_time_s;
        let amdahl = serial_fraction + (1.0 - serial_fraction) / cores as f64;
        Ok(workload * per_unit * amdahl)
    }

    /// Loads and validates a region description from JSON.
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let region: RegionModel = serde_json::from_str(&text)
            .map_err(|e| Error::parse(path.display().to_string(), Some(e.line()), e.to_string()))?;
        region.checked()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn four_state_machine() -> MachineModel {
        MachineModel {
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
        }
    }

    #[test]
    fn dynamic_power_matches_formula() {
        let m = four_state_machine();
        assert_eq!(m.dynamic_power(&PState::new(2.0, 1.0)), 10.0);
        assert!((m.dynamic_power(&PState::new(1.0, 0.8)) - 3.2).abs() < 1e-12);
        let free = MachineModel {
            dyn_coeff: 0.0,
            ..four_state_machine()
        };
        assert_eq!(free.dynamic_power(&PState::new(2.0, 1.0)), 0.0);
    }

    #[test]
    fn process_power_adds_per_core_dynamic_power() {
        let m = four_state_machine();
        let p = PState::new(2.0, 1.0);
        assert_eq!(m.process_power(&p, 1).unwrap(), 60.0);
        assert_eq!(m.process_power(&p, 2).unwrap(), 70.0);
        // Zero active cores models a process idling at the barrier.
        assert_eq!(m.process_power(&p, 0).unwrap(), 50.0);
        assert!(m.process_power(&p, 5).is_err());
    }

    #[test]
    fn idle_power_is_static_power_for_every_pstate() {
        let m = four_state_machine();
        for p in &m.pstates {
            assert_eq!(m.process_power(p, 0).unwrap(), m.static_power_w);
        }
    }

    #[test]
    fn region_time_matches_formula() {
        let r = RegionModel::new(1e6, 0.0);
        let p = PState::new(2.0, 1.0);
        assert_eq!(r.time(1000.0, &p, 1, 0.0).unwrap(), 0.5);

        let r = RegionModel::new(1e6, 1e-4);
        assert!((r.time(1000.0, &p, 1, 0.0).unwrap() - 0.6).abs() < 1e-12);

        let r = RegionModel::new(1e6, 0.0);
        // Amdahl factor 0.1 + 0.9/2 = 0.55.
        assert!((r.time(1000.0, &p, 2, 0.1).unwrap() - 0.275).abs() < 1e-12);
    }

    #[test]
    fn region_time_rejects_bad_inputs() {
        let r = RegionModel::new(1e6, 0.0);
        let p = PState::new(2.0, 1.0);
        assert!(r.time(0.0, &p, 1, 0.0).is_err());
        assert!(r.time(-1.0, &p, 1, 0.0).is_err());
        assert!(r.time(1000.0, &p, 0, 0.0).is_err());
    }

    #[test]
    fn validate_accepts_well_formed_machine() {
        assert!(four_state_machine().validate().is_empty());
    }

    #[test]
    fn validate_reports_equal_frequencies() {
        let mut m = four_state_machine();
        m.pstates[1].ghz = m.pstates[0].ghz;
        let violations = m.validate();
        assert!(
            violations.iter().any(|v| v.contains("strictly increasing")),
            "{violations:?}"
        );
    }

    #[test]
    fn validate_reports_decreasing_voltage() {
        let mut m = four_state_machine();
        m.pstates[2].volt = 0.5;
        let violations = m.validate();
        assert!(
            violations.iter().any(|v| v.contains("non-decreasing")),
            "{violations:?}"
        );
    }

    #[test]
    fn validate_reports_empty_and_powerless_machines() {
        let mut m = four_state_machine();
        m.pstates.clear();
        assert!(!m.validate().is_empty());

        let mut m = four_state_machine();
        m.static_power_w = 0.0;
        m.dyn_coeff = 0.0;
        assert!(m.validate().iter().any(|v| v.contains("draws no power")));
    }

    #[test]
    fn serial_fraction_near_one_flattens_core_scaling() {
        let r = RegionModel::new(1e6, 0.0);
        let p = PState::new(2.0, 1.0);
        let single = r.time(1000.0, &p, 1, 0.999).unwrap();
        for cores in 2..=8 {
            let t = r.time(1000.0, &p, cores, 0.999).unwrap();
            assert!((single - t).abs() / single < 0.002);
        }
    }

    proptest! {
        #[test]
        fn dynamic_power_strictly_increases_in_frequency_and_voltage(
            ghz in 0.5f64..4.0,
            volt in 0.6f64..1.4,
            dghz in 0.01f64..1.0,
            dvolt in 0.01f64..0.5,
        ) {
            let m = four_state_machine();
            let base = m.dynamic_power(&PState::new(ghz, volt));
            prop_assert!(m.dynamic_power(&PState::new(ghz + dghz, volt)) > base);
            prop_assert!(m.dynamic_power(&PState::new(ghz, volt + dvolt)) > base);
        }

        #[test]
        fn region_time_decreases_in_frequency_when_compute_bound(
            w in 1.0f64..1e5,
            ghz in 0.5f64..4.0,
            dghz in 0.01f64..1.0,
            mt in 0.0f64..1e-3,
        ) {
            let r = RegionModel::new(1e6, mt);
            let slow = r.time(w, &PState::new(ghz, 1.0), 1, 0.0).unwrap();
            let fast = r.time(w, &PState::new(ghz + dghz, 1.0), 1, 0.0).unwrap();
            prop_assert!(fast < slow);
        }

        #[test]
        fn region_time_constant_in_frequency_when_memory_bound(
            w in 1.0f64..1e5,
            ghz in 0.5f64..4.0,
            dghz in 0.01f64..1.0,
        ) {
            let r = RegionModel::new(0.0, 1e-4);
            let a = r.time(w, &PState::new(ghz, 1.0), 1, 0.0).unwrap();
            let b = r.time(w, &PState::new(ghz + dghz, 1.0), 1, 0.0).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn region_time_non_increasing_in_cores(
            w in 1.0f64..1e5,
            sf in 0.0f64..0.99,
            cores in 1usize..8,
        ) {
            let r = RegionModel::new(1e6, 1e-5);
            let p = PState::new(2.0, 1.0);
            let fewer = r.time(w, &p, cores, sf).unwrap();
            let more = r.time(w, &p, cores + 1, sf).unwrap();
            prop_assert!(more <= fewer);
        }
    }
}
