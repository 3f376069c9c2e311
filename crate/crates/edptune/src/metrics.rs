//! Objective functions: energy-to-solution, run time, and the weighted
//! energy-delay product used to rank configurations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Observed energy and run time of one complete run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub energy_j: f64,
    pub time_s: f64,
}

impl Measurement {
    pub fn new(energy_j: f64, time_s: f64) -> Result<Self> {
        if !(energy_j >= 0.0) {
            return Err(Error::Domain(format!(
                "energy must be non-negative ({energy_j})"
            )));
        }
        if !(time_s > 0.0) {
            return Err(Error::Domain(format!("time must be positive ({time_s})")));
        }
        Ok(Self { energy_j, time_s })
    }

    /// Energy-delay product `E * T^w`. Weight 0 reduces to plain
    /// energy-to-solution.
    pub fn edp(&self, w: EdpWeight) -> f64 {
        self.energy_j * self.time_s.powi(w.0 as i32)
    }
}

/// Exponent on run time in the tuning objective. Centers commonly use 1, 2,
/// or 3; 0 optimizes energy alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdpWeight(pub u32);

impl Default for EdpWeight {
    fn default() -> Self {
        EdpWeight(1)
    }
}

/// Relative change of a candidate run against a baseline. Positive
/// `energy_saving`/`edp_saving` mean the candidate is better; positive
/// `time_change` means it is slower.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Savings {
    pub energy_saving: f64,
    pub time_change: f64,
    pub edp_saving: f64,
}

pub fn improvement(baseline: &Measurement, candidate: &Measurement, w: EdpWeight) -> Savings {
    Savings {
        energy_saving: 1.0 - candidate.energy_j / baseline.energy_j,
        time_change: candidate.time_s / baseline.time_s - 1.0,
        edp_saving: 1.0 - candidate.edp(w) / baseline.edp(w),
    }
}
