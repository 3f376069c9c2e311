//! Energy and run-time modeling — plus tuning — for barrier-synchronized
//! parallel timestep workloads on machines with discrete frequency/voltage
//! states.
//!
//! The model: total power per process splits into a constant static part and
//! a dynamic part proportional to `U^2 * f` per active core. Runs are
//! timestep loops over a per-step, per-process workload trace; every step
//! ends at a barrier, so the slowest process sets the step's duration and
//! everyone else waits at idle power. On top of that sit three tuners:
//!
//! - [`sweep()`]: static tuning — evaluate every uniform (P-state, cores)
//!   configuration and pick the energy-delay-product minimizer.
//! - [`plan_trace`]: dynamic tuning — per step, give each non-critical
//!   process the cheapest configuration that still meets the critical
//!   process's finish time.
//! - [`autotune`]: semi-automatic tuning — learn optimal configurations per
//!   workload situation at design time, recall the best match at every
//!   switching point in production.
//!
//! # Example
//!
//! ```
//! use edptune::machine::{MachineModel, PState, RegionModel};
//! use edptune::metrics::EdpWeight;
//! use edptune::sim::{simulate, ProcessConfig, Schedule};
//! use edptune::workload::WorkloadTrace;
//!
//! let machine = MachineModel {
//!     pstates: vec![PState::new(1.0, 0.8), PState::new(2.0, 1.0)],
//!     static_power_w: 50.0,
//!     dyn_coeff: 5.0,
//!     max_cores: 1,
//!     serial_fraction: 0.0,
//!     switch_latency_s: 0.0,
//!     switch_energy_j: 0.0,
//! }
//! .checked()?;
//! let region = RegionModel::new(1e6, 0.0);
//! let trace = WorkloadTrace::new(1, 2, vec![1000.0, 500.0])?;
//!
//! // Everyone at 2 GHz: the lighter process waits half the step at idle power.
//! let schedule = Schedule::uniform(1, 2, ProcessConfig::new(1, 1));
//! let result = simulate(&machine, &region, &trace, &schedule)?;
//! assert_eq!(result.total_time_s, 0.5);
//! assert!((result.total_energy_j - 57.5).abs() < 1e-9);
//! assert_eq!(result.measurement().edp(EdpWeight(1)), result.total_energy_j * 0.5);
//! # Ok::<(), edptune::Error>(())
//! ```
//!
//! # Runnable examples
//!
//! One per capability, under `examples/`:
//!
//! | Example | Shows |
//! |---|---|
//! | `power_model` | P-state power draw and region run-time scaling |
//! | `generate_workload` | reproducible imbalanced trace generation |
//! | `static_sweep` | the relative energy/run-time trade-off table per weight |
//! | `dynamic_tuning` | per-step planning and its makespan guarantee |
//! | `auto_tuning` | training, exact recall, degradation under noise |
//! | `switch_costs` | how P-state switch overheads erode the savings |
//! | `full_pipeline` | every on-disk format, end to end |
//!
//! ```bash
//! cargo run -p edptune --example dynamic_tuning
//! ```
//!
//! The `edptune` binary wires the same operations into `gen`, `simulate`,
//! `sweep`, `plan`, `train`, `run` and `report` subcommands over the on-disk
//! formats; see the README.

// Validation deliberately writes `!(x > 0.0)` so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod autotune;
pub mod dynamic;
pub mod error;
pub mod machine;
pub mod manifest;
pub mod metrics;
pub mod sim;
pub mod sweep;
pub mod workload;

pub use autotune::{run_production, situation_of, train, Situation, TuningModel};
pub use dynamic::{plan_step, plan_trace, DynamicPlan};
pub use error::{Error, Result};
pub use machine::{MachineModel, PState, RegionModel};
pub use metrics::{improvement, EdpWeight, Measurement, Savings};
pub use sim::{simulate, ProcessConfig, Schedule, SimulationResult, SliceRecord};
pub use sweep::{sweep, SweepResult, SweepRow};
pub use workload::{generate, imbalance, GeneratorParams, WorkloadTrace};
