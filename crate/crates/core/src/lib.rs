//! Energy-system optimisation toolkit.
//!
//! An [`EnergySystem`](model::EnergySystem) is a graph of carrier nodes and
//! conversion components. [`formulate::compile`] lowers it into a
//! mixed-integer [`LinearProgram`](lp::LinearProgram), [`solver`] solves that
//! program exactly, and [`analyze`] maps the solution back to schedules,
//! capacities, costs and emissions while re-checking every constraint family
//! directly against the system.
//!
//! ```
//! use esopt::analyze::extract_report;
//! use esopt::formulate::compile;
//! use esopt::model::*;
//! use esopt::solver::{solve, SolveStatus, SolverConfig};
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let mut sys = EnergySystem::new(TimeGrid::hourly(3));
//! sys.nodes = vec![Node::demand("Electricity", Profile::Series(vec![4.0, 6.0, 5.0])), Node::boundary("Gas")];
//! let mut gt = Component::single("Gas Turbine", "Gas", "Electricity", 0.4);
//! gt.capacity = CapacitySpec::optimized(Some(20.0));
//! gt.costs.fuel = Profile::Constant(21.61);
//! gt.costs.invest_annualized = 24850.0;
//! sys.components = vec![gt];
//!
//! let prog = compile(&sys)?;
//! let sol = solve(&prog, &SolverConfig::default());
//! let report = extract_report(&sys, &prog, &sol)?;
//! assert_eq!(report.status, SolveStatus::Optimal);
//! assert!(report.verification.passed());
//! assert!((report.installed[0].total - 6.0).abs() < 1e-9);
//! # Ok(())
//! # }
//! ```

pub mod analyze;
pub mod cli;
pub mod finance;
pub mod formulate;
pub mod lp;
pub mod model;
pub mod solver;
