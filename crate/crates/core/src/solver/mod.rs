//! Exact solution of compiled programs: a bounded-variable primal simplex for
//! LPs and best-bound branch-and-bound for MILPs.

mod bnb;
mod certificate;
mod lu;
mod simplex;

use serde::{Deserialize, Serialize};

use crate::lp::LinearProgram;

pub use certificate::{check_certificate, CertificateReport, CertificateViolation, ViolationKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    GapLimit,
    IterationLimit,
}

impl SolveStatus {
    /// Whether the solution carries a usable primal assignment.
    pub fn has_values(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::GapLimit)
    }
}

/// Tolerances and limits for the built-in solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Absolute tolerance on row and bound residuals.
    pub feasibility_tol: f64,
    /// Tolerance on reduced costs.
    pub optimality_tol: f64,
    pub integrality_tol: f64,
    /// Relative gap at which branch-and-bound stops.
    pub mip_gap: f64,
    /// Simplex iterations per LP solve.
    pub iteration_limit: usize,
    /// Branch-and-bound nodes (LP relaxations) per MILP solve.
    pub node_limit: usize,
    /// Consecutive non-improving pivots before switching to Bland's rule.
    pub stall_window: usize,
    /// Recorded for reproducibility; every pivot and branching rule is deterministic.
    pub deterministic_seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            feasibility_tol: 1e-6,
            optimality_tol: 1e-7,
            integrality_tol: 1e-5,
            mip_gap: 1e-6,
            iteration_limit: 1_000_000,
            node_limit: 100_000,
            stall_window: 50,
            deterministic_seed: 0,
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("solver tolerance `{0}` must be positive")]
pub struct ConfigError(pub &'static str);

impl SolverConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let checks = [
            ("feasibility_tol", self.feasibility_tol),
            ("optimality_tol", self.optimality_tol),
            ("integrality_tol", self.integrality_tol),
            ("mip_gap", self.mip_gap),
        ];
        for (name, v) in checks {
            if !(v > 0.0) {
                return Err(ConfigError(name));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub iterations: usize,
    pub nodes: usize,
}

/// Proof attached to an infeasible or unbounded outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Certificate {
    /// Row multipliers `y` whose aggregated row `yᵀA x = yᵀ(row activity)`
    /// cannot hold anywhere inside the variable and row bounds.
    Farkas(Vec<f64>),
    /// Feasible direction of unbounded descent over the variables.
    Ray(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub status: SolveStatus,
    /// Variable values aligned with the program; empty without an incumbent.
    pub values: Vec<f64>,
    pub objective: f64,
    /// Best proven lower bound on the optimal objective.
    pub bound: f64,
    pub gap: f64,
    pub stats: SolveStats,
    /// Row duals `y`; reduced costs are `c − Aᵀy`. LP optima only.
    pub duals: Option<Vec<f64>>,
    pub certificate: Option<Certificate>,
}

impl Solution {
    pub(crate) fn without_values(
        status: SolveStatus,
        stats: SolveStats,
        certificate: Option<Certificate>,
    ) -> Self {
        let (objective, bound) = match status {
            SolveStatus::Unbounded => (f64::NEG_INFINITY, f64::NEG_INFINITY),
            _ => (f64::INFINITY, f64::INFINITY),
        };
        Solution {
            status,
            values: Vec::new(),
            objective,
            bound,
            gap: f64::INFINITY,
            stats,
            duals: None,
            certificate,
        }
    }
}

pub fn relative_gap(objective: f64, bound: f64) -> f64 {
    if objective.is_finite() && bound.is_finite() {
        (objective - bound).abs() / objective.abs().max(1.0)
    } else {
        f64::INFINITY
    }
}

/// Solves the continuous relaxation; integrality flags are ignored.
pub fn solve_lp(prog: &LinearProgram, cfg: &SolverConfig) -> Solution {
    let core = simplex::Core::new(prog);
    let lower: Vec<f64> = prog.vars.iter().map(|v| v.lower).collect();
    let upper: Vec<f64> = prog.vars.iter().map(|v| v.upper).collect();
    let res = simplex::solve_bounded(&core, &lower, &upper, cfg);
    let stats = SolveStats {
        iterations: res.iterations,
        nodes: 0,
    };
    match res.status {
        simplex::LpStatus::Optimal => {
            let objective = prog.objective_offset + res.objective;
            Solution {
                status: SolveStatus::Optimal,
                values: res.x,
                objective,
                bound: objective,
                gap: 0.0,
                stats,
                duals: Some(res.duals),
                certificate: None,
            }
        }
        simplex::LpStatus::Infeasible => Solution::without_values(
            SolveStatus::Infeasible,
            stats,
            res.farkas.map(Certificate::Farkas),
        ),
        simplex::LpStatus::Unbounded => {
            Solution::without_values(SolveStatus::Unbounded, stats, res.ray.map(Certificate::Ray))
        }
        simplex::LpStatus::IterationLimit => {
            Solution::without_values(SolveStatus::IterationLimit, stats, None)
        }
    }
}

/// Branch-and-bound over the integer variables with best-bound node selection.
pub fn solve_milp(prog: &LinearProgram, cfg: &SolverConfig) -> Solution {
    bnb::branch_and_bound(prog, cfg)
}

/// Dispatches to [`solve_milp`] when the program has integer variables.
pub fn solve(prog: &LinearProgram, cfg: &SolverConfig) -> Solution {
    if prog.is_mip() {
        solve_milp(prog, cfg)
    } else {
        solve_lp(prog, cfg)
    }
}

/// Pluggable solver backend.
pub trait Solver {
    fn name(&self) -> &str;
    fn solve(&self, prog: &LinearProgram) -> Solution;
}

/// The simplex / branch-and-bound implementation in this crate.
#[derive(Debug, Clone, Default)]
pub struct BuiltinSolver {
    pub config: SolverConfig,
}

impl Solver for BuiltinSolver {
    fn name(&self) -> &str {
        "builtin"
    }

    fn solve(&self, prog: &LinearProgram) -> Solution {
        solve(prog, &self.config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{EqTags, Sense, VarKind, VarRef};

    fn var(j: usize) -> VarRef {
        VarRef::at(VarKind::Pout, "x", j)
    }

    #[test]
    fn single_variable_bound() {
        // min -x s.t. x <= 5
        let mut lp = LinearProgram::new();
        let x = lp.add_var(var(0), 0.0, f64::INFINITY).unwrap();
        lp.add_cost(x, -1.0);
        lp.add_row(EqTags::default(), "r", None, vec![(x, 1.0)], Sense::Le, 5.0);
        let sol = solve_lp(&lp, &SolverConfig::default());
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.values[0] - 5.0).abs() < 1e-12);
        assert!((sol.objective + 5.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_lp_has_farkas_certificate() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(var(0), 0.0, 3.0).unwrap();
        lp.add_row(EqTags::default(), "r", None, vec![(x, 1.0)], Sense::Ge, 4.0);
        let sol = solve_lp(&lp, &SolverConfig::default());
        assert_eq!(sol.status, SolveStatus::Infeasible);
        assert!(matches!(sol.certificate, Some(Certificate::Farkas(_))));
        let report = check_certificate(&lp, &sol);
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn unbounded_lp_has_ray() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(var(0), 0.0, f64::INFINITY).unwrap();
        let y = lp.add_var(var(1), 0.0, f64::INFINITY).unwrap();
        lp.add_cost(x, -1.0);
        lp.add_row(
            EqTags::default(),
            "r",
            None,
            vec![(x, 1.0), (y, -1.0)],
            Sense::Le,
            1.0,
        );
        let sol = solve_lp(&lp, &SolverConfig::default());
        assert_eq!(sol.status, SolveStatus::Unbounded);
        let report = check_certificate(&lp, &sol);
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn config_rejects_nonpositive_tolerance() {
        let cfg = SolverConfig {
            mip_gap: 0.0,
            ..SolverConfig::default()
        };
        assert_eq!(cfg.validate(), Err(ConfigError("mip_gap")));
        assert!(SolverConfig::default().validate().is_ok());
    }

    #[test]
    fn iteration_limit_reported() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(var(0), 0.0, 10.0).unwrap();
        let y = lp.add_var(var(1), 0.0, 10.0).unwrap();
        lp.add_cost(x, -1.0);
        lp.add_cost(y, -1.0);
        lp.add_row(
            EqTags::default(),
            "r",
            None,
            vec![(x, 1.0), (y, 1.0)],
            Sense::Le,
            15.0,
        );
        lp.add_row(
            EqTags::default(),
            "s",
            None,
            vec![(x, 1.0), (y, -1.0)],
            Sense::Ge,
            1.0,
        );
        let cfg = SolverConfig {
            iteration_limit: 0,
            ..SolverConfig::default()
        };
        assert_eq!(solve_lp(&lp, &cfg).status, SolveStatus::IterationLimit);
    }
}
