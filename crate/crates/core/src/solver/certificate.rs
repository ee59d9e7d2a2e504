//! Independent checks of solver output against the program.

use serde::Serialize;

use super::{Certificate, Solution, SolveStatus};
use crate::lp::{LinearProgram, Sense};

/// Residual threshold for LP optimality certificates.
pub const CERTIFICATE_TOL: f64 = 1e-6;
/// Integrality threshold for MILP incumbents.
pub const INTEGRALITY_TOL: f64 = 1e-5;
const ZERO_DUAL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ViolationKind {
    PrimalRow,
    Bound,
    Integrality,
    DualFeasibility,
    Complementarity,
    DualityGap,
    BoundValidity,
    ObjectiveMismatch,
    MissingCertificate,
    InvalidCertificate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateViolation {
    pub kind: ViolationKind,
    /// Row or variable index, where the violation is local.
    pub index: Option<usize>,
    pub amount: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CertificateReport {
    pub primal_residual: f64,
    pub bound_residual: f64,
    pub integrality_residual: f64,
    pub dual_residual: f64,
    pub complementarity: f64,
    pub duality_gap: f64,
    pub violations: Vec<CertificateViolation>,
}

impl CertificateReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    fn flag(&mut self, kind: ViolationKind, index: Option<usize>, amount: f64, tol: f64) {
        if amount > tol {
            self.violations.push(CertificateViolation {
                kind,
                index,
                amount,
            });
        }
    }
}

fn row_bounds(sense: Sense, rhs: f64) -> (f64, f64) {
    match sense {
        Sense::Le => (f64::NEG_INFINITY, rhs),
        Sense::Ge => (rhs, f64::INFINITY),
        Sense::Eq => (rhs, rhs),
    }
}

/// Reduced costs `c − Aᵀy`.
pub fn reduced_costs(prog: &LinearProgram, y: &[f64]) -> Vec<f64> {
    let mut d: Vec<f64> = prog.vars.iter().map(|v| v.cost).collect();
    for (row, &yi) in prog.rows.iter().zip(y) {
        if yi != 0.0 {
            for &(j, a) in &row.coeffs {
                d[j] -= a * yi;
            }
        }
    }
    d
}

/// Minimum of `coef · v` over `v ∈ [lo, hi]`.
fn box_min(coef: f64, lo: f64, hi: f64) -> f64 {
    if coef.abs() <= ZERO_DUAL {
        0.0
    } else if coef > 0.0 {
        coef * lo
    } else {
        coef * hi
    }
}

/// Checks primal feasibility, dual feasibility, complementary slackness and
/// the duality gap of an LP optimum; incumbent feasibility, integrality and
/// bound validity of a MILP incumbent; and Farkas or ray certificates of
/// infeasible or unbounded outcomes.
pub fn check_certificate(prog: &LinearProgram, sol: &Solution) -> CertificateReport {
    let mut rep = CertificateReport::default();
    match sol.status {
        SolveStatus::Optimal | SolveStatus::GapLimit => {
            check_primal(prog, sol, &mut rep);
            if prog.is_mip() {
                let bound_excess = sol.bound - sol.objective;
                rep.flag(
                    ViolationKind::BoundValidity,
                    None,
                    bound_excess / sol.objective.abs().max(1.0),
                    CERTIFICATE_TOL,
                );
            } else {
                check_dual(prog, sol, &mut rep);
            }
        }
        SolveStatus::Infeasible => match &sol.certificate {
            Some(Certificate::Farkas(y)) => {
                let margin = farkas_margin(prog, y);
                if !(margin > CERTIFICATE_TOL) {
                    rep.violations.push(CertificateViolation {
                        kind: ViolationKind::InvalidCertificate,
                        index: None,
                        amount: margin,
                    });
                }
            }
            Some(Certificate::Ray(_)) => rep.violations.push(CertificateViolation {
                kind: ViolationKind::InvalidCertificate,
                index: None,
                amount: f64::NAN,
            }),
            None if !prog.is_mip() => rep.violations.push(CertificateViolation {
                kind: ViolationKind::MissingCertificate,
                index: None,
                amount: f64::NAN,
            }),
            None => {}
        },
        SolveStatus::Unbounded => match &sol.certificate {
            Some(Certificate::Ray(d)) => check_ray(prog, d, &mut rep),
            _ => rep.violations.push(CertificateViolation {
                kind: ViolationKind::MissingCertificate,
                index: None,
                amount: f64::NAN,
            }),
        },
        SolveStatus::IterationLimit => {}
    }
    rep
}

fn check_primal(prog: &LinearProgram, sol: &Solution, rep: &mut CertificateReport) {
    let x = &sol.values;
    if x.len() != prog.num_vars() {
        rep.violations.push(CertificateViolation {
            kind: ViolationKind::MissingCertificate,
            index: None,
            amount: f64::NAN,
        });
        return;
    }
    for (i, row) in prog.rows.iter().enumerate() {
        let v = row.violation(x);
        rep.primal_residual = rep.primal_residual.max(v);
        rep.flag(ViolationKind::PrimalRow, Some(i), v, CERTIFICATE_TOL);
    }
    for (j, var) in prog.vars.iter().enumerate() {
        let v = (var.lower - x[j]).max(x[j] - var.upper).max(0.0);
        rep.bound_residual = rep.bound_residual.max(v);
        rep.flag(ViolationKind::Bound, Some(j), v, CERTIFICATE_TOL);
        if var.integer {
            let f = (x[j] - x[j].round()).abs();
            rep.integrality_residual = rep.integrality_residual.max(f);
            rep.flag(ViolationKind::Integrality, Some(j), f, INTEGRALITY_TOL);
        }
    }
    let obj = prog.objective_value(x);
    rep.flag(
        ViolationKind::ObjectiveMismatch,
        None,
        (obj - sol.objective).abs() / obj.abs().max(1.0),
        CERTIFICATE_TOL,
    );
}

fn check_dual(prog: &LinearProgram, sol: &Solution, rep: &mut CertificateReport) {
    let Some(y) = &sol.duals else {
        rep.violations.push(CertificateViolation {
            kind: ViolationKind::MissingCertificate,
            index: None,
            amount: f64::NAN,
        });
        return;
    };
    let x = &sol.values;
    let d = reduced_costs(prog, y);
    let mut dual_obj = prog.objective_offset;
    let mut dual_finite = true;

    for (j, var) in prog.vars.iter().enumerate() {
        let dj = d[j];
        let (infeas, slack) = if dj > 0.0 {
            if var.lower.is_finite() {
                (0.0, dj * (x[j] - var.lower))
            } else {
                (dj, 0.0)
            }
        } else if var.upper.is_finite() {
            (0.0, -dj * (var.upper - x[j]))
        } else {
            (-dj, 0.0)
        };
        rep.dual_residual = rep.dual_residual.max(infeas);
        rep.flag(
            ViolationKind::DualFeasibility,
            Some(j),
            infeas,
            CERTIFICATE_TOL,
        );
        rep.complementarity = rep.complementarity.max(slack.abs());
        rep.flag(
            ViolationKind::Complementarity,
            Some(j),
            slack.abs(),
            CERTIFICATE_TOL,
        );
        let term = box_min(dj, var.lower, var.upper);
        if term.is_finite() {
            dual_obj += term;
        } else {
            dual_finite = false;
        }
    }
    for (i, row) in prog.rows.iter().enumerate() {
        let yi = y[i];
        let (lo, hi) = row_bounds(row.sense, row.rhs);
        let act = row.activity(x);
        let (infeas, slack) = if yi > 0.0 {
            if lo.is_finite() {
                (0.0, yi * (act - lo))
            } else {
                (yi, 0.0)
            }
        } else if hi.is_finite() {
            (0.0, -yi * (hi - act))
        } else {
            (-yi, 0.0)
        };
        rep.dual_residual = rep.dual_residual.max(infeas);
        rep.flag(
            ViolationKind::DualFeasibility,
            Some(prog.num_vars() + i),
            infeas,
            CERTIFICATE_TOL,
        );
        rep.complementarity = rep.complementarity.max(slack.abs());
        rep.flag(
            ViolationKind::Complementarity,
            Some(prog.num_vars() + i),
            slack.abs(),
            CERTIFICATE_TOL,
        );
        let term = box_min(yi, lo, hi);
        if term.is_finite() {
            dual_obj += term;
        } else {
            dual_finite = false;
        }
    }
    let primal = prog.objective_value(x);
    rep.duality_gap = if dual_finite {
        (primal - dual_obj).abs() / primal.abs().max(1.0)
    } else {
        f64::INFINITY
    };
    rep.flag(
        ViolationKind::DualityGap,
        None,
        rep.duality_gap,
        CERTIFICATE_TOL,
    );
}

/// Lower bound of `−yᵀA x + yᵀr` over the variable box and row bounds; a
/// positive value proves that no `x` satisfies `A x = r`.
pub fn farkas_margin(prog: &LinearProgram, y: &[f64]) -> f64 {
    let mut agg = vec![0.0; prog.num_vars()];
    for (row, &yi) in prog.rows.iter().zip(y) {
        for &(j, a) in &row.coeffs {
            agg[j] -= yi * a;
        }
    }
    let mut margin = 0.0;
    for (j, var) in prog.vars.iter().enumerate() {
        margin += box_min(agg[j], var.lower, var.upper);
    }
    for (row, &yi) in prog.rows.iter().zip(y) {
        let (lo, hi) = row_bounds(row.sense, row.rhs);
        margin += box_min(yi, lo, hi);
    }
    if margin.is_nan() {
        f64::NEG_INFINITY
    } else {
        margin
    }
}

fn check_ray(prog: &LinearProgram, d: &[f64], rep: &mut CertificateReport) {
    let scale = d.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if d.len() != prog.num_vars() || scale == 0.0 {
        rep.violations.push(CertificateViolation {
            kind: ViolationKind::InvalidCertificate,
            index: None,
            amount: f64::NAN,
        });
        return;
    }
    let d: Vec<f64> = d.iter().map(|v| v / scale).collect();
    for (i, row) in prog.rows.iter().enumerate() {
        let ad = row.activity(&d);
        let (lo, hi) = row_bounds(row.sense, row.rhs);
        let bad =
            (if hi.is_finite() { ad } else { 0.0 }).max(if lo.is_finite() { -ad } else { 0.0 });
        rep.flag(ViolationKind::PrimalRow, Some(i), bad, CERTIFICATE_TOL);
    }
    for (j, var) in prog.vars.iter().enumerate() {
        let bad = (if var.upper.is_finite() { d[j] } else { 0.0 }).max(if var.lower.is_finite() {
            -d[j]
        } else {
            0.0
        });
        rep.flag(ViolationKind::Bound, Some(j), bad, CERTIFICATE_TOL);
    }
    let slope: f64 = prog.vars.iter().zip(&d).map(|(v, dj)| v.cost * dj).sum();
    if !(slope < -CERTIFICATE_TOL) {
        rep.violations.push(CertificateViolation {
            kind: ViolationKind::InvalidCertificate,
            index: None,
            amount: slope,
        });
    }
}
