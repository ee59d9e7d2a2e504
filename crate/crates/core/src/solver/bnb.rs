//! Best-bound branch-and-bound.
//!
//! Nodes are ordered by their parent's relaxation bound, ties broken by
//! creation order. Branching picks the most fractional integer variable,
//! ties broken by the lowest index. A rounding heuristic at the root seeds
//! the incumbent.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::simplex::{self, Core, LpStatus};
use super::{relative_gap, Certificate, Solution, SolveStats, SolveStatus, SolverConfig};
use crate::lp::LinearProgram;

struct Node {
    bound: f64,
    id: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // BinaryHeap is a max-heap: the smallest bound, then the oldest node, pops first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.id.cmp(&self.id))
    }
}

struct Incumbent {
    objective: f64,
    x: Vec<f64>,
}

fn most_fractional(prog: &LinearProgram, x: &[f64], tol: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (j, v) in prog.vars.iter().enumerate() {
        if !v.integer {
            continue;
        }
        let frac = (x[j] - x[j].floor()).min(x[j].ceil() - x[j]);
        if frac > tol && best.map_or(true, |(_, bf)| frac > bf) {
            best = Some((j, frac));
        }
    }
    best.map(|(j, _)| j)
}

pub(crate) fn branch_and_bound(prog: &LinearProgram, cfg: &SolverConfig) -> Solution {
    let core = Core::new(prog);
    let mut lower: Vec<f64> = prog.vars.iter().map(|v| v.lower).collect();
    let mut upper: Vec<f64> = prog.vars.iter().map(|v| v.upper).collect();
    for (j, v) in prog.vars.iter().enumerate() {
        if v.integer {
            lower[j] = lower[j].ceil();
            upper[j] = upper[j].floor();
        }
    }

    let mut stats = SolveStats::default();
    let mut incumbent: Option<Incumbent> = None;
    let mut heap = BinaryHeap::new();
    let mut next_id = 0usize;
    heap.push(Node {
        bound: f64::NEG_INFINITY,
        id: next_id,
        lower,
        upper,
    });
    next_id += 1;
    let mut root = true;

    while let Some(node) = heap.peek() {
        if let Some(inc) = &incumbent {
            if relative_gap(inc.objective, node.bound) <= cfg.mip_gap || node.bound >= inc.objective
            {
                break;
            }
        }
        if stats.nodes >= cfg.node_limit {
            let bound = node.bound;
            return limit_solution(incumbent, bound, stats, SolveStatus::GapLimit);
        }
        let node = heap.pop().expect("peeked");
        stats.nodes += 1;

        let res = simplex::solve_bounded(&core, &node.lower, &node.upper, cfg);
        stats.iterations += res.iterations;
        match res.status {
            LpStatus::IterationLimit => {
                return limit_solution(incumbent, node.bound, stats, SolveStatus::IterationLimit);
            }
            LpStatus::Infeasible => {
                root = false;
                continue;
            }
            LpStatus::Unbounded => {
                if root {
                    let cert = res.ray.map(Certificate::Ray);
                    return Solution::without_values(SolveStatus::Unbounded, stats, cert);
                }
                continue;
            }
            LpStatus::Optimal => {}
        }
        let obj = prog.objective_offset + res.objective;
        if let Some(inc) = &incumbent {
            if obj >= inc.objective || relative_gap(inc.objective, obj) <= cfg.mip_gap {
                root = false;
                continue;
            }
        }
        match most_fractional(prog, &res.x, cfg.integrality_tol) {
            None => {
                incumbent = Some(Incumbent {
                    objective: obj,
                    x: res.x,
                });
            }
            Some(j) => {
                if root {
                    if let Some(found) =
                        rounding_heuristic(prog, &core, &node, &res.x, cfg, &mut stats)
                    {
                        if incumbent
                            .as_ref()
                            .map_or(true, |inc| found.objective < inc.objective)
                        {
                            incumbent = Some(found);
                        }
                    }
                }
                let v = res.x[j];
                let mut down_upper = node.upper.clone();
                down_upper[j] = v.floor();
                let mut up_lower = node.lower.clone();
                up_lower[j] = v.ceil();
                heap.push(Node {
                    bound: obj,
                    id: next_id,
                    lower: node.lower.clone(),
                    upper: down_upper,
                });
                heap.push(Node {
                    bound: obj,
                    id: next_id + 1,
                    lower: up_lower,
                    upper: node.upper,
                });
                next_id += 2;
            }
        }
        root = false;
    }

    match incumbent {
        Some(inc) => {
            let bound = heap
                .peek()
                .map_or(inc.objective, |n| n.bound.min(inc.objective));
            Solution {
                status: SolveStatus::Optimal,
                gap: relative_gap(inc.objective, bound),
                objective: inc.objective,
                bound,
                values: inc.x,
                stats,
                duals: None,
                certificate: None,
            }
        }
        None => Solution::without_values(SolveStatus::Infeasible, stats, None),
    }
}

fn limit_solution(
    incumbent: Option<Incumbent>,
    open_bound: f64,
    stats: SolveStats,
    status: SolveStatus,
) -> Solution {
    match incumbent {
        Some(inc) => {
            let bound = open_bound.min(inc.objective);
            Solution {
                status,
                gap: relative_gap(inc.objective, bound),
                objective: inc.objective,
                bound,
                values: inc.x,
                stats,
                duals: None,
                certificate: None,
            }
        }
        None => {
            let mut sol = Solution::without_values(status, stats, None);
            sol.bound = open_bound;
            sol
        }
    }
}

/// Fixes every integer variable to a rounded relaxation value and re-solves
/// the continuous part; tries nearest rounding, then rounding up.
fn rounding_heuristic(
    prog: &LinearProgram,
    core: &Core,
    node: &Node,
    x: &[f64],
    cfg: &SolverConfig,
    stats: &mut SolveStats,
) -> Option<Incumbent> {
    let round_modes: [fn(f64) -> f64; 2] = [f64::round, f64::ceil];
    for round in round_modes {
        let mut lower = node.lower.clone();
        let mut upper = node.upper.clone();
        for (j, v) in prog.vars.iter().enumerate() {
            if v.integer {
                let r = round(x[j] - 1e-9).clamp(lower[j], upper[j]);
                lower[j] = r;
                upper[j] = r;
            }
        }
        let res = simplex::solve_bounded(core, &lower, &upper, cfg);
        stats.iterations += res.iterations;
        if res.status == LpStatus::Optimal {
            return Some(Incumbent {
                objective: prog.objective_offset + res.objective,
                x: res.x,
            });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{EqTags, Sense, VarKind, VarRef};

    #[test]
    fn knapsack_matches_hand_optimum() {
        // max 5a + 4b + 3c s.t. 2a + 3b + c <= 5, 4a + b + 2c <= 11, binaries
        let mut lp = LinearProgram::new();
        let vals = [5.0, 4.0, 3.0];
        let idx: Vec<usize> = (0..3)
            .map(|k| {
                lp.add_integer_var(VarRef::at(VarKind::On, "k", k), 0.0, 1.0)
                    .unwrap()
            })
            .collect();
        for (k, &j) in idx.iter().enumerate() {
            lp.add_cost(j, -vals[k]);
        }
        lp.add_row(
            EqTags::default(),
            "w",
            None,
            vec![(0, 2.0), (1, 3.0), (2, 1.0)],
            Sense::Le,
            5.0,
        );
        lp.add_row(
            EqTags::default(),
            "v",
            None,
            vec![(0, 4.0), (1, 1.0), (2, 2.0)],
            Sense::Le,
            11.0,
        );
        let sol = branch_and_bound(&lp, &SolverConfig::default());
        assert_eq!(sol.status, SolveStatus::Optimal);
        // a + b: weight 5, value 9; a + c: weight 3 / 6, value 8; all three infeasible.
        assert!((sol.objective + 9.0).abs() < 1e-9, "{}", sol.objective);
    }

    #[test]
    fn node_limit_returns_gap_limit() {
        let mut lp = LinearProgram::new();
        for k in 0..6 {
            let j = lp
                .add_integer_var(VarRef::at(VarKind::On, "k", k), 0.0, 1.0)
                .unwrap();
            lp.add_cost(j, -((k + 2) as f64));
        }
        let coeffs: Vec<(usize, f64)> = (0..6).map(|k| (k, (k + 3) as f64)).collect();
        lp.add_row(EqTags::default(), "w", None, coeffs, Sense::Le, 10.5);
        let cfg = SolverConfig {
            node_limit: 1,
            ..SolverConfig::default()
        };
        let sol = branch_and_bound(&lp, &cfg);
        assert_eq!(sol.status, SolveStatus::GapLimit);
        assert!(sol.bound <= sol.objective);
    }
}
