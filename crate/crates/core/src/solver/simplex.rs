//! Bounded-variable revised primal simplex.
//!
//! Every row `i` gets a logical variable `r_i` with `A x − r = 0` and the row's
//! sense encoded as bounds on `r_i`. Rows that are violated at the starting
//! point receive an artificial variable; phase one minimises their sum.
//! Pricing is Dantzig's rule with a Harris ratio test, switching to Bland's
//! rule after `stall_window` pivots without objective progress.

use super::lu::{Eta, LuFactors};
use super::SolverConfig;
use crate::lp::{LinearProgram, Sense};

const NONE: usize = usize::MAX;
const PIVOT_TOL: f64 = 1e-9;
const PRIMAL_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 100;

/// Immutable column-wise view of a program.
pub(crate) struct Core {
    pub n: usize,
    pub m: usize,
    pub cols: Vec<Vec<(usize, f64)>>,
    pub cost: Vec<f64>,
    pub row_lower: Vec<f64>,
    pub row_upper: Vec<f64>,
}

impl Core {
    pub fn new(prog: &LinearProgram) -> Core {
        let n = prog.num_vars();
        let m = prog.num_rows();
        let mut cols = vec![Vec::new(); n];
        let mut row_lower = Vec::with_capacity(m);
        let mut row_upper = Vec::with_capacity(m);
        for (i, row) in prog.rows.iter().enumerate() {
            for &(j, a) in &row.coeffs {
                cols[j].push((i, a));
            }
            let (lo, hi) = match row.sense {
                Sense::Le => (f64::NEG_INFINITY, row.rhs),
                Sense::Ge => (row.rhs, f64::INFINITY),
                Sense::Eq => (row.rhs, row.rhs),
            };
            row_lower.push(lo);
            row_upper.push(hi);
        }
        Core {
            n,
            m,
            cols,
            cost: prog.vars.iter().map(|v| v.cost).collect(),
            row_lower,
            row_upper,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub(crate) struct LpResult {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub duals: Vec<f64>,
    /// Objective without the program's constant offset.
    pub objective: f64,
    pub iterations: usize,
    pub ray: Option<Vec<f64>>,
    pub farkas: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NonBasic {
    Lower,
    Upper,
    Free,
}

enum PhaseEnd {
    Optimal,
    Unbounded {
        entering: usize,
        dir: f64,
        alpha: Vec<f64>,
    },
    IterationLimit,
}

struct Simplex<'a> {
    core: &'a Core,
    n: usize,
    m: usize,
    art_row: Vec<usize>,
    art_sign: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    cost: Vec<f64>,
    x: Vec<f64>,
    state: Vec<NonBasic>,
    basis: Vec<usize>,
    pos_of: Vec<usize>,
    lu: LuFactors,
    etas: Vec<Eta>,
    iterations: usize,
    iteration_limit: usize,
    optimality_tol: f64,
    stall_window: usize,
}

impl<'a> Simplex<'a> {
    fn total(&self) -> usize {
        self.n + self.m + self.art_row.len()
    }

    fn for_col(&self, j: usize, mut f: impl FnMut(usize, f64)) {
        if j < self.n {
            for &(i, a) in &self.core.cols[j] {
                f(i, a);
            }
        } else if j < self.n + self.m {
            f(j - self.n, -1.0);
        } else {
            let k = j - self.n - self.m;
            f(self.art_row[k], self.art_sign[k]);
        }
    }

    fn col_vec(&self, j: usize) -> Vec<(usize, f64)> {
        let mut v = Vec::new();
        self.for_col(j, |i, a| v.push((i, a)));
        v
    }

    fn dot_col(&self, j: usize, y: &[f64]) -> f64 {
        let mut s = 0.0;
        self.for_col(j, |i, a| s += a * y[i]);
        s
    }

    fn new(core: &'a Core, lower: &[f64], upper: &[f64], cfg: &SolverConfig) -> Self {
        let n = core.n;
        let m = core.m;
        let mut lb: Vec<f64> = lower.to_vec();
        let mut ub: Vec<f64> = upper.to_vec();
        lb.extend_from_slice(&core.row_lower);
        ub.extend_from_slice(&core.row_upper);

        let mut x = vec![0.0; n + m];
        let mut state = vec![NonBasic::Lower; n + m];
        for j in 0..n {
            let (v, s) = resting_point(lb[j], ub[j]);
            x[j] = v;
            state[j] = s;
        }
        let mut activity = vec![0.0; m];
        for j in 0..n {
            if x[j] != 0.0 {
                for &(i, a) in &core.cols[j] {
                    activity[i] += a * x[j];
                }
            }
        }

        let mut basis = vec![NONE; m];
        let mut pos_of = vec![NONE; n + m];
        let mut art_row = Vec::new();
        let mut art_sign = Vec::new();
        let mut art_value = Vec::new();
        for i in 0..m {
            let r = n + i;
            let act = activity[i];
            if act >= lb[r] - PRIMAL_TOL && act <= ub[r] + PRIMAL_TOL {
                basis[i] = r;
                pos_of[r] = i;
                x[r] = act;
            } else {
                // r rests at the violated bound; an artificial closes the gap.
                let target = if act < lb[r] { lb[r] } else { ub[r] };
                x[r] = target;
                state[r] = if act < lb[r] {
                    NonBasic::Lower
                } else {
                    NonBasic::Upper
                };
                let diff = target - act;
                art_row.push(i);
                art_sign.push(diff.signum());
                art_value.push(diff.abs());
            }
        }
        let n_art = art_row.len();
        for (k, &i) in art_row.iter().enumerate() {
            let j = n + m + k;
            basis[i] = j;
            lb.push(0.0);
            ub.push(f64::INFINITY);
            x.push(art_value[k]);
            state.push(NonBasic::Lower);
            pos_of.push(i);
        }
        debug_assert_eq!(x.len(), n + m + n_art);

        Simplex {
            core,
            n,
            m,
            art_row,
            art_sign,
            lb,
            ub,
            cost: vec![0.0; n + m + n_art],
            x,
            state,
            basis,
            pos_of,
            lu: LuFactors::default(),
            etas: Vec::new(),
            iterations: 0,
            iteration_limit: cfg.iteration_limit,
            optimality_tol: cfg.optimality_tol,
            stall_window: cfg.stall_window.max(1),
        }
    }

    fn refactor(&mut self) {
        loop {
            let cols: Vec<Vec<(usize, f64)>> =
                self.basis.iter().map(|&j| self.col_vec(j)).collect();
            match LuFactors::factorize(self.m, &cols) {
                Ok(lu) => {
                    self.lu = lu;
                    self.etas.clear();
                    break;
                }
                Err(singular) => {
                    log::debug!(
                        "singular basis, replacing {} columns",
                        singular.positions.len()
                    );
                    for (&pos, &row) in singular.positions.iter().zip(&singular.rows) {
                        let old = self.basis[pos];
                        let (v, s) = resting_point(self.lb[old], self.ub[old]);
                        self.x[old] = v;
                        self.state[old] = s;
                        self.pos_of[old] = NONE;
                        let r = self.n + row;
                        self.basis[pos] = r;
                        self.pos_of[r] = pos;
                    }
                }
            }
        }
        self.recompute_basic_values();
    }

    fn recompute_basic_values(&mut self) {
        let mut rhs = vec![0.0; self.m];
        for j in 0..self.total() {
            if self.pos_of[j] == NONE && self.x[j] != 0.0 {
                let xj = self.x[j];
                self.for_col(j, |i, a| rhs[i] -= a * xj);
            }
        }
        self.ftran(&mut rhs);
        for (pos, &j) in self.basis.iter().enumerate() {
            self.x[j] = rhs[pos];
        }
    }

    fn ftran(&self, v: &mut [f64]) {
        self.lu.solve(v);
        for eta in &self.etas {
            eta.apply(v);
        }
    }

    fn btran(&self, v: &mut [f64]) {
        for eta in self.etas.iter().rev() {
            eta.apply_transpose(v);
        }
        self.lu.solve_transpose(v);
    }

    fn duals(&self) -> Vec<f64> {
        let mut y: Vec<f64> = self.basis.iter().map(|&j| self.cost[j]).collect();
        self.btran(&mut y);
        y
    }

    fn objective(&self) -> f64 {
        self.cost.iter().zip(&self.x).map(|(c, x)| c * x).sum()
    }

    /// Picks the entering variable and its direction of movement.
    fn price(&self, y: &[f64], bland: bool) -> Option<(usize, f64, f64)> {
        let tol = self.optimality_tol;
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.total() {
            if self.pos_of[j] != NONE || self.lb[j] == self.ub[j] {
                continue;
            }
            let d = self.cost[j] - self.dot_col(j, y);
            let dir = match self.state[j] {
                NonBasic::Lower if d < -tol => 1.0,
                NonBasic::Upper if d > tol => -1.0,
                NonBasic::Free if d.abs() > tol => -d.signum(),
                _ => continue,
            };
            if bland {
                return Some((j, dir, d));
            }
            if best.map_or(true, |(_, _, bd)| d.abs() > bd.abs()) {
                best = Some((j, dir, d));
            }
        }
        best
    }

    fn run_phase(&mut self) -> PhaseEnd {
        let mut bland = false;
        let mut stall = 0usize;
        let mut verified = false;
        loop {
            if self.iterations >= self.iteration_limit {
                return PhaseEnd::IterationLimit;
            }
            if self.etas.len() >= REFACTOR_EVERY {
                self.refactor();
            }
            let y = self.duals();
            let Some((q, dir, d)) = self.price(&y, bland) else {
                if !self.etas.is_empty() && !verified {
                    // Confirm optimality on a fresh factorisation.
                    self.refactor();
                    verified = true;
                    continue;
                }
                return PhaseEnd::Optimal;
            };
            verified = false;

            let mut alpha = vec![0.0; self.m];
            self.for_col(q, |i, a| alpha[i] = a);
            self.ftran(&mut alpha);

            let step = self.ratio_test(q, dir, &alpha, bland);
            let Some((theta, leave)) = step else {
                return PhaseEnd::Unbounded {
                    entering: q,
                    dir,
                    alpha,
                };
            };
            self.iterations += 1;

            self.x[q] += dir * theta;
            for (pos, &a) in alpha.iter().enumerate() {
                if a != 0.0 {
                    let j = self.basis[pos];
                    self.x[j] -= dir * a * theta;
                }
            }
            match leave {
                None => {
                    // Bound flip of the entering variable.
                    self.state[q] = match self.state[q] {
                        NonBasic::Lower => {
                            self.x[q] = self.ub[q];
                            NonBasic::Upper
                        }
                        _ => {
                            self.x[q] = self.lb[q];
                            NonBasic::Lower
                        }
                    };
                }
                Some((p, to_upper)) => {
                    let l = self.basis[p];
                    if to_upper {
                        self.x[l] = self.ub[l];
                        self.state[l] = NonBasic::Upper;
                    } else {
                        self.x[l] = self.lb[l];
                        self.state[l] = NonBasic::Lower;
                    }
                    self.pos_of[l] = NONE;
                    self.basis[p] = q;
                    self.pos_of[q] = p;
                    self.etas.push(Eta::new(p, &alpha));
                }
            }

            let gain = theta * d.abs();
            if gain > 1e-12 * (1.0 + self.objective().abs()) {
                stall = 0;
                bland = false;
            } else {
                stall += 1;
                if stall >= self.stall_window {
                    bland = true;
                }
            }
        }
    }

    /// Returns the step length and the leaving position (with the bound it
    /// reaches), `None` for a bound flip, or `None` overall when unbounded.
    fn ratio_test(
        &self,
        q: usize,
        dir: f64,
        alpha: &[f64],
        bland: bool,
    ) -> Option<(f64, Option<(usize, bool)>)> {
        let span = self.ub[q] - self.lb[q];
        let tol = if bland { 0.0 } else { PRIMAL_TOL };
        // Pass one: largest step keeping every basic variable within tolerance.
        let mut theta_max = f64::INFINITY;
        for (pos, &a) in alpha.iter().enumerate() {
            if a.abs() <= PIVOT_TOL {
                continue;
            }
            let j = self.basis[pos];
            let delta = -dir * a;
            let limit = if delta < 0.0 {
                if self.lb[j].is_finite() {
                    (self.x[j] - self.lb[j] + tol) / -delta
                } else {
                    continue;
                }
            } else if self.ub[j].is_finite() {
                (self.ub[j] - self.x[j] + tol) / delta
            } else {
                continue;
            };
            theta_max = theta_max.min(limit);
        }
        if theta_max.is_infinite() && span.is_infinite() {
            return None;
        }
        // Pass two: among candidates within theta_max pick the most stable pivot
        // (or the lowest variable index under Bland's rule).
        let mut choice: Option<(usize, f64, bool)> = None;
        let mut choice_key = (f64::NEG_INFINITY, usize::MAX);
        for (pos, &a) in alpha.iter().enumerate() {
            if a.abs() <= PIVOT_TOL {
                continue;
            }
            let j = self.basis[pos];
            let delta = -dir * a;
            let (ratio, to_upper) = if delta < 0.0 {
                if !self.lb[j].is_finite() {
                    continue;
                }
                ((self.x[j] - self.lb[j]) / -delta, false)
            } else {
                if !self.ub[j].is_finite() {
                    continue;
                }
                ((self.ub[j] - self.x[j]) / delta, true)
            };
            if ratio > theta_max * (1.0 + 1e-12) + 1e-15 {
                continue;
            }
            let better = if bland {
                j < choice_key.1
            } else {
                a.abs() > choice_key.0
            };
            if better {
                choice_key = (a.abs(), j);
                choice = Some((pos, ratio.max(0.0), to_upper));
            }
        }
        match choice {
            Some((_, ratio, _)) if span <= ratio => Some((span, None)),
            Some((pos, ratio, to_upper)) => Some((ratio, Some((pos, to_upper)))),
            None => Some((span, None)),
        }
    }

    fn ray(&self, q: usize, dir: f64, alpha: &[f64]) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        if q < self.n {
            d[q] = dir;
        }
        for (pos, &a) in alpha.iter().enumerate() {
            let j = self.basis[pos];
            if j < self.n {
                d[j] = -dir * a;
            }
        }
        d
    }
}

fn resting_point(lb: f64, ub: f64) -> (f64, NonBasic) {
    if lb.is_finite() {
        (lb, NonBasic::Lower)
    } else if ub.is_finite() {
        (ub, NonBasic::Upper)
    } else {
        (0.0, NonBasic::Free)
    }
}

/// Solves `min cᵀx` over the program's rows with the given variable bounds.
pub(crate) fn solve_bounded(
    core: &Core,
    lower: &[f64],
    upper: &[f64],
    cfg: &SolverConfig,
) -> LpResult {
    let mut s = Simplex::new(core, lower, upper, cfg);
    let fail = |s: &Simplex, status| LpResult {
        status,
        x: Vec::new(),
        duals: Vec::new(),
        objective: f64::NAN,
        iterations: s.iterations,
        ray: None,
        farkas: None,
    };
    if lower.iter().zip(upper).any(|(l, u)| l > u) {
        let mut r = fail(&s, LpStatus::Infeasible);
        r.farkas = Some(vec![0.0; core.m]);
        return r;
    }
    s.refactor();

    if !s.art_row.is_empty() {
        let first_art = s.n + s.m;
        for j in first_art..s.total() {
            s.cost[j] = 1.0;
        }
        match s.run_phase() {
            PhaseEnd::IterationLimit => return fail(&s, LpStatus::IterationLimit),
            PhaseEnd::Unbounded { .. } => unreachable!("phase one objective is bounded below"),
            PhaseEnd::Optimal => {}
        }
        let infeasibility: f64 = s.x[first_art..].iter().sum();
        if infeasibility > cfg.feasibility_tol {
            let mut r = fail(&s, LpStatus::Infeasible);
            r.farkas = Some(s.duals());
            return r;
        }
        for j in first_art..s.total() {
            s.cost[j] = 0.0;
            s.ub[j] = 0.0;
            if s.pos_of[j] == NONE {
                s.x[j] = 0.0;
                s.state[j] = NonBasic::Lower;
            }
        }
        s.recompute_basic_values();
    }

    s.cost[..s.n].copy_from_slice(&core.cost);
    match s.run_phase() {
        PhaseEnd::IterationLimit => fail(&s, LpStatus::IterationLimit),
        PhaseEnd::Unbounded {
            entering,
            dir,
            alpha,
        } => {
            let mut r = fail(&s, LpStatus::Unbounded);
            r.ray = Some(s.ray(entering, dir, &alpha));
            r
        }
        PhaseEnd::Optimal => {
            let x: Vec<f64> = s.x[..s.n].to_vec();
            let objective = core.cost.iter().zip(&x).map(|(c, v)| c * v).sum();
            LpResult {
                status: LpStatus::Optimal,
                duals: s.duals(),
                x,
                objective,
                iterations: s.iterations,
                ray: None,
                farkas: None,
            }
        }
    }
}
