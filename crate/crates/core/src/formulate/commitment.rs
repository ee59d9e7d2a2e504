use super::{scalar, var};
use crate::lp::eq::*;
use crate::lp::{EqTags, LinearProgram, Sense, VarKind};
use crate::model::{CommitmentSpec, Component, EnergySystem, UnitCount};

/// Discrete-unit operation: output window per on-unit, startup counting,
/// unit-count limit and minimum down/up times. Replaces the plain capacity
/// limit for committed components.
pub fn emit_unit_commitment(sys: &EnergySystem, prog: &mut LinearProgram) {
    for c in &sys.components {
        let CommitmentSpec::UnitCommit {
            unit_capacity,
            unit_min_load,
            units,
            min_up_steps,
            min_down_steps,
            ..
        } = &c.commitment
        else {
            continue;
        };
        let id = c.id.as_str();
        let steps = sys.time_grid.num_steps();
        let units_var = scalar(prog, VarKind::Units, id);
        for t in 0..steps {
            let pout = var(prog, VarKind::Pout, id, t);
            let on = var(prog, VarKind::On, id, t);
            let a = c.capacity.availability.at(t);
            prog.add_row(
                EqTags::of(EQ22),
                id,
                Some(t),
                vec![(pout, 1.0), (on, -unit_capacity * a)],
                Sense::Le,
                0.0,
            );
            prog.add_row(
                EqTags::of(EQ23),
                id,
                Some(t),
                vec![(pout, 1.0), (on, -unit_min_load)],
                Sense::Ge,
                0.0,
            );

            let startup = var(prog, VarKind::Startup, id, t);
            let mut row = Window::new(c, prog, t);
            row.add(0, 1.0);
            row.add(1, -1.0);
            row.coeffs.push((startup, -1.0));
            prog.add_row(
                EqTags::of(EQ24),
                id,
                Some(t),
                row.coeffs,
                Sense::Le,
                row.rhs,
            );

            match (units, units_var) {
                (UnitCount::Optimized { .. }, Some(u)) => {
                    prog.add_row(
                        EqTags::of(EQ27),
                        id,
                        Some(t),
                        vec![(on, 1.0), (u, -1.0)],
                        Sense::Le,
                        0.0,
                    );
                }
                _ => prog.vars[on].bound_tag = Some(EQ27),
            }

            if *min_down_steps > 0 {
                // (on_t − on_{t−1})·N + Σ_{m=1..N} on_{t−m} ≤ N
                let n = *min_down_steps as f64;
                let mut row = Window::new(c, prog, t);
                row.add(0, n);
                row.add(1, -n);
                for m in 1..=*min_down_steps {
                    row.add(m, 1.0);
                }
                prog.add_row(
                    EqTags::of(EQ28),
                    id,
                    Some(t),
                    row.coeffs,
                    Sense::Le,
                    row.rhs + n,
                );
            }
            if *min_up_steps > 0 {
                // (on_{t−1} − on_t)·N − Σ_{m=1..N} on_{t−m} ≤ 0
                let n = *min_up_steps as f64;
                let mut row = Window::new(c, prog, t);
                row.add(1, n);
                row.add(0, -n);
                for m in 1..=*min_up_steps {
                    row.add(m, -1.0);
                }
                prog.add_row(
                    EqTags::of(EQ29),
                    id,
                    Some(t),
                    row.coeffs,
                    Sense::Le,
                    row.rhs,
                );
            }
        }
    }
}

/// Row builder over on-states `on_{t−lag}`; states before the horizon come
/// from the component's history and move to the right-hand side.
struct Window<'a> {
    c: &'a Component,
    prog: &'a LinearProgram,
    t: usize,
    coeffs: Vec<(usize, f64)>,
    rhs: f64,
}

impl<'a> Window<'a> {
    fn new(c: &'a Component, prog: &'a LinearProgram, t: usize) -> Self {
        Window {
            c,
            prog,
            t,
            coeffs: Vec::new(),
            rhs: 0.0,
        }
    }

    fn add(&mut self, lag: usize, a: f64) {
        if lag <= self.t {
            self.coeffs
                .push((var(self.prog, VarKind::On, &self.c.id, self.t - lag), a));
        } else {
            self.rhs -= a * self.c.commitment.history(lag - self.t);
        }
    }
}
