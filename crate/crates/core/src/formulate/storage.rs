use super::{scalar, var, StorageForm};
use crate::lp::eq::*;
use crate::lp::{EqTags, LinearProgram, Sense, VarKind};
use crate::model::{EnergySystem, RateMode, Storage};

/// Fill-level bounds and charge/discharge rate limits for every storage.
///
/// With [`StorageForm::Recurrence`] the fill variable of each step is tied to
/// the previous one and bounded; with [`StorageForm::CumulativeSum`] the
/// running sum of net inflows is bounded directly.
pub fn emit_storage(sys: &EnergySystem, prog: &mut LinearProgram, form: StorageForm) {
    for s in &sys.storages {
        match form {
            StorageForm::Recurrence => fill_recurrence(sys, prog, s),
            StorageForm::CumulativeSum => fill_cumulative(sys, prog, s),
        }
        rate_limits(sys, prog, s);
    }
}

/// Net inflow terms of step `t`: `ηcharge·Δt·Pcharge − Δt/ηdischarge·Pdischarge`.
fn inflow(sys: &EnergySystem, prog: &LinearProgram, s: &Storage, t: usize) -> [(usize, f64); 2] {
    let dt = sys.time_grid.dt(t);
    [
        (var(prog, VarKind::Pcharge, &s.id, t), s.charge_eff * dt),
        (
            var(prog, VarKind::Pdischarge, &s.id, t),
            -dt / s.discharge_eff,
        ),
    ]
}

fn fill_recurrence(sys: &EnergySystem, prog: &mut LinearProgram, s: &Storage) {
    let steps = sys.time_grid.num_steps();
    let cap = scalar(prog, VarKind::CapacityVar, &s.id);
    for t in 0..steps {
        let fill = var(prog, VarKind::Fill, &s.id, t);
        prog.vars[fill].bound_tag = Some(EQ12);
        let mut coeffs = vec![(fill, 1.0)];
        coeffs.extend(inflow(sys, prog, s, t).map(|(j, a)| (j, -a)));
        let rhs = if t == 0 {
            s.initial_fill
        } else {
            coeffs.push((var(prog, VarKind::Fill, &s.id, t - 1), -1.0));
            0.0
        };
        prog.add_row(EqTags::of(EQ12), &s.id, Some(t), coeffs, Sense::Eq, rhs);

        let mut upper = vec![(fill, 1.0)];
        upper.extend(cap.map(|c| (c, -1.0)));
        prog.add_row(
            EqTags::of(EQ13),
            &s.id,
            Some(t),
            upper,
            Sense::Le,
            s.capacity_fixed,
        );
    }
    if s.final_fill_at_least_initial && steps > 0 {
        let last = var(prog, VarKind::Fill, &s.id, steps - 1);
        prog.add_row(
            EqTags::of(EQ12),
            &s.id,
            None,
            vec![(last, 1.0)],
            Sense::Ge,
            s.initial_fill,
        );
    }
}

fn fill_cumulative(sys: &EnergySystem, prog: &mut LinearProgram, s: &Storage) {
    let steps = sys.time_grid.num_steps();
    let cap = scalar(prog, VarKind::CapacityVar, &s.id);
    let mut running: Vec<(usize, f64)> = Vec::new();
    for t in 0..steps {
        running.extend(inflow(sys, prog, s, t));
        prog.add_row(
            EqTags::of(EQ12),
            &s.id,
            Some(t),
            running.clone(),
            Sense::Ge,
            -s.initial_fill,
        );
        let mut upper = running.clone();
        upper.extend(cap.map(|c| (c, -1.0)));
        prog.add_row(
            EqTags::of(EQ13),
            &s.id,
            Some(t),
            upper,
            Sense::Le,
            s.capacity_fixed - s.initial_fill,
        );
    }
    if s.final_fill_at_least_initial && steps > 0 {
        prog.add_row(EqTags::of(EQ12), &s.id, None, running, Sense::Ge, 0.0);
    }
}

fn rate_limits(sys: &EnergySystem, prog: &mut LinearProgram, s: &Storage) {
    let steps = sys.time_grid.num_steps();
    match s.rate {
        RateMode::Fixed {
            max_charge,
            max_discharge,
        } => {
            for t in 0..steps {
                for (kind, tag, limit) in [
                    (VarKind::Pcharge, EQ14, max_charge),
                    (VarKind::Pdischarge, EQ15, max_discharge),
                ] {
                    let j = var(prog, kind, &s.id, t);
                    prog.vars[j].upper = limit;
                    prog.vars[j].bound_tag = Some(tag);
                }
            }
        }
        RateMode::CRateLinked { c_rate } => {
            let cap = scalar(prog, VarKind::CapacityVar, &s.id);
            for t in 0..steps {
                for (kind, tag) in [(VarKind::Pcharge, EQ14), (VarKind::Pdischarge, EQ15)] {
                    let mut coeffs = vec![(var(prog, kind, &s.id, t), 1.0)];
                    coeffs.extend(cap.map(|c| (c, -1.0 / c_rate)));
                    prog.add_row(
                        EqTags::of(tag),
                        &s.id,
                        Some(t),
                        coeffs,
                        Sense::Le,
                        s.capacity_fixed / c_rate,
                    );
                }
            }
        }
        RateMode::Optimized { .. } => {
            let limits = [
                (VarKind::Pcharge, VarKind::PmaxchargeVar, EQ14),
                (VarKind::Pdischarge, VarKind::PmaxdischargeVar, EQ15),
            ];
            for t in 0..steps {
                for (kind, limit_kind, tag) in limits {
                    let limit = scalar(prog, limit_kind, &s.id).expect("rate limit declared");
                    let coeffs = vec![(var(prog, kind, &s.id, t), 1.0), (limit, -1.0)];
                    prog.add_row(EqTags::of(tag), &s.id, Some(t), coeffs, Sense::Le, 0.0);
                }
            }
        }
    }
}
