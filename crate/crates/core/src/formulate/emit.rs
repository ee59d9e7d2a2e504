use super::{capacity_terms, input_terms, scalar, var};
use crate::lp::eq::*;
use crate::lp::{EqTags, LinearProgram, Sense, VarKind};
use crate::model::{CommitmentSpec, ConversionSpec, EnergySystem, RampSpec, Side};

/// `Pout_t ≤ available_t · (Pinstalled + Pinstalled_init)` for every
/// uncommitted component; per-period capacity uses the step's period variable.
pub fn emit_capacity_limits(sys: &EnergySystem, prog: &mut LinearProgram) {
    for c in &sys.components {
        if c.commitment.is_committed() {
            continue;
        }
        let tag = if c.capacity.per_period { EQ18 } else { EQ1 };
        for t in 0..sys.time_grid.num_steps() {
            let a = c.capacity.availability.at(t);
            let (terms, init) = capacity_terms(sys, prog, c, t);
            let mut coeffs = vec![(var(prog, VarKind::Pout, &c.id, t), 1.0)];
            coeffs.extend(terms.into_iter().map(|(j, k)| (j, -a * k)));
            prog.add_row(EqTags::of(tag), &c.id, Some(t), coeffs, Sense::Le, a * init);
        }
    }
}

/// Caps optimised capacity through variable upper bounds.
pub fn emit_max_installed(sys: &EnergySystem, prog: &mut LinearProgram) {
    for c in &sys.components {
        if !c.capacity.optimizable
            || c.capacity.max_installed.is_none()
            || c.commitment.is_committed()
        {
            continue;
        }
        let limit = c.capacity.expansion_limit();
        let mut targets: Vec<usize> = scalar(prog, VarKind::Pinstalled, &c.id)
            .into_iter()
            .collect();
        for p in 0..sys.time_grid.num_periods() {
            targets.extend(prog.lookup(VarKind::PinstalledPeriod, &c.id, Some(p)));
        }
        for j in targets {
            prog.vars[j].upper = limit;
            prog.vars[j].bound_tag = Some(EQ6);
        }
    }
}

/// One equality per balanced node and step: production minus consumption
/// plus storage discharge minus charge equals the load.
pub fn emit_node_balances(sys: &EnergySystem, prog: &mut LinearProgram) {
    for n in sys.nodes.iter().filter(|n| !n.boundary) {
        for t in 0..sys.time_grid.num_steps() {
            let mut tags = EqTags::of(EQ2);
            let mut coeffs = Vec::new();
            for c in &sys.components {
                let pout = var(prog, VarKind::Pout, &c.id, t);
                if c.conversion.output() == n.id {
                    coeffs.push((pout, 1.0));
                }
                match &c.conversion {
                    ConversionSpec::FixedRatioCoupled {
                        secondary_output, ..
                    } if *secondary_output == n.id => {
                        coeffs.push((pout, c.conversion.coupling_ratio().unwrap()));
                        tags.insert(EQ7);
                    }
                    ConversionSpec::CharacteristicField {
                        secondary_output, ..
                    } if *secondary_output == n.id => {
                        coeffs.push((var(prog, VarKind::PoutSecondary, &c.id, t), 1.0));
                        tags.insert(EQ11);
                    }
                    _ => {}
                }
                if c.conversion.input() == Some(n.id.as_str()) {
                    coeffs.extend(input_terms(prog, c, t).into_iter().map(|(j, a)| (j, -a)));
                    if c.commitment.partial_load().is_some() {
                        tags.insert(EQ25);
                    }
                }
            }
            for s in sys.storages.iter().filter(|s| s.node == n.id) {
                coeffs.push((var(prog, VarKind::Pdischarge, &s.id, t), 1.0));
                coeffs.push((var(prog, VarKind::Pcharge, &s.id, t), -1.0));
            }
            prog.add_row(tags, &n.id, Some(t), coeffs, Sense::Eq, n.load.at(t));
        }
    }
}

/// Half-planes `Pout_secondary ≶ a · Pout + b` bounding the joint output.
/// The first upper half-plane is tagged EQ8, further upper ones EQ9 and
/// lower ones EQ10.
pub fn emit_characteristic_field(sys: &EnergySystem, prog: &mut LinearProgram) {
    for c in &sys.components {
        let ConversionSpec::CharacteristicField { half_planes, .. } = &c.conversion else {
            continue;
        };
        for t in 0..sys.time_grid.num_steps() {
            let pout = var(prog, VarKind::Pout, &c.id, t);
            let second = var(prog, VarKind::PoutSecondary, &c.id, t);
            let mut seen_upper = false;
            for h in half_planes {
                let (tag, sense) = match h.sense {
                    Side::Le if !seen_upper => {
                        seen_upper = true;
                        (EQ8, Sense::Le)
                    }
                    Side::Le => (EQ9, Sense::Le),
                    Side::Ge => (EQ10, Sense::Ge),
                };
                prog.add_row(
                    EqTags::of(tag),
                    &c.id,
                    Some(t),
                    vec![(second, 1.0), (pout, -h.slope)],
                    sense,
                    h.intercept,
                );
            }
        }
    }
}

/// Load-change limits between consecutive steps. Fixed rates are per hour
/// and scale with the step duration.
pub fn emit_ramp_limits(sys: &EnergySystem, prog: &mut LinearProgram) {
    for c in &sys.components {
        for t in 1..sys.time_grid.num_steps() {
            let now = var(prog, VarKind::Pout, &c.id, t);
            let prev = var(prog, VarKind::Pout, &c.id, t - 1);
            match c.ramp {
                RampSpec::None => {}
                RampSpec::Fixed { up, down } => {
                    let dt = sys.time_grid.dt(t);
                    let (terms, init) = capacity_terms(sys, prog, c, t);
                    for (tag, rate, a, b) in [(EQ16, up, now, prev), (EQ17, down, prev, now)] {
                        let mut coeffs = vec![(a, 1.0), (b, -1.0)];
                        coeffs.extend(terms.iter().map(|&(j, k)| (j, -rate * dt * k)));
                        prog.add_row(
                            EqTags::of(tag),
                            &c.id,
                            Some(t),
                            coeffs,
                            Sense::Le,
                            rate * dt * init,
                        );
                    }
                }
                RampSpec::Optimized { .. } => {
                    let up = scalar(prog, VarKind::LcrUpVar, &c.id).expect("LCRup declared");
                    let down = scalar(prog, VarKind::LcrDownVar, &c.id).expect("LCRdown declared");
                    for (tag, lcr, a, b) in [(EQ16, up, now, prev), (EQ17, down, prev, now)] {
                        prog.add_row(
                            EqTags::of(tag),
                            &c.id,
                            Some(t),
                            vec![(a, 1.0), (b, -1.0), (lcr, -1.0)],
                            Sense::Le,
                            0.0,
                        );
                    }
                }
            }
        }
    }
}

/// `Pinstalled_p − Pinstalled_{p−1} ≤ Pbuilt_p` for every period after the first.
/// The row's step field carries the period index.
pub fn emit_build_periods(sys: &EnergySystem, prog: &mut LinearProgram) {
    for c in &sys.components {
        if !(c.capacity.optimizable && c.capacity.per_period)
            || c.commitment != CommitmentSpec::None
        {
            continue;
        }
        for p in 1..sys.time_grid.num_periods() {
            let coeffs = vec![
                (var(prog, VarKind::PinstalledPeriod, &c.id, p), 1.0),
                (var(prog, VarKind::PinstalledPeriod, &c.id, p - 1), -1.0),
                (var(prog, VarKind::Pbuilt, &c.id, p), -1.0),
            ];
            prog.add_row(EqTags::of(EQ19), &c.id, Some(p), coeffs, Sense::Le, 0.0);
        }
    }
}

/// Total emissions `Σ input · factor · Δt ≤ CO2max`.
pub fn emit_co2_cap(sys: &EnergySystem, prog: &mut LinearProgram) {
    let Some(cap) = sys.co2_cap.filter(|c| c.is_finite()) else {
        return;
    };
    let mut coeffs = Vec::new();
    for c in &sys.components {
        let factor = c.costs.emission_factor;
        if factor == 0.0 {
            continue;
        }
        for t in 0..sys.time_grid.num_steps() {
            let dt = sys.time_grid.dt(t);
            coeffs.extend(
                input_terms(prog, c, t)
                    .into_iter()
                    .map(|(j, a)| (j, a * factor * dt)),
            );
        }
    }
    prog.add_row(EqTags::of(EQ21), "system", None, coeffs, Sense::Le, cap);
}
