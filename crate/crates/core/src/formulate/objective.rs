use super::{input_terms, scalar, var};
use crate::finance::{annualize, output_side_cost};
use crate::lp::eq::*;
use crate::lp::{CompileWarning, LinearProgram, VarKind};
use crate::model::{CommitmentSpec, Component, EnergySystem, RampSpec, RateMode, UnitCount};

/// Annual capacity cost per MW of output: output-side investment (input-side
/// share divided by the efficiency, plus any annuity) and maintenance.
pub fn capacity_cost_rate(c: &Component) -> f64 {
    let mut inv = output_side_cost(
        c.costs.invest_input_side,
        c.conversion.efficiency(),
        c.costs.invest_annualized,
    );
    if let Some(a) = &c.costs.annuity {
        inv += annualize(a);
    }
    inv + c.costs.maintenance
}

/// Minimisation coefficients for fuel, emissions, capacity, storage, ramp
/// and startup decisions. Warns `COSTLESS_SLACK` for variables whose value is
/// only pinned down by a positive cost.
pub fn emit_objective(sys: &EnergySystem, prog: &mut LinearProgram) {
    let steps = sys.time_grid.num_steps();
    let scale = sys.annual_scale();
    let mut warnings = Vec::new();
    for c in &sys.components {
        let id = c.id.as_str();
        prog.objective_tags.insert(EQ3);
        let price = c.costs.emission_price.unwrap_or(0.0) * c.costs.emission_factor;
        for t in 0..steps {
            let per_mwh = (c.costs.fuel.at(t) + price) * sys.time_grid.dt(t);
            if per_mwh != 0.0 {
                for (j, a) in input_terms(prog, c, t) {
                    prog.add_cost(j, a * per_mwh);
                }
            }
        }

        let rate = capacity_cost_rate(c);
        if c.costs.annuity.is_some() {
            prog.objective_tags.insert(EQ4);
        }
        if c.costs.invest_input_side > 0.0 {
            prog.objective_tags.insert(EQ5);
        }
        if let Some(j) = scalar(prog, VarKind::Pinstalled, id) {
            prog.add_cost(j, rate * scale);
            if rate == 0.0 {
                warnings.push(costless(
                    id,
                    "Pinstalled",
                    "capacity has no investment or maintenance cost",
                ));
            }
        }
        for p in 0..sys.time_grid.num_periods() {
            if let Some(j) = prog.lookup(VarKind::PinstalledPeriod, id, Some(p)) {
                prog.add_cost(j, rate * sys.period_scale(p));
                if rate == 0.0 && p == 0 {
                    warnings.push(costless(
                        id,
                        "PinstalledP",
                        "first-period capacity has no investment or maintenance cost",
                    ));
                }
            }
            if let Some(j) = prog.lookup(VarKind::Pbuilt, id, Some(p)) {
                prog.add_cost(j, c.capacity.build_cost);
                prog.objective_tags.insert(EQ20);
                if c.capacity.build_cost == 0.0 && p == 1 {
                    warnings.push(costless(
                        id,
                        "Pbuilt",
                        "build_cost is zero, so Pbuilt may exceed the capacity added",
                    ));
                }
            }
        }

        if let CommitmentSpec::UnitCommit {
            unit_capacity,
            units,
            startup_cost,
            ..
        } = &c.commitment
        {
            for t in 0..steps {
                prog.add_cost(var(prog, VarKind::Startup, id, t), *startup_cost);
            }
            prog.objective_tags.insert(EQ20);
            if *startup_cost == 0.0 {
                warnings.push(costless(
                    id,
                    "startup",
                    "startup_cost is zero, so startups are not counted",
                ));
            }
            if let (UnitCount::Optimized { .. }, Some(u)) =
                (units, scalar(prog, VarKind::Units, id))
            {
                prog.add_cost(u, rate * unit_capacity * scale);
                if rate * unit_capacity == 0.0 {
                    warnings.push(costless(
                        id,
                        "units",
                        "units have no investment or maintenance cost",
                    ));
                }
            }
        }

        if let RampSpec::Optimized { cost_up, cost_down } = c.ramp {
            for (kind, cost, name) in [
                (VarKind::LcrUpVar, cost_up, "LCRup"),
                (VarKind::LcrDownVar, cost_down, "LCRdown"),
            ] {
                let j = scalar(prog, kind, id).expect("load change rate declared");
                prog.add_cost(j, cost);
                if cost == 0.0 {
                    warnings.push(costless(
                        id,
                        name,
                        "load change rate is free, so the limit is vacuous",
                    ));
                }
            }
            prog.objective_tags.insert(EQ20);
        }
    }

    for s in &sys.storages {
        let id = s.id.as_str();
        if let Some(j) = scalar(prog, VarKind::CapacityVar, id) {
            prog.add_cost(j, s.capacity_cost * scale);
            prog.objective_tags.insert(EQ20);
            if s.capacity_cost == 0.0 {
                warnings.push(costless(id, "Capacity", "storage capacity is free"));
            }
        }
        if let RateMode::Optimized {
            cost_charge,
            cost_discharge,
        } = s.rate
        {
            for (kind, cost, name) in [
                (VarKind::PmaxchargeVar, cost_charge, "Pmaxcharge"),
                (VarKind::PmaxdischargeVar, cost_discharge, "Pmaxdischarge"),
            ] {
                let j = scalar(prog, kind, id).expect("rate limit declared");
                prog.add_cost(j, cost * scale);
                if cost == 0.0 {
                    warnings.push(costless(id, name, "rate limit is free, so it never binds"));
                }
            }
            prog.objective_tags.insert(EQ20);
        }
    }
    prog.warnings.extend(warnings);
}

fn costless(owner: &str, symbol: &str, why: &str) -> CompileWarning {
    CompileWarning {
        code: "COSTLESS_SLACK",
        message: format!("{symbol} of '{owner}': {why}"),
    }
}
