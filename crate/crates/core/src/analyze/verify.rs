use serde::Serialize;

use super::costs::{cost_breakdown, crf_direct};
use super::{
    fill_levels, input_draw, installed, secondary_output, storage_capacity, storage_rate_limits,
    Assignment,
};
use crate::finance;
use crate::lp::{EqTag, VarKind};
use crate::model::{
    CommitmentSpec, Component, ConversionSpec, EnergySystem, RampSpec, RateMode, Side, UnitCount,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyResidual {
    pub tag: EqTag,
    /// Number of individual checks evaluated; zero when the family is unused.
    pub checks: usize,
    pub max_residual: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub tolerance: f64,
    /// One entry per equation family, EQ1 to EQ29.
    pub families: Vec<FamilyResidual>,
}

impl ResidualReport {
    pub fn passed(&self) -> bool {
        self.families.iter().all(|f| f.passed)
    }

    pub fn family(&self, tag: EqTag) -> &FamilyResidual {
        &self.families[tag.number() as usize - 1]
    }

    pub fn failing(&self) -> impl Iterator<Item = &FamilyResidual> {
        self.families.iter().filter(|f| !f.passed)
    }
}

struct Acc {
    checks: [usize; 30],
    worst: [f64; 30],
}

impl Acc {
    fn record(&mut self, eq: usize, residual: f64) {
        self.checks[eq] += 1;
        let r = if residual.is_nan() {
            f64::INFINITY
        } else {
            residual.max(0.0)
        };
        self.worst[eq] = self.worst[eq].max(r);
    }
}

fn rel(x: f64, scale: f64) -> f64 {
    x / scale.abs().max(1.0)
}

/// Re-evaluates every equation family directly from the system and the
/// decoded values. Inequalities report their violation (zero when met),
/// equalities their absolute deviation; node balances, the emission cap and
/// objective consistency are relative to `max(1, |rhs|)`.
pub fn verify_solution(sys: &EnergySystem, a: &Assignment, tol: f64) -> ResidualReport {
    let mut acc = Acc {
        checks: [0; 30],
        worst: [0.0; 30],
    };
    let steps = sys.time_grid.num_steps();

    balances(sys, a, &mut acc);
    for c in &sys.components {
        capacity(sys, c, a, &mut acc);
        field(sys, c, a, &mut acc);
        ramp(sys, c, a, &mut acc);
        commitment(sys, c, a, &mut acc);
        finance_terms(c, &mut acc);
    }

    for s in &sys.storages {
        let fill = fill_levels(sys, s, a);
        let cap = storage_capacity(s, a);
        for &f in &fill {
            acc.record(12, -f);
            acc.record(13, f - cap);
        }
        if s.final_fill_at_least_initial {
            if let Some(&last) = fill.last() {
                acc.record(12, s.initial_fill - last);
            }
        }
        let (lc, ld) = storage_rate_limits(s, a);
        for t in 0..steps {
            acc.record(14, a.at(VarKind::Pcharge, &s.id, t) - lc);
            acc.record(15, a.at(VarKind::Pdischarge, &s.id, t) - ld);
        }
        if s.capacity_optimizable {
            if let Some(max) = s.max_capacity {
                acc.record(6, cap - max);
            }
        }
        storage_tightness(sys, s, a, &fill, &mut acc);
    }

    if let Some(cap) = sys.co2_cap.filter(|c| c.is_finite()) {
        acc.record(21, rel(super::emissions_total(sys, a) - cap, cap));
    }
    let total = cost_breakdown(sys, a).total();
    acc.record(3, rel((total - a.objective).abs(), a.objective));

    let families = EqTag::all()
        .map(|tag| {
            let k = tag.number() as usize;
            FamilyResidual {
                tag,
                checks: acc.checks[k],
                max_residual: acc.worst[k],
                passed: acc.worst[k] <= tol,
            }
        })
        .collect();
    ResidualReport {
        tolerance: tol,
        families,
    }
}

fn balances(sys: &EnergySystem, a: &Assignment, acc: &mut Acc) {
    for n in sys.nodes.iter().filter(|n| !n.boundary) {
        let coupled = sys.components.iter().any(|c| {
            matches!(&c.conversion, ConversionSpec::FixedRatioCoupled { secondary_output, .. } if *secondary_output == n.id)
        });
        let fielded = sys.components.iter().any(|c| {
            matches!(&c.conversion, ConversionSpec::CharacteristicField { secondary_output, .. } if *secondary_output == n.id)
        });
        let partial = sys.components.iter().any(|c| {
            c.conversion.input() == Some(n.id.as_str()) && c.commitment.partial_load().is_some()
        });
        for t in 0..sys.time_grid.num_steps() {
            let mut net = 0.0;
            for c in &sys.components {
                if c.conversion.output() == n.id {
                    net += a.at(VarKind::Pout, &c.id, t);
                }
                if c.conversion.secondary_output() == Some(n.id.as_str()) {
                    net += secondary_output(c, a, t).unwrap_or(0.0);
                }
                if c.conversion.input() == Some(n.id.as_str()) {
                    net -= input_draw(c, a, t);
                }
            }
            for s in sys.storages.iter().filter(|s| s.node == n.id) {
                net += a.at(VarKind::Pdischarge, &s.id, t) - a.at(VarKind::Pcharge, &s.id, t);
            }
            let load = n.load.at(t);
            let r = rel((net - load).abs(), load);
            acc.record(2, r);
            if coupled {
                acc.record(7, r);
            }
            if fielded {
                acc.record(11, r);
            }
            if partial {
                acc.record(25, r);
            }
        }
    }
}

fn capacity(sys: &EnergySystem, c: &Component, a: &Assignment, acc: &mut Acc) {
    let steps = sys.time_grid.num_steps();
    if !c.commitment.is_committed() {
        let eq = if c.capacity.per_period { 18 } else { 1 };
        for t in 0..steps {
            let pout = a.at(VarKind::Pout, &c.id, t);
            acc.record(
                eq,
                pout - c.capacity.availability.at(t) * installed(sys, c, a, t),
            );
            acc.record(eq, -pout);
        }
        if c.capacity.optimizable {
            if let Some(max) = c.capacity.max_installed {
                for t in 0..steps {
                    acc.record(6, installed(sys, c, a, t) - max);
                }
            }
        }
    }
    if c.capacity.optimizable && c.capacity.per_period && !c.commitment.is_committed() {
        for p in 1..sys.time_grid.num_periods() {
            let now = a.at(VarKind::PinstalledPeriod, &c.id, p);
            let before = a.at(VarKind::PinstalledPeriod, &c.id, p - 1);
            let built = a.at(VarKind::Pbuilt, &c.id, p);
            acc.record(19, now - before - built);
            if c.capacity.build_cost > 0.0 {
                acc.record(20, rel((built - (now - before).max(0.0)).abs(), built));
            }
        }
    }
}

fn field(sys: &EnergySystem, c: &Component, a: &Assignment, acc: &mut Acc) {
    let ConversionSpec::CharacteristicField { half_planes, .. } = &c.conversion else {
        return;
    };
    for t in 0..sys.time_grid.num_steps() {
        let pout = a.at(VarKind::Pout, &c.id, t);
        let sec = a.at(VarKind::PoutSecondary, &c.id, t);
        let mut first_upper = true;
        for h in half_planes {
            let line = h.slope * pout + h.intercept;
            match h.sense {
                Side::Le => {
                    acc.record(if first_upper { 8 } else { 9 }, sec - line);
                    first_upper = false;
                }
                Side::Ge => acc.record(10, line - sec),
            }
        }
    }
}

fn ramp(sys: &EnergySystem, c: &Component, a: &Assignment, acc: &mut Acc) {
    let g = &sys.time_grid;
    let mut max_rise: f64 = 0.0;
    let mut max_fall: f64 = 0.0;
    for t in 1..g.num_steps() {
        let rise = a.at(VarKind::Pout, &c.id, t) - a.at(VarKind::Pout, &c.id, t - 1);
        max_rise = max_rise.max(rise);
        max_fall = max_fall.max(-rise);
        match c.ramp {
            RampSpec::None => {}
            RampSpec::Fixed { up, down } => {
                let cap = installed(sys, c, a, t) * g.dt(t);
                acc.record(16, rise - up * cap);
                acc.record(17, -rise - down * cap);
            }
            RampSpec::Optimized { .. } => {
                acc.record(16, rise - a.scalar(VarKind::LcrUpVar, &c.id));
                acc.record(17, -rise - a.scalar(VarKind::LcrDownVar, &c.id));
            }
        }
    }
    if let RampSpec::Optimized { cost_up, cost_down } = c.ramp {
        for (cost, kind, need) in [
            (cost_up, VarKind::LcrUpVar, max_rise),
            (cost_down, VarKind::LcrDownVar, max_fall),
        ] {
            if cost > 0.0 {
                let v = a.scalar(kind, &c.id);
                acc.record(20, rel((v - need).abs(), v));
            }
        }
    }
}

fn commitment(sys: &EnergySystem, c: &Component, a: &Assignment, acc: &mut Acc) {
    let CommitmentSpec::UnitCommit {
        unit_capacity,
        unit_min_load,
        units,
        startup_cost,
        min_up_steps,
        min_down_steps,
        partial_load,
        ..
    } = &c.commitment
    else {
        return;
    };
    let steps = sys.time_grid.num_steps();
    // on-state at step t − lag, reading history before the horizon
    let on = |t: usize, lag: usize| -> f64 {
        if lag <= t {
            a.at(VarKind::On, &c.id, t - lag)
        } else {
            c.commitment.history(lag - t)
        }
    };
    let unit_limit = match units {
        UnitCount::Fixed(n) => *n as f64,
        UnitCount::Optimized { .. } => a.scalar(VarKind::Units, &c.id),
    };
    let mut most_on: f64 = 0.0;
    for t in 0..steps {
        let pout = a.at(VarKind::Pout, &c.id, t);
        let on_t = on(t, 0);
        let startup = a.at(VarKind::Startup, &c.id, t);
        most_on = most_on.max(on_t);
        acc.record(
            22,
            pout - on_t * unit_capacity * c.capacity.availability.at(t),
        );
        acc.record(23, on_t * unit_min_load - pout);
        acc.record(24, on_t - on(t, 1) - startup);
        if *startup_cost > 0.0 {
            acc.record(
                20,
                rel((startup - (on_t - on(t, 1)).max(0.0)).abs(), startup),
            );
        }
        acc.record(27, on_t - unit_limit);
        if *min_down_steps > 0 {
            let n = *min_down_steps as f64;
            let recent: f64 = (1..=*min_down_steps).map(|m| on(t, m)).sum();
            acc.record(28, (on_t - on(t, 1)) * n - (n - recent));
        }
        if *min_up_steps > 0 {
            let n = *min_up_steps as f64;
            let recent: f64 = (1..=*min_up_steps).map(|m| on(t, m)).sum();
            acc.record(29, (on(t, 1) - on_t) * n - recent);
        }
        if let Some(pl) = partial_load {
            if on_t > 0.5 {
                let draw = pl.slope * pout + pl.offset * on_t;
                let eta = pout / draw;
                acc.record(
                    26,
                    (eta * draw - pout).abs() + (eta - 1.0 / pl.slope).max(0.0),
                );
            }
        }
    }
    if let UnitCount::Optimized { .. } = units {
        let rate = super::costs::invest_rate(c) + c.costs.maintenance;
        if rate * unit_capacity > 0.0 {
            acc.record(20, (unit_limit - most_on).abs());
        }
    }
}

fn finance_terms(c: &Component, acc: &mut Acc) {
    if let Some(ann) = &c.costs.annuity {
        let direct = ann.total_investment * crf_direct(ann.interest_rate, ann.lifetime);
        acc.record(4, rel((direct - finance::annualize(ann)).abs(), direct));
    }
    if c.costs.invest_input_side > 0.0 {
        let eta = c.conversion.efficiency();
        let direct = c.costs.invest_input_side / eta + c.costs.invest_annualized;
        let via =
            finance::output_side_cost(c.costs.invest_input_side, eta, c.costs.invest_annualized);
        acc.record(5, rel((direct - via).abs(), direct));
    }
}

fn storage_tightness(
    sys: &EnergySystem,
    s: &crate::model::Storage,
    a: &Assignment,
    fill: &[f64],
    acc: &mut Acc,
) {
    let steps = sys.time_grid.num_steps();
    let max_of = |kind: VarKind| (0..steps).map(|t| a.at(kind, &s.id, t)).fold(0.0, f64::max);
    if let RateMode::Optimized {
        cost_charge,
        cost_discharge,
    } = s.rate
    {
        for (cost, limit, flow) in [
            (cost_charge, VarKind::PmaxchargeVar, VarKind::Pcharge),
            (
                cost_discharge,
                VarKind::PmaxdischargeVar,
                VarKind::Pdischarge,
            ),
        ] {
            if cost > 0.0 {
                let v = a.scalar(limit, &s.id);
                acc.record(20, rel((v - max_of(flow)).abs(), v));
            }
        }
    }
    if s.capacity_optimizable && s.capacity_cost > 0.0 {
        let mut need = fill.iter().copied().fold(0.0, f64::max);
        if let RateMode::CRateLinked { c_rate } = s.rate {
            need = need
                .max(c_rate * max_of(VarKind::Pcharge))
                .max(c_rate * max_of(VarKind::Pdischarge));
        }
        let v = a.scalar(VarKind::CapacityVar, &s.id);
        acc.record(20, rel((v - (need - s.capacity_fixed).max(0.0)).abs(), v));
    }
}
