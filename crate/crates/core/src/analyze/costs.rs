use serde::Serialize;

use super::{input_draw, Assignment};
use crate::lp::VarKind;
use crate::model::{
    CommitmentSpec, Component, EnergySystem, RampSpec, RateMode, UnitCount, HOURS_PER_YEAR,
};

/// Objective split by cost source, in €.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct CostBreakdown {
    pub fuel: f64,
    pub emission: f64,
    pub invest: f64,
    pub maintenance: f64,
    pub build: f64,
    pub startup: f64,
    pub storage: f64,
    pub ramp: f64,
}

impl CostBreakdown {
    pub fn total(&self) -> f64 {
        self.fuel
            + self.emission
            + self.invest
            + self.maintenance
            + self.build
            + self.startup
            + self.storage
            + self.ramp
    }

    pub fn entries(&self) -> [(&'static str, f64); 8] {
        [
            ("fuel", self.fuel),
            ("emission", self.emission),
            ("invest", self.invest),
            ("maintenance", self.maintenance),
            ("build", self.build),
            ("startup", self.startup),
            ("storage", self.storage),
            ("ramp", self.ramp),
        ]
    }
}

/// `(1+i)^n · i / ((1+i)^n − 1)`, with the `i → 0` limit `1/n`.
pub(crate) fn crf_direct(i: f64, n: u32) -> f64 {
    if i == 0.0 {
        return 1.0 / n as f64;
    }
    let g = (1.0 + i).powf(n as f64);
    g * i / (g - 1.0)
}

/// Output-side investment per MW·a as written: `cinput/η + coutput`, plus the annuity.
pub(crate) fn invest_rate(c: &Component) -> f64 {
    let mut inv = c.costs.invest_input_side / c.conversion.efficiency() + c.costs.invest_annualized;
    if let Some(a) = &c.costs.annuity {
        inv += a.total_investment * crf_direct(a.interest_rate, a.lifetime);
    }
    inv
}

fn horizon_factor(sys: &EnergySystem) -> f64 {
    if sys.scale_annual_costs {
        sys.time_grid.step_durations.iter().sum::<f64>() / HOURS_PER_YEAR
    } else {
        1.0
    }
}

/// Optimised capacity of `c` weighted by the share of the cost horizon it is held for.
fn weighted_added_capacity(sys: &EnergySystem, c: &Component, a: &Assignment) -> f64 {
    let h = horizon_factor(sys);
    match &c.commitment {
        CommitmentSpec::UnitCommit {
            unit_capacity,
            units: UnitCount::Optimized { .. },
            ..
        } => a.scalar(VarKind::Units, &c.id) * unit_capacity * h,
        CommitmentSpec::UnitCommit { .. } => 0.0,
        CommitmentSpec::None if !c.capacity.optimizable => 0.0,
        CommitmentSpec::None if c.capacity.per_period => {
            let g = &sys.time_grid;
            let total: f64 = g.step_durations.iter().sum();
            (0..g.num_steps())
                .map(|t| a.at(VarKind::PinstalledPeriod, &c.id, g.period(t)) * g.dt(t) / total * h)
                .sum()
        }
        CommitmentSpec::None => a.scalar(VarKind::Pinstalled, &c.id) * h,
    }
}

/// Recomputes every objective term from the system's cost data.
pub fn cost_breakdown(sys: &EnergySystem, a: &Assignment) -> CostBreakdown {
    let mut b = CostBreakdown::default();
    let g = &sys.time_grid;
    let h = horizon_factor(sys);
    for c in &sys.components {
        let price = c.costs.emission_price.unwrap_or(0.0);
        for t in 0..g.num_steps() {
            let energy_in = input_draw(c, a, t) * g.dt(t);
            b.fuel += energy_in * c.costs.fuel.at(t);
            b.emission += energy_in * c.costs.emission_factor * price;
        }
        let added = weighted_added_capacity(sys, c, a);
        b.invest += added * invest_rate(c);
        b.maintenance += added * c.costs.maintenance;
        for p in 1..g.num_periods() {
            b.build += a.at(VarKind::Pbuilt, &c.id, p) * c.capacity.build_cost;
        }
        if let CommitmentSpec::UnitCommit { startup_cost, .. } = &c.commitment {
            b.startup += (0..g.num_steps())
                .map(|t| a.at(VarKind::Startup, &c.id, t))
                .sum::<f64>()
                * startup_cost;
        }
        if let RampSpec::Optimized { cost_up, cost_down } = c.ramp {
            b.ramp += a.scalar(VarKind::LcrUpVar, &c.id) * cost_up
                + a.scalar(VarKind::LcrDownVar, &c.id) * cost_down;
        }
    }
    for s in &sys.storages {
        b.storage += a.scalar(VarKind::CapacityVar, &s.id) * s.capacity_cost * h;
        if let RateMode::Optimized {
            cost_charge,
            cost_discharge,
        } = s.rate
        {
            b.storage += (a.scalar(VarKind::PmaxchargeVar, &s.id) * cost_charge
                + a.scalar(VarKind::PmaxdischargeVar, &s.id) * cost_discharge)
                * h;
        }
    }
    b
}
