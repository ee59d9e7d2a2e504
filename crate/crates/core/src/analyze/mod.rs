//! Maps solutions back to the energy system.
//!
//! Everything here evaluates the system's own data against decoded variable
//! values; none of it reuses the compiler's rows or coefficients, so a
//! compiler bug shows up as a residual instead of being repeated.

mod costs;
mod verify;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::lp::{LinearProgram, VarKind, VarRef};
use crate::model::{
    CommitmentSpec, Component, ConversionSpec, EnergySystem, RateMode, Storage, UnitCount,
};
use crate::solver::{Solution, SolveStatus};

pub use costs::{cost_breakdown, CostBreakdown};
pub use verify::{verify_solution, FamilyResidual, ResidualReport};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum AnalyzeError {
    #[error("NO_SOLUTION: solver finished with status {0:?} and no incumbent")]
    NoSolution(SolveStatus),
}

/// Decoded variable values keyed by name; absent variables read as zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assignment {
    pub values: BTreeMap<VarRef, f64>,
    pub objective: f64,
}

impl Assignment {
    pub fn decode(prog: &LinearProgram, sol: &Solution) -> Result<Assignment, AnalyzeError> {
        if !sol.status.has_values() || sol.values.len() != prog.num_vars() {
            return Err(AnalyzeError::NoSolution(sol.status));
        }
        let values = prog
            .vars
            .iter()
            .zip(&sol.values)
            .map(|(v, &x)| (v.name.clone(), x + 0.0))
            .collect();
        Ok(Assignment {
            values,
            objective: sol.objective,
        })
    }

    pub fn get(&self, kind: VarKind, owner: &str, index: Option<usize>) -> f64 {
        self.values
            .get(&VarRef::new(kind, owner, index))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn at(&self, kind: VarKind, owner: &str, t: usize) -> f64 {
        self.get(kind, owner, Some(t))
    }

    pub fn scalar(&self, kind: VarKind, owner: &str) -> f64 {
        self.get(kind, owner, None)
    }

    pub fn set(&mut self, name: VarRef, value: f64) {
        self.values.insert(name, value);
    }
}

/// Input drawn by `c` at step `t`.
pub(crate) fn input_draw(c: &Component, a: &Assignment, t: usize) -> f64 {
    let pout = a.at(VarKind::Pout, &c.id, t);
    match c.commitment.partial_load() {
        Some(pl) => pl.slope * pout + pl.offset * a.at(VarKind::On, &c.id, t),
        None => pout / c.conversion.efficiency(),
    }
}

/// Secondary output of a multi-output component at step `t`.
pub(crate) fn secondary_output(c: &Component, a: &Assignment, t: usize) -> Option<f64> {
    match &c.conversion {
        ConversionSpec::FixedRatioCoupled {
            eta_primary,
            eta_secondary,
            ..
        } => Some(a.at(VarKind::Pout, &c.id, t) * eta_secondary / eta_primary),
        ConversionSpec::CharacteristicField { .. } => Some(a.at(VarKind::PoutSecondary, &c.id, t)),
        _ => None,
    }
}

/// Total installed capacity of `c` during step `t`.
pub(crate) fn installed(sys: &EnergySystem, c: &Component, a: &Assignment, t: usize) -> f64 {
    match &c.commitment {
        CommitmentSpec::UnitCommit {
            unit_capacity,
            units,
            ..
        } => {
            let n = match units {
                UnitCount::Fixed(n) => *n as f64,
                UnitCount::Optimized { .. } => a.scalar(VarKind::Units, &c.id),
            };
            n * unit_capacity
        }
        CommitmentSpec::None => {
            let added = if !c.capacity.optimizable {
                0.0
            } else if c.capacity.per_period {
                a.at(VarKind::PinstalledPeriod, &c.id, sys.time_grid.period(t))
            } else {
                a.scalar(VarKind::Pinstalled, &c.id)
            };
            c.capacity.initial_installed + added
        }
    }
}

pub(crate) fn storage_capacity(s: &Storage, a: &Assignment) -> f64 {
    s.capacity_fixed + a.scalar(VarKind::CapacityVar, &s.id)
}

/// Fill level after each step, by summing net inflows from the initial fill.
pub fn fill_levels(sys: &EnergySystem, s: &Storage, a: &Assignment) -> Vec<f64> {
    let mut level = s.initial_fill;
    (0..sys.time_grid.num_steps())
        .map(|t| {
            let dt = sys.time_grid.dt(t);
            level += a.at(VarKind::Pcharge, &s.id, t) * s.charge_eff * dt;
            level -= a.at(VarKind::Pdischarge, &s.id, t) * dt / s.discharge_eff;
            level
        })
        .collect()
}

/// Total emissions in kg: `Σ input · factor · Δt`.
pub fn emissions_total(sys: &EnergySystem, a: &Assignment) -> f64 {
    let mut kg = 0.0;
    for c in &sys.components {
        if c.costs.emission_factor == 0.0 {
            continue;
        }
        for t in 0..sys.time_grid.num_steps() {
            kg += input_draw(c, a, t) * c.costs.emission_factor * sys.time_grid.dt(t);
        }
    }
    kg
}

/// Realised efficiency `Pout / (p · Pout + o)` of one running unit.
pub fn partial_load_efficiency(slope: f64, offset: f64, pout: f64) -> f64 {
    pout / (slope * pout + offset)
}

/// Efficiency per step of a partial-load component; `None` while off.
pub fn efficiency_series(
    sys: &EnergySystem,
    c: &Component,
    a: &Assignment,
) -> Option<Vec<Option<f64>>> {
    let pl = c.commitment.partial_load()?;
    Some(
        (0..sys.time_grid.num_steps())
            .map(|t| {
                let on = a.at(VarKind::On, &c.id, t);
                let pout = a.at(VarKind::Pout, &c.id, t);
                (on > 0.5).then(|| pout / (pl.slope * pout + pl.offset * on))
            })
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StorageSeries {
    pub charge: Vec<f64>,
    pub discharge: Vec<f64>,
    pub fill: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstalledCapacity {
    pub id: String,
    /// MW for components, MWh for storages.
    pub total: f64,
    /// Per building period, when capacity is decided per period.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub per_period: Vec<f64>,
}

/// Operating statistics of one component.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentStats {
    pub id: String,
    /// Energy produced over energy producible at installed capacity.
    pub capacity_factor: Option<f64>,
    pub mean_output: f64,
    pub output_std_dev: f64,
    /// Smallest `available · installed − Pout` over the horizon.
    pub min_headroom: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub status: SolveStatus,
    pub objective: f64,
    pub bound: f64,
    pub gap: f64,
    pub iterations: usize,
    pub nodes: usize,
    pub schedules: BTreeMap<String, Vec<f64>>,
    pub secondary_outputs: BTreeMap<String, Vec<f64>>,
    pub units_on: BTreeMap<String, Vec<f64>>,
    pub storages: BTreeMap<String, StorageSeries>,
    /// Components then storages, in system order.
    pub installed: Vec<InstalledCapacity>,
    pub costs: CostBreakdown,
    pub emissions_kg: f64,
    pub efficiencies: BTreeMap<String, Vec<Option<f64>>>,
    pub statistics: Vec<ComponentStats>,
    pub verification: ResidualReport,
}

/// Residual threshold used by [`extract_report`].
pub const VERIFY_TOL: f64 = 1e-6;

pub fn extract_report(
    sys: &EnergySystem,
    prog: &LinearProgram,
    sol: &Solution,
) -> Result<RunReport, AnalyzeError> {
    let a = Assignment::decode(prog, sol)?;
    let steps = sys.time_grid.num_steps();
    let periods = sys.time_grid.num_periods();

    let mut schedules = BTreeMap::new();
    let mut secondary_outputs = BTreeMap::new();
    let mut units_on = BTreeMap::new();
    let mut efficiencies = BTreeMap::new();
    let mut installed_list = Vec::new();
    let mut statistics = Vec::new();
    for c in &sys.components {
        let pout: Vec<f64> = (0..steps).map(|t| a.at(VarKind::Pout, &c.id, t)).collect();
        if c.conversion.secondary_output().is_some() {
            let sec = (0..steps)
                .map(|t| secondary_output(c, &a, t).unwrap_or(0.0))
                .collect();
            secondary_outputs.insert(c.id.clone(), sec);
        }
        if c.commitment.is_committed() {
            units_on.insert(
                c.id.clone(),
                (0..steps).map(|t| a.at(VarKind::On, &c.id, t)).collect(),
            );
        }
        if let Some(eff) = efficiency_series(sys, c, &a) {
            efficiencies.insert(c.id.clone(), eff);
        }
        let per_period = if c.capacity.per_period
            && c.capacity.optimizable
            && !c.commitment.is_committed()
        {
            (0..periods)
                .map(|p| c.capacity.initial_installed + a.at(VarKind::PinstalledPeriod, &c.id, p))
                .collect()
        } else {
            Vec::new()
        };
        let total = if steps > 0 {
            installed(sys, c, &a, steps - 1)
        } else {
            0.0
        };
        installed_list.push(InstalledCapacity {
            id: c.id.clone(),
            total,
            per_period,
        });
        statistics.push(component_stats(sys, c, &a, &pout));
        schedules.insert(c.id.clone(), pout);
    }
    let mut storages = BTreeMap::new();
    for s in &sys.storages {
        let series = StorageSeries {
            charge: (0..steps)
                .map(|t| a.at(VarKind::Pcharge, &s.id, t))
                .collect(),
            discharge: (0..steps)
                .map(|t| a.at(VarKind::Pdischarge, &s.id, t))
                .collect(),
            fill: fill_levels(sys, s, &a),
        };
        storages.insert(s.id.clone(), series);
        installed_list.push(InstalledCapacity {
            id: s.id.clone(),
            total: storage_capacity(s, &a),
            per_period: Vec::new(),
        });
    }

    Ok(RunReport {
        status: sol.status,
        objective: sol.objective,
        bound: sol.bound,
        gap: sol.gap,
        iterations: sol.stats.iterations,
        nodes: sol.stats.nodes,
        schedules,
        secondary_outputs,
        units_on,
        storages,
        installed: installed_list,
        costs: cost_breakdown(sys, &a),
        emissions_kg: emissions_total(sys, &a),
        efficiencies,
        statistics,
        verification: verify_solution(sys, &a, VERIFY_TOL),
    })
}

fn component_stats(
    sys: &EnergySystem,
    c: &Component,
    a: &Assignment,
    pout: &[f64],
) -> ComponentStats {
    let g = &sys.time_grid;
    let hours = g.total_hours();
    let energy: f64 = pout.iter().enumerate().map(|(t, p)| p * g.dt(t)).sum();
    let producible: f64 = (0..g.num_steps())
        .map(|t| installed(sys, c, a, t) * g.dt(t))
        .sum();
    let mean = if hours > 0.0 { energy / hours } else { 0.0 };
    let var = if hours > 0.0 {
        pout.iter()
            .enumerate()
            .map(|(t, p)| (p - mean).powi(2) * g.dt(t))
            .sum::<f64>()
            / hours
    } else {
        0.0
    };
    let min_headroom = (0..g.num_steps())
        .map(|t| c.capacity.availability.at(t) * installed(sys, c, a, t) - pout[t])
        .fold(f64::INFINITY, f64::min);
    ComponentStats {
        id: c.id.clone(),
        capacity_factor: (producible > 0.0).then(|| energy / producible),
        mean_output: mean,
        output_std_dev: var.sqrt(),
        min_headroom,
    }
}

/// Power limits of a storage during one step, as (charge, discharge).
pub(crate) fn storage_rate_limits(s: &Storage, a: &Assignment) -> (f64, f64) {
    match s.rate {
        RateMode::Fixed {
            max_charge,
            max_discharge,
        } => (max_charge, max_discharge),
        RateMode::CRateLinked { c_rate } => {
            let cap = storage_capacity(s, a);
            (cap / c_rate, cap / c_rate)
        }
        RateMode::Optimized { .. } => (
            a.scalar(VarKind::PmaxchargeVar, &s.id),
            a.scalar(VarKind::PmaxdischargeVar, &s.id),
        ),
    }
}
