//! The energy-system graph: carrier nodes, conversion components and
//! storages over a time grid.
//!
//! Every flow variable measures the output side of its component; a
//! component draws `Pout / η` from its input node. Node balances count
//! production positively and consumption negatively.

mod validate;

use serde::{Deserialize, Serialize};

use crate::finance::AnnuityInput;

pub use validate::{validate_system, Severity, ValidationReport, Violation, VIOLATION_CODES};

/// Hours in a (non-leap) year; annualised costs are scaled against it.
pub const HOURS_PER_YEAR: f64 = 8760.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    /// Δt per step in hours.
    pub step_durations: Vec<f64>,
    /// Building period of each step; empty means a single period.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub period_of_step: Vec<usize>,
}

impl TimeGrid {
    pub fn hourly(steps: usize) -> Self {
        TimeGrid {
            step_durations: vec![1.0; steps],
            period_of_step: Vec::new(),
        }
    }

    pub fn num_steps(&self) -> usize {
        self.step_durations.len()
    }

    pub fn dt(&self, t: usize) -> f64 {
        self.step_durations[t]
    }

    pub fn period(&self, t: usize) -> usize {
        self.period_of_step.get(t).copied().unwrap_or(0)
    }

    pub fn num_periods(&self) -> usize {
        self.period_of_step.iter().max().map_or(1, |p| p + 1)
    }

    pub fn total_hours(&self) -> f64 {
        self.step_durations.iter().sum()
    }

    pub fn period_hours(&self, p: usize) -> f64 {
        (0..self.num_steps())
            .filter(|&t| self.period(t) == p)
            .map(|t| self.dt(t))
            .sum()
    }
}

/// A per-step quantity given either as one value for every step or as a series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Profile {
    Constant(f64),
    Series(Vec<f64>),
}

impl Profile {
    pub fn at(&self, t: usize) -> f64 {
        match self {
            Profile::Constant(v) => *v,
            Profile::Series(s) => s[t],
        }
    }

    pub fn series_len(&self) -> Option<usize> {
        match self {
            Profile::Constant(_) => None,
            Profile::Series(s) => Some(s.len()),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            Profile::Constant(v) => vec![*v],
            Profile::Series(s) => s.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Profile::Constant(v) => *v == 0.0,
            Profile::Series(s) => s.iter().all(|&v| v == 0.0),
        }
    }
}

fn zero() -> Profile {
    Profile::Constant(0.0)
}

fn one() -> Profile {
    Profile::Constant(1.0)
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    #[serde(default)]
    pub carrier: String,
    /// Boundary nodes (fuel markets, the sun) carry no balance row.
    #[serde(default)]
    pub boundary: bool,
    #[serde(default = "zero")]
    pub load: Profile,
}

impl Node {
    /// Balanced node whose carrier is its lower-cased id.
    pub fn demand(id: &str, load: Profile) -> Self {
        Node {
            id: id.to_string(),
            carrier: id.to_lowercase(),
            boundary: false,
            load,
        }
    }

    pub fn boundary(id: &str) -> Self {
        Node {
            boundary: true,
            ..Node::demand(id, Profile::Constant(0.0))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Secondary output at most `a · primary + b`.
    Le,
    /// Secondary output at least `a · primary + b`.
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane {
    pub slope: f64,
    pub intercept: f64,
    pub sense: Side,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConversionSpec {
    Single {
        input: String,
        output: String,
        efficiency: f64,
    },
    SourceOnly {
        output: String,
    },
    FixedRatioCoupled {
        input: String,
        primary_output: String,
        secondary_output: String,
        eta_primary: f64,
        eta_secondary: f64,
    },
    CharacteristicField {
        input: String,
        primary_output: String,
        secondary_output: String,
        eta_primary: f64,
        half_planes: Vec<HalfPlane>,
    },
}

impl ConversionSpec {
    pub fn input(&self) -> Option<&str> {
        match self {
            ConversionSpec::Single { input, .. }
            | ConversionSpec::FixedRatioCoupled { input, .. }
            | ConversionSpec::CharacteristicField { input, .. } => Some(input),
            ConversionSpec::SourceOnly { .. } => None,
        }
    }

    pub fn output(&self) -> &str {
        match self {
            ConversionSpec::Single { output, .. } | ConversionSpec::SourceOnly { output } => output,
            ConversionSpec::FixedRatioCoupled { primary_output, .. }
            | ConversionSpec::CharacteristicField { primary_output, .. } => primary_output,
        }
    }

    pub fn secondary_output(&self) -> Option<&str> {
        match self {
            ConversionSpec::FixedRatioCoupled {
                secondary_output, ..
            }
            | ConversionSpec::CharacteristicField {
                secondary_output, ..
            } => Some(secondary_output),
            _ => None,
        }
    }

    /// Efficiency relating the primary output to the input draw.
    pub fn efficiency(&self) -> f64 {
        match self {
            ConversionSpec::Single { efficiency, .. } => *efficiency,
            ConversionSpec::SourceOnly { .. } => 1.0,
            ConversionSpec::FixedRatioCoupled { eta_primary, .. }
            | ConversionSpec::CharacteristicField { eta_primary, .. } => *eta_primary,
        }
    }

    /// Secondary output per unit of primary output, for coupled components.
    pub fn coupling_ratio(&self) -> Option<f64> {
        match self {
            ConversionSpec::FixedRatioCoupled {
                eta_primary,
                eta_secondary,
                ..
            } => Some(eta_secondary / eta_primary),
            _ => None,
        }
    }

    pub fn nodes(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.input().into_iter().collect();
        v.push(self.output());
        v.extend(self.secondary_output());
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacitySpec {
    #[serde(default)]
    pub initial_installed: f64,
    #[serde(default)]
    pub optimizable: bool,
    /// Upper limit on total installed capacity; absent means unbounded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_installed: Option<f64>,
    #[serde(default = "one")]
    pub availability: Profile,
    /// One installed-capacity decision per building period.
    #[serde(default)]
    pub per_period: bool,
    /// One-off cost per MW added between consecutive building periods.
    #[serde(default)]
    pub build_cost: f64,
}

impl Default for CapacitySpec {
    fn default() -> Self {
        CapacitySpec {
            initial_installed: 0.0,
            optimizable: false,
            max_installed: None,
            availability: one(),
            per_period: false,
            build_cost: 0.0,
        }
    }
}

impl CapacitySpec {
    /// Fixed existing capacity of `mw`.
    pub fn fixed(mw: f64) -> Self {
        CapacitySpec {
            initial_installed: mw,
            ..Self::default()
        }
    }

    /// Capacity optimised from zero, up to `max` when given.
    pub fn optimized(max: Option<f64>) -> Self {
        CapacitySpec {
            optimizable: true,
            max_installed: max,
            ..Self::default()
        }
    }

    /// Upper bound of the optimised share on top of the initial capacity.
    pub fn expansion_limit(&self) -> f64 {
        self.max_installed
            .map_or(f64::INFINITY, |m| (m - self.initial_installed).max(0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RampSpec {
    #[default]
    None,
    /// Per-hour fractions of installed capacity.
    Fixed { up: f64, down: f64 },
    /// Costed load-change-rate decisions, €/MW.
    Optimized { cost_up: f64, cost_down: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitCount {
    Fixed(u32),
    Optimized { max: u32 },
}

impl UnitCount {
    pub fn max(self) -> u32 {
        match self {
            UnitCount::Fixed(n) => n,
            UnitCount::Optimized { max } => max,
        }
    }
}

/// Partial-load input model: input draw is `p · Pout + o · on`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialLoad {
    pub slope: f64,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CommitmentSpec {
    #[default]
    None,
    UnitCommit {
        unit_capacity: f64,
        #[serde(default)]
        unit_min_load: f64,
        units: UnitCount,
        #[serde(default)]
        startup_cost: f64,
        #[serde(default)]
        min_up_steps: usize,
        #[serde(default)]
        min_down_steps: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        partial_load: Option<PartialLoad>,
        /// On-states before the first step, oldest first; missing steps are off.
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        pre_horizon_on: Vec<u32>,
    },
}

impl CommitmentSpec {
    pub fn is_committed(&self) -> bool {
        !matches!(self, CommitmentSpec::None)
    }

    pub fn partial_load(&self) -> Option<PartialLoad> {
        match self {
            CommitmentSpec::UnitCommit { partial_load, .. } => *partial_load,
            CommitmentSpec::None => None,
        }
    }

    /// On-state `k` steps before the first step (`k ≥ 1`).
    pub fn history(&self, k: usize) -> f64 {
        match self {
            CommitmentSpec::UnitCommit { pre_horizon_on, .. } if k <= pre_horizon_on.len() => {
                pre_horizon_on[pre_horizon_on.len() - k] as f64
            }
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostSpec {
    /// Annualised investment per MW of output, €/MW·a.
    #[serde(default)]
    pub invest_annualized: f64,
    /// Annualised investment quoted per MW of input, €/MW·a.
    #[serde(default)]
    pub invest_input_side: f64,
    /// Lump-sum investment converted to an annuity and added to the output-side cost.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annuity: Option<AnnuityInput>,
    #[serde(default)]
    pub maintenance: f64,
    /// €/MWh of input.
    #[serde(default = "zero")]
    pub fuel: Profile,
    /// kg CO2 per MWh of input.
    #[serde(default)]
    pub emission_factor: f64,
    /// €/kg CO2, charged in the objective when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emission_price: Option<f64>,
}

impl Default for CostSpec {
    fn default() -> Self {
        CostSpec {
            invest_annualized: 0.0,
            invest_input_side: 0.0,
            annuity: None,
            maintenance: 0.0,
            fuel: zero(),
            emission_factor: 0.0,
            emission_price: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub id: String,
    pub conversion: ConversionSpec,
    #[serde(default)]
    pub capacity: CapacitySpec,
    #[serde(default)]
    pub ramp: RampSpec,
    #[serde(default)]
    pub commitment: CommitmentSpec,
    #[serde(default)]
    pub costs: CostSpec,
}

impl Component {
    pub fn new(id: &str, conversion: ConversionSpec) -> Self {
        Component {
            id: id.to_string(),
            conversion,
            capacity: CapacitySpec::default(),
            ramp: RampSpec::None,
            commitment: CommitmentSpec::None,
            costs: CostSpec::default(),
        }
    }

    pub fn single(id: &str, input: &str, output: &str, efficiency: f64) -> Self {
        Component::new(
            id,
            ConversionSpec::Single {
                input: input.to_string(),
                output: output.to_string(),
                efficiency,
            },
        )
    }

    pub fn source(id: &str, output: &str) -> Self {
        Component::new(
            id,
            ConversionSpec::SourceOnly {
                output: output.to_string(),
            },
        )
    }

    /// Input drawn per MW of primary output, ignoring any partial-load model.
    pub fn input_per_output(&self) -> f64 {
        1.0 / self.conversion.efficiency()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RateMode {
    Fixed {
        max_charge: f64,
        max_discharge: f64,
    },
    /// Power limits equal energy capacity divided by `c_rate`.
    CRateLinked {
        c_rate: f64,
    },
    /// Costed power-limit decisions, €/MW·a.
    Optimized {
        cost_charge: f64,
        cost_discharge: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Storage {
    pub id: String,
    pub node: String,
    #[serde(default)]
    pub initial_fill: f64,
    #[serde(default)]
    pub capacity_fixed: f64,
    #[serde(default)]
    pub capacity_optimizable: bool,
    /// €/MWh·a on the optimised capacity.
    #[serde(default)]
    pub capacity_cost: f64,
    /// Upper limit on total capacity; absent means unbounded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_capacity: Option<f64>,
    pub charge_eff: f64,
    pub discharge_eff: f64,
    pub rate: RateMode,
    /// Require the final fill to be at least the initial fill.
    #[serde(default)]
    pub final_fill_at_least_initial: bool,
}

impl Storage {
    /// Lossless, empty and not expandable.
    pub fn new(id: &str, node: &str, rate: RateMode) -> Self {
        Storage {
            id: id.to_string(),
            node: node.to_string(),
            initial_fill: 0.0,
            capacity_fixed: 0.0,
            capacity_optimizable: false,
            capacity_cost: 0.0,
            max_capacity: None,
            charge_eff: 1.0,
            discharge_eff: 1.0,
            rate,
            final_fill_at_least_initial: false,
        }
    }

    pub fn expansion_limit(&self) -> f64 {
        self.max_capacity
            .map_or(f64::INFINITY, |m| (m - self.capacity_fixed).max(0.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySystem {
    pub time_grid: TimeGrid,
    pub nodes: Vec<Node>,
    #[serde(default)]
    pub components: Vec<Component>,
    #[serde(default)]
    pub storages: Vec<Storage>,
    /// Total emissions limit in kg; absent means no limit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub co2_cap: Option<f64>,
    /// Scale annualised costs by horizon hours over a year.
    #[serde(default = "yes")]
    pub scale_annual_costs: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Dimensions {
    pub steps: usize,
    pub nodes: usize,
    pub components: usize,
    pub storages: usize,
    pub periods: usize,
}

impl EnergySystem {
    pub fn new(time_grid: TimeGrid) -> Self {
        EnergySystem {
            time_grid,
            nodes: Vec::new(),
            components: Vec::new(),
            storages: Vec::new(),
            co2_cap: None,
            scale_annual_costs: true,
        }
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn component(&self, id: &str) -> Option<&Component> {
        self.components.iter().find(|c| c.id == id)
    }

    pub fn storage(&self, id: &str) -> Option<&Storage> {
        self.storages.iter().find(|s| s.id == id)
    }

    pub fn is_balanced(&self, node: &str) -> bool {
        self.node(node).is_some_and(|n| !n.boundary)
    }

    /// Factor applied to €/·a costs for the whole horizon.
    pub fn annual_scale(&self) -> f64 {
        if self.scale_annual_costs {
            self.time_grid.total_hours() / HOURS_PER_YEAR
        } else {
            1.0
        }
    }

    /// Share of the horizon's annual-cost factor that falls into period `p`.
    pub fn period_scale(&self, p: usize) -> f64 {
        let total = self.time_grid.total_hours();
        if total == 0.0 {
            0.0
        } else {
            self.annual_scale() * self.time_grid.period_hours(p) / total
        }
    }
}

pub fn system_dimensions(sys: &EnergySystem) -> Dimensions {
    Dimensions {
        steps: sys.time_grid.num_steps(),
        nodes: sys.nodes.len(),
        components: sys.components.len(),
        storages: sys.storages.len(),
        periods: sys.time_grid.num_periods(),
    }
}
