use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use super::{
    CommitmentSpec, Component, ConversionSpec, EnergySystem, Profile, RampSpec, RateMode, Side,
    Storage,
};

/// Every code [`validate_system`] can emit.
pub const VIOLATION_CODES: &[&str] = &[
    "EMPTY_GRID",
    "STEP_DURATION",
    "PERIOD_INDEX",
    "SERIES_LENGTH",
    "DUPLICATE_ID",
    "UNKNOWN_NODE",
    "SELF_LOOP",
    "EFFICIENCY",
    "FIELD_SHAPE",
    "AVAILABILITY_RANGE",
    "CAPACITY_ORDER",
    "NEGATIVE_VALUE",
    "NOT_FINITE",
    "UNIT_LOAD",
    "BINARY_REQUIRED",
    "PARTIAL_LOAD",
    "COMMITMENT_CAPACITY",
    "UNIT_HISTORY",
    "FILL_EXCEEDS_CAPACITY",
    "STORAGE_EFFICIENCY",
    "C_RATE",
    "STORAGE_AT_BOUNDARY",
    "ANNUITY",
    "DEGENERATE",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub code: &'static str,
    pub severity: Severity,
    /// Field path into the scenario, e.g. `components.pv.capacity.availability[7]`.
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev} {} at {}: {}", self.code, self.path, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    /// True when no violation is an error; warnings do not block compilation.
    pub fn is_valid(&self) -> bool {
        self.errors().next().is_none()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(|v| v.severity == Severity::Error)
    }

    pub fn has(&self, code: &str) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }

    fn error(&mut self, code: &'static str, path: String, message: String) {
        self.violations.push(Violation {
            code,
            severity: Severity::Error,
            path,
            message,
        });
    }

    fn warn(&mut self, code: &'static str, path: String, message: String) {
        self.violations.push(Violation {
            code,
            severity: Severity::Warning,
            path,
            message,
        });
    }

    fn nonneg(&mut self, path: String, v: f64) {
        if !v.is_finite() {
            self.error("NOT_FINITE", path, format!("value {v} is not finite"));
        } else if v < 0.0 {
            self.error(
                "NEGATIVE_VALUE",
                path,
                format!("value {v} must be non-negative"),
            );
        }
    }

    fn series(&mut self, path: &str, p: &Profile, steps: usize) -> bool {
        if let Some(len) = p.series_len() {
            if len != steps {
                self.error(
                    "SERIES_LENGTH",
                    path.to_string(),
                    format!("series has {len} values, time grid has {steps} steps"),
                );
                return false;
            }
        }
        for (t, v) in p.values().into_iter().enumerate() {
            if !v.is_finite() {
                self.error(
                    "NOT_FINITE",
                    index_path(path, p, t),
                    format!("value {v} is not finite"),
                );
            }
        }
        true
    }
}

fn index_path(path: &str, p: &Profile, t: usize) -> String {
    match p {
        Profile::Constant(_) => path.to_string(),
        Profile::Series(_) => format!("{path}[{t}]"),
    }
}

/// Lists every invariant violation of `sys`; an empty report means valid.
pub fn validate_system(sys: &EnergySystem) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let steps = sys.time_grid.num_steps();
    check_grid(sys, &mut rep);

    let mut node_ids = HashSet::new();
    for (k, n) in sys.nodes.iter().enumerate() {
        if !node_ids.insert(n.id.as_str()) {
            rep.error(
                "DUPLICATE_ID",
                format!("nodes[{k}].id"),
                format!("node id '{}' repeated", n.id),
            );
        }
        rep.series(&format!("nodes.{}.load", n.id), &n.load, steps);
    }

    let mut ids = HashSet::new();
    for c in &sys.components {
        if !ids.insert(c.id.as_str()) {
            rep.error(
                "DUPLICATE_ID",
                format!("components.{}.id", c.id),
                format!("id '{}' repeated", c.id),
            );
        }
        check_component(sys, c, &mut rep);
    }
    for s in &sys.storages {
        if !ids.insert(s.id.as_str()) {
            rep.error(
                "DUPLICATE_ID",
                format!("storages.{}.id", s.id),
                format!("id '{}' repeated", s.id),
            );
        }
        check_storage(sys, s, &mut rep);
    }

    if let Some(cap) = sys.co2_cap {
        rep.nonneg("co2_cap".into(), cap);
    }

    let any_load = sys.nodes.iter().any(|n| !n.boundary && !n.load.is_zero());
    if !any_load {
        rep.warn(
            "DEGENERATE",
            "nodes".into(),
            "no balanced node has a nonzero load; the optimum is trivially zero activity".into(),
        );
    }
    rep
}

fn check_grid(sys: &EnergySystem, rep: &mut ValidationReport) {
    let g = &sys.time_grid;
    if g.num_steps() == 0 {
        rep.error(
            "EMPTY_GRID",
            "time_grid.step_durations".into(),
            "at least one step required".into(),
        );
    }
    for (t, &dt) in g.step_durations.iter().enumerate() {
        if !(dt.is_finite() && dt > 0.0) {
            rep.error(
                "STEP_DURATION",
                format!("time_grid.step_durations[{t}]"),
                format!("step duration {dt} must be positive"),
            );
        }
    }
    if g.period_of_step.is_empty() {
        return;
    }
    if g.period_of_step.len() != g.num_steps() {
        rep.error(
            "SERIES_LENGTH",
            "time_grid.period_of_step".into(),
            format!(
                "period map has {} entries, time grid has {} steps",
                g.period_of_step.len(),
                g.num_steps()
            ),
        );
        return;
    }
    let mut prev = 0usize;
    for (t, &p) in g.period_of_step.iter().enumerate() {
        let ok = if t == 0 {
            p == 0
        } else {
            p == prev || p == prev + 1
        };
        if !ok {
            rep.error(
                "PERIOD_INDEX",
                format!("time_grid.period_of_step[{t}]"),
                format!(
                    "period {p} after {prev}; periods must start at 0 and increase by at most 1"
                ),
            );
            return;
        }
        prev = p;
    }
}

fn check_node_ref(sys: &EnergySystem, rep: &mut ValidationReport, path: String, id: &str) {
    if sys.node(id).is_none() {
        rep.error("UNKNOWN_NODE", path, format!("node '{id}' does not exist"));
    }
}

fn check_eta(rep: &mut ValidationReport, path: String, eta: f64) {
    if !(eta.is_finite() && eta > 0.0) {
        rep.error(
            "EFFICIENCY",
            path,
            format!("efficiency {eta} must be positive"),
        );
    }
}

fn check_component(sys: &EnergySystem, c: &Component, rep: &mut ValidationReport) {
    let base = format!("components.{}", c.id);
    let steps = sys.time_grid.num_steps();
    let conv = format!("{base}.conversion");

    match &c.conversion {
        ConversionSpec::Single {
            input,
            output,
            efficiency,
        } => {
            check_node_ref(sys, rep, format!("{conv}.input"), input);
            check_node_ref(sys, rep, format!("{conv}.output"), output);
            if input == output {
                rep.error(
                    "SELF_LOOP",
                    conv.clone(),
                    format!("input and output are both '{input}'"),
                );
            }
            check_eta(rep, format!("{conv}.efficiency"), *efficiency);
        }
        ConversionSpec::SourceOnly { output } => {
            check_node_ref(sys, rep, format!("{conv}.output"), output);
        }
        ConversionSpec::FixedRatioCoupled {
            input,
            primary_output,
            secondary_output,
            eta_primary,
            eta_secondary,
        } => {
            check_outputs(sys, rep, &conv, input, primary_output, secondary_output);
            check_eta(rep, format!("{conv}.eta_primary"), *eta_primary);
            check_eta(rep, format!("{conv}.eta_secondary"), *eta_secondary);
        }
        ConversionSpec::CharacteristicField {
            input,
            primary_output,
            secondary_output,
            eta_primary,
            half_planes,
        } => {
            check_outputs(sys, rep, &conv, input, primary_output, secondary_output);
            check_eta(rep, format!("{conv}.eta_primary"), *eta_primary);
            let le = half_planes.iter().any(|h| h.sense == Side::Le);
            let ge = half_planes.iter().any(|h| h.sense == Side::Ge);
            if half_planes.len() < 3 || !le || !ge {
                rep.error(
                    "FIELD_SHAPE",
                    format!("{conv}.half_planes"),
                    format!(
                        "a characteristic field needs at least 3 half-planes with both senses, got {}",
                        half_planes.len()
                    ),
                );
            }
            for (k, h) in half_planes.iter().enumerate() {
                if !(h.slope.is_finite() && h.intercept.is_finite()) {
                    rep.error(
                        "NOT_FINITE",
                        format!("{conv}.half_planes[{k}]"),
                        "half-plane coefficients must be finite".into(),
                    );
                }
            }
        }
    }

    let cap = &c.capacity;
    let cpath = format!("{base}.capacity");
    rep.nonneg(format!("{cpath}.initial_installed"), cap.initial_installed);
    rep.nonneg(format!("{cpath}.build_cost"), cap.build_cost);
    if let Some(max) = cap.max_installed {
        rep.nonneg(format!("{cpath}.max_installed"), max);
        if max < cap.initial_installed {
            rep.error(
                "CAPACITY_ORDER",
                format!("{cpath}.max_installed"),
                format!(
                    "max_installed {max} is below initial_installed {}",
                    cap.initial_installed
                ),
            );
        }
    }
    let apath = format!("{cpath}.availability");
    if rep.series(&apath, &cap.availability, steps) {
        for (t, a) in cap.availability.values().into_iter().enumerate() {
            if a.is_finite() && !(0.0..=1.0).contains(&a) {
                rep.error(
                    "AVAILABILITY_RANGE",
                    index_path(&apath, &cap.availability, t),
                    format!("availability {a} outside [0, 1]"),
                );
            }
        }
    }

    match c.ramp {
        RampSpec::None => {}
        RampSpec::Fixed { up, down } => {
            rep.nonneg(format!("{base}.ramp.up"), up);
            rep.nonneg(format!("{base}.ramp.down"), down);
        }
        RampSpec::Optimized { cost_up, cost_down } => {
            rep.nonneg(format!("{base}.ramp.cost_up"), cost_up);
            rep.nonneg(format!("{base}.ramp.cost_down"), cost_down);
        }
    }

    if let CommitmentSpec::UnitCommit {
        unit_capacity,
        unit_min_load,
        units,
        startup_cost,
        min_up_steps,
        min_down_steps,
        partial_load,
        pre_horizon_on,
    } = &c.commitment
    {
        let mpath = format!("{base}.commitment");
        rep.nonneg(format!("{mpath}.unit_capacity"), *unit_capacity);
        rep.nonneg(format!("{mpath}.unit_min_load"), *unit_min_load);
        rep.nonneg(format!("{mpath}.startup_cost"), *startup_cost);
        if *unit_min_load > *unit_capacity {
            rep.error(
                "UNIT_LOAD",
                format!("{mpath}.unit_min_load"),
                format!("unit_min_load {unit_min_load} exceeds unit_capacity {unit_capacity}"),
            );
        }
        if (*min_up_steps > 0 || *min_down_steps > 0) && units.max() > 1 {
            rep.error(
                "BINARY_REQUIRED",
                format!("{mpath}.units"),
                format!(
                    "minimum up/down times need binary on-variables, but up to {} units are allowed",
                    units.max()
                ),
            );
        }
        if let Some(pl) = partial_load {
            if !(pl.slope.is_finite() && pl.slope > 0.0) {
                rep.error(
                    "PARTIAL_LOAD",
                    format!("{mpath}.partial_load.slope"),
                    format!("partial-load slope {} must be positive", pl.slope),
                );
            }
            rep.nonneg(format!("{mpath}.partial_load.offset"), pl.offset);
            if matches!(c.conversion, ConversionSpec::SourceOnly { .. }) {
                rep.error(
                    "PARTIAL_LOAD",
                    format!("{mpath}.partial_load"),
                    "a source without input cannot have a partial-load input model".into(),
                );
            }
        }
        if cap.optimizable || cap.per_period || cap.initial_installed > 0.0 {
            rep.error(
                "COMMITMENT_CAPACITY",
                cpath.clone(),
                "committed components size through their unit count; capacity must be neither initial, optimizable nor per-period"
                    .into(),
            );
        }
        for (k, &h) in pre_horizon_on.iter().enumerate() {
            if h > units.max() {
                rep.error(
                    "UNIT_HISTORY",
                    format!("{mpath}.pre_horizon_on[{k}]"),
                    format!(
                        "{h} units on before the horizon, at most {} exist",
                        units.max()
                    ),
                );
            }
        }
    }

    let costs = &c.costs;
    let kpath = format!("{base}.costs");
    rep.nonneg(
        format!("{kpath}.invest_annualized"),
        costs.invest_annualized,
    );
    rep.nonneg(
        format!("{kpath}.invest_input_side"),
        costs.invest_input_side,
    );
    rep.nonneg(format!("{kpath}.maintenance"), costs.maintenance);
    rep.nonneg(format!("{kpath}.emission_factor"), costs.emission_factor);
    if let Some(p) = costs.emission_price {
        rep.nonneg(format!("{kpath}.emission_price"), p);
    }
    let fpath = format!("{kpath}.fuel");
    if rep.series(&fpath, &costs.fuel, steps) {
        for (t, f) in costs.fuel.values().into_iter().enumerate() {
            if f < 0.0 {
                rep.error(
                    "NEGATIVE_VALUE",
                    index_path(&fpath, &costs.fuel, t),
                    format!("fuel cost {f} must be non-negative"),
                );
            }
        }
    }
    if let Some(a) = &costs.annuity {
        rep.nonneg(
            format!("{kpath}.annuity.total_investment"),
            a.total_investment,
        );
        if a.lifetime < 1 || !(a.interest_rate.is_finite() && a.interest_rate >= 0.0) {
            rep.error(
                "ANNUITY",
                format!("{kpath}.annuity"),
                format!(
                    "annuity needs lifetime >= 1 and interest rate >= 0, got n={} i={}",
                    a.lifetime, a.interest_rate
                ),
            );
        }
    }
}

fn check_outputs(
    sys: &EnergySystem,
    rep: &mut ValidationReport,
    conv: &str,
    input: &str,
    primary: &str,
    secondary: &str,
) {
    check_node_ref(sys, rep, format!("{conv}.input"), input);
    check_node_ref(sys, rep, format!("{conv}.primary_output"), primary);
    check_node_ref(sys, rep, format!("{conv}.secondary_output"), secondary);
    if input == primary || input == secondary {
        rep.error(
            "SELF_LOOP",
            conv.to_string(),
            format!("input '{input}' is also an output"),
        );
    }
    if primary == secondary {
        rep.error(
            "SELF_LOOP",
            conv.to_string(),
            format!("both outputs are '{primary}'"),
        );
    }
}

fn check_storage(sys: &EnergySystem, s: &Storage, rep: &mut ValidationReport) {
    let base = format!("storages.{}", s.id);
    match sys.node(&s.node) {
        None => rep.error(
            "UNKNOWN_NODE",
            format!("{base}.node"),
            format!("node '{}' does not exist", s.node),
        ),
        Some(n) if n.boundary => rep.error(
            "STORAGE_AT_BOUNDARY",
            format!("{base}.node"),
            format!("node '{}' is a boundary node without a balance", s.node),
        ),
        Some(_) => {}
    }
    rep.nonneg(format!("{base}.initial_fill"), s.initial_fill);
    rep.nonneg(format!("{base}.capacity_fixed"), s.capacity_fixed);
    rep.nonneg(format!("{base}.capacity_cost"), s.capacity_cost);
    if let Some(m) = s.max_capacity {
        rep.nonneg(format!("{base}.max_capacity"), m);
        if m < s.capacity_fixed {
            rep.error(
                "CAPACITY_ORDER",
                format!("{base}.max_capacity"),
                format!(
                    "max_capacity {m} is below capacity_fixed {}",
                    s.capacity_fixed
                ),
            );
        }
    }
    let top = if s.capacity_optimizable {
        s.capacity_fixed + s.expansion_limit()
    } else {
        s.capacity_fixed
    };
    if s.initial_fill > top {
        rep.error(
            "FILL_EXCEEDS_CAPACITY",
            format!("{base}.initial_fill"),
            format!(
                "initial fill {} exceeds the largest possible capacity {top}",
                s.initial_fill
            ),
        );
    }
    for (name, eta) in [
        ("charge_eff", s.charge_eff),
        ("discharge_eff", s.discharge_eff),
    ] {
        if !(eta.is_finite() && eta > 0.0 && eta <= 1.0) {
            rep.error(
                "STORAGE_EFFICIENCY",
                format!("{base}.{name}"),
                format!("efficiency {eta} outside (0, 1]"),
            );
        }
    }
    match s.rate {
        RateMode::Fixed {
            max_charge,
            max_discharge,
        } => {
            rep.nonneg(format!("{base}.rate.max_charge"), max_charge);
            rep.nonneg(format!("{base}.rate.max_discharge"), max_discharge);
        }
        RateMode::CRateLinked { c_rate } => {
            if !(c_rate.is_finite() && c_rate > 0.0) {
                rep.error(
                    "C_RATE",
                    format!("{base}.rate.c_rate"),
                    format!("C-ratio {c_rate} must be positive"),
                );
            }
        }
        RateMode::Optimized {
            cost_charge,
            cost_discharge,
        } => {
            rep.nonneg(format!("{base}.rate.cost_charge"), cost_charge);
            rep.nonneg(format!("{base}.rate.cost_discharge"), cost_discharge);
        }
    }
}
