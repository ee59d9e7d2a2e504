//! Small energy systems shared by the integration tests.

use std::path::PathBuf;

use esopt::cli::{load_scenario, Scenario};
use esopt::finance::AnnuityInput;
use esopt::model::*;
use rand::Rng;

pub fn example_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("examples")
        .join(name)
}

pub fn desk_scenario(steps: usize) -> Scenario {
    let name = match steps {
        48 => "paper_system_48.json",
        168 => "paper_system.json",
        _ => panic!("no desk scenario with {steps} steps"),
    };
    load_scenario(example_path(name)).expect("desk scenario loads")
}

pub fn node(id: &str, load: Profile) -> Node {
    Node {
        id: id.into(),
        carrier: id.to_lowercase(),
        boundary: false,
        load,
    }
}

pub fn boundary(id: &str) -> Node {
    Node {
        id: id.into(),
        carrier: id.to_lowercase(),
        boundary: true,
        load: Profile::Constant(0.0),
    }
}

pub fn single(id: &str, input: &str, output: &str, eta: f64) -> Component {
    Component::new(
        id,
        ConversionSpec::Single {
            input: input.into(),
            output: output.into(),
            efficiency: eta,
        },
    )
}

pub fn source(id: &str, output: &str) -> Component {
    Component::new(
        id,
        ConversionSpec::SourceOnly {
            output: output.into(),
        },
    )
}

pub fn unit_commit(unit_capacity: f64, unit_min_load: f64, units: UnitCount) -> CommitmentSpec {
    CommitmentSpec::UnitCommit {
        unit_capacity,
        unit_min_load,
        units,
        startup_cost: 0.0,
        min_up_steps: 0,
        min_down_steps: 0,
        partial_load: None,
        pre_horizon_on: Vec::new(),
    }
}

pub fn battery(id: &str, at: &str, rate: RateMode) -> Storage {
    Storage {
        id: id.into(),
        node: at.into(),
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

/// Grid electricity feeding a heat pump that serves a heat load.
pub fn heat_pump_pair(heat_load: Vec<f64>) -> EnergySystem {
    let mut sys = EnergySystem::new(TimeGrid::hourly(heat_load.len()));
    sys.nodes = vec![
        node("Electricity", Profile::Constant(0.0)),
        node("Heat", Profile::Series(heat_load)),
    ];
    let mut grid = source("Grid", "Electricity");
    grid.capacity = CapacitySpec::fixed(100.0);
    grid.costs.fuel = Profile::Constant(40.0);
    let mut hp = single("Heat Pump", "Electricity", "Heat", 3.0);
    hp.capacity = CapacitySpec::optimized(Some(50.0));
    hp.costs.invest_annualized = 19028.0;
    sys.components = vec![grid, hp];
    sys
}

/// One gas turbine on an electricity node.
pub fn gas_only(load: Vec<f64>, co2_cap: Option<f64>) -> EnergySystem {
    let mut sys = EnergySystem::new(TimeGrid::hourly(load.len()));
    sys.nodes = vec![node("Electricity", Profile::Series(load)), boundary("Gas")];
    let mut gt = single("Gas Turbine", "Gas", "Electricity", 0.4);
    gt.capacity = CapacitySpec::fixed(100.0);
    gt.costs.fuel = Profile::Constant(21.61);
    gt.costs.emission_factor = 0.202;
    sys.components = vec![gt];
    sys.co2_cap = co2_cap;
    sys
}

/// Single unit with 2-step minimum down time over 4 steps; load only in the
/// first and last step, with cheap backup so the unit is optional.
pub fn downtime_toy(startup_cost: f64) -> EnergySystem {
    let mut sys = EnergySystem::new(TimeGrid::hourly(4));
    sys.nodes = vec![
        node("Electricity", Profile::Series(vec![8.0, 0.0, 8.0, 8.0])),
        boundary("Gas"),
    ];
    let mut unit = single("Engine", "Gas", "Electricity", 0.5);
    let mut uc = unit_commit(10.0, 2.0, UnitCount::Fixed(1));
    if let CommitmentSpec::UnitCommit {
        min_down_steps,
        startup_cost: s,
        ..
    } = &mut uc
    {
        *min_down_steps = 2;
        *s = startup_cost;
    }
    unit.commitment = uc;
    unit.costs.fuel = Profile::Constant(10.0);
    let mut backup = source("Backup", "Electricity");
    backup.capacity = CapacitySpec::fixed(10.0);
    backup.costs.fuel = Profile::Constant(100.0);
    sys.components = vec![unit, backup];
    sys
}

/// Two building periods of three steps; PV availability and loads differ per period.
pub fn two_period_toy(load_p1: f64, load_p2: f64, build_cost: f64) -> EnergySystem {
    let mut grid = TimeGrid::hourly(6);
    grid.period_of_step = vec![0, 0, 0, 1, 1, 1];
    let mut sys = EnergySystem::new(grid);
    sys.nodes = vec![node(
        "Electricity",
        Profile::Series(vec![load_p1, load_p1, load_p1, load_p2, load_p2, load_p2]),
    )];
    let mut plant = source("Plant", "Electricity");
    plant.capacity = CapacitySpec::optimized(Some(100.0));
    plant.capacity.per_period = true;
    plant.capacity.build_cost = build_cost;
    plant.costs.invest_annualized = 1000.0;
    plant.costs.fuel = Profile::Constant(1.0);
    sys.components = vec![plant];
    sys
}

/// Random single-node system with PV, a priced grid and one optimisable battery.
pub fn random_storage_system(rng: &mut impl Rng) -> EnergySystem {
    let steps = rng.gen_range(3..=8);
    let mut sys = EnergySystem::new(TimeGrid {
        step_durations: (0..steps)
            .map(|_| [0.5, 1.0, 2.0][rng.gen_range(0..3)])
            .collect(),
        period_of_step: Vec::new(),
    });
    let load: Vec<f64> = (0..steps).map(|_| rng.gen_range(2.0..10.0)).collect();
    sys.nodes = vec![node("Electricity", Profile::Series(load))];
    let mut grid = source("Grid", "Electricity");
    grid.capacity = CapacitySpec::fixed(50.0);
    grid.costs.fuel = Profile::Series((0..steps).map(|_| rng.gen_range(10.0..80.0)).collect());
    let mut pv = source("PV", "Electricity");
    pv.capacity = CapacitySpec::optimized(Some(40.0));
    pv.capacity.availability =
        Profile::Series((0..steps).map(|_| rng.gen_range(0.0..1.0)).collect());
    pv.costs.invest_annualized = rng.gen_range(1000.0..30000.0);
    sys.components = vec![grid, pv];
    let rate = match rng.gen_range(0..3) {
        0 => RateMode::Fixed {
            max_charge: rng.gen_range(1.0..8.0),
            max_discharge: rng.gen_range(1.0..8.0),
        },
        1 => RateMode::CRateLinked {
            c_rate: rng.gen_range(0.5..4.0),
        },
        _ => RateMode::Optimized {
            cost_charge: rng.gen_range(0.0..2000.0),
            cost_discharge: rng.gen_range(0.0..2000.0),
        },
    };
    let mut s = battery("Battery", "Electricity", rate);
    s.capacity_fixed = rng.gen_range(0.0..5.0);
    s.initial_fill = rng.gen_range(0.0..1.0) * s.capacity_fixed;
    s.capacity_optimizable = true;
    s.capacity_cost = rng.gen_range(100.0..10000.0);
    s.max_capacity = Some(s.capacity_fixed + 30.0);
    s.charge_eff = rng.gen_range(0.8..1.0);
    s.discharge_eff = rng.gen_range(0.8..1.0);
    s.final_fill_at_least_initial = rng.gen_bool(0.5);
    sys.storages = vec![s];
    sys
}

/// A system that exercises every constraint family at once.
pub fn coverage_fixture() -> EnergySystem {
    let mut grid_t = TimeGrid::hourly(6);
    grid_t.period_of_step = vec![0, 0, 0, 1, 1, 1];
    let mut sys = EnergySystem::new(grid_t);
    sys.nodes = vec![
        node(
            "Electricity",
            Profile::Series(vec![20.0, 25.0, 30.0, 28.0, 22.0, 18.0]),
        ),
        node(
            "Heat",
            Profile::Series(vec![15.0, 18.0, 20.0, 16.0, 14.0, 12.0]),
        ),
        boundary("Gas"),
    ];

    let mut grid = source("Grid", "Electricity");
    grid.capacity = CapacitySpec::optimized(Some(200.0));
    grid.ramp = RampSpec::Optimized {
        cost_up: 5.0,
        cost_down: 5.0,
    };
    grid.costs.fuel = Profile::Series(vec![60.0, 70.0, 90.0, 80.0, 50.0, 40.0]);
    grid.costs.emission_factor = 0.3;
    grid.costs.annuity = Some(AnnuityInput {
        total_investment: 1000.0,
        interest_rate: 0.05,
        lifetime: 20,
    });

    let mut pv = source("PV", "Electricity");
    pv.capacity = CapacitySpec::optimized(Some(60.0));
    pv.capacity.per_period = true;
    pv.capacity.build_cost = 100.0;
    pv.capacity.availability = Profile::Series(vec![0.0, 0.3, 0.8, 0.9, 0.4, 0.0]);
    pv.costs.invest_annualized = 5000.0;

    let mut chp = Component::new(
        "CHP",
        ConversionSpec::FixedRatioCoupled {
            input: "Gas".into(),
            primary_output: "Electricity".into(),
            secondary_output: "Heat".into(),
            eta_primary: 0.37,
            eta_secondary: 0.48,
        },
    );
    chp.capacity = CapacitySpec::optimized(Some(50.0));
    chp.ramp = RampSpec::Fixed { up: 0.5, down: 0.5 };
    chp.costs.invest_input_side = 3000.0;
    chp.costs.fuel = Profile::Constant(21.61);
    chp.costs.emission_factor = 0.202;

    let mut field = Component::new(
        "Field CHP",
        ConversionSpec::CharacteristicField {
            input: "Gas".into(),
            primary_output: "Electricity".into(),
            secondary_output: "Heat".into(),
            eta_primary: 0.35,
            half_planes: vec![
                HalfPlane {
                    slope: 1.0,
                    intercept: 0.0,
                    sense: Side::Le,
                },
                HalfPlane {
                    slope: -1.0,
                    intercept: 40.0,
                    sense: Side::Le,
                },
                HalfPlane {
                    slope: 0.2,
                    intercept: 0.0,
                    sense: Side::Ge,
                },
            ],
        },
    );
    field.capacity = CapacitySpec::fixed(10.0);
    field.costs.fuel = Profile::Constant(25.0);

    let mut engine = single("Engine", "Gas", "Electricity", 0.4);
    engine.commitment = CommitmentSpec::UnitCommit {
        unit_capacity: 15.0,
        unit_min_load: 5.0,
        units: UnitCount::Fixed(1),
        startup_cost: 50.0,
        min_up_steps: 2,
        min_down_steps: 2,
        partial_load: None,
        pre_horizon_on: vec![1],
    };
    engine.costs.fuel = Profile::Constant(20.0);

    let mut boiler = single("E-Boiler", "Electricity", "Heat", 0.95);
    boiler.commitment = CommitmentSpec::UnitCommit {
        unit_capacity: 10.0,
        unit_min_load: 3.0,
        units: UnitCount::Optimized { max: 3 },
        startup_cost: 10.0,
        min_up_steps: 0,
        min_down_steps: 0,
        partial_load: Some(PartialLoad {
            slope: 1.02,
            offset: 0.3,
        }),
        pre_horizon_on: Vec::new(),
    };
    boiler.costs.invest_annualized = 2000.0;

    sys.components = vec![grid, pv, chp, field, engine, boiler];

    let mut bat = battery(
        "Battery",
        "Electricity",
        RateMode::Fixed {
            max_charge: 10.0,
            max_discharge: 10.0,
        },
    );
    bat.capacity_optimizable = true;
    bat.capacity_cost = 800.0;
    bat.max_capacity = Some(40.0);
    bat.charge_eff = 0.95;
    bat.discharge_eff = 0.95;

    let mut tank = battery(
        "Tank",
        "Heat",
        RateMode::Optimized {
            cost_charge: 50.0,
            cost_discharge: 50.0,
        },
    );
    tank.capacity_fixed = 5.0;
    tank.initial_fill = 2.0;
    tank.charge_eff = 0.99;
    tank.discharge_eff = 0.99;
    tank.final_fill_at_least_initial = true;

    sys.storages = vec![bat, tank];
    sys.co2_cap = Some(1e5);
    sys
}
