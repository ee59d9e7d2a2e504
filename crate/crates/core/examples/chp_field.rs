//! A CHP described by a characteristic field, next to one with a fixed
//! heat-to-power ratio. Heat demand sweeps across the field.

use esopt::analyze::extract_report;
use esopt::formulate::compile;
use esopt::model::*;
use esopt::solver::{solve, SolverConfig};

fn system(heat: f64) -> EnergySystem {
    let mut sys = EnergySystem::new(TimeGrid::hourly(1));
    sys.nodes = vec![
        Node::demand("Electricity", Profile::Constant(10.0)),
        Node::demand("Heat", Profile::Constant(heat)),
        Node::boundary("Gas"),
    ];
    let mut field = Component::new(
        "Field CHP",
        ConversionSpec::CharacteristicField {
            input: "Gas".into(),
            primary_output: "Electricity".into(),
            secondary_output: "Heat".into(),
            eta_primary: 0.35,
            half_planes: vec![
                HalfPlane {
                    slope: 2.0,
                    intercept: 0.0,
                    sense: Side::Le,
                },
                HalfPlane {
                    slope: 0.4,
                    intercept: 0.0,
                    sense: Side::Ge,
                },
                HalfPlane {
                    slope: -1.0,
                    intercept: 40.0,
                    sense: Side::Le,
                },
            ],
        },
    );
    field.capacity = CapacitySpec::fixed(20.0);
    field.costs.fuel = Profile::Constant(25.0);

    let mut boiler = Component::single("Boiler", "Gas", "Heat", 0.9);
    boiler.capacity = CapacitySpec::fixed(50.0);
    boiler.costs.fuel = Profile::Constant(30.0);

    let mut grid = Component::source("Grid", "Electricity");
    grid.capacity = CapacitySpec::fixed(50.0);
    grid.costs.fuel = Profile::Constant(120.0);
    sys.components = vec![field, boiler, grid];
    sys
}

fn main() {
    println!("heat load  chp power  chp heat  boiler  grid");
    for heat in [2.0, 4.0, 10.0, 20.0, 30.0] {
        let sys = system(heat);
        let prog = compile(&sys).expect("valid system");
        let r =
            extract_report(&sys, &prog, &solve(&prog, &SolverConfig::default())).expect("solution");
        println!(
            "{heat:>9.1}  {:>9.2}  {:>8.2}  {:>6.2}  {:>4.2}",
            r.schedules["Field CHP"][0],
            r.secondary_outputs["Field CHP"][0],
            r.schedules["Boiler"][0],
            r.schedules["Grid"][0],
        );
    }
}
