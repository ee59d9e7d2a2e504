//! Smallest sizing problem: how large should a heat pump be?

use esopt::analyze::extract_report;
use esopt::formulate::compile;
use esopt::model::*;
use esopt::solver::{solve, SolverConfig};

fn main() {
    let heat = vec![4.0, 6.0, 9.0, 12.0, 9.0, 5.0];
    let mut sys = EnergySystem::new(TimeGrid::hourly(heat.len()));
    sys.nodes = vec![
        Node::demand("Electricity", Profile::Constant(0.0)),
        Node::demand("Heat", Profile::Series(heat)),
    ];

    let mut grid = Component::source("Grid", "Electricity");
    grid.capacity = CapacitySpec::fixed(100.0);
    grid.costs.fuel = Profile::Constant(40.0);

    let mut hp = Component::single("Heat Pump", "Electricity", "Heat", 3.0);
    hp.capacity = CapacitySpec::optimized(Some(50.0));
    hp.costs.invest_annualized = 19028.0;
    sys.components = vec![grid, hp];

    let prog = compile(&sys).expect("valid system");
    let sol = solve(&prog, &SolverConfig::default());
    let r = extract_report(&sys, &prog, &sol).expect("solution");

    println!("status {:?}, objective {:.2} EUR", r.status, r.objective);
    for c in &r.installed {
        println!("{:<10} {:>8.3} MW", c.id, c.total);
    }
    println!("grid draw  {:?}", r.schedules["Grid"]);
    println!("heat       {:?}", r.schedules["Heat Pump"]);
}
