//! Capacity decided per building period, with a cost on each addition.

use esopt::analyze::Assignment;
use esopt::formulate::compile;
use esopt::lp::VarKind;
use esopt::model::*;
use esopt::solver::{solve, SolverConfig};

fn main() {
    let mut grid = TimeGrid::hourly(9);
    grid.period_of_step = vec![0, 0, 0, 1, 1, 1, 2, 2, 2];
    let mut sys = EnergySystem::new(grid);
    sys.nodes = vec![Node::demand(
        "Electricity",
        Profile::Series(vec![5.0, 5.0, 4.0, 8.0, 7.0, 8.0, 6.0, 6.0, 6.0]),
    )];
    let mut plant = Component::source("Plant", "Electricity");
    plant.capacity = CapacitySpec::optimized(Some(100.0));
    plant.capacity.per_period = true;
    plant.capacity.build_cost = 0.5;
    plant.costs.invest_annualized = 1000.0;
    plant.costs.fuel = Profile::Constant(1.0);
    sys.components = vec![plant];

    let prog = compile(&sys).expect("valid system");
    let sol = solve(&prog, &SolverConfig::default());
    let a = Assignment::decode(&prog, &sol).expect("solution");
    println!("period  installed  built");
    for p in 0..sys.time_grid.num_periods() {
        let built = if p == 0 {
            "-".to_string()
        } else {
            format!("{:.3}", a.at(VarKind::Pbuilt, "Plant", p))
        };
        println!(
            "{p:>6}  {:>9.3}  {built:>5}",
            a.at(VarKind::PinstalledPeriod, "Plant", p)
        );
    }
}
