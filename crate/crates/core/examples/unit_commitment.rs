//! One engine with a two-step minimum down time, a start-up cost and an
//! expensive backup. Prints the on-states and start-ups at the optimum.

use esopt::analyze::Assignment;
use esopt::formulate::compile;
use esopt::lp::VarKind;
use esopt::model::*;
use esopt::solver::{solve, SolverConfig};

fn main() {
    let load = vec![8.0, 0.0, 8.0, 8.0, 3.0, 0.0, 0.0, 9.0];
    let steps = load.len();
    let mut sys = EnergySystem::new(TimeGrid::hourly(steps));
    sys.nodes = vec![
        Node::demand("Electricity", Profile::Series(load)),
        Node::boundary("Gas"),
    ];

    let mut engine = Component::single("Engine", "Gas", "Electricity", 0.5);
    engine.commitment = CommitmentSpec::UnitCommit {
        unit_capacity: 10.0,
        unit_min_load: 2.0,
        units: UnitCount::Fixed(1),
        startup_cost: 20.0,
        min_up_steps: 2,
        min_down_steps: 2,
        partial_load: Some(PartialLoad {
            slope: 1.8,
            offset: 0.6,
        }),
        pre_horizon_on: vec![1],
    };
    engine.costs.fuel = Profile::Constant(10.0);

    let mut backup = Component::source("Backup", "Electricity");
    backup.capacity = CapacitySpec::fixed(10.0);
    backup.costs.fuel = Profile::Constant(100.0);
    sys.components = vec![engine, backup];

    let prog = compile(&sys).expect("valid system");
    println!(
        "{} binaries among {} variables",
        prog.vars.iter().filter(|v| v.integer).count(),
        prog.num_vars()
    );
    let sol = solve(&prog, &SolverConfig::default());
    let a = Assignment::decode(&prog, &sol).expect("solution");

    println!(
        "status {:?}, objective {:.2}, {} nodes",
        sol.status, sol.objective, sol.stats.nodes
    );
    println!(" t  on  start  engine  backup");
    for t in 0..steps {
        println!(
            "{t:>2}  {:>2}  {:>5}  {:>6.2}  {:>6.2}",
            a.at(VarKind::On, "Engine", t),
            a.at(VarKind::Startup, "Engine", t),
            a.at(VarKind::Pout, "Engine", t),
            a.at(VarKind::Pout, "Backup", t),
        );
    }
}
