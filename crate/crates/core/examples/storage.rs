//! Battery arbitrage against a time-varying price, solved with both fill
//! formulations.

use esopt::analyze::extract_report;
use esopt::formulate::{compile_with, CompileOptions, StorageForm};
use esopt::model::*;
use esopt::solver::{solve, SolverConfig};

fn main() {
    let price = vec![30.0, 25.0, 20.0, 60.0, 90.0, 80.0, 40.0, 35.0];
    let mut sys = EnergySystem::new(TimeGrid::hourly(price.len()));
    sys.nodes = vec![Node::demand("Electricity", Profile::Constant(5.0))];

    let mut grid = Component::source("Grid", "Electricity");
    grid.capacity = CapacitySpec::fixed(20.0);
    grid.costs.fuel = Profile::Series(price);
    sys.components = vec![grid];

    let mut bat = Storage::new(
        "Battery",
        "Electricity",
        RateMode::CRateLinked { c_rate: 2.0 },
    );
    bat.capacity_optimizable = true;
    bat.capacity_cost = 2000.0;
    bat.max_capacity = Some(20.0);
    bat.charge_eff = 0.95;
    bat.discharge_eff = 0.95;
    bat.final_fill_at_least_initial = true;
    sys.storages = vec![bat];

    for form in [StorageForm::Recurrence, StorageForm::CumulativeSum] {
        let prog =
            compile_with(&sys, &CompileOptions { storage_form: form }).expect("valid system");
        let sol = solve(&prog, &SolverConfig::default());
        let r = extract_report(&sys, &prog, &sol).expect("solution");
        println!(
            "{form:?}: {} variables, {} rows, objective {:.4}",
            prog.num_vars(),
            prog.num_rows(),
            r.objective
        );
        let fill: Vec<String> = r.storages["Battery"]
            .fill
            .iter()
            .map(|f| format!("{f:.2}"))
            .collect();
        println!(
            "  capacity {:.3} MWh, fill [{}]",
            r.installed[1].total,
            fill.join(", ")
        );
    }
}
