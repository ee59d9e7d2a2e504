//! Tightens the CO2 cap on the two-day desk system and reports cost and mix.
//!
//! ```text
//! cargo run --release --example co2_sweep
//! ```

use esopt::analyze::extract_report;
use esopt::cli::load_scenario;
use esopt::formulate::compile;
use esopt::solver::{solve, SolveStatus, SolverConfig};

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/paper_system_48.json");
    let mut sys = load_scenario(path).expect("scenario").system;
    let cfg = SolverConfig::default();

    let prog = compile(&sys).expect("valid system");
    let free = extract_report(&sys, &prog, &solve(&prog, &cfg))
        .expect("solution")
        .emissions_kg;

    println!(
        "{:>10}  {:>12}  {:>8}  {:>8}  {:>8}",
        "cap kg", "cost EUR", "PV MW", "HP MW", "Bat MWh"
    );
    for k in 0..8 {
        let cap = free * (1.0 - 0.05 * k as f64);
        sys.co2_cap = Some(cap);
        let prog = compile(&sys).expect("valid system");
        let sol = solve(&prog, &cfg);
        if sol.status != SolveStatus::Optimal {
            println!("{cap:>10.1}  {:?}", sol.status);
            continue;
        }
        let r = extract_report(&sys, &prog, &sol).expect("solution");
        let mw = |id: &str| {
            r.installed
                .iter()
                .find(|c| c.id == id)
                .map_or(0.0, |c| c.total)
        };
        println!(
            "{cap:>10.1}  {:>12.2}  {:>8.3}  {:>8.3}  {:>8.3}",
            r.objective,
            mw("PV"),
            mw("Heat Pump"),
            mw("Battery")
        );
    }
}
