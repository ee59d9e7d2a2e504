mod common;

use common::systems::*;
use esopt::analyze::*;
use esopt::formulate::compile;
use esopt::lp::eq::*;
use esopt::lp::{VarKind, VarRef};
use esopt::model::*;
use esopt::solver::{solve, SolveStatus, SolverConfig};

fn solved(sys: &EnergySystem) -> (esopt::lp::LinearProgram, esopt::solver::Solution) {
    let prog = compile(sys).unwrap();
    let sol = solve(&prog, &SolverConfig::default());
    (prog, sol)
}

#[test]
fn single_step_schedule_is_the_solver_value() {
    let sys = gas_only(vec![7.5], None);
    let (prog, sol) = solved(&sys);
    let r = extract_report(&sys, &prog, &sol).unwrap();
    let j = prog
        .var_index(&VarRef::at(VarKind::Pout, "Gas Turbine", 0))
        .unwrap();
    assert_eq!(r.schedules["Gas Turbine"], vec![sol.values[j]]);
    assert!((r.schedules["Gas Turbine"][0] - 7.5).abs() < 1e-9);
}

#[test]
fn fill_series_is_the_running_sum() {
    let mut sys = EnergySystem::new(TimeGrid::hourly(3));
    sys.nodes = vec![node("Electricity", Profile::Constant(1.0))];
    let mut s = battery(
        "Battery",
        "Electricity",
        RateMode::Fixed {
            max_charge: 2.0,
            max_discharge: 2.0,
        },
    );
    s.charge_eff = 0.98;
    s.discharge_eff = 0.98;
    s.capacity_fixed = 5.0;
    sys.storages = vec![s.clone()];
    let mut a = Assignment {
        values: Default::default(),
        objective: 0.0,
    };
    a.set(VarRef::at(VarKind::Pcharge, "Battery", 0), 1.0);
    a.set(VarRef::at(VarKind::Pcharge, "Battery", 1), 1.0);
    a.set(VarRef::at(VarKind::Pdischarge, "Battery", 2), 0.5);
    let fill = fill_levels(&sys, &s, &a);
    let want = [0.98, 1.96, 2.0 * 0.98 - 0.5 / 0.98];
    for (f, w) in fill.iter().zip(want) {
        assert!((f - w).abs() < 1e-15, "{f} vs {w}");
    }
}

#[test]
fn partial_load_efficiency_example() {
    assert_eq!(partial_load_efficiency(2.0, 1.0, 3.0), 3.0 / 7.0);

    let mut sys = gas_only(vec![3.0], None);
    sys.components[0].capacity = CapacitySpec::default();
    let mut uc = unit_commit(5.0, 1.0, UnitCount::Fixed(1));
    if let CommitmentSpec::UnitCommit { partial_load, .. } = &mut uc {
        *partial_load = Some(PartialLoad {
            slope: 2.0,
            offset: 1.0,
        });
    }
    sys.components[0].commitment = uc;
    sys.components[0].conversion = ConversionSpec::Single {
        input: "Gas".into(),
        output: "Electricity".into(),
        efficiency: 0.5,
    };
    let (prog, sol) = solved(&sys);
    let r = extract_report(&sys, &prog, &sol).unwrap();
    let eta = r.efficiencies["Gas Turbine"][0].unwrap();
    assert!((eta - 3.0 / 7.0).abs() < 1e-12);
    assert!(r.verification.family(EQ26).passed);
    assert_eq!(r.verification.family(EQ26).checks, 1);
}

#[test]
fn emissions_examples() {
    let sys = gas_only(vec![10.0], None);
    let (prog, sol) = solved(&sys);
    let a = Assignment::decode(&prog, &sol).unwrap();
    assert!((emissions_total(&sys, &a) - 5.05).abs() < 1e-12);

    let idle = Assignment {
        values: Default::default(),
        objective: 0.0,
    };
    assert_eq!(emissions_total(&sys, &idle), 0.0);

    let mut pv_only = EnergySystem::new(TimeGrid::hourly(2));
    pv_only.nodes = vec![node("Electricity", Profile::Constant(4.0))];
    let mut pv = source("PV", "Electricity");
    pv.capacity = CapacitySpec::optimized(Some(10.0));
    pv.costs.invest_annualized = 21300.0;
    pv_only.components = vec![pv];
    let (prog, sol) = solved(&pv_only);
    let r = extract_report(&pv_only, &prog, &sol).unwrap();
    assert_eq!(r.emissions_kg, 0.0);
}

#[test]
fn emissions_match_cap_row_activity() {
    let sys = coverage_fixture();
    let (prog, sol) = solved(&sys);
    let a = Assignment::decode(&prog, &sol).unwrap();
    let row = prog.rows.iter().find(|r| r.has_tag(EQ21)).unwrap();
    assert!((emissions_total(&sys, &a) - row.activity(&sol.values)).abs() < 1e-9);
}

#[test]
fn desk_run_passes_every_family() {
    let sys = desk_scenario(48).system;
    let (prog, sol) = solved(&sys);
    assert_eq!(sol.status, SolveStatus::Optimal);
    let r = extract_report(&sys, &prog, &sol).unwrap();
    assert!(
        r.verification.passed(),
        "{:?}",
        r.verification.failing().collect::<Vec<_>>()
    );
    assert!((r.costs.total() - r.objective).abs() <= 1e-6 * r.objective.abs());
    assert_eq!(r.installed.len(), 5);
    for s in &r.statistics {
        assert!(s.min_headroom >= -1e-6, "{} curtails below zero", s.id);
    }
}

#[test]
fn bumped_output_shows_up_in_eq1() {
    let sys = desk_scenario(48).system;
    let (prog, sol) = solved(&sys);
    let mut a = Assignment::decode(&prog, &sol).unwrap();
    let cap = a.scalar(VarKind::Pinstalled, "Gas Turbine");
    a.set(VarRef::at(VarKind::Pout, "Gas Turbine", 10), cap + 1.0);
    let rep = verify_solution(&sys, &a, 1e-6);
    let eq1 = rep.family(EQ1);
    assert!(!eq1.passed);
    assert!((eq1.max_residual - 1.0).abs() < 1e-9);
    assert!(!rep.family(EQ2).passed);
    assert!(rep.family(EQ28).passed);
}

#[test]
fn downtime_windows_have_zero_residual() {
    let sys = downtime_toy(1.0);
    let (prog, sol) = solved(&sys);
    let r = extract_report(&sys, &prog, &sol).unwrap();
    let eq28 = r.verification.family(EQ28);
    assert_eq!(eq28.checks, 4);
    assert_eq!(eq28.max_residual, 0.0);
    assert!(r.verification.passed());
}

#[test]
fn no_solution_without_values() {
    let sys = gas_only(vec![10.0], Some(0.0));
    let (prog, sol) = solved(&sys);
    assert_eq!(
        extract_report(&sys, &prog, &sol).unwrap_err(),
        AnalyzeError::NoSolution(SolveStatus::Infeasible)
    );
}

#[test]
fn breakdown_entries_sum_to_total() {
    let sys = coverage_fixture();
    let (prog, sol) = solved(&sys);
    let r = extract_report(&sys, &prog, &sol).unwrap();
    let sum: f64 = r.costs.entries().iter().map(|e| e.1).sum();
    assert_eq!(sum, r.costs.total());
    assert!((sum - sol.objective).abs() <= 1e-6 * sol.objective.abs().max(1.0));
    assert!(r.costs.build > 0.0 || r.costs.invest > 0.0);
}
