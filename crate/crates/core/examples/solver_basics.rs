//! The solver on hand-built programs, without any energy system.

use esopt::lp::{EqTags, LinearProgram, Sense, VarKind, VarRef};
use esopt::solver::{check_certificate, solve, SolverConfig};

fn main() {
    // max 3x + 2y  s.t.  x + y ≤ 4,  x + 3y ≤ 6,  x ≤ 3
    let mut lp = LinearProgram::new();
    let x = lp
        .add_var(VarRef::at(VarKind::Pout, "x", 0), 0.0, 3.0)
        .unwrap();
    let y = lp
        .add_var(VarRef::at(VarKind::Pout, "y", 0), 0.0, f64::INFINITY)
        .unwrap();
    lp.add_cost(x, -3.0);
    lp.add_cost(y, -2.0);
    lp.add_row(
        EqTags::default(),
        "a",
        None,
        vec![(x, 1.0), (y, 1.0)],
        Sense::Le,
        4.0,
    );
    lp.add_row(
        EqTags::default(),
        "b",
        None,
        vec![(x, 1.0), (y, 3.0)],
        Sense::Le,
        6.0,
    );
    let sol = solve(&lp, &SolverConfig::default());
    println!(
        "LP  {:?}: x = {}, y = {}, objective {}",
        sol.status, sol.values[x], sol.values[y], sol.objective
    );
    println!("    duals {:?}", sol.duals);
    println!(
        "    certificate {}",
        if check_certificate(&lp, &sol).passed() {
            "ok"
        } else {
            "FAILED"
        }
    );

    // knapsack: weights 3..8, values 4..9, capacity 14
    let mut kp = LinearProgram::new();
    let items: Vec<usize> = (0..6)
        .map(|k| {
            let j = kp
                .add_integer_var(VarRef::at(VarKind::On, "item", k), 0.0, 1.0)
                .unwrap();
            kp.add_cost(j, -(k as f64 + 4.0));
            j
        })
        .collect();
    let weights = items
        .iter()
        .enumerate()
        .map(|(k, &j)| (j, k as f64 + 3.0))
        .collect();
    kp.add_row(
        EqTags::default(),
        "capacity",
        None,
        weights,
        Sense::Le,
        14.0,
    );
    let sol = solve(&kp, &SolverConfig::default());
    let picked: Vec<usize> = (0..6).filter(|&k| sol.values[items[k]] > 0.5).collect();
    println!(
        "MIP {:?}: items {picked:?}, value {}, {} nodes, gap {:.1e}",
        sol.status, -sol.objective, sol.stats.nodes, sol.gap
    );
}
