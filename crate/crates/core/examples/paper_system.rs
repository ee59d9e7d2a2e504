//! Five-technology system on a synthetic winter week.
//!
//! ```text
//! cargo run --release --example paper_system [-- <scenario.json> [out-dir]]
//! ```

use std::path::PathBuf;

use esopt::cli::{load_scenario, run, RunOptions};

fn main() {
    let mut args = std::env::args().skip(1);
    let scenario = args.next().map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/paper_system.json")
    });
    let sc = match load_scenario(&scenario) {
        Ok(sc) => sc,
        Err(e) => {
            eprintln!("{}: {e}", scenario.display());
            std::process::exit(e.exit_code());
        }
    };
    let opts = RunOptions {
        out_dir: args.next().map(PathBuf::from),
        verify: true,
        ..RunOptions::default()
    };
    let outcome = run(&sc, &opts).expect("run");
    print!("{}", outcome.summary);
    for p in &outcome.written {
        println!("wrote {}", p.display());
    }
    std::process::exit(outcome.exit_code);
}
