//! Writes the compiled desk system as an LP file for external solvers.
//!
//! ```text
//! cargo run --example lp_export > model.lp
//! ```

use esopt::cli::load_scenario;
use esopt::formulate::compile;

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/paper_system_48.json");
    let sys = load_scenario(path).expect("scenario").system;
    let mut prog = compile(&sys).expect("valid system");
    prog.canonicalize();
    eprintln!(
        "{} variables, {} rows, {} nonzeros",
        prog.num_vars(),
        prog.num_rows(),
        prog.num_nonzeros()
    );
    print!("{}", prog.to_lp_format());
}
