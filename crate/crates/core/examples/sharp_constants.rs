// Normalized distances against the sharp constants.
//
//     cargo run --release --example sharp_constants

use depapprox::approximants::DEFAULT_TRUNCATION;
use depapprox::verify::{default_sharp_grid, sharp_constant_run, SharpExperiment};

pub fn run_example() -> depapprox::Result<()> {
    for exp in [SharpExperiment::BiK1k2Tv { k1: 2, k2: 2 }, SharpExperiment::Nb2RunsTv] {
        let rep = sharp_constant_run(exp, &default_sharp_grid(exp), DEFAULT_TRUNCATION)?;
        for row in &rep.rows {
            println!("{} n = {:>6}: {:.4} [{}]", exp.name(), row.n.unwrap(), row.lhs.unwrap(), row.flags);
        }
        let c = &rep.constants[0];
        println!("{}: {:.4} vs {:.4} ({:.1}% off)", c.label, c.value, c.target, 100.0 * c.deviation);
    }
    Ok(())
}

fn main() -> depapprox::Result<()> {
    run_example()
}
