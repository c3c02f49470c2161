// Log-log slopes of approximation errors against n.
//
//     cargo run --release --example rate_fit

use depapprox::approximants::{ApproximantKind, DEFAULT_TRUNCATION};
use depapprox::measure::NormKind;
use depapprox::verify::{distance_table, ModelFamily};

pub fn run_example() -> depapprox::Result<()> {
    let family = ModelFamily::TwoRuns { p: 0.05 };
    let kinds = [ApproximantKind::GSigned, ApproximantKind::NegBinomial, ApproximantKind::NbExpanded];
    let rep = distance_table(&family, &[2000, 4000, 8000], &kinds, NormKind::TotalVariation, DEFAULT_TRUNCATION);
    for row in &rep.rows {
        println!("n = {:>5} {:>4}: {:.3e} [{}]", row.n.unwrap(), row.kind, row.lhs.unwrap_or(f64::NAN), row.flags);
    }
    for s in &rep.slopes {
        println!("{}: slope {:+.3} (theory {:+.1})", s.label, s.fit.slope, s.target);
    }
    Ok(())
}

fn main() -> depapprox::Result<()> {
    run_example()
}
