// Smoothing inequalities for U^j e^{tU} and U^j(δ + pU)^n.
//
//     cargo run --release --example smoothing

use depapprox::verify::{smoothing_check, SmoothingGrid, SmoothingLemma};

pub fn run_example() -> depapprox::Result<()> {
    let rep = smoothing_check(SmoothingLemma::A10, &SmoothingGrid::a10_default())?;
    println!("{} rows, {} violations", rep.rows.len(), rep.violations.len());
    assert!(rep.violations.is_empty());

    let rep = smoothing_check(SmoothingLemma::SharpC, &SmoothingGrid::sharp_default())?;
    for c in &rep.constants {
        println!("{}: {:?} → target {:.5}", c.label, c.trace, c.target);
    }
    Ok(())
}

fn main() -> depapprox::Result<()> {
    run_example()
}
