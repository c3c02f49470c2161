// Bergström expansions: partial sums approach the exact law as the order grows.
//
//     cargo run --example bergstrom

use depapprox::charfn::{bergstrom_terms, default_depth, default_grid, BergstromBase};
use depapprox::models::DependentModel;

pub fn run_example() -> depapprox::Result<()> {
    let model = DependentModel::two_runs(100, 0.02)?;
    let law = model.exact_distribution()?;
    for base in [BergstromBase::Pois, BergstromBase::G] {
        let grid = default_grid(&model, 3)?;
        let terms = bergstrom_terms(&model, 3, base, grid, default_depth(model.n()))?;
        let d: Vec<f64> = (0..=3).map(|s| law.sub(&terms.partial_sum(s)).tv_norm()).collect();
        let shown: Vec<String> = d.iter().map(|x| format!("{x:.3e}")).collect();
        println!("{base:?}: ‖F − Σ_{{l≤s}} Brg_l‖ for s = 0..3: {}", shown.join(", "));
        assert!(d.windows(2).all(|w| w[1] < w[0]));
    }
    Ok(())
}

fn main() -> depapprox::Result<()> {
    run_example()
}
