// Every approximant for two instances, with its distance to the exact law.
//
//     cargo run --example approximants

use depapprox::approximants::{make_approximant, ApproximantKind, DEFAULT_TRUNCATION};
use depapprox::cumulants::gamma_set;
use depapprox::models::{DependentModel, ModelSpec};

pub fn run_example() -> depapprox::Result<()> {
    let instances =
        [ModelSpec::TwoRuns { n: 2000, p: 0.05 }, ModelSpec::K1k2 { n: 4000, k1: 2, k2: 2, p: 0.05, grouped: true }];
    for spec in &instances {
        let model = DependentModel::build(spec)?;
        let law = model.exact_distribution()?;
        let c = gamma_set(&model)?;
        println!("{} (Γ₂ = {:+.4})", spec.to_json(), c.gamma2);
        for kind in ApproximantKind::ALL {
            if !kind.applies_to(&c) {
                println!("  {kind:>5}: not applicable");
                continue;
            }
            let a = make_approximant(kind, &c, DEFAULT_TRUNCATION)?;
            let d = law.sub(&a.measure);
            println!("  {kind:>5}: tv {:.3e}  local {:.3e}", d.tv_norm() + a.truncation_mass, d.local_norm());
        }
    }
    Ok(())
}

fn main() -> depapprox::Result<()> {
    run_example()
}
