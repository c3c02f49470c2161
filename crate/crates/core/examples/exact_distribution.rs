// Exact law of a 1-dependent sum by transfer-matrix dynamic programming.
//
//     cargo run --example exact_distribution

use depapprox::models::{DependentModel, ModelSpec};

pub fn run_example() -> depapprox::Result<()> {
    // 2-runs statistic S = Σ η_{i−1}η_i over n = 3 fair coin flips after η₀.
    let model = DependentModel::two_runs(3, 0.5)?;
    let law = model.exact_distribution()?;
    for (k, w) in law.iter() {
        println!("P(S = {k}) = {w}");
    }
    assert!((law.get(0) - 0.5).abs() < 1e-15);
    assert!((law.total_mass() - 1.0).abs() < 1e-15);

    // Models can also be described in JSON, e.g. (2,2)-events grouped into
    // 1-dependent blocks of length 4.
    let spec = ModelSpec::from_json(r#"{"kind":"k1k2","n":200,"k1":2,"k2":2,"p":0.2}"#)?;
    let model = DependentModel::build(&spec)?;
    let law = model.exact_distribution()?;
    println!(
        "k1k2: {} blocks, dependence {}, mean {:.6}, P(N = 0) = {:.6}",
        model.n(),
        model.dependence(),
        law.first_moment(),
        law.get(0)
    );
    // E N = (n − m + 1)(1−p)^{k₁}p^{k₂}.
    let expected = 197.0 * 0.8f64.powi(2) * 0.2f64.powi(2);
    assert!((law.first_moment() - expected).abs() < 1e-10);
    Ok(())
}

fn main() -> depapprox::Result<()> {
    run_example()
}
