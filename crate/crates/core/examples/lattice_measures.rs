// Signed measures on the integers: convolution, norms and the convolution
// exponential.
//
//     cargo run --example lattice_measures

use depapprox::measure::{u_power, LatticeMeasure, NormKind};

pub fn run_example() -> depapprox::Result<()> {
    // Bernoulli(0.3) convolved with itself is Binomial(2, 0.3).
    let b = LatticeMeasure::bernoulli(0.3);
    let bin2 = b.conv_power(2)?;
    println!("Bin(2, 0.3) = {:?}", bin2.weights());
    assert!((bin2.get(1) - 0.42).abs() < 1e-15);

    // U = δ₁ − δ₀ has total variation 2, and U² = δ₂ − 2δ₁ + δ₀ has 4.
    let u2 = u_power(2);
    println!("U² = {:?} at offset {}, ‖U²‖ = {}", u2.weights(), u2.offset(), u2.norm(NormKind::TotalVariation));

    // exp(λU) is the Poisson(λ) law.
    let lambda = 2.5;
    let pois = LatticeMeasure::unit_difference().scale(lambda).exp_measure(1e-14)?;
    let p3 = (-lambda).exp() * lambda.powi(3) / 6.0;
    println!("exp(2.5U) at 3: {:.15} (Poisson pmf {:.15})", pois.get(3), p3);
    assert!((pois.get(3) - p3).abs() < 1e-13);

    // Distances between measures.
    let d = pois.sub(&bin2);
    println!("‖Pois(2.5) − Bin(2,0.3)‖: tv {:.6}, local {:.6}", d.tv_norm(), d.local_norm());
    Ok(())
}

fn main() -> depapprox::Result<()> {
    run_example()
}
