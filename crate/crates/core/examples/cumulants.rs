// Factorial cumulants, remainder terms and sufficient conditions.
//
//     cargo run --example cumulants

use depapprox::cumulants::{gamma_set, hat_e, WindowFunc};
use depapprox::models::DependentModel;

pub fn run_example() -> depapprox::Result<()> {
    let model = DependentModel::two_runs(1000, 0.05)?;
    let c = gamma_set(&model)?;
    println!("Γ₁ = {:.6}, Γ₂ = {:.6}, Γ₃ = {:.6}", c.gamma1, c.gamma2, c.gamma3);
    println!("λ = {:.4}, R₀ = {:.4e}, R₁ = {:.4e}, R₂ = {:.4e}", c.lambda, c.r0, c.r1, c.r2);
    println!("conditions: {}", c.flags.label());
    assert!((c.gamma1 - 2.5).abs() < 1e-12);

    // Centered mixed moment of two neighbours: E X₁X₂ − E X₁ E X₂.
    let w = hat_e(&model, 1, &[WindowFunc::Identity, WindowFunc::Identity])?;
    println!("ŵE(X₁, X₂) = {:.6e}", w.re);
    let p: f64 = 0.05;
    assert!((w.re - (p.powi(3) - p.powi(4))).abs() < 1e-15);
    Ok(())
}

fn main() -> depapprox::Result<()> {
    run_example()
}
