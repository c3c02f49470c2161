//! Discrete approximations for sums of 1-dependent integer-valued random
//! variables.
//!
//! The crate builds the exact law `F_n` of `S_n = X_1 + ⋯ + X_n` for concrete
//! dependent models and compares it with a family of discrete approximants,
//! all expressed as finite signed measures on ℤ:
//!
//! - `Pois(Γ₁) = exp{Γ₁U}` and the signed compound Poisson `G = exp{Γ₁U + Γ₂U²}`,
//!   where `U = δ₁ − δ`;
//! - translated Poisson, negative binomial and binomial laws with two matched
//!   factorial cumulants;
//! - the short expansions `Pois(δ + Γ₂U²)`, `G(δ + Γ₃U³)`, and the analogous
//!   corrections for NB and BI.
//!
//! Modules:
//!
//! - [`measure`]: lattice measures (convolution, exponentials, norms, Fourier values);
//! - [`models`]: 2-runs, `(k₁,k₂)`-events, independent summands, block grouping,
//!   exact distributions by transfer-matrix dynamic programming;
//! - [`cumulants`]: centered mixed moments `ŵE`/`ŵE⁺`, factorial cumulants
//!   `Γ₁, Γ₂, Γ₃`, the condition quantity `λ` and remainders `R₀, R₁, R₂`;
//! - [`approximants`]: the approximating measures and their correction factors;
//! - [`charfn`]: Heinrich's factorization of the characteristic function and
//!   Bergström expansion terms;
//! - [`verify`]: distance tables, log-log rate fits, sharp-constant runs and
//!   smoothing-inequality checks, reported as CSV;
//! - [`cli`]: the `depapprox` command-line front end.
//!
//! ```
//! use depapprox::models::{DependentModel, ModelSpec};
//! use depapprox::cumulants::gamma_set;
//!
//! let model = DependentModel::build(&ModelSpec::TwoRuns { n: 1000, p: 0.05 }).unwrap();
//! let c = gamma_set(&model).unwrap();
//! assert!((c.gamma1 - 2.5).abs() < 1e-10);
//! ```

#![forbid(unsafe_code)]
// `!(x > 0.0)` is deliberate: it rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approximants;
pub mod charfn;
pub mod cli;
pub mod cumulants;
pub mod error;
pub mod measure;
pub mod models;
pub mod verify;

pub use error::{Error, Result};
pub use measure::{LatticeMeasure, NormKind};

/// `C̃_TV = (1/3)√(2/π)(1 + 4e^{−3/2})`, the limit of `t^{3/2}‖U³e^{tU}‖/3`.
pub fn c_tilde_tv() -> f64 {
    (2.0 / std::f64::consts::PI).sqrt() * (1.0 + 4.0 * (-1.5f64).exp()) / 3.0
}

/// `C̃_L = (3π)^{−1/2} exp{√(3/2) − 3/2} √(3 − √6)`, the local-norm analogue.
pub fn c_tilde_local() -> f64 {
    let s = (1.5f64).sqrt();
    (3.0 * std::f64::consts::PI).sqrt().recip() * (s - 1.5).exp() * (3.0 - 6f64.sqrt()).sqrt()
}
