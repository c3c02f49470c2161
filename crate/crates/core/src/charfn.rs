//! Characteristic-function factorization and Bergström expansion terms.
//!
//! For 1-dependent summands with `Z_k = e^{itX_k} − 1` the transform of `S_n`
//! factors as `F̂_n(t) = φ₁(t)⋯φ_n(t)` with
//!
//! ```text
//! φ_k = 1 + E Z_k + Σ_{j<k} ŵE(Z_j, …, Z_k) / (φ_j ⋯ φ_{k−1}).
//! ```
//!
//! Swapping each `φ_j` for a reference factor (`ψ_j` for the Poisson base,
//! `g_j` for the signed compound Poisson base) and collecting the terms
//! with exactly `l` swapped-back factors gives the order-`l` Bergström term,
//! realized here by inverse DFT.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::cumulants::{MomentOracle, WindowFunc};
use crate::error::{arg, Error, Result};
use crate::measure::LatticeMeasure;
use crate::models::DependentModel;

/// Exact recursion up to this many summands by default, depth 40 beyond.
pub const EXACT_DEPTH_LIMIT: usize = 2048;

/// Default truncated depth for long sequences.
pub const DEFAULT_LONG_DEPTH: usize = 40;

/// Default recursion depth for `n` summands.
pub fn default_depth(n: usize) -> usize {
    if n <= EXACT_DEPTH_LIMIT {
        n
    } else {
        DEFAULT_LONG_DEPTH
    }
}

/// Factors of the transform at one `t`.
#[derive(Debug, Clone)]
pub struct FactorSet {
    pub t: f64,
    pub phis: Vec<Complex64>,
    /// `ψ_j = exp{ν₁(j)z}`.
    pub psis: Vec<Complex64>,
    /// `g_j = exp{ν₁(j)z + ((ν₂(j) − ν₁²(j))/2 + ŵE(X_{j−1}, X_j))z²}`.
    pub gs: Vec<Complex64>,
    pub depth: usize,
    /// Bound on the largest `|φ_k|` error from dropping terms with `k − j ≥ depth`.
    pub tail_bound: f64,
}

impl FactorSet {
    pub fn product(&self) -> Complex64 {
        self.phis.iter().product()
    }

    /// `max_k |φ_k − 1|`.
    pub fn max_deviation(&self) -> f64 {
        self.phis.iter().map(|p| (p - 1.0).norm()).fold(0.0, f64::max)
    }
}

/// Reference factor family for Bergström terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BergstromBase {
    Pois,
    G,
}

impl std::str::FromStr for BergstromBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pois" => Ok(BergstromBase::Pois),
            "g" => Ok(BergstromBase::G),
            _ => arg(format!("unknown Bergström base `{s}` (expected pois or g)")),
        }
    }
}

/// Evaluates factor sets of one model at many `t`.
pub struct Factorizer<'a> {
    model: &'a DependentModel,
    depth: usize,
    nu1: Vec<f64>,
    quad: Vec<f64>,
}

impl<'a> Factorizer<'a> {
    pub fn new(model: &'a DependentModel, depth: usize) -> Result<Self> {
        let n = model.n();
        if model.dependence() > 1 {
            return arg("the factorization needs 1-dependent summands; group the model first");
        }
        if depth == 0 || depth > n {
            return arg(format!("depth {depth} outside 1..={n}"));
        }
        let o = MomentOracle::new(model);
        let nu1: Vec<f64> = (1..=n as i64).map(|k| o.nu(k, 1)).collect();
        let quad = (1..=n as i64)
            .map(|k| {
                let v1 = nu1[k as usize - 1];
                let pair = o.centered(k - 1, &[WindowFunc::Identity, WindowFunc::Identity], false).re;
                (o.nu(k, 2) - v1 * v1) / 2.0 + pair
            })
            .collect();
        Ok(Factorizer { model, depth, nu1, quad })
    }

    pub fn factors_at(&self, t: f64) -> Result<FactorSet> {
        let n = self.model.n();
        let depth = self.depth;
        let o = MomentOracle::new_light(self.model);
        let zf = WindowFunc::CharDiff(t);
        let funcs = vec![zf; depth];
        // e[a][i] = E Z_{a+1} ⋯ Z_{a+1+i}
        let e: Vec<Vec<Complex64>> = (1..=n).map(|a| o.prefixes(a, &funcs[..depth.min(n - a + 1)])).collect();

        let mut phis: Vec<Complex64> = Vec::with_capacity(n);
        // w[j][i] = ŵE(Z_{j+1}, …, Z_{j+1+i}); computed lazily per start
        let mut w: Vec<Vec<Complex64>> = Vec::with_capacity(n);
        for j in 0..n {
            let len = depth.min(n - j);
            let mut row = Vec::with_capacity(len);
            for i in 0..len {
                let mut v = e[j][i];
                for l in 0..i {
                    v -= row[l] * e[j + l + 1][i - l - 1];
                }
                row.push(v);
            }
            w.push(row);
        }
        let z = Complex64::from_polar(1.0, t) - 1.0;
        let s2 = (t / 2.0).sin().powi(2);
        let decay: f64 = 0.4 * 10.0 / 9.0;
        let mut tail_bound: f64 = 0.0;
        for k in 0..n {
            let mut phi = Complex64::new(1.0, 0.0);
            let mut denom = Complex64::new(1.0, 0.0);
            let lo = (k + 1).saturating_sub(depth);
            for j in (lo..=k).rev() {
                if j < k {
                    denom *= phis[j];
                }
                phi += w[j][k - j] / denom;
            }
            if phi.norm() < 0.5 {
                return Err(Error::Numerical(format!(
                    "|φ_{}({t})| = {} < 1/2; the sufficient conditions fail for this model",
                    k + 1,
                    phi.norm()
                )));
            }
            if k + 1 > depth {
                let prev = if k > 0 { self.nu1[k - 1] } else { 0.0 };
                let geo = decay.powi(depth as i32) / (1.0 - decay);
                tail_bound = tail_bound.max(10.0 * s2 * (self.nu1[k] + prev) * geo);
            }
            phis.push(phi);
        }
        let psis = self.nu1.iter().map(|&v| (z * v).exp()).collect();
        let gs = self.nu1.iter().zip(&self.quad).map(|(&v, &q)| (z * v + z * z * q).exp()).collect();
        Ok(FactorSet { t, phis, psis, gs, depth, tail_bound })
    }
}

/// Heinrich factors of `model` at `t`, recursion truncated at `depth`.
pub fn heinrich_factors(model: &DependentModel, t: f64, depth: usize) -> Result<FactorSet> {
    Factorizer::new(model, depth)?.factors_at(t)
}

/// Inverts `values[k] = M̂(2πk/L)` for a measure supported on `0..L`.
/// Returns the measure and the largest imaginary residue.
pub fn invert_on_grid(values: &[Complex64]) -> (LatticeMeasure, f64) {
    let len = values.len();
    let mut buf = values.to_vec();
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let scale = 1.0 / len as f64;
    let imag = buf.iter().map(|c| (c.im * scale).abs()).fold(0.0, f64::max);
    (LatticeMeasure::new(0, buf.iter().map(|c| c.re * scale).collect()), imag)
}

/// Bergström terms of orders `0..=max_order`.
#[derive(Debug, Clone)]
pub struct BergstromTerms {
    pub base: BergstromBase,
    pub grid: usize,
    /// `terms[l]` is `Brg_l`; `terms[0]` is the base measure.
    pub terms: Vec<LatticeMeasure>,
    /// Largest imaginary part left after inversion.
    pub max_imag: f64,
    pub depth: usize,
}

impl BergstromTerms {
    /// `Σ_{l≤s} Brg_l`.
    pub fn partial_sum(&self, s: usize) -> LatticeMeasure {
        self.terms.iter().take(s + 1).fold(LatticeMeasure::zero(), |acc, m| acc.add(m))
    }
}

/// Smallest accepted grid: support of `F_n` plus `l` points.
pub fn min_grid(model: &DependentModel, order: usize) -> Result<usize> {
    let support = model.exact_distribution()?.last() as usize + 1;
    Ok(support + order)
}

/// Default grid: next power of two at least twice the support of `F_n`.
pub fn default_grid(model: &DependentModel, order: usize) -> Result<usize> {
    Ok((2 * min_grid(model, order)?).next_power_of_two().max(64))
}

/// Bergström terms `Brg_0, …, Brg_max_order` via the elementary-symmetric
/// recursion `c_l ← c_l·b_j + c_{l−1}(φ_j − b_j)` on a DFT grid of `grid` points.
#[allow(clippy::needless_range_loop)]
pub fn bergstrom_terms(
    model: &DependentModel,
    max_order: usize,
    base: BergstromBase,
    grid: usize,
    depth: usize,
) -> Result<BergstromTerms> {
    if max_order > model.n() {
        return arg(format!("order {max_order} exceeds n = {}", model.n()));
    }
    let need = min_grid(model, max_order)?;
    if grid < need {
        return arg(format!("grid {grid} too small; need at least {need} points"));
    }
    let f = Factorizer::new(model, depth)?;
    let mut values = vec![vec![Complex64::new(0.0, 0.0); grid]; max_order + 1];
    for k in 0..grid {
        let t = 2.0 * std::f64::consts::PI * k as f64 / grid as f64;
        let fs = f.factors_at(t)?;
        let bases = match base {
            BergstromBase::Pois => &fs.psis,
            BergstromBase::G => &fs.gs,
        };
        let mut c = vec![Complex64::new(0.0, 0.0); max_order + 1];
        c[0] = Complex64::new(1.0, 0.0);
        for (phi, b) in fs.phis.iter().zip(bases) {
            let d = phi - b;
            for l in (0..=max_order).rev() {
                c[l] = c[l] * b + if l > 0 { c[l - 1] * d } else { Complex64::new(0.0, 0.0) };
            }
        }
        for (l, v) in c.into_iter().enumerate() {
            values[l][k] = v;
        }
    }
    let mut max_imag: f64 = 0.0;
    let terms = values
        .iter()
        .map(|v| {
            let (m, im) = invert_on_grid(v);
            max_imag = max_imag.max(im);
            m
        })
        .collect();
    Ok(BergstromTerms { base, grid, terms, max_imag, depth })
}

/// The single term `Brg_l`.
pub fn bergstrom_measure(model: &DependentModel, l: usize, base: BergstromBase, grid: usize) -> Result<LatticeMeasure> {
    let mut t = bergstrom_terms(model, l, base, grid, default_depth(model.n()))?;
    Ok(t.terms.swap_remove(l))
}
