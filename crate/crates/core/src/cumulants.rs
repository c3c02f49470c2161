//! Centered mixed moments and factorial cumulants of 1-dependent sums.
//!
//! `ŵE(Y₁,…,Y_k) = E Y₁⋯Y_k − Σ_{j<k} ŵE(Y₁,…,Y_j) E Y_{j+1}⋯Y_k` and its
//! all-plus majorant `ŵE⁺` are evaluated exactly from window expectations.
//! For 1-dependent summands the factorial cumulants are
//!
//! ```text
//! Γ₁ = Σ ν₁(k)
//! Γ₂ = ½ Σ (ν₂(k) − ν₁²(k)) + Σ ŵE(X_{k−1}, X_k)
//! Γ₃ = ⅙ Σ (ν₃ − 3ν₁ν₂ + 2ν₁³)(k) − Σ (ν₁(k−1) + ν₁(k)) ŵE(X_{k−1}, X_k)
//!      + ½ Σ [ŵE(X_{k−1}^{(2)}, X_k) + ŵE(X_{k−1}, X_k^{(2)})] + Σ ŵE(X_{k−2}, X_{k−1}, X_k)
//! ```
//!
//! with `X^{(j)} = X(X−1)⋯(X−j+1)` and `X_k ≡ 0` for `k ≤ 0`.

use std::collections::HashMap;
use std::sync::Mutex;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{arg, Result};
use crate::models::DependentModel;

/// Transform applied to one summand inside a window product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowFunc {
    /// `x`.
    Identity,
    /// `x(x−1)⋯(x−j+1)`, `1 ≤ j ≤ 4`.
    FactorialPower(u8),
    /// `e^{itx} − 1`.
    CharDiff(f64),
    /// `1`; lets a window skip a summand.
    Constant,
}

impl WindowFunc {
    pub fn eval(self, x: u64) -> Complex64 {
        match self {
            WindowFunc::Identity => Complex64::new(x as f64, 0.0),
            WindowFunc::FactorialPower(j) => {
                let mut v = 1.0;
                for i in 0..j as u64 {
                    v *= x as f64 - i as f64;
                }
                Complex64::new(v, 0.0)
            }
            WindowFunc::CharDiff(t) => Complex64::from_polar(1.0, t * x as f64) - 1.0,
            WindowFunc::Constant => Complex64::new(1.0, 0.0),
        }
    }

    fn key(self) -> (u8, u64) {
        match self {
            WindowFunc::Identity => (0, 1),
            WindowFunc::FactorialPower(1) => (0, 1),
            WindowFunc::FactorialPower(j) => (0, j as u64),
            WindowFunc::CharDiff(t) => (1, t.to_bits()),
            WindowFunc::Constant => (2, 0),
        }
    }

    fn is_real(self) -> bool {
        !matches!(self, WindowFunc::CharDiff(_))
    }

    fn validate(self) -> Result<()> {
        match self {
            WindowFunc::FactorialPower(j) if !(1..=4).contains(&j) => {
                arg(format!("factorial power degree {j} outside 1..=4"))
            }
            WindowFunc::CharDiff(t) if !t.is_finite() => arg("non-finite t"),
            _ => Ok(()),
        }
    }
}

type OracleKey = (Vec<u64>, Vec<usize>, Vec<(u8, u64)>);

/// Memoized window expectations of one model.
///
/// Windows whose starting state law, kernels and transforms coincide share
/// one evaluation, so homogeneous stationary models cost O(1) per shape.
pub struct MomentOracle<'a> {
    model: &'a DependentModel,
    marginals: Option<Vec<Vec<f64>>>,
    cache: Mutex<HashMap<OracleKey, Vec<Complex64>>>,
}

const MARGINAL_TABLE_CAP: usize = 1 << 24;

impl<'a> MomentOracle<'a> {
    pub fn new(model: &'a DependentModel) -> Self {
        let n = model.n();
        let marginals = if (n + 1).saturating_mul(model.n_states()) <= MARGINAL_TABLE_CAP {
            Some((0..=n).map(|k| model.state_marginal(k)).collect())
        } else {
            None
        };
        MomentOracle { model, marginals, cache: Mutex::new(HashMap::new()) }
    }

    pub fn model(&self) -> &DependentModel {
        self.model
    }

    fn marginal(&self, k: usize) -> std::borrow::Cow<'_, [f64]> {
        match &self.marginals {
            Some(m) => std::borrow::Cow::Borrowed(&m[k]),
            None => std::borrow::Cow::Owned(self.model.state_marginal(k)),
        }
    }

    /// Prefix products `E ∏_{i≤j} f_i(X_{start+i})`, `j = 0..len`.
    pub fn prefixes(&self, start: usize, funcs: &[WindowFunc]) -> Vec<Complex64> {
        let marginal = self.marginal(start - 1);
        let key: OracleKey = (
            marginal.iter().map(|w| w.to_bits()).collect(),
            self.model.kernel_ids(start, funcs.len()).to_vec(),
            funcs.iter().map(|f| f.key()).collect(),
        );
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return v.clone();
        }
        let v = self.model.prefix_expectations_from(&marginal, start, funcs);
        self.cache.lock().unwrap().insert(key, v.clone());
        v
    }

    /// `ν_j(k)`, zero for `k ∉ 1..=n`.
    pub fn nu(&self, k: i64, j: u8) -> f64 {
        if k < 1 || k as usize > self.model.n() {
            return 0.0;
        }
        self.prefixes(k as usize, &[WindowFunc::FactorialPower(j)])[0].re
    }

    /// `E ∏ f_i(X_{start+i})`, zero when the window reaches below index 1.
    pub fn expect(&self, start: i64, funcs: &[WindowFunc]) -> Complex64 {
        if start < 1 || funcs.is_empty() {
            return Complex64::new(0.0, 0.0);
        }
        *self.prefixes(start as usize, funcs).last().unwrap()
    }

    /// `ŵE` (or `ŵE⁺` when `plus`) of a window; windows reaching below
    /// index 1 contain a zero factor and give 0.
    pub fn centered(&self, start: i64, funcs: &[WindowFunc], plus: bool) -> Complex64 {
        if start < 1 || funcs.is_empty() {
            return Complex64::new(0.0, 0.0);
        }
        let start = start as usize;
        let len = funcs.len();
        // e[i][j] = E Y_i ⋯ Y_j
        let e: Vec<Vec<Complex64>> = (0..len).map(|i| self.prefixes(start + i, &funcs[i..])).collect();
        let sign = if plus { 1.0 } else { -1.0 };
        let mut w: Vec<Complex64> = Vec::with_capacity(len);
        for j in 0..len {
            let mut v = e[0][j];
            for l in 0..j {
                v += sign * w[l] * e[l + 1][j - l - 1];
            }
            w.push(v);
        }
        w[len - 1]
    }

    /// Everything [`summand_terms`] reads for summand `k`: the state laws
    /// before indices `k−3..=k` (a sentinel below index 1) and the kernels
    /// of the steps in `max(1, k−3)..=k`.
    fn context_key(&self, k: i64) -> Vec<u64> {
        let mut key = Vec::new();
        for start in k - 3..=k {
            if start < 1 {
                key.push(u64::MAX);
            } else {
                key.extend(self.marginal(start as usize - 1).iter().map(|w| w.to_bits()));
            }
        }
        let first = (k - 3).max(1) as usize;
        key.extend(self.model.kernel_ids(first, k as usize + 1 - first).iter().map(|&i| i as u64));
        key
    }

    fn check(&self, start: usize, funcs: &[WindowFunc]) -> Result<()> {
        if funcs.is_empty() {
            return arg("empty window");
        }
        for f in funcs {
            f.validate()?;
        }
        if start == 0 || start + funcs.len() - 1 > self.model.n() {
            return arg(format!("window [{start}, {}] outside 1..={}", start + funcs.len() - 1, self.model.n()));
        }
        Ok(())
    }
}

/// `ŵE(f₁(X_start), …, f_L(X_{start+L−1}))`.
pub fn hat_e(model: &DependentModel, start: usize, funcs: &[WindowFunc]) -> Result<Complex64> {
    let o = MomentOracle::new_light(model);
    o.check(start, funcs)?;
    Ok(o.centered(start as i64, funcs, false))
}

/// `ŵE⁺(f₁(X_start), …)` for real transforms.
pub fn hat_e_plus(model: &DependentModel, start: usize, funcs: &[WindowFunc]) -> Result<f64> {
    let o = MomentOracle::new_light(model);
    o.check(start, funcs)?;
    if funcs.iter().any(|f| !f.is_real()) {
        return arg("hat_e_plus needs real-valued transforms");
    }
    Ok(o.centered(start as i64, funcs, true).re)
}

impl<'a> MomentOracle<'a> {
    /// Oracle without the precomputed marginal table, for one-off queries.
    pub fn new_light(model: &'a DependentModel) -> Self {
        MomentOracle { model, marginals: None, cache: Mutex::new(HashMap::new()) }
    }
}

/// Which sufficient conditions hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConditionFlags {
    /// `ν₁(k) ≤ 1/100` and `ν₂(k) ≤ ν₁(k)` for every `k`.
    pub nu12: bool,
    /// `λ > 0`.
    pub lambda_ok: bool,
    /// `Σν₂(k) ≤ Γ₁/20` and `Σ|Cov(X_{k−1},X_k)| ≤ Γ₁/20`.
    pub cond_3ab: bool,
    /// `λ > 0.2Γ₁`; `None` unless both `nu12` and `cond_3ab` hold, in which
    /// case it must be `Some(true)`.
    pub implied_lambda: Option<bool>,
}

impl ConditionFlags {
    pub fn all(&self) -> bool {
        self.nu12 && self.lambda_ok && self.cond_3ab
    }

    /// Compact form used in CSV output, e.g. `nu12+lambda+3ab`.
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if self.nu12 {
            parts.push("nu12");
        }
        if self.lambda_ok {
            parts.push("lambda");
        }
        if self.cond_3ab {
            parts.push("3ab");
        }
        if parts.is_empty() {
            "none".into()
        } else {
            parts.join("+")
        }
    }
}

/// Factorial cumulants, condition quantity and remainder terms of `S_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CumulantSet {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub lambda: f64,
    pub r0: f64,
    pub r1: f64,
    pub r2: f64,
    pub n: usize,
    /// `Σ ν₂(k)`.
    pub sum_nu2: f64,
    /// `Σ |Cov(X_{k−1}, X_k)|`.
    pub sum_abs_cov: f64,
    pub flags: ConditionFlags,
}

impl CumulantSet {
    /// Cumulants of an arbitrary set `Γ₁, Γ₂, Γ₃`, with every other field
    /// zero and no condition flags set.
    pub fn from_gammas(gamma1: f64, gamma2: f64, gamma3: f64) -> Self {
        CumulantSet {
            gamma1,
            gamma2,
            gamma3,
            lambda: 0.0,
            r0: 0.0,
            r1: 0.0,
            r2: 0.0,
            n: 0,
            sum_nu2: 0.0,
            sum_abs_cov: 0.0,
            flags: ConditionFlags { nu12: false, lambda_ok: false, cond_3ab: false, implied_lambda: None },
        }
    }
}

/// All cumulant quantities of a model with dependence at most 1.
pub fn gamma_set(model: &DependentModel) -> Result<CumulantSet> {
    gamma_set_with(&MomentOracle::new(model))
}

/// As [`gamma_set`], reusing an oracle's cache.
pub fn gamma_set_with(o: &MomentOracle<'_>) -> Result<CumulantSet> {
    let model = o.model();
    if model.dependence() > 1 {
        return arg(format!(
            "cumulant formulas need 1-dependent summands, model has dependence {}; group it first",
            model.dependence()
        ));
    }
    let n = model.n();
    let (mut g1, mut g2, mut g3) = (0.0, 0.0, 0.0);
    let (mut sum_nu2, mut sum_cross, mut sum_abs_cov) = (0.0, 0.0, 0.0);
    let (mut r0, mut r1, mut r2) = (0.0, 0.0, 0.0);
    let mut nu12 = true;
    // Summands sharing a context contribute identical terms.
    let mut memo: HashMap<Vec<u64>, SummandTerms> = HashMap::new();
    for k in 1..=n as i64 {
        let t = *memo.entry(o.context_key(k)).or_insert_with(|| summand_terms(o, k));
        nu12 &= t.nu1 <= 0.01 && t.nu2 <= t.nu1;
        sum_nu2 += t.nu2;
        g1 += t.nu1;
        g2 += t.g2;
        g3 += t.g3;
        sum_cross += t.exy;
        sum_abs_cov += t.abs_cov;
        r0 += t.r0;
        r1 += t.r1;
        r2 += t.r2;
    }
    let lambda = g1 - 1.52 * sum_nu2 - 12.0 * sum_cross;
    let cond_3ab = sum_nu2 <= g1 / 20.0 && sum_abs_cov <= g1 / 20.0;
    let flags = ConditionFlags {
        nu12,
        lambda_ok: lambda > 0.0,
        cond_3ab,
        implied_lambda: (nu12 && cond_3ab).then_some(lambda > 0.2 * g1),
    };
    Ok(CumulantSet { gamma1: g1, gamma2: g2, gamma3: g3, lambda, r0, r1, r2, n, sum_nu2, sum_abs_cov, flags })
}

/// Contribution of summand `k` to every sum in [`gamma_set`].
#[derive(Debug, Clone, Copy)]
struct SummandTerms {
    nu1: f64,
    nu2: f64,
    g2: f64,
    g3: f64,
    exy: f64,
    abs_cov: f64,
    r0: f64,
    r1: f64,
    r2: f64,
}

fn summand_terms(o: &MomentOracle<'_>, k: i64) -> SummandTerms {
    use WindowFunc::{FactorialPower as F, Identity as I};
    let re = |start: i64, funcs: &[WindowFunc], plus: bool| o.centered(start, funcs, plus).re;
    let v1 = o.nu(k, 1);
    let v2 = o.nu(k, 2);
    let v3 = o.nu(k, 3);
    let v4 = o.nu(k, 4);
    let exy = o.expect(k - 1, &[I, I]).re;
    let pair = re(k - 1, &[I, I], false);
    let g2 = 0.5 * (v2 - v1 * v1) + pair;
    let g3 = (v3 - 3.0 * v1 * v2 + 2.0 * v1 * v1 * v1) / 6.0 - (o.nu(k - 1, 1) + v1) * pair
        + 0.5 * (re(k - 1, &[F(2), I], false) + re(k - 1, &[I, F(2)], false))
        + re(k - 2, &[I, I, I], false);

    let lag3 = o.nu(k - 2, 1) + o.nu(k - 1, 1) + v1;
    let plus2_pair = re(k - 1, &[F(2), I], true) + re(k - 1, &[I, F(2)], true);
    let plus_triple = re(k - 2, &[I, I, I], true);
    let r0 = v2 + v1 * v1 + exy;
    let r1 = v1.powi(3) + v1 * v2 + v3 + lag3 * exy + plus2_pair + plus_triple;

    let lag4 = lag3 + o.nu(k - 3, 1);
    let plus2_triple = re(k - 2, &[F(2), I, I], true) + re(k - 2, &[I, F(2), I], true) + re(k - 2, &[I, I, F(2)], true);
    let plus3_pair = re(k - 1, &[F(3), I], true) + re(k - 1, &[F(2), F(2)], true) + re(k - 1, &[I, F(3)], true);
    let plus_quad = re(k - 3, &[I, I, I, I], true);
    let r2 = v1.powi(4)
        + v2 * v2
        + v4
        + lag3 * (v3 + plus2_pair)
        + exy * exy
        + lag4 * plus_triple
        + plus2_triple
        + plus3_pair
        + plus_quad;
    SummandTerms { nu1: v1, nu2: v2, g2, g3, exy, abs_cov: pair.abs(), r0, r1, r2 }
}

/// Condition flags of a model.
pub fn check_conditions(model: &DependentModel) -> Result<ConditionFlags> {
    Ok(gamma_set(model)?.flags)
}
