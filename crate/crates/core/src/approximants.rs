//! Approximating measures built from factorial cumulants.
//!
//! All kinds are [`LatticeMeasure`]s. Infinite-support laws are cut where
//! the remaining mass falls below the requested tolerance and the cut mass
//! is kept in [`Approximant::truncation_mass`], so that a reported distance
//! plus that mass is an upper bound for the untruncated distance.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::cumulants::CumulantSet;
use crate::error::{arg, Error, Result};
use crate::measure::{delta_plus_u_power, LatticeMeasure};

/// Approximant families. CLI names: `pois g pois+ g+ tp nb nb+ bi bi+`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ApproximantKind {
    Pois,
    GSigned,
    PoisExpanded,
    GExpanded,
    TranslatedPois,
    NegBinomial,
    NbExpanded,
    Binomial,
    BiExpanded,
}

impl ApproximantKind {
    pub const ALL: [ApproximantKind; 9] = [
        ApproximantKind::Pois,
        ApproximantKind::GSigned,
        ApproximantKind::PoisExpanded,
        ApproximantKind::GExpanded,
        ApproximantKind::TranslatedPois,
        ApproximantKind::NegBinomial,
        ApproximantKind::NbExpanded,
        ApproximantKind::Binomial,
        ApproximantKind::BiExpanded,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ApproximantKind::Pois => "pois",
            ApproximantKind::GSigned => "g",
            ApproximantKind::PoisExpanded => "pois+",
            ApproximantKind::GExpanded => "g+",
            ApproximantKind::TranslatedPois => "tp",
            ApproximantKind::NegBinomial => "nb",
            ApproximantKind::NbExpanded => "nb+",
            ApproximantKind::Binomial => "bi",
            ApproximantKind::BiExpanded => "bi+",
        }
    }

    /// The family an expansion corrects, or `self` for base families.
    pub fn base(self) -> ApproximantKind {
        match self {
            ApproximantKind::PoisExpanded => ApproximantKind::Pois,
            ApproximantKind::GExpanded => ApproximantKind::GSigned,
            ApproximantKind::NbExpanded => ApproximantKind::NegBinomial,
            ApproximantKind::BiExpanded => ApproximantKind::Binomial,
            k => k,
        }
    }

    pub fn is_expansion(self) -> bool {
        self.base() != self
    }

    /// Whether the measure is a probability law (nonnegative weights).
    pub fn is_probability(self) -> bool {
        matches!(
            self,
            ApproximantKind::Pois
                | ApproximantKind::TranslatedPois
                | ApproximantKind::NegBinomial
                | ApproximantKind::Binomial
        )
    }

    /// Whether the kind's parameter preconditions hold for `c`.
    pub fn applies_to(self, c: &CumulantSet) -> bool {
        check_preconditions(self, c).is_ok()
    }
}

impl fmt::Display for ApproximantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for ApproximantKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "pois" => ApproximantKind::Pois,
            "g" | "g_signed" => ApproximantKind::GSigned,
            "pois+" | "pois_expanded" => ApproximantKind::PoisExpanded,
            "g+" | "g_expanded" => ApproximantKind::GExpanded,
            "tp" | "translated_pois" => ApproximantKind::TranslatedPois,
            "nb" | "neg_binomial" => ApproximantKind::NegBinomial,
            "nb+" | "nb_expanded" => ApproximantKind::NbExpanded,
            "bi" | "binomial" => ApproximantKind::Binomial,
            "bi+" | "bi_expanded" => ApproximantKind::BiExpanded,
            _ => return arg(format!("unknown approximant kind `{s}`")),
        })
    }
}

/// Derived scalar parameters; fields not used by a kind are `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ApproxParams {
    /// TP shift `a = ⌊−2Γ₂⌋`.
    pub a: Option<i64>,
    /// TP fractional part `δ̃ = −2Γ₂ − a`.
    pub delta_tilde: Option<f64>,
    /// NB shape `r = Γ₁²/(2Γ₂)`.
    pub r: Option<f64>,
    /// NB `q̄` with `(1−q̄)/q̄ = 2Γ₂/Γ₁`.
    pub q_bar: Option<f64>,
    /// BI `Ñ = Γ₁²/(2|Γ₂|)`.
    pub n_tilde: Option<f64>,
    /// BI `N = ⌊Ñ⌋`.
    pub n_trials: Option<u64>,
    /// BI `p̄ = Γ₁/N`.
    pub p_bar: Option<f64>,
    /// BI `ε = Ñ − N`.
    pub eps: Option<f64>,
    /// Coefficient `c` of the correction factor `δ + cU^j`.
    pub coefficient: Option<f64>,
}

/// A realized approximant.
#[derive(Debug, Clone, Serialize)]
pub struct Approximant {
    pub kind: ApproximantKind,
    pub params: ApproxParams,
    #[serde(skip)]
    pub measure: LatticeMeasure,
    /// Total-variation mass not represented in `measure`.
    pub truncation_mass: f64,
}

/// Default truncation tolerance for infinite-support laws.
pub const DEFAULT_TRUNCATION: f64 = 1e-12;

fn check_preconditions(kind: ApproximantKind, c: &CumulantSet) -> Result<()> {
    if !(c.gamma1 > 0.0) || !c.gamma1.is_finite() {
        return arg(format!("{kind} needs Γ₁ > 0, got {}", c.gamma1));
    }
    match kind.base() {
        ApproximantKind::NegBinomial => {
            if c.gamma2 == 0.0 {
                return Err(Error::Degenerate(format!("{kind} needs Γ₂ ≠ 0; its parameters diverge at Γ₂ = 0")));
            }
            if c.gamma2 < 0.0 {
                return arg(format!("{kind} needs Γ₂ > 0, got {}", c.gamma2));
            }
        }
        ApproximantKind::Binomial => {
            if c.gamma2 == 0.0 {
                return Err(Error::Degenerate(format!("{kind} needs Γ₂ ≠ 0; its parameters diverge at Γ₂ = 0")));
            }
            if c.gamma2 > 0.0 {
                return arg(format!("{kind} needs Γ₂ < 0, got {}", c.gamma2));
            }
            if c.gamma1 < 1.0 {
                return arg(format!("{kind} needs Γ₁ ≥ 1, got {}", c.gamma1));
            }
            let (n, _, _) = binomial_params(c);
            if (n as f64) < c.gamma1 {
                return arg(format!("{kind} needs N ≥ Γ₁ so that p̄ ≤ 1 (N = {n}, Γ₁ = {})", c.gamma1));
            }
        }
        ApproximantKind::TranslatedPois => {
            if c.gamma1 < 1.0 {
                return arg(format!("{kind} needs Γ₁ ≥ 1, got {}", c.gamma1));
            }
            let (a, _) = tp_params(c);
            if c.gamma1 - a as f64 <= 0.0 {
                return arg(format!("{kind} needs Γ₁ + 2Γ₂ + δ̃ > 0"));
            }
        }
        _ => {}
    }
    Ok(())
}

fn tp_params(c: &CumulantSet) -> (i64, f64) {
    let x = -2.0 * c.gamma2;
    let a = x.floor();
    (a as i64, x - a)
}

fn nb_params(c: &CumulantSet) -> (f64, f64) {
    let kappa = 2.0 * c.gamma2 / c.gamma1;
    (c.gamma1 * c.gamma1 / (2.0 * c.gamma2), 1.0 / (1.0 + kappa))
}

/// `(N, p̄, ε)` from `Ñ = Γ₁²/(2|Γ₂|)`.
fn binomial_params(c: &CumulantSet) -> (u64, f64, f64) {
    let n_tilde = c.gamma1 * c.gamma1 / (2.0 * c.gamma2.abs());
    let n = n_tilde.floor();
    (n as u64, c.gamma1 / n, n_tilde - n)
}

/// Correction coefficient `Γ₃ − Np̄³/3` for the binomial expansion.
fn bi_coefficient(c: &CumulantSet) -> f64 {
    let (n, p, _) = binomial_params(c);
    c.gamma3 - n as f64 * p.powi(3) / 3.0
}

/// `A = (a³/6)(n−m+1)m(m−1)`, the binomial correction for `(k₁,k₂)`-events.
pub fn k1k2_expansion_coefficient(n: usize, m: usize, a: f64) -> f64 {
    a.powi(3) / 6.0 * (n + 1 - m) as f64 * (m * (m - 1)) as f64
}

/// Correction factor `δ + cU^j` of an expanded kind.
pub fn expansion_factor(kind: ApproximantKind, c: &CumulantSet) -> Result<LatticeMeasure> {
    let (coef, j) = expansion_coefficient(kind, c)?;
    Ok(delta_plus_u_power(coef, j))
}

fn expansion_coefficient(kind: ApproximantKind, c: &CumulantSet) -> Result<(f64, u32)> {
    Ok(match kind {
        ApproximantKind::PoisExpanded => (c.gamma2, 2),
        ApproximantKind::GExpanded => (c.gamma3, 3),
        ApproximantKind::NbExpanded => (c.gamma3 - 4.0 * c.gamma2 * c.gamma2 / (3.0 * c.gamma1), 3),
        ApproximantKind::BiExpanded => {
            check_preconditions(kind, c)?;
            (bi_coefficient(c), 3)
        }
        k => return arg(format!("{k} has no correction factor")),
    })
}

/// Builds an approximant. `tol` bounds the mass dropped from infinite tails.
pub fn make_approximant(kind: ApproximantKind, c: &CumulantSet, tol: f64) -> Result<Approximant> {
    if !(tol > 0.0) {
        return arg("truncation tolerance must be positive");
    }
    check_preconditions(kind, c)?;
    let mut params = ApproxParams::default();
    let (measure, truncation_mass) = match kind.base() {
        ApproximantKind::Pois => poisson_pmf(c.gamma1, tol),
        ApproximantKind::GSigned => {
            let exponent = LatticeMeasure::new(0, vec![c.gamma2 - c.gamma1, c.gamma1 - 2.0 * c.gamma2, c.gamma2]);
            let (e, bound) = exponent.exp_measure_with_bound(tol / 2.0)?;
            let (m, cut) = e.truncate_tail(tol / 2.0);
            (m, bound + cut)
        }
        ApproximantKind::TranslatedPois => {
            let (a, dt) = tp_params(c);
            params.a = Some(a);
            params.delta_tilde = Some(dt);
            let (m, cut) = poisson_pmf(c.gamma1 + 2.0 * c.gamma2 + dt, tol);
            (m.shift(a), cut)
        }
        ApproximantKind::NegBinomial => {
            let (r, q) = nb_params(c);
            params.r = Some(r);
            params.q_bar = Some(q);
            neg_binomial_pmf(r, q, tol)
        }
        ApproximantKind::Binomial => {
            let (n, p, eps) = binomial_params(c);
            params.n_tilde = Some(n as f64 + eps);
            params.n_trials = Some(n);
            params.p_bar = Some(p);
            params.eps = Some(eps);
            binomial_pmf(n, p, tol)
        }
        _ => unreachable!("base kinds are covered"),
    };
    let (measure, truncation_mass) = if kind.is_expansion() {
        let (coef, j) = expansion_coefficient(kind, c)?;
        params.coefficient = Some(coef);
        let factor = delta_plus_u_power(coef, j);
        (measure.convolve(&factor)?, truncation_mass * factor.tv_norm())
    } else {
        (measure, truncation_mass)
    };
    Ok(Approximant { kind, params, measure, truncation_mass })
}

/// Unimodal pmf grown in both directions from `mode`, where
/// `ratio(j) = P(j+1)/P(j)` and `ratio_sup(j) ≥ sup_{i≥j} ratio(i)`; below
/// the mode the pmf is assumed log-concave. Weights are normalized to
/// `1 − B` where `B` bounds the dropped tails, and `2B` is returned as the
/// TV error budget, which absorbs the rounding of `log_p_mode` as well.
fn unimodal_pmf(
    mode: u64,
    log_p_mode: f64,
    upper: Option<u64>,
    ratio: impl Fn(u64) -> f64,
    ratio_sup: impl Fn(u64) -> f64,
    tol: f64,
) -> (LatticeMeasure, f64) {
    let cut = tol * 1e-2;
    let p_mode = log_p_mode.exp();
    let mut bound = 0.0;
    let mut below = Vec::new();
    let mut v = p_mode;
    let mut j = mode;
    while j > 0 {
        v /= ratio(j - 1);
        j -= 1;
        let rho = if j > 0 { 1.0 / ratio(j - 1) } else { 0.0 };
        if rho < 1.0 && v / (1.0 - rho) < cut {
            bound += v / (1.0 - rho);
            break;
        }
        below.push(v);
    }
    let lo = mode - below.len() as u64;
    let mut weights: Vec<f64> = below.into_iter().rev().collect();
    weights.push(p_mode);
    let mut v = p_mode;
    let mut j = mode;
    while upper.is_none_or(|u| j < u) {
        v *= ratio(j);
        j += 1;
        let rho = ratio_sup(j);
        if rho < 1.0 && v / (1.0 - rho) < cut {
            bound += v / (1.0 - rho);
            break;
        }
        weights.push(v);
    }
    let total: f64 = weights.iter().sum();
    let scale = (1.0 - bound) / total;
    for w in &mut weights {
        *w *= scale;
    }
    (LatticeMeasure::new(lo as i64, weights), 2.0 * bound)
}

/// Poisson(λ) pmf, tails below `tol` dropped.
pub fn poisson_pmf(lambda: f64, tol: f64) -> (LatticeMeasure, f64) {
    let mode = lambda.floor() as u64;
    let log_mode = -lambda + mode as f64 * lambda.ln() - ln_gamma(mode as f64 + 1.0);
    let ratio = |j: u64| lambda / (j as f64 + 1.0);
    unimodal_pmf(mode, log_mode, None, ratio, ratio, tol)
}

/// `NB(r,q){j} = Γ(r+j)/(j!Γ(r)) q^r (1−q)^j`.
pub fn neg_binomial_pmf(r: f64, q: f64, tol: f64) -> (LatticeMeasure, f64) {
    let mode = if r > 1.0 { ((r - 1.0) * (1.0 - q) / q).floor() as u64 } else { 0 };
    let j = mode as f64;
    let log_mode = ln_gamma(r + j) - ln_gamma(j + 1.0) - ln_gamma(r) + r * q.ln() + j * (1.0 - q).ln();
    let ratio = |j: u64| (r + j as f64) / (j as f64 + 1.0) * (1.0 - q);
    unimodal_pmf(mode, log_mode, None, ratio, |j| ratio(j).max(1.0 - q), tol)
}

/// Binomial(N, p) pmf, tails below `tol` dropped.
pub fn binomial_pmf(n: u64, p: f64, tol: f64) -> (LatticeMeasure, f64) {
    if p >= 1.0 {
        return (LatticeMeasure::delta(n as i64), 0.0);
    }
    let nf = n as f64;
    let mode = (((nf + 1.0) * p).floor() as u64).min(n);
    let k = mode as f64;
    let log_mode =
        ln_gamma(nf + 1.0) - ln_gamma(k + 1.0) - ln_gamma(nf - k + 1.0) + k * p.ln() + (nf - k) * (1.0 - p).ln();
    let odds = p / (1.0 - p);
    let ratio = |j: u64| (nf - j as f64).max(0.0) / (j as f64 + 1.0) * odds;
    unimodal_pmf(mode, log_mode, Some(n), ratio, ratio, tol)
}

/// `exp{Σ_{j≥1} c_j z^j}` with `c_j = x^j/j`-type series summed to convergence.
fn log_series(x: Complex64, scale: f64, sign_alternating: bool) -> Complex64 {
    // Σ_{j≥1} s_j x^j / j with s_j = 1 or (−1)^{j+1}
    let mut sum = Complex64::new(0.0, 0.0);
    let mut pow = Complex64::new(1.0, 0.0);
    for j in 1..=2000u32 {
        pow *= x;
        let term = pow / j as f64;
        if sign_alternating && j % 2 == 0 {
            sum -= term;
        } else {
            sum += term;
        }
        if term.norm() * scale < 1e-18 {
            break;
        }
    }
    (sum * scale).exp()
}

/// Transform of `exp{r Σ_j (κz)^j/j}`, `κ = 2Γ₂/Γ₁`, `z = e^{it} − 1`: the
/// cumulant series whose first three terms are `Γ₁z + Γ₂z² + (4Γ₂²/3Γ₁)z³`.
/// Requires `|κz| < 1`.
pub fn nb_exponential_transform(c: &CumulantSet, t: f64) -> Result<Complex64> {
    check_preconditions(ApproximantKind::NegBinomial, c)?;
    let (r, _) = nb_params(c);
    let kappa = 2.0 * c.gamma2 / c.gamma1;
    let x = (Complex64::from_polar(1.0, t) - 1.0) * kappa;
    if x.norm() >= 0.9 {
        return arg(format!("series diverges: |κz| = {} ≥ 0.9", x.norm()));
    }
    Ok(log_series(x, r, false))
}

/// Transform of `exp{−N Σ_j (−p̄z)^j/j}`. Requires `|p̄z| < 1`.
pub fn bi_exponential_transform(c: &CumulantSet, t: f64) -> Result<Complex64> {
    check_preconditions(ApproximantKind::Binomial, c)?;
    let (n, p, _) = binomial_params(c);
    let x = (Complex64::from_polar(1.0, t) - 1.0) * p;
    if x.norm() >= 0.9 {
        return arg(format!("series diverges: |p̄z| = {} ≥ 0.9", x.norm()));
    }
    Ok(log_series(x, n as f64, true))
}

#[cfg(test)]
mod tests {
    use super::ApproximantKind::*;
    use super::*;

    fn cs(g1: f64, g2: f64, g3: f64) -> CumulantSet {
        CumulantSet::from_gammas(g1, g2, g3)
    }

    fn factorial_cumulant2(m: &LatticeMeasure) -> f64 {
        let mean = m.first_moment() / m.total_mass();
        m.factorial_moment(2) / m.total_mass() - mean * mean
    }

    #[test]
    fn names_round_trip() {
        for k in ApproximantKind::ALL {
            assert_eq!(k.as_str().parse::<ApproximantKind>().unwrap(), k);
        }
        assert!("normal".parse::<ApproximantKind>().is_err());
    }

    #[test]
    fn poisson_half() {
        let a = make_approximant(Pois, &cs(0.5, 0.0, 0.0), 1e-12).unwrap();
        assert!((a.measure.get(0) - (-0.5f64).exp()).abs() < 1e-15);
        assert!((a.measure.total_mass() + a.truncation_mass - 1.0).abs() < 1e-14);
        assert!(a.truncation_mass < 1e-12);
    }

    #[test]
    fn poisson_large_mean_is_stable() {
        let (m, cut) = poisson_pmf(2500.0, 1e-12);
        assert!(cut < 1e-12);
        assert!((m.first_moment() - 2500.0).abs() < 1e-8);
    }

    #[test]
    fn g_signed_matches_two_cumulants() {
        for &(g1, g2) in &[(3.0, 0.2), (5.0, -0.4), (40.0, 2.5)] {
            let a = make_approximant(GSigned, &cs(g1, g2, 0.0), 1e-12).unwrap();
            let m = &a.measure;
            assert!((m.total_mass() - 1.0).abs() < 1e-10);
            assert!((m.first_moment() - g1).abs() < 1e-8);
            assert!((factorial_cumulant2(m) - 2.0 * g2).abs() < 1e-8);
        }
    }

    #[test]
    fn translated_poisson_mean() {
        let c = cs(4.0, -1.3, 0.0);
        let a = make_approximant(TranslatedPois, &c, 1e-13).unwrap();
        let (shift, dt) = (a.params.a.unwrap(), a.params.delta_tilde.unwrap());
        assert_eq!(shift, 2);
        assert!((shift as f64 + dt - 2.6).abs() < 1e-12 && (0.0..1.0).contains(&dt));
        assert!((a.measure.first_moment() - 4.0).abs() < 1e-10);
        assert!(make_approximant(TranslatedPois, &cs(0.5, -0.1, 0.0), 1e-12).is_err());
    }

    #[test]
    fn negative_binomial_parameters_and_pmf() {
        let c = cs(2.5, 0.3, 0.0);
        let a = make_approximant(NegBinomial, &c, 1e-13).unwrap();
        let (r, q) = (a.params.r.unwrap(), a.params.q_bar.unwrap());
        let kappa = (1.0 - q) / q;
        assert!((r * kappa - 2.5).abs() < 1e-12);
        assert!((r * kappa * kappa - 0.6).abs() < 1e-12);
        for j in 0..6i64 {
            let jf = j as f64;
            let expect = (ln_gamma(r + jf) - ln_gamma(jf + 1.0) - ln_gamma(r)).exp() * q.powf(r) * (1.0 - q).powf(jf);
            assert!((a.measure.get(j) - expect).abs() < 1e-14);
        }
        assert!((a.measure.first_moment() - 2.5).abs() < 1e-10);
        assert!((factorial_cumulant2(&a.measure) - 0.6).abs() < 1e-9);
    }

    #[test]
    fn binomial_parameters() {
        let c = cs(3.0, -0.2, 0.0);
        let a = make_approximant(Binomial, &c, 1e-14).unwrap();
        let n = a.params.n_trials.unwrap();
        assert_eq!(n, 22);
        assert!((a.params.eps.unwrap() - 0.5).abs() < 1e-12);
        assert!((n as f64 * a.params.p_bar.unwrap() - 3.0).abs() < 1e-14);
        let direct = LatticeMeasure::bernoulli(3.0 / 22.0).conv_power(22).unwrap();
        let d = a.measure.sub(&direct).tv_norm();
        assert!(d < 1e-13, "{d}");
    }

    #[test]
    fn preconditions() {
        assert!(matches!(make_approximant(NegBinomial, &cs(2.0, -0.1, 0.0), 1e-12), Err(Error::Argument(_))));
        assert!(matches!(make_approximant(NegBinomial, &cs(2.0, 0.0, 0.0), 1e-12), Err(Error::Degenerate(_))));
        assert!(matches!(make_approximant(Binomial, &cs(2.0, 0.0, 0.0), 1e-12), Err(Error::Degenerate(_))));
        assert!(matches!(make_approximant(Binomial, &cs(0.5, -0.01, 0.0), 1e-12), Err(Error::Argument(_))));
        assert!(matches!(make_approximant(BiExpanded, &cs(2.0, 0.1, 0.0), 1e-12), Err(Error::Argument(_))));
        assert!(expansion_factor(Pois, &cs(1.0, 0.1, 0.0)).is_err());
    }

    #[test]
    fn expansion_factors() {
        let c = cs(2.0, 0.25, 0.1);
        let f = expansion_factor(PoisExpanded, &c).unwrap();
        assert_eq!(f.weights(), &[1.25, -0.5, 0.25]);
        let (coef, _) = expansion_coefficient(NbExpanded, &c).unwrap();
        assert!((coef - (0.1 - 4.0 * 0.0625 / 6.0)).abs() < 1e-15);
        let e = make_approximant(PoisExpanded, &c, 1e-12).unwrap();
        assert!((e.measure.total_mass() - 1.0).abs() < 1e-11);
        assert!((e.measure.first_moment() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn k1k2_coefficient_is_leading_term_of_bi_correction() {
        let (n, m, a) = (100_000usize, 4usize, 1e-3);
        let big_m = (n + 1 - m) as f64;
        let g1 = big_m * a;
        let g2 = -(a * a / 2.0) * (big_m * (2 * m - 1) as f64 - (m * (m - 1)) as f64);
        let g3 =
            a.powi(3) / 6.0 * (big_m * ((3 * m - 1) * (3 * m - 2)) as f64 - (4 * m * (2 * m - 1) * (m - 1)) as f64);
        let coef = bi_coefficient(&cs(g1, g2, g3));
        let big_a = k1k2_expansion_coefficient(n, m, a);
        assert!((coef / big_a - 1.0).abs() < 1e-3);
    }

    #[test]
    fn exponential_forms_match_pmfs() {
        let c = cs(3.0, 0.2, 0.0);
        let nb = make_approximant(NegBinomial, &c, 1e-15).unwrap();
        let b = cs(3.0, -0.2, 0.0);
        let bi = make_approximant(Binomial, &b, 1e-15).unwrap();
        for i in 0..32 {
            let t = -std::f64::consts::PI + i as f64 * 0.2;
            let d = nb.measure.fourier_at(t) - nb_exponential_transform(&c, t).unwrap();
            assert!(d.norm() < 1e-10);
            let d = bi.measure.fourier_at(t) - bi_exponential_transform(&b, t).unwrap();
            assert!(d.norm() < 1e-10);
        }
    }
}
