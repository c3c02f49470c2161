//! Finite signed measures on the integer lattice.
//!
//! A [`LatticeMeasure`] stores the weights `M{offset}, M{offset+1}, ...` of a
//! measure with finite support. Products are convolutions, `M^0 = δ`, and
//! `exp(M)` is the convolution exponential. Probability distributions, the
//! difference measure `U = δ₁ − δ`, approximants and differences between them
//! all share this one type.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default cap on the number of lattice points a single measure may occupy.
pub const DEFAULT_MAX_SUPPORT: usize = 1 << 20;

/// Default tolerance for [`LatticeMeasure::exp_measure`].
pub const DEFAULT_EXP_TOL: f64 = 1e-12;

/// Environment variable that overrides [`DEFAULT_MAX_SUPPORT`].
pub const MAX_SUPPORT_ENV: &str = "DEPAPPROX_MAX_SUPPORT";

/// The support cap in effect for this process.
pub fn max_support() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(MAX_SUPPORT_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&v| v > 0)
            .unwrap_or(DEFAULT_MAX_SUPPORT)
    })
}

/// Which norm to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    /// `Σ |M{k}|`.
    TotalVariation,
    /// `sup |M{k}|`.
    Local,
}

impl NormKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NormKind::TotalVariation => "tv",
            NormKind::Local => "local",
        }
    }
}

impl std::str::FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tv" | "total_variation" => Ok(NormKind::TotalVariation),
            "local" | "inf" => Ok(NormKind::Local),
            other => Err(Error::Argument(format!("unknown norm `{other}` (expected tv|local)"))),
        }
    }
}

/// A finite signed measure on ℤ in canonical form.
///
/// Canonical form: the first and last weights are nonzero, except for the
/// zero measure, which is a single `0.0` at offset 0.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeMeasure {
    offset: i64,
    weights: Vec<f64>,
}

impl LatticeMeasure {
    /// Builds a measure from raw weights starting at `offset` and
    /// canonicalizes it.
    pub fn new(offset: i64, weights: Vec<f64>) -> Self {
        let mut m = LatticeMeasure { offset, weights };
        m.canonicalize();
        m
    }

    pub fn zero() -> Self {
        LatticeMeasure { offset: 0, weights: vec![0.0] }
    }

    /// Point mass at `a`.
    pub fn delta(a: i64) -> Self {
        LatticeMeasure { offset: a, weights: vec![1.0] }
    }

    /// `U = δ₁ − δ`.
    pub fn unit_difference() -> Self {
        LatticeMeasure { offset: 0, weights: vec![-1.0, 1.0] }
    }

    /// Bernoulli(p) as `δ + pU`.
    pub fn bernoulli(p: f64) -> Self {
        LatticeMeasure::new(0, vec![1.0 - p, p])
    }

    fn canonicalize(&mut self) {
        let first = self.weights.iter().position(|&w| w != 0.0);
        match first {
            None => *self = LatticeMeasure::zero(),
            Some(lo) => {
                let hi = self.weights.iter().rposition(|&w| w != 0.0).unwrap_or(lo);
                if lo > 0 || hi + 1 < self.weights.len() {
                    self.weights.truncate(hi + 1);
                    self.weights.drain(..lo);
                    self.offset += lo as i64;
                }
            }
        }
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of lattice points between the first and last support point.
    // The weight vector is never empty, so `is_empty` would be constant.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_zero(&self) -> bool {
        self.weights.len() == 1 && self.weights[0] == 0.0
    }

    /// Largest support point.
    pub fn last(&self) -> i64 {
        self.offset + self.weights.len() as i64 - 1
    }

    /// `M{k}`.
    pub fn get(&self, k: i64) -> f64 {
        let i = k - self.offset;
        if i < 0 || i >= self.weights.len() as i64 {
            0.0
        } else {
            self.weights[i as usize]
        }
    }

    /// Iterates `(k, M{k})` over the stored window.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.weights.iter().enumerate().map(move |(i, &w)| (self.offset + i as i64, w))
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `Σ k M{k}`.
    pub fn first_moment(&self) -> f64 {
        self.iter().map(|(k, w)| k as f64 * w).sum()
    }

    /// `Σ k(k−1)⋯(k−j+1) M{k}`.
    pub fn factorial_moment(&self, j: u32) -> f64 {
        self.iter()
            .map(|(k, w)| {
                let falling: f64 = (0..j).map(|i| (k - i as i64) as f64).product();
                falling * w
            })
            .sum()
    }

    pub fn tv_norm(&self) -> f64 {
        self.weights.iter().map(|w| w.abs()).sum()
    }

    pub fn local_norm(&self) -> f64 {
        self.weights.iter().fold(0.0, |acc, w| acc.max(w.abs()))
    }

    pub fn norm(&self, kind: NormKind) -> f64 {
        match kind {
            NormKind::TotalVariation => self.tv_norm(),
            NormKind::Local => self.local_norm(),
        }
    }

    /// Multiplies every weight by `c`.
    pub fn scale(&self, c: f64) -> Self {
        LatticeMeasure::new(self.offset, self.weights.iter().map(|w| w * c).collect())
    }

    /// Translates the measure by `a`, i.e. convolution with `δ_a`.
    pub fn shift(&self, a: i64) -> Self {
        LatticeMeasure { offset: self.offset + a, weights: self.weights.clone() }
    }

    pub fn add(&self, other: &LatticeMeasure) -> Self {
        linear_combine(&[(1.0, self), (1.0, other)])
    }

    pub fn sub(&self, other: &LatticeMeasure) -> Self {
        linear_combine(&[(1.0, self), (-1.0, other)])
    }

    /// Convolution `A ∗ B`, capped at [`max_support`] points.
    pub fn convolve(&self, other: &LatticeMeasure) -> Result<Self> {
        self.convolve_capped(other, max_support())
    }

    /// Convolution with an explicit cap on the result's support length.
    pub fn convolve_capped(&self, other: &LatticeMeasure, cap: usize) -> Result<Self> {
        let len = self.weights.len() + other.weights.len() - 1;
        if len > cap {
            return Err(Error::Resource(format!("convolution support {len} exceeds the cap of {cap} points")));
        }
        let mut out = vec![0.0; len];
        // Iterate the shorter operand in the outer loop.
        let (short, long) = if self.weights.len() <= other.weights.len() {
            (&self.weights, &other.weights)
        } else {
            (&other.weights, &self.weights)
        };
        for (i, &a) in short.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (o, &b) in out[i..i + long.len()].iter_mut().zip(long.iter()) {
                *o += a * b;
            }
        }
        Ok(LatticeMeasure::new(self.offset + other.offset, out))
    }

    /// `k`-fold convolution power by repeated squaring; `A^0 = δ`.
    pub fn conv_power(&self, k: u64) -> Result<Self> {
        let mut result = LatticeMeasure::delta(0);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.convolve(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.convolve(&base)?;
            }
        }
        Ok(result)
    }

    /// Convolution exponential `exp(A) = Σ A^k/k!` to total-variation accuracy
    /// `tol`.
    pub fn exp_measure(&self, tol: f64) -> Result<Self> {
        self.exp_measure_with_bound(tol).map(|(m, _)| m)
    }

    /// Like [`exp_measure`](Self::exp_measure), also returning the
    /// accumulated total-variation error bound.
    ///
    /// The series is summed for `B = A/2^s` with `‖B‖ ≤ 1/2`, cut off at the
    /// first `K` with `‖B‖^{K+1} e^{‖B‖}/(K+1)! < τ₀`, and the result is squared
    /// `s` times. Each squaring drops tail mass below a per-stage budget. The
    /// bound propagates as `ε ← ε(2‖X‖ + ε) + τ`, using the computed norms.
    pub fn exp_measure_with_bound(&self, tol: f64) -> Result<(Self, f64)> {
        if !(tol > 0.0) || !tol.is_finite() {
            return Err(Error::Argument(format!("exp_measure tolerance must be positive, got {tol}")));
        }
        if self.is_zero() {
            return Ok((LatticeMeasure::delta(0), 0.0));
        }
        let norm = self.tv_norm();
        let mut squarings = 0u32;
        while norm / f64::powi(2.0, squarings as i32) > 0.5 {
            squarings += 1;
        }
        let mut budget = tol;
        for _ in 0..4 {
            let (m, bound) = self.exp_scaled_squared(squarings, budget)?;
            if bound <= tol {
                return Ok((m, bound));
            }
            // Norm growth exceeded the a-priori split; retry with a tighter budget.
            budget *= 0.5 * tol / bound;
        }
        let (m, bound) = self.exp_scaled_squared(squarings, budget)?;
        Ok((m, bound))
    }

    fn exp_scaled_squared(&self, squarings: u32, tol: f64) -> Result<(Self, f64)> {
        let s = squarings as i32;
        let piece = self.scale(f64::powi(0.5, s));
        let piece_norm = piece.tv_norm();
        let series_tol = tol / (4.0 * f64::powi(2.0, s));
        let stage_tol = |j: i32| tol / (4.0 * (squarings as f64 + 1.0)) * f64::powi(2.0, j - s);

        // Series for the scaled piece.
        let mut sum = LatticeMeasure::delta(0);
        let mut term = LatticeMeasure::delta(0);
        let e_norm = piece_norm.exp();
        let mut k = 0u32;
        let mut coef = 1.0; // ‖B‖^k / k!
        let mut tail;
        loop {
            k += 1;
            term = term.convolve(&piece)?.scale(1.0 / k as f64);
            sum = sum.add(&term);
            coef *= piece_norm / k as f64;
            tail = coef * piece_norm / (k as f64 + 1.0) * e_norm;
            if tail < series_tol || k > 200 {
                break;
            }
        }
        let (mut x, dropped) = sum.truncate_tail(stage_tol(0));
        let mut err = tail + dropped;
        for j in 1..=s {
            let xn = x.tv_norm();
            let sq = x.convolve(&x)?;
            let (t, dropped) = sq.truncate_tail(stage_tol(j));
            err = err * (2.0 * xn + err) + dropped;
            x = t;
        }
        Ok((x, err))
    }

    /// `Σ_k M{k} e^{itk}`.
    pub fn fourier_at(&self, t: f64) -> Complex64 {
        self.iter().filter(|(_, w)| *w != 0.0).map(|(k, w)| Complex64::from_polar(w, t * k as f64)).sum()
    }

    /// Drops weight from both ends while the discarded absolute mass stays
    /// below `eps`; returns the trimmed measure and the discarded mass.
    pub fn truncate_tail(&self, eps: f64) -> (Self, f64) {
        if !(eps > 0.0) || self.weights.len() <= 1 {
            return (self.clone(), 0.0);
        }
        let w = &self.weights;
        let (mut lo, mut hi) = (0usize, w.len() - 1);
        let mut dropped = 0.0;
        while lo < hi {
            let (l, h) = (w[lo].abs(), w[hi].abs());
            let (take, from_low) = if l <= h { (l, true) } else { (h, false) };
            if dropped + take >= eps {
                break;
            }
            dropped += take;
            if from_low {
                lo += 1;
            } else {
                hi -= 1;
            }
        }
        let m = LatticeMeasure::new(self.offset + lo as i64, w[lo..=hi].to_vec());
        (m, dropped)
    }
}

/// Pointwise signed sum `Σ c_i M_i`.
pub fn linear_combine(terms: &[(f64, &LatticeMeasure)]) -> LatticeMeasure {
    if terms.is_empty() {
        return LatticeMeasure::zero();
    }
    let lo = terms.iter().map(|(_, m)| m.offset).min().unwrap_or(0);
    let hi = terms.iter().map(|(_, m)| m.last()).max().unwrap_or(0);
    let mut out = vec![0.0; (hi - lo + 1) as usize];
    for (c, m) in terms {
        let base = (m.offset - lo) as usize;
        for (o, &w) in out[base..base + m.weights.len()].iter_mut().zip(m.weights.iter()) {
            *o += c * w;
        }
    }
    LatticeMeasure::new(lo, out)
}

/// `δ + c U^j`, the finite correction factor of the expansions.
pub fn delta_plus_u_power(c: f64, j: u32) -> LatticeMeasure {
    // U^j{i} = (−1)^{j−i} C(j, i)
    let mut w = vec![0.0; j as usize + 1];
    let mut binom = 1.0;
    for (i, wi) in w.iter_mut().enumerate() {
        let sign = if (j as usize - i).is_multiple_of(2) { 1.0 } else { -1.0 };
        *wi = c * sign * binom;
        binom = binom * (j as f64 - i as f64) / (i as f64 + 1.0);
    }
    w[0] += 1.0;
    LatticeMeasure::new(0, w)
}

/// `U^j` as an explicit measure.
pub fn u_power(j: u32) -> LatticeMeasure {
    delta_plus_u_power(1.0, j).sub(&LatticeMeasure::delta(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &LatticeMeasure, b: &LatticeMeasure, tol: f64) -> bool {
        a.sub(b).tv_norm() <= tol
    }

    #[test]
    fn delta_and_shift_inverse() {
        let d0 = LatticeMeasure::delta(0);
        assert_eq!(d0.weights(), &[1.0]);
        assert_eq!(d0.offset(), 0);
        let back = LatticeMeasure::delta(3).convolve(&LatticeMeasure::delta(-3)).unwrap();
        assert_eq!(back, d0);
    }

    #[test]
    fn unit_difference_norms() {
        let u = linear_combine(&[(1.0, &LatticeMeasure::delta(1)), (-1.0, &LatticeMeasure::delta(0))]);
        assert_eq!(u, LatticeMeasure::unit_difference());
        assert_eq!(u.tv_norm(), 2.0);
        assert_eq!(u.local_norm(), 1.0);
    }

    #[test]
    fn convolution_examples() {
        let m = LatticeMeasure::new(-1, vec![0.25, 0.5, 0.25]);
        let shifted = LatticeMeasure::delta(4).convolve(&m).unwrap();
        assert_eq!(shifted, m.shift(4));

        let p = 0.3;
        let b2 = LatticeMeasure::bernoulli(p).convolve(&LatticeMeasure::bernoulli(p)).unwrap();
        let expect = [(1.0 - p) * (1.0 - p), 2.0 * p * (1.0 - p), p * p];
        for (a, b) in b2.weights().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }

        let u = LatticeMeasure::unit_difference();
        let u2 = u.convolve(&u).unwrap();
        assert_eq!(u2.offset(), 0);
        assert_eq!(u2.weights(), &[1.0, -2.0, 1.0]);
    }

    #[test]
    fn linear_combine_cancels_to_zero() {
        let m = LatticeMeasure::new(2, vec![0.1, 0.2]);
        assert_eq!(linear_combine(&[(1.0, &m)]), m);
        let z = linear_combine(&[(1.0, &m), (-1.0, &m)]);
        assert!(z.is_zero());
        assert_eq!(z.offset(), 0);
        assert_eq!(z.weights(), &[0.0]);
    }

    #[test]
    fn powers() {
        let u3 = LatticeMeasure::unit_difference().conv_power(3).unwrap();
        assert_eq!(u3.weights(), &[-1.0, 3.0, -3.0, 1.0]);
        assert_eq!(u3, u_power(3));
        assert_eq!(LatticeMeasure::delta(1).conv_power(5).unwrap(), LatticeMeasure::delta(5));
        assert_eq!(LatticeMeasure::new(0, vec![0.5, 0.5]).conv_power(0).unwrap(), LatticeMeasure::delta(0));

        // (δ + p̄U)^N is Binomial(N, p̄).
        let (n, p) = (12u64, 0.2);
        let bi = LatticeMeasure::bernoulli(p).conv_power(n).unwrap();
        let mut c = 1.0;
        for k in 0..=n {
            let pmf = c * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32);
            assert!((bi.get(k as i64) - pmf).abs() < 1e-15);
            c = c * (n - k) as f64 / (k + 1) as f64;
        }
    }

    #[test]
    fn support_cap_is_a_resource_error() {
        let a = LatticeMeasure::new(0, vec![1.0; 10]);
        assert!(matches!(a.convolve_capped(&a, 18), Err(Error::Resource(_))));
        assert!(a.convolve_capped(&a, 19).is_ok());
    }

    #[test]
    fn exp_of_zero_and_poisson() {
        assert_eq!(LatticeMeasure::zero().exp_measure(1e-12).unwrap(), LatticeMeasure::delta(0));
        let g1 = 2.7;
        let pois = LatticeMeasure::unit_difference().scale(g1).exp_measure(1e-12).unwrap();
        let mut pmf = (-g1).exp();
        for k in 0..30 {
            assert!((pois.get(k) - pmf).abs() < 1e-13, "k={k}");
            pmf *= g1 / (k + 1) as f64;
        }
        assert!(matches!(pois.exp_measure(0.0), Err(Error::Argument(_))));
    }

    #[test]
    fn exp_of_signed_exponent_has_unit_mass() {
        let u = LatticeMeasure::unit_difference();
        let a = linear_combine(&[(1.0, &u), (-0.1, &u.convolve(&u).unwrap())]);
        let g = a.exp_measure(1e-12).unwrap();
        assert!((g.total_mass() - 1.0).abs() < 1e-12);
        // e^{A}e^{B} = e^{A+B}
        let b = u.scale(0.7);
        let lhs = a.add(&b).exp_measure(1e-12).unwrap();
        let rhs = g.convolve(&b.exp_measure(1e-12).unwrap()).unwrap();
        assert!(close(&lhs, &rhs, 1e-11));
    }

    #[test]
    fn smoothing_u2_bound() {
        let u2 = u_power(2);
        for t in [1.0, 5.0, 25.0] {
            let e = LatticeMeasure::unit_difference().scale(t).exp_measure(1e-13).unwrap();
            let n = u2.convolve(&e).unwrap().tv_norm();
            assert!(n <= 3.0 / (t * std::f64::consts::E), "t={t}: {n}");
        }
    }

    #[test]
    fn fourier_examples() {
        let t = 0.7;
        let d = LatticeMeasure::delta(3).fourier_at(t);
        assert!((d - Complex64::from_polar(1.0, 3.0 * t)).norm() < 1e-15);
        let z = LatticeMeasure::unit_difference().fourier_at(t);
        assert!((z - (Complex64::from_polar(1.0, t) - 1.0)).norm() < 1e-15);
        let g1 = 1.3;
        let pois = LatticeMeasure::unit_difference().scale(g1).exp_measure(1e-13).unwrap();
        let expect = (z * g1).exp();
        assert!((pois.fourier_at(t) - expect).norm() < 1e-12);
    }

    #[test]
    fn truncation() {
        let (d, lost) = LatticeMeasure::delta(0).truncate_tail(0.5);
        assert_eq!(d, LatticeMeasure::delta(0));
        assert_eq!(lost, 0.0);

        let pois = LatticeMeasure::unit_difference().scale(5.0).exp_measure(1e-15).unwrap();
        let (t, lost) = pois.truncate_tail(1e-12);
        assert!(lost < 1e-12);
        assert!(t.len() < pois.len());
        assert!(t.total_mass() >= 1.0 - 1e-12 - 1e-14);
    }

    #[test]
    fn correction_factor_weights() {
        let g2 = -0.37;
        let f = delta_plus_u_power(g2, 2);
        assert_eq!(f.offset(), 0);
        let expect = [1.0 + g2, -2.0 * g2, g2];
        for (a, b) in f.weights().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
