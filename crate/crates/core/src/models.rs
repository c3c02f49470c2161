//! Dependent integer-valued sequences driven by a latent Markov chain.
//!
//! Every model is a chain of latent states `s_0, s_1, …, s_n` on a finite set,
//! where step `k` moves `s_{k−1} → s_k` and emits `X_k`. A [`Kernel`] holds,
//! for each allowed transition, the sub-probability mass function of the
//! emitted value. Exact laws and window expectations are then forward passes
//! of a transfer matrix, and grouping consecutive summands is composition of
//! kernels.
//!
//! - 2-runs `ξ_i = η_iη_{i+1}`: the state is the current driver `η`.
//! - `(k₁,k₂)`-events: the state holds the last `m − 1` drivers, `m = k₁ + k₂`.
//! - independent summands: a single state.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cumulants::WindowFunc;
use crate::error::{arg, Error, Result};
use crate::measure::{max_support, LatticeMeasure};

/// Longest window accepted by [`DependentModel::window_expectation`].
pub const DEFAULT_MAX_WINDOW: usize = 8;

/// Partial-sum weights below this are dropped from the DP tails; the
/// dropped mass is reported by [`DependentModel::exact_distribution_with_pruned`].
pub const DP_PRUNE: f64 = 1e-300;

const CHECKPOINT_EVERY: usize = 32;

/// JSON-facing model description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    /// `S_ξ = Σ η_iη_{i+1}`, `η_1, …, η_{n+1}` i.i.d. Bernoulli(p).
    TwoRuns { n: usize, p: f64 },
    /// `N(n; k₁, k₂)`: windows of `k₁` failures followed by `k₂` successes.
    /// When `grouped` (the default) the `m`-dependent indicators are summed in
    /// blocks of `m = k₁ + k₂`, which makes the summands 1-dependent.
    K1k2 {
        n: usize,
        k1: usize,
        k2: usize,
        p: f64,
        #[serde(default = "default_true")]
        grouped: bool,
    },
    /// Independent summands, either `n` copies of `pmf` or one pmf per summand.
    Independent {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pmf: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pmfs: Option<Vec<Vec<f64>>>,
    },
    /// Blocks of `m` consecutive summands of `base`.
    Grouped { base: Box<ModelSpec>, m: usize },
}

fn default_true() -> bool {
    true
}

impl ModelSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model spec serializes")
    }
}

/// `a(p) = (1−p)^{k₁} p^{k₂}`, the probability of one `(k₁,k₂)` window.
pub fn k1k2_window_prob(k1: usize, k2: usize, p: f64) -> f64 {
    (1.0 - p).powi(k1 as i32) * p.powi(k2 as i32)
}

/// `K = ⌊(n−m+1)/m⌋` and `δ = (n−m+1)/m − K`.
pub fn block_split(n: usize, m: usize) -> (usize, f64) {
    let total = n + 1 - m;
    let k = total / m;
    (k, (total - k * m) as f64 / m as f64)
}

#[derive(Debug, Clone, PartialEq)]
struct Transition {
    from: usize,
    to: usize,
    /// `emission[x] = P(s_k = to, X_k = x | s_{k−1} = from)`.
    emission: Vec<f64>,
}

/// One step of the latent chain.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    transitions: Vec<Transition>,
}

impl Kernel {
    fn from_map(map: HashMap<(usize, usize), Vec<f64>>) -> Self {
        let mut transitions: Vec<Transition> = map
            .into_iter()
            .map(|((from, to), mut emission)| {
                while emission.len() > 1 && *emission.last().unwrap() == 0.0 {
                    emission.pop();
                }
                Transition { from, to, emission }
            })
            .filter(|t| t.emission.iter().any(|&w| w != 0.0))
            .collect();
        transitions.sort_by_key(|t| (t.from, t.to));
        Kernel { transitions }
    }

    /// `self` followed by `next`, with emissions added.
    fn compose(&self, next: &Kernel) -> Kernel {
        let mut by_from: HashMap<usize, Vec<&Transition>> = HashMap::new();
        for t in &next.transitions {
            by_from.entry(t.from).or_default().push(t);
        }
        let mut map: HashMap<(usize, usize), Vec<f64>> = HashMap::new();
        for a in &self.transitions {
            let Some(nexts) = by_from.get(&a.to) else { continue };
            for b in nexts {
                let out = map.entry((a.from, b.to)).or_default();
                let len = a.emission.len() + b.emission.len() - 1;
                if out.len() < len {
                    out.resize(len, 0.0);
                }
                for (i, &x) in a.emission.iter().enumerate() {
                    if x == 0.0 {
                        continue;
                    }
                    for (j, &y) in b.emission.iter().enumerate() {
                        out[i + j] += x * y;
                    }
                }
            }
        }
        Kernel::from_map(map)
    }

    fn max_value(&self) -> usize {
        self.transitions.iter().map(|t| t.emission.len() - 1).max().unwrap_or(0)
    }

    fn propagate(&self, dist: &[f64], n_states: usize) -> Vec<f64> {
        let mut out = vec![0.0; n_states];
        for t in &self.transitions {
            out[t.to] += dist[t.from] * t.emission.iter().sum::<f64>();
        }
        out
    }

    fn apply(&self, alpha: &[Complex64], func: WindowFunc, n_states: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); n_states];
        for t in &self.transitions {
            let a = alpha[t.from];
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let w: Complex64 =
                t.emission.iter().enumerate().filter(|(_, &e)| e != 0.0).map(|(x, &e)| func.eval(x as u64) * e).sum();
            out[t.to] += a * w;
        }
        out
    }
}

/// Latent chain plus per-step kernels.
#[derive(Debug, Clone)]
struct LatentChain {
    n_states: usize,
    initial: Vec<f64>,
    kernels: Vec<Arc<Kernel>>,
    /// `steps[k−1]` indexes the kernel generating `X_k`.
    steps: Vec<usize>,
}

impl LatentChain {
    fn kernel(&self, k: usize) -> &Kernel {
        &self.kernels[self.steps[k - 1]]
    }
}

/// A dependent sequence `X_1, …, X_n` with exact moment and law oracles.
#[derive(Debug)]
pub struct DependentModel {
    spec: ModelSpec,
    dependence: usize,
    chain: LatentChain,
    checkpoints: OnceLock<Vec<Vec<f64>>>,
}

impl Clone for DependentModel {
    fn clone(&self) -> Self {
        DependentModel {
            spec: self.spec.clone(),
            dependence: self.dependence,
            chain: self.chain.clone(),
            checkpoints: OnceLock::new(),
        }
    }
}

impl DependentModel {
    /// Builds a model from its JSON-facing description.
    pub fn build(spec: &ModelSpec) -> Result<Self> {
        match spec {
            ModelSpec::TwoRuns { n, p } => Self::two_runs(*n, *p),
            ModelSpec::K1k2 { n, k1, k2, p, grouped } => {
                let raw = Self::k1k2_events(*n, *k1, *k2, *p)?;
                if *grouped {
                    let mut g = raw.group_blocks(k1 + k2)?;
                    g.spec = spec.clone();
                    Ok(g)
                } else {
                    Ok(raw)
                }
            }
            ModelSpec::Independent { n, pmf, pmfs } => match (n, pmf, pmfs) {
                (Some(n), Some(pmf), None) => Self::independent(vec![pmf.clone(); *n]),
                (None, None, Some(pmfs)) => Self::independent(pmfs.clone()),
                _ => arg("independent model needs either `n` and `pmf`, or `pmfs`"),
            },
            ModelSpec::Grouped { base, m } => {
                let b = Self::build(base)?;
                let mut g = b.group_blocks(*m)?;
                g.spec = spec.clone();
                Ok(g)
            }
        }
    }

    /// 2-runs statistic `Σ_{i=1}^n η_iη_{i+1}`.
    pub fn two_runs(n: usize, p: f64) -> Result<Self> {
        check_n(n)?;
        check_p(p)?;
        let q = 1.0 - p;
        let mut map = HashMap::new();
        map.insert((0, 0), vec![q]);
        map.insert((0, 1), vec![p]);
        map.insert((1, 0), vec![q]);
        map.insert((1, 1), vec![0.0, p]);
        Ok(DependentModel {
            spec: ModelSpec::TwoRuns { n, p },
            dependence: 1,
            chain: LatentChain {
                n_states: 2,
                initial: vec![q, p],
                kernels: vec![Arc::new(Kernel::from_map(map))],
                steps: vec![0; n],
            },
            checkpoints: OnceLock::new(),
        })
    }

    /// The `m`-dependent indicators `Y_m, …, Y_n` of `(k₁,k₂)` windows,
    /// re-indexed `1..=n−m+1`.
    pub fn k1k2_events(n: usize, k1: usize, k2: usize, p: f64) -> Result<Self> {
        check_p(p)?;
        if k1 == 0 || k2 == 0 {
            return arg("k1 and k2 must both be positive");
        }
        let m = k1 + k2;
        if m > 13 {
            return Err(Error::Resource(format!(
                "m = {m} needs 2^{} latent states; at most m = 13 is supported",
                m - 1
            )));
        }
        if n < m {
            return arg(format!("n = {n} must be at least m = k1 + k2 = {m}"));
        }
        let bits = m - 1;
        let n_states = 1usize << bits;
        let pattern: usize = ((1usize << k2) - 1) << k1;
        let mut initial = vec![0.0; n_states];
        for (s, w) in initial.iter_mut().enumerate() {
            let ones = s.count_ones() as i32;
            *w = p.powi(ones) * (1.0 - p).powi(bits as i32 - ones);
        }
        let mut map = HashMap::new();
        for s in 0..n_states {
            for eta in 0..2usize {
                let window = s | (eta << bits);
                let y = usize::from(window == pattern);
                let mut em = vec![0.0; y + 1];
                em[y] = if eta == 1 { p } else { 1.0 - p };
                map.insert((s, window >> 1), em);
            }
        }
        Ok(DependentModel {
            spec: ModelSpec::K1k2 { n, k1, k2, p, grouped: false },
            dependence: m,
            chain: LatentChain {
                n_states,
                initial,
                kernels: vec![Arc::new(Kernel::from_map(map))],
                steps: vec![0; n + 1 - m],
            },
            checkpoints: OnceLock::new(),
        })
    }

    /// Independent summands with the given pmfs on `{0, 1, …}`.
    pub fn independent(pmfs: Vec<Vec<f64>>) -> Result<Self> {
        check_n(pmfs.len())?;
        let mut kernels: Vec<Arc<Kernel>> = Vec::new();
        let mut steps = Vec::with_capacity(pmfs.len());
        let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
        for pmf in &pmfs {
            if pmf.is_empty() || pmf.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
                return arg("pmf weights must be finite and nonnegative");
            }
            let total: f64 = pmf.iter().sum();
            if (total - 1.0).abs() > 1e-9 {
                return arg(format!("pmf sums to {total}, expected 1"));
            }
            let key: Vec<u64> = pmf.iter().map(|w| w.to_bits()).collect();
            let idx = *seen.entry(key).or_insert_with(|| {
                let mut map = HashMap::new();
                map.insert((0, 0), pmf.clone());
                kernels.push(Arc::new(Kernel::from_map(map)));
                kernels.len() - 1
            });
            steps.push(idx);
        }
        let spec = ModelSpec::Independent { n: None, pmf: None, pmfs: Some(pmfs) };
        Ok(DependentModel {
            spec,
            dependence: 0,
            chain: LatentChain { n_states: 1, initial: vec![1.0], kernels, steps },
            checkpoints: OnceLock::new(),
        })
    }

    /// Sums consecutive blocks of `m` summands. With `n` summands there are
    /// `⌊n/m⌋` full blocks and, if `m ∤ n`, one final block with the rest.
    /// The law of the total is unchanged; an `m`-dependent base becomes
    /// 1-dependent.
    pub fn group_blocks(&self, m: usize) -> Result<Self> {
        let n = self.n();
        if m == 0 {
            return arg("block length must be positive");
        }
        if m > n {
            return arg(format!("block length {m} exceeds the number of summands {n}"));
        }
        let mut cache: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut kernels: Vec<Arc<Kernel>> = Vec::new();
        let mut steps = Vec::new();
        for chunk in self.chain.steps.chunks(m) {
            let key = chunk.to_vec();
            let idx = match cache.get(&key) {
                Some(&i) => i,
                None => {
                    let mut k = (*self.chain.kernels[chunk[0]]).clone();
                    for &s in &chunk[1..] {
                        k = k.compose(&self.chain.kernels[s]);
                    }
                    kernels.push(Arc::new(k));
                    cache.insert(key, kernels.len() - 1);
                    kernels.len() - 1
                }
            };
            steps.push(idx);
        }
        let dependence = if self.dependence == 0 { 0 } else { self.dependence.div_ceil(m).max(1) };
        Ok(DependentModel {
            spec: ModelSpec::Grouped { base: Box::new(self.spec.clone()), m },
            dependence,
            chain: LatentChain { n_states: self.chain.n_states, initial: self.chain.initial.clone(), kernels, steps },
            checkpoints: OnceLock::new(),
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    /// Number of summands.
    pub fn n(&self) -> usize {
        self.chain.steps.len()
    }

    /// Dependence range: 0 for independent summands, 1 for 1-dependent, …
    pub fn dependence(&self) -> usize {
        self.dependence
    }

    pub fn n_states(&self) -> usize {
        self.chain.n_states
    }

    /// Distribution of the latent state `s_k`, `0 ≤ k ≤ n`.
    pub fn state_marginal(&self, k: usize) -> Vec<f64> {
        let cps = self.checkpoints.get_or_init(|| {
            let mut out = vec![self.chain.initial.clone()];
            let mut d = self.chain.initial.clone();
            for step in 1..=self.n() {
                d = self.chain.kernel(step).propagate(&d, self.chain.n_states);
                if step % CHECKPOINT_EVERY == 0 {
                    out.push(d.clone());
                }
            }
            out
        });
        let base = k / CHECKPOINT_EVERY;
        let mut d = cps[base].clone();
        for step in base * CHECKPOINT_EVERY + 1..=k {
            d = self.chain.kernel(step).propagate(&d, self.chain.n_states);
        }
        d
    }

    /// Exact law of `X_k`.
    pub fn summand_pmf(&self, k: usize) -> Result<LatticeMeasure> {
        if k == 0 || k > self.n() {
            return arg(format!("summand index {k} outside 1..={}", self.n()));
        }
        let d = self.state_marginal(k - 1);
        let kernel = self.chain.kernel(k);
        let mut w = vec![0.0; kernel.max_value() + 1];
        for t in &kernel.transitions {
            for (x, &e) in t.emission.iter().enumerate() {
                w[x] += d[t.from] * e;
            }
        }
        Ok(LatticeMeasure::new(0, w))
    }

    /// Exact law of `S_n`.
    pub fn exact_distribution(&self) -> Result<LatticeMeasure> {
        self.exact_distribution_with_pruned().map(|(m, _)| m)
    }

    /// Exact law of `S_n` by forward DP over (latent state, partial sum),
    /// plus the total weight dropped as tail underflow (below [`DP_PRUNE`]).
    pub fn exact_distribution_with_pruned(&self) -> Result<(LatticeMeasure, f64)> {
        let s = self.chain.n_states;
        let cap = max_support().saturating_mul(16);
        let mut cur: Vec<Vec<f64>> = self.chain.initial.iter().map(|&w| vec![w]).collect();
        let mut pruned = 0.0;
        for step in 1..=self.n() {
            let kernel = self.chain.kernel(step);
            let longest = cur.iter().map(Vec::len).max().unwrap_or(1) + kernel.max_value();
            if longest.saturating_mul(s) > cap {
                return Err(Error::Resource(format!(
                    "exact DP needs {longest} x {s} cells at step {step}, above the cap of {cap}"
                )));
            }
            let mut next: Vec<Vec<f64>> = vec![Vec::new(); s];
            for t in &kernel.transitions {
                let src = &cur[t.from];
                if src.is_empty() {
                    continue;
                }
                let dst = &mut next[t.to];
                let need = src.len() + t.emission.len() - 1;
                if dst.len() < need {
                    dst.resize(need, 0.0);
                }
                for (y, &e) in t.emission.iter().enumerate() {
                    if e == 0.0 {
                        continue;
                    }
                    for (d, &v) in dst[y..y + src.len()].iter_mut().zip(src) {
                        *d += v * e;
                    }
                }
            }
            for v in &mut next {
                while v.len() > 1 && v.last().is_some_and(|&w| w.abs() < DP_PRUNE) {
                    pruned += v.pop().unwrap().abs();
                }
            }
            cur = next;
        }
        let len = cur.iter().map(Vec::len).max().unwrap_or(1);
        let mut total = vec![0.0; len];
        for v in &cur {
            for (t, &w) in total.iter_mut().zip(v) {
                *t += w;
            }
        }
        Ok((LatticeMeasure::new(0, total), pruned))
    }

    /// `E ∏_i f_i(X_{start+i})` for a window of at most
    /// [`DEFAULT_MAX_WINDOW`] summands.
    pub fn window_expectation(&self, start: usize, funcs: &[WindowFunc]) -> Result<Complex64> {
        if funcs.len() > DEFAULT_MAX_WINDOW {
            return Err(Error::Resource(format!(
                "window of length {} exceeds the maximum of {DEFAULT_MAX_WINDOW}",
                funcs.len()
            )));
        }
        self.check_window(start, funcs.len())?;
        Ok(*self.prefix_expectations(start, funcs).last().unwrap())
    }

    /// All prefix products of one window in a single forward pass:
    /// entry `j` is `E ∏_{i≤j} f_i(X_{start+i})`. No length cap.
    pub fn prefix_expectations(&self, start: usize, funcs: &[WindowFunc]) -> Vec<Complex64> {
        debug_assert!(start >= 1 && start + funcs.len() - 1 <= self.n());
        self.prefix_expectations_from(&self.state_marginal(start - 1), start, funcs)
    }

    /// Kernel indices of steps `start..start+len`; equal indices mean equal kernels.
    pub(crate) fn kernel_ids(&self, start: usize, len: usize) -> &[usize] {
        &self.chain.steps[start - 1..start - 1 + len]
    }

    /// As [`Self::prefix_expectations`], starting from a given law of `s_{start−1}`.
    pub(crate) fn prefix_expectations_from(
        &self,
        marginal: &[f64],
        start: usize,
        funcs: &[WindowFunc],
    ) -> Vec<Complex64> {
        let s = self.chain.n_states;
        let mut alpha: Vec<Complex64> = marginal.iter().map(|&w| Complex64::new(w, 0.0)).collect();
        let mut out = Vec::with_capacity(funcs.len());
        for (i, &f) in funcs.iter().enumerate() {
            alpha = self.chain.kernel(start + i).apply(&alpha, f, s);
            out.push(alpha.iter().sum());
        }
        out
    }

    fn check_window(&self, start: usize, len: usize) -> Result<()> {
        if len == 0 {
            return arg("empty window");
        }
        if start == 0 || start + len - 1 > self.n() {
            return arg(format!("window [{start}, {}] outside 1..={}", start as i64 + len as i64 - 1, self.n()));
        }
        Ok(())
    }

    /// Factorial moment `ν_j(k)`, zero for `k` outside `1..=n`.
    pub fn nu(&self, k: i64, j: u8) -> f64 {
        if k < 1 || k as usize > self.n() {
            return 0.0;
        }
        self.prefix_expectations(k as usize, &[WindowFunc::FactorialPower(j)])[0].re
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return arg("n must be at least 1");
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return arg(format!("p = {p} must lie in (0, 1)"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use WindowFunc::*;

    /// Law of `S_ξ` by brute force over all `2^{n+1}` driver outcomes.
    fn two_runs_enumerated(n: usize, p: f64) -> Vec<f64> {
        let mut out = vec![0.0; n + 1];
        for mask in 0u32..(1 << (n + 1)) {
            let eta = |i: usize| (mask >> i) & 1;
            let ones = mask.count_ones() as i32;
            let pr = p.powi(ones) * (1.0 - p).powi(n as i32 + 1 - ones);
            let s: u32 = (0..n).map(|i| eta(i) * eta(i + 1)).sum();
            out[s as usize] += pr;
        }
        out
    }

    #[test]
    fn two_runs_small_law() {
        let m = DependentModel::two_runs(2, 0.5).unwrap();
        let d = m.exact_distribution().unwrap();
        assert_eq!(d.offset(), 0);
        let expect = [5.0 / 8.0, 2.0 / 8.0, 1.0 / 8.0];
        for (a, b) in d.weights().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn two_runs_matches_enumeration() {
        for n in [1, 3, 7, 10] {
            let p = 0.3;
            let d = DependentModel::two_runs(n, p).unwrap().exact_distribution().unwrap();
            let e = two_runs_enumerated(n, p);
            for (k, w) in e.iter().enumerate() {
                assert!((d.get(k as i64) - w).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn two_runs_mean() {
        let (n, p) = (50, 0.2);
        let d = DependentModel::two_runs(n, p).unwrap().exact_distribution().unwrap();
        assert!((d.first_moment() - n as f64 * p * p).abs() < 1e-12);
        assert!((d.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_runs_window_products() {
        let p = 0.2;
        let m = DependentModel::two_runs(6, p).unwrap();
        let e = m.window_expectation(3, &[Identity, Identity]).unwrap();
        assert!((e.re - p.powi(3)).abs() < 1e-15);
        assert!(e.im.abs() < 1e-15);
        let z = m.window_expectation(2, &[CharDiff(0.0)]).unwrap();
        assert_eq!(z, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn binomial_from_independent() {
        let (n, p) = (9, 0.35);
        let m = DependentModel::independent(vec![vec![1.0 - p, p]; n]).unwrap();
        let d = m.exact_distribution().unwrap();
        let bi = LatticeMeasure::bernoulli(p).conv_power(n as u64).unwrap();
        assert!(d.sub(&bi).tv_norm() < 1e-14);
        assert_eq!(m.dependence(), 0);
    }

    #[test]
    fn invalid_parameters() {
        assert!(matches!(DependentModel::two_runs(0, 0.5), Err(Error::Argument(_))));
        assert!(matches!(DependentModel::two_runs(5, 1.0), Err(Error::Argument(_))));
        assert!(matches!(DependentModel::k1k2_events(10, 0, 2, 0.3), Err(Error::Argument(_))));
        assert!(matches!(DependentModel::k1k2_events(3, 2, 2, 0.3), Err(Error::Argument(_))));
        assert!(matches!(DependentModel::independent(vec![vec![0.5, 0.6]]), Err(Error::Argument(_))));
        let m = DependentModel::two_runs(4, 0.3).unwrap();
        assert!(matches!(m.group_blocks(5), Err(Error::Argument(_))));
        assert!(matches!(m.window_expectation(4, &[Identity, Identity]), Err(Error::Argument(_))));
        assert!(matches!(m.window_expectation(0, &[Identity]), Err(Error::Argument(_))));
        let long = DependentModel::two_runs(20, 0.3).unwrap();
        assert!(matches!(long.window_expectation(1, &[Identity; 9]), Err(Error::Resource(_))));
    }

    #[test]
    fn k1k2_block_structure() {
        let (n, k1, k2, p) = (30, 2, 2, 0.2);
        let m = k1 + k2;
        let a = k1k2_window_prob(k1, k2, p);
        let raw = DependentModel::k1k2_events(n, k1, k2, p).unwrap();
        assert_eq!(raw.n(), n - m + 1);
        let g = raw.group_blocks(m).unwrap();
        let (kb, delta) = block_split(n, m);
        assert_eq!((kb, delta), (6, 0.75));
        assert_eq!(g.n(), kb + 1);
        assert_eq!(g.dependence(), 1);
        for j in 1..=kb {
            let pmf = g.summand_pmf(j).unwrap();
            assert_eq!(pmf.len(), 2);
            assert!((pmf.get(1) - m as f64 * a).abs() < 1e-15);
        }
        let last = g.summand_pmf(kb + 1).unwrap();
        assert!((last.get(1) - delta * m as f64 * a).abs() < 1e-15);

        let interior = g.window_expectation(3, &[Identity, Identity]).unwrap().re;
        assert!((interior - (m * (m + 1)) as f64 * a * a / 2.0).abs() < 1e-15);

        let d_raw = raw.exact_distribution().unwrap();
        let d_grp = g.exact_distribution().unwrap();
        assert!(d_raw.sub(&d_grp).tv_norm() < 1e-14);
    }

    #[test]
    fn k1k2_mean_and_variance() {
        let (n, k1, k2, p) = (40, 1, 2, 0.3);
        let m = (k1 + k2) as f64;
        let a = k1k2_window_prob(k1, k2, p);
        let d = DependentModel::k1k2_events(n, k1, k2, p).unwrap().exact_distribution().unwrap();
        let mean = d.first_moment();
        let var = d.factorial_moment(2) + mean - mean * mean;
        let n = n as f64;
        assert!((mean - (n - m + 1.0) * a).abs() < 1e-10);
        let v = (n - m + 1.0) * a + (1.0 - 4.0 * m + 3.0 * m * m - n * (2.0 * m - 1.0)) * a * a;
        assert!((var - v).abs() < 1e-10);
    }

    #[test]
    fn one_dependence_factorizes_across_gaps() {
        let models = [
            DependentModel::two_runs(8, 0.4).unwrap(),
            DependentModel::build(&ModelSpec::K1k2 { n: 30, k1: 1, k2: 2, p: 0.35, grouped: true }).unwrap(),
        ];
        for m in &models {
            let n = m.n();
            for j in 1..=n {
                for k in j + 2..=n {
                    let fj = CharDiff(0.9);
                    let fk = FactorialPower(1);
                    let mut funcs = vec![Identity; k - j + 1];
                    funcs[0] = fj;
                    funcs[k - j] = fk;
                    for f in funcs.iter_mut().take(k - j).skip(1) {
                        *f = WindowFunc::Constant;
                    }
                    let joint = m.prefix_expectations(j, &funcs)[k - j];
                    let ej = m.prefix_expectations(j, &[fj])[0];
                    let ek = m.prefix_expectations(k, &[fk])[0];
                    assert!((joint - ej * ek).norm() < 1e-12, "j={j} k={k}");
                }
            }
        }
    }

    #[test]
    fn spec_json_shapes() {
        let s = ModelSpec::from_json(r#"{"kind": "two_runs", "n": 1000, "p": 0.03}"#).unwrap();
        assert_eq!(s, ModelSpec::TwoRuns { n: 1000, p: 0.03 });
        let s = ModelSpec::from_json(r#"{"kind":"k1k2","n":50,"k1":2,"k2":2,"p":0.1}"#).unwrap();
        assert_eq!(s, ModelSpec::K1k2 { n: 50, k1: 2, k2: 2, p: 0.1, grouped: true });
        let s = ModelSpec::from_json(r#"{"kind":"independent","n":3,"pmf":[0.9,0.1]}"#).unwrap();
        assert_eq!(DependentModel::build(&s).unwrap().n(), 3);
        let s = ModelSpec::from_json(r#"{"kind":"grouped","m":2,"base":{"kind":"two_runs","n":5,"p":0.5}}"#).unwrap();
        assert_eq!(DependentModel::build(&s).unwrap().n(), 3);
        assert!(ModelSpec::from_json(r#"{"kind":"nope"}"#).is_err());
        assert!(DependentModel::build(&ModelSpec::Independent { n: Some(2), pmf: None, pmfs: None }).is_err());
    }
}
