//! Position distributions: the anyonic walk (exact, transfer, Monte Carlo),
//! the Hadamard walk, the classical walk, and summary statistics.

mod exact;
mod mc;

use std::sync::OnceLock;

use serde::Serialize;

use crate::braid::{low_mask, CoinHistory, WalkConfig};
use crate::error::{Error, Result};
use crate::fusion::monomial::{transfer_numerators, DEFAULT_TRANSFER_CAP};

pub use exact::{
    anyonic_distribution_exact, anyonic_distribution_exact_with, coin_parity_z, coin_z,
    pair_contribution, Evaluator, DEFAULT_EXACT_CAP,
};
pub use mc::{
    anyonic_distribution_mc, anyonic_distribution_mc_with, McEstimate, McOptions, McScheme,
    StratumRecord,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistKind {
    AnyonicExact,
    AnyonicTransfer,
    AnyonicMc,
    Oracle,
    Quantum,
    Classical,
    Bound,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    /// Numerators over `2^t`.
    Dyadic(Vec<i128>),
    Real(Vec<f64>),
}

/// Weights indexed by the right-move count `s = 0..=t`; the walker then sits at
/// `cfg.position(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    cfg: WalkConfig,
    kind: DistKind,
    weights: Weights,
    stderr: Option<Vec<f64>>,
}

impl Distribution {
    pub fn dyadic(cfg: &WalkConfig, kind: DistKind, numerators: Vec<i128>) -> Self {
        debug_assert_eq!(numerators.len(), cfg.t() + 1);
        Distribution { cfg: *cfg, kind, weights: Weights::Dyadic(numerators), stderr: None }
    }

    pub fn real(cfg: &WalkConfig, kind: DistKind, w: Vec<f64>) -> Self {
        debug_assert_eq!(w.len(), cfg.t() + 1);
        Distribution { cfg: *cfg, kind, weights: Weights::Real(w), stderr: None }
    }

    pub fn with_stderr(mut self, stderr: Vec<f64>) -> Self {
        self.stderr = Some(stderr);
        self
    }

    pub fn config(&self) -> &WalkConfig {
        &self.cfg
    }

    pub fn t(&self) -> usize {
        self.cfg.t()
    }

    pub fn s0(&self) -> usize {
        self.cfg.s0()
    }

    pub fn kind(&self) -> DistKind {
        self.kind
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn stderr(&self) -> Option<&[f64]> {
        self.stderr.as_deref()
    }

    pub fn numerators(&self) -> Option<&[i128]> {
        match &self.weights {
            Weights::Dyadic(v) => Some(v),
            Weights::Real(_) => None,
        }
    }

    /// Position of the walker after `s` right moves.
    pub fn position(&self, s: usize) -> usize {
        self.cfg.position(s)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        match &self.weights {
            Weights::Dyadic(v) => {
                let scale = 0.5f64.powi(self.t() as i32);
                v.iter().map(|&x| x as f64 * scale).collect()
            }
            Weights::Real(v) => v.clone(),
        }
    }

    /// Probability at physical position `x` (zero off the lattice).
    pub fn prob_at(&self, x: usize) -> f64 {
        let lo = self.position(0);
        if x < lo || !(x - lo).is_multiple_of(2) || (x - lo) / 2 > self.t() {
            return 0.0;
        }
        self.probabilities()[(x - lo) / 2]
    }

    /// `Some(true)` when dyadic numerators sum to `2^t` and none is negative.
    pub fn exact_normalized(&self) -> Option<bool> {
        self.numerators().map(|v| {
            v.iter().all(|&x| x >= 0) && v.iter().sum::<i128>() == 1i128 << self.t()
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkStats {
    pub mean: f64,
    pub variance: f64,
    pub tv: Vec<f64>,
}

fn same_support(a: &Distribution, b: &Distribution) -> Result<()> {
    if a.t() != b.t() || a.s0() != b.s0() {
        return Err(Error::InvalidArgument(format!(
            "support mismatch: (t={}, s0={}) vs (t={}, s0={})",
            a.t(),
            a.s0(),
            b.t(),
            b.s0()
        )));
    }
    Ok(())
}

/// Mean and variance of the position, and total variation distance to each reference.
pub fn stats(d: &Distribution, refs: &[&Distribution]) -> Result<WalkStats> {
    let p = d.probabilities();
    let xs: Vec<f64> = (0..p.len()).map(|s| d.position(s) as f64).collect();
    let mean: f64 = p.iter().zip(&xs).map(|(w, x)| w * x).sum();
    let second: f64 = p.iter().zip(&xs).map(|(w, x)| w * x * x).sum();
    let tv = refs.iter().map(|r| total_variation(d, r)).collect::<Result<_>>()?;
    Ok(WalkStats { mean, variance: second - mean * mean, tv })
}

pub fn variance(d: &Distribution) -> f64 {
    stats(d, &[]).map(|s| s.variance).unwrap_or(f64::NAN)
}

/// `(1/2) sum |p - q|`.
pub fn total_variation(a: &Distribution, b: &Distribution) -> Result<f64> {
    same_support(a, b)?;
    if let (Some(x), Some(y)) = (a.numerators(), b.numerators()) {
        let num: i128 = x.iter().zip(y).map(|(p, q)| (p - q).abs()).sum();
        return Ok(num as f64 * 0.5f64.powi(a.t() as i32 + 1));
    }
    let (p, q) = (a.probabilities(), b.probabilities());
    Ok(0.5 * p.iter().zip(&q).map(|(x, y)| (x - y).abs()).sum::<f64>())
}

/// Hadamard walk with initial coin `|0>`, exact: integer amplitudes over `sqrt2^t`.
pub fn hadamard_qw(cfg: &WalkConfig) -> Distribution {
    let t = cfg.t();
    // amp[s][coin], s = right moves so far
    let mut amp = vec![[0i128; 2]; t + 1];
    amp[0][0] = 1;
    for step in 0..t {
        let mut next = vec![[0i128; 2]; t + 1];
        for s in 0..=step {
            for (coin, &a) in amp[s].iter().enumerate() {
                if a == 0 {
                    continue;
                }
                next[s][0] += a;
                next[s + 1][1] += if coin == 1 { -a } else { a };
            }
        }
        amp = next;
    }
    let num = amp.iter().map(|[a, b]| a * a + b * b).collect();
    Distribution::dyadic(cfg, DistKind::Quantum, num)
}

pub fn classical_rw(cfg: &WalkConfig) -> Distribution {
    let t = cfg.t();
    let num = (0..=t).map(|s| binom(t, s) as i128).collect();
    Distribution::dyadic(cfg, DistKind::Classical, num)
}

/// Exact anyonic distribution by the forward monomial sweep.
pub fn anyonic_distribution_transfer(cfg: &WalkConfig) -> Result<Distribution> {
    anyonic_distribution_transfer_capped(cfg, DEFAULT_TRANSFER_CAP)
}

pub fn anyonic_distribution_transfer_capped(cfg: &WalkConfig, cap: usize) -> Result<Distribution> {
    let r = transfer_numerators(cfg, cap)?;
    Ok(Distribution::dyadic(cfg, DistKind::AnyonicTransfer, r.numerators))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Mc,
    Transfer,
    Oracle,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Method::Exact),
            "mc" => Ok(Method::Mc),
            "transfer" => Ok(Method::Transfer),
            "oracle" => Ok(Method::Oracle),
            _ => Err(Error::InvalidArgument(format!("unknown method {s:?}"))),
        }
    }
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Mc => "mc",
            Method::Transfer => "transfer",
            Method::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistRequest {
    pub method: Method,
    pub scheme: McScheme,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    /// Replace every fusion trace by 1 (exact method only).
    pub stub_trivial_bracket: bool,
}

impl DistRequest {
    pub fn new(method: Method) -> Self {
        DistRequest {
            method,
            scheme: McScheme::Pairs,
            samples: None,
            seed: None,
            stub_trivial_bracket: false,
        }
    }
}

/// Dispatch on the requested method after validating its options.
pub fn anyonic_distribution(cfg: &WalkConfig, req: &DistRequest) -> Result<Distribution> {
    if req.stub_trivial_bracket && req.method != Method::Exact {
        return Err(Error::InvalidArgument(
            "the trivial-bracket stub is only available with the exact method".into(),
        ));
    }
    if req.method != Method::Mc && (req.samples.is_some() || req.seed.is_some()) {
        return Err(Error::InvalidArgument(format!(
            "samples and seed only apply to the mc method, not {}",
            req.method.name()
        )));
    }
    match req.method {
        Method::Exact if req.stub_trivial_bracket => {
            anyonic_distribution_exact_with(cfg, Evaluator::TrivialBracket, DEFAULT_EXACT_CAP)
        }
        Method::Exact => anyonic_distribution_exact(cfg),
        Method::Transfer => anyonic_distribution_transfer(cfg),
        Method::Oracle => crate::fusion::oracle_distribution(cfg),
        Method::Mc => {
            let samples = req
                .samples
                .ok_or_else(|| Error::InvalidArgument("the mc method needs a sample count".into()))?;
            let seed = req
                .seed
                .ok_or_else(|| Error::InvalidArgument("the mc method needs an explicit seed".into()))?;
            let opts = McOptions { samples, seed, scheme: req.scheme };
            anyonic_distribution_mc_with(cfg, &opts).map(|(d, _)| d)
        }
    }
}

/// Large-`t` density of the Hadamard walk in the scaled coordinate `alpha`.
pub fn asymptotic_qw_density(alpha: f64) -> f64 {
    let inner = 1.0 - 2.0 * alpha * alpha;
    if inner <= 0.0 {
        return 0.0;
    }
    (1.0 - alpha) / (std::f64::consts::PI * (1.0 - alpha * alpha) * inner.sqrt())
}

/// Mixtures built from a per-`s` proper-link density.
#[derive(Debug, Clone)]
pub struct BoundingPair {
    /// `p_RW + p_prop (p_QW - p_RW)`
    pub upper: Distribution,
    /// `p_RW + p_prop (delta_{s0} - p_RW)`
    pub lower: Distribution,
    /// Right-move counts where a negative weight was clamped to zero.
    pub clamped: Vec<usize>,
}

pub fn bounding_distributions(cfg: &WalkConfig, p_prop: &[f64]) -> Result<BoundingPair> {
    let t = cfg.t();
    if p_prop.len() != t + 1 {
        return Err(Error::InvalidArgument(format!(
            "p_prop has {} entries, expected {}",
            p_prop.len(),
            t + 1
        )));
    }
    if let Some(bad) = p_prop.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::InvalidArgument(format!("p_prop value {bad} outside [0, 1]")));
    }
    if !t.is_multiple_of(2) {
        return Err(Error::InvalidArgument(
            "the point mass at s0 needs an even step count".into(),
        ));
    }
    let rw = classical_rw(cfg).probabilities();
    let qw = hadamard_qw(cfg).probabilities();
    let mut clamped = Vec::new();
    let mut mix = |target: &dyn Fn(usize) -> f64| -> Vec<f64> {
        (0..=t)
            .map(|s| {
                let v = rw[s] + p_prop[s] * (target(s) - rw[s]);
                if v < 0.0 {
                    clamped.push(s);
                    0.0
                } else {
                    v
                }
            })
            .collect()
    };
    let upper = mix(&|s| qw[s]);
    let lower = mix(&|s| if s == t / 2 { 1.0 } else { 0.0 });
    clamped.sort_unstable();
    clamped.dedup();
    Ok(BoundingPair {
        upper: Distribution::real(cfg, DistKind::Bound, upper),
        lower: Distribution::real(cfg, DistKind::Bound, lower),
        clamped,
    })
}

fn binomial_table() -> &'static Vec<Vec<u128>> {
    static TABLE: OnceLock<Vec<Vec<u128>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = 128;
        let mut c = vec![vec![0u128; n + 1]; n + 1];
        for i in 0..=n {
            c[i][0] = 1;
            for k in 1..=i {
                c[i][k] = c[i - 1][k - 1].saturating_add(c[i - 1][k]);
            }
        }
        c
    })
}

/// `C(n, k)` for `n <= 128`, zero outside `0..=n`.
pub fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    binomial_table()[n][k]
}

/// Number of histories with `s` right moves ending in coin `c`.
pub fn stratum_size(t: usize, s: usize, c: u8) -> u128 {
    if t == 0 || s < c as usize {
        return 0;
    }
    binom(t - 1, s - c as usize)
}

/// Histories with weight `s` and last outcome `c`, in increasing packed order.
pub fn histories_in_stratum(t: usize, s: usize, c: u8) -> impl Iterator<Item = CoinHistory> {
    let w = s.wrapping_sub(c as usize);
    let valid = t >= 1 && s >= c as usize && w < t;
    let head = t.saturating_sub(1);
    let top = (c as u64) << head;
    let mut next = valid.then(|| low_mask(w));
    std::iter::from_fn(move || {
        let cur = next?;
        // Gosper's hack over the first t - 1 bits
        next = if cur == 0 {
            None
        } else {
            let lowest = cur & cur.wrapping_neg();
            let ripple = cur + lowest;
            let succ = (((ripple ^ cur) >> 2) / lowest) | ripple;
            (succ & !low_mask(head) == 0).then_some(succ)
        };
        Some(CoinHistory::from_packed(cur | top, t).expect("fits"))
    })
}

/// The `idx`-th element of [`histories_in_stratum`].
pub fn unrank_history(t: usize, s: usize, c: u8, mut idx: u128) -> Result<CoinHistory> {
    let size = stratum_size(t, s, c);
    if idx >= size {
        return Err(Error::InvalidArgument(format!("index {idx} outside stratum of size {size}")));
    }
    let mut w = s - c as usize;
    let mut bits = (c as u64) << (t - 1);
    for p in (0..t - 1).rev() {
        if w == 0 {
            break;
        }
        let below = binom(p, w);
        if idx >= below {
            bits |= 1 << p;
            idx -= below;
            w -= 1;
        }
    }
    CoinHistory::from_packed(bits, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_walks_small_t() {
        let cfg = WalkConfig::with_steps(1).unwrap();
        assert_eq!(hadamard_qw(&cfg).numerators().unwrap(), &[1, 1]);
        let cfg = WalkConfig::with_steps(2).unwrap();
        assert_eq!(hadamard_qw(&cfg).numerators().unwrap(), &[1, 2, 1]);
        assert_eq!(classical_rw(&cfg).numerators().unwrap(), &[1, 2, 1]);
        let cfg = WalkConfig::with_steps(0).unwrap();
        assert_eq!(classical_rw(&cfg).numerators().unwrap(), &[1]);
        assert_eq!(hadamard_qw(&cfg).numerators().unwrap(), &[1]);
    }

    #[test]
    fn hadamard_normalized_to_100_steps() {
        for t in [3, 10, 25, 64, 100] {
            let d = hadamard_qw(&WalkConfig::with_steps(t).unwrap());
            assert_eq!(d.exact_normalized(), Some(true), "t={t}");
        }
    }

    #[test]
    fn classical_variance_is_t() {
        for t in 0..=30 {
            let d = classical_rw(&WalkConfig::with_steps(t).unwrap());
            assert!((variance(&d) - t as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn hadamard_is_left_biased() {
        // coin |0> moves left and the Hadamard walk drifts that way
        let cfg = WalkConfig::with_steps(20).unwrap();
        let s = stats(&hadamard_qw(&cfg), &[]).unwrap();
        assert!(s.mean < cfg.s0() as f64);
    }

    #[test]
    fn tv_extremes() {
        let cfg = WalkConfig::with_steps(4).unwrap();
        let d = hadamard_qw(&cfg);
        assert_eq!(total_variation(&d, &d).unwrap(), 0.0);
        let mut left = vec![0; 5];
        left[0] = 16;
        let mut right = vec![0; 5];
        right[4] = 16;
        let (l, r) = (
            Distribution::dyadic(&cfg, DistKind::Bound, left),
            Distribution::dyadic(&cfg, DistKind::Bound, right),
        );
        assert_eq!(total_variation(&l, &r).unwrap(), 1.0);
        let other = classical_rw(&WalkConfig::with_steps(5).unwrap());
        assert!(total_variation(&d, &other).is_err());
    }

    #[test]
    fn density_values_and_mass() {
        assert!((asymptotic_qw_density(0.0) - 1.0 / std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(asymptotic_qw_density(0.8), 0.0);
        assert!(asymptotic_qw_density(0.707) > 10.0);
        // alpha = sin(theta) / sqrt2 removes the endpoint singularities
        let m = 20_000;
        let h = std::f64::consts::PI / m as f64;
        let f = |theta: f64| {
            let a = theta.sin() / std::f64::consts::SQRT_2;
            (1.0 - a) / (std::f64::consts::PI * (1.0 - a * a)) / std::f64::consts::SQRT_2
        };
        let mut sum = f(-std::f64::consts::FRAC_PI_2) + f(std::f64::consts::FRAC_PI_2);
        for k in 1..m {
            let th = -std::f64::consts::FRAC_PI_2 + k as f64 * h;
            sum += if k % 2 == 1 { 4.0 } else { 2.0 } * f(th);
        }
        assert!((sum * h / 3.0 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn bounding_limits() {
        let cfg = WalkConfig::with_steps(6).unwrap();
        let rw = classical_rw(&cfg).probabilities();
        let qw = hadamard_qw(&cfg).probabilities();
        let b = bounding_distributions(&cfg, &[0.0; 7]).unwrap();
        assert_eq!(b.upper.probabilities(), rw);
        assert_eq!(b.lower.probabilities(), rw);
        let b = bounding_distributions(&cfg, &[1.0; 7]).unwrap();
        assert_eq!(b.upper.probabilities(), qw);
        assert_eq!(b.lower.probabilities(), vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        assert!(b.clamped.is_empty());
        assert!(bounding_distributions(&cfg, &[1.5; 7]).is_err());
    }

    #[test]
    fn stratum_enumeration_and_unranking() {
        for t in 1..=9 {
            let mut total = 0u128;
            for s in 0..=t {
                for c in 0..2u8 {
                    let all: Vec<CoinHistory> = histories_in_stratum(t, s, c).collect();
                    assert_eq!(all.len() as u128, stratum_size(t, s, c), "t={t} s={s} c={c}");
                    for (k, h) in all.iter().enumerate() {
                        assert_eq!(h.weight(), s);
                        assert_eq!(h.last(), Some(c));
                        assert_eq!(unrank_history(t, s, c, k as u128).unwrap(), *h);
                    }
                    assert!(all.windows(2).all(|w| w[0].packed() < w[1].packed()));
                    total += all.len() as u128;
                }
            }
            assert_eq!(total, 1 << t);
        }
    }
}
