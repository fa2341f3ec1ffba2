//! Proper-link statistics: lattice-path counts, the density of proper links
//! among non-mirror pairs, per-bond linking parities, and the `C / t^2` bound.

use std::collections::HashMap;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::braid::{braid_from_history, close_link, combined_word, CoinHistory, PathPair, WalkConfig};
use crate::error::{Error, Result};
use crate::linkinv::linking_profile;
use crate::walkdist::{histories_in_stratum, stratum_size, unrank_history};

pub const DEFAULT_DENSITY_CAP: usize = 14;

/// `C(n, k)` with `C(n, k) = 0` for `k < 0` or `k > n`.
pub fn binom_big(n: i64, k: i64) -> BigUint {
    if n < 0 || k < 0 || k > n {
        return BigUint::ZERO;
    }
    let k = k.min(n - k) as u64;
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * BigUint::from(n as u64 - i) / BigUint::from(i + 1);
    }
    acc
}

/// Half-paths on the `(n - 1) x n` lattice for `t = 2n` steps ending at `s0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePathCounts {
    pub n: usize,
    pub all: BigUint,
    /// `touch[w - 1]`: paths touching `y = x + w`, `w = 1..=n + 1`.
    pub touch: Vec<BigUint>,
    /// `pw[w - 1] = |P_w|`: touch `y = x + w` but not `y = x + w + 1`.
    pub pw: Vec<BigUint>,
}

pub fn lattice_counts(n: usize) -> Result<LatticePathCounts> {
    if n == 0 {
        return Err(Error::InvalidArgument("lattice size n must be at least 1".into()));
    }
    let m = n as i64;
    let all = binom_big(2 * m - 1, m - 1);
    let touch: Vec<BigUint> = (1..=m + 1).map(|w| binom_big(2 * m - 1, m - w)).collect();
    let pw = (0..n).map(|k| &touch[k] - &touch[k + 1]).collect();
    Ok(LatticePathCounts { n, all, touch, pw })
}

impl LatticePathCounts {
    /// `|P_w| = (w / n) C(2n, n - w)`, exact.
    pub fn pw_closed_form(&self, w: usize) -> BigUint {
        let num = BigUint::from(w) * binom_big(2 * self.n as i64, self.n as i64 - w as i64);
        num / BigUint::from(self.n)
    }

    /// Telescoping sum and the two `|P_w|` formulas.
    pub fn identities_hold(&self) -> bool {
        let sum: BigUint = self.pw.iter().sum();
        let closed = (1..=self.n).all(|w| {
            let num = BigUint::from(w) * binom_big(2 * self.n as i64, self.n as i64 - w as i64);
            num.clone() % BigUint::from(self.n) == BigUint::ZERO
                && self.pw_closed_form(w) == self.pw[w - 1]
        });
        sum == self.all && closed
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityMethod {
    Exact,
    Mc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProperDensity {
    pub t: usize,
    pub s: usize,
    pub method: DensityMethod,
    /// `None` for a stratum without non-mirror pairs.
    pub value: Option<f64>,
    pub stderr: f64,
    pub proper_pairs: u128,
    pub pairs: u128,
}

/// Right-move count that returns the walker to `s0` (even `t` only).
pub fn endpoint_s(t: usize) -> Option<usize> {
    t.is_multiple_of(2).then_some(t / 2)
}

/// Letter count per bond, indexed by generator.
fn bond_counts(a: &CoinHistory, cfg: &WalkConfig) -> Result<Vec<u32>> {
    let mut c = vec![0u32; cfg.n()];
    for l in braid_from_history(a, cfg)?.letters() {
        c[l.index] += 1;
    }
    Ok(c)
}

pub fn proper_density_exact(cfg: &WalkConfig, s: usize, cap: usize) -> Result<ProperDensity> {
    let t = cfg.t();
    if t > cap {
        return Err(Error::CapExceeded {
            what: "exact proper density steps",
            requested: t as u64,
            cap: cap as u64,
        });
    }
    if s > t {
        return Err(Error::InvalidArgument(format!("s = {s} exceeds t = {t}")));
    }
    let (mut proper, mut pairs) = (0u128, 0u128);
    for c in 0..2u8 {
        let mut groups: HashMap<Vec<u8>, u128> = HashMap::new();
        let mut n = 0u128;
        for a in histories_in_stratum(t, s, c) {
            let sig = bond_counts(&a, cfg)?.iter().map(|v| (v % 4) as u8).collect();
            *groups.entry(sig).or_insert(0) += 1;
            n += 1;
        }
        pairs += n * n.saturating_sub(1);
        proper += groups.values().map(|g| g * (g - 1)).sum::<u128>();
    }
    Ok(ProperDensity {
        t,
        s,
        method: DensityMethod::Exact,
        value: (pairs > 0).then(|| proper as f64 / pairs as f64),
        stderr: 0.0,
        proper_pairs: proper,
        pairs,
    })
}

/// A uniform non-mirror pair at right-move count `s`, or `None` if there is none.
fn sample_pair(t: usize, s: usize, rng: &mut ChaCha8Rng) -> Result<Option<PathPair>> {
    let m: Vec<u128> = (0..2u8)
        .map(|c| {
            let n = stratum_size(t, s, c);
            n * n.saturating_sub(1)
        })
        .collect();
    let total = m[0] + m[1];
    if total == 0 {
        return Ok(None);
    }
    let c = if rng.gen_range(0..total) < m[0] { 0u8 } else { 1 };
    let n = stratum_size(t, s, c);
    let i = rng.gen_range(0..n);
    let j = loop {
        let j = rng.gen_range(0..n);
        if j != i {
            break j;
        }
    };
    Ok(Some(PathPair::new(unrank_history(t, s, c, i)?, unrank_history(t, s, c, j)?)?))
}

pub fn proper_density_mc(
    cfg: &WalkConfig,
    s: usize,
    samples: u64,
    seed: u64,
) -> Result<ProperDensity> {
    let t = cfg.t();
    if s > t {
        return Err(Error::InvalidArgument(format!("s = {s} exceeds t = {t}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(s as u64);
    let mut hits = 0u64;
    let mut drawn = 0u64;
    for _ in 0..samples {
        let Some(p) = sample_pair(t, s, &mut rng)? else { break };
        drawn += 1;
        let link = close_link(&combined_word(&p, cfg)?);
        if linking_profile(&link)?.is_proper() {
            hits += 1;
        }
    }
    let value = (drawn > 0).then(|| hits as f64 / drawn as f64);
    let stderr = value.map_or(0.0, |p| (p * (1.0 - p) / drawn.max(1) as f64).sqrt());
    Ok(ProperDensity {
        t,
        s,
        method: DensityMethod::Mc,
        value,
        stderr,
        proper_pairs: hits as u128,
        pairs: drawn as u128,
    })
}

pub fn proper_density(
    cfg: &WalkConfig,
    s: usize,
    method: DensityMethod,
    samples: Option<u64>,
    seed: Option<u64>,
) -> Result<ProperDensity> {
    match method {
        DensityMethod::Exact => proper_density_exact(cfg, s, DEFAULT_DENSITY_CAP),
        DensityMethod::Mc => {
            let samples = samples
                .ok_or_else(|| Error::InvalidArgument("Monte Carlo density needs a sample count".into()))?;
            let seed =
                seed.ok_or_else(|| Error::InvalidArgument("Monte Carlo density needs a seed".into()))?;
            proper_density_mc(cfg, s, samples, seed)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BondParity {
    pub bond: usize,
    pub touched: u64,
    pub even: u64,
    pub p_even: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParityReport {
    pub t: usize,
    pub s: usize,
    pub samples: u64,
    pub seed: u64,
    /// Bonds touched fewer times than this are left out of `rho`.
    pub min_touched: u64,
    pub bonds: Vec<BondParity>,
    pub rho: Option<f64>,
    pub rho_bond: Option<usize>,
    /// Correlation of the even indicators of bonds `j` and `j + 1` over samples touching both.
    pub adjacent_correlation: Vec<(usize, Option<f64>)>,
}

/// Per-bond probability that the walker's linking number with the anyon at
/// that bond is even, given the bond is touched by either path.
pub fn parity_probs(cfg: &WalkConfig, s: usize, samples: u64, seed: u64) -> Result<ParityReport> {
    let t = cfg.t();
    if s > t {
        return Err(Error::InvalidArgument(format!("s = {s} exceeds t = {t}")));
    }
    let bonds = cfg.n();
    let mut touched = vec![0u64; bonds];
    let mut even = vec![0u64; bonds];
    // joint counts for (j, j + 1): n, sum x, sum y, sum xy
    let mut joint = vec![[0u64; 4]; bonds];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(s as u64);
    let mut drawn = 0u64;
    for _ in 0..samples {
        let Some(p) = sample_pair(t, s, &mut rng)? else { break };
        drawn += 1;
        let (ca, cb) = (bond_counts(&p.forward(), cfg)?, bond_counts(&p.backward(), cfg)?);
        let state: Vec<Option<bool>> = (0..bonds)
            .map(|j| (ca[j] + cb[j] > 0).then(|| (ca[j] as i64 - cb[j] as i64) % 4 == 0))
            .collect();
        for j in 1..bonds {
            if let Some(e) = state[j] {
                touched[j] += 1;
                even[j] += e as u64;
            }
            if j + 1 < bonds {
                if let (Some(x), Some(y)) = (state[j], state[j + 1]) {
                    let acc = &mut joint[j];
                    acc[0] += 1;
                    acc[1] += x as u64;
                    acc[2] += y as u64;
                    acc[3] += (x && y) as u64;
                }
            }
        }
    }
    let min_touched = (drawn / 20).max(1);
    let per_bond: Vec<BondParity> = (1..bonds)
        .map(|j| BondParity {
            bond: j,
            touched: touched[j],
            even: even[j],
            p_even: (touched[j] > 0).then(|| even[j] as f64 / touched[j] as f64),
        })
        .collect();
    let best = per_bond
        .iter()
        .filter(|b| b.touched >= min_touched)
        .filter_map(|b| b.p_even.map(|p| (p, b.bond)))
        .fold(None, |acc: Option<(f64, usize)>, (p, j)| match acc {
            Some((q, _)) if q >= p => acc,
            _ => Some((p, j)),
        });
    let adjacent_correlation = (1..bonds.saturating_sub(1))
        .map(|j| {
            let [n, sx, sy, sxy] = joint[j];
            let corr = (n > 1).then(|| {
                let n = n as f64;
                let (mx, my) = (sx as f64 / n, sy as f64 / n);
                let cov = sxy as f64 / n - mx * my;
                let (vx, vy) = (mx * (1.0 - mx), my * (1.0 - my));
                if vx > 0.0 && vy > 0.0 {
                    cov / (vx * vy).sqrt()
                } else {
                    f64::NAN
                }
            });
            (j, corr.filter(|c| c.is_finite()))
        })
        .collect();
    Ok(ParityReport {
        t,
        s,
        samples: drawn,
        seed,
        min_touched,
        bonds: per_bond,
        rho: best.map(|b| b.0),
        rho_bond: best.map(|b| b.1),
        adjacent_correlation,
    })
}

/// `C(rho) / t^2` with `C = (96/5) rho (1 + 4 rho + rho^2) / (1 - rho)^4`.
pub fn analytic_bound(rho: f64, t: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidArgument(format!("rho = {rho} outside [0, 1)")));
    }
    if t < 4 {
        return Err(Error::InvalidArgument(format!("the bound needs t >= 4, got {t}")));
    }
    let c = 96.0 / 5.0 * rho * (1.0 + 4.0 * rho + rho * rho) / (1.0 - rho).powi(4);
    Ok(c / (t * t) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walkdist::pair_contribution;

    #[test]
    fn lattice_small_case() {
        let c = lattice_counts(2).unwrap();
        assert_eq!(c.all, BigUint::from(3u32));
        assert_eq!(c.pw, vec![BigUint::from(2u32), BigUint::from(1u32)]);
        assert!(c.identities_hold());
        assert!(lattice_counts(0).is_err());
    }

    #[test]
    fn lattice_identities_to_64() {
        for n in 1..=64 {
            assert!(lattice_counts(n).unwrap().identities_hold(), "n={n}");
        }
    }

    #[test]
    fn binomial_convention() {
        assert_eq!(binom_big(5, -1), BigUint::ZERO);
        assert_eq!(binom_big(5, 6), BigUint::ZERO);
        assert_eq!(binom_big(10, 3), BigUint::from(120u32));
    }

    #[test]
    fn bound_values() {
        assert_eq!(analytic_bound(0.0, 10).unwrap(), 0.0);
        assert!((analytic_bound(0.5, 10).unwrap() - 4.992).abs() < 1e-12);
        assert!(analytic_bound(1.0, 10).is_err());
        assert!(analytic_bound(0.5, 3).is_err());
    }

    #[test]
    fn empty_stratum_at_t2() {
        let cfg = WalkConfig::with_steps(2).unwrap();
        let d = proper_density_exact(&cfg, 1, 14).unwrap();
        assert_eq!(d.value, None);
        assert_eq!(d.pairs, 0);
    }

    #[test]
    fn exact_density_matches_pipeline() {
        for t in 3..=7 {
            let cfg = WalkConfig::with_steps(t).unwrap();
            for s in 0..=t {
                let d = proper_density_exact(&cfg, s, 14).unwrap();
                let (mut prop, mut all) = (0u128, 0u128);
                for c in 0..2u8 {
                    let h: Vec<_> = histories_in_stratum(t, s, c).collect();
                    for a in &h {
                        for b in &h {
                            if a != b {
                                all += 1;
                                let p = PathPair::new(*a, *b).unwrap();
                                prop += (pair_contribution(&p, &cfg).unwrap() != 0) as u128;
                            }
                        }
                    }
                }
                assert_eq!((d.proper_pairs, d.pairs), (prop, all), "t={t} s={s}");
            }
        }
    }

    #[test]
    fn density_at_endpoint_decreases() {
        let cfg = WalkConfig::with_steps(4).unwrap();
        let d4 = proper_density_exact(&cfg, 2, 14).unwrap();
        assert_eq!(d4.proper_pairs, 0);
        let vals: Vec<f64> = [6usize, 8, 10, 12]
            .iter()
            .map(|&t| {
                let cfg = WalkConfig::with_steps(t).unwrap();
                proper_density_exact(&cfg, endpoint_s(t).unwrap(), 14).unwrap().value.unwrap()
            })
            .collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]), "{vals:?}");
    }

    #[test]
    fn mc_density_within_three_sigma() {
        let cfg = WalkConfig::with_steps(10).unwrap();
        let exact = proper_density_exact(&cfg, 5, 14).unwrap().value.unwrap();
        let mc = proper_density_mc(&cfg, 5, 20_000, 11).unwrap();
        assert!((mc.value.unwrap() - exact).abs() <= 3.0 * mc.stderr);
    }

    #[test]
    fn parity_report_is_reproducible() {
        let cfg = WalkConfig::with_steps(8).unwrap();
        let a = parity_probs(&cfg, 4, 2000, 5).unwrap();
        let b = parity_probs(&cfg, 4, 2000, 5).unwrap();
        assert_eq!(a, b);
        let rho = a.rho.unwrap();
        assert!((0.0..=1.0).contains(&rho));
        assert_eq!(a.samples, 2000);
    }
}
