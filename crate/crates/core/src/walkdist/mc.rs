//! Stratified Monte Carlo for the anyonic distribution.
//!
//! Strata are `(s, last coin)`. Mirror pairs are added exactly; only the
//! non-mirror sum is estimated. Each stratum draws from its own ChaCha stream,
//! so results depend on the seed and sample budget only.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::exact::pair_contribution;
use super::{histories_in_stratum, stratum_size, unrank_history, DistKind, Distribution};
use crate::braid::{PathPair, WalkConfig};
use crate::error::{Error, Result};
use crate::fusion::monomial::{classify, StraightPathTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum McScheme {
    /// Uniform non-mirror pairs scored through the link invariants.
    Pairs,
    /// Uniform single histories grouped by fusion class; all sampled pairs are scored at once.
    Pooled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct McOptions {
    pub samples: u64,
    pub seed: u64,
    pub scheme: McScheme,
}

const POOLED_BATCHES: u64 = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StratumRecord {
    pub s: usize,
    pub last_bit: u8,
    pub histories: u128,
    pub nonmirror_pairs: u128,
    pub samples: u64,
    pub exhaustive: bool,
    /// Estimated `2^t` times the stratum's probability mass, mirrors included.
    pub estimate: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEstimate {
    pub samples: u64,
    pub seed: u64,
    pub scheme: McScheme,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub strata: Vec<StratumRecord>,
}

/// Pair scheme with the given budget and seed.
pub fn anyonic_distribution_mc(
    cfg: &WalkConfig,
    samples: u64,
    seed: u64,
) -> Result<(Distribution, McEstimate)> {
    anyonic_distribution_mc_with(cfg, &McOptions { samples, seed, scheme: McScheme::Pairs })
}

struct Stratum {
    id: u64,
    s: usize,
    c: u8,
    n: u128,
    budget: u64,
}

/// Largest-remainder split of `total` proportional to `weights`.
fn allocate(total: u64, weights: &[u128]) -> Vec<u64> {
    let sum: u128 = weights.iter().sum();
    if sum == 0 {
        return vec![0; weights.len()];
    }
    let mut out: Vec<u64> = Vec::with_capacity(weights.len());
    let mut rems: Vec<(u128, usize)> = Vec::with_capacity(weights.len());
    for (k, &w) in weights.iter().enumerate() {
        let prod = total as u128 * w;
        out.push((prod / sum) as u64);
        rems.push((prod % sum, k));
    }
    let given: u64 = out.iter().sum();
    rems.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, k) in rems.iter().take((total - given) as usize) {
        out[k] += 1;
    }
    out
}

pub fn anyonic_distribution_mc_with(
    cfg: &WalkConfig,
    opts: &McOptions,
) -> Result<(Distribution, McEstimate)> {
    let t = cfg.t();
    if t == 0 {
        let d = Distribution::real(cfg, DistKind::AnyonicMc, vec![1.0]).with_stderr(vec![0.0]);
        let est = McEstimate {
            samples: opts.samples,
            seed: opts.seed,
            scheme: opts.scheme,
            mean: vec![1.0],
            stderr: vec![0.0],
            strata: Vec::new(),
        };
        return Ok((d, est));
    }
    if t > crate::braid::MAX_STEPS {
        return Err(Error::CapExceeded {
            what: "Monte Carlo history length",
            requested: t as u64,
            cap: crate::braid::MAX_STEPS as u64,
        });
    }
    let mut strata: Vec<Stratum> = Vec::new();
    for s in 0..=t {
        for c in 0..2u8 {
            let n = stratum_size(t, s, c);
            if n > 0 {
                strata.push(Stratum { id: (2 * s + c as usize) as u64, s, c, n, budget: 0 });
            }
        }
    }
    let weights: Vec<u128> = strata
        .iter()
        .map(|st| match opts.scheme {
            McScheme::Pairs => st.n * (st.n - 1),
            McScheme::Pooled => {
                if st.n > 1 {
                    st.n
                } else {
                    0
                }
            }
        })
        .collect();
    for (st, b) in strata.iter_mut().zip(allocate(opts.samples, &weights)) {
        st.budget = b;
    }

    let table = StraightPathTable::new(cfg)?;
    let records: Vec<StratumRecord> = strata
        .par_iter()
        .map(|st| match opts.scheme {
            McScheme::Pairs => pairs_stratum(cfg, st, opts.seed),
            McScheme::Pooled => pooled_stratum(cfg, &table, st, opts.seed),
        })
        .collect::<Result<_>>()?;

    let scale = 0.5f64.powi(t as i32);
    let mut mean = vec![0.0; t + 1];
    let mut var = vec![0.0; t + 1];
    for r in &records {
        mean[r.s] += r.estimate * scale;
        var[r.s] += (r.stderr * scale).powi(2);
    }
    let stderr: Vec<f64> = var.iter().map(|v| v.sqrt()).collect();
    let d = Distribution::real(cfg, DistKind::AnyonicMc, mean.clone()).with_stderr(stderr.clone());
    let est = McEstimate {
        samples: opts.samples,
        seed: opts.seed,
        scheme: opts.scheme,
        mean,
        stderr,
        strata: records,
    };
    Ok((d, est))
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn pairs_stratum(cfg: &WalkConfig, st: &Stratum, seed: u64) -> Result<StratumRecord> {
    let t = cfg.t();
    let m = st.n * (st.n - 1);
    let mut rec = StratumRecord {
        s: st.s,
        last_bit: st.c,
        histories: st.n,
        nonmirror_pairs: m,
        samples: st.budget,
        exhaustive: false,
        estimate: st.n as f64,
        stderr: 0.0,
    };
    if m == 0 {
        rec.exhaustive = true;
        return Ok(rec);
    }
    if st.budget as u128 >= m {
        let hist: Vec<_> = histories_in_stratum(t, st.s, st.c).collect();
        let mut sum = 0i128;
        for (i, a) in hist.iter().enumerate() {
            for b in &hist[i + 1..] {
                sum += 2 * pair_contribution(&PathPair::new(*a, *b)?, cfg)? as i128;
            }
        }
        rec.exhaustive = true;
        rec.samples = m as u64;
        rec.estimate += sum as f64;
        return Ok(rec);
    }
    if st.budget < 2 {
        // nothing to average: report the mirror baseline with the full range as error
        rec.stderr = m as f64;
        return Ok(rec);
    }
    let mut rng = stream(seed, st.id);
    let (mut sum, mut sum_sq) = (0i64, 0i64);
    for _ in 0..st.budget {
        let i = rng.gen_range(0..st.n);
        let j = loop {
            let j = rng.gen_range(0..st.n);
            if j != i {
                break j;
            }
        };
        let p = PathPair::new(
            unrank_history(t, st.s, st.c, i)?,
            unrank_history(t, st.s, st.c, j)?,
        )?;
        let v = pair_contribution(&p, cfg)? as i64;
        sum += v;
        sum_sq += v * v;
    }
    let k = st.budget as f64;
    let mean = sum as f64 / k;
    let sample_var = (sum_sq as f64 - k * mean * mean) / (k - 1.0);
    rec.estimate += m as f64 * mean;
    rec.stderr = m as f64 * (sample_var.max(0.0) / k).sqrt();
    Ok(rec)
}

/// Non-mirror sum from a batch of iid draws: `N^2 / (k (k - 1)) * sum over
/// ordered draw pairs with distinct histories and equal class of sign products`.
fn pooled_estimate(n: u128, draws: &[(u128, (u128, u8), i8)]) -> f64 {
    let k = draws.len() as f64;
    let mut by_class: HashMap<(u128, u8), i64> = HashMap::new();
    let mut by_history: HashMap<u128, i64> = HashMap::new();
    for &(idx, class, sign) in draws {
        *by_class.entry(class).or_insert(0) += sign as i64;
        *by_history.entry(idx).or_insert(0) += 1;
    }
    let class_sq: i64 = by_class.values().map(|b| b * b).sum();
    let same_history: i64 = by_history.values().map(|m| m * m).sum();
    let n = n as f64;
    n * n / (k * (k - 1.0)) * (class_sq - same_history) as f64
}

fn pooled_stratum(
    cfg: &WalkConfig,
    table: &StraightPathTable,
    st: &Stratum,
    seed: u64,
) -> Result<StratumRecord> {
    let t = cfg.t();
    let mut rec = StratumRecord {
        s: st.s,
        last_bit: st.c,
        histories: st.n,
        nonmirror_pairs: st.n * (st.n - 1),
        samples: st.budget,
        exhaustive: false,
        estimate: st.n as f64,
        stderr: 0.0,
    };
    if st.n == 1 {
        rec.exhaustive = true;
        return Ok(rec);
    }
    if st.budget as u128 >= st.n {
        let mut by_class: HashMap<(u128, u8), i64> = HashMap::new();
        for a in histories_in_stratum(t, st.s, st.c) {
            let c = classify(table, &a);
            *by_class.entry((c.mask, c.phase8)).or_insert(0) += c.sign as i64;
        }
        rec.exhaustive = true;
        rec.samples = st.n as u64;
        rec.estimate = by_class.values().map(|b| (b * b) as f64).sum();
        return Ok(rec);
    }
    if st.budget < 2 * POOLED_BATCHES {
        rec.stderr = rec.nonmirror_pairs as f64;
        return Ok(rec);
    }
    let mut rng = stream(seed, st.id);
    let mut draws = Vec::with_capacity(st.budget as usize);
    for _ in 0..st.budget {
        let idx = rng.gen_range(0..st.n);
        let a = unrank_history(t, st.s, st.c, idx)?;
        let c = classify(table, &a);
        draws.push((idx, (c.mask, c.phase8), c.sign));
    }
    let batch = (st.budget / POOLED_BATCHES) as usize;
    let parts: Vec<f64> = draws
        .chunks(batch)
        .take(POOLED_BATCHES as usize)
        .map(|d| pooled_estimate(st.n, d))
        .collect();
    let b = parts.len() as f64;
    let avg = parts.iter().sum::<f64>() / b;
    let spread = parts.iter().map(|x| (x - avg).powi(2)).sum::<f64>() / (b - 1.0);
    rec.estimate += pooled_estimate(st.n, &draws);
    // batch spread: conservative for the full-sample statistic
    rec.stderr = (spread / b).sqrt();
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walkdist::{anyonic_distribution_exact, anyonic_distribution_transfer, classical_rw};

    // pooled draws histories, so it only samples when t is large enough that
    // the budget does not cover whole strata
    fn case(scheme: McScheme) -> usize {
        match scheme {
            McScheme::Pairs => 10,
            McScheme::Pooled => 14,
        }
    }

    #[test]
    fn allocation_is_exact_and_proportional() {
        let a = allocate(10, &[1, 1, 2]);
        assert_eq!(a.iter().sum::<u64>(), 10);
        assert_eq!(a, vec![3, 2, 5]);
        assert_eq!(allocate(5, &[0, 0]), vec![0, 0]);
    }

    #[test]
    fn full_coverage_is_exact() {
        let cfg = WalkConfig::with_steps(6).unwrap();
        let exact = anyonic_distribution_exact(&cfg).unwrap().probabilities();
        for scheme in [McScheme::Pairs, McScheme::Pooled] {
            let (d, est) =
                anyonic_distribution_mc_with(&cfg, &McOptions { samples: 1 << 20, seed: 1, scheme })
                    .unwrap();
            assert!(est.strata.iter().all(|r| r.exhaustive));
            for (a, b) in d.probabilities().iter().zip(&exact) {
                assert!((a - b).abs() < 1e-12, "{scheme:?}");
            }
        }
    }

    #[test]
    fn zero_samples_is_classical() {
        let cfg = WalkConfig::with_steps(7).unwrap();
        let (d, _) = anyonic_distribution_mc(&cfg, 0, 3).unwrap();
        assert_eq!(d.probabilities(), classical_rw(&cfg).probabilities());
    }

    #[test]
    fn seeded_runs_repeat() {
        for scheme in [McScheme::Pairs, McScheme::Pooled] {
            let cfg = WalkConfig::with_steps(case(scheme)).unwrap();
            let o = McOptions { samples: 4000, seed: 42, scheme };
            let (a, _) = anyonic_distribution_mc_with(&cfg, &o).unwrap();
            let (b, _) = anyonic_distribution_mc_with(&cfg, &o).unwrap();
            assert_eq!(a, b);
            let (c, _) = anyonic_distribution_mc_with(&cfg, &McOptions { seed: 43, ..o }).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn partial_coverage_within_error() {
        for scheme in [McScheme::Pairs, McScheme::Pooled] {
            let t = case(scheme);
            let cfg = WalkConfig::with_steps(t).unwrap();
            let exact = anyonic_distribution_transfer(&cfg).unwrap().probabilities();
            let (d, est) =
                anyonic_distribution_mc_with(&cfg, &McOptions { samples: 8_000, seed: 7, scheme })
                    .unwrap();
            assert!(est.strata.iter().any(|r| !r.exhaustive));
            let p = d.probabilities();
            let se = d.stderr().unwrap();
            for s in 0..=t {
                assert!((p[s] - exact[s]).abs() <= 5.0 * se[s] + 1e-12, "{scheme:?} s={s}");
            }
        }
    }
}
