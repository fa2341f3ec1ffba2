//! Exhaustive pair enumeration: every valid pair contributes `0` or `+-2^-t`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{histories_in_stratum, DistKind, Distribution};
use crate::braid::{braid_from_history, close_link, combined_word, CoinHistory, PathPair, WalkConfig};
use crate::error::{Error, Result};
use crate::linkinv::{linking_profile, tau};

pub const DEFAULT_EXACT_CAP: usize = 14;

/// How a pair's fusion trace is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Evaluator {
    /// Properness and `tau` from the link invariants.
    Invariants,
    /// Every pair counts as proper with `tau = 0`.
    TrivialBracket,
    /// Only mirror pairs contribute.
    MirrorOnly,
}

/// `z(a, a')`: consecutive right-move pairs summed over both histories.
pub fn coin_z(p: &PathPair) -> u32 {
    p.forward().consecutive_ones() + p.backward().consecutive_ones()
}

pub fn coin_parity_z(p: &PathPair) -> u8 {
    (coin_z(p) % 2) as u8
}

/// `0` for improper links, else `(-1)^(z + tau)`.
pub fn pair_contribution(p: &PathPair, cfg: &WalkConfig) -> Result<i8> {
    let link = close_link(&combined_word(p, cfg)?);
    let profile = linking_profile(&link)?;
    if !profile.is_proper() {
        return Ok(0);
    }
    let parity = (coin_parity_z(p) + tau(&link)?) % 2;
    Ok(if parity == 0 { 1 } else { -1 })
}

pub fn anyonic_distribution_exact(cfg: &WalkConfig) -> Result<Distribution> {
    anyonic_distribution_exact_with(cfg, Evaluator::Invariants, DEFAULT_EXACT_CAP)
}

struct Task {
    s: usize,
    members: Vec<CoinHistory>,
}

/// Per-bond letter counts mod 4; equal keys are exactly the proper pairs.
fn bond_signature(a: &CoinHistory, cfg: &WalkConfig) -> Result<Vec<u8>> {
    let mut sig = vec![0u8; cfg.n()];
    for l in braid_from_history(a, cfg)?.letters() {
        sig[l.index] = (sig[l.index] + 1) % 4;
    }
    Ok(sig)
}

pub fn anyonic_distribution_exact_with(
    cfg: &WalkConfig,
    evaluator: Evaluator,
    cap: usize,
) -> Result<Distribution> {
    let t = cfg.t();
    if t > cap {
        return Err(Error::CapExceeded {
            what: "exact pair enumeration steps (use the mc or transfer method)",
            requested: t as u64,
            cap: cap as u64,
        });
    }
    if t == 0 {
        return Ok(Distribution::dyadic(cfg, DistKind::AnyonicExact, vec![1]));
    }

    let mut tasks = Vec::new();
    for s in 0..=t {
        for c in 0..2u8 {
            let members: Vec<CoinHistory> = histories_in_stratum(t, s, c).collect();
            if members.is_empty() {
                continue;
            }
            if evaluator == Evaluator::Invariants {
                let mut groups: HashMap<Vec<u8>, Vec<CoinHistory>> = HashMap::new();
                for a in members {
                    groups.entry(bond_signature(&a, cfg)?).or_default().push(a);
                }
                let mut groups: Vec<_> = groups.into_values().collect();
                groups.sort_by_key(|g| g[0]);
                tasks.extend(groups.into_iter().map(|members| Task { s, members }));
            } else {
                tasks.push(Task { s, members });
            }
        }
    }

    let partial: Vec<(usize, i128)> = tasks
        .par_iter()
        .map(|task| task_sum(task, cfg, evaluator).map(|v| (task.s, v)))
        .collect::<Result<_>>()?;
    let mut num = vec![0i128; t + 1];
    for (s, v) in partial {
        num[s] += v;
    }
    Ok(Distribution::dyadic(cfg, DistKind::AnyonicExact, num))
}

fn task_sum(task: &Task, cfg: &WalkConfig, evaluator: Evaluator) -> Result<i128> {
    let m = &task.members;
    // mirror pairs: trivial proper link, z even
    let mut total = m.len() as i128;
    match evaluator {
        Evaluator::MirrorOnly => {}
        Evaluator::TrivialBracket => {
            for (i, a) in m.iter().enumerate() {
                for (j, b) in m.iter().enumerate() {
                    if i != j {
                        let z = a.consecutive_ones() + b.consecutive_ones();
                        total += if z % 2 == 0 { 1 } else { -1 };
                    }
                }
            }
        }
        Evaluator::Invariants => {
            // (a, b) and (b, a) close to mirror-image links with the same trace
            for (i, a) in m.iter().enumerate() {
                for b in &m[i + 1..] {
                    let p = PathPair::new(*a, *b)?;
                    let c = pair_contribution(&p, cfg)?;
                    if c == 0 {
                        return Err(Error::Consistency(format!(
                            "pair {a}/{b} shares a mod-4 bond signature but is not proper"
                        )));
                    }
                    total += 2 * c as i128;
                }
            }
        }
    }
    Ok(total)
}
