//! Walk amplitudes tracked as Majorana monomials relative to straight paths.
//!
//! Let `R_s` be the fusion operator of the straight path from `s0` to site `s`.
//! A step away from `s0` extends `R_s` and costs nothing. A step back towards
//! `s0` applies a generator a second time, and `rho(b)^2 = zeta^2 Gamma_j
//! Gamma_{j+1}`, so every history's fusion operator is `R_s zeta^k Gamma^mask`
//! for a single Majorana monomial. Monomials are trace-orthogonal, which turns
//! the reduced spatial state into a sum of squares over
//! `(site, coin, monomial)` buckets.

use std::collections::HashMap;

use crate::braid::{CoinHistory, WalkConfig};
use crate::error::{Error, Result};

/// Default step cap for [`transfer_numerators`]; the bucket count grows roughly as `1.65^t`.
pub const DEFAULT_TRANSFER_CAP: usize = 32;

/// Majorana indices (1-based) must fit a `u128` mask.
const MAX_MAJORANAS: usize = 126;

/// `Gamma^m1 Gamma^m2 = (-1)^odd Gamma^(m1 ^ m2)` for ascending-ordered monomials.
pub fn mono_mul(m1: u128, m2: u128) -> (bool, u128) {
    let mut swaps = 0u32;
    let mut rest = m2;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        swaps += m1.checked_shr(j + 1).unwrap_or(0).count_ones();
    }
    (swaps % 2 == 1, m1 ^ m2)
}

/// `R_s^-1 Gamma_k R_s = sign * Gamma_idx` for every reachable site.
#[derive(Debug, Clone)]
pub struct StraightPathTable {
    s0: usize,
    lo: usize,
    /// `conj[site - lo][k] = (negative, idx)`, entry 0 unused.
    conj: Vec<Vec<(bool, u8)>>,
}

impl StraightPathTable {
    pub fn new(cfg: &WalkConfig) -> Result<Self> {
        let (t, n, s0) = (cfg.t(), cfg.n(), cfg.s0());
        if n > MAX_MAJORANAS {
            return Err(Error::CapExceeded {
                what: "Majorana monomial width",
                requested: n as u64,
                cap: MAX_MAJORANAS as u64,
            });
        }
        let lo = s0 - t;
        let identity: Vec<(bool, u8)> = (0..=n).map(|k| (false, k as u8)).collect();
        let mut conj = vec![Vec::new(); 2 * t + 1];
        conj[s0 - lo] = identity;
        // conjugating by rho(b_j): Gamma_j -> Gamma_{j+1}, Gamma_{j+1} -> -Gamma_j
        let step = |c: &Vec<(bool, u8)>, j: usize| -> Vec<(bool, u8)> {
            (0..=n)
                .map(|k| {
                    let (neg, i) = if k == j {
                        (false, j + 1)
                    } else if k == j + 1 {
                        (true, j)
                    } else {
                        (false, k)
                    };
                    let (neg2, i2) = c[i];
                    (neg ^ neg2, i2)
                })
                .collect()
        };
        for s in s0..s0 + t {
            conj[s + 1 - lo] = step(&conj[s - lo], s);
        }
        for s in (lo + 1..=s0).rev() {
            conj[s - 1 - lo] = step(&conj[s - lo], s - 1);
        }
        Ok(StraightPathTable { s0, lo, conj })
    }

    /// `R_site^-1 Gamma_j Gamma_{j+1} R_site` as `(zeta power 0 or 8, mask)`.
    pub fn pair_image(&self, site: usize, j: usize) -> (u8, u128) {
        let c = &self.conj[site - self.lo];
        let (n1, i1) = c[j];
        let (n2, i2) = c[j + 1];
        let mut neg = n1 ^ n2;
        if i1 > i2 {
            neg = !neg;
        }
        (if neg { 8 } else { 0 }, (1u128 << i1) | (1u128 << i2))
    }

    /// One walk step from `(site, coin)` with new coin `c2`; returns the new
    /// site and the factor `zeta^k Gamma^mask` picked up (`None` when trivial).
    #[inline]
    pub fn step(&self, site: usize, c2: u8) -> (usize, Option<(u8, u128)>) {
        if c2 == 1 {
            if site >= self.s0 {
                (site + 1, None)
            } else {
                (site + 1, Some(self.pair_image(site + 1, site)))
            }
        } else if site <= self.s0 {
            (site - 1, None)
        } else {
            (site - 1, Some(self.pair_image(site - 1, site - 1)))
        }
    }

    /// Fold a step factor into a `(k16, mask)` accumulator: the new monomial multiplies on the left.
    #[inline]
    pub fn absorb(k16: u8, mask: u128, factor: (u8, u128)) -> (u8, u128) {
        let (kk, mm) = factor;
        let (odd, m2) = mono_mul(mm, mask);
        ((k16 + 2 + kk + if odd { 8 } else { 0 }) % 16, m2)
    }
}

/// Fusion class of a single history: amplitude `sign * zeta^phase8 * Gamma^mask` (up to `R_s` and `2^(-t/2)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HistoryClass {
    pub mask: u128,
    pub phase8: u8,
    pub sign: i8,
}

/// Coin sign `(-1)^(consecutive ones)` combined with the fusion factor of the history.
pub fn classify(table: &StraightPathTable, a: &CoinHistory) -> HistoryClass {
    let (mut site, mut coin, mut k16, mut mask) = (table.s0, 0u8, 0u8, 0u128);
    let mut neg = false;
    for c2 in a.iter() {
        if coin == 1 && c2 == 1 {
            neg = !neg;
        }
        let (next, factor) = table.step(site, c2);
        if let Some(f) = factor {
            (k16, mask) = StraightPathTable::absorb(k16, mask, f);
        }
        site = next;
        coin = c2;
    }
    if k16 >= 8 {
        neg = !neg;
    }
    HistoryClass { mask, phase8: k16 % 8, sign: if neg { -1 } else { 1 } }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Key {
    site: u16,
    coin: u8,
    k16: u8,
    mask: u128,
}

/// Output of [`transfer_numerators`].
#[derive(Debug, Clone)]
pub struct TransferResult {
    /// `2^t p(s)` for `s = 0..=t` right moves.
    pub numerators: Vec<i128>,
    pub peak_states: usize,
}

/// Exact `2^t p(s)` from a forward sweep over `(site, coin, phase, monomial)` states.
pub fn transfer_numerators(cfg: &WalkConfig, cap: usize) -> Result<TransferResult> {
    let t = cfg.t();
    if t > cap {
        return Err(Error::CapExceeded {
            what: "transfer steps",
            requested: t as u64,
            cap: cap as u64,
        });
    }
    let table = StraightPathTable::new(cfg)?;
    let mut states: HashMap<Key, i64> = HashMap::new();
    states.insert(Key { site: cfg.s0() as u16, coin: 0, k16: 0, mask: 0 }, 1);
    let mut peak = 1;
    for _ in 0..t {
        let mut next: HashMap<Key, i64> = HashMap::with_capacity(states.len() * 2);
        for (key, v) in &states {
            for c2 in 0..2u8 {
                let v2 = if key.coin == 1 && c2 == 1 { -v } else { *v };
                let (site, factor) = table.step(key.site as usize, c2);
                let (k16, mask) = match factor {
                    None => (key.k16, key.mask),
                    Some(f) => StraightPathTable::absorb(key.k16, key.mask, f),
                };
                *next.entry(Key { site: site as u16, coin: c2, k16, mask }).or_insert(0) += v2;
            }
        }
        next.retain(|_, v| *v != 0);
        peak = peak.max(next.len());
        states = next;
    }

    // a bucket's terms share one phase class mod 8, so |amplitude|^2 is an integer square
    let mut buckets: HashMap<(u16, u8, u128), (u8, i64)> = HashMap::new();
    for (key, v) in states {
        let signed = if key.k16 >= 8 { -v } else { v };
        let phase8 = key.k16 % 8;
        let e = buckets.entry((key.site, key.coin, key.mask)).or_insert((phase8, 0));
        if e.0 != phase8 {
            return Err(Error::Consistency(format!(
                "bucket at site {} mixes phase classes {} and {phase8}",
                key.site, e.0
            )));
        }
        e.1 += signed;
    }
    let lo = cfg.s0() - t;
    let mut numerators = vec![0i128; t + 1];
    for ((site, _, _), (_, v)) in buckets {
        let s = (site as usize - lo) / 2;
        numerators[s] += (v as i128) * (v as i128);
    }
    Ok(TransferResult { numerators, peak_states: peak })
}
