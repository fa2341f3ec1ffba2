//! Arf invariant of a braid closure from the mod-2 Seifert form of the
//! canonical surface (one disk per strand level, one band per letter).
//!
//! Basis: for each generator index, a loop through each pair of consecutive
//! bands. `q(loop) = 1` iff the two bands have the same sign; loops on the
//! same level meet iff consecutive, loops on adjacent levels meet iff their
//! intervals interleave.

use crate::braid::ClosedLink;
use crate::error::{Error, Result};

struct Loop {
    level: usize,
    lo: usize,
    hi: usize,
    rank: usize,
    q: bool,
}

/// `None` when the form does not vanish on its radical (link not proper).
pub fn seifert_arf(link: &ClosedLink) -> Result<Option<u8>> {
    let letters = link.word().letters();
    let mut basis = Vec::new();
    for level in 1..link.strands() {
        let bands: Vec<(usize, i64)> = letters
            .iter()
            .enumerate()
            .filter(|(_, l)| l.index == level)
            .map(|(k, l)| (k, l.sign.value()))
            .collect();
        for (rank, w) in bands.windows(2).enumerate() {
            basis.push(Loop { level, lo: w[0].0, hi: w[1].0, rank, q: w[0].1 == w[1].1 });
        }
    }
    let dim = basis.len();
    if dim > 128 {
        return Err(Error::CapExceeded {
            what: "Seifert form rank",
            requested: dim as u64,
            cap: 128,
        });
    }

    let mut rows = vec![0u128; dim];
    for (x, bx) in basis.iter().enumerate() {
        for (y, by) in basis.iter().enumerate() {
            if x == y {
                continue;
            }
            let meet = if bx.level == by.level {
                bx.rank.abs_diff(by.rank) == 1
            } else if bx.level.abs_diff(by.level) == 1 {
                let inside = |p: usize| bx.lo < p && p < bx.hi;
                inside(by.lo) != inside(by.hi)
            } else {
                false
            };
            if meet {
                rows[x] |= 1 << y;
            }
        }
    }
    let q_diag: u128 = basis
        .iter()
        .enumerate()
        .filter(|(_, b)| b.q)
        .fold(0, |m, (x, _)| m | (1 << x));

    let bilinear = |u: u128, v: u128| -> bool {
        let mut acc = 0u32;
        let mut rest = u;
        while rest != 0 {
            let x = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            acc ^= (rows[x] & v).count_ones() & 1;
        }
        acc == 1
    };
    let quad = |u: u128| -> bool {
        let mut pairs = 0u32;
        let mut rest = u;
        while rest != 0 {
            let x = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            pairs += (rows[x] & u).count_ones();
        }
        ((q_diag & u).count_ones() + pairs / 2) % 2 == 1
    };

    let mut vecs: Vec<u128> = (0..dim).map(|x| 1u128 << x).collect();
    let mut arf = false;
    while let Some(u) = vecs.pop() {
        let Some(k) = vecs.iter().position(|&v| bilinear(u, v)) else {
            if quad(u) {
                return Ok(None);
            }
            continue;
        };
        let v = vecs.remove(k);
        arf ^= quad(u) && quad(v);
        for w in vecs.iter_mut() {
            let mut nw = *w;
            if bilinear(*w, v) {
                nw ^= u;
            }
            if bilinear(*w, u) {
                nw ^= v;
            }
            *w = nw;
        }
    }
    Ok(Some(arf as u8))
}
