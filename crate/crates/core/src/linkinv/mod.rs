//! Invariants of closed braids: linking numbers, properness, writhe, Conway and
//! Milnor coefficients, arf, and the Jones polynomial at `q = i`.

mod bracket;
mod conway;
mod seifert;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::braid::{ClosedLink, Sign};
use crate::cyclo::{CycMat2, CycScalar};
use crate::error::{Error, Result};

pub use bracket::{
    kauffman_bracket_statesum, kauffman_bracket_with_cap, writhe_corrected_bracket, BracketValue,
    DEFAULT_BRACKET_CAP,
};
pub use conway::{c2_pair, conway_torus2, conway_torus2_closed_form, ConwayPoly};
pub use seifert::seifert_arf;

/// Linking numbers of the walker component with every other component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkingProfile {
    pub walker: usize,
    pub lk: BTreeMap<usize, i64>,
}

impl LinkingProfile {
    pub fn total(&self) -> i64 {
        self.lk.values().sum()
    }

    pub fn is_proper(&self) -> bool {
        is_proper(self)
    }

    pub fn get(&self, component: usize) -> i64 {
        self.lk.get(&component).copied().unwrap_or(0)
    }
}

fn require_pure(link: &ClosedLink) -> Result<()> {
    if !link.is_pure() {
        return Err(Error::UnsupportedLink(
            "linking data needs an identity strand permutation".into(),
        ));
    }
    Ok(())
}

fn require_walker(link: &ClosedLink) -> Result<usize> {
    link.walker_component().ok_or_else(|| {
        Error::UnsupportedLink("no walker component (no crossings or no common hub)".into())
    })
}

/// Symmetric matrix of pairwise linking numbers, diagonal zero.
pub fn pairwise_linking(link: &ClosedLink) -> Result<Vec<Vec<i64>>> {
    let c = link.component_count();
    let mut twice = vec![vec![0i64; c]; c];
    for x in link.crossings() {
        let (p, q) = link.crossing_components(x);
        if p != q {
            twice[p][q] += x.sign.value();
            twice[q][p] += x.sign.value();
        }
    }
    let mut lk = vec![vec![0i64; c]; c];
    for p in 0..c {
        for q in 0..c {
            if twice[p][q] % 2 != 0 {
                return Err(Error::Consistency(format!(
                    "odd signed crossing count between components {p} and {q}"
                )));
            }
            lk[p][q] = twice[p][q] / 2;
        }
    }
    Ok(lk)
}

pub fn linking_profile(link: &ClosedLink) -> Result<LinkingProfile> {
    require_pure(link)?;
    let walker = match link.walker_component() {
        Some(w) => w,
        None if link.crossings().is_empty() => 0,
        None => return Err(require_walker(link).unwrap_err()),
    };
    let matrix = pairwise_linking(link)?;
    let lk = (0..link.component_count())
        .filter(|&c| c != walker)
        .map(|c| (c, matrix[walker][c]))
        .collect();
    Ok(LinkingProfile { walker, lk })
}

pub fn is_proper(profile: &LinkingProfile) -> bool {
    profile.lk.values().all(|v| v % 2 == 0)
}

/// Every component evenly links the union of the others.
pub fn is_proper_link(link: &ClosedLink) -> Result<bool> {
    let m = pairwise_linking(link)?;
    Ok(m.iter().all(|row| row.iter().sum::<i64>() % 2 == 0))
}

pub fn writhe(link: &ClosedLink) -> i64 {
    link.crossings().iter().map(|c| c.sign.value()).sum()
}

/// Components other than the walker that cross it at least once, ascending.
pub fn touched_components(link: &ClosedLink) -> Result<Vec<usize>> {
    let w = require_walker(link)?;
    let mut seen = vec![false; link.component_count()];
    for x in link.crossings() {
        let (p, q) = link.crossing_components(x);
        if p == w && q != w {
            seen[q] = true;
        } else if q == w && p != w {
            seen[p] = true;
        }
    }
    Ok((0..seen.len()).filter(|&c| seen[c]).collect())
}

/// Which of the two generators a surviving letter maps to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MilnorRole {
    R,
    S,
}

fn milnor_generators() -> [CycMat2; 4] {
    let z = CycScalar::zeta_pow;
    let zero = CycScalar::ZERO;
    let g1 = CycMat2::new([[z(0), zero], [zero, z(4)]]).scale(-z(-1));
    let g2 = CycMat2::new([[z(0), -z(4)], [-z(4), z(0)]])
        .scale(-z(1))
        .scale(CycScalar::inv_sqrt2());
    [g1, g1.conj_transpose(), g2, g2.conj_transpose()]
}

thread_local! {
    static GENERATORS: [CycMat2; 4] = milnor_generators();
}

/// Sign of the surviving sub-braid: `0` for `+1`, `1` for `-1`.
///
/// The exact product is multiplied by `zeta^e`, `e` the exponent sum of the
/// surviving letters, before the identity test.
#[allow(clippy::result_large_err)]
pub fn milnor_sign(letters: &[(MilnorRole, Sign)]) -> std::result::Result<u8, CycMat2> {
    let mut m = CycMat2::identity();
    let mut e = 0i64;
    GENERATORS.with(|g| {
        for &(role, sign) in letters {
            let k = match (role, sign) {
                (MilnorRole::R, Sign::Pos) => 0,
                (MilnorRole::R, Sign::Neg) => 1,
                (MilnorRole::S, Sign::Pos) => 2,
                (MilnorRole::S, Sign::Neg) => 3,
            };
            m = g[k] * m;
            e += sign.value();
        }
    });
    let m = m.scale(CycScalar::zeta_pow(e));
    match m.signed_identity() {
        Some(1) => Ok(0),
        Some(_) => Ok(1),
        None => Err(m),
    }
}

/// Per-component crossing lists against the walker: `(crossing position, sign)`.
fn walker_crossings(link: &ClosedLink) -> Result<Vec<Vec<(usize, Sign)>>> {
    let w = require_walker(link)?;
    let mut lists = vec![Vec::new(); link.component_count()];
    for x in link.crossings() {
        let (p, q) = link.crossing_components(x);
        let other = if p == w {
            q
        } else if q == w {
            p
        } else {
            continue;
        };
        if other != w {
            lists[other].push((x.position, x.sign));
        }
    }
    Ok(lists)
}

fn merged_sign(lists: &[Vec<(usize, Sign)>], r: usize, s: usize) -> Result<u8> {
    let (lr, ls) = (&lists[r], &lists[s]);
    let mut word = Vec::with_capacity(lr.len() + ls.len());
    let (mut i, mut j) = (0, 0);
    while i < lr.len() || j < ls.len() {
        if j == ls.len() || (i < lr.len() && lr[i].0 < ls[j].0) {
            word.push((MilnorRole::R, lr[i].1));
            i += 1;
        } else {
            word.push((MilnorRole::S, ls[j].1));
            j += 1;
        }
    }
    milnor_sign(&word).map_err(|_| Error::NotProperOrMisindexed { r, s })
}

/// Milnor triple invariant of (walker, r, s), mod 2.
///
/// Keeps the letters whose crossing pairs the walker with `r` or with `s`.
pub fn milnor_c3(link: &ClosedLink, r: usize, s: usize) -> Result<u8> {
    require_pure(link)?;
    let w = require_walker(link)?;
    if !link.is_walk_shaped() {
        return Err(Error::UnsupportedLink("pinned components cross each other".into()));
    }
    let c = link.component_count();
    if r == s || r == w || s == w || r >= c || s >= c {
        return Err(Error::InvalidArgument(format!(
            "components ({r}, {s}) must be distinct pinned components of a {c}-component link"
        )));
    }
    merged_sign(&walker_crossings(link)?, r, s)
}

/// Sum of the triple invariants over pinned pairs that both cross the walker, mod 2.
pub fn tau(link: &ClosedLink) -> Result<u8> {
    require_pure(link)?;
    if link.walker_component().is_none() && link.crossings().is_empty() {
        return Ok(0);
    }
    if !link.is_walk_shaped() {
        return Err(Error::UnsupportedLink("pinned components cross each other".into()));
    }
    if !linking_profile(link)?.is_proper() {
        return Err(Error::UnsupportedLink("tau needs a proper link".into()));
    }
    let lists = walker_crossings(link)?;
    let touched: Vec<usize> = (0..lists.len()).filter(|&c| !lists[c].is_empty()).collect();
    let mut acc = 0u8;
    for (k, &r) in touched.iter().enumerate() {
        for &s in &touched[k + 1..] {
            if !interleaved(&lists[r], &lists[s]) {
                continue;
            }
            acc ^= merged_sign(&lists, r, s)?;
        }
    }
    Ok(acc)
}

/// False when all letters of one list precede all letters of the other; the
/// product then splits into two blocks that are each the identity.
fn interleaved(a: &[(usize, Sign)], b: &[(usize, Sign)]) -> bool {
    let (a0, a1) = (a[0].0, a[a.len() - 1].0);
    let (b0, b1) = (b[0].0, b[b.len() - 1].0);
    !(a1 < b0 || b1 < a0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Arf {
    Defined(u8),
    NotProper,
}

impl Arf {
    pub fn value(self) -> Option<u8> {
        match self {
            Arf::Defined(v) => Some(v),
            Arf::NotProper => None,
        }
    }
}

/// Arf invariant. Links built from walk histories use the three-local
/// formula; any other braid closure falls back to the mod-2 Seifert form.
pub fn arf(link: &ClosedLink) -> Result<Arf> {
    let from_walk = link.word().walker_slot().is_some();
    if from_walk && link.is_pure() && link.is_walk_shaped() {
        let profile = linking_profile(link)?;
        if !profile.is_proper() {
            return Ok(Arf::NotProper);
        }
        let c1 = 0i64;
        let sum_c2: i64 = profile.lk.values().map(|&l| c2_pair(l)).sum();
        if sum_c2 % 2 != 0 {
            return Err(Error::Consistency(format!(
                "pairwise Conway sum {sum_c2} is odd on a proper walk link"
            )));
        }
        let c3 = tau(link)? as i64;
        return Ok(Arf::Defined((c1 + sum_c2 + c3).rem_euclid(2) as u8));
    }
    match (is_proper_link(link)?, seifert_arf(link)?) {
        (false, None) => Ok(Arf::NotProper),
        (true, Some(v)) => Ok(Arf::Defined(v)),
        (p, v) => Err(Error::Consistency(format!(
            "linking parity says proper = {p} but the Seifert form gives {v:?}"
        ))),
    }
}

/// `V_L(i)`: zero for improper links, `sqrt2^(#L - 1) (-1)^arf` otherwise.
pub fn jones_at_i(link: &ClosedLink) -> Result<BracketValue> {
    let value = match arf(link)? {
        Arf::NotProper => CycScalar::ZERO,
        Arf::Defined(a) => {
            let mag = CycScalar::sqrt2_pow(link.component_count() as i64 - 1);
            if a == 0 {
                mag
            } else {
                -mag
            }
        }
    };
    Ok(BracketValue::new(value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::{close_link, combined_word, BraidLetter, BraidWord, CoinHistory, PathPair, WalkConfig};

    fn walk_link(a: &str, b: &str) -> (ClosedLink, WalkConfig) {
        let a: CoinHistory = a.parse().unwrap();
        let b: CoinHistory = b.parse().unwrap();
        let cfg = WalkConfig::with_steps(a.len()).unwrap();
        let p = PathPair::new(a, b).unwrap();
        (close_link(&combined_word(&p, &cfg).unwrap()), cfg)
    }

    fn all_pairs(t: usize) -> impl Iterator<Item = PathPair> {
        (0..1u64 << t).flat_map(move |a| {
            (0..1u64 << t).filter_map(move |b| {
                PathPair::new(
                    CoinHistory::from_packed(a, t).unwrap(),
                    CoinHistory::from_packed(b, t).unwrap(),
                )
                .ok()
            })
        })
    }

    #[test]
    fn mirror_link_is_trivial() {
        let (link, _) = walk_link("1101", "1101");
        let prof = linking_profile(&link).unwrap();
        assert!(prof.lk.values().all(|&v| v == 0));
        assert!(prof.is_proper());
        assert_eq!(tau(&link).unwrap(), 0);
        assert_eq!(arf(&link).unwrap(), Arf::Defined(0));
    }

    #[test]
    fn properness_predicate() {
        let mk = |v: &[i64]| LinkingProfile {
            walker: 0,
            lk: v.iter().enumerate().map(|(k, &x)| (k + 1, x)).collect(),
        };
        assert!(is_proper(&mk(&[0, 0, 0])));
        assert!(!is_proper(&mk(&[1])));
        assert!(is_proper(&mk(&[2, -2])));
    }

    #[test]
    fn writhe_examples() {
        assert_eq!(writhe(&close_link(&BraidWord::empty(3))), 0);
        let w = BraidWord::new(2, vec![BraidLetter::pos(1); 2]).unwrap();
        assert_eq!(writhe(&close_link(&w)), 2);
        for p in all_pairs(5) {
            let cfg = WalkConfig::with_steps(5).unwrap();
            assert_eq!(writhe(&close_link(&combined_word(&p, &cfg).unwrap())), 0);
        }
    }

    #[test]
    fn figure_pair() {
        let (link, cfg) = walk_link("10011", "01101");
        let prof = linking_profile(&link).unwrap();
        assert!(prof.is_proper());
        assert_eq!(prof.total(), 0);
        assert_eq!(tau(&link).unwrap(), 1);
        assert_eq!(arf(&link).unwrap(), Arf::Defined(1));
        let v = jones_at_i(&link).unwrap();
        assert_eq!(v.value(), -CycScalar::sqrt2_pow(cfg.n() as i64 - 1));
    }

    #[test]
    fn odd_linking_pairs_at_t4() {
        let cfg = WalkConfig::with_steps(4).unwrap();
        let mut improper = 0;
        for p in all_pairs(4) {
            let link = close_link(&combined_word(&p, &cfg).unwrap());
            let prof = linking_profile(&link).unwrap();
            // crossing-count oracle: lk with the anyon at bond j
            let count = |h: CoinHistory, j: usize| {
                crate::braid::braid_from_history(&h, &cfg)
                    .unwrap()
                    .letters()
                    .iter()
                    .filter(|l| l.index == j)
                    .count() as i64
            };
            let by_bond: Vec<i64> =
                (1..cfg.n()).map(|j| count(p.forward(), j) - count(p.backward(), j)).collect();
            let proper_oracle = by_bond.iter().all(|d| d % 4 == 0);
            assert_eq!(prof.is_proper(), proper_oracle, "{:?}", p);
            let mut a: Vec<i64> = by_bond.iter().map(|d| d.abs() / 2).filter(|&x| x != 0).collect();
            let mut b: Vec<i64> = prof.lk.values().map(|v| v.abs()).filter(|&x| x != 0).collect();
            a.sort();
            b.sort();
            assert_eq!(a, b);
            if !prof.is_proper() {
                improper += 1;
                assert!(!p.is_mirror());
                assert_eq!(jones_at_i(&link).unwrap().value(), CycScalar::ZERO);
            }
        }
        assert_eq!(improper, 40 - 16);
    }

    #[test]
    fn milnor_rejects_odd_pairwise_linking() {
        use MilnorRole::*;
        let word = [(R, Sign::Pos), (R, Sign::Pos), (S, Sign::Pos), (S, Sign::Pos)];
        assert!(milnor_sign(&word).is_err());
        assert_eq!(milnor_sign(&[]), Ok(0));
        let borromean_like = [
            (R, Sign::Pos),
            (R, Sign::Pos),
            (S, Sign::Pos),
            (S, Sign::Pos),
            (R, Sign::Neg),
            (R, Sign::Neg),
            (S, Sign::Neg),
            (S, Sign::Neg),
        ];
        assert_eq!(milnor_sign(&borromean_like), Ok(1));
    }

    #[test]
    fn milnor_symmetric_and_stable_under_cancelling_pairs() {
        let cfg = WalkConfig::with_steps(6).unwrap();
        for p in all_pairs(6) {
            let word = combined_word(&p, &cfg).unwrap();
            let link = close_link(&word);
            if !linking_profile(&link).unwrap().is_proper() {
                continue;
            }
            let touched = touched_components(&link).unwrap();
            let mut padded = word.letters().to_vec();
            let mid = padded.len() / 2;
            let j = padded[mid].index;
            padded.insert(mid, BraidLetter::neg(j));
            padded.insert(mid, BraidLetter::pos(j));
            let padded = BraidWord::new(cfg.n(), padded).unwrap().with_walker(cfg.s0()).unwrap();
            let padded = close_link(&padded);
            for (k, &r) in touched.iter().enumerate() {
                for &s in &touched[k + 1..] {
                    let c = milnor_c3(&link, r, s).unwrap();
                    assert_eq!(c, milnor_c3(&link, s, r).unwrap());
                    assert_eq!(c, milnor_c3(&padded, r, s).unwrap());
                }
            }
            assert_eq!(tau(&link).unwrap(), tau(&padded).unwrap());
        }
    }

    #[test]
    fn arf_of_small_closures() {
        let unlink = close_link(&BraidWord::empty(4));
        assert_eq!(arf(&unlink).unwrap(), Arf::Defined(0));
        assert_eq!(jones_at_i(&unlink).unwrap().value(), CycScalar::sqrt2_pow(3));
        let trefoil = close_link(&BraidWord::new(2, vec![BraidLetter::pos(1); 3]).unwrap());
        assert_eq!(arf(&trefoil).unwrap(), Arf::Defined(1));
        assert_eq!(jones_at_i(&trefoil).unwrap().value(), -CycScalar::ONE);
        let hopf = close_link(&BraidWord::new(2, vec![BraidLetter::pos(1); 2]).unwrap());
        assert_eq!(arf(&hopf).unwrap(), Arf::NotProper);
        assert_eq!(jones_at_i(&hopf).unwrap().value(), CycScalar::ZERO);
    }

    #[test]
    fn walk_links_agree_with_state_sum() {
        for t in 1..=5 {
            let cfg = WalkConfig::with_steps(t).unwrap();
            for p in all_pairs(t) {
                let link = close_link(&combined_word(&p, &cfg).unwrap());
                let v = jones_at_i(&link).unwrap();
                let oracle = writhe_corrected_bracket(&link).unwrap();
                assert_eq!(v, oracle, "t={t} {:?}", p);
            }
        }
    }

    #[test]
    fn sum_c2_even_on_proper_walk_links() {
        for t in 1..=7 {
            let cfg = WalkConfig::with_steps(t).unwrap();
            for p in all_pairs(t) {
                let link = close_link(&combined_word(&p, &cfg).unwrap());
                let prof = linking_profile(&link).unwrap();
                assert_eq!(prof.total(), 0);
                if prof.is_proper() {
                    let s: i64 = prof.lk.values().map(|&l| c2_pair(l)).sum();
                    assert_eq!(s % 2, 0);
                }
            }
        }
    }
}
