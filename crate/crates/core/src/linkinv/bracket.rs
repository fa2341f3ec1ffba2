//! Kauffman bracket of a braid closure at `A = exp(3 i pi / 8)`, loop value `d = sqrt2`.
//!
//! The state sum is organised as a sweep over the word: partial smoothings with
//! the same boundary connectivity are merged, so cost tracks the number of
//! planar matchings reached rather than `2^crossings`.

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::braid::{ClosedLink, Sign};
use crate::cyclo::CycScalar;
use crate::error::{Error, Result};

pub const DEFAULT_BRACKET_CAP: usize = 20;

/// `A` as a power of `zeta = exp(i pi / 8)`.
pub const A_ZETA_POWER: i64 = 3;

/// Exact value of a bracket-type invariant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BracketValue {
    value: CycScalar,
}

impl BracketValue {
    pub const CONVENTIONS: &'static str = "A = exp(3i*pi/8), d = -A^2 - A^-2 = sqrt2, q = A^-4 = i";

    pub fn new(value: CycScalar) -> Self {
        BracketValue { value }
    }

    pub fn value(&self) -> CycScalar {
        self.value
    }

    pub fn to_complex(&self) -> Complex64 {
        self.value.to_complex()
    }
}

impl fmt::Display for BracketValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)
    }
}

impl Serialize for BracketValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let z = self.to_complex();
        let mut st = s.serialize_struct("BracketValue", 4)?;
        st.serialize_field("exact", &self.value.to_string())?;
        st.serialize_field("re", &z.re)?;
        st.serialize_field("im", &z.im)?;
        st.serialize_field("conventions", Self::CONVENTIONS)?;
        st.end()
    }
}

pub fn kauffman_bracket_statesum(link: &ClosedLink) -> Result<BracketValue> {
    kauffman_bracket_with_cap(link, DEFAULT_BRACKET_CAP)
}

/// Normalised so the unknot is 1 (an `n`-unlink gives `d^(n-1)`).
pub fn kauffman_bracket_with_cap(link: &ClosedLink, cap: usize) -> Result<BracketValue> {
    let crossings = link.crossings().len();
    if crossings > cap {
        return Err(Error::CapExceeded {
            what: "bracket state sum crossings",
            requested: crossings as u64,
            cap: cap as u64,
        });
    }
    let n = link.strands();
    if 2 * n > u8::MAX as usize {
        return Err(Error::CapExceeded {
            what: "bracket state sum strands",
            requested: n as u64,
            cap: (u8::MAX / 2) as u64,
        });
    }
    let d = CycScalar::sqrt2();
    let a = CycScalar::zeta_pow(A_ZETA_POWER);
    let a_inv = CycScalar::zeta_pow(-A_ZETA_POWER);

    // Points 0..n sit at the bottom of the braid, n..2n on the current cut.
    let start: Vec<u8> = (0..2 * n).map(|p| ((p + n) % (2 * n)) as u8).collect();
    let mut states: HashMap<Vec<u8>, CycScalar> = HashMap::from([(start, CycScalar::ONE)]);

    for c in link.crossings() {
        let slot = link.word().letters()[c.position].index - 1;
        let (w_id, w_e) = match c.sign {
            Sign::Pos => (a, a_inv),
            Sign::Neg => (a_inv, a),
        };
        let mut next: HashMap<Vec<u8>, CycScalar> = HashMap::with_capacity(states.len() * 2);
        for (pairing, coef) in states {
            let (smoothed, closed_loop) = cap_cup(&pairing, n + slot, n + slot + 1);
            let e_coef = if closed_loop { coef * w_e * d } else { coef * w_e };
            accumulate(&mut next, smoothed, e_coef);
            accumulate(&mut next, pairing, coef * w_id);
        }
        states = next;
    }

    let mut total = CycScalar::ZERO;
    for (pairing, coef) in states {
        let loops = closure_loops(&pairing, n);
        total = total + coef * CycScalar::sqrt2_pow(loops as i64 - 1);
    }
    Ok(BracketValue::new(total))
}

fn accumulate(map: &mut HashMap<Vec<u8>, CycScalar>, key: Vec<u8>, v: CycScalar) {
    if v.is_zero() {
        return;
    }
    let e = map.entry(key).or_insert(CycScalar::ZERO);
    *e = *e + v;
}

/// Joins current points `p` and `q` through a cap and opens a fresh cup between them.
fn cap_cup(pairing: &[u8], p: usize, q: usize) -> (Vec<u8>, bool) {
    let mut out = pairing.to_vec();
    let (pp, pq) = (pairing[p] as usize, pairing[q] as usize);
    let closed = pp == q;
    if !closed {
        out[pp] = pq as u8;
        out[pq] = pp as u8;
    }
    out[p] = q as u8;
    out[q] = p as u8;
    (out, closed)
}

/// Loops formed when bottom point `i` is joined to current point `n + i`.
fn closure_loops(pairing: &[u8], n: usize) -> usize {
    let mut seen = vec![false; 2 * n];
    let mut loops = 0;
    for start in 0..2 * n {
        if seen[start] {
            continue;
        }
        loops += 1;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            let y = pairing[x] as usize;
            seen[y] = true;
            x = if y < n { y + n } else { y - n };
        }
    }
    loops
}

/// `(-A^3)^(-w) <L>`, which is `zeta^(-w) <L>` at this root.
pub fn writhe_corrected_bracket(link: &ClosedLink) -> Result<BracketValue> {
    let raw = kauffman_bracket_statesum(link)?;
    let w = super::writhe(link);
    Ok(BracketValue::new(raw.value().mul_zeta(-w)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::{close_link, BraidLetter, BraidWord};

    /// Literal enumeration of all `2^m` smoothings with a union-find loop count.
    fn naive_bracket(w: &BraidWord) -> CycScalar {
        let n = w.strands();
        let m = w.len();
        let mut total = CycScalar::ZERO;
        let levels = m.max(1);
        for state in 0..(1u64 << m) {
            let mut parent: Vec<usize> = (0..levels * n).collect();
            fn find(p: &mut [usize], mut x: usize) -> usize {
                while p[x] != x {
                    p[x] = p[p[x]];
                    x = p[x];
                }
                x
            }
            let union = |p: &mut Vec<usize>, x: usize, y: usize| {
                let (fx, fy) = (find(p, x), find(p, y));
                p[fx] = fy;
            };
            let node = |k: usize, i: usize| (k % levels) * n + i;
            let mut power = 0i64;
            for (k, l) in w.letters().iter().enumerate() {
                let j = l.index - 1;
                let e = (state >> k) & 1 == 1;
                if e {
                    union(&mut parent, node(k, j), node(k, j + 1));
                    union(&mut parent, node(k + 1, j), node(k + 1, j + 1));
                    for i in (0..n).filter(|&i| i != j && i != j + 1) {
                        union(&mut parent, node(k, i), node(k + 1, i));
                    }
                } else {
                    for i in 0..n {
                        union(&mut parent, node(k, i), node(k + 1, i));
                    }
                }
                power += if e { -l.sign.value() } else { l.sign.value() };
            }
            let mut roots: Vec<usize> = (0..levels * n).map(|x| find(&mut parent, x)).collect();
            roots.sort();
            roots.dedup();
            let loops = roots.len();
            total = total
                + CycScalar::zeta_pow(A_ZETA_POWER * power) * CycScalar::sqrt2_pow(loops as i64 - 1);
        }
        total
    }

    fn word(n: usize, letters: &[i64]) -> BraidWord {
        let l = letters
            .iter()
            .map(|&x| if x > 0 { BraidLetter::pos(x as usize) } else { BraidLetter::neg((-x) as usize) })
            .collect();
        BraidWord::new(n, l).unwrap()
    }

    #[test]
    fn basic_values() {
        let unknot = close_link(&BraidWord::empty(1));
        assert_eq!(kauffman_bracket_statesum(&unknot).unwrap().value(), CycScalar::ONE);
        let unlink = close_link(&BraidWord::empty(3));
        assert_eq!(kauffman_bracket_statesum(&unlink).unwrap().value(), CycScalar::from_int(2));
        let hopf = close_link(&word(2, &[1, 1]));
        assert_eq!(kauffman_bracket_statesum(&hopf).unwrap().value(), CycScalar::ZERO);
        let trefoil = close_link(&word(2, &[1, 1, 1]));
        assert_eq!(writhe_corrected_bracket(&trefoil).unwrap().value(), -CycScalar::ONE);
        let kink = close_link(&word(2, &[1]));
        // a single kink: <L> = -A^3
        assert_eq!(
            kauffman_bracket_statesum(&kink).unwrap().value(),
            -CycScalar::zeta_pow(3 * A_ZETA_POWER)
        );
    }

    #[test]
    fn sweep_matches_naive_enumeration() {
        let words = [
            word(3, &[1, -2, 1, -2]),
            word(3, &[1, 2, 1, 2, 1, 2]),
            word(4, &[1, 3, -2, 1, -3, 2, 2]),
            word(4, &[2, 2, -1, 3, -1, -3]),
            word(5, &[4, 1, 2, -3, 4, -1, 2]),
        ];
        for w in &words {
            let link = close_link(w);
            assert_eq!(kauffman_bracket_statesum(&link).unwrap().value(), naive_bracket(w), "{w}");
        }
    }

    #[test]
    fn cap_is_enforced() {
        let w = word(2, &[1; 21]);
        assert!(matches!(
            kauffman_bracket_statesum(&close_link(&w)),
            Err(Error::CapExceeded { .. })
        ));
        assert!(kauffman_bracket_with_cap(&close_link(&w), 21).is_ok());
    }
}
