use std::fmt;

use serde::Serialize;

/// `sum_i coeffs[i] z^i`, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConwayPoly {
    coeffs: Vec<i64>,
}

impl ConwayPoly {
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        ConwayPoly { coeffs }
    }

    pub fn zero() -> Self {
        ConwayPoly { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize) -> i64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c as f64)
    }

    /// `z * self + other`
    fn shift_add(&self, other: &ConwayPoly) -> ConwayPoly {
        let len = (self.coeffs.len() + 1).max(other.coeffs.len());
        let mut out = vec![0; len];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i + 1] += c;
        }
        for (i, &c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        ConwayPoly::new(out)
    }
}

impl fmt::Display for ConwayPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match i {
                0 => format!("{c}"),
                1 => format!("{c}z"),
                _ => format!("{c}z^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Conway polynomial of the closure of `b^m` on two strands, by the skein
/// recursion from the split link (`m = 0`) and the unknot (`m = 1`).
pub fn conway_torus2(m: usize) -> ConwayPoly {
    let (mut prev, mut cur) = (ConwayPoly::zero(), ConwayPoly::new(vec![1]));
    if m == 0 {
        return prev;
    }
    for _ in 1..m {
        let next = cur.shift_add(&prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// Binet form `(u^m - v^m) / (u - v)` with `u, v = (z +- sqrt(z^2 + 4)) / 2`.
pub fn conway_torus2_closed_form(m: usize, z: f64) -> f64 {
    let root = (z * z + 4.0).sqrt();
    let (u, v) = ((z + root) / 2.0, (z - root) / 2.0);
    (u.powi(m as i32) - v.powi(m as i32)) / (u - v)
}

/// `z^3` coefficient of the two-component sublink with linking number `lk`.
pub fn c2_pair(lk: i64) -> i64 {
    lk * (lk * lk - 1) / 6
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert!(conway_torus2(0).is_zero());
        assert_eq!(conway_torus2(1).coeffs(), &[1]);
        assert_eq!(conway_torus2(2).coeffs(), &[0, 1]);
        assert_eq!(conway_torus2(3).coeffs(), &[1, 0, 1]);
        assert_eq!(conway_torus2(4).coeffs(), &[0, 2, 0, 1]);
        assert_eq!(conway_torus2(4).to_string(), "1z^3 + 2z");
    }

    #[test]
    fn c2_matches_cubic_coefficient() {
        assert_eq!(c2_pair(0), 0);
        assert_eq!(c2_pair(2), 1);
        assert_eq!(c2_pair(4), 10);
        for lk in -6i64..=6 {
            let m = (2 * lk.abs()) as usize;
            assert_eq!(c2_pair(lk.abs()), conway_torus2(m).coeff(3), "lk={lk}");
            assert_eq!(c2_pair(-lk), -c2_pair(lk));
        }
    }

    #[test]
    fn closed_form_agrees_with_recursion() {
        for m in 0..=20 {
            let p = conway_torus2(m);
            for &z in &[-1.5, -0.3, 0.0, 0.7, 1.0, 2.5] {
                let a = p.eval(z);
                let b = conway_torus2_closed_form(m, z);
                assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "m={m} z={z}: {a} vs {b}");
            }
        }
    }
}
