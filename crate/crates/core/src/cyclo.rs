//! Exact arithmetic in `Z[zeta]`, `zeta = exp(i pi / 8)`, with a tracked `sqrt(2)^-k` scale.
//!
//! Elements are kept in a canonical form (smallest non-negative `half_pow`), so
//! derived equality is exact equality of the represented complex numbers.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

const DEGREE: usize = 8;

/// `(sum_k coeffs[k] zeta^k) / sqrt(2)^half_pow`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CycScalar {
    coeffs: [i64; DEGREE],
    half_pow: u32,
}

impl CycScalar {
    pub const ZERO: CycScalar = CycScalar { coeffs: [0; DEGREE], half_pow: 0 };
    pub const ONE: CycScalar = CycScalar { coeffs: [1, 0, 0, 0, 0, 0, 0, 0], half_pow: 0 };

    pub fn new(coeffs: [i64; DEGREE], half_pow: u32) -> Self {
        CycScalar { coeffs, half_pow }.normalized()
    }

    pub fn from_int(v: i64) -> Self {
        let mut coeffs = [0; DEGREE];
        coeffs[0] = v;
        CycScalar { coeffs, half_pow: 0 }
    }

    /// `zeta^k` for any integer `k`.
    pub fn zeta_pow(k: i64) -> Self {
        let k = k.rem_euclid(2 * DEGREE as i64) as usize;
        let mut coeffs = [0; DEGREE];
        if k < DEGREE {
            coeffs[k] = 1;
        } else {
            coeffs[k - DEGREE] = -1;
        }
        CycScalar { coeffs, half_pow: 0 }
    }

    pub fn i() -> Self {
        CycScalar::zeta_pow(4)
    }

    pub fn sqrt2() -> Self {
        CycScalar { coeffs: [0, 0, 1, 0, 0, 0, -1, 0], half_pow: 0 }
    }

    pub fn inv_sqrt2() -> Self {
        CycScalar { coeffs: CycScalar::ONE.coeffs, half_pow: 1 }
    }

    /// `sqrt(2)^k` for any integer `k`.
    pub fn sqrt2_pow(k: i64) -> Self {
        if k >= 0 {
            let mut v = CycScalar::from_int(1i64 << (k / 2));
            if k % 2 == 1 {
                v = v * CycScalar::sqrt2();
            }
            v
        } else {
            CycScalar { coeffs: CycScalar::ONE.coeffs, half_pow: (-k) as u32 }
        }
    }

    pub fn coeffs(&self) -> &[i64; DEGREE] {
        &self.coeffs
    }

    pub fn half_pow(&self) -> u32 {
        self.half_pow
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Multiplication by `zeta^k` (a coefficient rotation).
    pub fn mul_zeta(self, k: i64) -> Self {
        let k = k.rem_euclid(2 * DEGREE as i64) as usize;
        let mut out = [0; DEGREE];
        for (i, &c) in self.coeffs.iter().enumerate() {
            let e = (i + k) % (2 * DEGREE);
            if e < DEGREE {
                out[e] += c;
            } else {
                out[e - DEGREE] -= c;
            }
        }
        CycScalar { coeffs: out, half_pow: self.half_pow }
    }

    pub fn conj(self) -> Self {
        let mut out = [0; DEGREE];
        out[0] = self.coeffs[0];
        for k in 1..DEGREE {
            out[DEGREE - k] = -self.coeffs[k];
        }
        CycScalar { coeffs: out, half_pow: self.half_pow }
    }

    pub fn to_complex(&self) -> Complex64 {
        let scale = 2f64.powf(-(self.half_pow as f64) / 2.0);
        let mut z = Complex64::new(0.0, 0.0);
        for (k, &c) in self.coeffs.iter().enumerate() {
            let theta = std::f64::consts::PI * k as f64 / DEGREE as f64;
            z += Complex64::from_polar(c as f64, theta);
        }
        z * scale
    }

    /// `Some(v)` when the element is the rational integer `v`.
    pub fn as_integer(&self) -> Option<i64> {
        (self.half_pow == 0 && self.coeffs[1..].iter().all(|&c| c == 0)).then_some(self.coeffs[0])
    }

    fn ring_mul(a: &[i64; DEGREE], b: &[i64; DEGREE]) -> [i64; DEGREE] {
        let mut out = [0i64; DEGREE];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                let e = i + j;
                if e < DEGREE {
                    out[e] += x * y;
                } else {
                    out[e - DEGREE] -= x * y;
                }
            }
        }
        out
    }

    /// Ring multiplication by `sqrt(2) = zeta^2 - zeta^6`.
    fn times_sqrt2(c: &[i64; DEGREE]) -> [i64; DEGREE] {
        let a = CycScalar { coeffs: *c, half_pow: 0 };
        let (x, y) = (a.mul_zeta(2), a.mul_zeta(6));
        std::array::from_fn(|k| x.coeffs[k] - y.coeffs[k])
    }

    /// Exact division of the ring element by `sqrt(2)`, if it divides.
    fn div_sqrt2(c: &[i64; DEGREE]) -> Option<[i64; DEGREE]> {
        let prod = CycScalar::times_sqrt2(c);
        if prod.iter().any(|v| v % 2 != 0) {
            return None;
        }
        Some(prod.map(|v| v / 2))
    }

    fn normalized(mut self) -> Self {
        if self.is_zero() {
            self.half_pow = 0;
            return self;
        }
        while self.half_pow > 0 {
            match CycScalar::div_sqrt2(&self.coeffs) {
                Some(c) => {
                    self.coeffs = c;
                    self.half_pow -= 1;
                }
                None => break,
            }
        }
        self
    }

    /// Same value with a larger scale exponent.
    fn rescaled(&self, half_pow: u32) -> [i64; DEGREE] {
        debug_assert!(half_pow >= self.half_pow);
        let mut c = self.coeffs;
        let diff = half_pow - self.half_pow;
        for _ in 0..diff / 2 {
            c = c.map(|v| v * 2);
        }
        if diff % 2 == 1 {
            c = CycScalar::times_sqrt2(&c);
        }
        c
    }
}

impl Default for CycScalar {
    fn default() -> Self {
        CycScalar::ZERO
    }
}

impl Add for CycScalar {
    type Output = CycScalar;

    fn add(self, rhs: CycScalar) -> CycScalar {
        if rhs.is_zero() {
            return self;
        }
        if self.is_zero() {
            return rhs;
        }
        let h = self.half_pow.max(rhs.half_pow);
        let (a, b) = (self.rescaled(h), rhs.rescaled(h));
        let mut coeffs = [0; DEGREE];
        for k in 0..DEGREE {
            coeffs[k] = a[k] + b[k];
        }
        CycScalar { coeffs, half_pow: h }.normalized()
    }
}

impl Neg for CycScalar {
    type Output = CycScalar;

    fn neg(self) -> CycScalar {
        CycScalar { coeffs: self.coeffs.map(|v| -v), half_pow: self.half_pow }
    }
}

impl Sub for CycScalar {
    type Output = CycScalar;

    fn sub(self, rhs: CycScalar) -> CycScalar {
        self + (-rhs)
    }
}

impl Mul for CycScalar {
    type Output = CycScalar;

    fn mul(self, rhs: CycScalar) -> CycScalar {
        if self.is_zero() || rhs.is_zero() {
            return CycScalar::ZERO;
        }
        CycScalar {
            coeffs: CycScalar::ring_mul(&self.coeffs, &rhs.coeffs),
            half_pow: self.half_pow + rhs.half_pow,
        }
        .normalized()
    }
}

impl std::iter::Sum for CycScalar {
    fn sum<I: Iterator<Item = CycScalar>>(iter: I) -> CycScalar {
        iter.fold(CycScalar::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(v) = self.as_integer() {
            return write!(f, "{v}");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(k, &c)| match k {
                0 => format!("{c}"),
                1 => format!("{c}*z"),
                _ => format!("{c}*z^{k}"),
            })
            .collect();
        let body = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        if self.half_pow == 0 {
            write!(f, "({body})")
        } else {
            write!(f, "({body})/sqrt2^{}", self.half_pow)
        }
    }
}

/// Exact 2x2 matrix over [`CycScalar`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycMat2 {
    pub m: [[CycScalar; 2]; 2],
}

impl CycMat2 {
    pub fn identity() -> Self {
        CycMat2 {
            m: [[CycScalar::ONE, CycScalar::ZERO], [CycScalar::ZERO, CycScalar::ONE]],
        }
    }

    pub fn new(m: [[CycScalar; 2]; 2]) -> Self {
        CycMat2 { m }
    }

    pub fn scale(self, k: CycScalar) -> Self {
        CycMat2 { m: self.m.map(|row| row.map(|x| x * k)) }
    }

    pub fn conj_transpose(self) -> Self {
        let m = self.m;
        CycMat2 {
            m: [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]],
        }
    }

    /// `Some(+1)` or `Some(-1)` when the matrix is `+-identity`.
    pub fn signed_identity(&self) -> Option<i8> {
        let [[a, b], [c, d]] = self.m;
        if !b.is_zero() || !c.is_zero() || a != d {
            return None;
        }
        match a.as_integer() {
            Some(1) => Some(1),
            Some(-1) => Some(-1),
            _ => None,
        }
    }
}

impl Mul for CycMat2 {
    type Output = CycMat2;

    fn mul(self, rhs: CycMat2) -> CycMat2 {
        let (a, b) = (self.m, rhs.m);
        let mut m = [[CycScalar::ZERO; 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        CycMat2 { m }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-9
    }

    #[test]
    fn basic_identities() {
        assert_eq!(CycScalar::zeta_pow(8), -CycScalar::ONE);
        assert_eq!(CycScalar::zeta_pow(16), CycScalar::ONE);
        assert_eq!(CycScalar::zeta_pow(-1), -CycScalar::zeta_pow(7));
        assert_eq!(CycScalar::sqrt2() * CycScalar::sqrt2(), CycScalar::from_int(2));
        assert_eq!(CycScalar::sqrt2() * CycScalar::inv_sqrt2(), CycScalar::ONE);
        assert_eq!(CycScalar::i() * CycScalar::i(), -CycScalar::ONE);
        assert_eq!(CycScalar::sqrt2_pow(5), CycScalar::from_int(4) * CycScalar::sqrt2());
        assert_eq!(CycScalar::sqrt2_pow(-3) * CycScalar::sqrt2_pow(3), CycScalar::ONE);
        // zeta^2 + zeta^-2 = sqrt2
        assert_eq!(CycScalar::zeta_pow(2) + CycScalar::zeta_pow(-2), CycScalar::sqrt2());
        assert!(close(CycScalar::sqrt2().to_complex(), Complex64::new(2f64.sqrt(), 0.0)));
    }

    #[test]
    fn canonical_scale() {
        let half = CycScalar::inv_sqrt2() * CycScalar::inv_sqrt2();
        assert_eq!(half.half_pow(), 2);
        let one = half + half;
        assert_eq!(one, CycScalar::ONE);
        assert_eq!(one.half_pow(), 0);
    }

    #[test]
    fn pauli_squares_of_generators() {
        // -e^{-i pi/8} diag(1, i), squared: e^{-i pi/4} sigma_z
        let z = CycScalar::zeta_pow;
        let g1 = CycMat2::new([[z(0), CycScalar::ZERO], [CycScalar::ZERO, z(4)]]).scale(-z(-1));
        let sz = CycMat2::new([[z(0), CycScalar::ZERO], [CycScalar::ZERO, -z(0)]]);
        assert_eq!(g1 * g1, sz.scale(z(-2)));
        let g2 = CycMat2::new([[z(0), -z(4)], [-z(4), z(0)]])
            .scale(-z(1))
            .scale(CycScalar::inv_sqrt2());
        let sx = CycMat2::new([[CycScalar::ZERO, z(0)], [z(0), CycScalar::ZERO]]);
        assert_eq!(g2 * g2, sx.scale(z(-2)));
        assert_eq!((g2 * g2.conj_transpose()).signed_identity(), Some(1));
        assert_eq!((g1 * g1 * g2 * g2).signed_identity(), None);
    }

    fn arb_scalar() -> impl Strategy<Value = CycScalar> {
        (prop::array::uniform8(-20i64..20), 0u32..4).prop_map(|(c, h)| CycScalar::new(c, h))
    }

    proptest! {
        #[test]
        fn arithmetic_matches_complex(a in arb_scalar(), b in arb_scalar()) {
            prop_assert!(close((a + b).to_complex(), a.to_complex() + b.to_complex()));
            prop_assert!(close((a * b).to_complex(), a.to_complex() * b.to_complex()));
            prop_assert!(close(a.conj().to_complex(), a.to_complex().conj()));
            prop_assert_eq!(a - a, CycScalar::ZERO);
            prop_assert_eq!(a * b, b * a);
        }

        #[test]
        fn equality_is_exact(a in arb_scalar(), k in 0i64..6) {
            let scaled = a * CycScalar::sqrt2_pow(k) * CycScalar::sqrt2_pow(-k);
            prop_assert_eq!(scaled, a);
        }
    }
}
