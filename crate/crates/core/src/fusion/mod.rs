//! Dense Majorana representation of the Ising braid group and the walk
//! distribution recomputed from matrix traces.

pub mod monomial;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::braid::{braid_from_history, BraidLetter, BraidWord, CoinHistory, Sign, WalkConfig};
use crate::error::{Error, Result};
use crate::walkdist::{histories_in_stratum, DistKind, Distribution};

/// Largest representation dimension the dense routines will allocate.
pub const DEFAULT_DIM_CAP: usize = 1 << 10;

/// Step cap for [`oracle_distribution`].
pub const ORACLE_MAX_STEPS: usize = 8;

pub const DEFAULT_PHASE_CONVENTION: &str = "rho(b_j) = exp(i*pi/8) (1 + G_j G_(j+1)) / sqrt2, G = Jordan-Wigner Majoranas";

/// `i^phase X^x Z^z` on `q` qubits (qubit `k` is bit `k`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PauliString {
    pub x: u64,
    pub z: u64,
    pub phase: u8,
}

impl PauliString {
    /// Majorana operator `Gamma_k`, `k` 1-based: a Jordan-Wigner string ending in X or Y.
    pub fn majorana(k: usize) -> Self {
        let qubit = (k - 1) / 2;
        let below = (1u64 << qubit) - 1;
        if k % 2 == 1 {
            PauliString { x: 1 << qubit, z: below, phase: 0 }
        } else {
            // Y = i X Z
            PauliString { x: 1 << qubit, z: below | (1 << qubit), phase: 1 }
        }
    }

    pub fn compose(self, rhs: PauliString) -> PauliString {
        let flip = ((self.z & rhs.x).count_ones() % 2) as u8 * 2;
        PauliString {
            x: self.x ^ rhs.x,
            z: self.z ^ rhs.z,
            phase: (self.phase + rhs.phase + flip) % 4,
        }
    }

    /// Image of basis state `i`: `(coefficient, index)`.
    #[inline]
    pub fn apply_basis(&self, i: usize) -> (Complex64, usize) {
        let mut p = self.phase as u32;
        if (self.z & i as u64).count_ones() % 2 == 1 {
            p += 2;
        }
        (I_POWERS[(p % 4) as usize], i ^ self.x as usize)
    }
}

const I_POWERS: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

/// `rho(b_j) = phase (1 + Gamma_j Gamma_{j+1}) / sqrt2` on `ceil(n/2)` qubits.
#[derive(Debug, Clone, Serialize)]
pub struct IsingRep {
    n: usize,
    qubits: usize,
    #[serde(skip)]
    phase: Complex64,
    phase_convention: String,
    #[serde(skip)]
    pairs: Vec<PauliString>,
}

impl IsingRep {
    /// Default phase `exp(i pi/8)`: the normalised trace is then the bracket over `d^(n-1)`.
    pub fn new(n: usize) -> Result<Self> {
        Self::with_phase(n, Complex64::from_polar(1.0, std::f64::consts::PI / 8.0))
    }

    pub fn with_phase(n: usize, phase: Complex64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 strands, got {n}")));
        }
        let qubits = n.div_ceil(2);
        if qubits > 62 {
            return Err(Error::CapExceeded {
                what: "Majorana qubits",
                requested: qubits as u64,
                cap: 62,
            });
        }
        let pairs = (1..n)
            .map(|j| PauliString::majorana(j).compose(PauliString::majorana(j + 1)))
            .collect();
        let phase_convention = format!(
            "rho(b_j) = e^(i*{:.6}) (1 + G_j G_(j+1)) / sqrt2",
            phase.arg()
        );
        Ok(IsingRep { n, qubits, phase, phase_convention, pairs })
    }

    pub fn strands(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn phase(&self) -> Complex64 {
        self.phase
    }

    pub fn phase_convention(&self) -> &str {
        &self.phase_convention
    }

    /// `Gamma_j Gamma_{j+1}`; squares to `-1`.
    pub fn pair_operator(&self, j: usize) -> PauliString {
        self.pairs[j - 1]
    }

    fn check_dim(&self, cap: usize) -> Result<()> {
        if self.dim() > cap {
            return Err(Error::CapExceeded {
                what: "fusion representation dimension",
                requested: self.dim() as u64,
                cap: cap as u64,
            });
        }
        Ok(())
    }

    fn check_letter(&self, l: &BraidLetter) -> Result<()> {
        if l.index == 0 || l.index >= self.n {
            return Err(Error::GeneratorOutOfRange { index: l.index as i64, strands: self.n });
        }
        Ok(())
    }

    /// `v <- rho(letter) v`.
    pub fn apply_letter(&self, l: BraidLetter, v: &mut [Complex64], scratch: &mut [Complex64]) {
        let p = self.pairs[l.index - 1];
        let (c, s) = match l.sign {
            Sign::Pos => (self.phase * std::f64::consts::FRAC_1_SQRT_2, 1.0),
            Sign::Neg => (self.phase.conj() * std::f64::consts::FRAC_1_SQRT_2, -1.0),
        };
        scratch.copy_from_slice(v);
        for (i, &x) in scratch.iter().enumerate() {
            let (coef, k) = p.apply_basis(i);
            v[k] += coef * x * s;
        }
        for x in v.iter_mut() {
            *x *= c;
        }
    }

    /// Dense column-major matrix of a word (first letter applied first).
    pub fn word_matrix(&self, word: &BraidWord) -> Result<Vec<Complex64>> {
        self.word_matrix_capped(word, DEFAULT_DIM_CAP)
    }

    pub fn word_matrix_capped(&self, word: &BraidWord, cap: usize) -> Result<Vec<Complex64>> {
        self.check_dim(cap)?;
        if word.strands() != self.n {
            return Err(Error::InvalidArgument(format!(
                "word on {} strands, representation on {}",
                word.strands(),
                self.n
            )));
        }
        for l in word.letters() {
            self.check_letter(l)?;
        }
        let d = self.dim();
        let mut m = vec![Complex64::new(0.0, 0.0); d * d];
        let mut scratch = vec![Complex64::new(0.0, 0.0); d];
        for (col, chunk) in m.chunks_mut(d).enumerate() {
            chunk[col] = Complex64::new(1.0, 0.0);
            for &l in word.letters() {
                self.apply_letter(l, chunk, &mut scratch);
            }
        }
        Ok(m)
    }
}

/// `tr rho(word) / dim`, the Markov trace of the word.
pub fn fusion_trace(rep: &IsingRep, word: &BraidWord) -> Result<Complex64> {
    fusion_trace_capped(rep, word, DEFAULT_DIM_CAP)
}

pub fn fusion_trace_capped(rep: &IsingRep, word: &BraidWord, cap: usize) -> Result<Complex64> {
    let m = rep.word_matrix_capped(word, cap)?;
    let d = rep.dim();
    let tr: Complex64 = (0..d).map(|i| m[i * d + i]).sum();
    Ok(tr / d as f64)
}

/// Walk distribution from matrix traces of `rho(B_b)^dagger rho(B_a)` over all
/// valid pairs; no link invariants involved.
pub fn oracle_distribution(cfg: &WalkConfig) -> Result<Distribution> {
    oracle_distribution_with(cfg, &IsingRep::new(cfg.n())?)
}

pub fn oracle_distribution_with(cfg: &WalkConfig, rep: &IsingRep) -> Result<Distribution> {
    let t = cfg.t();
    if t > ORACLE_MAX_STEPS {
        return Err(Error::CapExceeded {
            what: "fusion oracle steps",
            requested: t as u64,
            cap: ORACLE_MAX_STEPS as u64,
        });
    }
    rep.check_dim(DEFAULT_DIM_CAP)?;
    if t == 0 {
        return Ok(Distribution::real(cfg, DistKind::Oracle, vec![1.0]));
    }
    let strata: Vec<(usize, u8)> =
        (0..=t).flat_map(|s| [0u8, 1].into_iter().map(move |c| (s, c))).collect();
    let partial: Vec<(usize, f64)> = strata
        .par_iter()
        .map(|&(s, c)| stratum_trace_sum(cfg, rep, s, c).map(|v| (s, v)))
        .collect::<Result<_>>()?;
    let mut w = vec![0.0; t + 1];
    for (s, v) in partial {
        w[s] += v;
    }
    let scale = 0.5f64.powi(t as i32);
    Ok(Distribution::real(cfg, DistKind::Oracle, w.into_iter().map(|v| v * scale).collect()))
}

fn stratum_trace_sum(cfg: &WalkConfig, rep: &IsingRep, s: usize, c: u8) -> Result<f64> {
    let hist: Vec<CoinHistory> = histories_in_stratum(cfg.t(), s, c).collect();
    if hist.is_empty() {
        return Ok(0.0);
    }
    let d = rep.dim();
    let mats: Vec<Vec<Complex64>> = hist
        .iter()
        .map(|a| rep.word_matrix(&braid_from_history(a, cfg)?))
        .collect::<Result<_>>()?;
    let sign = |a: &CoinHistory| if a.consecutive_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut total = 0.0;
    for (i, a) in hist.iter().enumerate() {
        for (j, b) in hist.iter().enumerate().take(i + 1) {
            // tr(M_b^dagger M_a) = sum conj(M_b) * M_a; swapping a and b conjugates it
            let tr: Complex64 =
                mats[j].iter().zip(&mats[i]).map(|(x, y)| x.conj() * y).sum::<Complex64>();
            let mult = if i == j { 1.0 } else { 2.0 };
            total += mult * sign(a) * sign(b) * tr.re / d as f64;
        }
    }
    Ok(total)
}
