//! Cross-oracle checks at small sizes, plus the random braid words they use.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::braid::{close_link, combined_word, BraidLetter, BraidWord, CoinHistory, PathPair, WalkConfig};
use crate::error::{Error, Result};
use crate::fusion::{fusion_trace, oracle_distribution, IsingRep};
use crate::linkinv::{jones_at_i, kauffman_bracket_statesum, writhe_corrected_bracket};
use crate::properstats::lattice_counts;
use crate::walkdist::{
    anyonic_distribution_exact, anyonic_distribution_exact_with, anyonic_distribution_transfer,
    hadamard_qw, Evaluator,
};

/// Uniformly random letters on `n` strands.
pub fn random_word<R: Rng>(rng: &mut R, n: usize, len: usize) -> BraidWord {
    let letters = (0..len)
        .map(|_| {
            let j = rng.gen_range(1..n);
            if rng.gen_bool(0.5) {
                BraidLetter::pos(j)
            } else {
                BraidLetter::neg(j)
            }
        })
        .collect();
    BraidWord::new(n, letters).expect("indices are in range")
}

/// Random word with identity permutation, by rejection.
pub fn random_pure_word<R: Rng>(rng: &mut R, max_n: usize, max_len: usize) -> BraidWord {
    loop {
        let n = rng.gen_range(2..=max_n);
        let len = rng.gen_range(0..=max_len);
        let w = random_word(rng, n, len);
        if close_link(&w).is_pure() {
            return w;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct SelfcheckOptions {
    /// Overall phase of the fusion generators; the bracket needs `exp(i pi/8)`.
    pub fusion_phase: Complex64,
    pub seed: u64,
    pub random_words: usize,
}

impl Default for SelfcheckOptions {
    fn default() -> Self {
        SelfcheckOptions {
            fusion_phase: Complex64::from_polar(1.0, std::f64::consts::PI / 8.0),
            seed: 2024,
            random_words: 200,
        }
    }
}

fn row(name: &'static str, outcome: Result<String>) -> CheckRow {
    match outcome {
        Ok(detail) => CheckRow { name, passed: true, detail },
        Err(e) => CheckRow { name, passed: false, detail: e.to_string() },
    }
}

fn fail(msg: String) -> Error {
    Error::Consistency(msg)
}

fn all_pairs(t: usize) -> Vec<PathPair> {
    let mut out = Vec::new();
    for a in 0..1u64 << t {
        for b in 0..1u64 << t {
            let a = CoinHistory::from_packed(a, t).expect("fits");
            let b = CoinHistory::from_packed(b, t).expect("fits");
            if let Ok(p) = PathPair::new(a, b) {
                out.push(p);
            }
        }
    }
    out
}

fn bracket_vs_arf() -> Result<String> {
    let mut n = 0;
    for t in 1..=4 {
        let cfg = WalkConfig::with_steps(t)?;
        for p in all_pairs(t) {
            let link = close_link(&combined_word(&p, &cfg)?);
            let (v, b) = (jones_at_i(&link)?, writhe_corrected_bracket(&link)?);
            if v != b {
                return Err(fail(format!("{}/{}: {} vs {}", p.forward(), p.backward(), v, b)));
            }
            n += 1;
        }
    }
    Ok(format!("{n} walk links, t <= 4"))
}

fn trace_vs_bracket(opts: &SelfcheckOptions) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let d = std::f64::consts::SQRT_2;
    let mut worst = 0.0f64;
    for _ in 0..opts.random_words {
        let n = rng.gen_range(2..=6);
        let len = rng.gen_range(0..=10);
        let w = random_word(&mut rng, n, len);
        let rep = IsingRep::with_phase(n, opts.fusion_phase)?;
        let tr = fusion_trace(&rep, &w)?;
        let br = kauffman_bracket_statesum(&close_link(&w))?.to_complex();
        worst = worst.max((tr - br / d.powi(n as i32 - 1)).norm());
    }
    if worst > 1e-9 {
        return Err(fail(format!("max deviation {worst:.3e}")));
    }
    Ok(format!("{} random words, max deviation {worst:.1e}", opts.random_words))
}

fn oracle_vs_exact() -> Result<String> {
    let mut worst = 0.0f64;
    for t in 1..=5 {
        let cfg = WalkConfig::with_steps(t)?;
        let o = oracle_distribution(&cfg)?.probabilities();
        let e = anyonic_distribution_exact(&cfg)?.probabilities();
        worst = o.iter().zip(&e).map(|(a, b)| (a - b).abs()).fold(worst, f64::max);
    }
    if worst > 1e-9 {
        return Err(fail(format!("max deviation {worst:.3e}")));
    }
    Ok(format!("t <= 5, max deviation {worst:.1e}"))
}

fn transfer_vs_exact() -> Result<String> {
    for t in 1..=8 {
        let cfg = WalkConfig::with_steps(t)?;
        let a = anyonic_distribution_transfer(&cfg)?;
        let b = anyonic_distribution_exact(&cfg)?;
        if a.numerators() != b.numerators() {
            return Err(fail(format!("t = {t}: {:?} vs {:?}", a.numerators(), b.numerators())));
        }
    }
    Ok("t <= 8, exact dyadic".into())
}

fn stub_vs_qw() -> Result<String> {
    for t in 1..=6 {
        let cfg = WalkConfig::with_steps(t)?;
        let stub = anyonic_distribution_exact_with(&cfg, Evaluator::TrivialBracket, t)?;
        if stub.numerators() != hadamard_qw(&cfg).numerators() {
            return Err(fail(format!("t = {t}")));
        }
    }
    Ok("t <= 6, exact dyadic".into())
}

fn lattice() -> Result<String> {
    for n in 1..=16 {
        if !lattice_counts(n)?.identities_hold() {
            return Err(fail(format!("n = {n}")));
        }
    }
    Ok("n <= 16".into())
}

fn caps() -> Result<String> {
    let cfg = WalkConfig::with_steps(15)?;
    if !matches!(anyonic_distribution_exact(&cfg), Err(Error::CapExceeded { .. })) {
        return Err(fail("exact enumeration ran past its cap".into()));
    }
    let cfg = WalkConfig::with_steps(9)?;
    if !matches!(oracle_distribution(&cfg), Err(Error::CapExceeded { .. })) {
        return Err(fail("fusion oracle ran past its cap".into()));
    }
    Ok("exact t = 15 and oracle t = 9 refused".into())
}

pub fn run_selfcheck() -> Vec<CheckRow> {
    run_selfcheck_with(&SelfcheckOptions::default())
}

pub fn run_selfcheck_with(opts: &SelfcheckOptions) -> Vec<CheckRow> {
    vec![
        row("bracket-vs-arf", bracket_vs_arf()),
        row("trace-vs-bracket", trace_vs_bracket(opts)),
        row("oracle-vs-exact", oracle_vs_exact()),
        row("transfer-vs-exact", transfer_vs_exact()),
        row("stub-vs-qw", stub_vs_qw()),
        row("lattice-identities", lattice()),
        row("caps", caps()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_build_passes() {
        let rows = run_selfcheck();
        for r in &rows {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }

    #[test]
    fn wrong_phase_is_caught() {
        let opts = SelfcheckOptions {
            fusion_phase: Complex64::from_polar(1.0, std::f64::consts::PI / 4.0),
            random_words: 50,
            ..Default::default()
        };
        let rows = run_selfcheck_with(&opts);
        let tr = rows.iter().find(|r| r.name == "trace-vs-bracket").unwrap();
        assert!(!tr.passed);
        assert!(rows.iter().filter(|r| r.name != "trace-vs-bracket").all(|r| r.passed));
    }

    #[test]
    fn pure_words_close_to_pure_links() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let w = random_pure_word(&mut rng, 4, 16);
            assert!(w.len() <= 16);
            assert!(close_link(&w).is_pure());
        }
    }
}
