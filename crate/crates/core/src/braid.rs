//! Braid words generated by coin histories and their Markov closures.
//!
//! Sites and strand slots are 1-based, as are generator indices: the walker at
//! site `s` occupies slot `s`, and `b_j` exchanges slots `j` and `j + 1`. A coin
//! outcome 1 at site `s` applies `b_s` and moves right; outcome 0 applies
//! `b_{s-1}` and moves left.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Longest history that fits the packed representation.
pub const MAX_STEPS: usize = 64;

/// Longest walk whose dyadic weights fit `i128` numerators.
pub const MAX_WALK_STEPS: usize = 120;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WalkConfig {
    t: usize,
    n: usize,
    s0: usize,
}

impl WalkConfig {
    /// `t` steps on `n` strands starting from site `ceil(n/2)`.
    pub fn new(t: usize, n: usize) -> Result<Self> {
        if t > MAX_WALK_STEPS {
            return Err(Error::InvalidConfig(format!(
                "t = {t} exceeds the supported limit {MAX_WALK_STEPS}"
            )));
        }
        if 2 * t + 2 > n {
            return Err(Error::InvalidConfig(format!(
                "t = {t} requires n >= {} so the walker never wraps (got n = {n})",
                2 * t + 2
            )));
        }
        Ok(WalkConfig { t, n, s0: n.div_ceil(2) })
    }

    /// The default geometry `n = 2t + 2`.
    pub fn with_steps(t: usize) -> Result<Self> {
        WalkConfig::new(t, 2 * t + 2)
    }

    /// Overrides the starting site; the walk must still stay within the generator range.
    pub fn with_s0(self, s0: usize) -> Result<Self> {
        if s0 < self.t + 1 || s0 + self.t > self.n {
            return Err(Error::InvalidConfig(format!(
                "s0 = {s0} lets a {}-step walk leave slots 1..={}",
                self.t, self.n
            )));
        }
        Ok(WalkConfig { s0, ..self })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s0(&self) -> usize {
        self.s0
    }

    /// Site reached after `s` right moves.
    pub fn position(&self, s: usize) -> usize {
        2 * s + self.s0 - self.t
    }
}

/// A coin history `a_1..a_t`, packed one bit per step (bit `k` holds `a_{k+1}`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoinHistory {
    bits: u64,
    len: u8,
}

impl CoinHistory {
    pub fn from_packed(bits: u64, len: usize) -> Result<Self> {
        if len > MAX_STEPS {
            return Err(Error::InvalidArgument(format!(
                "history length {len} exceeds {MAX_STEPS}"
            )));
        }
        let mask = low_mask(len);
        if bits & !mask != 0 {
            return Err(Error::InvalidArgument(format!(
                "packed bits {bits:#x} do not fit in {len} steps"
            )));
        }
        Ok(CoinHistory { bits, len: len as u8 })
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut packed = 0u64;
        for (k, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => packed |= 1 << k,
                other => {
                    return Err(Error::InvalidArgument(format!("coin outcome {other} is not 0 or 1")))
                }
            }
        }
        CoinHistory::from_packed(packed, bits.len())
    }

    pub fn packed(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Outcome of step `k` (1-based).
    pub fn bit(&self, k: usize) -> u8 {
        debug_assert!((1..=self.len()).contains(&k));
        ((self.bits >> (k - 1)) & 1) as u8
    }

    pub fn last(&self) -> Option<u8> {
        (!self.is_empty()).then(|| self.bit(self.len()))
    }

    /// Number of right moves `|a|`.
    pub fn weight(&self) -> usize {
        self.bits.count_ones() as usize
    }

    /// Number of `j` with `a_j = a_{j+1} = 1`.
    pub fn consecutive_ones(&self) -> u32 {
        (self.bits & (self.bits >> 1)).count_ones()
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        (1..=self.len()).map(|k| self.bit(k))
    }
}

impl fmt::Display for CoinHistory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for CoinHistory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .filter(|c| !matches!(c, ',' | ' ' | '_'))
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::InvalidArgument(format!("'{other}' in coin history"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        CoinHistory::from_bits(&bits)
    }
}

pub(crate) fn low_mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// Forward and backward histories contributing to a diagonal element of the spatial state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PathPair {
    a: CoinHistory,
    b: CoinHistory,
}

impl PathPair {
    pub fn new(a: CoinHistory, b: CoinHistory) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::InvalidPair(format!(
                "histories have lengths {} and {}",
                a.len(),
                b.len()
            )));
        }
        if a.is_empty() {
            return Err(Error::InvalidPair("empty histories".into()));
        }
        if a.weight() != b.weight() {
            return Err(Error::InvalidPair(format!(
                "right-move counts differ ({} vs {})",
                a.weight(),
                b.weight()
            )));
        }
        if a.last() != b.last() {
            return Err(Error::InvalidPair("final coin outcomes differ".into()));
        }
        Ok(PathPair { a, b })
    }

    pub fn forward(&self) -> CoinHistory {
        self.a
    }

    pub fn backward(&self) -> CoinHistory {
        self.b
    }

    pub fn is_mirror(&self) -> bool {
        self.a == self.b
    }

    pub fn steps(&self) -> usize {
        self.a.len()
    }

    pub fn right_moves(&self) -> usize {
        self.a.weight()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }
}

/// `b_index` (counterclockwise) or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BraidLetter {
    pub index: usize,
    pub sign: Sign,
}

impl BraidLetter {
    pub fn pos(index: usize) -> Self {
        BraidLetter { index, sign: Sign::Pos }
    }

    pub fn neg(index: usize) -> Self {
        BraidLetter { index, sign: Sign::Neg }
    }

    pub fn inverse(self) -> Self {
        BraidLetter { index: self.index, sign: self.sign.flip() }
    }
}

impl fmt::Display for BraidLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Pos => write!(f, "b{}", self.index),
            Sign::Neg => write!(f, "b{}'", self.index),
        }
    }
}

/// Letters in time order on `strands` strands. Walk-generated words remember the
/// walker's starting slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BraidWord {
    letters: Vec<BraidLetter>,
    strands: usize,
    walker_slot: Option<usize>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<BraidLetter>) -> Result<Self> {
        if strands == 0 {
            return Err(Error::InvalidArgument("a braid needs at least one strand".into()));
        }
        if let Some(bad) = letters.iter().find(|l| l.index == 0 || l.index >= strands) {
            return Err(Error::GeneratorOutOfRange { index: bad.index as i64, strands });
        }
        Ok(BraidWord { letters, strands, walker_slot: None })
    }

    pub fn empty(strands: usize) -> Self {
        BraidWord { letters: Vec::new(), strands, walker_slot: None }
    }

    pub fn with_walker(mut self, slot: usize) -> Result<Self> {
        if !(1..=self.strands).contains(&slot) {
            return Err(Error::InvalidArgument(format!(
                "walker slot {slot} outside 1..={}",
                self.strands
            )));
        }
        self.walker_slot = Some(slot);
        Ok(self)
    }

    pub fn letters(&self) -> &[BraidLetter] {
        &self.letters
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn walker_slot(&self) -> Option<usize> {
        self.walker_slot
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Signed letter count.
    pub fn exponent_sum(&self) -> i64 {
        self.letters.iter().map(|l| l.sign.value()).sum()
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// Generator index applied at step `k` (1-based): `s0 + a_k + 2 sum_{j<k} a_j - k`.
fn step_generator(a: &CoinHistory, s0: usize, k: usize) -> i64 {
    let prefix = (a.packed() & low_mask(k - 1)).count_ones() as i64;
    s0 as i64 + a.bit(k) as i64 + 2 * prefix - k as i64
}

/// The word `B_a` of a single history, first step first.
pub fn braid_from_history(a: &CoinHistory, cfg: &WalkConfig) -> Result<BraidWord> {
    if a.len() != cfg.t() {
        return Err(Error::InvalidArgument(format!(
            "history has {} steps, configuration has t = {}",
            a.len(),
            cfg.t()
        )));
    }
    let strands = cfg.n();
    let letters = (1..=a.len())
        .map(|k| {
            let index = step_generator(a, cfg.s0(), k);
            if index < 1 || index >= strands as i64 {
                Err(Error::GeneratorOutOfRange { index, strands })
            } else {
                Ok(BraidLetter::pos(index as usize))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BraidWord { letters, strands, walker_slot: Some(cfg.s0()) })
}

/// The word of `B'^dagger B`: forward letters, then the backward word reversed and inverted.
pub fn combined_word(p: &PathPair, cfg: &WalkConfig) -> Result<BraidWord> {
    let fwd = braid_from_history(&p.forward(), cfg)?;
    let bwd = braid_from_history(&p.backward(), cfg)?;
    let mut letters = fwd.letters;
    letters.extend(bwd.letters.iter().rev().map(|l| l.inverse()));
    Ok(BraidWord { letters, strands: cfg.n(), walker_slot: Some(cfg.s0()) })
}

/// One letter of a closed braid: strands are named by their starting slot (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Crossing {
    pub position: usize,
    pub left: usize,
    pub right: usize,
    pub sign: Sign,
}

/// Markov closure of a braid word with its component bookkeeping.
#[derive(Debug, Clone)]
pub struct ClosedLink {
    word: BraidWord,
    /// `permutation[i]` is the final slot (0-based) of the strand starting at slot `i`.
    permutation: Vec<usize>,
    /// Component id of every strand; ids are numbered by smallest starting slot.
    component_of: Vec<usize>,
    component_count: usize,
    walker: Option<usize>,
    crossings: Vec<Crossing>,
}

pub fn close_link(w: &BraidWord) -> ClosedLink {
    let n = w.strands();
    let mut slot_strand: Vec<usize> = (0..n).collect();
    let mut crossings = Vec::with_capacity(w.len());
    for (position, l) in w.letters().iter().enumerate() {
        let (i, j) = (l.index - 1, l.index);
        crossings.push(Crossing {
            position,
            left: slot_strand[i],
            right: slot_strand[j],
            sign: l.sign,
        });
        slot_strand.swap(i, j);
    }
    let mut permutation = vec![0; n];
    for (slot, &strand) in slot_strand.iter().enumerate() {
        permutation[strand] = slot;
    }

    let mut component_of = vec![usize::MAX; n];
    let mut component_count = 0;
    for start in 0..n {
        if component_of[start] != usize::MAX {
            continue;
        }
        let mut k = start;
        while component_of[k] == usize::MAX {
            component_of[k] = component_count;
            k = permutation[k];
        }
        component_count += 1;
    }

    let walker = match w.walker_slot() {
        Some(slot) => Some(component_of[slot - 1]),
        None => infer_hub(&crossings, &component_of, component_count),
    };

    ClosedLink {
        word: w.clone(),
        permutation,
        component_of,
        component_count,
        walker,
        crossings,
    }
}

/// A component taking part in every crossing, if one exists.
fn infer_hub(crossings: &[Crossing], component_of: &[usize], count: usize) -> Option<usize> {
    if crossings.is_empty() {
        return None;
    }
    (0..count).find(|&c| {
        crossings
            .iter()
            .all(|x| component_of[x.left] == c || component_of[x.right] == c)
    })
}

impl ClosedLink {
    pub fn word(&self) -> &BraidWord {
        &self.word
    }

    pub fn strands(&self) -> usize {
        self.word.strands()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn is_pure(&self) -> bool {
        self.permutation.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn component_count(&self) -> usize {
        self.component_count
    }

    pub fn component_of(&self, strand: usize) -> usize {
        self.component_of[strand]
    }

    pub fn walker_component(&self) -> Option<usize> {
        self.walker
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    /// Components of the two strands meeting at a crossing.
    pub fn crossing_components(&self, c: &Crossing) -> (usize, usize) {
        (self.component_of[c.left], self.component_of[c.right])
    }

    /// True when one component takes part in every crossing, so the other
    /// components never cross each other.
    pub fn is_walk_shaped(&self) -> bool {
        match self.walker {
            None => self.crossings.is_empty(),
            Some(w) => self.crossings.iter().all(|c| {
                let (x, y) = self.crossing_components(c);
                x == w || y == w
            }),
        }
    }
}
