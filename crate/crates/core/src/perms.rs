//! Partial injections, ground permutations and word evaluation `w[s]`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::families::CantorPairing;
use crate::words::{Gen, Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("{0} is already in the domain")]
    DomainClash(u64),
    #[error("{0} is already in the range")]
    RangeClash(u64),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("letter {letter} is neither `a` nor a generator of the ground representation")]
    UnknownLetter { letter: Letter },
    #[error("word {0} has no `a`-letter, so w[s] is total and has no finite domain")]
    GroundWord(Word),
}

/// A finite injective partial map on the naturals.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct PartialInjection {
    fwd: BTreeMap<u64, u64>,
    bwd: BTreeMap<u64, u64>,
}

impl PartialInjection {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (u64, u64)>>(pairs: I) -> Result<Self, PermError> {
        let mut s = Self::new();
        for (n, m) in pairs {
            s.insert(n, m)?;
        }
        Ok(s)
    }

    pub fn insert(&mut self, n: u64, image: u64) -> Result<(), PermError> {
        if self.fwd.contains_key(&n) {
            return Err(PermError::DomainClash(n));
        }
        if self.bwd.contains_key(&image) {
            return Err(PermError::RangeClash(image));
        }
        self.fwd.insert(n, image);
        self.bwd.insert(image, n);
        Ok(())
    }

    pub fn get(&self, n: u64) -> Option<u64> {
        self.fwd.get(&n).copied()
    }

    pub fn preimage(&self, m: u64) -> Option<u64> {
        self.bwd.get(&m).copied()
    }

    pub fn in_domain(&self, n: u64) -> bool {
        self.fwd.contains_key(&n)
    }

    pub fn in_range(&self, m: u64) -> bool {
        self.bwd.contains_key(&m)
    }

    pub fn len(&self) -> usize {
        self.fwd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fwd.is_empty()
    }

    /// Pairs sorted by first coordinate.
    pub fn pairs(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.fwd.iter().map(|(&n, &m)| (n, m))
    }

    pub fn domain(&self) -> impl Iterator<Item = u64> + '_ {
        self.fwd.keys().copied()
    }

    pub fn range(&self) -> impl Iterator<Item = u64> + '_ {
        self.bwd.keys().copied()
    }

    pub fn is_subset_of(&self, other: &PartialInjection) -> bool {
        self.len() <= other.len() && self.pairs().all(|(n, m)| other.get(n) == Some(m))
    }

    /// Pairs of `self` that are not in `older`.
    pub fn difference(&self, older: &PartialInjection) -> Vec<(u64, u64)> {
        self.pairs().filter(|&(n, m)| older.get(n) != Some(m)).collect()
    }

    /// One more than the largest coordinate, or 0 when empty.
    pub fn coordinate_bound(&self) -> u64 {
        let dom = self.fwd.keys().next_back().copied();
        let ran = self.bwd.keys().next_back().copied();
        dom.max(ran).map_or(0, |m| m + 1)
    }
}

impl fmt::Debug for PartialInjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

impl Serialize for PartialInjection {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.pairs())
    }
}

impl<'de> Deserialize<'de> for PartialInjection {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let pairs = Vec::<(u64, u64)>::deserialize(deserializer)?;
        PartialInjection::from_pairs(pairs).map_err(serde::de::Error::custom)
    }
}

/// Zig-zag identification of the naturals with the integers:
/// `0, 1, 2, 3, 4, ...` ↔ `0, 1, -1, 2, -2, ...`.
pub fn zigzag_to_int(n: u64) -> i64 {
    if n % 2 == 1 {
        n.div_ceil(2) as i64
    } else {
        -((n / 2) as i64)
    }
}

pub fn zigzag_from_int(z: i64) -> u64 {
    if z > 0 {
        2 * z as u64 - 1
    } else {
        2 * z.unsigned_abs()
    }
}

/// `+k` on the integers, transported to the naturals.
pub fn zigzag_shift(n: u64, k: i64) -> u64 {
    zigzag_from_int(zigzag_to_int(n) + k)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// A seeded bijection of the naturals that permutes each block of
/// `2^BITS` consecutive numbers by an affine map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockScramble {
    seed: u64,
}

impl BlockScramble {
    const BITS: u32 = 4;
    const MASK: u64 = (1 << Self::BITS) - 1;
    // 5 * 13 = 65 ≡ 1 (mod 16)
    const MUL: u64 = 5;
    const MUL_INV: u64 = 13;

    pub fn new(seed: u64) -> Self {
        BlockScramble { seed }
    }

    fn offset(&self, block: u64) -> u64 {
        splitmix64(self.seed ^ splitmix64(block)) & Self::MASK
    }

    pub fn apply(&self, n: u64) -> u64 {
        let block = n >> Self::BITS;
        let r = n & Self::MASK;
        (block << Self::BITS) | ((r * Self::MUL + self.offset(block)) & Self::MASK)
    }

    pub fn invert(&self, n: u64) -> u64 {
        let block = n >> Self::BITS;
        let r = n & Self::MASK;
        let r = ((r + (Self::MASK + 1) - self.offset(block)) * Self::MUL_INV) & Self::MASK;
        (block << Self::BITS) | r
    }
}

/// A finite injection completed to a permutation of the naturals.
///
/// Points outside the injection are matched by a zig-zag shift in index
/// space: the `i`-th unmatched domain point goes to the `zigzag_shift(i, 1)`-th
/// unmatched range point. Beyond [`Completion::boundary`] this has no fixed
/// points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Completion {
    table: PartialInjection,
    // sorted[i] - i, for rank/select over the complement
    dom_gaps: Vec<u64>,
    ran_gaps: Vec<u64>,
    boundary: u64,
}

fn gaps<I: Iterator<Item = u64>>(sorted: I) -> Vec<u64> {
    sorted.enumerate().map(|(i, v)| v - i as u64).collect()
}

/// Number of elements of the sorted set below `x`, where `gaps[i] = set[i] - i`.
fn rank_below(gaps: &[u64], x: u64) -> u64 {
    // set[i] < x  <=>  gaps[i] + i < x
    let mut lo = 0usize;
    let mut hi = gaps.len();
    while lo < hi {
        let mid = (lo + hi) / 2;
        if gaps[mid] + (mid as u64) < x {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo as u64
}

/// The `j`-th natural number (0-based) outside the sorted set.
fn select_outside(gaps: &[u64], j: u64) -> u64 {
    j + gaps.partition_point(|&g| g <= j) as u64
}

impl Completion {
    pub fn new(table: PartialInjection) -> Self {
        let dom_gaps = gaps(table.domain());
        let ran_gaps = gaps(table.range());
        let boundary = table.coordinate_bound();
        Completion { table, dom_gaps, ran_gaps, boundary }
    }

    pub fn table(&self) -> &PartialInjection {
        &self.table
    }

    pub fn boundary(&self) -> u64 {
        self.boundary
    }

    pub fn apply(&self, x: u64) -> u64 {
        if let Some(y) = self.table.get(x) {
            return y;
        }
        let i = x - rank_below(&self.dom_gaps, x);
        select_outside(&self.ran_gaps, zigzag_shift(i, 1))
    }

    pub fn invert(&self, y: u64) -> u64 {
        if let Some(x) = self.table.preimage(y) {
            return x;
        }
        let j = y - rank_below(&self.ran_gaps, y);
        select_outside(&self.dom_gaps, zigzag_shift(j, -1))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum GroundKind {
    /// `+1` on the integers, optionally conjugated by a block scramble.
    ZShift { scramble: Option<BlockScramble> },
    Completed(Arc<Completion>),
}

/// A total computable permutation of the naturals used as a ground generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundPermutation {
    kind: GroundKind,
}

impl GroundPermutation {
    /// The shift `z ↦ z + 1` on the integers, read through the zig-zag
    /// encoding. It and all its nonzero powers are fixed-point free.
    pub fn zshift() -> Self {
        GroundPermutation { kind: GroundKind::ZShift { scramble: None } }
    }

    /// The shift conjugated by a seeded block scramble; still fixed-point free
    /// in every nonzero power.
    pub fn zshift_conjugate(seed: u64) -> Self {
        GroundPermutation { kind: GroundKind::ZShift { scramble: Some(BlockScramble::new(seed)) } }
    }

    pub fn completed(table: PartialInjection) -> Self {
        GroundPermutation { kind: GroundKind::Completed(Arc::new(Completion::new(table))) }
    }

    pub fn forward(&self, x: u64) -> u64 {
        match &self.kind {
            GroundKind::ZShift { scramble: None } => zigzag_shift(x, 1),
            GroundKind::ZShift { scramble: Some(sc) } => sc.invert(zigzag_shift(sc.apply(x), 1)),
            GroundKind::Completed(c) => c.apply(x),
        }
    }

    pub fn backward(&self, x: u64) -> u64 {
        match &self.kind {
            GroundKind::ZShift { scramble: None } => zigzag_shift(x, -1),
            GroundKind::ZShift { scramble: Some(sc) } => sc.invert(zigzag_shift(sc.apply(x), -1)),
            GroundKind::Completed(c) => c.invert(x),
        }
    }

    /// Bound above which no power of this single permutation has fixed points.
    pub fn fixed_point_bound(&self) -> u64 {
        match &self.kind {
            GroundKind::ZShift { .. } => 0,
            GroundKind::Completed(c) => c.boundary(),
        }
    }

    pub fn completion(&self) -> Option<&Completion> {
        match &self.kind {
            GroundKind::Completed(c) => Some(c),
            GroundKind::ZShift { .. } => None,
        }
    }
}

/// A finite family of ground permutations indexed by generator id.
///
/// The family is assumed to freely generate a cofinitary group; the
/// `fixed_point_bound` is part of that input contract: no nonempty reduced
/// ground word is supposed to have a fixed point at or above it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroundRepresentation {
    perms: Vec<GroundPermutation>,
    fixed_point_bound: u64,
}

impl GroundRepresentation {
    pub fn new(perms: Vec<GroundPermutation>, fixed_point_bound: u64) -> Self {
        GroundRepresentation { perms, fixed_point_bound }
    }

    /// No ground generators at all.
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn single_zshift() -> Self {
        GroundRepresentation::new(vec![GroundPermutation::zshift()], 0)
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    pub fn perms(&self) -> &[GroundPermutation] {
        &self.perms
    }

    pub fn fixed_point_bound(&self) -> u64 {
        self.fixed_point_bound
    }

    pub fn push(&mut self, perm: GroundPermutation) {
        self.fixed_point_bound = self.fixed_point_bound.max(perm.fixed_point_bound());
        self.perms.push(perm);
    }

    #[inline]
    pub fn apply(&self, index: u32, inverse: bool, x: u64) -> u64 {
        let perm = &self.perms[index as usize];
        if inverse {
            perm.backward(x)
        } else {
            perm.forward(x)
        }
    }

    pub fn check_letter(&self, letter: Letter) -> Result<(), EvalError> {
        match letter.gen {
            Gen::Ground(i) if i as usize >= self.perms.len() => Err(EvalError::UnknownLetter { letter }),
            _ => Ok(()),
        }
    }

    pub fn check_word(&self, w: &Word) -> Result<(), EvalError> {
        w.letters().iter().try_for_each(|&l| self.check_letter(l))
    }

    /// Ground words of length at most `max_len` whose fixed points inside
    /// `[0, window)` number at least `cap`.
    pub fn spot_check(&self, max_len: usize, window: u64, cap: usize) -> Vec<(Word, usize)> {
        let empty = PartialInjection::new();
        crate::words::reduced_words_up_to(max_len, self.perms.len() as u32)
            .into_iter()
            .filter(|w| w.is_ground())
            .filter_map(|w| {
                let count = (0..window).filter(|&m| apply_word(&w, self, &empty, m) == Some(m)).count();
                (count >= cap).then_some((w, count))
            })
            .collect()
    }
}

/// One letter applied to `x`; `None` when `a^{±1}` is undefined at `x`.
#[inline]
pub fn step(letter: Letter, rep: &GroundRepresentation, s: &PartialInjection, x: u64) -> Option<u64> {
    match letter.gen {
        Gen::New if letter.inverse => s.preimage(x),
        Gen::New => s.get(x),
        Gen::Ground(i) => Some(rep.apply(i, letter.inverse, x)),
    }
}

/// `w[s](x)` without recording the path. Letters must be known to `rep`.
#[inline]
pub fn apply_word(w: &Word, rep: &GroundRepresentation, s: &PartialInjection, x: u64) -> Option<u64> {
    apply_letters(w.letters(), rep, s, x)
}

#[inline]
pub fn apply_letters(letters: &[Letter], rep: &GroundRepresentation, s: &PartialInjection, x: u64) -> Option<u64> {
    letters.iter().try_fold(x, |v, &l| step(l, rep, s, v))
}

/// Evaluation of `(w[s])^power` at a point, with its full path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalResult {
    pub value: Option<u64>,
    pub path: Vec<u64>,
}

impl EvalResult {
    /// `use(w, s, m)`: the numbers appearing on the path.
    pub fn use_set(&self) -> BTreeSet<u64> {
        self.path.iter().copied().collect()
    }
}

pub fn eval_word(
    w: &Word,
    rep: &GroundRepresentation,
    s: &PartialInjection,
    m: u64,
    power: usize,
) -> Result<EvalResult, EvalError> {
    rep.check_word(w)?;
    let mut path = vec![m];
    let mut current = m;
    for letter in std::iter::repeat_n(w.letters(), power).flatten() {
        match step(*letter, rep, s, current) {
            Some(next) => {
                path.push(next);
                current = next;
            }
            None => return Ok(EvalResult { value: None, path }),
        }
    }
    Ok(EvalResult { value: Some(current), path })
}

/// Every `m` at which `w[s]` is defined, for a word containing `a^{±1}`.
///
/// The ground prefix `u` before the first `a`-letter is total, so
/// `w[s](m)` can only be defined when `u(m)` lies in `dom(s)` (or `ran(s)`
/// for `a^-1`); the candidates are exactly the `u`-preimages of those.
pub fn defined_domain(w: &Word, rep: &GroundRepresentation, s: &PartialInjection) -> Result<Vec<u64>, EvalError> {
    rep.check_word(w)?;
    let first = w.first_new_index().ok_or_else(|| EvalError::GroundWord(w.clone()))?;
    let prefix = &w.letters()[..first];
    let gate: Vec<u64> = if w.letters()[first].inverse { s.range().collect() } else { s.domain().collect() };
    let mut out: Vec<u64> = gate
        .into_iter()
        .map(|x| prefix.iter().rev().fold(x, |v, l| rep.apply(ground_index(*l), !l.inverse, v)))
        .filter(|&m| apply_word(w, rep, s, m).is_some())
        .collect();
    out.sort_unstable();
    Ok(out)
}

fn ground_index(letter: Letter) -> u32 {
    match letter.gen {
        Gen::Ground(i) => i,
        Gen::New => unreachable!("ground prefix contains only ground letters"),
    }
}

/// `fix(w[s])`.
///
/// Complete for words containing `a^{±1}`; for pure ground words only
/// `[0, window)` is scanned.
pub fn fixed_points(
    w: &Word,
    rep: &GroundRepresentation,
    s: &PartialInjection,
    window: u64,
) -> Result<BTreeSet<u64>, EvalError> {
    rep.check_word(w)?;
    if w.contains_new() {
        Ok(defined_domain(w, rep, s)?.into_iter().filter(|&m| apply_word(w, rep, s, m) == Some(m)).collect())
    } else {
        Ok((0..window).filter(|&m| apply_word(w, rep, s, m) == Some(m)).collect())
    }
}

/// `ψ[w[s]]`: the pairing applied to the graph of the finite map `w[s]`.
pub fn psi_image(
    w: &Word,
    rep: &GroundRepresentation,
    s: &PartialInjection,
    pairing: CantorPairing,
) -> Result<BTreeSet<u64>, EvalError> {
    Ok(defined_domain(w, rep, s)?
        .into_iter()
        .filter_map(|n| apply_word(w, rep, s, n).map(|v| pairing.pair(n, v)))
        .collect())
}
