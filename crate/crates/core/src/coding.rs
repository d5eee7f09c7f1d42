//! Shape functions `S0`/`S` and parity coding of bit strings along the
//! evaluation path of a word.
//!
//! Path positions count single letters while `w` is applied repeatedly, so
//! bit `k` of the string coded by `(w, s)` with parameter `m` is the parity of
//! `w^{S(w)·(k+1)}[s](m)`, which sits at path position `S(w)·lh(w)·(k+1)`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::perms::{step, GroundRepresentation, PartialInjection};
use crate::words::{Gen, Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodingError {
    #[error("word {0} does not contain a or a^-1")]
    NotInWd(Word),
    #[error("word {0} has a proper conjugate subword")]
    NotInWs(Word),
    #[error("shape of length {0} is too long to rank")]
    ShapeTooLong(usize),
    #[error("cannot parse bit string {0:?}")]
    BadBits(String),
}

/// A letter of a shape word over `{a, a^-1, y, y^-1}`, in alphabet order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ShapeLetter {
    A,
    AInv,
    Y,
    YInv,
}

impl ShapeLetter {
    fn of(letter: Letter) -> Self {
        match (letter.gen, letter.inverse) {
            (Gen::New, false) => ShapeLetter::A,
            (Gen::New, true) => ShapeLetter::AInv,
            (Gen::Ground(_), false) => ShapeLetter::Y,
            (Gen::Ground(_), true) => ShapeLetter::YInv,
        }
    }

    fn is_new(self) -> bool {
        matches!(self, ShapeLetter::A | ShapeLetter::AInv)
    }

    /// `a` next to `a^-1` can never occur in the shape of a reduced word;
    /// `y` next to `y^-1` can (two different ground letters).
    fn blocked(self, next: ShapeLetter) -> bool {
        matches!((self, next), (ShapeLetter::A, ShapeLetter::AInv) | (ShapeLetter::AInv, ShapeLetter::A))
    }

    const ALL: [ShapeLetter; 4] = [ShapeLetter::A, ShapeLetter::AInv, ShapeLetter::Y, ShapeLetter::YInv];
}

impl fmt::Display for ShapeLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShapeLetter::A => "a",
            ShapeLetter::AInv => "a^-1",
            ShapeLetter::Y => "y",
            ShapeLetter::YInv => "y^-1",
        })
    }
}

/// `S0(w)` together with `S(w)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeShape {
    /// Shape letters in application order, like [`Word`].
    pub shape: Vec<ShapeLetter>,
    pub s_value: u64,
}

impl fmt::Display for CodeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.shape.iter().rev().map(|l| l.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

/// Number of ways to append `rest` shape letters after `last` (None at the
/// start) so that the whole word contains `a^{±1}`.
fn completions(rest: usize, last: Option<ShapeLetter>, has_new: bool) -> u128 {
    // table[r][class][has]: class 0 = none/y-type, 1 = a, 2 = a^-1
    let class = |l: Option<ShapeLetter>| match l {
        Some(ShapeLetter::A) => 1,
        Some(ShapeLetter::AInv) => 2,
        _ => 0,
    };
    let mut table = vec![[[0u128; 2]; 3]; rest + 1];
    for c in 0..3 {
        table[0][c] = [0, 1];
    }
    for r in 1..=rest {
        for c in 0..3 {
            for h in 0..2 {
                let mut total = 0u128;
                for next in ShapeLetter::ALL {
                    let blocked = (c == 1 && next == ShapeLetter::AInv) || (c == 2 && next == ShapeLetter::A);
                    if blocked {
                        continue;
                    }
                    let h2 = (h == 1 || next.is_new()) as usize;
                    total += table[r - 1][class(Some(next))][h2];
                }
                table[r][c][h] = total;
            }
        }
    }
    table[rest][class(last)][has_new as usize]
}

/// Rank of a shape (given in display order) among all admissible shapes,
/// ordered by length and then lexicographically with `a < a^-1 < y < y^-1`.
fn shape_rank(display: &[ShapeLetter]) -> u128 {
    let n = display.len();
    let shorter: u128 = (1..n).map(|len| completions(len, None, false)).sum();
    let mut within = 0u128;
    let mut last: Option<ShapeLetter> = None;
    let mut has_new = false;
    for (i, &letter) in display.iter().enumerate() {
        for smaller in ShapeLetter::ALL.into_iter().filter(|&l| l < letter) {
            if last.is_some_and(|p| p.blocked(smaller)) {
                continue;
            }
            within += completions(n - 1 - i, Some(smaller), has_new || smaller.is_new());
        }
        has_new |= letter.is_new();
        last = Some(letter);
    }
    shorter + within
}

/// `S0(w)` and `S(w) = 2 + rank(S0(w))`.
pub fn shape(w: &Word) -> Result<CodeShape, CodingError> {
    if !w.in_wd() {
        return Err(CodingError::NotInWd(w.clone()));
    }
    // 4^60 still fits comfortably in u128 together with the prefix sums
    if w.len() > 60 {
        return Err(CodingError::ShapeTooLong(w.len()));
    }
    let shape: Vec<ShapeLetter> = w.letters().iter().map(|&l| ShapeLetter::of(l)).collect();
    let display: Vec<ShapeLetter> = shape.iter().rev().copied().collect();
    let rank = shape_rank(&display);
    let s_value = u64::try_from(rank + 2).map_err(|_| CodingError::ShapeTooLong(w.len()))?;
    Ok(CodeShape { shape, s_value })
}

pub fn s_value(w: &Word) -> Result<u64, CodingError> {
    shape(w).map(|c| c.s_value)
}

/// A finite 0/1 string, rendered as text like `"10110"`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(pub Vec<bool>);

impl BitString {
    pub fn new() -> Self {
        BitString(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, k: usize) -> Option<bool> {
        self.0.get(k).copied()
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn prefix(&self, len: usize) -> BitString {
        BitString(self.0[..len.min(self.0.len())].to_vec())
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|&b| f.write_str(if b { "1" } else { "0" }))
    }
}

impl FromStr for BitString {
    type Err = CodingError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        text.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(CodingError::BadBits(text.to_string())),
            })
            .collect::<Result<Vec<bool>, _>>()
            .map(BitString)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

/// A subset of the naturals to be coded, read through its characteristic
/// function. Given as a bit prefix or a finite set; bits past the prefix are 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZSet {
    Bits(BitString),
    Set(BTreeSet<u64>),
}

impl Default for ZSet {
    fn default() -> Self {
        ZSet::Set(BTreeSet::new())
    }
}

impl ZSet {
    pub fn bit(&self, k: usize) -> bool {
        match self {
            ZSet::Bits(bits) => bits.get(k).unwrap_or(false),
            ZSet::Set(set) => set.contains(&(k as u64)),
        }
    }

    /// `χ_z ↾ len`.
    pub fn prefix(&self, len: usize) -> BitString {
        BitString((0..len).map(|k| self.bit(k)).collect())
    }
}

/// Where the path of `m` under repeated application of `w[s]` stops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Terminal {
    /// Path index of the last defined value.
    pub index: usize,
    pub value: u64,
    /// The letter that would be applied next (always an `a`-letter).
    pub next_letter: Letter,
}

/// The path of `m` under `w[s], w[s]^2, ...` and how it ends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Walk {
    pub path: Vec<u64>,
    /// `None` when the path runs into a cycle and never terminates.
    pub terminal: Option<Terminal>,
}

/// Walks the path until it terminates. A terminating path makes at most
/// `|s| + 1` full passes through `w`, so anything longer is a cycle.
pub fn walk(w: &Word, rep: &GroundRepresentation, s: &PartialInjection, m: u64) -> Walk {
    let letters = w.letters();
    let bound = (s.len() + 2) * letters.len();
    let mut path = vec![m];
    let mut current = m;
    for t in 0..bound {
        let letter = letters[t % letters.len()];
        match step(letter, rep, s, current) {
            Some(next) => {
                path.push(next);
                current = next;
            }
            None => {
                return Walk { terminal: Some(Terminal { index: t, value: current, next_letter: letter }), path };
            }
        }
    }
    Walk { path, terminal: None }
}

/// Path position carrying bit `k`.
pub fn checkpoint(s_value: u64, len: usize, k: usize) -> usize {
    s_value as usize * len * (k + 1)
}

/// Path index at which an exact coding of a string of length `l` stops.
pub fn exact_terminal_index(w: &Word, s_value: u64, l: usize) -> usize {
    s_value as usize * w.len() * l + w.first_new_index().unwrap_or(0)
}

/// The coding reading of a path: decoded bits, critical points and exactness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodingStatus {
    pub word: Word,
    pub parameter: u64,
    /// The requested string.
    pub chi: BitString,
    /// Every bit the path carries, up to the length of `chi`.
    pub bits_coded: BitString,
    pub codes: bool,
    pub exact: bool,
    /// Path value just before each checkpoint that was reached.
    pub critical_points: Vec<u64>,
}

fn require_ws(w: &Word) -> Result<u64, CodingError> {
    if !w.in_ws() {
        return Err(if w.in_wd() { CodingError::NotInWs(w.clone()) } else { CodingError::NotInWd(w.clone()) });
    }
    s_value(w)
}

fn read_bits(path: &[u64], s: u64, len: usize, limit: usize) -> (BitString, Vec<u64>) {
    let mut bits = Vec::new();
    let mut critical = Vec::new();
    for k in 0..limit {
        let pos = checkpoint(s, len, k);
        match path.get(pos) {
            Some(&v) => {
                bits.push(v % 2 == 1);
                critical.push(path[pos - 1]);
            }
            None => break,
        }
    }
    (BitString(bits), critical)
}

/// Evaluation path long enough to read `limit` bits, or until it stops.
fn path_for(w: &Word, rep: &GroundRepresentation, s: &PartialInjection, m: u64, limit: usize) -> Vec<u64> {
    let letters = w.letters();
    let s_val = s_value(w).unwrap_or(2);
    let wanted = checkpoint(s_val, letters.len(), limit.max(1) - 1).max(exact_terminal_index(w, s_val, limit)) + 1;
    let mut path = vec![m];
    let mut current = m;
    for t in 0..wanted {
        match step(letters[t % letters.len()], rep, s, current) {
            Some(next) => {
                path.push(next);
                current = next;
            }
            None => break,
        }
    }
    path
}

/// Whether `(w, s)` codes `chi` with parameter `m`, and whether exactly.
pub fn codes(
    w: &Word,
    rep: &GroundRepresentation,
    s: &PartialInjection,
    m: u64,
    chi: &BitString,
) -> Result<CodingStatus, CodingError> {
    let s_val = require_ws(w)?;
    let path = path_for(w, rep, s, m, chi.len());
    let (bits_coded, critical_points) = read_bits(&path, s_val, w.len(), chi.len());
    let coded = bits_coded == *chi;
    // the path must end exactly at the first a-letter after the last checkpoint
    let stop = exact_terminal_index(w, s_val, chi.len());
    let exact = coded && path.len() == stop + 1;
    Ok(CodingStatus { word: w.clone(), parameter: m, chi: chi.clone(), bits_coded, codes: coded, exact, critical_points })
}

pub fn exactly_codes(
    w: &Word,
    rep: &GroundRepresentation,
    s: &PartialInjection,
    m: u64,
    chi: &BitString,
) -> Result<bool, CodingError> {
    codes(w, rep, s, m, chi).map(|st| st.exact)
}

/// The longest string coded along the path of `m`, capped at `limit` bits.
pub fn decode_bits(
    w: &Word,
    rep: &GroundRepresentation,
    s: &PartialInjection,
    m: u64,
    limit: usize,
) -> Result<BitString, CodingError> {
    let s_val = require_ws(w)?;
    let walked = walk(w, rep, s, m);
    let path = if walked.terminal.is_some() { walked.path } else { path_for(w, rep, s, m, limit) };
    Ok(read_bits(&path, s_val, w.len(), limit).0)
}

/// The unique `l` such that `(w, s)` exactly codes `z ↾ l` with parameter
/// `m`, if there is one.
pub fn coding_length(
    w: &Word,
    rep: &GroundRepresentation,
    s: &PartialInjection,
    m: u64,
    z: &ZSet,
) -> Result<Option<usize>, CodingError> {
    let s_val = require_ws(w)?;
    let walked = walk(w, rep, s, m);
    let Some(terminal) = walked.terminal else {
        return Ok(None);
    };
    let j = w.first_new_index().unwrap_or(0);
    let period = s_val as usize * w.len();
    if terminal.index < j || !(terminal.index - j).is_multiple_of(period) {
        return Ok(None);
    }
    let l = (terminal.index - j) / period;
    let path = &walked.path;
    Ok((0..l).all(|k| (path[checkpoint(s_val, w.len(), k)] % 2 == 1) == z.bit(k)).then_some(l))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(text: &str) -> Word {
        text.parse().unwrap()
    }

    fn bits(text: &str) -> BitString {
        text.parse().unwrap()
    }

    fn pi(pairs: &[(u64, u64)]) -> PartialInjection {
        PartialInjection::from_pairs(pairs.iter().copied()).unwrap()
    }

    fn example() -> PartialInjection {
        pi(&[(0, 3), (3, 5), (5, 2), (2, 4)])
    }

    #[test]
    fn s_values_of_short_words() {
        assert_eq!(s_value(&w("a")).unwrap(), 2);
        assert_eq!(s_value(&w("a^-1")).unwrap(), 3);
        let ya = shape(&w("b.a")).unwrap();
        assert_eq!(ya.to_string(), "y.a");
        assert_eq!(ya.s_value, 10);
        assert_eq!(shape(&w("b")).unwrap_err(), CodingError::NotInWd(w("b")));
    }

    #[test]
    fn shapes_with_cancelling_ground_letters_are_ranked() {
        // y.y^-1.a arises from c.b^-1.a
        let s1 = s_value(&w("c.b^-1.a")).unwrap();
        let s2 = s_value(&w("b.c^-1.a")).unwrap();
        assert_eq!(s1, s2);
        assert!(s1 > s_value(&w("a.b")).unwrap());
    }

    #[test]
    fn codes_example() {
        let rep = GroundRepresentation::trivial();
        let st = codes(&w("a"), &rep, &example(), 0, &bits("10")).unwrap();
        assert!(st.codes);
        assert!(st.exact);
        assert_eq!(st.critical_points, vec![3, 2]);
        assert!(codes(&w("a"), &rep, &example(), 0, &BitString::new()).unwrap().codes);
    }

    #[test]
    fn parity_mismatch_fails() {
        let rep = GroundRepresentation::trivial();
        assert!(!codes(&w("a"), &rep, &pi(&[(0, 2)]), 0, &bits("1")).unwrap().codes);
        assert!(!codes(&w("a"), &rep, &pi(&[(0, 1), (1, 2)]), 0, &bits("1")).unwrap().codes);
    }

    #[test]
    fn exactness_breaks_when_the_path_continues() {
        let rep = GroundRepresentation::trivial();
        let mut s = example();
        assert!(exactly_codes(&w("a"), &rep, &s, 0, &bits("10")).unwrap());
        s.insert(4, 7).unwrap();
        assert!(codes(&w("a"), &rep, &s, 0, &bits("10")).unwrap().codes);
        assert!(!exactly_codes(&w("a"), &rep, &s, 0, &bits("10")).unwrap());
        assert!(exactly_codes(&w("a"), &rep, &PartialInjection::new(), 0, &BitString::new()).unwrap());
    }

    #[test]
    fn decode_reads_parities() {
        let rep = GroundRepresentation::trivial();
        assert_eq!(decode_bits(&w("a"), &rep, &example(), 0, 16).unwrap(), bits("10"));
        assert_eq!(decode_bits(&w("a"), &rep, &PartialInjection::new(), 0, 16).unwrap(), BitString::new());
    }

    #[test]
    fn decode_on_a_cycle_respects_the_limit() {
        let rep = GroundRepresentation::trivial();
        let s = pi(&[(0, 1), (1, 0)]);
        assert_eq!(decode_bits(&w("a"), &rep, &s, 0, 3).unwrap(), bits("000"));
        assert_eq!(coding_length(&w("a"), &rep, &s, 0, &ZSet::default()).unwrap(), None);
    }

    #[test]
    fn coding_length_finds_the_unique_exact_prefix() {
        let rep = GroundRepresentation::trivial();
        let z = ZSet::Bits(bits("1011"));
        assert_eq!(coding_length(&w("a"), &rep, &example(), 0, &z).unwrap(), Some(2));
        let wrong = ZSet::Bits(bits("0"));
        assert_eq!(coding_length(&w("a"), &rep, &example(), 0, &wrong).unwrap(), None);
    }

    #[test]
    fn exact_terminal_skips_the_ground_prefix() {
        // for b.a the first a-letter is at index 0; for a.b at index 1
        assert_eq!(exact_terminal_index(&w("b.a"), 10, 1), 20);
        let ab = w("a.b");
        let s_val = s_value(&ab).unwrap();
        assert_eq!(exact_terminal_index(&ab, s_val, 0), 1);
        let rep = GroundRepresentation::single_zshift();
        assert!(exactly_codes(&ab, &rep, &PartialInjection::new(), 0, &BitString::new()).unwrap());
    }

    #[test]
    fn zset_reads_bits_and_sets() {
        let z = ZSet::Set(BTreeSet::from([0, 3]));
        assert_eq!(z.prefix(5), bits("10010"));
        assert_eq!(ZSet::Bits(bits("11")).prefix(4), bits("1100"));
        assert_eq!(bits("0110").to_string(), "0110");
        assert!(BitString::from_str("012").is_err());
    }
}
