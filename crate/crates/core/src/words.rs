//! Reduced words over the ground generators and the distinguished new letter `a`.
//!
//! A [`Word`] stores its letters in *application order*: for the word
//! written `a_n^{j_n} ... a_1^{j_1}` the first stored letter is `a_1^{j_1}`,
//! the one applied first when the word is evaluated as a composition of maps.
//! Text rendering reverses this, so `"b^-1.a.b"` is stored as `[b, a, b^-1]`.
//!
//! Ground generator `i` is named `b`, `c`, ..., `z` for `i < 25` and `g{i}`
//! beyond that; `a` is always the new letter and `1` is the empty word.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("cannot parse word {text:?}: {reason}")]
    Parse { text: String, reason: String },
}

/// A generator index: either the new letter `a` or a ground generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    New,
    Ground(u32),
}

/// A generator together with an exponent of `+1` or `-1`.
///
/// The derived order is the alphabet order used throughout the crate:
/// `a < a^-1 < b < b^-1 < c < ...`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: Gen,
    pub inverse: bool,
}

impl Letter {
    pub const A: Letter = Letter { gen: Gen::New, inverse: false };
    pub const A_INV: Letter = Letter { gen: Gen::New, inverse: true };

    pub fn ground(index: u32) -> Self {
        Letter { gen: Gen::Ground(index), inverse: false }
    }

    pub fn ground_inv(index: u32) -> Self {
        Letter { gen: Gen::Ground(index), inverse: true }
    }

    pub fn inv(self) -> Self {
        Letter { gen: self.gen, inverse: !self.inverse }
    }

    pub fn is_new(self) -> bool {
        self.gen == Gen::New
    }

    pub fn cancels(self, other: Letter) -> bool {
        self.gen == other.gen && self.inverse != other.inverse
    }
}

pub fn generator_name(gen: Gen) -> String {
    match gen {
        Gen::New => "a".to_string(),
        Gen::Ground(i) if i < 25 => char::from(b'b' + i as u8).to_string(),
        Gen::Ground(i) => format!("g{i}"),
    }
}

fn parse_generator(token: &str) -> Option<Gen> {
    match token.as_bytes() {
        [b'a'] => Some(Gen::New),
        [c @ b'b'..=b'z'] => Some(Gen::Ground(u32::from(c - b'b'))),
        [b'g', rest @ ..] if !rest.is_empty() => token[1..].parse().ok().map(Gen::Ground),
        _ => None,
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", generator_name(self.gen))?;
        if self.inverse {
            write!(f, "^-1")?;
        }
        Ok(())
    }
}

impl FromStr for Letter {
    type Err = WordError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| WordError::Parse { text: text.to_string(), reason: reason.to_string() };
        let token = text.trim();
        let (base, inverse) = match token.split_once('^') {
            Some((base, "-1")) => (base, true),
            Some((base, "1")) => (base, false),
            Some(_) => return Err(err("exponent must be 1 or -1")),
            None => (token, false),
        };
        let gen = parse_generator(base).ok_or_else(|| err("unknown generator name"))?;
        Ok(Letter { gen, inverse })
    }
}

/// A word over `dom(rho) ∪ {a}` stored in application order.
///
/// Words built through [`Word::reduce`], [`Word::inverse`], [`Word::subwords`]
/// or parsing are freely reduced. [`Word::circular_shifts`] and
/// [`Word::literal`] may produce unreduced letter sequences.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

/// Classification of a reduced word: membership in WD and WS, and its
/// maximal conjugating decomposition `w = u^-1 · core · u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordClass {
    pub in_wd: bool,
    pub in_ws: bool,
    pub core: Word,
    pub conjugator: Word,
}

impl Word {
    pub fn empty() -> Self {
        Word { letters: Vec::new() }
    }

    /// Free reduction of a raw letter sequence given in application order.
    pub fn reduce<I: IntoIterator<Item = Letter>>(raw: I) -> Self {
        let mut stack: Vec<Letter> = Vec::new();
        for letter in raw {
            match stack.last() {
                Some(&top) if top.cancels(letter) => {
                    stack.pop();
                }
                _ => stack.push(letter),
            }
        }
        Word { letters: stack }
    }

    /// Wraps a letter sequence without reducing it.
    pub fn literal(letters: Vec<Letter>) -> Self {
        Word { letters }
    }

    pub fn letter(letter: Letter) -> Self {
        Word { letters: vec![letter] }
    }

    /// The single-letter word `a`.
    pub fn a() -> Self {
        Word::letter(Letter::A)
    }

    /// Builds a word from letters listed in display order (leftmost first).
    pub fn from_display<I>(display: I) -> Self
    where
        I: IntoIterator<Item = Letter>,
        I::IntoIter: DoubleEndedIterator,
    {
        Word::reduce(display.into_iter().rev())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Letters in display order, leftmost (applied last) first.
    pub fn display_letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.letters.iter().rev().copied()
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|pair| !pair[0].cancels(pair[1]))
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.is_reduced()
            && match (self.letters.first(), self.letters.last()) {
                (Some(first), Some(last)) if self.letters.len() > 1 => !first.cancels(*last),
                _ => true,
            }
    }

    /// True when `a` or `a^-1` occurs.
    pub fn contains_new(&self) -> bool {
        self.letters.iter().any(|l| l.is_new())
    }

    /// True when the word is nonempty and uses only ground letters.
    pub fn is_ground(&self) -> bool {
        !self.letters.is_empty() && !self.contains_new()
    }

    pub fn in_wd(&self) -> bool {
        self.contains_new()
    }

    pub fn in_ws(&self) -> bool {
        self.contains_new() && self.is_cyclically_reduced()
    }

    /// Largest ground generator index used, if any.
    pub fn max_ground_index(&self) -> Option<u32> {
        self.letters
            .iter()
            .filter_map(|l| match l.gen {
                Gen::Ground(i) => Some(i),
                Gen::New => None,
            })
            .max()
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|l| l.inv()).collect() }
    }

    /// `self · other` in display order, i.e. `other` is applied first.
    pub fn after(&self, other: &Word) -> Word {
        Word::reduce(other.letters.iter().chain(self.letters.iter()).copied())
    }

    pub fn power(&self, k: usize) -> Word {
        Word::reduce(std::iter::repeat_n(self.letters.iter().copied(), k).flatten())
    }

    /// Contiguous letters `start..end` of the stored sequence.
    pub fn slice(&self, start: usize, end: usize) -> Word {
        Word { letters: self.letters[start..end].to_vec() }
    }

    /// All rotations of the letter sequence, computed literally.
    pub fn circular_shifts(&self) -> BTreeSet<Word> {
        let n = self.letters.len();
        (0..n.max(1))
            .map(|k| {
                let mut letters = self.letters.clone();
                if n > 0 {
                    letters.rotate_left(k);
                }
                Word { letters }
            })
            .collect()
    }

    /// All nonempty contiguous subwords.
    pub fn subwords(&self) -> BTreeSet<Word> {
        let n = self.letters.len();
        let mut out = BTreeSet::new();
        for start in 0..n {
            for end in start + 1..=n {
                out.insert(self.slice(start, end));
            }
        }
        out
    }

    /// Maximal decomposition `w = u^-1 · core · u` with `core` nonempty.
    ///
    /// In storage order this peels matching letter/inverse pairs off both
    /// ends; `u` is the stored prefix that was peeled.
    pub fn conjugate_core(&self) -> WordClass {
        let n = self.letters.len();
        let mut k = 0;
        while 2 * k + 2 <= n && self.letters[n - 1 - k] == self.letters[k].inv() {
            k += 1;
        }
        let core = self.slice(k, n - k);
        let conjugator = self.slice(0, k);
        let in_wd = self.contains_new();
        WordClass { in_wd, in_ws: in_wd && k == 0, core, conjugator }
    }

    /// The cyclically reduced core of a reduced word.
    pub fn cyclic_reduction(&self) -> Word {
        self.conjugate_core().core
    }

    /// Storage index of the first `a`-letter, i.e. the length of the
    /// shortest suffix (in display order) that ends with `a^{±1}`, minus one.
    pub fn first_new_index(&self) -> Option<usize> {
        self.letters.iter().position(|l| l.is_new())
    }
}

impl Ord for Word {
    /// Shortlex in display order, using the alphabet order of [`Letter`].
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.display_letters().cmp(other.display_letters()))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (i, letter) in self.display_letters().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{letter}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = WordError;

    /// Parses display-order text such as `"b^-1.a.b"` and reduces it.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let trimmed = text.trim();
        if trimmed.is_empty() || trimmed == "1" {
            return Ok(Word::empty());
        }
        let letters = trimmed.split('.').map(str::parse::<Letter>).collect::<Result<Vec<_>, _>>()?;
        Ok(Word::from_display(letters))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Every reduced word of length exactly `len` over `a` and `ground` ground
/// generators, in ascending [`Word`] order.
pub fn reduced_words_of_length(len: usize, ground: u32) -> Vec<Word> {
    let alphabet: Vec<Letter> = std::iter::once(Gen::New)
        .chain((0..ground).map(Gen::Ground))
        .flat_map(|gen| [Letter { gen, inverse: false }, Letter { gen, inverse: true }])
        .collect();
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for display in &out {
            for &letter in &alphabet {
                if let Some(&last) = display.last() {
                    if letter.cancels(last) {
                        continue;
                    }
                }
                let mut extended: Vec<Letter> = display.clone();
                extended.push(letter);
                next.push(extended);
            }
        }
        out = next;
    }
    out.into_iter().map(|display| Word { letters: display.into_iter().rev().collect() }).collect()
}

/// Every reduced word of length at most `max_len` (the empty word included).
pub fn reduced_words_up_to(max_len: usize, ground: u32) -> Vec<Word> {
    (0..=max_len).flat_map(|len| reduced_words_of_length(len, ground)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(text: &str) -> Word {
        text.parse().unwrap()
    }

    fn b() -> Letter {
        Letter::ground(0)
    }

    #[test]
    fn reduce_cancels_adjacent_inverses() {
        assert_eq!(Word::reduce([b(), b().inv()]), Word::empty());
        assert_eq!(Word::reduce([Letter::A, b(), b().inv(), Letter::A]), w("a.a"));
        assert_eq!(Word::reduce([Letter::A, b(), b().inv(), Letter::A_INV]), Word::empty());
    }

    #[test]
    fn display_and_parse_round_trip() {
        let word = w("b^-1.a.b");
        assert_eq!(word.letters(), &[b(), Letter::A, b().inv()]);
        assert_eq!(word.to_string(), "b^-1.a.b");
        assert_eq!(w("1"), Word::empty());
        assert_eq!(Word::empty().to_string(), "1");
        assert_eq!(w("g30.a").letters()[1], Letter::ground(30));
        assert_eq!(w("g30").to_string(), "g30");
        assert_eq!(w("g").letters()[0], Letter::ground(5));
        assert!("q^2".parse::<Word>().is_err());
        assert!("a..b".parse::<Word>().is_err());
    }

    #[test]
    fn inverse_reverses_and_flips() {
        assert_eq!(Word::empty().inverse(), Word::empty());
        assert_eq!(w("b.a").inverse(), w("a^-1.b^-1"));
    }

    #[test]
    fn circular_shift_examples() {
        assert_eq!(w("a").circular_shifts(), BTreeSet::from([w("a")]));
        assert_eq!(w("b.a").circular_shifts(), BTreeSet::from([w("b.a"), w("a.b")]));
        assert_eq!(w("a.b.a").circular_shifts(), BTreeSet::from([w("a.b.a"), w("a.a.b"), w("b.a.a")]));
    }

    #[test]
    fn circular_shifts_are_literal() {
        let shifts = w("b^-1.a.b").circular_shifts();
        assert!(shifts.iter().any(|s| !s.is_reduced()));
        assert_eq!(shifts.len(), 3);
    }

    #[test]
    fn conjugate_core_examples() {
        let class = w("b^-1.a.b").conjugate_core();
        assert_eq!(class.core, w("a"));
        assert_eq!(class.conjugator, w("b"));
        assert!(class.in_wd && !class.in_ws);

        let class = w("a.b").conjugate_core();
        assert_eq!(class.core, w("a.b"));
        assert!(class.in_ws);

        let class = w("a^-1.b.a").conjugate_core();
        assert_eq!(class.core, w("b"));
        assert!(class.in_wd && !class.in_ws);

        let class = Word::empty().conjugate_core();
        assert!(class.core.is_empty() && !class.in_wd);
    }

    #[test]
    fn subword_examples() {
        assert_eq!(w("a").subwords(), BTreeSet::from([w("a")]));
        assert_eq!(w("b.a").subwords(), BTreeSet::from([w("b"), w("a"), w("b.a")]));
        assert_eq!(w("a.a").subwords().len(), 2);
    }

    #[test]
    fn order_is_shortlex_in_display_order() {
        let mut words = vec![w("b.a"), w("a"), w("a^-1"), w("a.b"), w("b")];
        words.sort();
        assert_eq!(words, vec![w("a"), w("a^-1"), w("b"), w("a.b"), w("b.a")]);
    }

    #[test]
    fn enumeration_counts() {
        // 2 generators -> 4 letters; reduced words of length n: 4 * 3^(n-1).
        assert_eq!(reduced_words_of_length(0, 1).len(), 1);
        assert_eq!(reduced_words_of_length(3, 1).len(), 36);
        assert!(reduced_words_of_length(3, 1).iter().all(Word::is_reduced));
        let all = reduced_words_up_to(3, 1);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
    }

    #[test]
    fn first_new_index_marks_exact_coding_suffix() {
        assert_eq!(w("a").first_new_index(), Some(0));
        assert_eq!(w("a.b").first_new_index(), Some(1));
        assert_eq!(w("b").first_new_index(), None);
    }
}
