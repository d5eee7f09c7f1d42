use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::PosetContext;
use crate::coding::{coding_length, walk, Terminal};
use crate::families::MemberRef;
use crate::perms::{psi_image, PartialInjection};
use crate::words::Word;

/// A condition `⟨s, F, m̄, s*⟩`.
///
/// `F` may contain words without `a` (subwords of coding words); only the
/// keys of `m̄` and `s*` have to lie in WS.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub s: PartialInjection,
    pub f: BTreeSet<Word>,
    pub m_bar: BTreeMap<Word, u64>,
    pub s_star: BTreeMap<Word, BTreeSet<MemberRef>>,
}

/// The first clause a condition violates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "clause")]
pub enum Violation {
    EmptyWordInF,
    UnreducedWord { word: Word },
    UnknownLetter { word: Word },
    NotSubwordClosed { word: Word, missing: Word },
    CodingWordNotInF { word: Word },
    CodingWordNotInWs { word: Word },
    ConstraintWordNotInF { word: Word },
    ConstraintWordNotInWs { word: Word },
    ConstraintNotEligible { word: Word, member: MemberRef, reason: String },
    NotExactlyCoding { word: Word },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyWordInF => write!(f, "words: F contains the empty word"),
            Violation::UnreducedWord { word } => write!(f, "words: {word} is not reduced"),
            Violation::UnknownLetter { word } => write!(f, "words: {word} uses an unknown ground letter"),
            Violation::NotSubwordClosed { word, missing } => {
                write!(f, "words: F is not subword closed ({missing} from {word} is missing)")
            }
            Violation::CodingWordNotInF { word } => write!(f, "coding parameters: {word} is not in F"),
            Violation::CodingWordNotInWs { word } => write!(f, "coding parameters: {word} is not in WS"),
            Violation::ConstraintWordNotInF { word } => write!(f, "constraints: {word} is not in F"),
            Violation::ConstraintWordNotInWs { word } => write!(f, "constraints: {word} is not in WS"),
            Violation::ConstraintNotEligible { word, member, reason } => {
                write!(f, "constraints: f({}, {}) on {word}: {reason}", member.m, member.xi)
            }
            Violation::NotExactlyCoding { word } => write!(f, "exact coding: {word} codes no prefix of z exactly"),
        }
    }
}

impl Condition {
    pub fn empty() -> Self {
        Self::default()
    }

    /// `|s|`, used as the size in reports.
    pub fn size(&self) -> usize {
        self.s.len()
    }

    /// Every attached constraint, across all words.
    pub fn attached(&self) -> BTreeSet<MemberRef> {
        self.s_star.values().flatten().copied().collect()
    }

    /// `l^p_w` for every coding word; `None` marks a word that codes nothing exactly.
    pub fn coding_lengths(&self, ctx: &PosetContext) -> BTreeMap<Word, Option<usize>> {
        self.m_bar
            .iter()
            .map(|(w, &m)| (w.clone(), coding_length(w, &ctx.rep, &self.s, m, ctx.z(w)).ok().flatten()))
            .collect()
    }

    pub fn coding_length(&self, w: &Word, ctx: &PosetContext) -> Option<usize> {
        let m = *self.m_bar.get(w)?;
        coding_length(w, &ctx.rep, &self.s, m, ctx.z(w)).ok().flatten()
    }

    /// Adds `w` and all its subwords to `F`.
    pub fn add_with_subwords(&mut self, w: &Word) {
        self.f.extend(w.subwords());
    }

    pub fn validate(&self, ctx: &PosetContext) -> Result<(), Violation> {
        for w in &self.f {
            if w.is_empty() {
                return Err(Violation::EmptyWordInF);
            }
            if !w.is_reduced() {
                return Err(Violation::UnreducedWord { word: w.clone() });
            }
            if ctx.rep.check_word(w).is_err() {
                return Err(Violation::UnknownLetter { word: w.clone() });
            }
            if let Some(missing) = w.subwords().into_iter().find(|u| !self.f.contains(u)) {
                return Err(Violation::NotSubwordClosed { word: w.clone(), missing });
            }
        }
        for w in self.m_bar.keys() {
            if !self.f.contains(w) {
                return Err(Violation::CodingWordNotInF { word: w.clone() });
            }
            if !w.in_ws() {
                return Err(Violation::CodingWordNotInWs { word: w.clone() });
            }
        }
        for (w, members) in &self.s_star {
            if !self.f.contains(w) {
                return Err(Violation::ConstraintWordNotInF { word: w.clone() });
            }
            if !w.in_ws() {
                return Err(Violation::ConstraintWordNotInWs { word: w.clone() });
            }
            let image = psi_image(w, &ctx.rep, &self.s, ctx.pairing).map_err(|_| Violation::UnknownLetter { word: w.clone() })?;
            for &member in members {
                let reason = if !image.contains(&member.m) {
                    Some("m is not in psi[w[s]]")
                } else if !ctx.y.contains(w, member.m, member.xi) {
                    Some("xi is not in Y^w_m")
                } else if !ctx.family.contains(member) {
                    Some("outside the family")
                } else {
                    None
                };
                if let Some(reason) = reason {
                    return Err(Violation::ConstraintNotEligible { word: w.clone(), member, reason: reason.into() });
                }
            }
        }
        for (w, l) in self.coding_lengths(ctx) {
            if l.is_none() {
                return Err(Violation::NotExactlyCoding { word: w });
            }
        }
        Ok(())
    }
}

/// Where each coding path currently stops. Paths that cycle are left out.
pub fn coding_terminals(p: &Condition, ctx: &PosetContext) -> Vec<(Word, Terminal)> {
    p.m_bar
        .iter()
        .filter_map(|(w, &m)| walk(w, &ctx.rep, &p.s, m).terminal.map(|t| (w.clone(), t)))
        .collect()
}
