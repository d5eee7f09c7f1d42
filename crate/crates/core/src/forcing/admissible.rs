//! The value filter shared by all extension algorithms.
//!
//! A fresh value `x` about to enter `s` must keep the new pair away from
//! everything the condition already mentions. With `U` the nonempty subwords
//! of words in `F` and of circular shifts of their cyclic reductions, and `G`
//! the ground words in `U`, the value is rejected when
//!
//! * `x` is a fixed point of some `u[s]`, `u ∈ U`;
//! * two different elements of `G ∪ {∅}` agree at `x`;
//! * `u^{±1}[s](g(x))` lands in `E` for some `u ∈ U ∪ {∅}` and `g` a quotient
//!   `g0^-1 g1` of elements of `G ∪ {∅}`, where `E` is `dom(s) ∪ ran(s) ∪
//!   ran(m̄)` together with the points the current extension has visited.

use std::collections::BTreeSet;

use super::{Condition, ForcingError, PosetContext};
use crate::perms::{apply_letters, PartialInjection};
use crate::words::{Letter, Word};

pub(crate) struct Filter<'a> {
    ctx: &'a PosetContext,
    /// `U` together with inverses and the empty word.
    images: Vec<Vec<Letter>>,
    /// Words of `U` containing `a`; ground ones are handled by `quotients`.
    fixers: Vec<Vec<Letter>>,
    /// `g0^-1 g1` for `g0, g1 ∈ G ∪ {∅}`, the empty word included.
    quotients: Vec<Vec<Letter>>,
    m_bar_values: BTreeSet<u64>,
}

impl<'a> Filter<'a> {
    pub(crate) fn new(ctx: &'a PosetContext, p: &Condition) -> Self {
        let mut closure: BTreeSet<Word> = BTreeSet::new();
        for w in &p.f {
            closure.extend(w.subwords());
            for shift in w.cyclic_reduction().circular_shifts() {
                closure.extend(shift.subwords());
            }
        }
        let mut images: BTreeSet<Word> = BTreeSet::from([Word::empty()]);
        for u in &closure {
            images.insert(u.clone());
            images.insert(u.inverse());
        }
        let fixers = closure.iter().filter(|u| u.contains_new()).map(|u| u.letters().to_vec()).collect();
        let ground: Vec<Word> =
            std::iter::once(Word::empty()).chain(closure.iter().filter(|u| u.is_ground()).cloned()).collect();
        let mut quotients: BTreeSet<Word> = BTreeSet::new();
        for g0 in &ground {
            for g1 in &ground {
                quotients.insert(g0.inverse().after(g1));
            }
        }
        Filter {
            ctx,
            images: images.into_iter().map(|u| u.letters().to_vec()).collect(),
            fixers,
            quotients: quotients.into_iter().map(|g| g.letters().to_vec()).collect(),
            m_bar_values: p.m_bar.values().copied().collect(),
        }
    }

    fn in_e(&self, s: &PartialInjection, visited: &BTreeSet<u64>, v: u64) -> bool {
        s.in_domain(v) || s.in_range(v) || self.m_bar_values.contains(&v) || visited.contains(&v)
    }

    pub(crate) fn admits(&self, s: &PartialInjection, visited: &BTreeSet<u64>, x: u64) -> bool {
        let rep = &self.ctx.rep;
        for g in &self.quotients {
            let gx = apply_letters(g, rep, s, x).expect("ground words are total");
            if !g.is_empty() && gx == x {
                return false;
            }
            for u in &self.images {
                if apply_letters(u, rep, s, gx).is_some_and(|v| self.in_e(s, visited, v)) {
                    return false;
                }
            }
        }
        !self.fixers.iter().any(|u| apply_letters(u, rep, s, x) == Some(x))
    }

    /// The least `x` passing the filter and `extra`.
    pub(crate) fn least(
        &self,
        s: &PartialInjection,
        visited: &BTreeSet<u64>,
        mut extra: impl FnMut(u64) -> bool,
    ) -> Result<u64, ForcingError> {
        let limit = self.ctx.search_limit;
        (0..limit)
            .find(|&x| extra(x) && self.admits(s, visited, x))
            .ok_or(ForcingError::NoAdmissibleValue { limit })
    }
}
