use std::collections::{BTreeMap, BTreeSet};

use super::admissible::Filter;
use super::{coding_terminals, Condition, ForcingError, PosetContext, TotalMap};
use crate::coding::{exactly_codes, s_value, walk, BitString};
use crate::families::{FamilyMember, MemberRef};
use crate::perms::{apply_letters, apply_word, defined_domain, psi_image, step, PartialInjection};
use crate::words::{reduced_words_up_to, Letter, Word};

fn members(p: &Condition, ctx: &PosetContext) -> Result<Vec<FamilyMember>, ForcingError> {
    p.attached().into_iter().map(|r| ctx.family.member(r).map_err(ForcingError::from)).collect()
}

/// The pair that makes `letter` defined at `v` with value `x`.
fn pair_for(letter: Letter, v: u64, x: u64) -> (u64, u64) {
    if letter.inverse {
        (x, v)
    } else {
        (v, x)
    }
}

fn off_graphs(fs: &[FamilyMember], (n, v): (u64, u64)) -> bool {
    fs.iter().all(|f| f.apply(n) != v)
}

fn check_letters(p: &Condition, w: &Word, ctx: &PosetContext) -> Result<(), ForcingError> {
    ctx.rep.check_word(w)?;
    p.f.iter().try_for_each(|u| ctx.rep.check_word(u)).map_err(ForcingError::from)
}

fn extend_one_side(p: &Condition, n: u64, letter: Letter, ctx: &PosetContext) -> Result<Condition, ForcingError> {
    let present = if letter.inverse { p.s.in_range(n) } else { p.s.in_domain(n) };
    if present {
        return Ok(p.clone());
    }
    if let Some((word, t)) = coding_terminals(p, ctx).into_iter().find(|(_, t)| t.value == n && t.next_letter == letter) {
        return Err(ForcingError::CodingConflict { word, point: t.value, letter });
    }
    let fs = members(p, ctx)?;
    let filter = Filter::new(ctx, p);
    let visited = BTreeSet::from([n]);
    let x = filter.least(&p.s, &visited, |x| off_graphs(&fs, pair_for(letter, n, x)))?;
    let mut q = p.clone();
    let (a, b) = pair_for(letter, n, x);
    q.s.insert(a, b).expect("filter keeps the pair injective");
    Ok(q)
}

/// An extension with `n ∈ dom(s)`.
///
/// Fails with [`ForcingError::CodingConflict`] when `n` is where a coding
/// path waits for its next `a`; that case is handled by [`extend_coding`].
pub fn extend_domain(p: &Condition, n: u64, ctx: &PosetContext) -> Result<Condition, ForcingError> {
    extend_one_side(p, n, Letter::A, ctx)
}

/// An extension with `n ∈ ran(s)`.
pub fn extend_range(p: &Condition, n: u64, ctx: &PosetContext) -> Result<Condition, ForcingError> {
    extend_one_side(p, n, Letter::A_INV, ctx)
}

/// Adds the cyclically reduced core of `w` and its subwords to `F`, which
/// bounds the fixed points of `w` in every further extension.
pub fn register_word(p: &Condition, w: &Word, ctx: &PosetContext) -> Result<Condition, ForcingError> {
    if !w.in_wd() {
        return Err(ForcingError::NotInWd(w.clone()));
    }
    ctx.rep.check_word(w)?;
    let mut q = p.clone();
    q.add_with_subwords(&w.conjugate_core().core);
    Ok(q)
}

fn require_ws(w: &Word) -> Result<(), ForcingError> {
    match (w.in_wd(), w.in_ws()) {
        (false, _) => Err(ForcingError::NotInWd(w.clone())),
        (true, false) => Err(ForcingError::NotInWs(w.clone())),
        _ => Ok(()),
    }
}

/// Starts coding `z^w`: picks the least parameter beyond every number the
/// condition mentions at which `(w, s)` exactly codes the empty string.
pub fn register_coding(p: &Condition, w: &Word, ctx: &PosetContext) -> Result<Condition, ForcingError> {
    require_ws(w)?;
    check_letters(p, w, ctx)?;
    if p.m_bar.contains_key(w) {
        return Ok(p.clone());
    }
    let start = p.s.coordinate_bound().max(p.m_bar.values().max().map_or(0, |&m| m + 1));
    let empty = BitString::new();
    let mut m = start;
    while !exactly_codes(w, &ctx.rep, &p.s, m, &empty)? {
        m += 1;
        if m >= ctx.search_limit {
            return Err(ForcingError::NoAdmissibleValue { limit: ctx.search_limit });
        }
    }
    let mut q = p.clone();
    q.add_with_subwords(w);
    q.m_bar.insert(w.clone(), m);
    Ok(q)
}

/// One coding path about to be extended by one full block of `S(w)·lh(w)`
/// letters.
struct Branch {
    word: Word,
    letters: Vec<Letter>,
    value: u64,
    /// Depth of the `a`-step whose value fixes the parity at the checkpoint.
    critical: usize,
    /// Ground letters between that step and the checkpoint.
    tail: Vec<Letter>,
    bit: bool,
}

/// Extends the coding of `z^w` by one bit, together with every other coding
/// word whose path waits at the same point for the same letter.
///
/// The paths are grown along the tree of their common prefixes; each new
/// value is the least one passing the shared filter, the constraint graphs
/// and, at a critical step, the parity required by the next bit.
pub fn extend_coding(p: &Condition, w: &Word, ctx: &PosetContext) -> Result<Condition, ForcingError> {
    require_ws(w)?;
    let &m = p.m_bar.get(w).ok_or_else(|| ForcingError::NotCoding(w.clone()))?;
    check_letters(p, w, ctx)?;
    let before = p.coding_lengths(ctx);
    if let Some((word, _)) = before.iter().find(|(_, l)| l.is_none()) {
        return Err(ForcingError::Invalid(super::Violation::NotExactlyCoding { word: word.clone() }));
    }
    let start = walk(w, &ctx.rep, &p.s, m).terminal.ok_or_else(|| ForcingError::CyclicCodingPath(w.clone()))?;

    let mut branches = Vec::new();
    for (word, t) in coding_terminals(p, ctx) {
        if t.value != start.value || t.next_letter != start.next_letter {
            continue;
        }
        let l = before[&word].expect("checked above");
        let len = word.len();
        let j = word.first_new_index().expect("coding words contain a");
        let block = s_value(&word)? as usize * len;
        let letters: Vec<Letter> = (0..block).map(|t| word.letters()[(j + t) % len]).collect();
        let checkpoint = block - j;
        let critical = (0..checkpoint).rev().find(|&d| letters[d].is_new()).expect("block starts with a");
        let tail = letters[critical + 1..checkpoint].to_vec();
        let bit = ctx.z(&word).bit(l);
        branches.push(Branch { word, letters, value: start.value, critical, tail, bit });
    }

    let fs = members(p, ctx)?;
    let filter = Filter::new(ctx, p);
    let mut s = p.s.clone();
    let mut visited = BTreeSet::from([start.value]);
    let depth = branches.iter().map(|b| b.letters.len()).max().unwrap_or(0);
    for d in 0..depth {
        let mut groups: BTreeMap<(u64, Letter), Vec<usize>> = BTreeMap::new();
        for (i, b) in branches.iter().enumerate() {
            if d < b.letters.len() {
                groups.entry((b.value, b.letters[d])).or_default().push(i);
            }
        }
        for ((v, letter), idx) in groups {
            let next = match step(letter, &ctx.rep, &s, v) {
                Some(next) => next,
                None => {
                    let pinned: Vec<&Branch> = idx.iter().map(|&i| &branches[i]).filter(|b| b.critical == d).collect();
                    if pinned.len() > 1 {
                        return Err(ForcingError::ParityConflict {
                            point: v,
                            words: pinned.iter().map(|b| b.word.clone()).collect(),
                        });
                    }
                    let parity = pinned.first().map(|b| (b.tail.clone(), b.bit));
                    visited.insert(v);
                    let x = filter.least(&s, &visited, |x| {
                        off_graphs(&fs, pair_for(letter, v, x))
                            && parity.as_ref().is_none_or(|(tail, bit)| {
                                let end = apply_letters(tail, &ctx.rep, &s, x).expect("tail is ground");
                                (end % 2 == 1) == *bit
                            })
                    })?;
                    let (a, b) = pair_for(letter, v, x);
                    s.insert(a, b).expect("filter keeps the pair injective");
                    x
                }
            };
            visited.insert(next);
            for i in idx {
                branches[i].value = next;
            }
        }
    }

    let mut q = p.clone();
    q.s = s;
    let grown: BTreeSet<&Word> = branches.iter().map(|b| &b.word).collect();
    for (word, l) in q.coding_lengths(ctx) {
        let old = before[&word].expect("checked above");
        let want = if grown.contains(&word) { old + 1 } else { old };
        if l != Some(want) {
            return Err(ForcingError::ExtensionFailed(format!("{word} codes {l:?} bits exactly, expected {want}")));
        }
    }
    Ok(q)
}

/// Attaches `f_{m,ξ}` to `w`, so that no later pair of `s` lies on its graph.
pub fn add_constraint(p: &Condition, w: &Word, m: u64, xi: u64, ctx: &PosetContext) -> Result<Condition, ForcingError> {
    require_ws(w)?;
    check_letters(p, w, ctx)?;
    let member = MemberRef { m, xi };
    let fail = |reason: &str| ForcingError::IndexNotEligible { word: w.clone(), member, reason: reason.into() };
    if !psi_image(w, &ctx.rep, &p.s, ctx.pairing)?.contains(&m) {
        return Err(fail("m is not in psi[w[s]]"));
    }
    if !ctx.y.contains(w, m, xi) {
        return Err(fail("xi is not in Y^w_m"));
    }
    if !ctx.family.contains(member) {
        return Err(fail("outside the family"));
    }
    let mut q = p.clone();
    q.add_with_subwords(w);
    q.s_star.entry(w.clone()).or_default().insert(member);
    Ok(q)
}

/// A condition in the hitting set together with its witness `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HitOutcome {
    pub condition: Condition,
    pub n: u64,
    /// True when `p` already had a witness and was returned unchanged.
    pub reused: bool,
}

/// Windowed checks that `τ` is outside the ground group, cofinitary over it
/// and not covered by the constraints attached in `p`.
pub fn hit_preconditions(p: &Condition, tau: &dyn TotalMap, ctx: &PosetContext) -> Result<(), ForcingError> {
    let rep = &ctx.rep;
    let none = PartialInjection::new();
    let window = ctx.window;
    let ground: Vec<Word> =
        reduced_words_up_to(2, rep.len() as u32).into_iter().filter(|g| !g.contains_new()).collect();
    for g in &ground {
        if (0..window).all(|n| apply_word(g, rep, &none, n) == Some(tau.apply(n))) {
            return Err(ForcingError::HitPrecondition(format!("agrees with the ground word {g} on [0, {window})")));
        }
    }
    let cap = (window / 10).max(4) as usize;
    for g in ground.iter().filter(|g| g.len() <= 1) {
        let fixed = (0..window).filter(|&n| apply_word(g, rep, &none, tau.apply(n)) == Some(n)).count();
        if fixed >= cap {
            return Err(ForcingError::HitPrecondition(format!("{g}·tau has {fixed} fixed points below {window}")));
        }
    }
    let fs = members(p, ctx)?;
    let free = (0..window).filter(|&n| fs.iter().all(|f| f.apply(n) != tau.apply(n))).count() as u64;
    if 2 * free < window {
        return Err(ForcingError::HitPrecondition(format!("covered by attached constraints on {free} of {window} points")));
    }
    Ok(())
}

/// An extension with `w[s](n) = τ(n)` for some `n ≥ threshold`.
///
/// The least suitable `n` is used; the path of `n` through `w` is filled
/// letter by letter with filtered values, the last `a`-step landing where the
/// remaining ground letters carry it to `τ(n)`.
pub fn hit(
    p: &Condition,
    w: &Word,
    tau: &dyn TotalMap,
    threshold: u64,
    ctx: &PosetContext,
) -> Result<HitOutcome, ForcingError> {
    require_ws(w)?;
    check_letters(p, w, ctx)?;
    let rep = &ctx.rep;
    if let Some(n) = defined_domain(w, rep, &p.s)?
        .into_iter()
        .find(|&n| n >= threshold && apply_word(w, rep, &p.s, n) == Some(tau.apply(n)))
    {
        return Ok(HitOutcome { condition: p.clone(), n, reused: true });
    }
    hit_preconditions(p, tau, ctx)?;
    let before = p.coding_lengths(ctx);
    let fs = members(p, ctx)?;
    let filter = Filter::new(ctx, p);
    let letters = w.letters();
    let last_new = letters.iter().rposition(|l| l.is_new()).expect("w contains a");
    let tail_inverse = Word::literal(letters[last_new + 1..].to_vec()).inverse();

    for n in threshold..ctx.search_limit {
        let target = tau.apply(n);
        if fs.iter().any(|f| f.apply(n) == target) {
            continue;
        }
        let Some(q) = fill_hit_path(p, letters, last_new, &tail_inverse, n, target, &filter, &fs, ctx) else {
            continue;
        };
        if q.coding_lengths(ctx) != before {
            continue;
        }
        return Ok(HitOutcome { condition: q, n, reused: false });
    }
    Err(ForcingError::NoAdmissibleValue { limit: ctx.search_limit })
}

#[allow(clippy::too_many_arguments)]
fn fill_hit_path(
    p: &Condition,
    letters: &[Letter],
    last_new: usize,
    tail_inverse: &Word,
    n: u64,
    target: u64,
    filter: &Filter<'_>,
    fs: &[FamilyMember],
    ctx: &PosetContext,
) -> Option<Condition> {
    let rep = &ctx.rep;
    let mut s = p.s.clone();
    let mut visited = BTreeSet::from([n]);
    let mut v = n;
    for (i, &letter) in letters.iter().enumerate() {
        if let Some(next) = step(letter, rep, &s, v) {
            v = next;
            visited.insert(v);
            continue;
        }
        visited.insert(v);
        let x = if i == last_new {
            let x = apply_word(tail_inverse, rep, &s, target).expect("tail is ground");
            let ok = off_graphs(fs, pair_for(letter, v, x)) && filter.admits(&s, &visited, x);
            if !ok {
                return None;
            }
            x
        } else {
            filter.least(&s, &visited, |x| off_graphs(fs, pair_for(letter, v, x))).ok()?
        };
        let (a, b) = pair_for(letter, v, x);
        s.insert(a, b).ok()?;
        v = x;
        visited.insert(v);
    }
    if v != target {
        return None;
    }
    let mut q = p.clone();
    q.s = s;
    Some(q)
}
