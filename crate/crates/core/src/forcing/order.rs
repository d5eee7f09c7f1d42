
use serde::{Deserialize, Serialize};

use super::{Condition, PosetContext};
use crate::families::MemberRef;
use crate::perms::{apply_letters, fixed_points, GroundRepresentation, PartialInjection};
use crate::words::Word;

/// The clause of `q ≤ p` that fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "clause")]
pub enum LeqFailure {
    /// `s^q` does not contain `s^p`.
    InjectionShrinks,
    /// `F^q` does not contain `F^p`.
    WordsShrink,
    /// A fixed point of `w[s^q]` with no subword witness under `s^p`.
    NewFixedPoint { word: Word, point: u64 },
    /// `s^{q,*}` does not contain `s^{p,*}`.
    ConstraintsShrink,
    /// A new pair lies on the graph of a constraint attached in `p`.
    ConstraintHit { member: MemberRef, pair: (u64, u64) },
    /// `m̄^q` does not extend `m̄^p`.
    ParametersChange { word: Word },
}

/// Fixed points of `w[s_new]` that do not trace back to a fixed point of a
/// subword under `s_old`.
///
/// A fixed point `m` is traced when some nonempty subword `w'`, with
/// `w = w1 · w' · w0`, fixes the path value reached after `w0` already under
/// `s_old`.
pub fn untraced_fixed_points(
    w: &Word,
    rep: &GroundRepresentation,
    s_new: &PartialInjection,
    s_old: &PartialInjection,
) -> Vec<u64> {
    // a ground word fixes exactly the same points under both, with w' = w
    if !w.contains_new() {
        return Vec::new();
    }
    let letters = w.letters();
    let Ok(points) = fixed_points(w, rep, s_new, 0) else {
        return Vec::new();
    };
    points
        .into_iter()
        .filter(|&m| {
            let mut path = vec![m];
            for (i, &l) in letters.iter().enumerate() {
                let next = apply_letters(&[l], rep, s_new, path[i]).expect("fixed point path is defined");
                path.push(next);
            }
            let traced = (0..letters.len()).any(|i| {
                (i + 1..=letters.len())
                    .any(|j| apply_letters(&letters[i..j], rep, s_old, path[i]) == Some(path[i]))
            });
            !traced
        })
        .collect()
}

/// Checks `q ≤ p` clause by clause.
///
/// Parameters are compared by extension: `m̄^q` must contain `m̄^p`.
pub fn leq_report(q: &Condition, p: &Condition, ctx: &PosetContext) -> Result<(), LeqFailure> {
    if !p.s.is_subset_of(&q.s) {
        return Err(LeqFailure::InjectionShrinks);
    }
    if !p.f.is_subset(&q.f) {
        return Err(LeqFailure::WordsShrink);
    }
    if q.s != p.s {
        for w in &p.f {
            if let Some(&point) = untraced_fixed_points(w, &ctx.rep, &q.s, &p.s).first() {
                return Err(LeqFailure::NewFixedPoint { word: w.clone(), point });
            }
        }
    }
    for (w, members) in &p.s_star {
        match q.s_star.get(w) {
            Some(have) if members.is_subset(have) => {}
            _ => return Err(LeqFailure::ConstraintsShrink),
        }
    }
    let added = q.s.difference(&p.s);
    if !added.is_empty() {
        for member in p.attached() {
            let f = ctx.family.member(member).map_err(|_| LeqFailure::ConstraintsShrink)?;
            if let Some(&pair) = added.iter().find(|&&(n, v)| f.apply(n) == v) {
                return Err(LeqFailure::ConstraintHit { member, pair });
            }
        }
    }
    for (w, m) in &p.m_bar {
        if q.m_bar.get(w) != Some(m) {
            return Err(LeqFailure::ParametersChange { word: w.clone() });
        }
    }
    Ok(())
}

pub fn leq(q: &Condition, p: &Condition, ctx: &PosetContext) -> bool {
    leq_report(q, p, ctx).is_ok()
}

/// The common lower bound of two conditions with the same `s` whose coding
/// parameters agree; `None` when that rule does not apply.
pub fn merge(p: &Condition, q: &Condition) -> Option<Condition> {
    if p.s != q.s {
        return None;
    }
    if p.m_bar.iter().any(|(w, m)| q.m_bar.get(w).is_some_and(|other| other != m)) {
        return None;
    }
    let mut r = p.clone();
    r.f.extend(q.f.iter().cloned());
    r.m_bar.extend(q.m_bar.iter().map(|(w, &m)| (w.clone(), m)));
    for (w, members) in &q.s_star {
        r.s_star.entry(w.clone()).or_default().extend(members.iter().copied());
    }
    Some(r)
}
