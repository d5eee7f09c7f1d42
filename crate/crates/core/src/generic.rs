//! A fair scheduler that meets a finite battery of dense sets, producing a
//! finite approximation to the generic permutation together with a log from
//! which every intermediate condition can be rebuilt.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coding::{decode_bits, BitString};
use crate::families::MemberRef;
use crate::forcing::{
    add_constraint, extend_coding, extend_domain, extend_range, hit, leq_report, register_coding, register_word,
    untraced_fixed_points, Condition, ForcingError, PosetContext, SwapPairs, TotalMap,
};
use crate::perms::{apply_word, defined_domain, psi_image};
use crate::words::Word;

/// A hitting target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum Target {
    /// `2k ↔ 2k+1`.
    Swap,
    /// The family member `f_{m,ξ}`.
    Member { m: u64, xi: u64 },
}

impl Target {
    pub fn resolve(&self, ctx: &PosetContext) -> Result<Box<dyn TotalMap>, ForcingError> {
        Ok(match *self {
            Target::Swap => Box::new(SwapPairs),
            Target::Member { m, xi } => Box::new(ctx.family.member(MemberRef { m, xi })?),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HitTask {
    pub word: Word,
    pub target: Target,
    #[serde(default)]
    pub threshold: u64,
    #[serde(default = "one")]
    pub repetitions: usize,
}

fn one() -> usize {
    1
}

/// Attach `f_{m,ξ}` to `word`; without `m` the least eligible one is used.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintTask {
    pub word: Word,
    #[serde(default)]
    pub m: Option<u64>,
    pub xi: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskList {
    #[serde(default)]
    pub domain_up_to: u64,
    #[serde(default)]
    pub range_up_to: u64,
    /// Coding word and number of bits to code.
    #[serde(default)]
    pub coding: BTreeMap<Word, usize>,
    #[serde(default)]
    pub registrations: BTreeSet<Word>,
    #[serde(default)]
    pub hits: Vec<HitTask>,
    #[serde(default)]
    pub constraints: Vec<ConstraintTask>,
}

/// What a task established.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Witness {
    Point { n: u64 },
    Registered { word: Word, core: Word },
    Parameter { word: Word, m: u64 },
    Coding { word: Word, length: usize },
    Hit { word: Word, n: u64, value: u64 },
    Constraint { word: Word, m: u64, xi: u64 },
}

/// One line of the run log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskReport {
    pub seq: usize,
    pub task: String,
    pub lemma: String,
    pub size_before: usize,
    pub size_after: usize,
    pub added: Vec<(u64, u64)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub words_added: Vec<Word>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters_added: BTreeMap<Word, u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints_added: Vec<(Word, MemberRef)>,
    pub witness: Witness,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericApproximation {
    pub final_condition: Condition,
    pub log: Vec<TaskReport>,
    pub seed: u64,
}

impl GenericApproximation {
    /// The log as line-delimited JSON, one report per line.
    pub fn log_lines(&self) -> String {
        self.log.iter().map(|r| serde_json::to_string(r).expect("reports serialize") + "\n").collect()
    }
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("task {task} failed: {source}")]
    Task { task: String, source: ForcingError },
    #[error("constraint task {task} never became eligible")]
    NeverEligible { task: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Step {
    Register(Word),
    Domain(u64),
    Range(u64),
    CodeStart(Word),
    CodeBit(Word, usize),
    Hit(usize, usize),
    Constraint(usize),
}

impl Step {
    fn id(&self) -> String {
        match self {
            Step::Register(w) => format!("register:{w}"),
            Step::Domain(n) => format!("domain:{n}"),
            Step::Range(n) => format!("range:{n}"),
            Step::CodeStart(w) => format!("code:{w}:start"),
            Step::CodeBit(w, k) => format!("code:{w}:{k}"),
            Step::Hit(i, r) => format!("hit:{i}:{r}"),
            Step::Constraint(i) => format!("constraint:{i}"),
        }
    }
}

struct Builder<'a> {
    ctx: &'a PosetContext,
    tasks: &'a TaskList,
    p: Condition,
    log: Vec<TaskReport>,
    thresholds: Vec<u64>,
}

fn report(seq: usize, task: String, lemma: &str, before: &Condition, after: &Condition, witness: Witness) -> TaskReport {
    let words_added = after.f.difference(&before.f).cloned().collect();
    let parameters_added =
        after.m_bar.iter().filter(|(w, _)| !before.m_bar.contains_key(*w)).map(|(w, &m)| (w.clone(), m)).collect();
    let constraints_added = after
        .s_star
        .iter()
        .flat_map(|(w, ms)| ms.iter().map(move |&r| (w.clone(), r)))
        .filter(|(w, r)| !before.s_star.get(w).is_some_and(|ms| ms.contains(r)))
        .collect();
    TaskReport {
        seq,
        task,
        lemma: lemma.to_string(),
        size_before: before.size(),
        size_after: after.size(),
        added: after.s.difference(&before.s),
        words_added,
        parameters_added,
        constraints_added,
        witness,
    }
}

enum Outcome {
    Done(Condition, &'static str, Witness),
    Defer,
}

impl Builder<'_> {
    /// Runs `op`, first extending whichever coding path blocks it.
    fn unblocking(
        &self,
        mut p: Condition,
        op: impl Fn(&Condition) -> Result<Condition, ForcingError>,
    ) -> Result<Condition, ForcingError> {
        loop {
            match op(&p) {
                Err(ForcingError::CodingConflict { word, .. }) => p = extend_coding(&p, &word, self.ctx)?,
                other => return other,
            }
        }
    }

    fn run_step(&mut self, step: &Step) -> Result<Outcome, ForcingError> {
        let ctx = self.ctx;
        let p = &self.p;
        Ok(match step {
            Step::Register(w) => {
                let q = register_word(p, w, ctx)?;
                Outcome::Done(q, "fixed_points", Witness::Registered { word: w.clone(), core: w.conjugate_core().core })
            }
            Step::Domain(n) => {
                let q = self.unblocking(p.clone(), |c| extend_domain(c, *n, ctx))?;
                Outcome::Done(q, "domain", Witness::Point { n: *n })
            }
            Step::Range(n) => {
                let q = self.unblocking(p.clone(), |c| extend_range(c, *n, ctx))?;
                Outcome::Done(q, "range", Witness::Point { n: *n })
            }
            Step::CodeStart(w) => {
                let q = register_coding(p, w, ctx)?;
                let m = q.m_bar[w];
                Outcome::Done(q, "coding_start", Witness::Parameter { word: w.clone(), m })
            }
            Step::CodeBit(w, k) => {
                let mut q = p.clone();
                while q.coding_length(w, ctx).unwrap_or(0) < *k {
                    q = extend_coding(&q, w, ctx)?;
                }
                let length = q.coding_length(w, ctx).unwrap_or(0);
                Outcome::Done(q, "coding", Witness::Coding { word: w.clone(), length })
            }
            Step::Hit(i, _) => {
                let task = &self.tasks.hits[*i];
                let tau = task.target.resolve(ctx)?;
                let out = hit(p, &task.word, tau.as_ref(), self.thresholds[*i], ctx)?;
                self.thresholds[*i] = out.n + 1;
                let value = tau.apply(out.n);
                Outcome::Done(out.condition, "hit", Witness::Hit { word: task.word.clone(), n: out.n, value })
            }
            Step::Constraint(i) => {
                let task = &self.tasks.constraints[*i];
                let w = &task.word;
                let image = psi_image(w, &ctx.rep, &p.s, ctx.pairing)?;
                let attached = p.s_star.get(w);
                let m = match task.m {
                    Some(m) => image.contains(&m).then_some(m),
                    None => image.into_iter().find(|&m| {
                        let r = MemberRef { m, xi: task.xi };
                        ctx.y.contains(w, m, task.xi)
                            && ctx.family.contains(r)
                            && !attached.is_some_and(|ms| ms.contains(&r))
                    }),
                };
                match m {
                    Some(m) => {
                        let q = add_constraint(p, w, m, task.xi, ctx)?;
                        Outcome::Done(q, "constraint", Witness::Constraint { word: w.clone(), m, xi: task.xi })
                    }
                    None => Outcome::Defer,
                }
            }
        })
    }
}

/// Meets every task, starting from the empty condition.
///
/// Registrations run first; then the categories domain, range, coding, hit
/// and constraint take turns, one task each per round, each category in
/// ascending order. A constraint that is not yet eligible goes to the back
/// of its queue.
pub fn run_builder(ctx: &PosetContext, tasks: &TaskList, seed: u64) -> Result<GenericApproximation, BuildError> {
    let mut queues: Vec<VecDeque<Step>> = vec![VecDeque::new(); 5];
    queues[0].extend((0..tasks.domain_up_to).map(Step::Domain));
    queues[1].extend((0..tasks.range_up_to).map(Step::Range));
    for (w, &bits) in &tasks.coding {
        queues[2].push_back(Step::CodeStart(w.clone()));
        queues[2].extend((1..=bits).map(|k| Step::CodeBit(w.clone(), k)));
    }
    for (i, h) in tasks.hits.iter().enumerate() {
        queues[3].extend((0..h.repetitions).map(|r| Step::Hit(i, r)));
    }
    queues[4].extend((0..tasks.constraints.len()).map(Step::Constraint));

    let mut b = Builder {
        ctx,
        tasks,
        p: Condition::empty(),
        log: Vec::new(),
        thresholds: tasks.hits.iter().map(|h| h.threshold).collect(),
    };
    let mut pending: VecDeque<Step> = tasks.registrations.iter().cloned().map(Step::Register).collect();
    let mut stalled = 0usize;
    loop {
        let mut any = false;
        let mut round: Vec<Step> = pending.drain(..).collect();
        if round.is_empty() {
            round = queues.iter_mut().filter_map(|q| q.pop_front()).collect();
        }
        for step in round {
            any = true;
            let id = step.id();
            match b.run_step(&step).map_err(|source| BuildError::Task { task: id.clone(), source })? {
                Outcome::Done(q, lemma, witness) => {
                    stalled = 0;
                    let r = report(b.log.len(), id, lemma, &b.p, &q, witness);
                    b.log.push(r);
                    b.p = q;
                }
                Outcome::Defer => {
                    stalled += 1;
                    let others_left = queues[..4].iter().any(|q| !q.is_empty());
                    if !others_left && stalled > queues[4].len() + 1 {
                        return Err(BuildError::NeverEligible { task: id });
                    }
                    queues[4].push_back(step);
                }
            }
        }
        if !any {
            break;
        }
    }
    Ok(GenericApproximation { final_condition: b.p, log: b.log, seed })
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReplayError {
    #[error("record {seq}: {reason}")]
    Record { seq: usize, reason: String },
}

/// Rebuilds every intermediate condition from the log, starting empty.
/// The result has one more entry than the log.
pub fn replay(log: &[TaskReport]) -> Result<Vec<Condition>, ReplayError> {
    let mut stages = vec![Condition::empty()];
    for (i, r) in log.iter().enumerate() {
        let fail = |reason: String| ReplayError::Record { seq: i, reason };
        if r.seq != i {
            return Err(fail(format!("sequence number {} out of place", r.seq)));
        }
        let mut p = stages.last().expect("nonempty").clone();
        if p.size() != r.size_before {
            return Err(fail(format!("size before is {}, log says {}", p.size(), r.size_before)));
        }
        for &(n, v) in &r.added {
            p.s.insert(n, v).map_err(|e| fail(e.to_string()))?;
        }
        p.f.extend(r.words_added.iter().cloned());
        for (w, &m) in &r.parameters_added {
            if p.m_bar.insert(w.clone(), m).is_some() {
                return Err(fail(format!("parameter of {w} set twice")));
            }
        }
        for (w, member) in &r.constraints_added {
            p.s_star.entry(w.clone()).or_default().insert(*member);
        }
        if p.size() != r.size_after {
            return Err(fail(format!("size after is {}, log says {}", p.size(), r.size_after)));
        }
        stages.push(p);
    }
    Ok(stages)
}

/// Parses a line-delimited log.
pub fn parse_log(text: &str) -> Result<Vec<TaskReport>, ReplayError> {
    text.lines()
        .enumerate()
        .map(|(i, line)| {
            serde_json::from_str(line).map_err(|e| ReplayError::Record { seq: i, reason: e.to_string() })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    fn push(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), ok, detail: detail.into() });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.ok).collect()
    }
}

impl std::fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}: {}", if c.ok { "ok  " } else { "FAIL" }, c.name, c.detail)?;
        }
        Ok(())
    }
}

/// Decoded bits for each coding word, up to its exact coding length.
pub fn decoded(p: &Condition, ctx: &PosetContext) -> BTreeMap<Word, BitString> {
    p.m_bar
        .iter()
        .map(|(w, &m)| {
            let l = p.coding_length(w, ctx).unwrap_or(0);
            (w.clone(), decode_bits(w, &ctx.rep, &p.s, m, l).unwrap_or_default())
        })
        .collect()
}

/// Re-checks a run against its tasks: replay, validity, monotonicity and
/// finite proxies of the four properties of the generic permutation.
pub fn verify_generic(approx: &GenericApproximation, ctx: &PosetContext, tasks: &TaskList) -> VerificationReport {
    let mut rep = VerificationReport::default();
    let fin = &approx.final_condition;
    let stages = match replay(&approx.log) {
        Ok(stages) => stages,
        Err(e) => {
            rep.push("replay", false, e.to_string());
            return rep;
        }
    };
    let last = stages.last().expect("nonempty");
    rep.push("replay", last == fin, format!("{} records", approx.log.len()));
    if let Err(v) = fin.validate(ctx) {
        rep.push("valid", false, v.to_string());
        return rep;
    }
    rep.push("valid", true, format!("|s| = {}, |F| = {}", fin.s.len(), fin.f.len()));

    let mut steps_ok = Ok(());
    for (k, pair) in stages.windows(2).enumerate() {
        if let Err(e) = leq_report(&pair[1], &pair[0], ctx) {
            steps_ok = Err(format!("record {k}: {e:?}"));
            break;
        }
        if let Err(e) = leq_report(fin, &pair[0], ctx) {
            steps_ok = Err(format!("final vs stage {k}: {e:?}"));
            break;
        }
    }
    rep.push("monotone", steps_ok.is_ok(), steps_ok.err().unwrap_or_else(|| "every stage extends the previous".into()));

    let dom_ok = (0..tasks.domain_up_to).all(|n| fin.s.in_domain(n));
    let ran_ok = (0..tasks.range_up_to).all(|n| fin.s.in_range(n));
    rep.push("windows", dom_ok && ran_ok, format!("domain ⊇ [0, {}), range ⊇ [0, {})", tasks.domain_up_to, tasks.range_up_to));

    // (A) no fixed points beyond those present when the word was registered
    for r in &approx.log {
        let (word, core) = match &r.witness {
            Witness::Registered { word, core } => (word, core.clone()),
            Witness::Parameter { word, .. } => (word, word.clone()),
            _ => continue,
        };
        let at = &stages[r.seq + 1];
        let bad = untraced_fixed_points(&core, &ctx.rep, &fin.s, &at.s);
        rep.push(format!("fixed_points:{word}"), bad.is_empty(), format!("untraced {bad:?}"));
    }

    // (B) hits
    for (i, h) in tasks.hits.iter().enumerate() {
        let detail;
        let ok = match h.target.resolve(ctx) {
            Ok(tau) => {
                let agree: Vec<u64> = defined_domain(&h.word, &ctx.rep, &fin.s)
                    .unwrap_or_default()
                    .into_iter()
                    .filter(|&n| n >= h.threshold && apply_word(&h.word, &ctx.rep, &fin.s, n) == Some(tau.apply(n)))
                    .collect();
                detail = format!("{} agreements at or above {} (wanted {})", agree.len(), h.threshold, h.repetitions);
                agree.len() >= h.repetitions
            }
            Err(e) => {
                detail = e.to_string();
                false
            }
        };
        rep.push(format!("hit:{i}"), ok, detail);
    }

    // (C) coding
    let got = decoded(fin, ctx);
    for (w, &bits) in &tasks.coding {
        let want = ctx.z(w).prefix(bits);
        let have = got.get(w).cloned().unwrap_or_default();
        let ok = want.is_prefix_of(&have);
        rep.push(format!("decode:{w}"), ok, format!("requested {want}, decoded {have}"));
    }

    // (D) no pair added after an attachment lies on the attached graph
    for r in &approx.log {
        for (w, member) in &r.constraints_added {
            let at = &stages[r.seq + 1];
            let hits = match ctx.family.member(*member) {
                Ok(f) => fin.s.difference(&at.s).into_iter().filter(|&(n, v)| f.apply(n) == v).count(),
                Err(_) => usize::MAX,
            };
            rep.push(format!("constraint:{w}:{}:{}", member.m, member.xi), hits == 0, format!("{hits} later pairs on the graph"));
        }
    }
    rep
}
