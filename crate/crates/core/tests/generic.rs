use std::collections::BTreeMap;

use cofinitary::coding::{decode_bits, ZSet};
use cofinitary::families::{build_family, ConstraintSets};
use cofinitary::forcing::{leq, PosetContext};
use cofinitary::generic::{
    parse_log, replay, run_builder, verify_generic, BuildError, ConstraintTask, GenericApproximation, HitTask, Target,
    TaskList, Witness,
};
use cofinitary::perms::GroundRepresentation;
use cofinitary::words::Word;

fn w(text: &str) -> Word {
    text.parse().unwrap()
}

fn ctx() -> PosetContext {
    let mut ctx = PosetContext::new(GroundRepresentation::single_zshift(), build_family(0, 1000, 4, 0).unwrap());
    ctx.y = ConstraintSets::with_default(0..4);
    ctx
}

fn mixed() -> (PosetContext, TaskList) {
    let mut ctx = ctx();
    ctx.z.insert(Word::a(), ZSet::Bits("10110010".parse().unwrap()));
    ctx.z.insert(w("b.a"), ZSet::Bits("0110".parse().unwrap()));
    let tasks = TaskList {
        domain_up_to: 20,
        range_up_to: 20,
        coding: BTreeMap::from([(Word::a(), 8), (w("b.a"), 4)]),
        registrations: [w("a.a"), w("b^-1.a.b.a")].into(),
        hits: vec![HitTask { word: Word::a(), target: Target::Swap, threshold: 30, repetitions: 4 }],
        constraints: vec![ConstraintTask { word: Word::a(), m: None, xi: 2 }],
    };
    (ctx, tasks)
}

#[test]
fn domain_tasks_make_s_total_on_the_window() {
    let ctx = ctx();
    let tasks = TaskList { domain_up_to: 5, ..TaskList::default() };
    let approx = run_builder(&ctx, &tasks, 0).unwrap();
    assert!((0..5).all(|n| approx.final_condition.s.in_domain(n)));
    assert_eq!(approx.log.len(), 5);
}

#[test]
fn coding_task_round_trips() {
    let mut ctx = ctx();
    ctx.z.insert(Word::a(), ZSet::Bits("10110010".parse().unwrap()));
    let tasks = TaskList { coding: BTreeMap::from([(Word::a(), 8)]), ..TaskList::default() };
    let approx = run_builder(&ctx, &tasks, 0).unwrap();
    let fin = &approx.final_condition;
    let got = decode_bits(&Word::a(), &ctx.rep, &fin.s, fin.m_bar[&Word::a()], 8).unwrap();
    assert_eq!(got.to_string(), "10110010");
}

#[test]
fn identical_inputs_give_identical_logs() {
    let (ctx, tasks) = mixed();
    let x = run_builder(&ctx, &tasks, 7).unwrap();
    let y = run_builder(&ctx, &tasks, 7).unwrap();
    assert_eq!(x.log_lines(), y.log_lines());
    assert_eq!(x, y);
}

#[test]
fn a_mixed_run_verifies_and_replays() {
    let (ctx, tasks) = mixed();
    let approx = run_builder(&ctx, &tasks, 0).unwrap();
    let report = verify_generic(&approx, &ctx, &tasks);
    assert!(report.passed(), "{report}");
    let stages = replay(&approx.log).unwrap();
    assert_eq!(stages.last().unwrap(), &approx.final_condition);
    for pair in stages.windows(2) {
        assert!(leq(&pair[1], &pair[0], &ctx));
    }
    assert_eq!(parse_log(&approx.log_lines()).unwrap(), approx.log);
    assert!(approx.log.iter().any(|r| matches!(r.witness, Witness::Constraint { xi: 2, .. })));
    assert_eq!(approx.log.iter().filter(|r| matches!(r.witness, Witness::Hit { .. })).count(), 4);
}

#[test]
fn a_mutated_pair_fails_replay() {
    let (ctx, tasks) = mixed();
    let mut approx = run_builder(&ctx, &tasks, 0).unwrap();
    let r = approx.log.iter_mut().find(|r| !r.added.is_empty()).unwrap();
    r.added[0].1 += 1000;
    let report = verify_generic(&approx, &ctx, &tasks);
    assert!(!report.passed());
    assert_eq!(report.failures()[0].name, "replay");
}

#[test]
fn an_empty_approximation_passes_vacuously() {
    let approx = GenericApproximation { final_condition: Default::default(), log: Vec::new(), seed: 0 };
    assert!(verify_generic(&approx, &ctx(), &TaskList::default()).passed());
}

#[test]
fn a_constraint_on_an_unmentioned_word_never_becomes_eligible() {
    let ctx = ctx();
    let tasks = TaskList {
        constraints: vec![ConstraintTask { word: Word::a(), m: Some(5), xi: 0 }],
        ..TaskList::default()
    };
    assert!(matches!(run_builder(&ctx, &tasks, 0), Err(BuildError::NeverEligible { .. })));
}

#[test]
fn task_lists_reject_unknown_keys() {
    let err = toml::from_str::<TaskList>("domain_up_to = 3\nbogus = 1\n").unwrap_err();
    assert!(err.to_string().contains("bogus"));
    let tasks: TaskList = toml::from_str(
        "domain_up_to = 3\n[coding]\n\"b.a\" = 2\n[[hits]]\nword = \"a\"\ntarget = { kind = \"member\", m = 1, xi = 0 }\n",
    )
    .unwrap();
    assert_eq!(tasks.coding[&w("b.a")], 2);
    assert_eq!(tasks.hits[0].repetitions, 1);
}
