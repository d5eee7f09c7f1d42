//! Build a finite generic approximation from a task list and verify it.
use std::collections::BTreeMap;

use cofinitary::coding::ZSet;
use cofinitary::families::{build_family, ConstraintSets};
use cofinitary::forcing::PosetContext;
use cofinitary::generic::{decoded, run_builder, verify_generic, ConstraintTask, HitTask, Target, TaskList};
use cofinitary::perms::GroundRepresentation;
use cofinitary::words::Word;

fn main() {
    let mut ctx = PosetContext::new(GroundRepresentation::single_zshift(), build_family(0, 1000, 4, 0).unwrap());
    ctx.y = ConstraintSets::with_default(0..4);
    let ba: Word = "b.a".parse().unwrap();
    ctx.z.insert(Word::a(), ZSet::Bits("110100".parse().unwrap()));
    ctx.z.insert(ba.clone(), ZSet::Bits("0011".parse().unwrap()));
    let tasks = TaskList {
        domain_up_to: 15,
        range_up_to: 15,
        coding: BTreeMap::from([(Word::a(), 6), (ba, 4)]),
        registrations: ["b^-1.a.b.a".parse().unwrap()].into(),
        hits: vec![HitTask { word: Word::a(), target: Target::Swap, threshold: 20, repetitions: 3 }],
        constraints: vec![ConstraintTask { word: Word::a(), m: None, xi: 1 }],
    };
    let approx = run_builder(&ctx, &tasks, 0).unwrap();
    for line in approx.log_lines().lines().take(4) {
        println!("{line}");
    }
    println!("... {} reports, |s| = {}", approx.log.len(), approx.final_condition.s.len());
    for (w, bits) in decoded(&approx.final_condition, &ctx) {
        println!("decoded {w}: {bits}");
    }
    print!("{}", verify_generic(&approx, &ctx, &tasks));
}
