//! Grow a representation stage by stage, coding each stage's bookkeeping.
use cofinitary::perms::GroundRepresentation;
use cofinitary::tower::{run_tower, TowerConfig};

fn main() {
    let cfg = TowerConfig { stages: 3, coding_words: vec!["a".parse().unwrap(), "b.a".parse().unwrap()], ..TowerConfig::default() };
    let run = run_tower(GroundRepresentation::single_zshift(), &cfg, 0).unwrap();
    for r in &run.records {
        println!(
            "stage {} beta {} generators {} pairs {} cF {:?} cW {{{}}} verified {}",
            r.stage,
            r.beta,
            r.generators,
            r.pairs,
            r.c_f,
            r.c_w.iter().map(|(w, c)| format!("{w}: {c:?}")).collect::<Vec<_>>().join(", "),
            r.verified
        );
    }
    println!("codes recovered {}", run.codes_recovered());
    println!("cross-stage overlap on [0, {}): {}", cfg.window, run.cross_stage_overlap(cfg.window, 3));
}
