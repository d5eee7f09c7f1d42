//! Make `a` agree with the pairwise swap at ever larger points.
use cofinitary::families::{build_family, ConstraintSets};
use cofinitary::forcing::{hit, Condition, PosetContext, SwapPairs};
use cofinitary::perms::GroundRepresentation;
use cofinitary::words::Word;

fn main() {
    let mut ctx = PosetContext::new(GroundRepresentation::single_zshift(), build_family(0, 100, 2, 0).unwrap());
    ctx.y = ConstraintSets::with_default(0..2);
    let mut p = Condition::empty();
    for text in ["a", "b.a"] {
        let w: Word = text.parse().unwrap();
        let mut threshold = 5;
        for _ in 0..5 {
            let out = hit(&p, &w, &SwapPairs, threshold, &ctx).unwrap();
            println!("{w} agrees with the swap at {}", out.n);
            threshold = out.n + 1;
            p = out.condition;
        }
    }
    println!("final |s| = {}", p.s.len());
}
