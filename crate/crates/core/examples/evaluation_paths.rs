//! Evaluating a word on a finite injection over the integer shift.
use cofinitary::perms::{eval_word, fixed_points, GroundRepresentation, PartialInjection};
use cofinitary::words::Word;

fn main() {
    let rep = GroundRepresentation::single_zshift();
    let s = PartialInjection::from_pairs([(0, 3), (3, 5), (5, 2), (2, 4), (1, 7)]).unwrap();
    for text in ["a", "b.a", "a^-1.b.a"] {
        let w: Word = text.parse().unwrap();
        for m in 0..4 {
            let r = eval_word(&w, &rep, &s, m, 1).unwrap();
            println!("{w}[s]({m}) = {:?} via {:?}", r.value, r.path);
        }
        println!("fixed points of {w}: {:?}", fixed_points(&w, &rep, &s, 0).unwrap());
    }
}
