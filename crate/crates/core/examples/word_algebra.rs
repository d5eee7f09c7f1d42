//! Reduced words, inverses, subwords and the conjugate core of each word.
use cofinitary::words::{reduced_words_of_length, Word};

fn main() {
    for text in ["a", "b.a", "b^-1.a.b", "a^-1.b.a", "a.a", "c.b^-1.a.b"] {
        let w: Word = text.parse().unwrap();
        let class = w.conjugate_core();
        println!(
            "{:12} inverse {:12} core {:6} conjugator {:6} WD {} WS {}",
            w.to_string(),
            w.inverse().to_string(),
            class.core.to_string(),
            class.conjugator.to_string(),
            class.in_wd,
            class.in_ws
        );
    }
    let w: Word = "b.a.b^-1.a".parse().unwrap();
    let subs: Vec<String> = w.subwords().iter().map(|s| s.to_string()).collect();
    println!("subwords of {w}: {}", subs.join(", "));
    println!("{} reduced words of length 3 over a and b", reduced_words_of_length(3, 1).len());
}
