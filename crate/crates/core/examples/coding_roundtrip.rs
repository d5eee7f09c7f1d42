//! Code a bit string along the orbit of `a` and `b.a`, then read it back.
use cofinitary::coding::{decode_bits, s_value, ZSet};
use cofinitary::families::build_family;
use cofinitary::forcing::{extend_coding, register_coding, Condition, PosetContext};
use cofinitary::perms::GroundRepresentation;
use cofinitary::words::Word;

fn main() {
    let mut ctx = PosetContext::new(GroundRepresentation::single_zshift(), build_family(0, 100, 2, 0).unwrap());
    let bits = "1011001110";
    for text in ["a", "b.a"] {
        let w: Word = text.parse().unwrap();
        ctx.z.insert(w.clone(), ZSet::Bits(bits.parse().unwrap()));
        let mut p = register_coding(&Condition::empty(), &w, &ctx).unwrap();
        for _ in 0..bits.len() {
            p = extend_coding(&p, &w, &ctx).unwrap();
        }
        let m = p.m_bar[&w];
        let got = decode_bits(&w, &ctx.rep, &p.s, m, bits.len()).unwrap();
        println!("{w}: S = {}, start {m}, |s| = {}, decoded {got}", s_value(&w).unwrap(), p.s.len());
        assert_eq!(got.to_string(), bits);
    }
}
