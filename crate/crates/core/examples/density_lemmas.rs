//! One extension per dense set, each checked against the order.
use cofinitary::coding::ZSet;
use cofinitary::families::{build_family, CantorPairing, ConstraintSets};
use cofinitary::forcing::{add_constraint, extend_domain, extend_range, leq, register_word, Condition, PosetContext};
use cofinitary::perms::{psi_image, GroundRepresentation};
use cofinitary::words::Word;

fn show(name: &str, q: &Condition, p: &Condition, ctx: &PosetContext) {
    let pairs: Vec<_> = q.s.difference(&p.s);
    println!("{name:16} added {pairs:?} leq {} valid {}", leq(q, p, ctx), q.validate(ctx).is_ok());
}

fn main() {
    let mut ctx = PosetContext::new(GroundRepresentation::single_zshift(), build_family(0, 100, 2, 0).unwrap());
    ctx.y = ConstraintSets::with_default(0..2);
    ctx.z.insert(Word::a(), ZSet::Bits("10".parse().unwrap()));
    let p = Condition::empty();
    let q = extend_domain(&p, 4, &ctx).unwrap();
    show("domain 4", &q, &p, &ctx);
    let r = extend_range(&q, 1, &ctx).unwrap();
    show("range 1", &r, &q, &ctx);
    let t = register_word(&r, &"b^-1.a.b.a".parse().unwrap(), &ctx).unwrap();
    show("register", &t, &r, &ctx);
    println!("{:16} F = {:?}", "", t.f.iter().map(|w| w.to_string()).collect::<Vec<_>>());
    // constraint indices come from the pairing image of the graph of a
    let m = *psi_image(&Word::a(), &ctx.rep, &t.s, CantorPairing).unwrap().first().unwrap();
    let u = add_constraint(&t, &Word::a(), m, 1, &ctx).unwrap();
    show(&format!("constraint f({m}, 1)"), &u, &t, &ctx);
    let v = extend_domain(&u, 9, &ctx).unwrap();
    show("domain 9", &v, &u, &ctx);
}
