use std::cmp::Ordering;
use std::collections::BTreeSet;

use eqchase::frontend::parse;
use eqchase::model::{
    apply_syntactic, apply_term_map, skolemise, term_compare, Atom, AtomSet, GroundRewriting,
    Predicate, SkolemSymbol, SkolemisedRule, Substitution, Symbol, Term,
};
use proptest::prelude::*;

fn f() -> SkolemSymbol {
    SkolemSymbol::for_existential(0, &Symbol::new("W"), 1)
}

fn g() -> SkolemSymbol {
    SkolemSymbol::for_existential(1, &Symbol::new("V"), 1)
}

/// Every term of depth at most 3 over constants a, b and unary f, g.
fn small_terms() -> Vec<Term> {
    let mut layer = vec![Term::constant("a"), Term::constant("b")];
    let mut all = layer.clone();
    for _ in 0..2 {
        layer = layer
            .iter()
            .flat_map(|t| {
                [
                    Term::functional(f(), vec![t.clone()]),
                    Term::functional(g(), vec![t.clone()]),
                ]
            })
            .collect();
        all.extend(layer.iter().cloned());
    }
    all
}

#[test]
fn term_order_is_a_strict_total_order_on_small_terms() {
    let ts = small_terms();
    assert_eq!(ts.len(), 14);
    for t in &ts {
        for u in &ts {
            let tu = term_compare(t, u);
            assert_eq!(tu, term_compare(u, t).reverse());
            assert_eq!(tu == Ordering::Equal, t == u);
            if t.depth() < u.depth() {
                assert_eq!(tu, Ordering::Less, "{} vs {}", t, u);
            }
            for v in &ts {
                if tu == Ordering::Less && term_compare(u, v) == Ordering::Less {
                    assert_eq!(term_compare(t, v), Ordering::Less);
                }
            }
        }
    }
}

fn arb_term() -> impl Strategy<Value = Term> {
    let leaf = prop::sample::select(vec![
        Term::constant("a"),
        Term::constant("b"),
        Term::constant("c"),
    ]);
    leaf.prop_recursive(4, 16, 2, |inner| {
        (
            prop::sample::select(vec![0usize, 1, 2]),
            prop::collection::vec(inner, 1..=2),
        )
            .prop_map(|(i, args)| {
                let name = ["W", "V", "U"][i];
                let sym = SkolemSymbol::for_existential(i, &Symbol::new(name), args.len());
                Term::functional(sym, args)
            })
    })
}

fn strict_subterms(t: &Term) -> Vec<Term> {
    let mut out = Vec::new();
    t.visit_subterms(&mut |s| out.push(s.clone()));
    out.retain(|s| s != t);
    out
}

proptest! {
    #[test]
    fn term_map_leaves_nested_subterms(v in arb_term(), u in arb_term()) {
        let p = Predicate::new("P", 1);
        let set: AtomSet = [Atom::new(p, vec![v.clone()])].into_iter().collect();
        for t in strict_subterms(&v) {
            let map: GroundRewriting = [(t, u.clone())].into_iter().collect();
            prop_assert_eq!(apply_term_map(&set, &map), set.clone());
        }
    }

    #[test]
    fn cyclicity_is_monotone_under_embedding(t in arb_term(), i in 0usize..3) {
        if t.is_cyclic() {
            let name = ["W", "V", "U"][i];
            let outer = Term::functional(
                SkolemSymbol::for_existential(i, &Symbol::new(name), 2),
                vec![Term::constant("a"), t.clone()],
            );
            prop_assert!(outer.is_cyclic());
        }
    }

    #[test]
    fn term_order_agrees_with_ord(t in arb_term(), u in arb_term()) {
        prop_assert_eq!(term_compare(&t, &u), t.cmp(&u));
        if t.depth() < u.depth() {
            prop_assert!(t < u);
        }
    }

    #[test]
    fn apply_syntactic_commutes_with_union(
        xs in prop::collection::vec((0usize..3, 0usize..3), 0..4),
        ys in prop::collection::vec((0usize..3, 0usize..3), 0..4),
        images in prop::collection::vec(arb_term(), 3),
    ) {
        let r = Predicate::new("R", 2);
        let vars = ["X", "Y", "Z"];
        let mk = |pairs: &[(usize, usize)]| -> Vec<Atom> {
            pairs
                .iter()
                .map(|&(i, j)| Atom::new(r.clone(), vec![Term::variable(vars[i]), Term::variable(vars[j])]))
                .collect()
        };
        let (a, b) = (mk(&xs), mk(&ys));
        let sigma: Substitution = vars.iter().map(Symbol::new).zip(images).collect();
        let union: Vec<Atom> = a.iter().chain(&b).cloned().collect();
        let lhs: BTreeSet<Atom> = apply_syntactic(&union, &sigma).unwrap().into_iter().collect();
        let mut rhs: BTreeSet<Atom> = apply_syntactic(&a, &sigma).unwrap().into_iter().collect();
        rhs.extend(apply_syntactic(&b, &sigma).unwrap());
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn skolem_symbols_are_distinct_across_rules() {
    let p = parse(
        "A(X) -> exists W . R(X,W) .\nB(X) -> exists W . R(X,W) .\nR(X,Y) -> exists U, V . S(U,V), A(X) .\n",
    )
    .unwrap();
    let sk = skolemise(&p.rules);
    let names: BTreeSet<String> = sk.symbols.iter().map(|s| s.name().to_string()).collect();
    assert_eq!(names.len(), sk.symbols.len());
    assert_eq!(sk.symbols.len(), 4);
    // frontier of the third rule is {X}
    let SkolemisedRule::Tgd(t) = &sk.rules[2] else {
        panic!()
    };
    assert!(t.symbols.iter().all(|s| s.arity() == 1));
}
