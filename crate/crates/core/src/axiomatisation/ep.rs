//! EP-complete atom sets and the collapse of their `E`-classes.

use super::AxiomatisationError;
use crate::model::{AtomSet, GroundRewriting, Predicate, Term};

/// `E(t, t)` for every term of `atoms` (top-level arguments), and `E`
/// symmetric and transitive.
pub fn is_ep_complete(atoms: &AtomSet) -> bool {
    let e = Predicate::axiom_equality();
    if !atoms
        .terms()
        .into_iter()
        .all(|t| atoms.contains_parts(&e, &[t.clone(), t]))
    {
        return false;
    }
    let Some(rel) = atoms.relation(&e) else {
        return true;
    };
    rel.iter().all(|xy| {
        let (x, y) = (&xy[0], &xy[1]);
        atoms.contains_parts(&e, &[y.clone(), x.clone()])
            && atoms
                .with_first(&e, y)
                .all(|yz| atoms.contains_parts(&e, &[x.clone(), yz[1].clone()]))
    })
}

/// `π_A`: each term of `atoms` goes to the ≺-least term it is `E`-linked to.
pub fn pi(atoms: &AtomSet) -> Result<GroundRewriting, AxiomatisationError> {
    if !is_ep_complete(atoms) {
        return Err(AxiomatisationError::NotEpComplete);
    }
    let e = Predicate::axiom_equality();
    Ok(atoms
        .terms()
        .into_iter()
        .map(|t| {
            let least = atoms
                .with_first(&e, &t)
                .map(|tu| tu[1].clone())
                .min()
                .expect("reflexive link exists");
            (t, least)
        })
        .collect())
}

/// `[A]`: apply `π_A` at argument level, then drop every `E`-atom.
pub fn bracket(atoms: &AtomSet) -> Result<AtomSet, AxiomatisationError> {
    let map = pi(atoms)?;
    let mut out = atoms.rewrite(&map);
    let e = Predicate::axiom_equality();
    let eqs: Vec<Vec<Term>> = out.relation(&e).into_iter().flatten().cloned().collect();
    for args in eqs {
        out.remove_parts(&e, &args);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Atom, SkolemSymbol, Symbol};

    fn c(n: &str) -> Term {
        Term::constant(n)
    }

    fn atom(p: &str, args: Vec<Term>) -> Atom {
        Atom::new(Predicate::new(p, args.len()), args)
    }

    fn e(x: Term, y: Term) -> Atom {
        Atom::new(Predicate::axiom_equality(), vec![x, y])
    }

    fn fa() -> Term {
        Term::functional(
            SkolemSymbol::for_existential(0, &Symbol::new("W"), 1),
            vec![c("a")],
        )
    }

    fn closure_of_a_fa() -> Vec<Atom> {
        vec![
            e(c("a"), c("a")),
            e(fa(), fa()),
            e(c("a"), fa()),
            e(fa(), c("a")),
        ]
    }

    #[test]
    fn ep_completeness_examples() {
        let s: AtomSet = [atom("P", vec![c("a")]), e(c("a"), c("a"))]
            .into_iter()
            .collect();
        assert!(is_ep_complete(&s));
        let s: AtomSet = [atom("P", vec![c("a")])].into_iter().collect();
        assert!(!is_ep_complete(&s));
        let s: AtomSet = [e(c("a"), c("b")), e(c("a"), c("a")), e(c("b"), c("b"))]
            .into_iter()
            .collect();
        assert!(!is_ep_complete(&s));
        let s: AtomSet = [
            e(c("a"), c("b")),
            e(c("b"), c("a")),
            e(c("b"), c("c")),
            e(c("c"), c("b")),
            e(c("a"), c("a")),
            e(c("b"), c("b")),
            e(c("c"), c("c")),
        ]
        .into_iter()
        .collect();
        // transitivity: E(a,c) is missing
        assert!(!is_ep_complete(&s));
    }

    #[test]
    fn pi_collapses_to_shallowest() {
        let mut atoms = closure_of_a_fa();
        atoms.push(atom("R", vec![c("a"), fa()]));
        let s: AtomSet = atoms.into_iter().collect();
        let map = pi(&s).unwrap();
        assert_eq!(map[&c("a")], c("a"));
        assert_eq!(map[&fa()], c("a"));
        assert_eq!(
            bracket(&s).unwrap(),
            [atom("R", vec![c("a"), c("a")])].into_iter().collect()
        );
    }

    #[test]
    fn reflexive_only_is_identity() {
        let s: AtomSet = [atom("P", vec![c("a")]), e(c("a"), c("a"))]
            .into_iter()
            .collect();
        let map = pi(&s).unwrap();
        assert!(map.iter().all(|(k, v)| k == v));
        assert_eq!(
            bracket(&s).unwrap(),
            [atom("P", vec![c("a")])].into_iter().collect()
        );
    }

    #[test]
    fn non_complete_input_is_rejected() {
        let s: AtomSet = [atom("P", vec![c("a")])].into_iter().collect();
        assert_eq!(pi(&s), Err(AxiomatisationError::NotEpComplete));
        assert!(bracket(&s).is_err());
    }
}
