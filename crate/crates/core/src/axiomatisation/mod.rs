//! Equality elimination: the standard axiomatisation, singularisation, and
//! the `E`-class collapse `π_A` / `[A]` relating the chases of the
//! axiomatised and original ontologies.

mod ep;
mod singularise;

pub use ep::{bracket, is_ep_complete, pi};
pub use singularise::{
    canonical_singularisation, occurrence_counts, query_singularisations, singularisation_count,
    singularisations, singularise, singularise_conjunction, singularise_query, Singularisations,
};

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use crate::model::{Atom, Egd, Ontology, Predicate, Rule, RuleSet, Symbol, Term, Tgd};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AxiomatisationError {
    #[error("choice {index} for variable {variable} is outside 1..={occurrences}")]
    ChoiceOutOfRange {
        variable: Symbol,
        index: usize,
        occurrences: usize,
    },
    #[error("choice vector has {got} entries for {expected} rules")]
    ChoiceShape { expected: usize, got: usize },
    #[error("atom set is not EP-complete")]
    NotEpComplete,
}

/// Kept occurrence `k_x` (1-based) per body variable, per rule. Variables
/// absent from a map keep their first occurrence.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SingularisationChoice {
    pub per_rule: Vec<BTreeMap<Symbol, usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Transform {
    Standard,
    Singularisation(SingularisationChoice),
}

/// An equality-free TGD set over `eq`, with the transform that produced it.
/// Rule `i < source_len` is the image of source rule `i`, so Skolem symbols
/// agree with the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomatisedRuleSet {
    pub tgds: RuleSet,
    pub transform: Transform,
    pub source_len: usize,
}

impl AxiomatisedRuleSet {
    pub fn ontology(&self, facts: Vec<Atom>) -> Ontology {
        Ontology::new(self.tgds.clone(), facts)
    }
}

pub(crate) fn eq_atom(x: &Symbol, y: &Symbol) -> Atom {
    Atom::new(
        Predicate::axiom_equality(),
        vec![Term::Variable(x.clone()), Term::Variable(y.clone())],
    )
}

/// Variable names for the equality theory that avoid every existential of the
/// source, so renaming apart leaves the source rules alone.
struct Names {
    taken: HashSet<Symbol>,
}

impl Names {
    fn new(rules: &RuleSet) -> Self {
        Names {
            taken: rules
                .iter()
                .flat_map(|r| r.existentials().to_vec())
                .collect(),
        }
    }

    fn get(&self, base: &str) -> Symbol {
        let mut name = base.to_string();
        while self.taken.contains(&Symbol::new(&name)) {
            name.push('_');
        }
        Symbol::new(name)
    }

    fn list(&self, base: &str, n: usize) -> Vec<Symbol> {
        (1..=n)
            .map(|i| self.get(&format!("{}{}", base, i)))
            .collect()
    }
}

fn vars(names: &[Symbol]) -> Vec<Term> {
    names.iter().cloned().map(Term::Variable).collect()
}

/// Reflexivity per predicate, then symmetry and transitivity.
fn equality_theory(predicates: &[Predicate], names: &Names) -> Vec<Rule> {
    let mut out = Vec::new();
    for p in predicates {
        let xs = names.list("X", p.arity());
        out.push(Rule::Tgd(Tgd::new(
            vec![Atom::new(p.clone(), vars(&xs))],
            vec![],
            xs.iter().map(|x| eq_atom(x, x)).collect(),
        )));
    }
    let (x, y, z) = (names.get("X"), names.get("Y"), names.get("Z"));
    out.push(Rule::Tgd(Tgd::new(
        vec![eq_atom(&x, &y)],
        vec![],
        vec![eq_atom(&y, &x)],
    )));
    out.push(Rule::Tgd(Tgd::new(
        vec![eq_atom(&x, &y), eq_atom(&y, &z)],
        vec![],
        vec![eq_atom(&x, &z)],
    )));
    out
}

/// `β → E(x, y)` for an EGD `β → x ≈ y`.
pub(crate) fn egd_as_tgd(body: Vec<Atom>, e: &Egd) -> Rule {
    Rule::Tgd(Tgd::new(body, vec![], vec![eq_atom(&e.left, &e.right)]))
}

/// `St(R)`: the source TGDs, EGDs with heads over `eq`, reflexivity for every
/// predicate, symmetry, transitivity and one replacement rule per predicate
/// and argument position.
pub fn standard_axiomatisation(rules: &RuleSet) -> AxiomatisedRuleSet {
    let names = Names::new(rules);
    let predicates = rules.predicates();
    let mut out: Vec<Rule> = rules
        .iter()
        .map(|r| match r {
            Rule::Tgd(_) => r.clone(),
            Rule::Egd(e) => egd_as_tgd(e.body.clone(), e),
        })
        .collect();
    out.extend(equality_theory(&predicates, &names));
    for p in &predicates {
        let xs = names.list("X", p.arity());
        for i in 0..p.arity() {
            let primed = names.get(&format!("Y{}", i + 1));
            let mut replaced = xs.clone();
            replaced[i] = primed.clone();
            out.push(Rule::Tgd(Tgd::new(
                vec![Atom::new(p.clone(), vars(&xs)), eq_atom(&xs[i], &primed)],
                vec![],
                vec![Atom::new(p.clone(), vars(&replaced))],
            )));
        }
    }
    AxiomatisedRuleSet {
        tgds: RuleSet::new(out),
        transform: Transform::Standard,
        source_len: rules.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_rules, ValidationOptions};

    fn v(n: &str) -> Term {
        Term::variable(n)
    }

    fn atom(p: &str, args: Vec<Term>) -> Atom {
        Atom::new(Predicate::new(p, args.len()), args)
    }

    fn functional_rules() -> RuleSet {
        RuleSet::new(vec![
            Rule::Tgd(Tgd::new(
                vec![atom("A", vec![v("X")])],
                vec![Symbol::new("W")],
                vec![atom("R", vec![v("X"), v("W")]), atom("B", vec![v("W")])],
            )),
            Rule::Egd(Egd::new(
                vec![
                    atom("R", vec![v("X"), v("Y")]),
                    atom("R", vec![v("X"), v("Z")]),
                ],
                "Y",
                "Z",
            )),
        ])
    }

    #[test]
    fn standard_axiomatisation_of_functional_set() {
        let st = standard_axiomatisation(&functional_rules());
        assert_eq!(st.tgds.len(), 11);
        assert_eq!(st.tgds.rules()[0], functional_rules().rules()[0]);
        assert_eq!(st.tgds.rules()[1].to_string(), "R(X,Y), R(X,Z) -> eq(Y,Z)");
        assert!(st.tgds.iter().all(|r| !r.is_egd()));
        let text: Vec<String> = st.tgds.iter().map(|r| r.to_string()).collect();
        assert!(text.contains(&"A(X1) -> eq(X1,X1)".to_string()));
        assert!(text.contains(&"R(X1,X2) -> eq(X1,X1), eq(X2,X2)".to_string()));
        assert!(text.contains(&"eq(X,Y) -> eq(Y,X)".to_string()));
        assert!(text.contains(&"eq(X,Y), eq(Y,Z) -> eq(X,Z)".to_string()));
        assert!(text.contains(&"R(X1,X2), eq(X2,Y2) -> R(X1,Y2)".to_string()));
        assert!(validate_rules(&st.tgds, ValidationOptions::axiomatised()).is_empty());
    }

    #[test]
    fn egd_free_set_gets_equality_theory_only() {
        let rules = RuleSet::new(vec![Rule::Tgd(Tgd::new(
            vec![atom("A", vec![v("X")])],
            vec![],
            vec![atom("B", vec![v("X")])],
        ))]);
        let st = standard_axiomatisation(&rules);
        // rule, 2 reflexivity, symmetry, transitivity, 2 replacement
        assert_eq!(st.tgds.len(), 7);
    }

    #[test]
    fn axiom_names_avoid_existentials() {
        let rules = RuleSet::new(vec![Rule::Tgd(Tgd::new(
            vec![atom("A", vec![v("Y")])],
            vec![Symbol::new("X1")],
            vec![atom("R", vec![v("Y"), v("X1")])],
        ))]);
        let st = standard_axiomatisation(&rules);
        assert_eq!(st.tgds.rules()[0], rules.rules()[0]);
        assert!(validate_rules(&st.tgds, ValidationOptions::axiomatised()).is_empty());
    }
}
