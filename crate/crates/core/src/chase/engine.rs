//! Rule applicability and application on atom sets.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use super::homomorphism::{Binding, Pattern, Slot, VarTable};
use super::ChaseError;
use crate::model::{Atom, AtomSet, Predicate, Rule, RuleSet, SkolemSymbol, Substitution, Term};

#[derive(Clone, Debug)]
enum HeadArg {
    Var(usize),
    Skolem(usize),
}

#[derive(Clone, Debug)]
enum Compiled {
    Tgd {
        head: Pattern,
        skolem_head: Vec<(Predicate, Vec<HeadArg>)>,
        skolem_args: Vec<usize>,
        symbols: Vec<SkolemSymbol>,
    },
    Egd {
        left: usize,
        right: usize,
    },
}

/// A rule compiled to slot form. Slots `0..universal` hold the body variables,
/// the rest the existentials.
#[derive(Clone, Debug)]
pub(crate) struct CompiledRule {
    vars: VarTable,
    universal: usize,
    body: Pattern,
    kind: Compiled,
}

/// What an application did to the set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Effect {
    /// Atoms added by a TGD (those not already present).
    Added(Vec<Atom>),
    /// An EGD replaced `from` by `to`; `rewritten` are the new atoms.
    Merged {
        from: Term,
        to: Term,
        rewritten: Vec<Atom>,
    },
}

impl Effect {
    pub fn new_atoms(&self) -> &[Atom] {
        match self {
            Effect::Added(a) => a,
            Effect::Merged { rewritten, .. } => rewritten,
        }
    }
}

impl CompiledRule {
    fn new(rule: &Rule, index: usize) -> Self {
        let mut vars = VarTable::default();
        let body = Pattern::compile(rule.body(), &mut vars);
        let universal = vars.len();
        let kind = match rule {
            Rule::Tgd(t) => {
                let ex: Vec<usize> = t.existentials.iter().map(|w| vars.slot(w)).collect();
                let head = Pattern::compile(&t.head, &mut vars);
                let skolem_args: Vec<usize> = t
                    .skolem_arguments()
                    .iter()
                    .map(|v| vars.get(v).expect("skolem argument is a body variable"))
                    .collect();
                let symbols = t
                    .existentials
                    .iter()
                    .map(|w| SkolemSymbol::for_existential(index, w, skolem_args.len()))
                    .collect();
                let skolem_head = t
                    .head
                    .iter()
                    .map(|a| {
                        let args = a
                            .args
                            .iter()
                            .map(|t| {
                                let v = t.as_variable().expect("rule heads are variable-only");
                                let slot = vars.get(v).expect("head variable is bound");
                                match ex.iter().position(|&e| e == slot) {
                                    Some(j) => HeadArg::Skolem(j),
                                    None => HeadArg::Var(slot),
                                }
                            })
                            .collect();
                        (a.predicate.clone(), args)
                    })
                    .collect();
                Compiled::Tgd {
                    head,
                    skolem_head,
                    skolem_args,
                    symbols,
                }
            }
            Rule::Egd(e) => Compiled::Egd {
                left: vars.slot(&e.left),
                right: vars.slot(&e.right),
            },
        };
        CompiledRule {
            vars,
            universal,
            body,
            kind,
        }
    }

    fn empty_binding(&self) -> Binding {
        vec![None; self.vars.len()]
    }

    pub fn is_egd(&self) -> bool {
        matches!(self.kind, Compiled::Egd { .. })
    }

    pub fn has_existentials(&self) -> bool {
        matches!(&self.kind, Compiled::Tgd { symbols, .. } if !symbols.is_empty())
    }

    pub(crate) fn binding_of(&self, sigma: &Substitution) -> Result<Binding, ChaseError> {
        let mut b = self.empty_binding();
        for (i, name) in self.vars.names().iter().enumerate() {
            match (sigma.get(name), i < self.universal) {
                (Some(t), true) => {
                    if !t.is_ground() {
                        return Err(ChaseError::DomainMismatch(format!(
                            "{} is mapped to the non-ground term {}",
                            name, t
                        )));
                    }
                    b[i] = Some(t.clone());
                }
                (None, true) => {
                    return Err(ChaseError::DomainMismatch(format!(
                        "universal variable {} is unmapped",
                        name
                    )))
                }
                (Some(_), false) => {
                    return Err(ChaseError::DomainMismatch(format!(
                        "existential variable {} is mapped",
                        name
                    )))
                }
                (None, false) => {}
            }
        }
        Ok(b)
    }

    pub fn substitution(&self, b: &Binding) -> Substitution {
        self.vars.to_substitution(b, self.universal)
    }

    /// `βσ` for a universal binding.
    pub fn body_image(&self, b: &Binding) -> Vec<Atom> {
        self.body
            .atoms
            .iter()
            .map(|a| {
                let args = a
                    .args
                    .iter()
                    .map(|s| match s {
                        Slot::Var(i) => b[*i].clone().expect("body bound"),
                        Slot::Ground(t) => t.clone(),
                    })
                    .collect();
                Atom::new(a.predicate.clone(), args)
            })
            .collect()
    }

    fn body_holds(&self, b: &Binding, set: &AtomSet) -> bool {
        self.body_image(b).iter().all(|a| set.contains(a))
    }

    /// Body predicates, one per body atom.
    pub fn body_predicates(&self) -> impl Iterator<Item = &Predicate> {
        self.body.atoms.iter().map(|a| &a.predicate)
    }

    /// Matches whose body atom `position` is pinned to `tuple`.
    pub fn matches_seeded(
        &self,
        set: &AtomSet,
        position: usize,
        tuple: &[Term],
        f: &mut dyn FnMut(&Binding) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let mut b = self.empty_binding();
        self.body.search_seeded(set, position, tuple, &mut b, f)
    }

    /// The applicability conditions other than the body match.
    fn head_condition(&self, b: &mut Binding, set: &AtomSet) -> bool {
        match &self.kind {
            Compiled::Tgd { head, .. } => !head.exists(set, b),
            Compiled::Egd { left, right } => b[*left] != b[*right],
        }
    }

    /// Full applicability check of a universal binding.
    pub fn applicable(&self, b: &mut Binding, set: &AtomSet) -> bool {
        self.body_holds(b, set) && self.head_condition(b, set)
    }

    /// The ground head `Sk_σ(η)` of a TGD.
    pub fn head_atoms(&self, b: &Binding) -> Vec<(Predicate, Vec<Term>)> {
        let Compiled::Tgd {
            skolem_head,
            skolem_args,
            symbols,
            ..
        } = &self.kind
        else {
            return Vec::new();
        };
        let args: Vec<Term> = skolem_args
            .iter()
            .map(|&i| b[i].clone().expect("universal slot bound"))
            .collect();
        let skolems: Vec<Term> = symbols
            .iter()
            .map(|f| Term::functional(f.clone(), args.clone()))
            .collect();
        skolem_head
            .iter()
            .map(|(p, h)| {
                let args = h
                    .iter()
                    .map(|a| match a {
                        HeadArg::Var(i) => b[*i].clone().expect("universal slot bound"),
                        HeadArg::Skolem(j) => skolems[*j].clone(),
                    })
                    .collect();
                (p.clone(), args)
            })
            .collect()
    }

    /// `(eliminated, survivor)` for an EGD binding: the ≺-greater term goes.
    pub fn merge_pair(&self, b: &Binding) -> Option<(Term, Term)> {
        let Compiled::Egd { left, right } = &self.kind else {
            return None;
        };
        let x = b[*left].clone().expect("bound");
        let y = b[*right].clone().expect("bound");
        Some(if x < y { (y, x) } else { (x, y) })
    }

    /// The two EGD images `(σ(x), σ(y))`.
    pub fn equated(&self, b: &Binding) -> Option<(Term, Term)> {
        let Compiled::Egd { left, right } = &self.kind else {
            return None;
        };
        Some((b[*left].clone()?, b[*right].clone()?))
    }

    /// Applies an applicable binding in place.
    pub fn fire(&self, b: &Binding, set: &mut AtomSet) -> Effect {
        match &self.kind {
            Compiled::Tgd { .. } => {
                let mut added = Vec::new();
                for (p, args) in self.head_atoms(b) {
                    if set.insert_parts(p.clone(), args.clone()) {
                        added.push(Atom::new(p, args));
                    }
                }
                Effect::Added(added)
            }
            Compiled::Egd { .. } => {
                let (from, to) = self.merge_pair(b).expect("egd");
                let rewritten = set.replace_term_tracked(&from, &to);
                Effect::Merged {
                    from,
                    to,
                    rewritten,
                }
            }
        }
    }

    /// Visits every body match, applicable or not.
    pub fn matches(&self, set: &AtomSet, f: &mut dyn FnMut(&Binding) -> ControlFlow<()>) {
        let mut b = self.empty_binding();
        let _ = self.body.search(set, &mut b, f);
    }

    /// Applicable bindings, in match order.
    pub fn triggers(&self, set: &AtomSet) -> Vec<Binding> {
        let mut out = Vec::new();
        let mut scratch = self.empty_binding();
        self.matches(set, &mut |b| {
            scratch.clone_from(b);
            if self.head_condition(&mut scratch, set) {
                out.push(b[..].to_vec());
            }
            ControlFlow::Continue(())
        });
        out
    }

    /// Applicable bindings whose body match uses at least one atom of `seeds`.
    pub fn seeded_triggers(&self, set: &AtomSet, seeds: &[Atom]) -> Vec<Binding> {
        let mut seen: BTreeSet<Vec<Option<Term>>> = BTreeSet::new();
        let mut out = Vec::new();
        let mut b = self.empty_binding();
        let mut scratch = self.empty_binding();
        for seed in seeds {
            for (i, pa) in self.body.atoms.iter().enumerate() {
                if pa.predicate != seed.predicate {
                    continue;
                }
                let _ = self
                    .body
                    .search_seeded(set, i, &seed.args, &mut b, &mut |m| {
                        if !seen.contains(m) {
                            seen.insert(m.clone());
                            scratch.clone_from(m);
                            if self.head_condition(&mut scratch, set) {
                                out.push(m.clone());
                            }
                        }
                        ControlFlow::Continue(())
                    });
            }
        }
        out
    }
}

/// A rule set compiled for repeated matching.
#[derive(Clone, Debug)]
pub struct RuleEngine {
    rules: Vec<CompiledRule>,
}

/// An applicable pair: rule index into the rule set plus substitution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trigger {
    pub rule: usize,
    pub substitution: Substitution,
}

impl RuleEngine {
    pub fn new(rules: &RuleSet) -> Self {
        RuleEngine {
            rules: rules
                .iter()
                .enumerate()
                .map(|(i, r)| CompiledRule::new(r, i))
                .collect(),
        }
    }

    pub(crate) fn compiled(&self) -> &[CompiledRule] {
        &self.rules
    }

    fn rule(&self, index: usize) -> Result<&CompiledRule, ChaseError> {
        self.rules.get(index).ok_or(ChaseError::UnknownRule(index))
    }

    pub fn is_applicable(
        &self,
        rule: usize,
        sigma: &Substitution,
        atoms: &AtomSet,
    ) -> Result<bool, ChaseError> {
        let r = self.rule(rule)?;
        let mut b = r.binding_of(sigma)?;
        Ok(r.applicable(&mut b, atoms))
    }

    /// The application of rule `rule` under `sigma`; fails unless applicable.
    pub fn apply(
        &self,
        rule: usize,
        sigma: &Substitution,
        atoms: &AtomSet,
    ) -> Result<AtomSet, ChaseError> {
        let r = self.rule(rule)?;
        let mut b = r.binding_of(sigma)?;
        if !r.applicable(&mut b, atoms) {
            return Err(ChaseError::NotApplicable(rule));
        }
        let mut out = atoms.clone();
        r.fire(&b, &mut out);
        Ok(out)
    }

    /// Every applicable pair, rules in order, substitutions in match order.
    pub fn find_applicable(&self, atoms: &AtomSet) -> Vec<Trigger> {
        self.rules
            .iter()
            .enumerate()
            .flat_map(|(i, r)| {
                r.triggers(atoms).into_iter().map(move |b| Trigger {
                    rule: i,
                    substitution: r.substitution(&b),
                })
            })
            .collect()
    }

    /// True iff no substitution makes rule `rule` applicable.
    pub fn satisfies(&self, atoms: &AtomSet, rule: usize) -> bool {
        let Some(r) = self.rules.get(rule) else {
            return true;
        };
        let mut found = false;
        let mut scratch = r.empty_binding();
        r.matches(atoms, &mut |b| {
            scratch.clone_from(b);
            if r.head_condition(&mut scratch, atoms) {
                found = true;
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        !found
    }

    /// True iff `atoms` satisfies every rule.
    pub fn is_model(&self, atoms: &AtomSet) -> bool {
        (0..self.rules.len()).all(|i| self.satisfies(atoms, i))
    }
}

/// Applicability of a single rule; Skolem naming does not matter here.
pub fn is_applicable(
    rule: &Rule,
    sigma: &Substitution,
    atoms: &AtomSet,
) -> Result<bool, ChaseError> {
    let r = CompiledRule::new(rule, 0);
    let mut b = r.binding_of(sigma)?;
    Ok(r.applicable(&mut b, atoms))
}

/// Applies rule number `index` of `rules` under `sigma`.
pub fn apply(
    rules: &RuleSet,
    index: usize,
    sigma: &Substitution,
    atoms: &AtomSet,
) -> Result<AtomSet, ChaseError> {
    RuleEngine::new(rules).apply(index, sigma, atoms)
}

pub fn find_applicable(rules: &RuleSet, atoms: &AtomSet) -> Vec<Trigger> {
    RuleEngine::new(rules).find_applicable(atoms)
}

pub fn satisfies(atoms: &AtomSet, rule: &Rule) -> bool {
    let r = CompiledRule::new(rule, 0);
    r.triggers(atoms).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Egd, Symbol, Tgd};

    fn v(n: &str) -> Term {
        Term::variable(n)
    }

    fn c(n: &str) -> Term {
        Term::constant(n)
    }

    fn atom(p: &str, args: Vec<Term>) -> Atom {
        Atom::new(Predicate::new(p, args.len()), args)
    }

    fn rule7() -> Rule {
        Rule::Tgd(Tgd::new(
            vec![atom("A", vec![v("X")])],
            vec![Symbol::new("W")],
            vec![atom("R", vec![v("X"), v("W")]), atom("B", vec![v("W")])],
        ))
    }

    fn rule8() -> Rule {
        Rule::Egd(Egd::new(
            vec![
                atom("R", vec![v("X"), v("Y")]),
                atom("R", vec![v("X"), v("Z")]),
            ],
            "Y",
            "Z",
        ))
    }

    fn sigma(pairs: &[(&str, Term)]) -> Substitution {
        pairs
            .iter()
            .map(|(k, t)| (Symbol::new(k), t.clone()))
            .collect()
    }

    fn set(atoms: Vec<Atom>) -> AtomSet {
        atoms.into_iter().collect()
    }

    fn fw(arg: Term) -> Term {
        Term::functional(
            SkolemSymbol::for_existential(0, &Symbol::new("W"), 1),
            vec![arg],
        )
    }

    #[test]
    fn egd_with_equal_images_is_not_applicable() {
        let a = set(vec![atom("R", vec![c("a"), c("a")])]);
        let s = sigma(&[("X", c("a")), ("Y", c("a")), ("Z", c("a"))]);
        assert!(!is_applicable(&rule8(), &s, &a).unwrap());
    }

    #[test]
    fn tgd_applicability_checks_head_extensions() {
        let s = sigma(&[("X", c("a"))]);
        assert!(is_applicable(&rule7(), &s, &set(vec![atom("A", vec![c("a")])])).unwrap());
        let sat = set(vec![
            atom("A", vec![c("a")]),
            atom("R", vec![c("a"), c("b")]),
            atom("B", vec![c("b")]),
        ]);
        assert!(!is_applicable(&rule7(), &s, &sat).unwrap());
        assert!(satisfies(&sat, &rule7()));
        assert!(!satisfies(&set(vec![atom("A", vec![c("a")])]), &rule7()));
        assert!(satisfies(&AtomSet::new(), &rule7()));
        assert!(satisfies(&AtomSet::new(), &rule8()));
    }

    #[test]
    fn domain_mismatch_is_reported() {
        let a = set(vec![atom("A", vec![c("a")])]);
        assert!(matches!(
            is_applicable(&rule7(), &Substitution::new(), &a),
            Err(ChaseError::DomainMismatch(_))
        ));
        let s = sigma(&[("X", c("a")), ("W", c("b"))]);
        assert!(matches!(
            is_applicable(&rule7(), &s, &a),
            Err(ChaseError::DomainMismatch(_))
        ));
    }

    #[test]
    fn tgd_application_adds_skolem_head() {
        let rules = RuleSet::new(vec![rule7(), rule8()]);
        let a = set(vec![atom("A", vec![c("a")])]);
        let out = apply(&rules, 0, &sigma(&[("X", c("a"))]), &a).unwrap();
        let expected = set(vec![
            atom("A", vec![c("a")]),
            atom("R", vec![c("a"), fw(c("a"))]),
            atom("B", vec![fw(c("a"))]),
        ]);
        assert_eq!(out, expected);
    }

    #[test]
    fn egd_application_merges_deeper_term() {
        let egd = Rule::Egd(Egd::new(vec![atom("R", vec![v("X"), v("Y")])], "X", "Y"));
        let rules = RuleSet::new(vec![egd]);
        let a = set(vec![
            atom("R", vec![c("a"), fw(c("a"))]),
            atom("B", vec![fw(c("a"))]),
        ]);
        let s = sigma(&[("X", c("a")), ("Y", fw(c("a")))]);
        let out = apply(&rules, 0, &s, &a).unwrap();
        assert_eq!(
            out,
            set(vec![
                atom("R", vec![c("a"), c("a")]),
                atom("B", vec![c("a")])
            ])
        );
        // The reversed substitution merges the same way.
        let s = sigma(&[("X", fw(c("a"))), ("Y", c("a"))]);
        let rev = set(vec![
            atom("R", vec![fw(c("a")), c("a")]),
            atom("B", vec![fw(c("a"))]),
        ]);
        let out = apply(&rules, 0, &s, &rev).unwrap();
        assert_eq!(
            out,
            set(vec![
                atom("R", vec![c("a"), c("a")]),
                atom("B", vec![c("a")])
            ])
        );
    }

    #[test]
    fn equal_depth_merge_is_deterministic() {
        let egd = Rule::Egd(Egd::new(vec![atom("R", vec![v("X"), v("Y")])], "X", "Y"));
        let rules = RuleSet::new(vec![egd]);
        let a = set(vec![
            atom("R", vec![c("a"), c("b")]),
            atom("B", vec![c("b")]),
        ]);
        let s = sigma(&[("X", c("a")), ("Y", c("b"))]);
        let first = apply(&rules, 0, &s, &a).unwrap();
        assert_eq!(first, apply(&rules, 0, &s, &a).unwrap());
        assert_eq!(first.terms().len(), 1);
    }

    #[test]
    fn applying_inapplicable_pair_fails() {
        let rules = RuleSet::new(vec![rule7(), rule8()]);
        let a = set(vec![atom("R", vec![c("a"), c("a")])]);
        let s = sigma(&[("X", c("a")), ("Y", c("a")), ("Z", c("a"))]);
        assert!(matches!(
            apply(&rules, 1, &s, &a),
            Err(ChaseError::NotApplicable(1))
        ));
        assert!(matches!(
            apply(&rules, 7, &s, &a),
            Err(ChaseError::UnknownRule(7))
        ));
    }

    #[test]
    fn find_applicable_examples() {
        let only7 = RuleSet::new(vec![rule7()]);
        let a = set(vec![atom("A", vec![c("a")])]);
        assert_eq!(find_applicable(&only7, &a).len(), 1);
        let only8 = RuleSet::new(vec![rule8()]);
        assert!(find_applicable(&only8, &a).is_empty());
        let both = RuleSet::new(vec![rule7(), rule8()]);
        let a = set(vec![
            atom("A", vec![c("a")]),
            atom("R", vec![c("a"), c("a")]),
        ]);
        let t = find_applicable(&both, &a);
        assert_eq!(
            t,
            vec![Trigger {
                rule: 0,
                substitution: sigma(&[("X", c("a"))])
            }]
        );
    }
}
