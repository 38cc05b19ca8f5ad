//! Singularisation of conjunctions, rules, rule sets and queries.
//!
//! Occurrences are numbered left to right over the atom list, then over
//! argument positions within an atom.

use std::collections::{BTreeMap, HashSet};

use super::{
    egd_as_tgd, eq_atom, equality_theory, AxiomatisationError, AxiomatisedRuleSet, Names,
    SingularisationChoice, Transform,
};
use crate::model::{variables_of, Atom, Bcq, Rule, RuleSet, Symbol, Term, Tgd};

/// Body variables with their occurrence counts, in first-occurrence order.
pub fn occurrence_counts(atoms: &[Atom]) -> Vec<(Symbol, usize)> {
    let order = variables_of(atoms);
    let mut counts: BTreeMap<&Symbol, usize> = BTreeMap::new();
    for a in atoms {
        for v in a.variables() {
            *counts.entry(v).or_default() += 1;
        }
    }
    order.iter().map(|v| (v.clone(), counts[v])).collect()
}

fn fresh(base: &Symbol, i: usize, taken: &mut HashSet<Symbol>) -> Symbol {
    let mut name = format!("{}__{}", base, i);
    while taken.contains(&Symbol::new(&name)) {
        name.push('_');
    }
    let s = Symbol::new(name);
    taken.insert(s.clone());
    s
}

fn singularise_atoms(
    atoms: &[Atom],
    choice: &BTreeMap<Symbol, usize>,
    taken: &mut HashSet<Symbol>,
) -> Result<Vec<Atom>, AxiomatisationError> {
    let counts: BTreeMap<Symbol, usize> = occurrence_counts(atoms).into_iter().collect();
    for (v, &k) in choice {
        let n = counts.get(v).copied().unwrap_or(0);
        if k == 0 || k > n {
            return Err(AxiomatisationError::ChoiceOutOfRange {
                variable: v.clone(),
                index: k,
                occurrences: n,
            });
        }
    }
    taken.extend(counts.keys().cloned());
    let mut seen: BTreeMap<Symbol, usize> = BTreeMap::new();
    let mut links = Vec::new();
    let mut out = Vec::with_capacity(atoms.len());
    for a in atoms {
        let mut args = Vec::with_capacity(a.args.len());
        for t in &a.args {
            match t {
                Term::Variable(x) => {
                    let i = seen.entry(x.clone()).or_default();
                    *i += 1;
                    let keep = choice.get(x).copied().unwrap_or(1);
                    if *i == keep {
                        args.push(t.clone());
                    } else {
                        let xi = fresh(x, *i, taken);
                        links.push(eq_atom(x, &xi));
                        args.push(Term::Variable(xi));
                    }
                }
                _ => args.push(t.clone()),
            }
        }
        out.push(Atom::new(a.predicate.clone(), args));
    }
    out.extend(links);
    Ok(out)
}

/// The singularisation of `atoms` keeping occurrence `choice[x]` (1-based) of
/// each variable `x`; variables without an entry keep their first occurrence.
pub fn singularise_conjunction(
    atoms: &[Atom],
    choice: &BTreeMap<Symbol, usize>,
) -> Result<Vec<Atom>, AxiomatisationError> {
    singularise_atoms(atoms, choice, &mut HashSet::new())
}

fn singularise_rule(
    rule: &Rule,
    choice: &BTreeMap<Symbol, usize>,
) -> Result<Rule, AxiomatisationError> {
    let mut taken: HashSet<Symbol> = rule.all_variables().into_iter().collect();
    let body = singularise_atoms(rule.body(), choice, &mut taken)?;
    Ok(match rule {
        Rule::Tgd(t) => Rule::Tgd(Tgd::new(body, t.existentials.clone(), t.head.clone())),
        Rule::Egd(e) => egd_as_tgd(body, e),
    })
}

/// The member of `Sing(R)` selected by `choice`, which must have one entry
/// per rule.
pub fn singularise(
    rules: &RuleSet,
    choice: &SingularisationChoice,
) -> Result<AxiomatisedRuleSet, AxiomatisationError> {
    if choice.per_rule.len() != rules.len() {
        return Err(AxiomatisationError::ChoiceShape {
            expected: rules.len(),
            got: choice.per_rule.len(),
        });
    }
    let names = Names::new(rules);
    let mut out = rules
        .iter()
        .zip(&choice.per_rule)
        .map(|(r, c)| singularise_rule(r, c))
        .collect::<Result<Vec<_>, _>>()?;
    out.extend(equality_theory(&rules.predicates(), &names));
    Ok(AxiomatisedRuleSet {
        tgds: RuleSet::new(out),
        transform: Transform::Singularisation(choice.clone()),
        source_len: rules.len(),
    })
}

/// `k_x = 1` for every variable.
pub fn canonical_singularisation(rules: &RuleSet) -> AxiomatisedRuleSet {
    let choice = SingularisationChoice {
        per_rule: rules
            .iter()
            .map(|r| {
                occurrence_counts(r.body())
                    .into_iter()
                    .filter(|(_, n)| *n > 1)
                    .map(|(v, _)| (v, 1))
                    .collect()
            })
            .collect(),
    };
    singularise(rules, &choice).expect("first occurrences always exist")
}

/// `|Sing(R)|`, saturating.
pub fn singularisation_count(rules: &RuleSet) -> u128 {
    rules
        .iter()
        .flat_map(|r| occurrence_counts(r.body()))
        .fold(1u128, |acc, (_, n)| acc.saturating_mul(n as u128))
}

/// Lazy enumeration of `Sing(R)`; the first element is the canonical one.
pub struct Singularisations {
    rules: RuleSet,
    dims: Vec<(usize, Symbol, usize)>,
    current: Option<Vec<usize>>,
}

pub fn singularisations(rules: &RuleSet) -> Singularisations {
    let dims: Vec<(usize, Symbol, usize)> = rules
        .iter()
        .enumerate()
        .flat_map(|(i, r)| {
            occurrence_counts(r.body())
                .into_iter()
                .filter(|(_, n)| *n > 1)
                .map(move |(v, n)| (i, v, n))
        })
        .collect();
    Singularisations {
        rules: rules.clone(),
        current: Some(vec![1; dims.len()]),
        dims,
    }
}

impl Iterator for Singularisations {
    type Item = AxiomatisedRuleSet;

    fn next(&mut self) -> Option<Self::Item> {
        let current = self.current.clone()?;
        let mut choice = SingularisationChoice {
            per_rule: vec![BTreeMap::new(); self.rules.len()],
        };
        for ((rule, v, _), &k) in self.dims.iter().zip(&current) {
            choice.per_rule[*rule].insert(v.clone(), k);
        }
        // advance the odometer, last dimension fastest
        let mut next = current;
        let mut pos = self.dims.len();
        self.current = loop {
            if pos == 0 {
                break None;
            }
            pos -= 1;
            if next[pos] < self.dims[pos].2 {
                next[pos] += 1;
                break Some(next);
            }
            next[pos] = 1;
        };
        Some(singularise(&self.rules, &choice).expect("choices are in range"))
    }
}

/// The singularisation of a query under `choice`.
pub fn singularise_query(
    query: &Bcq,
    choice: &BTreeMap<Symbol, usize>,
) -> Result<Bcq, AxiomatisationError> {
    let mut taken: HashSet<Symbol> = query.variables.iter().cloned().collect();
    Ok(Bcq::new(singularise_atoms(
        &query.body,
        choice,
        &mut taken,
    )?))
}

/// Every member of `Sing(γ)`, in odometer order.
pub fn query_singularisations(query: &Bcq) -> Vec<Bcq> {
    let dims: Vec<(Symbol, usize)> = occurrence_counts(&query.body)
        .into_iter()
        .filter(|(_, n)| *n > 1)
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![1usize; dims.len()];
    loop {
        let choice: BTreeMap<Symbol, usize> = dims
            .iter()
            .map(|(v, _)| v.clone())
            .zip(idx.iter().copied())
            .collect();
        out.push(singularise_query(query, &choice).expect("choices are in range"));
        let mut pos = dims.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if idx[pos] < dims[pos].1 {
                idx[pos] += 1;
                break;
            }
            idx[pos] = 1;
        }
    }
}
