//! Rules, rule sets, ontologies, queries and skolemisation.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use super::atom::{Atom, Predicate, Substitution};
use super::term::{SkolemSymbol, Symbol, Term};
use super::ModelError;

/// A tuple generating dependency `body -> exists existentials . head`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tgd {
    pub body: Vec<Atom>,
    pub existentials: Vec<Symbol>,
    pub head: Vec<Atom>,
}

/// An equality generating dependency `body -> left ≈ right`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Egd {
    pub body: Vec<Atom>,
    pub left: Symbol,
    pub right: Symbol,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Tgd(Tgd),
    Egd(Egd),
}

/// Distinct variables of `atoms` in order of first occurrence.
pub fn variables_of(atoms: &[Atom]) -> Vec<Symbol> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for a in atoms {
        for v in a.variables() {
            if seen.insert(v.clone()) {
                out.push(v.clone());
            }
        }
    }
    out
}

impl Tgd {
    pub fn new(body: Vec<Atom>, existentials: Vec<Symbol>, head: Vec<Atom>) -> Self {
        Tgd {
            body,
            existentials,
            head,
        }
    }

    pub fn body_variables(&self) -> Vec<Symbol> {
        variables_of(&self.body)
    }

    /// Body variables that also occur in the head, in body order.
    pub fn frontier(&self) -> Vec<Symbol> {
        let head: HashSet<Symbol> = variables_of(&self.head).into_iter().collect();
        self.body_variables()
            .into_iter()
            .filter(|v| head.contains(v))
            .collect()
    }

    /// Arguments of the Skolem terms that replace existentials: the frontier,
    /// or every body variable when the frontier is empty.
    pub fn skolem_arguments(&self) -> Vec<Symbol> {
        let frontier = self.frontier();
        if frontier.is_empty() {
            self.body_variables()
        } else {
            frontier
        }
    }

    pub fn has_existentials(&self) -> bool {
        !self.existentials.is_empty()
    }

    /// Skolemises this rule as rule number `index` of its rule set.
    pub fn skolemise(&self, index: usize) -> SkolemisedTgd {
        let args: Vec<Term> = self
            .skolem_arguments()
            .into_iter()
            .map(Term::Variable)
            .collect();
        let symbols: Vec<SkolemSymbol> = self
            .existentials
            .iter()
            .map(|w| SkolemSymbol::for_existential(index, w, args.len()))
            .collect();
        let replace = |t: &Term| -> Term {
            if let Term::Variable(v) = t {
                if let Some(i) = self.existentials.iter().position(|w| w == v) {
                    return Term::functional(symbols[i].clone(), args.clone());
                }
            }
            t.clone()
        };
        let head = self
            .head
            .iter()
            .map(|a| Atom::new(a.predicate.clone(), a.args.iter().map(replace).collect()))
            .collect();
        SkolemisedTgd {
            index,
            body: self.body.clone(),
            head,
            symbols,
        }
    }
}

impl Egd {
    pub fn new(body: Vec<Atom>, left: impl Into<Symbol>, right: impl Into<Symbol>) -> Self {
        Egd {
            body,
            left: left.into(),
            right: right.into(),
        }
    }
}

impl Rule {
    pub fn body(&self) -> &[Atom] {
        match self {
            Rule::Tgd(t) => &t.body,
            Rule::Egd(e) => &e.body,
        }
    }

    pub fn body_mut(&mut self) -> &mut Vec<Atom> {
        match self {
            Rule::Tgd(t) => &mut t.body,
            Rule::Egd(e) => &mut e.body,
        }
    }

    /// The universally quantified variables: every body variable.
    pub fn universal_variables(&self) -> Vec<Symbol> {
        variables_of(self.body())
    }

    pub fn existentials(&self) -> &[Symbol] {
        match self {
            Rule::Tgd(t) => &t.existentials,
            Rule::Egd(_) => &[],
        }
    }

    pub fn is_egd(&self) -> bool {
        matches!(self, Rule::Egd(_))
    }

    pub fn as_tgd(&self) -> Option<&Tgd> {
        match self {
            Rule::Tgd(t) => Some(t),
            Rule::Egd(_) => None,
        }
    }

    /// Every variable name mentioned anywhere in the rule.
    pub fn all_variables(&self) -> BTreeSet<Symbol> {
        let mut out: BTreeSet<Symbol> = self
            .body()
            .iter()
            .flat_map(|a| a.variables().cloned())
            .collect();
        match self {
            Rule::Tgd(t) => {
                out.extend(t.head.iter().flat_map(|a| a.variables().cloned()));
                out.extend(t.existentials.iter().cloned());
            }
            Rule::Egd(e) => {
                out.insert(e.left.clone());
                out.insert(e.right.clone());
            }
        }
        out
    }

    fn rename_variable(&mut self, from: &Symbol, to: &Symbol) {
        let swap = |atoms: &mut Vec<Atom>| {
            for a in atoms {
                for t in &mut a.args {
                    if t.as_variable() == Some(from) {
                        *t = Term::Variable(to.clone());
                    }
                }
            }
        };
        match self {
            Rule::Tgd(t) => {
                swap(&mut t.body);
                swap(&mut t.head);
                for w in &mut t.existentials {
                    if w == from {
                        *w = to.clone();
                    }
                }
            }
            Rule::Egd(e) => {
                swap(&mut e.body);
                for v in [&mut e.left, &mut e.right] {
                    if v == from {
                        *v = to.clone();
                    }
                }
            }
        }
    }
}

fn write_conjunction(f: &mut fmt::Formatter<'_>, atoms: &[Atom]) -> fmt::Result {
    for (i, a) in atoms.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{}", a)?;
    }
    Ok(())
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_conjunction(f, self.body())?;
        f.write_str(" -> ")?;
        match self {
            Rule::Tgd(t) => {
                if !t.existentials.is_empty() {
                    f.write_str("exists ")?;
                    for (i, w) in t.existentials.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{}", w)?;
                    }
                    f.write_str(" . ")?;
                }
                write_conjunction(f, &t.head)
            }
            Rule::Egd(e) => write!(f, "{} = {}", e.left, e.right),
        }
    }
}

/// A finite list of rules in which no existential variable name occurs in more
/// than one rule.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RuleSet {
    rules: Vec<Rule>,
}

impl RuleSet {
    /// Builds a rule set, renaming existential variables apart where a name is
    /// shared with another rule.
    pub fn new(mut rules: Vec<Rule>) -> Self {
        let mut used: HashSet<Symbol> = rules.iter().flat_map(Rule::all_variables).collect();
        for i in 0..rules.len() {
            let existentials = rules[i].existentials().to_vec();
            for w in existentials {
                let clash = rules
                    .iter()
                    .enumerate()
                    .any(|(j, r)| j != i && r.all_variables().contains(&w));
                if !clash {
                    continue;
                }
                let fresh = (1..)
                    .map(|n| Symbol::new(format!("{}{}", w, n)))
                    .find(|s| !used.contains(s))
                    .expect("unbounded name supply");
                used.insert(fresh.clone());
                rules[i].rename_variable(&w, &fresh);
            }
        }
        RuleSet { rules }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rule> {
        self.rules.iter()
    }

    pub fn has_egds(&self) -> bool {
        self.rules.iter().any(Rule::is_egd)
    }

    /// Predicates other than `≈`, in order of first appearance.
    pub fn predicates(&self) -> Vec<Predicate> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for r in &self.rules {
            let head: &[Atom] = match r {
                Rule::Tgd(t) => &t.head,
                Rule::Egd(_) => &[],
            };
            for a in r.body().iter().chain(head) {
                if !a.predicate.is_equality() && seen.insert(a.predicate.clone()) {
                    out.push(a.predicate.clone());
                }
            }
        }
        out
    }

    /// Number of TGDs with at least one existential variable.
    pub fn existential_tgd_count(&self) -> usize {
        self.rules
            .iter()
            .filter(|r| r.as_tgd().is_some_and(Tgd::has_existentials))
            .count()
    }

    pub fn egd_count(&self) -> usize {
        self.rules.iter().filter(|r| r.is_egd()).count()
    }
}

impl<'a> IntoIterator for &'a RuleSet {
    type Item = &'a Rule;
    type IntoIter = std::slice::Iter<'a, Rule>;

    fn into_iter(self) -> Self::IntoIter {
        self.rules.iter()
    }
}

/// A TGD whose existentials have been replaced by Skolem terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkolemisedTgd {
    pub index: usize,
    pub body: Vec<Atom>,
    pub head: Vec<Atom>,
    pub symbols: Vec<SkolemSymbol>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SkolemisedRule {
    Tgd(SkolemisedTgd),
    Egd(Egd),
}

/// The skolemisation of a rule set together with its Skolem symbol table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkolemisedRuleSet {
    pub rules: Vec<SkolemisedRule>,
    pub symbols: Vec<SkolemSymbol>,
}

pub fn skolemise(rules: &RuleSet) -> SkolemisedRuleSet {
    let mut symbols = Vec::new();
    let rules = rules
        .iter()
        .enumerate()
        .map(|(i, r)| match r {
            Rule::Tgd(t) => {
                let sk = t.skolemise(i);
                symbols.extend(sk.symbols.iter().cloned());
                SkolemisedRule::Tgd(sk)
            }
            Rule::Egd(e) => SkolemisedRule::Egd(e.clone()),
        })
        .collect();
    SkolemisedRuleSet { rules, symbols }
}

/// Substitutes `sigma` into every syntactic variable occurrence, including
/// those nested inside Skolem terms.
pub fn apply_syntactic(atoms: &[Atom], sigma: &Substitution) -> Result<Vec<Atom>, ModelError> {
    fn subst(t: &Term, sigma: &Substitution) -> Result<Term, ModelError> {
        match t {
            Term::Constant(_) => Ok(t.clone()),
            Term::Variable(v) => sigma
                .get(v)
                .cloned()
                .ok_or_else(|| ModelError::UnboundVariable(v.clone())),
            Term::Functional(f) => Ok(Term::functional(
                f.symbol().clone(),
                f.args()
                    .iter()
                    .map(|a| subst(a, sigma))
                    .collect::<Result<_, _>>()?,
            )),
        }
    }
    atoms
        .iter()
        .map(|a| {
            Ok(Atom::new(
                a.predicate.clone(),
                a.args
                    .iter()
                    .map(|t| subst(t, sigma))
                    .collect::<Result<_, _>>()?,
            ))
        })
        .collect()
}

/// A Boolean conjunctive query `exists variables . body`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bcq {
    pub variables: Vec<Symbol>,
    pub body: Vec<Atom>,
}

impl Bcq {
    /// A query quantifying every variable of `body`.
    pub fn new(body: Vec<Atom>) -> Self {
        Bcq {
            variables: variables_of(&body),
            body,
        }
    }
}

impl fmt::Display for Bcq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("? ")?;
        if !self.variables.is_empty() {
            f.write_str("exists ")?;
            for (i, v) in self.variables.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", v)?;
            }
            f.write_str(" . ")?;
        }
        write_conjunction(f, &self.body)
    }
}

/// A rule set together with a fact set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ontology {
    pub rules: RuleSet,
    pub facts: Vec<Atom>,
}

impl Ontology {
    pub fn new(rules: RuleSet, facts: Vec<Atom>) -> Self {
        Ontology { rules, facts }
    }
}
