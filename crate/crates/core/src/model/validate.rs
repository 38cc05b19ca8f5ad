//! Well-formedness checks for ontologies and queries.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use super::atom::{Atom, Predicate};
use super::rule::{variables_of, Bcq, Ontology, Rule, RuleSet};
use super::term::{Symbol, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Location {
    RuleSet,
    Rule(usize),
    Fact(usize),
    Query(usize),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::RuleSet => f.write_str("rule set"),
            Location::Rule(i) => write!(f, "rule {}", i + 1),
            Location::Fact(i) => write!(f, "fact {}", i + 1),
            Location::Query(i) => write!(f, "query {}", i + 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub location: Location,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ValidationOptions {
    /// Permit the axiomatised equality predicate, as found in the output of
    /// the equality axiomatisations.
    pub allow_axiom_equality: bool,
}

impl ValidationOptions {
    pub fn axiomatised() -> Self {
        ValidationOptions {
            allow_axiom_equality: true,
        }
    }
}

struct Checker {
    options: ValidationOptions,
    out: Vec<Violation>,
    arities: BTreeMap<Symbol, (usize, Location)>,
}

impl Checker {
    fn report(&mut self, location: Location, message: impl Into<String>) {
        self.out.push(Violation {
            location,
            message: message.into(),
        });
    }

    fn check_arity(&mut self, p: &Predicate, location: Location) {
        if p.is_equality() {
            return;
        }
        match self.arities.get(p.name()) {
            Some(&(arity, first)) if arity != p.arity() => self.report(
                location,
                format!(
                    "predicate {} used with arity {} but with arity {} at {}",
                    p.name(),
                    p.arity(),
                    arity,
                    first
                ),
            ),
            Some(_) => {}
            None => {
                self.arities.insert(p.name().clone(), (p.arity(), location));
            }
        }
    }

    fn check_predicate(&mut self, p: &Predicate, location: Location, what: &str) {
        if p.is_equality() {
            self.report(location, format!("{} must be equality-free", what));
        } else if p.is_axiom_equality() && !self.options.allow_axiom_equality {
            self.report(
                location,
                format!("{} uses the reserved predicate {}", what, p.name()),
            );
        }
        self.check_arity(p, location);
    }

    /// Bodies, heads and query bodies: variables only, no equality.
    fn check_pattern(&mut self, atoms: &[Atom], location: Location, what: &str) {
        if atoms.is_empty() {
            self.report(location, format!("{} must be non-empty", what));
        }
        for a in atoms {
            self.check_predicate(&a.predicate, location, what);
            for t in &a.args {
                match t {
                    Term::Variable(_) => {}
                    Term::Constant(c) => {
                        self.report(location, format!("{} contains constant {}", what, c))
                    }
                    Term::Functional(_) => {
                        self.report(location, format!("{} contains functional term {}", what, t))
                    }
                }
            }
        }
    }

    fn check_rule(&mut self, rule: &Rule, location: Location) {
        self.check_pattern(rule.body(), location, "rule body");
        let body_vars: HashSet<Symbol> = rule.universal_variables().into_iter().collect();
        match rule {
            Rule::Tgd(t) => {
                self.check_pattern(&t.head, location, "rule head");
                let mut seen = HashSet::new();
                for w in &t.existentials {
                    if !seen.insert(w) {
                        self.report(location, format!("existential variable {} is repeated", w));
                    }
                    if body_vars.contains(w) {
                        self.report(
                            location,
                            format!("existential variable {} also occurs in the body", w),
                        );
                    }
                }
                for v in variables_of(&t.head) {
                    if !body_vars.contains(&v) && !t.existentials.contains(&v) {
                        self.report(
                            location,
                            format!("head variable {} is neither in the body nor existential", v),
                        );
                    }
                }
            }
            Rule::Egd(e) => {
                for v in [&e.left, &e.right] {
                    if !body_vars.contains(v) {
                        self.report(
                            location,
                            format!("equated variable {} does not occur in the body", v),
                        );
                    }
                }
            }
        }
    }

    fn check_rules(&mut self, rules: &RuleSet) {
        if rules.is_empty() {
            self.report(Location::RuleSet, "rule set is empty");
        }
        let mut owner: BTreeMap<Symbol, usize> = BTreeMap::new();
        for (i, r) in rules.iter().enumerate() {
            self.check_rule(r, Location::Rule(i));
            for w in r.existentials() {
                if let Some(j) = owner.insert(w.clone(), i) {
                    self.report(
                        Location::Rule(i),
                        format!(
                            "existential variable {} also quantified in rule {}",
                            w,
                            j + 1
                        ),
                    );
                }
            }
        }
        for (i, r) in rules.iter().enumerate() {
            for v in r.all_variables() {
                if let Some(&j) = owner.get(&v) {
                    if j != i {
                        self.report(
                            Location::Rule(i),
                            format!("variable {} is existential in rule {}", v, j + 1),
                        );
                    }
                }
            }
        }
    }

    fn check_query(&mut self, q: &Bcq, location: Location) {
        self.check_pattern(&q.body, location, "query");
        let quantified: HashSet<&Symbol> = q.variables.iter().collect();
        for v in variables_of(&q.body) {
            if !quantified.contains(&v) {
                self.report(location, format!("query variable {} is not quantified", v));
            }
        }
    }
}

/// Checks an ontology; an empty result means it is well formed.
pub fn validate(ontology: &Ontology) -> Vec<Violation> {
    validate_with(ontology, ValidationOptions::default())
}

pub fn validate_with(ontology: &Ontology, options: ValidationOptions) -> Vec<Violation> {
    let mut c = Checker {
        options,
        out: Vec::new(),
        arities: BTreeMap::new(),
    };
    c.check_rules(&ontology.rules);
    let rule_preds: HashSet<Predicate> = ontology.rules.predicates().into_iter().collect();
    for (i, fact) in ontology.facts.iter().enumerate() {
        let loc = Location::Fact(i);
        if fact.predicate.is_equality() {
            c.report(loc, "facts must be equality-free");
            continue;
        }
        c.check_predicate(&fact.predicate, loc, "fact");
        if !fact.args.iter().all(Term::is_constant) {
            c.report(loc, "fact arguments must be constants");
        }
        if !rule_preds.contains(&fact.predicate) {
            c.report(
                loc,
                format!(
                    "fact predicate {} does not occur in the rules",
                    fact.predicate.name()
                ),
            );
        }
    }
    c.out
}

/// Checks a rule set on its own.
pub fn validate_rules(rules: &RuleSet, options: ValidationOptions) -> Vec<Violation> {
    let mut c = Checker {
        options,
        out: Vec::new(),
        arities: BTreeMap::new(),
    };
    c.check_rules(rules);
    c.out
}

/// Checks a query: constant- and equality-free, every variable quantified.
pub fn validate_query(query: &Bcq, options: ValidationOptions) -> Vec<Violation> {
    let mut c = Checker {
        options,
        out: Vec::new(),
        arities: BTreeMap::new(),
    };
    c.check_query(query, Location::Query(0));
    c.out
}
