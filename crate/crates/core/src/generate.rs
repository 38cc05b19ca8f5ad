//! Random rule sets, fact sets, queries and EP-complete atom sets.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{
    validate_query, validate_rules, Atom, AtomSet, Bcq, Egd, Predicate, Rule, RuleSet,
    SkolemSymbol, Symbol, Term, Tgd, ValidationOptions,
};

/// Size bounds for generated rule sets.
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub max_rules: usize,
    pub max_predicates: usize,
    pub max_arity: usize,
    pub max_body: usize,
    pub max_head: usize,
    /// Probability that a rule is an EGD, when its body allows one.
    pub egd_probability: f64,
    /// Probability that a TGD gets an existential variable.
    pub existential_probability: f64,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            max_rules: 4,
            max_predicates: 3,
            max_arity: 2,
            max_body: 2,
            max_head: 2,
            egd_probability: 0.3,
            existential_probability: 0.6,
        }
    }
}

const PREDICATE_NAMES: [&str; 6] = ["A", "B", "C", "R", "S", "T"];
const VARIABLES: [&str; 3] = ["X", "Y", "Z"];

/// A signature of at most `shape.max_predicates` predicates with arities in
/// `1..=shape.max_arity`; at least one predicate is binary when that is allowed.
pub fn signature<R: Rng>(rng: &mut R, shape: &Shape) -> Vec<Predicate> {
    let n = rng.gen_range(1..=shape.max_predicates.clamp(1, PREDICATE_NAMES.len()));
    let mut out: Vec<Predicate> = PREDICATE_NAMES[..n]
        .iter()
        .map(|name| Predicate::new(name, rng.gen_range(1..=shape.max_arity.max(1))))
        .collect();
    if shape.max_arity >= 2 && out.iter().all(|p| p.arity() < 2) {
        let last = out.len() - 1;
        out[last] = Predicate::new(PREDICATE_NAMES[last], 2);
    }
    out
}

fn random_atom<R: Rng>(rng: &mut R, preds: &[Predicate], vars: &[Symbol]) -> Atom {
    let p = preds.choose(rng).expect("non-empty signature").clone();
    let args = (0..p.arity())
        .map(|_| Term::Variable(vars.choose(rng).expect("variables").clone()))
        .collect();
    Atom::new(p, args)
}

fn random_rule<R: Rng>(rng: &mut R, preds: &[Predicate], shape: &Shape) -> Rule {
    let pool: Vec<Symbol> = VARIABLES.iter().map(Symbol::new).collect();
    let body: Vec<Atom> = (0..rng.gen_range(1..=shape.max_body.max(1)))
        .map(|_| random_atom(rng, preds, &pool))
        .collect();
    let body_vars = crate::model::variables_of(&body);
    if body_vars.len() >= 2 && rng.gen_bool(shape.egd_probability) {
        let pair: Vec<&Symbol> = body_vars.choose_multiple(rng, 2).collect();
        return Rule::Egd(Egd::new(body, pair[0].clone(), pair[1].clone()));
    }
    let mut head_vars = body_vars.clone();
    let existential = rng.gen_bool(shape.existential_probability);
    let w = Symbol::new("W");
    if existential {
        head_vars.push(w.clone());
    }
    let mut head: Vec<Atom> = (0..rng.gen_range(1..=shape.max_head.max(1)))
        .map(|_| random_atom(rng, preds, &head_vars))
        .collect();
    let mentions_w = head
        .iter()
        .any(|a| a.args.contains(&Term::Variable(w.clone())));
    if existential && !mentions_w {
        // put the existential into the last head atom
        let last = head.last_mut().expect("non-empty head");
        let i = rng.gen_range(0..last.args.len());
        last.args[i] = Term::Variable(w.clone());
    }
    let existentials = if existential { vec![w] } else { vec![] };
    Rule::Tgd(Tgd::new(body, existentials, head))
}

/// A valid rule set within `shape`.
pub fn rule_set<R: Rng>(rng: &mut R, shape: &Shape) -> RuleSet {
    loop {
        let preds = signature(rng, shape);
        let n = rng.gen_range(1..=shape.max_rules.max(1));
        let rules = RuleSet::new((0..n).map(|_| random_rule(rng, &preds, shape)).collect());
        if validate_rules(&rules, ValidationOptions::default()).is_empty() {
            return rules;
        }
    }
}

fn constants(n: usize) -> Vec<Term> {
    (0..n)
        .map(|i| Term::constant(((b'a' + (i % 26) as u8) as char).to_string()))
        .collect()
}

/// Up to `max_facts` ground atoms over `preds` and `n_constants` constants.
pub fn facts<R: Rng>(
    rng: &mut R,
    preds: &[Predicate],
    n_constants: usize,
    max_facts: usize,
) -> Vec<Atom> {
    let cs = constants(n_constants.max(1));
    let mut out = AtomSet::new();
    for _ in 0..rng.gen_range(1..=max_facts.max(1)) {
        let p = preds.choose(rng).expect("non-empty signature").clone();
        let args = (0..p.arity())
            .map(|_| cs.choose(rng).expect("constants").clone())
            .collect();
        out.insert(Atom::new(p, args));
    }
    out.atoms().collect()
}

/// A constant-free BCQ with up to `max_atoms` atoms.
pub fn query<R: Rng>(rng: &mut R, preds: &[Predicate], max_atoms: usize) -> Bcq {
    let pool: Vec<Symbol> = VARIABLES.iter().map(Symbol::new).collect();
    loop {
        let body: Vec<Atom> = (0..rng.gen_range(1..=max_atoms.max(1)))
            .map(|_| random_atom(rng, preds, &pool))
            .collect();
        let q = Bcq::new(body);
        if validate_query(&q, ValidationOptions::default()).is_empty() {
            return q;
        }
    }
}

/// An EP-complete atom set over up to `max_terms` terms: the `E`-atoms form
/// a random equivalence, and a few ordinary atoms use the same terms.
pub fn ep_complete_set<R: Rng>(rng: &mut R, max_terms: usize) -> AtomSet {
    let n = rng.gen_range(1..=max_terms.max(1));
    let f = SkolemSymbol::for_existential(0, &Symbol::new("W"), 1);
    let g = SkolemSymbol::for_existential(1, &Symbol::new("V"), 2);
    let mut terms: Vec<Term> = Vec::new();
    let base = constants(n);
    for i in 0..n {
        let t = match rng.gen_range(0..4) {
            0 | 1 => base[i].clone(),
            2 => Term::functional(f.clone(), vec![base[rng.gen_range(0..n)].clone()]),
            _ => {
                let inner = Term::functional(f.clone(), vec![base[rng.gen_range(0..n)].clone()]);
                Term::functional(g.clone(), vec![inner, base[rng.gen_range(0..n)].clone()])
            }
        };
        if !terms.contains(&t) {
            terms.push(t);
        }
    }
    let class: Vec<usize> = terms
        .iter()
        .map(|_| rng.gen_range(0..terms.len()))
        .collect();
    let e = Predicate::axiom_equality();
    let mut out = AtomSet::new();
    for (i, t) in terms.iter().enumerate() {
        for (j, u) in terms.iter().enumerate() {
            if class[i] == class[j] {
                out.insert(Atom::new(e.clone(), vec![t.clone(), u.clone()]));
            }
        }
    }
    let r = Predicate::new("R", 2);
    let a = Predicate::new("A", 1);
    for _ in 0..rng.gen_range(0..=terms.len()) {
        let t = terms.choose(rng).expect("terms").clone();
        let u = terms.choose(rng).expect("terms").clone();
        out.insert(Atom::new(r.clone(), vec![t.clone(), u]));
        out.insert(Atom::new(a.clone(), vec![t]));
    }
    out
}
