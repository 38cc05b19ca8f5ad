use std::collections::{btree_map, BTreeMap, BTreeSet};
use std::fmt;

use super::term::{Symbol, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PredicateKind {
    Ordinary,
    /// The built-in equality `≈`.
    Equality,
    /// The fresh predicate `E` that replaces `≈` in axiomatised rule sets.
    AxiomEquality,
}

/// Reserved concrete name of the axiomatised equality predicate.
pub const AXIOM_EQUALITY_NAME: &str = "eq";
pub const EQUALITY_NAME: &str = "=";

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Predicate {
    name: Symbol,
    arity: usize,
    kind: PredicateKind,
}

impl Predicate {
    pub fn new(name: impl AsRef<str>, arity: usize) -> Self {
        Predicate {
            name: Symbol::new(name),
            arity,
            kind: PredicateKind::Ordinary,
        }
    }

    pub fn equality() -> Self {
        Predicate {
            name: Symbol::new(EQUALITY_NAME),
            arity: 2,
            kind: PredicateKind::Equality,
        }
    }

    pub fn axiom_equality() -> Self {
        Predicate {
            name: Symbol::new(AXIOM_EQUALITY_NAME),
            arity: 2,
            kind: PredicateKind::AxiomEquality,
        }
    }

    pub fn name(&self) -> &Symbol {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn kind(&self) -> PredicateKind {
        self.kind
    }

    pub fn is_equality(&self) -> bool {
        self.kind == PredicateKind::Equality
    }

    pub fn is_axiom_equality(&self) -> bool {
        self.kind == PredicateKind::AxiomEquality
    }
}

impl fmt::Debug for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name.as_str())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: Predicate,
    pub args: Vec<Term>,
}

impl Atom {
    /// Panics if the argument count differs from the predicate arity.
    pub fn new(predicate: Predicate, args: Vec<Term>) -> Self {
        assert_eq!(
            predicate.arity(),
            args.len(),
            "arity mismatch for predicate {:?}",
            predicate
        );
        Atom { predicate, args }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    /// Variable arguments, left to right, repeats included.
    pub fn variables(&self) -> impl Iterator<Item = &Symbol> {
        self.args.iter().filter_map(Term::as_variable)
    }

    /// Argument-level rewriting: each top-level argument in the domain of `map`
    /// is replaced by its image; nested subterms are left alone.
    pub fn rewrite(&self, map: &GroundRewriting) -> Atom {
        Atom {
            predicate: self.predicate.clone(),
            args: self
                .args
                .iter()
                .map(|t| map.get(t).cloned().unwrap_or_else(|| t.clone()))
                .collect(),
        }
    }

    pub fn starred(&self) -> Atom {
        Atom {
            predicate: self.predicate.clone(),
            args: self.args.iter().map(Term::starred).collect(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.predicate.is_equality() {
            return write!(f, "{} = {}", self.args[0], self.args[1]);
        }
        write!(f, "{}(", self.predicate)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", a)?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite map from variables to ground terms.
pub type Substitution = BTreeMap<Symbol, Term>;

/// A finite map from ground terms to ground terms, applied at argument level.
pub type GroundRewriting = BTreeMap<Term, Term>;

/// A set of atoms, grouped by predicate and kept in term order so iteration
/// is deterministic.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct AtomSet {
    relations: BTreeMap<Predicate, BTreeSet<Vec<Term>>>,
    len: usize,
}

impl AtomSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn insert(&mut self, atom: Atom) -> bool {
        self.insert_parts(atom.predicate, atom.args)
    }

    pub fn insert_parts(&mut self, predicate: Predicate, args: Vec<Term>) -> bool {
        let added = self.relations.entry(predicate).or_default().insert(args);
        if added {
            self.len += 1;
        }
        added
    }

    pub fn remove(&mut self, atom: &Atom) -> bool {
        self.remove_parts(&atom.predicate, &atom.args)
    }

    pub fn remove_parts(&mut self, predicate: &Predicate, args: &[Term]) -> bool {
        let Some(rel) = self.relations.get_mut(predicate) else {
            return false;
        };
        let removed = rel.remove(args);
        if removed {
            self.len -= 1;
            if rel.is_empty() {
                self.relations.remove(predicate);
            }
        }
        removed
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.contains_parts(&atom.predicate, &atom.args)
    }

    pub fn contains_parts(&self, predicate: &Predicate, args: &[Term]) -> bool {
        self.relations
            .get(predicate)
            .is_some_and(|rel| rel.contains(args))
    }

    /// All argument tuples stored for `predicate`.
    pub fn relation(&self, predicate: &Predicate) -> Option<&BTreeSet<Vec<Term>>> {
        self.relations.get(predicate)
    }

    pub fn predicates(&self) -> impl Iterator<Item = &Predicate> {
        self.relations.keys()
    }

    /// Tuples of `predicate` whose first argument is `first`.
    pub fn with_first<'a>(
        &'a self,
        predicate: &Predicate,
        first: &'a Term,
    ) -> impl Iterator<Item = &'a Vec<Term>> + 'a {
        self.relations
            .get(predicate)
            .into_iter()
            .flat_map(move |rel| {
                rel.range(vec![first.clone()]..)
                    .take_while(move |args| args.first() == Some(first))
            })
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter {
            outer: self.relations.iter(),
            inner: None,
        }
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        self.iter().map(|(p, args)| Atom {
            predicate: p.clone(),
            args: args.to_vec(),
        })
    }

    /// Distinct terms occurring as predicate arguments, in term order.
    pub fn terms(&self) -> BTreeSet<Term> {
        self.iter()
            .flat_map(|(_, args)| args.iter().cloned())
            .collect()
    }

    /// Largest depth of any argument term (0 for the empty set).
    pub fn max_depth(&self) -> usize {
        self.iter()
            .flat_map(|(_, args)| args.iter().map(Term::depth))
            .max()
            .unwrap_or(0)
    }

    pub fn has_cyclic_term(&self) -> bool {
        self.iter()
            .any(|(_, args)| args.iter().any(Term::is_cyclic))
    }

    pub fn is_subset(&self, other: &AtomSet) -> bool {
        self.iter().all(|(p, args)| other.contains_parts(p, args))
    }

    /// Applies `map` to every atom at argument level; the result is a set, so
    /// atoms that become equal collapse.
    pub fn rewrite(&self, map: &GroundRewriting) -> AtomSet {
        self.atoms().map(|a| a.rewrite(map)).collect()
    }

    /// Replaces every top-level argument occurrence of `from` by `to`, in place.
    /// Returns the number of atoms touched.
    pub fn replace_term(&mut self, from: &Term, to: &Term) -> usize {
        let touched: Vec<(Predicate, Vec<Term>)> = self
            .iter()
            .filter(|(_, args)| args.contains(from))
            .map(|(p, args)| (p.clone(), args.to_vec()))
            .collect();
        let n = touched.len();
        self.rewrite_tuples(touched, from, to);
        n
    }

    /// Like [`replace_term`](Self::replace_term), returning the rewritten
    /// atoms that were not already present.
    pub fn replace_term_tracked(&mut self, from: &Term, to: &Term) -> Vec<Atom> {
        let touched: Vec<(Predicate, Vec<Term>)> = self
            .iter()
            .filter(|(_, args)| args.contains(from))
            .map(|(p, args)| (p.clone(), args.to_vec()))
            .collect();
        self.rewrite_tuples(touched, from, to)
    }

    fn rewrite_tuples(
        &mut self,
        touched: Vec<(Predicate, Vec<Term>)>,
        from: &Term,
        to: &Term,
    ) -> Vec<Atom> {
        for (p, args) in &touched {
            self.remove_parts(p, args);
        }
        let mut added = Vec::new();
        for (p, args) in touched {
            let args: Vec<Term> = args
                .into_iter()
                .map(|t| if &t == from { to.clone() } else { t })
                .collect();
            if self.insert_parts(p.clone(), args.clone()) {
                added.push(Atom { predicate: p, args });
            }
        }
        added
    }
}

/// Applies `map` argument-level to a single atom or a set, deduplicating.
pub fn apply_term_map(atoms: &AtomSet, map: &GroundRewriting) -> AtomSet {
    atoms.rewrite(map)
}

pub struct Iter<'a> {
    outer: btree_map::Iter<'a, Predicate, BTreeSet<Vec<Term>>>,
    inner: Option<(
        &'a Predicate,
        std::collections::btree_set::Iter<'a, Vec<Term>>,
    )>,
}

impl<'a> Iterator for Iter<'a> {
    type Item = (&'a Predicate, &'a [Term]);

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some((p, it)) = &mut self.inner {
                if let Some(args) = it.next() {
                    return Some((p, args.as_slice()));
                }
            }
            let (p, rel) = self.outer.next()?;
            self.inner = Some((p, rel.iter()));
        }
    }
}

impl FromIterator<Atom> for AtomSet {
    fn from_iter<I: IntoIterator<Item = Atom>>(iter: I) -> Self {
        let mut set = AtomSet::new();
        set.extend(iter);
        set
    }
}

impl Extend<Atom> for AtomSet {
    fn extend<I: IntoIterator<Item = Atom>>(&mut self, iter: I) {
        for a in iter {
            self.insert(a);
        }
    }
}

impl fmt::Debug for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.atoms()).finish()
    }
}

impl fmt::Display for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in self.atoms() {
            writeln!(f, "{} .", a)?;
        }
        Ok(())
    }
}
