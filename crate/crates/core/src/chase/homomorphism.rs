//! Backtracking search for homomorphisms from conjunctions into atom sets.

use std::collections::HashMap;
use std::ops::ControlFlow;

/// Preference key of a pattern atom during search; larger is tried first.
type Rank = (usize, bool, std::cmp::Reverse<usize>);

use crate::model::{Atom, AtomSet, Predicate, Substitution, Symbol, Term};

/// Variable slots of a compiled conjunction.
#[derive(Clone, Debug, Default)]
pub(crate) struct VarTable {
    names: Vec<Symbol>,
    index: HashMap<Symbol, usize>,
}

impl VarTable {
    pub fn slot(&mut self, v: &Symbol) -> usize {
        if let Some(&i) = self.index.get(v) {
            return i;
        }
        let i = self.names.len();
        self.names.push(v.clone());
        self.index.insert(v.clone(), i);
        i
    }

    pub fn get(&self, v: &Symbol) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[Symbol] {
        &self.names
    }

    pub fn to_substitution(&self, binding: &[Option<Term>], upto: usize) -> Substitution {
        self.names[..upto]
            .iter()
            .zip(binding)
            .filter_map(|(n, t)| t.as_ref().map(|t| (n.clone(), t.clone())))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Slot {
    Var(usize),
    Ground(Term),
}

#[derive(Clone, Debug)]
pub(crate) struct PatternAtom {
    pub predicate: Predicate,
    pub args: Vec<Slot>,
}

/// A conjunction compiled against a [`VarTable`].
#[derive(Clone, Debug, Default)]
pub(crate) struct Pattern {
    pub atoms: Vec<PatternAtom>,
}

pub(crate) type Binding = Vec<Option<Term>>;

impl Pattern {
    pub fn compile(atoms: &[Atom], vars: &mut VarTable) -> Pattern {
        Pattern {
            atoms: atoms
                .iter()
                .map(|a| PatternAtom {
                    predicate: a.predicate.clone(),
                    args: a
                        .args
                        .iter()
                        .map(|t| match t {
                            Term::Variable(v) => Slot::Var(vars.slot(v)),
                            other => Slot::Ground(other.clone()),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    /// Enumerates every extension of `binding` that maps all atoms into `set`.
    pub fn search(
        &self,
        set: &AtomSet,
        binding: &mut Binding,
        f: &mut dyn FnMut(&Binding) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let mut done = vec![false; self.atoms.len()];
        self.descend(set, binding, &mut done, self.atoms.len(), f)
    }

    /// Like [`search`](Self::search), with atom `seed` pinned to `tuple`.
    pub fn search_seeded(
        &self,
        set: &AtomSet,
        seed: usize,
        tuple: &[Term],
        binding: &mut Binding,
        f: &mut dyn FnMut(&Binding) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let mut bound = Vec::new();
        if !unify(&self.atoms[seed], tuple, binding, &mut bound) {
            undo(binding, &bound);
            return ControlFlow::Continue(());
        }
        let mut done = vec![false; self.atoms.len()];
        done[seed] = true;
        let r = self.descend(set, binding, &mut done, self.atoms.len() - 1, f);
        undo(binding, &bound);
        r
    }

    /// True iff some extension of `binding` maps the pattern into `set`.
    pub fn exists(&self, set: &AtomSet, binding: &mut Binding) -> bool {
        self.search(set, binding, &mut |_| ControlFlow::Break(()))
            .is_break()
    }

    fn descend(
        &self,
        set: &AtomSet,
        binding: &mut Binding,
        done: &mut [bool],
        remaining: usize,
        f: &mut dyn FnMut(&Binding) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if remaining == 0 {
            return f(binding);
        }
        let Some(next) = self.pick(set, binding, done) else {
            return ControlFlow::Continue(());
        };
        let atom = &self.atoms[next];
        let Some(rel) = set.relation(&atom.predicate) else {
            return ControlFlow::Continue(());
        };
        done[next] = true;
        let first = atom.args.first().and_then(|s| resolve(s, binding)).cloned();
        let mut bound = Vec::new();
        let mut step = |tuple: &Vec<Term>, binding: &mut Binding| -> ControlFlow<()> {
            bound.clear();
            let r = if unify(atom, tuple, binding, &mut bound) {
                self.descend(set, binding, done, remaining - 1, f)
            } else {
                ControlFlow::Continue(())
            };
            undo(binding, &bound);
            r
        };
        let result = match &first {
            Some(t) => {
                let mut r = ControlFlow::Continue(());
                for tuple in set.with_first(&atom.predicate, t) {
                    r = step(tuple, binding);
                    if r.is_break() {
                        break;
                    }
                }
                r
            }
            None => {
                let mut r = ControlFlow::Continue(());
                for tuple in rel {
                    r = step(tuple, binding);
                    if r.is_break() {
                        break;
                    }
                }
                r
            }
        };
        done[next] = false;
        result
    }

    /// Most constrained remaining atom: more bound arguments first, then a
    /// bound first argument, then the smaller relation.
    fn pick(&self, set: &AtomSet, binding: &Binding, done: &[bool]) -> Option<usize> {
        let mut best: Option<(usize, Rank)> = None;
        for (i, atom) in self.atoms.iter().enumerate() {
            if done[i] {
                continue;
            }
            let size = set.relation(&atom.predicate).map_or(0, |r| r.len());
            if size == 0 {
                return Some(i);
            }
            let bound = atom
                .args
                .iter()
                .filter(|s| resolve(s, binding).is_some())
                .count();
            let first = atom
                .args
                .first()
                .is_some_and(|s| resolve(s, binding).is_some());
            let key = (bound, first, std::cmp::Reverse(size));
            if best.as_ref().is_none_or(|(_, k)| key > *k) {
                best = Some((i, key));
            }
        }
        best.map(|(i, _)| i)
    }
}

fn resolve<'a>(slot: &'a Slot, binding: &'a Binding) -> Option<&'a Term> {
    match slot {
        Slot::Var(i) => binding[*i].as_ref(),
        Slot::Ground(t) => Some(t),
    }
}

fn unify(
    atom: &PatternAtom,
    tuple: &[Term],
    binding: &mut Binding,
    bound: &mut Vec<usize>,
) -> bool {
    for (slot, t) in atom.args.iter().zip(tuple) {
        match slot {
            Slot::Ground(g) => {
                if g != t {
                    return false;
                }
            }
            Slot::Var(i) => match &binding[*i] {
                Some(b) => {
                    if b != t {
                        return false;
                    }
                }
                None => {
                    binding[*i] = Some(t.clone());
                    bound.push(*i);
                }
            },
        }
    }
    true
}

fn undo(binding: &mut Binding, bound: &[usize]) {
    for &i in bound {
        binding[i] = None;
    }
}

/// A substitution `σ` over the variables of `body` with `body σ ⊆ atoms`, if any.
pub fn homomorphism(body: &[Atom], atoms: &AtomSet) -> Option<Substitution> {
    let mut vars = VarTable::default();
    let pattern = Pattern::compile(body, &mut vars);
    let mut binding: Binding = vec![None; vars.len()];
    let mut found = None;
    let _ = pattern.search(atoms, &mut binding, &mut |b| {
        found = Some(vars.to_substitution(b, vars.len()));
        ControlFlow::Break(())
    });
    found
}

/// Every substitution `σ` with `body σ ⊆ atoms`.
pub fn all_homomorphisms(body: &[Atom], atoms: &AtomSet) -> Vec<Substitution> {
    let mut vars = VarTable::default();
    let pattern = Pattern::compile(body, &mut vars);
    let mut binding: Binding = vec![None; vars.len()];
    let mut out = Vec::new();
    let _ = pattern.search(atoms, &mut binding, &mut |b| {
        out.push(vars.to_substitution(b, vars.len()));
        ControlFlow::Continue(())
    });
    out
}
