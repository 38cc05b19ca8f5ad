//! Saturation of the critical instance under TGD Skolem steps and EGD
//! replacement images.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::ops::ControlFlow;
use std::time::Instant;

use crate::chase::{Binding, ChaseLimits, CompiledRule, Limit, RuleEngine};
use crate::model::{Atom, AtomSet, Predicate, RuleSet, Substitution, Term};

/// Options for the fixpoint computation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FixpointOptions {
    pub limits: ChaseLimits,
    /// Adds `⋆ = ⋆` to the critical instance. Nothing consumes it, so this
    /// only changes the reported set size.
    pub include_equality: bool,
}

impl FixpointOptions {
    pub fn new(limits: ChaseLimits) -> Self {
        FixpointOptions {
            limits,
            include_equality: false,
        }
    }
}

/// One fact per predicate of `rules` other than `≈`, all arguments `⋆`.
pub fn critical_instance(rules: &RuleSet) -> AtomSet {
    rules
        .predicates()
        .into_iter()
        .map(|p| {
            let n = p.arity();
            Atom::new(p, vec![Term::star(); n])
        })
        .collect()
}

/// How an atom entered the fixpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    Critical,
    /// Head atom of TGD `rule` under `substitution`.
    Tgd {
        rule: usize,
        substitution: Substitution,
    },
    /// `source[from/to]`, licensed by EGD `rule` under `substitution`.
    Rewrite {
        source: Atom,
        from: Term,
        to: Term,
        rule: usize,
        substitution: Substitution,
    },
}

/// A derived atom with its origin; steps are listed parents first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationStep {
    pub atom: Atom,
    pub origin: Origin,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicWitness {
    pub atom: Atom,
    pub term: Term,
    pub derivation: Vec<DerivationStep>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FixpointResult {
    Completed(AtomSet),
    CyclicFound {
        witness: CyclicWitness,
        partial: AtomSet,
    },
    LimitExceeded {
        limit: Limit,
        partial: AtomSet,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FixpointStats {
    /// TGD firings plus EGD matches that registered a rewrite.
    pub steps: u64,
    pub atoms: usize,
}

#[derive(Clone)]
struct Rewrite {
    from: Term,
    to: Term,
    rule: usize,
    substitution: Substitution,
}

struct Saturation<'a> {
    rules: &'a [CompiledRule],
    limits: ChaseLimits,
    started: Instant,
    /// Every atom derived so far.
    all: AtomSet,
    /// Atoms whose consequences have been computed; matches are searched here.
    processed: AtomSet,
    queue: VecDeque<Atom>,
    origins: HashMap<Atom, Origin>,
    rewrites: Vec<Rewrite>,
    registered: BTreeSet<(Term, Term)>,
    by_predicate: HashMap<Predicate, Vec<(usize, usize)>>,
    steps: u64,
}

enum Stop {
    Cyclic(Atom, Term),
    Limit(Limit),
}

impl Saturation<'_> {
    fn add(&mut self, atom: Atom, origin: Origin) -> Result<(), Stop> {
        if self.all.contains(&atom) {
            return Ok(());
        }
        if let Some(cap) = self.limits.max_term_depth {
            if atom.args.iter().any(|t| t.depth() > cap) {
                return Err(Stop::Limit(Limit::TermDepth));
            }
        }
        if self.limits.max_atoms.is_some_and(|m| self.all.len() >= m) {
            return Err(Stop::Limit(Limit::Atoms));
        }
        self.all.insert(atom.clone());
        self.origins.insert(atom.clone(), origin);
        if let Some(t) = atom.args.iter().find(|t| t.is_cyclic()) {
            let t = t.clone();
            return Err(Stop::Cyclic(atom, t));
        }
        self.queue.push_back(atom);
        Ok(())
    }

    fn tick(&mut self) -> Result<(), Stop> {
        if self.limits.max_steps.is_some_and(|m| self.steps >= m) {
            return Err(Stop::Limit(Limit::Steps));
        }
        if self
            .limits
            .wall_clock
            .is_some_and(|t| self.started.elapsed() >= t)
        {
            return Err(Stop::Limit(Limit::WallClock));
        }
        self.steps += 1;
        Ok(())
    }

    fn rewrite_image(&mut self, source: &Atom, rw: &Rewrite) -> Result<(), Stop> {
        if !source.args.contains(&rw.from) {
            return Ok(());
        }
        let args = source
            .args
            .iter()
            .map(|t| {
                if t == &rw.from {
                    rw.to.clone()
                } else {
                    t.clone()
                }
            })
            .collect();
        let image = Atom::new(source.predicate.clone(), args);
        self.add(
            image,
            Origin::Rewrite {
                source: source.clone(),
                from: rw.from.clone(),
                to: rw.to.clone(),
                rule: rw.rule,
                substitution: rw.substitution.clone(),
            },
        )
    }

    fn register(&mut self, rw: Rewrite) -> Result<(), Stop> {
        if rw.from == rw.to || !self.registered.insert((rw.from.clone(), rw.to.clone())) {
            return Ok(());
        }
        self.tick()?;
        let sources: Vec<Atom> = self
            .processed
            .atoms()
            .filter(|a| a.args.contains(&rw.from))
            .collect();
        for s in &sources {
            self.rewrite_image(s, &rw)?;
        }
        self.rewrites.push(rw);
        Ok(())
    }

    fn fire(&mut self, rule: usize, b: &Binding) -> Result<(), Stop> {
        let r = &self.rules[rule];
        let substitution = r.substitution(b);
        if let Some((x, y)) = r.equated(b) {
            let (dx, dy) = (x.depth(), y.depth());
            if dx <= dy {
                self.register(Rewrite {
                    from: y.clone(),
                    to: x.clone(),
                    rule,
                    substitution: substitution.clone(),
                })?;
            }
            if dy <= dx {
                self.register(Rewrite {
                    from: x,
                    to: y,
                    rule,
                    substitution,
                })?;
            }
            return Ok(());
        }
        self.tick()?;
        for (p, args) in r.head_atoms(b) {
            self.add(
                Atom::new(p, args),
                Origin::Tgd {
                    rule,
                    substitution: substitution.clone(),
                },
            )?;
        }
        Ok(())
    }

    fn process(&mut self, atom: Atom) -> Result<(), Stop> {
        self.processed.insert(atom.clone());
        let rewrites = self.rewrites.clone();
        for rw in &rewrites {
            self.rewrite_image(&atom, rw)?;
        }
        let positions = self
            .by_predicate
            .get(&atom.predicate)
            .cloned()
            .unwrap_or_default();
        for (rule, pos) in positions {
            let mut found: Vec<Binding> = Vec::new();
            let _ = self.rules[rule].matches_seeded(&self.processed, pos, &atom.args, &mut |b| {
                found.push(b.clone());
                ControlFlow::Continue(())
            });
            for b in &found {
                self.fire(rule, b)?;
            }
        }
        Ok(())
    }

    fn derivation(&self, target: &Atom) -> Vec<DerivationStep> {
        let mut out = Vec::new();
        let mut seen: BTreeSet<Atom> = BTreeSet::new();
        self.collect(target, &mut seen, &mut out);
        out
    }

    fn parents(&self, origin: &Origin) -> Vec<Atom> {
        match origin {
            Origin::Critical => Vec::new(),
            Origin::Tgd { rule, substitution }
            | Origin::Rewrite {
                rule, substitution, ..
            } => {
                let r = &self.rules[*rule];
                let b = r.binding_of(substitution).expect("recorded binding");
                let mut p = r.body_image(&b);
                if let Origin::Rewrite { source, .. } = origin {
                    p.push(source.clone());
                }
                p
            }
        }
    }

    fn collect(&self, atom: &Atom, seen: &mut BTreeSet<Atom>, out: &mut Vec<DerivationStep>) {
        // iterative post-order so deep derivations cannot overflow the stack
        let mut stack: Vec<(Atom, bool)> = vec![(atom.clone(), false)];
        while let Some((a, expanded)) = stack.pop() {
            if expanded {
                out.push(DerivationStep {
                    origin: self.origins[&a].clone(),
                    atom: a,
                });
                continue;
            }
            if !seen.insert(a.clone()) {
                continue;
            }
            stack.push((a.clone(), true));
            for p in self.parents(&self.origins[&a]).into_iter().rev() {
                if !seen.contains(&p) {
                    stack.push((p, false));
                }
            }
        }
    }
}

/// The least set containing the critical instance and closed under the TGD
/// and EGD clauses. Stops at the first atom with a cyclic term.
pub fn emfa_set(rules: &RuleSet, options: &FixpointOptions) -> (FixpointResult, FixpointStats) {
    let engine = RuleEngine::new(rules);
    let compiled = engine.compiled();
    let mut by_predicate: HashMap<Predicate, Vec<(usize, usize)>> = HashMap::new();
    for (i, r) in compiled.iter().enumerate() {
        for (pos, p) in r.body_predicates().enumerate() {
            by_predicate.entry(p.clone()).or_default().push((i, pos));
        }
    }
    let mut s = Saturation {
        rules: compiled,
        limits: options.limits,
        started: Instant::now(),
        all: AtomSet::new(),
        processed: AtomSet::new(),
        queue: VecDeque::new(),
        origins: HashMap::new(),
        rewrites: Vec::new(),
        registered: BTreeSet::new(),
        by_predicate,
        steps: 0,
    };
    let mut ci = critical_instance(rules);
    if options.include_equality {
        ci.insert(Atom::new(
            Predicate::equality(),
            vec![Term::star(), Term::star()],
        ));
    }
    let run = |s: &mut Saturation<'_>| -> Result<(), Stop> {
        for a in ci.atoms() {
            s.add(a, Origin::Critical)?;
        }
        while let Some(a) = s.queue.pop_front() {
            s.process(a)?;
        }
        Ok(())
    };
    let outcome = run(&mut s);
    let stats = FixpointStats {
        steps: s.steps,
        atoms: s.all.len(),
    };
    let result = match outcome {
        Ok(()) => FixpointResult::Completed(s.all),
        Err(Stop::Cyclic(atom, term)) => {
            let derivation = s.derivation(&atom);
            FixpointResult::CyclicFound {
                witness: CyclicWitness {
                    atom,
                    term,
                    derivation,
                },
                partial: s.all,
            }
        }
        Err(Stop::Limit(limit)) => FixpointResult::LimitExceeded {
            limit,
            partial: s.all,
        },
    };
    (result, stats)
}

/// Re-derives a witness from the critical instance, checking every step
/// against the rules. Returns the set built by the replay.
pub fn replay(rules: &RuleSet, derivation: &[DerivationStep]) -> Result<AtomSet, String> {
    let engine = RuleEngine::new(rules);
    let compiled = engine.compiled();
    let ci = critical_instance(rules);
    let mut set = AtomSet::new();
    for step in derivation {
        let ok = match &step.origin {
            Origin::Critical => ci.contains(&step.atom),
            Origin::Tgd { rule, substitution } => {
                let r = compiled.get(*rule).ok_or("unknown rule")?;
                let b = r.binding_of(substitution).map_err(|e| e.to_string())?;
                !r.is_egd()
                    && r.body_image(&b).iter().all(|a| set.contains(a))
                    && r.head_atoms(&b)
                        .into_iter()
                        .any(|(p, args)| Atom::new(p, args) == step.atom)
            }
            Origin::Rewrite {
                source,
                from,
                to,
                rule,
                substitution,
            } => {
                let r = compiled.get(*rule).ok_or("unknown rule")?;
                let b = r.binding_of(substitution).map_err(|e| e.to_string())?;
                let licensed = r.equated(&b).is_some_and(|(x, y)| {
                    (from == &y && to == &x && x.depth() <= y.depth())
                        || (from == &x && to == &y && y.depth() <= x.depth())
                });
                let image: Vec<Term> = source
                    .args
                    .iter()
                    .map(|t| if t == from { to.clone() } else { t.clone() })
                    .collect();
                licensed
                    && r.body_image(&b).iter().all(|a| set.contains(a))
                    && set.contains(source)
                    && Atom::new(source.predicate.clone(), image) == step.atom
            }
        };
        if !ok {
            return Err(format!("step deriving {} does not replay", step.atom));
        }
        set.insert(step.atom.clone());
    }
    Ok(set)
}
