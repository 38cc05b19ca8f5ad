//! Chase sequences under resource limits.

use std::fmt;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::engine::{Effect, RuleEngine};
use super::homomorphism::{homomorphism, Binding};
use super::ChaseError;
use crate::model::{validate_query, AtomSet, Bcq, Ontology, Substitution, Term, ValidationOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChaseLimits {
    pub max_steps: Option<u64>,
    pub max_atoms: Option<usize>,
    pub max_term_depth: Option<usize>,
    pub wall_clock: Option<Duration>,
}

impl ChaseLimits {
    pub fn unbounded() -> Self {
        ChaseLimits {
            max_steps: None,
            max_atoms: None,
            max_term_depth: None,
            wall_clock: None,
        }
    }

    pub fn with_max_depth(mut self, depth: usize) -> Self {
        self.max_term_depth = Some(depth);
        self
    }

    pub fn with_max_steps(mut self, steps: u64) -> Self {
        self.max_steps = Some(steps);
        self
    }

    pub fn with_max_atoms(mut self, atoms: usize) -> Self {
        self.max_atoms = Some(atoms);
        self
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.wall_clock = Some(timeout);
        self
    }

    pub fn is_bounded(&self) -> bool {
        self.max_steps.is_some()
            || self.max_atoms.is_some()
            || self.max_term_depth.is_some()
            || self.wall_clock.is_some()
    }
}

impl Default for ChaseLimits {
    /// Depth 10, 10^6 atoms, 10^6 steps, 60 s.
    fn default() -> Self {
        ChaseLimits {
            max_steps: Some(1_000_000),
            max_atoms: Some(1_000_000),
            max_term_depth: Some(10),
            wall_clock: Some(Duration::from_secs(60)),
        }
    }
}

/// Which bound stopped a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Limit {
    Steps,
    Atoms,
    TermDepth,
    WallClock,
}

impl fmt::Display for Limit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Limit::Steps => "max-steps",
            Limit::Atoms => "max-atoms",
            Limit::TermDepth => "max-depth",
            Limit::WallClock => "timeout",
        })
    }
}

/// Order in which applicable pairs are applied.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    /// Rounds against a snapshot: EGD pairs first, then TGD pairs, each group
    /// in rule order then match order.
    #[default]
    Rounds,
    /// As `Rounds`, but every application is immediately followed by the TGDs
    /// with existentials that its new atoms trigger (one level, no cascade).
    ExistentialEager,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ChaseConfig {
    pub limits: ChaseLimits,
    pub strategy: Strategy,
    /// Shuffles the EGD and TGD groups of every round.
    pub seed: Option<u64>,
}

impl ChaseConfig {
    pub fn new(limits: ChaseLimits) -> Self {
        ChaseConfig {
            limits,
            ..Default::default()
        }
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ChaseStats {
    pub steps: u64,
    pub tgd_applications: u64,
    pub egd_applications: u64,
    pub rounds: u64,
    pub max_term_depth: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChaseOutcome {
    Terminated {
        result: AtomSet,
        stats: ChaseStats,
    },
    LimitExceeded {
        partial: AtomSet,
        limit: Limit,
        stats: ChaseStats,
    },
}

impl ChaseOutcome {
    pub fn atoms(&self) -> &AtomSet {
        match self {
            ChaseOutcome::Terminated { result, .. } => result,
            ChaseOutcome::LimitExceeded { partial, .. } => partial,
        }
    }

    pub fn stats(&self) -> &ChaseStats {
        match self {
            ChaseOutcome::Terminated { stats, .. } | ChaseOutcome::LimitExceeded { stats, .. } => {
                stats
            }
        }
    }

    pub fn is_terminated(&self) -> bool {
        matches!(self, ChaseOutcome::Terminated { .. })
    }
}

/// Callback for [`chase_observed`], given each step and the set after it.
pub type Observer<'a> = &'a mut dyn FnMut(&ChaseStep<'_>, &AtomSet);

/// One application, as reported to observers.
#[derive(Clone, Debug)]
pub struct ChaseStep<'a> {
    pub index: u64,
    pub rule: usize,
    pub substitution: Substitution,
    pub effect: &'a Effect,
    /// Fired by the eager follow-up of [`Strategy::ExistentialEager`].
    pub eager: bool,
}

struct Runner<'a> {
    engine: RuleEngine,
    atoms: AtomSet,
    config: ChaseConfig,
    stats: ChaseStats,
    started: Instant,
    observer: Option<Observer<'a>>,
}

impl Runner<'_> {
    fn check_clock(&self) -> Result<(), Limit> {
        match self.config.limits.wall_clock {
            Some(t) if self.started.elapsed() >= t => Err(Limit::WallClock),
            _ => Ok(()),
        }
    }

    /// Applies `binding` of rule `rule` if still applicable. Limits are checked
    /// before the set changes, so the partial state respects them.
    fn step(&mut self, rule: usize, mut binding: Binding, eager: bool) -> Result<bool, Limit> {
        let r = &self.engine.compiled()[rule];
        if !r.applicable(&mut binding, &self.atoms) {
            return Ok(false);
        }
        let limits = self.config.limits;
        if limits.max_steps.is_some_and(|m| self.stats.steps >= m) {
            return Err(Limit::Steps);
        }
        self.check_clock()?;
        if !r.is_egd() {
            let head = r.head_atoms(&binding);
            if let Some(cap) = limits.max_term_depth {
                let deepest = head
                    .iter()
                    .flat_map(|(_, args)| args.iter().map(Term::depth))
                    .max()
                    .unwrap_or(0);
                if deepest > cap {
                    return Err(Limit::TermDepth);
                }
            }
            if let Some(cap) = limits.max_atoms {
                let fresh = head
                    .iter()
                    .filter(|(p, args)| !self.atoms.contains_parts(p, args))
                    .count();
                if self.atoms.len() + fresh > cap {
                    return Err(Limit::Atoms);
                }
            }
        }
        let effect = r.fire(&binding, &mut self.atoms);
        self.stats.steps += 1;
        match &effect {
            Effect::Added(added) => {
                self.stats.tgd_applications += 1;
                let d = added
                    .iter()
                    .flat_map(|a| a.args.iter().map(Term::depth))
                    .max()
                    .unwrap_or(0);
                self.stats.max_term_depth = self.stats.max_term_depth.max(d);
            }
            Effect::Merged { .. } => self.stats.egd_applications += 1,
        }
        if let Some(obs) = self.observer.as_mut() {
            let step = ChaseStep {
                index: self.stats.steps,
                rule,
                substitution: r.substitution(&binding),
                effect: &effect,
                eager,
            };
            obs(&step, &self.atoms);
        }
        if self.config.strategy == Strategy::ExistentialEager && !eager {
            let seeds = effect.new_atoms();
            if !seeds.is_empty() {
                let mut follow = Vec::new();
                for (j, cr) in self.engine.compiled().iter().enumerate() {
                    if cr.has_existentials() {
                        for b in cr.seeded_triggers(&self.atoms, seeds) {
                            follow.push((j, b));
                        }
                    }
                }
                for (j, b) in follow {
                    self.step(j, b, true)?;
                }
            }
        }
        Ok(true)
    }

    fn run(&mut self) -> Result<(), Limit> {
        let mut rng = self.config.seed.map(ChaCha8Rng::seed_from_u64);
        loop {
            self.check_clock()?;
            let mut egds = Vec::new();
            let mut tgds = Vec::new();
            for (i, r) in self.engine.compiled().iter().enumerate() {
                let group = if r.is_egd() { &mut egds } else { &mut tgds };
                group.extend(r.triggers(&self.atoms).into_iter().map(|b| (i, b)));
            }
            if egds.is_empty() && tgds.is_empty() {
                return Ok(());
            }
            if let Some(rng) = rng.as_mut() {
                egds.shuffle(rng);
                tgds.shuffle(rng);
            }
            self.stats.rounds += 1;
            for (i, b) in egds.into_iter().chain(tgds) {
                self.step(i, b, false)?;
            }
        }
    }
}

/// Runs the chase of `ontology`; the result is the final set of the sequence.
pub fn chase(ontology: &Ontology, config: &ChaseConfig) -> ChaseOutcome {
    chase_observed(ontology, config, None)
}

/// As [`chase`], calling `observer` after every application with the new set.
pub fn chase_observed(
    ontology: &Ontology,
    config: &ChaseConfig,
    observer: Option<Observer<'_>>,
) -> ChaseOutcome {
    let atoms: AtomSet = ontology.facts.iter().cloned().collect();
    let mut runner = Runner {
        engine: RuleEngine::new(&ontology.rules),
        stats: ChaseStats {
            max_term_depth: atoms.max_depth(),
            ..Default::default()
        },
        atoms,
        config: *config,
        started: Instant::now(),
        observer,
    };
    match runner.run() {
        Ok(()) => ChaseOutcome::Terminated {
            result: runner.atoms,
            stats: runner.stats,
        },
        Err(limit) => ChaseOutcome::LimitExceeded {
            partial: runner.atoms,
            limit,
            stats: runner.stats,
        },
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EntailmentVerdict {
    Entailed(Substitution),
    NotEntailed,
    /// The chase hit `limit` and the partial set has no witness.
    Unknown {
        limit: Limit,
        stats: ChaseStats,
    },
}

impl EntailmentVerdict {
    pub fn is_entailed(&self) -> bool {
        matches!(self, EntailmentVerdict::Entailed(_))
    }
}

/// Decides `ontology ⊨ query` by homomorphism into a chase. A witness found in
/// a partial set is reported as entailed: rules and queries are constant-free,
/// so later steps (merges included) map it onward.
pub fn entails(
    ontology: &Ontology,
    query: &Bcq,
    config: &ChaseConfig,
) -> Result<EntailmentVerdict, ChaseError> {
    let violations = validate_query(query, ValidationOptions::axiomatised());
    if !violations.is_empty() {
        return Err(ChaseError::InvalidQuery(violations));
    }
    let outcome = chase(ontology, config);
    let witness = homomorphism(&query.body, outcome.atoms());
    Ok(match (witness, outcome) {
        (Some(w), _) => EntailmentVerdict::Entailed(w),
        (None, ChaseOutcome::Terminated { .. }) => EntailmentVerdict::NotEntailed,
        (None, ChaseOutcome::LimitExceeded { limit, stats, .. }) => {
            EntailmentVerdict::Unknown { limit, stats }
        }
    })
}
