//! EMFA and MFA membership: saturate the critical instance and look for a
//! cyclic term, i.e. `f(u⃗)` with `f` occurring inside `u⃗`.

mod fixpoint;

pub use fixpoint::{
    critical_instance, emfa_set, replay, CyclicWitness, DerivationStep, FixpointOptions,
    FixpointResult, FixpointStats, Origin,
};

use std::fmt;
use std::time::{Duration, Instant};

use serde_json::{json, Value};
use thiserror::Error;

use crate::axiomatisation::{canonical_singularisation, singularisations, standard_axiomatisation};
use crate::model::{Rule, RuleSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AcyclicityError {
    #[error("MFA applies to TGD sets; rule {0} uses equality")]
    NotEqualityFree(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Notion {
    Emfa,
    /// MFA of a TGD set given directly.
    Mfa,
    MfaSt,
    MfaSing,
    MfaSingAll,
}

impl Notion {
    pub fn as_str(&self) -> &'static str {
        match self {
            Notion::Emfa => "emfa",
            Notion::Mfa => "mfa",
            Notion::MfaSt => "mfa-st",
            Notion::MfaSing => "mfa-sing",
            Notion::MfaSingAll => "mfa-sing-all",
        }
    }
}

impl fmt::Display for Notion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Acyclic,
    Cyclic(Box<CyclicWitness>),
    /// Name of the bound that stopped the check.
    LimitExceeded(String),
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Acyclic => "acyclic",
            Verdict::Cyclic(_) => "cyclic",
            Verdict::LimitExceeded(_) => "limit-exceeded",
        }
    }

    pub fn is_acyclic(&self) -> bool {
        matches!(self, Verdict::Acyclic)
    }

    pub fn is_cyclic(&self) -> bool {
        matches!(self, Verdict::Cyclic(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub notion: Notion,
    pub verdict: Verdict,
    /// Atoms in the fixpoint, or at the point the check stopped.
    pub set_size: usize,
    pub elapsed: Duration,
    pub steps: u64,
}

impl CheckReport {
    /// `{notion, verdict, witness?, set_size, elapsed_ms, steps}`; with
    /// `timing` off, `elapsed_ms` is null so output is reproducible.
    pub fn to_json(&self, timing: bool) -> Value {
        let mut v = json!({
            "notion": self.notion.as_str(),
            "verdict": self.verdict.as_str(),
            "set_size": self.set_size,
            "elapsed_ms": if timing { json!(self.elapsed.as_secs_f64() * 1000.0) } else { Value::Null },
            "steps": self.steps,
        });
        if let Verdict::Cyclic(w) = &self.verdict {
            v["witness"] = json!({
                "atom": w.atom.to_string(),
                "term": w.term.to_string(),
                "derivation_length": w.derivation.len(),
            });
        }
        if let Verdict::LimitExceeded(limit) = &self.verdict {
            v["limit"] = json!(limit);
        }
        v
    }
}

fn report(rules: &RuleSet, notion: Notion, options: &FixpointOptions) -> CheckReport {
    let started = Instant::now();
    let (result, stats) = emfa_set(rules, options);
    let verdict = match result {
        FixpointResult::Completed(_) => Verdict::Acyclic,
        FixpointResult::CyclicFound { witness, .. } => Verdict::Cyclic(Box::new(witness)),
        FixpointResult::LimitExceeded { limit, .. } => Verdict::LimitExceeded(limit.to_string()),
    };
    CheckReport {
        notion,
        verdict,
        set_size: stats.atoms,
        elapsed: started.elapsed(),
        steps: stats.steps,
    }
}

pub fn is_emfa(rules: &RuleSet, options: &FixpointOptions) -> CheckReport {
    report(rules, Notion::Emfa, options)
}

/// MFA of an equality-free TGD set (`eq` counts as an ordinary predicate).
pub fn is_mfa(tgds: &RuleSet, options: &FixpointOptions) -> Result<CheckReport, AcyclicityError> {
    mfa_as(tgds, Notion::Mfa, options)
}

fn mfa_as(
    tgds: &RuleSet,
    notion: Notion,
    options: &FixpointOptions,
) -> Result<CheckReport, AcyclicityError> {
    if let Some(i) = tgds.iter().position(|r| match r {
        Rule::Egd(_) => true,
        Rule::Tgd(t) => t
            .body
            .iter()
            .chain(&t.head)
            .any(|a| a.predicate.is_equality()),
    }) {
        return Err(AcyclicityError::NotEqualityFree(i));
    }
    Ok(report(tgds, notion, options))
}

pub fn mfa_st(rules: &RuleSet, options: &FixpointOptions) -> CheckReport {
    let st = standard_axiomatisation(rules);
    mfa_as(&st.tgds, Notion::MfaSt, options).expect("St(R) is equality-free")
}

pub fn mfa_sing(rules: &RuleSet, options: &FixpointOptions) -> CheckReport {
    let sing = canonical_singularisation(rules);
    mfa_as(&sing.tgds, Notion::MfaSing, options).expect("Sing(R) is equality-free")
}

/// MFA over up to `cap` members of `Sing(R)`: acyclic as soon as one member
/// is MFA, cyclic if every member is enumerated and none is.
pub fn mfa_sing_all(rules: &RuleSet, options: &FixpointOptions, cap: usize) -> CheckReport {
    let started = Instant::now();
    let mut steps = 0;
    let mut set_size = 0;
    let mut first_cyclic = None;
    let mut limit = None;
    let mut exhausted = true;
    for (i, s) in singularisations(rules).enumerate() {
        if i >= cap {
            exhausted = false;
            break;
        }
        let r = mfa_as(&s.tgds, Notion::MfaSingAll, options).expect("Sing(R) is equality-free");
        steps += r.steps;
        set_size = r.set_size;
        match r.verdict {
            Verdict::Acyclic => {
                return CheckReport {
                    notion: Notion::MfaSingAll,
                    verdict: Verdict::Acyclic,
                    set_size,
                    elapsed: started.elapsed(),
                    steps,
                }
            }
            Verdict::Cyclic(w) => {
                first_cyclic.get_or_insert(w);
            }
            Verdict::LimitExceeded(l) => {
                limit.get_or_insert(l);
            }
        }
    }
    let verdict = match (limit, first_cyclic, exhausted) {
        (None, Some(w), true) => Verdict::Cyclic(w),
        (Some(l), _, _) => Verdict::LimitExceeded(l),
        _ => Verdict::LimitExceeded("sing-cap".to_string()),
    };
    CheckReport {
        notion: Notion::MfaSingAll,
        verdict,
        set_size,
        elapsed: started.elapsed(),
        steps,
    }
}

/// EMFA of `R`, MFA of `St(R)`, MFA of the canonical singularisation and,
/// with `sing_cap`, MFA over enumerated singularisations. The first three run
/// concurrently.
pub fn check_pipeline(
    rules: &RuleSet,
    options: &FixpointOptions,
    sing_cap: Option<usize>,
) -> Vec<CheckReport> {
    let (emfa, (st, sing)) = rayon::join(
        || is_emfa(rules, options),
        || rayon::join(|| mfa_st(rules, options), || mfa_sing(rules, options)),
    );
    let mut out = vec![emfa, st, sing];
    if let Some(cap) = sing_cap {
        out.push(mfa_sing_all(rules, options, cap));
    }
    out
}
