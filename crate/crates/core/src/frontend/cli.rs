//! The `eqchase` command line.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use super::bench::{corpus_files, generate_corpus, run_corpus, summary, write_csv};
use super::syntax::{parse_unchecked, serialize, serialize_rules, Program};
use crate::acyclicity::{
    check_pipeline, is_emfa, mfa_sing, mfa_sing_all, mfa_st, CheckReport, FixpointOptions, Verdict,
};
use crate::axiomatisation::{
    canonical_singularisation, singularisations, standard_axiomatisation, AxiomatisedRuleSet,
};
use crate::chase::{
    chase, entails, ChaseConfig, ChaseLimits, ChaseOutcome, EntailmentVerdict, Strategy,
};
use crate::model::{AtomSet, ValidationOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_LIMIT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "eqchase",
    version,
    about = "Chase, equality axiomatisation and acyclicity checks for existential rules"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Largest term depth the chase or fixpoint may create
    #[arg(long, global = true, default_value_t = 10)]
    pub max_depth: usize,
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub max_atoms: usize,
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub max_steps: u64,
    #[arg(long, global = true, default_value_t = 60_000)]
    pub timeout_ms: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Seeds the chase scheduler and corpus generation
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Leave timings out of the output
    #[arg(long, global = true)]
    pub no_timing: bool,
    #[arg(long, global = true, value_enum, default_value_t = StrategyArg::Rounds)]
    pub strategy: StrategyArg,
    /// Accept the reserved predicate `eq` in input files
    #[arg(long, global = true)]
    pub allow_eq: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategyArg {
    Rounds,
    Eager,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    St,
    Sing,
    SingAll,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum NotionArg {
    Emfa,
    MfaSt,
    MfaSing,
    MfaSingAll,
    All,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and validate input files
    Validate { files: Vec<PathBuf> },
    /// Run the chase on the rules and facts
    Chase {
        files: Vec<PathBuf>,
        #[arg(long)]
        facts: Vec<PathBuf>,
    },
    /// Decide the queries by chasing
    Query {
        files: Vec<PathBuf>,
        #[arg(long)]
        facts: Vec<PathBuf>,
        #[arg(long)]
        queries: Vec<PathBuf>,
    },
    /// Print an equality-free version of the rules
    Axiomatise {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Most singularisations printed by `sing-all`
        #[arg(long, default_value_t = 64)]
        cap: usize,
        files: Vec<PathBuf>,
    },
    /// Acyclicity checks
    Check {
        #[arg(long, value_enum, default_value_t = NotionArg::All)]
        notion: NotionArg,
        /// Most singularisations tried by `mfa-sing-all`
        #[arg(long, default_value_t = 64)]
        sing_cap: usize,
        files: Vec<PathBuf>,
    },
    /// Benchmark every `.rules` file of a directory
    Bench {
        dir: PathBuf,
        /// CSV destination
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fill the directory with this many random rule sets first
        #[arg(long)]
        generate: Option<usize>,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INTERNAL,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::internal(e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

impl GlobalArgs {
    fn limits(&self) -> ChaseLimits {
        ChaseLimits::unbounded()
            .with_max_depth(self.max_depth)
            .with_max_atoms(self.max_atoms)
            .with_max_steps(self.max_steps)
            .with_timeout(Duration::from_millis(self.timeout_ms))
    }

    fn chase_config(&self) -> ChaseConfig {
        let strategy = match self.strategy {
            StrategyArg::Rounds => Strategy::Rounds,
            StrategyArg::Eager => Strategy::ExistentialEager,
        };
        ChaseConfig::new(self.limits())
            .with_strategy(strategy)
            .with_seed(self.seed)
    }

    fn fixpoint(&self) -> FixpointOptions {
        FixpointOptions::new(self.limits())
    }

    fn validation(&self) -> ValidationOptions {
        ValidationOptions {
            allow_axiom_equality: self.allow_eq,
        }
    }
}

fn load(files: &[PathBuf], g: &GlobalArgs) -> Result<Program, Failure> {
    if files.is_empty() {
        return Err(Failure::invalid("no input files"));
    }
    let mut program = Program::default();
    let mut errors = Vec::new();
    for f in files {
        let text = std::fs::read_to_string(f)
            .map_err(|e| Failure::invalid(format!("{}: {}", f.display(), e)))?;
        match parse_unchecked(&text) {
            Ok(p) => program = program.merge(p),
            Err(ds) => errors.extend(ds.iter().map(|d| format!("{}:{}", f.display(), d))),
        }
    }
    if !errors.is_empty() {
        return Err(Failure::invalid(errors.join("\n")));
    }
    // validated as a whole: a facts file alone mentions no rules
    let problems = program.validate(g.validation());
    if !problems.is_empty() {
        let msg = problems
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join("\n");
        return Err(Failure::invalid(msg));
    }
    Ok(program)
}

fn atoms_json(atoms: &AtomSet) -> Value {
    Value::Array(atoms.atoms().map(|a| json!(a.to_string())).collect())
}

fn cmd_validate(files: &[PathBuf], g: &GlobalArgs, out: &mut dyn Write) -> Outcome {
    let p = load(files, g)?;
    match g.format {
        Format::Json => writeln!(
            out,
            "{}",
            json!({"rules": p.rules.len(), "facts": p.facts.len(), "queries": p.queries.len()})
        )?,
        Format::Csv => writeln!(
            out,
            "rules,facts,queries\n{},{},{}",
            p.rules.len(),
            p.facts.len(),
            p.queries.len()
        )?,
        Format::Text => writeln!(
            out,
            "ok: {} rules, {} facts, {} queries",
            p.rules.len(),
            p.facts.len(),
            p.queries.len()
        )?,
    }
    Ok(EXIT_OK)
}

fn cmd_chase(files: &[PathBuf], facts: &[PathBuf], g: &GlobalArgs, out: &mut dyn Write) -> Outcome {
    let all: Vec<PathBuf> = files.iter().chain(facts).cloned().collect();
    let p = load(&all, g)?;
    let outcome = chase(&p.ontology(), &g.chase_config());
    let stats = *outcome.stats();
    let (status, limit) = match &outcome {
        ChaseOutcome::Terminated { .. } => ("terminated", None),
        ChaseOutcome::LimitExceeded { limit, .. } => ("limit-exceeded", Some(limit.to_string())),
    };
    match g.format {
        Format::Json => {
            let mut v = json!({
                "outcome": status,
                "atoms": atoms_json(outcome.atoms()),
                "steps": stats.steps,
                "tgd_applications": stats.tgd_applications,
                "egd_applications": stats.egd_applications,
                "max_term_depth": stats.max_term_depth,
            });
            if let Some(l) = &limit {
                v["limit"] = json!(l);
            }
            writeln!(out, "{}", v)?;
        }
        Format::Csv => {
            writeln!(out, "atom")?;
            for a in outcome.atoms().atoms() {
                writeln!(out, "\"{}\"", a)?;
            }
        }
        Format::Text => {
            for a in outcome.atoms().atoms() {
                writeln!(out, "{} .", a)?;
            }
            write!(
                out,
                "% {}: {} atoms, {} steps, term depth {} (peak {})",
                status,
                outcome.atoms().len(),
                stats.steps,
                outcome.atoms().max_depth(),
                stats.max_term_depth
            )?;
            match &limit {
                Some(l) => writeln!(out, " ({})", l)?,
                None => writeln!(out)?,
            }
        }
    }
    Ok(if outcome.is_terminated() {
        EXIT_OK
    } else {
        EXIT_LIMIT
    })
}

fn cmd_query(
    files: &[PathBuf],
    facts: &[PathBuf],
    queries: &[PathBuf],
    g: &GlobalArgs,
    out: &mut dyn Write,
) -> Outcome {
    let all: Vec<PathBuf> = files.iter().chain(facts).chain(queries).cloned().collect();
    let p = load(&all, g)?;
    if p.queries.is_empty() {
        return Err(Failure::invalid("no queries"));
    }
    let o = p.ontology();
    let config = g.chase_config();
    let mut code = EXIT_OK;
    let mut rows = Vec::new();
    for q in &p.queries {
        let verdict = entails(&o, q, &config).map_err(|e| Failure::invalid(e.to_string()))?;
        let (name, limit) = match &verdict {
            EntailmentVerdict::Entailed(_) => ("entailed", None),
            EntailmentVerdict::NotEntailed => ("not-entailed", None),
            EntailmentVerdict::Unknown { limit, .. } => {
                code = EXIT_LIMIT;
                ("unknown", Some(limit.to_string()))
            }
        };
        rows.push((q.to_string(), name, limit));
    }
    match g.format {
        Format::Json => {
            let arr: Vec<Value> = rows
                .iter()
                .map(|(q, v, l)| {
                    let mut j = json!({"query": q, "verdict": v});
                    if let Some(l) = l {
                        j["limit"] = json!(l);
                    }
                    j
                })
                .collect();
            writeln!(out, "{}", Value::Array(arr))?;
        }
        Format::Csv => {
            writeln!(out, "query,verdict")?;
            for (q, v, _) in &rows {
                writeln!(out, "\"{}\",{}", q, v)?;
            }
        }
        Format::Text => {
            for (q, v, l) in &rows {
                match l {
                    Some(l) => writeln!(out, "{} : {} ({})", q, v, l)?,
                    None => writeln!(out, "{} : {}", q, v)?,
                }
            }
        }
    }
    Ok(code)
}

fn write_axiomatised(
    sets: &[AxiomatisedRuleSet],
    p: &Program,
    g: &GlobalArgs,
    out: &mut dyn Write,
) -> Outcome {
    match g.format {
        Format::Json => {
            let arr: Vec<Value> = sets
                .iter()
                .map(|s| json!(s.tgds.iter().map(|r| r.to_string()).collect::<Vec<_>>()))
                .collect();
            writeln!(out, "{}", Value::Array(arr))?;
        }
        Format::Csv => {
            writeln!(out, "member,rule")?;
            for (i, s) in sets.iter().enumerate() {
                for r in s.tgds.iter() {
                    writeln!(out, "{},\"{}\"", i + 1, r)?;
                }
            }
        }
        Format::Text => {
            for (i, s) in sets.iter().enumerate() {
                if sets.len() > 1 {
                    writeln!(out, "% member {}", i + 1)?;
                }
                let program = Program {
                    rules: s.tgds.clone(),
                    facts: p.facts.clone(),
                    ..Program::default()
                };
                if p.facts.is_empty() {
                    write!(out, "{}", serialize_rules(&program.rules))?;
                } else {
                    write!(out, "{}", serialize(&program))?;
                }
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_axiomatise(
    files: &[PathBuf],
    kind: Kind,
    cap: usize,
    g: &GlobalArgs,
    out: &mut dyn Write,
) -> Outcome {
    let p = load(files, g)?;
    let sets = match kind {
        Kind::St => vec![standard_axiomatisation(&p.rules)],
        Kind::Sing => vec![canonical_singularisation(&p.rules)],
        Kind::SingAll => singularisations(&p.rules).take(cap).collect(),
    };
    write_axiomatised(&sets, &p, g, out)
}

fn write_reports(reports: &[CheckReport], g: &GlobalArgs, out: &mut dyn Write) -> Outcome {
    let timing = !g.no_timing;
    match g.format {
        Format::Json => {
            let arr: Vec<Value> = reports.iter().map(|r| r.to_json(timing)).collect();
            writeln!(out, "{}", Value::Array(arr))?;
        }
        Format::Csv => {
            writeln!(out, "notion,verdict,set_size,elapsed_ms,steps")?;
            for r in reports {
                let ms = if timing {
                    format!("{:.3}", r.elapsed.as_secs_f64() * 1000.0)
                } else {
                    String::new()
                };
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.notion,
                    r.verdict.as_str(),
                    r.set_size,
                    ms,
                    r.steps
                )?;
            }
        }
        Format::Text => {
            for r in reports {
                write!(
                    out,
                    "{}: {} (set size {}, {} steps",
                    r.notion,
                    r.verdict.as_str(),
                    r.set_size,
                    r.steps
                )?;
                if timing {
                    write!(out, ", {:.3} ms", r.elapsed.as_secs_f64() * 1000.0)?;
                }
                writeln!(out, ")")?;
                match &r.verdict {
                    Verdict::Cyclic(w) => writeln!(
                        out,
                        "  witness: {} in {} ({} derivation steps)",
                        w.term,
                        w.atom,
                        w.derivation.len()
                    )?,
                    Verdict::LimitExceeded(l) => writeln!(out, "  stopped by {}", l)?,
                    Verdict::Acyclic => {}
                }
            }
        }
    }
    let limited = reports
        .iter()
        .any(|r| matches!(r.verdict, Verdict::LimitExceeded(_)));
    Ok(if limited { EXIT_LIMIT } else { EXIT_OK })
}

fn cmd_check(
    files: &[PathBuf],
    notion: NotionArg,
    sing_cap: usize,
    g: &GlobalArgs,
    out: &mut dyn Write,
) -> Outcome {
    let p = load(files, g)?;
    let opts = g.fixpoint();
    let reports = match notion {
        NotionArg::Emfa => vec![is_emfa(&p.rules, &opts)],
        NotionArg::MfaSt => vec![mfa_st(&p.rules, &opts)],
        NotionArg::MfaSing => vec![mfa_sing(&p.rules, &opts)],
        NotionArg::MfaSingAll => vec![mfa_sing_all(&p.rules, &opts, sing_cap)],
        NotionArg::All => check_pipeline(&p.rules, &opts, None),
    };
    write_reports(&reports, g, out)
}

fn cmd_bench(
    dir: &Path,
    csv_out: Option<&PathBuf>,
    generate: Option<usize>,
    g: &GlobalArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    if let Some(n) = generate {
        generate_corpus(dir, n, g.seed.unwrap_or(0))?;
    }
    let files =
        corpus_files(dir).map_err(|e| Failure::invalid(format!("{}: {}", dir.display(), e)))?;
    let timing = !g.no_timing;
    let (rows, failed) = run_corpus(&files, &g.fixpoint(), timing);
    for (path, msg) in &failed {
        writeln!(err, "skipped {}: {}", path.display(), msg)?;
    }
    if let Some(path) = csv_out {
        let f = std::fs::File::create(path)?;
        write_csv(&rows, f).map_err(|e| Failure::internal(e.to_string()))?;
    }
    match g.format {
        Format::Csv => write_csv(&rows, &mut *out).map_err(|e| Failure::internal(e.to_string()))?,
        Format::Json => {
            let v = serde_json::to_value(&rows).map_err(|e| Failure::internal(e.to_string()))?;
            writeln!(out, "{}", v)?;
        }
        Format::Text => write!(out, "{}", summary(&rows, timing))?,
    }
    Ok(EXIT_OK)
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let g = &cli.global;
    match &cli.command {
        Command::Validate { files } => cmd_validate(files, g, out),
        Command::Chase { files, facts } => cmd_chase(files, facts, g, out),
        Command::Query {
            files,
            facts,
            queries,
        } => cmd_query(files, facts, queries, g, out),
        Command::Axiomatise { kind, cap, files } => cmd_axiomatise(files, *kind, *cap, g, out),
        Command::Check {
            notion,
            sing_cap,
            files,
        } => cmd_check(files, *notion, *sing_cap, g, out),
        Command::Bench {
            dir,
            out: csv_out,
            generate,
        } => cmd_bench(dir, csv_out.as_ref(), *generate, g, out, err),
    }
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{}", text)
            } else {
                write!(out, "{}", text)
            };
            return code;
        }
    };
    match dispatch(&cli, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
