//! Corpus benchmark: one row per rule file, EMFA against MFA of both
//! axiomatisations.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::syntax::{parse, serialize_rules};
use crate::acyclicity::{is_emfa, mfa_sing, mfa_st, CheckReport, FixpointOptions};
use crate::generate::{rule_set, Shape};
use crate::model::RuleSet;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct BenchRow {
    pub id: String,
    pub n_tgd_exist: usize,
    pub n_egd: usize,
    pub emfa_verdict: String,
    pub emfa_ms: Option<f64>,
    pub mfa_st_verdict: String,
    pub mfa_st_ms: Option<f64>,
    pub mfa_sing_verdict: String,
    pub mfa_sing_ms: Option<f64>,
}

fn ms(r: &CheckReport, timing: bool) -> Option<f64> {
    timing.then_some(r.elapsed.as_secs_f64() * 1000.0)
}

pub fn bench_row(id: &str, rules: &RuleSet, options: &FixpointOptions, timing: bool) -> BenchRow {
    let emfa = is_emfa(rules, options);
    let st = mfa_st(rules, options);
    let sing = mfa_sing(rules, options);
    BenchRow {
        id: id.to_string(),
        n_tgd_exist: rules.existential_tgd_count(),
        n_egd: rules.egd_count(),
        emfa_verdict: emfa.verdict.as_str().to_string(),
        emfa_ms: ms(&emfa, timing),
        mfa_st_verdict: st.verdict.as_str().to_string(),
        mfa_st_ms: ms(&st, timing),
        mfa_sing_verdict: sing.verdict.as_str().to_string(),
        mfa_sing_ms: ms(&sing, timing),
    }
}

/// The `.rules` files directly inside `dir`, sorted by name.
pub fn corpus_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "rules"))
        .collect();
    out.sort();
    Ok(out)
}

/// Writes `n` random rule sets into `dir` as `gen_NNNN.rules`.
pub fn generate_corpus(dir: &Path, n: usize, seed: u64) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..n {
        let rules = rule_set(&mut rng, &Shape::default());
        std::fs::write(
            dir.join(format!("gen_{:04}.rules", i)),
            serialize_rules(&rules),
        )?;
    }
    Ok(())
}

/// Benchmarks every file; files are processed in parallel but rows come back
/// in input order. Unparsable files are returned as `(path, message)`.
pub fn run_corpus(
    files: &[PathBuf],
    options: &FixpointOptions,
    timing: bool,
) -> (Vec<BenchRow>, Vec<(PathBuf, String)>) {
    let results: Vec<Result<BenchRow, (PathBuf, String)>> = files
        .par_iter()
        .map(|path| {
            let text = std::fs::read_to_string(path).map_err(|e| (path.clone(), e.to_string()))?;
            let program = parse(&text).map_err(|ds| {
                let msg = ds
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join("; ");
                (path.clone(), msg)
            })?;
            let id = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok(bench_row(&id, &program.rules, options, timing))
        })
        .collect();
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => failed.push(e),
        }
    }
    (rows, failed)
}

pub fn write_csv<W: std::io::Write>(rows: &[BenchRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Default)]
struct Bucket {
    count: usize,
    acyclic: [usize; 3],
    ms: [f64; 3],
}

/// Counts and mean times per (#existential TGDs, #EGDs) bucket.
pub fn summary(rows: &[BenchRow], timing: bool) -> String {
    let mut buckets: BTreeMap<(usize, usize), Bucket> = BTreeMap::new();
    for r in rows {
        let b = buckets.entry((r.n_tgd_exist, r.n_egd)).or_default();
        b.count += 1;
        let cols = [
            (&r.emfa_verdict, r.emfa_ms),
            (&r.mfa_st_verdict, r.mfa_st_ms),
            (&r.mfa_sing_verdict, r.mfa_sing_ms),
        ];
        for (i, (v, t)) in cols.iter().enumerate() {
            if v.as_str() == "acyclic" {
                b.acyclic[i] += 1;
            }
            b.ms[i] += t.unwrap_or(0.0);
        }
    }
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>5} {:>5} {:>6} | {:>14} | {:>14} | {:>14}",
        "#tgd", "#egd", "sets", "emfa", "mfa-st", "mfa-sing"
    );
    for ((t, e), b) in &buckets {
        let cell = |i: usize| {
            if timing {
                format!("{:>4} {:>7.2}ms", b.acyclic[i], b.ms[i] / b.count as f64)
            } else {
                format!("{:>14}", b.acyclic[i])
            }
        };
        let _ = writeln!(
            s,
            "{:>5} {:>5} {:>6} | {} | {} | {}",
            t,
            e,
            b.count,
            cell(0),
            cell(1),
            cell(2)
        );
    }
    let _ = writeln!(
        s,
        "cells: acyclic count{}",
        if timing { ", mean time" } else { "" }
    );
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chase::ChaseLimits;

    #[test]
    fn rows_keep_input_order() {
        let dir = std::env::temp_dir().join(format!("eqchase-bench-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        generate_corpus(&dir, 12, 5).unwrap();
        let files = corpus_files(&dir).unwrap();
        assert_eq!(files.len(), 12);
        let (rows, failed) =
            run_corpus(&files, &FixpointOptions::new(ChaseLimits::default()), false);
        assert!(failed.is_empty());
        let ids: Vec<String> = rows.iter().map(|r| r.id.clone()).collect();
        let expected: Vec<String> = (0..12).map(|i| format!("gen_{:04}", i)).collect();
        assert_eq!(ids, expected);
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "id,n_tgd_exist,n_egd,emfa_verdict,emfa_ms,mfa_st_verdict,mfa_st_ms,mfa_sing_verdict,mfa_sing_ms\n"
        ));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
