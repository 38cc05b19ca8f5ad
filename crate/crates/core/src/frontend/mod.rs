//! Text syntax, the command-line driver and the benchmark runner.

mod bench;
mod cli;
mod syntax;

pub use bench::{
    bench_row, corpus_files, generate_corpus, run_corpus, summary, write_csv, BenchRow,
};
pub use cli::{run, Cli, EXIT_INTERNAL, EXIT_INVALID, EXIT_LIMIT, EXIT_OK};
pub use syntax::{
    parse, parse_unchecked, parse_with, serialize, serialize_rules, Diagnostic, DiagnosticKind,
    Pos, Program,
};
