//! The `linre` command-line driver.
//!
//! Every subcommand reads and writes text documents (JSON with decimal
//! strings for big integers). Exit codes:
//!
//! | code | meaning                                             |
//! |------|-----------------------------------------------------|
//! | 0    | success                                             |
//! | 1    | internal error                                      |
//! | 2    | bad input (arguments, files, documents)             |
//! | 3    | alphabet budget or expansion cap exceeded           |
//! | 4    | a verification suite or report found a failure      |
//! | 5    | a bounded search ended without a solution           |

use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::encode::{self, build_encoder, Encoder, SuiteReport};
use crate::error::{Error, Result};
use crate::format::{self, MatricesDoc, MatrixDoc};
use crate::matsem;
use crate::poly::Polynomial;
use crate::solve::{
    self, diophantine_oracle, equivalence_report, solve_one_unknown, solve_two_unknowns,
    LevelSelect, MatrixMonoid, MorphismMonoid, ReportConfig,
};
use crate::Limits;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_BAD_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_SUITE_FAILED: i32 = 4;
pub const EXIT_EXHAUSTED: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "linre",
    version,
    about = "Polynomial pairs to M-triples, morphisms and matrices"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Maximum number of runs in any materialized word.
    #[arg(long, global = true, env = "LINRE_EXPANSION_CAP", default_value_t = Limits::DEFAULT_EXPANSION_CAP)]
    pub expansion_cap: usize,

    /// Maximum number of letters in any constructed alphabet.
    #[arg(long, global = true, env = "LINRE_ALPHABET_BUDGET", default_value_t = Limits::DEFAULT_ALPHABET_BUDGET)]
    pub alphabet_budget: usize,

    /// Rendering of results; documents are always JSON.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Human)]
    pub format: OutputFormat,

    /// Write the output here instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Human,
    Machine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    Matrix,
    Morphism,
    Both,
}

impl From<LevelArg> for LevelSelect {
    fn from(l: LevelArg) -> Self {
        match l {
            LevelArg::Matrix => LevelSelect::Matrix,
            LevelArg::Morphism => LevelSelect::Morphism,
            LevelArg::Both => LevelSelect::Both,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Definition,
    Lemma5,
    Lemma6,
    Functoriality,
}

/// Polynomials given as files (JSON or text) or inline text.
#[derive(Debug, Args)]
pub struct PolyArgs {
    /// Left polynomial: a file path or inline text such as `x2`.
    #[arg(long = "p")]
    pub p: String,
    /// Right polynomial: a file path or inline text such as `x3^2`.
    #[arg(long = "q")]
    pub q: String,
    /// Arity; required when either polynomial is text.
    #[arg(short = 't', long = "arity")]
    pub t: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the encoder document for a polynomial pair.
    Compile(PolyArgs),
    /// Dump the matrices M1 and M2 of an encoder.
    Matrices {
        #[arg(long)]
        encoder: PathBuf,
    },
    /// Brute-force search for p(n, s, ·) = q(n, s, ·) in {1..bound}^(t-2).
    Oracle {
        #[arg(long, conflicts_with_all = ["p", "q"])]
        encoder: Option<PathBuf>,
        #[arg(long = "p", requires = "q")]
        p: Option<String>,
        #[arg(long = "q", requires = "p")]
        q: Option<String>,
        #[arg(short = 't', long = "arity")]
        t: Option<usize>,
        #[arg(short = 'n')]
        n: u64,
        #[arg(short = 's')]
        s: u64,
        #[arg(long, default_value_t = 5)]
        bound: u64,
    },
    /// Bounded search for a nonannihilating solution of the equation at (n, s).
    Solve {
        #[arg(long)]
        encoder: PathBuf,
        #[arg(short = 'n')]
        n: u64,
        #[arg(short = 's')]
        s: u64,
        #[arg(long, default_value_t = 12)]
        max_len: usize,
        /// 1 solves `a·x = b·x`, 2 solves `a·x = b·y`.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        unknowns: u8,
        #[arg(long, value_enum, default_value_t = LevelArg::Matrix)]
        level: LevelArg,
    },
    /// Run a verification suite on an encoder.
    Verify {
        #[arg(long)]
        encoder: PathBuf,
        #[arg(long, value_enum)]
        suite: Suite,
        /// Largest exponent tried by the definition and lemma5 suites.
        #[arg(long, default_value_t = 2)]
        bound: u64,
        /// Longest generator word tried by the lemma6 and functoriality suites.
        #[arg(long)]
        max_len: Option<usize>,
    },
    /// Compare the oracle with the bounded solvers over ranges of (n, s).
    Report {
        #[arg(long)]
        encoder: PathBuf,
        /// A value `3` or an inclusive range `1..3`.
        #[arg(short = 'n', default_value = "1", value_parser = parse_range)]
        n: RangeInclusive<u64>,
        #[arg(short = 's', default_value = "1..9", value_parser = parse_range)]
        s: RangeInclusive<u64>,
        #[arg(long, default_value_t = 5)]
        bound: u64,
        #[arg(long, default_value_t = 12)]
        max_len: usize,
        #[arg(long, value_enum, default_value_t = LevelArg::Matrix)]
        level: LevelArg,
    },
}

fn parse_range(text: &str) -> std::result::Result<RangeInclusive<u64>, String> {
    let parse = |s: &str| s.trim().parse::<u64>().map_err(|e| format!("`{s}`: {e}"));
    let range = match text.split_once("..") {
        Some((a, b)) => parse(a)?..=parse(b.trim_start_matches('='))?,
        None => {
            let v = parse(text)?;
            v..=v
        }
    };
    if *range.start() == 0 || range.is_empty() {
        return Err(format!(
            "`{text}` must be a nonempty range of positive integers"
        ));
    }
    Ok(range)
}

/// What a command produced, before rendering.
struct Output {
    text: String,
    code: i32,
}

impl Output {
    fn ok(text: String) -> Self {
        Output {
            text,
            code: EXIT_OK,
        }
    }
}

/// Maps a library error to its exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ExpansionCap { .. } | Error::AlphabetBudget { .. } => EXIT_BUDGET,
        Error::InvalidInput(_)
        | Error::Parse(_)
        | Error::Io(_)
        | Error::Json(_)
        | Error::ArityMismatch { .. }
        | Error::AlphabetMismatch(_)
        | Error::NotDisjoint(_) => EXIT_BAD_INPUT,
        Error::DimensionMismatch(_) => EXIT_INTERNAL,
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_BAD_INPUT
            } else {
                EXIT_OK
            };
        }
    };
    match dispatch(&config) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("linre: error: {e}");
            exit_code(&e)
        }
    }
}

pub fn main() -> i32 {
    run(std::env::args_os())
}

/// Runs one parsed command, writing its output, and returns the exit code.
pub fn dispatch(config: &RunConfig) -> Result<i32> {
    if config.expansion_cap == 0 {
        return Err(Error::invalid("the expansion cap must be at least 1"));
    }
    let limits = Limits::default()
        .with_expansion_cap(config.expansion_cap)
        .with_alphabet_budget(config.alphabet_budget);
    let out = execute(config, &limits)?;
    match &config.output {
        Some(path) => fs::write(path, &out.text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            let written = stdout
                .write_all(out.text.as_bytes())
                .and_then(|()| stdout.flush());
            match written {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                other => other?,
            }
        }
    }
    Ok(out.code)
}

fn render<T: Serialize + std::fmt::Display>(value: &T, format: OutputFormat) -> String {
    match format {
        OutputFormat::Human => with_newline(value.to_string()),
        OutputFormat::Machine => with_newline(format::to_json(value)),
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

/// Reads a polynomial argument: an existing file is read, anything else
/// is taken as inline text.
fn read_polynomial(arg: &str, arity: Option<usize>) -> Result<Polynomial> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("cannot read `{arg}`: {e}")))?;
        format::polynomial_from_str(&text, arity)
    } else {
        format::polynomial_from_str(arg, arity)
    }
}

fn execute(config: &RunConfig, limits: &Limits) -> Result<Output> {
    let cap = limits.expansion_cap;
    match &config.command {
        Command::Compile(args) => {
            let p = read_polynomial(&args.p, args.t)?;
            let q = read_polynomial(&args.q, args.t.or(Some(p.arity())))?;
            let enc = build_encoder(&p, &q, limits)?;
            Ok(Output::ok(with_newline(format::encoder_to_json(&enc))))
        }
        Command::Matrices { encoder } => {
            let enc = format::read_encoder(encoder)?;
            let (m1, m2) = enc.matrices();
            let doc = MatricesDoc {
                letters: enc.alphabet().names().to_vec(),
                m1: MatrixDoc::from(m1),
                m2: MatrixDoc::from(m2),
            };
            Ok(Output::ok(with_newline(format::to_json(&doc))))
        }
        Command::Oracle {
            encoder,
            p,
            q,
            t,
            n,
            s,
            bound,
        } => {
            let (p, q) = match (encoder, p, q) {
                (Some(path), _, _) => {
                    let enc = format::read_encoder(path)?;
                    (enc.p().clone(), enc.q().clone())
                }
                (None, Some(p), Some(q)) => {
                    let p = read_polynomial(p, *t)?;
                    let q = read_polynomial(q, t.or(Some(p.arity())))?;
                    (p, q)
                }
                _ => return Err(Error::invalid("oracle needs --encoder or both --p and --q")),
            };
            let tuple = diophantine_oracle(&p, &q, *n, *s, *bound)?;
            let text = match config.format {
                OutputFormat::Machine => with_newline(format::to_json(&OracleDoc {
                    n: *n,
                    s: *s,
                    bound: *bound,
                    tuple: tuple.clone(),
                })),
                OutputFormat::Human => match &tuple {
                    Some(rest) => format!("n = {n}, s = {s}: solved by {rest:?}\n"),
                    None => format!(
                        "n = {n}, s = {s}: no solution in {{1..{bound}}}^{}\n",
                        p.arity() - 2
                    ),
                },
            };
            let code = if tuple.is_some() {
                EXIT_OK
            } else {
                EXIT_EXHAUSTED
            };
            Ok(Output { text, code })
        }
        Command::Solve {
            encoder,
            n,
            s,
            max_len,
            unknowns,
            level,
        } => {
            let enc = format::read_encoder(encoder)?;
            let result = solve_at(&enc, *n, *s, *max_len, *unknowns, *level, cap)?;
            let code = if result.found() {
                EXIT_OK
            } else {
                EXIT_EXHAUSTED
            };
            Ok(Output {
                text: render(&result, config.format),
                code,
            })
        }
        Command::Verify {
            encoder,
            suite,
            bound,
            max_len,
        } => {
            let enc = format::read_encoder(encoder)?;
            let report = run_suite(&enc, *suite, *bound, *max_len, cap)?;
            let code = if report.passed() {
                EXIT_OK
            } else {
                EXIT_SUITE_FAILED
            };
            Ok(Output {
                text: render(&report, config.format),
                code,
            })
        }
        Command::Report {
            encoder,
            n,
            s,
            bound,
            max_len,
            level,
        } => {
            let enc = format::read_encoder(encoder)?;
            let report = equivalence_report(
                &enc,
                &ReportConfig {
                    n_range: n.clone(),
                    s_range: s.clone(),
                    oracle_bound: *bound,
                    max_len: *max_len,
                    level: (*level).into(),
                    cap,
                },
            )?;
            let text = match config.format {
                OutputFormat::Human => with_newline(report.to_human()),
                OutputFormat::Machine => with_newline(report.to_machine()),
            };
            let code = if report.all_agree() {
                EXIT_OK
            } else {
                EXIT_SUITE_FAILED
            };
            Ok(Output { text, code })
        }
    }
}

#[derive(Serialize)]
struct OracleDoc {
    n: u64,
    s: u64,
    bound: u64,
    tuple: Option<Vec<u64>>,
}

/// Solves `f_{n,s}·x = g_{n,s}·x` (or `·y`) at the chosen level.
pub fn solve_at(
    enc: &Encoder,
    n: u64,
    s: u64,
    max_len: usize,
    unknowns: u8,
    level: LevelArg,
    cap: usize,
) -> Result<solve::SolveResult> {
    let fw = Encoder::f_ns_word(n, s)?;
    let gw = Encoder::g_ns_word(n, s)?;
    match level {
        LevelArg::Matrix => {
            let monoid = MatrixMonoid::of_encoder(enc);
            let (m1, m2) = enc.matrices();
            let k = matsem::word_matrix_from(m1, m2, &fw);
            let m = matsem::word_matrix_from(m1, m2, &gw);
            if unknowns == 1 {
                solve_one_unknown(&monoid, &k, &m, max_len)
            } else {
                solve_two_unknowns(&monoid, &k, &m, max_len)
            }
        }
        LevelArg::Morphism => {
            let monoid = MorphismMonoid { encoder: enc, cap };
            let a = monoid.element(&fw)?;
            let b = monoid.element(&gw)?;
            if unknowns == 1 {
                solve_one_unknown(&monoid, &a, &b, max_len)
            } else {
                solve_two_unknowns(&monoid, &a, &b, max_len)
            }
        }
        LevelArg::Both => Err(Error::invalid("solve runs one level; use report for both")),
    }
}

/// Runs a named suite with its default sizes.
pub fn run_suite(
    enc: &Encoder,
    suite: Suite,
    bound: u64,
    max_len: Option<usize>,
    cap: usize,
) -> Result<SuiteReport> {
    match suite {
        Suite::Definition => encode::definition_suite(enc, bound, cap),
        Suite::Lemma5 => encode::lemma5_suite(enc, bound, bound, cap),
        Suite::Lemma6 => encode::lemma6_suite(enc, max_len.unwrap_or(3), cap),
        Suite::Functoriality => matsem::functoriality_suite(enc, max_len.unwrap_or(6), cap),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_parse() {
        assert_eq!(parse_range("3").unwrap(), 3..=3);
        assert_eq!(parse_range("1..9").unwrap(), 1..=9);
        assert_eq!(parse_range("2..=4").unwrap(), 2..=4);
        assert!(parse_range("0..2").is_err());
        assert!(parse_range("5..2").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn usage_errors_are_bad_input() {
        assert_eq!(run(["linre", "solve"]), EXIT_BAD_INPUT);
        assert_eq!(run(["linre", "frobnicate"]), EXIT_BAD_INPUT);
        assert_eq!(run(["linre", "--help"]), EXIT_OK);
    }

    #[test]
    fn error_codes() {
        let cap = Error::ExpansionCap {
            cap: 1,
            context: String::new(),
        };
        assert_eq!(exit_code(&cap), EXIT_BUDGET);
        assert_eq!(exit_code(&Error::Parse("x".into())), EXIT_BAD_INPUT);
    }
}
