//! Command-line front end. Output goes to the supplied writers so the whole
//! program can be driven from tests.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::conditions::{check_all, CheckReport, ConditionSummary, Witness};
use crate::error::Error;
use crate::io::{
    matrix_to_csv, matrix_to_json, parse_matrix, parse_tree_json, tree_to_dot, tree_to_json, MatrixFormat,
};
use crate::oracle::{count_realizations, random_weighted_tree, RealizationCensus, DEFAULT_CAP};
use crate::reconstruct::{reconstruct, UnrealizableWitness};
use crate::scalar::Policy;
use crate::tree::{all_pairs_weights, WeightedTree};

pub mod exit {
    pub const OK: i32 = 0;
    pub const NOT_REALIZABLE: i32 = 1;
    pub const INVALID_INPUT: i32 = 2;
    pub const UNIQUENESS_FALSIFIED: i32 = 3;
}

#[derive(Debug, Parser)]
#[command(name = "tree-realize", version, about = "Recognize tree metrics and rebuild their trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Test the realizability conditions and list every witness.
    Check(CommonArgs),
    /// Rebuild the tree on 1..=n realizing a matrix.
    Reconstruct(CommonArgs),
    /// All-pairs path weights of a tree given as JSON.
    Weights(CommonArgs),
    /// Count realizing trees by enumerating every labeled topology.
    Oracle {
        #[command(flatten)]
        common: CommonArgs,
        /// Largest n the enumeration accepts.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Random weighted tree together with its matrix.
    Gen {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(short = 'n')]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "0.001")]
        wmin: String,
        #[arg(long, default_value = "10")]
        wmax: String,
    },
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Input file, or "-" for standard input.
    #[arg(short, long, default_value = "-")]
    input: String,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    /// Relative tolerance, float mode only.
    #[arg(long)]
    eps: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Dot,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Check,
    Reconstruct,
    Weights,
    Oracle,
    Gen,
}

impl Task {
    fn name(self) -> &'static str {
        match self {
            Task::Check => "check",
            Task::Reconstruct => "reconstruct",
            Task::Weights => "weights",
            Task::Oracle => "oracle",
            Task::Gen => "gen",
        }
    }

    fn formats(self) -> &'static [OutputFormat] {
        use OutputFormat::*;
        match self {
            Task::Check | Task::Oracle => &[Json, Text],
            Task::Reconstruct => &[Json, Dot, Text],
            Task::Weights => &[Json, Csv, Text],
            Task::Gen => &[Json, Csv, Dot],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Input {
    Stdin,
    Path(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub n: usize,
    pub seed: u64,
    pub wmin: String,
    pub wmax: String,
}

/// A fully validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub task: Task,
    pub input: Input,
    pub format: OutputFormat,
    pub policy: Policy,
    pub cap: usize,
    /// Present exactly when `task` is `Gen`.
    pub gen: Option<GenParams>,
}

impl RunConfig {
    fn from_cli(cli: Cli) -> Result<Self, String> {
        let mut cap = DEFAULT_CAP;
        let mut gen = None;
        let (task, common) = match cli.command {
            Command::Check(c) => (Task::Check, c),
            Command::Reconstruct(c) => (Task::Reconstruct, c),
            Command::Weights(c) => (Task::Weights, c),
            Command::Oracle { common, cap: c } => {
                cap = c;
                (Task::Oracle, common)
            }
            Command::Gen { common, n, seed, wmin, wmax } => {
                gen = Some(GenParams { n, seed, wmin, wmax });
                (Task::Gen, common)
            }
        };
        let policy = match (common.mode, common.eps) {
            (Mode::Exact, None) => Policy::Exact,
            (Mode::Exact, Some(_)) => return Err("--eps is only accepted with --mode float".into()),
            (Mode::Float, eps) => {
                let eps = eps.unwrap_or(Policy::DEFAULT_EPSILON);
                Policy::float(eps).ok_or_else(|| format!("--eps must be finite and non-negative, got {eps}"))?
            }
        };
        if !task.formats().contains(&common.format) {
            return Err(format!(
                "{} does not support --format {}",
                task.name(),
                common.format.to_possible_value().map_or_else(String::new, |v| v.get_name().to_owned())
            ));
        }
        let input = if common.input == "-" {
            Input::Stdin
        } else {
            Input::Path(PathBuf::from(common.input))
        };
        Ok(Self {
            task,
            input,
            format: common.format,
            policy,
            cap,
            gen,
        })
    }
}

/// Parses `args` (including the program name) and runs one subcommand.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::INVALID_INPUT } else { exit::OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let config = match RunConfig::from_cli(cli) {
        Ok(c) => c,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return exit::INVALID_INPUT;
        }
    };
    run_config(&config, stdin, stdout, stderr)
}

pub fn run_config(config: &RunConfig, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let outcome = match config.task {
        Task::Gen => run_gen(config),
        task => read_input(&config.input, stdin).and_then(|text| match task {
            Task::Check => run_check(config, &text),
            Task::Reconstruct => run_reconstruct(config, &text),
            Task::Weights => run_weights(config, &text),
            Task::Oracle => run_oracle(config, &text),
            Task::Gen => unreachable!(),
        }),
    };
    match outcome {
        Ok((code, body)) => {
            if stdout.write_all(body.as_bytes()).is_err() {
                return exit::INVALID_INPUT;
            }
            code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit::INVALID_INPUT
        }
    }
}

type Outcome = Result<(i32, String), Error>;

fn read_input(input: &Input, stdin: &mut dyn Read) -> Result<String, Error> {
    let mut text = String::new();
    let result = match input {
        Input::Stdin => stdin.read_to_string(&mut text).map(|_| ()),
        Input::Path(path) => std::fs::read_to_string(path).map(|t| text = t),
    };
    result.map_err(|e| Error::MalformedInput {
        line: 0,
        column: 0,
        message: match input {
            Input::Stdin => format!("reading standard input: {e}"),
            Input::Path(p) => format!("reading {}: {e}", p.display()),
        },
    })?;
    Ok(text)
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("output documents serialize");
    out.push('\n');
    out
}

fn run_check(config: &RunConfig, text: &str) -> Outcome {
    let m = parse_matrix(text, MatrixFormat::detect(text), config.policy)?;
    let report = check_all(&m)?;
    let code = if report.realizable { exit::OK } else { exit::NOT_REALIZABLE };
    let body = match config.format {
        OutputFormat::Text => check_text(&report),
        _ => pretty(&report),
    };
    Ok((code, body))
}

fn run_reconstruct(config: &RunConfig, text: &str) -> Outcome {
    let m = parse_matrix(text, MatrixFormat::detect(text), config.policy)?;
    Ok(match reconstruct(&m) {
        Ok(tree) => {
            let body = match config.format {
                OutputFormat::Dot => tree_to_dot(&tree),
                OutputFormat::Text => tree_text(&tree),
                _ => pretty(&tree_to_json(&tree)),
            };
            (exit::OK, body)
        }
        Err(witness) => {
            let body = match config.format {
                OutputFormat::Text => unrealizable_text(&witness),
                _ => pretty(&witness),
            };
            (exit::NOT_REALIZABLE, body)
        }
    })
}

fn run_weights(config: &RunConfig, text: &str) -> Outcome {
    let tree = parse_tree_json(text, config.policy)?;
    let m = all_pairs_weights(&tree);
    let body = match config.format {
        OutputFormat::Json => pretty(&matrix_to_json(&m)),
        _ => matrix_to_csv(&m),
    };
    Ok((exit::OK, body))
}

fn run_oracle(config: &RunConfig, text: &str) -> Outcome {
    let m = parse_matrix(text, MatrixFormat::detect(text), config.policy)?;
    let census = count_realizations(&m, config.cap)?;
    let code = match census.count {
        0 => exit::NOT_REALIZABLE,
        1 => exit::OK,
        _ => exit::UNIQUENESS_FALSIFIED,
    };
    let body = match config.format {
        OutputFormat::Text => census_text(&census),
        _ => pretty(&census),
    };
    Ok((code, body))
}

fn run_gen(config: &RunConfig) -> Outcome {
    let params = config.gen.as_ref().expect("gen parameters present for gen");
    let bound = |flag: &str, text: &str| {
        config
            .policy
            .parse(text)
            .map_err(|msg| Error::BadRange(format!("{flag}: {msg}")))
    };
    let (low, high) = (bound("--wmin", &params.wmin)?, bound("--wmax", &params.wmax)?);
    let tree = random_weighted_tree(params.n, &low, &high, params.seed)?;
    let tree = match config.policy {
        // Carry the requested tolerance rather than the generator default.
        Policy::Float { .. } => WeightedTree::new(
            tree.n(),
            config.policy,
            tree.edges().iter().map(|e| (e.u, e.v, e.weight.clone())),
        )?,
        Policy::Exact => tree,
    };
    let m = all_pairs_weights(&tree);
    let body = match config.format {
        OutputFormat::Csv => matrix_to_csv(&m),
        OutputFormat::Dot => tree_to_dot(&tree),
        _ => pretty(&serde_json::json!({
            "tree": tree_to_json(&tree),
            "matrix": matrix_to_json(&m),
        })),
    };
    Ok((exit::OK, body))
}

fn summary_line(out: &mut String, name: &str, s: &ConditionSummary) {
    let verdict = if s.ok { "ok" } else { "FAILED" };
    let _ = write!(out, "{name:<13} {verdict:<6} checked {}, violations {}", s.checked, s.violations);
    if s.caveat {
        out.push_str(" (four-point condition failed)");
    }
    out.push('\n');
}

fn witness_line(out: &mut String, w: &Witness) {
    let join = |xs: &[usize]| xs.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
    let _ = write!(out, "  {:?} {:?} quadruple {{{}}}", w.condition, w.code, join(&w.quadruple));
    if let Some(t) = &w.triple {
        let _ = write!(out, " triple {{{}}}", join(t));
    }
    if let Some(c) = w.closest {
        let _ = write!(out, " closest {c}");
    }
    out.push('\n');
}

fn check_text(r: &CheckReport) -> String {
    let mut out = format!(
        "n = {}: {}\n",
        r.n,
        if r.realizable { "realizable" } else { "not realizable" }
    );
    summary_line(&mut out, "four-point", &r.four_point);
    summary_line(&mut out, "condition (i)", &r.condition_i);
    summary_line(&mut out, "condition (ii)", &r.condition_ii);
    if !r.witnesses.is_empty() {
        out.push_str("witnesses:\n");
        for w in &r.witnesses {
            witness_line(&mut out, w);
        }
    }
    out
}

fn tree_text(t: &WeightedTree) -> String {
    let mut out = format!("tree on {} vertices\n", t.n());
    for e in t.edges() {
        let _ = writeln!(out, "  {} -- {}  {}", e.u, e.v, e.weight);
    }
    out
}

fn unrealizable_text(w: &UnrealizableWitness) -> String {
    let active = w.active.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
    format!("not realizable ({:?}): {w}\nactive vertices: {active}\n", w.stage)
}

fn census_text(c: &RealizationCensus) -> String {
    let mut out = format!(
        "n = {}: {} of {} topologies realize the matrix\n",
        c.n, c.count, c.topologies_examined
    );
    for t in &c.realizations {
        out.push_str(&tree_text(t));
    }
    out
}
