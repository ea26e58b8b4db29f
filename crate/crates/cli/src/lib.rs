//! Command-line surface for `qexgraph`.
//!
//! Exit codes: 0 on success, 1 when a target is unrealizable or infeasible
//! or a verification fails, 2 for usage errors and invalid input.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qexgraph::analysis::{
    srv_feasibility, srv_table, AnalysisError, FeasibilityKind, FeasibilityVerdict,
};
use qexgraph::constructors::{synthesize, verify_graph, ConstructError};
use qexgraph::io::{
    export_dot, export_experiment, format_state, graph_to_json, parse_graph, parse_state,
};
use qexgraph::{
    classify, normalize, schmidt_rank_vector, state_from_graph, states_equal, strip_trigger,
    ExperimentGraph, QuantumState, StateError, TargetSpec,
};

/// Tolerance when comparing against a six-decimal state listing.
pub const LISTING_TOL: f64 = 1e-5;

#[derive(Debug, Parser)]
#[command(
    name = "qexgraph",
    version,
    about = "Design and check photonic pair-source experiments as graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build and verify a graph for a target state; writes a graph document
    Synth {
        #[command(flatten)]
        target: TargetArgs,
        /// Output file (default: standard output)
        #[arg(long)]
        out: Option<String>,
    },
    /// Print the normalized post-selected state of a graph
    Simulate {
        #[arg(default_value = "-")]
        graph: String,
    },
    /// Print the Schmidt-rank vector of a graph's state
    Srv {
        #[arg(default_value = "-")]
        graph: String,
        /// Vertex index of a trigger photon to remove first
        #[arg(long)]
        trigger: Option<usize>,
    },
    /// Name the state of a graph (GHZ, W, Dicke) up to local relabeling
    Classify {
        #[arg(default_value = "-")]
        graph: String,
        /// Read a state listing instead of a graph document
        #[arg(long)]
        state: bool,
    },
    /// Decide whether SRV(A,B,C) is reachable with four paths
    Feasible { a: usize, b: usize, c: usize },
    /// Feasibility of every SRV(A,B,C) with A up to a bound
    Table {
        #[arg(long = "max-a")]
        max_a: usize,
        #[arg(long, value_enum, default_value_t = TableFormat::Text)]
        format: TableFormat,
    },
    /// Render a graph document as Graphviz DOT
    ExportDot {
        #[arg(default_value = "-")]
        graph: String,
    },
    /// List the crystals of a graph document
    ExportExperiment {
        #[arg(default_value = "-")]
        graph: String,
    },
    /// Check a graph against an expected state listing or a target
    Verify {
        graph: String,
        #[arg(long, conflicts_with = "kind")]
        expected: Option<String>,
        #[command(flatten)]
        target: OptionalTargetArgs,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum TargetKind {
    Ghz,
    W,
    Dicke,
    Srv,
    Ame,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Text,
    Csv,
}

#[derive(Debug, Args)]
struct Params {
    /// Number of parties (photon paths)
    #[arg(long)]
    n: Option<usize>,
    /// Dimension (modes per party)
    #[arg(long)]
    d: Option<usize>,
    /// Excitations of a Dicke state
    #[arg(long)]
    m: Option<usize>,
    #[arg(long = "A")]
    a: Option<usize>,
    #[arg(long = "B")]
    b: Option<usize>,
    #[arg(long = "C")]
    c: Option<usize>,
}

#[derive(Debug, Args)]
struct TargetArgs {
    #[arg(long = "target", value_enum)]
    kind: TargetKind,
    #[command(flatten)]
    params: Params,
}

#[derive(Debug, Args)]
struct OptionalTargetArgs {
    #[arg(long = "target", value_enum)]
    kind: Option<TargetKind>,
    #[command(flatten)]
    params: Params,
}

/// A failed command: exit code and the message for standard error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn rejected(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<ConstructError> for Failure {
    fn from(err: ConstructError) -> Self {
        let code = match &err {
            ConstructError::Unrealizable { .. }
            | ConstructError::Infeasible { .. }
            | ConstructError::VerificationFailed { .. }
            | ConstructError::Analysis(AnalysisError::WeightsInfeasible { .. }) => 1,
            _ => 2,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

impl From<StateError> for Failure {
    fn from(err: StateError) -> Self {
        Failure::usage(err.to_string())
    }
}

fn build_target(kind: TargetKind, p: &Params) -> Result<TargetSpec, Failure> {
    let need = |value: Option<usize>, flag: &str| {
        value.ok_or_else(|| {
            Failure::usage(format!("--target {kind:?} requires --{flag}").to_lowercase())
        })
    };
    Ok(match kind {
        TargetKind::Ghz => TargetSpec::Ghz {
            n: need(p.n, "n")?,
            d: p.d.unwrap_or(2),
        },
        TargetKind::W => TargetSpec::W { n: need(p.n, "n")? },
        TargetKind::Dicke => TargetSpec::Dicke {
            n: need(p.n, "n")?,
            m: need(p.m, "m")?,
        },
        TargetKind::Srv => TargetSpec::Srv {
            a: p.a
                .ok_or_else(|| Failure::usage("--target srv requires --A, --B and --C"))?,
            b: p.b
                .ok_or_else(|| Failure::usage("--target srv requires --A, --B and --C"))?,
            c: p.c
                .ok_or_else(|| Failure::usage("--target srv requires --A, --B and --C"))?,
        },
        TargetKind::Ame => TargetSpec::Ame {
            parties: p.n.unwrap_or(3),
            d: p.d.unwrap_or(2),
        },
    })
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Io<'_> {
    fn read_input(&mut self, path: &str) -> Result<String, Failure> {
        if path == "-" {
            let mut text = String::new();
            self.stdin
                .read_to_string(&mut text)
                .map_err(|e| Failure::usage(format!("standard input: {e}")))?;
            Ok(text)
        } else {
            fs::read_to_string(path).map_err(|e| Failure::usage(format!("{path}: {e}")))
        }
    }

    fn read_graph(&mut self, path: &str) -> Result<ExperimentGraph, Failure> {
        let text = self.read_input(path)?;
        parse_graph(&text).map_err(|e| Failure::usage(format!("{}: {e}", display_path(path))))
    }

    fn print(&mut self, text: &str) -> Result<(), Failure> {
        self.stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::usage(format!("standard output: {e}")))
    }

    fn warn(&mut self, text: &str) {
        let _ = writeln!(self.stderr, "warning: {text}");
    }
}

fn display_path(path: &str) -> &str {
    if path == "-" {
        "<stdin>"
    } else {
        path
    }
}

/// Normalized state of a graph; `None` when it has no perfect matchings.
fn simulate(graph: &ExperimentGraph) -> Result<Option<QuantumState>, Failure> {
    let raw = state_from_graph(graph)?;
    if raw.is_empty() {
        return Ok(None);
    }
    Ok(Some(normalize(&raw)?))
}

/// Runs the tool with `args` (program name first) and returns the exit code.
pub fn run<I, T>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let rendered = err.render().to_string();
            return if err.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
                2
            } else {
                let _ = stdout.write_all(rendered.as_bytes());
                0
            };
        }
    };
    let mut io = Io {
        stdin,
        stdout,
        stderr,
    };
    match dispatch(cli.command, &mut io) {
        Ok(()) => 0,
        Err(failure) => {
            let _ = writeln!(io.stderr, "error: {}", failure.message);
            failure.code
        }
    }
}

fn dispatch(command: Command, io: &mut Io<'_>) -> Result<(), Failure> {
    match command {
        Command::Synth { target, out } => {
            let spec = build_target(target.kind, &target.params)?;
            let synthesis = synthesize(&spec)?;
            let json = graph_to_json(&synthesis.graph);
            match out {
                Some(path) if path != "-" => {
                    fs::write(&path, json).map_err(|e| Failure::usage(format!("{path}: {e}")))?;
                }
                _ => io.print(&json)?,
            }
            let _ = writeln!(io.stderr, "{}", synthesis.report);
            Ok(())
        }
        Command::Simulate { graph } => {
            let graph = io.read_graph(&graph)?;
            match simulate(&graph)? {
                Some(state) => io.print(&format_state(&state)),
                None => {
                    io.warn("graph has no perfect matchings; the state is empty");
                    Ok(())
                }
            }
        }
        Command::Srv { graph, trigger } => {
            let graph = io.read_graph(&graph)?;
            let state = simulate(&graph)?
                .ok_or_else(|| Failure::usage("graph has no perfect matchings"))?;
            let state = match trigger {
                Some(party) => strip_trigger(&state, party)?,
                None => state,
            };
            let srv = schmidt_rank_vector(&state)?;
            io.print(&format!("{srv}\n"))
        }
        Command::Classify { graph, state } => {
            let state = if state {
                let text = io.read_input(&graph)?;
                let listed = parse_state(&text).map_err(|e| Failure::usage(e.to_string()))?;
                normalize(&listed)?
            } else {
                let graph = io.read_graph(&graph)?;
                simulate(&graph)?.ok_or_else(|| Failure::usage("graph has no perfect matchings"))?
            };
            io.print(&format!("{}\n", classify(&state)))
        }
        Command::Feasible { a, b, c } => {
            let verdict = srv_feasibility(a, b, c).map_err(|e| Failure::usage(e.to_string()))?;
            io.print(&format!("{verdict}\n"))?;
            if verdict.is_feasible() {
                Ok(())
            } else {
                Err(Failure::rejected(format!(
                    "SRV({a},{b},{c}) is {}",
                    verdict.kind
                )))
            }
        }
        Command::Table { max_a, format } => {
            if max_a == 0 {
                return Err(Failure::usage("--max-a must be at least 1"));
            }
            let table = srv_table(max_a);
            let text = match format {
                TableFormat::Text => render_table_text(&table, max_a),
                TableFormat::Csv => render_table_csv(&table),
            };
            io.print(&text)
        }
        Command::ExportDot { graph } => {
            let graph = io.read_graph(&graph)?;
            io.print(&export_dot(&graph))
        }
        Command::ExportExperiment { graph } => {
            let graph = io.read_graph(&graph)?;
            io.print(&export_experiment(&graph).to_json())
        }
        Command::Verify {
            graph,
            expected,
            target,
        } => {
            let graph = io.read_graph(&graph)?;
            match (expected, target.kind) {
                (Some(path), None) => {
                    let text = io.read_input(&path)?;
                    let listed =
                        parse_state(&text).map_err(|e| Failure::usage(format!("{path}: {e}")))?;
                    let expected = normalize(&listed)?;
                    let state = simulate(&graph)?
                        .ok_or_else(|| Failure::rejected("graph has no perfect matchings"))?;
                    if states_equal(&state, &expected, LISTING_TOL) {
                        io.print("ok\n")
                    } else {
                        Err(Failure::rejected(format!(
                            "simulated state differs from {path}\n{}",
                            format_state(&state)
                        )))
                    }
                }
                (None, Some(kind)) => {
                    let spec = build_target(kind, &target.params)?;
                    let verified = verify_graph(&graph, &spec)?;
                    io.print(&format!("ok: {}\n", verified.report))
                }
                _ => Err(Failure::usage(
                    "verify needs exactly one of --expected or --target",
                )),
            }
        }
    }
}

fn cell_symbol(kind: FeasibilityKind) -> char {
    match kind {
        FeasibilityKind::Feasible => '+',
        FeasibilityKind::InfeasiblePairSources => 'x',
        FeasibilityKind::NonexistentState => '.',
    }
}

/// One row per `(A, B)`, one column per `C`, ordered like the verdict table.
fn render_table_text(table: &[FeasibilityVerdict], max_a: usize) -> String {
    let width = max_a.to_string().len().max(2);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# SRV(A,B,C) with pair sources: + feasible, x infeasible-pair-sources, . nonexistent-state"
    );
    let _ = write!(out, "{:>width$} {:>width$} |", "A", "B");
    for c in (1..=max_a).rev() {
        let _ = write!(out, " {c:>width$}");
    }
    out.push('\n');
    let mut rows: Vec<((usize, usize), Vec<&FeasibilityVerdict>)> = Vec::new();
    for v in table {
        match rows.last_mut() {
            Some((key, cells)) if *key == (v.a, v.b) => cells.push(v),
            _ => rows.push(((v.a, v.b), vec![v])),
        }
    }
    for ((a, b), cells) in rows {
        let _ = write!(out, "{a:>width$} {b:>width$} |");
        for c in (1..=max_a).rev() {
            let symbol = cells
                .iter()
                .find(|v| v.c == c)
                .map_or(' ', |v| cell_symbol(v.kind));
            let _ = write!(out, " {symbol:>width$}");
        }
        let trimmed = out.trim_end_matches(' ').len();
        out.truncate(trimmed);
        out.push('\n');
    }
    out
}

fn render_table_csv(table: &[FeasibilityVerdict]) -> String {
    let mut out = String::from("A,B,C,verdict,lhs,rhs\n");
    for v in table {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            v.a,
            v.b,
            v.c,
            v.kind,
            v.lhs(),
            v.rhs()
        );
    }
    out
}
