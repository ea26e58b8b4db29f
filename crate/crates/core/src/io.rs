//! Graph documents, state listings, DOT rendering and crystal lists.
//!
//! Graph documents are JSON objects:
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "vertices": ["a", "b"],
//!   "edges": [
//!     {"u": "a", "v": "b", "color_u": 0, "color_v": 1, "weight": {"re": 1.0, "im": 0.0}}
//!   ]
//! }
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeSpec, ExperimentGraph, GraphError, ModeColor};
use crate::state::{QuantumState, StateError, Term};

pub const SCHEMA_VERSION: u64 = 1;

/// Named colours for modes `0..8`; higher modes get numeric labels.
pub const PALETTE: [&str; 8] = [
    "black", "red", "green", "blue", "orange", "purple", "brown", "cyan",
];

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("line {line}, column {column}: {field}: {message}")]
    Schema {
        field: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("missing schema_version")]
    MissingVersion,

    #[error("unsupported schema_version {0} (expected {SCHEMA_VERSION})")]
    UnsupportedVersion(String),

    #[error("{field}: unknown vertex label '{label}'")]
    UnknownLabel { field: String, label: String },

    #[error(transparent)]
    Graph(#[from] GraphError),

    #[error("state listing line {line}: {message}")]
    Listing { line: usize, message: String },
}

pub type IoResult<T> = Result<T, IoError>;

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightDocument {
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDocument {
    pub u: String,
    pub v: String,
    pub color_u: u32,
    pub color_v: u32,
    pub weight: WeightDocument,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub schema_version: u64,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDocument>,
}

impl GraphDocument {
    pub fn from_graph(graph: &ExperimentGraph) -> Self {
        let labels = graph.labels();
        GraphDocument {
            schema_version: SCHEMA_VERSION,
            vertices: labels.to_vec(),
            edges: graph
                .edges()
                .iter()
                .map(|e| EdgeDocument {
                    u: labels[e.u].clone(),
                    v: labels[e.v].clone(),
                    color_u: e.color_u.0,
                    color_v: e.color_v.0,
                    weight: WeightDocument {
                        re: e.weight.re,
                        im: e.weight.im,
                    },
                })
                .collect(),
        }
    }

    pub fn to_graph(&self) -> IoResult<ExperimentGraph> {
        let lookup = |label: &str, field: String| {
            self.vertices
                .iter()
                .position(|v| v == label)
                .ok_or_else(|| IoError::UnknownLabel {
                    field,
                    label: label.to_string(),
                })
        };
        let mut specs = Vec::with_capacity(self.edges.len());
        for (i, e) in self.edges.iter().enumerate() {
            let u = lookup(&e.u, format!("edges[{i}].u"))?;
            let v = lookup(&e.v, format!("edges[{i}].v"))?;
            specs.push(EdgeSpec {
                u,
                v,
                color_u: ModeColor(e.color_u),
                color_v: ModeColor(e.color_v),
                weight: Complex64::new(e.weight.re, e.weight.im),
            });
        }
        Ok(ExperimentGraph::build(
            self.vertices.iter().cloned(),
            specs,
        )?)
    }

    /// Parses a document, checking the version before the structure.
    pub fn parse(text: &str) -> IoResult<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| IoError::Syntax {
            line: e.line(),
            column: e.column(),
            message: strip_position(&e.to_string()),
        })?;
        match value.get("schema_version") {
            None => return Err(IoError::MissingVersion),
            Some(v) if v.as_u64() == Some(SCHEMA_VERSION) => {}
            Some(v) => return Err(IoError::UnsupportedVersion(v.to_string())),
        }
        let mut de = serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let field = e.path().to_string();
            let inner = e.into_inner();
            IoError::Schema {
                field,
                line: inner.line(),
                column: inner.column(),
                message: strip_position(&inner.to_string()),
            }
        })
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("graph documents always serialize");
        out.push('\n');
        out
    }
}

fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(cut) => message[..cut].to_string(),
        None => message.to_string(),
    }
}

pub fn parse_graph(text: &str) -> IoResult<ExperimentGraph> {
    GraphDocument::parse(text)?.to_graph()
}

pub fn graph_to_json(graph: &ExperimentGraph) -> String {
    GraphDocument::from_graph(graph).to_json()
}

pub fn read_graph(path: impl AsRef<Path>) -> IoResult<ExperimentGraph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })?;
    parse_graph(&text)
}

pub fn write_graph(path: impl AsRef<Path>, graph: &ExperimentGraph) -> IoResult<()> {
    let path = path.as_ref();
    fs::write(path, graph_to_json(graph)).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

/// Fixed six-decimal rendering that never prints `-0.000000`.
pub fn format_amplitude_part(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

/// One `term: re im` line per term, sorted by term.
pub fn format_state(state: &QuantumState) -> String {
    let mut out = String::new();
    for (term, amp) in state.iter() {
        let _ = writeln!(
            out,
            "{term}: {} {}",
            format_amplitude_part(amp.re),
            format_amplitude_part(amp.im)
        );
    }
    out
}

/// Reads the format written by [`format_state`]. Blank lines and lines
/// starting with `#` are skipped.
pub fn parse_state(text: &str) -> IoResult<QuantumState> {
    let mut terms = Vec::new();
    let mut parties = None;
    for (index, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |message: String| IoError::Listing {
            line: index + 1,
            message,
        };
        let (term, rest) = line
            .split_once(':')
            .ok_or_else(|| bad("expected 'term: re im'".into()))?;
        let term: Term = term
            .trim()
            .parse()
            .map_err(|e: StateError| bad(e.to_string()))?;
        let parts: Vec<&str> = rest.split_whitespace().collect();
        let [re, im] = parts[..] else {
            return Err(bad(format!("expected two numbers, found {}", parts.len())));
        };
        let number = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("'{s}': {e}")));
        let amp = Complex64::new(number(re)?, number(im)?);
        match parties {
            None => parties = Some(term.len()),
            Some(p) if p != term.len() => {
                return Err(bad(format!(
                    "term {term} has {} parties, expected {p}",
                    term.len()
                )));
            }
            Some(_) => {}
        }
        terms.push((term, amp));
    }
    let parties = parties.ok_or(IoError::Listing {
        line: 0,
        message: "no terms".into(),
    })?;
    QuantumState::from_terms(parties, terms).map_err(|e| IoError::Listing {
        line: 0,
        message: e.to_string(),
    })
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn format_weight(w: Complex64) -> String {
    if w.im == 0.0 {
        format!("{}", w.re)
    } else if w.im < 0.0 {
        format!("{}-{}i", w.re, -w.im)
    } else {
        format!("{}+{}i", w.re, w.im)
    }
}

/// Undirected DOT with one line per edge, parallel edges included.
/// Bicoloured edges use a split colour, coloured from `u` towards `v`.
pub fn export_dot(graph: &ExperimentGraph) -> String {
    let mut out = String::from("graph experiment {\n");
    if graph.vertex_count() > 0 {
        out.push_str("  node [shape=circle];\n");
    }
    for label in graph.labels() {
        let _ = writeln!(out, "  {};", dot_quote(label));
    }
    let labels = graph.labels();
    for e in graph.edges() {
        let mut attrs = Vec::new();
        let named = |m: ModeColor| PALETTE.get(m.0 as usize).copied();
        let mut label = Vec::new();
        match (named(e.color_u), named(e.color_v)) {
            (Some(cu), Some(cv)) if cu == cv => attrs.push(format!("color=\"{cu}\"")),
            (Some(cu), Some(cv)) => attrs.push(format!("color=\"{cu};0.5:{cv}\"")),
            _ => {
                attrs.push("color=\"gray\"".to_string());
                label.push(format!("{}:{}", e.color_u, e.color_v));
            }
        }
        if e.weight != Complex64::new(1.0, 0.0) {
            label.push(format_weight(e.weight));
        }
        if !label.is_empty() {
            attrs.push(format!("label={}", dot_quote(&label.join(" "))));
        }
        let _ = writeln!(
            out,
            "  {} -- {} [{}];",
            dot_quote(&labels[e.u]),
            dot_quote(&labels[e.v]),
            attrs.join(", ")
        );
    }
    out.push_str("}\n");
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrystalDocument {
    pub crystal_id: String,
    pub path_1: String,
    pub path_2: String,
    pub mode_1: u32,
    pub mode_2: u32,
    pub relative_amplitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentDocument {
    pub crystals: Vec<CrystalDocument>,
}

impl ExperimentDocument {
    pub fn to_json(&self) -> String {
        let mut out =
            serde_json::to_string_pretty(self).expect("experiment documents always serialize");
        out.push('\n');
        out
    }
}

/// Roman numeral for `1..=3999`, decimal digits otherwise.
pub fn roman(mut n: usize) -> String {
    if n == 0 || n > 3999 {
        return n.to_string();
    }
    const TABLE: [(usize, &str); 13] = [
        (1000, "M"),
        (900, "CM"),
        (500, "D"),
        (400, "CD"),
        (100, "C"),
        (90, "XC"),
        (50, "L"),
        (40, "XL"),
        (10, "X"),
        (9, "IX"),
        (5, "V"),
        (4, "IV"),
        (1, "I"),
    ];
    let mut out = String::new();
    for (value, glyph) in TABLE {
        while n >= value {
            out.push_str(glyph);
            n -= value;
        }
    }
    out
}

/// One crystal per edge, numbered I, II, III, … in edge order.
pub fn export_experiment(graph: &ExperimentGraph) -> ExperimentDocument {
    let labels = graph.labels();
    ExperimentDocument {
        crystals: graph
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| CrystalDocument {
                crystal_id: roman(i + 1),
                path_1: labels[e.u].clone(),
                path_2: labels[e.v].clone(),
                mode_1: e.color_u.0,
                mode_2: e.color_v.0,
                relative_amplitude: e.weight.norm(),
            })
            .collect(),
    }
}
