//! Canonical JSON sequence files and Graphviz DOT export.
//!
//! ```text
//! {"n":6,"k":1,"builder":"base:k=1","graphs":[{"directed":false,"edges":[[1,2,"1/2"],...]}]}
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Edge, EdgeList, GraphError, GraphSequence, Weight};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl FormatError {
    pub fn kind(&self) -> &'static str {
        match self {
            FormatError::Json(_) => "MalformedJson",
            FormatError::Graph(e) => e.kind(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceFile {
    n: usize,
    k: usize,
    builder: String,
    graphs: Vec<GraphFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    directed: bool,
    edges: Vec<(usize, usize, String)>,
}

pub fn to_json(seq: &GraphSequence) -> String {
    let file = SequenceFile {
        n: seq.n(),
        k: seq.k(),
        builder: seq.builder_tag().to_string(),
        graphs: seq
            .graphs()
            .iter()
            .map(|g| GraphFile {
                directed: g.is_directed(),
                edges: g
                    .edges()
                    .iter()
                    .map(|e| (e.u, e.v, e.weight.to_string()))
                    .collect(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string(&file).expect("sequence serializes");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<GraphSequence, FormatError> {
    let file: SequenceFile = serde_json::from_str(text)?;
    let graphs = file
        .graphs
        .into_iter()
        .map(|g| {
            let edges = g
                .edges
                .into_iter()
                .map(|(u, v, w)| Ok(Edge::new(u, v, w.parse::<Weight>()?)))
                .collect::<Result<Vec<_>, GraphError>>()?;
            EdgeList::new(file.n, g.directed, edges)
        })
        .collect::<Result<Vec<_>, GraphError>>()?;
    Ok(GraphSequence::new(file.n, file.k, graphs, file.builder)?)
}

/// One DOT document per graph of the sequence.
pub fn to_dot(seq: &GraphSequence) -> Vec<String> {
    seq.graphs()
        .iter()
        .enumerate()
        .map(|(i, g)| graph_to_dot(g, &format!("round_{}", i + 1)))
        .collect()
}

pub fn graph_to_dot(g: &EdgeList, name: &str) -> String {
    let (kind, arrow) = if g.is_directed() {
        ("digraph", "->")
    } else {
        ("graph", "--")
    };
    let mut out = format!("{kind} {name} {{\n");
    for node in 1..=g.n() {
        out.push_str(&format!("  {node};\n"));
    }
    for e in g.edges() {
        out.push_str(&format!(
            "  {} {arrow} {} [label=\"{}\"];\n",
            e.u, e.v, e.weight
        ));
    }
    out.push_str("}\n");
    out
}
