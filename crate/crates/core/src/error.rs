use thiserror::Error;

use crate::graph::{Edge, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(NodeId, NodeId),
    #[error("edge ({0}, {1}) is not present")]
    MissingEdge(NodeId, NodeId),
    #[error("node {0} is out of range")]
    NodeOutOfRange(NodeId),
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("assortativity undefined: every edge joins nodes of equal degree")]
    DegenerateDegrees,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewiringError {
    #[error("rewiring of {edge_a} and {edge_b} is not feasible in the current graph")]
    Infeasible { edge_a: Edge, edge_b: Edge },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("brute force would visit {subsets} subsets (limit {limit})")]
    TooLarge { subsets: u128, limit: u128 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneratorError {
    #[error("bad generator parameters: {0}")]
    BadParameters(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected two node ids")]
    Parse { line: usize },
    #[error("line {line}: self-loop on node {label:?}")]
    SelfLoop { line: usize, label: String },
    #[error("line {line}: duplicate edge ({u:?}, {v:?})")]
    DuplicateEdge { line: usize, u: String, v: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
