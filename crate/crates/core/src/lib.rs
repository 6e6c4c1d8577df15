//! Degree-preserving rewiring attacks on the assortativity coefficient.
//!
//! The crate computes `r` exactly from integer degree sums, enumerates the
//! rewiring moves of a graph, and drives several strategies that push `r`
//! up or down under a budget of rewired edge pairs:
//!
//! * [`greedy`]: best-first walk over the original graph's candidates, plus
//!   a variant that re-enumerates after every move;
//! * [`exact`]: branch-and-bound optimum for small graphs, with a brute force
//!   cross-check;
//! * [`baselines`]: targeted, random and degree-difference rewiring.
//!
//! [`generators`] builds seeded random graphs, [`io`] reads and writes edge
//! lists and sweep CSVs, and [`sweep`] runs budget sweeps.
//!
//! Candidate enumeration and sweeps run on rayon when the default
//! `parallel` feature is enabled and sequentially otherwise.

pub mod baselines;
pub mod error;
pub mod exact;
pub mod generators;
pub mod graph;
pub mod greedy;
pub mod io;
pub mod rewiring;
pub mod sweep;

pub use error::{ExactError, GeneratorError, GraphError, IoError, RewiringError};
pub use graph::{AssortativitySums, Edge, Graph, NodeId};
pub use greedy::{AttackResult, Mode, TraceStep};
pub use rewiring::{CandidatePool, Orientation, RewiringCandidate, Sign};
