//! Max-flow toolkit built around prediction-augmented Ford-Fulkerson.
//!
//! - [`network`], [`residual`], [`solve`]: networks, residual graphs, baseline
//!   DFS / Edmonds-Karp solvers and min-cut extraction.
//! - [`warmstart`]: repair predicted flows into feasible starting points.
//! - [`guided`]: maximum-bottleneck tie-broken shortest paths and the
//!   score-guided pivot search.
//! - [`image`]: grid-graph construction and seeded segmentation.
//! - [`predict`]: edge features and score predictors.
//! - [`permdist`]: Cayley and weighted Cayley distances between rankings.
//! - [`bench`]: seeded experiment matrix with CSV output.

pub mod bench;
pub mod error;
pub mod guided;
pub mod heap;
pub mod image;
pub mod network;
pub mod permdist;
pub mod predict;
pub mod residual;
pub mod scores;
pub mod solve;
pub mod warmstart;

pub use error::{NetworkError, ScoreError, SolveError, Violation};
pub use guided::{adjusted_edmonds_karp, combined_ff, guided_ff};
pub use network::{Capacity, Edge, EdgeId, Flow, FlowNetwork, VertexId};
pub use residual::{AugmentingPath, Direction, ResidualArc, ResidualView};
pub use scores::EdgeScores;
pub use solve::{
    ford_fulkerson, ford_fulkerson_traced, max_flow, min_cut, CutResult, SolveStats, Strategy,
    StrategyKind, Trace,
};
pub use warmstart::warm_start_solve;
