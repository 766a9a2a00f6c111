//! Edge-score predictors: the exact min-cut oracle, a noise-corrupted oracle,
//! a logistic scorer over [`features`], and the message-passing network.

pub mod features;
pub mod linear;
pub mod mpgnn;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::network::FlowNetwork;
use crate::scores::EdgeScores;
use crate::solve::{max_flow, min_cut, CutResult};

pub use features::{edge_features, FeatureExtractor, FeatureVector, FEATURE_DIM, FEATURE_NAMES};
pub use linear::{linear_scores, train_linear_scorer, LinearModel};
pub use mpgnn::{mpgnn_forward, Layer, MpgnnWeights};

/// The source-side-minimal min cut of `net`.
pub fn canonical_min_cut(net: &FlowNetwork) -> CutResult {
    let (flow, _) = max_flow(net);
    min_cut(net, &flow).expect("Edmonds-Karp output is maximal")
}

/// Binary min-cut membership per edge.
pub fn cut_labels(net: &FlowNetwork) -> Vec<bool> {
    let cut = canonical_min_cut(net);
    let mut labels = vec![false; net.edge_count()];
    for &e in &cut.cut_edges {
        labels[e] = true;
    }
    labels
}

/// Exact scores from the canonical min cut.
///
/// Cut edges score `c(e) / max cut-edge capacity`, so the widest cut edge gets
/// 1.0. Every other edge scores `0.5 * floor * c(e) / max capacity`, where
/// `floor` is the smallest positive cut-edge score; non-cut edges therefore
/// rank strictly below every positive-capacity cut edge and among themselves
/// by capacity.
pub fn oracle_scores(net: &FlowNetwork) -> EdgeScores {
    let cut = canonical_min_cut(net);
    let max_cut = cut
        .cut_edges
        .iter()
        .map(|&e| net.capacity(e))
        .max()
        .unwrap_or(0);
    let max_cap = net
        .edges()
        .iter()
        .map(|e| e.capacity)
        .max()
        .unwrap_or(0)
        .max(1);
    let cut_score = |e| {
        if max_cut == 0 {
            1.0
        } else {
            net.capacity(e) as f64 / max_cut as f64
        }
    };
    let floor = cut
        .cut_edges
        .iter()
        .map(|&e| cut_score(e))
        .filter(|&p| p > 0.0)
        .fold(1.0_f64, f64::min);
    let values = (0..net.edge_count())
        .map(|e| {
            if cut.contains(e) {
                cut_score(e)
            } else {
                0.5 * floor * net.capacity(e) as f64 / max_cap as f64
            }
        })
        .collect();
    EdgeScores::new(values).expect("oracle scores lie in [0, 1]")
}

/// Mixes each score with uniform noise: `(1 - level) * p + level * U(0, 1)`.
pub fn perturb_scores(scores: &EdgeScores, noise_level: f64, seed: u64) -> EdgeScores {
    let level = noise_level.clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = scores
        .values()
        .iter()
        .map(|&p| {
            let u: f64 = rng.random();
            ((1.0 - level) * p + level * u).clamp(0.0, 1.0)
        })
        .collect();
    EdgeScores::new(values).expect("clamped")
}
