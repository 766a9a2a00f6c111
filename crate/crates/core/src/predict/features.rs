//! Per-edge structural features for an edge `e = (u, v)`, computed on the
//! residual graph of a flow.

use std::collections::VecDeque;

use crate::network::{EdgeId, Flow, FlowNetwork, VertexId};
use crate::residual::ResidualView;

pub const FEATURE_DIM: usize = 7;

pub const FEATURE_NAMES: [&str; FEATURE_DIM] = [
    "d_s",
    "d_t",
    "deg_out",
    "deg_in",
    "gamma_out",
    "gamma_in",
    "capacity",
];

/// Slot order matches [`FEATURE_NAMES`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector(pub [f64; FEATURE_DIM]);

impl FeatureVector {
    /// Residual hop distance from the source to the tail.
    pub fn d_s(&self) -> f64 {
        self.0[0]
    }
    /// Residual hop distance from the head to the sink.
    pub fn d_t(&self) -> f64 {
        self.0[1]
    }
    pub fn deg_out(&self) -> f64 {
        self.0[2]
    }
    pub fn deg_in(&self) -> f64 {
        self.0[3]
    }
    /// Distinct out-neighbours of the tail reachable over a positive-residual edge.
    pub fn gamma_out(&self) -> f64 {
        self.0[4]
    }
    /// Distinct in-neighbours of the head reaching it over a positive-residual edge.
    pub fn gamma_in(&self) -> f64 {
        self.0[5]
    }
    pub fn capacity(&self) -> f64 {
        self.0[6]
    }
}

/// Precomputes the per-vertex quantities once so every edge is O(1).
/// Unreachable distances are reported as `vertex_count`.
pub struct FeatureExtractor<'a> {
    net: &'a FlowNetwork,
    dist_from_source: Vec<usize>,
    dist_to_sink: Vec<usize>,
    gamma_out: Vec<usize>,
    gamma_in: Vec<usize>,
}

impl<'a> FeatureExtractor<'a> {
    pub fn new(net: &'a FlowNetwork, flow: &Flow) -> Self {
        let view = ResidualView::new(net, flow);
        let n = net.vertex_count();
        let dist_from_source = hop_distances(n, net.source(), |u| {
            view.arcs_from(u).map(|(a, _)| a.to).collect()
        });
        let dist_to_sink = hop_distances(n, net.sink(), |u| {
            view.arcs_into(u).map(|(a, _)| a.from).collect()
        });
        let open = |e: EdgeId| net.capacity(e) - flow[e] > 0;
        let count_distinct = |mut vs: Vec<VertexId>| {
            vs.sort_unstable();
            vs.dedup();
            vs.len()
        };
        let gamma_out = (0..n)
            .map(|u| {
                count_distinct(
                    net.out_edges(u)
                        .iter()
                        .filter(|&&e| open(e))
                        .map(|&e| net.edge(e).head)
                        .collect(),
                )
            })
            .collect();
        let gamma_in = (0..n)
            .map(|v| {
                count_distinct(
                    net.in_edges(v)
                        .iter()
                        .filter(|&&e| open(e))
                        .map(|&e| net.edge(e).tail)
                        .collect(),
                )
            })
            .collect();
        FeatureExtractor {
            net,
            dist_from_source,
            dist_to_sink,
            gamma_out,
            gamma_in,
        }
    }

    pub fn features(&self, edge: EdgeId) -> FeatureVector {
        let e = self.net.edge(edge);
        let (u, v) = (e.tail, e.head);
        FeatureVector([
            self.dist_from_source[u] as f64,
            self.dist_to_sink[v] as f64,
            self.net.out_edges(u).len() as f64,
            self.net.in_edges(v).len() as f64,
            self.gamma_out[u] as f64,
            self.gamma_in[v] as f64,
            e.capacity as f64,
        ])
    }

    pub fn all(&self) -> Vec<FeatureVector> {
        (0..self.net.edge_count())
            .map(|e| self.features(e))
            .collect()
    }
}

pub fn edge_features(net: &FlowNetwork, flow: &Flow, edge: EdgeId) -> FeatureVector {
    FeatureExtractor::new(net, flow).features(edge)
}

fn hop_distances(
    n: usize,
    start: VertexId,
    neighbours: impl Fn(VertexId) -> Vec<VertexId>,
) -> Vec<usize> {
    let mut dist = vec![n; n];
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for x in neighbours(u) {
            if dist[x] == n {
                dist[x] = dist[u] + 1;
                queue.push_back(x);
            }
        }
    }
    dist
}
