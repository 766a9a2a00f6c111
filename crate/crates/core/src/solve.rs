//! Ford-Fulkerson driver, baseline path searches, and min-cut extraction.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::SolveError;
use crate::guided;
use crate::network::{Capacity, EdgeId, Flow, FlowNetwork, VertexId};
use crate::residual::{augment, AugmentingPath, ResidualArc, ResidualView};
use crate::scores::EdgeScores;

/// How augmenting paths are chosen.
#[derive(Debug, Clone, Copy)]
pub enum Strategy<'a> {
    /// Depth-first, arcs visited in ascending `EdgeId` order.
    Dfs,
    /// Breadth-first (Edmonds-Karp).
    Bfs,
    /// Shortest paths with maximum-bottleneck tie-breaking.
    AdjustedBfs,
    /// Pivot-edge guided search driven by edge scores.
    Guided(&'a EdgeScores),
}

impl Strategy<'_> {
    pub fn kind(&self) -> StrategyKind {
        match self {
            Strategy::Dfs => StrategyKind::Dfs,
            Strategy::Bfs => StrategyKind::Bfs,
            Strategy::AdjustedBfs => StrategyKind::AdjustedBfs,
            Strategy::Guided(_) => StrategyKind::Guided,
        }
    }
}

/// Strategy names without their payload, for CLI flags and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StrategyKind {
    Dfs,
    Bfs,
    AdjustedBfs,
    Guided,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 4] = [
        StrategyKind::Dfs,
        StrategyKind::Bfs,
        StrategyKind::AdjustedBfs,
        StrategyKind::Guided,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Dfs => "dfs",
            StrategyKind::Bfs => "bfs",
            StrategyKind::AdjustedBfs => "adjusted",
            StrategyKind::Guided => "guided",
        }
    }

    /// Attaches scores; `None` unless guided search has what it needs.
    pub fn with_scores(self, scores: Option<&EdgeScores>) -> Option<Strategy<'_>> {
        Some(match self {
            StrategyKind::Dfs => Strategy::Dfs,
            StrategyKind::Bfs => Strategy::Bfs,
            StrategyKind::AdjustedBfs => Strategy::AdjustedBfs,
            StrategyKind::Guided => Strategy::Guided(scores?),
        })
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dfs" => Ok(StrategyKind::Dfs),
            "bfs" | "edmonds_karp" | "edmonds-karp" => Ok(StrategyKind::Bfs),
            "adjusted" | "adjusted_bfs" => Ok(StrategyKind::AdjustedBfs),
            "guided" => Ok(StrategyKind::Guided),
            other => Err(format!(
                "unknown strategy {other:?} (expected dfs, bfs, adjusted or guided)"
            )),
        }
    }
}

impl Serialize for StrategyKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for StrategyKind {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub augmentations: usize,
    /// Guided search only: augmentations taken by the Edmonds-Karp fallback.
    pub fallback_augmentations: usize,
    /// Warm starts only: projection paths used to restore feasibility.
    pub repair_iterations: usize,
    pub residual_arc_scans: u64,
    pub total_flow: Capacity,
    pub wall_time: Duration,
}

/// One augmentation as it happened, with the flow it was applied to.
#[derive(Debug, Clone)]
pub struct Augmentation {
    pub path: AugmentingPath,
    pub flow_before: Flow,
    pub fallback: bool,
}

/// Optional record of a solve, for tests and diagnostics.
#[derive(Debug, Clone, Default)]
pub struct Trace {
    pub augmentations: Vec<Augmentation>,
    /// Pivot edges in the order the guided search popped them.
    pub pivot_attempts: Vec<EdgeId>,
}

/// Mutable solve state shared by every strategy's main loop.
pub(crate) struct Run<'t> {
    pub stats: SolveStats,
    pub trace: Option<&'t mut Trace>,
}

impl Run<'_> {
    pub fn apply(&mut self, flow: &mut Flow, path: AugmentingPath, fallback: bool) {
        debug_assert!(path.bottleneck >= 1);
        let before = self.trace.is_some().then(|| flow.clone());
        augment(flow, &path.arcs, path.bottleneck);
        self.stats.augmentations += 1;
        if fallback {
            self.stats.fallback_augmentations += 1;
        }
        if let (Some(trace), Some(flow_before)) = (self.trace.as_deref_mut(), before) {
            trace.augmentations.push(Augmentation {
                path,
                flow_before,
                fallback,
            });
        }
    }

    pub fn record_pivot(&mut self, edge: EdgeId) {
        if let Some(trace) = self.trace.as_deref_mut() {
            trace.pivot_attempts.push(edge);
        }
    }
}

/// Runs Ford-Fulkerson from a feasible `initial` flow until no augmenting path remains.
pub fn ford_fulkerson(
    net: &FlowNetwork,
    initial: &Flow,
    strategy: Strategy<'_>,
) -> Result<(Flow, SolveStats), SolveError> {
    solve_inner(net, initial, strategy, None)
}

/// Like [`ford_fulkerson`], also returning every augmentation performed.
pub fn ford_fulkerson_traced(
    net: &FlowNetwork,
    initial: &Flow,
    strategy: Strategy<'_>,
) -> Result<(Flow, SolveStats, Trace), SolveError> {
    let mut trace = Trace::default();
    let (flow, stats) = solve_inner(net, initial, strategy, Some(&mut trace))?;
    Ok((flow, stats, trace))
}

pub(crate) fn solve_inner(
    net: &FlowNetwork,
    initial: &Flow,
    strategy: Strategy<'_>,
    trace: Option<&mut Trace>,
) -> Result<(Flow, SolveStats), SolveError> {
    net.check_flow(initial).map_err(SolveError::Infeasible)?;
    if let Strategy::Guided(scores) = strategy {
        scores.check_total(net)?;
    }
    let started = Instant::now();
    let mut run = Run {
        stats: SolveStats::default(),
        trace,
    };
    let mut flow = initial.clone();
    let (s, t) = (net.source(), net.sink());
    match strategy {
        Strategy::Dfs => {
            while let Some(path) = dfs_path(&ResidualView::new(net, &flow), s, t, &mut run.stats) {
                run.apply(&mut flow, path, false);
            }
        }
        Strategy::Bfs => {
            while let Some(path) = bfs_path(&ResidualView::new(net, &flow), s, t, &mut run.stats) {
                run.apply(&mut flow, path, false);
            }
        }
        Strategy::AdjustedBfs => {
            while let Some(path) = guided::shortest_max_bottleneck_path_counted(
                &ResidualView::new(net, &flow),
                s,
                t,
                &[],
                &mut run.stats.residual_arc_scans,
            ) {
                run.apply(&mut flow, path, false);
            }
        }
        Strategy::Guided(scores) => guided::guided_loop(net, &mut flow, scores, &mut run),
    }
    run.stats.total_flow = flow.net_out(net, s);
    run.stats.wall_time = started.elapsed();
    Ok((flow, run.stats))
}

/// Depth-first augmenting path; arcs tried in ascending `EdgeId` order.
pub(crate) fn dfs_path(
    view: &ResidualView<'_>,
    from: VertexId,
    to: VertexId,
    stats: &mut SolveStats,
) -> Option<AugmentingPath> {
    let net = view.network();
    let mut visited = vec![false; net.vertex_count()];
    visited[from] = true;
    let mut stack: Vec<(VertexId, usize)> = vec![(from, 0)];
    let mut arcs: Vec<ResidualArc> = Vec::new();
    while let Some(top) = stack.last_mut() {
        let v = top.0;
        if v == to {
            return Some(AugmentingPath::from_arcs(view, arcs));
        }
        let incident = net.incident(v);
        if top.1 == incident.len() {
            stack.pop();
            arcs.pop();
            continue;
        }
        let edge = incident[top.1];
        top.1 += 1;
        stats.residual_arc_scans += 1;
        let (arc, residual) = view.arc_leaving(v, edge);
        if residual > 0 && !visited[arc.to] {
            visited[arc.to] = true;
            stack.push((arc.to, 0));
            arcs.push(arc);
        }
    }
    None
}

/// Breadth-first (fewest arcs) augmenting path.
pub(crate) fn bfs_path(
    view: &ResidualView<'_>,
    from: VertexId,
    to: VertexId,
    stats: &mut SolveStats,
) -> Option<AugmentingPath> {
    let net = view.network();
    let mut parent: Vec<Option<ResidualArc>> = vec![None; net.vertex_count()];
    let mut seen = vec![false; net.vertex_count()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    'search: while let Some(u) = queue.pop_front() {
        for &edge in net.incident(u) {
            stats.residual_arc_scans += 1;
            let (arc, residual) = view.arc_leaving(u, edge);
            if residual > 0 && !seen[arc.to] {
                seen[arc.to] = true;
                parent[arc.to] = Some(arc);
                if arc.to == to {
                    break 'search;
                }
                queue.push_back(arc.to);
            }
        }
    }
    if !seen[to] {
        return None;
    }
    let mut arcs = Vec::new();
    let mut v = to;
    while let Some(arc) = parent[v] {
        arcs.push(arc);
        v = arc.from;
    }
    arcs.reverse();
    Some(AugmentingPath::from_arcs(view, arcs))
}

/// An s-t cut read off the residual graph of a maximum flow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutResult {
    /// `source_side[v]` is true iff `v` is reachable from the source in the residual graph.
    pub source_side: Vec<bool>,
    pub cut_edges: Vec<EdgeId>,
    pub capacity: Capacity,
}

impl CutResult {
    /// Number of cut edges, the `k` of the iteration-count comparison.
    pub fn size(&self) -> usize {
        self.cut_edges.len()
    }

    pub fn contains(&self, edge: EdgeId) -> bool {
        self.cut_edges.binary_search(&edge).is_ok()
    }
}

/// Source-side-minimal min cut for a maximum flow.
pub fn min_cut(net: &FlowNetwork, max_flow: &Flow) -> Result<CutResult, SolveError> {
    net.check_flow(max_flow).map_err(SolveError::Infeasible)?;
    let source_side = ResidualView::new(net, max_flow).reachable_from(net.source());
    if source_side[net.sink()] {
        return Err(SolveError::NotMaximal);
    }
    let cut_edges: Vec<EdgeId> = net
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| source_side[e.tail] && !source_side[e.head])
        .map(|(id, _)| id)
        .collect();
    let capacity = cut_edges.iter().map(|&e| net.capacity(e)).sum();
    Ok(CutResult {
        source_side,
        cut_edges,
        capacity,
    })
}

/// Cold-start Edmonds-Karp maximum flow.
pub fn max_flow(net: &FlowNetwork) -> (Flow, SolveStats) {
    ford_fulkerson(net, &Flow::zero(net), Strategy::Bfs).expect("zero flow is feasible")
}
