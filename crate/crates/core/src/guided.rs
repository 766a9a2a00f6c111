//! Shortest augmenting paths with maximum-bottleneck tie-breaking, and the
//! score-guided Ford-Fulkerson that assembles paths around a pivot edge.
//!
//! The guided loop pops the highest-scoring live edge `e* = (v, w)` and builds
//! `P1 · e* · P2`, where `P1` runs from the source to `v` and `P2` from `w` to
//! the sink. Both halves come from the adjusted breadth-first search below.
//! `P1` may not touch `w` or the sink, and `P2` may not touch any vertex of
//! `P1`, so the assembled path is always simple. Pivots that cannot be
//! completed are set aside until the round ends. A round that pops the heap
//! dry without augmenting falls back to one adjusted Edmonds-Karp step, and the
//! solve ends when that finds nothing.

use std::collections::VecDeque;

use crate::error::SolveError;
use crate::heap::ScoreHeap;
use crate::network::{Capacity, EdgeId, Flow, FlowNetwork, VertexId};
use crate::residual::{AugmentingPath, ResidualArc, ResidualView};
use crate::scores::EdgeScores;
use crate::solve::{ford_fulkerson, Run, SolveStats, Strategy};
use crate::warmstart;

/// Among the fewest-arc residual paths `from -> to` avoiding `banned`, one with
/// the largest bottleneck. Remaining ties go to the smaller `EdgeId` on the
/// arc entering each vertex. `from == to` yields the empty path.
pub fn shortest_max_bottleneck_path(
    view: &ResidualView<'_>,
    from: VertexId,
    to: VertexId,
    banned: &[VertexId],
) -> Option<AugmentingPath> {
    let mut scans = 0;
    shortest_max_bottleneck_path_counted(view, from, to, banned, &mut scans)
}

pub(crate) fn shortest_max_bottleneck_path_counted(
    view: &ResidualView<'_>,
    from: VertexId,
    to: VertexId,
    banned: &[VertexId],
    scans: &mut u64,
) -> Option<AugmentingPath> {
    if from == to {
        return Some(AugmentingPath::from_arcs(view, Vec::new()));
    }
    let net = view.network();
    let n = net.vertex_count();
    let mut blocked = vec![false; n];
    for &b in banned {
        blocked[b] = true;
    }
    blocked[from] = false;
    blocked[to] = false;

    // layer the residual graph by hop distance from `from`
    let mut dist = vec![usize::MAX; n];
    dist[from] = 0;
    let mut order = vec![from];
    let mut queue = VecDeque::from([from]);
    'bfs: while let Some(u) = queue.pop_front() {
        for &edge in net.incident(u) {
            *scans += 1;
            let (arc, residual) = view.arc_leaving(u, edge);
            if residual > 0 && !blocked[arc.to] && dist[arc.to] == usize::MAX {
                dist[arc.to] = dist[u] + 1;
                if arc.to == to {
                    break 'bfs;
                }
                order.push(arc.to);
                queue.push_back(arc.to);
            }
        }
    }
    let target_depth = dist[to];
    if target_depth == usize::MAX {
        return None;
    }

    // widest path over the layered DAG
    let mut width: Vec<Capacity> = vec![0; n];
    let mut pred: Vec<Option<ResidualArc>> = vec![None; n];
    width[from] = Capacity::MAX;
    for &u in &order {
        if dist[u] >= target_depth {
            continue;
        }
        for &edge in net.incident(u) {
            *scans += 1;
            let (arc, residual) = view.arc_leaving(u, edge);
            let x = arc.to;
            if residual == 0 || blocked[x] || dist[x] != dist[u] + 1 {
                continue;
            }
            if dist[x] > target_depth || (dist[x] == target_depth && x != to) {
                continue;
            }
            let candidate = width[u].min(residual);
            let better = match pred[x] {
                None => true,
                Some(old) => candidate > width[x] || (candidate == width[x] && arc.edge < old.edge),
            };
            if better {
                width[x] = candidate;
                pred[x] = Some(arc);
            }
        }
    }

    let mut arcs = Vec::with_capacity(target_depth);
    let mut v = to;
    while v != from {
        let arc = pred[v].expect("every layered vertex has a predecessor");
        arcs.push(arc);
        v = arc.from;
    }
    arcs.reverse();
    let path = AugmentingPath::from_arcs(view, arcs);
    debug_assert_eq!(path.bottleneck, width[to]);
    Some(path)
}

/// Edmonds-Karp using [`shortest_max_bottleneck_path`] for every augmentation.
pub fn adjusted_edmonds_karp(
    net: &FlowNetwork,
    initial: &Flow,
) -> Result<(Flow, SolveStats), SolveError> {
    ford_fulkerson(net, initial, Strategy::AdjustedBfs)
}

/// Score-guided Ford-Fulkerson. `scores` must cover every edge.
pub fn guided_ff(
    net: &FlowNetwork,
    initial: &Flow,
    scores: &EdgeScores,
) -> Result<(Flow, SolveStats), SolveError> {
    ford_fulkerson(net, initial, Strategy::Guided(scores))
}

/// Warm start from raw flow predictions, then guided search on the repaired flow.
pub fn combined_ff(
    net: &FlowNetwork,
    raw_flow: &[f64],
    scores: &EdgeScores,
) -> Result<(Flow, SolveStats), SolveError> {
    warmstart::warm_start_solve(net, raw_flow, Strategy::Guided(scores))
}

/// Assembles `P1 · pivot · P2` on the current residual graph, if possible.
pub fn pivot_path(
    view: &ResidualView<'_>,
    pivot: EdgeId,
    scans: &mut u64,
) -> Option<AugmentingPath> {
    let net = view.network();
    let (s, t) = (net.source(), net.sink());
    let e = net.edge(pivot);
    let (v, w) = (e.tail, e.head);
    if view.forward_residual(pivot) == 0 || w == s || v == t {
        return None;
    }
    let p1 = if v == s {
        Vec::new()
    } else {
        shortest_max_bottleneck_path_counted(view, s, v, &[w, t], scans)?.arcs
    };
    let mut used: Vec<VertexId> = p1.iter().map(|a| a.from).collect();
    used.push(v);
    let p2 = if w == t {
        Vec::new()
    } else {
        shortest_max_bottleneck_path_counted(view, w, t, &used, scans)?.arcs
    };
    let pivot_index = p1.len();
    let mut arcs = p1;
    arcs.push(ResidualArc::forward(net, pivot));
    arcs.extend(p2);
    let mut path = AugmentingPath::from_arcs(view, arcs);
    path.pivot = Some(pivot);
    path.pivot_index = Some(pivot_index);
    debug_assert!(path.is_vertex_simple());
    Some(path)
}

pub(crate) fn guided_loop(
    net: &FlowNetwork,
    flow: &mut Flow,
    scores: &EdgeScores,
    run: &mut Run<'_>,
) {
    let mut heap = {
        let view = ResidualView::new(net, flow);
        ScoreHeap::new(scores, |e| view.forward_residual(e) > 0)
    };
    let (s, t) = (net.source(), net.sink());
    loop {
        let mut set_aside = Vec::new();
        let mut augmented = false;
        while let Some(pivot) = heap.pop() {
            run.record_pivot(pivot);
            let view = ResidualView::new(net, flow);
            if view.forward_residual(pivot) == 0 {
                heap.kill(pivot);
                continue;
            }
            match pivot_path(&view, pivot, &mut run.stats.residual_arc_scans) {
                Some(path) => {
                    let arcs = path.arcs.clone();
                    run.apply(flow, path, false);
                    refresh(&mut heap, net, flow, &arcs);
                    augmented = true;
                    break;
                }
                None => set_aside.push(pivot),
            }
        }
        for edge in set_aside {
            if net.capacity(edge) - flow[edge] > 0 {
                heap.revive(edge);
            } else {
                heap.kill(edge);
            }
        }
        if augmented {
            continue;
        }
        let fallback = shortest_max_bottleneck_path_counted(
            &ResidualView::new(net, flow),
            s,
            t,
            &[],
            &mut run.stats.residual_arc_scans,
        );
        match fallback {
            Some(path) => {
                let arcs = path.arcs.clone();
                run.apply(flow, path, true);
                refresh(&mut heap, net, flow, &arcs);
            }
            None => break,
        }
    }
}

/// Kills edges the augmentation saturated and revives those whose forward
/// residual is open again, including a pivot that was not saturated.
fn refresh(heap: &mut ScoreHeap, net: &FlowNetwork, flow: &Flow, arcs: &[ResidualArc]) {
    for arc in arcs {
        if net.capacity(arc.edge) - flow[arc.edge] == 0 {
            heap.kill(arc.edge);
        } else {
            heap.revive(arc.edge);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::fixtures::{diamond, path};
    use crate::solve::ford_fulkerson_traced;

    fn two_paths() -> FlowNetwork {
        // s=0, a=1, b=2, t=3
        FlowNetwork::new(4, &[(0, 1, 1), (1, 3, 5), (0, 2, 5), (2, 3, 4)], 0, 3).unwrap()
    }

    fn edges(p: &AugmentingPath) -> Vec<EdgeId> {
        p.arcs.iter().map(|a| a.edge).collect()
    }

    #[test]
    fn tie_break_prefers_wider_path() {
        let net = two_paths();
        let flow = Flow::zero(&net);
        let p = shortest_max_bottleneck_path(&ResidualView::new(&net, &flow), 0, 3, &[]).unwrap();
        assert_eq!(edges(&p), vec![2, 3]);
        assert_eq!(p.bottleneck, 4);
    }

    #[test]
    fn single_path() {
        let net = path();
        let flow = Flow::zero(&net);
        let p = shortest_max_bottleneck_path(&ResidualView::new(&net, &flow), 0, 2, &[]).unwrap();
        assert_eq!(edges(&p), vec![0, 1]);
        assert_eq!(p.bottleneck, 1);
    }

    #[test]
    fn banned_vertices_are_avoided() {
        let net = diamond();
        let flow = Flow::zero(&net);
        let view = ResidualView::new(&net, &flow);
        let p = shortest_max_bottleneck_path(&view, 0, 3, &[1]).unwrap();
        assert_eq!(edges(&p), vec![1, 4]);
        assert_eq!(p.bottleneck, 2);
        assert!(shortest_max_bottleneck_path(&view, 0, 3, &[1, 2]).is_none());
    }

    #[test]
    fn adjusted_first_augmentation_takes_widest() {
        let net = two_paths();
        let (flow, stats, trace) =
            ford_fulkerson_traced(&net, &Flow::zero(&net), Strategy::AdjustedBfs).unwrap();
        assert_eq!(edges(&trace.augmentations[0].path), vec![2, 3]);
        assert_eq!(trace.augmentations[0].path.bottleneck, 4);
        assert_eq!(net.flow_value(&flow), Ok(5));
        assert_eq!(stats.augmentations, 2);
    }

    #[test]
    fn adjusted_diamond_and_optimal_start() {
        let net = diamond();
        let (flow, _) = adjusted_edmonds_karp(&net, &Flow::zero(&net)).unwrap();
        assert_eq!(net.flow_value(&flow), Ok(5));
        let (_, stats) = adjusted_edmonds_karp(&net, &flow).unwrap();
        assert_eq!(stats.augmentations, 0);
    }

    #[test]
    fn guided_diamond_oracle_first_step() {
        let net = diamond();
        // oracle-shaped: s->a 1.0, s->b 2/3, the rest below
        let scores = EdgeScores::new(vec![1.0, 2.0 / 3.0, 0.05, 0.1, 0.15]).unwrap();
        let (flow, _, trace) =
            ford_fulkerson_traced(&net, &Flow::zero(&net), Strategy::Guided(&scores)).unwrap();
        assert_eq!(trace.pivot_attempts[0], 0);
        let first = &trace.augmentations[0].path;
        assert_eq!(first.pivot, Some(0));
        assert_eq!(first.pivot_index, Some(0));
        assert_eq!(edges(first), vec![0, 3]);
        assert_eq!(first.bottleneck, 2);
        assert_eq!(net.flow_value(&flow), Ok(5));
    }

    #[test]
    fn guided_equal_scores_still_optimal() {
        let net = diamond();
        let scores = EdgeScores::uniform(5, 0.5);
        let (flow, _, trace) =
            ford_fulkerson_traced(&net, &Flow::zero(&net), Strategy::Guided(&scores)).unwrap();
        assert_eq!(trace.pivot_attempts[0], 0);
        assert_eq!(net.flow_value(&flow), Ok(5));
    }

    #[test]
    fn saturated_pivot_is_skipped() {
        let net = diamond();
        // a->b (edge 2) scores highest but starts saturated
        let start = Flow::from_values(vec![1, 0, 1, 0, 1]);
        let scores = EdgeScores::new(vec![0.1, 0.1, 1.0, 0.1, 0.1]).unwrap();
        let (flow, _, trace) =
            ford_fulkerson_traced(&net, &start, Strategy::Guided(&scores)).unwrap();
        assert_ne!(trace.pivot_attempts[0], 2);
        for aug in &trace.augmentations {
            assert_ne!(aug.path.pivot, Some(2));
        }
        assert_eq!(net.flow_value(&flow), Ok(5));
    }

    #[test]
    fn pivot_into_source_or_out_of_sink_is_unusable() {
        let net = FlowNetwork::new(3, &[(1, 0, 4), (0, 2, 3), (2, 1, 2)], 0, 2).unwrap();
        let flow = Flow::zero(&net);
        let view = ResidualView::new(&net, &flow);
        let mut scans = 0;
        assert!(pivot_path(&view, 0, &mut scans).is_none());
        assert!(pivot_path(&view, 2, &mut scans).is_none());
        assert!(pivot_path(&view, 1, &mut scans).is_some());
    }

    #[test]
    fn missing_scores_rejected() {
        let net = diamond();
        let scores = EdgeScores::uniform(3, 0.5);
        assert!(matches!(
            guided_ff(&net, &Flow::zero(&net), &scores),
            Err(SolveError::Scores(_))
        ));
    }

    #[test]
    fn pivot_out_of_sink_is_never_used() {
        let net = FlowNetwork::new(3, &[(2, 1, 9), (0, 1, 2), (1, 2, 2)], 0, 2).unwrap();
        let scores = EdgeScores::new(vec![1.0, 0.0, 0.0]).unwrap();
        let (flow, stats, trace) =
            ford_fulkerson_traced(&net, &Flow::zero(&net), Strategy::Guided(&scores)).unwrap();
        assert_eq!(trace.pivot_attempts[..2], [0, 1]);
        assert_eq!(trace.augmentations[0].path.pivot, Some(1));
        assert_eq!(net.flow_value(&flow), Ok(2));
        assert_eq!((stats.augmentations, stats.fallback_augmentations), (1, 0));
    }

    #[test]
    fn fallback_completes_when_no_pivot_is_live() {
        // the only augmenting path cancels flow on t->s, so no edge has forward residual
        let net = FlowNetwork::new(2, &[(1, 0, 3)], 0, 1).unwrap();
        let start = Flow::from_values(vec![3]);
        let scores = EdgeScores::uniform(1, 1.0);
        let (flow, stats) = guided_ff(&net, &start, &scores).unwrap();
        assert_eq!(flow.values(), &[0]);
        assert_eq!((stats.augmentations, stats.fallback_augmentations), (1, 1));
    }
}
