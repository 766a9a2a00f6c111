//! Warm starts from predicted (untrusted, possibly infeasible) edge flows.
//!
//! Predictions are floored and clipped to capacity, then conservation is
//! restored by pushing flow along shortest residual paths: from the vertex with
//! the largest excess to the nearest deficit vertex, or back to the source when
//! no deficit is reachable (then forward to the sink). Once no excess is left,
//! remaining deficits pull flow from the sink, or failing that the source. The
//! repaired flow is feasible but not necessarily maximal; a regular solve
//! finishes the job.

use std::collections::{BTreeMap, VecDeque};
use std::time::Instant;

use crate::error::{ScoreError, SolveError};
use crate::network::{Capacity, Flow, FlowNetwork, VertexId};
use crate::residual::{augment, ResidualArc, ResidualView};
use crate::scores::parse_edge_values;
use crate::solve::{ford_fulkerson, SolveStats, Strategy};

/// Integral, capacity-respecting edge values that may violate conservation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoFlow {
    pub values: Vec<Capacity>,
    /// Number of predictions that were negative or not finite and became 0.
    pub negative_clipped: usize,
}

/// Floors each prediction, then clips it into `[0, c(e)]`. Missing trailing
/// entries count as 0.
pub fn clip_to_capacity(net: &FlowNetwork, raw: &[f64]) -> PseudoFlow {
    let mut negative_clipped = 0;
    let values = (0..net.edge_count())
        .map(|e| {
            let r = raw.get(e).copied().unwrap_or(0.0);
            if r.is_nan() || r < 0.0 {
                negative_clipped += 1;
                return 0;
            }
            let floored = r.floor();
            let cap = net.capacity(e);
            if floored >= cap as f64 {
                cap
            } else {
                floored as Capacity
            }
        })
        .collect();
    PseudoFlow {
        values,
        negative_clipped,
    }
}

/// Conservation imbalances at non-terminal vertices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExcessState {
    /// inflow - outflow, where positive
    pub excess: BTreeMap<VertexId, Capacity>,
    /// outflow - inflow, where positive
    pub deficit: BTreeMap<VertexId, Capacity>,
}

impl ExcessState {
    pub fn is_balanced(&self) -> bool {
        self.excess.is_empty() && self.deficit.is_empty()
    }

    /// Σ excess + Σ deficit.
    pub fn total_imbalance(&self) -> Capacity {
        self.excess.values().sum::<Capacity>() + self.deficit.values().sum::<Capacity>()
    }

    pub fn excess_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.excess.keys().copied()
    }

    pub fn deficit_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.deficit.keys().copied()
    }

    // largest value, smallest vertex on ties
    fn largest(map: &BTreeMap<VertexId, Capacity>) -> Option<(VertexId, Capacity)> {
        map.iter().fold(
            None,
            |best: Option<(VertexId, Capacity)>, (&v, &x)| match best {
                Some((_, bx)) if bx >= x => best,
                _ => Some((v, x)),
            },
        )
    }
}

pub fn excess_deficit(net: &FlowNetwork, values: &[Capacity]) -> ExcessState {
    let n = net.vertex_count();
    let mut balance = vec![0 as Capacity; n];
    for (id, e) in net.edges().iter().enumerate() {
        balance[e.head] += values[id];
        balance[e.tail] -= values[id];
    }
    let mut state = ExcessState::default();
    for (v, &b) in balance.iter().enumerate() {
        if v == net.source() || v == net.sink() {
            continue;
        }
        if b > 0 {
            state.excess.insert(v, b);
        } else if b < 0 {
            state.deficit.insert(v, -b);
        }
    }
    state
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RepairStats {
    pub iterations: usize,
    /// Total imbalance before each iteration, then after the last one.
    pub imbalance_history: Vec<Capacity>,
}

/// Turns a clipped pseudo-flow into a feasible flow.
pub fn repair_feasibility(net: &FlowNetwork, pseudo: &PseudoFlow) -> (Flow, RepairStats) {
    let mut flow = Flow::from_values(pseudo.values.clone());
    let mut stats = RepairStats::default();
    let (s, t) = (net.source(), net.sink());
    loop {
        let state = excess_deficit(net, flow.values());
        stats.imbalance_history.push(state.total_imbalance());
        if state.is_balanced() {
            break;
        }
        let view = ResidualView::new(net, &flow);
        let (arcs, limit) = if let Some((x, ex)) = ExcessState::largest(&state.excess) {
            let to_deficit = shortest_path(&view, x, |v| state.deficit.contains_key(&v));
            match to_deficit {
                Some(arcs) => {
                    let d = arcs.last().expect("non-empty").to;
                    (arcs, ex.min(state.deficit[&d]))
                }
                None => {
                    let arcs = shortest_path(&view, x, |v| v == s)
                        .or_else(|| shortest_path(&view, x, |v| v == t))
                        .expect("an excess vertex always reaches a deficit or a terminal");
                    (arcs, ex)
                }
            }
        } else {
            let (d, def) = ExcessState::largest(&state.deficit).expect("unbalanced");
            let arcs = shortest_path(&view, t, |v| v == d)
                .or_else(|| shortest_path(&view, s, |v| v == d))
                .expect("a deficit vertex is always reachable from a terminal");
            (arcs, def)
        };
        let bottleneck = arcs.iter().map(|a| view.residual(a)).min().unwrap_or(0);
        let amount = limit.min(bottleneck);
        debug_assert!(amount >= 1);
        augment(&mut flow, &arcs, amount);
        stats.iterations += 1;
    }
    (flow, stats)
}

/// Shortest residual path from `start` to the first vertex satisfying
/// `is_target`. Terminals other than `start` can end a path but are never
/// passed through.
fn shortest_path(
    view: &ResidualView<'_>,
    start: VertexId,
    is_target: impl Fn(VertexId) -> bool,
) -> Option<Vec<ResidualArc>> {
    let net = view.network();
    let (s, t) = (net.source(), net.sink());
    let mut parent: Vec<Option<ResidualArc>> = vec![None; net.vertex_count()];
    let mut seen = vec![false; net.vertex_count()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        if u != start && (u == s || u == t) {
            continue;
        }
        for (arc, _) in view.arcs_from(u) {
            if seen[arc.to] {
                continue;
            }
            seen[arc.to] = true;
            parent[arc.to] = Some(arc);
            if is_target(arc.to) {
                let mut arcs = Vec::new();
                let mut v = arc.to;
                while let Some(a) = parent[v] {
                    arcs.push(a);
                    v = a.from;
                }
                arcs.reverse();
                return Some(arcs);
            }
            queue.push_back(arc.to);
        }
    }
    None
}

/// Reads `edge_id value` lines into a dense prediction; unlisted edges are 0.
pub fn parse_flow_prediction(text: &str, edge_count: usize) -> Result<Vec<f64>, ScoreError> {
    let mut raw = vec![0.0; edge_count];
    let mut seen = vec![false; edge_count];
    for (_, edge, value) in parse_edge_values(text, edge_count)? {
        if std::mem::replace(&mut seen[edge], true) {
            return Err(ScoreError::Duplicate(edge));
        }
        raw[edge] = value;
    }
    Ok(raw)
}

/// Clip, repair, then solve from the repaired flow.
pub fn warm_start_solve(
    net: &FlowNetwork,
    raw: &[f64],
    strategy: Strategy<'_>,
) -> Result<(Flow, SolveStats), SolveError> {
    let started = Instant::now();
    let pseudo = clip_to_capacity(net, raw);
    let (repaired, repair) = repair_feasibility(net, &pseudo);
    let (flow, mut stats) = ford_fulkerson(net, &repaired, strategy)?;
    stats.repair_iterations = repair.iterations;
    stats.wall_time = started.elapsed();
    Ok((flow, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::fixtures::{diamond, path};
    use crate::solve::max_flow;

    #[test]
    fn flow_prediction_file() {
        assert_eq!(
            parse_flow_prediction("2 1.5\n0 3\n", 3).unwrap(),
            vec![3.0, 0.0, 1.5]
        );
        assert_eq!(
            parse_flow_prediction("0 1\n0 2\n", 1),
            Err(ScoreError::Duplicate(0))
        );
    }

    #[test]
    fn clipping() {
        let net = FlowNetwork::new(2, &[(0, 1, 5), (0, 1, 5), (0, 1, 5), (0, 1, 5)], 0, 1).unwrap();
        let pseudo = clip_to_capacity(&net, &[7.0, 3.8, -2.0, f64::NAN]);
        assert_eq!(pseudo.values, vec![5, 3, 0, 0]);
        assert_eq!(pseudo.negative_clipped, 2);
        assert_eq!(clip_to_capacity(&net, &[1.0]).values, vec![1, 0, 0, 0]);
    }

    #[test]
    fn imbalance_sets() {
        let net = path();
        let state = excess_deficit(&net, &[2, 1]);
        assert_eq!(state.excess, BTreeMap::from([(1, 1)]));
        assert!(state.deficit.is_empty());

        let net = diamond();
        let state = excess_deficit(&net, &[0, 0, 0, 2, 0]);
        assert_eq!(state.deficit, BTreeMap::from([(1, 2)]));
        assert!(state.excess.is_empty());
        assert!(excess_deficit(&net, &[3, 2, 1, 2, 3]).is_balanced());
    }

    #[test]
    fn repair_routes_excess_back_to_source() {
        let net = path();
        let pseudo = PseudoFlow {
            values: vec![2, 1],
            negative_clipped: 0,
        };
        let (flow, stats) = repair_feasibility(&net, &pseudo);
        assert_eq!(flow.values(), &[1, 1]);
        assert_eq!(net.flow_value(&flow), Ok(1));
        assert_eq!(stats.iterations, 1);
        assert_eq!(stats.imbalance_history, vec![1, 0]);
    }

    #[test]
    fn repair_is_identity_on_feasible_flows() {
        let net = diamond();
        let pseudo = clip_to_capacity(&net, &[3.0, 2.0, 1.0, 2.0, 3.0]);
        let (flow, stats) = repair_feasibility(&net, &pseudo);
        assert_eq!(flow.values(), &[3, 2, 1, 2, 3]);
        assert_eq!(stats.iterations, 0);
        assert_eq!(net.flow_value(&flow), Ok(5));
    }

    #[test]
    fn repair_pairs_excess_with_deficit() {
        let net = diamond();
        // a has excess 3 (s->a), b has deficit 3 (b->t)
        let pseudo = clip_to_capacity(&net, &[3.0, 0.0, 0.0, 0.0, 3.0]);
        let (flow, stats) = repair_feasibility(&net, &pseudo);
        assert!(net.is_feasible(&flow));
        // a->b carries 1, the remaining imbalance drains to s / pulls from t
        assert!(stats.imbalance_history.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn repair_pulls_deficit_from_sink() {
        let net = diamond();
        let pseudo = clip_to_capacity(&net, &[0.0, 0.0, 0.0, 2.0, 0.0]);
        let (flow, stats) = repair_feasibility(&net, &pseudo);
        assert!(net.is_feasible(&flow));
        assert_eq!(flow.values(), &[0, 0, 0, 0, 0]);
        assert_eq!(stats.iterations, 1);
    }

    #[test]
    fn warm_start_matches_cold_start() {
        let net = diamond();
        let (_, cold) = max_flow(&net);
        let (flow, warm) = warm_start_solve(&net, &[0.0; 5], Strategy::Bfs).unwrap();
        assert_eq!(net.flow_value(&flow), Ok(5));
        assert_eq!(warm.augmentations, cold.augmentations);
        assert_eq!(warm.residual_arc_scans, cold.residual_arc_scans);
        assert_eq!(warm.repair_iterations, 0);

        let (flow, warm) =
            warm_start_solve(&net, &[3.0, 2.0, 1.0, 2.0, 3.0], Strategy::Bfs).unwrap();
        assert_eq!(net.flow_value(&flow), Ok(5));
        assert_eq!(warm.augmentations, 0);

        let (flow, _) =
            warm_start_solve(&net, &[100.0, -4.0, 0.5, 9.0, 2.2], Strategy::Dfs).unwrap();
        assert_eq!(net.flow_value(&flow), Ok(5));
    }
}
