//! Brute-force reference implementations shared by the integration tests.
//! Everything here works from raw edge lists and flow values, without the
//! library's residual views or solvers.

#![allow(dead_code)]

use augflow::bench::random_network;
use augflow::{Capacity, EdgeId, FlowNetwork, VertexId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn diamond() -> FlowNetwork {
    FlowNetwork::new(
        4,
        &[(0, 1, 3), (0, 2, 2), (1, 2, 1), (1, 3, 2), (2, 3, 3)],
        0,
        3,
    )
    .unwrap()
}

/// Random instance with `2 <= n <= max_n`, `m <= max_m`, capacities in `1..=10`.
pub fn small_network(seed: u64, max_n: usize, max_m: usize) -> FlowNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_n);
    let m = rng.random_range(0..=max_m.min(n * (n - 1)));
    random_network(n, m, 10, rng.random()).unwrap()
}

/// Minimum over every vertex set containing `s` but not `t` of the capacity
/// leaving it.
pub fn min_cut_by_enumeration(net: &FlowNetwork) -> Capacity {
    let n = net.vertex_count();
    let (s, t) = (net.source(), net.sink());
    let others: Vec<VertexId> = (0..n).filter(|&v| v != s && v != t).collect();
    let mut best = Capacity::MAX;
    for mask in 0u32..(1 << others.len()) {
        let mut side = vec![false; n];
        side[s] = true;
        for (i, &v) in others.iter().enumerate() {
            side[v] = mask >> i & 1 == 1;
        }
        let cap = net
            .edges()
            .iter()
            .filter(|e| side[e.tail] && !side[e.head])
            .map(|e| e.capacity)
            .sum();
        best = best.min(cap);
    }
    best
}

/// One arc of the residual graph: `edge` traversed forward or backward.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub edge: EdgeId,
    pub forward: bool,
    pub from: VertexId,
    pub to: VertexId,
    pub residual: Capacity,
}

pub fn residual_arcs(net: &FlowNetwork, flow: &[Capacity]) -> Vec<Arc> {
    let mut arcs = Vec::new();
    for (id, e) in net.edges().iter().enumerate() {
        if e.capacity - flow[id] > 0 {
            arcs.push(Arc {
                edge: id,
                forward: true,
                from: e.tail,
                to: e.head,
                residual: e.capacity - flow[id],
            });
        }
        if flow[id] > 0 {
            arcs.push(Arc {
                edge: id,
                forward: false,
                from: e.head,
                to: e.tail,
                residual: flow[id],
            });
        }
    }
    arcs
}

/// Every vertex-simple residual path from `from` to `to` avoiding `banned`.
pub fn all_simple_paths(
    net: &FlowNetwork,
    flow: &[Capacity],
    from: VertexId,
    to: VertexId,
    banned: &[VertexId],
) -> Vec<Vec<Arc>> {
    let arcs = residual_arcs(net, flow);
    let mut out = Vec::new();
    if banned.contains(&from) || banned.contains(&to) {
        return out;
    }
    let mut on_path = vec![false; net.vertex_count()];
    let mut stack = Vec::new();
    fn walk(
        arcs: &[Arc],
        at: VertexId,
        to: VertexId,
        banned: &[VertexId],
        on_path: &mut Vec<bool>,
        stack: &mut Vec<Arc>,
        out: &mut Vec<Vec<Arc>>,
    ) {
        if at == to {
            out.push(stack.clone());
            return;
        }
        on_path[at] = true;
        for a in arcs.iter().filter(|a| a.from == at) {
            if on_path[a.to] || banned.contains(&a.to) {
                continue;
            }
            stack.push(*a);
            walk(arcs, a.to, to, banned, on_path, stack, out);
            stack.pop();
        }
        on_path[at] = false;
    }
    walk(&arcs, from, to, banned, &mut on_path, &mut stack, &mut out);
    out
}

pub fn bottleneck(path: &[Arc]) -> Capacity {
    path.iter()
        .map(|a| a.residual)
        .min()
        .unwrap_or(Capacity::MAX)
}

/// Ford-Fulkerson over exhaustively enumerated augmenting paths: each round
/// lists every simple s-t residual path and pushes along the widest.
pub fn max_flow_by_path_enumeration(net: &FlowNetwork) -> Capacity {
    let mut flow = vec![0; net.edge_count()];
    let mut value = 0;
    loop {
        let paths = all_simple_paths(net, &flow, net.source(), net.sink(), &[]);
        let Some(best) = paths.iter().max_by_key(|p| bottleneck(p)) else {
            return value;
        };
        let delta = bottleneck(best);
        for a in best {
            flow[a.edge] += if a.forward { delta } else { -delta };
        }
        value += delta;
    }
}

/// Capacity and conservation checked directly from edge lists.
pub fn is_feasible(net: &FlowNetwork, flow: &[Capacity]) -> bool {
    if flow.len() != net.edge_count() {
        return false;
    }
    let mut balance = vec![0; net.vertex_count()];
    for (id, e) in net.edges().iter().enumerate() {
        if flow[id] < 0 || flow[id] > e.capacity {
            return false;
        }
        balance[e.head] += flow[id];
        balance[e.tail] -= flow[id];
    }
    balance
        .iter()
        .enumerate()
        .all(|(v, &b)| v == net.source() || v == net.sink() || b == 0)
}

pub fn value_of(net: &FlowNetwork, flow: &[Capacity]) -> Capacity {
    net.edges()
        .iter()
        .enumerate()
        .map(|(id, e)| {
            let mut x = 0;
            if e.tail == net.source() {
                x += flow[id];
            }
            if e.head == net.source() {
                x -= flow[id];
            }
            x
        })
        .sum()
}

/// Like [`small_network`] but with `4..=8` vertices and at least `2n` edges,
/// so most instances carry several augmentations.
pub fn busy_network(seed: u64) -> FlowNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(4..=8);
    let m = rng.random_range(2 * n..=(4 * n).min(n * (n - 1)));
    random_network(n, m, 10, rng.random()).unwrap()
}
