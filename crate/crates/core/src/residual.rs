//! Residual view over a network and a flow. Reverse arcs are derived from the
//! flow on demand rather than stored.

use crate::network::{Capacity, EdgeId, Flow, FlowNetwork, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

/// One arc of the residual graph: an original edge traversed in a direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResidualArc {
    pub edge: EdgeId,
    pub direction: Direction,
    pub from: VertexId,
    pub to: VertexId,
}

impl ResidualArc {
    pub fn forward(net: &FlowNetwork, edge: EdgeId) -> Self {
        let e = net.edge(edge);
        ResidualArc {
            edge,
            direction: Direction::Forward,
            from: e.tail,
            to: e.head,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ResidualView<'a> {
    net: &'a FlowNetwork,
    flow: &'a Flow,
}

impl<'a> ResidualView<'a> {
    pub fn new(net: &'a FlowNetwork, flow: &'a Flow) -> Self {
        ResidualView { net, flow }
    }

    pub fn network(&self) -> &'a FlowNetwork {
        self.net
    }

    pub fn flow(&self) -> &'a Flow {
        self.flow
    }

    pub fn forward_residual(&self, edge: EdgeId) -> Capacity {
        self.net.capacity(edge) - self.flow[edge]
    }

    pub fn backward_residual(&self, edge: EdgeId) -> Capacity {
        self.flow[edge]
    }

    pub fn residual(&self, arc: &ResidualArc) -> Capacity {
        match arc.direction {
            Direction::Forward => self.forward_residual(arc.edge),
            Direction::Backward => self.backward_residual(arc.edge),
        }
    }

    /// The residual arc leaving `v` along incident edge `edge`, with its
    /// residual capacity (possibly zero).
    pub fn arc_leaving(&self, v: VertexId, edge: EdgeId) -> (ResidualArc, Capacity) {
        let e = self.net.edge(edge);
        if e.tail == v {
            let arc = ResidualArc {
                edge,
                direction: Direction::Forward,
                from: v,
                to: e.head,
            };
            (arc, e.capacity - self.flow[edge])
        } else {
            let arc = ResidualArc {
                edge,
                direction: Direction::Backward,
                from: v,
                to: e.tail,
            };
            (arc, self.flow[edge])
        }
    }

    /// The residual arc entering `v` along incident edge `edge`.
    pub fn arc_entering(&self, v: VertexId, edge: EdgeId) -> (ResidualArc, Capacity) {
        let e = self.net.edge(edge);
        if e.head == v {
            let arc = ResidualArc {
                edge,
                direction: Direction::Forward,
                from: e.tail,
                to: v,
            };
            (arc, e.capacity - self.flow[edge])
        } else {
            let arc = ResidualArc {
                edge,
                direction: Direction::Backward,
                from: e.head,
                to: v,
            };
            (arc, self.flow[edge])
        }
    }

    /// Every arc leaving `v` with positive residual capacity, ascending `EdgeId`.
    pub fn arcs_from(&self, v: VertexId) -> impl Iterator<Item = (ResidualArc, Capacity)> + 'a {
        let view = *self;
        self.net
            .incident(v)
            .iter()
            .map(move |&id| view.arc_leaving(v, id))
            .filter(|&(_, r)| r > 0)
    }

    /// Every arc entering `v` with positive residual capacity, ascending `EdgeId`.
    pub fn arcs_into(&self, v: VertexId) -> impl Iterator<Item = (ResidualArc, Capacity)> + 'a {
        let view = *self;
        self.net
            .incident(v)
            .iter()
            .map(move |&id| view.arc_entering(v, id))
            .filter(|&(_, r)| r > 0)
    }

    /// Vertices reachable from `start` through positive-residual arcs.
    pub fn reachable_from(&self, start: VertexId) -> Vec<bool> {
        let mut seen = vec![false; self.net.vertex_count()];
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for (arc, _) in self.arcs_from(u) {
                if !seen[arc.to] {
                    seen[arc.to] = true;
                    stack.push(arc.to);
                }
            }
        }
        seen
    }
}

/// A residual path together with its bottleneck. Pivot paths assembled by the
/// guided search also remember where the pivot edge sits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentingPath {
    pub arcs: Vec<ResidualArc>,
    pub bottleneck: Capacity,
    pub pivot: Option<EdgeId>,
    /// Index of the pivot arc in `arcs`; `arcs[..i]` is P1 and `arcs[i + 1..]` is P2.
    pub pivot_index: Option<usize>,
}

impl AugmentingPath {
    pub fn from_arcs(view: &ResidualView<'_>, arcs: Vec<ResidualArc>) -> Self {
        let bottleneck = arcs
            .iter()
            .map(|a| view.residual(a))
            .min()
            .unwrap_or(Capacity::MAX);
        AugmentingPath {
            arcs,
            bottleneck,
            pivot: None,
            pivot_index: None,
        }
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// Vertex sequence, starting at the first arc's tail.
    pub fn vertices(&self) -> Vec<VertexId> {
        let mut out = Vec::with_capacity(self.arcs.len() + 1);
        if let Some(first) = self.arcs.first() {
            out.push(first.from);
        }
        out.extend(self.arcs.iter().map(|a| a.to));
        out
    }

    pub fn is_vertex_simple(&self) -> bool {
        let vs = self.vertices();
        let mut sorted = vs.clone();
        sorted.sort_unstable();
        sorted.dedup();
        sorted.len() == vs.len()
    }

    pub fn is_connected(&self) -> bool {
        self.arcs.windows(2).all(|w| w[0].to == w[1].from)
    }
}

/// Pushes `amount` along `arcs`.
pub fn augment(flow: &mut Flow, arcs: &[ResidualArc], amount: Capacity) {
    for arc in arcs {
        match arc.direction {
            Direction::Forward => flow[arc.edge] += amount,
            Direction::Backward => flow[arc.edge] -= amount,
        }
    }
}
