//! Capacitated directed networks, flows, and the plain-text network format.
//!
//! The text format is line oriented: a header `n m s t` followed by `m`
//! lines `u v cap`, all base-10 integers. Anything after a `#` is ignored.
//! Edges are numbered by their position in the edge list.

use std::fmt::Write as _;

use crate::error::{NetworkError, Violation};

pub type VertexId = usize;
pub type EdgeId = usize;
pub type Capacity = i64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub tail: VertexId,
    pub head: VertexId,
    pub capacity: Capacity,
}

/// A validated s-t network. Parallel edges are allowed; self-loops are not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowNetwork {
    vertex_count: usize,
    edges: Vec<Edge>,
    source: VertexId,
    sink: VertexId,
    out_edges: Vec<Vec<EdgeId>>,
    in_edges: Vec<Vec<EdgeId>>,
    // per vertex: every incident edge, ascending EdgeId
    incident: Vec<Vec<EdgeId>>,
}

impl FlowNetwork {
    /// Validates and builds a network. Edge ids follow input order.
    pub fn new(
        vertex_count: usize,
        edges: &[(VertexId, VertexId, Capacity)],
        source: VertexId,
        sink: VertexId,
    ) -> Result<Self, NetworkError> {
        if vertex_count < 2 {
            return Err(NetworkError::TooFewVertices);
        }
        for &terminal in &[source, sink] {
            if terminal >= vertex_count {
                return Err(NetworkError::TerminalOutOfRange {
                    vertex: terminal,
                    vertex_count,
                });
            }
        }
        if source == sink {
            return Err(NetworkError::SourceIsSink(source));
        }
        let mut out_edges = vec![Vec::new(); vertex_count];
        let mut in_edges = vec![Vec::new(); vertex_count];
        let mut incident = vec![Vec::new(); vertex_count];
        let mut validated = Vec::with_capacity(edges.len());
        for (id, &(tail, head, capacity)) in edges.iter().enumerate() {
            for &vertex in &[tail, head] {
                if vertex >= vertex_count {
                    return Err(NetworkError::VertexOutOfRange {
                        edge: id,
                        vertex,
                        vertex_count,
                    });
                }
            }
            if tail == head {
                return Err(NetworkError::SelfLoop {
                    edge: id,
                    vertex: tail,
                });
            }
            if capacity < 0 {
                return Err(NetworkError::NegativeCapacity { edge: id, capacity });
            }
            out_edges[tail].push(id);
            in_edges[head].push(id);
            incident[tail].push(id);
            incident[head].push(id);
            validated.push(Edge {
                tail,
                head,
                capacity,
            });
        }
        Ok(FlowNetwork {
            vertex_count,
            edges: validated,
            source,
            sink,
            out_edges,
            in_edges,
            incident,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn sink(&self) -> VertexId {
        self.sink
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Edge {
        self.edges[id]
    }

    pub fn capacity(&self, id: EdgeId) -> Capacity {
        self.edges[id].capacity
    }

    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out_edges[v]
    }

    pub fn in_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.in_edges[v]
    }

    /// All edges touching `v`, in ascending id order.
    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        &self.incident[v]
    }

    pub fn total_capacity(&self) -> Capacity {
        self.edges.iter().map(|e| e.capacity).sum()
    }

    /// Parses the plain-text network format.
    pub fn parse(text: &str) -> Result<Self, NetworkError> {
        let mut rows = text.lines().enumerate().filter_map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("").trim();
            (!body.is_empty()).then_some((i + 1, body))
        });
        let (header_line, header) = rows.next().ok_or(NetworkError::Parse {
            line: 1,
            message: "missing header `n m s t`".into(),
        })?;
        let header = parse_ints(header_line, header, 4)?;
        let [n, m, s, t] = [header[0], header[1], header[2], header[3]];
        for (name, value) in [("n", n), ("m", m), ("s", s), ("t", t)] {
            if value < 0 {
                return Err(NetworkError::Parse {
                    line: header_line,
                    message: format!("{name} must be non-negative, got {value}"),
                });
            }
        }
        let m = m as usize;
        let mut edges = Vec::with_capacity(m);
        let mut last_line = header_line;
        for (line, body) in rows {
            last_line = line;
            if edges.len() == m {
                return Err(NetworkError::Parse {
                    line,
                    message: format!("more than the declared {m} edges"),
                });
            }
            let row = parse_ints(line, body, 3)?;
            if row[0] < 0 || row[1] < 0 {
                return Err(NetworkError::Parse {
                    line,
                    message: "vertex ids must be non-negative".into(),
                });
            }
            edges.push((row[0] as usize, row[1] as usize, row[2]));
        }
        if edges.len() != m {
            return Err(NetworkError::Parse {
                line: last_line,
                message: format!("declared {m} edges, found {}", edges.len()),
            });
        }
        FlowNetwork::new(n as usize, &edges, s as usize, t as usize)
    }

    /// Serializes in the text format, edges in id order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{} {} {} {}",
            self.vertex_count,
            self.edges.len(),
            self.source,
            self.sink
        )
        .unwrap();
        for e in &self.edges {
            writeln!(out, "{} {} {}", e.tail, e.head, e.capacity).unwrap();
        }
        out
    }

    /// Checks capacity and conservation constraints, returning the first violation.
    pub fn check_flow(&self, flow: &Flow) -> Result<(), Violation> {
        if flow.len() != self.edges.len() {
            return Err(Violation::Length {
                expected: self.edges.len(),
                got: flow.len(),
            });
        }
        for (id, e) in self.edges.iter().enumerate() {
            let f = flow[id];
            if f < 0 {
                return Err(Violation::Negative { edge: id, flow: f });
            }
            if f > e.capacity {
                return Err(Violation::Capacity {
                    edge: id,
                    flow: f,
                    capacity: e.capacity,
                });
            }
        }
        for v in 0..self.vertex_count {
            if v == self.source || v == self.sink {
                continue;
            }
            let inflow = flow.inflow(self, v);
            let outflow = flow.outflow(self, v);
            if inflow != outflow {
                return Err(Violation::Conservation {
                    vertex: v,
                    inflow,
                    outflow,
                });
            }
        }
        Ok(())
    }

    pub fn is_feasible(&self, flow: &Flow) -> bool {
        self.check_flow(flow).is_ok()
    }

    /// Net flow out of the source, after checking feasibility.
    pub fn flow_value(&self, flow: &Flow) -> Result<Capacity, Violation> {
        self.check_flow(flow)?;
        Ok(flow.net_out(self, self.source))
    }
}

fn parse_ints(line: usize, body: &str, expected: usize) -> Result<Vec<i64>, NetworkError> {
    let fields: Vec<&str> = body.split_whitespace().collect();
    if fields.len() != expected {
        return Err(NetworkError::Parse {
            line,
            message: format!("expected {expected} fields, found {}", fields.len()),
        });
    }
    fields
        .iter()
        .map(|f| {
            f.parse::<i64>().map_err(|_| NetworkError::Parse {
                line,
                message: format!("{f:?} is not a base-10 integer"),
            })
        })
        .collect()
}

/// Per-edge flow values, indexed by `EdgeId`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Flow(Vec<Capacity>);

impl Flow {
    pub fn zero(net: &FlowNetwork) -> Self {
        Flow(vec![0; net.edge_count()])
    }

    pub fn from_values(values: Vec<Capacity>) -> Self {
        Flow(values)
    }

    pub fn values(&self) -> &[Capacity] {
        &self.0
    }

    pub fn into_values(self) -> Vec<Capacity> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inflow(&self, net: &FlowNetwork, v: VertexId) -> Capacity {
        net.in_edges(v).iter().map(|&e| self.0[e]).sum()
    }

    pub fn outflow(&self, net: &FlowNetwork, v: VertexId) -> Capacity {
        net.out_edges(v).iter().map(|&e| self.0[e]).sum()
    }

    pub fn net_out(&self, net: &FlowNetwork, v: VertexId) -> Capacity {
        self.outflow(net, v) - self.inflow(net, v)
    }

    /// `edge_id value` lines in id order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (id, v) in self.0.iter().enumerate() {
            writeln!(out, "{id} {v}").unwrap();
        }
        out
    }
}

impl std::ops::Index<EdgeId> for Flow {
    type Output = Capacity;

    fn index(&self, id: EdgeId) -> &Capacity {
        &self.0[id]
    }
}

impl std::ops::IndexMut<EdgeId> for Flow {
    fn index_mut(&mut self, id: EdgeId) -> &mut Capacity {
        &mut self.0[id]
    }
}
