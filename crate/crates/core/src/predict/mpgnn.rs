//! Message-passing edge scorer with joint node and edge embeddings.
//!
//! Inputs per vertex are `x_v = [terminal, degree / max degree]` with terminal
//! `1` at the source, `-1` at the sink and `0` elsewhere. Inputs per edge are
//! `e_uv = [residual, capacity, flow]`, each divided by the largest capacity.
//! Node embeddings start as `x_v` zero-padded to the hidden width; edge
//! embeddings start at zero. One round, for every edge `(u, v)`:
//!
//! ```text
//! m_uv  = phi_m([h_u, h_v, h_uv, e_uv])
//! h_v'  = phi_u([h_v, sum of m_uv over edges entering v])
//! h_uv' = phi_e([h_uv, h_u, h_v, e_uv])
//! ```
//!
//! and finally `p(u, v) = logistic(head([h_u, h_v, h_uv, e_uv]))`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::linear::sigmoid;
use crate::error::ModelError;
use crate::network::{Flow, FlowNetwork};
use crate::scores::EdgeScores;

pub const NODE_INPUT_DIM: usize = 2;
pub const EDGE_INPUT_DIM: usize = 3;

/// Dense affine map `y = W x + b` with `W` stored row-major, `rows` outputs by
/// `cols` inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layer {
    pub rows: usize,
    pub cols: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Layer {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Layer {
            rows,
            cols,
            weights: vec![0.0; rows * cols],
            bias: vec![0.0; rows],
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let row = &self.weights[r * self.cols..(r + 1) * self.cols];
                row.iter().zip(x).map(|(w, x)| w * x).sum::<f64>() + self.bias[r]
            })
            .collect()
    }
}

fn run_mlp(layers: &[Layer], x: &[f64]) -> Vec<f64> {
    let mut y = x.to_vec();
    for (i, layer) in layers.iter().enumerate() {
        y = layer.apply(&y);
        if i + 1 < layers.len() {
            y.iter_mut().for_each(|v| *v = v.max(0.0));
        }
    }
    y
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MpgnnWeights {
    pub node_in_dim: usize,
    pub edge_in_dim: usize,
    pub hidden_dim: usize,
    pub rounds: usize,
    pub phi_m: Vec<Layer>,
    pub phi_u: Vec<Layer>,
    pub phi_e: Vec<Layer>,
    pub head: Vec<Layer>,
}

impl MpgnnWeights {
    /// Single-layer MLPs with every weight and bias zero.
    pub fn zeros(hidden_dim: usize, rounds: usize) -> Self {
        let h = hidden_dim;
        let e = EDGE_INPUT_DIM;
        MpgnnWeights {
            node_in_dim: NODE_INPUT_DIM,
            edge_in_dim: e,
            hidden_dim: h,
            rounds,
            phi_m: vec![Layer::zeros(h, 3 * h + e)],
            phi_u: vec![Layer::zeros(h, 2 * h)],
            phi_e: vec![Layer::zeros(h, 3 * h + e)],
            head: vec![Layer::zeros(1, 3 * h + e)],
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.node_in_dim != NODE_INPUT_DIM {
            return Err(ModelError::Shape(format!(
                "node_in_dim is {} but vertices carry {NODE_INPUT_DIM} input features",
                self.node_in_dim
            )));
        }
        if self.edge_in_dim != EDGE_INPUT_DIM {
            return Err(ModelError::Shape(format!(
                "edge_in_dim is {} but edges carry {EDGE_INPUT_DIM} input features",
                self.edge_in_dim
            )));
        }
        if self.hidden_dim < self.node_in_dim {
            return Err(ModelError::Shape(format!(
                "hidden_dim {} is smaller than node_in_dim {}",
                self.hidden_dim, self.node_in_dim
            )));
        }
        if self.rounds == 0 {
            return Err(ModelError::Shape("rounds must be at least 1".into()));
        }
        let h = self.hidden_dim;
        let e = self.edge_in_dim;
        check_mlp("phi_m", &self.phi_m, 3 * h + e, h)?;
        check_mlp("phi_u", &self.phi_u, 2 * h, h)?;
        check_mlp("phi_e", &self.phi_e, 3 * h + e, h)?;
        check_mlp("head", &self.head, 3 * h + e, 1)
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let weights: MpgnnWeights =
            serde_json::from_str(text).map_err(|e| ModelError::Schema(e.to_string()))?;
        weights.validate()?;
        Ok(weights)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn load(path: &Path) -> Result<Self, ModelError> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), ModelError> {
        fs::write(path, self.to_json())?;
        Ok(())
    }
}

fn check_mlp(name: &str, layers: &[Layer], input: usize, output: usize) -> Result<(), ModelError> {
    if layers.is_empty() {
        return Err(ModelError::Shape(format!("{name} has no layers")));
    }
    for (i, layer) in layers.iter().enumerate() {
        if layer.weights.len() != layer.rows * layer.cols {
            return Err(ModelError::Shape(format!(
                "{name}[{i}] declares {}x{} but holds {} weights",
                layer.rows,
                layer.cols,
                layer.weights.len()
            )));
        }
        if layer.bias.len() != layer.rows {
            return Err(ModelError::Shape(format!(
                "{name}[{i}] has {} rows but {} biases",
                layer.rows,
                layer.bias.len()
            )));
        }
        if i > 0 && layers[i - 1].rows != layer.cols {
            return Err(ModelError::Shape(format!(
                "{name}[{}] outputs {} but {name}[{i}] expects {}",
                i - 1,
                layers[i - 1].rows,
                layer.cols
            )));
        }
    }
    if layers[0].cols != input {
        return Err(ModelError::Shape(format!(
            "{name}[0] expects {} inputs but receives {input}",
            layers[0].cols
        )));
    }
    let last = layers.len() - 1;
    if layers[last].rows != output {
        return Err(ModelError::Shape(format!(
            "{name}[{last}] outputs {} but {output} are required",
            layers[last].rows
        )));
    }
    Ok(())
}

pub fn mpgnn_forward(
    weights: &MpgnnWeights,
    net: &FlowNetwork,
    flow: &Flow,
) -> Result<EdgeScores, ModelError> {
    weights.validate()?;
    if flow.len() != net.edge_count() {
        return Err(ModelError::Shape(format!(
            "flow has {} entries for {} edges",
            flow.len(),
            net.edge_count()
        )));
    }
    let n = net.vertex_count();
    let h = weights.hidden_dim;

    let max_deg = (0..n)
        .map(|v| net.incident(v).len())
        .max()
        .unwrap_or(0)
        .max(1) as f64;
    let mut node: Vec<Vec<f64>> = (0..n)
        .map(|v| {
            let terminal = if v == net.source() {
                1.0
            } else if v == net.sink() {
                -1.0
            } else {
                0.0
            };
            let mut x = vec![0.0; h];
            x[0] = terminal;
            x[1] = net.incident(v).len() as f64 / max_deg;
            x
        })
        .collect();
    let cmax = net
        .edges()
        .iter()
        .map(|e| e.capacity)
        .max()
        .unwrap_or(0)
        .max(1) as f64;
    let edge_in: Vec<[f64; EDGE_INPUT_DIM]> = net
        .edges()
        .iter()
        .enumerate()
        .map(|(id, e)| {
            let f = flow[id] as f64;
            let c = e.capacity as f64;
            [(c - f) / cmax, c / cmax, f / cmax]
        })
        .collect();
    let mut edge: Vec<Vec<f64>> = vec![vec![0.0; h]; net.edge_count()];

    let concat = |parts: &[&[f64]]| parts.concat();
    for _ in 0..weights.rounds {
        let mut agg = vec![vec![0.0; h]; n];
        for (id, e) in net.edges().iter().enumerate() {
            let (u, v) = (e.tail, e.head);
            let m = run_mlp(
                &weights.phi_m,
                &concat(&[&node[u], &node[v], &edge[id], &edge_in[id]]),
            );
            agg[v].iter_mut().zip(&m).for_each(|(a, x)| *a += x);
        }
        let next_edge: Vec<Vec<f64>> = net
            .edges()
            .iter()
            .enumerate()
            .map(|(id, e)| {
                run_mlp(
                    &weights.phi_e,
                    &concat(&[&edge[id], &node[e.tail], &node[e.head], &edge_in[id]]),
                )
            })
            .collect();
        node = (0..n)
            .map(|v| run_mlp(&weights.phi_u, &concat(&[&node[v], &agg[v]])))
            .collect();
        edge = next_edge;
    }

    let values = net
        .edges()
        .iter()
        .enumerate()
        .map(|(id, e)| {
            let z = run_mlp(
                &weights.head,
                &concat(&[&node[e.tail], &node[e.head], &edge[id], &edge_in[id]]),
            )[0];
            sigmoid(z)
        })
        .collect();
    EdgeScores::new(values).map_err(|e| ModelError::Shape(e.to_string()))
}
