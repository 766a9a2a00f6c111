//! Per-edge priority scores and the `edge_id score` file format.

use std::fmt::Write as _;

use crate::error::ScoreError;
use crate::network::{EdgeId, FlowNetwork};

/// A total map from `EdgeId` to a score in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeScores(Vec<f64>);

impl EdgeScores {
    pub fn new(values: Vec<f64>) -> Result<Self, ScoreError> {
        for (edge, &score) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&score) {
                return Err(ScoreError::OutOfRange { edge, score });
            }
        }
        Ok(EdgeScores(values))
    }

    pub fn uniform(edge_count: usize, value: f64) -> Self {
        EdgeScores(vec![value.clamp(0.0, 1.0); edge_count])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, edge: EdgeId) -> f64 {
        self.0[edge]
    }

    /// Fails unless the scores cover exactly the network's edges.
    pub fn check_total(&self, net: &FlowNetwork) -> Result<(), ScoreError> {
        if self.0.len() != net.edge_count() {
            return Err(ScoreError::NotTotal {
                expected: net.edge_count(),
                got: self.0.len(),
            });
        }
        Ok(())
    }

    /// Parses `edge_id score` lines. Every edge in `0..edge_count` must appear exactly once.
    pub fn parse(text: &str, edge_count: usize) -> Result<Self, ScoreError> {
        let entries = parse_edge_values(text, edge_count)?;
        let mut values = vec![None; edge_count];
        for (line, edge, value) in entries {
            if values[edge].is_some() {
                return Err(ScoreError::Duplicate(edge));
            }
            if !(0.0..=1.0).contains(&value) {
                return Err(ScoreError::Parse {
                    line,
                    message: format!("score {value} outside [0, 1]"),
                });
            }
            values[edge] = Some(value);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(edge, v)| v.ok_or(ScoreError::Missing(edge)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(EdgeScores(values))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (id, v) in self.0.iter().enumerate() {
            writeln!(out, "{id} {v}").unwrap();
        }
        out
    }
}

/// Reads `edge_id value` lines (decimal values, `#` comments) without
/// checking coverage. Returns `(line, edge, value)` triples.
pub fn parse_edge_values(
    text: &str,
    edge_count: usize,
) -> Result<Vec<(usize, EdgeId, f64)>, ScoreError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(ScoreError::Parse {
                line,
                message: format!("expected `edge_id value`, found {} fields", fields.len()),
            });
        }
        let edge: EdgeId = fields[0].parse().map_err(|_| ScoreError::Parse {
            line,
            message: format!("{:?} is not an edge id", fields[0]),
        })?;
        if edge >= edge_count {
            return Err(ScoreError::UnknownEdge { edge, edge_count });
        }
        let value: f64 = fields[1].parse().map_err(|_| ScoreError::Parse {
            line,
            message: format!("{:?} is not a decimal", fields[1]),
        })?;
        if !value.is_finite() {
            return Err(ScoreError::Parse {
                line,
                message: format!("{value} is not finite"),
            });
        }
        out.push((line, edge, value));
    }
    Ok(out)
}
