//! Logistic edge scorer over normalized structural features.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::cut_labels;
use super::features::{FeatureExtractor, FEATURE_DIM};
use crate::error::ModelError;
use crate::network::{Flow, FlowNetwork};
use crate::scores::EdgeScores;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Per-slot feature mean subtracted before scoring.
    pub mean: Vec<f64>,
    /// Per-slot divisor applied after centering.
    pub scale: Vec<f64>,
    /// Mean cross-entropy before training and after each epoch.
    #[serde(default)]
    pub loss_history: Vec<f64>,
}

impl LinearModel {
    pub fn zero() -> Self {
        LinearModel {
            weights: vec![0.0; FEATURE_DIM],
            bias: 0.0,
            mean: vec![0.0; FEATURE_DIM],
            scale: vec![1.0; FEATURE_DIM],
            loss_history: Vec::new(),
        }
    }

    pub fn final_loss(&self) -> Option<f64> {
        self.loss_history.last().copied()
    }

    fn check_dim(&self) -> Result<(), ModelError> {
        for len in [self.weights.len(), self.mean.len(), self.scale.len()] {
            if len != FEATURE_DIM {
                return Err(ModelError::DimensionMismatch {
                    model: len,
                    features: FEATURE_DIM,
                });
            }
        }
        Ok(())
    }

    fn logit(&self, raw: &[f64; FEATURE_DIM]) -> f64 {
        let x = normalize(raw, &self.mean, &self.scale);
        dot(&self.weights, &x) + self.bias
    }

    pub fn load(path: &Path) -> Result<Self, ModelError> {
        let model: LinearModel = serde_json::from_str(&fs::read_to_string(path)?)
            .map_err(|e| ModelError::Schema(e.to_string()))?;
        model.check_dim()?;
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<(), ModelError> {
        let text =
            serde_json::to_string_pretty(self).map_err(|e| ModelError::Schema(e.to_string()))?;
        fs::write(path, text)?;
        Ok(())
    }
}

fn normalize(raw: &[f64; FEATURE_DIM], mean: &[f64], scale: &[f64]) -> [f64; FEATURE_DIM] {
    std::array::from_fn(|i| (raw[i] - mean[i]) / scale[i])
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Logistic regression on zero-flow features against min-cut membership,
/// trained by full-batch gradient descent from all-zero weights.
pub fn train_linear_scorer(
    networks: &[FlowNetwork],
    epochs: usize,
    learning_rate: f64,
) -> Result<LinearModel, ModelError> {
    let mut xs: Vec<[f64; FEATURE_DIM]> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for net in networks {
        let extractor = FeatureExtractor::new(net, &Flow::zero(net));
        for (f, label) in extractor.all().into_iter().zip(cut_labels(net)) {
            xs.push(f.0);
            ys.push(if label { 1.0 } else { 0.0 });
        }
    }
    if xs.is_empty() {
        return Err(ModelError::EmptyTrainingSet);
    }
    let n = xs.len() as f64;
    let mut model = LinearModel::zero();
    for i in 0..FEATURE_DIM {
        let mean = xs.iter().map(|x| x[i]).sum::<f64>() / n;
        let var = xs.iter().map(|x| (x[i] - mean).powi(2)).sum::<f64>() / n;
        model.mean[i] = mean;
        model.scale[i] = if var > 0.0 { var.sqrt() } else { 1.0 };
    }
    let normalized: Vec<[f64; FEATURE_DIM]> = xs
        .iter()
        .map(|x| normalize(x, &model.mean, &model.scale))
        .collect();

    let loss = |w: &[f64], b: f64| {
        normalized
            .iter()
            .zip(&ys)
            .map(|(x, &y)| {
                let z = dot(w, x) + b;
                // log(1 + e^z) - y z, stable for large |z|
                z.max(0.0) + (-z.abs()).exp().ln_1p() - y * z
            })
            .sum::<f64>()
            / n
    };
    model.loss_history.push(loss(&model.weights, model.bias));
    for _ in 0..epochs {
        let mut grad_w = [0.0; FEATURE_DIM];
        let mut grad_b = 0.0;
        for (x, &y) in normalized.iter().zip(&ys) {
            let err = sigmoid(dot(&model.weights, x) + model.bias) - y;
            for i in 0..FEATURE_DIM {
                grad_w[i] += err * x[i];
            }
            grad_b += err;
        }
        for (w, g) in model.weights.iter_mut().zip(grad_w) {
            *w -= learning_rate * g / n;
        }
        model.bias -= learning_rate * grad_b / n;
        model.loss_history.push(loss(&model.weights, model.bias));
    }
    Ok(model)
}

/// `p(e) = logistic(w · normalize(φ(e)) + b)` on the residual of `flow`.
pub fn linear_scores(
    model: &LinearModel,
    net: &FlowNetwork,
    flow: &Flow,
) -> Result<EdgeScores, ModelError> {
    model.check_dim()?;
    let extractor = FeatureExtractor::new(net, flow);
    let values = (0..net.edge_count())
        .map(|e| sigmoid(model.logit(&extractor.features(e).0)))
        .collect();
    EdgeScores::new(values).map_err(|e| ModelError::Shape(e.to_string()))
}
