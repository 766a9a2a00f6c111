//! Seeded solver × predictor × noise experiments with CSV output.
//!
//! Every cell of the matrix solves the same instance. Predictions are derived
//! from the instance, the predictor and the noise level only, so all solvers
//! in a cell group see identical inputs. Each trial's flow value is checked
//! against an Edmonds-Karp reference; a mismatch aborts the run and leaves a
//! reproduction bundle behind.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::BenchError;
use crate::image::{build_grid_graph, GraphParams, GrayImage, Seed, SeedMask};
use crate::network::{Capacity, Flow, FlowNetwork};
use crate::permdist::{
    cayley_distance, ranking_from_scores, weighted_cayley_distance, WeightFunction, WeightedMethod,
};
use crate::predict::{
    linear_scores, mpgnn_forward, oracle_scores, perturb_scores, train_linear_scorer, LinearModel,
    MpgnnWeights,
};
use crate::scores::EdgeScores;
use crate::solve::{ford_fulkerson, max_flow, min_cut, SolveStats, StrategyKind};
use crate::warmstart::warm_start_solve;

pub const CSV_HEADER: &str = "instance_id,solver,predictor,noise,augmentations,repairs,flow_value,cut_size_k,cayley,weighted_cayley,wall_time_us";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum InstanceFamily {
    /// `m` distinct directed edges among `n` vertices, `s = 0`, `t = n - 1`.
    Random {
        n: usize,
        m: usize,
        cap_max: Capacity,
    },
    /// Two-region image, left half darker by `contrast`, one seed per half.
    Grid {
        width: usize,
        height: usize,
        contrast: u8,
    },
    /// Four-vertex diamond `s→a, s→b, a→b, a→t, b→t` with random capacities.
    Diamond { cap_max: Capacity },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PredictorKind {
    /// No prediction; guided search falls back to uniform scores.
    None,
    Oracle,
    Linear,
    Mpgnn,
    /// Warm start from a noisy optimal flow, guided by noisy oracle scores.
    Warm,
}

impl PredictorKind {
    pub const ALL: [PredictorKind; 5] = [
        PredictorKind::None,
        PredictorKind::Oracle,
        PredictorKind::Linear,
        PredictorKind::Mpgnn,
        PredictorKind::Warm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PredictorKind::None => "none",
            PredictorKind::Oracle => "oracle",
            PredictorKind::Linear => "linear",
            PredictorKind::Mpgnn => "mpgnn",
            PredictorKind::Warm => "warm",
        }
    }

    fn code(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for PredictorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PredictorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        PredictorKind::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                format!("unknown predictor {s:?} (expected none, oracle, linear, mpgnn or warm)")
            })
    }
}

impl Serialize for PredictorKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for PredictorKind {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub instances: InstanceFamily,
    pub rng_seed: u64,
    pub solvers: Vec<StrategyKind>,
    pub predictors: Vec<PredictorKind>,
    pub noise_levels: Vec<f64>,
    /// Number of independently seeded instances.
    pub repetitions: usize,
    /// Used by the linear predictor; trained on held-out instances if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear_model: Option<LinearModel>,
    /// Required by the mpgnn predictor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mpgnn_weights: Option<MpgnnWeights>,
    /// Where reproduction bundles go on failure; the system temp dir if unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repro_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    /// 100 two-region 16×16 images, oracle predictor, noise 0 / 0.5 / 1.
    pub fn desk_scale(rng_seed: u64) -> Self {
        ExperimentConfig {
            instances: InstanceFamily::Grid {
                width: 16,
                height: 16,
                contrast: 128,
            },
            rng_seed,
            solvers: StrategyKind::ALL.to_vec(),
            predictors: vec![PredictorKind::Oracle],
            noise_levels: vec![0.0, 0.5, 1.0],
            repetitions: 100,
            linear_model: None,
            mpgnn_weights: None,
            repro_dir: None,
        }
    }

    /// 500 images at 60×60.
    pub fn full_scale(rng_seed: u64) -> Self {
        ExperimentConfig {
            instances: InstanceFamily::Grid {
                width: 60,
                height: 60,
                contrast: 128,
            },
            repetitions: 500,
            ..Self::desk_scale(rng_seed)
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |msg: String| Err(BenchError::Config(msg));
        match self.instances {
            InstanceFamily::Random { n, m, cap_max } => {
                check_random_params(n, m, cap_max)?;
            }
            InstanceFamily::Grid { width, height, .. } => {
                if width < 2 || height < 1 {
                    return bad(format!("grid must be at least 2x1, got {width}x{height}"));
                }
            }
            InstanceFamily::Diamond { cap_max } => {
                if cap_max < 1 {
                    return bad(format!("cap_max must be at least 1, got {cap_max}"));
                }
            }
        }
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1".into());
        }
        if self.solvers.is_empty() {
            return bad("no solvers".into());
        }
        if self.predictors.is_empty() {
            return bad("no predictors".into());
        }
        if self.noise_levels.is_empty() {
            return bad("no noise levels".into());
        }
        if let Some(x) = self.noise_levels.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return bad(format!("noise level {x} outside [0, 1]"));
        }
        if self.predictors.contains(&PredictorKind::Mpgnn) {
            match &self.mpgnn_weights {
                None => return bad("mpgnn predictor needs a weights file".into()),
                Some(w) => w.validate()?,
            }
        }
        Ok(())
    }
}

fn check_random_params(n: usize, m: usize, cap_max: Capacity) -> Result<(), BenchError> {
    if n < 2 {
        return Err(BenchError::Config(format!("n must be at least 2, got {n}")));
    }
    if m > n * (n - 1) {
        return Err(BenchError::Config(format!(
            "m = {m} exceeds n(n-1) = {}",
            n * (n - 1)
        )));
    }
    if cap_max < 1 {
        return Err(BenchError::Config(format!(
            "cap_max must be at least 1, got {cap_max}"
        )));
    }
    Ok(())
}

/// `m` distinct ordered pairs drawn uniformly, listed in `(tail, head)` order,
/// capacities uniform in `1..=cap_max`.
pub fn random_network(
    n: usize,
    m: usize,
    cap_max: Capacity,
    rng_seed: u64,
) -> Result<FlowNetwork, BenchError> {
    check_random_params(n, m, cap_max)?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut picks = index::sample(&mut rng, n * (n - 1), m).into_vec();
    picks.sort_unstable();
    let edges: Vec<_> = picks
        .into_iter()
        .map(|i| {
            let u = i / (n - 1);
            let r = i % (n - 1);
            let v = if r >= u { r + 1 } else { r };
            (u, v, rng.random_range(1..=cap_max))
        })
        .collect();
    Ok(FlowNetwork::new(n, &edges, 0, n - 1)?)
}

pub fn diamond_network(cap_max: Capacity, rng_seed: u64) -> FlowNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut cap = || rng.random_range(1..=cap_max.max(1));
    let edges = [
        (0, 1, cap()),
        (0, 2, cap()),
        (1, 2, cap()),
        (1, 3, cap()),
        (2, 3, cap()),
    ];
    FlowNetwork::new(4, &edges, 0, 3).expect("fixed topology")
}

/// Left half at intensity 64, right half `contrast` brighter, per-pixel jitter
/// in `0..8`, one source seed on the left and one sink seed on the right.
pub fn two_region_instance(
    width: usize,
    height: usize,
    contrast: u8,
    rng_seed: u64,
) -> (GrayImage, SeedMask) {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let half = width / 2;
    let mut pixels = Vec::with_capacity(width * height);
    for _ in 0..height {
        for x in 0..width {
            let base = if x < half { 64 } else { 64 + contrast as u32 };
            pixels.push((base + rng.random_range(0..8)).min(255) as u8);
        }
    }
    let image = GrayImage::new(width, height, pixels).expect("positive dimensions");
    let mut seeds = SeedMask::neutral(width, height);
    seeds.set(
        rng.random_range(0..half),
        rng.random_range(0..height),
        Seed::Source,
    );
    seeds.set(
        rng.random_range(half..width),
        rng.random_range(0..height),
        Seed::Sink,
    );
    (image, seeds)
}

pub fn generate_instance(
    family: &InstanceFamily,
    rng_seed: u64,
) -> Result<FlowNetwork, BenchError> {
    match *family {
        InstanceFamily::Random { n, m, cap_max } => random_network(n, m, cap_max, rng_seed),
        InstanceFamily::Diamond { cap_max } => Ok(diamond_network(cap_max, rng_seed)),
        InstanceFamily::Grid {
            width,
            height,
            contrast,
        } => {
            let (image, seeds) = two_region_instance(width, height, contrast, rng_seed);
            let graph = build_grid_graph(&image, &seeds, &GraphParams::default())
                .map_err(|e| BenchError::Config(e.to_string()))?;
            Ok(graph.network().clone())
        }
    }
}

/// SplitMix64 finalizer folded over `parts`, for independent sub-seeds.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    let mix = |mut z: u64| {
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    };
    parts.iter().fold(mix(base), |acc, &p| {
        mix(acc.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(p))
    })
}

const INSTANCE_STREAM: u64 = 1;
const PREDICTION_STREAM: u64 = 2;
const TRAINING_STREAM: u64 = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub instance_id: usize,
    pub solver: StrategyKind,
    pub predictor: PredictorKind,
    pub noise: f64,
    pub augmentations: usize,
    pub repairs: usize,
    pub flow_value: Capacity,
    pub cut_size_k: usize,
    /// Distances between the predictor's ranking and the oracle ranking.
    pub cayley: Option<usize>,
    pub weighted_cayley: Option<f64>,
    pub wall_time_us: u64,
}

struct Instance {
    id: usize,
    net: FlowNetwork,
    optimum: Flow,
    value: Capacity,
    k: usize,
    oracle: EdgeScores,
}

/// Runs every `(instance, solver, predictor, noise)` cell.
pub fn run_matrix(config: &ExperimentConfig) -> Result<Vec<TrialRecord>, BenchError> {
    config.validate()?;
    let linear_model = match (
        &config.linear_model,
        config.predictors.contains(&PredictorKind::Linear),
    ) {
        (Some(model), _) => Some(model.clone()),
        (None, true) => Some(train_default_linear(config)?),
        (None, false) => None,
    };

    let per_instance: Vec<Result<Vec<TrialRecord>, BenchError>> = (0..config.repetitions)
        .into_par_iter()
        .map(|id| {
            let inst = prepare_instance(config, id)?;
            let mut rows = Vec::new();
            for &predictor in &config.predictors {
                for &noise in &config.noise_levels {
                    let prediction =
                        predict(config, &inst, predictor, noise, linear_model.as_ref())?;
                    for &solver in &config.solvers {
                        rows.push(run_trial(
                            config,
                            &inst,
                            solver,
                            predictor,
                            noise,
                            &prediction,
                        )?);
                    }
                }
            }
            Ok(rows)
        })
        .collect();

    let mut records = Vec::new();
    for rows in per_instance {
        records.extend(rows?);
    }
    records.sort_by(|a, b| {
        a.instance_id
            .cmp(&b.instance_id)
            .then_with(|| a.solver.name().cmp(b.solver.name()))
            .then_with(|| a.predictor.name().cmp(b.predictor.name()))
            .then_with(|| a.noise.total_cmp(&b.noise))
    });
    Ok(records)
}

fn train_default_linear(config: &ExperimentConfig) -> Result<LinearModel, BenchError> {
    let seed = derive_seed(config.rng_seed, &[TRAINING_STREAM]);
    let nets = (0..20)
        .map(|i| generate_instance(&config.instances, derive_seed(seed, &[i])))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(train_linear_scorer(&nets, 200, 0.1)?)
}

fn prepare_instance(config: &ExperimentConfig, id: usize) -> Result<Instance, BenchError> {
    let net = generate_instance(
        &config.instances,
        derive_seed(config.rng_seed, &[INSTANCE_STREAM, id as u64]),
    )?;
    let (optimum, _) = max_flow(&net);
    let value = net
        .flow_value(&optimum)
        .expect("reference flow is feasible");
    let k = min_cut(&net, &optimum)?.size();
    let oracle = oracle_scores(&net);
    Ok(Instance {
        id,
        net,
        optimum,
        value,
        k,
        oracle,
    })
}

struct Prediction {
    scores: Option<EdgeScores>,
    warm_flow: Option<Vec<f64>>,
}

fn predict(
    config: &ExperimentConfig,
    inst: &Instance,
    predictor: PredictorKind,
    noise: f64,
    linear_model: Option<&LinearModel>,
) -> Result<Prediction, BenchError> {
    let seed = derive_seed(
        config.rng_seed,
        &[
            PREDICTION_STREAM,
            inst.id as u64,
            predictor.code(),
            noise.to_bits(),
        ],
    );
    let net = &inst.net;
    let zero = Flow::zero(net);
    let base = match predictor {
        PredictorKind::None => None,
        PredictorKind::Oracle | PredictorKind::Warm => Some(inst.oracle.clone()),
        PredictorKind::Linear => Some(linear_scores(
            linear_model.expect("trained before the run"),
            net,
            &zero,
        )?),
        PredictorKind::Mpgnn => Some(mpgnn_forward(
            config.mpgnn_weights.as_ref().expect("validated"),
            net,
            &zero,
        )?),
    };
    let scores = base.map(|s| perturb_scores(&s, noise, seed));
    let warm_flow = (predictor == PredictorKind::Warm).then(|| {
        // independent stream from the score noise
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[1]));
        (0..net.edge_count())
            .map(|e| {
                let u: f64 = rng.random();
                (1.0 - noise) * inst.optimum[e] as f64 + noise * u * net.capacity(e) as f64
            })
            .collect()
    });
    Ok(Prediction { scores, warm_flow })
}

fn run_trial(
    config: &ExperimentConfig,
    inst: &Instance,
    solver: StrategyKind,
    predictor: PredictorKind,
    noise: f64,
    prediction: &Prediction,
) -> Result<TrialRecord, BenchError> {
    let net = &inst.net;
    let uniform;
    let scores = match &prediction.scores {
        Some(s) => s,
        None => {
            uniform = EdgeScores::uniform(net.edge_count(), 0.5);
            &uniform
        }
    };
    let strategy = solver.with_scores(Some(scores)).expect("scores supplied");
    let (flow, stats): (Flow, SolveStats) = match &prediction.warm_flow {
        Some(raw) => warm_start_solve(net, raw, strategy)?,
        None => ford_fulkerson(net, &Flow::zero(net), strategy)?,
    };
    let value = net.flow_value(&flow).expect("solver output is feasible");
    if value != inst.value {
        let repro = write_repro(config, inst, solver, predictor, noise, scores)?;
        return Err(BenchError::NonOptimal {
            instance: inst.id,
            solver: solver.name().into(),
            expected: inst.value,
            got: value,
            repro: repro.display().to_string(),
        });
    }
    let (cayley, weighted_cayley) = match &prediction.scores {
        None => (None, None),
        Some(s) => {
            let truth = ranking_from_scores(&inst.oracle);
            let guess = ranking_from_scores(s);
            let w = WeightFunction::harmonic(truth.len());
            (
                Some(cayley_distance(&truth, &guess)?),
                Some(weighted_cayley_distance(&truth, &guess, &w, WeightedMethod::Auto)?.value),
            )
        }
    };
    Ok(TrialRecord {
        instance_id: inst.id,
        solver,
        predictor,
        noise,
        augmentations: stats.augmentations,
        repairs: stats.repair_iterations,
        flow_value: value,
        cut_size_k: inst.k,
        cayley,
        weighted_cayley,
        wall_time_us: stats.wall_time.as_micros() as u64,
    })
}

fn write_repro(
    config: &ExperimentConfig,
    inst: &Instance,
    solver: StrategyKind,
    predictor: PredictorKind,
    noise: f64,
    scores: &EdgeScores,
) -> Result<PathBuf, BenchError> {
    let root = config.repro_dir.clone().unwrap_or_else(std::env::temp_dir);
    let dir = root.join(format!(
        "augflow-repro-{}-{}-{}-{}",
        inst.id,
        solver.name(),
        predictor.name(),
        noise
    ));
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("network.txt"), inst.net.to_text())?;
    fs::write(dir.join("scores.txt"), scores.to_text())?;
    let echo = serde_json::to_string_pretty(config).expect("plain data serializes");
    fs::write(dir.join("config.json"), echo)?;
    Ok(dir)
}

/// CSV with the fixed header; optional columns are left empty when absent.
pub fn write_csv<W: Write>(records: &[TrialRecord], out: W) -> Result<(), BenchError> {
    let mut writer = csv::Writer::from_writer(out);
    for r in records {
        writer.serialize(r)?;
    }
    if records.is_empty() {
        writer.write_record(CSV_HEADER.split(','))?;
    }
    writer.flush()?;
    Ok(())
}

pub fn csv_string(records: &[TrialRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(records, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

pub fn save_csv(records: &[TrialRecord], path: &Path) -> Result<(), BenchError> {
    write_csv(records, fs::File::create(path)?)
}
