//! Command-line front end.
//!
//! Exit codes: 0 success, 1 unreadable or malformed input, 2 well-formed
//! input that breaks a contract (missing scores, no seeds, bad config, ...).
//! Statistics go to stdout as `stat: name value` lines.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::builder::{PossibleValuesParser, TypedValueParser};
use clap::{Args, Parser, Subcommand, ValueEnum};

use augflow::bench::{self, ExperimentConfig, InstanceFamily, PredictorKind};
use augflow::error::{
    BenchError, ImageError, ModelError, NetworkError, PermError, PgmError, ScoreError, SolveError,
};
use augflow::image::{build_grid_graph, segment, GraphParams, GrayImage, Neighborhood, SeedMask};
use augflow::permdist::{
    cayley_distance, ranking_from_scores, weighted_cayley_distance, WeightFunction, WeightedMethod,
};
use augflow::predict::{
    cut_labels, linear_scores, mpgnn_forward, oracle_scores, perturb_scores, train_linear_scorer,
    LinearModel, MpgnnWeights,
};
use augflow::warmstart::parse_flow_prediction;
use augflow::{
    ford_fulkerson, min_cut, warm_start_solve, EdgeScores, Flow, FlowNetwork, StrategyKind,
};

#[derive(Parser)]
#[command(
    name = "augflow",
    version,
    about = "Prediction-augmented max-flow toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve max flow on a network file.
    Solve(SolveArgs),
    /// Segment a grayscale image from seed scribbles.
    Segment(SegmentArgs),
    /// Write an edge-scores file for a network.
    Predict(PredictArgs),
    /// Train the logistic edge scorer.
    TrainLinear(TrainArgs),
    /// Compare the rankings induced by two scores files.
    Distance(DistanceArgs),
    /// Run a seeded solver x predictor x noise experiment.
    Bench(BenchArgs),
    /// Write random networks with oracle scores and min-cut labels.
    ExportDataset(ExportArgs),
}

#[derive(Args)]
struct SolveArgs {
    network: PathBuf,
    #[arg(long, default_value = "bfs")]
    strategy: StrategyKind,
    /// Predicted flow (`edge_id value` lines) to warm-start from.
    #[arg(long)]
    warm_start: Option<PathBuf>,
    /// Edge scores; required by the guided strategy.
    #[arg(long)]
    scores: Option<PathBuf>,
    /// Write the final flow as `edge_id value` lines.
    #[arg(long)]
    flow_out: Option<PathBuf>,
}

#[derive(Args)]
struct SegmentArgs {
    image: PathBuf,
    /// PGM with 0 = neutral, 255 = source seed, 128 = sink seed.
    seeds: PathBuf,
    /// Output mask (P5, 255 = foreground).
    #[arg(long, short)]
    out: PathBuf,
    #[arg(long, default_value = "bfs")]
    strategy: StrategyKind,
    /// Scores for guided search; defaults to oracle scores of the grid graph.
    #[arg(long)]
    scores: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    contrast: u32,
    #[arg(long, default_value_t = 20.0)]
    sigma: f64,
    #[arg(long, default_value_t = 1000)]
    weight_scale: u32,
    #[arg(long, default_value_t = 4, value_parser = PossibleValuesParser::new(["4", "8"]).map(|s| s.parse::<u32>().unwrap()))]
    neighborhood: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum Source {
    Oracle,
    Noisy,
    Linear,
    Mpgnn,
}

#[derive(Args)]
struct PredictArgs {
    network: PathBuf,
    #[arg(long)]
    source: Source,
    /// Noise level for the noisy source.
    #[arg(long, default_value_t = 0.5)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Linear model JSON (linear source).
    #[arg(long)]
    model: Option<PathBuf>,
    /// MPGNN weights JSON (mpgnn source).
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Current flow for residual features; zero flow if omitted.
    #[arg(long)]
    flow: Option<PathBuf>,
    /// Output file; stdout if omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    /// Network files, or directories whose `*.net` files are used.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    #[arg(long, default_value_t = 0.1)]
    lr: f64,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct DistanceArgs {
    /// Reference scores (typically the oracle).
    truth: PathBuf,
    predicted: PathBuf,
    /// Exact weighted distance by search (at most 8 edges).
    #[arg(long, conflicts_with = "bound")]
    exact: bool,
    /// Greedy upper bound on the weighted distance.
    #[arg(long)]
    bound: bool,
    /// Position weights, one per line, non-increasing; `1/i` if omitted.
    #[arg(long)]
    weights: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Random,
    Grid,
    Diamond,
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long, value_enum, default_value = "random")]
    family: Family,
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 16)]
    m: usize,
    #[arg(long, default_value_t = 10)]
    cap_max: i64,
    #[arg(long, default_value_t = 16)]
    width: usize,
    #[arg(long, default_value_t = 16)]
    height: usize,
    #[arg(long, default_value_t = 128)]
    contrast: u8,
}

impl FamilyArgs {
    fn family(&self) -> InstanceFamily {
        match self.family {
            Family::Random => InstanceFamily::Random {
                n: self.n,
                m: self.m,
                cap_max: self.cap_max,
            },
            Family::Grid => InstanceFamily::Grid {
                width: self.width,
                height: self.height,
                contrast: self.contrast,
            },
            Family::Diamond => InstanceFamily::Diamond {
                cap_max: self.cap_max,
            },
        }
    }
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Desk-scale defaults: 100 grid images at 16x16.
    #[arg(long, conflicts_with = "full")]
    desk: bool,
    /// Full-scale defaults: 500 grid images at 60x60.
    #[arg(long)]
    full: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "dfs,bfs,adjusted,guided")]
    solvers: Vec<StrategyKind>,
    #[arg(long, value_delimiter = ',', default_value = "oracle")]
    predictors: Vec<PredictorKind>,
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1")]
    noise: Vec<f64>,
    #[arg(long, default_value_t = 50)]
    repetitions: usize,
    #[arg(long)]
    linear_model: Option<PathBuf>,
    #[arg(long)]
    mpgnn_weights: Option<PathBuf>,
    #[arg(long)]
    repro_dir: Option<PathBuf>,
    /// CSV output; stdout if omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    out: PathBuf,
}

struct Failure {
    code: u8,
    message: String,
}

fn malformed(message: impl ToString) -> Failure {
    Failure {
        code: 1,
        message: message.to_string(),
    }
}

fn contract(message: impl ToString) -> Failure {
    Failure {
        code: 2,
        message: message.to_string(),
    }
}

impl From<NetworkError> for Failure {
    fn from(e: NetworkError) -> Self {
        malformed(e)
    }
}

impl From<ScoreError> for Failure {
    fn from(e: ScoreError) -> Self {
        match e {
            ScoreError::NotTotal { .. } | ScoreError::Missing(_) => contract(e),
            _ => malformed(e),
        }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Scores(s) => s.into(),
            other => contract(other),
        }
    }
}

impl From<PgmError> for Failure {
    fn from(e: PgmError) -> Self {
        malformed(e)
    }
}

impl From<ImageError> for Failure {
    fn from(e: ImageError) -> Self {
        match e {
            ImageError::Pgm(p) => p.into(),
            ImageError::Solve(s) => s.into(),
            ImageError::BadSeedValue { .. } => malformed(e),
            other => contract(other),
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::EmptyTrainingSet => contract(e),
            other => malformed(other),
        }
    }
}

impl From<PermError> for Failure {
    fn from(e: PermError) -> Self {
        match e {
            PermError::BadWeights(_) => malformed(e),
            other => contract(other),
        }
    }
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Io(_) | BenchError::Csv(_) => malformed(e),
            BenchError::Model(m) => m.into(),
            other => contract(other),
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| malformed(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| malformed(format!("{}: {e}", path.display())))
}

fn load_network(path: &Path) -> Result<FlowNetwork, Failure> {
    Ok(FlowNetwork::parse(&read_text(path)?)?)
}

fn load_scores(path: &Path, net: &FlowNetwork) -> Result<EdgeScores, Failure> {
    Ok(EdgeScores::parse(&read_text(path)?, net.edge_count())?)
}

// a closed pipe (e.g. `| head`) is not an error worth reporting
fn emit(text: &str) {
    let _ = io::stdout().lock().write_all(text.as_bytes());
}

fn stat(name: &str, value: impl std::fmt::Display) {
    emit(&format!("stat: {name} {value}\n"));
}

fn run_solve(args: SolveArgs) -> Result<(), Failure> {
    let net = load_network(&args.network)?;
    let scores = args
        .scores
        .as_deref()
        .map(|p| load_scores(p, &net))
        .transpose()?;
    let strategy = args
        .strategy
        .with_scores(scores.as_ref())
        .ok_or_else(|| contract(format!("strategy {} requires --scores", args.strategy)))?;
    let (flow, stats) = match &args.warm_start {
        Some(path) => {
            let raw = parse_flow_prediction(&read_text(path)?, net.edge_count())?;
            warm_start_solve(&net, &raw, strategy)?
        }
        None => ford_fulkerson(&net, &Flow::zero(&net), strategy)?,
    };
    let cut = min_cut(&net, &flow)?;
    emit(&format!("max flow {}\n", stats.total_flow));
    stat("flow_value", stats.total_flow);
    stat("augmentations", stats.augmentations);
    stat("fallback_augmentations", stats.fallback_augmentations);
    stat("repairs", stats.repair_iterations);
    stat("cut_size_k", cut.size());
    stat("cut_capacity", cut.capacity);
    stat("residual_arc_scans", stats.residual_arc_scans);
    stat("wall_time_us", stats.wall_time.as_micros());
    if let Some(path) = &args.flow_out {
        write_file(path, flow.to_text())?;
    }
    Ok(())
}

fn run_segment(args: SegmentArgs) -> Result<(), Failure> {
    let image = GrayImage::load(&args.image)?;
    let seeds = SeedMask::from_image(&GrayImage::load(&args.seeds)?)?;
    let params = GraphParams {
        contrast_scale: args.contrast,
        sigma: args.sigma,
        neighborhood: Neighborhood::from_count(args.neighborhood).expect("validated by clap"),
        weight_scale: args.weight_scale,
    };
    let graph = build_grid_graph(&image, &seeds, &params)?;
    let net = graph.network();
    let scores = match (&args.scores, args.strategy) {
        (Some(path), _) => Some(load_scores(path, net)?),
        (None, StrategyKind::Guided) => Some(oracle_scores(net)),
        (None, _) => None,
    };
    let strategy = args
        .strategy
        .with_scores(scores.as_ref())
        .expect("guided always has scores here");
    let seg = segment(&graph, strategy)?;
    seg.mask
        .to_image()
        .save(&args.out)
        .map_err(|e| malformed(format!("{}: {e}", args.out.display())))?;
    stat("pixels", graph.width() * graph.height());
    stat("foreground", seg.mask.foreground_count());
    stat("flow_value", seg.stats.total_flow);
    stat("augmentations", seg.stats.augmentations);
    stat("cut_size_k", seg.cut.size());
    stat("wall_time_us", seg.stats.wall_time.as_micros());
    Ok(())
}

fn run_predict(args: PredictArgs) -> Result<(), Failure> {
    let net = load_network(&args.network)?;
    let flow = match &args.flow {
        None => Flow::zero(&net),
        Some(path) => {
            let raw = parse_flow_prediction(&read_text(path)?, net.edge_count())?;
            let flow = Flow::from_values(raw.iter().map(|&v| v as i64).collect());
            net.check_flow(&flow)
                .map_err(|v| contract(format!("--flow is not a feasible flow: {v}")))?;
            flow
        }
    };
    let scores = match args.source {
        Source::Oracle => oracle_scores(&net),
        Source::Noisy => {
            if !(0.0..=1.0).contains(&args.noise) {
                return Err(contract(format!("--noise {} outside [0, 1]", args.noise)));
            }
            perturb_scores(&oracle_scores(&net), args.noise, args.seed)
        }
        Source::Linear => {
            let path = args
                .model
                .as_deref()
                .ok_or_else(|| contract("source linear requires --model"))?;
            linear_scores(&LinearModel::load(path)?, &net, &flow)?
        }
        Source::Mpgnn => {
            let path = args
                .weights
                .as_deref()
                .ok_or_else(|| contract("source mpgnn requires --weights"))?;
            mpgnn_forward(&MpgnnWeights::load(path)?, &net, &flow)?
        }
    };
    match &args.out {
        Some(path) => write_file(path, scores.to_text()),
        None => {
            emit(&scores.to_text());
            Ok(())
        }
    }
}

fn collect_networks(inputs: &[PathBuf]) -> Result<Vec<FlowNetwork>, Failure> {
    let mut paths = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let entries =
                fs::read_dir(input).map_err(|e| malformed(format!("{}: {e}", input.display())))?;
            let mut found: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "net"))
                .collect();
            found.sort();
            paths.extend(found);
        } else {
            paths.push(input.clone());
        }
    }
    paths.iter().map(|p| load_network(p)).collect()
}

fn run_train(args: TrainArgs) -> Result<(), Failure> {
    let nets = collect_networks(&args.inputs)?;
    let model = train_linear_scorer(&nets, args.epochs, args.lr)?;
    model.save(&args.out)?;
    stat("networks", nets.len());
    stat("epochs", args.epochs);
    stat("initial_loss", model.loss_history[0]);
    stat(
        "final_loss",
        model.final_loss().expect("history starts non-empty"),
    );
    Ok(())
}

fn run_distance(args: DistanceArgs) -> Result<(), Failure> {
    let truth_text = read_text(&args.truth)?;
    let predicted_text = read_text(&args.predicted)?;
    let count = |text: &str| -> Result<usize, Failure> {
        let values = augflow::scores::parse_edge_values(text, usize::MAX)?;
        Ok(values.iter().map(|&(_, e, _)| e + 1).max().unwrap_or(0))
    };
    let m = count(&truth_text)?;
    let truth = EdgeScores::parse(&truth_text, m)?;
    let predicted = EdgeScores::parse(&predicted_text, m)?;
    let sigma = ranking_from_scores(&truth);
    let sigma_hat = ranking_from_scores(&predicted);
    let weights = match &args.weights {
        Some(path) => WeightFunction::parse(&read_text(path)?)?,
        None => WeightFunction::harmonic(m),
    };
    let method = if args.exact {
        WeightedMethod::Exact
    } else if args.bound {
        WeightedMethod::Bound
    } else {
        WeightedMethod::Auto
    };
    let weighted = weighted_cayley_distance(&sigma, &sigma_hat, &weights, method)?;
    stat("edges", m);
    stat("cayley", cayley_distance(&sigma, &sigma_hat)?);
    stat("weighted_cayley", weighted.value);
    stat("weighted_exact", weighted.exact);
    Ok(())
}

fn run_bench(args: BenchArgs) -> Result<(), Failure> {
    let mut config = if args.full {
        ExperimentConfig::full_scale(args.seed)
    } else if args.desk {
        ExperimentConfig::desk_scale(args.seed)
    } else {
        ExperimentConfig {
            instances: args.family.family(),
            rng_seed: args.seed,
            solvers: args.solvers.clone(),
            predictors: args.predictors.clone(),
            noise_levels: args.noise.clone(),
            repetitions: args.repetitions,
            linear_model: None,
            mpgnn_weights: None,
            repro_dir: None,
        }
    };
    if let Some(path) = &args.linear_model {
        config.linear_model = Some(LinearModel::load(path)?);
    }
    if let Some(path) = &args.mpgnn_weights {
        config.mpgnn_weights = Some(MpgnnWeights::load(path)?);
    }
    config.repro_dir = args.repro_dir.clone();
    let records = bench::run_matrix(&config)?;
    match &args.out {
        Some(path) => bench::save_csv(&records, path)?,
        None => emit(&bench::csv_string(&records)),
    }
    if args.out.is_some() {
        stat("trials", records.len());
    }
    Ok(())
}

fn run_export(args: ExportArgs) -> Result<(), Failure> {
    if args.count == 0 {
        return Err(contract("--count must be at least 1"));
    }
    let family = args.family.family();
    fs::create_dir_all(&args.out).map_err(|e| malformed(format!("{}: {e}", args.out.display())))?;
    for i in 0..args.count {
        let net = bench::generate_instance(&family, bench::derive_seed(args.seed, &[i as u64]))?;
        let stem = args.out.join(format!("instance_{i:04}"));
        write_file(&stem.with_extension("net"), net.to_text())?;
        write_file(
            &stem.with_extension("scores"),
            oracle_scores(&net).to_text(),
        )?;
        let labels: String = cut_labels(&net)
            .iter()
            .enumerate()
            .map(|(e, &l)| format!("{e} {}\n", u8::from(l)))
            .collect();
        write_file(&stem.with_extension("labels"), labels)?;
    }
    stat("instances", args.count);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => run_solve(a),
        Command::Segment(a) => run_segment(a),
        Command::Predict(a) => run_predict(a),
        Command::TrainLinear(a) => run_train(a),
        Command::Distance(a) => run_distance(a),
        Command::Bench(a) => run_bench(a),
        Command::ExportDataset(a) => run_export(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("augflow: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
