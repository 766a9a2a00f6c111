//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness; exits nonzero when any criterion fails.

mod common;

use std::collections::{HashMap, VecDeque};
use std::time::{Duration, Instant};

use augflow::bench::{
    csv_string, run_matrix, ExperimentConfig, InstanceFamily, PredictorKind, TrialRecord,
};
use augflow::image::{
    build_grid_graph, segment, GraphParams, GrayImage, Neighborhood, Seed, SeedMask,
};
use augflow::permdist::{
    cayley_distance, weighted_cayley_distance, Permutation, WeightFunction, WeightedMethod,
};
use augflow::predict::{
    canonical_min_cut, linear_scores, mpgnn_forward, oracle_scores, perturb_scores,
    train_linear_scorer, MpgnnWeights,
};
use augflow::{
    ford_fulkerson_traced, max_flow, min_cut, warm_start_solve, Direction, EdgeScores, Flow,
    FlowNetwork, Strategy, StrategyKind,
};
use common::{all_simple_paths, bottleneck, is_feasible, max_flow_by_path_enumeration, value_of};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const HAND_WEIGHTS: &str = include_str!("data/mpgnn_hand.json");

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn strategies(scores: &EdgeScores) -> [Strategy<'_>; 4] {
    [
        Strategy::Dfs,
        Strategy::Bfs,
        Strategy::AdjustedBfs,
        Strategy::Guided(scores),
    ]
}

fn optimality_and_duality() -> (Outcome, Outcome) {
    let start = Instant::now();
    let nets: Vec<FlowNetwork> = (0..200)
        .map(|i| common::small_network(70_000 + i, 10, 20))
        .collect();
    let linear = train_linear_scorer(&nets[..20], 200, 0.1).unwrap();
    let mpgnn = MpgnnWeights::from_json(HAND_WEIGHTS).unwrap();
    let mut runs = 0;
    let mut optimal = Ok(());
    let mut dual = Ok(());
    'outer: for (i, net) in nets.iter().enumerate() {
        let want = max_flow_by_path_enumeration(net);
        let zero = Flow::zero(net);
        let oracle = oracle_scores(net);
        let predictors = [
            (
                "none",
                EdgeScores::new(vec![0.5; net.edge_count()]).unwrap(),
            ),
            ("oracle", oracle.clone()),
            ("noisy", perturb_scores(&oracle, 0.5, i as u64)),
            ("linear", linear_scores(&linear, net, &zero).unwrap()),
            ("mpgnn", mpgnn_forward(&mpgnn, net, &zero).unwrap()),
        ];
        let (opt, _) = max_flow(net);
        let mut rng = ChaCha8Rng::seed_from_u64(i as u64);
        let warm: [(&str, Vec<f64>); 3] = [
            ("cold", vec![0.0; net.edge_count()]),
            ("optimum", opt.values().iter().map(|&f| f as f64).collect()),
            (
                "random",
                net.edges()
                    .iter()
                    .map(|e| rng.random::<f64>() * e.capacity as f64)
                    .collect(),
            ),
        ];
        for (pname, scores) in &predictors {
            for strategy in strategies(scores) {
                for (wname, raw) in &warm {
                    let (flow, stats) = warm_start_solve(net, raw, strategy).unwrap();
                    runs += 1;
                    let got = value_of(net, flow.values());
                    if got != want || stats.total_flow != want || !is_feasible(net, flow.values()) {
                        optimal = Err(format!(
                            "network {i} {:?} {pname} {wname}: {got} vs {want}",
                            strategy.kind()
                        ));
                        break 'outer;
                    }
                    let cut = min_cut(net, &flow).unwrap();
                    let crossing: i64 = net
                        .edges()
                        .iter()
                        .filter(|e| cut.source_side[e.tail] && !cut.source_side[e.head])
                        .map(|e| e.capacity)
                        .sum();
                    if cut.capacity != got || crossing != got {
                        dual = Err(format!("network {i}: cut {} vs flow {got}", cut.capacity));
                        break 'outer;
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let optimal = optimal.and_then(|_| {
        ensure(elapsed < Duration::from_secs(60), || {
            format!("took {elapsed:?}")
        })
    });
    (
        optimal.map(|_| {
            format!(
                "{runs} solves on 200 networks in {:.2}s",
                elapsed.as_secs_f64()
            )
        }),
        dual.map(|_| format!("{runs} cuts")),
    )
}

fn warm_start_safety() -> Outcome {
    for seed in 0..50 {
        let net = common::small_network(300 + seed, 10, 20);
        let (optimum, cold) = max_flow(&net);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let predictions: [Vec<f64>; 4] = [
            vec![0.0; net.edge_count()],
            optimum.values().iter().map(|&f| f as f64).collect(),
            net.edges().iter().map(|e| e.capacity as f64).collect(),
            net.edges()
                .iter()
                .map(|e| rng.random::<f64>() * e.capacity as f64)
                .collect(),
        ];
        let scores = oracle_scores(&net);
        for (i, raw) in predictions.iter().enumerate() {
            for strategy in strategies(&scores) {
                let (flow, stats) = warm_start_solve(&net, raw, strategy).unwrap();
                ensure(
                    stats.total_flow == cold.total_flow && is_feasible(&net, flow.values()),
                    || {
                        format!(
                            "seed {seed} prediction {i}: {} vs {}",
                            stats.total_flow, cold.total_flow
                        )
                    },
                )?;
                ensure(i != 1 || stats.augmentations == 0, || {
                    format!(
                        "seed {seed}: optimum prediction took {} augmentations",
                        stats.augmentations
                    )
                })?;
            }
        }
    }
    Ok("50 networks x 4 predictions x 4 strategies".into())
}

fn tie_break_law() -> Outcome {
    let mut checked = 0;
    for seed in 0..100 {
        let net = common::busy_network(1000 + seed);
        let (_, _, trace) =
            ford_fulkerson_traced(&net, &Flow::zero(&net), Strategy::AdjustedBfs).unwrap();
        for aug in &trace.augmentations {
            let paths = all_simple_paths(
                &net,
                aug.flow_before.values(),
                net.source(),
                net.sink(),
                &[],
            );
            let len = paths.iter().map(|p| p.len()).min().unwrap();
            let width = paths
                .iter()
                .filter(|p| p.len() == len)
                .map(|p| bottleneck(p))
                .max()
                .unwrap();
            ensure(
                aug.path.len() == len && aug.path.bottleneck == width,
                || {
                    format!(
                        "seed {seed}: path of length {} width {} vs {len}/{width}",
                        aug.path.len(),
                        aug.path.bottleneck
                    )
                },
            )?;
            checked += 1;
        }
    }
    Ok(format!("{checked} augmentations on 100 instances"))
}

fn guided_discipline() -> Outcome {
    let mut checked = 0;
    for seed in 0..200 {
        let net = common::small_network(5000 + seed, 10, 20);
        let oracle = oracle_scores(&net);
        for level in [0.0, 0.5, 1.0] {
            let scores = perturb_scores(&oracle, level, seed);
            let (_, _, trace) =
                ford_fulkerson_traced(&net, &Flow::zero(&net), Strategy::Guided(&scores)).unwrap();
            for aug in &trace.augmentations {
                let before = aug.flow_before.values();
                for a in &aug.path.arcs {
                    let residual = match a.direction {
                        Direction::Forward => net.capacity(a.edge) - before[a.edge],
                        Direction::Backward => before[a.edge],
                    };
                    ensure(residual > 0, || {
                        format!("seed {seed}: zero-residual arc {}", a.edge)
                    })?;
                }
                let mut seen = vec![false; net.vertex_count()];
                let mut at = net.source();
                seen[at] = true;
                for a in &aug.path.arcs {
                    ensure(a.from == at && !seen[a.to], || {
                        format!("seed {seed}: path not simple")
                    })?;
                    at = a.to;
                    seen[at] = true;
                }
                ensure(at == net.sink(), || {
                    format!("seed {seed}: path ends at {at}")
                })?;
                checked += 1;
            }
            if level == 0.0 {
                let cut = canonical_min_cut(&net);
                if let (Some(&first), false) =
                    (trace.pivot_attempts.first(), cut.cut_edges.is_empty())
                {
                    let widest = cut
                        .cut_edges
                        .iter()
                        .map(|&e| net.capacity(e))
                        .max()
                        .unwrap();
                    ensure(cut.contains(first) && net.capacity(first) == widest, || {
                        format!("seed {seed}: first pivot {first} is not a widest cut edge")
                    })?;
                }
            }
        }
    }
    Ok(format!("{checked} guided augmentations"))
}

fn mean(records: &[TrialRecord], noise: f64, f: impl Fn(&TrialRecord) -> f64) -> f64 {
    let xs: Vec<f64> = records.iter().filter(|r| r.noise == noise).map(f).collect();
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn degradation_trend() -> Outcome {
    let mut report = Vec::new();
    for (label, family) in [
        ("diamond", InstanceFamily::Diamond { cap_max: 10 }),
        (
            "random",
            InstanceFamily::Random {
                n: 10,
                m: 20,
                cap_max: 10,
            },
        ),
    ] {
        let config = ExperimentConfig {
            instances: family,
            rng_seed: 2024,
            solvers: vec![StrategyKind::Guided],
            predictors: vec![PredictorKind::Oracle],
            noise_levels: vec![0.0, 1.0],
            repetitions: 60,
            linear_model: None,
            mpgnn_weights: None,
            repro_dir: None,
        };
        let records = run_matrix(&config).unwrap();
        let aug = |n| mean(&records, n, |r| r.augmentations as f64);
        let wc = |n| mean(&records, n, |r| r.weighted_cayley.unwrap());
        ensure(aug(0.0) <= aug(1.0), || {
            format!("{label}: augmentations {} > {}", aug(0.0), aug(1.0))
        })?;
        ensure(wc(0.0) == 0.0 && wc(0.0) < wc(1.0), || {
            format!("{label}: d_WC {} vs {}", wc(0.0), wc(1.0))
        })?;
        report.push(format!(
            "{label} aug {:.2}->{:.2} d_WC {:.2}->{:.2}",
            aug(0.0),
            aug(1.0),
            wc(0.0),
            wc(1.0)
        ));
    }
    Ok(format!("60 seeds; {}", report.join(", ")))
}

fn segmentation_ground_truth() -> Outcome {
    let start = Instant::now();
    let image = GrayImage::from_fn(16, 16, |x, _| if x < 8 { 0 } else { 255 }).unwrap();
    let mut seeds = SeedMask::neutral(16, 16);
    seeds.set(3, 8, Seed::Source);
    seeds.set(12, 5, Seed::Sink);
    let graph = build_grid_graph(&image, &seeds, &GraphParams::default()).unwrap();
    let scores = oracle_scores(graph.network());
    for strategy in strategies(&scores) {
        let seg = segment(&graph, strategy).unwrap();
        for y in 0..16 {
            for x in 0..16 {
                ensure(seg.mask.is_foreground(x, y) == (x < 8), || {
                    format!("{:?}: pixel ({x}, {y}) on the wrong side", strategy.kind())
                })?;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let textured = GrayImage::from_fn(16, 16, |x, y| ((x * 37 + y * 91) % 256) as u8).unwrap();
    let mut placements = 0;
    while placements < 100 {
        let mut seeds = SeedMask::neutral(16, 16);
        let count = rng.random_range(1..6);
        for kind in [Seed::Source, Seed::Sink] {
            for _ in 0..count {
                seeds.set(rng.random_range(0..16), rng.random_range(0..16), kind);
            }
        }
        let labels = seeds.labels();
        if !labels.contains(&Seed::Source) || !labels.contains(&Seed::Sink) {
            continue;
        }
        let params = GraphParams {
            neighborhood: if placements % 2 == 0 {
                Neighborhood::Four
            } else {
                Neighborhood::Eight
            },
            ..GraphParams::default()
        };
        let img = if placements % 3 == 0 {
            &image
        } else {
            &textured
        };
        let graph = build_grid_graph(img, &seeds, &params).unwrap();
        let seg = segment(&graph, Strategy::Bfs).unwrap();
        ensure(
            seg.cut
                .cut_edges
                .iter()
                .all(|&e| !graph.is_terminal_edge(e)),
            || format!("placement {placements}: terminal edge cut"),
        )?;
        placements += 1;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "4 strategies, 100 placements in {:.2}s",
        elapsed.as_secs_f64()
    ))
}

fn swap_distances(start: &[usize]) -> HashMap<Vec<usize>, usize> {
    let mut dist = HashMap::from([(start.to_vec(), 0)]);
    let mut queue = VecDeque::from([start.to_vec()]);
    while let Some(p) = queue.pop_front() {
        let d = dist[&p];
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                let mut q = p.clone();
                q.swap(i, j);
                dist.entry(q.clone()).or_insert_with(|| {
                    queue.push_back(q);
                    d + 1
                });
            }
        }
    }
    dist
}

fn distance_oracle() -> Outcome {
    let perm = |xs: &[usize]| Permutation::new(xs.to_vec()).unwrap();
    let check = |a: &[usize], b: &[usize], want: usize, w: &WeightFunction| -> Result<(), String> {
        let d = cayley_distance(&perm(a), &perm(b)).unwrap();
        ensure(d == want, || format!("{a:?} {b:?}: {d} vs {want}"))?;
        for method in [WeightedMethod::Exact, WeightedMethod::Bound] {
            let wd = weighted_cayley_distance(&perm(a), &perm(b), w, method).unwrap();
            ensure(wd.value == d as f64, || {
                format!("{a:?} {b:?}: weighted {} vs {d}", wd.value)
            })?;
        }
        Ok(())
    };

    let mut s4: Vec<Vec<usize>> = swap_distances(&[0, 1, 2, 3]).into_keys().collect();
    s4.sort();
    let w4 = WeightFunction::uniform(4);
    for a in &s4 {
        let from_a = swap_distances(a);
        for b in &s4 {
            check(a, b, from_a[b], &w4)?;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let w6 = WeightFunction::uniform(6);
    let mut cache: HashMap<Vec<usize>, HashMap<Vec<usize>, usize>> = HashMap::new();
    for _ in 0..1000 {
        let mut a: Vec<usize> = (0..6).collect();
        let mut b = a.clone();
        a.shuffle(&mut rng);
        b.shuffle(&mut rng);
        let want = cache.entry(a.clone()).or_insert_with(|| swap_distances(&a))[&b];
        check(&a, &b, want, &w6)?;
    }
    Ok(format!("{} pairs in S4, 1000 in S6", s4.len() * s4.len()))
}

fn hand_mlp(layers: &Value, input: &[f64]) -> Vec<f64> {
    let layers = layers.as_array().unwrap();
    let mut x = input.to_vec();
    for (i, l) in layers.iter().enumerate() {
        let rows = l["rows"].as_u64().unwrap() as usize;
        let cols = l["cols"].as_u64().unwrap() as usize;
        let w: Vec<f64> = l["weights"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_f64().unwrap())
            .collect();
        let b: Vec<f64> = l["bias"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_f64().unwrap())
            .collect();
        x = (0..rows)
            .map(|r| {
                let z = b[r] + (0..cols).map(|c| w[r * cols + c] * x[c]).sum::<f64>();
                if i + 1 < layers.len() {
                    z.max(0.0)
                } else {
                    z
                }
            })
            .collect();
    }
    x
}

fn mpgnn_oracle() -> Outcome {
    let v: Value = serde_json::from_str(HAND_WEIGHTS).unwrap();
    let cat = |parts: &[&[f64]]| parts.concat();
    let (h_s, h_a, h_t) = ([1.0, 0.5], [0.0, 1.0], [-1.0, 0.5]);
    let e_sa = [0.75, 1.0, 0.25];
    let e_at = [0.25, 0.5, 0.25];
    let zero = [0.0, 0.0];
    let m_sa = hand_mlp(&v["phi_m"], &cat(&[&h_s, &h_a, &zero, &e_sa]));
    let m_at = hand_mlp(&v["phi_m"], &cat(&[&h_a, &h_t, &zero, &e_at]));
    let h_s1 = hand_mlp(&v["phi_u"], &cat(&[&h_s, &zero]));
    let h_a1 = hand_mlp(&v["phi_u"], &cat(&[&h_a, &m_sa]));
    let h_t1 = hand_mlp(&v["phi_u"], &cat(&[&h_t, &m_at]));
    let h_sa1 = hand_mlp(&v["phi_e"], &cat(&[&zero, &h_s, &h_a, &e_sa]));
    let h_at1 = hand_mlp(&v["phi_e"], &cat(&[&zero, &h_a, &h_t, &e_at]));
    let logistic = |z: f64| 1.0 / (1.0 + (-z).exp());
    let want = [
        logistic(hand_mlp(&v["head"], &cat(&[&h_s1, &h_a1, &h_sa1, &e_sa]))[0]),
        logistic(hand_mlp(&v["head"], &cat(&[&h_a1, &h_t1, &h_at1, &e_at]))[0]),
    ];

    let net = FlowNetwork::new(3, &[(0, 1, 4), (1, 2, 2)], 0, 2).unwrap();
    let weights = MpgnnWeights::from_json(HAND_WEIGHTS).unwrap();
    let got = mpgnn_forward(&weights, &net, &Flow::from_values(vec![1, 1])).unwrap();
    let mut worst = 0.0f64;
    for (g, w) in got.values().iter().zip(want) {
        worst = worst.max(((g - w) / w).abs());
    }
    ensure(worst < 1e-9, || format!("relative error {worst:e}"))?;

    let diamond = common::diamond();
    for (h, rounds) in [(2, 1), (4, 3)] {
        let scores = mpgnn_forward(
            &MpgnnWeights::zeros(h, rounds),
            &diamond,
            &Flow::zero(&diamond),
        )
        .unwrap();
        ensure(scores.values().iter().all(|&p| p == 0.5), || {
            "zero weights not 0.5".into()
        })?;
    }
    Ok(format!("max relative error {worst:.1e}"))
}

fn reproducibility() -> Outcome {
    let config = ExperimentConfig {
        instances: InstanceFamily::Random {
            n: 8,
            m: 16,
            cap_max: 10,
        },
        rng_seed: 99,
        solvers: StrategyKind::ALL.to_vec(),
        predictors: vec![
            PredictorKind::None,
            PredictorKind::Oracle,
            PredictorKind::Linear,
            PredictorKind::Warm,
        ],
        noise_levels: vec![0.0, 0.5, 1.0],
        repetitions: 10,
        linear_model: None,
        mpgnn_weights: None,
        repro_dir: None,
    };
    let strip = |csv: String| -> String {
        csv.lines()
            .map(|l| l.rsplit_once(',').unwrap().0)
            .collect::<Vec<_>>()
            .join("\n")
    };
    let a = strip(csv_string(&run_matrix(&config).unwrap()));
    let b = strip(csv_string(&run_matrix(&config).unwrap()));
    ensure(a == b, || "CSV differs between runs".into())?;
    Ok(format!("{} rows identical", a.lines().count() - 1))
}

fn main() {
    let (optimality, duality) = optimality_and_duality();
    let results: Vec<(&str, Outcome)> = vec![
        ("optimality equivalence", optimality),
        ("duality", duality),
        ("warm-start safety", warm_start_safety()),
        ("tie-break law", tie_break_law()),
        ("guided-search discipline", guided_discipline()),
        ("degradation trend", degradation_trend()),
        ("segmentation ground truth", segmentation_ground_truth()),
        ("distance oracle", distance_oracle()),
        ("mpgnn inference oracle", mpgnn_oracle()),
        ("reproducibility", reproducibility()),
    ];
    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
