//! Acceptance suite: one PASS/FAIL line per criterion. Run with
//! `cargo test --release --test acceptance`.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;
use relu_exact::concave::{train_concave, train_concave_cells};
use relu_exact::convex::{train_l1, train_l2};
use relu_exact::dichotomy::{enumerate_open_dichotomies, enumerate_open_dichotomies_geometric};
use relu_exact::linalg::rank;
use relu_exact::linf::{check_realizable, linf_full_sweep, train_linf_interval, ThresholdLadder};
use relu_exact::model::{loss_value, Dataset, Label, LabeledPoint, LossSpec, LossValue};
use relu_exact::oracles::{oracle_dichotomies, oracle_train_1d};
use relu_exact::rational::{q, qi};
use relu_exact::reduction::{
    brute_force_multicolored_clique, decode_clique, generate_instance, witness_weights, ColoredGraph,
};
use relu_exact::{Rational, TrainConfig, EPS_CMP};

use common::*;

/// Margin the concave p = 1/2 comparisons must clear on the no-clique side.
const MARGIN_FLOOR: f64 = 1e-6;
const LIMIT_C1: Duration = Duration::from_secs(10 * 60);
const LIMIT_C2: Duration = Duration::from_secs(30 * 60);
const LIMIT_C10_L1: Duration = Duration::from_secs(60);
const LIMIT_C10_CONCAVE: Duration = Duration::from_secs(120);

type Check = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Check);
type Trainer = Box<dyn Fn(&Dataset) -> LossValue>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn exact(v: &LossValue) -> Rational {
    v.exact_value().expect("exact loss").clone()
}

fn close(a: &LossValue, b: &LossValue) -> bool {
    (a.to_f64() - b.to_f64()).abs() <= EPS_CMP
}

fn counts(g: &ColoredGraph) -> (i64, i64) {
    (g.n() as i64, g.colors() as i64)
}

fn c1_clique_l1() -> Check {
    let start = Instant::now();
    let corpus: Vec<ColoredGraph> = two_color_corpus().into_iter().chain(three_color_corpus()).collect();
    let results: Vec<Result<bool, String>> = corpus
        .par_iter()
        .enumerate()
        .map(|(gi, g)| {
            let inst = generate_instance(g, &qi(1)).map_err(|e| e.to_string())?;
            let r = train_l1(&inst.dataset, 1).map_err(|e| e.to_string())?;
            let loss = exact(&r.loss);
            let has = brute_force_multicolored_clique(g).unwrap().is_some();
            ensure(has == (loss <= inst.gamma), || format!("graph {gi}: clique {has}, loss {loss}, gamma {}", inst.gamma))?;
            let (n, k) = counts(g);
            if has {
                let c = decode_clique(&r.network, &inst).unwrap();
                ensure(g.is_multicolored_clique(&c), || format!("graph {gi}: decoded {c:?} is not a clique"))?;
            } else {
                let one_minus = Rational::one() - &inst.delta;
                let a = one_minus * Rational::from(n - k + 1) - &inst.gamma;
                let b = Rational::from(inst.m_copies) * &inst.delta - &inst.gamma;
                let margin = Rational::min_of(&a, &b);
                ensure(margin.is_positive() && &loss - &inst.gamma >= margin, || {
                    format!("graph {gi}: loss {loss} misses margin {margin} over gamma {}", inst.gamma)
                })?;
            }
            Ok(has)
        })
        .collect();
    let mut with = 0;
    for r in results {
        with += usize::from(r?);
    }
    let two = two_color_corpus().len();
    ensure(two >= 50 && corpus.len() - two >= 5, || "corpus too small".into())?;
    let t = start.elapsed();
    ensure(t <= LIMIT_C1, || format!("took {t:?}"))?;
    Ok(format!("{} graphs ({two} two-colour), {with} with cliques, {:.1}s", corpus.len(), t.as_secs_f64()))
}

fn c2_clique_concave() -> Check {
    let start = Instant::now();
    let corpus = two_color_corpus();
    let mut min_margin = f64::INFINITY;
    for p in [qi(0), q(1, 2)] {
        let results: Vec<Result<f64, String>> = corpus
            .par_iter()
            .enumerate()
            .map(|(gi, g)| {
                let inst = generate_instance(g, &p).map_err(|e| e.to_string())?;
                let r = train_concave(&inst.dataset, 1, &p).map_err(|e| e.to_string())?;
                let has = brute_force_multicolored_clique(g).unwrap().is_some();
                let (n, k) = counts(g);
                if p.is_zero() {
                    let loss = exact(&r.loss);
                    ensure(has == (loss <= inst.gamma), || format!("p=0 graph {gi}: clique {has}, loss {loss}"))?;
                    return Ok(f64::INFINITY);
                }
                let gamma = inst.gamma.to_f64();
                let loss = r.loss.to_f64();
                if has {
                    ensure(loss <= gamma + EPS_CMP, || format!("p=1/2 graph {gi}: loss {loss} above gamma {gamma}"))?;
                    Ok(f64::INFINITY)
                } else {
                    let delta = inst.delta.to_f64();
                    let margin = f64::min(
                        (1.0 - delta).sqrt() * (n - k + 1) as f64 - gamma,
                        inst.m_copies as f64 * delta.sqrt() - gamma,
                    );
                    ensure(margin >= MARGIN_FLOOR, || format!("p=1/2 graph {gi}: certified margin {margin}"))?;
                    ensure(loss - gamma >= margin - EPS_CMP, || {
                        format!("p=1/2 graph {gi}: loss {loss} within {margin} of gamma {gamma}")
                    })?;
                    Ok(margin)
                }
            })
            .collect();
        for r in results {
            min_margin = min_margin.min(r?);
        }
    }
    let t = start.elapsed();
    ensure(t <= LIMIT_C2, || format!("took {t:?}"))?;
    Ok(format!("{} graphs x p in {{0, 1/2}}, smallest p=1/2 margin {min_margin:.4}, {:.1}s", corpus.len(), t.as_secs_f64()))
}

fn c3_concave_vs_l1() -> Check {
    let mut rng = rng(3);
    let mut cases = Vec::new();
    for i in 0..130 {
        let (k, d, n) = match i {
            0..=89 => (1, rng.gen_range(1..=2), rng.gen_range(2..=7)),
            90..=114 => (2, 1, rng.gen_range(2..=4)),
            _ => (2, 2, 3),
        };
        cases.push((k, random_dataset(&mut rng, n, d, 3, 3)));
    }
    let checks: Vec<Result<(), String>> = cases
        .par_iter()
        .enumerate()
        .map(|(i, (k, data))| {
            let l1 = exact(&train_l1(data, *k).unwrap().loss);
            let cv = exact(&train_concave(data, *k, &qi(1)).unwrap().loss);
            ensure(l1 == cv, || format!("instance {i}: l1 {l1} vs concave {cv}"))?;
            if *k == 1 && i % 3 == 0 {
                let cells = exact(&train_concave_cells(data, 1, &qi(1), &TrainConfig::default()).unwrap().loss);
                ensure(l1 == cells, || format!("instance {i}: cell driver {cells}"))?;
            }
            Ok(())
        })
        .collect();
    checks.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(format!("{} instances (40 with k = 2) agree exactly", cases.len()))
}

fn in_general_position(pts: &[Vec<Rational>]) -> bool {
    let d = pts[0].len();
    let rows: Vec<Vec<Rational>> = pts.iter().map(|p| p.iter().cloned().chain([Rational::one()]).collect()).collect();
    let n = rows.len();
    let size = (d + 1).min(n);
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        let sub: Vec<Vec<Rational>> = idx.iter().map(|&i| rows[i].clone()).collect();
        if rank(&sub) < size {
            return false;
        }
        let mut j = size;
        loop {
            if j == 0 {
                return true;
            }
            j -= 1;
            if idx[j] < n - size + j {
                idx[j] += 1;
                for t in j + 1..size {
                    idx[t] = idx[t - 1] + 1;
                }
                break;
            }
        }
    }
}

fn binom(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn c4_dichotomies() -> Check {
    let mut rng = rng(4);
    let mut general = 0;
    for d in 1..=3usize {
        for n in 4..=8usize {
            for _ in 0..3 {
                let pts = loop {
                    let p = distinct_points(&mut rng, n, d, 20);
                    if in_general_position(&p) {
                        break p;
                    }
                };
                let expect: u128 = 2 * (0..=d as u128).map(|i| binom(n as u128 - 1, i)).sum::<u128>();
                let got = enumerate_open_dichotomies_geometric(&pts).unwrap().len() as u128;
                ensure(got == expect, || format!("d={d} n={n}: {got} vs {expect}"))?;
                general += 1;
            }
        }
    }
    // degenerate sets: tiny grids force collinear and coplanar subsets
    let mut sets: Vec<Vec<Vec<Rational>>> = Vec::new();
    sets.push((0..12).map(|i| vec![qi(i), qi(2 * i - 3)]).collect());
    sets.push((0..9).map(|i| vec![qi(i % 3), qi(i / 3), qi(0)]).collect());
    sets.push((0..10).map(|i| vec![qi(i % 2), qi(i / 2), qi((i % 2) + (i / 2))]).collect());
    for _ in 0..12 {
        let d = rng.gen_range(2..=3);
        let n = rng.gen_range(4..=if d == 2 { 9 } else { 12 });
        sets.push(distinct_points(&mut rng, n, d, 1));
    }
    for _ in 0..6 {
        sets.push(distinct_points(&mut rng, 12, 2, 2));
    }
    let checks: Vec<Result<(), String>> = sets
        .par_iter()
        .enumerate()
        .map(|(i, pts)| {
            let geo = enumerate_open_dichotomies_geometric(pts).unwrap();
            let brute = enumerate_open_dichotomies(pts, 12).unwrap();
            ensure(geo == brute, || format!("set {i}: geometric {} vs sweep {}", geo.len(), brute.len()))?;
            if pts.len() <= 10 {
                ensure(oracle_dichotomies(pts).unwrap() == geo, || format!("set {i}: max-margin oracle disagrees"))?;
            }
            Ok(())
        })
        .collect();
    checks.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(format!("{general} general-position counts, {} degenerate/random sets identical", sets.len()))
}

fn c5_linf() -> Check {
    let mut rng = rng(5);
    for i in 0..100 {
        let d = rng.gen_range(1..=3);
        let n = rng.gen_range(2..=8);
        let w: Vec<Rational> = (0..d).map(|_| small_rational(&mut rng, 2, 3)).collect();
        let b = small_rational(&mut rng, 2, 3);
        let pts = distinct_points(&mut rng, n, d, 4);
        let pairs: Vec<_> = pts
            .into_iter()
            .map(|x| {
                let pre = x.iter().zip(&w).fold(b.clone(), |acc, (xi, wi)| acc.add_mul(xi, wi));
                let y = Rational::max_of(&pre, &Rational::zero());
                (x, y)
            })
            .collect();
        let data = Dataset::from_pairs(d, pairs).unwrap();
        let r = train_linf_interval(&data).unwrap();
        ensure(r.gamma_star.is_zero(), || format!("planted {i}: gamma* = {}", r.gamma_star))?;
        ensure(check_realizable(&data).unwrap().realizable, || format!("planted {i}: not realizable"))?;
    }
    let valley = Dataset::from_pairs(1, [(vec![qi(0)], qi(1)), (vec![qi(1)], qi(0)), (vec![qi(2)], qi(1))]).unwrap();
    let v = train_linf_interval(&valley).unwrap().gamma_star;
    ensure(v == q(1, 2), || format!("valley gamma* = {v}"))?;
    let mut max_r = 0;
    for i in 0..150 {
        let d = rng.gen_range(1..=2);
        let n = rng.gen_range(1..=if i < 100 { 12 } else { 32 });
        // quarter-step labels give up to n distinct rungs on the threshold ladder
        let pts = distinct_points(&mut rng, n, d, 20);
        let points = pts
            .into_iter()
            .map(|x| {
                let lo = q(rng.gen_range(-8..=32), 4);
                let label = if i % 2 == 0 { Label::interval(lo.clone(), &lo + &q(rng.gen_range(0..=8), 4)).unwrap() } else { Label::Scalar(lo) };
                LabeledPoint { x, label, multiplicity: 1 }
            })
            .collect();
        let data = Dataset::new(d, points).unwrap();
        let r_count = ThresholdLadder::from_data(&data.to_interval_labels_if_scalar()).r();
        ensure(r_count <= 32, || format!("instance {i}: r = {r_count}"))?;
        max_r = max_r.max(r_count);
        let r = train_linf_interval(&data).unwrap();
        let (sweep, s) = linf_full_sweep(&data);
        ensure(r.gamma_star == sweep && r.s_star == s, || {
            format!("instance {i}: search ({}, {}) vs sweep ({sweep}, {s})", r.gamma_star, r.s_star)
        })?;
        let bound = (usize::BITS - r_count.leading_zeros()) as u64 + 1; // ⌈log₂(r+1)⌉ + 1
        ensure(r.lp_solves <= bound, || format!("instance {i}: {} LPs for r = {r_count}", r.lp_solves))?;
    }
    Ok(format!("100 planted realizable, valley = 1/2, 150 search/sweep matches (r up to {max_r}) within LP bound"))
}

trait IntervalView {
    fn to_interval_labels_if_scalar(&self) -> Dataset;
}

impl IntervalView for Dataset {
    fn to_interval_labels_if_scalar(&self) -> Dataset {
        if self.has_scalar_labels() {
            self.to_interval_labels()
        } else {
            self.clone()
        }
    }
}

fn c6_oracle_1d() -> Check {
    let mut rng = rng(6);
    let mut cases = Vec::new();
    for _ in 0..220 {
        let n = rng.gen_range(1..=6);
        let mut data = random_dataset(&mut rng, n, 1, 5, 3);
        if rng.gen_bool(0.3) {
            let pts: Vec<LabeledPoint> =
                data.points().iter().cloned().map(|p| { let m = rng.gen_range(1..=3); p.with_multiplicity(m) }).collect();
            data = Dataset::new(1, pts).unwrap();
        }
        cases.push(data);
    }
    let checks: Vec<Result<(), String>> = cases
        .par_iter()
        .enumerate()
        .map(|(i, data)| {
            let l1 = oracle_train_1d(data, &LossSpec::Lp(qi(1))).unwrap();
            ensure(exact(&l1) == exact(&train_l1(data, 1).unwrap().loss), || format!("{i}: l1"))?;
            let l2 = oracle_train_1d(data, &LossSpec::Lp(qi(2))).unwrap();
            ensure(exact(&l2) == exact(&train_l2(data, 1).unwrap().loss), || format!("{i}: l2"))?;
            let li = oracle_train_1d(data, &LossSpec::LinfInterval).unwrap();
            let tr = train_linf_interval(data).unwrap().gamma_star;
            ensure(exact(&li) == tr, || format!("{i}: linf oracle {li} vs {tr}"))?;
            let z = oracle_train_1d(data, &LossSpec::Lp(qi(0))).unwrap();
            ensure(exact(&z) == exact(&train_concave(data, 1, &qi(0)).unwrap().loss), || format!("{i}: p=0"))?;
            let h = oracle_train_1d(data, &LossSpec::Lp(q(1, 2))).unwrap();
            let th = train_concave(data, 1, &q(1, 2)).unwrap().loss;
            ensure(close(&h, &th), || format!("{i}: p=1/2 oracle {h} vs {th}"))?;
            Ok(())
        })
        .collect();
    checks.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(format!("{} instances x 5 losses agree", cases.len()))
}

fn c7_structure() -> Check {
    let corpus: Vec<ColoredGraph> = two_color_corpus().into_iter().chain(three_color_corpus()).collect();
    let mut witnesses = 0;
    for (gi, g) in corpus.iter().enumerate() {
        for p in [qi(0), q(1, 2), qi(1), qi(2)] {
            let inst = generate_instance(g, &p).unwrap();
            let data = &inst.dataset;
            ensure(data.dim() == 2 * g.colors(), || format!("graph {gi}: dim {}", data.dim()))?;
            for (i, pt) in data.points().iter().enumerate() {
                let y = pt.y();
                ensure(*y == qi(0) || *y == qi(1), || format!("graph {gi}: label {y}"))?;
                ensure((i < g.n()) == (*y == qi(1)), || format!("graph {gi}: point {i} label order"))?;
                let nz = pt.x.iter().filter(|c| !c.is_zero()).count();
                ensure(nz <= 4, || format!("graph {gi}: point {i} has {nz} nonzeros"))?;
            }
            let spec = LossSpec::Lp(p.clone());
            for c in all_cliques(g) {
                let net = witness_weights(g, &c).unwrap();
                let v = loss_value(&net, data, &spec).unwrap();
                ensure(v.approx_value() == &inst.gamma && v.exact_value().is_none_or(|e| *e == inst.gamma), || {
                    format!("graph {gi} p={p}: witness loss {v} vs gamma {}", inst.gamma)
                })?;
                let mut got = decode_clique(&net, &inst).unwrap();
                let mut want = c.clone();
                got.sort();
                want.sort();
                ensure(got == want, || format!("graph {gi}: decoded {got:?} from {want:?}"))?;
                witnesses += 1;
            }
        }
    }
    Ok(format!("{} graphs x 4 exponents, {witnesses} witness/decode round trips", corpus.len()))
}

fn embed(data: &Dataset, a: &[[i64; 2]; 4], c: &[Rational; 4]) -> Dataset {
    let points = data
        .points()
        .iter()
        .map(|p| {
            let x = (0..4).map(|r| &c[r] + &(&qi(a[r][0]) * &p.x[0]) + &qi(a[r][1]) * &p.x[1]).collect();
            LabeledPoint { x, ..p.clone() }
        })
        .collect();
    Dataset::new(4, points).unwrap()
}

fn c8_monotone_affine() -> Check {
    let mut rng = rng(8);
    for i in 0..30 {
        let (d, n) = if i < 20 { (1, rng.gen_range(2..=5)) } else { (2, rng.gen_range(2..=4)) };
        let data = random_dataset(&mut rng, n, d, 3, 3);
        let one = exact(&train_l1(&data, 1).unwrap().loss);
        let two = exact(&train_l1(&data, 2).unwrap().loss);
        ensure(two <= one, || format!("instance {i}: k=2 loss {two} above k=1 loss {one}"))?;
    }
    let mut trainers = 0;
    for i in 0..10 {
        let n = rng.gen_range(3..=5);
        let data = random_dataset(&mut rng, n, 2, 3, 3);
        let (a, c) = loop {
            let a: [[i64; 2]; 4] = std::array::from_fn(|_| [rng.gen_range(-3..=3), rng.gen_range(-3..=3)]);
            let m: Vec<Vec<Rational>> = a.iter().map(|r| vec![qi(r[0]), qi(r[1])]).collect();
            if rank(&m) == 2 {
                break (a, std::array::from_fn(|_| small_rational(&mut rng, 3, 4)));
            }
        };
        let lifted = embed(&data, &a, &c);
        let runs: Vec<(&str, Trainer)> = vec![
            ("l1", Box::new(|d: &Dataset| train_l1(d, 1).unwrap().loss)),
            ("l2", Box::new(|d: &Dataset| train_l2(d, 1).unwrap().loss)),
            ("p=0", Box::new(|d: &Dataset| train_concave(d, 1, &qi(0)).unwrap().loss)),
            ("p=1/2", Box::new(|d: &Dataset| train_concave(d, 1, &q(1, 2)).unwrap().loss)),
            ("linf", Box::new(|d: &Dataset| LossValue::exact(train_linf_interval(d).unwrap().gamma_star))),
            ("l1 k=2", Box::new(|d: &Dataset| train_l1(d, 2).unwrap().loss)),
        ];
        for (name, run) in &runs {
            let (base, up) = (run(&data), run(&lifted));
            let same = match (base.exact_value(), up.exact_value()) {
                (Some(x), Some(y)) => x == y,
                _ => close(&base, &up),
            };
            ensure(same, || format!("embedding {i}, {name}: {base} vs {up}"))?;
            trainers += 1;
        }
    }
    Ok(format!("30 monotone pairs, {trainers} embedded trainer runs unchanged"))
}

fn c9_cli_threads() -> Check {
    let bin = env!("CARGO_BIN_EXE_relu-exact");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rng = rng(9);
    let mut inputs = Vec::new();
    for i in 0..3 {
        let data = random_dataset(&mut rng, 6, 2, 3, 3);
        let path = dir.path().join(format!("d{i}.json"));
        std::fs::write(&path, relu_exact::io::dataset_to_json(&data).unwrap()).unwrap();
        inputs.push(path);
    }
    // complete bipartite graph on two plus two vertices: a 6-point instance in R^4
    let graph = two_color_corpus().into_iter().find(|g| g.n() == 4 && g.edges().len() == 4).unwrap();
    let graph = &graph;
    let gpath = dir.path().join("g.json");
    std::fs::write(&gpath, relu_exact::io::graph_to_json(graph).unwrap()).unwrap();
    let inst = dir.path().join("inst.json");
    let status = Command::new(bin)
        .args(["gen-clique", "--graph", gpath.to_str().unwrap(), "--p", "1"])
        .args(["--out", inst.to_str().unwrap(), "--meta", dir.path().join("m.json").to_str().unwrap()])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(status.status.success(), || "gen-clique failed".into())?;
    inputs.push(inst);

    let loss_args: [&[&str]; 5] = [
        &["--k", "2", "--loss", "lp", "--p", "1"],
        &["--k", "1", "--loss", "lp", "--p", "2"],
        &["--k", "1", "--loss", "lp", "--p", "1/2"],
        &["--k", "1", "--loss", "lp", "--p", "0"],
        &["--k", "1", "--loss", "linf"],
    ];
    let mut runs = 0;
    for (i, input) in inputs.iter().enumerate() {
        for (j, args) in loss_args.iter().enumerate() {
            if i == 3 && j == 0 {
                continue; // two neurons on the 4-d instance is slow and adds nothing here
            }
            let mut outputs = Vec::new();
            for threads in ["1", "4", "8"] {
                let res = dir.path().join(format!("r{i}_{j}_{threads}.json"));
                let model = dir.path().join(format!("m{i}_{j}_{threads}.json"));
                let out = Command::new(bin)
                    .args(["train", "--data", input.to_str().unwrap()])
                    .args(*args)
                    .args(["--threads", threads, "--result", res.to_str().unwrap(), "--out", model.to_str().unwrap()])
                    .output()
                    .map_err(|e| e.to_string())?;
                ensure(out.status.success(), || format!("input {i} args {args:?}: {}", String::from_utf8_lossy(&out.stderr)))?;
                outputs.push((std::fs::read(&res).unwrap(), std::fs::read(&model).unwrap()));
            }
            ensure(outputs.windows(2).all(|w| w[0] == w[1]), || format!("input {i} args {args:?}: outputs differ"))?;
            runs += 1;
        }
    }
    Ok(format!("{runs} train invocations byte-identical across 1, 4 and 8 threads"))
}

fn c10_runtime() -> Check {
    let mut rng = rng(10);
    let data = random_dataset(&mut rng, 20, 2, 10, 5);
    let start = Instant::now();
    let l1 = train_l1(&data, 1).map_err(|e| e.to_string())?;
    let t1 = start.elapsed();
    ensure(t1 <= LIMIT_C10_L1, || format!("l1 took {t1:?}"))?;
    let data = random_dataset(&mut rng, 10, 2, 10, 5);
    let start = Instant::now();
    train_concave(&data, 1, &q(1, 2)).map_err(|e| e.to_string())?;
    let t2 = start.elapsed();
    ensure(t2 <= LIMIT_C10_CONCAVE, || format!("concave took {t2:?}"))?;
    Ok(format!(
        "l1 n'=20: {:.2}s ({} cells), concave p=1/2 n'=10: {:.2}s",
        t1.as_secs_f64(),
        l1.stats.subproblems,
        t2.as_secs_f64()
    ))
}

fn run(f: fn() -> Check) -> Check {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(r) => r,
        Err(e) => Err(e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into())),
    }
}

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "clique equivalence, l1", c1_clique_l1),
        (2, "clique equivalence, concave", c2_clique_concave),
        (3, "concave p=1 equals l1", c3_concave_vs_l1),
        (4, "dichotomy counting and enumeration", c4_dichotomies),
        (5, "interval max-loss trainer", c5_linf),
        (6, "1-D oracle agreement", c6_oracle_1d),
        (7, "reduction structure", c7_structure),
        (8, "monotonicity and affine invariance", c8_monotone_affine),
        (9, "determinism across threads", c9_cli_threads),
        (10, "runtime envelope", c10_runtime),
    ];
    // ACCEPTANCE_ONLY=3,5 restricts the run to the listed criteria
    let only: Option<Vec<u32>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let wanted = |id: u32| only.as_ref().is_none_or(|o| o.contains(&id));
    // the timing criterion runs alone; the rest share the machine
    let mut results: Vec<Option<Check>> = vec![None; criteria.len()];
    if wanted(10) {
        results[9] = Some(run(criteria[9].2));
    }
    std::thread::scope(|s| {
        let handles: Vec<_> = criteria[..9]
            .iter()
            .enumerate()
            .filter(|(_, c)| wanted(c.0))
            .map(|(i, &(_, _, f))| (i, s.spawn(move || run(f))))
            .collect();
        for (i, h) in handles {
            results[i] = Some(h.join().expect("criterion thread"));
        }
    });
    let mut failed = 0;
    for ((id, name, _), r) in criteria.iter().zip(results) {
        let Some(r) = r else { continue };
        match r {
            Ok(detail) => println!("criterion {id:>2} PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  {name}: {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
