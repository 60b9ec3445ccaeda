#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relu_exact::model::{Dataset, Label, LabeledPoint};
use relu_exact::rational::{q, qi};
use relu_exact::reduction::{ColoredGraph, Vertex};
use relu_exact::Rational;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_rational(rng: &mut impl Rng, span: i64, den: i64) -> Rational {
    q(rng.gen_range(-span * den..=span * den), den)
}

/// `n` distinct integer points in `[-span, span]^d`.
pub fn distinct_points(rng: &mut impl Rng, n: usize, d: usize, span: i64) -> Vec<Vec<Rational>> {
    let mut pts: Vec<Vec<i64>> = Vec::new();
    while pts.len() < n {
        let p: Vec<i64> = (0..d).map(|_| rng.gen_range(-span..=span)).collect();
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    pts.into_iter().map(|p| p.into_iter().map(qi).collect()).collect()
}

/// Scalar-labelled data on distinct integer inputs with integer labels.
pub fn random_dataset(rng: &mut impl Rng, n: usize, d: usize, span: i64, label_span: i64) -> Dataset {
    let pts = distinct_points(rng, n, d, span);
    let pairs: Vec<_> = pts.into_iter().map(|x| (x, qi(rng.gen_range(-label_span..=label_span)))).collect();
    Dataset::from_pairs(d, pairs).unwrap()
}

pub fn interval_dataset(rng: &mut impl Rng, n: usize, d: usize, span: i64) -> Dataset {
    let pts = distinct_points(rng, n, d, span);
    let points = pts
        .into_iter()
        .map(|x| {
            let lo = small_rational(rng, 3, 2);
            let width = q(rng.gen_range(0..=4), 2);
            LabeledPoint { x, label: Label::interval(lo.clone(), &lo + &width).unwrap(), multiplicity: 1 }
        })
        .collect();
    Dataset::new(d, points).unwrap()
}

fn graph(sizes: &[usize], edges: &[(usize, usize)]) -> ColoredGraph {
    let mut vertices = Vec::new();
    for (c, &s) in sizes.iter().enumerate() {
        for i in 0..s {
            vertices.push(Vertex { id: format!("c{}v{}", c + 1, i), color: c + 1 });
        }
    }
    let edges = edges.iter().map(|&(a, b)| (vertices[a].id.clone(), vertices[b].id.clone())).collect();
    ColoredGraph::new(sizes.len(), vertices, edges).unwrap()
}

fn cross_pairs(sizes: &[usize]) -> Vec<(usize, usize)> {
    let color: Vec<usize> = sizes.iter().enumerate().flat_map(|(c, &s)| std::iter::repeat_n(c, s)).collect();
    let n = color.len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if color[a] != color[b] {
                out.push((a, b));
            }
        }
    }
    out
}

/// Two-colour graphs on at most six vertices: every class split, each with an
/// empty, complete, single-edge and three random edge sets.
pub fn two_color_corpus() -> Vec<ColoredGraph> {
    let mut rng = rng(0x2c01);
    let splits = [(1, 1), (1, 2), (1, 3), (1, 4), (1, 5), (2, 2), (2, 3), (2, 4), (3, 3)];
    let mut out = Vec::new();
    for &(a, b) in &splits {
        let sizes = [a, b];
        let all = cross_pairs(&sizes);
        out.push(graph(&sizes, &[]));
        out.push(graph(&sizes, &all));
        out.push(graph(&sizes, &all[all.len() - 1..]));
        for density in [0.3, 0.6, 0.8] {
            let e: Vec<_> = all.iter().copied().filter(|_| rng.gen_bool(density)).collect();
            out.push(graph(&sizes, &e));
        }
    }
    // a cycle whose colours alternate except at one vertex
    out.push(graph(&[3, 2], &[(0, 3), (3, 1), (1, 4), (4, 2)]));
    out
}

/// Three-colour graphs with at most two vertices per colour and few missing
/// cross edges, so that the instances stay small.
pub fn three_color_corpus() -> Vec<ColoredGraph> {
    let mut rng = rng(0x3c01);
    let mut out = Vec::new();
    out.push(graph(&[1, 1, 1], &cross_pairs(&[1, 1, 1])));
    out.push(graph(&[1, 1, 1], &[(0, 1), (1, 2)]));
    for sizes in [[2, 1, 1], [2, 2, 1], [2, 2, 2]] {
        let all = cross_pairs(&sizes);
        out.push(graph(&sizes, &all));
        for _ in 0..2 {
            let mut e = all.clone();
            e.shuffle(&mut rng);
            e.truncate(all.len() - 2);
            out.push(graph(&sizes, &e));
        }
    }
    // no clique: the two colour-2/3 vertices are not adjacent
    out.push(graph(&[2, 1, 1], &[(0, 2), (0, 3), (1, 2), (1, 3)]));
    out
}

/// All multicoloured cliques, by exhaustive product over the colour classes.
pub fn all_cliques(g: &ColoredGraph) -> Vec<Vec<String>> {
    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); g.colors()];
    for (i, v) in g.vertices().iter().enumerate() {
        classes[v.color - 1].push(i);
    }
    let mut out = Vec::new();
    let mut stack = vec![Vec::<usize>::new()];
    while let Some(chosen) = stack.pop() {
        if chosen.len() == classes.len() {
            out.push(chosen.iter().map(|&i| g.vertices()[i].id.clone()).collect());
            continue;
        }
        for &v in &classes[chosen.len()] {
            if chosen.iter().all(|&u| g.adjacent(u, v)) {
                let mut next = chosen.clone();
                next.push(v);
                stack.push(next);
            }
        }
    }
    out
}
