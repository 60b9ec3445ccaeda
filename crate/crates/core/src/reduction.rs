//! Hard instances from multicolored-clique graphs: a single ReLU reaches loss
//! at most `γ = N − k` on the generated data exactly when the graph has a
//! clique with one vertex of every color.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::model::{eval_network, exponent_parts, Dataset, LabeledPoint, OutputSign, ReluNetwork};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    /// 1-based color.
    pub color: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredGraph {
    colors: usize,
    vertices: Vec<Vertex>,
    edges: Vec<(String, String)>,
    index: HashMap<String, usize>,
    adjacent: HashSet<(usize, usize)>,
}

impl ColoredGraph {
    pub fn new(colors: usize, vertices: Vec<Vertex>, edges: Vec<(String, String)>) -> Result<Self> {
        if colors == 0 {
            return Err(Error::InvalidGraph("at least one color is required".into()));
        }
        let mut index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if v.color == 0 || v.color > colors {
                return Err(Error::InvalidGraph(format!("vertex {:?} has color {} outside 1..={colors}", v.id, v.color)));
            }
            if index.insert(v.id.clone(), i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate vertex id {:?}", v.id)));
            }
        }
        let mut adjacent = HashSet::new();
        for (a, b) in &edges {
            let (Some(&ia), Some(&ib)) = (index.get(a), index.get(b)) else {
                return Err(Error::InvalidGraph(format!("edge ({a:?}, {b:?}) names an unknown vertex")));
            };
            if ia == ib {
                return Err(Error::InvalidGraph(format!("self-loop at {a:?}")));
            }
            adjacent.insert((ia.min(ib), ia.max(ib)));
        }
        Ok(Self { colors, vertices, edges, index, adjacent })
    }

    pub fn colors(&self) -> usize {
        self.colors
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(String, String)] {
        &self.edges
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacent.contains(&(a.min(b), a.max(b)))
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Position of each vertex within its color class, starting at 1.
    fn circle_indices(&self) -> Vec<u64> {
        let mut seen = vec![0u64; self.colors + 1];
        self.vertices
            .iter()
            .map(|v| {
                seen[v.color] += 1;
                seen[v.color]
            })
            .collect()
    }

    fn largest_class(&self) -> u64 {
        let mut sizes = vec![0u64; self.colors + 1];
        for v in &self.vertices {
            sizes[v.color] += 1;
        }
        sizes.into_iter().max().unwrap_or(0)
    }

    /// Whether the vertices form a clique with exactly one vertex per color.
    pub fn is_multicolored_clique(&self, ids: &[String]) -> bool {
        self.check_clique(ids).is_ok()
    }

    fn check_clique(&self, ids: &[String]) -> Result<Vec<usize>> {
        let mut idx = Vec::with_capacity(ids.len());
        for id in ids {
            idx.push(self.vertex_index(id).ok_or_else(|| Error::NotAClique(format!("unknown vertex {id:?}")))?);
        }
        if idx.len() != self.colors {
            return Err(Error::NotAClique(format!("{} vertices for {} colors", idx.len(), self.colors)));
        }
        let colors: HashSet<usize> = idx.iter().map(|&i| self.vertices[i].color).collect();
        if colors.len() != self.colors {
            return Err(Error::NotAClique("colors repeat".into()));
        }
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[a + 1..] {
                if !self.adjacent(i, j) {
                    return Err(Error::NotAClique(format!(
                        "{:?} and {:?} are not adjacent",
                        self.vertices[i].id, self.vertices[j].id
                    )));
                }
            }
        }
        Ok(idx)
    }
}

/// `((1 − i²)/(1 + i²), 2i/(1 + i²))`, a rational point on the unit circle.
pub fn circle_point(i: u64) -> (Rational, Rational) {
    let i = BigInt::from(i);
    let sq = &i * &i;
    let den = BigInt::one() + &sq;
    (
        Rational::from_bigints(BigInt::one() - &sq, den.clone()),
        Rational::from_bigints(BigInt::from(2) * i, den),
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionParams {
    pub gamma: Rational,
    pub delta: Rational,
    pub m_copies: u64,
}

/// `γ = N − k`, the threshold `δ` and the midpoint multiplicity `M`, with
/// both separating inequalities checked exactly.
pub fn compute_params(graph: &ColoredGraph, p: &Rational) -> Result<ReductionParams> {
    let (n, k) = (graph.n() as i64, graph.colors() as i64);
    if n < k {
        return Err(Error::InvalidGraph(format!("{n} vertices cannot hold a clique over {k} colors")));
    }
    if p.is_negative() {
        return Err(Error::UnsupportedLoss(format!("p = {p} must be nonnegative")));
    }
    let gamma = Rational::from(n - k);
    let slack = Rational::from(n - k + 1);
    if p.is_zero() {
        return Ok(ReductionParams { gamma, delta: Rational::new(1, 2), m_copies: (n - k + 1) as u64 });
    }
    let (u, v) = exponent_parts(p)?;
    let p_tilde = Rational::max_of(p, &Rational::one());
    let delta = (Rational::from(2i64) * p_tilde * &slack).recip();
    // smallest m with m ≥ γ·δ^(−u/v), i.e. m^v ≥ γ^v·δ^(−u)
    let target = gamma.pow(v) * delta.recip().pow(u);
    let mut ceil: BigInt = target.ceil().nth_root(v);
    while Rational::from(ceil.clone()).pow(v) < target {
        ceil += 1;
    }
    while ceil > BigInt::from(0) && Rational::from(&ceil - 1).pow(v) >= target {
        ceil -= 1;
    }
    let m: BigInt = ceil + 1;
    let one_minus = Rational::one() - &delta;
    let first = one_minus.pow(u) * slack.pow(v) > gamma.pow(v);
    let second = Rational::from(m.clone()).pow(v) * delta.pow(u) > gamma.pow(v);
    assert!(first && second, "separating inequalities must hold by construction");
    let m_copies = m.to_u64().ok_or_else(|| Error::InvalidInput("multiplicity does not fit in 64 bits".into()))?;
    Ok(ReductionParams { gamma, delta, m_copies })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionOutput {
    pub dataset: Dataset,
    pub gamma: Rational,
    pub delta: Rational,
    pub m_copies: u64,
    pub p: Rational,
    /// Vertex id of each label-1 point; these are the first points of the dataset.
    pub decode_map: Vec<String>,
}

fn lifted_point(graph: &ColoredGraph, v: usize, circle: &[u64]) -> Vec<Rational> {
    let k = graph.colors();
    let mut x = vec![Rational::zero(); 2 * k];
    let (a, b) = circle_point(circle[v]);
    let j = graph.vertices()[v].color - 1;
    x[2 * j] = a;
    x[2 * j + 1] = b;
    x
}

/// Label-1 points for the vertices in input order, then one label-0 midpoint of
/// multiplicity `M` for every pair that is non-adjacent or shares a color.
pub fn generate_instance(graph: &ColoredGraph, p: &Rational) -> Result<ReductionOutput> {
    let params = compute_params(graph, p)?;
    let circle = graph.circle_indices();
    let lifted: Vec<Vec<Rational>> = (0..graph.n()).map(|v| lifted_point(graph, v, &circle)).collect();
    let mut points: Vec<LabeledPoint> = lifted.iter().map(|x| LabeledPoint::scalar(x.clone(), Rational::one())).collect();
    let half = Rational::new(1, 2);
    for a in 0..graph.n() {
        for b in a + 1..graph.n() {
            let same_color = graph.vertices()[a].color == graph.vertices()[b].color;
            if same_color || !graph.adjacent(a, b) {
                let mid = lifted[a].iter().zip(&lifted[b]).map(|(s, t)| (s + t) * &half).collect();
                points.push(LabeledPoint::scalar(mid, Rational::zero()).with_multiplicity(params.m_copies));
            }
        }
    }
    let dataset = Dataset::new(2 * graph.colors(), points)?;
    debug_assert!(dataset.points().iter().all(|pt| pt.x.iter().filter(|c| !c.is_zero()).count() <= 4));
    Ok(ReductionOutput {
        dataset,
        gamma: params.gamma,
        delta: params.delta,
        m_copies: params.m_copies,
        p: p.clone(),
        decode_map: graph.vertices().iter().map(|v| v.id.clone()).collect(),
    })
}

/// The single neuron `w = (2/ε)·(x̃_{i_1}, …, x̃_{i_k})`, `b = 1 − 2/ε` that
/// predicts 1 on the clique and 0 everywhere else.
pub fn witness_weights(graph: &ColoredGraph, clique: &[String]) -> Result<ReluNetwork> {
    let idx = graph.check_clique(clique)?;
    let circle = graph.circle_indices();
    let top = graph.largest_class();
    let pts: Vec<(Rational, Rational)> = (1..=top).map(circle_point).collect();
    let mut max_inner: Option<Rational> = None;
    for (a, pa) in pts.iter().enumerate() {
        for pb in &pts[a + 1..] {
            let inner = &pa.0 * &pb.0 + &pa.1 * &pb.1;
            if max_inner.as_ref().is_none_or(|m| inner > *m) {
                max_inner = Some(inner);
            }
        }
    }
    // with a single point per color any positive ε separates; take 1
    let eps = max_inner.map_or_else(Rational::one, |m| Rational::one() - m);
    let scale = Rational::from(2i64) / &eps;
    let mut w = vec![Rational::zero(); 2 * graph.colors()];
    for &v in &idx {
        let j = graph.vertices()[v].color - 1;
        let (a, b) = circle_point(circle[v]);
        w[2 * j] = &scale * &a;
        w[2 * j + 1] = &scale * &b;
    }
    let b = Rational::one() - &scale;
    Ok(ReluNetwork::single(w, b, OutputSign::Positive))
}

/// Vertices whose points are predicted above `δ`.
pub fn decode_clique(net: &ReluNetwork, out: &ReductionOutput) -> Result<Vec<String>> {
    let mut chosen = Vec::new();
    for (pt, id) in out.dataset.points().iter().zip(&out.decode_map) {
        if eval_network(net, &pt.x)? > out.delta {
            chosen.push(id.clone());
        }
    }
    Ok(chosen)
}

const CLIQUE_SEARCH_BOUND: u128 = 1_000_000;

/// Exhaustive search over one vertex per color class.
pub fn brute_force_multicolored_clique(graph: &ColoredGraph) -> Result<Option<Vec<String>>> {
    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); graph.colors()];
    for (i, v) in graph.vertices().iter().enumerate() {
        classes[v.color - 1].push(i);
    }
    let product = classes.iter().fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128));
    if product > CLIQUE_SEARCH_BOUND {
        return Err(Error::BudgetExceeded { what: "clique search", needed: product, budget: CLIQUE_SEARCH_BOUND });
    }
    fn walk(graph: &ColoredGraph, classes: &[Vec<usize>], chosen: &mut Vec<usize>) -> bool {
        let Some(class) = classes.get(chosen.len()) else {
            return true;
        };
        for &v in class {
            if chosen.iter().all(|&u| graph.adjacent(u, v)) {
                chosen.push(v);
                if walk(graph, classes, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let mut chosen = Vec::new();
    Ok(walk(graph, &classes, &mut chosen).then(|| chosen.iter().map(|&v| graph.vertices()[v].id.clone()).collect()))
}
