//! Machinery shared by the enumeration trainers: preprocessing into distinct
//! spanning coordinates, subproblem cells, and the deterministic
//! branch-and-bound driver over cells.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{TrainConfig, EPS_CMP};
use crate::dichotomy::{enumerate_open_dichotomies_geometric, Dichotomy};
use crate::error::{Error, Result};
use crate::model::{
    affine_hull_reduce, dedupe, exponent_parts, lift_network, loss_value_with_precision, lp_term_exact, lp_term_f64,
    AffineTransform, Dataset, LossSpec, LossValue, Neuron, OutputSign, ReluNetwork,
};
use crate::rational::Rational;

/// One neuron's share of a subproblem: its active set and output sign.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CellNeuron {
    pub dichotomy: Dichotomy,
    pub sign: OutputSign,
}

/// A subproblem: a dichotomy and an output sign for each neuron. Indices
/// refer to the distinct coordinates of the preprocessed data.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubproblemSpec {
    pub neurons: Vec<CellNeuron>,
}

impl SubproblemSpec {
    pub fn k(&self) -> usize {
        self.neurons.len()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainStats {
    /// Cells (or candidate systems, for the arrangement driver) evaluated.
    pub subproblems: u64,
    pub lp_solves: u64,
    /// Stationarity or vertex systems skipped because they were singular.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub skipped_singular: u64,
}

fn is_zero(v: &u64) -> bool {
    *v == 0
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainResult {
    /// Optimal network in the original input coordinates.
    pub network: ReluNetwork,
    /// Loss of `network` on the original data, recomputed from scratch.
    pub loss: LossValue,
    pub certificate: SubproblemSpec,
    pub stats: TrainStats,
}

/// Scalar-labelled data over distinct coordinates `coords` spanning `R^dim`.
#[derive(Debug, Clone)]
pub(crate) struct Problem {
    pub dim: usize,
    pub coords: Vec<Vec<Rational>>,
    /// Coordinate index of each point.
    pub coord_of: Vec<usize>,
    pub ys: Vec<Rational>,
    pub mults: Vec<Rational>,
}

impl Problem {
    pub fn from_dataset(data: &Dataset) -> Result<Self> {
        data.require_scalar_labels()?;
        let (coords, coord_of) = data.distinct_coordinates();
        Ok(Self {
            dim: data.dim(),
            coords,
            coord_of,
            ys: data.points().iter().map(|p| p.y().clone()).collect(),
            mults: data.points().iter().map(|p| Rational::from(p.multiplicity)).collect(),
        })
    }

    pub fn n_points(&self) -> usize {
        self.ys.len()
    }

    pub fn n_coords(&self) -> usize {
        self.coords.len()
    }

    /// Width of the stacked parameter vector `(w_1, b_1, …, w_k, b_k)`.
    pub fn width(&self, k: usize) -> usize {
        k * (self.dim + 1)
    }

    /// Row `(0, …, x_c, 1, …, 0)` selecting neuron `j`'s pre-activation at `c`.
    pub fn partition_row(&self, c: usize, j: usize, k: usize) -> Vec<Rational> {
        let mut row = vec![Rational::zero(); self.width(k)];
        let off = j * (self.dim + 1);
        row[off..off + self.dim].clone_from_slice(&self.coords[c]);
        row[off + self.dim] = Rational::one();
        row
    }

    /// Linear form giving the network output at coordinate `c` on the cell.
    /// All zero when `c` is inactive for every neuron.
    pub fn output_row(&self, c: usize, cell: &[(&[bool], OutputSign)]) -> Option<Vec<Rational>> {
        let k = cell.len();
        let mut row: Option<Vec<Rational>> = None;
        for (j, (mask, sign)) in cell.iter().enumerate() {
            if !mask[c] {
                continue;
            }
            let r = row.get_or_insert_with(|| vec![Rational::zero(); self.width(k)]);
            let off = j * (self.dim + 1);
            for (slot, v) in r[off..off + self.dim].iter_mut().zip(&self.coords[c]) {
                *slot = sign.apply(v.clone());
            }
            r[off + self.dim] = sign.apply(Rational::one());
        }
        row
    }

    pub fn network_from_params(&self, z: &[Rational], signs: &[OutputSign]) -> ReluNetwork {
        let neurons = signs
            .iter()
            .enumerate()
            .map(|(j, &a)| {
                let off = j * (self.dim + 1);
                Neuron { w: z[off..off + self.dim].to_vec(), b: z[off + self.dim].clone(), a }
            })
            .collect();
        ReluNetwork::new(neurons).expect("at least one neuron")
    }

    /// Network outputs at each distinct coordinate.
    pub fn coord_outputs(&self, net: &ReluNetwork) -> Vec<Rational> {
        self.coords.iter().map(|x| crate::model::eval_unchecked(net, x)).collect()
    }

    /// Whether `z` satisfies every weak partition row of the cell.
    pub fn respects_cell(&self, z: &[Rational], cell: &[(&[bool], OutputSign)]) -> bool {
        let d = self.dim;
        cell.iter().enumerate().all(|(j, (mask, _))| {
            let off = j * (d + 1);
            self.coords.iter().zip(mask.iter()).all(|(x, &plus)| {
                let pre = crate::linalg::dot(&z[off..off + d], x) + &z[off + d];
                if plus {
                    !pre.is_negative()
                } else {
                    !pre.is_positive()
                }
            })
        })
    }
}

/// Score of a candidate: an exact rational or a float for irrational losses.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Score {
    Exact(Rational),
    Approx(f64),
}

impl Score {
    pub fn to_f64(&self) -> f64 {
        match self {
            Score::Exact(v) => v.to_f64(),
            Score::Approx(v) => *v,
        }
    }

    /// Exact order between exact scores; otherwise equal within `EPS_CMP`.
    pub fn compare(&self, other: &Score) -> Ordering {
        match (self, other) {
            (Score::Exact(a), Score::Exact(b)) => a.cmp(b),
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                if (a - b).abs() <= EPS_CMP {
                    Ordering::Equal
                } else {
                    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
                }
            }
        }
    }
}

/// Per-point loss `|r|^p`, exact for integer `p`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PowerLoss {
    num: u32,
    den: u32,
    p: f64,
}

impl PowerLoss {
    pub fn new(p: &Rational) -> Result<Self> {
        if p.is_negative() {
            return Err(Error::UnsupportedLoss(format!("p = {p} must be nonnegative")));
        }
        let (num, den) = exponent_parts(p)?;
        Ok(Self { num, den, p: p.to_f64() })
    }

    pub fn is_exact(&self) -> bool {
        self.den == 1
    }

    pub fn zero(&self) -> Score {
        if self.is_exact() {
            Score::Exact(Rational::zero())
        } else {
            Score::Approx(0.0)
        }
    }

    /// `Σ mult_i |pred_i − y_i|^p` over the points.
    pub fn total(&self, prob: &Problem, coord_outputs: &[Rational]) -> Score {
        let residuals = prob.coord_of.iter().map(|&c| &coord_outputs[c]);
        self.sum(prob, residuals.zip(&prob.ys).map(|(pred, y)| pred - y))
    }

    pub fn sum(&self, prob: &Problem, residuals: impl Iterator<Item = Rational>) -> Score {
        if self.is_exact() {
            let mut acc = Rational::zero();
            for (r, m) in residuals.zip(&prob.mults) {
                if !r.is_zero() {
                    acc = acc.add_mul(&lp_term_exact(&r, self.num), m);
                }
            }
            Score::Exact(acc)
        } else {
            let mut acc = 0.0;
            for (r, m) in residuals.zip(&prob.mults) {
                acc += lp_term_f64(&r, self.p) * m.to_f64();
            }
            Score::Approx(acc)
        }
    }
}

/// Lower bound on any network's loss within a cell: points active for no
/// neuron predict 0, and points active only for same-signed neurons can only
/// be predicted on that side of zero.
pub(crate) fn cell_lower_bound(prob: &Problem, cell: &[(&[bool], OutputSign)], loss: &PowerLoss) -> Score {
    let residuals = prob.coord_of.iter().zip(&prob.ys).map(|(&c, y)| {
        let mut pos = false;
        let mut neg = false;
        for (mask, sign) in cell {
            if mask[c] {
                match sign {
                    OutputSign::Positive => pos = true,
                    OutputSign::Negative => neg = true,
                }
            }
        }
        match (pos, neg) {
            (false, false) => y.clone(),
            (true, false) if y.is_negative() => y.clone(),
            (false, true) if y.is_positive() => y.clone(),
            _ => Rational::zero(),
        }
    });
    loss.sum(prob, residuals)
}

/// Deduplicated, affinely reduced data ready for enumeration.
pub(crate) struct Prepared {
    pub problem: Problem,
    pub transform: AffineTransform,
    pub dichotomies: Vec<Dichotomy>,
    pub masks: Vec<Vec<bool>>,
}

pub(crate) fn prepare(data: &Dataset, cfg: &TrainConfig) -> Result<Prepared> {
    data.require_scalar_labels()?;
    let (reduced, transform) = affine_hull_reduce(&dedupe(data));
    if reduced.dim() > cfg.max_dim {
        return Err(Error::InvalidInput(format!(
            "affine dimension {} exceeds the configured limit {}",
            reduced.dim(),
            cfg.max_dim
        )));
    }
    let problem = Problem::from_dataset(&reduced)?;
    let dichotomies = enumerate_open_dichotomies_geometric(&problem.coords)?;
    let masks = dichotomies.iter().map(Dichotomy::mask).collect();
    Ok(Prepared { problem, transform, dichotomies, masks })
}

/// `C(n, r)` saturating at `u128::MAX`.
pub(crate) fn binomial(n: u128, r: u128) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Non-decreasing `k`-tuples over `m` items, in lexicographic order. Neurons
/// are interchangeable, so these cover every cell up to relabelling.
pub(crate) fn canonical_tuples(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn walk(from: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for u in from..m {
            cur.push(u);
            walk(u, m, k, cur, out);
            cur.pop();
        }
    }
    walk(0, m, k, &mut cur, &mut out);
    out
}

/// The cells of a `k`-neuron trainer: item `u` is dichotomy `u / 2` with sign
/// `+` when `u` is even.
pub(crate) fn cells(prep: &Prepared, k: usize, cfg: &TrainConfig) -> Result<Vec<Vec<usize>>> {
    let items = 2 * prep.dichotomies.len();
    let needed = binomial((items + k - 1) as u128, k as u128);
    if needed > cfg.cell_budget {
        return Err(Error::BudgetExceeded { what: "cell", needed, budget: cfg.cell_budget });
    }
    Ok(canonical_tuples(items, k))
}

pub(crate) fn item(prep: &Prepared, u: usize) -> (&[bool], OutputSign) {
    let sign = if u.is_multiple_of(2) { OutputSign::Positive } else { OutputSign::Negative };
    (&prep.masks[u / 2], sign)
}

pub(crate) fn cell_view<'a>(prep: &'a Prepared, tuple: &[usize]) -> Vec<(&'a [bool], OutputSign)> {
    tuple.iter().map(|&u| item(prep, u)).collect()
}

pub(crate) fn cell_spec(prep: &Prepared, tuple: &[usize]) -> SubproblemSpec {
    SubproblemSpec {
        neurons: tuple
            .iter()
            .map(|&u| CellNeuron {
                dichotomy: prep.dichotomies[u / 2].clone(),
                sign: if u % 2 == 0 { OutputSign::Positive } else { OutputSign::Negative },
            })
            .collect(),
    }
}

/// The cell each neuron of `net` falls into on the problem's coordinates.
pub(crate) fn spec_of_network(prob: &Problem, net: &ReluNetwork) -> SubproblemSpec {
    SubproblemSpec {
        neurons: net
            .neurons()
            .iter()
            .map(|n| {
                let mask: Vec<bool> = prob.coords.iter().map(|x| n.pre_activation(x).is_positive()).collect();
                CellNeuron { dichotomy: Dichotomy::from_mask(&mask), sign: n.a }
            })
            .collect(),
    }
}

pub(crate) struct CellSolution<C> {
    pub score: Score,
    pub candidate: C,
    pub lp_solves: u64,
    pub skipped: u64,
}

const CHUNK: usize = 32;

/// Solves cells in order of increasing lower bound, skipping cells whose
/// bound exceeds the incumbent. The incumbent only changes between
/// fixed-size chunks, so the set of solved cells and the winner (smallest
/// score, then smallest cell index) do not depend on the thread count.
pub(crate) fn branch_and_bound<C, F>(
    lower_bounds: &[Score],
    cfg: &TrainConfig,
    solve: F,
) -> (usize, CellSolution<C>, TrainStats)
where
    C: Send,
    F: Fn(usize) -> CellSolution<C> + Sync,
{
    let mut order: Vec<usize> = (0..lower_bounds.len()).collect();
    order.sort_by(|&a, &b| lower_bounds[a].compare(&lower_bounds[b]).then(a.cmp(&b)));
    let pool = cfg.pool();
    let mut stats = TrainStats::default();
    let mut best: Option<(usize, CellSolution<C>)> = None;
    for chunk in order.chunks(CHUNK) {
        let live: Vec<usize> = chunk
            .iter()
            .copied()
            .filter(|&i| match &best {
                Some((_, b)) => lower_bounds[i].compare(&b.score) != Ordering::Greater,
                None => true,
            })
            .collect();
        if live.is_empty() {
            // bounds are sorted, so every later chunk is pruned too
            break;
        }
        let solved: Vec<(usize, CellSolution<C>)> = pool.install(|| live.par_iter().map(|&i| (i, solve(i))).collect());
        for (i, sol) in solved {
            stats.subproblems += 1;
            stats.lp_solves += sol.lp_solves;
            stats.skipped_singular += sol.skipped;
            let better = match &best {
                None => true,
                Some((bi, b)) => match sol.score.compare(&b.score) {
                    Ordering::Less => true,
                    Ordering::Equal => i < *bi,
                    Ordering::Greater => false,
                },
            };
            if better {
                best = Some((i, sol));
            }
        }
    }
    let (i, sol) = best.expect("at least one cell");
    (i, sol, stats)
}

/// Lifts the reduced-space winner and re-evaluates it on the original data.
pub(crate) fn finish(
    data: &Dataset,
    prep_transform: &AffineTransform,
    reduced_net: &ReluNetwork,
    certificate: SubproblemSpec,
    loss: &LossSpec,
    stats: TrainStats,
    cfg: &TrainConfig,
) -> Result<TrainResult> {
    let network = lift_network(prep_transform, reduced_net)?;
    let loss = loss_value_with_precision(&network, data, loss, cfg.precision_bits)?;
    Ok(TrainResult { network, loss, certificate, stats })
}
