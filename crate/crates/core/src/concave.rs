//! Globally optimal training under concave losses `|r|^p`, `0 ≤ p ≤ 1`.
//!
//! Within a cell the loss is concave on every region where the residual signs
//! are fixed, and those regions are pointed polyhedra, so some vertex is
//! optimal. Vertices are solutions of `kd + k` independent equations drawn
//! from the partition rows (`pre-activation = 0`) and the fit rows
//! (`prediction = label`); every such solution that lies in the cell is a
//! candidate.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::cells::{
    binomial, branch_and_bound, cell_lower_bound, cell_spec, cell_view, cells, finish, prepare, spec_of_network,
    CellSolution, PowerLoss, Problem, Score, SubproblemSpec, TrainResult, TrainStats,
};
use crate::config::TrainConfig;
use crate::convex::spec_masks;
use crate::dichotomy::{affine_bases, lagrange_table};
use crate::error::{Error, Result};
use crate::linalg::{rank, IncrementalSystem};
use crate::model::{loss_value_with_precision, Dataset, LossSpec, LossValue, OutputSign, ReluNetwork};
use crate::rational::Rational;

type Cell<'a> = [(&'a [bool], OutputSign)];

fn check_p(p: &Rational) -> Result<()> {
    if p.is_negative() || *p > Rational::one() {
        return Err(Error::UnsupportedLoss(format!("the concave trainer needs 0 <= p <= 1, got {p}")));
    }
    Ok(())
}

pub fn train_concave(data: &Dataset, k: usize, p: &Rational) -> Result<TrainResult> {
    train_concave_with(data, k, p, &TrainConfig::default())
}

/// Uses [`train_concave_arrangement`] for a single neuron and
/// [`train_concave_cells`] otherwise.
pub fn train_concave_with(data: &Dataset, k: usize, p: &Rational, cfg: &TrainConfig) -> Result<TrainResult> {
    if k == 1 {
        train_concave_arrangement(data, p, cfg)
    } else {
        train_concave_cells(data, k, p, cfg)
    }
}

/// Cell-by-cell driver: every dichotomy tuple and sign vector, with the
/// vertex enumeration of [`solve_subproblem_concave`] inside each cell.
pub fn train_concave_cells(data: &Dataset, k: usize, p: &Rational, cfg: &TrainConfig) -> Result<TrainResult> {
    check_p(p)?;
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let prep = prepare(data, cfg)?;
    let tuples = cells(&prep, k, cfg)?;
    let prob = &prep.problem;
    let pool = (k * prob.n_coords() + prob.n_points()) as u128;
    let needed = binomial(pool, prob.width(k) as u128).saturating_mul(tuples.len() as u128);
    if needed > cfg.subset_budget {
        return Err(Error::BudgetExceeded { what: "equation subset", needed, budget: cfg.subset_budget });
    }
    let loss = PowerLoss::new(p)?;
    let bounds: Vec<Score> = tuples.iter().map(|t| cell_lower_bound(prob, &cell_view(&prep, t), &loss)).collect();
    let (winner, sol, stats) = branch_and_bound(&bounds, cfg, |i| {
        let cell = cell_view(&prep, &tuples[i]);
        let (z, score, _, skipped) = vertex_candidates(prob, &cell, &loss);
        CellSolution { score, candidate: z, lp_solves: 0, skipped }
    });
    let signs: Vec<OutputSign> = cell_view(&prep, &tuples[winner]).iter().map(|c| c.1).collect();
    let net = prob.network_from_params(&sol.candidate, &signs);
    finish(data, &prep.transform, &net, cell_spec(&prep, &tuples[winner]), &LossSpec::Lp(p.clone()), stats, cfg)
}

/// Best vertex candidate of one cell. Dichotomy indices refer to the distinct
/// coordinates of `data`, which must span its space for completeness. Also
/// returns the number of equation subsets tried.
pub fn solve_subproblem_concave(
    spec: &SubproblemSpec,
    data: &Dataset,
    p: &Rational,
) -> Result<(ReluNetwork, LossValue, u64)> {
    check_p(p)?;
    let prob = Problem::from_dataset(data)?;
    let masks = spec_masks(spec, &prob)?;
    let cell: Vec<(&[bool], OutputSign)> = masks.iter().map(|(m, s)| (&m[..], *s)).collect();
    let loss = PowerLoss::new(p)?;
    let (z, _, tried, _) = vertex_candidates(&prob, &cell, &loss);
    let signs: Vec<OutputSign> = spec.neurons.iter().map(|n| n.sign).collect();
    let net = prob.network_from_params(&z, &signs);
    let value = loss_value_with_precision(&net, data, &LossSpec::Lp(p.clone()), TrainConfig::default().precision_bits)?;
    Ok((net, value, tried))
}

/// Depth-first walk over independent `(kd+k)`-subsets of the pooled
/// equations. Returns the best feasible solution (zero if none), its score,
/// the number of full subsets reached and the number of dependent prefixes cut.
fn vertex_candidates(prob: &Problem, cell: &Cell, loss: &PowerLoss) -> (Vec<Rational>, Score, u64, u64) {
    let k = cell.len();
    let nz = prob.width(k);
    let mut pool: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for j in 0..k {
        for c in 0..prob.n_coords() {
            pool.push((prob.partition_row(c, j, k), Rational::zero()));
        }
    }
    for i in 0..prob.n_points() {
        if let Some(row) = prob.output_row(prob.coord_of[i], cell) {
            let eq = (row, prob.ys[i].clone());
            if !pool.contains(&eq) {
                pool.push(eq);
            }
        }
    }
    let signs: Vec<OutputSign> = cell.iter().map(|c| c.1).collect();
    let evaluate = |z: &[Rational]| loss.total(prob, &prob.coord_outputs(&prob.network_from_params(z, &signs)));
    let zero = vec![Rational::zero(); nz];
    let mut best = (evaluate(&zero), zero);
    let mut tried = 0u64;
    let mut cut = 0u64;

    struct Walk<'a> {
        pool: &'a [(Vec<Rational>, Rational)],
        sys: IncrementalSystem,
    }
    fn walk(
        w: &mut Walk,
        start: usize,
        visit: &mut dyn FnMut(Vec<Rational>),
        tried: &mut u64,
        cut: &mut u64,
    ) {
        if w.sys.is_full_rank() {
            *tried += 1;
            visit(w.sys.solve().expect("full rank"));
            return;
        }
        let missing = w.pool[0].0.len() - w.sys.len();
        for i in start..w.pool.len() {
            if w.pool.len() - i < missing {
                break;
            }
            let (row, rhs) = &w.pool[i];
            if w.sys.push(row, rhs) {
                walk(w, i + 1, visit, tried, cut);
                w.sys.pop();
            } else {
                *cut += 1;
            }
        }
    }
    let mut w = Walk { pool: &pool, sys: IncrementalSystem::new(nz) };
    let mut visit = |z: Vec<Rational>| {
        if prob.respects_cell(&z, cell) {
            let s = evaluate(&z);
            if s.compare(&best.0) == Ordering::Less {
                best = (s, z);
            }
        }
    };
    walk(&mut w, 0, &mut visit, &mut tried, &mut cut);
    (best.1, best.0, tried, cut)
}

/// Single-neuron driver over the whole arrangement at once.
///
/// A vertex of any cell is pinned by `d + 1` tight equations at affinely
/// independent points `T`, each forcing the pre-activation at its point to
/// `0` or to `a·y`. Such a pre-activation is `Σ_t u_t ℓ_t` with `ℓ_t` the
/// Lagrange basis of `T`, so every cell's candidates are visited by looping
/// over bases `T`, signs `a` and values `u_t`, with no per-cell repetition.
pub fn train_concave_arrangement(data: &Dataset, p: &Rational, cfg: &TrainConfig) -> Result<TrainResult> {
    check_p(p)?;
    let prep = prepare(data, cfg)?;
    let prob = &prep.problem;
    let loss = PowerLoss::new(p)?;
    let bases = affine_bases(&prob.coords);

    let options: Vec<[Vec<Vec<Rational>>; 2]> = bases
        .iter()
        .map(|basis| {
            OutputSign::BOTH.map(|a| {
                basis
                    .iter()
                    .map(|&c| {
                        let mut vals = vec![Rational::zero()];
                        for i in (0..prob.n_points()).filter(|&i| prob.coord_of[i] == c) {
                            vals.push(a.apply(prob.ys[i].clone()));
                        }
                        vals.sort();
                        vals.dedup();
                        vals
                    })
                    .collect()
            })
        })
        .collect();
    let needed = options
        .iter()
        .flat_map(|o| o.iter())
        .map(|per_t| per_t.iter().fold(1u128, |acc, v| acc.saturating_mul(v.len() as u128)))
        .fold(0u128, u128::saturating_add);
    if needed > cfg.subset_budget {
        return Err(Error::BudgetExceeded { what: "vertex candidate", needed, budget: cfg.subset_budget });
    }

    let per_basis: Vec<(Score, usize, Vec<Rational>)> = cfg.pool().install(|| {
        bases
            .par_iter()
            .zip(options.par_iter())
            .map(|(basis, opts)| best_in_basis(prob, basis, opts, &loss))
            .collect()
    });
    let mut best: Option<(Score, usize, Vec<Rational>)> = None;
    for cand in per_basis {
        if best.as_ref().is_none_or(|b| cand.0.compare(&b.0) == Ordering::Less) {
            best = Some(cand);
        }
    }
    let (_, sign_index, z) = best.unwrap_or_else(|| (loss.zero(), 0, vec![Rational::zero(); prob.dim + 1]));
    let net = prob.network_from_params(&z, &[OutputSign::BOTH[sign_index]]);
    let stats = TrainStats { subproblems: needed as u64, lp_solves: 0, skipped_singular: 0 };
    let certificate = spec_of_network(prob, &net);
    finish(data, &prep.transform, &net, certificate, &LossSpec::Lp(p.clone()), stats, cfg)
}

fn best_in_basis(prob: &Problem, basis: &[usize], opts: &[Vec<Vec<Rational>>; 2], loss: &PowerLoss) -> (Score, usize, Vec<Rational>) {
    let table = lagrange_table(&prob.coords, basis);
    let m = basis.len();
    let mut best: Option<(Score, usize, Vec<usize>)> = None;
    let mut g = vec![Rational::zero(); prob.n_coords()];
    for (s, sign) in OutputSign::BOTH.into_iter().enumerate() {
        let choice = &opts[s];
        let mut digits = vec![0usize; m];
        loop {
            for (c, gc) in g.iter_mut().enumerate() {
                let mut acc = Rational::zero();
                for (t, &dg) in digits.iter().enumerate() {
                    let u = &choice[t][dg];
                    if !u.is_zero() {
                        acc = acc.add_mul(u, &table.values[c][t]);
                    }
                }
                *gc = if acc.is_positive() { sign.apply(acc) } else { Rational::zero() };
            }
            let score = loss.total(prob, &g);
            if best.as_ref().is_none_or(|b| score.compare(&b.0) == Ordering::Less) {
                best = Some((score, s, digits.clone()));
            }
            // next mixed-radix assignment
            let mut t = 0;
            while t < m {
                digits[t] += 1;
                if digits[t] < choice[t].len() {
                    break;
                }
                digits[t] = 0;
                t += 1;
            }
            if t == m {
                break;
            }
        }
    }
    let (score, s, digits) = best.expect("at least one assignment");
    let mut z = vec![Rational::zero(); prob.dim + 1];
    for (t, &dg) in digits.iter().enumerate() {
        let u = &opts[s][t][dg];
        for (zi, ci) in z.iter_mut().zip(&table.coeffs[t]) {
            *zi = zi.add_mul(u, ci);
        }
    }
    (score, s, z)
}

/// Witness that the cell polyhedra are pointed: `d + 1` affinely independent
/// distinct points whose partition rows have rank `kd + k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pointedness {
    pub pointed: bool,
    /// Indices into the distinct coordinates of the data.
    pub witness: Vec<usize>,
}

pub fn verify_pointedness(data: &Dataset, k: usize) -> Result<Pointedness> {
    let prob = Problem::from_dataset(data).or_else(|_| Problem::from_dataset(&scalarized(data)))?;
    let d = prob.dim;
    let mut sys = IncrementalSystem::new(d + 1);
    let mut witness = Vec::new();
    for (c, x) in prob.coords.iter().enumerate() {
        let mut row = x.clone();
        row.push(Rational::one());
        if sys.push(&row, &Rational::zero()) {
            witness.push(c);
        }
        if sys.is_full_rank() {
            break;
        }
    }
    let rows: Vec<Vec<Rational>> =
        (0..k).flat_map(|j| witness.iter().map(move |&c| (c, j))).map(|(c, j)| prob.partition_row(c, j, k)).collect();
    let pointed = witness.len() == d + 1 && rank(&rows) == prob.width(k);
    Ok(Pointedness { pointed, witness })
}

fn scalarized(data: &Dataset) -> Dataset {
    Dataset::from_pairs(data.dim(), data.points().iter().map(|p| (p.x.clone(), p.label.bounds().0.clone())))
        .expect("same shape")
}
