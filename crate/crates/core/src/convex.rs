//! Globally optimal training under the convex losses ℓ¹ (one LP per cell)
//! and ℓ² (exact active-set enumeration per cell).

use crate::cells::{
    branch_and_bound, cell_lower_bound, cell_spec, cell_view, cells, finish, prepare, CellSolution, PowerLoss,
    Problem, Score, SubproblemSpec, TrainResult,
};
use crate::config::TrainConfig;
use crate::dichotomy::Dichotomy;
use crate::error::{Error, Result};
use crate::linalg::{solve_square_system, IncrementalSystem};
use crate::lp::{solve_lp, LinearProgram, Sense};
use crate::model::{Dataset, LossSpec, OutputSign, ReluNetwork};
use crate::rational::Rational;

type Cell<'a> = [(&'a [bool], OutputSign)];

pub fn train_l1(data: &Dataset, k: usize) -> Result<TrainResult> {
    train_l1_with(data, k, &TrainConfig::default())
}

pub fn train_l1_with(data: &Dataset, k: usize, cfg: &TrainConfig) -> Result<TrainResult> {
    check_k(k)?;
    let prep = prepare(data, cfg)?;
    let tuples = cells(&prep, k, cfg)?;
    let loss = PowerLoss::new(&Rational::one())?;
    let prob = &prep.problem;
    let bounds: Vec<Score> = tuples.iter().map(|t| cell_lower_bound(prob, &cell_view(&prep, t), &loss)).collect();
    let (winner, sol, stats) = branch_and_bound(&bounds, cfg, |i| {
        let cell = cell_view(&prep, &tuples[i]);
        let (z, value) = l1_cell(prob, &cell);
        CellSolution { score: Score::Exact(value), candidate: z, lp_solves: 1, skipped: 0 }
    });
    let signs: Vec<OutputSign> = cell_view(&prep, &tuples[winner]).iter().map(|c| c.1).collect();
    let net = prob.network_from_params(&sol.candidate, &signs);
    finish(data, &prep.transform, &net, cell_spec(&prep, &tuples[winner]), &LossSpec::Lp(Rational::one()), stats, cfg)
}

pub fn train_l2(data: &Dataset, k: usize) -> Result<TrainResult> {
    train_l2_with(data, k, &TrainConfig::default())
}

pub fn train_l2_with(data: &Dataset, k: usize, cfg: &TrainConfig) -> Result<TrainResult> {
    check_k(k)?;
    let prep = prepare(data, cfg)?;
    let tuples = cells(&prep, k, cfg)?;
    let prob = &prep.problem;
    let nz = prob.width(k) as u128;
    let rows = (k * prob.n_coords()) as u128;
    let per_cell: u128 = (0..=nz).map(|r| crate::cells::binomial(rows, r)).fold(0u128, u128::saturating_add);
    let needed = per_cell.saturating_mul(tuples.len() as u128);
    if needed > cfg.subset_budget {
        return Err(Error::BudgetExceeded { what: "active-set", needed, budget: cfg.subset_budget });
    }
    let loss = PowerLoss::new(&Rational::from(2i64))?;
    let bounds: Vec<Score> = tuples.iter().map(|t| cell_lower_bound(prob, &cell_view(&prep, t), &loss)).collect();
    let (winner, sol, stats) = branch_and_bound(&bounds, cfg, |i| {
        let cell = cell_view(&prep, &tuples[i]);
        let (z, value, skipped) = l2_cell(prob, &cell);
        CellSolution { score: Score::Exact(value), candidate: z, lp_solves: 0, skipped }
    });
    let signs: Vec<OutputSign> = cell_view(&prep, &tuples[winner]).iter().map(|c| c.1).collect();
    let net = prob.network_from_params(&sol.candidate, &signs);
    finish(data, &prep.transform, &net, cell_spec(&prep, &tuples[winner]), &LossSpec::Lp(Rational::from(2i64)), stats, cfg)
}

/// Optimal ℓ¹ loss over one cell, together with a network attaining it.
/// Dichotomy indices refer to the distinct coordinates of `data` in order of
/// first occurrence.
pub fn solve_subproblem_l1(spec: &SubproblemSpec, data: &Dataset) -> Result<(ReluNetwork, Rational)> {
    let prob = Problem::from_dataset(data)?;
    let masks = spec_masks(spec, &prob)?;
    let cell: Vec<(&[bool], OutputSign)> = masks.iter().map(|(m, s)| (&m[..], *s)).collect();
    let (z, value) = l1_cell(&prob, &cell);
    let signs: Vec<OutputSign> = spec.neurons.iter().map(|n| n.sign).collect();
    Ok((prob.network_from_params(&z, &signs), value))
}

pub(crate) fn spec_masks(spec: &SubproblemSpec, prob: &Problem) -> Result<Vec<(Vec<bool>, OutputSign)>> {
    check_k(spec.k())?;
    spec.neurons
        .iter()
        .map(|n| {
            if n.dichotomy.len() != prob.n_coords() {
                return Err(Error::InvalidInput(format!(
                    "dichotomy covers {} points but the data has {} distinct points",
                    n.dichotomy.len(),
                    prob.n_coords()
                )));
            }
            Ok((Dichotomy::mask(&n.dichotomy), n.sign))
        })
        .collect()
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    Ok(())
}

fn add_partition_rows(lp: &mut LinearProgram, prob: &Problem, cell: &Cell, extra: usize) {
    let k = cell.len();
    for (j, (mask, _)) in cell.iter().enumerate() {
        for (c, &plus) in mask.iter().enumerate() {
            let mut row = prob.partition_row(c, j, k);
            row.resize(row.len() + extra, Rational::zero());
            let sense = if plus { Sense::Ge } else { Sense::Le };
            lp.add_row(row, sense, Rational::zero());
        }
    }
}

/// Cell LP: parameters `z` free, one pair of deviation variables per point
/// the cell can reach; points reached by no neuron contribute `mult·|y|`.
fn l1_cell(prob: &Problem, cell: &Cell) -> (Vec<Rational>, Rational) {
    let nz = prob.width(cell.len());
    let rows: Vec<Option<Vec<Rational>>> = (0..prob.n_coords()).map(|c| prob.output_row(c, cell)).collect();
    let active: Vec<usize> = (0..prob.n_points()).filter(|&i| rows[prob.coord_of[i]].is_some()).collect();
    let extra = 2 * active.len();
    let mut constant = Rational::zero();
    for i in 0..prob.n_points() {
        if rows[prob.coord_of[i]].is_none() {
            constant = constant.add_mul(&prob.mults[i], &prob.ys[i].abs());
        }
    }
    let mut lp = LinearProgram::new(nz + extra);
    let mut objective = vec![Rational::zero(); nz + extra];
    for (a, &i) in active.iter().enumerate() {
        let (plus, minus) = (nz + 2 * a, nz + 2 * a + 1);
        let mut row = rows[prob.coord_of[i]].clone().expect("active point");
        row.resize(nz + extra, Rational::zero());
        row[plus] = -Rational::one();
        row[minus] = Rational::one();
        lp.add_row(row, Sense::Eq, prob.ys[i].clone());
        lp.set_lower(plus, Rational::zero());
        lp.set_lower(minus, Rational::zero());
        objective[plus] = prob.mults[i].clone();
        objective[minus] = prob.mults[i].clone();
    }
    add_partition_rows(&mut lp, prob, cell, extra);
    lp.minimize(objective);
    let outcome = solve_lp(&lp);
    let point = outcome.point().expect("the zero vector is feasible and the objective is bounded below");
    let value = outcome.objective_value().expect("optimal") + &constant;
    (point[..nz].to_vec(), value)
}

/// Minimises `Σ mult·(φ_i·z − y_i)²` over the cell by trying every linearly
/// independent set `A` of at most `dim z` partition rows as the active set:
/// the stationarity system `[Q Aᵀ; A 0]` is solved exactly and kept when the
/// solution lies in the cell. Singular systems are skipped and counted.
fn l2_cell(prob: &Problem, cell: &Cell) -> (Vec<Rational>, Rational, u64) {
    let k = cell.len();
    let nz = prob.width(k);
    let rows: Vec<Option<Vec<Rational>>> = (0..prob.n_coords()).map(|c| prob.output_row(c, cell)).collect();
    let mut q = vec![vec![Rational::zero(); nz]; nz];
    let mut lin = vec![Rational::zero(); nz];
    for i in 0..prob.n_points() {
        let Some(phi) = &rows[prob.coord_of[i]] else { continue };
        let m = &prob.mults[i];
        let my = m * &prob.ys[i];
        for (a, pa) in phi.iter().enumerate() {
            if pa.is_zero() {
                continue;
            }
            lin[a] = lin[a].add_mul(&my, pa);
            let mpa = m * pa;
            for (b, pb) in phi.iter().enumerate() {
                if !pb.is_zero() {
                    q[a][b] = q[a][b].add_mul(&mpa, pb);
                }
            }
        }
    }
    let partition: Vec<Vec<Rational>> = (0..k)
        .flat_map(|j| (0..prob.n_coords()).map(move |c| (c, j)))
        .map(|(c, j)| prob.partition_row(c, j, k))
        .collect();

    let objective = |z: &[Rational]| -> Rational {
        let net = prob.network_from_params(z, &cell.iter().map(|c| c.1).collect::<Vec<_>>());
        match PowerLoss::new(&Rational::from(2i64)).expect("p = 2").total(prob, &prob.coord_outputs(&net)) {
            Score::Exact(v) => v,
            Score::Approx(_) => unreachable!("integer exponent"),
        }
    };

    let mut best: Option<(Rational, Vec<Rational>)> = None;
    let mut skipped = 0u64;
    let mut chosen: Vec<usize> = Vec::new();
    let mut sys = IncrementalSystem::new(nz);
    let mut stack: Vec<usize> = vec![0];
    // iterative depth-first walk over independent row subsets in lexicographic order
    loop {
        // evaluate the current subset
        let m = chosen.len();
        let size = nz + m;
        let mut kkt = vec![vec![Rational::zero(); size]; size];
        for a in 0..nz {
            kkt[a][..nz].clone_from_slice(&q[a]);
        }
        for (r, &ri) in chosen.iter().enumerate() {
            for a in 0..nz {
                kkt[nz + r][a] = partition[ri][a].clone();
                kkt[a][nz + r] = partition[ri][a].clone();
            }
        }
        let mut rhs = lin.clone();
        rhs.resize(size, Rational::zero());
        match solve_square_system(&kkt, &rhs) {
            None => skipped += 1,
            Some(sol) => {
                let z = &sol[..nz];
                if prob.respects_cell(z, cell) {
                    let v = objective(z);
                    if best.as_ref().is_none_or(|(b, _)| v < *b) {
                        best = Some((v, z.to_vec()));
                    }
                }
            }
        }
        // advance to the next subset
        loop {
            let Some(next) = stack.last_mut() else {
                let (v, z) = best.unwrap_or_else(|| {
                    let z = vec![Rational::zero(); nz];
                    (objective(&z), z)
                });
                return (z, v, skipped);
            };
            if *next >= partition.len() || chosen.len() == nz {
                stack.pop();
                if chosen.pop().is_some() {
                    sys.pop();
                }
                continue;
            }
            let r = *next;
            *next += 1;
            if sys.push(&partition[r], &Rational::zero()) {
                chosen.push(r);
                stack.push(r + 1);
                break;
            }
        }
    }
}
