//! Single-ReLU minimisation of the maximum distance to target intervals, by
//! binary search over a ladder of linear programs.

use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpOutcome, Sense};
use crate::model::{Dataset, OutputSign, ReluNetwork};
use crate::rational::Rational;

/// The distinct positive lower interval ends `α̃_1 < … < α̃_r`, with
/// `α̃_0 = 0` and `α̃_{r+1} = ∞` implied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdLadder {
    values: Vec<Rational>,
}

impl ThresholdLadder {
    pub fn from_data(data: &Dataset) -> Self {
        let mut values: Vec<Rational> =
            data.points().iter().map(|p| p.label.bounds().0.clone()).filter(Rational::is_positive).collect();
        values.sort();
        values.dedup();
        Self { values }
    }

    pub fn r(&self) -> usize {
        self.values.len()
    }

    /// `α̃_s` for `s ∈ 0..=r`; `None` stands for `α̃_{r+1} = ∞`.
    pub fn get(&self, s: usize) -> Option<Rational> {
        match s {
            0 => Some(Rational::zero()),
            s if s <= self.values.len() => Some(self.values[s - 1].clone()),
            _ => None,
        }
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }
}

/// `LP(s)` over `(w, b, γ)`: minimise `γ ≥ 0` subject to
/// `⟨w,x_i⟩ + b ≥ α_i − γ` when `α_i ≥ α̃_s`, `⟨w,x_i⟩ + b ≤ β_i + γ` and
/// `γ ≥ −β_i` for all `i`.
pub fn build_lp_s(data: &Dataset, s: usize) -> Result<LinearProgram> {
    let ladder = ThresholdLadder::from_data(data);
    if s == 0 || s > ladder.r() + 1 {
        return Err(Error::InvalidInput(format!("s = {s} outside 1..={}", ladder.r() + 1)));
    }
    Ok(lp_for(data, ladder.get(s).as_ref()))
}

fn lp_for(data: &Dataset, threshold: Option<&Rational>) -> LinearProgram {
    let d = data.dim();
    let g = d + 1;
    let mut lp = LinearProgram::new(d + 2);
    let mut objective = vec![Rational::zero(); d + 2];
    objective[g] = Rational::one();
    lp.minimize(objective);
    lp.set_lower(g, Rational::zero());
    for p in data.points() {
        let (alpha, beta) = p.label.bounds();
        let mut row = p.x.clone();
        row.push(Rational::one());
        row.push(Rational::zero());
        if threshold.is_some_and(|t| alpha >= t) {
            let mut lower = row.clone();
            lower[g] = Rational::one();
            lp.add_row(lower, Sense::Ge, alpha.clone());
        }
        row[g] = -Rational::one();
        lp.add_row(row, Sense::Le, beta.clone());
        let mut floor = vec![Rational::zero(); d + 2];
        floor[g] = Rational::one();
        lp.add_row(floor, Sense::Ge, -beta);
    }
    lp
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinfResult {
    pub w: Vec<Rational>,
    pub b: Rational,
    pub gamma_star: Rational,
    /// Index with `α̃_{s−1} ≤ γ* < α̃_s`.
    pub s_star: usize,
    pub lp_solves: u64,
}

impl LinfResult {
    pub fn network(&self) -> ReluNetwork {
        ReluNetwork::single(self.w.clone(), self.b.clone(), OutputSign::Positive)
    }
}

fn solve_gamma(data: &Dataset, threshold: Option<&Rational>) -> (Rational, Vec<Rational>) {
    match solve_lp(&lp_for(data, threshold)) {
        LpOutcome::Optimal { point, objective_value } => (objective_value, point),
        other => unreachable!("LP(s) is feasible and bounded below, got {:?}", other.status()),
    }
}

/// Exact minimum of `max_i dist_{α_i,β_i}([⟨w,x_i⟩ + b]₊)` over `(w, b)`.
///
/// With `γ(s)` the value of `LP(s)`, the optimum is `min_s max(γ(s), α̃_{s−1})`
/// and is attained at the smallest `s` with `γ(s) < α̃_s`. `γ` is
/// non-increasing in `s` while `α̃_s` increases, so that `s` is found by
/// binary search; `s = r + 1` always qualifies and needs no solve to know it.
pub fn train_linf_interval(data: &Dataset) -> Result<LinfResult> {
    let data = if data.has_scalar_labels() { data.to_interval_labels() } else { data.clone() };
    let ladder = ThresholdLadder::from_data(&data);
    let r = ladder.r();
    let mut solves = 0u64;
    let mut cache: Vec<Option<(Rational, Vec<Rational>)>> = vec![None; r + 2];
    let mut gamma = |s: usize, cache: &mut Vec<Option<(Rational, Vec<Rational>)>>| -> (Rational, Vec<Rational>) {
        if cache[s].is_none() {
            solves += 1;
            cache[s] = Some(solve_gamma(&data, ladder.get(s).as_ref()));
        }
        cache[s].clone().expect("just filled")
    };
    let (mut lo, mut hi) = (1usize, r + 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        let alpha = ladder.get(mid).expect("mid ≤ r");
        if gamma(mid, &mut cache).0 < alpha {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let s = lo;
    let (g, point) = gamma(s, &mut cache);
    let floor = ladder.get(s - 1).expect("s ≥ 1");
    let d = data.dim();
    Ok(LinfResult {
        w: point[..d].to_vec(),
        b: point[d].clone(),
        gamma_star: Rational::max_of(&g, &floor),
        s_star: s,
        lp_solves: solves,
    })
}

/// `min_s max(γ(s), α̃_{s−1})` by solving every `LP(s)`. Returns the value and
/// the smallest `s` with `α̃_{s−1} ≤ γ* < α̃_s`.
pub fn linf_full_sweep(data: &Dataset) -> (Rational, usize) {
    let data = if data.has_scalar_labels() { data.to_interval_labels() } else { data.clone() };
    let ladder = ThresholdLadder::from_data(&data);
    let values: Vec<Rational> = (1..=ladder.r() + 1)
        .map(|s| Rational::max_of(&solve_gamma(&data, ladder.get(s).as_ref()).0, &ladder.get(s - 1).expect("s ≥ 1")))
        .collect();
    let best = values.iter().min().expect("r + 1 ≥ 1").clone();
    let s = (1..=ladder.r() + 1)
        .find(|&s| values[s - 1] == best && ladder.get(s).is_none_or(|top| best < top))
        .expect("the optimum lies on some rung");
    (best, s)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Realizability {
    pub realizable: bool,
    /// `(w, b)` fitting every interval, when realizable.
    pub witness: Option<(Vec<Rational>, Rational)>,
}

/// Zero-error feasibility by a single `LP(1)`.
pub fn check_realizable(data: &Dataset) -> Result<Realizability> {
    let data = if data.has_scalar_labels() { data.to_interval_labels() } else { data.clone() };
    let ladder = ThresholdLadder::from_data(&data);
    let (g, point) = solve_gamma(&data, ladder.get(1).as_ref());
    let d = data.dim();
    Ok(if g.is_zero() {
        Realizability { realizable: true, witness: Some((point[..d].to_vec(), point[d].clone())) }
    } else {
        Realizability { realizable: false, witness: None }
    })
}
