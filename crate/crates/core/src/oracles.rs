//! Slow, independent reference solvers. They share the core types and the LP
//! solver with the trainers but none of the enumeration code.

use std::cmp::Ordering;

use crate::dichotomy::Dichotomy;
use crate::error::{Error, Result};
use crate::linalg::solve_square_system;
use crate::lp::{solve_lp, LinearProgram, LpOutcome, Sense};
use crate::model::{loss_value_with_precision, Dataset, LossSpec, LossValue, Neuron, OutputSign, ReluNetwork};
use crate::rational::Rational;

const ORACLE_DICHOTOMY_LIMIT: usize = 14;

/// Every plus-set tested with the max-margin LP `max t` subject to
/// `⟨w,x_i⟩ + b ≥ t` on the plus-set, `≤ 0` elsewhere and `t ≤ 1`; the set is
/// open exactly when the optimum is positive.
pub fn oracle_dichotomies(points: &[Vec<Rational>]) -> Result<Vec<Dichotomy>> {
    let n = points.len();
    if n > ORACLE_DICHOTOMY_LIMIT {
        return Err(Error::BudgetExceeded {
            what: "oracle dichotomy",
            needed: n as u128,
            budget: ORACLE_DICHOTOMY_LIMIT as u128,
        });
    }
    let d = points.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    for bits in 0u32..(1u32 << n) {
        let mut lp = LinearProgram::new(d + 2);
        let t = d + 1;
        let mut objective = vec![Rational::zero(); d + 2];
        objective[t] = Rational::one();
        lp.maximize(objective);
        lp.set_upper(t, Rational::one());
        for (i, x) in points.iter().enumerate() {
            let mut row = x.clone();
            row.push(Rational::one());
            row.push(Rational::zero());
            if bits >> i & 1 == 1 {
                row[t] = -Rational::one();
                lp.add_row(row, Sense::Ge, Rational::zero());
            } else {
                lp.add_row(row, Sense::Le, Rational::zero());
            }
        }
        if let LpOutcome::Optimal { objective_value, .. } = solve_lp(&lp) {
            if objective_value.is_positive() {
                out.push(Dichotomy::from_plus(n, (0..n).filter(|i| bits >> i & 1 == 1))?);
            }
        }
    }
    out.sort();
    Ok(out)
}

enum Kind {
    Concave,
    Square,
    Chebyshev,
}

/// Optimal single-ReLU loss on 1-D data by sweeping breakpoint pieces.
///
/// After sorting the distinct inputs, a ramp is active on a suffix (rising)
/// or a prefix (falling) of them. On each piece the pre-activation is
/// `α·r₁ + β·r₂` for the two extreme rays of the piece's cone and
/// `α, β ≥ 0`; the loss is then minimised over the quadrant in closed form:
/// arrangement vertices for `p ≤ 1`, least squares on the interior and the
/// axes for `p = 2`, and vertices of the epigraph for the interval loss.
pub fn oracle_train_1d(data: &Dataset, loss: &LossSpec) -> Result<LossValue> {
    if data.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: data.dim() });
    }
    let kind = match loss {
        LossSpec::Lp(p) if *p <= Rational::one() => Kind::Concave,
        LossSpec::Lp(p) if *p == Rational::from(2i64) => Kind::Square,
        LossSpec::Lp(p) => return Err(Error::UnsupportedLoss(format!("oracle supports p <= 1 and p = 2, not {p}"))),
        LossSpec::LinfInterval => Kind::Chebyshev,
    };
    let mut xs: Vec<Rational> = data.points().iter().map(|p| p.x[0].clone()).collect();
    xs.sort();
    xs.dedup();
    let m = xs.len();
    let bits = 128;
    let signs: &[OutputSign] = match kind {
        Kind::Chebyshev => &[OutputSign::Positive],
        _ => &OutputSign::BOTH,
    };

    let mut best = loss_value_with_precision(&ReluNetwork::zero(1, 1), data, loss, bits)?;
    let mut consider = |net: ReluNetwork| -> Result<()> {
        let v = loss_value_with_precision(&net, data, loss, bits)?;
        if v.approx_cmp(&best) == Ordering::Less {
            best = v;
        }
        Ok(())
    };

    // (anchor, rising, second ray slope-offset): pre(x) = u·s(x) + v with
    // s(x) = x − anchor (rising) or anchor − x (falling), u, v ≥ 0, and the
    // second ray (1, gap) when a neighbour must stay inactive.
    for rising in [true, false] {
        for j in 0..m {
            let anchor = &xs[j];
            let neighbour = if rising { j.checked_sub(1).map(|i| &xs[i]) } else { xs.get(j + 1) };
            let rays: [(Rational, Rational); 2] = match neighbour {
                None => [(Rational::one(), Rational::zero()), (Rational::zero(), Rational::one())],
                Some(nb) => [(Rational::one(), Rational::zero()), (Rational::one(), (anchor - nb).abs())],
            };
            let to_net = |alpha: &Rational, beta: &Rational, a: OutputSign| -> ReluNetwork {
                let u = alpha * &rays[0].0 + beta * &rays[1].0;
                let v = alpha * &rays[0].1 + beta * &rays[1].1;
                let (w, b) = if rising { (u.clone(), &v - &u * anchor) } else { (-&u, &v + &u * anchor) };
                ReluNetwork::new(vec![Neuron { w: vec![w], b, a }]).expect("one neuron")
            };
            // active points: coefficients of α and β in the pre-activation
            let active: Vec<(Rational, Rational, &Rational, &Rational, Rational)> = data
                .points()
                .iter()
                .filter(|p| if rising { p.x[0] >= *anchor } else { p.x[0] <= *anchor })
                .map(|p| {
                    let s = if rising { &p.x[0] - anchor } else { anchor - &p.x[0] };
                    let (lo, hi) = p.label.bounds();
                    (&rays[0].0 * &s + &rays[0].1, &rays[1].0 * &s + &rays[1].1, lo, hi, Rational::from(p.multiplicity))
                })
                .collect();
            for &a in signs {
                let sa = |v: &Rational| a.apply(v.clone());
                match kind {
                    Kind::Concave => {
                        // lines c·(α, β) = r: the two axes and every zero-residual line
                        let mut lines: Vec<(Rational, Rational, Rational)> =
                            vec![(Rational::one(), Rational::zero(), Rational::zero()), (Rational::zero(), Rational::one(), Rational::zero())];
                        for (ca, cb, y, _, _) in &active {
                            lines.push((ca.clone(), cb.clone(), sa(y)));
                        }
                        for (i, l1) in lines.iter().enumerate() {
                            for l2 in &lines[i + 1..] {
                                let mat = vec![vec![l1.0.clone(), l1.1.clone()], vec![l2.0.clone(), l2.1.clone()]];
                                if let Some(sol) = solve_square_system(&mat, &[l1.2.clone(), l2.2.clone()]) {
                                    if !sol[0].is_negative() && !sol[1].is_negative() {
                                        consider(to_net(&sol[0], &sol[1], a))?;
                                    }
                                }
                            }
                        }
                    }
                    Kind::Square => {
                        let mut g = [[Rational::zero(), Rational::zero()], [Rational::zero(), Rational::zero()]];
                        let mut h = [Rational::zero(), Rational::zero()];
                        for (ca, cb, y, _, mult) in &active {
                            let c = [ca, cb];
                            for r in 0..2 {
                                h[r] = h[r].add_mul(&(mult * c[r]), &sa(y));
                                for s in 0..2 {
                                    g[r][s] = g[r][s].add_mul(&(mult * c[r]), c[s]);
                                }
                            }
                        }
                        for axis in 0..2 {
                            if g[axis][axis].is_positive() {
                                let t = &h[axis] / &g[axis][axis];
                                if !t.is_negative() {
                                    let (al, be) = if axis == 0 { (t, Rational::zero()) } else { (Rational::zero(), t) };
                                    consider(to_net(&al, &be, a))?;
                                }
                            }
                        }
                        let mat = vec![g[0].to_vec(), g[1].to_vec()];
                        if let Some(sol) = solve_square_system(&mat, &h) {
                            if !sol[0].is_negative() && !sol[1].is_negative() {
                                consider(to_net(&sol[0], &sol[1], a))?;
                            }
                        }
                    }
                    Kind::Chebyshev => {
                        // planes n·(α, β, γ) = r bounding the epigraph of the max distance
                        let mut planes: Vec<[Rational; 4]> = vec![
                            [Rational::one(), Rational::zero(), Rational::zero(), Rational::zero()],
                            [Rational::zero(), Rational::one(), Rational::zero(), Rational::zero()],
                        ];
                        for p in data.points() {
                            let (lo, hi) = p.label.bounds();
                            planes.push([Rational::zero(), Rational::zero(), Rational::one(), lo.clone()]);
                            planes.push([Rational::zero(), Rational::zero(), Rational::one(), -hi]);
                        }
                        for (ca, cb, lo, hi, _) in &active {
                            planes.push([ca.clone(), cb.clone(), Rational::one(), (*lo).clone()]);
                            planes.push([-ca, -cb, Rational::one(), -*hi]);
                        }
                        let n = planes.len();
                        for i in 0..n {
                            for j in i + 1..n {
                                for l in j + 1..n {
                                    let mat: Vec<Vec<Rational>> = [i, j, l].iter().map(|&t| planes[t][..3].to_vec()).collect();
                                    let rhs: Vec<Rational> = [i, j, l].iter().map(|&t| planes[t][3].clone()).collect();
                                    if let Some(sol) = solve_square_system(&mat, &rhs) {
                                        if !sol[0].is_negative() && !sol[1].is_negative() {
                                            consider(to_net(&sol[0], &sol[1], a))?;
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(best)
}

/// Best loss over networks whose weights, biases and signs lie on the lattice
/// `{−bound + 2·bound·i/resolution}`. An upper bound on the true optimum.
pub fn grid_oracle(data: &Dataset, loss: &LossSpec, k: usize, bound: &Rational, resolution: u32) -> Result<LossValue> {
    if resolution == 0 || k == 0 {
        return Err(Error::InvalidInput("resolution and k must be positive".into()));
    }
    let d = data.dim();
    let step = &(bound * Rational::from(2i64)) / &Rational::from(resolution as i64);
    let ticks: Vec<Rational> = (0..=resolution).map(|i| &(-bound) + &step * &Rational::from(i as i64)).collect();
    let sign_choices: &[OutputSign] = if matches!(loss, LossSpec::LinfInterval) && k == 1 {
        &[OutputSign::Positive]
    } else {
        &OutputSign::BOTH
    };
    let per_neuron = (ticks.len() as u128).pow(d as u32 + 1) * sign_choices.len() as u128;
    let total = per_neuron.saturating_pow(k as u32);
    if total > 5_000_000 {
        return Err(Error::BudgetExceeded { what: "grid", needed: total, budget: 5_000_000 });
    }
    let neuron_at = |mut idx: u128| -> Neuron {
        let a = sign_choices[(idx % sign_choices.len() as u128) as usize];
        idx /= sign_choices.len() as u128;
        let mut coords = Vec::with_capacity(d + 1);
        for _ in 0..=d {
            coords.push(ticks[(idx % ticks.len() as u128) as usize].clone());
            idx /= ticks.len() as u128;
        }
        let b = coords.pop().expect("d + 1 entries");
        Neuron { w: coords, b, a }
    };
    let mut best: Option<LossValue> = None;
    for idx in 0..total {
        let mut rest = idx;
        let mut neurons = Vec::with_capacity(k);
        for _ in 0..k {
            neurons.push(neuron_at(rest % per_neuron));
            rest /= per_neuron;
        }
        let net = ReluNetwork::new(neurons)?;
        let v = loss_value_with_precision(&net, data, loss, 64)?;
        if best.as_ref().is_none_or(|b| v.approx_cmp(b) == Ordering::Less) {
            best = Some(v);
        }
    }
    Ok(best.expect("grid is nonempty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dichotomy::enumerate_open_dichotomies;
    use crate::rational::{q, qi};

    fn line(pairs: &[(i64, i64)]) -> Dataset {
        Dataset::from_pairs(1, pairs.iter().map(|&(x, y)| (vec![qi(x)], qi(y)))).unwrap()
    }

    #[test]
    fn oracle_dichotomy_counts() {
        let l: Vec<Vec<Rational>> = [0, 1, 3].iter().map(|&v| vec![qi(v)]).collect();
        assert_eq!(oracle_dichotomies(&l).unwrap().len(), 6);
        let p: Vec<Vec<Rational>> = [[0, 0], [3, 0], [0, 2], [2, 3]].iter().map(|r| r.iter().map(|&v| qi(v)).collect()).collect();
        assert_eq!(oracle_dichotomies(&p).unwrap(), enumerate_open_dichotomies(&p, 16).unwrap());
        assert_eq!(oracle_dichotomies(&p).unwrap().len(), 14);
    }

    #[test]
    fn bump_values() {
        let data = line(&[(0, 0), (1, 1), (2, 0)]);
        assert_eq!(oracle_train_1d(&data, &LossSpec::Lp(qi(1))).unwrap(), LossValue::exact(qi(1)));
        assert_eq!(oracle_train_1d(&data, &LossSpec::Lp(qi(0))).unwrap(), LossValue::exact(qi(1)));
        assert_eq!(oracle_train_1d(&data, &LossSpec::Lp(qi(2))).unwrap(), LossValue::exact(q(2, 3)));
        let valley = line(&[(0, 1), (1, 0), (2, 1)]);
        assert_eq!(oracle_train_1d(&valley, &LossSpec::LinfInterval).unwrap(), LossValue::exact(q(1, 2)));
    }

    #[test]
    fn realizable_ramp() {
        let data = line(&[(-1, 0), (0, 0), (1, 1), (2, 2)]);
        for loss in [LossSpec::Lp(qi(0)), LossSpec::Lp(q(1, 2)), LossSpec::Lp(qi(1)), LossSpec::Lp(qi(2)), LossSpec::LinfInterval] {
            assert_eq!(oracle_train_1d(&data, &loss).unwrap().approx_value(), &qi(0));
        }
    }

    #[test]
    fn grid_bounds() {
        let data = line(&[(-1, 0), (0, 0), (1, 1), (2, 2)]);
        let g = grid_oracle(&data, &LossSpec::Lp(qi(1)), 1, &qi(2), 4).unwrap();
        assert_eq!(g.approx_value(), &qi(0));
        let bump = line(&[(0, 0), (1, 1), (2, 0)]);
        let coarse = grid_oracle(&bump, &LossSpec::Lp(qi(2)), 1, &qi(2), 2).unwrap();
        let fine = grid_oracle(&bump, &LossSpec::Lp(qi(2)), 1, &qi(2), 8).unwrap();
        assert!(fine.approx_value() <= coarse.approx_value());
        assert!(fine.approx_value() >= &q(2, 3));
    }
}
