//! Dichotomies of a finite point set cut out by open affine halfspaces.

use std::collections::{BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::linalg::{dot, solve_square_system, IncrementalSystem};
use crate::lp::{solve_lp, LinearProgram, Sense};
use crate::model::{affine_hull_reduce, Dataset, LabeledPoint};
use crate::rational::Rational;

/// A split of point indices `0..n` into `plus` (strictly positive side) and
/// `minus`. Ordered lexicographically by `plus`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dichotomy {
    plus: Vec<usize>,
    minus: Vec<usize>,
}

impl Dichotomy {
    /// Builds the dichotomy with the given plus-set over `n` points.
    pub fn from_plus(n: usize, plus: impl IntoIterator<Item = usize>) -> Result<Self> {
        let set: BTreeSet<usize> = plus.into_iter().collect();
        if let Some(&bad) = set.iter().find(|&&i| i >= n) {
            return Err(Error::InvalidInput(format!("index {bad} out of range for {n} points")));
        }
        let minus = (0..n).filter(|i| !set.contains(i)).collect();
        Ok(Self { plus: set.into_iter().collect(), minus })
    }

    pub(crate) fn from_mask(mask: &[bool]) -> Self {
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        for (i, &m) in mask.iter().enumerate() {
            if m {
                plus.push(i);
            } else {
                minus.push(i);
            }
        }
        Self { plus, minus }
    }

    pub fn plus(&self) -> &[usize] {
        &self.plus
    }

    pub fn minus(&self) -> &[usize] {
        &self.minus
    }

    pub fn len(&self) -> usize {
        self.plus.len() + self.minus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, i: usize) -> bool {
        self.plus.binary_search(&i).is_ok()
    }

    pub fn mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.len()];
        for &i in &self.plus {
            m[i] = true;
        }
        m
    }
}

fn check_distinct(points: &[Vec<Rational>]) -> Result<usize> {
    let Some(first) = points.first() else {
        return Ok(0);
    };
    let d = first.len();
    let mut seen = HashSet::new();
    for (i, p) in points.iter().enumerate() {
        if p.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: p.len() });
        }
        if !seen.insert(p) {
            return Err(Error::DuplicatePoint(i));
        }
    }
    Ok(d)
}

/// Feasibility LP `⟨w,x_i⟩+b ≥ 1` on `plus`, `≤ 0` elsewhere.
fn margin_lp(points: &[Vec<Rational>], plus: &[bool], d: usize) -> LinearProgram {
    let mut lp = LinearProgram::new(d + 1);
    for (x, &p) in points.iter().zip(plus) {
        let mut row = x.clone();
        row.push(Rational::one());
        if p {
            lp.add_row(row, Sense::Ge, Rational::one());
        } else {
            lp.add_row(row, Sense::Le, Rational::zero());
        }
    }
    lp
}

/// Whether some affine function is positive exactly on `plus`.
pub fn is_open_dichotomy(points: &[Vec<Rational>], plus: &[usize]) -> Result<bool> {
    let d = check_distinct(points)?;
    let mut mask = vec![false; points.len()];
    for &i in plus {
        if i >= points.len() {
            return Err(Error::InvalidInput(format!("index {i} out of range")));
        }
        mask[i] = true;
    }
    Ok(solve_lp(&margin_lp(points, &mask, d)).is_feasible())
}

/// All open dichotomies by testing each of the `2^n` plus-sets with one LP.
pub fn enumerate_open_dichotomies(points: &[Vec<Rational>], bound: usize) -> Result<Vec<Dichotomy>> {
    let d = check_distinct(points)?;
    let n = points.len();
    if n > bound {
        return Err(Error::BudgetExceeded { what: "brute-force dichotomy", needed: n as u128, budget: bound as u128 });
    }
    let mut out = Vec::new();
    for bits in 0u64..(1u64 << n) {
        let mask: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
        if solve_lp(&margin_lp(points, &mask, d)).is_feasible() {
            out.push(Dichotomy::from_mask(&mask));
        }
    }
    out.sort();
    Ok(out)
}

/// Coordinates of `points` in their affine hull, so that they span the space.
pub(crate) fn hull_coordinates(points: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let d = points[0].len();
    let data = Dataset::new(d, points.iter().map(|x| LabeledPoint::scalar(x.clone(), Rational::zero())).collect())
        .expect("points have a common dimension");
    let (reduced, _) = affine_hull_reduce(&data);
    reduced.points().iter().map(|p| p.x.clone()).collect()
}

/// An affinely independent `(d+1)`-subset of the points together with its
/// Lagrange table: `values[i][t]` is the affine function that is 1 at the
/// `t`-th basis point and 0 at the others, evaluated at point `i`, and
/// `coeffs[t]` holds that function as `(w, b)`.
pub(crate) struct AffineBasis {
    pub coeffs: Vec<Vec<Rational>>,
    pub values: Vec<Vec<Rational>>,
}

/// Every affinely independent `(d+1)`-subset of points that span `R^d`,
/// in lexicographic order of index sets.
pub(crate) fn affine_bases(points: &[Vec<Rational>]) -> Vec<Vec<usize>> {
    let n = points.len();
    let d = points.first().map_or(0, Vec::len);
    let rows: Vec<Vec<Rational>> = points
        .iter()
        .map(|x| {
            let mut r = x.clone();
            r.push(Rational::one());
            r
        })
        .collect();
    let mut out = Vec::new();
    let mut sys = IncrementalSystem::new(d + 1);
    let mut chosen = Vec::with_capacity(d + 1);
    fn walk(
        start: usize,
        rows: &[Vec<Rational>],
        sys: &mut IncrementalSystem,
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if sys.is_full_rank() {
            out.push(chosen.clone());
            return;
        }
        let missing = rows[0].len() - sys.len();
        for i in start..rows.len() {
            if rows.len() - i < missing {
                break;
            }
            if sys.push(&rows[i], &Rational::zero()) {
                chosen.push(i);
                walk(i + 1, rows, sys, chosen, out);
                chosen.pop();
                sys.pop();
            }
        }
    }
    if n > 0 {
        walk(0, &rows, &mut sys, &mut chosen, &mut out);
    }
    out
}

pub(crate) fn lagrange_table(points: &[Vec<Rational>], indices: &[usize]) -> AffineBasis {
    let m = indices.len();
    let matrix: Vec<Vec<Rational>> = indices
        .iter()
        .map(|&i| {
            let mut r = points[i].clone();
            r.push(Rational::one());
            r
        })
        .collect();
    let coeffs: Vec<Vec<Rational>> = (0..m)
        .map(|t| {
            let e: Vec<Rational> = (0..m).map(|s| if s == t { Rational::one() } else { Rational::zero() }).collect();
            solve_square_system(&matrix, &e).expect("basis points are affinely independent")
        })
        .collect();
    let values = points
        .iter()
        .map(|x| {
            coeffs
                .iter()
                .map(|c| dot(&c[..m - 1], x) + &c[m - 1])
                .collect()
        })
        .collect();
    AffineBasis { coeffs, values }
}

/// Each row scaled by a positive common denominator into small integers, so
/// that signs of subset sums can be read off without rational arithmetic.
/// `None` when some entry is too large.
pub(crate) fn integer_rows(values: &[Vec<Rational>]) -> Option<Vec<Vec<i128>>> {
    const LIMIT: i128 = 1 << 100;
    values
        .iter()
        .map(|row| {
            let mut lcm: i128 = 1;
            for v in row {
                let (_, d) = v.as_small()?;
                let d = d as i128;
                lcm = lcm.checked_mul(d / gcd(lcm, d))?;
                if lcm > LIMIT {
                    return None;
                }
            }
            row.iter()
                .map(|v| {
                    let (n, d) = v.as_small()?;
                    let scaled = (n as i128).checked_mul(lcm / d as i128)?;
                    (scaled.abs() < LIMIT).then_some(scaled)
                })
                .collect()
        })
        .collect()
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// All open dichotomies, by enumerating vertices of the margin polyhedra.
///
/// For every affinely independent `(d'+1)`-subset `T` (with `d'` the affine
/// dimension) and every `T₁ ⊆ T`, the affine function equal to 1 on `T₁` and
/// 0 on `T ∖ T₁` contributes its positive set. Each realizable plus-set has a
/// pointed margin polyhedron whose vertices are exactly of this form, so the
/// output is complete without any perturbation.
pub fn enumerate_open_dichotomies_geometric(points: &[Vec<Rational>]) -> Result<Vec<Dichotomy>> {
    check_distinct(points)?;
    if points.is_empty() {
        return Ok(vec![Dichotomy::from_mask(&[])]);
    }
    let coords = hull_coordinates(points);
    let mut found: BTreeSet<Vec<bool>> = BTreeSet::new();
    for basis in affine_bases(&coords) {
        let table = lagrange_table(&coords, &basis);
        let m = basis.len();
        match integer_rows(&table.values) {
            Some(rows) => {
                for subset in 0u32..(1u32 << m) {
                    let mask = rows
                        .iter()
                        .map(|row| row.iter().enumerate().filter(|(t, _)| subset >> t & 1 == 1).map(|(_, v)| v).sum::<i128>() > 0)
                        .collect();
                    found.insert(mask);
                }
            }
            None => {
                for subset in 0u32..(1u32 << m) {
                    let mask = table
                        .values
                        .iter()
                        .map(|row| {
                            let mut acc = Rational::zero();
                            for (t, v) in row.iter().enumerate() {
                                if subset >> t & 1 == 1 {
                                    acc += v;
                                }
                            }
                            acc.is_positive()
                        })
                        .collect();
                    found.insert(mask);
                }
            }
        }
    }
    let mut out: Vec<Dichotomy> = found.iter().map(|m| Dichotomy::from_mask(m)).collect();
    out.sort();
    Ok(out)
}

/// Number of dichotomies of `n` points in general position in `R^d`.
pub fn cover_count(n: usize, d: usize) -> u128 {
    if n == 0 {
        return 1;
    }
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for i in 0..=d.min(n - 1) {
        if i > 0 {
            binom = binom * (n - i) as u128 / i as u128;
        }
        total += binom;
    }
    2 * total
}
