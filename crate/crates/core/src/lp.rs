//! Exact two-phase simplex over [`Rational`] with Bland's anti-cycling rule.
//!
//! Variables carry optional lower/upper bounds (free by default). Internally
//! every variable is rewritten over nonnegative columns: a shift for a finite
//! lower bound, a reflection for an upper-only bound, and a `x⁺ − x⁻` split for
//! free variables. Column order is fixed by the input, so the returned basic
//! solution is reproducible.

use crate::linalg::dot;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub sense: Sense,
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    num_vars: usize,
    rows: Vec<Constraint>,
    objective: Vec<Rational>,
    direction: Direction,
    lower: Vec<Option<Rational>>,
    upper: Vec<Option<Rational>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { point: Vec<Rational>, objective_value: Rational },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn status(&self) -> LpStatus {
        match self {
            LpOutcome::Optimal { .. } => LpStatus::Optimal,
            LpOutcome::Infeasible => LpStatus::Infeasible,
            LpOutcome::Unbounded => LpStatus::Unbounded,
        }
    }

    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }

    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            LpOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }

    pub fn objective_value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { objective_value, .. } => Some(objective_value),
            _ => None,
        }
    }
}

impl LinearProgram {
    /// A program over `num_vars` free variables with a zero objective.
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            rows: Vec::new(),
            objective: vec![Rational::zero(); num_vars],
            direction: Direction::Minimize,
            lower: vec![None; num_vars],
            upper: vec![None; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn rows(&self) -> &[Constraint] {
        &self.rows
    }

    pub fn objective(&self) -> (&[Rational], Direction) {
        (&self.objective, self.direction)
    }

    pub fn bounds(&self, var: usize) -> (Option<&Rational>, Option<&Rational>) {
        (self.lower[var].as_ref(), self.upper[var].as_ref())
    }

    pub fn set_objective(&mut self, coeffs: Vec<Rational>, direction: Direction) -> &mut Self {
        assert_eq!(coeffs.len(), self.num_vars, "objective length");
        self.objective = coeffs;
        self.direction = direction;
        self
    }

    pub fn minimize(&mut self, coeffs: Vec<Rational>) -> &mut Self {
        self.set_objective(coeffs, Direction::Minimize)
    }

    pub fn maximize(&mut self, coeffs: Vec<Rational>) -> &mut Self {
        self.set_objective(coeffs, Direction::Maximize)
    }

    pub fn add_row(&mut self, coeffs: Vec<Rational>, sense: Sense, rhs: Rational) -> &mut Self {
        assert_eq!(coeffs.len(), self.num_vars, "row length");
        self.rows.push(Constraint { coeffs, sense, rhs });
        self
    }

    pub fn set_lower(&mut self, var: usize, value: Rational) -> &mut Self {
        self.lower[var] = Some(value);
        self
    }

    pub fn set_upper(&mut self, var: usize, value: Rational) -> &mut Self {
        self.upper[var] = Some(value);
        self
    }

    /// Checks every row and bound exactly.
    pub fn is_feasible_point(&self, x: &[Rational]) -> bool {
        if x.len() != self.num_vars {
            return false;
        }
        let bounds_ok = x.iter().enumerate().all(|(j, v)| {
            self.lower[j].as_ref().is_none_or(|l| v >= l) && self.upper[j].as_ref().is_none_or(|u| v <= u)
        });
        bounds_ok
            && self.rows.iter().all(|row| {
                let lhs = dot(&row.coeffs, x);
                match row.sense {
                    Sense::Le => lhs <= row.rhs,
                    Sense::Eq => lhs == row.rhs,
                    Sense::Ge => lhs >= row.rhs,
                }
            })
    }

    pub fn objective_at(&self, x: &[Rational]) -> Rational {
        dot(&self.objective, x)
    }
}

// x_var = shift_var + Σ_{c ∈ cols(var)} sign_c · y_c
struct Column {
    var: usize,
    negated: bool,
}

struct Tableau {
    a: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    // reduced costs and the negated objective value
    cost: Vec<Rational>,
    cost_rhs: Rational,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.a[r][c].recip();
        if !inv.is_zero() && inv != Rational::one() {
            for v in self.a[r].iter_mut() {
                if !v.is_zero() {
                    *v = &*v * &inv;
                }
            }
            self.rhs[r] = &self.rhs[r] * &inv;
        }
        let nz: Vec<usize> = (0..self.a[r].len()).filter(|&j| !self.a[r][j].is_zero()).collect();
        let pivot_row = std::mem::take(&mut self.a[r]);
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.a.len() {
            if i == r || self.a[i][c].is_zero() {
                continue;
            }
            let f = self.a[i][c].clone();
            let row = &mut self.a[i];
            for &j in &nz {
                row[j] = row[j].sub_mul(&f, &pivot_row[j]);
            }
            self.rhs[i] = self.rhs[i].sub_mul(&f, &pivot_rhs);
        }
        if !self.cost[c].is_zero() {
            let f = self.cost[c].clone();
            for &j in &nz {
                self.cost[j] = self.cost[j].sub_mul(&f, &pivot_row[j]);
            }
            self.cost_rhs = self.cost_rhs.sub_mul(&f, &pivot_rhs);
        }
        self.a[r] = pivot_row;
        self.basis[r] = c;
    }

    /// Runs Bland's rule over columns `< limit`. Returns `false` if unbounded.
    fn optimize(&mut self, limit: usize) -> bool {
        loop {
            let Some(c) = (0..limit).find(|&j| self.cost[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for r in 0..self.a.len() {
                let coef = &self.a[r][c];
                if !coef.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / coef;
                best = match best {
                    None => Some((r, ratio)),
                    Some((br, bv)) => {
                        if ratio < bv || (ratio == bv && self.basis[r] < self.basis[br]) {
                            Some((r, ratio))
                        } else {
                            Some((br, bv))
                        }
                    }
                };
            }
            let Some((r, _)) = best else {
                return false;
            };
            self.pivot(r, c);
        }
    }
}

/// Solves `lp` exactly. Deterministic for a fixed input.
pub fn solve_lp(lp: &LinearProgram) -> LpOutcome {
    let n = lp.num_vars;

    // structural columns and shifts
    let mut columns: Vec<Column> = Vec::with_capacity(2 * n);
    let mut shift = vec![Rational::zero(); n];
    let mut extra_rows: Vec<(usize, Rational)> = Vec::new();
    for v in 0..n {
        match (&lp.lower[v], &lp.upper[v]) {
            (Some(l), Some(u)) => {
                if l > u {
                    return LpOutcome::Infeasible;
                }
                shift[v] = l.clone();
                columns.push(Column { var: v, negated: false });
                extra_rows.push((columns.len() - 1, u - l));
            }
            (Some(l), None) => {
                shift[v] = l.clone();
                columns.push(Column { var: v, negated: false });
            }
            (None, Some(u)) => {
                shift[v] = u.clone();
                columns.push(Column { var: v, negated: true });
            }
            (None, None) => {
                columns.push(Column { var: v, negated: false });
                columns.push(Column { var: v, negated: true });
            }
        }
    }
    let n_struct = columns.len();

    // rows over structural columns: (coeffs, sense, rhs)
    let mut rows: Vec<(Vec<Rational>, Sense, Rational)> = Vec::with_capacity(lp.rows.len() + extra_rows.len());
    for row in &lp.rows {
        let coeffs: Vec<Rational> = columns
            .iter()
            .map(|col| if col.negated { -&row.coeffs[col.var] } else { row.coeffs[col.var].clone() })
            .collect();
        let rhs = &row.rhs - dot(&row.coeffs, &shift);
        rows.push((coeffs, row.sense, rhs));
    }
    for (c, cap) in extra_rows {
        let mut coeffs = vec![Rational::zero(); n_struct];
        coeffs[c] = Rational::one();
        rows.push((coeffs, Sense::Le, cap));
    }

    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.1 != Sense::Eq).count();
    let n_real = n_struct + n_slack;

    // layout: structural | slack | artificial
    let mut a: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rational> = Vec::with_capacity(m);
    let mut basis = vec![usize::MAX; m];
    let mut slack_idx = n_struct;
    let mut needs_artificial = Vec::new();
    for (i, (coeffs, sense, b)) in rows.into_iter().enumerate() {
        let mut row = coeffs;
        row.resize(n_real, Rational::zero());
        let mut slack_col = None;
        match sense {
            Sense::Le => {
                row[slack_idx] = Rational::one();
                slack_col = Some(slack_idx);
                slack_idx += 1;
            }
            Sense::Ge => {
                row[slack_idx] = -Rational::one();
                slack_col = Some(slack_idx);
                slack_idx += 1;
            }
            Sense::Eq => {}
        }
        let mut b = b;
        if b.is_negative() {
            for v in row.iter_mut() {
                if !v.is_zero() {
                    *v = -&*v;
                }
            }
            b = -b;
        }
        match slack_col {
            Some(s) if row[s] == Rational::one() => basis[i] = s,
            _ => needs_artificial.push(i),
        }
        a.push(row);
        rhs.push(b);
    }
    let n_art = needs_artificial.len();
    let total = n_real + n_art;
    for row in a.iter_mut() {
        row.resize(total, Rational::zero());
    }
    for (k, &i) in needs_artificial.iter().enumerate() {
        a[i][n_real + k] = Rational::one();
        basis[i] = n_real + k;
    }

    let mut t = Tableau { a, rhs, basis, cost: vec![Rational::zero(); total], cost_rhs: Rational::zero() };

    // phase 1: minimise the sum of artificials
    if n_art > 0 {
        for &i in &needs_artificial {
            for j in 0..n_real {
                if !t.a[i][j].is_zero() {
                    t.cost[j] = &t.cost[j] - &t.a[i][j];
                }
            }
            t.cost_rhs = &t.cost_rhs - &t.rhs[i];
        }
        t.optimize(total);
        if t.cost_rhs.is_negative() {
            return LpOutcome::Infeasible;
        }
        // drive zero-level artificials out of the basis, dropping redundant rows
        let mut r = 0;
        while r < t.a.len() {
            if t.basis[r] >= n_real {
                match (0..n_real).find(|&j| !t.a[r][j].is_zero()) {
                    Some(j) => t.pivot(r, j),
                    None => {
                        t.a.remove(r);
                        t.rhs.remove(r);
                        t.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        for row in t.a.iter_mut() {
            row.truncate(n_real);
        }
    }

    // phase 2
    let sign = match lp.direction {
        Direction::Minimize => Rational::one(),
        Direction::Maximize => -Rational::one(),
    };
    let mut cost = vec![Rational::zero(); n_real];
    for (j, col) in columns.iter().enumerate() {
        let c = &lp.objective[col.var] * &sign;
        cost[j] = if col.negated { -c } else { c };
    }
    t.cost = cost;
    t.cost_rhs = Rational::zero();
    for r in 0..t.a.len() {
        let b = t.basis[r];
        if t.cost[b].is_zero() {
            continue;
        }
        let f = t.cost[b].clone();
        for j in 0..n_real {
            if !t.a[r][j].is_zero() {
                t.cost[j] = t.cost[j].sub_mul(&f, &t.a[r][j]);
            }
        }
        t.cost_rhs = t.cost_rhs.sub_mul(&f, &t.rhs[r]);
    }
    if !t.optimize(n_real) {
        return LpOutcome::Unbounded;
    }

    let mut y = vec![Rational::zero(); n_real];
    for (r, &b) in t.basis.iter().enumerate() {
        y[b] = t.rhs[r].clone();
    }
    let mut x = shift;
    for (j, col) in columns.iter().enumerate() {
        if y[j].is_zero() {
            continue;
        }
        if col.negated {
            x[col.var] = &x[col.var] - &y[j];
        } else {
            x[col.var] = &x[col.var] + &y[j];
        }
    }
    let objective_value = lp.objective_at(&x);
    LpOutcome::Optimal { point: x, objective_value }
}
