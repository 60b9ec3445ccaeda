//! Exact Gaussian elimination over [`Rational`].

use crate::rational::Rational;

/// Row-major dense matrix.
pub type Matrix = Vec<Vec<Rational>>;

/// Reduced row echelon form of `a`, together with the pivot column of each
/// nonzero row. Pivots are chosen left to right, so the pivot columns are the
/// lexicographically first column basis.
pub fn rref(a: &[Vec<Rational>]) -> (Matrix, Vec<usize>) {
    let mut m: Matrix = a.to_vec();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (j, v) in row.iter_mut().enumerate() {
                if !pivot_row[j].is_zero() {
                    *v = v.sub_mul(&f, &pivot_row[j]);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(a: &[Vec<Rational>]) -> usize {
    rref(a).1.len()
}

/// Solves `a x = rhs` for square `a`; `None` when `a` is singular.
pub fn solve_square_system(a: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    assert_eq!(rhs.len(), n, "rhs length must match matrix size");
    let mut m: Matrix = a
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            assert_eq!(row.len(), n, "matrix must be square");
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let inv = m[c][c].recip();
        for v in m[c][c..].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot_row = m[c].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == c || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for j in c..=n {
                if !pivot_row[j].is_zero() {
                    row[j] = row[j].sub_mul(&f, &pivot_row[j]);
                }
            }
        }
    }
    Some(m.into_iter().map(|mut row| row.pop().unwrap()).collect())
}

/// Basis of the right null space `{x : a x = 0}` of a matrix with `cols` columns.
pub fn null_space(a: &[Vec<Rational>], cols: usize) -> Matrix {
    let (m, pivots) = rref(a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (row, &p) in m.iter().zip(&pivots) {
                v[p] = -&row[f];
            }
            v
        })
        .collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Rational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc = acc.add_mul(x, y);
        }
    }
    acc
}

/// Row-by-row forward elimination that can be extended and rolled back,
/// used to walk equation subsets depth-first while pruning dependent prefixes.
#[derive(Debug, Clone)]
pub struct IncrementalSystem {
    cols: usize,
    // each stored row is normalised to 1 at its pivot and has zeros at the
    // pivots of all earlier rows; last entry is the right-hand side
    rows: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl IncrementalSystem {
    pub fn new(cols: usize) -> Self {
        Self { cols, rows: Vec::with_capacity(cols), pivots: Vec::with_capacity(cols) }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rows.len() == self.cols
    }

    /// Appends `row · x = rhs`. Returns `false` (leaving the system unchanged)
    /// when the row is linearly dependent on the stored ones.
    pub fn push(&mut self, row: &[Rational], rhs: &Rational) -> bool {
        debug_assert_eq!(row.len(), self.cols);
        let mut r: Vec<Rational> = Vec::with_capacity(self.cols + 1);
        r.extend_from_slice(row);
        r.push(rhs.clone());
        for (stored, &p) in self.rows.iter().zip(&self.pivots) {
            if r[p].is_zero() {
                continue;
            }
            let f = r[p].clone();
            for (j, s) in stored.iter().enumerate() {
                if !s.is_zero() {
                    r[j] = r[j].sub_mul(&f, s);
                }
            }
        }
        let Some(p) = (0..self.cols).find(|&c| !r[c].is_zero()) else {
            return false;
        };
        let inv = r[p].recip();
        for v in r.iter_mut() {
            if !v.is_zero() {
                *v = &*v * &inv;
            }
        }
        self.rows.push(r);
        self.pivots.push(p);
        true
    }

    pub fn pop(&mut self) {
        self.rows.pop();
        self.pivots.pop();
    }

    /// Unique solution of a full-rank system.
    pub fn solve(&self) -> Option<Vec<Rational>> {
        if !self.is_full_rank() {
            return None;
        }
        let n = self.cols;
        let mut x = vec![Rational::zero(); n];
        for (row, &p) in self.rows.iter().zip(&self.pivots).rev() {
            let mut v = row[n].clone();
            for (c, coef) in row[..n].iter().enumerate() {
                if c != p && !coef.is_zero() {
                    v = v.sub_mul(coef, &x[c]);
                }
            }
            x[p] = v;
        }
        Some(x)
    }
}
