//! Exact rational arithmetic and exact linear algebra.
//!
//! Every coefficient in the engine is a [`Rational`]: an arbitrary-precision
//! fraction kept in lowest terms with positive denominator. Matrices are
//! dense; determinants use fraction-free (Bareiss) elimination over the
//! integers after clearing denominators, and linear systems are solved by
//! exact Gauss-Jordan reduction. A sparse row-echelon solver backs the large
//! lifting systems built elsewhere in the crate.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

/// Arbitrary-precision rational number, always in lowest terms with positive
/// denominator. Prints as `p/q`, or `p` when the denominator is 1.
pub type Rational = num_rational::BigRational;

// Re-exported so downstream code can use the standard numeric traits
// without depending on num-traits directly.
pub use num_traits::{One as RatOne, Zero as RatZero};

/// Shorthand for an integer rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for the fraction `p/q`. Panics if `q == 0`.
pub fn frac(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// `n!` as a big integer.
pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// Binomial coefficient `C(n, k)` as a big integer (0 when `k > n`).
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Dense matrix of rationals, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    /// Zero matrix of the given shape.
    pub fn zero(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    /// Identity matrix of size `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Builds a matrix from rows. Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(nrows * ncols);
        for row in rows {
            assert_eq!(row.len(), ncols, "ragged rows");
            entries.extend(row);
        }
        RationalMatrix {
            rows: nrows,
            cols: ncols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.entries[i * self.cols + j] = v;
    }

    /// Matrix product. Panics on mismatched shapes.
    pub fn mul(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = RationalMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let cur = out.get(i, j) + a * b;
                        out.set(i, j, cur);
                    }
                }
            }
        }
        out
    }

    /// Matrix-vector product. Panics on length mismatch.
    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len(), "shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Rational::zero();
                for j in 0..self.cols {
                    let a = self.get(i, j);
                    if !a.is_zero() {
                        acc += a * &v[j];
                    }
                }
                acc
            })
            .collect()
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    ///
    /// Denominators are cleared row by row first, so the elimination itself
    /// runs over big integers with exact divisions only. Panics if the matrix
    /// is not square.
    pub fn determinant(&self) -> Rational {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Rational::one();
        }
        // Clear denominators: row i is scaled by the lcm d_i of its
        // denominators, and det(A) = det(A_int) / prod(d_i).
        let mut scale = BigInt::one();
        let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut d = BigInt::one();
            for j in 0..n {
                d = d.lcm(self.get(i, j).denom());
            }
            let row = (0..n)
                .map(|j| {
                    let e = self.get(i, j);
                    e.numer() * (&d / e.denom())
                })
                .collect();
            scale *= &d;
            m.push(row);
        }

        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..n {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                    Some(r) => {
                        m.swap(k, r);
                        sign = -sign;
                    }
                    None => return Rational::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                    m[i][j] = num / &prev; // exact by Bareiss
                }
                m[i][k] = BigInt::zero();
            }
            prev = m[k][k].clone();
        }
        let det = m[n - 1][n - 1].clone() * BigInt::from(sign);
        Rational::new(det, scale)
    }
}

/// Result of solving `A x = b` exactly.
#[derive(Clone, Debug)]
pub struct LinearSolution {
    /// One particular solution (free variables set to zero).
    pub particular: Vec<Rational>,
    /// Basis of the homogeneous solution space.
    pub nullspace: Vec<Vec<Rational>>,
}

/// Solves `A x = b` exactly. Returns `None` when the system is inconsistent.
///
/// The particular solution sets all free variables to zero; the nullspace
/// basis has one vector per free column.
pub fn solve_linear(a: &RationalMatrix, b: &[Rational]) -> Option<LinearSolution> {
    assert_eq!(a.rows(), b.len(), "dimension mismatch");
    let mut solver = SparseSolver::new(a.cols());
    for i in 0..a.rows() {
        let row: Vec<(usize, Rational)> = (0..a.cols())
            .filter(|&j| !a.get(i, j).is_zero())
            .map(|j| (j, a.get(i, j).clone()))
            .collect();
        if !solver.push_row(row, b[i].clone()) {
            return None;
        }
    }
    Some(solver.solve())
}

/// Incremental exact row-echelon solver over sparse rows.
///
/// Rows are fed one at a time and reduced against the pivots found so far
/// (Gauss-Jordan, so the stored rows stay fully reduced). Intended for the
/// tall, sparse systems produced by the lifting step, where the number of
/// columns is small compared to the number of rows.
pub struct SparseSolver {
    cols: usize,
    /// pivot column -> fully reduced row with unit pivot, plus its rhs
    pivots: BTreeMap<usize, (Vec<(usize, Rational)>, Rational)>,
}

impl SparseSolver {
    pub fn new(cols: usize) -> Self {
        SparseSolver {
            cols,
            pivots: BTreeMap::new(),
        }
    }

    /// Feeds one equation `sum coeff_j x_j = rhs`; the row must list columns
    /// in strictly increasing order. Returns `false` if the row makes the
    /// system inconsistent.
    pub fn push_row(&mut self, row: Vec<(usize, Rational)>, rhs: Rational) -> bool {
        let (mut row, mut rhs) = (row, rhs);
        // Reduce every entry sitting on a pivot column. Each subtraction
        // removes that column and only introduces free columns, so this
        // terminates with a row supported on free columns only.
        loop {
            let hit = row
                .iter()
                .find(|(c, _)| self.pivots.contains_key(c))
                .map(|(c, v)| (*c, v.clone()));
            let Some((col, factor)) = hit else {
                break;
            };
            let (prow, prhs) = self.pivots.get(&col).unwrap();
            rhs -= &factor * prhs;
            row = sub_scaled(&row, prow, &factor);
        }
        if row.is_empty() {
            return rhs.is_zero();
        }
        // Normalize so the pivot coefficient is 1.
        let lead = row[0].0;
        let inv = row[0].1.recip();
        for (_, v) in row.iter_mut() {
            *v *= &inv;
        }
        rhs *= &inv;
        // Back-reduce the stored rows against the new pivot.
        let to_fix: Vec<usize> = self
            .pivots
            .iter()
            .filter(|(_, (r, _))| r.binary_search_by_key(&lead, |e| e.0).is_ok())
            .map(|(&c, _)| c)
            .collect();
        for c in to_fix {
            let (prow, prhs) = self.pivots.get(&c).unwrap();
            let idx = prow.binary_search_by_key(&lead, |e| e.0).unwrap();
            let factor = prow[idx].1.clone();
            let new_row = sub_scaled(prow, &row, &factor);
            let new_rhs = prhs - &factor * &rhs;
            self.pivots.insert(c, (new_row, new_rhs));
        }
        self.pivots.insert(lead, (row, rhs));
        true
    }

    /// Number of pivots found so far (the rank of the rows fed in).
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Extracts the particular solution and nullspace basis.
    pub fn solve(&self) -> LinearSolution {
        let mut particular = vec![Rational::zero(); self.cols];
        for (&c, (_, rhs)) in &self.pivots {
            particular[c] = rhs.clone();
        }
        let mut nullspace = Vec::new();
        for f in 0..self.cols {
            if self.pivots.contains_key(&f) {
                continue;
            }
            let mut v = vec![Rational::zero(); self.cols];
            v[f] = Rational::one();
            for (&c, (row, _)) in &self.pivots {
                if let Ok(idx) = row.binary_search_by_key(&f, |e| e.0) {
                    v[c] = -row[idx].1.clone();
                }
            }
            nullspace.push(v);
        }
        LinearSolution {
            particular,
            nullspace,
        }
    }
}

/// `a - factor * b` on sparse rows sorted by column, dropping exact zeros.
fn sub_scaled(
    a: &[(usize, Rational)],
    b: &[(usize, Rational)],
    factor: &Rational,
) -> Vec<(usize, Rational)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some((ca, va)), Some((cb, vb))) if ca == cb => {
                let v = va - factor * vb;
                if !v.is_zero() {
                    out.push((*ca, v));
                }
                i += 1;
                j += 1;
            }
            (Some((ca, va)), Some((cb, _))) if ca < cb => {
                out.push((*ca, va.clone()));
                i += 1;
            }
            (Some(_), Some((cb, vb))) => {
                let v = -(factor * vb);
                if !v.is_zero() {
                    out.push((*cb, v));
                }
                j += 1;
            }
            (Some((ca, va)), None) => {
                out.push((*ca, va.clone()));
                i += 1;
            }
            (None, Some((cb, vb))) => {
                let v = -(factor * vb);
                if !v.is_zero() {
                    out.push((*cb, v));
                }
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}
