//! Dense exact linear algebra over the rationals.
//!
//! Elimination is fraction-free: every row is first cleared to integers, a
//! Bareiss sweep produces an integer echelon form, and only the final
//! back-substitution touches rationals.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{zeros, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: zeros(rows * cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m.data[i * n + i] = Q::one();
        }
        m
    }

    pub fn scalar(n: usize, s: &Q) -> Self {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m.data[i * n + i] = s.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        Matrix {
            rows: r,
            cols: c,
            data,
        }
    }

    /// Matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[Vec<Q>]) -> Self {
        let cols = columns.len();
        let mut m = Matrix::zero(rows, cols);
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (i, v) in col.iter().enumerate() {
                m.data[i * cols + j] = v.clone();
            }
        }
        m
    }

    /// Matrix of a linear map given by its action on the standard basis.
    pub fn from_fn_on_basis<F>(n: usize, mut image: F) -> Result<Self>
    where
        F: FnMut(&[Q]) -> Result<Vec<Q>>,
    {
        let mut columns = Vec::with_capacity(n);
        for j in 0..n {
            let e = crate::rational::unit_vector(n, j);
            let col = image(&e)?;
            if col.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: col.len(),
                });
            }
            columns.push(col);
        }
        Ok(Matrix::from_columns(n, &columns))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Q> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn apply(&self, x: &[Q]) -> Vec<Q> {
        assert_eq!(x.len(), self.cols, "vector length");
        (0..self.rows)
            .map(|i| {
                let mut acc = Q::zero();
                for (a, b) in self.row(i).iter().zip(x) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimension");
        let mut out = Matrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: &Q) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Matrix {
        assert!(self.is_square());
        let mut out = Matrix::identity(self.rows);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Matrix::identity(self.rows)
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.transpose()
    }

    pub fn determinant(&self) -> Q {
        assert!(self.is_square(), "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Q::one();
        }
        let (mut ints, scales) = integer_rows(self.rows, self.cols, &self.data);
        let ech = bareiss(&mut ints, n, n);
        if ech.pivots.len() < n {
            return Q::zero();
        }
        let mut det = Q::from_integer(ints[(n - 1) * n + (n - 1)].clone());
        if ech.swaps % 2 == 1 {
            det = -det;
        }
        for s in scales {
            det /= Q::from_integer(s);
        }
        det
    }

    pub fn rank(&self) -> usize {
        let (mut ints, _) = integer_rows(self.rows, self.cols, &self.data);
        bareiss(&mut ints, self.rows, self.cols).pivots.len()
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let (mut ints, _) = integer_rows(self.rows, self.cols, &self.data);
        let ech = bareiss(&mut ints, self.rows, self.cols);
        let cols = self.cols;
        let mut rows: Vec<Vec<Q>> = (0..ech.pivots.len())
            .map(|i| {
                ints[i * cols..(i + 1) * cols]
                    .iter()
                    .map(|v| Q::from_integer(v.clone()))
                    .collect()
            })
            .collect();
        for (r, &p) in ech.pivots.iter().enumerate().rev() {
            let inv = rows[r][p].recip();
            for v in rows[r].iter_mut() {
                *v *= &inv;
            }
            let pivot_row = rows[r].clone();
            for upper in rows.iter_mut().take(r) {
                let f = upper[p].clone();
                if f.is_zero() {
                    continue;
                }
                for (u, pv) in upper.iter_mut().zip(&pivot_row) {
                    if !pv.is_zero() {
                        *u -= &f * pv;
                    }
                }
            }
        }
        let rank = rows.len();
        let mut m = Matrix::zero(rank, cols);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                m.data[i * cols + j] = v;
            }
        }
        (m, ech.pivots)
    }

    /// Basis of the right kernel. Each basis vector has a 1 in its own free
    /// column and 0 in every other free column.
    pub fn kernel(&self) -> Vec<Vec<Q>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = zeros(self.cols);
                v[f] = Q::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(i, f).clone();
                }
                v
            })
            .collect()
    }

    /// Solves `self * X = rhs` for square nonsingular `self`.
    pub fn solve_matrix(&self, rhs: &Matrix) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        if rhs.rows != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: rhs.rows,
            });
        }
        let n = self.rows;
        let width = n + rhs.cols;
        let mut aug = Vec::with_capacity(n * width);
        for i in 0..n {
            aug.extend(self.row(i).iter().cloned());
            aug.extend(rhs.row(i).iter().cloned());
        }
        let (mut ints, _) = integer_rows(n, width, &aug);
        let ech = bareiss_limited(&mut ints, n, width, n);
        if ech.pivots.len() < n {
            return Err(Error::Singular);
        }
        let mut x = Matrix::zero(n, rhs.cols);
        for col in 0..rhs.cols {
            for i in (0..n).rev() {
                let mut acc = Q::from_integer(ints[i * width + n + col].clone());
                for j in i + 1..n {
                    let a = &ints[i * width + j];
                    if !a.is_zero() {
                        acc -= Q::from_integer(a.clone()) * x.get(j, col);
                    }
                }
                acc /= Q::from_integer(ints[i * width + i].clone());
                x.set(i, col, acc);
            }
        }
        Ok(x)
    }

    pub fn solve(&self, b: &[Q]) -> Result<Vec<Q>> {
        let rhs = Matrix::from_columns(b.len(), &[b.to_vec()]);
        Ok(self.solve_matrix(&rhs)?.column(0))
    }

    pub fn inverse(&self) -> Result<Matrix> {
        self.solve_matrix(&Matrix::identity(self.rows))
    }
}

struct Echelon {
    pivots: Vec<usize>,
    swaps: usize,
}

/// Scales each row by the lcm of its denominators.
fn integer_rows(rows: usize, cols: usize, data: &[Q]) -> (Vec<BigInt>, Vec<BigInt>) {
    let mut out = Vec::with_capacity(rows * cols);
    let mut scales = Vec::with_capacity(rows);
    for i in 0..rows {
        let row = &data[i * cols..(i + 1) * cols];
        let l = row
            .iter()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        for v in row {
            out.push(v.numer() * (&l / v.denom()));
        }
        scales.push(l);
    }
    (out, scales)
}

fn bareiss(m: &mut [BigInt], rows: usize, cols: usize) -> Echelon {
    bareiss_limited(m, rows, cols, cols)
}

/// Fraction-free Gaussian elimination, choosing pivots only among the first
/// `pivot_cols` columns.
fn bareiss_limited(m: &mut [BigInt], rows: usize, cols: usize, pivot_cols: usize) -> Echelon {
    let mut prev = BigInt::one();
    let mut r = 0;
    let mut pivots = Vec::new();
    let mut swaps = 0;
    for col in 0..pivot_cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i * cols + col].is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                m.swap(p * cols + j, r * cols + j);
            }
            swaps += 1;
        }
        let pivot = m[r * cols + col].clone();
        for i in r + 1..rows {
            let factor = m[i * cols + col].clone();
            for j in col + 1..cols {
                let v = &pivot * &m[i * cols + j] - &factor * &m[r * cols + j];
                m[i * cols + j] = if prev.is_one() { v } else { v / &prev };
            }
            m[i * cols + col] = BigInt::zero();
        }
        prev = pivot;
        pivots.push(col);
        r += 1;
    }
    Echelon { pivots, swaps }
}

/// Subspace of `Q^n` kept in reduced row echelon form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    n: usize,
    basis: Vec<Vec<Q>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Subspace {
            n,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn span(n: usize, vectors: &[Vec<Q>]) -> Self {
        let mut s = Subspace::zero(n);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Q>] {
        &self.basis
    }

    /// Residue of `v` after reduction against the basis.
    fn reduce(&self, v: &[Q]) -> Vec<Q> {
        let mut w = v.to_vec();
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            let f = w[p].clone();
            if f.is_zero() {
                continue;
            }
            for (x, y) in w.iter_mut().zip(b) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: &[Q]) -> bool {
        assert_eq!(v.len(), self.n, "vector length");
        let mut w = self.reduce(v);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = w[p].recip();
        for x in w.iter_mut() {
            *x *= &inv;
        }
        for b in self.basis.iter_mut() {
            let f = b[p].clone();
            if f.is_zero() {
                continue;
            }
            for (x, y) in b.iter_mut().zip(&w) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        let at = self.pivots.iter().position(|&q| q > p).unwrap_or(self.pivots.len());
        self.pivots.insert(at, p);
        self.basis.insert(at, w);
        true
    }

    /// Coordinates of `v` in the echelon basis, or `None` if `v` is outside.
    pub fn coordinates(&self, v: &[Q]) -> Option<Vec<Q>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    pub fn combine(&self, coords: &[Q]) -> Vec<Q> {
        let mut out = zeros(self.n);
        for (c, b) in coords.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(b) {
                if !x.is_zero() {
                    *o += c * x;
                }
            }
        }
        out
    }
}

/// Determinant of a 3x3 array over any commutative ring given by closures.
pub fn det3<T, M, A, S>(m: &[[T; 3]; 3], mul: M, add: A, sub: S) -> T
where
    M: Fn(&T, &T) -> T,
    A: Fn(&T, &T) -> T,
    S: Fn(&T, &T) -> T,
{
    let minor = |a: usize, b: usize, c: usize, d: usize| {
        sub(&mul(&m[1][a], &m[2][b]), &mul(&m[1][c], &m[2][d]))
    };
    let t0 = mul(&m[0][0], &minor(1, 2, 2, 1));
    let t1 = mul(&m[0][1], &minor(0, 2, 2, 0));
    let t2 = mul(&m[0][2], &minor(0, 1, 1, 0));
    add(&sub(&t0, &t1), &t2)
}
