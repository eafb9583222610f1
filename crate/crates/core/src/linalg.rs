//! Dense matrices over `Q(z_N)` and small integer matrices.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{CycScalar, CyclotomicField, Rational};

/// Row-major dense matrix with cyclotomic entries.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<CycScalar>,
}

impl Mat {
    pub fn zeros(field: CyclotomicField, rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: CyclotomicField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = field.one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<CycScalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> CycScalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[CycScalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<CycScalar> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(CycScalar::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let field = self.data.first().or(other.data.first()).map(CycScalar::field);
        let mut out = match field {
            Some(f) => Mat::zeros(f, self.rows, other.cols),
            None => {
                return Ok(Mat {
                    rows: self.rows,
                    cols: other.cols,
                    data: Vec::new(),
                })
            }
        };
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[CycScalar]) -> Result<Vec<CycScalar>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = v
                    .first()
                    .map_or_else(|| self[(i, 0)].field().zero(), |x| x.field().zero());
                for (a, x) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !x.is_zero() {
                        acc += &(a * x);
                    }
                }
                acc
            })
            .collect())
    }

    pub fn add(&self, other: &Mat) -> Result<Mat> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Mat) -> Result<Mat> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Mat, f: impl Fn(&CycScalar, &CycScalar) -> CycScalar) -> Result<Mat> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("shape mismatch".into()));
        }
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn scale(&self, s: &CycScalar) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Mat) -> Result<Mat> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// Reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = self[(r, c)].invert().expect("pivot is nonzero");
            for j in 0..self.cols {
                let v = &self[(r, j)] * &inv;
                self[(r, j)] = v;
            }
            for i in 0..self.rows {
                if i == r || self[(i, c)].is_zero() {
                    continue;
                }
                let factor = self[(i, c)].clone();
                for j in 0..self.cols {
                    if self[(r, j)].is_zero() {
                        continue;
                    }
                    let v = &self[(i, j)] - &(&factor * &self[(r, j)]);
                    self[(i, j)] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the right null space.
    pub fn kernel(&self, field: CyclotomicField) -> Vec<Vec<CycScalar>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![field.zero(); self.cols];
                v[fc] = field.one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -&m[(r, fc)];
                }
                v
            })
            .collect()
    }

    /// Solves `self * x = b`; `None` when inconsistent. Free variables are set to zero.
    pub fn solve(&self, b: &[CycScalar], field: CyclotomicField) -> Option<Vec<CycScalar>> {
        let mut aug = Mat::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                b[i].clone()
            }
        });
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![field.zero(); self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = aug[(r, self.cols)].clone();
        }
        Some(x)
    }

    pub fn inverse(&self, field: CyclotomicField) -> Result<Mat> {
        if self.rows != self.cols {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = Mat::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                field.one()
            } else {
                field.zero()
            }
        });
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::DivisionByZero);
        }
        Ok(Mat::from_fn(n, n, |i, j| aug[(i, j + n)].clone()))
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = CycScalar;
    fn index(&self, (i, j): (usize, usize)) -> &CycScalar {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut CycScalar {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
        }
        write!(f, "]")
    }
}

/// Square integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IntMatrix {
    n: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        Self { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("integer matrix must be square".into()));
        }
        Ok(Self {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.n + j] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        self.data.chunks(self.n).map(<[i64]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(i, j, self.get(j, i));
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = IntMatrix {
            n,
            data: vec![0; n * n],
        };
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Exact determinant by fraction-free elimination (Bareiss).
    pub fn determinant(&self) -> BigInt {
        let n = self.n;
        if n == 0 {
            return BigInt::from(1);
        }
        let mut a: Vec<Vec<BigInt>> = self
            .to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(BigInt::from).collect())
            .collect();
        let mut sign = BigInt::from(1);
        let mut prev = BigInt::from(1);
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(p) => {
                        a.swap(k, p);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    /// Inverse of a unimodular matrix (adjugate divided by `+-1`).
    pub fn unimodular_inverse(&self) -> Result<IntMatrix> {
        let det = self.determinant();
        if det.abs() != BigInt::from(1) {
            return Err(Error::Precondition(format!("matrix is not unimodular (det = {det})")));
        }
        let n = self.n;
        let field = CyclotomicField::new(1)?;
        let m = Mat::from_fn(n, n, |i, j| field.int(self.get(i, j)));
        let inv = m.inverse(field)?;
        let mut out = IntMatrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                let q = inv[(i, j)].as_rational().expect("rational entries");
                if !q.is_integer() {
                    return Err(Error::Precondition("inverse is not integral".into()));
                }
                out.set(
                    i,
                    j,
                    i64::try_from(q.to_integer()).map_err(|_| Error::Precondition("entry overflow".into()))?,
                );
            }
        }
        Ok(out)
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .to_rows()
            .iter()
            .map(|r| r.iter().map(i64::to_string).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "{}", rows.join(";"))
    }
}

/// Decides whether `target` lies in the Z-span of `generators` (all vectors over Q).
pub fn in_integer_span(generators: &[Vec<Rational>], target: &[Rational]) -> bool {
    let dim = target.len();
    let mut denom = BigInt::from(1);
    for v in generators.iter().chain(std::iter::once(&target.to_vec())) {
        for x in v {
            denom = denom.lcm(x.denom());
        }
    }
    let scale = |v: &[Rational]| -> Vec<BigInt> {
        v.iter()
            .map(|x| (x * Rational::from_integer(denom.clone())).to_integer())
            .collect()
    };
    let mut rows: Vec<Vec<BigInt>> = generators.iter().map(|g| scale(g)).collect();
    let mut t = scale(target);
    // Integer row reduction to echelon form, one column at a time.
    let mut top = 0;
    for c in 0..dim {
        loop {
            let nonzero: Vec<usize> = (top..rows.len()).filter(|&i| !rows[i][c].is_zero()).collect();
            if nonzero.len() <= 1 {
                if let Some(&p) = nonzero.first() {
                    rows.swap(top, p);
                }
                break;
            }
            let p = *nonzero.iter().min_by_key(|&&i| rows[i][c].abs()).expect("nonempty");
            rows.swap(top, p);
            for i in top + 1..rows.len() {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[top][c]);
                let pivot = rows[top].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot) {
                    *x -= &q * y;
                }
            }
        }
        if top < rows.len() && !rows[top][c].is_zero() {
            let (q, r) = t[c].div_rem(&rows[top][c]);
            if !r.is_zero() {
                return false;
            }
            let pivot = rows[top].clone();
            for (x, y) in t.iter_mut().zip(&pivot) {
                *x -= &q * y;
            }
            top += 1;
        } else if !t[c].is_zero() {
            return false;
        }
    }
    t.iter().all(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f() -> CyclotomicField {
        CyclotomicField::new(1).unwrap()
    }

    fn m(rows: &[&[i64]]) -> Mat {
        let f = f();
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&x| f.int(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn kernel_of_rank_one() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = a.kernel(f());
        assert_eq!(k.len(), 2);
        for v in k {
            assert!(a.apply(&v).unwrap().iter().all(CycScalar::is_zero));
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse(f()).unwrap();
        assert_eq!(a.mul(&inv).unwrap(), Mat::identity(f(), 2));
    }

    #[test]
    fn integer_matrix_helpers() {
        let b = IntMatrix::from_rows(vec![vec![2, 1], vec![1, 1]]).unwrap();
        assert_eq!(b.determinant(), BigInt::from(1));
        let inv = b.unimodular_inverse().unwrap();
        assert_eq!(b.mul(&inv), IntMatrix::identity(2));
        let singular = IntMatrix::from_rows(vec![vec![2, 0], vec![0, 1]]).unwrap();
        assert!(singular.unimodular_inverse().is_err());
    }

    #[test]
    fn integer_span_membership() {
        let q = |x: i64| Rational::from_integer(x.into());
        let gens = vec![vec![q(2), q(0)], vec![q(1), q(3)]];
        assert!(in_integer_span(&gens, &[q(3), q(3)]));
        assert!(in_integer_span(&gens, &[q(0), q(6)]));
        assert!(!in_integer_span(&gens, &[q(1), q(0)]));
        assert!(!in_integer_span(&gens, &[q(0), q(3)]));
    }
}
