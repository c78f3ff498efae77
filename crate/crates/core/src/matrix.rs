//! Dense matrices over the integers and rationals.
//!
//! Everything here is exact. The normal forms (Hermite, Smith) are the
//! textbook elimination algorithms; matrices in this crate are small
//! (rank at most a few dozen), so no attempt is made at modular or
//! asymptotically fast variants.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Row-major integer matrix with arbitrary-precision entries.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from explicit rows; all rows must have equal length.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::Malformed("ragged matrix rows".into()));
            }
            data.extend(row.iter().cloned().map(Into::into));
        }
        Ok(IntMatrix { rows: r, cols: c, data })
    }

    /// Like [`IntMatrix::from_rows`] but with an explicit column count, so
    /// that `r x 0` and `0 x c` shapes survive.
    pub fn from_rows_shaped(rows: Vec<Vec<BigInt>>, cols: usize) -> Result<Self> {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::Malformed("ragged matrix rows".into()));
            }
            data.extend(row);
        }
        Ok(IntMatrix { rows: r, cols, data })
    }

    /// Matrix whose columns are the given vectors (each of length `nrows`).
    pub fn from_columns(columns: &[Vec<BigInt>], nrows: usize) -> Self {
        let mut m = Self::zeros(nrows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), nrows, "column length mismatch");
            for (i, v) in c.iter().enumerate() {
                m.data[i * m.cols + j] = v.clone();
            }
        }
        m
    }

    pub fn diagonal<T: Into<BigInt> + Clone>(entries: &[T]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = e.clone().into();
        }
        m
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

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &BigInt> {
        self.data.iter()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
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

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(BigInt::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn scaled(&self, k: &BigInt) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * k).collect(),
        }
    }

    pub fn neg(&self) -> IntMatrix {
        self.scaled(&BigInt::from(-1))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Block-diagonal sum `self ⊕ other`.
    pub fn block_diag(&self, other: &IntMatrix) -> IntMatrix {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows);
        let mut cols = self.columns();
        cols.extend(other.columns());
        Self::from_columns(&cols, self.rows)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * a[n - 1][n - 1].clone()
    }

    pub fn to_rational(&self) -> Vec<Vec<BigRational>> {
        self.to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(BigRational::from_integer).collect())
            .collect()
    }

    /// Exact inverse over the rationals, or `None` when singular.
    pub fn rational_inverse(&self) -> Option<Vec<Vec<BigRational>>> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.to_rational();
        let mut inv: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        for c in 0..n {
            let p = (c..n).find(|&r| !a[r][c].is_zero())?;
            a.swap(p, c);
            inv.swap(p, c);
            let piv = a[c][c].clone();
            for j in 0..n {
                a[c][j] = &a[c][j] / &piv;
                inv[c][j] = &inv[c][j] / &piv;
            }
            for r in 0..n {
                if r != c && !a[r][c].is_zero() {
                    let f = a[r][c].clone();
                    for j in 0..n {
                        let t = &f * &a[c][j];
                        a[r][j] -= t;
                        let t = &f * &inv[c][j];
                        inv[r][j] -= t;
                    }
                }
            }
        }
        Some(inv)
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let r: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            write!(f, "{}", r.join(","))?;
        }
        write!(f, "]")
    }
}

/// Converts a rational matrix to an integer one, or reports the first
/// denominator that is not 1.
pub fn rational_to_integer(m: &[Vec<BigRational>], cols: usize) -> std::result::Result<IntMatrix, BigInt> {
    let mut rows = Vec::with_capacity(m.len());
    for r in m {
        let mut out = Vec::with_capacity(r.len());
        for x in r {
            if !x.is_integer() {
                return Err(x.denom().clone());
            }
            out.push(x.numer().clone());
        }
        rows.push(out);
    }
    Ok(IntMatrix::from_rows_shaped(rows, cols).expect("rectangular"))
}

pub fn rat_mul(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(BigRational::zero(), |acc, k| acc + &row[k] * &b[k][j])
                })
                .collect()
        })
        .collect()
}

fn axpy_row(rows: &mut [Vec<BigInt>], target: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let (t, s) = if target < src {
        let (lo, hi) = rows.split_at_mut(src);
        (&mut lo[target], &hi[0])
    } else {
        let (lo, hi) = rows.split_at_mut(target);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in t.iter_mut().zip(s.iter()) {
        *x -= q * y;
    }
}

/// Row-style Hermite normal form with a unimodular transform: returns
/// `(h, t)` with `h = t * a`, `h` in echelon form, positive pivots and
/// entries above each pivot reduced into `[0, pivot)`.
pub fn row_hnf_with_transform(a: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let m = a.rows();
    let n = a.cols();
    let mut h = a.to_rows();
    let mut t = IntMatrix::identity(m).to_rows();
    let mut r = 0;
    for col in 0..n {
        if r == m {
            break;
        }
        loop {
            let best = (r..m)
                .filter(|&i| !h[i][col].is_zero())
                .min_by(|&i, &j| h[i][col].abs().cmp(&h[j][col].abs()));
            let Some(best) = best else { break };
            h.swap(r, best);
            t.swap(r, best);
            let mut clean = true;
            for i in r + 1..m {
                if !h[i][col].is_zero() {
                    let q = h[i][col].div_floor(&h[r][col]);
                    axpy_row(&mut h, i, r, &q);
                    axpy_row(&mut t, i, r, &q);
                    if !h[i][col].is_zero() {
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        if h[r][col].is_zero() {
            continue;
        }
        if h[r][col].is_negative() {
            for x in h[r].iter_mut() {
                *x = -&*x;
            }
            for x in t[r].iter_mut() {
                *x = -&*x;
            }
        }
        for i in 0..r {
            let q = h[i][col].div_floor(&h[r][col]);
            axpy_row(&mut h, i, r, &q);
            axpy_row(&mut t, i, r, &q);
        }
        r += 1;
    }
    (
        IntMatrix::from_rows_shaped(h, n).expect("rectangular"),
        IntMatrix::from_rows_shaped(t, m).expect("rectangular"),
    )
}

/// Canonical Hermite basis (nonzero rows of the row HNF) of the Z-span of
/// the given vectors, all of length `n`.
pub fn row_hnf(vectors: &[Vec<BigInt>], n: usize) -> Vec<Vec<BigInt>> {
    let a = IntMatrix::from_rows_shaped(vectors.to_vec(), n).expect("rectangular");
    let (h, _) = row_hnf_with_transform(&a);
    h.to_rows()
        .into_iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect()
}

/// Canonical basis of the integer right kernel `{x ∈ Z^n : a x = 0}`.
pub fn integer_kernel(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    let n = a.cols();
    let (h, t) = row_hnf_with_transform(&a.transpose());
    let basis: Vec<Vec<BigInt>> = (0..n)
        .filter(|&i| h.row(i).iter().all(Zero::is_zero))
        .map(|i| t.row(i).to_vec())
        .collect();
    row_hnf(&basis, n)
}

/// Invariant factors of the Smith normal form, `d_1 | d_2 | ...`, all
/// non-negative; zero factors appear last for singular input.
pub fn elementary_divisors(a: &IntMatrix) -> Vec<BigInt> {
    let m = a.rows();
    let n = a.cols();
    let mut x = a.to_rows();
    let mut out = Vec::new();
    let k_max = m.min(n);
    for k in 0..k_max {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in k..m {
                for j in k..n {
                    if !x[i][j].is_zero()
                        && best.is_none_or(|(bi, bj)| x[i][j].abs() < x[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                out.extend(std::iter::repeat_n(BigInt::zero(), k_max - k));
                return out;
            };
            x.swap(k, bi);
            for row in x.iter_mut() {
                row.swap(k, bj);
            }
            let mut done = true;
            for i in k + 1..m {
                if !x[i][k].is_zero() {
                    let q = x[i][k].div_floor(&x[k][k]);
                    axpy_row(&mut x, i, k, &q);
                    if !x[i][k].is_zero() {
                        done = false;
                    }
                }
            }
            for j in k + 1..n {
                if !x[k][j].is_zero() {
                    let q = x[k][j].div_floor(&x[k][k]);
                    for row in x.iter_mut() {
                        let t = &q * &row[k];
                        row[j] -= t;
                    }
                    if !x[k][j].is_zero() {
                        done = false;
                    }
                }
            }
            if !done {
                continue;
            }
            let pivot = x[k][k].clone();
            let bad = (k + 1..m).find(|&i| (k + 1..n).any(|j| !(&x[i][j] % &pivot).is_zero()));
            match bad {
                Some(i) => {
                    let (lo, hi) = x.split_at_mut(i);
                    for (a, b) in lo[k].iter_mut().zip(hi[0].iter()) {
                        *a += b;
                    }
                }
                None => break,
            }
        }
        out.push(x[k][k].abs());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn bareiss_matches_small_cases() {
        assert_eq!(m(&[&[0, 1], &[1, 0]]).det(), BigInt::from(-1));
        assert_eq!(m(&[&[-2, 1], &[1, -2]]).det(), BigInt::from(3));
        assert_eq!(m(&[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]).det(), BigInt::from(-1));
        assert_eq!(m(&[&[1, 2], &[2, 4]]).det(), BigInt::zero());
        assert_eq!(IntMatrix::zeros(0, 0).det(), BigInt::one());
    }

    #[test]
    fn smith_divisors() {
        let d = elementary_divisors(&m(&[&[0, 3], &[3, 0]]));
        assert_eq!(d, vec![BigInt::from(3), BigInt::from(3)]);
        let d = elementary_divisors(&m(&[&[-2, 1], &[1, -2]]));
        assert_eq!(d, vec![BigInt::from(1), BigInt::from(3)]);
        let d = elementary_divisors(&m(&[&[2, 0], &[0, 3]]));
        assert_eq!(d, vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn kernel_of_single_row() {
        let k = integer_kernel(&m(&[&[-2, 1]]));
        assert_eq!(k, vec![vec![BigInt::from(1), BigInt::from(2)]]);
    }

    #[test]
    fn hnf_of_glue_generators() {
        let gens = vec![
            vec![BigInt::from(3), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(3)],
            vec![BigInt::from(1), BigInt::from(0)],
        ];
        let h = row_hnf(&gens, 2);
        assert_eq!(
            h,
            vec![
                vec![BigInt::from(1), BigInt::from(0)],
                vec![BigInt::from(0), BigInt::from(3)]
            ]
        );
    }

    #[test]
    fn transform_is_consistent() {
        let a = m(&[&[4, 6, 2], &[2, 2, 8], &[6, 9, 3]]);
        let (h, t) = row_hnf_with_transform(&a);
        assert_eq!(t.mul(&a), h);
        assert!(t.det() == BigInt::one() || t.det() == BigInt::from(-1));
    }
}
