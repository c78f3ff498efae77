//! Short-vector enumeration in definite lattices and root reflections.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::{signature, IntegerLattice};
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// All `v` with `⟨v,v⟩ = t` in a negative definite lattice, closed under
/// negation and sorted lexicographically.
pub fn enumerate_norm_vectors(l: &IntegerLattice, t: &BigInt) -> Result<Vec<Vec<BigInt>>> {
    enumerate_norm_vectors_with(l, t, true)
}

pub fn enumerate_norm_vectors_with(l: &IntegerLattice, t: &BigInt, parallel: bool) -> Result<Vec<Vec<BigInt>>> {
    if !t.is_negative() {
        return Err(Error::Precondition(format!("target norm {t} is not negative")));
    }
    let n = l.rank();
    if n == 0 {
        return Ok(Vec::new());
    }
    if !signature(l)?.is_negative_definite() {
        return Err(Error::Definiteness { expected: "negative definite" });
    }
    let q = l.gram().neg();
    Ok(FinckePohst::new(&q).vectors_of_norm(&-t, parallel))
}

/// Bounded enumeration for a positive definite form `q`, using the exact
/// rational decomposition `q(x) = Σ d_i (x_i + Σ_{j>i} μ_ij x_j)²`.
pub(crate) struct FinckePohst {
    n: usize,
    gram: IntMatrix,
    diag: Vec<BigRational>,
    mu: Vec<Vec<BigRational>>,
}

impl FinckePohst {
    pub(crate) fn new(q: &IntMatrix) -> Self {
        let n = q.rows();
        let mut a = q.to_rational();
        for i in 0..n {
            for j in i + 1..n {
                let v = a[i][j].clone();
                a[j][i] = v;
                a[i][j] = &a[i][j] / &a[i][i];
            }
            for k in i + 1..n {
                for l in k..n {
                    let t = &a[k][i] * &a[i][l];
                    a[k][l] -= t;
                }
            }
        }
        let diag = (0..n).map(|i| a[i][i].clone()).collect();
        let mu = (0..n)
            .map(|i| (0..n).map(|j| if j > i { a[i][j].clone() } else { BigRational::zero() }).collect())
            .collect();
        FinckePohst { n, gram: q.clone(), diag, mu }
    }

    /// Integers `x` with `d (x + c)² ≤ budget`, ascending.
    fn range(&self, level: usize, center: &BigRational, budget: &BigRational) -> Vec<BigInt> {
        let bound = budget / &self.diag[level];
        let r = bound.ceil().to_integer().sqrt() + BigInt::one();
        let lo = (-center).floor().to_integer() - &r;
        let hi = (-center).ceil().to_integer() + &r;
        let mut out = Vec::new();
        let mut x = lo;
        while x <= hi {
            let s = BigRational::from_integer(x.clone()) + center;
            if &s * &s <= bound {
                out.push(x.clone());
            }
            x += 1;
        }
        out
    }

    fn center(&self, level: usize, x: &[BigInt]) -> BigRational {
        (level + 1..self.n).fold(BigRational::zero(), |acc, j| {
            acc + &self.mu[level][j] * BigRational::from_integer(x[j].clone())
        })
    }

    fn descend(&self, level: usize, x: &mut Vec<BigInt>, budget: BigRational, target: &BigInt, out: &mut Vec<Vec<BigInt>>) {
        let c = self.center(level, x);
        for v in self.range(level, &c, &budget) {
            x[level] = v.clone();
            let s = BigRational::from_integer(v) + &c;
            let rest = &budget - &self.diag[level] * &s * &s;
            if level == 0 {
                if norm(&self.gram, x) == *target {
                    out.push(x.clone());
                }
            } else {
                self.descend(level - 1, x, rest, target, out);
            }
        }
        x[level] = BigInt::zero();
    }

    pub(crate) fn vectors_of_norm(&self, target: &BigInt, parallel: bool) -> Vec<Vec<BigInt>> {
        let n = self.n;
        let budget = BigRational::from_integer(target.clone());
        let top = self.range(n - 1, &BigRational::zero(), &budget);
        let run = |v: &BigInt| {
            let mut x = vec![BigInt::zero(); n];
            x[n - 1] = v.clone();
            let rest = &budget - &self.diag[n - 1] * BigRational::from_integer(v * v);
            let mut out = Vec::new();
            if n == 1 {
                if norm(&self.gram, &x) == *target {
                    out.push(x);
                }
            } else {
                self.descend(n - 2, &mut x, rest, target, &mut out);
            }
            out
        };
        let mut all: Vec<Vec<BigInt>> = if parallel {
            top.par_iter().map(run).collect::<Vec<_>>().into_iter().flatten().collect()
        } else {
            top.iter().flat_map(run).collect()
        };
        all.sort();
        all
    }
}

fn norm(q: &IntMatrix, x: &[BigInt]) -> BigInt {
    let qx = q.mul_vec(x);
    x.iter().zip(&qx).fold(BigInt::zero(), |acc, (a, b)| acc + a * b)
}

/// Whether a definite lattice has a vector of norm -2. Positive definite
/// and rank-0 lattices have none.
pub fn has_minus_two_root(l: &IntegerLattice) -> Result<bool> {
    if l.rank() == 0 {
        return Ok(false);
    }
    let sig = signature(l)?;
    if sig.is_positive_definite() {
        return Ok(false);
    }
    Ok(!enumerate_norm_vectors(l, &BigInt::from(-2))?.is_empty())
}

/// `s_l : x ↦ x + ⟨x,l⟩ l` for a root `l`.
pub fn reflection_in_root(l: &IntegerLattice, root: &[BigInt]) -> Result<IntMatrix> {
    if root.len() != l.rank() {
        return Err(Error::Dimension(format!("root has length {}, lattice rank {}", root.len(), l.rank())));
    }
    let nrm = l.norm(root);
    if nrm != BigInt::from(-2) {
        return Err(Error::NotARoot(nrm));
    }
    let g_root = l.gram().mul_vec(root);
    let n = l.rank();
    let mut s = IntMatrix::identity(n);
    for (j, coeff) in g_root.iter().enumerate() {
        for (i, r) in root.iter().enumerate() {
            let v = s.get(i, j) + coeff * r;
            s.set(i, j, v);
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{construct_standard, int_vec};

    fn lat(e: &str) -> IntegerLattice {
        construct_standard(e).unwrap()
    }

    fn count(e: &str, t: i64) -> usize {
        enumerate_norm_vectors(&lat(e), &BigInt::from(t)).unwrap().len()
    }

    #[test]
    fn root_counts() {
        assert_eq!(count("twist(A2,-1)", -2), 6);
        assert_eq!(count("twist(D4,-1)", -2), 24);
        assert_eq!(count("twist(E8,-1)", -2), 240);
        assert_eq!(count("diag(-4,-4)", -2), 0);
        assert_eq!(count("diag(-2)", -2), 2);
    }

    #[test]
    fn a2_roots_are_sorted_and_symmetric() {
        let v = enumerate_norm_vectors(&lat("twist(A2,-1)"), &BigInt::from(-2)).unwrap();
        let expected: Vec<_> = [[-1, -1], [-1, 0], [0, -1], [0, 1], [1, 0], [1, 1]]
            .iter()
            .map(|x| int_vec(x))
            .collect();
        assert_eq!(v, expected);
    }

    #[test]
    fn enumeration_preconditions() {
        assert!(enumerate_norm_vectors(&lat("U"), &BigInt::from(-2)).is_err());
        assert!(enumerate_norm_vectors(&lat("A2"), &BigInt::from(-2)).is_err());
        assert!(enumerate_norm_vectors(&lat("twist(A2,-1)"), &BigInt::from(2)).is_err());
    }

    #[test]
    fn root_presence() {
        assert!(has_minus_two_root(&lat("twist(A2,-1)")).unwrap());
        assert!(!has_minus_two_root(&lat("diag(-4,-6)")).unwrap());
        assert!(!has_minus_two_root(&IntegerLattice::zero()).unwrap());
    }

    #[test]
    fn reflections() {
        let a2 = lat("twist(A2,-1)");
        let s = reflection_in_root(&a2, &int_vec(&[1, 0])).unwrap();
        assert_eq!(s.col(0), int_vec(&[-1, 0]));
        assert_eq!(s.col(1), int_vec(&[1, 1]));
        assert!(a2.preserves_form(&s));
        assert_eq!(s.mul(&s), IntMatrix::identity(2));

        let d = lat("diag(-2)");
        assert_eq!(reflection_in_root(&d, &int_vec(&[1])).unwrap(), IntMatrix::diagonal(&[-1]));
        assert!(matches!(reflection_in_root(&a2, &int_vec(&[1, 2])), Err(Error::NotARoot(_))));
    }

    #[test]
    fn serial_and_parallel_agree() {
        let e8 = lat("twist(E8,-1)");
        let t = BigInt::from(-4);
        let a = enumerate_norm_vectors_with(&e8, &t, false).unwrap();
        let b = enumerate_norm_vectors_with(&e8, &t, true).unwrap();
        assert_eq!(a.len(), 2160);
        assert_eq!(a, b);
    }
}
