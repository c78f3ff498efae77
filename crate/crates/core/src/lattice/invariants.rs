use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use super::IntegerLattice;
use crate::error::{Error, Result};
use crate::matrix::elementary_divisors;

/// Exact determinant of the Gram matrix.
pub fn discriminant(l: &IntegerLattice) -> BigInt {
    l.gram().det()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
}

impl Signature {
    pub fn is_positive_definite(&self) -> bool {
        self.negative == 0
    }

    pub fn is_negative_definite(&self) -> bool {
        self.positive == 0
    }
}

/// Signature by congruent diagonalization over the rationals.
pub fn signature(l: &IntegerLattice) -> Result<Signature> {
    let n = l.rank();
    let mut a = l.gram().to_rational();
    let mut sig = Signature { positive: 0, negative: 0 };
    for k in 0..n {
        if a[k][k].is_zero() {
            if let Some(i) = (k + 1..n).find(|&i| !a[i][i].is_zero()) {
                a.swap(i, k);
                for row in a.iter_mut() {
                    row.swap(i, k);
                }
            } else if let Some(i) = (k + 1..n).find(|&i| !a[k][i].is_zero()) {
                // a_kk = a_ii = 0, so replacing e_k by e_k + e_i gives 2 a_ki.
                for j in 0..n {
                    let v = a[i][j].clone();
                    a[k][j] += v;
                }
                for row in a.iter_mut() {
                    let v = row[i].clone();
                    row[k] += v;
                }
            } else {
                return Err(Error::InvalidLattice("singular form in signature".into()));
            }
        }
        let pivot = a[k][k].clone();
        if pivot.is_positive() {
            sig.positive += 1;
        } else {
            sig.negative += 1;
        }
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f: BigRational = &a[i][k] / &pivot;
            for j in k..n {
                let t = &f * &a[k][j];
                a[i][j] -= t;
            }
            for row in a.iter_mut() {
                let t = &f * &row[k];
                row[i] -= t;
            }
        }
    }
    Ok(sig)
}

/// Structure of the discriminant group `L^∨/L` relative to a prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscriminantData {
    /// Smith invariant factors of the Gram matrix, `d_1 | d_2 | ...`.
    pub elementary_divisors: Vec<BigInt>,
    pub group_order: BigInt,
    pub prime: u32,
    /// Every divisor is 1 or `prime`.
    pub p_elementary: bool,
    /// Number of divisors equal to `prime`.
    pub p_length: usize,
}

pub fn discriminant_data(l: &IntegerLattice, p: u32) -> DiscriminantData {
    let divisors = elementary_divisors(l.gram());
    let pb = BigInt::from(p);
    let group_order = divisors.iter().fold(BigInt::one(), |acc, d| acc * d);
    let p_elementary = divisors.iter().all(|d| d.is_one() || *d == pb);
    let p_length = divisors.iter().filter(|d| **d == pb).count();
    DiscriminantData {
        elementary_divisors: divisors,
        group_order,
        prime: p,
        p_elementary,
        p_length,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArtinReport {
    pub sigma: usize,
    /// Rank 22, signature (1,21), discriminant `-p^{2σ}` and `1 ≤ σ ≤ 10`.
    pub genuine_k3: bool,
}

/// Half the p-length of an even p-elementary lattice.
pub fn artin_invariant(l: &IntegerLattice, p: u32) -> Result<ArtinReport> {
    if !l.is_even() {
        return Err(Error::Precondition("Artin invariant needs an even lattice".into()));
    }
    let data = discriminant_data(l, p);
    if !data.p_elementary {
        return Err(Error::NotElementary(p));
    }
    if data.p_length % 2 == 1 {
        return Err(Error::OddLength(data.p_length));
    }
    let sigma = data.p_length / 2;
    let mut genuine_k3 = false;
    if l.rank() == 22 && signature(l)? == (Signature { positive: 1, negative: 21 }) {
        let expected = -Pow::pow(BigInt::from(p), 2 * sigma as u32);
        genuine_k3 = discriminant(l) == expected && (1..=10).contains(&sigma);
    }
    Ok(ArtinReport { sigma, genuine_k3 })
}
