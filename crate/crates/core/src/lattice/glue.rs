//! The quotient `pL^∨/pL` of a p-elementary lattice and overlattices
//! obtained from isotropic subspaces of it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::{discriminant_data, IntegerLattice, LatticeEmbedding};
use crate::error::{Error, Result};
use crate::finite_form::{is_odd_prime, FiniteQuadraticSpace, PrimeMatrix, Subspace};
use crate::matrix::{rational_to_integer, row_hnf, IntMatrix};

/// A basis of `pL^∨/pL` together with integral lifts.
#[derive(Clone, Debug)]
pub struct DualQuotient {
    lattice: IntegerLattice,
    p: u32,
    /// Lifts in `pL^∨` with coordinates in `[0, p)`; their reductions are
    /// the reduced echelon basis of the image of `pL^∨` in `L/pL`.
    lifts: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
    space: FiniteQuadraticSpace,
}

fn mod_p(x: &BigInt, p: u32) -> u32 {
    x.mod_floor(&BigInt::from(p)).to_u32().expect("residue fits")
}

fn inv_mod(a: u64, p: u64) -> u64 {
    (0..p).find(|x| a * x % p == 1).expect("invertible residue")
}

/// Row reduction over `F_p` returning the nonzero rows.
fn rref_mod_p(rows: Vec<Vec<u64>>, p: u64) -> Vec<Vec<u64>> {
    let mut a = rows;
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..a.len()).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(piv, rank);
        let inv = inv_mod(a[rank][c], p);
        for x in a[rank].iter_mut() {
            *x = *x * inv % p;
        }
        let pr = a[rank].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != rank && row[c] != 0 {
                let f = row[c];
                for (x, &y) in row.iter_mut().zip(&pr) {
                    *x = (*x + p * p - f * y) % p;
                }
            }
        }
        rank += 1;
    }
    a.truncate(rank);
    a
}

impl DualQuotient {
    pub fn lattice(&self) -> &IntegerLattice {
        &self.lattice
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn space(&self) -> &FiniteQuadraticSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.lifts.len()
    }

    pub fn lifts(&self) -> &[Vec<BigInt>] {
        &self.lifts
    }

    /// Coordinates of `v ∈ pL^∨` in the quotient basis. Since the lifts are
    /// in echelon form, these are the residues at the pivot columns.
    pub fn coordinates(&self, v: &[BigInt]) -> Vec<u32> {
        self.pivots.iter().map(|&c| mod_p(&v[c], self.p)).collect()
    }

    /// A lift in `pL^∨` of a quotient vector with coordinates in `[0, p)`.
    pub fn lift(&self, coords: &[u32]) -> Vec<BigInt> {
        let n = self.lattice.rank();
        let mut v = vec![BigInt::zero(); n];
        for (c, b) in coords.iter().zip(&self.lifts) {
            for (x, y) in v.iter_mut().zip(b) {
                *x += y * BigInt::from(*c);
            }
        }
        v
    }

    /// The map induced on the quotient by an isometry of `L`.
    pub fn action(&self, q: &IntMatrix) -> Result<PrimeMatrix> {
        if !self.lattice.preserves_form(q) {
            return Err(Error::NotIsometry("matrix does not preserve the lattice form".into()));
        }
        let k = self.dim();
        let images: Vec<Vec<u32>> = self.lifts.iter().map(|b| self.coordinates(&q.mul_vec(b))).collect();
        Ok((0..k).map(|i| (0..k).map(|j| images[j][i]).collect()).collect())
    }
}

fn check_even_elementary(l: &IntegerLattice, p: u32) -> Result<()> {
    if !is_odd_prime(p) {
        return Err(Error::Precondition(format!("{p} is not an odd prime")));
    }
    if !l.is_even() {
        return Err(Error::Precondition("lattice is not even".into()));
    }
    if !discriminant_data(l, p).p_elementary {
        return Err(Error::NotElementary(p));
    }
    Ok(())
}

pub fn dual_quotient(l: &IntegerLattice, p: u32) -> Result<DualQuotient> {
    check_even_elementary(l, p)?;
    let n = l.rank();
    let pb = BigInt::from(p);
    let inv = l.gram().rational_inverse().expect("nondegenerate lattice");
    let scaled: Vec<Vec<_>> = inv
        .iter()
        .map(|r| r.iter().map(|x| x * num_rational::BigRational::from_integer(pb.clone())).collect())
        .collect();
    let p_dual = rational_to_integer(&scaled, n).map_err(|_| Error::NotElementary(p))?;
    // rows of the reduction are the columns of p·G^{-1}
    let rows: Vec<Vec<u64>> = (0..n)
        .map(|j| (0..n).map(|i| mod_p(p_dual.get(i, j), p) as u64).collect())
        .collect();
    let reduced = rref_mod_p(rows, p as u64);
    let pivots: Vec<usize> = reduced.iter().map(|r| r.iter().position(|&x| x != 0).unwrap()).collect();
    let lifts: Vec<Vec<BigInt>> = reduced.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let gram: Vec<Vec<i64>> = lifts
        .iter()
        .map(|x| {
            lifts
                .iter()
                .map(|y| {
                    let v = l.inner(x, y);
                    debug_assert!(v.is_multiple_of(&pb));
                    mod_p(&(v / &pb), p) as i64
                })
                .collect()
        })
        .collect();
    let space = FiniteQuadraticSpace::new(p, &gram)?;
    Ok(DualQuotient {
        lattice: l.clone(),
        p,
        lifts,
        pivots,
        space,
    })
}

/// `N_0 = pL^∨/pL` with the form `⟨x, y⟩/p mod p`.
pub fn dual_quotient_form(l: &IntegerLattice, p: u32) -> Result<FiniteQuadraticSpace> {
    Ok(dual_quotient(l, p)?.space)
}

pub fn overlattice_from_glue(l: &IntegerLattice, p: u32, glue: &Subspace) -> Result<IntegerLattice> {
    Ok(overlattice_with_inclusion(l, p, glue)?.0)
}

/// `L + (1/p)·{v ∈ pL^∨ : v̄ ∈ Λ}` for a totally isotropic `Λ ⊆ N_0`,
/// with the inclusion of `L`. The basis of the overlattice is the Hermite
/// basis of `p` times it, divided by `p`.
pub fn overlattice_with_inclusion(
    l: &IntegerLattice,
    p: u32,
    glue: &Subspace,
) -> Result<(IntegerLattice, LatticeEmbedding)> {
    let dq = dual_quotient(l, p)?;
    if glue.ambient() != dq.space() {
        return Err(Error::Dimension("glue subspace does not live in the dual quotient".into()));
    }
    let glue = glue
        .over_degree(1)
        .map_err(|_| Error::Dimension("glue subspace is not defined over the prime field".into()))?;
    if !glue.is_totally_isotropic() {
        return Err(Error::Precondition("glue subspace is not totally isotropic".into()));
    }
    let n = l.rank();
    let pb = BigInt::from(p);
    let mut generators: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { pb.clone() } else { BigInt::zero() }).collect())
        .collect();
    generators.extend(glue.rows().iter().map(|r| dq.lift(r)));
    let basis = row_hnf(&generators, n);
    let b = IntMatrix::from_rows_shaped(basis, n)?;
    let p2 = &pb * &pb;
    let scaled = b.mul(l.gram()).mul(&b.transpose());
    let mut gram = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let (q, r) = scaled.get(i, j).div_rem(&p2);
            if !r.is_zero() {
                return Err(Error::InvalidLattice("glue produces a non-integral form".into()));
            }
            gram.set(i, j, q);
        }
    }
    let over = IntegerLattice::new(gram)?;
    if !over.is_even() {
        return Err(Error::InvalidLattice("overlattice is not even".into()));
    }
    // p·e_i = Σ c_ij b_j, so the images of e_i are the rows of p·B^{-1}
    let inv = b.rational_inverse().expect("full-rank basis");
    let scaled_inv: Vec<Vec<_>> = inv
        .iter()
        .map(|r| r.iter().map(|x| x * num_rational::BigRational::from_integer(pb.clone())).collect())
        .collect();
    let c = rational_to_integer(&scaled_inv, n).map_err(|d| {
        Error::InvalidLattice(format!("lattice is not contained in its overlattice (denominator {d})"))
    })?;
    let inclusion = LatticeEmbedding::new(l.clone(), over.clone(), c.transpose())?;
    Ok((over, inclusion))
}
