//! Integer lattices: nondegenerate symmetric bilinear forms on `Z^n`.
//!
//! A lattice is stored as its Gram matrix in a fixed basis. Vectors are
//! coordinate vectors in that basis, and an embedding `S ↪ T` is the
//! matrix whose columns are the images of the basis of `S`.

mod glue;
mod invariants;
mod isometry;
mod standard;
mod sublattice;
mod vectors;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

pub use glue::{dual_quotient, dual_quotient_form, overlattice_from_glue, overlattice_with_inclusion, DualQuotient};
pub use invariants::{
    artin_invariant, discriminant, discriminant_data, signature, ArtinReport, DiscriminantData, Signature,
};
pub use isometry::{
    embeddings_isomorphic, find_isometry_mapping, isometry_group, isometry_group_with, GroupCaps, IsometrySet,
    Verdict, DEFAULT_ELEMENT_CAP, DEFAULT_RANK_CAP,
};
pub use standard::{construct_standard, e8_gram};
pub use sublattice::{compose_embeddings, is_primitive, orthogonal_complement, saturate, Saturation};
pub use vectors::{
    enumerate_norm_vectors, enumerate_norm_vectors_with, has_minus_two_root, reflection_in_root,
};

/// A finite-rank lattice with a nondegenerate integral symmetric form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntegerLattice {
    gram: IntMatrix,
    label: Option<String>,
}

impl IntegerLattice {
    /// Validates symmetry and nondegeneracy of `gram`.
    pub fn new(gram: IntMatrix) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::InvalidLattice("Gram matrix is not square".into()));
        }
        if !gram.is_symmetric() {
            return Err(Error::InvalidLattice("Gram matrix is not symmetric".into()));
        }
        if gram.det().is_zero() {
            return Err(Error::InvalidLattice("Gram matrix is singular".into()));
        }
        Ok(IntegerLattice { gram, label: None })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(IntMatrix::from_rows(rows)?)
    }

    /// The lattice of rank zero.
    pub fn zero() -> Self {
        IntegerLattice {
            gram: IntMatrix::zeros(0, 0),
            label: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn without_label(mut self) -> Self {
        self.label = None;
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    /// Two lattices have the same form when their Gram matrices agree
    /// entrywise (labels are ignored).
    pub fn same_form(&self, other: &IntegerLattice) -> bool {
        self.gram == other.gram
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram.get(i, i).is_even())
    }

    pub fn inner(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        let gy = self.gram.mul_vec(y);
        x.iter().zip(&gy).fold(BigInt::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn norm(&self, x: &[BigInt]) -> BigInt {
        self.inner(x, x)
    }

    /// `L(n)`: the same group with the form multiplied by `n`.
    pub fn twist(&self, n: i64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Malformed("twist by 0".into()));
        }
        Self::new(self.gram.scaled(&BigInt::from(n)))
    }

    pub fn direct_sum(&self, other: &IntegerLattice) -> Self {
        IntegerLattice {
            gram: self.gram.block_diag(&other.gram),
            label: None,
        }
    }

    /// Checks `qᵀ G q = G` for a square matrix of matching size.
    pub fn preserves_form(&self, q: &IntMatrix) -> bool {
        q.rows() == self.rank() && q.cols() == self.rank() && q.transpose().mul(&self.gram).mul(q) == self.gram
    }
}

impl std::fmt::Debug for IntegerLattice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.label {
            Some(l) => write!(f, "Lattice({l}: {:?})", self.gram),
            None => write!(f, "Lattice({:?})", self.gram),
        }
    }
}

/// A form-preserving injection `source ↪ target`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeEmbedding {
    source: IntegerLattice,
    target: IntegerLattice,
    matrix: IntMatrix,
}

impl LatticeEmbedding {
    /// Validates the shape and `Mᵀ G_target M = G_source`. Injectivity
    /// follows because the source form is nondegenerate.
    pub fn new(source: IntegerLattice, target: IntegerLattice, matrix: IntMatrix) -> Result<Self> {
        if matrix.rows() != target.rank() || matrix.cols() != source.rank() {
            return Err(Error::InvalidEmbedding(format!(
                "matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.rank(),
                source.rank()
            )));
        }
        if matrix.transpose().mul(target.gram()).mul(&matrix) != *source.gram() {
            return Err(Error::InvalidEmbedding(
                "matrix does not carry the target form to the source form".into(),
            ));
        }
        Ok(LatticeEmbedding { source, target, matrix })
    }

    /// The sublattice spanned by the given target vectors, with its
    /// inclusion. Fails if the span is degenerate.
    pub fn from_vectors(target: &IntegerLattice, vectors: &[Vec<BigInt>]) -> Result<Self> {
        let m = IntMatrix::from_columns(vectors, target.rank());
        let gram = m.transpose().mul(target.gram()).mul(&m);
        let source = IntegerLattice::new(gram)?;
        Self::new(source, target.clone(), m)
    }

    pub fn identity(l: &IntegerLattice) -> Self {
        LatticeEmbedding {
            source: l.clone(),
            target: l.clone(),
            matrix: IntMatrix::identity(l.rank()),
        }
    }

    pub fn source(&self) -> &IntegerLattice {
        &self.source
    }

    pub fn target(&self) -> &IntegerLattice {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn image_vectors(&self) -> Vec<Vec<BigInt>> {
        self.matrix.columns()
    }
}

#[cfg(test)]
pub(crate) fn int_vec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grams() {
        assert!(IntegerLattice::from_rows(&[vec![1, 2], vec![3, 1]]).is_err());
        assert!(IntegerLattice::from_rows(&[vec![1, 1], vec![1, 1]]).is_err());
        assert!(IntegerLattice::from_rows(&[vec![1, 1]]).is_err());
    }

    #[test]
    fn embedding_invariant_is_enforced() {
        let u = IntegerLattice::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
        let src = IntegerLattice::from_rows(&[vec![-4]]).unwrap();
        // e1 is isotropic, so it cannot carry a norm -4 generator.
        let bad = IntMatrix::from_rows(&[vec![1], vec![0]]).unwrap();
        assert!(LatticeEmbedding::new(src.clone(), u.clone(), bad).is_err());
        let good = IntMatrix::from_rows(&[vec![1], vec![-2]]).unwrap();
        assert!(LatticeEmbedding::new(src, u, good).is_ok());
    }
}
