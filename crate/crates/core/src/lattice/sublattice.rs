use num_bigint::BigInt;
use num_traits::Signed;

use super::{IntegerLattice, LatticeEmbedding};
use crate::error::{Error, Result};
use crate::matrix::{integer_kernel, rat_mul, rational_to_integer, IntMatrix};

/// `{x ∈ target : ⟨x, image⟩ = 0}` with its Hermite basis, induced form
/// and inclusion into the target.
pub fn orthogonal_complement(emb: &LatticeEmbedding) -> Result<(IntegerLattice, LatticeEmbedding)> {
    let target = emb.target();
    let pairing = emb.matrix().transpose().mul(target.gram());
    let basis = integer_kernel(&pairing);
    let inclusion = IntMatrix::from_columns(&basis, target.rank());
    let gram = inclusion.transpose().mul(target.gram()).mul(&inclusion);
    let complement = IntegerLattice::new(gram)?;
    let embedding = LatticeEmbedding::new(complement.clone(), target.clone(), inclusion)?;
    Ok((complement, embedding))
}

/// Result of saturating an embedding: the primitive hull of the image.
#[derive(Clone, Debug)]
pub struct Saturation {
    pub embedding: LatticeEmbedding,
    /// `[saturation : image]`.
    pub index: BigInt,
}

/// `(image ⊗ Q) ∩ target`, computed as the kernel of the annihilator of
/// the image. The Hermite basis makes the operation idempotent.
pub fn saturate(emb: &LatticeEmbedding) -> Result<Saturation> {
    let target = emb.target();
    let n = target.rank();
    let m = emb.matrix();
    let annihilator = integer_kernel(&m.transpose());
    let ann = IntMatrix::from_rows_shaped(annihilator, n)?;
    let sat_basis = integer_kernel(&ann);
    let s = IntMatrix::from_columns(&sat_basis, n);

    // coordinates of the image in the saturated basis: T = (SᵀS)⁻¹ Sᵀ M
    let sts = s.transpose().mul(&s);
    let inv = sts
        .rational_inverse()
        .ok_or_else(|| Error::InvalidEmbedding("degenerate saturation basis".into()))?;
    let coords = rat_mul(&rat_mul(&inv, &s.transpose().to_rational()), &m.to_rational());
    let t = rational_to_integer(&coords, m.cols())
        .map_err(|d| Error::InvalidEmbedding(format!("image not inside its saturation (denominator {d})")))?;
    let index = t.det().abs();

    let gram = s.transpose().mul(target.gram()).mul(&s);
    let source = IntegerLattice::new(gram)?;
    let embedding = LatticeEmbedding::new(source, target.clone(), s)?;
    Ok(Saturation { embedding, index })
}

pub fn is_primitive(emb: &LatticeEmbedding) -> Result<bool> {
    Ok(saturate(emb)?.index == BigInt::from(1))
}

/// `j ∘ γ`. The target of `γ` must carry the same form as the source of `j`.
pub fn compose_embeddings(j: &LatticeEmbedding, gamma: &LatticeEmbedding) -> Result<LatticeEmbedding> {
    if j.source().rank() != gamma.target().rank() {
        return Err(Error::InvalidEmbedding(format!(
            "rank mismatch: outer source has rank {}, inner target has rank {}",
            j.source().rank(),
            gamma.target().rank()
        )));
    }
    if !j.source().same_form(gamma.target()) {
        return Err(Error::InvalidEmbedding("outer source and inner target carry different forms".into()));
    }
    LatticeEmbedding::new(gamma.source().clone(), j.target().clone(), j.matrix().mul(gamma.matrix()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{construct_standard, int_vec};

    fn lat(e: &str) -> IntegerLattice {
        construct_standard(e).unwrap()
    }

    fn span(target: &IntegerLattice, vs: &[&[i64]]) -> LatticeEmbedding {
        let vecs: Vec<_> = vs.iter().map(|v| int_vec(v)).collect();
        LatticeEmbedding::from_vectors(target, &vecs).unwrap()
    }

    #[test]
    fn complement_of_coordinate_line() {
        let n = lat("diag(-4,-4)");
        let (k, inc) = orthogonal_complement(&span(&n, &[&[1, 0]])).unwrap();
        assert!(k.same_form(&lat("diag(-4)")));
        assert_eq!(inc.image_vectors(), vec![int_vec(&[0, 1])]);
    }

    #[test]
    fn complement_in_a2() {
        let n = lat("twist(A2,-1)");
        let (k, inc) = orthogonal_complement(&span(&n, &[&[1, 0]])).unwrap();
        assert!(k.same_form(&lat("diag(-6)")));
        assert_eq!(inc.image_vectors(), vec![int_vec(&[1, 2])]);
    }

    #[test]
    fn complement_of_full_rank_is_zero() {
        let n = lat("twist(A2,-1)");
        let (k, _) = orthogonal_complement(&LatticeEmbedding::identity(&n)).unwrap();
        assert_eq!(k.rank(), 0);
    }

    #[test]
    fn saturation_of_doubled_vector() {
        // e1 + e2 has norm 2 in U; twice it spans an index-2 sublattice.
        let u = lat("U");
        let e = span(&u, &[&[2, 2]]);
        let s = saturate(&e).unwrap();
        assert_eq!(s.index, BigInt::from(2));
        assert_eq!(s.embedding.image_vectors(), vec![int_vec(&[1, 1])]);
        assert!(!is_primitive(&e).unwrap());
        let again = saturate(&s.embedding).unwrap();
        assert_eq!(again.index, BigInt::from(1));
        assert_eq!(again.embedding, s.embedding);
    }

    #[test]
    fn coordinate_line_in_a2_is_primitive() {
        let n = lat("twist(A2,-1)");
        assert!(is_primitive(&span(&n, &[&[1, 0]])).unwrap());
    }

    #[test]
    fn composition_rules() {
        let gamma = lat("Gamma");
        let u = lat("U");
        let inc = LatticeEmbedding::new(
            u.clone(),
            gamma.clone(),
            IntMatrix::from_columns(
                &[int_vec(&[1, 0, 0, 0, 0, 0, 0, 0, 0, 0]), int_vec(&[0, 1, 0, 0, 0, 0, 0, 0, 0, 0])],
                10,
            ),
        )
        .unwrap();
        let line = span(&u, &[&[1, -2]]);
        let c = compose_embeddings(&inc, &line).unwrap();
        assert_eq!(c.image_vectors(), vec![int_vec(&[1, -2, 0, 0, 0, 0, 0, 0, 0, 0])]);
        let id = LatticeEmbedding::identity(&u);
        assert_eq!(compose_embeddings(&id, &line).unwrap(), line);
        assert!(compose_embeddings(&line, &inc).is_err());
    }
}
