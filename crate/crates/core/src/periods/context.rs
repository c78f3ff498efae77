use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::{
    artin_invariant, dual_quotient, has_minus_two_root, isometry_group_with, orthogonal_complement, saturate,
    signature, DualQuotient, GroupCaps, IntegerLattice, IsometrySet, LatticeEmbedding,
};
use crate::matrix::IntMatrix;

/// `B^{-1} = adjugate / denominator` for the block basis `B = [M | C]`
/// of the image of the marking and its complement.
#[derive(Clone, Debug)]
struct BlockBasis {
    basis: IntMatrix,
    adjugate: IntMatrix,
    denominator: BigInt,
}

impl BlockBasis {
    fn new(image: &IntMatrix, complement: &IntMatrix) -> Result<Self> {
        let basis = image.hcat(complement);
        let inv = basis
            .rational_inverse()
            .ok_or_else(|| Error::InvalidEmbedding("image and complement do not span".into()))?;
        let denominator = inv.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let n = basis.rows();
        let mut adjugate = IntMatrix::zeros(n, n);
        for (i, row) in inv.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                adjugate.set(i, j, x.numer() * (&denominator / x.denom()));
            }
        }
        Ok(BlockBasis { basis, adjugate, denominator })
    }

    /// `B · block · B^{-1}` if it is integral, else the offending
    /// denominator.
    fn conjugate(&self, block: &IntMatrix) -> std::result::Result<IntMatrix, BigInt> {
        let num = self.basis.mul(block).mul(&self.adjugate);
        let mut out = IntMatrix::zeros(num.rows(), num.cols());
        let mut bad = BigInt::one();
        for i in 0..num.rows() {
            for j in 0..num.cols() {
                let (q, r) = num.get(i, j).div_rem(&self.denominator);
                if !r.is_zero() {
                    let g = num.get(i, j).gcd(&self.denominator);
                    bad = bad.lcm(&(&self.denominator / g));
                }
                out.set(i, j, q);
            }
        }
        if bad.is_one() {
            Ok(out)
        } else {
            Err(bad)
        }
    }
}

/// A marked ambient lattice: `γ : S ↪ N`, the complement `K = γ(S)^⊥`
/// and the stabilizer `O(N, γ)`.
#[derive(Clone, Debug)]
pub struct MarkingContext {
    ambient: IntegerLattice,
    p: u32,
    gamma: LatticeEmbedding,
    complement: IntegerLattice,
    complement_inclusion: LatticeEmbedding,
    complement_group: IsometrySet,
    stabilizer: IsometrySet,
    quotient: Option<DualQuotient>,
    block: BlockBasis,
    genuine_k3: bool,
    source_twisted_by_two: bool,
    caps: GroupCaps,
    id: String,
}

pub fn build_marking_context(n: &IntegerLattice, p: u32, gamma: &LatticeEmbedding) -> Result<MarkingContext> {
    build_marking_context_with(n, p, gamma, GroupCaps::default())
}

/// Computes `O(N, γ)` as the isometries `ψ'` of the definite complement
/// for which `id ⊕ ψ'` is integral on `N`.
pub fn build_marking_context_with(
    n: &IntegerLattice,
    p: u32,
    gamma: &LatticeEmbedding,
    caps: GroupCaps,
) -> Result<MarkingContext> {
    if !gamma.target().same_form(n) {
        return Err(Error::InvalidEmbedding("marking does not land in the ambient lattice".into()));
    }
    if !crate::finite_form::is_odd_prime(p) {
        return Err(Error::Precondition(format!("{p} is not an odd prime")));
    }
    let (complement, complement_inclusion) = orthogonal_complement(gamma)?;
    if complement.rank() > 0 {
        let sig = signature(&complement)?;
        if !(sig.is_negative_definite() || sig.is_positive_definite()) {
            return Err(Error::Definiteness { expected: "definite (complement of the marking)" });
        }
    }
    let complement_group = isometry_group_with(&complement, caps)?;
    let block = BlockBasis::new(gamma.matrix(), complement_inclusion.matrix())?;
    let r = gamma.source().rank();
    let mut stabilizer: Vec<IntMatrix> = complement_group
        .elements()
        .expect("full group is listed")
        .iter()
        .filter_map(|psi| block.conjugate(&IntMatrix::identity(r).block_diag(psi)).ok())
        .collect();
    stabilizer.sort();
    let stabilizer = IsometrySet::from_elements(n.clone(), stabilizer)?;
    let quotient = dual_quotient(n, p).ok();
    let genuine_k3 = artin_invariant(n, p).map(|a| a.genuine_k3).unwrap_or(false);
    let two = BigInt::from(2);
    let source_twisted_by_two = gamma.source().gram().entries().all(|x| x.is_multiple_of(&two));
    let id = crate::json::context_id(n, p, gamma);
    Ok(MarkingContext {
        ambient: n.clone(),
        p,
        gamma: gamma.clone(),
        complement,
        complement_inclusion,
        complement_group,
        stabilizer,
        quotient,
        block,
        genuine_k3,
        source_twisted_by_two,
        caps,
        id,
    })
}

impl MarkingContext {
    pub fn ambient(&self) -> &IntegerLattice {
        &self.ambient
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn gamma(&self) -> &LatticeEmbedding {
        &self.gamma
    }

    pub fn complement(&self) -> &IntegerLattice {
        &self.complement
    }

    pub fn complement_inclusion(&self) -> &LatticeEmbedding {
        &self.complement_inclusion
    }

    pub fn complement_group(&self) -> &IsometrySet {
        &self.complement_group
    }

    pub fn stabilizer(&self) -> &IsometrySet {
        &self.stabilizer
    }

    pub fn stabilizer_elements(&self) -> &[IntMatrix] {
        self.stabilizer.elements().expect("stabilizer is listed")
    }

    /// `pN^∨/pN`, present when `N` is even and p-elementary.
    pub fn quotient(&self) -> Result<&DualQuotient> {
        self.quotient
            .as_ref()
            .ok_or_else(|| Error::Precondition("ambient lattice is not even and p-elementary".into()))
    }

    pub fn genuine_k3(&self) -> bool {
        self.genuine_k3
    }

    /// Whether every entry of the source Gram matrix is even.
    pub fn source_twisted_by_two(&self) -> bool {
        self.source_twisted_by_two
    }

    pub fn caps(&self) -> GroupCaps {
        self.caps
    }

    /// Hex SHA-256 of the canonical encoding of `(N, p, γ)`.
    pub fn id(&self) -> &str {
        &self.id
    }

    /// The same context acting through a subgroup of the stabilizer. Every
    /// element must lie in `O(N, γ)`; the identity is added.
    pub fn with_stabilizer_subgroup(&self, elements: Vec<IntMatrix>) -> Result<MarkingContext> {
        let known = self.stabilizer_elements();
        for (i, e) in elements.iter().enumerate() {
            if known.binary_search(e).is_err() {
                return Err(Error::NotIsometry(format!("element {i} does not fix the marking")));
            }
        }
        let mut ctx = self.clone();
        ctx.stabilizer = IsometrySet::from_elements(self.ambient.clone(), elements)?;
        ctx.id = format!("{}/{}", self.id, crate::json::digest_matrices(ctx.stabilizer_elements()));
        Ok(ctx)
    }

    /// The context of the marking `γ ∘ ψ` for an isometry `ψ` of the source.
    pub fn remarked(&self, psi: &IntMatrix) -> Result<MarkingContext> {
        if !self.gamma.source().preserves_form(psi) {
            return Err(Error::NotIsometry("re-marking is not an isometry of the source".into()));
        }
        let gamma = LatticeEmbedding::new(
            self.gamma.source().clone(),
            self.ambient.clone(),
            self.gamma.matrix().mul(psi),
        )?;
        build_marking_context_with(&self.ambient, self.p, &gamma, self.caps)
    }
}

/// Outcome of the admissibility test of a marking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibilityReport {
    pub primitive: bool,
    pub saturation_index: BigInt,
    pub complement_root_free: bool,
    /// Artin invariant of the ambient, when it is a genuine K3 lattice.
    pub sigma: Option<usize>,
    /// `σ ≤ 5`, evaluated only for genuine K3 lattices.
    pub sigma_bound_ok: Option<bool>,
    pub admissible: bool,
}

pub fn check_enriques_admissible(ctx: &MarkingContext) -> Result<AdmissibilityReport> {
    let sat = saturate(&ctx.gamma)?;
    let primitive = sat.index.is_one();
    let complement_root_free = !has_minus_two_root(&ctx.complement)?;
    let (sigma, sigma_bound_ok) = if ctx.genuine_k3 {
        let s = artin_invariant(&ctx.ambient, ctx.p)?.sigma;
        (Some(s), Some(s <= 5))
    } else {
        (None, None)
    };
    let admissible = primitive && complement_root_free && sigma_bound_ok.unwrap_or(true);
    Ok(AdmissibilityReport {
        primitive,
        saturation_index: sat.index,
        complement_root_free,
        sigma,
        sigma_bound_ok,
        admissible,
    })
}

/// The isometry that is `+1` on the image of the marking and `-1` on its
/// complement, when it is integral.
pub fn induced_involution(ctx: &MarkingContext) -> Result<IntMatrix> {
    let r = ctx.gamma.source().rank();
    let k = ctx.complement.rank();
    let block = IntMatrix::identity(r).block_diag(&IntMatrix::identity(k).neg());
    ctx.block.conjugate(&block).map_err(Error::NonIntegral)
}

/// The first isometry `ψ'` of the complement, trying the identity and
/// then the rest of `O(K)` in sorted order, such that `ψ ⊕ ψ'` is
/// integral on `N`. The result `Φ` satisfies `Φ ∘ γ = γ ∘ ψ`.
pub fn extend_isometry(ctx: &MarkingContext, psi: &IntMatrix) -> Result<Option<IntMatrix>> {
    if !ctx.gamma.source().preserves_form(psi) {
        return Err(Error::NotIsometry("map does not preserve the source form".into()));
    }
    let id = IntMatrix::identity(ctx.complement.rank());
    let group = ctx.complement_group.elements().expect("full group is listed");
    for psi_k in std::iter::once(&id).chain(group.iter().filter(|g| **g != id)) {
        if let Ok(phi) = ctx.block.conjugate(&psi.block_diag(psi_k)) {
            return Ok(Some(phi));
        }
    }
    Ok(None)
}

/// Inverse of an isometry: `Q^{-1} = G^{-1} Qᵀ G`.
pub fn isometry_inverse(l: &IntegerLattice, q: &IntMatrix) -> Result<IntMatrix> {
    if !l.preserves_form(q) {
        return Err(Error::NotIsometry("matrix does not preserve the form".into()));
    }
    let inv = q
        .rational_inverse()
        .ok_or_else(|| Error::NotIsometry("singular matrix".into()))?;
    crate::matrix::rational_to_integer(&inv, q.cols()).map_err(Error::NonIntegral)
}

#[cfg(test)]
fn abs_det_is_one(q: &IntMatrix) -> bool {
    num_traits::Signed::abs(&q.det()).is_one()
}
