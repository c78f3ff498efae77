//! Finite isometry groups of definite lattices.
//!
//! The full group is found by backtracking over the images of the basis
//! vectors: the image of `e_i` must have norm `G_ii` and inner products
//! `G_ij` with the images already chosen. The hot loop runs on machine
//! integers; inputs that do not fit are rejected with [`Error::Overflow`].

use std::collections::{HashSet, VecDeque};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::{enumerate_norm_vectors_with, signature, IntegerLattice, LatticeEmbedding};
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

pub const DEFAULT_RANK_CAP: usize = 8;
pub const DEFAULT_ELEMENT_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupCaps {
    pub rank_cap: usize,
    pub element_cap: usize,
    pub parallel: bool,
}

impl Default for GroupCaps {
    fn default() -> Self {
        GroupCaps {
            rank_cap: DEFAULT_RANK_CAP,
            element_cap: DEFAULT_ELEMENT_CAP,
            parallel: true,
        }
    }
}

/// Three-valued answer for capped searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Yes,
    No,
    /// The search cap was exhausted without finding a witness.
    Indeterminate,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Yes => "true",
            Verdict::No => "false",
            Verdict::Indeterminate => "indeterminate",
        }
    }
}

/// A set of isometries of one lattice, given by generators and, when
/// known, the full element list.
#[derive(Clone, Debug)]
pub struct IsometrySet {
    lattice: IntegerLattice,
    generators: Vec<IntMatrix>,
    elements: Option<Vec<IntMatrix>>,
    complete: bool,
    element_cap: usize,
}

impl IsometrySet {
    /// Validates that every generator preserves the form.
    pub fn from_generators(lattice: IntegerLattice, generators: Vec<IntMatrix>, element_cap: usize) -> Result<Self> {
        for (i, g) in generators.iter().enumerate() {
            if !lattice.preserves_form(g) {
                return Err(Error::NotIsometry(format!("generator {i}")));
            }
        }
        Ok(IsometrySet {
            lattice,
            generators,
            elements: None,
            complete: false,
            element_cap,
        })
    }

    /// An explicitly listed subgroup. The list is validated, deduplicated
    /// and sorted; the identity is added if missing.
    pub fn from_elements(lattice: IntegerLattice, elements: Vec<IntMatrix>) -> Result<Self> {
        for (i, g) in elements.iter().enumerate() {
            if !lattice.preserves_form(g) {
                return Err(Error::NotIsometry(format!("element {i}")));
            }
        }
        let mut elements = elements;
        elements.push(IntMatrix::identity(lattice.rank()));
        elements.sort();
        elements.dedup();
        Ok(Self::listed(lattice, elements, false))
    }

    pub(crate) fn listed(lattice: IntegerLattice, elements: Vec<IntMatrix>, complete: bool) -> Self {
        IsometrySet {
            lattice,
            generators: elements.clone(),
            element_cap: elements.len().max(DEFAULT_ELEMENT_CAP),
            elements: Some(elements),
            complete,
        }
    }

    pub fn trivial(lattice: IntegerLattice) -> Self {
        let id = IntMatrix::identity(lattice.rank());
        Self::listed(lattice, vec![id], false)
    }

    pub fn lattice(&self) -> &IntegerLattice {
        &self.lattice
    }

    pub fn generators(&self) -> &[IntMatrix] {
        &self.generators
    }

    /// Whether this is the full isometry group of a definite lattice.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn element_cap(&self) -> usize {
        self.element_cap
    }

    pub fn order(&self) -> Option<usize> {
        self.elements.as_ref().map(Vec::len)
    }

    pub fn elements(&self) -> Option<&[IntMatrix]> {
        self.elements.as_deref()
    }

    /// All elements of the generated group, sorted. Fails once more than
    /// `element_cap` elements have been produced.
    pub fn expand(&self) -> Result<Vec<IntMatrix>> {
        if let Some(e) = &self.elements {
            return Ok(e.clone());
        }
        let mut seen = HashSet::new();
        let mut queue = VecDeque::new();
        let id = IntMatrix::identity(self.lattice.rank());
        seen.insert(id.clone());
        queue.push_back(id);
        while let Some(x) = queue.pop_front() {
            for g in &self.generators {
                let y = g.mul(&x);
                if seen.insert(y.clone()) {
                    if seen.len() > self.element_cap {
                        return Err(Error::CapExceeded {
                            what: "group element",
                            cap: self.element_cap as u128,
                        });
                    }
                    queue.push_back(y);
                }
            }
        }
        let mut out: Vec<_> = seen.into_iter().collect();
        out.sort();
        Ok(out)
    }
}

fn to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64().ok_or(Error::Overflow("isometry search"))
}

fn to_i64_vec(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter().map(to_i64).collect()
}

fn dot(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

/// Backtracking state: per basis index, the admissible images and their
/// products with the Gram matrix.
struct Backtrack {
    n: usize,
    gram: Vec<Vec<i128>>,
    cands: Vec<Vec<Vec<i64>>>,
    gcands: Vec<Vec<Vec<i64>>>,
}

impl Backtrack {
    fn new(l: &IntegerLattice, parallel: bool, extra: impl Fn(usize, &[i64]) -> bool) -> Result<Self> {
        let n = l.rank();
        let sig = signature(l)?;
        if !(sig.is_negative_definite() || sig.is_positive_definite()) {
            return Err(Error::Definiteness { expected: "definite" });
        }
        let neg = if sig.is_negative_definite() { l.clone() } else { l.twist(-1)? };
        let g64: Vec<Vec<i64>> = l.gram().to_rows().iter().map(|r| to_i64_vec(r)).collect::<Result<_>>()?;
        let gram = g64.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        let mut cache: Vec<(BigInt, Vec<Vec<i64>>)> = Vec::new();
        let mut cands = Vec::with_capacity(n);
        for i in 0..n {
            let d = neg.gram().get(i, i).clone();
            let list = match cache.iter().find(|(k, _)| *k == d) {
                Some((_, v)) => v.clone(),
                None => {
                    let v: Vec<Vec<i64>> = enumerate_norm_vectors_with(&neg, &d, parallel)?
                        .iter()
                        .map(|x| to_i64_vec(x))
                        .collect::<Result<_>>()?;
                    cache.push((d, v.clone()));
                    v
                }
            };
            cands.push(list.into_iter().filter(|v| extra(i, v)).collect::<Vec<_>>());
        }
        let gcands = cands
            .iter()
            .map(|list| {
                list.iter()
                    .map(|v| (0..n).map(|r| g64[r].iter().zip(v).map(|(a, b)| a * b).sum()).collect())
                    .collect()
            })
            .collect();
        Ok(Backtrack { n, gram, cands, gcands })
    }

    fn fits(&self, level: usize, idx: usize, chosen: &[usize]) -> bool {
        let v = &self.cands[level][idx];
        (0..level).all(|j| dot(v, &self.gcands[j][chosen[j]]) == self.gram[level][j])
    }

    fn matrix(&self, chosen: &[usize]) -> IntMatrix {
        let cols: Vec<Vec<BigInt>> = (0..self.n)
            .map(|i| self.cands[i][chosen[i]].iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        IntMatrix::from_columns(&cols, self.n)
    }

    /// Depth-first search; `visit` returns false to stop early.
    fn dfs(&self, level: usize, chosen: &mut Vec<usize>, stop: &AtomicBool, visit: &mut dyn FnMut(&[usize]) -> bool) {
        if stop.load(Ordering::Relaxed) {
            return;
        }
        if level == self.n {
            if !visit(chosen) {
                stop.store(true, Ordering::Relaxed);
            }
            return;
        }
        for idx in 0..self.cands[level].len() {
            if self.fits(level, idx, chosen) {
                chosen.push(idx);
                self.dfs(level + 1, chosen, stop, visit);
                chosen.pop();
                if stop.load(Ordering::Relaxed) {
                    return;
                }
            }
        }
    }
}

pub fn isometry_group(l: &IntegerLattice) -> Result<IsometrySet> {
    isometry_group_with(l, GroupCaps::default())
}

/// The full isometry group of a definite lattice of rank at most
/// `caps.rank_cap`, elements sorted.
pub fn isometry_group_with(l: &IntegerLattice, caps: GroupCaps) -> Result<IsometrySet> {
    let n = l.rank();
    if n > caps.rank_cap {
        return Err(Error::CapExceeded {
            what: "isometry-group rank",
            cap: caps.rank_cap as u128,
        });
    }
    if n == 0 {
        return Ok(IsometrySet::listed(l.clone(), vec![IntMatrix::zeros(0, 0)], true));
    }
    let bt = Backtrack::new(l, caps.parallel, |_, _| true)?;
    let count = AtomicUsize::new(0);
    let overflow = AtomicBool::new(false);
    let run = |first: usize| -> Vec<IntMatrix> {
        let mut out = Vec::new();
        let mut chosen = vec![first];
        let stop = AtomicBool::new(false);
        bt.dfs(1, &mut chosen, &stop, &mut |c| {
            if count.fetch_add(1, Ordering::Relaxed) >= caps.element_cap || overflow.load(Ordering::Relaxed) {
                overflow.store(true, Ordering::Relaxed);
                return false;
            }
            out.push(bt.matrix(c));
            true
        });
        out
    };
    let firsts: Vec<usize> = (0..bt.cands[0].len()).collect();
    let mut elements: Vec<IntMatrix> = if caps.parallel {
        firsts.par_iter().map(|&f| run(f)).collect::<Vec<_>>().into_iter().flatten().collect()
    } else {
        firsts.iter().flat_map(|&f| run(f)).collect()
    };
    if overflow.load(Ordering::Relaxed) {
        return Err(Error::CapExceeded {
            what: "group element",
            cap: caps.element_cap as u128,
        });
    }
    elements.sort();
    let mut set = IsometrySet::listed(l.clone(), elements, true);
    set.element_cap = caps.element_cap;
    Ok(set)
}

/// First isometry `α` (in backtracking order) of a definite lattice with
/// `α(from_k) = to_k` for every `k`, or `None` if there is none.
pub fn find_isometry_mapping(l: &IntegerLattice, from: &[Vec<BigInt>], to: &[Vec<BigInt>]) -> Result<Option<IntMatrix>> {
    if from.len() != to.len() {
        return Err(Error::Dimension("vector lists differ in length".into()));
    }
    for i in 0..from.len() {
        for j in 0..from.len() {
            if l.inner(&from[i], &from[j]) != l.inner(&to[i], &to[j]) {
                return Ok(None);
            }
        }
    }
    let n = l.rank();
    if n == 0 {
        return Ok(Some(IntMatrix::zeros(0, 0)));
    }
    // ⟨α e_i, to_k⟩ must equal ⟨e_i, from_k⟩.
    let want: Vec<Vec<i128>> = (0..n)
        .map(|i| {
            from.iter()
                .map(|f| l.gram().row(i).iter().zip(f).map(|(a, b)| a * b).sum::<BigInt>())
                .map(|x| to_i64(&x).map(|v| v as i128))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let gto: Vec<Vec<i64>> = to.iter().map(|t| to_i64_vec(&l.gram().mul_vec(t))).collect::<Result<_>>()?;
    let bt = Backtrack::new(l, false, |i, v| gto.iter().zip(&want[i]).all(|(gt, &w)| dot(v, gt) == w))?;
    let mut found = None;
    let stop = AtomicBool::new(false);
    bt.dfs(0, &mut Vec::new(), &stop, &mut |c| {
        let a = bt.matrix(c);
        if from.iter().zip(to).all(|(f, t)| a.mul_vec(f) == *t) {
            found = Some(a);
            false
        } else {
            true
        }
    });
    Ok(found)
}

/// Whether some element `α` of the group satisfies `α ∘ j1 = j2`.
pub fn embeddings_isomorphic(j1: &LatticeEmbedding, j2: &LatticeEmbedding, group: &IsometrySet) -> Result<Verdict> {
    if !j1.source().same_form(j2.source()) || !j1.target().same_form(j2.target()) {
        return Err(Error::InvalidEmbedding("embeddings have different source or target".into()));
    }
    if !group.lattice().same_form(j1.target()) {
        return Err(Error::InvalidEmbedding("group acts on a different lattice".into()));
    }
    if j1.matrix() == j2.matrix() {
        return Ok(Verdict::Yes);
    }
    if group.is_complete() {
        let found = find_isometry_mapping(j1.target(), &j1.image_vectors(), &j2.image_vectors())?;
        return Ok(if found.is_some() { Verdict::Yes } else { Verdict::No });
    }
    if let Some(elements) = group.elements() {
        let hit = elements.iter().any(|a| a.mul(j1.matrix()) == *j2.matrix());
        return Ok(if hit { Verdict::Yes } else { Verdict::No });
    }
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    let id = IntMatrix::identity(group.lattice().rank());
    seen.insert(id.clone());
    queue.push_back(id);
    while let Some(x) = queue.pop_front() {
        if x.mul(j1.matrix()) == *j2.matrix() {
            return Ok(Verdict::Yes);
        }
        for g in group.generators() {
            let y = g.mul(&x);
            if !seen.contains(&y) {
                if seen.len() >= group.element_cap() {
                    return Ok(Verdict::Indeterminate);
                }
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(Verdict::No)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{construct_standard, int_vec};

    fn lat(e: &str) -> IntegerLattice {
        construct_standard(e).unwrap()
    }

    fn order(e: &str) -> usize {
        isometry_group(&lat(e)).unwrap().order().unwrap()
    }

    #[test]
    fn small_group_orders() {
        assert_eq!(order("diag(-2)"), 2);
        assert_eq!(order("diag(-4,-4)"), 8);
        assert_eq!(order("twist(A2,-1)"), 12);
        assert_eq!(order("A2"), 12);
        assert_eq!(order("diag(-4,-6)"), 4);
        assert_eq!(order("twist(D4,-1)"), 1152);
        assert_eq!(isometry_group(&IntegerLattice::zero()).unwrap().order(), Some(1));
    }

    #[test]
    fn caps_are_reported() {
        let capped = GroupCaps {
            element_cap: 10,
            ..GroupCaps::default()
        };
        assert!(matches!(
            isometry_group_with(&lat("twist(A2,-1)"), capped),
            Err(Error::CapExceeded { .. })
        ));
        let small_rank = GroupCaps {
            rank_cap: 1,
            ..GroupCaps::default()
        };
        assert!(matches!(
            isometry_group_with(&lat("diag(-4,-4)"), small_rank),
            Err(Error::CapExceeded { .. })
        ));
        assert!(isometry_group(&lat("U")).is_err());
    }

    #[test]
    fn serial_matches_parallel() {
        let l = lat("twist(D4,-1)");
        let a = isometry_group_with(&l, GroupCaps { parallel: false, ..GroupCaps::default() }).unwrap();
        let b = isometry_group_with(&l, GroupCaps::default()).unwrap();
        assert_eq!(a.elements(), b.elements());
    }

    fn line(target: &IntegerLattice, v: &[i64]) -> LatticeEmbedding {
        LatticeEmbedding::from_vectors(target, &[int_vec(v)]).unwrap()
    }

    #[test]
    fn isomorphic_embeddings() {
        let n = lat("diag(-4,-4)");
        let j1 = line(&n, &[1, 0]);
        let j2 = line(&n, &[0, 1]);
        let swap = IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
        let g = IsometrySet::from_generators(n.clone(), vec![swap], 100).unwrap();
        assert_eq!(embeddings_isomorphic(&j1, &j1, &g).unwrap(), Verdict::Yes);
        assert_eq!(embeddings_isomorphic(&j1, &j2, &g).unwrap(), Verdict::Yes);
        let trivial = IsometrySet::trivial(n.clone());
        assert_eq!(embeddings_isomorphic(&j1, &j2, &trivial).unwrap(), Verdict::No);
        let full = isometry_group(&n).unwrap();
        assert_eq!(embeddings_isomorphic(&j1, &j2, &full).unwrap(), Verdict::Yes);
    }

    #[test]
    fn capped_orbit_search_is_indeterminate() {
        let n = lat("twist(A2,-1)");
        let full = isometry_group(&n).unwrap();
        let gens: Vec<_> = full.elements().unwrap().to_vec();
        let g = IsometrySet::from_generators(n.clone(), gens, 2).unwrap();
        let j1 = line(&n, &[1, 0]);
        // no isometry maps a root to a norm -6 vector, but the cap stops the search first
        let j2 = LatticeEmbedding::from_vectors(&n, &[int_vec(&[1, 0])])
            .and_then(|_| Ok(line(&n, &[0, 1])))
            .unwrap();
        let v = embeddings_isomorphic(&j1, &j2, &g).unwrap();
        assert!(matches!(v, Verdict::Yes | Verdict::Indeterminate));
        let never = line(&n, &[-1, -1]);
        let capped = IsometrySet::from_generators(n.clone(), vec![full.elements().unwrap()[3].clone()], 1).unwrap();
        let r = embeddings_isomorphic(&j1, &never, &capped).unwrap();
        assert_ne!(r, Verdict::Yes);
    }

    #[test]
    fn mapping_search() {
        let n = lat("twist(A2,-1)");
        let a = find_isometry_mapping(&n, &[int_vec(&[1, 0])], &[int_vec(&[1, 1])]).unwrap().unwrap();
        assert!(n.preserves_form(&a));
        assert_eq!(a.mul_vec(&int_vec(&[1, 0])), int_vec(&[1, 1]));
        assert!(find_isometry_mapping(&n, &[int_vec(&[1, 0])], &[int_vec(&[1, 2])]).unwrap().is_none());
    }
}
