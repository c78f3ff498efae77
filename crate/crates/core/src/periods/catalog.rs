//! Catalogs of marking classes and overlattice embeddings, the
//! equivalence they generate, and the component census.
//!
//! A catalog at level σ lists representatives `γ : S ↪ N_σ` of marking
//! classes together with embeddings `j : N_σ ↪ N_{σ'}` for `σ' ≤ σ`.
//! Two markings are related when some `j, j'` of one level give
//! isomorphic composites `j ∘ γ1 ≅ j' ∘ γ2` whose complement has no root;
//! the equivalence is the transitive closure of this relation.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::json::{array, embedding_from_json, embedding_to_json, field, matrix_from_json, matrix_to_json, parse_u64};
use crate::lattice::{
    artin_invariant, compose_embeddings, embeddings_isomorphic, find_isometry_mapping, has_minus_two_root,
    is_primitive, orthogonal_complement, signature, GroupCaps, IntegerLattice, IsometrySet, LatticeEmbedding,
    Verdict,
};
use crate::matrix::IntMatrix;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RecordedCounts {
    pub tau: Option<u64>,
    pub epsilon: Option<u64>,
    pub alpha: Option<u64>,
    /// Connected components of the closure at this level.
    pub epsilon_c: Option<u64>,
    /// The same count one level down.
    pub epsilon_c_prev: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct OverlatticeEntry {
    pub sigma_from: usize,
    pub sigma_to: usize,
    pub embedding: LatticeEmbedding,
}

/// Generators of the isometry group of an indefinite level lattice.
#[derive(Clone, Debug)]
pub struct TargetIsometries {
    pub sigma: usize,
    pub generators: Vec<IntMatrix>,
}

/// The isometries used at one level. Definite lattices are searched
/// directly, so their groups are never listed.
#[derive(Clone, Debug)]
enum LevelGroup {
    Full,
    Generated(IsometrySet),
}

impl LevelGroup {
    fn isomorphic(&self, j1: &LatticeEmbedding, j2: &LatticeEmbedding) -> Result<Verdict> {
        match self {
            LevelGroup::Generated(group) => embeddings_isomorphic(j1, j2, group),
            LevelGroup::Full => {
                if !j1.source().same_form(j2.source()) {
                    return Ok(Verdict::No);
                }
                let found = find_isometry_mapping(j1.target(), &j1.image_vectors(), &j2.image_vectors())?;
                Ok(if found.is_some() { Verdict::Yes } else { Verdict::No })
            }
        }
    }
}

#[derive(Clone, Debug)]
struct Composite {
    level: usize,
    embedding: LatticeEmbedding,
    root_free: bool,
}

/// A validated catalog. Every marking must be primitive with a root-free
/// complement, and no two markings may be isomorphic.
#[derive(Clone, Debug)]
pub struct EmbeddingCatalog {
    sigma: usize,
    p: u32,
    markings: Vec<LatticeEmbedding>,
    overlattice_embeddings: Vec<OverlatticeEntry>,
    recorded: RecordedCounts,
    target_isometries: Vec<TargetIsometries>,
    genuine_k3: bool,
    groups: BTreeMap<usize, LevelGroup>,
    /// `composites[i]` lists `j ∘ γ_i` for the identity and every catalog `j`.
    composites: Vec<Vec<Composite>>,
}

fn inconsistent(msg: impl Into<String>) -> Error {
    Error::InconsistentCatalog(msg.into())
}

fn is_definite(l: &IntegerLattice) -> Result<bool> {
    let s = signature(l)?;
    Ok(s.is_negative_definite() || s.is_positive_definite())
}

impl EmbeddingCatalog {
    pub fn new(
        sigma: usize,
        p: u32,
        markings: Vec<LatticeEmbedding>,
        overlattice_embeddings: Vec<OverlatticeEntry>,
        recorded: RecordedCounts,
        target_isometries: Vec<TargetIsometries>,
        caps: GroupCaps,
    ) -> Result<Self> {
        let mut levels: BTreeMap<usize, IntegerLattice> = BTreeMap::new();
        if let Some(first) = markings.first() {
            levels.insert(sigma, first.target().clone());
        }
        for (i, m) in markings.iter().enumerate() {
            if !m.target().same_form(&levels[&sigma]) || !m.source().same_form(markings[0].source()) {
                return Err(inconsistent(format!("marking {i} has a different source or target")));
            }
        }
        for (i, e) in overlattice_embeddings.iter().enumerate() {
            if e.sigma_from != sigma || e.sigma_to > sigma {
                return Err(inconsistent(format!(
                    "overlattice embedding {i} goes from level {} to {}",
                    e.sigma_from, e.sigma_to
                )));
            }
            match levels.get(&sigma) {
                Some(n) if e.embedding.source().same_form(n) => {}
                _ => return Err(inconsistent(format!("overlattice embedding {i} does not start at the marking target"))),
            }
            match levels.get(&e.sigma_to) {
                Some(t) if !t.same_form(e.embedding.target()) => {
                    return Err(inconsistent(format!("overlattice embedding {i} has a different level-{} target", e.sigma_to)))
                }
                _ => {
                    levels.insert(e.sigma_to, e.embedding.target().clone());
                }
            }
        }
        let mut genuine_k3 = false;
        for (&level, l) in &levels {
            let report = artin_invariant(l, p).map_err(|e| inconsistent(format!("level {level} lattice: {e}")))?;
            if report.sigma != level {
                return Err(inconsistent(format!("level {level} lattice has Artin invariant {}", report.sigma)));
            }
            if level == sigma {
                genuine_k3 = report.genuine_k3;
            }
        }

        let mut groups = BTreeMap::new();
        for (&level, l) in &levels {
            let group = if is_definite(l)? {
                LevelGroup::Full
            } else {
                let data = target_isometries
                    .iter()
                    .find(|t| t.sigma == level)
                    .ok_or_else(|| inconsistent(format!("no isometry generators for the indefinite level {level}")))?;
                LevelGroup::Generated(IsometrySet::from_generators(
                    l.clone(),
                    data.generators.clone(),
                    caps.element_cap,
                )?)
            };
            groups.insert(level, group);
        }

        let mut composites = Vec::with_capacity(markings.len());
        for (i, gamma) in markings.iter().enumerate() {
            if !is_primitive(gamma)? {
                return Err(inconsistent(format!("marking {i} is not primitive")));
            }
            let (k, _) = orthogonal_complement(gamma)?;
            if has_minus_two_root(&k)? {
                return Err(inconsistent(format!("complement of marking {i} contains a root")));
            }
            let mut list = vec![Composite {
                level: sigma,
                embedding: gamma.clone(),
                root_free: true,
            }];
            for e in &overlattice_embeddings {
                let composed = compose_embeddings(&e.embedding, gamma)?;
                let (k, _) = orthogonal_complement(&composed)?;
                list.push(Composite {
                    level: e.sigma_to,
                    root_free: !has_minus_two_root(&k)?,
                    embedding: composed,
                });
            }
            composites.push(list);
        }

        let catalog = EmbeddingCatalog {
            sigma,
            p,
            markings,
            overlattice_embeddings,
            recorded,
            target_isometries,
            genuine_k3,
            groups,
            composites,
        };
        for a in 0..catalog.markings.len() {
            for b in a + 1..catalog.markings.len() {
                match catalog.groups[&sigma].isomorphic(&catalog.markings[a], &catalog.markings[b])? {
                    Verdict::No => {}
                    Verdict::Yes => return Err(inconsistent(format!("markings {a} and {b} are isomorphic"))),
                    Verdict::Indeterminate => {
                        return Err(inconsistent(format!("could not decide whether markings {a} and {b} are isomorphic")))
                    }
                }
            }
        }
        Ok(catalog)
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn markings(&self) -> &[LatticeEmbedding] {
        &self.markings
    }

    pub fn overlattice_embeddings(&self) -> &[OverlatticeEntry] {
        &self.overlattice_embeddings
    }

    pub fn recorded(&self) -> &RecordedCounts {
        &self.recorded
    }

    pub fn len(&self) -> usize {
        self.markings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.markings.is_empty()
    }

    /// Whether every composite `j ∘ γ_i` with `j` going to a lower level
    /// acquires a root in its complement. Vacuously true when the catalog
    /// has no such `j`.
    pub fn roots_below(&self, i: usize) -> bool {
        self.composites[i].iter().filter(|c| c.level < self.sigma).all(|c| !c.root_free)
    }

    pub fn to_json(&self) -> Value {
        let mut counts = Map::new();
        let r = &self.recorded;
        for (key, value) in [
            ("tau", r.tau),
            ("epsilon", r.epsilon),
            ("alpha", r.alpha),
            ("epsilon_c", r.epsilon_c),
            ("epsilon_c_prev", r.epsilon_c_prev),
        ] {
            if let Some(v) = value {
                counts.insert(key.into(), json!(v));
            }
        }
        let mut out = json!({
            "sigma": self.sigma,
            "p": self.p,
            "markings": self.markings.iter().map(embedding_to_json).collect::<Vec<_>>(),
            "overlattice_embeddings": self.overlattice_embeddings.iter().map(|e| json!({
                "sigma_from": e.sigma_from,
                "sigma_to": e.sigma_to,
                "embedding": embedding_to_json(&e.embedding),
            })).collect::<Vec<_>>(),
            "recorded_counts": Value::Object(counts),
        });
        if !self.target_isometries.is_empty() {
            out["target_isometries"] = self
                .target_isometries
                .iter()
                .map(|t| json!({"sigma": t.sigma, "generators": t.generators.iter().map(matrix_to_json).collect::<Vec<_>>()}))
                .collect();
        }
        out
    }

    /// Parses and re-validates a catalog. Schema errors are reported as
    /// malformed input naming the offending path.
    pub fn from_json(v: &Value, path: &str, caps: GroupCaps) -> Result<Self> {
        let level = |x: &Value, p: &str| parse_u64(x, p).map(|s| s as usize);
        let sigma = level(field(v, "sigma", path)?, &format!("{path}.sigma"))?;
        let p = parse_u64(field(v, "p", path)?, &format!("{path}.p"))? as u32;
        let markings = array(field(v, "markings", path)?, &format!("{path}.markings"))?
            .iter()
            .enumerate()
            .map(|(i, m)| embedding_from_json(m, &format!("{path}.markings[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let overlattice_embeddings = match v.get("overlattice_embeddings") {
            None => vec![],
            Some(list) => array(list, &format!("{path}.overlattice_embeddings"))?
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    let at = format!("{path}.overlattice_embeddings[{i}]");
                    Ok(OverlatticeEntry {
                        sigma_from: level(field(e, "sigma_from", &at)?, &format!("{at}.sigma_from"))?,
                        sigma_to: level(field(e, "sigma_to", &at)?, &format!("{at}.sigma_to"))?,
                        embedding: embedding_from_json(field(e, "embedding", &at)?, &format!("{at}.embedding"))?,
                    })
                })
                .collect::<Result<Vec<_>>>()?,
        };
        let mut recorded = RecordedCounts::default();
        if let Some(c) = v.get("recorded_counts") {
            let at = format!("{path}.recorded_counts");
            if !c.is_object() {
                return Err(Error::Malformed(format!("{at}: expected an object")));
            }
            let get = |key: &str| -> Result<Option<u64>> {
                match c.get(key) {
                    None | Some(Value::Null) => Ok(None),
                    Some(x) => parse_u64(x, &format!("{at}.{key}")).map(Some),
                }
            };
            recorded = RecordedCounts {
                tau: get("tau")?,
                epsilon: get("epsilon")?,
                alpha: get("alpha")?,
                epsilon_c: get("epsilon_c")?,
                epsilon_c_prev: get("epsilon_c_prev")?,
            };
        }
        let mut target_isometries = vec![];
        if let Some(list) = v.get("target_isometries") {
            for (i, t) in array(list, &format!("{path}.target_isometries"))?.iter().enumerate() {
                let at = format!("{path}.target_isometries[{i}]");
                let s = level(field(t, "sigma", &at)?, &format!("{at}.sigma"))?;
                let rank = if s == sigma {
                    markings.first().map(|m| m.target().rank())
                } else {
                    overlattice_embeddings.iter().find(|e| e.sigma_to == s).map(|e| e.embedding.target().rank())
                }
                .ok_or_else(|| Error::Malformed(format!("{at}: no lattice at level {s}")))?;
                let generators = array(field(t, "generators", &at)?, &format!("{at}.generators"))?
                    .iter()
                    .enumerate()
                    .map(|(k, g)| matrix_from_json(g, rank, rank, &format!("{at}.generators[{k}]")))
                    .collect::<Result<Vec<_>>>()?;
                target_isometries.push(TargetIsometries { sigma: s, generators });
            }
        }
        Self::new(sigma, p, markings, overlattice_embeddings, recorded, target_isometries, caps)
    }
}

/// Whether markings `a` and `b` are related through one level: some
/// `j, j'` with root-free `(j ∘ γ_a)^⊥` and `j ∘ γ_a ≅ j' ∘ γ_b`.
pub fn embedding_equivalent(catalog: &EmbeddingCatalog, a: usize, b: usize) -> Result<Verdict> {
    let n = catalog.len();
    if a >= n || b >= n {
        return Err(Error::Precondition(format!("catalog has {n} markings")));
    }
    if a == b {
        return Ok(Verdict::Yes);
    }
    let mut undecided = false;
    for left in catalog.composites[a].iter().filter(|c| c.root_free) {
        let group = &catalog.groups[&left.level];
        for right in catalog.composites[b].iter().filter(|c| c.level == left.level) {
            match group.isomorphic(&left.embedding, &right.embedding)? {
                Verdict::Yes => return Ok(Verdict::Yes),
                Verdict::No => {}
                Verdict::Indeterminate => undecided = true,
            }
        }
    }
    Ok(if undecided { Verdict::Indeterminate } else { Verdict::No })
}

/// An interval `[lower, upper]`; `None` where a needed count is missing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bound {
    pub lower: Option<u64>,
    pub upper: Option<u64>,
}

impl Bound {
    fn contains(&self, x: u64) -> bool {
        self.lower.is_none_or(|l| l <= x) && self.upper.is_none_or(|u| x <= u)
    }

    fn to_json(&self) -> Value {
        json!({ "lower": self.lower, "upper": self.upper })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusReport {
    pub sigma: usize,
    pub p: u32,
    pub irreducible: usize,
    /// Number of classes of the closure; `None` when some pair could not
    /// be decided within the caps.
    pub connected: Option<usize>,
    /// Markings in the closure classes, by index.
    pub classes: Vec<Vec<usize>>,
    /// Markings related only to themselves because every lower composite
    /// acquires a root.
    pub alpha: usize,
    pub self_only: Vec<usize>,
    pub undecided_pairs: Vec<(usize, usize)>,
    /// `ε ≤ τ·|R|`.
    pub epsilon_bound: Bound,
    /// `α ≤ ε^c ≤ τ·(α + ε^c_prev)`, intersected with `ε^c ≤ τ·connected`.
    pub epsilon_c_bound: Bound,
    pub violations: Vec<String>,
}

impl CensusReport {
    pub fn to_json(&self) -> Value {
        json!({
            "sigma": self.sigma,
            "p": self.p,
            "irreducible": self.irreducible,
            "connected": self.connected,
            "classes": self.classes,
            "alpha": self.alpha,
            "self_only": self.self_only,
            "undecided_pairs": self.undecided_pairs.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
            "epsilon_bound": self.epsilon_bound.to_json(),
            "epsilon_c_bound": self.epsilon_c_bound.to_json(),
            "violations": self.violations,
        })
    }

    pub fn is_indeterminate(&self) -> bool {
        self.connected.is_none()
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

pub fn component_census(catalog: &EmbeddingCatalog) -> Result<CensusReport> {
    let n = catalog.len();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut undecided_pairs = vec![];
    for a in 0..n {
        for b in a + 1..n {
            match embedding_equivalent(catalog, a, b)? {
                Verdict::Yes => {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    parent[ra.max(rb)] = ra.min(rb);
                }
                Verdict::No => {}
                Verdict::Indeterminate => undecided_pairs.push((a, b)),
            }
        }
    }
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        classes.entry(r).or_default().push(i);
    }
    let classes: Vec<Vec<usize>> = classes.into_values().collect();
    // an undecided pair matters only when it could still merge two classes
    let undecided_pairs: Vec<(usize, usize)> = undecided_pairs
        .into_iter()
        .filter(|&(a, b)| find(&mut parent, a) != find(&mut parent, b))
        .collect();
    let connected = undecided_pairs.is_empty().then_some(classes.len());
    let self_only: Vec<usize> = (0..n).filter(|&i| catalog.roots_below(i)).collect();
    let alpha = self_only.len();

    let r = catalog.recorded();
    let size = n as u64;
    let epsilon_bound = Bound {
        lower: None,
        upper: r.tau.map(|t| t * size),
    };
    let upper_from_prev = match (r.tau, r.epsilon_c_prev) {
        (Some(t), Some(prev)) => Some(t * (alpha as u64 + prev)),
        _ => None,
    };
    let upper_from_connected = match (r.tau, connected) {
        (Some(t), Some(c)) => Some(t * c as u64),
        _ => None,
    };
    let epsilon_c_bound = Bound {
        lower: Some(alpha as u64),
        upper: [upper_from_prev, upper_from_connected].into_iter().flatten().min(),
    };

    let mut violations = vec![];
    if catalog.sigma() > 5 && catalog.genuine_k3 && n > 0 {
        violations.push(format!("level {} > 5 has {n} admissible markings", catalog.sigma()));
    }
    if let Some(e) = r.epsilon {
        if !epsilon_bound.contains(e) {
            violations.push(format!("recorded epsilon {e} exceeds tau * |R|"));
        }
    }
    if let Some(e) = r.epsilon_c {
        if !epsilon_c_bound.contains(e) {
            violations.push(format!("recorded epsilon_c {e} is outside the bound interval"));
        }
    }
    if let Some(a) = r.alpha {
        if a != alpha as u64 {
            violations.push(format!("recorded alpha {a} differs from the computed {alpha}"));
        }
    }
    if let Some(c) = connected {
        if alpha > c {
            violations.push(format!("alpha {alpha} exceeds the number of connected classes {c}"));
        }
    }
    Ok(CensusReport {
        sigma: catalog.sigma(),
        p: catalog.prime(),
        irreducible: n,
        connected,
        classes,
        alpha,
        self_only,
        undecided_pairs,
        epsilon_bound,
        epsilon_c_bound,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{construct_standard, int_vec};

    fn line(target: &IntegerLattice, v: &[i64]) -> LatticeEmbedding {
        LatticeEmbedding::from_vectors(target, &[int_vec(v)]).unwrap()
    }

    #[test]
    fn empty_catalog_has_zero_counts() {
        let c = EmbeddingCatalog::new(6, 3, vec![], vec![], RecordedCounts::default(), vec![], GroupCaps::default())
            .unwrap();
        let r = component_census(&c).unwrap();
        assert_eq!((r.irreducible, r.connected, r.alpha), (0, Some(0), 0));
        assert!(r.violations.is_empty());
    }

    #[test]
    fn isomorphic_markings_are_rejected() {
        let n = construct_standard("sum(twist(A2,-1),twist(A2,-1))").unwrap();
        let a = line(&n, &[1, 0, 1, 0]);
        let b = line(&n, &[0, 1, 0, 1]);
        let err = EmbeddingCatalog::new(1, 3, vec![a, b], vec![], RecordedCounts::default(), vec![], GroupCaps::default());
        assert!(matches!(err, Err(Error::InconsistentCatalog(_))));
    }

    #[test]
    fn root_in_complement_is_rejected() {
        let n = construct_standard("sum(twist(A2,-1),twist(A2,-1))").unwrap();
        let err = EmbeddingCatalog::new(
            1,
            3,
            vec![line(&n, &[1, 0, 0, 0])],
            vec![],
            RecordedCounts::default(),
            vec![],
            GroupCaps::default(),
        );
        assert!(matches!(err, Err(Error::InconsistentCatalog(_))));
    }

    #[test]
    fn single_marking_census_and_json() {
        let n = construct_standard("sum(twist(A2,-1),twist(A2,-1))").unwrap();
        let recorded = RecordedCounts {
            tau: Some(1),
            epsilon: Some(1),
            alpha: Some(1),
            epsilon_c: Some(1),
            epsilon_c_prev: None,
        };
        let c = EmbeddingCatalog::new(1, 3, vec![line(&n, &[1, 0, 1, 0])], vec![], recorded, vec![], GroupCaps::default())
            .unwrap();
        assert_eq!(embedding_equivalent(&c, 0, 0).unwrap(), Verdict::Yes);
        let r = component_census(&c).unwrap();
        assert_eq!((r.irreducible, r.connected, r.alpha), (1, Some(1), 1));
        assert!(r.violations.is_empty(), "{:?}", r.violations);
        let back = EmbeddingCatalog::from_json(&c.to_json(), "c", GroupCaps::default()).unwrap();
        assert_eq!(back.to_json(), c.to_json());
    }
}
