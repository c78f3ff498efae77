use std::collections::{BTreeSet, VecDeque};

use enriq_core::finite_form::{enumerate_generatrices, GeneratrixFilter, Generatrix};
use enriq_core::lattice::*;
use enriq_core::matrix::IntMatrix;
use enriq_core::periods::*;
use enriq_core::Error;
use num_bigint::BigInt;
use serde_json::Value;

fn lat(e: &str) -> IntegerLattice {
    construct_standard(e).unwrap()
}

fn v(xs: &[i64]) -> Vec<BigInt> {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}

fn marking(n: &IntegerLattice, vectors: &[&[i64]]) -> LatticeEmbedding {
    let vs: Vec<Vec<BigInt>> = vectors.iter().map(|x| v(x)).collect();
    LatticeEmbedding::from_vectors(n, &vs).unwrap()
}

/// A2(-1)² marked by a norm -4 vector whose complement is root free; the
/// factor swap lies in the stabilizer.
fn swap_context() -> MarkingContext {
    let n = lat("sum(twist(A2,-1),twist(A2,-1))");
    build_marking_context(&n, 3, &marking(&n, &[&[1, 0, 1, 0]])).unwrap()
}

/// A2(-1)² ⊕ U(3) marked by e + f, with Artin invariant 2.
fn sigma_two_context() -> MarkingContext {
    let n = lat("sum(twist(A2,-1),twist(A2,-1),twist(U,3))");
    build_marking_context(&n, 3, &marking(&n, &[&[0, 0, 0, 0, 1, 1]])).unwrap()
}

fn toy_contexts() -> Vec<MarkingContext> {
    let mut out = vec![swap_context(), sigma_two_context()];
    let n = lat("diag(-4,-4)");
    out.push(build_marking_context(&n, 3, &marking(&n, &[&[1, 0]])).unwrap());
    let n = lat("sum(diag(-4),twist(A2,-1))");
    out.push(build_marking_context(&n, 3, &marking(&n, &[&[1, 0, 0]])).unwrap());
    out
}

fn characteristic(ctx: &MarkingContext, m: u32) -> Vec<Generatrix> {
    enumerate_generatrices(ctx.quotient().unwrap().space(), m, GeneratrixFilter::Characteristic).unwrap()
}

/// Orbits by breadth-first closure under the stabilizer, one element at a time.
fn closure_orbit(ctx: &MarkingContext, g: &Generatrix) -> BTreeSet<Generatrix> {
    let mut seen = BTreeSet::from([g.clone()]);
    let mut queue = VecDeque::from([g.clone()]);
    while let Some(h) = queue.pop_front() {
        for phi in ctx.stabilizer_elements() {
            let k = act_on_generatrix(ctx, phi, &h).unwrap();
            if seen.insert(k.clone()) {
                queue.push_back(k);
            }
        }
    }
    seen
}

#[test]
fn stabilizer_examples() {
    let n = lat("diag(-4,-4)");
    let ctx = build_marking_context(&n, 3, &marking(&n, &[&[1, 0]])).unwrap();
    assert_eq!(ctx.stabilizer_elements(), &[IntMatrix::diagonal(&[1, -1]), IntMatrix::identity(2)][..]);
    let n = lat("twist(A2,-1)");
    let ctx = build_marking_context(&n, 3, &LatticeEmbedding::identity(&n)).unwrap();
    assert_eq!(ctx.stabilizer().order(), Some(1));
    let u = lat("U");
    assert!(matches!(
        build_marking_context(&lat("sum(U,diag(-4))"), 3, &marking(&lat("sum(U,diag(-4))"), &[&[0, 0, 1]])),
        Err(Error::Definiteness { .. })
    ));
    let caps = GroupCaps {
        element_cap: 4,
        ..GroupCaps::default()
    };
    let n = lat("sum(diag(-4),twist(A2,-1))");
    assert!(matches!(
        build_marking_context_with(&n, 3, &marking(&n, &[&[1, 0, 0]]), caps),
        Err(Error::CapExceeded { .. })
    ));
    assert!(build_marking_context(&u, 4, &marking(&u, &[&[1, 1]])).is_err());
}

#[test]
fn stabilizer_soundness() {
    for ctx in toy_contexts() {
        let n = ctx.ambient();
        let gm = ctx.gamma().matrix();
        assert!(ctx.stabilizer_elements().contains(&IntMatrix::identity(n.rank())));
        for phi in ctx.stabilizer_elements() {
            assert_eq!(phi.mul(gm), *gm);
            assert!(n.preserves_form(phi));
        }
    }
    assert_eq!(sigma_two_context().stabilizer().order(), Some(576));
}

#[test]
fn admissibility_examples() {
    let n = lat("diag(-4,-4)");
    let r = check_enriques_admissible(&build_marking_context(&n, 3, &marking(&n, &[&[1, 0]])).unwrap()).unwrap();
    assert!(r.admissible);
    let n = lat("sum(diag(-4),twist(A2,-1))");
    let r = check_enriques_admissible(&build_marking_context(&n, 3, &marking(&n, &[&[1, 0, 0]])).unwrap()).unwrap();
    assert!(!r.complement_root_free && !r.admissible);
    let u = lat("U");
    let r = check_enriques_admissible(&build_marking_context(&u, 3, &marking(&u, &[&[2, -2]])).unwrap()).unwrap();
    assert!(!r.primitive && !r.admissible);
    // the complement keeps both A2(-1) blocks, so it has roots
    let r = check_enriques_admissible(&sigma_two_context()).unwrap();
    assert!(r.primitive && !r.complement_root_free && !r.admissible);
    assert_eq!(r.sigma, None);
    assert_eq!(r.sigma_bound_ok, None);
}

#[test]
fn involution_correctness() {
    let mut succeeded = 0;
    for ctx in toy_contexts() {
        let Ok(iota) = induced_involution(&ctx) else { continue };
        succeeded += 1;
        let n = ctx.ambient();
        assert_eq!(iota.mul(&iota), IntMatrix::identity(n.rank()));
        assert!(n.preserves_form(&iota));
        assert_eq!(iota.mul(ctx.gamma().matrix()), *ctx.gamma().matrix());
        let k = ctx.complement_inclusion().matrix();
        assert_eq!(iota.mul(k), k.neg());
    }
    assert!(succeeded >= 2);
    let a2 = lat("twist(A2,-1)");
    let iota = induced_involution(&build_marking_context(&a2, 3, &marking(&a2, &[&[1, 0]])).unwrap()).unwrap();
    assert_eq!(iota, IntMatrix::from_rows(&[vec![1, -1], vec![0, -1]]).unwrap());
}

#[test]
fn extension_examples() {
    let n = lat("diag(-4,-4)");
    let ctx = build_marking_context(&n, 3, &marking(&n, &[&[1, 0]])).unwrap();
    assert_eq!(extend_isometry(&ctx, &IntMatrix::identity(1)).unwrap(), Some(IntMatrix::identity(2)));
    let ext = extend_isometry(&ctx, &IntMatrix::diagonal(&[-1])).unwrap().unwrap();
    assert!(n.preserves_form(&ext));

    // A2(-3) inside A2(-1) ⊕ diag(-4): the glue blocks most image isometries
    let n = lat("sum(twist(A2,-1),diag(-4))");
    let ctx = build_marking_context(&n, 3, &marking(&n, &[&[-1, -1, -1], &[1, 0, -1]])).unwrap();
    let image = isometry_group(ctx.gamma().source()).unwrap();
    assert_eq!(image.order(), Some(12));
    let missing = image
        .elements()
        .unwrap()
        .iter()
        .filter(|psi| extend_isometry(&ctx, psi).unwrap().is_none())
        .count();
    assert_eq!(missing, 8);
    assert!(extend_isometry(&ctx, &IntMatrix::diagonal(&[1, -1])).is_err());
}

#[test]
fn action_commutes_with_frobenius_and_preserves_predicates() {
    for (ctx, m) in [(swap_context(), 2), (swap_context(), 4), (sigma_two_context(), 2)] {
        let space = ctx.quotient().unwrap().space().clone();
        let dim = space.dim() / 2;
        let gs: Vec<Generatrix> = enumerate_generatrices(&space, m, GeneratrixFilter::Isotropic)
            .unwrap()
            .into_iter()
            .filter(|g| g.rank() == dim)
            .collect();
        assert!(!gs.is_empty());
        let step = (ctx.stabilizer_elements().len() / 24).max(1);
        for phi in ctx.stabilizer_elements().iter().step_by(step) {
            for g in gs.iter().step_by((gs.len() / 50).max(1)) {
                let moved = act_on_generatrix(&ctx, phi, g).unwrap();
                assert_eq!(act_on_generatrix(&ctx, phi, &g.frobenius_image()).unwrap(), moved.frobenius_image());
                assert_eq!(moved.is_characteristic().unwrap(), g.is_characteristic().unwrap());
                assert_eq!(moved.is_strictly_characteristic().unwrap(), g.is_strictly_characteristic().unwrap());
                assert_eq!(moved.rational_part().rank(), g.rational_part().rank());
            }
        }
    }
}

#[test]
fn swap_action_example() {
    let ctx = swap_context();
    let swap = IntMatrix::from_rows(&[vec![0, 0, 1, 0], vec![0, 0, 0, 1], vec![1, 0, 0, 0], vec![0, 1, 0, 0]]).unwrap();
    assert!(ctx.stabilizer_elements().contains(&swap));
    let gs = characteristic(&ctx, 2);
    assert_eq!(gs.len(), 2);
    assert_eq!(act_on_generatrix(&ctx, &swap, &gs[0]).unwrap(), gs[1]);
    let minus = IntMatrix::identity(4).neg();
    for g in &gs {
        assert_eq!(act_on_generatrix(&ctx, &minus, g).unwrap(), *g);
    }
    let trivial = ctx.with_stabilizer_subgroup(vec![]).unwrap();
    assert_eq!(orbit_generatrices(&trivial, &gs).unwrap().len(), 2);
}

#[test]
fn orbits_match_closure_and_period_points_are_constant() {
    for (ctx, m) in [(swap_context(), 2), (swap_context(), 4), (sigma_two_context(), 2)] {
        let gs = characteristic(&ctx, m);
        assert!(!gs.is_empty());
        let orbits = orbit_generatrices(&ctx, &gs).unwrap();
        for orbit in &orbits {
            let closed: BTreeSet<Generatrix> = closure_orbit(&ctx, &orbit[0]);
            assert_eq!(orbit.iter().cloned().collect::<BTreeSet<_>>(), closed);
            let points: Vec<PeriodPoint> = orbit.iter().map(|g| period_point(&ctx, g).unwrap()).collect();
            assert!(points.iter().all(|p| *p == points[0]));
            assert_eq!(points[0].orbit_size, orbit.len());
            assert_eq!(points[0].representative, orbit[0]);
        }
        let minima: Vec<&Generatrix> = orbits.iter().map(|o| &o[0]).collect();
        assert!(minima.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn same_period_is_an_equivalence_matching_orbits() {
    let ctx = sigma_two_context();
    let gs = characteristic(&ctx, 2);
    let points: Vec<PeriodPoint> = gs.iter().map(|g| period_point(&ctx, g).unwrap()).collect();
    for (i, a) in points.iter().enumerate() {
        assert!(same_period(a, a).unwrap());
        let orbit = closure_orbit(&ctx, &gs[i]);
        for (j, b) in points.iter().enumerate() {
            let same = same_period(a, b).unwrap();
            assert_eq!(same, same_period(b, a).unwrap());
            assert_eq!(same, orbit.contains(&gs[j]));
        }
    }
}

#[test]
fn marking_independence() {
    for (ctx, m) in [(swap_context(), 2), (swap_context(), 4), (sigma_two_context(), 2)] {
        let image = isometry_group(ctx.gamma().source()).unwrap();
        let gs = characteristic(&ctx, m);
        for psi in image.elements().unwrap() {
            let phi = extend_isometry(&ctx, psi).unwrap().expect("every image isometry extends here");
            let remarked = ctx.remarked(psi).unwrap();
            assert_eq!(phi.mul(ctx.gamma().matrix()), *remarked.gamma().matrix());
            for g in &gs {
                let p = period_point(&ctx, g).unwrap();
                assert_eq!(remarked_period_point(&ctx, psi, g).unwrap(), Some(p));
            }
        }
    }
}

#[test]
fn scalar_isometries_fix_every_generatrix() {
    let ctx = sigma_two_context();
    let gs = characteristic(&ctx, 2);
    let minus = IntMatrix::identity(ctx.ambient().rank()).neg();
    for g in &gs {
        assert_eq!(act_on_generatrix(&ctx, &minus, g).unwrap(), *g);
    }
}

fn fixture(name: &str) -> EmbeddingCatalog {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(path).unwrap();
    EmbeddingCatalog::from_json(&serde_json::from_str(&text).unwrap(), "catalog", GroupCaps::default()).unwrap()
}

fn check_published_bounds(report: &CensusReport, recorded: &RecordedCounts) {
    let tau = recorded.tau.unwrap();
    let eps = recorded.epsilon.unwrap();
    let alpha = recorded.alpha.unwrap();
    let eps_c = recorded.epsilon_c.unwrap();
    let prev = recorded.epsilon_c_prev.unwrap();
    let connected = report.connected.unwrap() as u64;
    assert!(eps <= tau * report.irreducible as u64);
    assert!(alpha <= eps_c && eps_c <= tau * (alpha + prev));
    assert!(alpha <= connected);
    assert!(report.epsilon_bound.upper.map_or(true, |u| eps <= u));
    assert!(report.epsilon_c_bound.lower.map_or(true, |l| l <= eps_c));
    assert!(report.epsilon_c_bound.upper.map_or(true, |u| eps_c <= u));
}

#[test]
fn census_of_the_pair_catalog() {
    let catalog = fixture("catalog_pair.json");
    assert_eq!(catalog.len(), 3);
    assert_eq!(embedding_equivalent(&catalog, 0, 0).unwrap(), Verdict::Yes);
    assert_eq!(embedding_equivalent(&catalog, 0, 1).unwrap(), Verdict::Yes);
    assert_eq!(embedding_equivalent(&catalog, 2, 0).unwrap(), Verdict::No);
    assert_eq!(embedding_equivalent(&catalog, 2, 1).unwrap(), Verdict::No);
    assert!(catalog.roots_below(2));
    let report = component_census(&catalog).unwrap();
    assert_eq!(report.irreducible, 3);
    assert_eq!(report.connected, Some(2));
    assert_eq!(report.classes, vec![vec![0, 1], vec![2]]);
    assert_eq!(report.alpha, 1);
    assert_eq!(report.self_only, vec![2]);
    assert!(report.violations.is_empty());
    assert!(!report.is_indeterminate());
    check_published_bounds(&report, catalog.recorded());
}

#[test]
fn census_of_the_isolated_catalog() {
    let catalog = fixture("catalog_isolated.json");
    let report = component_census(&catalog).unwrap();
    assert_eq!(report.alpha, catalog.len());
    assert_eq!(report.connected, Some(catalog.len()));
    assert!(report.violations.is_empty());
    check_published_bounds(&report, catalog.recorded());
}

#[test]
fn census_of_the_empty_catalog() {
    let catalog = fixture("catalog_empty.json");
    assert!(catalog.sigma() > 5);
    let report = component_census(&catalog).unwrap();
    assert_eq!((report.irreducible, report.connected, report.alpha), (0, Some(0), 0));
    assert!(report.violations.is_empty());
    check_published_bounds(&report, catalog.recorded());
}

#[test]
fn census_flags_inconsistent_recorded_counts() {
    let path = format!("{}/tests/fixtures/catalog_pair.json", env!("CARGO_MANIFEST_DIR"));
    let mut value: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    value["recorded_counts"]["epsilon"] = Value::from(4);
    value["recorded_counts"]["alpha"] = Value::from(2);
    let catalog = EmbeddingCatalog::from_json(&value, "catalog", GroupCaps::default()).unwrap();
    let report = component_census(&catalog).unwrap();
    assert!(report.violations.len() >= 2);
}

#[test]
fn catalog_reload_rejects_tampered_markings() {
    let path = format!("{}/tests/fixtures/catalog_pair.json", env!("CARGO_MANIFEST_DIR"));
    let value: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();

    let mut duplicated = value.clone();
    let first = duplicated["markings"][0].clone();
    duplicated["markings"].as_array_mut().unwrap().push(first);
    assert!(matches!(
        EmbeddingCatalog::from_json(&duplicated, "catalog", GroupCaps::default()),
        Err(Error::InconsistentCatalog(_))
    ));

    let mut broken = value.clone();
    broken["markings"][1]["matrix"][7][0] = Value::from(0);
    let err = EmbeddingCatalog::from_json(&broken, "catalog", GroupCaps::default()).unwrap_err();
    assert!(err.to_string().contains("markings"), "{err}");

    let mut missing = value;
    missing.as_object_mut().unwrap().remove("p");
    assert!(matches!(
        EmbeddingCatalog::from_json(&missing, "catalog", GroupCaps::default()),
        Err(Error::Malformed(_))
    ));
}

#[test]
fn catalog_json_roundtrip() {
    let catalog = fixture("catalog_pair.json");
    let again = EmbeddingCatalog::from_json(&catalog.to_json(), "catalog", GroupCaps::default()).unwrap();
    assert_eq!(
        enriq_core::json::canonical_string(&again.to_json()),
        enriq_core::json::canonical_string(&catalog.to_json())
    );
}
