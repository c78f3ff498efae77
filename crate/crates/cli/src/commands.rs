//! Command handlers. Each returns the `results` section of its report and
//! records the objects it loaded.

use std::collections::BTreeSet;

use enriq_core::finite_form::{
    chain_vector, enumerate_generatrices_with, galois_field, FiniteQuadraticSpace, Generatrix, GeneratrixFilter,
    Subspace,
};
use enriq_core::json::{
    big, canonical_string, digest_matrices, embedding_to_json, generatrix_to_json, lattice_to_json, matrix_to_json,
    sha256_hex, space_to_json, vector_to_json,
};
use enriq_core::lattice::{
    artin_invariant, discriminant, discriminant_data, dual_quotient, enumerate_norm_vectors_with, is_primitive,
    isometry_group_with, orthogonal_complement, overlattice_with_inclusion, saturate, signature, GroupCaps,
    IntegerLattice, LatticeEmbedding,
};
use enriq_core::matrix::IntMatrix;
use enriq_core::periods::{
    build_marking_context_with, check_enriques_admissible, component_census, induced_involution,
    orbit_generatrices_with, period_point_with, same_period, MarkingContext,
};
use enriq_core::{Error, Result};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::cli::*;
use crate::input::{self, Inputs};
use crate::oracle::{self, SlowField};
use crate::report::Outcome;
use crate::workspace::Workspace;

/// Groups up to this size are listed in reports; larger ones are digested.
const LISTED_GROUP_LIMIT: usize = 1000;

pub struct Env {
    pub exec: ExecFlags,
}

impl Env {
    pub fn parallel(&self) -> bool {
        !self.exec.serial
    }

    pub fn group_caps(&self) -> GroupCaps {
        GroupCaps {
            element_cap: usize::try_from(self.exec.cap_group).unwrap_or(usize::MAX),
            parallel: self.parallel(),
            ..GroupCaps::default()
        }
    }

    fn orbit_cap(&self) -> usize {
        usize::try_from(self.exec.cap_orbit).unwrap_or(usize::MAX)
    }
}

pub fn execute(command: &Command, env: &Env, inputs: &mut Inputs) -> Result<Outcome> {
    match command {
        Command::Lattice(c) => lattice_command(c, env, inputs),
        Command::Form(FormCmd::Neutral { space }) => {
            let v = load_space(space, env, inputs)?;
            Ok(Outcome::Done(json!({
                "dim": v.dim(),
                "determinant": v.determinant(),
                "nondegenerate": v.is_nondegenerate(),
                "neutral": v.is_neutral()?,
            })))
        }
        Command::Gen(c) => gen_command(c, env, inputs),
        Command::Ctx(c) => ctx_command(c, env, inputs),
        Command::Period(c) => period_command(c, env, inputs),
        Command::Census(args) => {
            let catalog = input::catalog(&args.input, env.group_caps())?;
            inputs.record("catalog", catalog.to_json());
            let report = component_census(&catalog)?;
            let v = report.to_json();
            Ok(if report.is_indeterminate() { Outcome::Indeterminate(v) } else { Outcome::Done(v) })
        }
        Command::Oracle(c) => oracle_command(c, env, inputs),
        Command::Workspace(WorkspaceCmd::Roundtrip { input, save }) => {
            let text = std::fs::read_to_string(input).map_err(|e| Error::Malformed(format!("{input}: {e}")))?;
            let ws = Workspace::from_json(&input::parse_json(&text, input)?, env.group_caps())?;
            let canonical = ws.to_canonical_string();
            inputs.record("workspace", ws.to_json());
            if let Some(path) = save {
                std::fs::write(path, &canonical).map_err(|e| Error::Malformed(format!("{path}: {e}")))?;
            }
            Ok(Outcome::Done(json!({
                "objects": ws.objects.len(),
                "kinds": ws.objects.iter().map(|(k, o)| (k.clone(), json!(o.kind()))).collect::<serde_json::Map<_, _>>(),
                "canonical_digest": sha256_hex(canonical.as_bytes()),
                "identical": canonical == text,
            })))
        }
    }
}

fn load_lattice(spec: &str, key: &str, env: &Env, inputs: &mut Inputs) -> Result<IntegerLattice> {
    let l = input::lattice(spec, env.group_caps())?;
    input::record_lattice(inputs, key, &l);
    Ok(l)
}

fn load_embedding(e: &EmbeddingIn, env: &Env, inputs: &mut Inputs) -> Result<LatticeEmbedding> {
    input::marking(
        e.embedding.as_deref(),
        e.ambient.as_deref(),
        e.vectors.as_deref(),
        env.group_caps(),
        inputs,
    )
}

fn load_space(s: &SpaceIn, env: &Env, inputs: &mut Inputs) -> Result<FiniteQuadraticSpace> {
    let v = match (&s.p, &s.gram, &s.from_lattice, &s.space) {
        (Some(p), Some(gram), None, None) => FiniteQuadraticSpace::new(*p, &input::parse_rows(gram, "--gram")?)?,
        (None, None, Some(spec), None) => {
            let l = load_lattice(spec, "lattice", env, inputs)?;
            dual_quotient(&l, s.prime.expect("clap requires --prime"))?.space().clone()
        }
        (None, None, None, Some(spec)) => input::space(spec)?,
        _ => {
            return Err(Error::Malformed(
                "give the space as --p with --gram, --from-lattice with --prime, or --space".into(),
            ))
        }
    };
    inputs.record("space", space_to_json(&v));
    Ok(v)
}

fn vectors_json(vs: &[Vec<BigInt>]) -> Value {
    Value::Array(vs.iter().map(|v| vector_to_json(v)).collect())
}

fn group_json(elements: &[IntMatrix]) -> Value {
    let mut out = json!({
        "order": elements.len(),
        "digest": digest_matrices(elements),
    });
    if elements.len() <= LISTED_GROUP_LIMIT {
        out["elements"] = Value::Array(elements.iter().map(matrix_to_json).collect());
    }
    out
}

fn lattice_command(c: &LatticeCmd, env: &Env, inputs: &mut Inputs) -> Result<Outcome> {
    let v = match c {
        LatticeCmd::Invariants { lattice, p } => {
            let l = load_lattice(&lattice.input, "lattice", env, inputs)?;
            let sig = signature(&l)?;
            let mut out = json!({
                "rank": l.rank(),
                "even": l.is_even(),
                "determinant": big(&discriminant(&l)),
                "signature": { "positive": sig.positive, "negative": sig.negative },
            });
            let data = discriminant_data(&l, p.unwrap_or(2));
            out["elementary_divisors"] = Value::Array(data.elementary_divisors.iter().map(big).collect());
            out["group_order"] = big(&data.group_order);
            if let Some(p) = p {
                let artin = match artin_invariant(&l, *p) {
                    Ok(a) => json!({ "sigma": a.sigma, "genuine_k3": a.genuine_k3 }),
                    Err(e) => json!({ "undefined": e.to_string() }),
                };
                out["prime"] = json!({
                    "p": p,
                    "p_elementary": data.p_elementary,
                    "p_length": data.p_length,
                    "artin": artin,
                });
            }
            out
        }
        LatticeCmd::Roots { lattice, norm } => {
            let l = load_lattice(&lattice.input, "lattice", env, inputs)?;
            let vs = enumerate_norm_vectors_with(&l, &BigInt::from(*norm), env.parallel())?;
            json!({ "norm": norm, "count": vs.len(), "vectors": vectors_json(&vs) })
        }
        LatticeCmd::Autgroup { lattice } => {
            let l = load_lattice(&lattice.input, "lattice", env, inputs)?;
            let g = isometry_group_with(&l, env.group_caps())?;
            group_json(g.elements().expect("full groups are listed"))
        }
        LatticeCmd::Complement { embedding } => {
            let e = load_embedding(embedding, env, inputs)?;
            let (k, inc) = orthogonal_complement(&e)?;
            json!({ "complement": lattice_to_json(&k), "inclusion": matrix_to_json(inc.matrix()) })
        }
        LatticeCmd::Saturate { embedding } => {
            let e = load_embedding(embedding, env, inputs)?;
            let s = saturate(&e)?;
            json!({
                "index": big(&s.index),
                "primitive": is_primitive(&e)?,
                "saturation": embedding_to_json(&s.embedding),
            })
        }
        LatticeCmd::Glue { lattice, p, glue } => {
            let l = load_lattice(&lattice.input, "lattice", env, inputs)?;
            let dq = dual_quotient(&l, *p)?;
            let rows: Vec<Vec<u32>> = if glue.trim().is_empty() {
                vec![]
            } else {
                input::parse_rows(glue, "--glue")?
                    .into_iter()
                    .map(|r| r.into_iter().map(|x| x.rem_euclid(*p as i64) as u32).collect())
                    .collect()
            };
            let subspace = Subspace::new(dq.space(), 1, &rows)?;
            let (over, inc) = overlattice_with_inclusion(&l, *p, &subspace)?;
            json!({
                "quotient": space_to_json(dq.space()),
                "glue_dimension": subspace.rank(),
                "overlattice": lattice_to_json(&over),
                "inclusion": matrix_to_json(inc.matrix()),
                "determinant_before": big(&discriminant(&l)),
                "determinant_after": big(&discriminant(&over)),
            })
        }
    };
    Ok(Outcome::Done(v))
}

fn generatrix_report(g: &Generatrix) -> Result<Value> {
    let isotropic = g.is_totally_isotropic();
    let half = g.half_dimension()?;
    Ok(json!({
        "dimension": g.rank(),
        "half_dimension": half,
        "isotropic": isotropic,
        "characteristic": g.is_characteristic()?,
        "strictly_characteristic": g.is_strictly_characteristic()?,
        "rational_part_dimension": g.rational_part().rank(),
        "frobenius_image": generatrix_to_json(&g.frobenius_image()),
    }))
}

fn gen_command(c: &GenCmd, env: &Env, inputs: &mut Inputs) -> Result<Outcome> {
    let v = match c {
        GenCmd::Enumerate { space, m, filter } => {
            let v = load_space(space, env, inputs)?;
            let filter: GeneratrixFilter = (*filter).into();
            let gs = enumerate_generatrices_with(&v, *m, filter, env.exec.cap_grassmannian, env.parallel())?;
            json!({
                "m": m,
                "filter": filter.as_str(),
                "count": gs.len(),
                "generatrices": gs.iter().map(generatrix_to_json).collect::<Vec<_>>(),
            })
        }
        GenCmd::Check { input } => {
            let g = input::generatrix(input, env.group_caps())?;
            input::record_generatrix(inputs, "generatrix", &g);
            generatrix_report(&g)?
        }
        GenCmd::Chain { input } => {
            let g = input::generatrix(input, env.group_caps())?;
            input::record_generatrix(inputs, "generatrix", &g);
            let c = chain_vector(&g)?;
            let coeffs = |v: &[u32]| -> Value { json!(v.iter().map(|&x| g.field().coefficients(x)).collect::<Vec<_>>()) };
            json!({
                "sigma": c.sigma,
                "x0": coeffs(&c.x0),
                "chain": c.chain.iter().map(|v| coeffs(v)).collect::<Vec<_>>(),
                "duality": c.duality.iter().map(|v| coeffs(v)).collect::<Vec<_>>(),
                "shift_pairing": c.shift_pairing.iter().map(|v| coeffs(v)).collect::<Vec<_>>(),
                "shift_pattern_diagonal": c.shift_pattern_diagonal,
                "basis": true,
            })
        }
    };
    Ok(Outcome::Done(v))
}

fn build_context(marking: &MarkingIn, env: &Env, inputs: &mut Inputs) -> Result<MarkingContext> {
    let gamma = load_embedding(&marking.embedding, env, inputs)?;
    inputs.record("p", json!(marking.p));
    build_marking_context_with(gamma.target(), marking.p, &gamma, env.group_caps())
}

fn ctx_command(c: &CtxCmd, env: &Env, inputs: &mut Inputs) -> Result<Outcome> {
    let v = match c {
        CtxCmd::Build { marking } => {
            let ctx = build_context(marking, env, inputs)?;
            json!({
                "context": ctx.id(),
                "complement": lattice_to_json(ctx.complement()),
                "complement_inclusion": matrix_to_json(ctx.complement_inclusion().matrix()),
                "complement_group_order": ctx.complement_group().order(),
                "stabilizer": group_json(ctx.stabilizer_elements()),
                "genuine_k3": ctx.genuine_k3(),
                "source_twisted_by_two": ctx.source_twisted_by_two(),
                "quotient": ctx.quotient().ok().map(|q| space_to_json(q.space())),
            })
        }
        CtxCmd::Admissible { marking } => {
            let ctx = build_context(marking, env, inputs)?;
            let r = check_enriques_admissible(&ctx)?;
            json!({
                "context": ctx.id(),
                "primitive": r.primitive,
                "saturation_index": big(&r.saturation_index),
                "complement_root_free": r.complement_root_free,
                "sigma": r.sigma,
                "sigma_bound_ok": r.sigma_bound_ok,
                "admissible": r.admissible,
            })
        }
        CtxCmd::Involution { marking } => {
            let ctx = build_context(marking, env, inputs)?;
            let iota = induced_involution(&ctx)?;
            json!({ "context": ctx.id(), "involution": matrix_to_json(&iota) })
        }
    };
    Ok(Outcome::Done(v))
}

fn context_generatrices(
    ctx: &MarkingContext,
    m: u32,
    filter: FilterArg,
    gens: Option<&str>,
    env: &Env,
    inputs: &mut Inputs,
) -> Result<Vec<Generatrix>> {
    let space = ctx.quotient()?.space().clone();
    match gens {
        Some(spec) => {
            let gs = input::generatrix_list(spec, env.group_caps())?;
            inputs.record("generatrices", Value::Array(gs.iter().map(generatrix_to_json).collect()));
            Ok(gs)
        }
        None => enumerate_generatrices_with(&space, m, filter.into(), env.exec.cap_grassmannian, env.parallel()),
    }
}

fn period_command(c: &PeriodCmd, env: &Env, inputs: &mut Inputs) -> Result<Outcome> {
    match c {
        PeriodCmd::Orbit { marking, m, filter, gens } => {
            let ctx = build_context(marking, env, inputs)?;
            let gs = context_generatrices(&ctx, *m, *filter, gens.as_deref(), env, inputs)?;
            let orbits = orbit_generatrices_with(&ctx, &gs, env.orbit_cap(), env.parallel())?;
            let points: Vec<Value> = orbits
                .iter()
                .map(|o| period_point_with(&ctx, &o[0], env.orbit_cap()).map(|p| p.to_json()))
                .collect::<Result<_>>()?;
            Ok(Outcome::Done(json!({
                "context": ctx.id(),
                "stabilizer_order": ctx.stabilizer_elements().len(),
                "generatrices": gs.len(),
                "orbit_count": orbits.len(),
                "orbits": orbits
                    .iter()
                    .map(|o| o.iter().map(generatrix_to_json).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
                "points": points,
            })))
        }
        PeriodCmd::Compare {
            a,
            b,
            g1,
            g2,
            ambient,
            embedding,
            vectors,
            p,
        } => {
            let (pa, pb) = match (a, b, g1, g2) {
                (Some(a), Some(b), None, None) => {
                    let pa = input::period_point(a, env.group_caps())?;
                    let pb = input::period_point(b, env.group_caps())?;
                    (pa, pb)
                }
                (None, None, Some(g1), Some(g2)) => {
                    let marking = MarkingIn {
                        embedding: EmbeddingIn {
                            embedding: embedding.clone(),
                            ambient: ambient.clone(),
                            vectors: vectors.clone(),
                        },
                        p: p.ok_or_else(|| Error::Malformed("--p is needed with --g1/--g2".into()))?,
                    };
                    let ctx = build_context(&marking, env, inputs)?;
                    let h1 = input::generatrix(g1, env.group_caps())?;
                    let h2 = input::generatrix(g2, env.group_caps())?;
                    input::record_generatrix(inputs, "g1", &h1);
                    input::record_generatrix(inputs, "g2", &h2);
                    (
                        period_point_with(&ctx, &h1, env.orbit_cap())?,
                        period_point_with(&ctx, &h2, env.orbit_cap())?,
                    )
                }
                _ => return Err(Error::Malformed("give --a and --b, or --g1 and --g2 with a marking".into())),
            };
            inputs.record("a", pa.to_json());
            inputs.record("b", pb.to_json());
            let same = same_period(&pa, &pb)?;
            Ok(Outcome::Done(json!({ "same": same, "a": pa.to_json(), "b": pb.to_json() })))
        }
    }
}

fn compared(oracle: Value, main: Option<Value>) -> Outcome {
    match main {
        None => Outcome::Done(json!({ "oracle": oracle })),
        Some(main) => {
            let agree = canonical_string(&main) == canonical_string(&oracle);
            let v = json!({ "oracle": oracle, "main": main, "match": agree });
            if agree {
                Outcome::Done(v)
            } else {
                Outcome::Mismatch(v)
            }
        }
    }
}

fn small_matrix_json(m: &oracle::Matrix) -> Value {
    json!(m)
}

pub fn oracle_field(p: u32, m: u32) -> Result<SlowField> {
    // only the modulus is shared with the library
    let modulus = galois_field(p, m)?.modulus().to_vec();
    Ok(SlowField::new(p, m as usize, &modulus))
}

fn coefficient_rows(f: &SlowField, rows: &[Vec<u32>]) -> Vec<Vec<Vec<u32>>> {
    rows.iter().map(|r| r.iter().map(|&x| f.digits(x)).collect()).collect()
}

fn oracle_command(c: &OracleCmd, env: &Env, inputs: &mut Inputs) -> Result<Outcome> {
    match c {
        OracleCmd::BoxRoots { lattice, norm, oracle } => {
            let l = load_lattice(&lattice.input, "lattice", env, inputs)?;
            let gram = oracle::small(&l.gram().to_rows())?;
            let found = oracle::box_vectors(&gram, *norm, oracle.budget)?;
            let as_json = |vs: Vec<Value>| json!({ "count": vs.len(), "vectors": vs });
            let main = if oracle.compare {
                let vs = enumerate_norm_vectors_with(&l, &BigInt::from(*norm), env.parallel())?;
                let mut vs: Vec<Vec<i64>> = oracle::small(&vs)?;
                vs.sort();
                Some(as_json(vs.iter().map(|v| json!(v)).collect()))
            } else {
                None
            };
            Ok(compared(as_json(found.iter().map(|v| json!(v)).collect()), main))
        }
        OracleCmd::IsoSubspaces { space, oracle } => {
            let v = load_space(space, env, inputs)?;
            let gram: Vec<Vec<i64>> = v.gram().iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
            let witness = oracle::iso_subspaces(v.prime(), &gram)?;
            let verdict = json!({ "neutral": witness.is_some() });
            let main = oracle.compare.then(|| v.is_neutral().map(|n| json!({ "neutral": n }))).transpose()?;
            let mut out = compared(verdict, main);
            if let Outcome::Done(ref mut val) | Outcome::Mismatch(ref mut val) = out {
                val["witness"] = json!(witness);
            }
            Ok(out)
        }
        OracleCmd::GenCensus { space, m, oracle } => {
            let v = load_space(space, env, inputs)?;
            let f = oracle_field(v.prime(), *m)?;
            let gram: Vec<Vec<i64>> = v.gram().iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
            let census = oracle::gen_census(&f, &gram, oracle.budget)?;
            let lists = |iso: Vec<Vec<Vec<Vec<u32>>>>, ch: Vec<Vec<Vec<Vec<u32>>>>, st: Vec<Vec<Vec<Vec<u32>>>>| {
                json!({
                    "isotropic": iso.len(),
                    "characteristic": ch.len(),
                    "strict": st.len(),
                    "characteristic_bases": ch,
                    "strict_bases": st,
                })
            };
            let sorted = |list: &[Vec<Vec<u32>>]| -> Vec<Vec<Vec<Vec<u32>>>> {
                let set: BTreeSet<Vec<Vec<Vec<u32>>>> = list.iter().map(|r| coefficient_rows(&f, r)).collect();
                set.into_iter().collect()
            };
            let found = lists(
                sorted(&census.isotropic),
                sorted(&census.characteristic),
                sorted(&census.strict),
            );
            let main = if oracle.compare {
                let mut per_filter = Vec::new();
                for filter in [GeneratrixFilter::Isotropic, GeneratrixFilter::Characteristic, GeneratrixFilter::Strict] {
                    let gs = enumerate_generatrices_with(&v, *m, filter, env.exec.cap_grassmannian, env.parallel())?;
                    let set: BTreeSet<Vec<Vec<Vec<u32>>>> = gs.iter().map(|g| g.coefficient_rows()).collect();
                    per_filter.push(set.into_iter().collect::<Vec<_>>());
                }
                let st = per_filter.pop().unwrap();
                let ch = per_filter.pop().unwrap();
                let iso = per_filter.pop().unwrap();
                Some(lists(iso, ch, st))
            } else {
                None
            };
            let mut out = compared(found, main);
            if let Outcome::Done(ref mut val) | Outcome::Mismatch(ref mut val) = out {
                val["scanned"] = json!(census.scanned.to_string());
                val["m"] = json!(m);
            }
            Ok(out)
        }
        OracleCmd::GroupExpand { lattice, oracle } => {
            let l = load_lattice(&lattice.input, "lattice", env, inputs)?;
            let gram = oracle::small(&l.gram().to_rows())?;
            let budget = usize::try_from(oracle.budget).unwrap_or(usize::MAX);
            let group = oracle::group_expand(&gram, oracle.budget, budget)?;
            let summary = |elements: &[oracle::Matrix]| {
                let listed: Vec<Value> = elements.iter().map(small_matrix_json).collect();
                json!({
                    "order": elements.len(),
                    "digest": sha256_hex(canonical_string(&Value::Array(listed)).as_bytes()),
                })
            };
            let main = if oracle.compare {
                let g = isometry_group_with(&l, env.group_caps())?;
                let mut els: Vec<oracle::Matrix> = g
                    .elements()
                    .expect("full groups are listed")
                    .iter()
                    .map(|m| oracle::small(&m.to_rows()))
                    .collect::<Result<_>>()?;
                els.sort();
                Some(summary(&els))
            } else {
                None
            };
            Ok(compared(summary(&group), main))
        }
        OracleCmd::OrbitBrute { marking, m, filter, oracle } => {
            let ctx = build_context(marking, env, inputs)?;
            let gs = context_generatrices(&ctx, *m, *filter, None, env, inputs)?;
            let result = brute_orbits(&ctx, &gs, *m, env.orbit_cap())?;
            let summary =
                |order: usize, classes: &[Vec<usize>]| json!({ "group_order": order, "classes": classes });
            let main = if oracle.compare {
                let orbits = orbit_generatrices_with(&ctx, &gs, env.orbit_cap(), env.parallel())?;
                let mut classes: Vec<Vec<usize>> = orbits
                    .iter()
                    .map(|o| {
                        let mut idx: Vec<usize> =
                            o.iter().map(|g| gs.iter().position(|h| h == g).expect("orbit member")).collect();
                        idx.sort();
                        idx
                    })
                    .collect();
                classes.sort();
                Some(summary(ctx.stabilizer_elements().len(), &classes))
            } else {
                None
            };
            let mut out = compared(summary(result.group_order, &result.classes), main);
            if let Outcome::Done(ref mut val) | Outcome::Mismatch(ref mut val) = out {
                val["context"] = json!(ctx.id());
                val["generatrices"] = json!(gs.len());
            }
            Ok(out)
        }
    }
}

/// Orbits of the stabilizer of `ctx` on `gs` by full expansion. Only the
/// stabilizer generators, the lifts of `N_0` and the field modulus are taken
/// from the library.
pub fn brute_orbits(ctx: &MarkingContext, gs: &[Generatrix], m: u32, budget: usize) -> Result<oracle::OrbitResult> {
    let f = oracle_field(ctx.prime(), m)?;
    let gram = oracle::small(&ctx.ambient().gram().to_rows())?;
    let lifts = oracle::small(ctx.quotient()?.lifts())?;
    let generators: Vec<oracle::Matrix> = ctx
        .stabilizer()
        .generators()
        .iter()
        .map(|g| oracle::small(&g.to_rows()))
        .collect::<Result<_>>()?;
    let bases: Vec<Vec<Vec<u32>>> = gs
        .iter()
        .map(|g| g.coefficient_rows().iter().map(|r| r.iter().map(|c| f.code(c)).collect()).collect())
        .collect();
    oracle::orbit_brute(&oracle::OrbitProblem {
        gram: &gram,
        p: ctx.prime(),
        lifts: &lifts,
        generators: &generators,
        field: &f,
        generatrices: &bases,
        element_budget: budget,
    })
}
