use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde_json::{json, Value};

use super::context::{extend_isometry, isometry_inverse, MarkingContext};
use crate::error::{Error, Result};
use crate::finite_form::{Generatrix, PrimeMatrix};
use crate::matrix::IntMatrix;

pub const DEFAULT_ORBIT_CAP: usize = 100_000;

/// `φ · G`: the map induced by `φ` on `pN^∨/pN`, extended to `F_{p^m}`.
pub fn act_on_generatrix(ctx: &MarkingContext, phi: &IntMatrix, g: &Generatrix) -> Result<Generatrix> {
    let quotient = ctx.quotient()?;
    if g.ambient() != quotient.space() {
        return Err(Error::Dimension("generatrix does not live in the dual quotient of the context".into()));
    }
    g.apply(&quotient.action(phi)?)
}

/// The distinct maps induced on the quotient by the stabilizer.
fn induced_maps(ctx: &MarkingContext, cap: usize) -> Result<Vec<PrimeMatrix>> {
    let elements = ctx.stabilizer_elements();
    if elements.len() > cap {
        return Err(Error::CapExceeded {
            what: "orbit",
            cap: cap as u128,
        });
    }
    let quotient = ctx.quotient()?;
    let maps: BTreeSet<PrimeMatrix> = elements.iter().map(|q| quotient.action(q)).collect::<Result<_>>()?;
    Ok(maps.into_iter().collect())
}

fn orbit_of(maps: &[PrimeMatrix], g: &Generatrix) -> Result<BTreeSet<Generatrix>> {
    maps.iter().map(|a| g.apply(a)).collect()
}

fn check_ambient(ctx: &MarkingContext, gs: &[Generatrix]) -> Result<()> {
    let space = ctx.quotient()?.space();
    match gs.iter().position(|g| g.ambient() != space) {
        Some(i) => Err(Error::Dimension(format!("generatrix {i} does not live in the dual quotient"))),
        None => Ok(()),
    }
}

pub fn orbit_generatrices(ctx: &MarkingContext, gs: &[Generatrix]) -> Result<Vec<Vec<Generatrix>>> {
    orbit_generatrices_with(ctx, gs, DEFAULT_ORBIT_CAP, true)
}

/// Partitions `gs` into stabilizer orbits. Each orbit is sorted and
/// duplicates are merged; orbits are ordered by their first element.
pub fn orbit_generatrices_with(
    ctx: &MarkingContext,
    gs: &[Generatrix],
    cap: usize,
    parallel: bool,
) -> Result<Vec<Vec<Generatrix>>> {
    check_ambient(ctx, gs)?;
    let maps = induced_maps(ctx, cap)?;
    let minimum = |g: &Generatrix| -> Result<Generatrix> {
        Ok(orbit_of(&maps, g)?.into_iter().next().expect("orbit contains g"))
    };
    let keys: Vec<Generatrix> = if parallel {
        gs.par_iter().map(minimum).collect::<Result<_>>()?
    } else {
        gs.iter().map(minimum).collect::<Result<_>>()?
    };
    let mut orbits: BTreeMap<Generatrix, BTreeSet<Generatrix>> = BTreeMap::new();
    for (key, g) in keys.into_iter().zip(gs) {
        orbits.entry(key).or_default().insert(g.clone());
    }
    let mut out: Vec<Vec<Generatrix>> = orbits.into_values().map(|o| o.into_iter().collect()).collect();
    out.sort();
    Ok(out)
}

/// The orbit of a characteristic generatrix, represented by its minimum.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PeriodPoint {
    pub context_id: String,
    pub representative: Generatrix,
    pub orbit_size: usize,
}

impl PeriodPoint {
    pub fn to_json(&self) -> Value {
        json!({
            "context": self.context_id,
            "representative": crate::json::generatrix_to_json(&self.representative),
            "orbit_size": self.orbit_size,
        })
    }

    pub fn from_json(v: &Value, path: &str) -> Result<PeriodPoint> {
        let context_id = crate::json::field(v, "context", path)?
            .as_str()
            .ok_or_else(|| Error::Malformed(format!("{path}.context: expected a string")))?
            .to_string();
        let representative =
            crate::json::generatrix_from_json(crate::json::field(v, "representative", path)?, &format!("{path}.representative"))?;
        let orbit_size = crate::json::parse_u64(
            crate::json::field(v, "orbit_size", path)?,
            &format!("{path}.orbit_size"),
        )? as usize;
        Ok(PeriodPoint {
            context_id,
            representative,
            orbit_size,
        })
    }
}

pub fn period_point(ctx: &MarkingContext, g: &Generatrix) -> Result<PeriodPoint> {
    period_point_with(ctx, g, DEFAULT_ORBIT_CAP)
}

pub fn period_point_with(ctx: &MarkingContext, g: &Generatrix, cap: usize) -> Result<PeriodPoint> {
    check_ambient(ctx, std::slice::from_ref(g))?;
    if !g.is_characteristic()? {
        return Err(Error::NotCharacteristic);
    }
    let orbit = orbit_of(&induced_maps(ctx, cap)?, g)?;
    Ok(PeriodPoint {
        context_id: ctx.id().to_string(),
        orbit_size: orbit.len(),
        representative: orbit.into_iter().next().expect("orbit contains g"),
    })
}

pub fn same_period(a: &PeriodPoint, b: &PeriodPoint) -> Result<bool> {
    if a.context_id != b.context_id {
        return Err(Error::ContextMismatch);
    }
    Ok(a.representative == b.representative)
}

/// The period of `G` seen through the marking `γ ∘ ψ`, transported back
/// to the context of `γ`: with `Φ ∘ γ = γ ∘ ψ` it is the point of
/// `Φ^{-1} · G`. Any two extensions differ by an element of `O(N, γ)`, so
/// the result does not depend on the extension found. `None` when `ψ`
/// does not extend to `N`.
pub fn remarked_period_point(ctx: &MarkingContext, psi: &IntMatrix, g: &Generatrix) -> Result<Option<PeriodPoint>> {
    let Some(phi) = extend_isometry(ctx, psi)? else {
        return Ok(None);
    };
    let back = isometry_inverse(ctx.ambient(), &phi)?;
    let moved = act_on_generatrix(ctx, &back, g)?;
    period_point(ctx, &moved).map(Some)
}
