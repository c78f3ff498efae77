//! Marked ambient lattices, the action of their stabilizers on
//! generatrices, period points and catalog censuses.

mod action;
mod catalog;
mod context;

pub use action::{
    act_on_generatrix, orbit_generatrices, orbit_generatrices_with, period_point, period_point_with,
    remarked_period_point, same_period, PeriodPoint, DEFAULT_ORBIT_CAP,
};
pub use catalog::{
    component_census, embedding_equivalent, Bound, CensusReport, EmbeddingCatalog, OverlatticeEntry, RecordedCounts,
    TargetIsometries,
};
pub use context::{
    build_marking_context, build_marking_context_with, check_enriques_admissible, extend_isometry,
    induced_involution, isometry_inverse, AdmissibilityReport, MarkingContext,
};
