//! Recovering a density from its nonuniformity tensor and leaf data, chart
//! normalization, and the planar canonical form.

mod admissible;
mod normalize;
mod planar;
mod reconstruct;

pub use admissible::{
    check_matrix_admissible, check_tensor_admissible, AdmissibilityVerdict, AdmissibleTensor,
    Condition, Violation,
};
pub use normalize::{normalize_chart, NormalizedChart};
pub use planar::{
    canonical_form_report, planar_invariants, CanonicalFormReport, PlanarInvariants,
    GENERICITY_THRESHOLD,
};
pub use reconstruct::{
    reconstruct_density, reconstruct_density_with, roundtrip_error, roundtrip_error_with,
    BoundaryData, DensityGrid, GridSpec, PairRule, RoundTrip,
};
