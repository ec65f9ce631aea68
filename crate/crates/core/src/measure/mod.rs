//! Leaf-bounded volumes, geometric triviality tests and reflection holonomy.
//!
//! All routines work in adapted coordinates, where regions bounded by leaves
//! are coordinate boxes ([`Region`]). Reflections and loops require a
//! codimension-1 chart; use [`WebChart::refine_to_codim1`] for webs with
//! larger blocks.

mod reflect;
mod split;
mod taylor;

pub use crate::quadrature::{Estimate, QuadratureSpec};
pub use crate::region::Region;
pub use reflect::{holonomy_defect, reflect, reflection_loop, LoopResult, ReflectionResult};
pub use split::{
    check_product_condition, equal_split, subdivision_volumes, ProductReport, SplitResult,
    SubdivisionVolumes, SPLIT_TOL_FACTOR,
};
pub use taylor::{
    fit_loop_curvature, reflection_taylor_check, Coefficient, CurvatureFit, FitSample, TaylorCheck,
    DEFAULT_FIT_SCALES,
};

use crate::quadrature::integrate_box;
use crate::web::WebChart;
use crate::{Error, Result};

/// Signed Ω-volume of the oriented box `r`.
pub fn region_volume(w: &WebChart, r: &Region, spec: &QuadratureSpec) -> Result<Estimate> {
    spec.validate()?;
    if !w.domain().contains_region(r) {
        return Err(Error::Invalid(format!(
            "region {:?}..{:?} leaves the chart domain",
            r.start(),
            r.end()
        )));
    }
    let h = w.compiled_density();
    integrate_box(|x| Ok(h.eval(x)?), r.start(), r.end(), spec)
}
