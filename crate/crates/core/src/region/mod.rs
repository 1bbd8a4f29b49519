//! Rate regions in the `(R_X, R_B)` plane.

mod geometry;
mod markov;
mod points;

use serde::{Deserialize, Serialize};

pub use geometry::{
    hausdorff_distance, sandwich_violations, BoundingBox, HalfPlane, RatePoint, RateRegion2D, RegionKind,
    BOUNDARY_SAMPLES, TOL_REGION,
};
pub use markov::{conditioned_source, markov_interpolation, markov_point, MarkovOptions, MarkovPoint, MarkovResult};
pub use points::{
    alpha, dw_point, generic_region, inner_bound_region, merging_point, outer_bound_region, qsr_point,
    qsr_point_from_value, Mode,
};

/// Export form of a region, with boundary samples for plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionDoc {
    pub halfplanes: Vec<HalfPlane>,
    pub vertices: Vec<RatePoint>,
    pub kind: RegionKind,
    pub provenance: String,
    pub boundary_samples: Vec<RatePoint>,
}

impl RegionDoc {
    pub fn new(region: &RateRegion2D, bbox: &BoundingBox) -> Self {
        Self {
            halfplanes: region.half_planes.clone(),
            vertices: region.vertices.clone(),
            kind: region.kind,
            provenance: region.provenance.clone(),
            boundary_samples: region.boundary_samples(bbox, BOUNDARY_SAMPLES),
        }
    }
}
