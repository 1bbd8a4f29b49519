use serde::{Deserialize, Serialize};

use super::geometry::{HalfPlane, RatePoint, RateRegion2D, RegionKind, TOL_REGION};
use crate::error::{Error, Result};
use crate::idelta::{IdeltaResult, TOL_FEAS};
use crate::source::EntropicProfile;

/// Whether the decoder and encoder share free entanglement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Unassisted,
    #[default]
    Assisted,
}

/// `(S(X|B), S(B))`.
pub fn dw_point(p: &EntropicProfile) -> RatePoint {
    RatePoint::new(p.s_x_given_b, p.s_b)
}

/// `(S(X), ½(S(B) + S(B|X)))` with `E = −½ I(X:B)`.
pub fn merging_point(p: &EntropicProfile) -> RatePoint {
    RatePoint::new(p.s_x, 0.5 * (p.s_b + p.s_b_given_x)).with_ebit(-0.5 * p.i_x_b)
}

/// `(S(X), ½(S(B) + S(B|X) − I(X:W)))` with `E = ½(I(C:W) − I(C:X))` of the channel.
pub fn qsr_point(p: &EntropicProfile, idelta: &IdeltaResult) -> Result<RatePoint> {
    if !idelta.feasible || idelta.constraint > TOL_FEAS {
        return Err(Error::Infeasible(format!(
            "channel has I(R:W|X) = {:e}, above {TOL_FEAS:e}",
            idelta.constraint
        )));
    }
    Ok(qsr_point_from_value(p, idelta.value).with_ebit(idelta.ebit_rate))
}

/// QSR point for a given `I(X:W)`, without ebit rate.
pub fn qsr_point_from_value(p: &EntropicProfile, value: f64) -> RatePoint {
    RatePoint::new(p.s_x, 0.5 * (p.s_b + p.s_b_given_x - value))
}

fn hp(a_x: f64, a_b: f64, b: f64) -> Result<HalfPlane> {
    HalfPlane::new(a_x, a_b, b)
}

/// `R_X ≥ S(X|B)`, `R_B ≥ ½(S(B)+S(B|X))`, `R_X + 2R_B ≥ S(B) + S(XB)`.
///
/// Exact for generic sources; otherwise only achievable, and labelled inner.
pub fn generic_region(p: &EntropicProfile, is_generic: bool) -> Result<RateRegion2D> {
    let kind = if is_generic { RegionKind::Exact } else { RegionKind::Inner };
    let provenance = if is_generic {
        "generic source: optimal region"
    } else {
        "non-generic source: achievable region only"
    };
    RateRegion2D::new(
        vec![
            hp(1.0, 0.0, p.s_x_given_b)?,
            hp(0.0, 1.0, 0.5 * (p.s_b + p.s_b_given_x))?,
            hp(1.0, 2.0, p.s_b + p.s_xb)?,
        ],
        kind,
        provenance,
    )
}

/// Converse bounds with `Ĩ₀`; the unassisted mode adds `R_X + R_B ≥ S(XB)`.
pub fn outer_bound_region(p: &EntropicProfile, i0_tilde: f64, mode: Mode) -> Result<RateRegion2D> {
    if !(i0_tilde >= 0.0) {
        return Err(Error::OutOfDomain(format!("Ĩ₀ = {i0_tilde} is negative")));
    }
    if i0_tilde > p.i_x_b + 1e-6 {
        return Err(Error::OutOfDomain(format!("Ĩ₀ = {i0_tilde} exceeds I(X:B) = {}", p.i_x_b)));
    }
    let mut planes = vec![
        hp(1.0, 0.0, p.s_x_given_b)?,
        hp(0.0, 1.0, 0.5 * (p.s_b + p.s_b_given_x - i0_tilde))?,
        hp(1.0, 2.0, p.s_b + p.s_xb - i0_tilde)?,
    ];
    if mode == Mode::Unassisted {
        planes.push(hp(1.0, 1.0, p.s_xb)?);
    }
    RateRegion2D::new(planes, RegionKind::Outer, format!("converse bound, {mode:?} model, Ĩ0 = {i0_tilde}").to_lowercase())
}

/// `α = 2I(X:B)/(I(X:B) + I₀)`, with `α = 1` when both vanish.
pub fn alpha(p: &EntropicProfile, i0: f64) -> f64 {
    let den = p.i_x_b + i0;
    if den <= 0.0 {
        1.0
    } else {
        2.0 * p.i_x_b / den
    }
}

/// Upper-right convex closure of the DW point and the QSR point for `I₀`.
pub fn inner_bound_region(p: &EntropicProfile, i0: f64) -> Result<RateRegion2D> {
    if !(i0 >= -1e-12) || i0 > p.i_x_b + 1e-6 {
        return Err(Error::OutOfDomain(format!("I₀ = {i0} outside [0, I(X:B) = {}]", p.i_x_b)));
    }
    let i0 = i0.max(0.0);
    let a = alpha(p, i0);
    let dw = dw_point(p);
    let qsr = qsr_point_from_value(p, i0);
    let line = hp(1.0, a, p.s_x_given_b + a * p.s_b)?;
    for pt in [dw, qsr] {
        if line.slack(&pt).abs() > TOL_REGION.max(1e-9 * (1.0 + p.s_b)) {
            return Err(Error::InvalidRegion(format!("α-line misses ({}, {})", pt.r_x, pt.r_b)));
        }
    }
    RateRegion2D::new(
        vec![hp(1.0, 0.0, p.s_x_given_b)?, hp(0.0, 1.0, qsr.r_b)?, line],
        RegionKind::Inner,
        format!("hull of DW and QSR points, I0 = {i0}"),
    )
}
