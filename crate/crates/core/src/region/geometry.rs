use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Membership and vertex slack.
pub const TOL_REGION: f64 = 1e-9;
/// Boundary samples emitted per region.
pub const BOUNDARY_SAMPLES: usize = 200;

/// `(R_X, R_B)` in bits / qubits per copy, with an optional ebit rate `E`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    #[serde(rename = "rX")]
    pub r_x: f64,
    #[serde(rename = "rB")]
    pub r_b: f64,
    #[serde(rename = "E", default, skip_serializing_if = "Option::is_none")]
    pub ebit_rate: Option<f64>,
}

impl RatePoint {
    pub fn new(r_x: f64, r_b: f64) -> Self {
        Self { r_x, r_b, ebit_rate: None }
    }

    pub fn with_ebit(mut self, e: f64) -> Self {
        self.ebit_rate = Some(e);
        self
    }

    pub fn distance(&self, other: &RatePoint) -> f64 {
        (self.r_x - other.r_x).hypot(self.r_b - other.r_b)
    }
}

/// `aX·R_X + aB·R_B ≥ b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane {
    #[serde(rename = "aX")]
    pub a_x: f64,
    #[serde(rename = "aB")]
    pub a_b: f64,
    pub b: f64,
}

impl HalfPlane {
    pub fn new(a_x: f64, a_b: f64, b: f64) -> Result<Self> {
        if !(a_x.is_finite() && a_b.is_finite() && b.is_finite()) {
            return Err(Error::InvalidRegion("non-finite half-plane".into()));
        }
        if a_x < 0.0 || a_b < 0.0 || (a_x == 0.0 && a_b == 0.0) {
            return Err(Error::InvalidRegion(format!("normal ({a_x}, {a_b}) must be nonnegative and nonzero")));
        }
        Ok(Self { a_x, a_b, b })
    }

    /// `aX·R_X + aB·R_B − b`; nonnegative inside.
    pub fn slack(&self, p: &RatePoint) -> f64 {
        self.a_x * p.r_x + self.a_b * p.r_b - self.b
    }

    pub fn contains(&self, p: &RatePoint) -> bool {
        self.slack(p) >= -TOL_REGION
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionKind {
    Inner,
    Outer,
    Exact,
}

impl RegionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionKind::Inner => "inner",
            RegionKind::Outer => "outer",
            RegionKind::Exact => "exact",
        }
    }
}

/// Convex, upper-right unbounded region of nonnegative rate pairs, kept as
/// half-planes and vertices together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRegion2D {
    #[serde(rename = "halfplanes")]
    pub half_planes: Vec<HalfPlane>,
    pub vertices: Vec<RatePoint>,
    pub kind: RegionKind,
    pub provenance: String,
}

impl RateRegion2D {
    pub fn new(half_planes: Vec<HalfPlane>, kind: RegionKind, provenance: impl Into<String>) -> Result<Self> {
        if half_planes.is_empty() {
            return Err(Error::InvalidRegion("empty half-plane list".into()));
        }
        let vertices = enumerate_vertices(&half_planes);
        Ok(Self { half_planes, vertices, kind, provenance: provenance.into() })
    }

    /// Membership with `TOL_REGION` slack; rates are nonnegative.
    pub fn contains(&self, p: &RatePoint) -> bool {
        p.r_x >= -TOL_REGION && p.r_b >= -TOL_REGION && self.half_planes.iter().all(|h| h.contains(p))
    }

    pub fn vertices(&self) -> &[RatePoint] {
        &self.vertices
    }

    /// Lower-left boundary inside `bbox`: up the vertical ray above the first
    /// vertex, through the vertices, out along the horizontal ray.
    pub fn boundary_polyline(&self, bbox: &BoundingBox) -> Vec<RatePoint> {
        let v = &self.vertices;
        let mut pts = Vec::with_capacity(v.len() + 2);
        let first = v[0];
        let last = v[v.len() - 1];
        pts.push(RatePoint::new(first.r_x, bbox.y_max.max(first.r_b)));
        pts.extend(v.iter().map(|p| RatePoint::new(p.r_x, p.r_b)));
        pts.push(RatePoint::new(bbox.x_max.max(last.r_x), last.r_b));
        pts.dedup_by(|a, b| a.distance(b) < TOL_REGION);
        pts
    }

    /// `count` points equally spaced in arc length along the boundary polyline.
    pub fn boundary_samples(&self, bbox: &BoundingBox, count: usize) -> Vec<RatePoint> {
        sample_polyline(&self.boundary_polyline(bbox), count)
    }
}

/// Plotting and comparison window `[0, x_max] × [0, y_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x_max: f64,
    pub y_max: f64,
}

impl BoundingBox {
    /// Extends one unit past the largest vertex coordinate of every region.
    pub fn around(regions: &[&RateRegion2D]) -> Self {
        let mut x_max: f64 = 0.0;
        let mut y_max: f64 = 0.0;
        for r in regions {
            for v in &r.vertices {
                x_max = x_max.max(v.r_x);
                y_max = y_max.max(v.r_b);
            }
        }
        Self { x_max: x_max + 1.0, y_max: y_max + 1.0 }
    }
}

fn enumerate_vertices(hp: &[HalfPlane]) -> Vec<RatePoint> {
    let mut lines: Vec<HalfPlane> = hp.to_vec();
    lines.push(HalfPlane { a_x: 1.0, a_b: 0.0, b: 0.0 });
    lines.push(HalfPlane { a_x: 0.0, a_b: 1.0, b: 0.0 });
    let mut out: Vec<RatePoint> = Vec::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let (p, q) = (&lines[i], &lines[j]);
            let det = p.a_x * q.a_b - p.a_b * q.a_x;
            if det.abs() < 1e-14 {
                continue;
            }
            let x = (p.b * q.a_b - p.a_b * q.b) / det;
            let y = (p.a_x * q.b - p.b * q.a_x) / det;
            let pt = RatePoint::new(x, y);
            let inside = x >= -TOL_REGION && y >= -TOL_REGION && hp.iter().all(|h| h.contains(&pt));
            if inside && !out.iter().any(|o| o.distance(&pt) < TOL_REGION) {
                out.push(pt);
            }
        }
    }
    out.sort_by(|a, b| a.r_x.total_cmp(&b.r_x).then(a.r_b.total_cmp(&b.r_b)));
    out
}

pub(crate) fn sample_polyline(pts: &[RatePoint], count: usize) -> Vec<RatePoint> {
    if pts.len() < 2 || count < 2 {
        return pts.iter().take(count.max(1)).copied().collect();
    }
    let seg: Vec<f64> = pts.windows(2).map(|w| w[0].distance(&w[1])).collect();
    let total: f64 = seg.iter().sum();
    let mut out = Vec::with_capacity(count);
    let mut k = 0;
    let mut acc = 0.0;
    for i in 0..count {
        let s = total * i as f64 / (count - 1) as f64;
        while k + 1 < seg.len() && acc + seg[k] < s {
            acc += seg[k];
            k += 1;
        }
        let t = if seg[k] > 0.0 { ((s - acc) / seg[k]).clamp(0.0, 1.0) } else { 0.0 };
        let (a, b) = (pts[k], pts[k + 1]);
        out.push(RatePoint::new(a.r_x + t * (b.r_x - a.r_x), a.r_b + t * (b.r_b - a.r_b)));
    }
    out
}

fn point_segment_distance(p: &RatePoint, a: &RatePoint, b: &RatePoint) -> f64 {
    let (dx, dy) = (b.r_x - a.r_x, b.r_b - a.r_b);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p.r_x - a.r_x) * dx + (p.r_b - a.r_b) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    p.distance(&RatePoint::new(a.r_x + t * dx, a.r_b + t * dy))
}

fn point_polyline_distance(p: &RatePoint, line: &[RatePoint]) -> f64 {
    if line.len() == 1 {
        return p.distance(&line[0]);
    }
    line.windows(2)
        .map(|w| point_segment_distance(p, &w[0], &w[1]))
        .fold(f64::INFINITY, f64::min)
}

/// Hausdorff distance between the two boundaries inside `bbox`, evaluated on
/// dense arc-length samples plus the polyline corners.
pub fn hausdorff_distance(a: &RateRegion2D, b: &RateRegion2D, bbox: &BoundingBox) -> f64 {
    let la = a.boundary_polyline(bbox);
    let lb = b.boundary_polyline(bbox);
    let directed = |from: &[RatePoint], to: &[RatePoint]| {
        let mut pts = sample_polyline(from, 2000);
        pts.extend_from_slice(from);
        pts.iter().map(|p| point_polyline_distance(p, to)).fold(0.0, f64::max)
    };
    directed(&la, &lb).max(directed(&lb, &la))
}

/// Points of a `n × n` grid over `bbox` that lie in `inner` but not in `outer`.
pub fn sandwich_violations(inner: &RateRegion2D, outer: &RateRegion2D, bbox: &BoundingBox, n: usize) -> Vec<RatePoint> {
    let mut bad = Vec::new();
    let mut check = |p: RatePoint| {
        if inner.contains(&p) && !outer.contains(&p) {
            bad.push(p);
        }
    };
    for i in 0..n {
        for j in 0..n {
            let p = RatePoint::new(
                bbox.x_max * i as f64 / (n - 1).max(1) as f64,
                bbox.y_max * j as f64 / (n - 1).max(1) as f64,
            );
            check(p);
        }
    }
    for p in inner.boundary_samples(bbox, n) {
        check(p);
    }
    bad
}

#[cfg(test)]
mod tests {
    use super::*;

    fn staircase() -> RateRegion2D {
        RateRegion2D::new(
            vec![
                HalfPlane::new(1.0, 0.0, 0.0).unwrap(),
                HalfPlane::new(0.0, 1.0, 1.0).unwrap(),
                HalfPlane::new(1.0, 2.0, 3.0).unwrap(),
            ],
            RegionKind::Outer,
            "test",
        )
        .unwrap()
    }

    #[test]
    fn vertices_by_intersection() {
        let v = staircase().vertices;
        assert_eq!(v.len(), 2);
        assert!(v[0].distance(&RatePoint::new(0.0, 1.5)) < 1e-12);
        assert!(v[1].distance(&RatePoint::new(1.0, 1.0)) < 1e-12);
    }

    #[test]
    fn membership() {
        let r = staircase();
        assert!(r.contains(&RatePoint::new(1.0, 1.0)));
        assert!(!r.contains(&RatePoint::new(0.0, 0.0)));
        assert!(!r.contains(&RatePoint::new(-1.0, 5.0)));
    }

    #[test]
    fn invalid_half_planes() {
        assert!(HalfPlane::new(0.0, 0.0, 1.0).is_err());
        assert!(HalfPlane::new(-1.0, 1.0, 1.0).is_err());
        assert!(RateRegion2D::new(vec![], RegionKind::Inner, "").is_err());
    }

    #[test]
    fn samples_are_evenly_spaced_on_boundary() {
        let r = staircase();
        let bbox = BoundingBox { x_max: 3.0, y_max: 3.0 };
        let s = r.boundary_samples(&bbox, BOUNDARY_SAMPLES);
        assert_eq!(s.len(), BOUNDARY_SAMPLES);
        assert!(s[0].distance(&RatePoint::new(0.0, 3.0)) < 1e-12);
        assert!(s[BOUNDARY_SAMPLES - 1].distance(&RatePoint::new(3.0, 1.0)) < 1e-12);
        for p in &s {
            let on = r.half_planes.iter().any(|h| h.slack(p).abs() < 1e-9) || p.r_x.abs() < 1e-9;
            assert!(on && r.contains(p));
        }
    }

    #[test]
    fn hausdorff_of_shifted_region() {
        let a = staircase();
        let b = RateRegion2D::new(
            vec![HalfPlane::new(1.0, 0.0, 0.0).unwrap(), HalfPlane::new(0.0, 1.0, 1.25).unwrap(), HalfPlane::new(1.0, 2.0, 3.0).unwrap()],
            RegionKind::Outer,
            "test",
        )
        .unwrap();
        let bbox = BoundingBox { x_max: 3.0, y_max: 3.0 };
        assert!(hausdorff_distance(&a, &a, &bbox) < 1e-12);
        // (1,1) moves to the segment ending at (0.5, 1.25); nearest point distance 0.25.
        assert!((hausdorff_distance(&a, &b, &bbox) - 0.25).abs() < 1e-3);
    }
}
