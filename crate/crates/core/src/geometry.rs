//! Yawed (vertical-axis rotated) boxes and the convex-polygon helpers used
//! by the spatial predicates.
//!
//! The floor plane is `x`/`y`; `z` points up. A yawed box is therefore a
//! vertical prism: a rotated rectangle footprint extruded over a z-interval.
//! Several quantities (distance, intersection volume) separate into a
//! footprint term and a z-interval term because of this.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Point2 = [f64; 2];
pub type Point3 = [f64; 3];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("box extents must be positive and finite, got {0:?}")]
    NonPositiveExtent([f64; 3]),
    #[error("box center and yaw must be finite")]
    NonFinite,
}

/// Box with rotation about the vertical axis only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BoxDoc", into = "BoxDoc")]
pub struct OrientedBox {
    center: Point3,
    size: [f64; 3],
    yaw: f64,
}

#[derive(Serialize, Deserialize)]
struct BoxDoc {
    center: Point3,
    size: [f64; 3],
    yaw: f64,
}

impl TryFrom<BoxDoc> for OrientedBox {
    type Error = GeometryError;

    fn try_from(doc: BoxDoc) -> Result<Self, Self::Error> {
        OrientedBox::new(doc.center, doc.size, doc.yaw)
    }
}

impl From<OrientedBox> for BoxDoc {
    fn from(b: OrientedBox) -> Self {
        BoxDoc {
            center: b.center,
            size: b.size,
            yaw: b.yaw,
        }
    }
}

/// Maps an angle into `[-π, π)`. Angles already in range are returned
/// untouched so that normalization is idempotent bit for bit.
pub fn normalize_yaw(yaw: f64) -> f64 {
    if (-PI..PI).contains(&yaw) {
        return yaw;
    }
    let mut y = (yaw + PI).rem_euclid(2.0 * PI) - PI;
    if y >= PI {
        y -= 2.0 * PI;
    }
    if y < -PI {
        y = -PI;
    }
    y
}

impl OrientedBox {
    pub fn new(center: Point3, size: [f64; 3], yaw: f64) -> Result<Self, GeometryError> {
        if size.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(GeometryError::NonPositiveExtent(size));
        }
        if center.iter().any(|c| !c.is_finite()) || !yaw.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        Ok(Self {
            center,
            size,
            yaw: normalize_yaw(yaw),
        })
    }

    /// Axis-aligned box spanning `min..max`.
    pub fn from_min_max(min: Point3, max: Point3) -> Result<Self, GeometryError> {
        let center = [
            0.5 * (min[0] + max[0]),
            0.5 * (min[1] + max[1]),
            0.5 * (min[2] + max[2]),
        ];
        let size = [max[0] - min[0], max[1] - min[1], max[2] - min[2]];
        Self::new(center, size, 0.0)
    }

    pub fn center(&self) -> Point3 {
        self.center
    }

    pub fn size(&self) -> [f64; 3] {
        self.size
    }

    pub fn yaw(&self) -> f64 {
        self.yaw
    }

    pub fn half_extents(&self) -> [f64; 3] {
        [0.5 * self.size[0], 0.5 * self.size[1], 0.5 * self.size[2]]
    }

    pub fn z_min(&self) -> f64 {
        self.center[2] - 0.5 * self.size[2]
    }

    pub fn z_max(&self) -> f64 {
        self.center[2] + 0.5 * self.size[2]
    }

    pub fn volume(&self) -> f64 {
        self.size[0] * self.size[1] * self.size[2]
    }

    pub fn footprint_area(&self) -> f64 {
        self.size[0] * self.size[1]
    }

    /// Footprint rectangle corners in counter-clockwise order.
    pub fn footprint(&self) -> [Point2; 4] {
        let (s, c) = self.yaw.sin_cos();
        let [hx, hy, _] = self.half_extents();
        let local = [[-hx, -hy], [hx, -hy], [hx, hy], [-hx, hy]];
        local.map(|[lx, ly]| {
            [
                self.center[0] + lx * c - ly * s,
                self.center[1] + lx * s + ly * c,
            ]
        })
    }

    /// The eight corners: bottom face (ccw) then top face (ccw).
    pub fn corners(&self) -> [Point3; 8] {
        let fp = self.footprint();
        let (lo, hi) = (self.z_min(), self.z_max());
        let mut out = [[0.0; 3]; 8];
        for (i, p) in fp.iter().enumerate() {
            out[i] = [p[0], p[1], lo];
            out[i + 4] = [p[0], p[1], hi];
        }
        out
    }

    /// World point expressed in the box frame (origin at center, axes along
    /// the box edges).
    pub fn to_local(&self, p: Point3) -> Point3 {
        let (s, c) = self.yaw.sin_cos();
        let dx = p[0] - self.center[0];
        let dy = p[1] - self.center[1];
        [dx * c + dy * s, -dx * s + dy * c, p[2] - self.center[2]]
    }

    /// Box-frame point mapped back to world coordinates.
    pub fn to_world(&self, p: Point3) -> Point3 {
        let (s, c) = self.yaw.sin_cos();
        [
            self.center[0] + p[0] * c - p[1] * s,
            self.center[1] + p[0] * s + p[1] * c,
            self.center[2] + p[2],
        ]
    }

    pub fn contains(&self, p: Point3) -> bool {
        let l = self.to_local(p);
        let h = self.half_extents();
        (0..3).all(|i| l[i].abs() <= h[i])
    }
}

pub fn distance3(a: Point3, b: Point3) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

/// Gap between two closed intervals; zero when they overlap or touch.
pub fn interval_gap(a: (f64, f64), b: (f64, f64)) -> f64 {
    (b.0 - a.1).max(a.0 - b.1).max(0.0)
}

/// Length of the overlap of two closed intervals.
pub fn interval_overlap(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.1.min(b.1) - a.0.max(b.0)).max(0.0)
}

fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Shoelace area, always non-negative.
pub fn polygon_area(poly: &[Point2]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        acc += a[0] * b[1] - b[0] * a[1];
    }
    0.5 * acc.abs()
}

/// Sutherland–Hodgman clip of `subject` against the convex, counter-clockwise
/// polygon `clip`.
pub fn clip_convex(subject: &[Point2], clip: &[Point2]) -> Vec<Point2> {
    let mut output: Vec<Point2> = subject.to_vec();
    for i in 0..clip.len() {
        if output.is_empty() {
            break;
        }
        let a = clip[i];
        let b = clip[(i + 1) % clip.len()];
        let input = std::mem::take(&mut output);
        for j in 0..input.len() {
            let cur = input[j];
            let prev = input[(j + input.len() - 1) % input.len()];
            let cur_in = cross(a, b, cur) >= 0.0;
            let prev_in = cross(a, b, prev) >= 0.0;
            if cur_in {
                if !prev_in {
                    output.push(segment_line_intersection(prev, cur, a, b));
                }
                output.push(cur);
            } else if prev_in {
                output.push(segment_line_intersection(prev, cur, a, b));
            }
        }
    }
    output
}

fn segment_line_intersection(p: Point2, q: Point2, a: Point2, b: Point2) -> Point2 {
    let dp = cross(a, b, p);
    let dq = cross(a, b, q);
    let denom = dp - dq;
    if denom.abs() < f64::EPSILON {
        return q;
    }
    let t = dp / denom;
    [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
}

/// Area of the intersection of two convex counter-clockwise polygons.
pub fn convex_intersection_area(a: &[Point2], b: &[Point2]) -> f64 {
    polygon_area(&clip_convex(a, b))
}

/// Inclusive point-in-convex-polygon test (ccw winding).
pub fn point_in_convex(p: Point2, poly: &[Point2]) -> bool {
    (0..poly.len()).all(|i| cross(poly[i], poly[(i + 1) % poly.len()], p) >= -1e-12)
}

pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let d = [ap[0] - t * ab[0], ap[1] - t * ab[1]];
    (d[0] * d[0] + d[1] * d[1]).sqrt()
}

/// Distance from a point to a convex polygon; zero inside.
pub fn point_polygon_distance(p: Point2, poly: &[Point2]) -> f64 {
    if point_in_convex(p, poly) {
        return 0.0;
    }
    (0..poly.len())
        .map(|i| point_segment_distance(p, poly[i], poly[(i + 1) % poly.len()]))
        .fold(f64::INFINITY, f64::min)
}

fn project(poly: &[Point2], axis: Point2) -> (f64, f64) {
    poly.iter()
        .map(|p| p[0] * axis[0] + p[1] * axis[1])
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| {
            (lo.min(d), hi.max(d))
        })
}

/// Separating-axis test for convex polygons. Touching counts as
/// intersecting when `strict` is false.
pub fn convex_polygons_intersect(a: &[Point2], b: &[Point2], strict: bool) -> bool {
    for poly in [a, b] {
        for i in 0..poly.len() {
            let p = poly[i];
            let q = poly[(i + 1) % poly.len()];
            let axis = [-(q[1] - p[1]), q[0] - p[0]];
            let (a_lo, a_hi) = project(a, axis);
            let (b_lo, b_hi) = project(b, axis);
            let separated = if strict {
                a_hi <= b_lo || b_hi <= a_lo
            } else {
                a_hi < b_lo || b_hi < a_lo
            };
            if separated {
                return false;
            }
        }
    }
    true
}

/// Minimum distance between two convex polygons; zero if they intersect.
pub fn convex_polygon_distance(a: &[Point2], b: &[Point2]) -> f64 {
    if convex_polygons_intersect(a, b, false) {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for (from, to) in [(a, b), (b, a)] {
        for &p in from {
            for i in 0..to.len() {
                best = best.min(point_segment_distance(p, to[i], to[(i + 1) % to.len()]));
            }
        }
    }
    best
}

/// Axis-aligned 2D bounds of a point set as `(min, max)`.
pub fn bounds2(points: &[Point2]) -> (Point2, Point2) {
    points.iter().fold(
        ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]),
        |(lo, hi), p| {
            (
                [lo[0].min(p[0]), lo[1].min(p[1])],
                [hi[0].max(p[0]), hi[1].max(p[1])],
            )
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn yaw_is_normalized_into_half_open_range() {
        assert_relative_eq!(normalize_yaw(3.0 * PI), -PI, epsilon = 1e-12);
        assert_eq!(normalize_yaw(PI), -PI);
        assert_eq!(normalize_yaw(0.3), 0.3);
        let y = normalize_yaw(-7.5);
        assert!((-PI..PI).contains(&y));
        assert_eq!(normalize_yaw(y), y);
    }

    #[test]
    fn rejects_non_positive_extent() {
        assert!(OrientedBox::new([0.0; 3], [1.0, 0.0, 1.0], 0.0).is_err());
        assert!(OrientedBox::new([0.0; 3], [1.0, -1.0, 1.0], 0.0).is_err());
        assert!(OrientedBox::new([f64::NAN, 0.0, 0.0], [1.0; 3], 0.0).is_err());
    }

    #[test]
    fn corners_match_rotation() {
        let b = OrientedBox::new([1.0, 2.0, 0.5], [2.0, 1.0, 1.0], PI / 2.0).unwrap();
        let fp = b.footprint();
        // A quarter turn swaps the extents.
        let (lo, hi) = bounds2(&fp);
        assert_relative_eq!(hi[0] - lo[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(hi[1] - lo[1], 2.0, epsilon = 1e-12);
        assert_relative_eq!(polygon_area(&fp), 2.0, epsilon = 1e-12);
        assert_eq!(b.corners(), b.corners());
        for c in b.corners() {
            assert!(b.contains([
                c[0] * (1.0 - 1e-9) + 1.0 * 1e-9,
                c[1] * (1.0 - 1e-9) + 2.0 * 1e-9,
                c[2] * (1.0 - 1e-9) + 0.5 * 1e-9
            ]));
        }
    }

    #[test]
    fn local_world_round_trip() {
        let b = OrientedBox::new([0.3, -1.0, 2.0], [1.0, 2.0, 3.0], 0.7).unwrap();
        let p = [1.234, 5.678, -0.5];
        let q = b.to_world(b.to_local(p));
        for i in 0..3 {
            assert_relative_eq!(p[i], q[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn clipping_two_unit_squares() {
        let a = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let b = [[0.5, 0.5], [1.5, 0.5], [1.5, 1.5], [0.5, 1.5]];
        assert_relative_eq!(convex_intersection_area(&a, &b), 0.25, epsilon = 1e-12);
        let far = [[3.0, 3.0], [4.0, 3.0], [4.0, 4.0], [3.0, 4.0]];
        assert_eq!(convex_intersection_area(&a, &far), 0.0);
    }

    #[test]
    fn polygon_distance() {
        let a = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let b = [[1.3, 0.0], [2.3, 0.0], [2.3, 1.0], [1.3, 1.0]];
        assert_relative_eq!(convex_polygon_distance(&a, &b), 0.3, epsilon = 1e-12);
        assert_eq!(convex_polygon_distance(&a, &a), 0.0);
        assert!(convex_polygons_intersect(
            &a,
            &[[1.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0]],
            false
        ));
        assert!(!convex_polygons_intersect(
            &a,
            &[[1.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0]],
            true
        ));
    }

    #[test]
    fn intervals() {
        assert_eq!(interval_gap((0.0, 1.0), (1.5, 2.0)), 0.5);
        assert_eq!(interval_gap((1.5, 2.0), (0.0, 1.0)), 0.5);
        assert_eq!(interval_gap((0.0, 1.0), (0.5, 2.0)), 0.0);
        assert_eq!(interval_overlap((0.0, 1.0), (0.5, 2.0)), 0.5);
        assert_eq!(interval_overlap((0.0, 1.0), (1.5, 2.0)), 0.0);
    }
}
