//! Geometric predicates over yawed boxes.
//!
//! Boxes are vertical prisms, so footprint (2D) and height (1D) terms
//! separate: the surface gap is `hypot(footprint distance, z gap)` and the
//! intersection volume is `footprint intersection area × z overlap`.

use super::{RelationConfig, RelationError, RelationType};
use crate::geometry::{
    convex_intersection_area, convex_polygon_distance, interval_gap, interval_overlap, OrientedBox,
    Point3,
};
use crate::scene::SceneObject;

/// Fraction of the target's footprint area lying over the anchor's footprint.
pub fn footprint_overlap_fraction(target: &OrientedBox, anchor: &OrientedBox) -> f64 {
    convex_intersection_area(&target.footprint(), &anchor.footprint()) / target.footprint_area()
}

/// Target bottom minus anchor top. Negative when the boxes interpenetrate
/// vertically or the target is lower.
pub fn vertical_gap(target: &OrientedBox, anchor: &OrientedBox) -> f64 {
    target.z_min() - anchor.z_max()
}

/// Minimum distance between the two boxes' surfaces; zero if they overlap.
pub fn surface_gap(a: &OrientedBox, b: &OrientedBox) -> f64 {
    let planar = convex_polygon_distance(&a.footprint(), &b.footprint());
    let vertical = interval_gap((a.z_min(), a.z_max()), (b.z_min(), b.z_max()));
    planar.hypot(vertical)
}

/// Exact fraction of the target's volume inside the anchor box.
pub fn containment_fraction(target: &OrientedBox, anchor: &OrientedBox) -> f64 {
    let area = convex_intersection_area(&target.footprint(), &anchor.footprint());
    let height = interval_overlap(
        (target.z_min(), target.z_max()),
        (anchor.z_min(), anchor.z_max()),
    );
    area * height / target.volume()
}

/// Footprints overlap enough and the target is not below the anchor's top
/// (down to the contact tolerance, so that `On` implies `Above`).
pub fn is_above(target: &OrientedBox, anchor: &OrientedBox, config: &RelationConfig) -> bool {
    vertical_gap(target, anchor) >= -config.on_zgap_max
        && footprint_overlap_fraction(target, anchor) >= config.footprint_overlap_min
}

pub fn is_on(target: &OrientedBox, anchor: &OrientedBox, config: &RelationConfig) -> bool {
    vertical_gap(target, anchor).abs() <= config.on_zgap_max
        && footprint_overlap_fraction(target, anchor) >= config.footprint_overlap_min
}

pub fn is_in(target: &OrientedBox, anchor: &OrientedBox, config: &RelationConfig) -> bool {
    containment_fraction(target, anchor) >= config.in_containment_min
}

pub fn is_near(a: &OrientedBox, b: &OrientedBox, config: &RelationConfig) -> bool {
    surface_gap(a, b) <= config.near_gap_max
}

/// True when `point` lies in the open corridor around segment `a`-`b`:
/// its projection falls strictly between the endpoints and its distance to
/// the segment is within `half_width`.
pub fn in_corridor(point: Point3, a: Point3, b: Point3, half_width: f64) -> bool {
    let ab = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let ap = [point[0] - a[0], point[1] - a[1], point[2] - a[2]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1] + ab[2] * ab[2];
    if len2 < 1e-12 {
        return false;
    }
    let t = (ap[0] * ab[0] + ap[1] * ab[1] + ap[2] * ab[2]) / len2;
    if t <= 0.0 || t >= 1.0 {
        return false;
    }
    let off = [ap[0] - t * ab[0], ap[1] - t * ab[1], ap[2] - t * ab[2]];
    (off[0] * off[0] + off[1] * off[1] + off[2] * off[2]).sqrt() <= half_width
}

/// Evaluates a pairwise relation between two objects.
pub fn eval_binary(
    kind: RelationType,
    target: &SceneObject,
    anchor: &SceneObject,
    config: &RelationConfig,
) -> Result<bool, RelationError> {
    if target.id == anchor.id {
        return Err(RelationError::SameObject(target.id.clone()));
    }
    let (t, a) = (&target.bbox, &anchor.bbox);
    Ok(match kind {
        RelationType::Above => is_above(t, a, config),
        RelationType::Below => is_above(a, t, config),
        RelationType::Near => is_near(t, a, config),
        RelationType::In => is_in(t, a, config),
        RelationType::On => is_on(t, a, config),
        RelationType::Between | RelationType::Closest | RelationType::Farthest => {
            return Err(RelationError::WrongArity(kind))
        }
    })
}

/// Target center inside the corridor joining the anchor centers. Symmetric
/// in the anchors; false when anchor centers coincide or objects repeat.
pub fn eval_between(
    target: &SceneObject,
    anchor1: &SceneObject,
    anchor2: &SceneObject,
    config: &RelationConfig,
) -> bool {
    if target.id == anchor1.id || target.id == anchor2.id || anchor1.id == anchor2.id {
        return false;
    }
    in_corridor(
        target.bbox.center(),
        anchor1.bbox.center(),
        anchor2.bbox.center(),
        config.between_corridor_halfwidth,
    )
}
