use std::collections::BTreeMap;

use super::predicates::{
    containment_fraction, footprint_overlap_fraction, in_corridor, surface_gap, vertical_gap,
};
use super::{Relation, RelationConfig, RelationType};
use crate::geometry::{bounds2, distance3, point_polygon_distance, Point2};
use crate::scene::{FreeSpace, Region, SceneObject};

struct Prepared<'a> {
    object: &'a SceneObject,
    lo: Point2,
    hi: Point2,
    radius: f64,
}

impl<'a> Prepared<'a> {
    fn new(object: &'a SceneObject) -> Self {
        let (lo, hi) = bounds2(&object.bbox.footprint());
        let s = object.bbox.size();
        Prepared {
            object,
            lo,
            hi,
            radius: 0.5 * (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt(),
        }
    }

    fn footprints_may_touch(&self, other: &Prepared) -> bool {
        self.lo[0] <= other.hi[0]
            && other.lo[0] <= self.hi[0]
            && self.lo[1] <= other.hi[1]
            && other.lo[1] <= self.hi[1]
    }
}

/// All relations among the region's objects: pairwise `Above`/`On`/`In`,
/// `Near` per unordered pair, `Between` per target and unordered anchor
/// pair, and the superlatives. Returned in canonical order.
pub fn generate_relations(
    region: &Region,
    objects: &[&SceneObject],
    config: &RelationConfig,
) -> Vec<Relation> {
    let mut prepared: Vec<Prepared> = objects.iter().map(|o| Prepared::new(o)).collect();
    prepared.sort_by(|a, b| a.object.id.cmp(&b.object.id));
    let rid = region.id.as_str();
    let mut out = Vec::new();

    for (i, t) in prepared.iter().enumerate() {
        let target_ok = !config.is_filtered(&t.object.class_nyu40);
        for (j, a) in prepared.iter().enumerate() {
            if i == j {
                continue;
            }
            let (tb, ab) = (&t.object.bbox, &a.object.bbox);
            if target_ok && t.footprints_may_touch(a) {
                let overlap = footprint_overlap_fraction(tb, ab);
                let gap = vertical_gap(tb, ab);
                if overlap >= config.footprint_overlap_min {
                    if gap >= -config.on_zgap_max {
                        out.push(Relation::new(
                            RelationType::Above,
                            &t.object.id,
                            &[&a.object.id],
                            rid,
                        ));
                    }
                    if gap.abs() <= config.on_zgap_max {
                        out.push(Relation::new(
                            RelationType::On,
                            &t.object.id,
                            &[&a.object.id],
                            rid,
                        ));
                    }
                }
                if containment_fraction(tb, ab) >= config.in_containment_min {
                    out.push(Relation::new(
                        RelationType::In,
                        &t.object.id,
                        &[&a.object.id],
                        rid,
                    ));
                }
            }
            if i < j && (target_ok || !config.is_filtered(&a.object.class_nyu40)) {
                let centers = distance3(tb.center(), ab.center());
                if centers <= t.radius + a.radius + config.near_gap_max
                    && surface_gap(tb, ab) <= config.near_gap_max
                {
                    out.push(Relation::near(&t.object.id, &a.object.id, rid));
                }
            }
        }
        if target_ok {
            let center = t.object.bbox.center();
            for (j, a1) in prepared.iter().enumerate() {
                if j == i {
                    continue;
                }
                for (k, a2) in prepared.iter().enumerate().skip(j + 1) {
                    if k == i {
                        continue;
                    }
                    if in_corridor(
                        center,
                        a1.object.bbox.center(),
                        a2.object.bbox.center(),
                        config.between_corridor_halfwidth,
                    ) {
                        out.push(Relation::new(
                            RelationType::Between,
                            &t.object.id,
                            &[&a1.object.id, &a2.object.id],
                            rid,
                        ));
                    }
                }
            }
        }
    }

    out.extend(compute_superlatives(region, objects, config));
    out.sort();
    out.dedup();
    out
}

/// For every anchor and every other (unfiltered) class present, the
/// closest and farthest object of that class by centroid distance. Ties
/// go to the smaller id.
pub fn compute_superlatives(
    region: &Region,
    objects: &[&SceneObject],
    config: &RelationConfig,
) -> Vec<Relation> {
    let mut by_class: BTreeMap<&str, Vec<&SceneObject>> = BTreeMap::new();
    for o in objects {
        by_class.entry(o.class_nyu40.as_str()).or_default().push(o);
    }
    for members in by_class.values_mut() {
        members.sort_by(|a, b| a.id.cmp(&b.id));
    }
    let mut out = Vec::new();
    for anchor in objects {
        let origin = anchor.bbox.center();
        for (class, members) in &by_class {
            if *class == anchor.class_nyu40 || config.is_filtered(class) {
                continue;
            }
            let dist = |o: &SceneObject| distance3(o.bbox.center(), origin);
            // Members are id-sorted, so strict comparisons keep the smaller id on ties.
            let mut closest = members[0];
            let mut farthest = members[0];
            for m in &members[1..] {
                if dist(m) < dist(closest) {
                    closest = m;
                }
                if dist(m) > dist(farthest) {
                    farthest = m;
                }
            }
            out.push(Relation::new(
                RelationType::Closest,
                &closest.id,
                &[&anchor.id],
                &region.id,
            ));
            out.push(Relation::new(
                RelationType::Farthest,
                &farthest.id,
                &[&anchor.id],
                &region.id,
            ));
        }
    }
    out.sort();
    out
}

/// `Near` edges between free spaces and the objects bordering them: the
/// closest free cell center lies within `near_gap_max` of the object's
/// footprint.
pub fn freespace_relations(
    spaces: &[&FreeSpace],
    objects: &[&SceneObject],
    config: &RelationConfig,
) -> Vec<Relation> {
    let mut out = Vec::new();
    for space in spaces {
        let (slo, shi) = bounds2(&space.bbox.footprint());
        for object in objects {
            if config.is_filtered(&object.class_nyu40) {
                continue;
            }
            let footprint = object.bbox.footprint();
            let (olo, ohi) = bounds2(&footprint);
            let reach = config.near_gap_max + space.cell_size;
            if olo[0] > shi[0] + reach
                || slo[0] > ohi[0] + reach
                || olo[1] > shi[1] + reach
                || slo[1] > ohi[1] + reach
            {
                continue;
            }
            let gap = space
                .cell_centers()
                .map(|c| point_polygon_distance(c, &footprint))
                .fold(f64::INFINITY, f64::min);
            if gap <= config.near_gap_max {
                out.push(Relation::near(&space.id, &object.id, &space.region_id));
            }
        }
    }
    out.sort();
    out
}
