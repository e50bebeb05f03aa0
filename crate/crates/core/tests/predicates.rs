mod common;

use common::*;
use proptest::prelude::*;
use refground_core::relations::predicates::{
    containment_fraction, footprint_overlap_fraction, surface_gap, vertical_gap,
};
use refground_core::relations::{eval_between, eval_binary, RelationConfig, RelationType};

#[test]
fn near_gap_matches_sampled_surfaces() {
    let cfg = RelationConfig::default();
    let a = object("a", "box", [0.0, 0.0, 0.5], [1.0; 3], 0.0);
    let b = object("b", "box", [1.3, 0.0, 0.5], [1.0; 3], 0.0);
    let sampled = sampled_gap(&a.bbox, &b.bbox);
    assert!((sampled - 0.3).abs() < 1e-9, "sampled gap {sampled}");
    assert!(eval_binary(RelationType::Near, &a, &b, &cfg).unwrap());
    assert!(eval_binary(RelationType::Near, &b, &a, &cfg).unwrap());
}

#[test]
fn analytic_measures_track_sampling() {
    let mut r = rng(11);
    for _ in 0..150 {
        let a = random_box(&mut r, 3.0);
        let t = related_box(&mut r, &a);
        let gap = surface_gap(&t, &a);
        let sgap = sampled_gap(&t, &a);
        // Surface samples over-estimate the gap by at most the grid spacing.
        assert!(
            sgap >= gap - 1e-9 && sgap <= gap + 0.06,
            "gap {gap} vs sampled {sgap}"
        );
        let ov = footprint_overlap_fraction(&t, &a);
        assert!(
            (ov - sampled_overlap(&t, &a, 80)).abs() < 0.03,
            "overlap {ov}"
        );
        let inc = containment_fraction(&t, &a);
        assert!(
            (inc - sampled_containment(&t, &a, 24)).abs() < 0.06,
            "containment {inc}"
        );
    }
}

#[test]
fn binary_predicates_agree_with_sampling_oracle() {
    let cfg = RelationConfig::default();
    let mut r = rng(5);
    let (mut total, mut agree) = (0, 0);
    for i in 0..240 {
        let a = random_box(&mut r, 3.0);
        let t = related_box(&mut r, &a);
        let ta = object(&format!("t{i}"), "box", t.center(), t.size(), t.yaw());
        let aa = object(&format!("a{i}"), "box", a.center(), a.size(), a.yaw());
        let ov = sampled_overlap(&t, &a, 60);
        let gap = vertical_gap(&t, &a);
        let oracle = [
            (RelationType::Near, sampled_gap(&t, &a) <= cfg.near_gap_max),
            (
                RelationType::Above,
                gap >= -cfg.on_zgap_max && ov >= cfg.footprint_overlap_min,
            ),
            (
                RelationType::On,
                gap.abs() <= cfg.on_zgap_max && ov >= cfg.footprint_overlap_min,
            ),
            (
                RelationType::In,
                sampled_containment(&t, &a, 20) >= cfg.in_containment_min,
            ),
        ];
        for (kind, expected) in oracle {
            total += 1;
            if eval_binary(kind, &ta, &aa, &cfg).unwrap() == expected {
                agree += 1;
                continue;
            }
            let in_band = match kind {
                RelationType::Near => (surface_gap(&t, &a) - cfg.near_gap_max).abs() < 0.06,
                RelationType::In => {
                    (containment_fraction(&t, &a) - cfg.in_containment_min).abs() < 0.06
                }
                _ => (footprint_overlap_fraction(&t, &a) - cfg.footprint_overlap_min).abs() < 0.03,
            };
            assert!(
                in_band,
                "{kind} disagreement outside tolerance band for pair {i}"
            );
        }
    }
    assert!(agree as f64 / total as f64 >= 0.99, "{agree}/{total}");
}

#[test]
fn between_agrees_with_sampled_segment() {
    let cfg = RelationConfig::default();
    let mut r = rng(9);
    let (mut agree, total) = (0, 300);
    for i in 0..total {
        let a1 = object("a1", "box", random_box(&mut r, 4.0).center(), [0.5; 3], 0.0);
        let a2 = object("a2", "box", random_box(&mut r, 4.0).center(), [0.5; 3], 0.0);
        let c = a1.bbox.center();
        let d = a2.bbox.center();
        let s: f64 = rand::Rng::gen_range(&mut r, -0.2..1.2);
        let off = [
            rand::Rng::gen_range(&mut r, -1.0..1.0),
            rand::Rng::gen_range(&mut r, -1.0..1.0),
            0.0,
        ];
        let p = [
            c[0] + s * (d[0] - c[0]) + off[0],
            c[1] + s * (d[1] - c[1]) + off[1],
            c[2] + s * (d[2] - c[2]),
        ];
        let t = object("t", "box", p, [0.3; 3], 0.0);
        let expected = sampled_between(p, c, d, cfg.between_corridor_halfwidth, 2000);
        if eval_between(&t, &a1, &a2, &cfg) == expected {
            agree += 1;
        } else {
            eprintln!("between disagreement at triple {i}");
        }
    }
    assert!(agree as f64 / total as f64 >= 0.99, "{agree}/{total}");
}

fn arb_box() -> impl Strategy<Value = ([f64; 3], [f64; 3], f64)> {
    (
        prop::array::uniform3(-2.0f64..2.0),
        prop::array::uniform3(0.05f64..1.5),
        -std::f64::consts::PI..std::f64::consts::PI,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn predicate_invariants(a in arb_box(), b in arb_box(), c in arb_box()) {
        let cfg = RelationConfig::default();
        let x = object("x", "box", a.0, a.1, a.2);
        let y = object("y", "box", b.0, b.1, b.2);
        let z = object("z", "box", c.0, c.1, c.2);
        let on = eval_binary(RelationType::On, &x, &y, &cfg).unwrap();
        let above = eval_binary(RelationType::Above, &x, &y, &cfg).unwrap();
        prop_assert!(!on || above);
        if on {
            prop_assert!(vertical_gap(&x.bbox, &y.bbox).abs() <= cfg.on_zgap_max);
            prop_assert!(footprint_overlap_fraction(&x.bbox, &y.bbox) >= cfg.footprint_overlap_min);
        }
        prop_assert_eq!(above, eval_binary(RelationType::Below, &y, &x, &cfg).unwrap());
        prop_assert_eq!(
            eval_binary(RelationType::Near, &x, &y, &cfg).unwrap(),
            eval_binary(RelationType::Near, &y, &x, &cfg).unwrap()
        );
        prop_assert_eq!(eval_between(&x, &y, &z, &cfg), eval_between(&x, &z, &y, &cfg));
    }
}
