//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p refground-harness --test acceptance`.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use common::*;
use rand::Rng;
use refground_core::brute;
use refground_core::graph::{build_graph, SceneGraph};
use refground_core::grounding::{
    partial_matches, score_aspects, search_indices, select_heuristic, AlternativeCandidate,
    AspectWeights,
};
use refground_core::language::{
    generate_statements, mentions_relation, render_query, LanguageConfig, StatementRecord,
    SynonymTable,
};
use refground_core::parser::Parser;
use refground_core::query::{Aspect, Attribute, Slot};
use refground_core::relations::predicates::{
    containment_fraction, footprint_overlap_fraction, surface_gap, vertical_gap,
};
use refground_core::relations::{
    eval_between, eval_binary, generate_relations, Relation, RelationConfig, RelationType,
};
use refground_core::scene::SceneObject;
use refground_harness::bench::cmd_bench;
use refground_harness::config::Config;
use refground_harness::dataset::Dataset;
use refground_harness::generate::{cmd_generate, scene_files};
use refground_harness::ground::Grounder;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($msg)+));
        }
    };
}

fn synthetic() -> Vec<PathBuf> {
    scene_files(&fixture("synthetic")).expect("synthetic fixtures")
}

fn generated(dir: &Path) -> Dataset {
    cmd_generate(&synthetic(), &Config::default(), 0, dir).expect("generate");
    Dataset::load(dir).expect("load")
}

fn predicate_fidelity() -> Check {
    let start = Instant::now();
    let cfg = RelationConfig::default();
    let mut r = rng(5);
    let (mut total, mut agree, mut out_of_band) = (0usize, 0usize, 0usize);
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
            out_of_band += usize::from(!in_band);
        }
    }
    for _ in 0..300 {
        let c = random_box(&mut r, 4.0).center();
        let d = random_box(&mut r, 4.0).center();
        let s: f64 = r.gen_range(-0.2..1.2);
        let p = [
            c[0] + s * (d[0] - c[0]) + r.gen_range(-1.0..1.0),
            c[1] + s * (d[1] - c[1]) + r.gen_range(-1.0..1.0),
            c[2] + s * (d[2] - c[2]),
        ];
        let (a1, a2) = (
            object("a1", "box", c, [0.5; 3], 0.0),
            object("a2", "box", d, [0.5; 3], 0.0),
        );
        let t = object("t", "box", p, [0.3; 3], 0.0);
        total += 1;
        if eval_between(&t, &a1, &a2, &cfg)
            == sampled_between(p, c, d, cfg.between_corridor_halfwidth, 2000)
        {
            agree += 1;
        }
    }
    let elapsed = start.elapsed();
    let rate = agree as f64 / total as f64;
    ensure!(rate >= 0.99, "agreement {agree}/{total}");
    ensure!(
        out_of_band == 0,
        "{out_of_band} disagreements outside the tolerance bands"
    );
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    Ok(format!(
        "{agree}/{total} agree over 240 pairs and 300 triples, {elapsed:.2?}"
    ))
}

fn relation_equivalence() -> Check {
    let cfg = RelationConfig::default();
    let mut r = rng(21);
    let mut timing = Duration::ZERO;
    for n in [2, 5, 10, 25, 50, 75, 100] {
        let objects = random_region_objects(&mut r, n, 6.0);
        let refs: Vec<&SceneObject> = objects.iter().collect();
        let region = region("r", 6.0);
        let start = Instant::now();
        let fast: BTreeSet<Relation> = generate_relations(&region, &refs, &cfg)
            .into_iter()
            .collect();
        if n == 100 {
            timing = start.elapsed();
        }
        let naive = naive_relations(&region, &refs, &cfg);
        ensure!(
            fast == naive,
            "{n} objects: {} generated vs {} naive",
            fast.len(),
            naive.len()
        );
    }
    ensure!(
        timing < Duration::from_secs(1),
        "100 objects took {timing:?}"
    );
    Ok(format!(
        "exact on 2..100 objects, 100 objects in {timing:.2?}"
    ))
}

fn check_records(
    g: &SceneGraph,
    records: &[StatementRecord],
    syn: &SynonymTable,
) -> Result<(usize, usize), String> {
    let (mut perfect, mut imperfect) = (0, 0);
    for rec in records {
        ensure!(rec.is_consistent(), "inconsistent record '{}'", rec.text);
        let targets = brute::matching_targets(g, &rec.query);
        match &rec.target_id {
            Some(t) => {
                ensure!(
                    targets == BTreeSet::from([t.clone()]),
                    "'{}' matches {targets:?}",
                    rec.text
                );
                for rel in &rec.query.relations {
                    ensure!(
                        mentions_relation(&rec.text, rel.kind, syn),
                        "'{}' omits {}",
                        rec.text,
                        rel.kind
                    );
                }
                for slot in rec.query.slots() {
                    for i in 0..rec.query.node(slot).attributes.len() {
                        let mut weaker = rec.query.clone();
                        weaker.node_mut(slot).attributes.remove(i);
                        ensure!(
                            brute::matching_targets(g, &weaker).len() >= 2,
                            "'{}' is not minimal",
                            rec.text
                        );
                    }
                }
                perfect += 1;
            }
            None => {
                ensure!(
                    targets.is_empty(),
                    "imperfect '{}' matches {targets:?}",
                    rec.text
                );
                imperfect += 1;
            }
        }
    }
    Ok((perfect, imperfect))
}

fn soundness() -> Check {
    let syn = SynonymTable::default();
    let cfg = LanguageConfig::default();
    let colors = ["red", "blue", "green", "white"];
    let (mut perfect, mut imperfect) = (0, 0);
    for seed in 0..40u64 {
        let mut r = rng(seed);
        let objects: Vec<SceneObject> = random_region_objects(&mut r, 4 + seed as usize % 12, 5.0)
            .into_iter()
            .map(|mut o| {
                o.colors = vec![colors[r.gen_range(0..colors.len())].to_string()];
                o
            })
            .collect();
        let refs: Vec<&SceneObject> = objects.iter().collect();
        let region = region("r", 5.0);
        let g = build_graph(
            &region,
            &refs,
            &[],
            generate_relations(&region, &refs, &RelationConfig::default()),
        )
        .unwrap();
        let (p, _) = check_records(&g, &generate_statements(&g, &cfg, &syn, seed).records, &syn)?;
        perfect += p;
    }
    let dir = tempfile::tempdir().unwrap();
    let dataset = generated(dir.path());
    for (scene, records) in &dataset.statements {
        for rec in records {
            let g = dataset.graph(scene, &rec.region_id).unwrap();
            let (p, i) = check_records(g, std::slice::from_ref(rec), &syn)?;
            perfect += p;
            imperfect += i;
        }
    }
    ensure!(perfect > 0 && imperfect > 0, "nothing generated");
    Ok(format!(
        "{perfect} perfect unique and minimal, {imperfect} imperfect unmatched"
    ))
}

fn parser_round_trip() -> Check {
    let syn = SynonymTable::default();
    let parser = Parser::default();
    let mut r = rng(2024);
    let mut ok = 0;
    for i in 0..1000u64 {
        let q = renderable_query(&mut r).normalized();
        let text = render_query(&q, &syn, Some(i));
        match parser.parse(&text) {
            Ok(out) if out.query == q => ok += 1,
            Ok(_) => return Err(format!("'{text}' parsed to a different query")),
            Err(e) => return Err(format!("'{text}': {e}")),
        }
    }
    Ok(format!("{ok}/1000"))
}

fn search_equivalence() -> Check {
    let mut r = rng(500);
    let mut nonempty = 0;
    for trial in 0..600 {
        let g = random_graph(&mut r, 30);
        let query = if trial % 2 == 0 {
            query_from_edge(&mut r, &g).unwrap_or_else(|| random_query(&mut r))
        } else {
            random_query(&mut r)
        };
        let mut fast = search_indices(&g, &query);
        fast.sort();
        let slow = brute::enumerate_bindings(&g, &query);
        ensure!(fast == slow, "trial {trial} differs");
        nonempty += usize::from(!slow.is_empty());
    }
    Ok(format!("600/600 graphs, {nonempty} with matches"))
}

fn end_to_end() -> Check {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let dataset = generated(dir.path());
    let report = cmd_bench(
        &dataset,
        &Grounder::new(AspectWeights::default()),
        &dir.path().join("report.json"),
    )
    .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let c = &report.counts;
    ensure!(c.positives > 0 && c.negatives > 0, "empty populations");
    ensure!(
        report.tp == 1.0 && report.tn == 1.0 && report.f1 == 1.0 && report.parse_accuracy == 1.0,
        "tp {} tn {} f1 {} parse {}",
        report.tp,
        report.tn,
        report.f1,
        report.parse_accuracy
    );
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!(
        "tp = tn = f1 = parse accuracy = 1.0 over {} statements in {} scenes, {elapsed:.2?}",
        c.statements,
        dataset.manifest.scenes.len()
    ))
}

fn scoring() -> Check {
    let w = AspectWeights::default();
    let cup = Aspect::Class {
        slot: Slot::Target,
        class: "otherprop".into(),
    };
    let on = Aspect::Relation {
        kind: RelationType::On,
        anchors: vec![0],
    };
    let red = Aspect::Attribute {
        slot: Slot::Target,
        attribute: Attribute::Color("red".into()),
    };
    let all = [cup.clone(), on.clone(), red];
    let worked = score_aspects(&all, &[cup, on], &w).unwrap().value;
    ensure!(
        (worked - (3.0 + 2.0) / (3.0 + 2.0 + 1.0)).abs() < 1e-12,
        "worked example {worked}"
    );
    ensure!(
        score_aspects(&all, &all, &w).unwrap().value == 1.0,
        "all-match is not 1.0"
    );

    let dir = tempfile::tempdir().unwrap();
    let dataset = generated(dir.path());
    let syn = SynonymTable::default();
    let parser = Parser::default();
    let mut choices = 0;
    for (scene, records) in &dataset.statements {
        for rec in records.iter().filter(|r| r.is_imperfect) {
            let g = dataset.graph(scene, &rec.region_id).unwrap();
            let query = parser.parse(&rec.text).map_err(|e| e.to_string())?.query;
            let base = partial_matches(g, &query, &w, &syn);
            for k in [1e-3, 0.5, 7.0, 1e6] {
                let scaled = partial_matches(g, &query, &w.scaled(k), &syn);
                ensure!(
                    base.len() == scaled.len(),
                    "candidate count changed under scaling by {k}"
                );
                for (a, b) in base.iter().zip(&scaled) {
                    ensure!(
                        (a.score.value - b.score.value).abs() < 1e-12,
                        "score changed under scaling by {k}"
                    );
                }
                let pick = |c: &[AlternativeCandidate]| {
                    select_heuristic(c).map(|c| (c.target.clone(), c.statement.clone()))
                };
                ensure!(
                    pick(&base) == pick(&scaled),
                    "choice changed under scaling by {k} for '{}'",
                    rec.text
                );
            }
            choices += 1;
        }
    }
    let report = cmd_bench(&dataset, &Grounder::new(w), &dir.path().join("report.json"))
        .map_err(|e| e.to_string())?;
    let avg = report
        .avg_alternative_similarity
        .ok_or("no alternatives evaluated")?;
    ensure!(avg >= 0.61, "average alternative similarity {avg:.4}");
    Ok(format!(
        "worked example {worked:.12}, {choices} heuristic choices scale-invariant, average alternative similarity {avg:.4}"
    ))
}

fn tree(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(
                    p.strip_prefix(dir).unwrap().to_path_buf(),
                    std::fs::read(&p).unwrap(),
                );
            }
        }
    }
    out
}

fn determinism() -> Check {
    let runs: Vec<_> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let dataset = generated(dir.path());
            let out = dir.path().join("report.json");
            cmd_bench(&dataset, &Grounder::new(AspectWeights::default()), &out).unwrap();
            let files = tree(dir.path());
            (dir, files)
        })
        .collect();
    let (a, b) = (&runs[0].1, &runs[1].1);
    ensure!(a.keys().eq(b.keys()), "file sets differ");
    for (path, bytes) in a {
        ensure!(&b[path] == bytes, "{} differs", path.display());
    }
    let bytes: usize = a.values().map(Vec::len).sum();
    Ok(format!(
        "{} files, {bytes} bytes identical, reports included",
        a.len()
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("predicate fidelity", predicate_fidelity),
        ("relation generation equivalence", relation_equivalence),
        ("statement soundness and minimality", soundness),
        ("parser round trip", parser_round_trip),
        ("subgraph search equivalence", search_equivalence),
        ("end-to-end benchmark", end_to_end),
        ("similarity scoring", scoring),
        ("generation determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
