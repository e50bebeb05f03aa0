//! Benchmark over a generated dataset: existence classification, parse
//! accuracy and alternative similarity.

use std::path::Path;

use anyhow::Result;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::dataset::{write_json, write_text, Dataset};
use crate::ground::Grounder;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Tp,
    Fn,
    Tn,
    Fp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlternativeLog {
    pub statement: String,
    pub object_id: String,
    pub score: f64,
}

/// One line of the per-statement log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatementLog {
    pub scene_id: String,
    pub region_id: String,
    pub text: String,
    pub is_imperfect: bool,
    pub parsed: bool,
    pub parse_correct: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parse_error: Option<String>,
    pub predicted_exists: bool,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_object_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicted_object_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alternative: Option<AlternativeLog>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub statements: usize,
    pub positives: usize,
    pub negatives: usize,
    pub tp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
    pub fp: usize,
    pub parsed: usize,
    pub parse_correct: usize,
    /// True positives grounded to the statement's own target.
    pub target_correct: usize,
    /// True negatives for which an alternative was sought.
    pub alternatives_evaluated: usize,
    pub alternatives_found: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub counts: Counts,
    /// Fractions of the positive population.
    pub tp: f64,
    #[serde(rename = "fn")]
    pub fn_: f64,
    /// Fractions of the negative population.
    pub tn: f64,
    pub fp: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub parse_accuracy: f64,
    pub target_accuracy: f64,
    /// Mean selected-alternative score over imperfect statements classified
    /// as absent; statements without any alternative count as 0. `None`
    /// when there are no such statements.
    pub avg_alternative_similarity: Option<f64>,
    pub parser: String,
    pub selector: String,
    pub seed: u64,
    pub config_hash: String,
    pub config: Config,
}

fn ratio(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        n as f64 / d as f64
    }
}

/// Grounds every statement of the dataset. Results are in dataset order
/// regardless of scheduling.
pub fn evaluate(dataset: &Dataset, grounder: &Grounder) -> Vec<StatementLog> {
    let jobs: Vec<(&str, &refground_core::language::StatementRecord)> = dataset
        .statements
        .iter()
        .flat_map(|(scene, records)| records.iter().map(move |r| (scene.as_str(), r)))
        .collect();
    jobs.par_iter()
        .map(|(scene_id, record)| {
            let graph = dataset
                .graph(scene_id, &record.region_id)
                .expect("dataset load checks statement regions");
            let (parsed, parse_correct, parse_error, grounding) = match grounder.parse(&record.text)
            {
                Ok(outcome) => {
                    let correct = outcome.query == record.query;
                    (
                        true,
                        correct,
                        None,
                        Some(grounder.ground_query(graph, &record.text, outcome)),
                    )
                }
                Err(e) => (false, false, Some(format!("{:?}: {e}", e.kind)), None),
            };
            let predicted_exists = grounding.as_ref().is_some_and(|g| g.exists);
            let outcome = match (record.is_imperfect, predicted_exists) {
                (false, true) => Outcome::Tp,
                (false, false) => Outcome::Fn,
                (true, false) => Outcome::Tn,
                (true, true) => Outcome::Fp,
            };
            let alternative = grounding
                .as_ref()
                .and_then(|g| g.selected.as_ref())
                .map(|c| AlternativeLog {
                    statement: c.statement.clone(),
                    object_id: c.target.clone(),
                    score: c.score.value,
                });
            StatementLog {
                scene_id: scene_id.to_string(),
                region_id: record.region_id.clone(),
                text: record.text.clone(),
                is_imperfect: record.is_imperfect,
                parsed,
                parse_correct,
                parse_error,
                predicted_exists,
                outcome,
                expected_object_id: record.target_id.clone(),
                predicted_object_id: grounding.and_then(|g| g.object_id),
                alternative,
            }
        })
        .collect()
}

/// Aggregates per-statement logs. Every count is a sum over `logs`.
pub fn summarize(logs: &[StatementLog], grounder: &Grounder, dataset: &Dataset) -> MetricsReport {
    let mut c = Counts {
        statements: logs.len(),
        ..Counts::default()
    };
    let mut similarity_sum = 0.0;
    for log in logs {
        match log.outcome {
            Outcome::Tp => c.tp += 1,
            Outcome::Fn => c.fn_ += 1,
            Outcome::Tn => c.tn += 1,
            Outcome::Fp => c.fp += 1,
        }
        c.parsed += log.parsed as usize;
        c.parse_correct += log.parse_correct as usize;
        if log.outcome == Outcome::Tp && log.predicted_object_id == log.expected_object_id {
            c.target_correct += 1;
        }
        if log.outcome == Outcome::Tn {
            c.alternatives_evaluated += 1;
            if let Some(alt) = &log.alternative {
                c.alternatives_found += 1;
                similarity_sum += alt.score;
            }
        }
    }
    c.positives = c.tp + c.fn_;
    c.negatives = c.tn + c.fp;
    let precision = ratio(c.tp, c.tp + c.fp);
    let recall = ratio(c.tp, c.tp + c.fn_);
    let manifest = &dataset.manifest;
    MetricsReport {
        tp: ratio(c.tp, c.positives),
        fn_: ratio(c.fn_, c.positives),
        tn: ratio(c.tn, c.negatives),
        fp: ratio(c.fp, c.negatives),
        precision,
        recall,
        f1: ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn_),
        parse_accuracy: ratio(c.parse_correct, c.statements),
        target_accuracy: ratio(c.target_correct, c.positives),
        avg_alternative_similarity: (c.alternatives_evaluated > 0)
            .then(|| similarity_sum / c.alternatives_evaluated as f64),
        parser: grounder.parser_mode().to_string(),
        selector: grounder.selector_mode().to_string(),
        seed: manifest.seed,
        config_hash: manifest.config_hash.clone(),
        config: manifest.config.clone(),
        counts: c,
    }
}

pub fn render_table(report: &MetricsReport) -> String {
    let c = &report.counts;
    let pct = |x: f64| format!("{:6.1}%", 100.0 * x);
    let mut out = String::new();
    out.push_str(&format!(
        "parser: {}  selector: {}  seed: {}  config: {}\n\n",
        report.parser,
        report.selector,
        report.seed,
        &report.config_hash[..report.config_hash.len().min(12)]
    ));
    out.push_str("metric                       value    count\n");
    let rows: [(&str, f64, String); 8] = [
        (
            "true positive",
            report.tp,
            format!("{}/{}", c.tp, c.positives),
        ),
        (
            "false negative",
            report.fn_,
            format!("{}/{}", c.fn_, c.positives),
        ),
        (
            "true negative",
            report.tn,
            format!("{}/{}", c.tn, c.negatives),
        ),
        (
            "false positive",
            report.fp,
            format!("{}/{}", c.fp, c.negatives),
        ),
        ("f1", report.f1, String::new()),
        (
            "parse accuracy",
            report.parse_accuracy,
            format!("{}/{}", c.parse_correct, c.statements),
        ),
        (
            "target accuracy",
            report.target_accuracy,
            format!("{}/{}", c.target_correct, c.positives),
        ),
        (
            "avg alternative similarity",
            report.avg_alternative_similarity.unwrap_or(0.0),
            format!("{}/{}", c.alternatives_found, c.alternatives_evaluated),
        ),
    ];
    for (name, value, count) in rows {
        out.push_str(&format!("{name:<26} {} {count:>8}\n", pct(value)));
    }
    out
}

/// Runs the benchmark and writes `out` (JSON report), `out` with a `.txt`
/// extension (table) and `.statements.jsonl` (per-statement log).
pub fn cmd_bench(dataset: &Dataset, grounder: &Grounder, out: &Path) -> Result<MetricsReport> {
    let logs = evaluate(dataset, grounder);
    let report = summarize(&logs, grounder, dataset);
    write_json(out, &report)?;
    write_text(&out.with_extension("txt"), &render_table(&report))?;
    let lines: String = logs
        .iter()
        .map(|l| serde_json::to_string(l).expect("logs serialize") + "\n")
        .collect();
    write_text(&out.with_extension("statements.jsonl"), &lines)?;
    Ok(report)
}
