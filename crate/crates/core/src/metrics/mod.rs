//! Parsing accuracy metrics.
//!
//! * GA: share of messages whose predicted group has exactly the same
//!   members as their ground-truth template.
//! * PA: share of messages whose predicted template string equals the truth.
//! * FGA: F1 over groups; a predicted group is correct when its members equal
//!   those of some ground-truth template.
//! * FTA: F1 over templates; a predicted template is correct when its group
//!   is correct *and* its string equals that ground-truth template.
//!
//! Template strings are compared after collapsing whitespace runs.

mod subgroups;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

pub use subgroups::{
    complexity_band, complexity_subgroups, frequency_subgroups, ComplexityBand, FrequencyBands,
    SubgroupKind, SubgroupSpec,
};

use crate::corpus::GroundTruthEntry;
use crate::parsers::ParseOutcome;
use crate::{Error, Result};

/// Collapses whitespace runs to single spaces and trims.
pub fn normalize_template(template: &str) -> String {
    template.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Precision, recall and their harmonic mean.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct F1 {
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
}

impl F1 {
    fn from_counts(correct: usize, predicted: usize, truth: usize) -> Self {
        let precision = ratio(correct, predicted);
        let recall = ratio(correct, truth);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        F1 {
            f1,
            precision,
            recall,
        }
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Predicted and ground-truth groupings over the same line ids.
struct Aligned<'a> {
    /// Predicted template per line.
    pred: HashMap<u64, &'a str>,
    /// Truth template (normalised) per line.
    truth: HashMap<u64, String>,
    pred_groups: BTreeMap<&'a str, Vec<u64>>,
    truth_sizes: HashMap<String, usize>,
}

impl<'a> Aligned<'a> {
    fn new(pred: &'a ParseOutcome, truth: &[GroundTruthEntry]) -> Result<Self> {
        let truth_map: HashMap<u64, String> = truth
            .iter()
            .map(|e| (e.line_id, normalize_template(&e.template)))
            .collect();
        if truth_map.len() != truth.len() {
            return Err(Error::Mismatch("duplicate line ids in ground truth".into()));
        }
        let pred_map: HashMap<u64, &str> =
            pred.lines.iter().map(|(id, t)| (*id, t.as_str())).collect();
        if pred_map.len() != pred.lines.len() {
            return Err(Error::Mismatch("duplicate line ids in prediction".into()));
        }
        if pred_map.len() != truth_map.len()
            || pred_map.keys().any(|id| !truth_map.contains_key(id))
        {
            let missing = truth_map
                .keys()
                .filter(|id| !pred_map.contains_key(id))
                .count();
            let extra = pred_map
                .keys()
                .filter(|id| !truth_map.contains_key(id))
                .count();
            return Err(Error::Mismatch(format!(
                "line ids differ: {missing} only in ground truth, {extra} only in prediction"
            )));
        }
        let mut pred_groups: BTreeMap<&str, Vec<u64>> = BTreeMap::new();
        for (id, t) in &pred.lines {
            pred_groups.entry(t.as_str()).or_default().push(*id);
        }
        let mut truth_sizes: HashMap<String, usize> = HashMap::new();
        for t in truth_map.values() {
            *truth_sizes.entry(t.clone()).or_default() += 1;
        }
        Ok(Aligned {
            pred: pred_map,
            truth: truth_map,
            pred_groups,
            truth_sizes,
        })
    }

    /// The truth template a predicted group corresponds to exactly, if any.
    fn exact_truth(&self, members: &[u64]) -> Option<&str> {
        let first = self.truth.get(members.first()?)?;
        if members.iter().all(|id| self.truth.get(id) == Some(first))
            && self.truth_sizes.get(first) == Some(&members.len())
        {
            Some(first)
        } else {
            None
        }
    }

    fn ga(&self) -> f64 {
        let correct: usize = self
            .pred_groups
            .values()
            .filter(|members| self.exact_truth(members).is_some())
            .map(Vec::len)
            .sum();
        ratio(correct, self.truth.len())
    }

    fn pa(&self) -> f64 {
        let correct = self
            .pred
            .iter()
            .filter(|(id, t)| normalize_template(t) == self.truth[*id])
            .count();
        ratio(correct, self.truth.len())
    }

    fn fga(&self) -> F1 {
        let correct = self
            .pred_groups
            .values()
            .filter(|members| self.exact_truth(members).is_some())
            .count();
        F1::from_counts(correct, self.pred_groups.len(), self.truth_sizes.len())
    }

    fn fta(&self) -> F1 {
        let correct = self
            .pred_groups
            .iter()
            .filter(|(template, members)| {
                self.exact_truth(members) == Some(normalize_template(template).as_str())
            })
            .count();
        F1::from_counts(correct, self.pred_groups.len(), self.truth_sizes.len())
    }
}

pub fn grouping_accuracy(pred: &ParseOutcome, truth: &[GroundTruthEntry]) -> Result<f64> {
    Ok(Aligned::new(pred, truth)?.ga())
}

pub fn parsing_accuracy(pred: &ParseOutcome, truth: &[GroundTruthEntry]) -> Result<f64> {
    Ok(Aligned::new(pred, truth)?.pa())
}

pub fn f1_group_accuracy(pred: &ParseOutcome, truth: &[GroundTruthEntry]) -> Result<F1> {
    Ok(Aligned::new(pred, truth)?.fga())
}

pub fn f1_template_accuracy(pred: &ParseOutcome, truth: &[GroundTruthEntry]) -> Result<F1> {
    Ok(Aligned::new(pred, truth)?.fta())
}

/// The four headline metrics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub ga: f64,
    pub pa: f64,
    pub fga: f64,
    pub fta: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub messages: usize,
    pub truth_templates: usize,
    pub predicted_templates: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SubgroupScores {
    #[serde(flatten)]
    pub scores: Scores,
    pub counts: Counts,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub ga: f64,
    pub pa: f64,
    pub fga: f64,
    pub fga_precision: f64,
    pub fga_recall: f64,
    pub fta: f64,
    pub fta_precision: f64,
    pub fta_recall: f64,
    pub counts: Counts,
    #[serde(default)]
    pub subgroup_breakdowns: BTreeMap<String, SubgroupScores>,
}

impl EvaluationReport {
    pub fn scores(&self) -> Scores {
        Scores {
            ga: self.ga,
            pa: self.pa,
            fga: self.fga,
            fta: self.fta,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }
}

/// Scores a prediction against the ground truth.
pub fn evaluate(pred: &ParseOutcome, truth: &[GroundTruthEntry]) -> Result<EvaluationReport> {
    let aligned = Aligned::new(pred, truth)?;
    let fga = aligned.fga();
    let fta = aligned.fta();
    Ok(EvaluationReport {
        ga: aligned.ga(),
        pa: aligned.pa(),
        fga: fga.f1,
        fga_precision: fga.precision,
        fga_recall: fga.recall,
        fta: fta.f1,
        fta_precision: fta.precision,
        fta_recall: fta.recall,
        counts: Counts {
            messages: truth.len(),
            truth_templates: aligned.truth_sizes.len(),
            predicted_templates: aligned.pred_groups.len(),
        },
        subgroup_breakdowns: BTreeMap::new(),
    })
}

/// Scores restricted to the messages whose line id is in `lines`; the
/// prediction is restricted to the same ids.
pub fn evaluate_subset(
    pred: &ParseOutcome,
    truth: &[GroundTruthEntry],
    lines: &HashSet<u64>,
) -> Result<SubgroupScores> {
    let sub_truth: Vec<GroundTruthEntry> = truth
        .iter()
        .filter(|e| lines.contains(&e.line_id))
        .cloned()
        .collect();
    let sub_pred = ParseOutcome::from_templates(
        pred.lines
            .iter()
            .filter(|(id, _)| lines.contains(id))
            .cloned()
            .collect(),
    );
    let report = evaluate(&sub_pred, &sub_truth)?;
    Ok(SubgroupScores {
        scores: report.scores(),
        counts: report.counts,
    })
}

/// Full evaluation plus subgroup breakdowns for the requested partitions.
pub fn evaluate_with_subgroups(
    pred: &ParseOutcome,
    truth: &[GroundTruthEntry],
    spec: &SubgroupSpec,
) -> Result<EvaluationReport> {
    let mut report = evaluate(pred, truth)?;
    for (label, templates) in subgroups::partition(truth, spec)? {
        let templates: HashSet<String> = templates.into_iter().collect();
        let lines: HashSet<u64> = truth
            .iter()
            .filter(|e| templates.contains(&normalize_template(&e.template)))
            .map(|e| e.line_id)
            .collect();
        let scores = if lines.is_empty() {
            SubgroupScores::default()
        } else {
            evaluate_subset(pred, truth, &lines)?
        };
        report.subgroup_breakdowns.insert(label, scores);
    }
    Ok(report)
}

/// Writes `dataset,configuration,GA,FGA,PA,FTA` rows.
pub fn write_summary_csv<W: Write>(
    rows: &[(&str, &str, &EvaluationReport)],
    out: W,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["dataset", "configuration", "GA", "FGA", "PA", "FTA"])?;
    for (dataset, configuration, r) in rows {
        w.write_record([
            dataset.to_string(),
            configuration.to_string(),
            format!("{:.6}", r.ga),
            format!("{:.6}", r.fga),
            format!("{:.6}", r.pa),
            format!("{:.6}", r.fta),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn truth(rows: &[(u64, &str)]) -> Vec<GroundTruthEntry> {
        rows.iter()
            .map(|(id, t)| GroundTruthEntry {
                line_id: *id,
                content: String::new(),
                template: t.to_string(),
                variables: vec![],
                extraction_failed: false,
            })
            .collect()
    }

    fn pred(rows: &[(u64, &str)]) -> ParseOutcome {
        ParseOutcome::from_templates(rows.iter().map(|(id, t)| (*id, t.to_string())).collect())
    }

    #[test]
    fn perfect_prediction_scores_one() {
        let rows = [(1, "a <*>"), (2, "a <*>"), (3, "b")];
        let r = evaluate(&pred(&rows), &truth(&rows)).unwrap();
        assert_eq!((r.ga, r.pa, r.fga, r.fta), (1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn over_merged_group_has_zero_ga() {
        let t = truth(&[(1, "A"), (2, "A"), (3, "B"), (4, "B")]);
        let p = pred(&[(1, "X"), (2, "X"), (3, "X"), (4, "X")]);
        assert_eq!(grouping_accuracy(&p, &t).unwrap(), 0.0);
    }

    #[test]
    fn pa_counts_messages() {
        let t = truth(&[(1, "a <*>"), (2, "b <*>")]);
        let p = pred(&[(1, "a <*>"), (2, "b c")]);
        assert_eq!(parsing_accuracy(&p, &t).unwrap(), 0.5);
    }

    #[test]
    fn split_group_fga() {
        // truth {A:1,2  B:3}; prediction splits A into two groups.
        let t = truth(&[(1, "A"), (2, "A"), (3, "B")]);
        let p = pred(&[(1, "X"), (2, "Y"), (3, "B")]);
        let f = f1_group_accuracy(&p, &t).unwrap();
        assert!((f.precision - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(f.recall, 0.5);
        assert!((f.f1 - 0.4).abs() < 1e-12);
    }

    #[test]
    fn fta_needs_string_and_group() {
        let t = truth(&[(1, "open <*> as <*>"), (2, "open <*> as <*>"), (3, "close")]);
        let p = pred(&[
            (1, "open <*> as root"),
            (2, "open <*> as root"),
            (3, "close"),
        ]);
        let r = evaluate(&p, &t).unwrap();
        assert_eq!(r.fga, 1.0);
        assert_eq!(r.fta_precision, 0.5);
        assert_eq!(r.fta_recall, 0.5);
        assert_eq!(r.ga, 1.0);
        assert!((r.pa - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn whitespace_is_normalised() {
        let t = truth(&[(1, "a  <*>\tb ")]);
        let p = pred(&[(1, "a <*> b")]);
        assert_eq!(parsing_accuracy(&p, &t).unwrap(), 1.0);
        assert_eq!(f1_template_accuracy(&p, &t).unwrap().f1, 1.0);
    }

    #[test]
    fn mismatched_ids_are_rejected() {
        let t = truth(&[(1, "a"), (2, "a")]);
        let p = pred(&[(1, "a"), (3, "a")]);
        assert!(matches!(evaluate(&p, &t), Err(Error::Mismatch(_))));
        let p = pred(&[(1, "a")]);
        assert!(matches!(evaluate(&p, &t), Err(Error::Mismatch(_))));
    }

    #[test]
    fn renaming_keys_leaves_grouping_metrics() {
        let t = truth(&[(1, "A"), (2, "A"), (3, "B")]);
        let p1 = pred(&[(1, "A"), (2, "A"), (3, "B")]);
        let p2 = pred(&[(1, "Q"), (2, "Q"), (3, "R")]);
        let (r1, r2) = (evaluate(&p1, &t).unwrap(), evaluate(&p2, &t).unwrap());
        assert_eq!(r1.ga, r2.ga);
        assert_eq!(r1.fga, r2.fga);
        assert_eq!(r2.pa, 0.0);
        assert_eq!(r2.fta, 0.0);
    }

    #[test]
    fn report_json_round_trip() {
        let rows = [(1, "a <*>"), (2, "a <*>"), (3, "b")];
        let spec = SubgroupSpec::default();
        let r = evaluate_with_subgroups(&pred(&rows), &truth(&rows), &spec).unwrap();
        let back = EvaluationReport::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
        let mut buf = Vec::new();
        write_summary_csv(&[("Apache", "default", &r)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "dataset,configuration,GA,FGA,PA,FTA\nApache,default,1.000000,1.000000,1.000000,1.000000\n"
        );
    }
}
