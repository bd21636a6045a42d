use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{mask_with_spans, RuleCatalog};
use crate::corpus::GroundTruthEntry;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleCounts {
    pub true_positives: u64,
    pub false_positives: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DatasetMatch {
    pub precision: f64,
    pub recall: f64,
    pub total_variables: u64,
    pub matched_variables: u64,
    pub true_positives: u64,
    pub false_positives: u64,
    /// Entries left out because their template did not align.
    pub skipped_entries: u64,
}

/// How well a catalog's matches line up with ground-truth variables.
///
/// A match is a true positive when its span equals a variable span exactly;
/// a variable counts as matched when some match span equals its span.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub per_rule: IndexMap<String, RuleCounts>,
    pub dataset: DatasetMatch,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Default)]
struct Tally {
    per_rule: Vec<RuleCounts>,
    total: u64,
    matched: u64,
    skipped: u64,
}

impl Tally {
    fn new(rules: usize) -> Self {
        Tally {
            per_rule: vec![RuleCounts::default(); rules],
            ..Tally::default()
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (a, b) in self.per_rule.iter_mut().zip(other.per_rule) {
            a.true_positives += b.true_positives;
            a.false_positives += b.false_positives;
        }
        self.total += other.total;
        self.matched += other.matched;
        self.skipped += other.skipped;
        self
    }
}

pub fn match_statistics(entries: &[GroundTruthEntry], catalog: &RuleCatalog) -> MatchReport {
    let rules = catalog.len();
    let tally = entries
        .par_iter()
        .fold(
            || Tally::new(rules),
            |mut tally, entry| {
                if entry.extraction_failed {
                    tally.skipped += 1;
                    return tally;
                }
                let truth: HashSet<(usize, usize)> =
                    entry.variables.iter().map(|v| (v.start, v.end)).collect();
                let masked = mask_with_spans(&entry.content, catalog);
                let mut hit = HashSet::new();
                for span in &masked.spans {
                    let key = (span.start, span.end);
                    let counts = &mut tally.per_rule[span.rule];
                    if truth.contains(&key) {
                        counts.true_positives += 1;
                        hit.insert(key);
                    } else {
                        counts.false_positives += 1;
                    }
                }
                tally.total += entry.variables.len() as u64;
                tally.matched += entry
                    .variables
                    .iter()
                    .filter(|v| hit.contains(&(v.start, v.end)))
                    .count() as u64;
                tally
            },
        )
        .reduce(|| Tally::new(rules), Tally::merge);

    let tp: u64 = tally.per_rule.iter().map(|c| c.true_positives).sum();
    let fp: u64 = tally.per_rule.iter().map(|c| c.false_positives).sum();
    MatchReport {
        per_rule: catalog
            .rules()
            .iter()
            .zip(tally.per_rule)
            .map(|(rule, counts)| (rule.name.clone(), counts))
            .collect(),
        dataset: DatasetMatch {
            precision: ratio(tp, tp + fp),
            recall: ratio(tally.matched, tally.total),
            total_variables: tally.total,
            matched_variables: tally.matched,
            true_positives: tp,
            false_positives: fp,
            skipped_entries: tally.skipped,
        },
    }
}

impl MatchReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    /// One row per rule, then a `__dataset__` summary row:
    /// `rule,true_positives,false_positives,precision,recall,total_variables,matched_variables`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "rule",
            "true_positives",
            "false_positives",
            "precision",
            "recall",
            "total_variables",
            "matched_variables",
        ])?;
        for (name, c) in &self.per_rule {
            w.write_record([
                name.clone(),
                c.true_positives.to_string(),
                c.false_positives.to_string(),
                format!(
                    "{:.6}",
                    ratio(c.true_positives, c.true_positives + c.false_positives)
                ),
                String::new(),
                String::new(),
                String::new(),
            ])?;
        }
        let d = &self.dataset;
        w.write_record([
            DATASET_ROW.to_string(),
            d.true_positives.to_string(),
            d.false_positives.to_string(),
            format!("{:.6}", d.precision),
            format!("{:.6}", d.recall),
            d.total_variables.to_string(),
            d.matched_variables.to_string(),
        ])?;
        w.flush()?;
        Ok(())
    }

    /// Reads the CSV written by [`MatchReport::write_csv`]. Ratios are
    /// recomputed from the counts.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path).map_err(|e| Error::csv(path, &e))?;
        let mut report = MatchReport::default();
        for row in reader.records() {
            let row = row.map_err(|e| Error::csv(path, &e))?;
            let num = |i: usize| -> Result<u64> {
                row.get(i).unwrap_or("").parse().map_err(|_| Error::Csv {
                    path: path.to_path_buf(),
                    row: row.position().map(|p| p.line()).unwrap_or(0),
                    message: format!("column {i} is not a count"),
                })
            };
            let name = row.get(0).unwrap_or("").to_string();
            if name == DATASET_ROW {
                let (tp, fp, total, matched) = (num(1)?, num(2)?, num(5)?, num(6)?);
                report.dataset = DatasetMatch {
                    precision: ratio(tp, tp + fp),
                    recall: ratio(matched, total),
                    total_variables: total,
                    matched_variables: matched,
                    true_positives: tp,
                    false_positives: fp,
                    skipped_entries: 0,
                };
            } else {
                report.per_rule.insert(
                    name,
                    RuleCounts {
                        true_positives: num(1)?,
                        false_positives: num(2)?,
                    },
                );
            }
        }
        Ok(report)
    }
}

const DATASET_ROW: &str = "__dataset__";
