//! Partitions of the ground-truth templates by frequency and by number of
//! variables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::normalize_template;
use crate::corpus::GroundTruthEntry;
use crate::{Error, Result, PLACEHOLDER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubgroupKind {
    #[default]
    Frequency,
    Complexity,
}

impl FromStr for SubgroupKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "frequency" => Ok(SubgroupKind::Frequency),
            "complexity" => Ok(SubgroupKind::Complexity),
            other => Err(Error::Config(format!("unknown subgroup kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SubgroupSpec {
    pub kind: SubgroupKind,
    pub frequency_fraction: f64,
    /// `[a, b]`: bands are `p < a`, `a <= p < b` and `p >= b`.
    pub complexity_bounds: [usize; 2],
}

impl Default for SubgroupSpec {
    fn default() -> Self {
        SubgroupSpec {
            kind: SubgroupKind::Frequency,
            frequency_fraction: 0.10,
            complexity_bounds: [1, 5],
        }
    }
}

impl SubgroupSpec {
    pub fn complexity() -> Self {
        SubgroupSpec {
            kind: SubgroupKind::Complexity,
            ..SubgroupSpec::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let f = self.frequency_fraction;
        if !(f > 0.0 && f <= 0.5) {
            return Err(Error::Config(format!(
                "frequency fraction {f} is outside (0, 0.5]"
            )));
        }
        let [a, b] = self.complexity_bounds;
        if a == 0 || b <= a {
            return Err(Error::Config(format!(
                "complexity bounds [{a}, {b}] must satisfy 0 < a < b"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrequencyBands {
    pub most_frequent: Vec<String>,
    pub least_frequent: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ComplexityBand {
    NoVariables,
    FewVariables,
    ManyVariables,
}

impl ComplexityBand {
    pub fn label(self) -> &'static str {
        match self {
            ComplexityBand::NoVariables => "no_variables",
            ComplexityBand::FewVariables => "few_variables",
            ComplexityBand::ManyVariables => "many_variables",
        }
    }
}

impl fmt::Display for ComplexityBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

fn template_counts(truth: &[GroundTruthEntry]) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for e in truth {
        *counts.entry(normalize_template(&e.template)).or_insert(0) += 1;
    }
    counts
}

/// The `ceil(fraction * T)` most and least frequent templates. Templates
/// are ranked by count descending, then lexicographically; the bottom band
/// is shrunk when needed so the two never overlap.
pub fn frequency_subgroups(truth: &[GroundTruthEntry], fraction: f64) -> Result<FrequencyBands> {
    SubgroupSpec {
        frequency_fraction: fraction,
        ..SubgroupSpec::default()
    }
    .validate()?;
    let mut ranked: Vec<(String, usize)> = template_counts(truth).into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let total = ranked.len();
    let k = ((fraction * total as f64).ceil() as usize).min(total);
    let bottom = k.min(total - k);
    Ok(FrequencyBands {
        most_frequent: ranked[..k].iter().map(|(t, _)| t.clone()).collect(),
        least_frequent: ranked[total - bottom..]
            .iter()
            .map(|(t, _)| t.clone())
            .collect(),
    })
}

pub fn complexity_band(template: &str, bounds: [usize; 2]) -> ComplexityBand {
    let p = template.matches(PLACEHOLDER).count();
    if p < bounds[0] {
        ComplexityBand::NoVariables
    } else if p < bounds[1] {
        ComplexityBand::FewVariables
    } else {
        ComplexityBand::ManyVariables
    }
}

/// Every truth template in exactly one band (`0`, `1..=4`, `5+` by default).
pub fn complexity_subgroups(truth: &[GroundTruthEntry]) -> BTreeMap<ComplexityBand, Vec<String>> {
    complexity_with(truth, SubgroupSpec::default().complexity_bounds)
}

fn complexity_with(
    truth: &[GroundTruthEntry],
    bounds: [usize; 2],
) -> BTreeMap<ComplexityBand, Vec<String>> {
    let mut bands: BTreeMap<ComplexityBand, Vec<String>> = BTreeMap::new();
    let templates: BTreeSet<String> = truth
        .iter()
        .map(|e| normalize_template(&e.template))
        .collect();
    for t in templates {
        bands
            .entry(complexity_band(&t, bounds))
            .or_default()
            .push(t);
    }
    bands
}

/// Labelled template sets for the requested partition. Empty bands are
/// still listed.
pub(super) fn partition(
    truth: &[GroundTruthEntry],
    spec: &SubgroupSpec,
) -> Result<Vec<(String, Vec<String>)>> {
    spec.validate()?;
    Ok(match spec.kind {
        SubgroupKind::Frequency => {
            let bands = frequency_subgroups(truth, spec.frequency_fraction)?;
            vec![
                ("most_frequent".to_string(), bands.most_frequent),
                ("least_frequent".to_string(), bands.least_frequent),
            ]
        }
        SubgroupKind::Complexity => {
            let mut bands = complexity_with(truth, spec.complexity_bounds);
            [
                ComplexityBand::NoVariables,
                ComplexityBand::FewVariables,
                ComplexityBand::ManyVariables,
            ]
            .into_iter()
            .map(|b| (b.label().to_string(), bands.remove(&b).unwrap_or_default()))
            .collect()
        }
    })
}
