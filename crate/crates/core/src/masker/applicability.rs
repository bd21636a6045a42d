use serde::{Deserialize, Serialize};

use super::{mask_with_spans, RuleCatalog};
use crate::{Error, Result};

/// Number of leading lines used to decide which rules apply to a dataset.
pub const DEFAULT_PREFIX: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub struct Applicability {
    /// The input catalog with every rule that fired nowhere in the prefix
    /// disabled. Order is unchanged.
    pub catalog: RuleCatalog,
    pub scanned_lines: usize,
    /// Set when there were no lines to scan; the catalog is returned as is.
    pub empty_input: bool,
    /// Masks produced by each rule over the prefix, in catalog order.
    pub hits: Vec<RuleHits>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleHits {
    pub rule: String,
    pub hits: usize,
}

/// Disables rules that produce no mask on the first `prefix_size` lines.
///
/// A rule counts as matching when it replaces something while the catalog
/// is applied in order, so a rule whose matches are always taken by an
/// earlier rule is disabled too. Disabling such rules leaves the masked
/// prefix unchanged.
pub fn estimate_applicability<S: AsRef<str>>(
    lines: &[S],
    catalog: &RuleCatalog,
    prefix_size: usize,
) -> Result<Applicability> {
    if prefix_size == 0 {
        return Err(Error::Config(
            "applicability prefix must be at least 1".into(),
        ));
    }
    let mut counts = vec![0usize; catalog.len()];
    let scanned = prefix_size.min(lines.len());
    for line in &lines[..scanned] {
        for span in mask_with_spans(line.as_ref(), catalog).spans {
            counts[span.rule] += 1;
        }
    }

    let mut out = catalog.clone();
    if !lines.is_empty() {
        for (idx, &n) in counts.iter().enumerate() {
            if n == 0 && out.rules()[idx].enabled {
                out.set_enabled_at(idx, false);
            }
        }
    } else {
        log::warn!("applicability estimation got no lines; catalog left unchanged");
    }
    let hits = catalog
        .rules()
        .iter()
        .zip(counts)
        .map(|(r, hits)| RuleHits {
            rule: r.name.clone(),
            hits,
        })
        .collect();
    Ok(Applicability {
        catalog: out,
        scanned_lines: scanned,
        empty_input: lines.is_empty(),
        hits,
    })
}
