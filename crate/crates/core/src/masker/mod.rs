//! Ordered variable masking.
//!
//! A [`RuleCatalog`] is an ordered list of regex rules. Rules run strictly
//! by ascending `order`; each replaces its matches with its mask, and masks
//! are opaque to the rules that follow. Order therefore matters: a MAC
//! address masked after the time rule ends up as `<*>:<*>` instead of a
//! single `<*>`.

mod applicability;
mod catalog;
mod engine;
mod stats;

pub use applicability::{estimate_applicability, Applicability, RuleHits, DEFAULT_PREFIX};
pub use catalog::{
    default_catalog, load_catalog, save_catalog, Category, MaskRule, RuleCatalog, VALUE_GROUP,
};
pub use engine::{apply_masks, mask_with_spans, Masked, MaskedSpan};
pub use stats::{match_statistics, DatasetMatch, MatchReport, RuleCounts};
