use std::collections::HashSet;
use std::fs;
use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, PLACEHOLDER};

/// The kind of variable a rule targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    HexOrInteger,
    FloatNumeric,
    TimeDuration,
    BlockId,
    CoreId,
    Ipv4,
    Ipv4Port,
    Ipv6,
    MacAddress,
    MemorySize,
    PackageOrDomain,
    AssignedValue,
    Time,
    DatetimeWords,
    Path,
    Url,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::HexOrInteger => "hex_or_integer",
            Category::FloatNumeric => "float_numeric",
            Category::TimeDuration => "time_duration",
            Category::BlockId => "block_id",
            Category::CoreId => "core_id",
            Category::Ipv4 => "ipv4",
            Category::Ipv4Port => "ipv4_port",
            Category::Ipv6 => "ipv6",
            Category::MacAddress => "mac_address",
            Category::MemorySize => "memory_size",
            Category::PackageOrDomain => "package_or_domain",
            Category::AssignedValue => "assigned_value",
            Category::Time => "time",
            Category::DatetimeWords => "datetime_words",
            Category::Path => "path",
            Category::Url => "url",
        }
    }
}

impl std::fmt::Display for Category {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One named masking rule.
///
/// When the pattern defines a capture group named `v`, only that group is
/// replaced by the mask and the rest of the match is kept; otherwise the
/// whole match is replaced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskRule {
    pub name: String,
    pub category: Category,
    pub pattern: String,
    #[serde(default = "default_mask")]
    pub mask: String,
    pub order: u32,
    #[serde(default = "default_enabled")]
    pub enabled: bool,
}

fn default_mask() -> String {
    PLACEHOLDER.to_string()
}

fn default_enabled() -> bool {
    true
}

impl MaskRule {
    pub fn new(name: &str, category: Category, pattern: &str, order: u32) -> Self {
        MaskRule {
            name: name.to_string(),
            category,
            pattern: pattern.to_string(),
            mask: default_mask(),
            order,
            enabled: true,
        }
    }

    pub fn with_mask(mut self, mask: &str) -> Self {
        self.mask = mask.to_string();
        self
    }

    pub fn disabled(mut self) -> Self {
        self.enabled = false;
        self
    }
}

/// Name of the capture group that narrows a rule's replacement.
pub const VALUE_GROUP: &str = "v";

#[derive(Debug, Clone)]
pub(crate) struct CompiledRule {
    pub regex: Regex,
    /// Index of the `v` group, if present.
    pub value_group: Option<usize>,
}

/// An ordered, validated collection of masking rules.
///
/// Rules are kept sorted by `order`; patterns are compiled once at
/// construction. Equality compares the rules only, not the provenance label.
#[derive(Debug, Clone)]
pub struct RuleCatalog {
    rules: Vec<MaskRule>,
    compiled: Vec<CompiledRule>,
    shield: Regex,
    provenance: String,
}

impl PartialEq for RuleCatalog {
    fn eq(&self, other: &Self) -> bool {
        self.rules == other.rules
    }
}

impl RuleCatalog {
    pub fn new(mut rules: Vec<MaskRule>, provenance: impl Into<String>) -> Result<Self> {
        let mut orders = HashSet::new();
        let mut names = HashSet::new();
        for rule in &rules {
            if !orders.insert(rule.order) {
                return Err(Error::Catalog(format!(
                    "order {} is used by more than one rule (second: `{}`)",
                    rule.order, rule.name
                )));
            }
            if !names.insert(rule.name.as_str()) {
                return Err(Error::Catalog(format!(
                    "duplicate rule name `{}`",
                    rule.name
                )));
            }
            if !rule.mask.contains(PLACEHOLDER) {
                return Err(Error::Catalog(format!(
                    "rule `{}`: mask `{}` does not contain {PLACEHOLDER}",
                    rule.name, rule.mask
                )));
            }
        }
        rules.sort_by_key(|r| r.order);
        let compiled = rules
            .iter()
            .map(|rule| {
                let regex = Regex::new(&rule.pattern).map_err(|e| {
                    Error::Catalog(format!(
                        "rule `{}`: pattern does not compile: {e}",
                        rule.name
                    ))
                })?;
                let value_group = regex.capture_names().position(|n| n == Some(VALUE_GROUP));
                Ok(CompiledRule { regex, value_group })
            })
            .collect::<Result<Vec<_>>>()?;
        let shield = shield_regex(rules.iter().map(|r| r.mask.as_str()));
        Ok(RuleCatalog {
            rules,
            compiled,
            shield,
            provenance: provenance.into(),
        })
    }

    /// A catalog with no rules; masking is the identity.
    pub fn empty() -> Self {
        RuleCatalog {
            rules: Vec::new(),
            compiled: Vec::new(),
            shield: shield_regex(std::iter::empty()),
            provenance: "empty".into(),
        }
    }

    pub fn rules(&self) -> &[MaskRule] {
        &self.rules
    }

    pub(crate) fn compiled(&self) -> &[CompiledRule] {
        &self.compiled
    }

    /// Matches any mask literal of this catalog (and the bare placeholder).
    pub(crate) fn shield(&self) -> &Regex {
        &self.shield
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn enabled_count(&self) -> usize {
        self.rules.iter().filter(|r| r.enabled).count()
    }

    pub fn get(&self, name: &str) -> Option<&MaskRule> {
        self.rules.iter().find(|r| r.name == name)
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.rules.iter().position(|r| r.name == name)
    }

    /// Same rules with one rule switched on or off. Unknown names are an error.
    pub fn with_enabled(&self, name: &str, enabled: bool) -> Result<Self> {
        let idx = self
            .position(name)
            .ok_or_else(|| Error::Catalog(format!("no rule named `{name}`")))?;
        let mut out = self.clone();
        out.rules[idx].enabled = enabled;
        Ok(out)
    }

    /// Same rules with every rule disabled.
    pub fn all_disabled(&self) -> Self {
        let mut out = self.clone();
        for rule in &mut out.rules {
            rule.enabled = false;
        }
        out
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    pub(crate) fn set_enabled_at(&mut self, idx: usize, enabled: bool) {
        self.rules[idx].enabled = enabled;
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.rules)?)
    }

    /// Parses the catalog file format: a JSON array of rule objects.
    pub fn from_json(json: &str, provenance: impl Into<String>) -> Result<Self> {
        let rules: Vec<MaskRule> = serde_json::from_str(json)
            .map_err(|e| Error::Catalog(format!("cannot read rules: {e}")))?;
        RuleCatalog::new(rules, provenance)
    }
}

/// Alternation over the distinct masks, longest first so a composite mask
/// such as `<*>:<*>` is shielded as one unit.
fn shield_regex<'a>(masks: impl Iterator<Item = &'a str>) -> Regex {
    let mut literals: Vec<&str> = masks.chain(std::iter::once(PLACEHOLDER)).collect();
    literals.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    literals.dedup();
    let alternation = literals
        .iter()
        .map(|m| regex::escape(m))
        .collect::<Vec<_>>()
        .join("|");
    Regex::new(&alternation).expect("escaped literals compile")
}

pub fn load_catalog(path: impl AsRef<Path>) -> Result<RuleCatalog> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    RuleCatalog::from_json(&text, "user")
}

pub fn save_catalog(catalog: &RuleCatalog, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut json = catalog.to_json()?;
    json.push('\n');
    fs::write(path, json).map_err(|e| Error::io(path, e))
}

/// The refined catalog: fifteen enabled rules plus the two system-specific
/// Loghub rules (block and core identifiers), shipped disabled.
///
/// Rules are listed in application order. The specific shapes (URL, MAC,
/// IPv6, IPv4 with port) run before the generic numeric rules so that
/// composite variables become a single mask.
pub fn default_catalog() -> RuleCatalog {
    use Category::*;
    let rules = vec![
        MaskRule::new(
            "url",
            Url,
            r#"\b[a-zA-Z][a-zA-Z0-9+.\-]*://[^\s"'<>,;\)\]]+"#,
            10,
        ),
        MaskRule::new(
            "mac_address",
            MacAddress,
            r"\b[0-9a-fA-F]{2}(?:[:-][0-9a-fA-F]{2}){5}\b",
            20,
        ),
        MaskRule::new(
            "ipv6",
            Ipv6,
            r"\b(?:(?:[0-9a-fA-F]{1,4}:){7}[0-9a-fA-F]{1,4}|(?:[0-9a-fA-F]{1,4}:){1,6}(?::[0-9a-fA-F]{1,4}){1,6})\b",
            30,
        ),
        MaskRule::new(
            "ipv4_port",
            Ipv4Port,
            r"\b(?:\d{1,3}\.){3}\d{1,3}:\d{1,5}\b",
            40,
        ),
        MaskRule::new("ipv4", Ipv4, r"\b(?:\d{1,3}\.){3}\d{1,3}\b", 50),
        MaskRule::new("path", Path, r"\B(?:/[\w.\-]+)+/?", 60),
        MaskRule::new("block_id", BlockId, r"blk_-?\d+", 70).disabled(),
        MaskRule::new("core_id", CoreId, r"core\.\d+", 80).disabled(),
        MaskRule::new(
            "package_or_domain",
            PackageOrDomain,
            r"\b(?:[\w$\-]+\.){2,}[\w$\-]+(?::\d+)?",
            90,
        ),
        MaskRule::new(
            "month_name",
            DatetimeWords,
            r"\b(?:Jan(?:uary)?|Feb(?:ruary)?|Mar(?:ch)?|Apr(?:il)?|May|June?|July?|Aug(?:ust)?|Sep(?:t|tember)?|Oct(?:ober)?|Nov(?:ember)?|Dec(?:ember)?|JAN|FEB|MAR|APR|MAY|JUN|JUL|AUG|SEP|OCT|NOV|DEC)\b",
            100,
        ),
        MaskRule::new(
            "weekday_name",
            DatetimeWords,
            r"\b(?:Mon(?:day)?|Tue(?:s|sday)?|Wed(?:nesday)?|Thu(?:r|rs|rsday)?|Fri(?:day)?|Sat(?:urday)?|Sun(?:day)?|MON|TUE|WED|THU|FRI|SAT|SUN)\b",
            110,
        ),
        MaskRule::new(
            "time",
            Time,
            r"\b\d{1,2}:\d{2}(?::\d{2})?(?:[.,]\d+)?\b",
            120,
        ),
        MaskRule::new(
            "time_duration",
            TimeDuration,
            r"(?:<\s?)?\b\d+(?:\.\d+)?\s?(?:ms|msec|secs?|seconds?|s)\b",
            130,
        ),
        MaskRule::new(
            "memory_size",
            MemorySize,
            r"\b\d+(?:\.\d+)?\s?(?:[KMGTP]i?B|[kKMGTP]|[Bb]ytes?)\b",
            140,
        ),
        MaskRule::new(
            "assigned_value",
            AssignedValue,
            r"=(?P<v>[-+]?\d+(?:\.\d+)?)\b",
            150,
        ),
        MaskRule::new(
            "float_numeric",
            FloatNumeric,
            r"(?:\B[-+])?\b\d+\.\d+(?:[eE][-+]?\d+)?\b",
            160,
        ),
        MaskRule::new(
            "hex_or_integer",
            HexOrInteger,
            r"\b0[xX][a-fA-F\d]+\b|(?:\B[-+])?\b[a-fA-F\d]*\d[a-fA-F\d]*\b",
            170,
        ),
    ];
    RuleCatalog::new(rules, "default").expect("default catalog is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order_of(cat: &RuleCatalog, name: &str) -> u32 {
        cat.get(name).unwrap().order
    }

    #[test]
    fn default_catalog_has_fifteen_enabled_rules() {
        let cat = default_catalog();
        assert_eq!(cat.enabled_count(), 15);
        assert_eq!(cat.len(), 17);
        assert!(!cat.get("block_id").unwrap().enabled);
        assert!(!cat.get("core_id").unwrap().enabled);
        assert!(cat.rules().iter().all(|r| r.mask == PLACEHOLDER));
    }

    #[test]
    fn default_catalog_ordering_constraints() {
        let cat = default_catalog();
        assert!(order_of(&cat, "mac_address") < order_of(&cat, "time"));
        assert!(order_of(&cat, "ipv4_port") < order_of(&cat, "ipv4"));
        assert!(order_of(&cat, "url") < order_of(&cat, "path"));
        assert!(order_of(&cat, "month_name") < order_of(&cat, "hex_or_integer"));
        assert!(order_of(&cat, "weekday_name") < order_of(&cat, "hex_or_integer"));
        let orders: Vec<u32> = cat.rules().iter().map(|r| r.order).collect();
        assert!(orders.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn block_id_extra_matches_hdfs_block() {
        let cat = default_catalog();
        let idx = cat.position("block_id").unwrap();
        assert!(cat.compiled()[idx]
            .regex
            .is_match("blk_-1608999687919862906"));
    }

    #[test]
    fn duplicate_orders_are_rejected() {
        let rules = vec![
            MaskRule::new("a", Category::Ipv4, r"\d+", 3),
            MaskRule::new("b", Category::Time, r"\d+", 3),
        ];
        let err = RuleCatalog::new(rules, "user").unwrap_err();
        assert!(err.to_string().contains("order 3"), "{err}");
    }

    #[test]
    fn bad_pattern_names_the_rule() {
        let rules = vec![MaskRule::new("broken", Category::Path, r"(unclosed", 1)];
        let err = RuleCatalog::new(rules, "user").unwrap_err();
        assert!(err.to_string().contains("broken"), "{err}");
    }

    #[test]
    fn mask_without_placeholder_is_rejected() {
        let rules = vec![MaskRule::new("x", Category::Path, r"/\w+", 1).with_mask("PATH")];
        assert!(RuleCatalog::new(rules, "user").is_err());
    }

    #[test]
    fn unknown_category_is_rejected() {
        let json = r#"[{"name":"x","category":"zip_code","pattern":"\\d{5}","mask":"<*>","order":1,"enabled":true}]"#;
        let err = RuleCatalog::from_json(json, "user").unwrap_err();
        assert!(err.to_string().contains("zip_code"), "{err}");
    }

    #[test]
    fn json_round_trip() {
        let cat = default_catalog();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("catalog.json");
        save_catalog(&cat, &path).unwrap();
        let loaded = load_catalog(&path).unwrap();
        assert_eq!(loaded, cat);
        assert_eq!(loaded.provenance(), "user");
        let raw: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        let first = raw.as_array().unwrap()[0].as_object().unwrap();
        let mut keys: Vec<_> = first.keys().cloned().collect();
        keys.sort();
        assert_eq!(
            keys,
            ["category", "enabled", "mask", "name", "order", "pattern"]
        );
    }
}
