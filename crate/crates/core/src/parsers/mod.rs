//! Statistic-based log parsers.
//!
//! Both parsers work on whitespace tokens of (usually masked) content and
//! produce a template per line. Lines are grouped by template string, so two
//! internal clusters that end with the same template form one group.
//!
//! Only Drain and LFA are provided. Other parsers from the same family
//! behave differently on masked input and are worth knowing about when
//! adding one behind [`LogParser`]: IPLoM treats symbols such as `=` as
//! delimiters and drops them from templates, and LogCluster assumes rare
//! templates can be ignored.

mod drain;
mod lfa;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use drain::Drain;
pub use lfa::Lfa;

use crate::corpus::LogRecord;
use crate::masker::{apply_masks, estimate_applicability, RuleCatalog};
use crate::{Error, Result, PLACEHOLDER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParserKind {
    Drain,
    Lfa,
}

impl std::str::FromStr for ParserKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "drain" => Ok(ParserKind::Drain),
            "lfa" => Ok(ParserKind::Lfa),
            other => Err(Error::Config(format!("unknown parser `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ParserConfig {
    pub parser_kind: ParserKind,
    pub drain_depth: usize,
    pub drain_similarity_threshold: f64,
    pub drain_max_children: usize,
}

impl Default for ParserConfig {
    fn default() -> Self {
        ParserConfig {
            parser_kind: ParserKind::Drain,
            drain_depth: 4,
            drain_similarity_threshold: 0.4,
            drain_max_children: 100,
        }
    }
}

impl ParserConfig {
    pub fn lfa() -> Self {
        ParserConfig {
            parser_kind: ParserKind::Lfa,
            ..ParserConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.drain_depth < 3 {
            return Err(Error::Config(format!(
                "drain depth {} is below 3",
                self.drain_depth
            )));
        }
        let st = self.drain_similarity_threshold;
        if !(st > 0.0 && st <= 1.0) {
            return Err(Error::Config(format!(
                "drain similarity threshold {st} is outside (0, 1]"
            )));
        }
        if self.drain_max_children < 1 {
            return Err(Error::Config(
                "drain max children must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn build(&self) -> Result<Box<dyn LogParser>> {
        self.validate()?;
        Ok(match self.parser_kind {
            ParserKind::Drain => Box::new(Drain::new(
                self.drain_depth,
                self.drain_similarity_threshold,
                self.drain_max_children,
            )),
            ParserKind::Lfa => Box::new(Lfa),
        })
    }
}

/// A parser maps every line to a template.
pub trait LogParser: Send + Sync {
    /// Templates for each line, in input order.
    fn templates(&self, lines: &[&str]) -> Vec<String>;
}

/// Splits on runs of whitespace; punctuation stays attached.
pub fn tokenize(content: &str) -> Vec<&str> {
    content.split_whitespace().collect()
}

pub(crate) fn join_tokens<S: AsRef<str>>(tokens: &[S]) -> String {
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(t.as_ref());
    }
    out
}

pub(crate) fn is_wildcard(token: &str) -> bool {
    token == PLACEHOLDER
}

/// Per-line templates and the grouping they induce.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParseOutcome {
    /// `(line_id, template)` in input order.
    pub lines: Vec<(u64, String)>,
    /// Template → line ids, ascending.
    pub groups: BTreeMap<String, Vec<u64>>,
    /// The catalog actually applied, when preprocessing was used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effective_catalog: Option<Vec<String>>,
}

impl ParseOutcome {
    pub fn from_templates(lines: Vec<(u64, String)>) -> Self {
        let mut groups: BTreeMap<String, Vec<u64>> = BTreeMap::new();
        for (id, template) in &lines {
            groups.entry(template.clone()).or_default().push(*id);
        }
        for ids in groups.values_mut() {
            ids.sort_unstable();
        }
        ParseOutcome {
            lines,
            groups,
            effective_catalog: None,
        }
    }

    pub fn template_of(&self, line_id: u64) -> Option<&str> {
        self.lines
            .iter()
            .find(|(id, _)| *id == line_id)
            .map(|(_, t)| t.as_str())
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// `line_id,template` per line.
    pub fn write_structured_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["line_id", "template"])?;
        for (id, template) in &self.lines {
            w.write_record([id.to_string().as_str(), template])?;
        }
        w.flush()?;
        Ok(())
    }

    /// `template,count`, most frequent first, ties by template.
    pub fn write_templates_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut rows: Vec<(&String, usize)> =
            self.groups.iter().map(|(t, ids)| (t, ids.len())).collect();
        rows.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["template", "count"])?;
        for (template, count) in rows {
            w.write_record([template.as_str(), count.to_string().as_str()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a file written by [`ParseOutcome::write_structured_csv`].
    pub fn read_structured_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path).map_err(|e| Error::csv(path, &e))?;
        let mut lines = Vec::new();
        for row in reader.records() {
            let row = row.map_err(|e| Error::csv(path, &e))?;
            let raw_id = row.get(0).unwrap_or("");
            let id = raw_id.parse().map_err(|_| Error::Csv {
                path: path.to_path_buf(),
                row: row.position().map(|p| p.line()).unwrap_or(0),
                message: format!("line id `{raw_id}` is not a positive integer"),
            })?;
            lines.push((id, row.get(1).unwrap_or("").to_string()));
        }
        Ok(ParseOutcome::from_templates(lines))
    }
}

/// Parses `(line_id, content)` pairs.
pub fn parse<S: AsRef<str>>(contents: &[(u64, S)], config: &ParserConfig) -> Result<ParseOutcome> {
    let parser = config.build()?;
    let texts: Vec<&str> = contents.iter().map(|(_, c)| c.as_ref()).collect();
    let templates = parser.templates(&texts);
    Ok(ParseOutcome::from_templates(
        contents.iter().map(|(id, _)| *id).zip(templates).collect(),
    ))
}

/// Preprocessing options for [`parse_with_preprocessing`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Preprocessing {
    /// Lines scanned for applicability; `None` keeps every enabled rule.
    pub applicability_prefix: Option<usize>,
}

impl Default for Preprocessing {
    fn default() -> Self {
        Preprocessing {
            applicability_prefix: Some(crate::masker::DEFAULT_PREFIX),
        }
    }
}

/// Filters the catalog on the dataset prefix and masks every line.
pub fn preprocess(
    records: &[LogRecord],
    catalog: &RuleCatalog,
    options: Preprocessing,
) -> Result<(RuleCatalog, Vec<String>)> {
    let effective = match options.applicability_prefix {
        Some(prefix) => {
            let prefix_lines: Vec<&str> = records
                .iter()
                .take(prefix)
                .map(|r| r.content.as_str())
                .collect();
            estimate_applicability(&prefix_lines, catalog, prefix)?.catalog
        }
        None => catalog.clone(),
    };
    let masked = records
        .par_iter()
        .map(|r| apply_masks(&r.content, &effective))
        .collect();
    Ok((effective, masked))
}

/// Masks, then parses; the outcome records the names of the rules that
/// stayed enabled.
pub fn parse_with_preprocessing(
    records: &[LogRecord],
    catalog: &RuleCatalog,
    options: Preprocessing,
    config: &ParserConfig,
) -> Result<ParseOutcome> {
    config.validate()?;
    let (effective, masked) = preprocess(records, catalog, options)?;
    let contents: Vec<(u64, &str)> = records
        .iter()
        .zip(&masked)
        .map(|(r, m)| (r.line_id, m.as_str()))
        .collect();
    let mut outcome = parse(&contents, config)?;
    outcome.effective_catalog = Some(
        effective
            .rules()
            .iter()
            .filter(|r| r.enabled)
            .map(|r| r.name.clone())
            .collect(),
    );
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::masker::default_catalog;

    fn records(lines: &[&str]) -> Vec<LogRecord> {
        lines
            .iter()
            .enumerate()
            .map(|(i, l)| LogRecord::from_content(i as u64 + 1, *l))
            .collect()
    }

    #[test]
    fn config_bounds() {
        assert!(ParserConfig::default().validate().is_ok());
        let bad = ParserConfig {
            drain_depth: 2,
            ..ParserConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = ParserConfig {
            drain_similarity_threshold: 0.0,
            ..ParserConfig::default()
        };
        assert!(bad.validate().is_err());
        let ok = ParserConfig {
            drain_similarity_threshold: 1.0,
            ..ParserConfig::default()
        };
        assert!(ok.validate().is_ok());
        let bad = ParserConfig {
            drain_max_children: 0,
            ..ParserConfig::default()
        };
        assert!(bad.validate().is_err());
        assert_eq!("LFA".parse::<ParserKind>().unwrap(), ParserKind::Lfa);
        assert!("iplom".parse::<ParserKind>().is_err());
    }

    #[test]
    fn single_line_template_is_the_line() {
        for cfg in [ParserConfig::default(), ParserConfig::lfa()] {
            let out = parse(&[(1, "Server started on port 8080")], &cfg).unwrap();
            assert_eq!(out.groups.len(), 1);
            assert_eq!(out.template_of(1), Some("Server started on port 8080"));
        }
    }

    #[test]
    fn disabled_catalog_equals_plain_parse() {
        let recs = records(&[
            "Found child 8766 in slot 12",
            "Found child 99 in slot 3",
            "connection from 10.0.0.1 closed",
        ]);
        let disabled = default_catalog().all_disabled();
        let pre = parse_with_preprocessing(
            &recs,
            &disabled,
            Preprocessing::default(),
            &ParserConfig::default(),
        )
        .unwrap();
        let contents: Vec<(u64, &str)> = recs
            .iter()
            .map(|r| (r.line_id, r.content.as_str()))
            .collect();
        let plain = parse(&contents, &ParserConfig::default()).unwrap();
        assert_eq!(pre.lines, plain.lines);
        assert_eq!(pre.groups, plain.groups);
        assert_eq!(pre.effective_catalog, Some(vec![]));
    }

    #[test]
    fn effective_catalog_is_recorded() {
        let recs = records(&[
            "connection from 10.0.0.1 closed",
            "connection from 10.0.0.2 closed",
        ]);
        let out = parse_with_preprocessing(
            &recs,
            &default_catalog(),
            Preprocessing::default(),
            &ParserConfig::default(),
        )
        .unwrap();
        assert_eq!(out.effective_catalog, Some(vec!["ipv4".to_string()]));
        assert_eq!(out.groups.len(), 1);
        assert!(out.groups.contains_key("connection from <*> closed"));

        let all = parse_with_preprocessing(
            &recs,
            &default_catalog(),
            Preprocessing {
                applicability_prefix: None,
            },
            &ParserConfig::default(),
        )
        .unwrap();
        assert_eq!(all.effective_catalog.unwrap().len(), 15);
    }

    #[test]
    fn csv_round_trip() {
        let out = parse(
            &[(1, "a b 1"), (2, "a b 2"), (3, "c, \"quoted\" d")],
            &ParserConfig::default(),
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("structured.csv");
        out.write_structured_csv(std::fs::File::create(&path).unwrap())
            .unwrap();
        let back = ParseOutcome::read_structured_csv(&path).unwrap();
        assert_eq!(back.lines, out.lines);
        assert_eq!(back.groups, out.groups);

        let mut buf = Vec::new();
        out.write_templates_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("template,count"));
        assert_eq!(text.lines().nth(1), Some("a b <*>,2"));
    }
}
