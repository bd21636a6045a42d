//! Dataset ingestion and template/variable alignment.
//!
//! Two input shapes are supported: Loghub "structured" CSVs, which carry the
//! message content next to its ground-truth template, and raw `.log` files
//! whose lines are split into header fields and content by a format string
//! such as `<Date> <Time> <Level> <Content>`.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, PLACEHOLDER};

/// One raw log line with its header fields separated from the message body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogRecord {
    /// 1-based, strictly increasing within a dataset.
    pub line_id: u64,
    pub raw_line: String,
    pub content: String,
    pub header_fields: BTreeMap<String, String>,
}

impl LogRecord {
    /// A record whose whole line is content.
    pub fn from_content(line_id: u64, content: impl Into<String>) -> Self {
        let content = content.into();
        LogRecord {
            line_id,
            raw_line: content.clone(),
            content,
            header_fields: BTreeMap::new(),
        }
    }
}

/// A variable located in a message by aligning it with its template.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VariableOccurrence {
    pub text: String,
    /// Byte offset of the first byte in the content.
    pub start: usize,
    /// Byte offset one past the last byte.
    pub end: usize,
    pub placeholder_index: usize,
}

impl VariableOccurrence {
    pub fn span(&self) -> std::ops::Range<usize> {
        self.start..self.end
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

/// A message with its oracle template and the variables extracted from it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruthEntry {
    pub line_id: u64,
    pub content: String,
    pub template: String,
    pub variables: Vec<VariableOccurrence>,
    /// Set when the template could not be aligned with the content. The
    /// entry is kept so dataset sizes stay intact; `variables` is empty.
    pub extraction_failed: bool,
}

impl GroundTruthEntry {
    /// Builds an entry and extracts its variables.
    pub fn new(line_id: u64, content: impl Into<String>, template: impl Into<String>) -> Self {
        let content = content.into();
        let template = template.into();
        let (variables, extraction_failed) = match extract_variables(&content, &template) {
            Ok(vars) => (vars, false),
            Err(TemplateMismatch) => (Vec::new(), true),
        };
        GroundTruthEntry {
            line_id,
            content,
            template,
            variables,
            extraction_failed,
        }
    }

    /// Number of variables with an empty match.
    pub fn empty_variables(&self) -> usize {
        self.variables.iter().filter(|v| v.is_empty()).count()
    }
}

/// Column names used when reading structured CSVs. The defaults follow the
/// Loghub 2.0 convention.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ColumnMap {
    pub line_id: String,
    pub content: String,
    pub template: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap {
            line_id: "LineId".into(),
            content: "Content".into(),
            template: "EventTemplate".into(),
        }
    }
}

/// Loads a Loghub structured CSV with the default column names.
pub fn load_structured_csv(path: impl AsRef<Path>) -> Result<Vec<GroundTruthEntry>> {
    load_structured_csv_with(path, &ColumnMap::default())
}

pub fn load_structured_csv_with(
    path: impl AsRef<Path>,
    columns: &ColumnMap,
) -> Result<Vec<GroundTruthEntry>> {
    let path = path.as_ref();
    let rows = read_columns(
        path,
        &[&columns.line_id, &columns.content, &columns.template],
    )?;

    // Templates repeat heavily; compile each matcher once.
    let mut matchers: HashMap<String, TemplateMatcher> = HashMap::new();
    let entries = rows
        .into_iter()
        .map(|(line_id, mut fields)| {
            let template = fields.pop().unwrap_or_default();
            let content = fields.pop().unwrap_or_default();
            let matcher = matchers
                .entry(template.clone())
                .or_insert_with(|| template_to_matcher(&template));
            let (variables, extraction_failed) = match matcher.extract(&content) {
                Ok(vars) => (vars, false),
                Err(TemplateMismatch) => (Vec::new(), true),
            };
            GroundTruthEntry {
                line_id,
                content,
                template,
                variables,
                extraction_failed,
            }
        })
        .collect::<Vec<_>>();

    let failed = entries.iter().filter(|e| e.extraction_failed).count();
    if failed > 0 {
        log::warn!(
            "{}: {failed} of {} rows could not be aligned with their template",
            path.display(),
            entries.len()
        );
    }
    Ok(entries)
}

/// Reads only line ids and contents from a structured CSV; the template
/// column is not required.
pub fn load_csv_records(path: impl AsRef<Path>, columns: &ColumnMap) -> Result<Vec<LogRecord>> {
    let rows = read_columns(path.as_ref(), &[&columns.line_id, &columns.content])?;
    Ok(rows
        .into_iter()
        .map(|(line_id, mut fields)| {
            LogRecord::from_content(line_id, fields.pop().unwrap_or_default())
        })
        .collect())
}

/// Returns `(line_id, [other requested columns...])` per row. The first
/// requested column must be the line id.
fn read_columns(path: &Path, wanted: &[&str]) -> Result<Vec<(u64, Vec<String>)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(BufReader::new(file));

    let headers = reader.headers().map_err(|e| Error::csv(path, &e))?.clone();
    let indices = wanted
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h.trim_start_matches('\u{feff}') == *name)
                .ok_or_else(|| Error::MissingColumn {
                    path: path.to_path_buf(),
                    column: name.to_string(),
                })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::csv(path, &e))?;
        let row = record.position().map(|p| p.line()).unwrap_or(0);
        let raw_id = record.get(indices[0]).unwrap_or("");
        let line_id = raw_id.trim().parse::<u64>().map_err(|_| Error::Csv {
            path: path.to_path_buf(),
            row,
            message: format!("line id `{raw_id}` is not a positive integer"),
        })?;
        let fields = indices[1..]
            .iter()
            .map(|&i| record.get(i).unwrap_or("").to_string())
            .collect();
        rows.push((line_id, fields));
    }
    Ok(rows)
}

/// A compiled header format such as `<Date> <Time> <Level> <Content>`.
#[derive(Debug, Clone)]
pub struct LogFormat {
    source: String,
    headers: Vec<String>,
    regex: Regex,
}

impl LogFormat {
    pub const CONTENT: &'static str = "Content";

    /// Compiles a format string. It must contain exactly one `<Content>`
    /// field and that field must come last.
    pub fn parse(format: &str) -> Result<Self> {
        let bad = |reason: &str| Error::LogFormat {
            format: format.to_string(),
            reason: reason.to_string(),
        };
        let field_re = Regex::new(r"<([^<>]+)>").expect("static regex");

        let mut pattern = String::from("(?s)^");
        let mut headers = Vec::new();
        let mut last = 0;
        for caps in field_re.captures_iter(format) {
            let whole = caps.get(0).unwrap();
            push_literal(&mut pattern, &format[last..whole.start()]);
            let name = caps[1].to_string();
            if headers.contains(&name) {
                return Err(bad(&format!("field <{name}> appears twice")));
            }
            pattern.push_str("(.*?)");
            headers.push(name);
            last = whole.end();
        }
        let trailing = &format[last..];
        push_literal(&mut pattern, trailing);
        pattern.push('$');

        let content_fields = headers.iter().filter(|h| *h == Self::CONTENT).count();
        if content_fields == 0 {
            return Err(bad("missing <Content> field"));
        }
        if content_fields > 1 || headers.last().map(String::as_str) != Some(Self::CONTENT) {
            return Err(bad("<Content> must be the last field"));
        }
        if !trailing.trim().is_empty() {
            return Err(bad("<Content> must be the last field"));
        }

        let regex = Regex::new(&pattern).map_err(|e| bad(&e.to_string()))?;
        Ok(LogFormat {
            source: format.to_string(),
            headers,
            regex,
        })
    }

    pub fn as_str(&self) -> &str {
        &self.source
    }

    pub fn headers(&self) -> &[String] {
        &self.headers
    }

    /// Splits one line; `None` when the line does not fit the format.
    pub fn split(&self, line: &str) -> Option<(BTreeMap<String, String>, String)> {
        let caps = self.regex.captures(line)?;
        let mut fields = BTreeMap::new();
        let mut content = String::new();
        for (i, name) in self.headers.iter().enumerate() {
            let value = caps.get(i + 1).map_or("", |m| m.as_str());
            if name == Self::CONTENT {
                content = value.to_string();
            } else {
                fields.insert(name.clone(), value.to_string());
            }
        }
        Some((fields, content))
    }
}

fn push_literal(pattern: &mut String, literal: &str) {
    let mut rest = literal;
    while !rest.is_empty() {
        let ws_len = rest.len() - rest.trim_start().len();
        if ws_len > 0 {
            pattern.push_str(r"\s+");
            rest = &rest[ws_len..];
            continue;
        }
        let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
        pattern.push_str(&regex::escape(&rest[..end]));
        rest = &rest[end..];
    }
}

/// Records read from a raw log file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawLog {
    pub records: Vec<LogRecord>,
    /// Lines that did not fit the format and were kept whole as content.
    pub warnings: usize,
}

pub fn parse_raw_log(path: impl AsRef<Path>, format: &LogFormat) -> Result<RawLog> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8_lossy(&bytes);
    let raw = parse_raw_lines(&text, format);
    if raw.warnings > 0 {
        log::warn!(
            "{}: {} lines did not match format `{}`",
            path.display(),
            raw.warnings,
            format.as_str()
        );
    }
    Ok(raw)
}

/// Splits text into records; accepts `\n` and `\r\n` line endings.
pub fn parse_raw_lines(text: &str, format: &LogFormat) -> RawLog {
    let mut raw = RawLog::default();
    for (idx, line) in text.lines().enumerate() {
        let line_id = idx as u64 + 1;
        let record = match format.split(line) {
            Some((header_fields, content)) => LogRecord {
                line_id,
                raw_line: line.to_string(),
                content,
                header_fields,
            },
            None => {
                raw.warnings += 1;
                LogRecord::from_content(line_id, line)
            }
        };
        raw.records.push(record);
    }
    raw
}

/// Signals that a template cannot be aligned with a message.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TemplateMismatch;

impl std::fmt::Display for TemplateMismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("template does not match content")
    }
}

impl std::error::Error for TemplateMismatch {}

/// A template compiled into whole-string anchored patterns. Literal text is
/// escaped, each `<*>` is a capture group that may be empty, and whitespace
/// runs match whitespace runs.
#[derive(Debug, Clone)]
pub struct TemplateMatcher {
    lazy: Regex,
    greedy: Regex,
    placeholders: usize,
}

pub fn template_to_matcher(template: &str) -> TemplateMatcher {
    let build = |group: &str| {
        let mut pattern = String::from("(?s)^");
        let mut pieces = template.split(PLACEHOLDER).peekable();
        while let Some(piece) = pieces.next() {
            push_literal(&mut pattern, piece);
            if pieces.peek().is_some() {
                pattern.push_str(group);
            }
        }
        pattern.push('$');
        // Escaped literals and fixed groups always compile; only pathological
        // template sizes can exceed the regex size limit.
        regex::RegexBuilder::new(&pattern)
            .size_limit(1 << 26)
            .build()
            .expect("escaped template compiles")
    };
    TemplateMatcher {
        lazy: build("(.*?)"),
        greedy: build("(.*)"),
        placeholders: template.matches(PLACEHOLDER).count(),
    }
}

impl TemplateMatcher {
    pub fn placeholders(&self) -> usize {
        self.placeholders
    }

    /// The anchored non-greedy pattern source.
    pub fn as_str(&self) -> &str {
        self.lazy.as_str()
    }

    pub fn is_match(&self, content: &str) -> bool {
        self.lazy.is_match(content)
    }

    /// Non-greedy alignment first, greedy as a fallback.
    pub fn extract(&self, content: &str) -> Result<Vec<VariableOccurrence>, TemplateMismatch> {
        let caps = self
            .lazy
            .captures(content)
            .or_else(|| self.greedy.captures(content))
            .ok_or(TemplateMismatch)?;
        Ok(caps
            .iter()
            .skip(1)
            .enumerate()
            .map(|(placeholder_index, m)| {
                let m = m.expect("every placeholder group participates");
                VariableOccurrence {
                    text: m.as_str().to_string(),
                    start: m.start(),
                    end: m.end(),
                    placeholder_index,
                }
            })
            .collect())
    }
}

/// Extracts one variable per `<*>` of `template`, left to right. Either the
/// whole template aligns or nothing is returned.
pub fn extract_variables(
    content: &str,
    template: &str,
) -> Result<Vec<VariableOccurrence>, TemplateMismatch> {
    template_to_matcher(template).extract(content)
}

/// Substitutes values into the template placeholders in order. Extra
/// placeholders are left as `<*>`.
pub fn fill_template<S: AsRef<str>>(template: &str, values: &[S]) -> String {
    let mut out = String::with_capacity(template.len());
    let mut values = values.iter();
    let mut pieces = template.split(PLACEHOLDER).peekable();
    while let Some(piece) = pieces.next() {
        out.push_str(piece);
        if pieces.peek().is_some() {
            match values.next() {
                Some(v) => out.push_str(v.as_ref()),
                None => out.push_str(PLACEHOLDER),
            }
        }
    }
    out
}

/// Writes extracted variables as CSV: `line_id,placeholder_index,start,end,text`.
pub fn write_variables_csv<W: Write>(entries: &[GroundTruthEntry], out: W) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["line_id", "placeholder_index", "start", "end", "text"])?;
    for entry in entries {
        for var in &entry.variables {
            writer.write_record([
                entry.line_id.to_string(),
                var.placeholder_index.to_string(),
                var.start.to_string(),
                var.end.to_string(),
                var.text.clone(),
            ])?;
        }
    }
    writer.flush()?;
    Ok(())
}
