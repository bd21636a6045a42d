//! C interface to `logprep`.
//!
//! Every fallible call returns an [`LpStatus`]; on failure the message is
//! available from [`lp_last_error`] on the same thread. Handles are opaque
//! and must be released with their `_free` function. Strings returned
//! through `out` parameters are owned by the caller and released with
//! [`lp_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use logprep::config::resolve_catalog;
use logprep::corpus::{GroundTruthEntry, LogRecord};
use logprep::masker::{apply_masks, default_catalog, RuleCatalog};
use logprep::metrics;
use logprep::parsers::{self, ParseOutcome, ParserConfig, ParserKind, Preprocessing};
use logprep::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Config = 4,
    Mismatch = 5,
    OutOfRange = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpParserKind {
    Drain = 0,
    Lfa = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpParserConfig {
    pub kind: LpParserKind,
    pub drain_depth: usize,
    pub drain_similarity_threshold: f64,
    pub drain_max_children: usize,
    /// Lines scanned for rule applicability; 0 disables the filter.
    pub applicability_prefix: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LpScores {
    pub ga: f64,
    pub pa: f64,
    pub fga: f64,
    pub fta: f64,
}

/// An ordered set of masking rules.
pub struct LpCatalog(RuleCatalog);

/// Templates assigned to a batch of lines.
pub struct LpOutcome {
    outcome: ParseOutcome,
    templates: Vec<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: LpStatus, msg: impl Into<String>) -> LpStatus {
    set_error(msg);
    status
}

fn status_of(err: &Error) -> LpStatus {
    match err {
        Error::Io { .. } | Error::MissingColumn { .. } | Error::Csv { .. } => LpStatus::Io,
        Error::Mismatch(_) => LpStatus::Mismatch,
        _ => LpStatus::Config,
    }
}

fn from_err(err: Error) -> LpStatus {
    fail(status_of(&err), err.to_string())
}

fn guard(f: impl FnOnce() -> LpStatus) -> LpStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(LpStatus::Panic, "internal panic"))
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, LpStatus> {
    if p.is_null() {
        return Err(fail(LpStatus::NullArgument, format!("`{name}` is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        fail(
            LpStatus::InvalidUtf8,
            format!("`{name}` is not valid UTF-8"),
        )
    })
}

unsafe fn str_array<'a>(
    p: *const *const c_char,
    n: usize,
    name: &str,
) -> Result<Vec<&'a str>, LpStatus> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if p.is_null() {
        return Err(fail(LpStatus::NullArgument, format!("`{name}` is null")));
    }
    std::slice::from_raw_parts(p, n)
        .iter()
        .enumerate()
        .map(|(i, s)| str_arg(*s, &format!("{name}[{i}]")))
        .collect()
}

fn to_c(s: &str) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn lp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The built-in refined catalog.
#[no_mangle]
pub extern "C" fn lp_catalog_default() -> *mut LpCatalog {
    Box::into_raw(Box::new(LpCatalog(default_catalog())))
}

/// Loads `builtin:<name>` or a catalog JSON file.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lp_catalog_load(
    spec: *const c_char,
    out: *mut *mut LpCatalog,
) -> LpStatus {
    guard(|| {
        if out.is_null() {
            return fail(LpStatus::NullArgument, "`out` is null");
        }
        let spec = match str_arg(spec, "spec") {
            Ok(s) => s,
            Err(st) => return st,
        };
        match resolve_catalog(spec) {
            Ok(cat) => {
                *out = Box::into_raw(Box::new(LpCatalog(cat)));
                LpStatus::Ok
            }
            Err(e) => from_err(e),
        }
    })
}

/// Builds a catalog from a JSON array of rules.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lp_catalog_from_json(
    json: *const c_char,
    out: *mut *mut LpCatalog,
) -> LpStatus {
    guard(|| {
        if out.is_null() {
            return fail(LpStatus::NullArgument, "`out` is null");
        }
        let json = match str_arg(json, "json") {
            Ok(s) => s,
            Err(st) => return st,
        };
        match RuleCatalog::from_json(json, "user") {
            Ok(cat) => {
                *out = Box::into_raw(Box::new(LpCatalog(cat)));
                LpStatus::Ok
            }
            Err(e) => from_err(e),
        }
    })
}

/// # Safety
/// `catalog` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn lp_catalog_free(catalog: *mut LpCatalog) {
    if !catalog.is_null() {
        drop(Box::from_raw(catalog));
    }
}

/// Number of enabled rules, or 0 for a null handle.
///
/// # Safety
/// `catalog` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn lp_catalog_enabled_count(catalog: *const LpCatalog) -> usize {
    catalog.as_ref().map_or(0, |c| c.0.enabled_count())
}

/// Masks one message.
///
/// # Safety
/// `catalog` must be a live handle, `content` NUL-terminated and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn lp_mask(
    catalog: *const LpCatalog,
    content: *const c_char,
    out: *mut *mut c_char,
) -> LpStatus {
    guard(|| {
        let Some(cat) = catalog.as_ref() else {
            return fail(LpStatus::NullArgument, "`catalog` is null");
        };
        if out.is_null() {
            return fail(LpStatus::NullArgument, "`out` is null");
        }
        let content = match str_arg(content, "content") {
            Ok(s) => s,
            Err(st) => return st,
        };
        *out = to_c(&apply_masks(content, &cat.0));
        LpStatus::Ok
    })
}

/// Drain with its usual settings and the default applicability prefix.
#[no_mangle]
pub extern "C" fn lp_parser_config_default() -> LpParserConfig {
    let d = ParserConfig::default();
    LpParserConfig {
        kind: LpParserKind::Drain,
        drain_depth: d.drain_depth,
        drain_similarity_threshold: d.drain_similarity_threshold,
        drain_max_children: d.drain_max_children,
        applicability_prefix: Preprocessing::default().applicability_prefix.unwrap_or(0),
    }
}

/// Masks (when `catalog` is non-null) and parses `n` lines; line ids are
/// 1..=n in input order.
///
/// # Safety
/// `lines` must point to `n` NUL-terminated strings; `config` and `out`
/// must be valid pointers; `catalog` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn lp_parse(
    catalog: *const LpCatalog,
    lines: *const *const c_char,
    n: usize,
    config: *const LpParserConfig,
    out: *mut *mut LpOutcome,
) -> LpStatus {
    guard(|| {
        let Some(cfg) = config.as_ref() else {
            return fail(LpStatus::NullArgument, "`config` is null");
        };
        if out.is_null() {
            return fail(LpStatus::NullArgument, "`out` is null");
        }
        let lines = match str_array(lines, n, "lines") {
            Ok(l) => l,
            Err(st) => return st,
        };
        let parser = ParserConfig {
            parser_kind: match cfg.kind {
                LpParserKind::Drain => ParserKind::Drain,
                LpParserKind::Lfa => ParserKind::Lfa,
            },
            drain_depth: cfg.drain_depth,
            drain_similarity_threshold: cfg.drain_similarity_threshold,
            drain_max_children: cfg.drain_max_children,
        };
        let records: Vec<LogRecord> = lines
            .iter()
            .enumerate()
            .map(|(i, l)| LogRecord::from_content(i as u64 + 1, *l))
            .collect();
        let empty = RuleCatalog::empty();
        let cat = catalog.as_ref().map_or(&empty, |c| &c.0);
        let pre = Preprocessing {
            applicability_prefix: (cfg.applicability_prefix > 0)
                .then_some(cfg.applicability_prefix),
        };
        match parsers::parse_with_preprocessing(&records, cat, pre, &parser) {
            Ok(outcome) => {
                let templates = outcome
                    .lines
                    .iter()
                    .map(|(_, t)| CString::new(t.replace('\0', " ")).unwrap_or_default())
                    .collect();
                *out = Box::into_raw(Box::new(LpOutcome { outcome, templates }));
                LpStatus::Ok
            }
            Err(e) => from_err(e),
        }
    })
}

/// # Safety
/// `outcome` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn lp_outcome_free(outcome: *mut LpOutcome) {
    if !outcome.is_null() {
        drop(Box::from_raw(outcome));
    }
}

/// Number of parsed lines.
///
/// # Safety
/// `outcome` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn lp_outcome_len(outcome: *const LpOutcome) -> usize {
    outcome.as_ref().map_or(0, |o| o.templates.len())
}

/// Number of distinct templates.
///
/// # Safety
/// `outcome` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn lp_outcome_group_count(outcome: *const LpOutcome) -> usize {
    outcome.as_ref().map_or(0, |o| o.outcome.groups.len())
}

/// Template of line `index` (0-based). The string belongs to the outcome.
///
/// # Safety
/// `outcome` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lp_outcome_template(
    outcome: *const LpOutcome,
    index: usize,
    out: *mut *const c_char,
) -> LpStatus {
    let Some(o) = outcome.as_ref() else {
        return fail(LpStatus::NullArgument, "`outcome` is null");
    };
    if out.is_null() {
        return fail(LpStatus::NullArgument, "`out` is null");
    }
    match o.templates.get(index) {
        Some(t) => {
            *out = t.as_ptr();
            LpStatus::Ok
        }
        None => fail(
            LpStatus::OutOfRange,
            format!("line {index} out of {}", o.templates.len()),
        ),
    }
}

/// Scores an outcome against `n` ground-truth templates given in line order.
///
/// # Safety
/// `outcome` must be a live handle, `truth` must point to `n`
/// NUL-terminated strings and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lp_evaluate(
    outcome: *const LpOutcome,
    truth: *const *const c_char,
    n: usize,
    out: *mut LpScores,
) -> LpStatus {
    guard(|| {
        let Some(o) = outcome.as_ref() else {
            return fail(LpStatus::NullArgument, "`outcome` is null");
        };
        if out.is_null() {
            return fail(LpStatus::NullArgument, "`out` is null");
        }
        let truth = match str_array(truth, n, "truth") {
            Ok(t) => t,
            Err(st) => return st,
        };
        let entries: Vec<GroundTruthEntry> = truth
            .iter()
            .enumerate()
            .map(|(i, t)| GroundTruthEntry {
                line_id: i as u64 + 1,
                content: String::new(),
                template: t.to_string(),
                variables: Vec::new(),
                extraction_failed: false,
            })
            .collect();
        match metrics::evaluate(&o.outcome, &entries) {
            Ok(r) => {
                *out = LpScores {
                    ga: r.ga,
                    pa: r.pa,
                    fga: r.fga,
                    fta: r.fta,
                };
                LpStatus::Ok
            }
            Err(e) => from_err(e),
        }
    })
}
