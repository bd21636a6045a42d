use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::RuleCatalog;

/// A stretch of the original content replaced by one rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MaskedSpan {
    /// Index of the rule in the catalog.
    pub rule: usize,
    pub start: usize,
    pub end: usize,
}

impl MaskedSpan {
    pub fn span(&self) -> Range<usize> {
        self.start..self.end
    }
}

/// Output of masking one message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Masked {
    pub text: String,
    /// Replaced spans in original-content coordinates, sorted by start.
    pub spans: Vec<MaskedSpan>,
}

#[derive(Debug, Clone)]
enum Piece {
    /// Text later rules may still match.
    Plain { orig_start: usize, text: String },
    /// A mask (or a mask literal already present in the input); opaque to
    /// every later rule.
    Shielded {
        orig: Range<usize>,
        text: String,
        rule: Option<usize>,
    },
}

impl Piece {
    fn text(&self) -> &str {
        match self {
            Piece::Plain { text, .. } | Piece::Shielded { text, .. } => text,
        }
    }
}

/// Applies every enabled rule of the catalog in order.
pub fn apply_masks(content: &str, catalog: &RuleCatalog) -> String {
    mask_with_spans(content, catalog).text
}

/// Like [`apply_masks`], also reporting which rule replaced which span.
///
/// Each rule replaces all its non-overlapping leftmost-first matches. Mask
/// literals (from earlier rules or already in the input) are never matched
/// again: a rule only searches the plain stretches between them, while still
/// seeing the neighbouring characters for `\b` purposes.
pub fn mask_with_spans(content: &str, catalog: &RuleCatalog) -> Masked {
    let mut pieces = initial_pieces(content, catalog);
    let mut current = content.to_string();

    for (idx, (rule, compiled)) in catalog.rules().iter().zip(catalog.compiled()).enumerate() {
        if !rule.enabled {
            continue;
        }
        let mut next = Vec::with_capacity(pieces.len());
        let mut changed = false;
        let mut cursor = 0;
        for piece in pieces {
            let len = piece.text().len();
            let (piece_start, piece_end) = (cursor, cursor + len);
            cursor = piece_end;
            let Piece::Plain { orig_start, text } = piece else {
                next.push(piece);
                continue;
            };
            let hits = find_targets(
                &compiled.regex,
                compiled.value_group,
                &current[..piece_end],
                piece_start,
            );
            if hits.is_empty() {
                next.push(Piece::Plain { orig_start, text });
                continue;
            }
            changed = true;
            let mut last = 0;
            for hit in hits {
                let (s, e) = (hit.start - piece_start, hit.end - piece_start);
                if s > last {
                    next.push(Piece::Plain {
                        orig_start: orig_start + last,
                        text: text[last..s].to_string(),
                    });
                }
                next.push(Piece::Shielded {
                    orig: orig_start + s..orig_start + e,
                    text: rule.mask.clone(),
                    rule: Some(idx),
                });
                last = e;
            }
            if last < text.len() {
                next.push(Piece::Plain {
                    orig_start: orig_start + last,
                    text: text[last..].to_string(),
                });
            }
        }
        pieces = next;
        if changed {
            current = pieces.iter().map(Piece::text).collect();
        }
    }

    let spans = pieces
        .iter()
        .filter_map(|p| match p {
            Piece::Shielded {
                orig,
                rule: Some(rule),
                ..
            } => Some(MaskedSpan {
                rule: *rule,
                start: orig.start,
                end: orig.end,
            }),
            _ => None,
        })
        .collect();
    Masked {
        text: current,
        spans,
    }
}

fn initial_pieces(content: &str, catalog: &RuleCatalog) -> Vec<Piece> {
    let mut pieces = Vec::new();
    let mut last = 0;
    for m in catalog.shield().find_iter(content) {
        if m.start() > last {
            pieces.push(Piece::Plain {
                orig_start: last,
                text: content[last..m.start()].to_string(),
            });
        }
        pieces.push(Piece::Shielded {
            orig: m.range(),
            text: m.as_str().to_string(),
            rule: None,
        });
        last = m.end();
    }
    if last < content.len() || pieces.is_empty() {
        pieces.push(Piece::Plain {
            orig_start: last,
            text: content[last..].to_string(),
        });
    }
    pieces
}

/// Replacement targets inside `haystack[start..]`, as haystack offsets.
/// Empty matches are skipped.
fn find_targets(
    regex: &regex::Regex,
    value_group: Option<usize>,
    haystack: &str,
    start: usize,
) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut pos = start;
    let mut locs = regex.capture_locations();
    while pos <= haystack.len() {
        let Some((ms, me)) = regex
            .captures_read_at(&mut locs, haystack, pos)
            .map(|m| (m.start(), m.end()))
        else {
            break;
        };
        if ms == me {
            pos = next_boundary(haystack, me);
            continue;
        }
        let target = value_group.and_then(|g| locs.get(g)).unwrap_or((ms, me));
        if target.0 < target.1 {
            out.push(target.0..target.1);
        }
        pos = me;
    }
    out
}

fn next_boundary(s: &str, i: usize) -> usize {
    let mut j = i + 1;
    while j < s.len() && !s.is_char_boundary(j) {
        j += 1;
    }
    j
}
