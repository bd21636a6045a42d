//! LFA: frequency-based abstraction.
//!
//! Every token is scored by how often it occurs at the same position among
//! messages with the same token count. Within one message the sorted
//! distinct scores are split at their largest gap; tokens scoring below the
//! split are variables. Equal gaps resolve to the higher split, i.e. toward
//! more variables. Messages are grouped by the resulting template.

use std::collections::HashMap;

use super::{is_wildcard, join_tokens, tokenize, LogParser};
use crate::PLACEHOLDER;

#[derive(Debug, Clone, Copy, Default)]
pub struct Lfa;

/// Scores at or above the returned value are constant. Zero when the scores
/// have no gap.
fn split_point(scores: &[u32]) -> u32 {
    let mut distinct: Vec<u32> = scores.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let mut best_gap = 0;
    let mut threshold = 0;
    for pair in distinct.windows(2) {
        let gap = pair[1] - pair[0];
        if gap >= best_gap {
            best_gap = gap;
            threshold = pair[1];
        }
    }
    threshold
}

impl LogParser for Lfa {
    fn templates(&self, lines: &[&str]) -> Vec<String> {
        let tokenized: Vec<Vec<&str>> = lines.iter().map(|l| tokenize(l)).collect();
        let mut freq: HashMap<(usize, usize, &str), u32> = HashMap::new();
        for tokens in &tokenized {
            for (pos, tok) in tokens.iter().enumerate() {
                *freq.entry((tokens.len(), pos, tok)).or_insert(0) += 1;
            }
        }
        tokenized
            .iter()
            .map(|tokens| {
                let len = tokens.len();
                let scores: Vec<u32> = tokens
                    .iter()
                    .enumerate()
                    .map(|(pos, tok)| freq[&(len, pos, *tok)])
                    .collect();
                let threshold = split_point(&scores);
                let template: Vec<&str> = tokens
                    .iter()
                    .zip(&scores)
                    .map(|(tok, &score)| {
                        if is_wildcard(tok) || score < threshold {
                            PLACEHOLDER
                        } else {
                            tok
                        }
                    })
                    .collect();
                join_tokens(&template)
            })
            .collect()
    }
}
