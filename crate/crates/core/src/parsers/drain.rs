//! Drain: a fixed-depth prefix tree over token sequences.
//!
//! The tree's first level is the token count, the next `depth - 2` levels
//! are the leading tokens of the message, and leaves hold clusters. A token
//! containing a digit never gets its own tree node; it is routed through the
//! `<*>` child instead. Inside a leaf the most similar cluster wins when its
//! similarity (share of positions with equal constant tokens) reaches the
//! threshold, and its template is generalised position by position.

use std::collections::HashMap;

use super::{is_wildcard, join_tokens, tokenize, LogParser};
use crate::PLACEHOLDER;

#[derive(Debug, Clone)]
pub struct Drain {
    /// Number of token levels below the length level, plus one.
    depth: usize,
    similarity_threshold: f64,
    max_children: usize,
}

impl Drain {
    /// `depth` counts the root and length levels, as in the usual
    /// parameterisation (default 4, i.e. one token level).
    pub fn new(depth: usize, similarity_threshold: f64, max_children: usize) -> Self {
        Drain {
            depth: depth.saturating_sub(2).max(1),
            similarity_threshold,
            max_children: max_children.max(1),
        }
    }
}

impl Default for Drain {
    fn default() -> Self {
        Drain::new(4, 0.4, 100)
    }
}

#[derive(Debug, Default)]
struct Node {
    children: HashMap<String, usize>,
    clusters: Vec<usize>,
}

struct Tree<'a> {
    cfg: &'a Drain,
    nodes: Vec<Node>,
    by_length: HashMap<usize, usize>,
    clusters: Vec<Vec<String>>,
}

fn has_digit(token: &str) -> bool {
    token.bytes().any(|b| b.is_ascii_digit())
}

impl<'a> Tree<'a> {
    fn new(cfg: &'a Drain) -> Self {
        Tree {
            cfg,
            nodes: Vec::new(),
            by_length: HashMap::new(),
            clusters: Vec::new(),
        }
    }

    fn new_node(&mut self) -> usize {
        self.nodes.push(Node::default());
        self.nodes.len() - 1
    }

    fn add_child(&mut self, parent: usize, key: &str) -> usize {
        let child = self.new_node();
        self.nodes[parent].children.insert(key.to_string(), child);
        child
    }

    fn search(&self, seq: &[&str]) -> Option<usize> {
        let mut node = *self.by_length.get(&seq.len())?;
        for (depth, token) in (1..).zip(seq) {
            if depth >= self.cfg.depth || depth > seq.len() {
                break;
            }
            let children = &self.nodes[node].children;
            node = match children.get(*token).or_else(|| children.get(PLACEHOLDER)) {
                Some(&n) => n,
                None => return None,
            };
        }
        self.fast_match(&self.nodes[node].clusters, seq)
    }

    fn fast_match(&self, candidates: &[usize], seq: &[&str]) -> Option<usize> {
        let mut best = None;
        let mut best_sim = -1.0;
        let mut best_params = -1i64;
        for &id in candidates {
            let (sim, params) = similarity(&self.clusters[id], seq);
            if sim > best_sim || (sim == best_sim && params > best_params) {
                best_sim = sim;
                best_params = params;
                best = Some(id);
            }
        }
        best.filter(|_| best_sim >= self.cfg.similarity_threshold)
    }

    fn insert(&mut self, id: usize) {
        let template = self.clusters[id].clone();
        let len = template.len();
        let mut node = match self.by_length.get(&len) {
            Some(&n) => n,
            None => {
                let n = self.new_node();
                self.by_length.insert(len, n);
                n
            }
        };
        let max = self.cfg.max_children;
        for (depth, token) in (1..).zip(&template) {
            if depth >= self.cfg.depth || depth > len {
                break;
            }
            let existing = self.nodes[node].children.get(token.as_str()).copied();
            node = match existing {
                Some(child) => child,
                None => {
                    let wildcard = self.nodes[node].children.get(PLACEHOLDER).copied();
                    let count = self.nodes[node].children.len();
                    if has_digit(token) {
                        match wildcard {
                            Some(w) => w,
                            None => self.add_child(node, PLACEHOLDER),
                        }
                    } else if let Some(w) = wildcard {
                        if count < max {
                            self.add_child(node, token)
                        } else {
                            w
                        }
                    } else if count + 1 < max {
                        self.add_child(node, token)
                    } else {
                        self.add_child(node, PLACEHOLDER)
                    }
                }
            };
        }
        self.nodes[node].clusters.push(id);
    }
}

/// Share of positions where the template has the same constant token, and
/// the number of wildcard positions in the template.
fn similarity(template: &[String], seq: &[&str]) -> (f64, i64) {
    if template.is_empty() {
        return (1.0, 0);
    }
    let mut same = 0usize;
    let mut params = 0i64;
    for (t, s) in template.iter().zip(seq) {
        if is_wildcard(t) {
            params += 1;
        } else if t == s {
            same += 1;
        }
    }
    (same as f64 / template.len() as f64, params)
}

impl LogParser for Drain {
    fn templates(&self, lines: &[&str]) -> Vec<String> {
        let mut tree = Tree::new(self);
        let mut assignment = Vec::with_capacity(lines.len());
        for line in lines {
            let seq = tokenize(line);
            let id = match tree.search(&seq) {
                Some(id) => {
                    for (t, s) in tree.clusters[id].iter_mut().zip(&seq) {
                        if t != s {
                            *t = PLACEHOLDER.to_string();
                        }
                    }
                    id
                }
                None => {
                    tree.clusters
                        .push(seq.iter().map(|s| s.to_string()).collect());
                    let id = tree.clusters.len() - 1;
                    tree.insert(id);
                    id
                }
            };
            assignment.push(id);
        }
        let joined: Vec<String> = tree.clusters.iter().map(|c| join_tokens(c)).collect();
        assignment
            .into_iter()
            .map(|id| joined[id].clone())
            .collect()
    }
}
