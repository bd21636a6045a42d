#![allow(dead_code)]

use logprep::corpus::{GroundTruthEntry, LogRecord};
use rand::seq::SliceRandom;
use rand::Rng;

/// Kinds of variable value the default catalog masks as one token.
#[derive(Debug, Clone, Copy)]
pub enum Kind {
    Int,
    Ipv4,
    Ipv4Port,
    Hex,
    Time,
    Path,
    Size,
    Duration,
    Float,
    Mac,
}

const KINDS: [Kind; 10] = [
    Kind::Int,
    Kind::Ipv4,
    Kind::Ipv4Port,
    Kind::Hex,
    Kind::Time,
    Kind::Path,
    Kind::Size,
    Kind::Duration,
    Kind::Float,
    Kind::Mac,
];

pub const FIRST_WORDS: [&str; 24] = [
    "alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel", "india", "juliet",
    "kilo", "lima", "mike", "november", "oscar", "papa", "quebec", "romeo", "sierra", "tango",
    "uniform", "victor", "whiskey", "yankee",
];

pub const WORDS: [&str; 20] = [
    "connection",
    "closed",
    "request",
    "handler",
    "worker",
    "queue",
    "started",
    "stopped",
    "error",
    "ready",
    "pool",
    "session",
    "client",
    "server",
    "cache",
    "flush",
    "retry",
    "reading",
    "from",
    "to",
];

pub fn value<R: Rng>(rng: &mut R, kind: Kind) -> String {
    match kind {
        Kind::Int => rng.random_range(0..100_000u32).to_string(),
        Kind::Ipv4 => format!(
            "{}.{}.{}.{}",
            rng.random_range(1..255u8),
            rng.random_range(0..255u8),
            rng.random_range(0..255u8),
            rng.random_range(1..255u8)
        ),
        Kind::Ipv4Port => format!(
            "10.{}.{}.{}:{}",
            rng.random_range(0..255u8),
            rng.random_range(0..255u8),
            rng.random_range(1..255u8),
            rng.random_range(1..65535u32)
        ),
        Kind::Hex => format!("0x{:x}", rng.random_range(0x100..0xff_ffffu32)),
        Kind::Time => format!(
            "{:02}:{:02}:{:02}",
            rng.random_range(0..24u8),
            rng.random_range(0..60u8),
            rng.random_range(0..60u8)
        ),
        Kind::Path => {
            let parts = ["var", "log", "opt", "data", "tmp", "etc", "srv"];
            let n = rng.random_range(1..4);
            let mut p = String::new();
            for _ in 0..n {
                p.push('/');
                p.push_str(parts[rng.random_range(0..parts.len())]);
            }
            format!("{p}/f{}", rng.random_range(0..1000u32))
        }
        Kind::Size => format!(
            "{}{}",
            rng.random_range(1..9999u32),
            ["KB", "MB", "GB"][rng.random_range(0..3)]
        ),
        Kind::Duration => format!("{}ms", rng.random_range(1..99_999u32)),
        Kind::Float => format!(
            "{}.{}",
            rng.random_range(0..1000u32),
            rng.random_range(1..999_999u32)
        ),
        Kind::Mac => (0..6)
            .map(|_| format!("{:02x}", rng.random_range(0..=255u8)))
            .collect::<Vec<_>>()
            .join(":"),
    }
}

#[derive(Debug, Clone)]
pub enum Tok {
    Const(&'static str),
    Var(Kind),
}

#[derive(Debug, Clone)]
pub struct GenTemplate {
    pub tokens: Vec<Tok>,
}

impl GenTemplate {
    pub fn template(&self) -> String {
        self.tokens
            .iter()
            .map(|t| match t {
                Tok::Const(w) => *w,
                Tok::Var(_) => "<*>",
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn instantiate<R: Rng>(&self, rng: &mut R) -> String {
        self.tokens
            .iter()
            .map(|t| match t {
                Tok::Const(w) => w.to_string(),
                Tok::Var(k) => value(rng, *k),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A template starting with `first`, then `consts` constant words and
/// `vars` variables in random order.
pub fn gen_template<R: Rng>(
    rng: &mut R,
    first: &'static str,
    vars: usize,
    consts: usize,
) -> GenTemplate {
    let mut rest: Vec<Tok> = Vec::with_capacity(consts + vars);
    for _ in 0..consts {
        rest.push(Tok::Const(WORDS[rng.random_range(0..WORDS.len())]));
    }
    for _ in 0..vars {
        rest.push(Tok::Var(KINDS[rng.random_range(0..KINDS.len())]));
    }
    rest.shuffle(rng);
    let mut tokens = vec![Tok::Const(first)];
    tokens.extend(rest);
    GenTemplate { tokens }
}

#[derive(Debug, Clone, Default)]
pub struct Generated {
    pub records: Vec<LogRecord>,
    pub truth: Vec<GroundTruthEntry>,
}

/// Messages for each template, interleaved, with line ids from 1.
pub fn corpus<R: Rng>(
    rng: &mut R,
    templates: &[GenTemplate],
    per_template: std::ops::RangeInclusive<usize>,
) -> Generated {
    let mut rows = Vec::new();
    for t in templates {
        let n = rng.random_range(per_template.clone());
        for _ in 0..n {
            rows.push((t.instantiate(rng), t.template()));
        }
    }
    rows.shuffle(rng);
    let mut out = Generated::default();
    for (i, (content, template)) in rows.into_iter().enumerate() {
        let id = i as u64 + 1;
        out.records
            .push(LogRecord::from_content(id, content.clone()));
        out.truth.push(GroundTruthEntry::new(id, content, template));
    }
    out
}

/// Several templates, each with at least five variables.
pub fn variable_heavy<R: Rng>(rng: &mut R) -> Generated {
    let n = rng.random_range(3..=8);
    let templates: Vec<GenTemplate> = FIRST_WORDS[..n]
        .iter()
        .map(|first| {
            let vars = rng.random_range(5..=7);
            let consts = rng.random_range(1..=3);
            gen_template(rng, first, vars, consts)
        })
        .collect();
    corpus(rng, &templates, 3..=12)
}

/// Templates in all three complexity bands: at least one without
/// variables and one with five or more.
pub fn mixed_complexity<R: Rng>(rng: &mut R) -> Generated {
    let n = rng.random_range(4..=10);
    let templates: Vec<GenTemplate> = FIRST_WORDS[..n]
        .iter()
        .enumerate()
        .map(|(i, first)| {
            let vars = match i {
                0 => 0,
                1 => rng.random_range(5..=7),
                2 => rng.random_range(1..=4),
                _ => [0, rng.random_range(1..=4), rng.random_range(5..=7)][rng.random_range(0..3)],
            };
            let consts = rng.random_range(1..=4);
            gen_template(rng, first, vars, consts)
        })
        .collect();
    corpus(rng, &templates, 2..=10)
}

/// Brute-force reference for the four metrics.
pub fn oracle(truth: &[String], pred: &[String]) -> [f64; 4] {
    let n = truth.len();
    let norm = |s: &String| s.split_whitespace().collect::<Vec<_>>().join(" ");
    let t: Vec<String> = truth.iter().map(norm).collect();
    let members = |labels: &[String], i: usize| -> Vec<usize> {
        (0..n).filter(|&j| labels[j] == labels[i]).collect()
    };

    let ga_hits = (0..n)
        .filter(|&i| members(pred, i) == members(&t, i))
        .count();
    let pa_hits = (0..n).filter(|&i| norm(&pred[i]) == t[i]).count();

    let mut pred_groups: Vec<(String, Vec<usize>)> = Vec::new();
    for i in 0..n {
        if !pred_groups.iter().any(|(s, _)| *s == pred[i]) {
            pred_groups.push((pred[i].clone(), members(pred, i)));
        }
    }
    let mut truth_groups: Vec<(String, Vec<usize>)> = Vec::new();
    for i in 0..n {
        if !truth_groups.iter().any(|(s, _)| *s == t[i]) {
            truth_groups.push((t[i].clone(), members(&t, i)));
        }
    }
    let group_hits = pred_groups
        .iter()
        .filter(|(_, m)| truth_groups.iter().any(|(_, tm)| tm == m))
        .count();
    let template_hits = pred_groups
        .iter()
        .filter(|(s, m)| {
            truth_groups
                .iter()
                .any(|(ts, tm)| tm == m && *ts == norm(s))
        })
        .count();
    let f1 = |hits: usize| {
        let p = hits as f64 / pred_groups.len() as f64;
        let r = hits as f64 / truth_groups.len() as f64;
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    };
    [
        ga_hits as f64 / n as f64,
        pa_hits as f64 / n as f64,
        f1(group_hits),
        f1(template_hits),
    ]
}
