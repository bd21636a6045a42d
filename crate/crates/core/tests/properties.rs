mod common;

use std::collections::{BTreeSet, HashMap};
use std::sync::OnceLock;

use logprep::corpus::{GroundTruthEntry, LogRecord};
use logprep::masker::{
    apply_masks, default_catalog, mask_with_spans, match_statistics, Category, MaskRule,
    RuleCatalog,
};
use logprep::metrics::{self, complexity_subgroups, SubgroupSpec};
use logprep::parsers::{self, ParseOutcome, ParserConfig, Preprocessing};
use proptest::prelude::*;
use proptest::sample::select;

fn token() -> impl Strategy<Value = String> {
    prop_oneof![
        select(vec![
            "open", "from", "user", "to", "failed", "May", "Mon", "sec", "ms", "=", "<*>", "*",
            "-", ":", "/"
        ])
        .prop_map(str::to_string),
        "[a-f0-9]{1,6}",
        "[a-z]{1,5}[0-9]{0,3}",
        (0u8..255, 0u8..255, 0u8..255, 0u8..255)
            .prop_map(|(a, b, c, d)| format!("{a}.{b}.{c}.{d}")),
        "(/[a-z]{1,4}){1,3}",
        "[a-z]{1,4}=[0-9]{1,3}",
        "[0-9]{1,2}:[0-9]{2}(:[0-9]{2})?",
        "([0-9a-f]{2}:){5}[0-9a-f]{2}",
        "[0-9]{1,4}(ms|MB| sec|KB)",
        "[a-z]{2,5}\\.[a-z]{2,5}\\.[a-z]{2,4}",
    ]
}

fn message() -> impl Strategy<Value = String> {
    prop::collection::vec(token(), 0..8).prop_map(|t| t.join(" "))
}

fn words() -> impl Strategy<Value = String> {
    prop::collection::vec(select(vec!["a", "b", "c", "x1", "x2", "<*>", "7"]), 0..5)
        .prop_map(|t| t.join(" "))
}

fn records(lines: &[String]) -> Vec<LogRecord> {
    lines
        .iter()
        .enumerate()
        .map(|(i, l)| LogRecord::from_content(i as u64 + 1, l.clone()))
        .collect()
}

fn catalog() -> &'static RuleCatalog {
    static CATALOG: OnceLock<RuleCatalog> = OnceLock::new();
    CATALOG.get_or_init(default_catalog)
}

fn parser_config() -> impl Strategy<Value = ParserConfig> {
    prop_oneof![
        (3usize..6, 0.1f64..=1.0, 1usize..5).prop_map(|(d, st, mc)| ParserConfig {
            drain_depth: d,
            drain_similarity_threshold: st,
            drain_max_children: mc,
            ..ParserConfig::default()
        }),
        Just(ParserConfig::lfa()),
    ]
}

proptest! {
    #[test]
    fn masking_is_idempotent(msg in message()) {
        let cat = catalog();
        let once = apply_masks(&msg, cat);
        prop_assert_eq!(apply_masks(&once, cat), once);
    }

    #[test]
    fn disabled_rules_never_match(msg in message(), disable in prop::collection::vec(any::<bool>(), 17)) {
        let mut cat = catalog().clone();
        let names: Vec<String> = cat.rules().iter().map(|r| r.name.clone()).collect();
        for (name, off) in names.iter().zip(&disable) {
            if *off {
                cat = cat.with_enabled(name, false).unwrap();
            }
        }
        for span in mask_with_spans(&msg, &cat).spans {
            prop_assert!(cat.rules()[span.rule].enabled);
        }
    }

    #[test]
    fn match_ratios_are_bounded_and_appending_rules_never_lowers_recall(
        values in prop::collection::vec(token(), 1..6),
        extra in select(vec![r"\S+", r"[a-z]+", r"\d+", r"[^ ]*=[^ ]*"]),
    ) {
        let content = values.iter().map(|v| format!("k {v}")).collect::<Vec<_>>().join(" ");
        let template = values.iter().map(|_| "k <*>").collect::<Vec<_>>().join(" ");
        let entry = GroundTruthEntry::new(1, content, template);
        prop_assume!(!entry.extraction_failed);
        let cat = catalog();
        let before = match_statistics(std::slice::from_ref(&entry), cat).dataset;
        let mut rules = cat.rules().to_vec();
        rules.push(MaskRule::new("extra", Category::HexOrInteger, extra, 10_000));
        let after = match_statistics(std::slice::from_ref(&entry), &RuleCatalog::new(rules, "x").unwrap()).dataset;
        for v in [before.precision, before.recall, after.precision, after.recall] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        prop_assert!(after.recall >= before.recall);
        let empty = match_statistics(std::slice::from_ref(&entry), &RuleCatalog::empty()).dataset;
        prop_assert_eq!(empty.recall, 0.0);
    }

    #[test]
    fn outcomes_partition_the_input(lines in prop::collection::vec(words(), 0..25), cfg in parser_config()) {
        let outcome = parsers::parse_with_preprocessing(&records(&lines), catalog(), Preprocessing::default(), &cfg).unwrap();
        let mut seen: Vec<u64> = outcome.groups.values().flatten().copied().collect();
        seen.sort_unstable();
        let expected: Vec<u64> = (1..=lines.len() as u64).collect();
        prop_assert_eq!(seen, expected);
        for (id, template) in &outcome.lines {
            prop_assert!(outcome.groups[template].contains(id));
        }
    }

    #[test]
    fn drain_never_mixes_lengths(lines in prop::collection::vec(words(), 0..25)) {
        let outcome = parsers::parse(&records(&lines).iter().map(|r| (r.line_id, r.content.clone())).collect::<Vec<_>>(), &ParserConfig::default()).unwrap();
        for ids in outcome.groups.values() {
            let lens: BTreeSet<usize> = ids.iter().map(|id| lines[*id as usize - 1].split_whitespace().count()).collect();
            prop_assert_eq!(lens.len(), 1);
        }
    }

    #[test]
    fn drain_with_unit_threshold_groups_only_identical_lines(lines in prop::collection::vec(words(), 0..25)) {
        let cfg = ParserConfig { drain_similarity_threshold: 1.0, ..ParserConfig::default() };
        let contents: Vec<(u64, String)> = records(&lines).into_iter().map(|r| (r.line_id, r.content)).collect();
        let outcome = parsers::parse(&contents, &cfg).unwrap();
        for ids in outcome.groups.values() {
            let distinct: BTreeSet<Vec<&str>> = ids.iter().map(|id| lines[*id as usize - 1].split_whitespace().collect()).collect();
            prop_assert_eq!(distinct.len(), 1);
        }
    }

    #[test]
    fn lfa_ignores_input_order(lines in prop::collection::vec(words(), 1..20), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let cfg = ParserConfig::lfa();
        let contents: Vec<(u64, String)> = records(&lines).into_iter().map(|r| (r.line_id, r.content)).collect();
        let mut shuffled = contents.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let a = parsers::parse(&contents, &cfg).unwrap();
        let b = parsers::parse(&shuffled, &cfg).unwrap();
        prop_assert_eq!(a.groups, b.groups);
    }

    #[test]
    fn disabled_catalog_is_plain_parsing(lines in prop::collection::vec(message(), 0..15), cfg in parser_config()) {
        let recs = records(&lines);
        let pre = parsers::parse_with_preprocessing(&recs, &catalog().all_disabled(), Preprocessing::default(), &cfg).unwrap();
        let contents: Vec<(u64, String)> = recs.into_iter().map(|r| (r.line_id, r.content)).collect();
        let plain = parsers::parse(&contents, &cfg).unwrap();
        prop_assert_eq!(pre.lines, plain.lines);
    }

    #[test]
    fn metrics_match_brute_force(
        rows in prop::collection::vec((0usize..4, 0usize..6), 1..=10),
    ) {
        const TRUTH: [&str; 4] = ["a <*>", "b", "c <*> d", "<*>"];
        const PRED: [&str; 6] = ["a <*>", "b", "c <*> d", "<*>", "a  <*>", "z"];
        let truth_t: Vec<String> = rows.iter().map(|(t, _)| TRUTH[*t].to_string()).collect();
        let pred_t: Vec<String> = rows.iter().map(|(_, p)| PRED[*p].to_string()).collect();
        let truth = truth_entries(&truth_t);
        let pred = ParseOutcome::from_templates(pred_t.iter().enumerate().map(|(i, t)| (i as u64 + 1, t.clone())).collect());
        let r = metrics::evaluate(&pred, &truth).unwrap();
        prop_assert_eq!([r.ga, r.pa, r.fga, r.fta], common::oracle(&truth_t, &pred_t));
    }

    #[test]
    fn metrics_ignore_line_order_and_key_names(
        rows in prop::collection::vec((0usize..3, 0usize..3), 1..=12),
        seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let truth_t: Vec<String> = rows.iter().map(|(t, _)| format!("t{t} <*>")).collect();
        let truth = truth_entries(&truth_t);
        let lines: Vec<(u64, String)> = rows.iter().enumerate().map(|(i, (_, p))| (i as u64 + 1, format!("t{p} <*>"))).collect();
        let base = metrics::evaluate(&ParseOutcome::from_templates(lines.clone()), &truth).unwrap();

        let mut shuffled = lines.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let mut truth_shuffled = truth.clone();
        truth_shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 1));
        let permuted = metrics::evaluate(&ParseOutcome::from_templates(shuffled), &truth_shuffled).unwrap();
        prop_assert_eq!(base.scores(), permuted.scores());

        let renamed: Vec<(u64, String)> = lines.iter().map(|(id, t)| (*id, format!("renamed {t}"))).collect();
        let r = metrics::evaluate(&ParseOutcome::from_templates(renamed), &truth).unwrap();
        prop_assert_eq!(r.ga, base.ga);
        prop_assert_eq!(r.fga, base.fga);
        prop_assert_eq!(r.pa, 0.0);
        prop_assert_eq!(r.fta, 0.0);
    }

    #[test]
    fn complexity_bands_cover_every_message(ps in prop::collection::vec(0usize..8, 1..20)) {
        let templates: Vec<String> = ps.iter().map(|p| {
            let mut t = vec!["w"];
            t.extend(std::iter::repeat_n("<*>", *p));
            t.join(" ")
        }).collect();
        let truth = truth_entries(&templates);
        let bands = complexity_subgroups(&truth);
        let band_of: HashMap<&String, usize> = bands.values().enumerate().flat_map(|(i, ts)| ts.iter().map(move |t| (t, i))).collect();
        for t in &templates {
            prop_assert!(band_of.contains_key(t));
        }
        let pred = ParseOutcome::from_templates(truth.iter().map(|e| (e.line_id, e.template.clone())).collect());
        let report = metrics::evaluate_with_subgroups(&pred, &truth, &SubgroupSpec::complexity()).unwrap();
        let total: usize = report.subgroup_breakdowns.values().map(|s| s.counts.messages).sum();
        prop_assert_eq!(total, truth.len());
    }
}

fn truth_entries(templates: &[String]) -> Vec<GroundTruthEntry> {
    templates
        .iter()
        .enumerate()
        .map(|(i, t)| GroundTruthEntry {
            line_id: i as u64 + 1,
            content: String::new(),
            template: t.clone(),
            variables: vec![],
            extraction_failed: false,
        })
        .collect()
}

#[test]
fn generated_values_mask_to_one_placeholder() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let cat = catalog();
    for _ in 0..20 {
        let g = common::variable_heavy(&mut rng);
        for (rec, truth) in g.records.iter().zip(&g.truth) {
            assert_eq!(apply_masks(&rec.content, cat), truth.template);
        }
    }
}
