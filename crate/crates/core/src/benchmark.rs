//! Built-in rule sets and dataset settings from the Loghub benchmark.
//!
//! `loghub_legacy_catalog` is the de-duplicated union of the per-dataset
//! preprocessing regexes shipped with the benchmark's Drain settings;
//! `domain_catalog` returns the regexes a single dataset ships with.

use crate::masker::{Category, MaskRule, RuleCatalog};
use crate::{Error, Result};

/// The fourteen systems with corrected ground truth.
pub const DATASETS: [&str; 14] = [
    "HDFS",
    "Hadoop",
    "Spark",
    "Zookeeper",
    "BGL",
    "HPC",
    "Thunderbird",
    "Linux",
    "HealthApp",
    "Apache",
    "Proxifier",
    "OpenSSH",
    "OpenStack",
    "Mac",
];

const HEX_OR_INT: &str = r"\b(\-?\+?\d+)\b|\b0[Xx][a-fA-F\d]+\b|\b[a-fA-F\d]{4,}\b";
const DURATION: &str = r"<\d+\ssec";
const BLOCK: &str = r"blk_-?\d+";
const IPV4: &str = r"(/|)(\d+\.){3}\d+";
const SIZE_UNIT: &str = r"\b[KGTM]?B\b";
const PACKAGE: &str = r"([\w-]+\.){2,}[\w-]+(:\d+)?";
const CORE: &str = r"core\.\d+";
const ASSIGNED: &str = r"=\d+";
const TIME: &str = r"\d{2}:\d{2}(:\d{2})*";
const PATH: &str = r"(/.+?\s|(/[\w-]+)+)";

/// The ten de-duplicated benchmark regexes, all enabled, specific shapes
/// first and the generic hexadecimal/integer rule last.
pub fn loghub_legacy_catalog() -> RuleCatalog {
    use Category::*;
    let rules = vec![
        MaskRule::new("block_id", BlockId, BLOCK, 10),
        MaskRule::new("core_id", CoreId, CORE, 20),
        MaskRule::new("time_duration", TimeDuration, DURATION, 30),
        MaskRule::new("ipv4", Ipv4, IPV4, 40),
        MaskRule::new("package_or_domain", PackageOrDomain, PACKAGE, 50),
        MaskRule::new("path", Path, PATH, 60),
        MaskRule::new("time", Time, TIME, 70),
        MaskRule::new("memory_size", MemorySize, SIZE_UNIT, 80),
        MaskRule::new("assigned_value", AssignedValue, ASSIGNED, 90),
        MaskRule::new("hex_or_integer", HexOrInteger, HEX_OR_INT, 100),
    ];
    RuleCatalog::new(rules, "loghub-legacy").expect("legacy catalog is valid")
}

/// The preprocessing regexes a dataset ships with, in their listed order.
pub fn domain_catalog(dataset: &str) -> Result<RuleCatalog> {
    use Category::*;
    let specs: &[(&str, Category, &str)] = match canonical(dataset)? {
        "HDFS" => &[
            ("block_id", BlockId, BLOCK),
            ("ipv4", Ipv4, r"(\d+\.){3}\d+(:\d+)?"),
        ],
        "Hadoop" => &[("ipv4", Ipv4, r"(\d+\.){3}\d+")],
        "Spark" => &[
            ("ipv4", Ipv4, r"(\d+\.){3}\d+"),
            ("memory_size", MemorySize, SIZE_UNIT),
            (
                "package_or_domain",
                PackageOrDomain,
                r"([\w-]+\.){2,}[\w-]+",
            ),
        ],
        "Zookeeper" => &[("ipv4", Ipv4, r"(/|)(\d+\.){3}\d+(:\d+)?")],
        "BGL" => &[("core_id", CoreId, CORE)],
        "HPC" => &[("assigned_value", AssignedValue, ASSIGNED)],
        "Thunderbird" => &[("ipv4", Ipv4, r"(\d+\.){3}\d+")],
        "Linux" => &[
            ("ipv4", Ipv4, r"(\d+\.){3}\d+"),
            ("time", Time, r"\d{2}:\d{2}:\d{2}"),
        ],
        "HealthApp" => &[],
        "Apache" => &[("ipv4", Ipv4, r"(\d+\.){3}\d+")],
        "Proxifier" => &[
            ("time_duration", TimeDuration, DURATION),
            (
                "package_or_domain",
                PackageOrDomain,
                r"([\w-]+\.)+[\w-]+(:\d+)?",
            ),
            ("time", Time, TIME),
            ("memory_size", MemorySize, r"[KGTM]B"),
        ],
        "OpenSSH" => &[
            ("ipv4", Ipv4, r"(\d+\.){3}\d+"),
            (
                "package_or_domain",
                PackageOrDomain,
                r"([\w-]+\.){2,}[\w-]+",
            ),
        ],
        "OpenStack" => &[
            ("ipv4_list", Ipv4, r"((\d+\.){3}\d+,?)+"),
            ("path", Path, r"/.+?\s"),
            ("integer", HexOrInteger, r"\d+"),
        ],
        "Mac" => &[(
            "package_or_domain",
            PackageOrDomain,
            r"([\w-]+\.){2,}[\w-]+",
        )],
        _ => unreachable!(),
    };
    let rules = specs
        .iter()
        .enumerate()
        .map(|(i, (name, cat, pattern))| MaskRule::new(name, *cat, pattern, (i as u32 + 1) * 10))
        .collect();
    RuleCatalog::new(rules, format!("domain:{}", canonical(dataset)?))
}

/// Header format of each dataset's raw log.
pub fn log_format(dataset: &str) -> Result<&'static str> {
    Ok(match canonical(dataset)? {
        "HDFS" => "<Date> <Time> <Pid> <Level> <Component>: <Content>",
        "Hadoop" => "<Date> <Time> <Level> [<Process>] <Component>: <Content>",
        "Spark" => "<Date> <Time> <Level> <Component>: <Content>",
        "Zookeeper" => "<Date> <Time> - <Level> [<Node>:<Component>@<Id>] - <Content>",
        "BGL" => "<Label> <Timestamp> <Date> <Node> <Time> <NodeRepeat> <Type> <Component> <Level> <Content>",
        "HPC" => "<LogId> <Node> <Component> <State> <Time> <Flag> <Content>",
        "Thunderbird" => "<Label> <Timestamp> <Date> <User> <Month> <Day> <Time> <Location> <Component>: <Content>",
        "Linux" => "<Month> <Date> <Time> <Level> <Component>: <Content>",
        "HealthApp" => "<Time>|<Component>|<Pid>|<Content>",
        "Apache" => "[<Time>] [<Level>] <Content>",
        "Proxifier" => "[<Time>] <Program> - <Content>",
        "OpenSSH" => "<Date> <Day> <Time> <Component> sshd[<Pid>]: <Content>",
        "OpenStack" => "<Logrecord> <Date> <Time> <Pid> <Level> <Component> [<ADDR>] <Content>",
        "Mac" => "<Month> <Date> <Time> <User> <Component>: <Content>",
        _ => unreachable!(),
    })
}

fn canonical(dataset: &str) -> Result<&'static str> {
    DATASETS
        .iter()
        .find(|d| d.eq_ignore_ascii_case(dataset))
        .copied()
        .ok_or_else(|| Error::Config(format!("unknown dataset `{dataset}`")))
}

/// Values reported for the benchmark, used by the data-backed acceptance
/// checks. Each row: dataset, domain-knowledge (P, R), all regexes (P, R).
pub type MatchRow = (&'static str, (f64, f64), (f64, f64));

pub const MATCH_TABLE: [MatchRow; 14] = [
    ("HDFS", (0.547, 0.349), (0.834, 0.942)),
    ("Hadoop", (0.998, 0.086), (0.378, 0.378)),
    ("Spark", (0.000, 0.000), (0.427, 0.540)),
    ("Zookeeper", (0.000, 0.000), (0.979, 0.973)),
    ("BGL", (0.000, 0.000), (0.923, 0.947)),
    ("HPC", (0.000, 0.000), (0.838, 0.795)),
    ("Thunderbird", (1.000, 0.205), (0.834, 0.565)),
    ("Linux", (0.564, 0.178), (0.397, 0.376)),
    ("HealthApp", (0.000, 0.000), (0.700, 0.929)),
    ("Apache", (1.000, 0.011), (0.787, 0.787)),
    ("Proxifier", (0.332, 0.193), (0.656, 0.709)),
    ("OpenSSH", (0.994, 0.346), (0.874, 0.725)),
    ("OpenStack", (0.201, 0.495), (0.201, 0.473)),
    ("Mac", (0.249, 0.026), (0.452, 0.554)),
];
