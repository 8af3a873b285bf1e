//! System configurations: the occupied node set (plus expanded pairs), run
//! parameters, the `amoebot-config v1` text format, and the shape generators
//! used by tests and benchmarks.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::grid::NodeCoord;

pub const CONFIG_HEADER: &str = "amoebot-config v1";
pub const DEFAULT_RADIX: u32 = 256;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VariantFlags {
    /// Run the parallel coin-exchange election alongside the base algorithm.
    pub almost_sure: bool,
    /// Broadcast a termination message once a leader is declared.
    pub termination_broadcast: bool,
}

/// A particle system plus the run parameters a simulation needs.
///
/// `occupied` holds every occupied node; an expanded particle contributes
/// both of its nodes to `occupied` and the pair to `expanded_pairs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemConfiguration {
    pub occupied: Vec<NodeCoord>,
    pub expanded_pairs: Vec<(NodeCoord, NodeCoord)>,
    pub seed: u64,
    pub radix: u32,
    pub flags: VariantFlags,
    /// Whether expanded pairs may be simulated (two virtual contracted
    /// particles per pair). Rejected by `validate` if pairs are present
    /// without it.
    pub expanded_enabled: bool,
}

impl SystemConfiguration {
    pub fn from_nodes(nodes: Vec<NodeCoord>) -> Self {
        SystemConfiguration {
            occupied: dedup_sorted(nodes),
            expanded_pairs: Vec::new(),
            seed: 0,
            radix: DEFAULT_RADIX,
            flags: VariantFlags::default(),
            expanded_enabled: false,
        }
    }

    pub fn len(&self) -> usize {
        self.occupied.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupied.is_empty()
    }

    pub fn occupied_set(&self) -> HashSet<NodeCoord> {
        self.occupied.iter().copied().collect()
    }
}

fn dedup_sorted(mut nodes: Vec<NodeCoord>) -> Vec<NodeCoord> {
    nodes.sort();
    nodes.dedup();
    nodes
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: duplicate node {node}")]
    DuplicateNode { line: usize, node: NodeCoord },
    #[error("configuration is empty")]
    Empty,
    #[error("occupied nodes do not form a connected system")]
    Disconnected,
    #[error("bad expanded pair {0} {1}: {2}")]
    BadExpandedPair(NodeCoord, NodeCoord, &'static str),
    #[error("expanded pairs present but expanded simulation not enabled")]
    ExpandedNotEnabled,
    #[error("radix {0} below 2")]
    RadixTooSmall(u32),
    #[error("invalid shape parameters: {0}")]
    InvalidShapeParams(String),
}

/// Parses the `amoebot-config v1` text format.
///
/// Non-geometry parameters (seed, radix, flags) take their defaults; callers
/// override them afterwards. Errors carry 1-based line numbers.
pub fn parse(text: &str) -> Result<SystemConfiguration, ConfigError> {
    let mut lines = text.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((no, raw)) => {
                let stripped = strip_comment(raw).trim();
                if stripped.is_empty() {
                    continue;
                }
                break (no + 1, stripped.to_string());
            }
            None => {
                return Err(ConfigError::Syntax {
                    line: 1,
                    message: "missing header".into(),
                })
            }
        }
    };
    if header.1 != CONFIG_HEADER {
        return Err(ConfigError::Syntax {
            line: header.0,
            message: format!("expected `{CONFIG_HEADER}`, found `{}`", header.1),
        });
    }

    let mut seen: HashMap<NodeCoord, usize> = HashMap::new();
    let mut occupied = Vec::new();
    let mut pairs = Vec::new();
    for (no, raw) in lines {
        let line = no + 1;
        let stripped = strip_comment(raw).trim().to_string();
        if stripped.is_empty() {
            continue;
        }
        let fields: Vec<&str> = stripped.split_whitespace().collect();
        let ints: Result<Vec<i32>, _> = fields.iter().map(|f| f.parse::<i32>()).collect();
        let ints = ints.map_err(|e| ConfigError::Syntax {
            line,
            message: format!("expected integers: {e}"),
        })?;
        let nodes: Vec<NodeCoord> = match ints.len() {
            2 => vec![NodeCoord::new(ints[0], ints[1])],
            4 => vec![
                NodeCoord::new(ints[0], ints[1]),
                NodeCoord::new(ints[2], ints[3]),
            ],
            n => {
                return Err(ConfigError::Syntax {
                    line,
                    message: format!("expected 2 or 4 integers, found {n}"),
                })
            }
        };
        for node in &nodes {
            if seen.insert(*node, line).is_some() {
                return Err(ConfigError::DuplicateNode { line, node: *node });
            }
            occupied.push(*node);
        }
        if nodes.len() == 2 {
            let (a, b) = (nodes[0], nodes[1]);
            if a.distance(b) != 1 {
                return Err(ConfigError::BadExpandedPair(a, b, "nodes not adjacent"));
            }
            pairs.push(if a <= b { (a, b) } else { (b, a) });
        }
    }

    let mut cfg = SystemConfiguration::from_nodes(occupied);
    cfg.expanded_pairs = pairs;
    cfg.expanded_pairs.sort();
    if cfg.is_empty() {
        return Err(ConfigError::Empty);
    }
    check_connected(&cfg)?;
    Ok(cfg)
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Canonical text form; `parse(serialize(c))` reproduces the geometry.
pub fn serialize(cfg: &SystemConfiguration) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{CONFIG_HEADER}");
    let in_pair: HashSet<NodeCoord> = cfg
        .expanded_pairs
        .iter()
        .flat_map(|(a, b)| [*a, *b])
        .collect();
    for (a, b) in &cfg.expanded_pairs {
        let _ = writeln!(out, "{} {} {} {}", a.x, a.y, b.x, b.y);
    }
    for node in &cfg.occupied {
        if !in_pair.contains(node) {
            let _ = writeln!(out, "{} {}", node.x, node.y);
        }
    }
    out
}

fn check_connected(cfg: &SystemConfiguration) -> Result<(), ConfigError> {
    if cfg.is_empty() {
        return Err(ConfigError::Empty);
    }
    let set = cfg.occupied_set();
    let mut visited = HashSet::new();
    let mut queue = VecDeque::new();
    queue.push_back(cfg.occupied[0]);
    visited.insert(cfg.occupied[0]);
    while let Some(v) = queue.pop_front() {
        for w in v.neighbors() {
            if set.contains(&w) && visited.insert(w) {
                queue.push_back(w);
            }
        }
    }
    if visited.len() == cfg.occupied.len() {
        Ok(())
    } else {
        Err(ConfigError::Disconnected)
    }
}

/// Full structural validation: connectivity, pair sanity, radix bound.
pub fn validate(cfg: &SystemConfiguration) -> Result<(), ConfigError> {
    if cfg.is_empty() {
        return Err(ConfigError::Empty);
    }
    let set = cfg.occupied_set();
    if set.len() != cfg.occupied.len() {
        // Duplicates cannot appear via parse/generate; direct construction can.
        return Err(ConfigError::Syntax {
            line: 0,
            message: "duplicate nodes in occupied list".into(),
        });
    }
    let mut paired: HashSet<NodeCoord> = HashSet::new();
    for (a, b) in &cfg.expanded_pairs {
        if a.distance(*b) != 1 {
            return Err(ConfigError::BadExpandedPair(*a, *b, "nodes not adjacent"));
        }
        if !set.contains(a) || !set.contains(b) {
            return Err(ConfigError::BadExpandedPair(*a, *b, "node unoccupied"));
        }
        if !paired.insert(*a) || !paired.insert(*b) {
            return Err(ConfigError::BadExpandedPair(*a, *b, "pairs overlap"));
        }
    }
    if !cfg.expanded_pairs.is_empty() && !cfg.expanded_enabled {
        return Err(ConfigError::ExpandedNotEnabled);
    }
    if cfg.radix < 2 {
        return Err(ConfigError::RadixTooSmall(cfg.radix));
    }
    check_connected(cfg)
}

/// Shape families used by the generators, benchmarks and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Line { n: u32 },
    Parallelogram { w: u32, h: u32 },
    Annulus { outer_radius: u32, hole_radius: u32 },
    RandomConnected { n: u32 },
}

/// Deterministically generates a connected configuration of the requested
/// shape. `seed` feeds both the generator (for random shapes) and the
/// resulting configuration.
pub fn generate(shape: Shape, seed: u64) -> Result<SystemConfiguration, ConfigError> {
    let nodes = match shape {
        Shape::Line { n } => {
            if n == 0 {
                return Err(ConfigError::InvalidShapeParams("line needs n >= 1".into()));
            }
            (0..n as i32).map(|i| NodeCoord::new(i, 0)).collect()
        }
        Shape::Parallelogram { w, h } => {
            if w == 0 || h == 0 {
                return Err(ConfigError::InvalidShapeParams(
                    "parallelogram needs w, h >= 1".into(),
                ));
            }
            let mut nodes = Vec::with_capacity((w * h) as usize);
            for i in 0..w as i32 {
                for j in 0..h as i32 {
                    nodes.push(NodeCoord::new(i, j));
                }
            }
            nodes
        }
        Shape::Annulus {
            outer_radius,
            hole_radius,
        } => {
            if hole_radius == 0 || hole_radius >= outer_radius {
                return Err(ConfigError::InvalidShapeParams(
                    "annulus needs 0 < hole_radius < outer_radius".into(),
                ));
            }
            let r = outer_radius as i32;
            let mut nodes = Vec::new();
            for x in -r..=r {
                for y in -r..=r {
                    let v = NodeCoord::new(x, y);
                    let d = v.norm();
                    if d >= hole_radius && d < outer_radius {
                        nodes.push(v);
                    }
                }
            }
            nodes
        }
        Shape::RandomConnected { n } => {
            if n == 0 {
                return Err(ConfigError::InvalidShapeParams(
                    "random_connected needs n >= 1".into(),
                ));
            }
            random_connected(n as usize, seed)
        }
    };
    let mut cfg = SystemConfiguration::from_nodes(nodes);
    cfg.seed = seed;
    debug_assert!(check_connected(&cfg).is_ok());
    Ok(cfg)
}

/// Grows a connected system by uniform attachment: repeatedly occupy a node
/// chosen uniformly from the empty nodes adjacent to the current system.
fn random_connected(n: usize, seed: u64) -> Vec<NodeCoord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut occupied = HashSet::new();
    let mut nodes = Vec::with_capacity(n);
    let mut frontier: Vec<NodeCoord> = Vec::new();
    let mut in_frontier = HashSet::new();

    let origin = NodeCoord::new(0, 0);
    occupied.insert(origin);
    nodes.push(origin);
    for w in origin.neighbors() {
        if in_frontier.insert(w) {
            frontier.push(w);
        }
    }

    while nodes.len() < n {
        let i = rng.gen_range(0..frontier.len());
        let v = frontier.swap_remove(i);
        in_frontier.remove(&v);
        occupied.insert(v);
        nodes.push(v);
        for w in v.neighbors() {
            if !occupied.contains(&w) && in_frontier.insert(w) {
                frontier.push(w);
            }
        }
    }
    nodes
}
