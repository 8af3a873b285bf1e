//! Independent global-view reference implementations used for validation:
//! flood-fill boundary classification, boundary metrics, the reference
//! identifier order, and ground-truth checks over run snapshots.
//!
//! Everything here works from the occupied node set with global coordinates
//! and never touches the per-particle port machinery, so it can serve as an
//! oracle for the distributed setup.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet, VecDeque};

use crate::config::SystemConfiguration;
use crate::grid::{direction_between, turn_value, Direction, NodeCoord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Outer,
    Inner,
}

/// One boundary occurrence of a particle, identified by the particle's node
/// and the global direction of the first node of its empty sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OracleAgent {
    pub node: NodeCoord,
    pub run_start: Direction,
    pub empty_seq_len: u8,
}

#[derive(Debug, Clone)]
pub struct OracleBoundary {
    pub kind: BoundaryKind,
    /// Agents in successor order around the cycle.
    pub agents: Vec<OracleAgent>,
    /// Number of distinct particles on this boundary.
    pub particle_count: usize,
}

impl OracleBoundary {
    /// Sum of the agents' turn values, in units of 60 degrees. Evaluates to
    /// +6 on the outer boundary and -6 on inner boundaries.
    pub fn turning_number(&self) -> i32 {
        self.agents
            .iter()
            .map(|a| turn_value(a.empty_seq_len).expect("agent run length in [1,5]") as i32)
            .sum()
    }
}

#[derive(Debug, Clone)]
pub struct BoundaryReport {
    pub boundaries: Vec<OracleBoundary>,
    /// Particle count (virtual particles for expanded systems).
    pub n: usize,
    /// Agent count of the outer boundary.
    pub outer_agents: usize,
    /// Particle count of the outer boundary.
    pub outer_particles: usize,
    /// Diameter of the occupied subgraph.
    pub diameter: usize,
}

impl BoundaryReport {
    pub fn outer(&self) -> Option<&OracleBoundary> {
        self.boundaries
            .iter()
            .find(|b| b.kind == BoundaryKind::Outer)
    }

    pub fn inner_count(&self) -> usize {
        self.boundaries
            .iter()
            .filter(|b| b.kind == BoundaryKind::Inner)
            .count()
    }

    /// The outer boundary of a connected system of `n` particles always
    /// spans at least sqrt(n) agents. Vacuously true for a lone particle,
    /// which has no boundary at all.
    pub fn perimeter_bound_ok(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        (self.outer_agents * self.outer_agents) >= self.n
    }
}

/// Classifies every empty region adjacent to the system and reconstructs
/// each boundary's agent cycle from global knowledge.
///
/// The infinite outer region is replaced by a finite certificate: the flood
/// fill runs inside the bounding box padded by one ring, and the unique
/// component touching the pad is the outer region.
pub fn classify_boundaries(cfg: &SystemConfiguration) -> BoundaryReport {
    let occupied = cfg.occupied_set();
    let n = cfg.occupied.len();
    if n == 0 {
        return BoundaryReport {
            boundaries: Vec::new(),
            n,
            outer_agents: 0,
            outer_particles: 0,
            diameter: 0,
        };
    }

    let min_x = cfg.occupied.iter().map(|v| v.x).min().unwrap() - 1;
    let max_x = cfg.occupied.iter().map(|v| v.x).max().unwrap() + 1;
    let min_y = cfg.occupied.iter().map(|v| v.y).min().unwrap() - 1;
    let max_y = cfg.occupied.iter().map(|v| v.y).max().unwrap() + 1;
    let in_box = |v: NodeCoord| v.x >= min_x && v.x <= max_x && v.y >= min_y && v.y <= max_y;
    let on_pad = |v: NodeCoord| v.x == min_x || v.x == max_x || v.y == min_y || v.y == max_y;

    // Flood-fill empty nodes inside the padded box into regions.
    let mut region_of: HashMap<NodeCoord, usize> = HashMap::new();
    let mut region_is_outer: Vec<bool> = Vec::new();
    for x in min_x..=max_x {
        for y in min_y..=max_y {
            let start = NodeCoord::new(x, y);
            if occupied.contains(&start) || region_of.contains_key(&start) {
                continue;
            }
            let id = region_is_outer.len();
            region_is_outer.push(false);
            let mut queue = VecDeque::new();
            region_of.insert(start, id);
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                if on_pad(v) {
                    region_is_outer[id] = true;
                }
                for w in v.neighbors() {
                    if in_box(w) && !occupied.contains(&w) && !region_of.contains_key(&w) {
                        region_of.insert(w, id);
                        queue.push_back(w);
                    }
                }
            }
        }
    }

    // Enumerate agents: one per maximal run of empty neighbor directions.
    let mut agents: Vec<OracleAgent> = Vec::new();
    let mut agent_region: Vec<usize> = Vec::new();
    let mut by_key: HashMap<(NodeCoord, u8), usize> = HashMap::new();
    for &p in &cfg.occupied {
        let mask: Vec<bool> = p.neighbors().iter().map(|w| occupied.contains(w)).collect();
        if mask.iter().all(|&occ| !occ) || mask.iter().all(|&occ| occ) {
            continue; // lone particle or interior particle: no agents
        }
        for start in 0..6u8 {
            // a run starts where the previous direction is occupied
            if mask[start as usize] || !mask[(start as usize + 5) % 6] {
                continue;
            }
            let mut len = 0u8;
            while !mask[(start as usize + len as usize) % 6] {
                len += 1;
            }
            let run_start = Direction::from_index(start as i32);
            let region = region_of[&p.step(run_start)];
            let idx = agents.len();
            agents.push(OracleAgent {
                node: p,
                run_start,
                empty_seq_len: len,
            });
            agent_region.push(region);
            by_key.insert((p, start), idx);
        }
    }

    // Walk successor links to assemble one cycle per region.
    let successor = |a: &OracleAgent| -> usize {
        let last = a.run_start.rotated(a.empty_seq_len as i32 - 1);
        let succ_dir = last.rotated(1);
        let q = a.node.step(succ_dir);
        let back = direction_between(q, a.node).expect("successor is adjacent");
        by_key[&(q, back.rotated(1).index())]
    };

    let mut cycle_of: Vec<Option<usize>> = vec![None; agents.len()];
    let mut boundaries: Vec<OracleBoundary> = Vec::new();
    for start in 0..agents.len() {
        if cycle_of[start].is_some() {
            continue;
        }
        let cycle_id = boundaries.len();
        let mut order = Vec::new();
        let mut cur = start;
        loop {
            assert!(cycle_of[cur].is_none(), "agent on two boundary cycles");
            cycle_of[cur] = Some(cycle_id);
            order.push(agents[cur]);
            cur = successor(&agents[cur]);
            if cur == start {
                break;
            }
        }
        let region = agent_region[start];
        assert!(
            order
                .iter()
                .all(|a| agent_region[by_key[&(a.node, a.run_start.index())]] == region),
            "cycle mixes empty regions"
        );
        let particles: HashSet<NodeCoord> = order.iter().map(|a| a.node).collect();
        boundaries.push(OracleBoundary {
            kind: if region_is_outer[region] {
                BoundaryKind::Outer
            } else {
                BoundaryKind::Inner
            },
            agents: order,
            particle_count: particles.len(),
        });
    }

    assert_eq!(
        boundaries
            .iter()
            .filter(|b| b.kind == BoundaryKind::Outer)
            .count(),
        if n > 1 { 1 } else { 0 },
        "exactly one outer boundary expected"
    );

    let (outer_agents, outer_particles) = boundaries
        .iter()
        .find(|b| b.kind == BoundaryKind::Outer)
        .map(|b| (b.agents.len(), b.particle_count))
        .unwrap_or((0, 0));

    BoundaryReport {
        boundaries,
        n,
        outer_agents,
        outer_particles,
        diameter: diameter(cfg),
    }
}

/// Exact diameter of the occupied subgraph via repeated breadth-first
/// search. Desk-scale systems only.
pub fn diameter(cfg: &SystemConfiguration) -> usize {
    let set = cfg.occupied_set();
    let mut best = 0usize;
    for &start in &cfg.occupied {
        let mut dist: HashMap<NodeCoord, usize> = HashMap::new();
        let mut queue = VecDeque::new();
        dist.insert(start, 0);
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            let d = dist[&v];
            best = best.max(d);
            for w in v.neighbors() {
                if set.contains(&w) && !dist.contains_key(&w) {
                    dist.insert(w, d + 1);
                    queue.push_back(w);
                }
            }
        }
    }
    best
}

/// Reference identifier order: shorter identifiers are lower; equal lengths
/// compare lexicographically from the most significant digit.
pub fn compare_identifiers(a: &[u32], b: &[u32]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// A run snapshot the simulator exports for ground-truth checks: one entry
/// per agent, keyed the same way the oracle keys its agents.
#[derive(Debug, Clone, Copy)]
pub struct AgentSnapshot {
    pub node: NodeCoord,
    pub run_start: Direction,
    /// Candidate that has neither withdrawn nor been eliminated.
    pub live_candidate: bool,
}

#[derive(Debug, Clone)]
pub struct GroundTruth {
    /// Live candidate count per boundary, indexed like `report.boundaries`.
    pub live_candidates: Vec<usize>,
    /// For a declared leader: whether it occupies an outer-boundary node.
    pub leader_on_outer: Option<bool>,
}

/// Joins a role snapshot against the oracle's boundaries.
///
/// Panics if the snapshot contains an agent the oracle does not know; that
/// always indicates a bug in the distributed setup.
pub fn ground_truth(
    report: &BoundaryReport,
    agents: &[AgentSnapshot],
    leader: Option<NodeCoord>,
) -> GroundTruth {
    let mut index: HashMap<(NodeCoord, u8), usize> = HashMap::new();
    for (i, b) in report.boundaries.iter().enumerate() {
        for a in &b.agents {
            index.insert((a.node, a.run_start.index()), i);
        }
    }
    let mut live = vec![0usize; report.boundaries.len()];
    for snap in agents {
        let b = *index
            .get(&(snap.node, snap.run_start.index()))
            .expect("snapshot agent unknown to oracle");
        if snap.live_candidate {
            live[b] += 1;
        }
    }
    let leader_on_outer = leader.map(|node| {
        report
            .outer()
            .map(|b| b.agents.iter().any(|a| a.node == node))
            .unwrap_or(false)
    });
    GroundTruth {
        live_candidates: live,
        leader_on_outer,
    }
}
