//! Boundary setup: each particle inspects its six ports, creates one agent
//! per maximal empty sequence, and wires predecessor/successor pointers along
//! every boundary. `setup_boundaries` is the pure per-particle rule;
//! `link_agents` applies it globally and resolves the agent graph, which is
//! simulator bookkeeping used for validation and instrumentation.

use std::collections::HashMap;

use crate::config::SystemConfiguration;
use crate::grid::{direction_between, Direction, NodeCoord};

/// What a particle sees on its six ports, in local clockwise port order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NeighborhoodView {
    pub occupied: [bool; 6],
}

/// Skeleton of one agent before election state is attached.
///
/// Ports are local indices. The empty sequence starts at `run_start_port`
/// and spans `empty_seq_len` ports; `pred_port` is the occupied port just
/// before it in clockwise order and `succ_port` the occupied port just
/// after it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AgentSkeleton {
    /// Locally unique in {1, 2, 3}, assigned in clockwise order of empty
    /// sequences starting from port 0.
    pub agent_id: u8,
    pub pred_port: u8,
    pub succ_port: u8,
    pub run_start_port: u8,
    pub empty_seq_len: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetupResult {
    /// No occupied neighbor: the particle is alone and leads immediately.
    LoneLeader,
    /// All six neighbors occupied: the particle sits on no boundary.
    Interior,
    Agents(Vec<AgentSkeleton>),
}

/// The per-particle boundary setup rule. Pure; uses only the local view.
pub fn setup_boundaries(view: &NeighborhoodView) -> SetupResult {
    let occ = &view.occupied;
    if occ.iter().all(|&o| !o) {
        return SetupResult::LoneLeader;
    }
    if occ.iter().all(|&o| o) {
        return SetupResult::Interior;
    }
    let mut agents = Vec::new();
    for start in 0..6u8 {
        // A maximal empty run starts right after an occupied port.
        if occ[start as usize] || !occ[(start as usize + 5) % 6] {
            continue;
        }
        let mut len = 0u8;
        while !occ[(start as usize + len as usize) % 6] {
            len += 1;
        }
        agents.push(AgentSkeleton {
            agent_id: agents.len() as u8 + 1,
            pred_port: (start + 5) % 6,
            succ_port: (start + len) % 6,
            run_start_port: start,
            empty_seq_len: len,
        });
    }
    debug_assert!((1..=3).contains(&agents.len()));
    SetupResult::Agents(agents)
}

/// Port-label offset of the particle at `node`, derived deterministically
/// from the run seed so that no algorithm can exploit a shared compass.
/// Local port `p` faces global direction `(offset + p) mod 6`.
pub fn port_offset(seed: u64, node: NodeCoord) -> u8 {
    let key = (node.x as i64 as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
        ^ (node.y as i64 as u64).rotate_left(32);
    (splitmix64(seed ^ key) % 6) as u8
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn local_port(offset: u8, global: Direction) -> u8 {
    (global.index() + 6 - offset) % 6
}

pub fn global_direction(offset: u8, port: u8) -> Direction {
    Direction::from_index((offset + port) as i32)
}

/// Index of one agent in an [`AgentGraph`].
pub type AgentIndex = usize;

#[derive(Debug, Clone)]
pub struct LinkedAgent {
    pub node: NodeCoord,
    pub skeleton: AgentSkeleton,
    /// Global direction of the first empty node of this agent's sequence.
    pub run_start: Direction,
    pub pred: AgentIndex,
    pub succ: AgentIndex,
    /// Cycle the agent belongs to, indexed into [`AgentGraph::cycles`].
    pub cycle: usize,
}

/// The resolved agent graph of a configuration: disjoint cycles covering
/// every boundary agent.
#[derive(Debug, Clone)]
pub struct AgentGraph {
    pub agents: Vec<LinkedAgent>,
    /// Each cycle in successor order.
    pub cycles: Vec<Vec<AgentIndex>>,
    pub lone_leader: bool,
}

impl AgentGraph {
    pub fn agent_at(&self, node: NodeCoord, agent_id: u8) -> Option<AgentIndex> {
        self.agents
            .iter()
            .position(|a| a.node == node && a.skeleton.agent_id == agent_id)
    }

    /// Sum of turn values along a cycle, in units of 60 degrees.
    pub fn cycle_turning_number(&self, cycle: usize) -> i32 {
        self.cycles[cycle]
            .iter()
            .map(|&i| self.agents[i].skeleton.empty_seq_len as i32 - 2)
            .sum()
    }
}

/// Runs boundary setup for every particle of `cfg` (every occupied node;
/// expanded pairs contribute two virtual particles) and resolves all
/// pred/succ pointers into disjoint cycles.
///
/// Panics on internal inconsistency; the geometric rule guarantees that a
/// unique partner agent exists on both sides.
pub fn link_agents(cfg: &SystemConfiguration) -> AgentGraph {
    let occupied = cfg.occupied_set();
    let mut agents: Vec<LinkedAgent> = Vec::new();
    let mut by_pred: HashMap<(NodeCoord, u8), AgentIndex> = HashMap::new();
    let mut by_succ: HashMap<(NodeCoord, u8), AgentIndex> = HashMap::new();
    let mut lone_leader = false;

    for &node in &cfg.occupied {
        let offset = port_offset(cfg.seed, node);
        let mut view = NeighborhoodView {
            occupied: [false; 6],
        };
        for p in 0..6u8 {
            view.occupied[p as usize] = occupied.contains(&node.step(global_direction(offset, p)));
        }
        match setup_boundaries(&view) {
            SetupResult::LoneLeader => lone_leader = true,
            SetupResult::Interior => {}
            SetupResult::Agents(skeletons) => {
                for skeleton in skeletons {
                    let idx = agents.len();
                    by_pred.insert((node, skeleton.pred_port), idx);
                    by_succ.insert((node, skeleton.succ_port), idx);
                    agents.push(LinkedAgent {
                        node,
                        run_start: global_direction(offset, skeleton.run_start_port),
                        skeleton,
                        pred: usize::MAX,
                        succ: usize::MAX,
                        cycle: usize::MAX,
                    });
                }
            }
        }
    }

    // Resolve: the successor agent of `a` lives on the particle behind
    // a.succ_port and is the agent whose pred_port faces back at `a`.
    let links: Vec<(AgentIndex, AgentIndex)> = agents
        .iter()
        .map(|a| {
            let offset = port_offset(cfg.seed, a.node);
            let succ_node = a.node.step(global_direction(offset, a.skeleton.succ_port));
            let succ_offset = port_offset(cfg.seed, succ_node);
            let back = direction_between(succ_node, a.node).expect("succ node adjacent");
            let succ = *by_pred
                .get(&(succ_node, local_port(succ_offset, back)))
                .expect("successor agent must exist");

            let pred_node = a.node.step(global_direction(offset, a.skeleton.pred_port));
            let pred_offset = port_offset(cfg.seed, pred_node);
            let back = direction_between(pred_node, a.node).expect("pred node adjacent");
            let pred = *by_succ
                .get(&(pred_node, local_port(pred_offset, back)))
                .expect("predecessor agent must exist");
            (pred, succ)
        })
        .collect();
    for (agent, (pred, succ)) in agents.iter_mut().zip(links) {
        agent.pred = pred;
        agent.succ = succ;
    }
    for i in 0..agents.len() {
        assert_eq!(agents[agents[i].succ].pred, i, "pred/succ must be inverse");
    }

    let mut cycles = Vec::new();
    for start in 0..agents.len() {
        if agents[start].cycle != usize::MAX {
            continue;
        }
        let id = cycles.len();
        let mut order = Vec::new();
        let mut cur = start;
        loop {
            assert_eq!(agents[cur].cycle, usize::MAX, "cycles must be disjoint");
            agents[cur].cycle = id;
            order.push(cur);
            cur = agents[cur].succ;
            if cur == start {
                break;
            }
        }
        cycles.push(order);
    }

    AgentGraph {
        agents,
        cycles,
        lone_leader,
    }
}
