//! Variant algorithms: the parallel almost-sure election that runs on
//! separate token channels next to the base algorithm, plus the state types
//! it needs. Expanded-particle simulation and the termination broadcast are
//! driven by the engine itself (activation groups and the termination
//! wave); this module owns everything specific to the second election.
//!
//! In the second election every agent starts as a candidate. Candidates
//! alternate between a coin-exchange phase (withdraw on tails iff both
//! neighboring candidates flipped heads, which never eliminates the last
//! one: it reads its own flip on both sides) and a solitude-verification
//! phase. A survivor that verifies solitude and identifies the outer
//! boundary circulates a stop token that freezes the base algorithm and
//! checks for an existing leader before claiming leadership itself.

use arrayvec::ArrayVec;
use rand::Rng;

use crate::election::{BoundaryIdToken, SolitudeState};
use crate::scheduler::{AgentRef, Lane, Simulation};

/// One coin-exchange message: the flip value, the epoch it belongs to
/// (modulo 4 suffices because neighboring candidates stay within one epoch
/// of each other), and its travel direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoinToken {
    pub value: bool,
    pub epoch: u8,
    pub to_pred: bool,
}

/// Circulates the boundary once after the second election wins: freezes the
/// base algorithm and reports whether a leader already exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopToken {
    pub leader_seen: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase2 {
    Flip,
    AwaitCoins,
    AwaitSolitude,
    AwaitBoundaryId,
    AwaitStop,
    Done,
}

/// Per-agent state of the second election.
#[derive(Debug)]
pub struct Algo2State {
    pub withdrawn: bool,
    pub phase: Phase2,
    pub epoch: u8,
    pub own_flip: Option<bool>,
    /// Flips received from the neighboring candidates, tagged with their
    /// epoch; at most two epochs are ever in flight.
    pub from_pred: ArrayVec<(u8, bool), 2>,
    pub from_succ: ArrayVec<(u8, bool), 2>,
    /// Pass-through channels for coin tokens heading along the boundary.
    pub to_pred: ArrayVec<CoinToken, 2>,
    pub to_succ: ArrayVec<CoinToken, 2>,
    pub solitude: SolitudeState,
    pub boundary_id: Option<BoundaryIdToken>,
    pub awaiting_boundary_id: bool,
    pub stop: Option<StopToken>,
    pub awaiting_stop: bool,
}

impl Algo2State {
    pub fn new() -> Self {
        Algo2State {
            withdrawn: false,
            phase: Phase2::Flip,
            epoch: 0,
            own_flip: None,
            from_pred: ArrayVec::new(),
            from_succ: ArrayVec::new(),
            to_pred: ArrayVec::new(),
            to_succ: ArrayVec::new(),
            solitude: SolitudeState::default(),
            boundary_id: None,
            awaiting_boundary_id: false,
            stop: None,
            awaiting_stop: false,
        }
    }

    pub fn is_candidate(&self) -> bool {
        !self.withdrawn
    }
}

impl Default for Algo2State {
    fn default() -> Self {
        Self::new()
    }
}

/// Fixed-slot size of the second election's agent memory, mirroring the
/// canonical layout rules of the base state.
pub fn algo2_state_bytes() -> usize {
    let flags = 1 + 1 + 1 + 2; // withdrawn, phase, epoch, own flip
    let coin_slots = 2 * 2 * 3; // from_pred/from_succ: epoch+value+presence
    let channels = 2 * 2 * 4; // to_pred/to_succ slots: presence+value+epoch+dir
    let solitude = 2 + 6 + 4 * 2 * 2; // as in the base layout
    let boundary_id = 1 + 1 + 1;
    let stop = 1 + 1 + 1; // presence, leader_seen, awaiting flag
    flags + coin_slots + channels + solitude + boundary_id + stop
}

impl Simulation {
    pub(crate) fn algo2_step(&mut self, r: AgentRef) {
        self.coin_channel_step(r, true);
        self.coin_channel_step(r, false);
        self.algo2_fsm_step(r);
        self.vector_steps(r, Lane::Algo2);
        self.solitude_step(r, Lane::Algo2);
        self.boundary_id_step(r, Lane::Algo2);
        self.stop_token_step(r);
    }

    /// Moves the front token of one coin channel: candidates absorb tokens
    /// addressed to them, withdrawn agents pass them along.
    fn coin_channel_step(&mut self, r: AgentRef, to_pred: bool) {
        {
            let a2 = self.agent(r).algo2.as_ref().expect("variant enabled");
            let chan = if to_pred { &a2.to_pred } else { &a2.to_succ };
            if chan.is_empty() {
                return;
            }
        }
        let target = if to_pred {
            self.resolve_pred(r)
        } else {
            self.resolve_succ(r)
        };
        let Some(target) = target else { return };
        let target_is_candidate = self
            .agent(target)
            .algo2
            .as_ref()
            .expect("variant enabled")
            .is_candidate();
        if target_is_candidate {
            let tok = {
                let a2 = self.agent_mut(r).algo2.as_mut().unwrap();
                let chan = if to_pred {
                    &mut a2.to_pred
                } else {
                    &mut a2.to_succ
                };
                chan.remove(0)
            };
            let t2 = self.agent_mut(target).algo2.as_mut().unwrap();
            // A token heading toward the preceding candidate arrives from
            // the receiver's successor side, and vice versa.
            let slot = if to_pred {
                &mut t2.from_succ
            } else {
                &mut t2.from_pred
            };
            assert!(
                slot.iter().all(|e| e.0 != tok.epoch),
                "duplicate epoch in coin slot"
            );
            assert!(slot.len() < 2, "coin slot capacity");
            slot.push((tok.epoch, tok.value));
        } else {
            let has_room = {
                let t2 = self.agent(target).algo2.as_ref().unwrap();
                let chan = if to_pred { &t2.to_pred } else { &t2.to_succ };
                chan.len() < 2
            };
            if !has_room {
                return;
            }
            let tok = {
                let a2 = self.agent_mut(r).algo2.as_mut().unwrap();
                let chan = if to_pred {
                    &mut a2.to_pred
                } else {
                    &mut a2.to_succ
                };
                chan.remove(0)
            };
            let t2 = self.agent_mut(target).algo2.as_mut().unwrap();
            let chan = if to_pred {
                &mut t2.to_pred
            } else {
                &mut t2.to_succ
            };
            chan.push(tok);
        }
    }

    fn algo2_fsm_step(&mut self, r: AgentRef) {
        let phase = {
            let a2 = self.agent(r).algo2.as_ref().expect("variant enabled");
            if a2.withdrawn {
                return;
            }
            a2.phase
        };
        match phase {
            Phase2::Flip => {
                let value = self.rng.gen_bool(0.5);
                let node = self.node_of(r);
                self.trace_event(
                    node,
                    "COIN",
                    if value { "algo2 heads" } else { "algo2 tails" },
                );
                let a2 = self.agent_mut(r).algo2.as_mut().unwrap();
                let epoch = a2.epoch;
                a2.own_flip = Some(value);
                assert!(
                    a2.to_pred.len() < 2 && a2.to_succ.len() < 2,
                    "coin channel capacity"
                );
                a2.to_pred.push(CoinToken {
                    value,
                    epoch,
                    to_pred: true,
                });
                a2.to_succ.push(CoinToken {
                    value,
                    epoch,
                    to_pred: false,
                });
                a2.phase = Phase2::AwaitCoins;
            }
            Phase2::AwaitCoins => {
                let decision = {
                    let a2 = self.agent(r).algo2.as_ref().unwrap();
                    let e = a2.epoch;
                    let pi = a2.from_pred.iter().position(|t| t.0 == e);
                    let si = a2.from_succ.iter().position(|t| t.0 == e);
                    match (pi, si) {
                        (Some(pi), Some(si)) => Some((pi, si)),
                        _ => None,
                    }
                };
                let Some((pi, si)) = decision else { return };
                let (own, pred_heads, succ_heads) = {
                    let a2 = self.agent_mut(r).algo2.as_mut().unwrap();
                    let p = a2.from_pred.remove(pi).1;
                    let s = a2.from_succ.remove(si).1;
                    (a2.own_flip.take().expect("flip recorded"), p, s)
                };
                if !own && pred_heads && succ_heads {
                    // Tails between two heads: out of the race. The sole
                    // survivor reads its own flip on both sides and can
                    // never satisfy this.
                    self.algo2_withdraw(r);
                } else {
                    self.start_solitude(r, Lane::Algo2);
                    self.agent_mut(r).algo2.as_mut().unwrap().phase = Phase2::AwaitSolitude;
                }
            }
            // Advanced by the solitude, boundary-id, and stop machinery.
            Phase2::AwaitSolitude | Phase2::AwaitBoundaryId | Phase2::AwaitStop | Phase2::Done => {}
        }
    }

    pub(crate) fn algo2_solitude_concluded(&mut self, r: AgentRef, sole: bool) {
        let a2 = self.agent_mut(r).algo2.as_mut().expect("variant enabled");
        debug_assert_eq!(a2.phase, Phase2::AwaitSolitude);
        if sole {
            a2.boundary_id = Some(BoundaryIdToken::new());
            a2.awaiting_boundary_id = true;
            a2.phase = Phase2::AwaitBoundaryId;
        } else {
            a2.epoch = (a2.epoch + 1) % 4;
            a2.phase = Phase2::Flip;
        }
    }

    pub(crate) fn algo2_boundary_id_concluded(&mut self, r: AgentRef, k: u8) {
        {
            let a2 = self.agent_mut(r).algo2.as_mut().expect("variant enabled");
            a2.awaiting_boundary_id = false;
        }
        match k {
            1 => {
                // Outer boundary: freeze the base algorithm along the
                // cycle, starting with this agent, and look for a leader.
                let leader_here = self.particles[r.particle as usize].leader;
                let agent = self.agent_mut(r);
                agent.frozen = true;
                let a2 = agent.algo2.as_mut().unwrap();
                a2.stop = Some(StopToken {
                    leader_seen: leader_here,
                });
                a2.awaiting_stop = true;
                a2.phase = Phase2::AwaitStop;
            }
            4 => self.algo2_withdraw(r),
            other => panic!("impossible external angle {other}"),
        }
    }

    fn stop_token_step(&mut self, r: AgentRef) {
        if self
            .agent(r)
            .algo2
            .as_ref()
            .expect("variant enabled")
            .stop
            .is_none()
        {
            return;
        }
        let Some(succ) = self.resolve_succ(r) else {
            return;
        };
        let mut tok = self
            .agent_mut(r)
            .algo2
            .as_mut()
            .unwrap()
            .stop
            .take()
            .unwrap();
        let succ_leader = self.particles[succ.particle as usize].leader;
        tok.leader_seen |= succ_leader;
        self.agent_mut(succ).frozen = true;
        let awaiting = self.agent(succ).algo2.as_ref().unwrap().awaiting_stop;
        if awaiting {
            {
                let a2 = self.agent_mut(succ).algo2.as_mut().unwrap();
                a2.awaiting_stop = false;
                a2.phase = Phase2::Done;
            }
            if tok.leader_seen {
                // The base algorithm won the race; stand down.
                self.algo2_withdraw(succ);
            } else {
                self.declare_leader(succ.particle);
            }
        } else {
            let a2 = self.agent_mut(succ).algo2.as_mut().unwrap();
            assert!(a2.stop.is_none(), "stop-token slot busy");
            a2.stop = Some(tok);
        }
    }

    fn algo2_withdraw(&mut self, r: AgentRef) {
        let node = self.node_of(r);
        let a2 = self.agent_mut(r).algo2.as_mut().expect("variant enabled");
        a2.withdrawn = true;
        a2.phase = Phase2::Done;
        a2.own_flip = None;
        // Unconsumed flips were addressed to this agent while it was still
        // a candidate; release them toward the next candidate so the
        // neighbors now pair with each other.
        let from_pred: Vec<(u8, bool)> = a2.from_pred.drain(..).collect();
        let from_succ: Vec<(u8, bool)> = a2.from_succ.drain(..).collect();
        for (epoch, value) in from_pred {
            assert!(a2.to_succ.len() < 2, "coin channel capacity on flush");
            a2.to_succ.push(CoinToken {
                value,
                epoch,
                to_pred: false,
            });
        }
        for (epoch, value) in from_succ {
            assert!(a2.to_pred.len() < 2, "coin channel capacity on flush");
            a2.to_pred.push(CoinToken {
                value,
                epoch,
                to_pred: true,
            });
        }
        self.trace_event(node, "WITHDRAW", "algo2");
    }
}
