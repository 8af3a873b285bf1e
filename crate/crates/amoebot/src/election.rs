//! Per-agent election state and the constant-size tokens of phases 2-6:
//! segment setup, identifier setup, identifier comparison, solitude
//! verification, and boundary identification.
//!
//! Everything an agent stores lives in fixed slots (one identifier-setup
//! token, a comparison FIFO of two, one solitude walker, two vector tokens
//! per axis and sign, one boundary-identification token), so agent memory is
//! constant regardless of system size. The scheduler owns token movement;
//! this module owns the state transitions that happen when a token arrives
//! at or acts inside a single agent.

use arrayvec::ArrayVec;

use crate::grid::Direction;

/// Role of an agent in the election, frozen segment-wise at segment setup.
/// Withdrawal never re-segments a boundary; a withdrawn candidate keeps its
/// token-activation duties.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Candidate,
    NonCandidate,
    Withdrawn,
    SoleCandidate,
    LeaderSignaled,
}

impl Role {
    /// Heads a segment, i.e. was a candidate at segment setup.
    pub fn heads_segment(self) -> bool {
        !matches!(self, Role::NonCandidate)
    }

    /// Still competing: neither withdrawn nor a non-candidate.
    pub fn live_candidate(self) -> bool {
        matches!(
            self,
            Role::Candidate | Role::SoleCandidate | Role::LeaderSignaled
        )
    }
}

/// Comparison verdict carried by a delimiter token, from the token's point
/// of view. Written least-significant digit first during traversal, so the
/// last write is the most significant differing digit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Diff {
    Equal,
    TokenGreater,
    TokenSmaller,
}

/// The single token that builds a segment's identifier: one outbound pass
/// assigns random digits, alternating passes copy the identifier into the
/// reversed-digit fields, and a final pass reports completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdSetupToken {
    pub mode: IdSetupMode,
    /// Simulator-only: registry index of the owning candidate.
    pub owner: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdSetupMode {
    /// Outbound: assign a digit to every agent up to the segment end.
    Assign,
    /// Carry a digit toward the segment head; deposit at the first agent
    /// whose predecessor already holds a reversed digit (or at the head).
    /// `fresh_pickup` distinguishes a deposit at the pickup agent itself,
    /// which means the copy just finished.
    CarryToFront { digit: u32, fresh_pickup: bool },
    /// Carry a digit toward the segment end; deposit at the first agent
    /// whose successor already holds a reversed digit (or at the end).
    CarryToBack { digit: u32 },
    /// One step toward the head, then read the digit there for the next
    /// front-bound pass. Finding a reversed digit already present means the
    /// copy is complete.
    PickupFront,
    /// Copy finished; walk home and signal the candidate.
    ReturnHome,
}

/// A digit of a reversed identifier traveling against the boundary cycle.
#[derive(Debug, Clone)]
pub struct DigitToken {
    pub digit: u32,
    pub is_delimiter: bool,
    pub active: bool,
    pub highest_diff: Diff,
    /// Simulator-only bookkeeping, not part of agent memory: creation
    /// serial, owning candidate, and forward count for progress checks.
    pub serial: u32,
    pub owner: u32,
    pub steps: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkerPhase {
    Outbound,
    Returning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisResult {
    Pending,
    Zero,
    NonZero,
}

/// The solitude-verification walker. It carries both axis schemes of the
/// zero-vector test: a heading expressed in the issuing candidate's local
/// frame, per-axis results, and the agent identifier found at the end of
/// the extended segment.
#[derive(Debug, Clone, Copy)]
pub struct SolitudeWalker {
    pub phase: WalkerPhase,
    /// Direction of the next hop, in the issuing candidate's port frame.
    pub heading: Direction,
    pub end_agent_id: Option<u8>,
    pub result_x: AxisResult,
    pub result_y: AxisResult,
    /// Simulator-only bookkeeping for the runtime instrumentation.
    pub hops_out: u32,
    pub trigger_round: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VectorToken {
    pub settled: bool,
}

pub const AXIS_X: usize = 0;
pub const AXIS_Y: usize = 1;
pub const SIGN_POS: usize = 0;
pub const SIGN_NEG: usize = 1;

/// Per-axis/sign FIFO pairs for solitude vector tokens.
pub type VectorChannels = [[ArrayVec<VectorToken, 2>; 2]; 2];

#[derive(Debug, Clone, Default)]
pub struct SolitudeState {
    pub running: bool,
    /// Elimination arrived mid-run; withdraw once the walker reports.
    pub withdraw_after: bool,
    pub walker: Option<SolitudeWalker>,
    pub vectors: VectorChannels,
}

impl SolitudeState {
    pub fn any_unsettled(&self) -> bool {
        self.vectors
            .iter()
            .flatten()
            .any(|fifo| fifo.iter().any(|t| !t.settled))
    }

    pub fn settled_counts(&self, axis: usize) -> (usize, usize) {
        let count = |sign: usize| {
            self.vectors[axis][sign]
                .iter()
                .filter(|t| t.settled)
                .count()
        };
        (count(SIGN_POS), count(SIGN_NEG))
    }

    pub fn has_settled(&self, axis: usize) -> bool {
        let (p, n) = self.settled_counts(axis);
        p + n > 0
    }

    pub fn clear_vectors(&mut self) {
        for fifo in self.vectors.iter_mut().flatten() {
            fifo.clear();
        }
    }
}

/// External-angle token for boundary identification: the turn sum modulo 5,
/// which ends at 1 on the outer boundary and 4 on an inner boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryIdToken {
    pub k_mod5: u8,
}

impl BoundaryIdToken {
    pub fn new() -> Self {
        BoundaryIdToken { k_mod5: 0 }
    }

    pub fn absorb_turn(&mut self, turn: i8) {
        self.k_mod5 = (self.k_mod5 as i32 + turn as i32).rem_euclid(5) as u8;
    }
}

impl Default for BoundaryIdToken {
    fn default() -> Self {
        Self::new()
    }
}

/// Full election state of one agent.
#[derive(Debug, Clone)]
pub struct ElectionState {
    pub role: Role,
    /// Digit of the segment's identifier held by this agent (the segment
    /// head holds the most significant digit).
    pub digit: Option<u32>,
    /// Same identifier copied in reversed digit order.
    pub reversed_digit: Option<u32>,
    /// Matching state for identifier comparison. Agents start active.
    pub active: bool,
    /// Result of the digit match with the current token sequence, from the
    /// agent's viewpoint (agent digit vs token digit).
    pub comparison_result: Option<std::cmp::Ordering>,
    /// Candidate bookkeeping for the sequence in transit.
    pub matched_nondelim: bool,
    pub matched_delim: bool,
    /// Set once the agent created its own digit token; nothing may be
    /// received before that.
    pub has_emitted: bool,
    /// Candidate only: identifier setup finished (its token returned).
    pub setup_complete: bool,
    pub id_setup: Option<IdSetupToken>,
    /// Comparison FIFO; index 0 is forwarded first.
    pub comparison: ArrayVec<DigitToken, 2>,
    pub solitude: SolitudeState,
    pub boundary_id: Option<BoundaryIdToken>,
    pub awaiting_boundary_id: bool,
}

impl ElectionState {
    pub fn new(role: Role) -> Self {
        ElectionState {
            role,
            digit: None,
            reversed_digit: None,
            active: true,
            comparison_result: None,
            matched_nondelim: false,
            matched_delim: false,
            has_emitted: false,
            setup_complete: false,
            id_setup: None,
            comparison: ArrayVec::new(),
            solitude: SolitudeState::default(),
            boundary_id: None,
            awaiting_boundary_id: false,
        }
    }

    /// May accept another comparison token right now.
    pub fn can_receive_comparison(&self) -> bool {
        self.has_emitted && self.comparison.len() < 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DelimiterOutcome {
    /// The traversing sequence was longer or strictly greater.
    Withdraw,
    /// Shorter or strictly smaller: the candidate may still win.
    Stay,
    /// Equal: check whether any other candidate is left.
    TriggerSolitude,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ReceiptEvents {
    pub matched: bool,
    pub decide: Option<DelimiterOutcome>,
}

/// Processes the arrival of a comparison token at an agent: match if both
/// sides are active, then delimiter bookkeeping (fold the stored comparison
/// result, clear it, reactivate the agent) and, at a live candidate, the
/// three-way decision. The token is enqueued behind any resident token.
///
/// The caller must have checked `can_receive_comparison`.
pub fn receive_comparison(state: &mut ElectionState, mut token: DigitToken) -> ReceiptEvents {
    assert!(state.has_emitted, "token received before own digit token");
    let mut events = ReceiptEvents::default();

    if state.active && token.active {
        // Match: compare the agent's non-reversed digit with the token's.
        state.active = false;
        token.active = false;
        let own = state
            .digit
            .expect("matching agent holds an identifier digit");
        state.comparison_result = Some(own.cmp(&token.digit));
        if state.role.heads_segment() {
            if token.is_delimiter {
                state.matched_delim = true;
            } else {
                state.matched_nondelim = true;
            }
        }
        events.matched = true;
    }

    if token.is_delimiter {
        if let Some(result) = state.comparison_result.take() {
            match result {
                std::cmp::Ordering::Equal => {}
                std::cmp::Ordering::Less => token.highest_diff = Diff::TokenGreater,
                std::cmp::Ordering::Greater => token.highest_diff = Diff::TokenSmaller,
            }
        }
        state.active = true;
        if matches!(state.role, Role::Candidate | Role::SoleCandidate) {
            events.decide = Some(delimiter_decide(
                state.matched_nondelim,
                state.matched_delim,
                token.highest_diff,
            ));
        }
        if state.role.heads_segment() {
            state.matched_nondelim = false;
            state.matched_delim = false;
        }
    }

    state.comparison.push(token);
    events
}

/// The three-outcome decision a candidate takes on receiving a delimiter:
/// a longer sequence (a non-delimiter matched the candidate) or an equal
/// sequence with a greater identifier eliminates it; an equal identifier
/// triggers solitude verification; anything shorter or smaller changes
/// nothing.
pub fn delimiter_decide(
    matched_nondelim: bool,
    matched_delim: bool,
    highest_diff: Diff,
) -> DelimiterOutcome {
    if matched_nondelim {
        return DelimiterOutcome::Withdraw;
    }
    if matched_delim {
        return match highest_diff {
            Diff::TokenGreater => DelimiterOutcome::Withdraw,
            Diff::TokenSmaller => DelimiterOutcome::Stay,
            Diff::Equal => DelimiterOutcome::TriggerSolitude,
        };
    }
    DelimiterOutcome::Stay
}

/// Serialized size of an agent's election memory under the canonical
/// fixed-slot layout. Every slot is counted at full width whether occupied
/// or not: constant-memory agents own their registers permanently. The
/// simulator-only token metadata is excluded.
pub fn election_state_bytes() -> usize {
    let role = 1;
    let digits = 2 * (1 + 4);
    let matching = 1 + 1 + 1 + 1; // active, comparison_result, matched flags
    let progress = 1 + 1; // has_emitted, setup_complete
    let id_setup = 1 + 1 + 4; // presence, mode, carried digit
    let comparison = 2 * (1 + 4 + 1 + 1 + 1); // presence, digit, delim, active, diff
    let solitude = 2 // running, withdraw_after
        + (1 + 1 + 1 + 1 + 1 + 1) // walker: presence, phase, heading, end id, two results
        + 4 * 2 * 2; // vector slots: presence+settled per slot
    let boundary_id = 1 + 1 + 1; // presence, counter, awaiting flag
    role + digits + matching + progress + id_setup + comparison + solitude + boundary_id
}
