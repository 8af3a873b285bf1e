//! Deterministic, seeded simulator for randomized leader election in
//! self-organizing particle systems on the triangular grid.
//!
//! Anonymous, constant-memory particles occupy grid nodes and communicate
//! through neighbor memories. The election runs in six phases per boundary:
//! boundary setup, segment setup, identifier setup, identifier comparison,
//! solitude verification, and boundary identification. The crate ships the
//! full token-level protocol, an asynchronous activation engine with
//! permutation and uniform schedulers, an independent global-view oracle for
//! validation, and the appendix variants (expanded particles, termination
//! broadcast, almost-sure election).
//!
//! Start with the runnable examples (`cargo run --example basic_run`) or the
//! `amoebot` binary (`generate`, `run`, `bench`, `check`).

pub mod boundary;
pub mod cli;
pub mod config;
pub mod election;
pub mod grid;
pub mod oracle;
pub mod scheduler;
pub mod variants;

pub use config::{Shape, SystemConfiguration};
pub use grid::{Direction, NodeCoord};
pub use scheduler::{run, CoinPolicy, RunOptions, RunOutcome, SchedulerPolicy, Simulation};
