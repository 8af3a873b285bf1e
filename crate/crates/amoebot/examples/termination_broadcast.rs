//! Termination for all particles: once a leader is declared it broadcasts a
//! termination message that sweeps the system in roughly diameter-many
//! rounds, after which no particle changes state.
//!
//!     cargo run --example termination_broadcast

use amoebot::config::{generate, Shape};
use amoebot::scheduler::{run, RunOptions};

fn main() {
    for n in [5u32, 10, 20, 40] {
        let mut cfg = generate(Shape::Line { n }, 1).unwrap();
        cfg.seed = n as u64 + 3;
        cfg.flags.termination_broadcast = true;
        let out = run(&cfg, RunOptions::default()).unwrap();
        if !out.success {
            println!("line({n}): stalled (all outer coins tails), nothing to broadcast");
            continue;
        }
        let leader = out.phase_rounds["leader"];
        let done = out.phase_rounds["all_terminated"];
        println!(
            "line({n}): leader at round {leader}, all {n} particles halted by round {done} \
             (D = {}, broadcast took {} rounds)",
            out.diameter,
            done - leader
        );
    }
}
