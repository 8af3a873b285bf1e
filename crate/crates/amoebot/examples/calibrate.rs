//! Measures the runtime constants that the acceptance suite pins down
//! (rounds per boundary agent, solitude rounds per extent, identifier-setup
//! slack, termination rounds per L+D). Re-run after algorithm changes to
//! confirm the frozen constants still hold with margin.
//!
//!     cargo run --release --example calibrate

use std::collections::HashMap;

use amoebot::boundary::link_agents;
use amoebot::config::{generate, Shape};
use amoebot::scheduler::{CoinPolicy, RunOptions, SchedulerPolicy, Simulation};

fn main() {
    // Election rounds per outer-boundary agent at the calibration size.
    let mut max_ratio: f64 = 0.0;
    for trial in 0..50u64 {
        let mut cfg = generate(Shape::Parallelogram { w: 4, h: 4 }, trial).unwrap();
        cfg.seed = 2000 + trial * 31 + 4;
        let mut sim = Simulation::new(cfg, RunOptions::default()).unwrap();
        let out = sim.run_to_completion();
        assert!(out.success);
        max_ratio = max_ratio.max(out.rounds as f64 / out.outer_agents as f64);
    }
    println!("parallelogram w=4, 50 trials: max rounds/L = {max_ratio:.3}");

    // Solitude verification rounds per extended-segment agent.
    let mut max_sol: f64 = 0.0;
    for (shape, almost_sure) in [
        (Shape::Parallelogram { w: 6, h: 6 }, false),
        (Shape::Line { n: 9 }, false),
        (
            Shape::Annulus {
                outer_radius: 3,
                hole_radius: 1,
            },
            false,
        ),
        (Shape::RandomConnected { n: 40 }, false),
        (Shape::Parallelogram { w: 5, h: 5 }, true),
    ] {
        for seed in 0..20u64 {
            let mut cfg = generate(shape, seed).unwrap();
            cfg.seed = seed * 7 + 1;
            cfg.flags.almost_sure = almost_sure;
            let mut sim = Simulation::new(cfg, RunOptions::default()).unwrap();
            let _ = sim.run_to_completion();
            for rec in &sim.instrument().solitude_log {
                let rounds = (rec.finish_round - rec.trigger_round) as f64;
                max_sol = max_sol.max(rounds / rec.extent as f64);
            }
        }
    }
    println!("solitude verification: max rounds/extent = {max_sol:.3}");

    // Identifier setup: hop utilization of the 2l^2+4l budget and how many
    // extra rounds beyond the hop count completion took.
    let mut max_util: f64 = 0.0;
    let mut max_slack: i64 = 0;
    for len in 1..=20u32 {
        let n = (len + 4).max(6);
        let cfg = generate(Shape::Line { n }, 0).unwrap();
        let graph = link_agents(&cfg);
        let cycle = &graph.cycles[0];
        let mut script = HashMap::new();
        for pos in [0usize, len as usize] {
            let a = &graph.agents[cycle[pos]];
            script.insert((a.node, a.skeleton.agent_id), true);
        }
        let mut sim = Simulation::new(
            cfg,
            RunOptions {
                coin: CoinPolicy::Scripted(script),
                max_rounds: Some(20_000),
                ..Default::default()
            },
        )
        .unwrap();
        let _ = sim.run_to_completion();
        for rec in sim.instrument().candidates.iter() {
            if rec.digits.len() as u32 != len {
                continue;
            }
            let bound = (2 * len * len + 4 * len) as f64;
            max_util = max_util.max(rec.hops as f64 / bound);
            let rounds = rec.finish_round.unwrap() - rec.start_round;
            max_slack = max_slack.max(rounds as i64 - rec.hops as i64);
        }
    }
    println!("id setup: max hops/(2l^2+4l) = {max_util:.3}, max rounds-hops slack = {max_slack}");

    // Termination broadcast: total rounds over L + D.
    let mut max_term: f64 = 0.0;
    for shape in [
        Shape::Parallelogram { w: 6, h: 6 },
        Shape::Line { n: 12 },
        Shape::Annulus {
            outer_radius: 4,
            hole_radius: 2,
        },
        Shape::RandomConnected { n: 50 },
    ] {
        for seed in 0..10u64 {
            let mut cfg = generate(shape, seed + 2).unwrap();
            cfg.seed = seed + 79;
            cfg.flags.termination_broadcast = true;
            let mut sim = Simulation::new(cfg, RunOptions::default()).unwrap();
            let out = sim.run_to_completion();
            if !out.success {
                continue;
            }
            let done = out.phase_rounds["all_terminated"] as f64;
            max_term = max_term.max(done / (out.outer_agents + out.diameter) as f64);
        }
    }
    println!("termination broadcast: max all_terminated/(L+D) = {max_term:.3}");

    // The uniform scheduler should stay within the same envelope.
    let mut max_uni: f64 = 0.0;
    for seed in 0..20u64 {
        let mut cfg = generate(Shape::Parallelogram { w: 5, h: 5 }, seed).unwrap();
        cfg.seed = seed;
        let mut sim = Simulation::new(
            cfg,
            RunOptions {
                policy: SchedulerPolicy::Uniform,
                ..Default::default()
            },
        )
        .unwrap();
        let out = sim.run_to_completion();
        assert!(out.success);
        max_uni = max_uni.max(out.rounds as f64 / out.outer_agents as f64);
    }
    println!("uniform scheduler, w=5: max rounds/L = {max_uni:.3}");
}
