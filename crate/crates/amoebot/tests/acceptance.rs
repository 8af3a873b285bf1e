//! Acceptance suite: every release-gating property of the simulator, one
//! test per criterion, each printing a `criterion N: PASS ...` line (run
//! with `-- --nocapture` to see them).
//!
//! Calibrated constants are pinned here, each with the measurement that
//! produced it (see `examples/calibrate.rs`); the stated tolerances are
//! part of the contract, not tunables.

use std::collections::HashMap;

use amoebot::boundary::link_agents;
use amoebot::config::{generate, Shape, SystemConfiguration};
use amoebot::grid::NodeCoord;
use amoebot::oracle::{self, classify_boundaries};
use amoebot::scheduler::{
    CoinPolicy, RunOptions, RunOutcome, SchedulerPolicy, Simulation, StallCause,
};

/// Max rounds/L observed at w = 4 during calibration (examples/calibrate.rs,
/// 50 seeded trials: 7.25); the scaling criterion allows three times that.
const ROUNDS_PER_L_CALIBRATION: f64 = 7.25;
/// Max solitude rounds/extent observed during calibration was 1.84; frozen
/// at 2.0 with the stated x3 tolerance.
const SOLITUDE_ROUNDS_PER_EXTENT: f64 = 2.0;
/// Identifier setup completed within one round of its hop count during
/// calibration; four rounds of slack absorb setup waits.
const ID_SETUP_ROUND_BUFFER: u64 = 4;
/// Max all-terminated/(L+D) observed during calibration was 4.1; frozen at
/// 4.2 with the stated x3 tolerance.
const TERMINATION_PER_LD: f64 = 4.2;

fn sized(shape: Shape, gen_seed: u64, run_seed: u64) -> SystemConfiguration {
    let cfg = generate(shape, gen_seed).expect("valid shape");
    let report = classify_boundaries(&cfg);
    assert!(
        report.perimeter_bound_ok(),
        "outer boundary shorter than sqrt(n) on {shape:?} seed {gen_seed}"
    );
    let mut cfg = cfg;
    cfg.seed = run_seed;
    cfg
}

fn full_suite() -> Vec<(Shape, u64, u64)> {
    let mut suite = Vec::new();
    let mut k = 0u64;
    for n in 2..=60u32 {
        for trial in 0..12u64 {
            suite.push((Shape::RandomConnected { n }, n as u64 * 101 + trial, k));
            k += 1;
        }
    }
    for n in [2u32, 3, 4, 6, 9, 13, 21, 33] {
        for trial in 0..15u64 {
            suite.push((Shape::Line { n }, trial, k));
            k += 1;
        }
    }
    for (w, h) in [
        (2u32, 2u32),
        (3, 3),
        (4, 4),
        (6, 6),
        (10, 10),
        (4, 2),
        (8, 3),
    ] {
        for trial in 0..16u64 {
            suite.push((Shape::Parallelogram { w, h }, trial, k));
            k += 1;
        }
    }
    for (outer, hole) in [(2u32, 1u32), (3, 1), (3, 2), (4, 2)] {
        for trial in 0..15u64 {
            suite.push((
                Shape::Annulus {
                    outer_radius: outer,
                    hole_radius: hole,
                },
                trial,
                k,
            ));
            k += 1;
        }
    }
    assert_eq!(suite.len(), 1000);
    suite
}

/// Criterion 1: over 1000 seeded runs spanning the shape families, every
/// run elects exactly one leader on the outer boundary. A run that exhausts
/// its budget must trace to a verified probabilistic cause (an identifier
/// tie on the outer boundary at the maximal value, or an outer boundary
/// whose agents all flipped tails); any unexplained failure is a bug. The
/// almost-sure variant must finish any such stalled configuration.
#[test]
fn criterion_01_correctness_suite() {
    let suite = full_suite();
    let total = suite.len();
    let mut successes = 0usize;
    let mut all_tails = 0usize;
    let mut ties = 0usize;
    for (shape, gen_seed, run_seed) in suite {
        let cfg = sized(shape, gen_seed, run_seed);
        let mut sim = Simulation::new(cfg.clone(), RunOptions::default()).unwrap();
        let outcome = sim.run_to_completion();
        if outcome.success {
            successes += 1;
            let leader = outcome.leader.unwrap();
            let report = classify_boundaries(&cfg);
            let truth = oracle::ground_truth(&report, &sim.snapshot(), Some(leader));
            assert_eq!(truth.leader_on_outer, Some(true));
            continue;
        }
        match sim.diagnose_outer_stall() {
            StallCause::AllTailsOuter => all_tails += 1,
            StallCause::TiedMaxIdentifiers(_) => ties += 1,
            StallCause::Unexplained => panic!(
                "unexplained stall on {shape:?} gen_seed {gen_seed} run_seed {run_seed}: \
                 outer identifiers {:?}",
                sim.outer_identifiers()
            ),
        }
        // The almost-sure variant must resolve the same configuration.
        let mut rescue = cfg.clone();
        rescue.flags.almost_sure = true;
        let rescued = Simulation::new(rescue, RunOptions::default())
            .unwrap()
            .run_to_completion();
        assert!(rescued.success, "almost-sure rescue failed for {shape:?}");
    }
    let failures = total - successes;
    assert_eq!(failures, all_tails + ties, "every failure is diagnosed");
    // Fair one-shot coins lose an outer boundary of length L with
    // probability 2^-L, so the tiniest systems stall occasionally; anything
    // beyond the verified causes (or more than 2% of the suite) is a bug.
    assert!(
        failures * 50 <= total,
        "{failures}/{total} failures exceeds the probabilistic allowance"
    );
    println!(
        "criterion 1: PASS - {successes}/{total} elected ({} verified all-tails, {} verified ties, 0 unexplained)",
        all_tails, ties
    );
}

/// Criterion 2: under the forced-tie construction (radix 1, all-heads
/// coins) the base algorithm exhausts 200 L rounds in every run, while the
/// almost-sure variant elects exactly one leader within that budget in
/// 100/100 runs.
#[test]
fn criterion_02_almost_sure_variant() {
    let mut shapes = Vec::new();
    for trial in 0..40u64 {
        shapes.push((Shape::Parallelogram { w: 4, h: 4 }, trial));
    }
    for trial in 0..30u64 {
        shapes.push((Shape::Line { n: 5 }, trial));
    }
    for trial in 0..30u64 {
        shapes.push((
            Shape::Annulus {
                outer_radius: 2,
                hole_radius: 1,
            },
            trial,
        ));
    }
    assert_eq!(shapes.len(), 100);
    let mut variant_rounds_max = 0f64;
    for (i, (shape, trial)) in shapes.into_iter().enumerate() {
        let mut cfg = sized(shape, trial, 31_000 + i as u64);
        cfg.radix = 1;

        let base = Simulation::new(
            cfg.clone(),
            RunOptions {
                coin: CoinPolicy::AllHeads,
                ..Default::default()
            },
        )
        .unwrap()
        .run_to_completion();
        assert!(!base.success, "base algorithm cannot break radix-1 ties");
        assert_eq!(base.rounds, 200 * base.outer_agents as u64);

        cfg.flags.almost_sure = true;
        let variant = Simulation::new(
            cfg,
            RunOptions {
                coin: CoinPolicy::AllHeads,
                ..Default::default()
            },
        )
        .unwrap()
        .run_to_completion();
        assert!(variant.success, "almost-sure run {i} failed");
        assert!(
            variant.rounds <= 200 * variant.outer_agents as u64,
            "almost-sure run {i} exceeded 200L rounds"
        );
        variant_rounds_max =
            variant_rounds_max.max(variant.rounds as f64 / variant.outer_agents as f64);
    }
    println!(
        "criterion 2: PASS - 100/100 forced-tie runs elected under the variant \
         (max rounds/L {variant_rounds_max:.2}); 100/100 base runs exhausted 200L rounds"
    );
}

/// Criterion 3: runtime scales linearly in the outer boundary length.
/// Median rounds/L varies by less than a factor of two across sizes, and no
/// run exceeds three times the calibrated w=4 constant.
#[test]
fn criterion_03_runtime_scaling() {
    let mut medians = Vec::new();
    let mut cal_max = 0f64;
    for w in [4u32, 6, 8, 10, 12, 16] {
        let mut ratios = Vec::new();
        for trial in 0..50u64 {
            let cfg = sized(
                Shape::Parallelogram { w, h: w },
                trial,
                2000 + trial * 31 + w as u64,
            );
            let outcome = amoebot::run(&cfg, RunOptions::default()).unwrap();
            assert!(outcome.success, "w={w} trial={trial} failed to elect");
            let ratio = outcome.rounds as f64 / outcome.outer_agents as f64;
            if w == 4 {
                cal_max = cal_max.max(ratio);
            }
            assert!(
                outcome.rounds as f64
                    <= 3.0 * ROUNDS_PER_L_CALIBRATION * outcome.outer_agents as f64,
                "w={w} trial={trial}: {} rounds exceeds 3x calibration",
                outcome.rounds
            );
            ratios.push(ratio);
        }
        ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
        medians.push(ratios[ratios.len() / 2]);
    }
    assert!(
        cal_max <= ROUNDS_PER_L_CALIBRATION,
        "w=4 calibration drifted: observed {cal_max:.2}"
    );
    let (lo, hi) = (
        medians.iter().cloned().fold(f64::INFINITY, f64::min),
        medians.iter().cloned().fold(0.0, f64::max),
    );
    assert!(
        hi < 2.0 * lo,
        "median rounds/L varies more than 2x across sizes: {medians:?}"
    );
    println!(
        "criterion 3: PASS - median rounds/L in [{lo:.2}, {hi:.2}] across w in 4..16 (< 2x spread)"
    );
}

/// Criterion 4: the outer boundary of every configuration the suite ever
/// generates spans at least sqrt(n) agents.
#[test]
fn criterion_04_perimeter_bound() {
    let mut checked = 0usize;
    for n in 2..=60u32 {
        for trial in 0..12u64 {
            let cfg = generate(Shape::RandomConnected { n }, n as u64 * 101 + trial).unwrap();
            assert!(classify_boundaries(&cfg).perimeter_bound_ok());
            checked += 1;
        }
    }
    for shape in [
        Shape::Line { n: 1 },
        Shape::Line { n: 2 },
        Shape::Line { n: 33 },
        Shape::Parallelogram { w: 10, h: 10 },
        Shape::Parallelogram { w: 8, h: 3 },
        Shape::Annulus {
            outer_radius: 4,
            hole_radius: 2,
        },
    ] {
        assert!(classify_boundaries(&generate(shape, 0).unwrap()).perimeter_bound_ok());
        checked += 1;
    }
    println!("criterion 4: PASS - L >= sqrt(n) on all {checked} generated configurations");
}

/// Scripts exactly two candidates on a line's boundary cycle, giving the
/// first a segment of the requested length.
fn two_candidate_line(len: u32) -> (SystemConfiguration, CoinPolicy) {
    let n = (len + 4).max(6);
    let cfg = generate(Shape::Line { n }, 0).unwrap();
    let graph = link_agents(&cfg);
    let cycle = &graph.cycles[0];
    assert!(cycle.len() > len as usize);
    let mut script = HashMap::new();
    for pos in [0usize, len as usize] {
        let a = &graph.agents[cycle[pos]];
        script.insert((a.node, a.skeleton.agent_id), true);
    }
    (cfg, CoinPolicy::Scripted(script))
}

/// Criterion 5: identifier setup for a segment of length l spends at most
/// 2l^2 + 4l token hops and finishes within a few rounds of its hop count.
#[test]
fn criterion_05_id_setup_quadratic() {
    let mut worst_ratio = 0f64;
    for len in 1..=20u32 {
        let (mut cfg, coin) = two_candidate_line(len);
        cfg.seed = 4_000 + len as u64;
        let mut sim = Simulation::new(
            cfg,
            RunOptions {
                coin,
                max_rounds: Some(20_000),
                ..Default::default()
            },
        )
        .unwrap();
        let _ = sim.run_to_completion();
        let rec = sim
            .instrument()
            .candidates
            .iter()
            .find(|c| c.digits.len() as u32 == len)
            .expect("scripted segment present");
        let bound = (2 * len * len + 4 * len) as u64;
        assert!(
            (rec.hops as u64) <= bound,
            "length {len}: {} hops exceeds {bound}",
            rec.hops
        );
        let rounds = rec.finish_round.expect("setup completed") - rec.start_round;
        assert!(
            rounds <= rec.hops as u64 + ID_SETUP_ROUND_BUFFER,
            "length {len}: setup took {rounds} rounds for {} hops",
            rec.hops
        );
        worst_ratio = worst_ratio.max(rec.hops as f64 / bound as f64);
    }
    println!(
        "criterion 5: PASS - identifier setup hops within 2l^2+4l for l in 1..=20 \
         (worst utilization {worst_ratio:.2})"
    );
}

/// Criterion 6: from the first round at whose start all digit tokens of a
/// boundary exist, every token advances at least one step per round. The
/// engine asserts this at every round start; here a dedicated suite
/// confirms the checks actually ran and never dipped below zero slack.
#[test]
fn criterion_06_token_progress() {
    let mut checks = 0u64;
    let mut min_slack = i64::MAX;
    for (shape, seeds) in [
        (Shape::Parallelogram { w: 6, h: 6 }, 0..15u64),
        (Shape::Line { n: 12 }, 0..15u64),
        (
            Shape::Annulus {
                outer_radius: 3,
                hole_radius: 1,
            },
            0..15u64,
        ),
        (Shape::RandomConnected { n: 45 }, 0..15u64),
    ] {
        for seed in seeds {
            // The progress argument is activation-order agnostic; exercise
            // it under both scheduling policies.
            for policy in [SchedulerPolicy::Permutation, SchedulerPolicy::Uniform] {
                let cfg = sized(shape, seed, 5_000 + seed);
                let mut sim = Simulation::new(
                    cfg,
                    RunOptions {
                        policy,
                        ..Default::default()
                    },
                )
                .unwrap();
                let _ = sim.run_to_completion();
                checks += sim.instrument().progress_checks;
                min_slack = min_slack.min(sim.instrument().progress_min_slack);
            }
        }
    }
    assert!(checks > 10_000, "progress instrumentation barely exercised");
    assert!(min_slack >= 0);
    println!(
        "criterion 6: PASS - {checks} token-progress checks, minimum slack {min_slack} (>= 0), zero violations"
    );
}

/// Criterion 7: each solitude-verification execution over an extended
/// segment of length l completes within the calibrated c*l rounds
/// (tolerance x3), across extents up to the full boundary.
#[test]
fn criterion_07_solitude_linear() {
    let mut executions = 0usize;
    let mut max_ratio = 0f64;
    let mut max_extent = 0u32;
    for (shape, seeds, almost_sure) in [
        (Shape::Parallelogram { w: 6, h: 6 }, 0..15u64, false),
        (Shape::Line { n: 9 }, 0..20u64, false),
        (
            Shape::Annulus {
                outer_radius: 3,
                hole_radius: 1,
            },
            0..15u64,
            false,
        ),
        (Shape::RandomConnected { n: 40 }, 0..15u64, false),
        // The almost-sure variant runs one verification per surviving
        // candidate per epoch on the same machinery, covering every extent
        // from one agent up to the full boundary.
        (Shape::Parallelogram { w: 5, h: 5 }, 0..10u64, true),
        (Shape::RandomConnected { n: 30 }, 0..10u64, true),
    ] {
        for seed in seeds {
            let mut cfg = sized(shape, seed, 6_000 + seed);
            cfg.flags.almost_sure = almost_sure;
            let mut sim = Simulation::new(cfg, RunOptions::default()).unwrap();
            let _ = sim.run_to_completion();
            for rec in &sim.instrument().solitude_log {
                let rounds = (rec.finish_round - rec.trigger_round) as f64;
                let bound = 3.0 * SOLITUDE_ROUNDS_PER_EXTENT * rec.extent as f64;
                assert!(
                    rounds <= bound,
                    "solitude over extent {} took {rounds} rounds (bound {bound})",
                    rec.extent
                );
                max_ratio = max_ratio.max(rounds / rec.extent as f64);
                max_extent = max_extent.max(rec.extent);
                executions += 1;
            }
        }
    }
    assert!(executions > 100, "too few solitude executions observed");
    println!(
        "criterion 7: PASS - {executions} solitude executions up to extent {max_extent}, \
         max rounds/extent {max_ratio:.2} (bound {:.1})",
        3.0 * SOLITUDE_ROUNDS_PER_EXTENT
    );
}

/// Criterion 8: every boundary-identification traversal ends at k = 1 on
/// the outer boundary and k = 4 on inner boundaries (the engine asserts the
/// oracle match at each decision; the almost-sure variant exercises inner
/// boundaries deterministically).
#[test]
fn criterion_08_boundary_identification() {
    let mut outer = 0usize;
    let mut inner = 0usize;
    for seed in 0..25u64 {
        let mut cfg = sized(
            Shape::Annulus {
                outer_radius: 3,
                hole_radius: 1,
            },
            seed,
            7_000 + seed,
        );
        cfg.flags.almost_sure = true;
        let mut sim = Simulation::new(cfg, RunOptions::default()).unwrap();
        let outcome = sim.run_to_completion();
        assert!(outcome.success);
        for &(b, k) in &sim.instrument().boundary_id_results {
            let _ = b;
            match k {
                1 => outer += 1,
                4 => inner += 1,
                other => panic!("impossible external angle {other}"),
            }
        }
    }
    for seed in 0..25u64 {
        let cfg = sized(Shape::RandomConnected { n: 30 }, seed * 3 + 1, 7_100 + seed);
        let mut sim = Simulation::new(cfg, RunOptions::default()).unwrap();
        let _ = sim.run_to_completion();
        outer += sim
            .instrument()
            .boundary_id_results
            .iter()
            .filter(|&&(_, k)| k == 1)
            .count();
    }
    assert!(outer >= 25, "outer traversals under-exercised");
    assert!(inner >= 5, "inner traversals under-exercised");
    println!(
        "criterion 8: PASS - {outer} outer traversals ended at k=1, {inner} inner at k=4, zero exceptions"
    );
}

/// Criterion 9: agent memory is constant. The serialized fixed-slot state
/// has the same byte bound across systems from 4 to 1000 particles.
#[test]
fn criterion_09_constant_memory() {
    let mut sizes = Vec::new();
    for (shape, seed) in [
        (Shape::RandomConnected { n: 4 }, 1u64),
        (Shape::RandomConnected { n: 16 }, 2),
        (Shape::RandomConnected { n: 64 }, 3),
        (Shape::RandomConnected { n: 250 }, 4),
        (Shape::RandomConnected { n: 1000 }, 5),
        (Shape::Parallelogram { w: 16, h: 16 }, 6),
        (Shape::Line { n: 200 }, 7),
    ] {
        let cfg = sized(shape, seed, 8_000 + seed);
        let outcome = amoebot::run(&cfg, RunOptions::default()).unwrap();
        sizes.push((outcome.n, outcome.max_agent_state_bytes));
    }
    let bound = sizes[0].1;
    assert!(
        sizes.iter().all(|&(_, b)| b == bound),
        "agent state bound varies with n: {sizes:?}"
    );
    println!("criterion 9: PASS - max agent state {bound} bytes, identical across n in 4..=1000");
}

/// Criterion 10: token discipline. Comparison and vector FIFOs never exceed
/// capacity two, singleton slots never collide, and the relative order of
/// comparison tokens along each boundary never changes. Capacity and slot
/// checks are hard assertions inside the engine; the order invariant is
/// re-verified against a reference word every round.
#[test]
fn criterion_10_token_discipline() {
    let mut order_checks = 0u64;
    for (shape, seeds) in [
        (Shape::Parallelogram { w: 5, h: 5 }, 0..20u64),
        (Shape::Line { n: 14 }, 0..20u64),
        (
            Shape::Annulus {
                outer_radius: 3,
                hole_radius: 2,
            },
            0..20u64,
        ),
        (Shape::RandomConnected { n: 35 }, 0..20u64),
    ] {
        for seed in seeds {
            for policy in [SchedulerPolicy::Permutation, SchedulerPolicy::Uniform] {
                let cfg = sized(shape, seed, 9_000 + seed);
                let mut sim = Simulation::new(
                    cfg,
                    RunOptions {
                        policy,
                        ..Default::default()
                    },
                )
                .unwrap();
                let _ = sim.run_to_completion();
                order_checks += sim.instrument().order_checks;
            }
        }
    }
    assert!(
        order_checks > 1_000,
        "order instrumentation barely exercised"
    );
    println!(
        "criterion 10: PASS - capacity asserts plus {order_checks} whole-boundary order checks, zero violations"
    );
}

/// Criterion 11: with the termination broadcast enabled, every particle has
/// halted within the calibrated multiple of L + D rounds (tolerance x3).
#[test]
fn criterion_11_termination_broadcast() {
    let mut runs = 0usize;
    let mut max_ratio = 0f64;
    for (shape, seeds) in [
        (Shape::Parallelogram { w: 6, h: 6 }, 0..10u64),
        (Shape::Line { n: 12 }, 0..10u64),
        (
            Shape::Annulus {
                outer_radius: 4,
                hole_radius: 2,
            },
            0..10u64,
        ),
        (Shape::RandomConnected { n: 50 }, 0..10u64),
    ] {
        for seed in seeds {
            let mut cfg = sized(shape, seed, 10_000 + seed);
            cfg.flags.termination_broadcast = true;
            let outcome = amoebot::run(&cfg, RunOptions::default()).unwrap();
            if !outcome.success {
                continue; // probabilistic stall: criterion 1 territory
            }
            let done = outcome.phase_rounds["all_terminated"];
            let bound = 3.0 * TERMINATION_PER_LD * (outcome.outer_agents + outcome.diameter) as f64;
            assert!(
                (done as f64) <= bound,
                "{shape:?} seed {seed}: terminated at round {done}, bound {bound:.0}"
            );
            max_ratio =
                max_ratio.max(done as f64 / (outcome.outer_agents + outcome.diameter) as f64);
            runs += 1;
        }
    }
    assert!(runs >= 35, "too few successful broadcast runs");
    println!(
        "criterion 11: PASS - {runs} runs all-terminated within {:.1}x(L+D), max ratio {max_ratio:.2}",
        3.0 * TERMINATION_PER_LD
    );
}

/// Criterion 12: for 100 random configurations per size, the distributed
/// boundary setup produces exactly the oracle's agent cycles.
#[test]
fn criterion_12_boundary_equality() {
    let canon = |mut keys: Vec<(NodeCoord, u8)>| -> Vec<(NodeCoord, u8)> {
        let rot = keys
            .iter()
            .enumerate()
            .min_by_key(|(_, k)| **k)
            .map(|(i, _)| i)
            .unwrap_or(0);
        keys.rotate_left(rot);
        keys
    };
    let mut configs = 0usize;
    for n in 2..=40u32 {
        for trial in 0..100u64 {
            let mut cfg = generate(Shape::RandomConnected { n }, n as u64 * 977 + trial).unwrap();
            cfg.seed = trial; // port offsets vary with the run seed
            let graph = link_agents(&cfg);
            let report = classify_boundaries(&cfg);
            let mut ours: Vec<_> = graph
                .cycles
                .iter()
                .map(|c| {
                    canon(
                        c.iter()
                            .map(|&i| (graph.agents[i].node, graph.agents[i].run_start.index()))
                            .collect(),
                    )
                })
                .collect();
            let mut reference: Vec<_> = report
                .boundaries
                .iter()
                .map(|b| {
                    canon(
                        b.agents
                            .iter()
                            .map(|a| (a.node, a.run_start.index()))
                            .collect(),
                    )
                })
                .collect();
            ours.sort();
            reference.sort();
            assert_eq!(ours, reference, "n={n} trial={trial}");
            configs += 1;
        }
    }
    assert_eq!(configs, 3900);
    println!(
        "criterion 12: PASS - distributed cycles equal oracle cycles on {configs} random configurations"
    );
}

/// The reversed-identifier copy is exact: along every completed segment the
/// reversed digits read back as the identifier reversed.
#[test]
fn reversed_copy_is_exact() {
    let mut segments = 0usize;
    for seed in 0..12u64 {
        let cfg = sized(
            Shape::RandomConnected { n: 30 },
            seed * 7 + 3,
            11_000 + seed,
        );
        let mut sim = Simulation::new(cfg, RunOptions::default()).unwrap();
        let _ = sim.run_to_completion();
        let heads: Vec<_> = sim
            .instrument()
            .candidates
            .iter()
            .map(|c| (c.head, c.digits.clone()))
            .collect();
        for (head, digits) in heads {
            let pairs = sim.segment_digits(head);
            if pairs.is_empty() {
                continue; // setup had not finished when the run ended
            }
            let forward: Vec<u32> = pairs.iter().map(|&(d, _)| d).collect();
            let mut reversed: Vec<u32> = pairs.iter().map(|&(_, r)| r).collect();
            assert_eq!(forward, digits);
            reversed.reverse();
            assert_eq!(reversed, digits);
            segments += 1;
        }
    }
    assert!(segments > 50);
}

/// Uniform-policy runs satisfy the same scaling bound; the analysis is
/// activation-order agnostic.
#[test]
fn uniform_policy_scaling_holds() {
    for seed in 0..10u64 {
        let cfg = sized(Shape::Parallelogram { w: 5, h: 5 }, seed, 12_000 + seed);
        let outcome = amoebot::run(
            &cfg,
            RunOptions {
                policy: SchedulerPolicy::Uniform,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(outcome.success);
        assert!(
            (outcome.rounds as f64) <= 3.0 * ROUNDS_PER_L_CALIBRATION * outcome.outer_agents as f64
        );
    }
}

/// Forced all-heads coins make every agent a candidate with a one-digit
/// segment.
#[test]
fn all_heads_coins_make_singleton_segments() {
    let cfg = sized(Shape::Parallelogram { w: 3, h: 3 }, 0, 13_000);
    let mut sim = Simulation::new(
        cfg,
        RunOptions {
            coin: CoinPolicy::AllHeads,
            max_rounds: Some(50),
            ..Default::default()
        },
    )
    .unwrap();
    let _ = sim.run_to_completion();
    for (_, agent) in sim.agents() {
        assert!(agent.election.role.heads_segment());
    }
    for rec in sim.instrument().candidates.iter() {
        assert_eq!(rec.digits.len(), 1);
    }
}

/// Spot check of the metrics row format against its header.
#[test]
fn metrics_row_matches_header() {
    let cfg = sized(Shape::Line { n: 4 }, 0, 14_000);
    let outcome = amoebot::run(&cfg, RunOptions::default()).unwrap();
    assert_eq!(
        outcome.metrics_row().split(',').count(),
        RunOutcome::METRICS_HEADER.split(',').count()
    );
}
