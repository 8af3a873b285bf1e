//! Property tests for the geometric and serialization invariants.

use proptest::prelude::*;

use amoebot::boundary::{global_direction, link_agents, local_port, port_offset};
use amoebot::config::{self, Shape};
use amoebot::grid::{direction_between, turn_value, Direction, NodeCoord};
use amoebot::oracle::{classify_boundaries, compare_identifiers, BoundaryKind};

fn arb_node() -> impl Strategy<Value = NodeCoord> {
    (-1000i32..1000, -1000i32..1000).prop_map(|(x, y)| NodeCoord::new(x, y))
}

proptest! {
    #[test]
    fn direction_arithmetic_round_trips(v in arb_node(), d in 0u8..6) {
        let dir = Direction::from_index(d as i32);
        let w = v.neighbors()[dir.index() as usize];
        prop_assert_eq!(direction_between(v, w).unwrap(), dir);
        prop_assert_eq!(w.neighbors()[dir.opposite().index() as usize], v);
    }

    #[test]
    fn opposite_is_an_involution(d in 0u8..6) {
        let dir = Direction::from_index(d as i32);
        prop_assert_eq!(dir.opposite().opposite(), dir);
        prop_assert_ne!(dir.opposite(), dir);
    }

    #[test]
    fn turn_value_stays_in_range(len in 1u8..=5) {
        let t = turn_value(len).unwrap();
        prop_assert!((-1..=3).contains(&t));
    }

    #[test]
    fn port_offset_is_stable_and_bounded(seed in any::<u64>(), v in arb_node()) {
        let o = port_offset(seed, v);
        prop_assert!(o < 6);
        prop_assert_eq!(o, port_offset(seed, v));
        for port in 0..6u8 {
            prop_assert_eq!(local_port(o, global_direction(o, port)), port);
        }
    }

    #[test]
    fn identifier_order_is_total_and_length_first(
        a in proptest::collection::vec(0u32..256, 0..6),
        b in proptest::collection::vec(0u32..256, 0..6),
    ) {
        use std::cmp::Ordering;
        let ab = compare_identifiers(&a, &b);
        let ba = compare_identifiers(&b, &a);
        prop_assert_eq!(ab, ba.reverse());
        if a.len() != b.len() {
            prop_assert_eq!(ab, a.len().cmp(&b.len()));
        }
        prop_assert_eq!(compare_identifiers(&a, &a), Ordering::Equal);
    }

    #[test]
    fn config_text_round_trips(n in 1u32..40, seed in any::<u64>()) {
        let cfg = config::generate(Shape::RandomConnected { n }, seed).unwrap();
        let back = config::parse(&config::serialize(&cfg)).unwrap();
        prop_assert_eq!(back.occupied, cfg.occupied);
        prop_assert_eq!(back.expanded_pairs, cfg.expanded_pairs);
    }

    #[test]
    fn random_systems_have_one_outer_boundary_and_valid_turning(
        n in 2u32..35,
        seed in any::<u64>(),
    ) {
        let cfg = config::generate(Shape::RandomConnected { n }, seed).unwrap();
        let report = classify_boundaries(&cfg);
        let outer: Vec<_> = report
            .boundaries
            .iter()
            .filter(|b| b.kind == BoundaryKind::Outer)
            .collect();
        prop_assert_eq!(outer.len(), 1);
        prop_assert_eq!(outer[0].turning_number(), 6);
        for b in &report.boundaries {
            if b.kind == BoundaryKind::Inner {
                prop_assert_eq!(b.turning_number(), -6);
            }
        }
        prop_assert!(report.perimeter_bound_ok());
    }

    #[test]
    fn linked_cycles_cover_all_agents_once(n in 2u32..30, seed in any::<u64>()) {
        let mut cfg = config::generate(Shape::RandomConnected { n }, seed).unwrap();
        cfg.seed = seed ^ 0xabcd;
        let graph = link_agents(&cfg);
        let covered: usize = graph.cycles.iter().map(|c| c.len()).sum();
        prop_assert_eq!(covered, graph.agents.len());
        for (i, a) in graph.agents.iter().enumerate() {
            prop_assert_eq!(graph.agents[a.succ].pred, i);
            prop_assert_eq!(graph.agents[a.pred].succ, i);
        }
        let report = classify_boundaries(&cfg);
        let total: usize = report.boundaries.iter().map(|b| b.agents.len()).sum();
        prop_assert_eq!(covered, total);
    }
}
