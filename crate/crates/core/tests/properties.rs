mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use lexsg::casegen::{gen_random, FuzzSpec};
use lexsg::numeric::ratio;
use lexsg::oracle;
use lexsg::solve_lex::evaluate_strategy;
use lexsg::solve_single::gadget_game;
use lexsg::*;
use proptest::prelude::*;

fn spec() -> impl Strategy<Value = FuzzSpec> {
    (2usize..7, 1usize..4, 1usize..4, 1usize..4, any::<u64>()).prop_map(|(n, a, b, k, seed)| FuzzSpec {
        num_states: n,
        max_actions: a,
        max_branching: b,
        num_objectives: k,
        seed,
    })
}

fn exact(g: &StochasticGame, o: &LexObjective) -> SolveReport<Rational> {
    solve_lex::<Rational>(g, o, &SolverConfig::exact()).expect("exact solve")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn serialization_round_trips(spec in spec()) {
        let (g, o) = gen_random(&spec).unwrap();
        let text = serialize_model(&g, Some(&o));
        let back = parse_game(&text).unwrap();
        prop_assert_eq!(&back.game, &g);
        prop_assert_eq!(back.objective.as_ref(), Some(&o));
        prop_assert_eq!(serialize_model(&back.game, back.objective.as_ref()), text);
    }

    #[test]
    fn generation_is_deterministic(spec in spec()) {
        let (g1, o1) = gen_random(&spec).unwrap();
        let (g2, o2) = gen_random(&spec).unwrap();
        prop_assert_eq!(serialize_model(&g1, Some(&o1)), serialize_model(&g2, Some(&o2)));
    }

    #[test]
    fn weighted_reach_matches_gadget(spec in spec(), nums in prop::collection::vec(0i64..=8, 6)) {
        let (g, _) = gen_random(&spec).unwrap();
        let n = g.num_states();
        let weights: BTreeMap<StateId, Rational> =
            (0..n).filter(|s| s % 2 == 1).map(|s| (s, ratio(nums[s % nums.len()], 8))).collect();
        prop_assume!(!weights.is_empty());
        let q = QuantifiedObjective::new(ObjectiveKind::Reach, weights).unwrap();
        let direct = solve_reach::<Rational>(&g, &q, &SolverConfig::exact()).unwrap();
        let (gadget, goal) = gadget_game(&g, &q);
        let plain = QuantifiedObjective::indicator(ObjectiveKind::Reach, &goal).unwrap();
        let via = solve_reach::<Rational>(&gadget, &plain, &SolverConfig::exact()).unwrap();
        prop_assert_eq!(&direct.values.values[..], &via.values.values[..n]);
    }

    #[test]
    fn reach_and_safe_are_complements(spec in spec()) {
        let (g, o) = gen_random(&spec).unwrap();
        let target = o.entries()[0].target.clone();
        let reach = QuantifiedObjective::indicator(ObjectiveKind::Reach, &target).unwrap();
        let safe = reach.with_kind(ObjectiveKind::Safe);
        let r = solve_reach::<Rational>(&g, &reach, &SolverConfig::exact()).unwrap();
        let s = solve_safe::<Rational>(&swap_owners(&g), &safe, &SolverConfig::exact()).unwrap();
        for (x, y) in r.values.values.iter().zip(&s.values.values) {
            prop_assert_eq!(x + y, ratio(1, 1));
        }
    }

    #[test]
    fn prefix_values_are_truncated_values(spec in spec()) {
        let (g, o) = gen_random(&spec).unwrap();
        let full = exact(&g, &o);
        for k in 1..o.len() {
            let part = exact(&g, &o.truncated(k).unwrap());
            for s in 0..g.num_states() {
                prop_assert_eq!(&full.values.get(s)[..k], part.values.get(s));
            }
        }
    }

    #[test]
    fn restriction_keeps_values(spec in spec()) {
        let (g, o) = gen_random(&spec).unwrap();
        if !o.is_absorbing(&g) {
            return Ok(());
        }
        let rep = exact(&g, &o);
        let main = rep.main.as_ref().expect("absorbing report");
        let again = exact(&main.final_game, &o);
        prop_assert_eq!(&again.values, &rep.values);
    }

    #[test]
    fn returned_strategy_attains_values(spec in spec()) {
        let (g, o) = gen_random(&spec).unwrap();
        let rep = exact(&g, &o);
        let achieved = evaluate_strategy::<Rational>(&g, &o, &rep.strategy, &SolverConfig::exact()).unwrap();
        prop_assert_eq!(&achieved, &rep.values);
    }

    #[test]
    fn solver_matches_enumeration(spec in spec()) {
        let (g, o) = gen_random(&spec).unwrap();
        let truth = oracle::brute_force_lex(&g, &o, &oracle::OracleLimits::default()).unwrap();
        prop_assert_eq!(&exact(&g, &o).values, &truth);
    }

    #[test]
    fn dual_values_are_complements(spec in spec()) {
        let (g, o) = gen_random(&spec).unwrap();
        let check = determinacy_check::<Rational>(&g, &o, &SolverConfig::exact()).unwrap();
        prop_assert_eq!(check.deviation, ratio(0, 1));
    }

    #[test]
    fn vi_tracks_exact(spec in spec()) {
        let (g, o) = gen_random(&spec).unwrap();
        let e = exact(&g, &o);
        let v = solve_lex::<f64>(&g, &o, &SolverConfig::vi()).unwrap();
        prop_assert!(max_gap(&e.values.to_rational(), &v.values.to_f64()) <= 1e-6);
    }
}

#[test]
fn action_order_does_not_matter() {
    for (_, g, o) in corpus(40) {
        let states: Vec<_> = g
            .states()
            .iter()
            .map(|st| {
                let mut st = st.clone();
                st.actions.reverse();
                st
            })
            .collect();
        let flipped = StochasticGame::new(states, g.initial()).unwrap();
        assert_eq!(exact(&flipped, &o).values, exact(&g, &o).values);
    }
}

#[test]
fn running_example_sink_values_are_trivial() {
    let (g, o) = load(FIG1);
    let rep = exact(&g, &o);
    let sinks: BTreeSet<StateId> = sinks(&g);
    for s in sinks {
        for (x, entry) in rep.values.get(s).iter().zip(o.entries()) {
            let hit = entry.target.contains(&s);
            let expected = match entry.kind {
                ObjectiveKind::Reach => hit,
                ObjectiveKind::Safe => !hit,
            };
            assert_eq!(*x, ratio(expected as i64, 1), "state {}", g.name(s));
        }
    }
}
