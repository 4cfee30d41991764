#![allow(dead_code)]

use lexsg::casegen::{gen_random, FuzzSpec};
use lexsg::numeric::rational_to_f64;
use lexsg::{parse_game, LexObjective, Rational, StochasticGame};

pub const FIG1: &str = include_str!("../../../../models/fig1.sg");
pub const FIG3: &str = include_str!("../../../../models/fig3.sg");

pub fn load(text: &str) -> (StochasticGame, LexObjective) {
    let m = parse_game(text).expect("model parses");
    (m.game, m.objective.expect("model has objectives"))
}

/// Fuzz spec for corpus entry `i`: 2 to 6 states, up to 3 actions, 1 to 3 objectives.
pub fn corpus_spec(i: u64) -> FuzzSpec {
    FuzzSpec {
        num_states: 2 + (i % 5) as usize,
        max_actions: 2 + (i % 2) as usize,
        max_branching: 3,
        num_objectives: 1 + ((i / 5) % 3) as usize,
        seed: 1000 + i,
    }
}

pub fn corpus(size: u64) -> Vec<(u64, StochasticGame, LexObjective)> {
    (0..size)
        .map(|i| {
            let (g, o) = gen_random(&corpus_spec(i)).expect("fuzz game");
            (i, g, o)
        })
        .collect()
}

pub fn max_gap(exact: &[Vec<Rational>], approx: &[Vec<f64>]) -> f64 {
    exact
        .iter()
        .zip(approx)
        .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (rational_to_f64(x) - y).abs()))
        .fold(0.0, f64::max)
}

pub fn idx(g: &StochasticGame, name: &str) -> usize {
    g.state_index(name).unwrap_or_else(|| panic!("no state {name}"))
}
