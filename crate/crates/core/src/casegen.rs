//! Seeded generators for case-study games and random fuzz games.
//!
//! The grid games follow the qualitative descriptions of the hallway and
//! avoid-the-observer studies; their movement mixtures are fixed constants
//! chosen here, not measured from any reference model.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::game::{Action, Distribution, GameError, Player, State, StateId, StochasticGame};
use crate::numeric::{ratio, Rational};
use crate::objective::{LexObjective, Objective, ObjectiveError, MAX_OBJECTIVES};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("invalid generator spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
}

/// Grid-world parameters shared by the hallway and avoid generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSpec {
    pub width: usize,
    pub height: usize,
    /// Probability that a robot move fails and leaves it in place.
    pub slip: Rational,
    /// Probability of damage when the robot enters a hazard cell.
    pub damage: Rational,
    /// Probability that one search at the item cell finds the item.
    pub search: Rational,
    pub seed: u64,
}

impl GridSpec {
    pub fn new(width: usize, height: usize) -> Self {
        GridSpec { width, height, slip: ratio(1, 10), damage: ratio(1, 100), search: ratio(1, 10), seed: 0 }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.width < 2 || self.height < 2 {
            return Err(GenError::Spec("grid dimensions must be at least 2".into()));
        }
        for (name, p) in [("slip", &self.slip), ("damage", &self.damage), ("search", &self.search)] {
            if *p < Rational::zero() || *p > Rational::one() {
                return Err(GenError::Spec(format!("{name} probability outside [0,1]")));
            }
        }
        Ok(())
    }
}

/// Parameters of the random game fuzzer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzSpec {
    pub num_states: usize,
    pub max_actions: usize,
    pub max_branching: usize,
    pub num_objectives: usize,
    pub seed: u64,
}

impl FuzzSpec {
    pub fn validate(&self) -> Result<(), GenError> {
        if self.num_states == 0 || self.max_actions == 0 || self.max_branching == 0 || self.num_objectives == 0 {
            return Err(GenError::Spec("all fuzz parameters must be positive".into()));
        }
        if self.num_objectives > 3 {
            return Err(GenError::Spec("at most 3 objectives".into()));
        }
        Ok(())
    }
}

/// Dice-like race: `rounds` rounds, each a Max turn then a Min turn. A turn
/// either rolls a fair die with `faces` faces or holds for a fixed score.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiceSpec {
    pub rounds: usize,
    pub faces: usize,
}

impl DiceSpec {
    pub fn validate(&self) -> Result<(), GenError> {
        if self.rounds == 0 || self.faces < 2 {
            return Err(GenError::Spec("dice needs at least 1 round and 2 faces".into()));
        }
        Ok(())
    }
}

/// Collects states by name so transitions can be written before their
/// targets exist.
#[derive(Default)]
struct Builder {
    index: BTreeMap<String, StateId>,
    names: Vec<String>,
    owners: Vec<Option<Player>>,
    actions: Vec<Vec<(String, Vec<(StateId, Rational)>)>>,
}

impl Builder {
    fn id(&mut self, name: &str) -> StateId {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len();
        self.index.insert(name.to_string(), i);
        self.names.push(name.to_string());
        self.owners.push(None);
        self.actions.push(Vec::new());
        i
    }

    fn state(&mut self, name: &str, owner: Player) -> StateId {
        let i = self.id(name);
        self.owners[i] = Some(owner);
        i
    }

    /// Adds an action; equal successors are merged.
    fn act(&mut self, s: StateId, label: &str, outcomes: Vec<(StateId, Rational)>) {
        let mut merged: Vec<(StateId, Rational)> = Vec::new();
        for (t, p) in outcomes {
            if p.is_zero() {
                continue;
            }
            match merged.iter_mut().find(|(u, _)| *u == t) {
                Some((_, q)) => *q += p,
                None => merged.push((t, p)),
            }
        }
        self.actions[s].push((label.to_string(), merged));
    }

    fn finish(self, initial: StateId) -> Result<StochasticGame, GenError> {
        let states = self
            .names
            .into_iter()
            .zip(self.owners)
            .zip(self.actions)
            .enumerate()
            .map(|(i, ((name, owner), acts))| {
                let actions = if acts.is_empty() {
                    vec![Action { label: crate::game::SELF_LABEL.into(), dist: Distribution::dirac(i) }]
                } else {
                    acts.into_iter()
                        .map(|(label, out)| Ok(Action { label, dist: Distribution::new(out)? }))
                        .collect::<Result<_, GameError>>()?
                };
                Ok(State { name, owner: owner.unwrap_or(Player::Max), actions })
            })
            .collect::<Result<Vec<_>, GameError>>()?;
        Ok(StochasticGame::new(states, Some(initial))?)
    }
}

const MOVES: [(&str, i64, i64); 4] = [("north", 0, 1), ("east", 1, 0), ("south", 0, -1), ("west", -1, 0)];

fn step(spec: &GridSpec, x: usize, y: usize, dx: i64, dy: i64) -> Option<(usize, usize)> {
    let nx = x as i64 + dx;
    let ny = y as i64 + dy;
    (nx >= 0 && ny >= 0 && nx < spec.width as i64 && ny < spec.height as i64).then_some((nx as usize, ny as usize))
}

/// Random wander of a patrolling agent along one axis: stay 1/2, each
/// direction 1/4, blocked moves fold into staying.
fn wander(pos: usize, len: usize) -> Vec<(usize, Rational)> {
    let mut out = vec![(pos, ratio(1, 2))];
    for next in [pos.checked_sub(1), Some(pos + 1).filter(|&p| p < len)] {
        out.push((next.unwrap_or(pos), ratio(1, 4)));
    }
    out
}

fn flag(damaged: bool) -> &'static str {
    if damaged {
        "dmg"
    } else {
        "ok"
    }
}

/// Hallway: a robot (Max) must reach a human patrolling the last column
/// (Min when the robot is adjacent, random otherwise) while avoiding damage
/// in hazard cells. Objective: (Reach saved, Safe damaged).
///
/// Hazards sit in odd columns below the top row. The robot starts at the
/// bottom-left corner, the human at the top of the last column.
pub fn gen_hallway(spec: &GridSpec) -> Result<(StochasticGame, LexObjective), GenError> {
    spec.validate()?;
    let (w, h) = (spec.width, spec.height);
    let hx = w - 1;
    let hazard = |x: usize, y: usize| x % 2 == 1 && y + 1 < h;
    let mut b = Builder::default();
    let robot = |x: usize, y: usize, hy: usize, d: bool| format!("r{x}_{y}_h{hy}_{}", flag(d));
    let human = |x: usize, y: usize, hy: usize, d: bool| format!("m{x}_{y}_h{hy}_{}", flag(d));
    let saved = |d: bool| format!("saved_{}", flag(d));
    let start = b.state(&robot(0, 0, h - 1, false), Player::Max);
    let saved_ok = b.state(&saved(false), Player::Max);
    let saved_dmg = b.state(&saved(true), Player::Max);

    for d in [false, true] {
        for x in 0..w {
            for y in 0..h {
                for hy in 0..h {
                    if (x, y) == (hx, hy) {
                        continue;
                    }
                    let r = b.state(&robot(x, y, hy, d), Player::Max);
                    let stay = b.id(&human(x, y, hy, d));
                    for (label, dx, dy) in MOVES {
                        let Some((nx, ny)) = step(spec, x, y, dx, dy) else { continue };
                        let moved = |b: &mut Builder, nd: bool| {
                            if (nx, ny) == (hx, hy) {
                                b.id(&saved(nd))
                            } else {
                                b.id(&human(nx, ny, hy, nd))
                            }
                        };
                        let success = Rational::one() - &spec.slip;
                        let mut out = vec![(stay, spec.slip.clone())];
                        if hazard(nx, ny) && !d {
                            let hurt = moved(&mut b, true);
                            let fine = moved(&mut b, false);
                            out.push((hurt, &success * &spec.damage));
                            out.push((fine, &success * (Rational::one() - &spec.damage)));
                        } else {
                            let to = moved(&mut b, d);
                            out.push((to, success));
                        }
                        b.act(r, label, out);
                    }

                    let m = b.state(&human(x, y, hy, d), Player::Min);
                    let land = |b: &mut Builder, ny: usize| {
                        if (x, y) == (hx, ny) {
                            b.id(&saved(d))
                        } else {
                            b.id(&robot(x, y, ny, d))
                        }
                    };
                    let adjacent = x.abs_diff(hx) + y.abs_diff(hy) == 1;
                    if adjacent {
                        for (label, ny) in [("stay", Some(hy)), ("down", hy.checked_sub(1)), ("up", Some(hy + 1))] {
                            if let Some(ny) = ny.filter(|&v| v < h) {
                                let to = land(&mut b, ny);
                                b.act(m, label, vec![(to, Rational::one())]);
                            }
                        }
                    } else {
                        let out = wander(hy, h).into_iter().map(|(ny, p)| (land(&mut b, ny), p)).collect();
                        b.act(m, "wander", out);
                    }
                }
            }
        }
    }
    let game = b.finish(start)?;
    let damaged: BTreeSet<StateId> = (0..game.num_states()).filter(|&s| game.name(s).ends_with("_dmg")).collect();
    let obj = LexObjective::new(vec![Objective::reach([saved_ok, saved_dmg]), Objective::safe(damaged)])?;
    Ok((game, obj))
}

/// Avoid the observer: an intruder (Max) moves east or south, waits, or
/// searches the item cell, and must cross the row patrolled by an observer
/// (Min within distance 1, random otherwise). Objective:
/// (Safe caught, Reach exit, Reach item found).
///
/// The intruder starts at the top-left corner and exits at the bottom-right
/// corner; the observer patrols the middle row. The seed picks the item cell
/// among cells outside the patrol row.
pub fn gen_avoid(spec: &GridSpec) -> Result<(StochasticGame, LexObjective), GenError> {
    spec.validate()?;
    let (w, h) = (spec.width, spec.height);
    // Row 0 is the top; the intruder moves towards larger y.
    let patrol = h / 2;
    let exit = (w - 1, h - 1);
    let start_cell = (0, 0);
    let candidates: Vec<(usize, usize)> = (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .filter(|&(x, y)| y != patrol && (x, y) != exit && (x, y) != start_cell)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let item = *candidates.choose(&mut rng).unwrap_or(&start_cell);

    let mut b = Builder::default();
    let intruder = |x: usize, y: usize, ox: usize, f: bool| format!("i{x}_{y}_o{ox}_{}", found(f));
    let observer = |x: usize, y: usize, ox: usize, f: bool| format!("o{x}_{y}_o{ox}_{}", found(f));
    let start = b.state(&intruder(0, 0, w / 2, false), Player::Max);
    let caught = [b.state("caught_none", Player::Max), b.state("caught_item", Player::Max)];
    let exits = [b.state("exit_none", Player::Max), b.state("exit_item", Player::Max)];

    for f in [false, true] {
        for x in 0..w {
            for y in 0..h {
                for ox in 0..w {
                    if (x, y) == (ox, patrol) || (x, y) == exit {
                        continue;
                    }
                    let i = b.state(&intruder(x, y, ox, f), Player::Max);
                    let after = |b: &mut Builder, nx: usize, ny: usize, nf: bool| {
                        if (nx, ny) == exit {
                            exits[nf as usize]
                        } else if (nx, ny) == (ox, patrol) {
                            caught[nf as usize]
                        } else {
                            b.id(&observer(nx, ny, ox, nf))
                        }
                    };
                    for (label, dx, dy) in [("east", 1, 0), ("south", 0, 1)] {
                        if x + dx < w && y + dy < h {
                            let to = after(&mut b, x + dx, y + dy, f);
                            b.act(i, label, vec![(to, Rational::one())]);
                        }
                    }
                    let here = after(&mut b, x, y, f);
                    b.act(i, "wait", vec![(here, Rational::one())]);
                    if (x, y) == item && !f {
                        let hit = after(&mut b, x, y, true);
                        b.act(i, "search", vec![(hit, spec.search.clone()), (here, Rational::one() - &spec.search)]);
                    }

                    let o = b.state(&observer(x, y, ox, f), Player::Min);
                    let land = |b: &mut Builder, nox: usize| {
                        if (x, y) == (nox, patrol) {
                            caught[f as usize]
                        } else {
                            b.id(&intruder(x, y, nox, f))
                        }
                    };
                    if x.abs_diff(ox) + y.abs_diff(patrol) <= 1 {
                        for (label, nox) in [("stay", Some(ox)), ("left", ox.checked_sub(1)), ("right", Some(ox + 1))] {
                            if let Some(nox) = nox.filter(|&v| v < w) {
                                let to = land(&mut b, nox);
                                b.act(o, label, vec![(to, Rational::one())]);
                            }
                        }
                    } else {
                        let out = wander(ox, w).into_iter().map(|(nox, p)| (land(&mut b, nox), p)).collect();
                        b.act(o, "wander", out);
                    }
                }
            }
        }
    }
    let game = b.finish(start)?;
    let with_item: BTreeSet<StateId> = (0..game.num_states()).filter(|&s| game.name(s).ends_with("_item")).collect();
    let obj = LexObjective::new(vec![Objective::safe(caught), Objective::reach(exits), Objective::reach(with_item)])?;
    Ok((game, obj))
}

fn found(f: bool) -> &'static str {
    if f {
        "item"
    } else {
        "none"
    }
}

/// Dice-like race with absorbing targets. Holding scores `faces / 2`.
/// Objective: (Reach win, Reach draw).
pub fn gen_dice(spec: &DiceSpec) -> Result<(StochasticGame, LexObjective), GenError> {
    spec.validate()?;
    let faces = spec.faces as i64;
    let hold = faces / 2;
    let mut b = Builder::default();
    let name = |round: usize, p: Player, diff: i64| {
        let who = if p == Player::Max { "max" } else { "min" };
        let sign = if diff < 0 { "m" } else { "p" };
        format!("{who}{round}_{sign}{}", diff.abs())
    };
    let start = b.state(&name(0, Player::Max, 0), Player::Max);
    let win = b.state("win", Player::Max);
    let draw = b.state("draw", Player::Max);
    let lose = b.state("lose", Player::Max);
    let bound = faces * spec.rounds as i64;
    for round in 0..spec.rounds {
        for diff in -bound..=bound {
            for p in [Player::Max, Player::Min] {
                let s = b.state(&name(round, p, diff), p);
                let sign = if p == Player::Max { 1 } else { -1 };
                let next = |b: &mut Builder, d: i64| match p {
                    Player::Max => b.id(&name(round, Player::Min, d)),
                    Player::Min if round + 1 < spec.rounds => b.id(&name(round + 1, Player::Max, d)),
                    Player::Min => match d.signum() {
                        1 => win,
                        0 => draw,
                        _ => lose,
                    },
                };
                let roll = (1..=faces).map(|k| (next(&mut b, diff + sign * k), ratio(1, faces))).collect();
                b.act(s, "roll", roll);
                let to = next(&mut b, diff + sign * hold);
                b.act(s, "hold", vec![(to, Rational::one())]);
            }
        }
    }
    let mut game = b.finish(start)?;
    game = prune_unreachable(&game, start)?;
    let (win, draw) = (game.state_index("win"), game.state_index("draw"));
    let obj = LexObjective::new(vec![
        Objective::reach(win.into_iter().collect::<Vec<_>>()),
        Objective::reach(draw.into_iter().collect::<Vec<_>>()),
    ])?;
    Ok((game, obj))
}

/// Keeps only states reachable from `root`, preserving relative order.
fn prune_unreachable(game: &StochasticGame, root: StateId) -> Result<StochasticGame, GenError> {
    let mut seen = vec![false; game.num_states()];
    let mut stack = vec![root];
    seen[root] = true;
    while let Some(s) = stack.pop() {
        for a in game.actions(s) {
            for t in a.dist.successors() {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
    }
    // Terminal sinks stay even if unreachable so objectives keep their targets.
    for s in 0..game.num_states() {
        if matches!(game.name(s), "win" | "draw" | "lose") {
            seen[s] = true;
        }
    }
    let remap: Vec<Option<StateId>> = seen
        .iter()
        .scan(0, |next, &keep| {
            Some(keep.then(|| {
                *next += 1;
                *next - 1
            }))
        })
        .collect();
    let states = (0..game.num_states())
        .filter(|&s| seen[s])
        .map(|s| {
            let st = game.state(s);
            let actions = st
                .actions
                .iter()
                .map(|a| {
                    let support = a.dist.support().iter().map(|(t, p)| (remap[*t].expect("closed"), p.clone()));
                    Ok(Action { label: a.label.clone(), dist: Distribution::new(support.collect())? })
                })
                .collect::<Result<_, GameError>>()?;
            Ok(State { name: st.name.clone(), owner: st.owner, actions })
        })
        .collect::<Result<Vec<_>, GameError>>()?;
    Ok(StochasticGame::new(states, remap[root])?)
}

/// Random distribution over `k` distinct successors with denominator at most 8.
fn random_distribution(rng: &mut ChaCha8Rng, succ: &[StateId]) -> Vec<(StateId, Rational)> {
    let k = succ.len() as i64;
    let den = if k >= 8 { k } else { rng.gen_range(k.max(2)..=8) };
    // Split `den` units into k positive parts.
    let mut cuts: Vec<i64> = (1..den).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<i64> = cuts.into_iter().take((k - 1) as usize).collect();
    cuts.sort_unstable();
    let mut prev = 0;
    let mut out = Vec::with_capacity(succ.len());
    for (i, &s) in succ.iter().enumerate() {
        let cut = cuts.get(i).copied().unwrap_or(den);
        out.push((s, ratio(cut - prev, den)));
        prev = cut;
    }
    out
}

/// Random game with random owners, distributions and objectives. Half of the
/// seeds produce absorbing objectives whose targets are sinks.
pub fn gen_random(spec: &FuzzSpec) -> Result<(StochasticGame, LexObjective), GenError> {
    spec.validate()?;
    let n = spec.num_states;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let absorbing = n >= 2 && rng.gen_bool(0.5);
    let sink_count = if absorbing { rng.gen_range(1..=n.min(spec.num_objectives + 1).min(n - 1).max(1)) } else { 0 };
    let sinks: Vec<StateId> = (n - sink_count..n).collect();

    let mut b = Builder::default();
    let ids: Vec<StateId> = (0..n)
        .map(|i| {
            let owner = if rng.gen_bool(0.5) { Player::Max } else { Player::Min };
            b.state(&format!("s{i}"), owner)
        })
        .collect();
    for &s in &ids {
        if sinks.contains(&s) {
            continue;
        }
        let actions = rng.gen_range(1..=spec.max_actions);
        for a in 0..actions {
            let k = rng.gen_range(1..=spec.max_branching.min(n));
            let mut succ: Vec<StateId> = ids.clone();
            succ.shuffle(&mut rng);
            succ.truncate(k);
            // The first action of state i reaches i+1, so every state is
            // reachable from s0.
            if a == 0 && s + 1 < n && !succ.contains(&(s + 1)) {
                succ[0] = s + 1;
            }
            succ.sort_unstable();
            let dist = random_distribution(&mut rng, &succ);
            b.act(s, &format!("a{a}"), dist);
        }
    }
    let mut objectives = Vec::with_capacity(spec.num_objectives);
    for _ in 0..spec.num_objectives.min(MAX_OBJECTIVES) {
        let pool: &[StateId] = if absorbing { &sinks } else { &ids };
        let size = rng.gen_range(1..=pool.len().min(2));
        let target: Vec<StateId> = pool.choose_multiple(&mut rng, size).copied().collect();
        objectives.push(if rng.gen_bool(0.5) { Objective::reach(target) } else { Objective::safe(target) });
    }
    let game = b.finish(0)?;
    Ok((game, LexObjective::new(objectives)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{parse_game, serialize_model};
    use crate::objective::ObjectiveKind;

    fn kinds(obj: &LexObjective) -> Vec<ObjectiveKind> {
        obj.entries().iter().map(|o| o.kind).collect()
    }

    #[test]
    fn hallway_shape() {
        let (g, obj) = gen_hallway(&GridSpec::new(3, 3)).unwrap();
        assert_eq!(kinds(&obj), vec![ObjectiveKind::Reach, ObjectiveKind::Safe]);
        assert_eq!(g.name(g.initial().unwrap()), "r0_0_h2_ok");
        assert!(!obj.is_absorbing(&g));
    }

    #[test]
    fn avoid_shape() {
        let (g, obj) = gen_avoid(&GridSpec::new(4, 4)).unwrap();
        assert_eq!(kinds(&obj), vec![ObjectiveKind::Safe, ObjectiveKind::Reach, ObjectiveKind::Reach]);
        assert!(g.states().iter().any(|s| s.actions.iter().any(|a| a.label == "search")));
    }

    #[test]
    fn dice_is_absorbing() {
        let (g, obj) = gen_dice(&DiceSpec { rounds: 2, faces: 3 }).unwrap();
        assert!(obj.is_absorbing(&g));
    }

    #[test]
    fn random_round_trips() {
        for seed in 0..20 {
            let spec = FuzzSpec { num_states: 6, max_actions: 3, max_branching: 3, num_objectives: 3, seed };
            let (g, obj) = gen_random(&spec).unwrap();
            let text = serialize_model(&g, Some(&obj));
            let back = parse_game(&text).unwrap();
            assert_eq!(back.game, g);
            assert_eq!(back.objective.as_ref(), Some(&obj));
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(gen_hallway(&GridSpec::new(1, 3)).is_err());
        let spec = FuzzSpec { num_states: 3, max_actions: 2, max_branching: 2, num_objectives: 4, seed: 0 };
        assert!(gen_random(&spec).is_err());
    }
}
