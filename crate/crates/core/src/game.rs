//! Explicit-state turn-based stochastic games and the `.sg` text format.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::numeric::{format_rational, parse_rational, Rational};
use crate::objective::{LexObjective, Objective, ObjectiveKind};

/// Dense state index; names live in the game.
pub type StateId = usize;

/// Label given to implicit and absorbing self-loops.
pub const SELF_LABEL: &str = "self";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    Max,
    Min,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Max => Player::Min,
            Player::Min => Player::Max,
        }
    }

    fn keyword(self) -> &'static str {
        match self {
            Player::Max => "max",
            Player::Min => "min",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: probability sum ≠ 1 for action `{label}` of `{state}` (sum is {sum})")]
    ProbabilitySum { line: usize, state: String, label: String, sum: String },
    #[error("line {line}: unknown state `{name}`")]
    UnknownState { line: usize, name: String },
    #[error("line {line}: duplicate state `{name}`")]
    DuplicateState { line: usize, name: String },
    #[error("line {line}: duplicate action `{label}` at state `{state}`")]
    DuplicateAction { line: usize, state: String, label: String },
    #[error("state `{0}` has an empty action set")]
    EmptyActions(String),
    #[error("invalid distribution: {0}")]
    BadDistribution(String),
    #[error("invalid name `{0}`")]
    BadName(String),
    #[error("state index {0} out of range")]
    BadState(StateId),
    #[error("invalid objective: {0}")]
    BadObjective(String),
}

/// Finite-support distribution over successor states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    support: Vec<(StateId, Rational)>,
}

impl Distribution {
    /// Validates positivity, exact sum 1 and distinct successors.
    pub fn new(support: Vec<(StateId, Rational)>) -> Result<Self, GameError> {
        if support.is_empty() {
            return Err(GameError::BadDistribution("empty support".into()));
        }
        let mut seen = BTreeSet::new();
        let mut sum = Rational::zero();
        for (s, p) in &support {
            if *p <= Rational::zero() || *p > Rational::one() {
                return Err(GameError::BadDistribution(format!("probability {} out of (0,1]", format_rational(p))));
            }
            if !seen.insert(*s) {
                return Err(GameError::BadDistribution(format!("duplicate successor {s}")));
            }
            sum += p;
        }
        if !sum.is_one() {
            return Err(GameError::BadDistribution(format!("probability sum ≠ 1 (sum is {})", format_rational(&sum))));
        }
        Ok(Distribution { support })
    }

    pub fn dirac(s: StateId) -> Self {
        Distribution { support: vec![(s, Rational::one())] }
    }

    pub fn support(&self) -> &[(StateId, Rational)] {
        &self.support
    }

    pub fn successors(&self) -> impl Iterator<Item = StateId> + '_ {
        self.support.iter().map(|(s, _)| *s)
    }

    pub fn prob(&self, s: StateId) -> Rational {
        self.support.iter().find(|(t, _)| *t == s).map(|(_, p)| p.clone()).unwrap_or_else(Rational::zero)
    }

    pub fn is_dirac_on(&self, s: StateId) -> bool {
        self.support.len() == 1 && self.support[0].0 == s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Action {
    pub label: String,
    pub dist: Distribution,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct State {
    pub name: String,
    pub owner: Player,
    pub actions: Vec<Action>,
}

/// Immutable explicit-state game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StochasticGame {
    states: Vec<State>,
    index: HashMap<String, StateId>,
    initial: Option<StateId>,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && !name.chars().any(|c| c.is_whitespace() || c == ':' || c == '#')
}

impl StochasticGame {
    /// Builds a game from raw states, checking every structural invariant.
    pub fn new(states: Vec<State>, initial: Option<StateId>) -> Result<Self, GameError> {
        let mut index = HashMap::with_capacity(states.len());
        for (i, st) in states.iter().enumerate() {
            if !valid_name(&st.name) {
                return Err(GameError::BadName(st.name.clone()));
            }
            if index.insert(st.name.clone(), i).is_some() {
                return Err(GameError::DuplicateState { line: 0, name: st.name.clone() });
            }
        }
        let n = states.len();
        for st in &states {
            if st.actions.is_empty() {
                return Err(GameError::EmptyActions(st.name.clone()));
            }
            let mut labels = BTreeSet::new();
            for a in &st.actions {
                if !valid_name(&a.label) {
                    return Err(GameError::BadName(a.label.clone()));
                }
                if !labels.insert(a.label.as_str()) {
                    return Err(GameError::DuplicateAction { line: 0, state: st.name.clone(), label: a.label.clone() });
                }
                if let Some(bad) = a.dist.successors().find(|&t| t >= n) {
                    return Err(GameError::BadState(bad));
                }
            }
        }
        if let Some(i) = initial {
            if i >= n {
                return Err(GameError::BadState(i));
            }
        }
        Ok(StochasticGame { states, index, initial })
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn state(&self, s: StateId) -> &State {
        &self.states[s]
    }

    pub fn name(&self, s: StateId) -> &str {
        &self.states[s].name
    }

    pub fn owner(&self, s: StateId) -> Player {
        self.states[s].owner
    }

    pub fn actions(&self, s: StateId) -> &[Action] {
        &self.states[s].actions
    }

    pub fn state_index(&self, name: &str) -> Option<StateId> {
        self.index.get(name).copied()
    }

    pub fn action_index(&self, s: StateId, label: &str) -> Option<usize> {
        self.states[s].actions.iter().position(|a| a.label == label)
    }

    pub fn initial(&self) -> Option<StateId> {
        self.initial
    }

    pub fn with_initial(&self, initial: Option<StateId>) -> Self {
        StochasticGame { initial, ..self.clone() }
    }

    pub fn num_actions(&self) -> usize {
        self.states.iter().map(|s| s.actions.len()).sum()
    }

    pub fn average_actions(&self) -> f64 {
        if self.states.is_empty() {
            0.0
        } else {
            self.num_actions() as f64 / self.states.len() as f64
        }
    }

    pub fn is_sink(&self, s: StateId) -> bool {
        self.states[s].actions.iter().all(|a| a.dist.is_dirac_on(s))
    }

    pub fn players_states(&self, p: Player) -> impl Iterator<Item = StateId> + '_ {
        (0..self.states.len()).filter(move |&s| self.states[s].owner == p)
    }
}

/// States all of whose actions are self-loops with probability 1.
pub fn sinks(game: &StochasticGame) -> BTreeSet<StateId> {
    (0..game.num_states()).filter(|&s| game.is_sink(s)).collect()
}

/// Per-state subset of action indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionFilter {
    keep: Vec<Vec<bool>>,
}

impl ActionFilter {
    pub fn all(game: &StochasticGame) -> Self {
        ActionFilter { keep: game.states().iter().map(|s| vec![true; s.actions.len()]).collect() }
    }

    pub fn from_mask(keep: Vec<Vec<bool>>) -> Self {
        ActionFilter { keep }
    }

    pub fn is_kept(&self, s: StateId, a: usize) -> bool {
        self.keep[s][a]
    }

    pub fn set(&mut self, s: StateId, a: usize, keep: bool) {
        self.keep[s][a] = keep;
    }

    pub fn kept(&self, s: StateId) -> impl Iterator<Item = usize> + '_ {
        self.keep[s].iter().enumerate().filter(|(_, k)| **k).map(|(a, _)| a)
    }

    /// (state, label) pairs the filter removes, in index order.
    pub fn dropped(&self, game: &StochasticGame) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for s in 0..game.num_states() {
            for (a, act) in game.actions(s).iter().enumerate() {
                if !self.keep[s][a] {
                    out.push((game.name(s).to_string(), act.label.clone()));
                }
            }
        }
        out
    }

    fn check(&self, game: &StochasticGame) -> Result<(), GameError> {
        if self.keep.len() != game.num_states() {
            return Err(GameError::BadObjective("filter size mismatch".into()));
        }
        for s in 0..game.num_states() {
            if self.keep[s].len() != game.actions(s).len() {
                return Err(GameError::BadObjective(format!("filter action count mismatch at `{}`", game.name(s))));
            }
            if !self.keep[s].iter().any(|k| *k) {
                return Err(GameError::EmptyActions(game.name(s).to_string()));
            }
        }
        Ok(())
    }
}

/// Keeps only the filtered actions; states, owners and action order are preserved.
pub fn restrict(game: &StochasticGame, filter: &ActionFilter) -> Result<StochasticGame, GameError> {
    filter.check(game)?;
    let states = game
        .states()
        .iter()
        .enumerate()
        .map(|(s, st)| State {
            name: st.name.clone(),
            owner: st.owner,
            actions: st
                .actions
                .iter()
                .enumerate()
                .filter(|(a, _)| filter.is_kept(s, *a))
                .map(|(_, a)| a.clone())
                .collect(),
        })
        .collect();
    StochasticGame::new(states, game.initial())
}

/// Replaces the actions of every state in `cut` by a single self-loop.
pub fn make_absorbing(game: &StochasticGame, cut: &BTreeSet<StateId>) -> StochasticGame {
    let mut out = game.clone();
    for &s in cut {
        out.states[s].actions = vec![Action { label: SELF_LABEL.to_string(), dist: Distribution::dirac(s) }];
    }
    out
}

/// Same game with every state's owner exchanged.
pub fn swap_owners(game: &StochasticGame) -> StochasticGame {
    let mut out = game.clone();
    for st in &mut out.states {
        st.owner = st.owner.opponent();
    }
    out
}

/// A parsed `.sg` file.
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub game: StochasticGame,
    pub objective: Option<LexObjective>,
}

fn syntax(line: usize, msg: impl Into<String>) -> GameError {
    GameError::Syntax { line, msg: msg.into() }
}

pub fn parse_game(text: &str) -> Result<Model, GameError> {
    struct ActLine<'a> {
        line: usize,
        state: &'a str,
        label: &'a str,
        succ: Vec<(&'a str, Rational)>,
    }

    let mut header = false;
    let mut decls: Vec<(String, Player)> = Vec::new();
    let mut index: HashMap<String, StateId> = HashMap::new();
    let mut acts: Vec<ActLine> = Vec::new();
    let mut objs: Vec<(usize, ObjectiveKind, Vec<&str>)> = Vec::new();
    let mut init: Option<(usize, &str)> = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if !header {
            if toks == ["sg", "1"] {
                header = true;
                continue;
            }
            return Err(syntax(line, "expected header `sg 1`"));
        }
        match toks[0] {
            "state" => {
                if toks.len() != 3 {
                    return Err(syntax(line, "expected `state <name> <max|min>`"));
                }
                let owner = match toks[2] {
                    "max" => Player::Max,
                    "min" => Player::Min,
                    o => return Err(syntax(line, format!("unknown owner `{o}`"))),
                };
                if !valid_name(toks[1]) {
                    return Err(syntax(line, format!("invalid state name `{}`", toks[1])));
                }
                if index.insert(toks[1].to_string(), decls.len()).is_some() {
                    return Err(GameError::DuplicateState { line, name: toks[1].to_string() });
                }
                decls.push((toks[1].to_string(), owner));
            }
            "act" => {
                if toks.len() < 4 {
                    return Err(syntax(line, "expected `act <state> <label> <succ>:<prob> ...`"));
                }
                if !valid_name(toks[2]) {
                    return Err(syntax(line, format!("invalid action label `{}`", toks[2])));
                }
                let mut succ = Vec::new();
                for tok in &toks[3..] {
                    let (name, prob) = tok
                        .split_once(':')
                        .ok_or_else(|| syntax(line, format!("expected <succ>:<prob>, got `{tok}`")))?;
                    let p = parse_rational(prob).ok_or_else(|| syntax(line, format!("bad probability `{prob}`")))?;
                    succ.push((name, p));
                }
                acts.push(ActLine { line, state: toks[1], label: toks[2], succ });
            }
            "obj" => {
                if toks.len() < 3 {
                    return Err(syntax(line, "expected `obj <reach|safe> <state> ...`"));
                }
                let kind = match toks[1] {
                    "reach" => ObjectiveKind::Reach,
                    "safe" => ObjectiveKind::Safe,
                    k => return Err(syntax(line, format!("unknown objective kind `{k}`"))),
                };
                objs.push((line, kind, toks[2..].to_vec()));
            }
            "init" => {
                if toks.len() != 2 {
                    return Err(syntax(line, "expected `init <state>`"));
                }
                if init.is_some() {
                    return Err(syntax(line, "duplicate `init`"));
                }
                init = Some((line, toks[1]));
            }
            "sg" => return Err(syntax(line, "duplicate header")),
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }
    if !header {
        return Err(syntax(1, "missing header `sg 1`"));
    }

    let lookup = |line: usize, name: &str| -> Result<StateId, GameError> {
        index.get(name).copied().ok_or_else(|| GameError::UnknownState { line, name: name.to_string() })
    };

    let mut states: Vec<State> =
        decls.iter().map(|(name, owner)| State { name: name.clone(), owner: *owner, actions: Vec::new() }).collect();
    for act in &acts {
        let s = lookup(act.line, act.state)?;
        let mut support = Vec::with_capacity(act.succ.len());
        let mut sum = Rational::zero();
        let mut seen = BTreeSet::new();
        for (name, p) in &act.succ {
            let t = lookup(act.line, name)?;
            if *p <= Rational::zero() {
                return Err(syntax(act.line, format!("probability for `{name}` must be positive")));
            }
            if !seen.insert(t) {
                return Err(syntax(act.line, format!("duplicate successor `{name}`")));
            }
            sum += p;
            support.push((t, p.clone()));
        }
        if !sum.is_one() {
            return Err(GameError::ProbabilitySum {
                line: act.line,
                state: act.state.to_string(),
                label: act.label.to_string(),
                sum: format_rational(&sum),
            });
        }
        if states[s].actions.iter().any(|a| a.label == act.label) {
            return Err(GameError::DuplicateAction {
                line: act.line,
                state: act.state.to_string(),
                label: act.label.to_string(),
            });
        }
        let dist = Distribution::new(support).map_err(|e| syntax(act.line, e.to_string()))?;
        states[s].actions.push(Action { label: act.label.to_string(), dist });
    }
    for (s, st) in states.iter_mut().enumerate() {
        if st.actions.is_empty() {
            st.actions.push(Action { label: SELF_LABEL.to_string(), dist: Distribution::dirac(s) });
        }
    }
    let initial = match init {
        Some((line, name)) => Some(lookup(line, name)?),
        None => None,
    };
    let game = StochasticGame::new(states, initial)?;

    let objective = if objs.is_empty() {
        None
    } else {
        let mut entries = Vec::with_capacity(objs.len());
        for (line, kind, names) in objs {
            let mut target = BTreeSet::new();
            for name in names {
                target.insert(lookup(line, name)?);
            }
            entries.push(Objective { kind, target });
        }
        Some(LexObjective::new(entries).map_err(|e| GameError::BadObjective(e.to_string()))?)
    };
    Ok(Model { game, objective })
}

pub fn serialize_game(game: &StochasticGame) -> String {
    serialize_model(game, None)
}

/// Writes a game (and optionally its objective) in `.sg` format.
/// Implicit self-loops of act-less states are left implicit.
pub fn serialize_model(game: &StochasticGame, objective: Option<&LexObjective>) -> String {
    let mut out = String::from("sg 1\n");
    for st in game.states() {
        let _ = writeln!(out, "state {} {}", st.name, st.owner.keyword());
    }
    for (s, st) in game.states().iter().enumerate() {
        let implicit = st.actions.len() == 1 && st.actions[0].label == SELF_LABEL && st.actions[0].dist.is_dirac_on(s);
        if implicit {
            continue;
        }
        for a in &st.actions {
            let _ = write!(out, "act {} {}", st.name, a.label);
            for (t, p) in a.dist.support() {
                let _ = write!(out, " {}:{}", game.name(*t), format_rational(p));
            }
            out.push('\n');
        }
    }
    if let Some(obj) = objective {
        for o in obj.entries() {
            let kind = match o.kind {
                ObjectiveKind::Reach => "reach",
                ObjectiveKind::Safe => "safe",
            };
            let _ = write!(out, "obj {kind}");
            for &t in &o.target {
                let _ = write!(out, " {}", game.name(t));
            }
            out.push('\n');
        }
    }
    if let Some(i) = game.initial() {
        let _ = writeln!(out, "init {}", game.name(i));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = "sg 1\nstate a max\nstate b min\nact a go b:1/3 a:2/3\n";

    #[test]
    fn parses_and_adds_implicit_loop() {
        let m = parse_game(TINY).unwrap();
        assert_eq!(m.game.num_states(), 2);
        assert_eq!(m.game.actions(1)[0].label, SELF_LABEL);
        assert_eq!(sinks(&m.game), BTreeSet::from([1]));
        assert!(m.objective.is_none());
    }

    #[test]
    fn rejects_bad_sum() {
        let err = parse_game("sg 1\nstate a max\nact a x a:1/2 a:1/3\n").unwrap_err();
        assert!(matches!(err, GameError::Syntax { .. }), "{err:?}");
        let err = parse_game("sg 1\nstate a max\nstate b max\nact a x a:1/2 b:1/3\n").unwrap_err();
        assert!(matches!(err, GameError::ProbabilitySum { line: 4, .. }), "{err:?}");
        assert!(err.to_string().contains("probability sum ≠ 1"));
    }

    #[test]
    fn reports_errors_with_lines() {
        assert!(matches!(
            parse_game("sg 1\nstate a max\nact a x zz:1\n"),
            Err(GameError::UnknownState { line: 3, .. })
        ));
        assert!(matches!(
            parse_game("sg 1\nstate a max\nstate a min\n"),
            Err(GameError::DuplicateState { line: 3, .. })
        ));
        assert!(matches!(
            parse_game("sg 1\nstate a max\nact a x a:1\nact a x a:1\n"),
            Err(GameError::DuplicateAction { line: 4, .. })
        ));
        assert!(matches!(parse_game("state a max\n"), Err(GameError::Syntax { line: 1, .. })));
        assert!(matches!(parse_game("sg 1\nstate a max\nbogus\n"), Err(GameError::Syntax { line: 3, .. })));
    }

    #[test]
    fn decimal_probabilities_are_exact() {
        let m = parse_game("sg 1\nstate a max\nstate b max\nact a x a:0.1 b:0.9\n").unwrap();
        assert_eq!(m.game.actions(0)[0].dist.prob(0), crate::numeric::ratio(1, 10));
    }

    #[test]
    fn round_trip() {
        let m = parse_game(TINY).unwrap();
        let back = parse_game(&serialize_game(&m.game)).unwrap();
        assert_eq!(back.game, m.game);
    }

    #[test]
    fn transforms() {
        let m = parse_game(TINY).unwrap();
        let all = make_absorbing(&m.game, &BTreeSet::from([0, 1]));
        assert_eq!(sinks(&all), BTreeSet::from([0, 1]));
        assert_eq!(make_absorbing(&m.game, &BTreeSet::new()), m.game);
        assert_eq!(restrict(&m.game, &ActionFilter::all(&m.game)).unwrap(), m.game);
        let mut f = ActionFilter::all(&m.game);
        f.set(0, 0, false);
        assert!(matches!(restrict(&m.game, &f), Err(GameError::EmptyActions(_))));
        let swapped = swap_owners(&m.game);
        assert_eq!(swapped.owner(0), Player::Min);
    }
}
