//! Single-objective solving on (quantified) reachability and safety.
//!
//! Weighted targets are treated as absorbing boundary values: a state in the
//! domain of `q` has value `q(t)` regardless of its actions. Value iteration
//! approaches the least fixpoint from below; exact mode runs Hoffman-Karp
//! strategy iteration with rational Gaussian elimination.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::error::SolveError;
use crate::game::{swap_owners, Action, ActionFilter, Distribution, Player, State, StateId, StochasticGame};
use crate::numeric::{Mode, Numeric, Rational};
use crate::objective::{ObjectiveKind, QuantifiedObjective};

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub mode: Mode,
    pub vi_epsilon: f64,
    pub action_epsilon: f64,
    pub max_iterations: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { mode: Mode::Vi, vi_epsilon: 1e-8, action_epsilon: 1e-6, max_iterations: 10_000_000 }
    }
}

impl SolverConfig {
    pub fn exact() -> Self {
        SolverConfig { mode: Mode::Exact, ..Default::default() }
    }

    pub fn vi() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        if !(self.vi_epsilon > 0.0 && self.vi_epsilon < self.action_epsilon && self.action_epsilon < 1.0) {
            return Err(SolveError::Config(format!(
                "need 0 < epsilon ({}) < action epsilon ({}) < 1",
                self.vi_epsilon, self.action_epsilon
            )));
        }
        if self.max_iterations == 0 {
            return Err(SolveError::Config("max iterations must be positive".into()));
        }
        Ok(())
    }
}

/// Per-state scalar values; the mode is carried by `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueAssignment<N> {
    pub values: Vec<N>,
}

impl<N: Numeric> ValueAssignment<N> {
    pub fn mode(&self) -> Mode {
        N::MODE
    }

    pub fn get(&self, s: StateId) -> &N {
        &self.values[s]
    }
}

/// Memoryless deterministic strategy, stored by action label so it stays
/// meaningful across restricted copies of a game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MDStrategy {
    player: Player,
    choice: Vec<Option<String>>,
}

impl MDStrategy {
    /// Lowest-index action everywhere.
    pub fn first_actions(game: &StochasticGame, player: Player) -> Self {
        Self::from_indices(game, player, &vec![0; game.num_states()])
    }

    /// `indices[s]` is read only for states owned by `player`.
    pub fn from_indices(game: &StochasticGame, player: Player, indices: &[usize]) -> Self {
        let choice = (0..game.num_states())
            .map(|s| (game.owner(s) == player).then(|| game.actions(s)[indices[s]].label.clone()))
            .collect();
        MDStrategy { player, choice }
    }

    pub fn from_labels(player: Player, choice: Vec<Option<String>>) -> Self {
        MDStrategy { player, choice }
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn label(&self, s: StateId) -> Option<&str> {
        self.choice.get(s).and_then(|c| c.as_deref())
    }

    pub fn set(&mut self, s: StateId, label: String) {
        self.choice[s] = Some(label);
    }

    pub fn action_index(&self, game: &StochasticGame, s: StateId) -> Option<usize> {
        self.label(s).and_then(|l| game.action_index(s, l))
    }

    /// Defined with a valid label on exactly the player's states.
    pub fn is_total_on(&self, game: &StochasticGame) -> bool {
        self.choice.len() == game.num_states()
            && (0..game.num_states()).all(|s| {
                if game.owner(s) == self.player {
                    self.action_index(game, s).is_some()
                } else {
                    self.choice[s].is_none()
                }
            })
    }

    fn with_player(mut self, player: Player) -> Self {
        self.player = player;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingleSolution<N> {
    pub values: ValueAssignment<N>,
    pub max_strategy: MDStrategy,
    pub min_strategy: MDStrategy,
    pub iterations: u64,
}

/// A reachability instance with its boundary already resolved.
pub struct ReachProblem<'a> {
    game: &'a StochasticGame,
    /// Boundary value for domain states and for states outside the positive set.
    boundary: Vec<Option<Rational>>,
    /// Max's choice on free states pinned to one.
    sure_action: Vec<Option<usize>>,
}

impl<'a> ReachProblem<'a> {
    fn new(game: &'a StochasticGame, q: &QuantifiedObjective) -> Self {
        let fixed: Vec<Option<Rational>> = (0..game.num_states()).map(|s| q.weight(s).cloned()).collect();
        let positive = positive_mask(game, &fixed);
        let (sure, sure_action) = almost_sure_mask(game, &fixed);
        let boundary = fixed
            .into_iter()
            .zip(positive.iter().zip(&sure))
            .map(|(f, (&pos, &one))| match f {
                Some(w) => Some(w),
                None if !pos => Some(Rational::zero()),
                None if one => Some(Rational::one()),
                None => None,
            })
            .collect();
        ReachProblem { game, boundary, sure_action }
    }

    fn is_free(&self, s: StateId) -> bool {
        self.boundary[s].is_none()
    }
}

/// Engine backing [`solve_reach`] for one scalar type.
pub trait ReachEngine: Sized {
    /// Values for every state, plus the Max action indices when the engine
    /// produces an optimal strategy itself.
    fn reach_values(
        problem: &ReachProblem<'_>,
        cfg: &SolverConfig,
    ) -> Result<(Vec<Self>, Option<Vec<usize>>, u64), SolveError>;
}

impl ReachEngine for f64 {
    fn reach_values(
        problem: &ReachProblem<'_>,
        cfg: &SolverConfig,
    ) -> Result<(Vec<f64>, Option<Vec<usize>>, u64), SolveError> {
        let game = problem.game;
        let n = game.num_states();
        let mut x: Vec<f64> =
            problem.boundary.iter().map(|b| b.as_ref().map_or(0.0, crate::numeric::rational_to_f64)).collect();
        let free: Vec<StateId> = (0..n).filter(|&s| problem.is_free(s)).collect();
        let trans: Vec<Vec<Vec<(StateId, f64)>>> = free
            .iter()
            .map(|&s| {
                game.actions(s)
                    .iter()
                    .map(|a| a.dist.support().iter().map(|(t, p)| (*t, crate::numeric::rational_to_f64(p))).collect())
                    .collect()
            })
            .collect();
        let mut iterations = 0u64;
        loop {
            if iterations >= cfg.max_iterations {
                return Err(SolveError::IterationLimit(cfg.max_iterations));
            }
            iterations += 1;
            let mut delta = 0.0f64;
            for (k, &s) in free.iter().enumerate() {
                let mut best = match game.owner(s) {
                    Player::Max => f64::NEG_INFINITY,
                    Player::Min => f64::INFINITY,
                };
                for act in &trans[k] {
                    let v: f64 = act.iter().map(|(t, p)| p * x[*t]).sum();
                    best = match game.owner(s) {
                        Player::Max => best.max(v),
                        Player::Min => best.min(v),
                    };
                }
                let best = best.clamp(0.0, 1.0);
                delta = delta.max((best - x[s]).abs());
                x[s] = best;
            }
            if delta < cfg.vi_epsilon {
                break;
            }
        }
        Ok((x, None, iterations))
    }
}

impl ReachEngine for Rational {
    fn reach_values(
        problem: &ReachProblem<'_>,
        _cfg: &SolverConfig,
    ) -> Result<(Vec<Rational>, Option<Vec<usize>>, u64), SolveError> {
        let game = problem.game;
        let n = game.num_states();
        let mut sigma = vec![0usize; n];
        let mut rounds = 0u64;
        loop {
            rounds += 1;
            let (v, _tau, inner) = min_best_response(problem, &sigma)?;
            rounds += inner;
            let mut improved = false;
            for s in 0..n {
                if !problem.is_free(s) || game.owner(s) != Player::Max {
                    continue;
                }
                let current = action_value(&game.actions(s)[sigma[s]].dist, &v);
                let (best_a, best) = game
                    .actions(s)
                    .iter()
                    .enumerate()
                    .map(|(a, act)| (a, action_value(&act.dist, &v)))
                    .fold(None::<(usize, Rational)>, |acc, (a, val)| match acc {
                        Some((_, ref b)) if *b >= val => acc,
                        _ => Some((a, val)),
                    })
                    .expect("nonempty action set");
                if best > current {
                    sigma[s] = best_a;
                    improved = true;
                }
            }
            if !improved {
                return Ok((v, Some(sigma), rounds));
            }
        }
    }
}

fn action_value(dist: &Distribution, v: &[Rational]) -> Rational {
    dist.support().iter().fold(Rational::zero(), |acc, (t, p)| acc + p * &v[*t])
}

/// Min's optimal reply to a fixed Max strategy by policy iteration.
fn min_best_response(
    problem: &ReachProblem<'_>,
    sigma: &[usize],
) -> Result<(Vec<Rational>, Vec<usize>, u64), SolveError> {
    let game = problem.game;
    let n = game.num_states();
    let positive_boundary = |s: StateId| problem.boundary[s].as_ref().is_some_and(|w| !w.is_zero());

    // States from which Min can avoid positive boundary forever in G^sigma.
    let mut zero: Vec<bool> = (0..n).map(|s| !positive_boundary(s)).collect();
    loop {
        let mut changed = false;
        for s in 0..n {
            if !zero[s] || !problem.is_free(s) {
                continue;
            }
            let stays = |d: &Distribution| d.successors().all(|t| zero[t]);
            let keep = match game.owner(s) {
                Player::Max => stays(&game.actions(s)[sigma[s]].dist),
                Player::Min => game.actions(s).iter().any(|a| stays(&a.dist)),
            };
            if !keep {
                zero[s] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut tau: Vec<usize> = (0..n)
        .map(|s| {
            if zero[s] && game.owner(s) == Player::Min {
                game.actions(s).iter().position(|a| a.dist.successors().all(|t| zero[t])).unwrap_or(0)
            } else {
                0
            }
        })
        .collect();

    let mut rounds = 0u64;
    loop {
        rounds += 1;
        let choice: Vec<&Distribution> = (0..n)
            .map(|s| match game.owner(s) {
                Player::Max => &game.actions(s)[sigma[s]].dist,
                Player::Min => &game.actions(s)[tau[s]].dist,
            })
            .collect();
        let v = evaluate_chain(&choice, &problem.boundary)?;
        let mut improved = false;
        for s in 0..n {
            if !problem.is_free(s) || game.owner(s) != Player::Min || zero[s] {
                continue;
            }
            let current = action_value(&game.actions(s)[tau[s]].dist, &v);
            let (best_a, best) = game
                .actions(s)
                .iter()
                .enumerate()
                .map(|(a, act)| (a, action_value(&act.dist, &v)))
                .fold(None::<(usize, Rational)>, |acc, (a, val)| match acc {
                    Some((_, ref b)) if *b <= val => acc,
                    _ => Some((a, val)),
                })
                .expect("nonempty action set");
            if best < current {
                tau[s] = best_a;
                improved = true;
            }
        }
        if !improved {
            return Ok((v, tau, rounds));
        }
    }
}

/// Exact reach values of the chain given by one distribution per state, with
/// boundary states pinned to their values.
fn evaluate_chain(choice: &[&Distribution], boundary: &[Option<Rational>]) -> Result<Vec<Rational>, SolveError> {
    let n = choice.len();
    // Free states that can reach a positive boundary value.
    let mut live = vec![false; n];
    let mut frontier: Vec<StateId> = (0..n).filter(|&s| boundary[s].as_ref().is_some_and(|w| !w.is_zero())).collect();
    let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for s in 0..n {
        if boundary[s].is_none() {
            for t in choice[s].successors() {
                preds[t].push(s);
            }
        }
    }
    let mut reached = vec![false; n];
    for &s in &frontier {
        reached[s] = true;
    }
    while let Some(t) = frontier.pop() {
        for &s in &preds[t] {
            if !reached[s] {
                reached[s] = true;
                live[s] = true;
                frontier.push(s);
            }
        }
    }
    let vars: Vec<StateId> = (0..n).filter(|&s| live[s]).collect();
    let mut pos = vec![usize::MAX; n];
    for (i, &s) in vars.iter().enumerate() {
        pos[s] = i;
    }
    let m = vars.len();
    let mut a = vec![vec![Rational::zero(); m + 1]; m];
    for (i, &s) in vars.iter().enumerate() {
        a[i][i] = Rational::one();
        for (t, p) in choice[s].support() {
            if live[*t] {
                a[i][pos[*t]] -= p;
            } else if let Some(w) = &boundary[*t] {
                a[i][m] += p * w;
            }
        }
    }
    let sol = gauss_solve(a)?;
    let mut out: Vec<Rational> = boundary.iter().map(|b| b.clone().unwrap_or_else(Rational::zero)).collect();
    for (i, &s) in vars.iter().enumerate() {
        out[s] = sol[i].clone();
    }
    Ok(out)
}

/// Solves an augmented `m × (m+1)` system.
fn gauss_solve(mut a: Vec<Vec<Rational>>) -> Result<Vec<Rational>, SolveError> {
    let m = a.len();
    for col in 0..m {
        let pivot = (col..m).find(|&r| !a[r][col].is_zero()).ok_or(SolveError::Singular)?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for k in col..=m {
            a[col][k] = &a[col][k] * &inv;
        }
        for r in 0..m {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for k in col..=m {
                    let d = &f * &a[col][k];
                    a[r][k] -= d;
                }
            }
        }
    }
    Ok(a.into_iter().map(|row| row[m].clone()).collect())
}

/// Least fixpoint of the positive attractor towards `{t | fixed(t) > 0}`;
/// fixed states are absorbing.
fn positive_mask(game: &StochasticGame, fixed: &[Option<Rational>]) -> Vec<bool> {
    let n = game.num_states();
    let mut in_x: Vec<bool> = (0..n).map(|s| fixed[s].as_ref().is_some_and(|w| !w.is_zero())).collect();
    loop {
        let mut changed = false;
        for s in 0..n {
            if in_x[s] || fixed[s].is_some() {
                continue;
            }
            let hits = |a: &Action| a.dist.successors().any(|t| in_x[t]);
            let add = match game.owner(s) {
                Player::Max => game.actions(s).iter().any(hits),
                Player::Min => game.actions(s).iter().all(hits),
            };
            if add {
                in_x[s] = true;
                changed = true;
            }
        }
        if !changed {
            return in_x;
        }
    }
}

/// States from which Max reaches weight-one targets with probability one.
/// Pinning them keeps value one exact in floating point, just as the
/// complement of [`positive_mask`] keeps zero exact.
/// Also returns, for Max states in the region, an action that stays inside
/// and makes progress towards the targets.
fn almost_sure_mask(game: &StochasticGame, fixed: &[Option<Rational>]) -> (Vec<bool>, Vec<Option<usize>>) {
    let n = game.num_states();
    let goal: Vec<bool> = (0..n).map(|s| fixed[s].as_ref().is_some_and(|w| w.is_one())).collect();
    let mut w: Vec<bool> = (0..n).map(|s| goal[s] || fixed[s].is_none()).collect();
    loop {
        // Positive attractor of the goal among moves that never leave `w`.
        let mut y = goal.clone();
        let mut progress = vec![None; n];
        loop {
            let mut changed = false;
            for s in 0..n {
                if y[s] || !w[s] || fixed[s].is_some() {
                    continue;
                }
                let within = |a: &Action| a.dist.successors().all(|t| w[t]);
                let hits = |a: &Action| a.dist.successors().any(|t| y[t]);
                let add = match game.owner(s) {
                    Player::Max => {
                        progress[s] = game.actions(s).iter().position(|a| within(a) && hits(a));
                        progress[s].is_some()
                    }
                    Player::Min => game.actions(s).iter().all(|a| within(a) && hits(a)),
                };
                if add {
                    y[s] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if y == w {
            return (w, progress);
        }
        w = y;
    }
}

/// States from which Max can force reaching a positively weighted target
/// with positive probability.
pub fn positive_states(game: &StochasticGame, q: &QuantifiedObjective) -> BTreeSet<StateId> {
    let fixed: Vec<Option<Rational>> = (0..game.num_states()).map(|s| q.weight(s).cloned()).collect();
    positive_mask(game, &fixed).into_iter().enumerate().filter(|(_, p)| *p).map(|(s, _)| s).collect()
}

pub(crate) fn check_domain(game: &StochasticGame, q: &QuantifiedObjective) -> Result<(), SolveError> {
    if let Some(&bad) = q.weights().keys().find(|&&s| s >= game.num_states()) {
        return Err(SolveError::Game(crate::game::GameError::BadState(bad)));
    }
    Ok(())
}

pub fn solve_reach<N: Numeric>(
    game: &StochasticGame,
    q: &QuantifiedObjective,
    cfg: &SolverConfig,
) -> Result<SingleSolution<N>, SolveError> {
    if q.kind != ObjectiveKind::Reach {
        return Err(SolveError::WrongKind { expected: "reach" });
    }
    check_domain(game, q)?;
    let problem = ReachProblem::new(game, q);
    let (values, sigma, iterations) = N::reach_values(&problem, cfg)?;
    let mut max_strategy = match sigma {
        Some(idx) => MDStrategy::from_indices(game, Player::Max, &idx),
        None => attractor_strategy(&problem, &values, cfg),
    };
    for (s, a) in problem.sure_action.iter().enumerate() {
        if let Some(a) = a {
            max_strategy.set(s, game.actions(s)[*a].label.clone());
        }
    }
    let min_strategy = min_strategy(&problem, &values, cfg);
    Ok(SingleSolution { values: ValueAssignment { values }, max_strategy, min_strategy, iterations })
}

/// Safety value is one minus the reach value of the opponent, computed on
/// the owner-swapped game.
pub fn solve_safe<N: Numeric>(
    game: &StochasticGame,
    q: &QuantifiedObjective,
    cfg: &SolverConfig,
) -> Result<SingleSolution<N>, SolveError> {
    if q.kind != ObjectiveKind::Safe {
        return Err(SolveError::WrongKind { expected: "safe" });
    }
    let swapped = swap_owners(game);
    let sol = solve_reach::<N>(&swapped, &q.with_kind(ObjectiveKind::Reach), cfg)?;
    let values = sol.values.values.into_iter().map(|v| N::one() - v).collect();
    Ok(SingleSolution {
        values: ValueAssignment { values },
        max_strategy: sol.min_strategy.with_player(Player::Max),
        min_strategy: sol.max_strategy.with_player(Player::Min),
        iterations: sol.iterations,
    })
}

pub fn solve_single<N: Numeric>(
    game: &StochasticGame,
    q: &QuantifiedObjective,
    cfg: &SolverConfig,
) -> Result<SingleSolution<N>, SolveError> {
    match q.kind {
        ObjectiveKind::Reach => solve_reach(game, q, cfg),
        ObjectiveKind::Safe => solve_safe(game, q, cfg),
    }
}

pub fn action_values<N: Numeric>(game: &StochasticGame, v: &[N]) -> Vec<Vec<N>> {
    (0..game.num_states())
        .map(|s| {
            game.actions(s)
                .iter()
                .map(|a| {
                    a.dist.support().iter().fold(N::zero(), |acc, (t, p)| acc + N::from_rational(p) * v[*t].clone())
                })
                .collect()
        })
        .collect()
}

/// Indices of the actions of `s` that attain the owner's optimum within
/// `eps`. An exact zero optimum only admits exact zeros, so zero-ness stays
/// graph-determined in floating point.
pub(crate) fn optimal_actions<N: Numeric>(owner: Player, vals: &[N], eps: f64) -> Vec<usize> {
    let mut best = vals[0].clone();
    for v in &vals[1..] {
        let better = match owner {
            Player::Max => *v > best,
            Player::Min => *v < best,
        };
        if better {
            best = v.clone();
        }
    }
    let exact_zero = best.is_zero();
    vals.iter()
        .enumerate()
        .filter(|(_, v)| if exact_zero { v.is_zero() } else { v.cmp_tol(&best, eps) == Ordering::Equal })
        .map(|(a, _)| a)
        .collect()
}

/// Keeps the locally optimal actions of every state.
pub fn locally_optimal_filter<N: Numeric>(game: &StochasticGame, v: &[N], cfg: &SolverConfig) -> ActionFilter {
    let av = action_values(game, v);
    let eps = effective_eps::<N>(cfg);
    let keep = (0..game.num_states())
        .map(|s| {
            let opt = optimal_actions(game.owner(s), &av[s], eps);
            let mut mask = vec![false; av[s].len()];
            for a in opt {
                mask[a] = true;
            }
            mask
        })
        .collect();
    ActionFilter::from_mask(keep)
}

pub(crate) fn effective_eps<N: Numeric>(cfg: &SolverConfig) -> f64 {
    match N::MODE {
        Mode::Exact => 0.0,
        Mode::Vi => cfg.action_epsilon,
    }
}

/// Lowest-index locally optimal action; on zero-value states an action that
/// keeps the play inside the zero region.
fn min_strategy<N: Numeric>(problem: &ReachProblem<'_>, values: &[N], cfg: &SolverConfig) -> MDStrategy {
    let game = problem.game;
    let av = action_values(game, values);
    let eps = effective_eps::<N>(cfg);
    let idx: Vec<usize> = (0..game.num_states())
        .map(|s| {
            if game.owner(s) != Player::Min {
                return 0;
            }
            optimal_actions(Player::Min, &av[s], eps)[0]
        })
        .collect();
    MDStrategy::from_indices(game, Player::Min, &idx)
}

/// Max strategy from locally optimal actions that make progress along the
/// positive attractor computed inside the optimal-action subgame. Plain
/// greedy choice can cycle among equally valued states forever.
fn attractor_strategy<N: Numeric>(problem: &ReachProblem<'_>, values: &[N], cfg: &SolverConfig) -> MDStrategy {
    let game = problem.game;
    let n = game.num_states();
    let av = action_values(game, values);
    let eps = effective_eps::<N>(cfg);
    let opt: Vec<Vec<usize>> = (0..n).map(|s| optimal_actions(game.owner(s), &av[s], eps)).collect();
    let mut idx: Vec<usize> = opt.iter().map(|o| o[0]).collect();
    let mut in_x: Vec<bool> = (0..n).map(|s| problem.boundary[s].as_ref().is_some_and(|w| !w.is_zero())).collect();
    loop {
        let mut layer = Vec::new();
        for s in 0..n {
            if in_x[s] || !problem.is_free(s) {
                continue;
            }
            let hits = |a: &usize| game.actions(s)[*a].dist.successors().any(|t| in_x[t]);
            match game.owner(s) {
                Player::Max => {
                    if let Some(&a) = opt[s].iter().find(|a| hits(a)) {
                        idx[s] = a;
                        layer.push(s);
                    }
                }
                Player::Min => {
                    if opt[s].iter().all(hits) {
                        layer.push(s);
                    }
                }
            }
        }
        if layer.is_empty() {
            break;
        }
        for s in layer {
            in_x[s] = true;
        }
    }
    MDStrategy::from_indices(game, Player::Max, &idx)
}

/// True iff against every Min strategy, the play under `sigma` reaches
/// `target` with probability one from every state.
pub fn almost_sure_reach_under(game: &StochasticGame, sigma: &MDStrategy, target: &BTreeSet<StateId>) -> bool {
    let n = game.num_states();
    let mut chosen = vec![0usize; n];
    for s in game.players_states(Player::Max) {
        match sigma.action_index(game, s) {
            Some(a) => chosen[s] = a,
            None => return false,
        }
    }
    let mut z: Vec<bool> = (0..n).map(|s| !target.contains(&s)).collect();
    loop {
        let mut changed = false;
        for s in 0..n {
            if !z[s] {
                continue;
            }
            let stays = |a: &Action| a.dist.successors().all(|t| z[t]);
            let keep = match game.owner(s) {
                Player::Max => stays(&game.actions(s)[chosen[s]]),
                Player::Min => game.actions(s).iter().any(stays),
            };
            if !keep {
                z[s] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    !z.iter().any(|&b| b)
}

/// Plain reachability instance equivalent to `Reach q`: every domain state
/// gets a single action that moves to a fresh goal sink with probability
/// `q(t)` and to a fresh fail sink otherwise.
pub fn gadget_game(game: &StochasticGame, q: &QuantifiedObjective) -> (StochasticGame, BTreeSet<StateId>) {
    let n = game.num_states();
    let fresh = |base: &str| {
        let mut name = base.to_string();
        while game.state_index(&name).is_some() {
            name.push('_');
        }
        name
    };
    let goal = n;
    let fail = n + 1;
    let mut states: Vec<State> = game.states().to_vec();
    for (&t, w) in q.weights() {
        let mut support = Vec::new();
        if !w.is_zero() {
            support.push((goal, w.clone()));
        }
        let rest = Rational::one() - w;
        if !rest.is_zero() {
            support.push((fail, rest));
        }
        states[t].actions =
            vec![Action { label: "gadget".to_string(), dist: Distribution::new(support).expect("weights in [0,1]") }];
    }
    for (i, name) in [(goal, fresh("goal")), (fail, fresh("fail"))] {
        states.push(State {
            name,
            owner: Player::Max,
            actions: vec![Action { label: "self".to_string(), dist: Distribution::dirac(i) }],
        });
    }
    let g = StochasticGame::new(states, game.initial()).expect("gadget preserves validity");
    (g, BTreeSet::from([goal]))
}
