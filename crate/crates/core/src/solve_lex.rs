//! Lexicographic solving: absorbing objectives by successive restriction to
//! locally optimal actions, general objectives by stages.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_traits::{One, Zero};

use crate::error::SolveError;
use crate::game::{
    make_absorbing, restrict, sinks, swap_owners, Action, ActionFilter, Distribution, Player, State, StateId,
    StochasticGame,
};
use crate::numeric::{parse_rational, round_to_micro, Mode, Numeric, Rational};
use crate::objective::{
    lex_compare, LexObjective, LexVector, Objective, ObjectiveKind, QuantifiedLexObjective, QuantifiedObjective,
    StageKey,
};
use crate::solve_single::{locally_optimal_filter, positive_states, solve_single, MDStrategy, SolverConfig};
use crate::trapped::{repair_stalls, solve_reach_trapped};

/// Lex-value vector per state.
#[derive(Clone, Debug, PartialEq)]
pub struct LexValueAssignment<N> {
    pub values: Vec<LexVector<N>>,
}

impl<N: Numeric> LexValueAssignment<N> {
    pub fn mode(&self) -> Mode {
        N::MODE
    }

    pub fn get(&self, s: StateId) -> &[N] {
        &self.values[s]
    }

    pub fn to_rational(&self) -> Vec<Vec<Rational>> {
        self.values.iter().map(|v| v.iter().map(N::to_rational).collect()).collect()
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.values.iter().map(|v| v.iter().map(crate::numeric::as_f64).collect()).collect()
    }
}

/// Finite-memory strategy whose memory is the set of objective indices whose
/// targets were visited so far.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StagedStrategy {
    player: Player,
    objective: LexObjective,
    table: BTreeMap<StageKey, MDStrategy>,
}

impl StagedStrategy {
    pub fn new(player: Player, objective: LexObjective, table: BTreeMap<StageKey, MDStrategy>) -> Self {
        StagedStrategy { player, objective, table }
    }

    /// A memoryless strategy used in every stage.
    pub fn memoryless(objective: LexObjective, sigma: MDStrategy) -> Self {
        let n = objective.len();
        let table = (0..(1u32 << n) - 1).map(|b| (StageKey::from_bits(b), sigma.clone())).collect();
        StagedStrategy { player: sigma.player(), objective, table }
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn objective(&self) -> &LexObjective {
        &self.objective
    }

    pub fn table(&self) -> &BTreeMap<StageKey, MDStrategy> {
        &self.table
    }

    pub fn initial_stage(&self, s: StateId) -> StageKey {
        self.objective.stage_of_state(s)
    }

    pub fn next_stage(&self, key: StageKey, s: StateId) -> StageKey {
        key.union(self.objective.stage_of_state(s))
    }

    /// Action label at `s` in stage `key`. Once every objective is decided
    /// the first action is used.
    pub fn choice<'a>(&'a self, game: &'a StochasticGame, key: StageKey, s: StateId) -> Result<&'a str, SolveError> {
        if key.is_full(self.objective.len()) {
            return Ok(&game.actions(s)[0].label);
        }
        self.table
            .get(&key)
            .and_then(|m| m.label(s))
            .filter(|l| game.action_index(s, l).is_some())
            .ok_or_else(|| SolveError::MissingChoice { state: game.name(s).to_string(), stage: key.render() })
    }

    /// Pairs (state, stage) reachable from every state's initial stage,
    /// assuming the strategy is followed for `player` and anything for the opponent.
    pub fn reachable_pairs(&self, game: &StochasticGame) -> Result<BTreeSet<(StateId, StageKey)>, SolveError> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<(StateId, StageKey)> = (0..game.num_states()).map(|s| (s, self.initial_stage(s))).collect();
        while let Some((s, k)) = stack.pop() {
            if !seen.insert((s, k)) {
                continue;
            }
            let acts: Vec<&Action> = if game.owner(s) == self.player {
                let l = self.choice(game, k, s)?;
                vec![&game.actions(s)[game.action_index(s, l).expect("checked label")]]
            } else {
                game.actions(s).iter().collect()
            };
            for a in acts {
                for t in a.dist.successors() {
                    let nk = self.next_stage(k, t);
                    if !seen.contains(&(t, nk)) {
                        stack.push((t, nk));
                    }
                }
            }
        }
        Ok(seen)
    }
}

/// Final set: union of the reach domains and the
/// intersection of their zero sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinalSetReport {
    pub reach_prefix: BTreeSet<usize>,
    pub zero_sets: BTreeMap<usize, BTreeSet<StateId>>,
    pub final_set: BTreeSet<StateId>,
}

/// Computes the final set for the objectives in `prefix` on `game`, which is
/// expected to be restricted to prefix-optimal actions already. Zero sets
/// are qualitative, so no values are needed.
pub fn final_set(game: &StochasticGame, prefix: &[QuantifiedObjective]) -> FinalSetReport {
    let all: BTreeSet<StateId> = (0..game.num_states()).collect();
    let zero_sets = prefix
        .iter()
        .enumerate()
        .filter(|(_, q)| q.kind == ObjectiveKind::Reach)
        .map(|(k, q)| (k, all.difference(&positive_states(game, q)).copied().collect()))
        .collect();
    final_set_from(game.num_states(), prefix, zero_sets)
}

/// Final set from zero sets that are already known, one per reach objective
/// of `prefix`.
pub fn final_set_from(
    n: usize,
    prefix: &[QuantifiedObjective],
    zero_sets: BTreeMap<usize, BTreeSet<StateId>>,
) -> FinalSetReport {
    let reach_prefix: BTreeSet<usize> =
        prefix.iter().enumerate().filter(|(_, q)| q.kind == ObjectiveKind::Reach).map(|(k, _)| k).collect();
    let mut union = BTreeSet::new();
    let mut inter: BTreeSet<StateId> = (0..n).collect();
    if reach_prefix.is_empty() {
        return FinalSetReport { reach_prefix, zero_sets: BTreeMap::new(), final_set: inter };
    }
    for &k in &reach_prefix {
        union.extend(prefix[k].domain());
        inter = inter.intersection(&zero_sets[&k]).copied().collect();
    }
    union.extend(inter);
    FinalSetReport { reach_prefix, zero_sets, final_set: union }
}

/// Which player a state's lex-value vector blames for staying forever
/// among non-target states: the first objective where staying differs from
/// the value decides.
fn min_blamed<N: Numeric>(entries: &[QuantifiedObjective], v: &[N], eps: f64) -> bool {
    for (q, x) in entries.iter().zip(v) {
        match q.kind {
            ObjectiveKind::Reach if !x.is_zero() => return false,
            ObjectiveKind::Safe if x.cmp_tol(&N::one(), eps) == Ordering::Less => return true,
            _ => {}
        }
    }
    false
}

/// Outcome of one absorbing solve.
#[derive(Clone, Debug, PartialEq)]
pub struct AbsorbingReport<N> {
    pub values: LexValueAssignment<N>,
    pub strategy: MDStrategy,
    /// Game after restriction to optimal actions for every objective.
    pub final_game: StochasticGame,
    /// The same restriction expressed against the input game.
    pub final_filter: ActionFilter,
    /// For each safety objective, the final set used to build its QRO.
    pub final_sets: Vec<Option<FinalSetReport>>,
    /// For each safety objective with a proper final set, the QRO solved.
    pub qro_objectives: Vec<Option<QuantifiedObjective>>,
    /// Average action count after each restriction.
    pub avg_actions: Vec<f64>,
    /// States of value zero, per reach objective.
    pub zero_sets: BTreeMap<usize, BTreeSet<StateId>>,
    /// Non-sink states where staying forever is Min's fault under the full vector.
    pub min_blamed: BTreeSet<StateId>,
    pub primary_calls: usize,
    pub qro_calls: usize,
    pub iterations: u64,
}

impl<N> AbsorbingReport<N> {
    /// The set a lex-optimal strategy must reach almost surely.
    pub fn certificate_set(&self, qobj: &QuantifiedLexObjective) -> BTreeSet<StateId> {
        final_set_from(self.final_game.num_states(), qobj.entries(), self.zero_sets.clone()).final_set
    }
}

/// Solves a lex-objective whose domain consists of sinks.
pub fn solve_absorbing<N: Numeric>(
    game: &StochasticGame,
    qobj: &QuantifiedLexObjective,
    cfg: &SolverConfig,
) -> Result<AbsorbingReport<N>, SolveError> {
    cfg.validate()?;
    let n = game.num_states();
    if !qobj.domain().is_subset(&sinks(game)) {
        return Err(SolveError::NotAbsorbing);
    }
    let entries = qobj.entries();
    let mut g_hat = game.clone();
    let mut mask: Vec<Vec<bool>> = (0..n).map(|s| vec![true; game.actions(s).len()]).collect();
    let mut sigma = MDStrategy::first_actions(game, Player::Max);
    let mut values: Vec<Vec<N>> = vec![Vec::with_capacity(entries.len()); n];
    let mut report_sets = Vec::with_capacity(entries.len());
    let mut report_qros = Vec::with_capacity(entries.len());
    let mut avg_actions = Vec::with_capacity(entries.len());
    let (mut primary, mut qro_calls, mut iterations) = (0usize, 0usize, 0u64);

    let eps = match N::MODE {
        Mode::Exact => 0.0,
        Mode::Vi => cfg.action_epsilon,
    };
    let mut zero_sets = BTreeMap::new();
    for (i, q) in entries.iter().enumerate() {
        let trap: Vec<bool> = (0..n).map(|s| !g_hat.is_sink(s) && min_blamed(&entries[..i], &values[s], eps)).collect();
        let v: Vec<N> = match q.kind {
            ObjectiveKind::Reach => {
                let (sol, _) = solve_reach_trapped::<N>(&g_hat, q, &trap, cfg)?;
                primary += 1;
                iterations += sol.iterations;
                // Keep the old choice where the objective cannot be helped.
                for s in g_hat.players_states(Player::Max) {
                    if !sol.values.values[s].is_zero() {
                        sigma.set(s, sol.max_strategy.label(s).expect("total").to_string());
                    }
                }
                zero_sets.insert(i, (0..n).filter(|&s| sol.values.values[s].is_zero()).collect());
                report_sets.push(None);
                report_qros.push(None);
                sol.values.values
            }
            ObjectiveKind::Safe => {
                let sol = solve_single::<N>(&g_hat, q, cfg)?;
                primary += 1;
                iterations += sol.iterations;
                let fr = final_set_from(n, &entries[..i], zero_sets.clone());
                if fr.final_set.len() == n {
                    for s in g_hat.players_states(Player::Max) {
                        sigma.set(s, sol.max_strategy.label(s).expect("total").to_string());
                    }
                    report_sets.push(Some(fr));
                    report_qros.push(None);
                    sol.values.values
                } else {
                    let weights = fr.final_set.iter().map(|&s| (s, sol.values.values[s].to_rational())).collect();
                    let qro = QuantifiedObjective::new(ObjectiveKind::Reach, weights)?;
                    let (qsol, _) = solve_reach_trapped::<N>(&g_hat, &qro, &trap, cfg)?;
                    qro_calls += 1;
                    iterations += qsol.iterations;
                    for s in g_hat.players_states(Player::Max) {
                        let src = if fr.final_set.contains(&s) { &sol.max_strategy } else { &qsol.max_strategy };
                        sigma.set(s, src.label(s).expect("total").to_string());
                    }
                    report_sets.push(Some(fr));
                    report_qros.push(Some(qro));
                    qsol.values.values
                }
            }
        };
        let filter = locally_optimal_filter(&g_hat, &v, cfg);
        for s in 0..n {
            let kept: BTreeSet<&str> = filter.kept(s).map(|a| g_hat.actions(s)[a].label.as_str()).collect();
            for (a, act) in game.actions(s).iter().enumerate() {
                if !kept.contains(act.label.as_str()) {
                    mask[s][a] = false;
                }
            }
        }
        g_hat = restrict(&g_hat, &filter)?;
        avg_actions.push(g_hat.average_actions());
        for (s, x) in v.into_iter().enumerate() {
            values[s].push(x);
        }
    }
    let blamed: BTreeSet<StateId> =
        (0..n).filter(|&s| !game.is_sink(s) && min_blamed(entries, &values[s], eps)).collect();
    // Choices kept from earlier objectives, or made where a later objective
    // is indifferent, may loop forever where a higher objective is lost.
    let certificate = final_set_from(n, entries, zero_sets.clone()).final_set;
    repair_stalls(&g_hat, &mut sigma, &certificate, &blamed);
    Ok(AbsorbingReport {
        values: LexValueAssignment { values },
        strategy: sigma,
        final_game: g_hat,
        final_filter: ActionFilter::from_mask(mask),
        final_sets: report_sets,
        qro_objectives: report_qros,
        avg_actions,
        min_blamed: blamed,
        zero_sets,
        primary_calls: primary,
        qro_calls,
        iterations,
    })
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct SolveStats {
    pub stages_explored: usize,
    /// 2^n - 1 for n objectives.
    pub stage_bound: usize,
    pub primary_calls: usize,
    pub qro_calls: usize,
    pub iterations: u64,
    pub original_avg_actions: f64,
    /// Average action count after each objective's restriction, per solved stage.
    pub stage_avg_actions: BTreeMap<StageKey, Vec<f64>>,
}

impl SolveStats {
    pub fn solver_calls(&self) -> usize {
        self.primary_calls + self.qro_calls
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport<N> {
    pub values: LexValueAssignment<N>,
    pub strategy: StagedStrategy,
    pub stats: SolveStats,
    /// Details of the absorbing solve behind the outermost stage, when there is one.
    pub main: Option<AbsorbingReport<N>>,
}

struct StageSolution<N> {
    /// Values of the objectives still active in this stage.
    values: Vec<Vec<N>>,
    strategy: MDStrategy,
    aliases: Vec<StageKey>,
    absorbing: Option<AbsorbingReport<N>>,
}

struct StageSolver<'a, N> {
    game: &'a StochasticGame,
    obj: &'a LexObjective,
    cfg: &'a SolverConfig,
    memo: BTreeMap<StageKey, StageSolution<N>>,
    stats: SolveStats,
}

impl<'a, N: Numeric> StageSolver<'a, N> {
    fn solve(&mut self, key: StageKey) -> Result<(), SolveError> {
        if self.memo.contains_key(&key) {
            return Ok(());
        }
        let n = self.obj.len();
        let active = key.active(n);
        let stage_obj = self.obj.stage_objective(key)?;

        if active.len() == 1 && !stage_obj.is_absorbing(self.game) {
            let o = &stage_obj.entries()[0];
            let q = QuantifiedObjective::indicator(o.kind, &o.target)?;
            let sol = solve_single::<N>(self.game, &q, self.cfg)?;
            self.stats.primary_calls += 1;
            self.stats.iterations += sol.iterations;
            let values = sol.values.values.into_iter().map(|v| vec![v]).collect();
            self.memo.insert(
                key,
                StageSolution { values, strategy: sol.max_strategy, aliases: Vec::new(), absorbing: None },
            );
            return Ok(());
        }

        if stage_obj.is_absorbing(self.game) {
            let qobj = QuantifiedLexObjective::from_boolean(&stage_obj)?;
            let rep = solve_absorbing::<N>(self.game, &qobj, self.cfg)?;
            self.account(key, &rep);
            // Entering a target sink moves to a stage that is never solved;
            // the sink's only choice is its self-loop, so reuse this table.
            let aliases: BTreeSet<StageKey> = stage_obj
                .target_union()
                .into_iter()
                .map(|s| key.union(self.obj.stage_of_state(s)))
                .filter(|j| !j.is_full(n) && *j != key)
                .collect();
            self.memo.insert(
                key,
                StageSolution {
                    values: rep.values.values.clone(),
                    strategy: rep.strategy.clone(),
                    aliases: aliases.into_iter().collect(),
                    absorbing: Some(rep),
                },
            );
            return Ok(());
        }

        let d = stage_obj.target_union();
        let mut next: BTreeMap<StateId, StageKey> = BTreeMap::new();
        for &s in &d {
            let j = key.union(self.obj.stage_of_state(s));
            if !j.is_full(n) {
                self.solve(j)?;
            }
            next.insert(s, j);
        }
        let mut entries = Vec::with_capacity(active.len());
        for &i in &active {
            let o = &self.obj.entries()[i];
            let mut weights = BTreeMap::new();
            for &s in &d {
                let w = if o.target.contains(&s) {
                    Rational::one()
                } else {
                    let j = next[&s];
                    let pos = j.active(n).iter().position(|&x| x == i).expect("i stays active");
                    // Clamped so VI round-off cannot produce an invalid weight.
                    let v = self.memo[&j].values[s][pos].to_rational().clamp(Rational::zero(), Rational::one());
                    match o.kind {
                        ObjectiveKind::Reach => v,
                        ObjectiveKind::Safe => Rational::one() - v,
                    }
                };
                weights.insert(s, w);
            }
            entries.push(QuantifiedObjective::new(o.kind, weights)?);
        }
        let qobj = QuantifiedLexObjective::new(entries)?;
        let absorbing = make_absorbing(self.game, &d);
        let rep = solve_absorbing::<N>(&absorbing, &qobj, self.cfg)?;
        self.account(key, &rep);
        let mut strategy = rep.strategy.clone();
        for &s in &d {
            if self.game.owner(s) == Player::Max {
                strategy.set(s, self.game.actions(s)[0].label.clone());
            }
        }
        self.memo.insert(
            key,
            StageSolution { values: rep.values.values.clone(), strategy, aliases: Vec::new(), absorbing: Some(rep) },
        );
        Ok(())
    }

    fn account(&mut self, key: StageKey, rep: &AbsorbingReport<N>) {
        self.stats.primary_calls += rep.primary_calls;
        self.stats.qro_calls += rep.qro_calls;
        self.stats.iterations += rep.iterations;
        self.stats.stage_avg_actions.insert(key, rep.avg_actions.clone());
    }
}

/// Solves a general lex-objective.
pub fn solve_lex<N: Numeric>(
    game: &StochasticGame,
    obj: &LexObjective,
    cfg: &SolverConfig,
) -> Result<SolveReport<N>, SolveError> {
    cfg.validate()?;
    obj.check_game(game)?;
    let n = obj.len();
    let mut solver: StageSolver<N> = StageSolver {
        game,
        obj,
        cfg,
        memo: BTreeMap::new(),
        stats: SolveStats {
            stage_bound: (1usize << n) - 1,
            original_avg_actions: game.average_actions(),
            ..Default::default()
        },
    };
    solver.solve(StageKey::EMPTY)?;
    let StageSolver { memo, mut stats, .. } = solver;
    stats.stages_explored = memo.len();

    let mut table = BTreeMap::new();
    let mut main = None;
    let mut top_values = None;
    for (key, sol) in memo {
        for alias in &sol.aliases {
            table.entry(*alias).or_insert_with(|| sol.strategy.clone());
        }
        table.insert(key, sol.strategy);
        if key == StageKey::EMPTY {
            top_values = Some(sol.values);
            main = sol.absorbing;
        }
    }
    Ok(SolveReport {
        values: LexValueAssignment { values: top_values.expect("root stage solved") },
        strategy: StagedStrategy { player: Player::Max, objective: obj.clone(), table },
        stats,
        main,
    })
}

/// Product of `game` with the stage memory, with `player`'s choices fixed by
/// `strategy`. Returns the product, its objective and, per original state,
/// the product state of its initial stage.
pub fn strategy_product(
    game: &StochasticGame,
    obj: &LexObjective,
    strategy: &StagedStrategy,
) -> Result<(StochasticGame, LexObjective, Vec<StateId>), SolveError> {
    let n = obj.len();
    let pairs: Vec<(StateId, StageKey)> = strategy.reachable_pairs(game)?.into_iter().collect();
    let index: BTreeMap<(StateId, StageKey), StateId> = pairs.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let mut states = Vec::with_capacity(pairs.len());
    for (i, &(s, k)) in pairs.iter().enumerate() {
        let name = format!("{}@{}", game.name(s), k.render());
        let lift = |a: &Action| -> Action {
            let support =
                a.dist.support().iter().map(|(t, p)| (index[&(*t, strategy.next_stage(k, *t))], p.clone())).collect();
            Action { label: a.label.clone(), dist: Distribution::new(support).expect("lifted distribution") }
        };
        let actions = if k.is_full(n) {
            vec![Action { label: crate::game::SELF_LABEL.to_string(), dist: Distribution::dirac(i) }]
        } else if game.owner(s) == strategy.player() {
            let l = strategy.choice(game, k, s)?;
            vec![lift(&game.actions(s)[game.action_index(s, l).expect("checked label")])]
        } else {
            game.actions(s).iter().map(lift).collect()
        };
        states.push(State { name, owner: game.owner(s), actions });
    }
    let product = StochasticGame::new(states, None)?;
    let entries = obj
        .entries()
        .iter()
        .enumerate()
        .map(|(i, o)| Objective {
            kind: o.kind,
            target: pairs.iter().enumerate().filter(|(_, (_, k))| k.contains(i)).map(|(x, _)| x).collect(),
        })
        .collect();
    let pobj = LexObjective::new(entries)?;
    let start = (0..game.num_states()).map(|s| index[&(s, strategy.initial_stage(s))]).collect();
    Ok((product, pobj, start))
}

/// Values a Max staged strategy guarantees against every Min behaviour.
pub fn evaluate_strategy<N: Numeric>(
    game: &StochasticGame,
    obj: &LexObjective,
    sigma: &StagedStrategy,
    cfg: &SolverConfig,
) -> Result<LexValueAssignment<N>, SolveError> {
    if sigma.player() != Player::Max {
        return Err(SolveError::BadStrategy("expected a strategy for Max".into()));
    }
    let (product, pobj, start) = strategy_product(game, obj, sigma)?;
    let rep = solve_lex::<N>(&product, &pobj, cfg)?;
    Ok(LexValueAssignment { values: start.into_iter().map(|p| rep.values.values[p].clone()).collect() })
}

/// Is the lex-value at `s0` lexicographically at least `threshold`?
pub fn decide<N: Numeric>(
    game: &StochasticGame,
    obj: &LexObjective,
    s0: StateId,
    threshold: &[Rational],
    cfg: &SolverConfig,
) -> Result<bool, SolveError> {
    if threshold.len() != obj.len() {
        return Err(crate::objective::ObjectiveError::LengthMismatch(threshold.len(), obj.len()).into());
    }
    if s0 >= game.num_states() {
        return Err(crate::game::GameError::BadState(s0).into());
    }
    let rep = solve_lex::<N>(game, obj, cfg)?;
    Ok(lex_at_least(rep.values.get(s0), threshold)?)
}

/// Exact comparison in exact mode, comparison on a 10^-6 grid otherwise.
pub fn lex_at_least<N: Numeric>(value: &[N], threshold: &[Rational]) -> Result<bool, SolveError> {
    let ord = match N::MODE {
        Mode::Exact => {
            let v: Vec<Rational> = value.iter().map(N::to_rational).collect();
            lex_compare(&v, threshold)?
        }
        Mode::Vi => {
            let v: Vec<i64> = value.iter().map(|x| round_to_micro(crate::numeric::as_f64(x))).collect();
            let t: Vec<i64> = threshold.iter().map(|x| round_to_micro(crate::numeric::rational_to_f64(x))).collect();
            lex_compare(&v, &t)?
        }
    };
    Ok(ord != Ordering::Less)
}

/// Lexicographic `x >= y` where components within `eps` count as equal.
pub fn lex_ge_tol<N: Numeric>(x: &[N], y: &[N], eps: f64) -> bool {
    for (a, b) in x.iter().zip(y) {
        match a.cmp_tol(b, eps) {
            Ordering::Equal => continue,
            Ordering::Greater => return true,
            Ordering::Less => return false,
        }
    }
    true
}

pub struct DeterminacyReport<N> {
    pub values: LexValueAssignment<N>,
    pub dual_values: LexValueAssignment<N>,
    pub deviation: N,
}

/// Solves the instance and its dual (owners swapped, reach and safety
/// exchanged); the two value vectors must be complements.
pub fn determinacy_check<N: Numeric>(
    game: &StochasticGame,
    obj: &LexObjective,
    cfg: &SolverConfig,
) -> Result<DeterminacyReport<N>, SolveError> {
    let primal = solve_lex::<N>(game, obj, cfg)?;
    let dual = solve_lex::<N>(&swap_owners(game), &obj.dual(), cfg)?;
    let mut deviation = N::zero();
    for (a, b) in primal.values.values.iter().zip(&dual.values.values) {
        for (x, y) in a.iter().zip(b) {
            let d = (x.clone() + y.clone() - N::one()).abs();
            if d > deviation {
                deviation = d;
            }
        }
    }
    Ok(DeterminacyReport { values: primal.values, dual_values: dual.values, deviation })
}

/// Optimal staged strategy for Min, taken from the dual instance.
pub fn min_strategy<N: Numeric>(
    game: &StochasticGame,
    obj: &LexObjective,
    cfg: &SolverConfig,
) -> Result<StagedStrategy, SolveError> {
    let dual = solve_lex::<N>(&swap_owners(game), &obj.dual(), cfg)?;
    let table = dual
        .strategy
        .table
        .into_iter()
        .map(|(k, m)| {
            let choice = (0..game.num_states()).map(|s| m.label(s).map(str::to_string)).collect();
            (k, MDStrategy::from_labels(Player::Min, choice))
        })
        .collect();
    Ok(StagedStrategy { player: Player::Min, objective: obj.clone(), table })
}

/// Text export: `stage` lines per stage and Max state, then `value` lines.
pub fn export_strategy<N: Numeric>(
    game: &StochasticGame,
    strategy: &StagedStrategy,
    values: Option<&LexValueAssignment<N>>,
) -> String {
    let mut out = String::new();
    for (key, md) in &strategy.table {
        for s in game.players_states(strategy.player) {
            if let Some(l) = md.label(s) {
                let _ = writeln!(out, "stage {} {} {}", key.render(), game.name(s), l);
            }
        }
    }
    if let Some(v) = values {
        for (s, vec) in v.values.iter().enumerate() {
            let _ = write!(out, "value {}", game.name(s));
            for x in vec {
                let _ = write!(out, " {}", x.render());
            }
            out.push('\n');
        }
    }
    out
}

/// Strategy file contents: the Max strategy and the values claimed for
/// the states that have a `value` line.
#[derive(Clone, Debug, PartialEq)]
pub struct StrategyFile {
    pub strategy: StagedStrategy,
    pub claimed: BTreeMap<StateId, Vec<Rational>>,
}

pub fn parse_strategy(game: &StochasticGame, obj: &LexObjective, text: &str) -> Result<StrategyFile, SolveError> {
    let n = obj.len();
    let mut table: BTreeMap<StageKey, Vec<Option<String>>> = BTreeMap::new();
    let mut claimed: BTreeMap<StateId, Vec<Rational>> = BTreeMap::new();
    let bad = |line: usize, msg: String| SolveError::BadStrategy(format!("line {line}: {msg}"));
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks: Vec<&str> = raw.split('#').next().unwrap_or("").split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        match toks[0] {
            "stage" => {
                if toks.len() != 4 {
                    return Err(bad(line, "expected `stage <key> <state> <label>`".into()));
                }
                let key = StageKey::parse(toks[1]).ok_or_else(|| bad(line, format!("bad stage `{}`", toks[1])))?;
                if key.indices().any(|i| i >= n) || key.is_full(n) {
                    return Err(bad(line, format!("stage `{}` out of range", toks[1])));
                }
                let s = game.state_index(toks[2]).ok_or_else(|| bad(line, format!("unknown state `{}`", toks[2])))?;
                if game.owner(s) != Player::Max {
                    return Err(bad(line, format!("state `{}` is not a Max state", toks[2])));
                }
                if game.action_index(s, toks[3]).is_none() {
                    return Err(bad(line, format!("unknown action `{}` at `{}`", toks[3], toks[2])));
                }
                let row = table.entry(key).or_insert_with(|| vec![None; game.num_states()]);
                if row[s].replace(toks[3].to_string()).is_some() {
                    return Err(bad(line, "duplicate entry".into()));
                }
            }
            "value" => {
                if toks.len() != n + 2 {
                    return Err(bad(line, format!("expected {n} values")));
                }
                let s = game.state_index(toks[1]).ok_or_else(|| bad(line, format!("unknown state `{}`", toks[1])))?;
                let v = toks[2..]
                    .iter()
                    .map(|t| parse_rational(t).ok_or_else(|| bad(line, format!("bad value `{t}`"))))
                    .collect::<Result<Vec<_>, _>>()?;
                if claimed.insert(s, v).is_some() {
                    return Err(bad(line, format!("duplicate value line for `{}`", toks[1])));
                }
            }
            other => return Err(bad(line, format!("unknown directive `{other}`"))),
        }
    }
    let table = table.into_iter().map(|(k, c)| (k, MDStrategy::from_labels(Player::Max, c))).collect();
    Ok(StrategyFile { strategy: StagedStrategy { player: Player::Max, objective: obj.clone(), table }, claimed })
}
