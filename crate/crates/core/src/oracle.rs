//! Ground truth for small instances.
//!
//! Everything here is deliberately independent of the solver: Markov chains
//! are solved with a separate rational elimination, and lex-values come from
//! exhaustive enumeration of deterministic strategies for both players on the
//! product of the game with the visited-objectives memory.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::SolveError;
use crate::game::{Distribution, Player, StateId, StochasticGame};
use crate::numeric::{rational_to_f64, Rational};
use crate::objective::{LexObjective, ObjectiveKind, QuantifiedObjective, StageKey};
use crate::solve_lex::{LexValueAssignment, StagedStrategy};

/// A game with exactly one implicit action per state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkovChain {
    pub transitions: Vec<Distribution>,
}

impl MarkovChain {
    pub fn new(transitions: Vec<Distribution>) -> Self {
        MarkovChain { transitions }
    }

    /// The chain induced by picking action `choice[s]` at every state.
    pub fn induced(game: &StochasticGame, choice: &[usize]) -> Self {
        MarkovChain { transitions: (0..game.num_states()).map(|s| game.actions(s)[choice[s]].dist.clone()).collect() }
    }

    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }
}

/// Exact weighted first-hit probabilities of the domain of `q`.
pub fn mc_reach_exact(mc: &MarkovChain, q: &QuantifiedObjective) -> Vec<Rational> {
    let n = mc.len();
    let weight: Vec<Option<&Rational>> = (0..n).map(|s| q.weight(s)).collect();
    reach_weighted(n, |s| mc.transitions[s].support(), &weight)
}

fn reach_weighted<'a, F>(n: usize, succ: F, weight: &[Option<&Rational>]) -> Vec<Rational>
where
    F: Fn(StateId) -> &'a [(StateId, Rational)],
{
    // Backward search from positively weighted states through unweighted ones.
    let mut can = vec![false; n];
    let mut changed = true;
    for s in 0..n {
        if let Some(w) = weight[s] {
            can[s] = !w.is_zero();
        }
    }
    while changed {
        changed = false;
        for s in 0..n {
            if !can[s] && weight[s].is_none() && succ(s).iter().any(|(t, _)| can[*t]) {
                can[s] = true;
                changed = true;
            }
        }
    }
    let unknown: Vec<StateId> = (0..n).filter(|&s| can[s] && weight[s].is_none()).collect();
    let mut col = BTreeMap::new();
    for (i, &s) in unknown.iter().enumerate() {
        col.insert(s, i);
    }
    let m = unknown.len();
    // Row i: x_i - sum_j P_ij x_j = b_i, stored densely as (coefficients, rhs).
    let mut rows: Vec<(Vec<Rational>, Rational)> = unknown
        .iter()
        .map(|&s| {
            let mut coef = vec![Rational::zero(); m];
            let mut rhs = Rational::zero();
            coef[col[&s]] += Rational::one();
            for (t, p) in succ(s) {
                if let Some(&j) = col.get(t) {
                    coef[j] -= p;
                } else if let Some(w) = weight[*t] {
                    rhs += p * w;
                }
            }
            (coef, rhs)
        })
        .collect();
    // Forward elimination followed by back substitution.
    for k in 0..m {
        let p = (k..m).find(|&r| !rows[r].0[k].is_zero()).expect("chain system is nonsingular");
        rows.swap(k, p);
        let (head, tail) = rows.split_at_mut(k + 1);
        let pivot = &head[k];
        for row in tail.iter_mut() {
            if row.0[k].is_zero() {
                continue;
            }
            let f = &row.0[k] / &pivot.0[k];
            for j in k..m {
                let d = &f * &pivot.0[j];
                row.0[j] -= d;
            }
            let d = &f * &pivot.1;
            row.1 -= d;
        }
    }
    let mut x = vec![Rational::zero(); m];
    for k in (0..m).rev() {
        let mut acc = rows[k].1.clone();
        for j in k + 1..m {
            acc -= &rows[k].0[j] * &x[j];
        }
        x[k] = acc / &rows[k].0[k];
    }
    let mut out: Vec<Rational> = (0..n).map(|s| weight[s].cloned().unwrap_or_else(Rational::zero)).collect();
    for (i, &s) in unknown.iter().enumerate() {
        out[s] = x[i].clone();
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    /// Strategy pairs evaluated, summed over product components.
    pub max_pairs: u64,
    pub max_product_states: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_pairs: 2_000_000, max_product_states: 4096 }
    }
}

/// The game with stage memory: node = (state, visited-objective set).
struct Product {
    nodes: Vec<(StateId, StageKey)>,
    owner: Vec<Player>,
    /// Per node, per action: successors as node indices.
    actions: Vec<Vec<Vec<(usize, Rational)>>>,
    start: Vec<usize>,
    n_obj: usize,
}

impl Product {
    fn build(game: &StochasticGame, obj: &LexObjective, limits: &OracleLimits) -> Result<Self, SolveError> {
        let n_obj = obj.len();
        let mut index: BTreeMap<(StateId, StageKey), usize> = BTreeMap::new();
        let mut nodes = Vec::new();
        let mut intern = |node: (StateId, StageKey), nodes: &mut Vec<_>| -> usize {
            *index.entry(node).or_insert_with(|| {
                nodes.push(node);
                nodes.len() - 1
            })
        };
        let start: Vec<usize> =
            (0..game.num_states()).map(|s| intern((s, obj.stage_of_state(s)), &mut nodes)).collect();
        let mut actions: Vec<Vec<Vec<(usize, Rational)>>> = Vec::new();
        let mut head = 0;
        while head < nodes.len() {
            if nodes.len() > limits.max_product_states {
                return Err(SolveError::LimitExceeded(format!("product exceeds {} states", limits.max_product_states)));
            }
            let (s, k) = nodes[head];
            let mut acts = Vec::new();
            if k.is_full(n_obj) {
                acts.push(vec![(head, Rational::one())]);
            } else {
                for a in game.actions(s) {
                    let mut succ = Vec::new();
                    for (t, p) in a.dist.support() {
                        let nk = k.union(obj.stage_of_state(*t));
                        succ.push((intern((*t, nk), &mut nodes), p.clone()));
                    }
                    acts.push(succ);
                }
            }
            actions.push(acts);
            head += 1;
        }
        let owner = nodes.iter().map(|(s, _)| game.owner(*s)).collect();
        Ok(Product { nodes, owner, actions, start, n_obj })
    }

    fn len(&self) -> usize {
        self.nodes.len()
    }
}

/// Strongly connected components, successor components first.
fn components(p: &Product) -> Vec<Vec<usize>> {
    let n = p.len();
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|x| {
            let mut v: Vec<usize> = p.actions[x].iter().flatten().map(|(t, _)| *t).collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        // Iterative Tarjan: (node, next successor position).
        let mut call = vec![(root, 0usize)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (x, ref mut i)) = call.last_mut() {
            if *i < succ[x].len() {
                let t = succ[x][*i];
                *i += 1;
                if index[t] == usize::MAX {
                    index[t] = counter;
                    low[t] = counter;
                    counter += 1;
                    stack.push(t);
                    on_stack[t] = true;
                    call.push((t, 0));
                } else if on_stack[t] {
                    low[x] = low[x].min(index[t]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[x]);
                }
                if low[x] == index[x] {
                    let mut comp = Vec::new();
                    loop {
                        let y = stack.pop().expect("tarjan stack");
                        on_stack[y] = false;
                        comp.push(y);
                        if y == x {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    out.push(comp);
                }
            }
        }
    }
    out
}

/// Vector of a play that never visits another target: objectives already in
/// `key` are decided, the rest are lost (reach) or kept (safety).
fn settled(obj: &LexObjective, key: StageKey) -> Vec<Rational> {
    obj.entries()
        .iter()
        .enumerate()
        .map(|(i, o)| match (o.kind, key.contains(i)) {
            (ObjectiveKind::Reach, true) | (ObjectiveKind::Safe, false) => Rational::one(),
            _ => Rational::zero(),
        })
        .collect()
}

fn next_combo(combo: &mut [usize], radix: &[usize]) -> bool {
    for (c, r) in combo.iter_mut().zip(radix) {
        *c += 1;
        if *c < *r {
            return true;
        }
        *c = 0;
    }
    false
}

fn lex_cmp(a: &[Rational], b: &[Rational]) -> Ordering {
    a.iter().zip(b).map(|(x, y)| x.cmp(y)).find(|o| *o != Ordering::Equal).unwrap_or(Ordering::Equal)
}

/// Lex-values of every product node. Components are handled after all
/// components they can exit to; inside a component the stage is constant, so
/// a play either settles there or leaves through an exit whose value is known.
/// Because the lexicographic order is preserved by nonnegative combinations,
/// exhaustive enumeration of both players' choices inside the component with
/// exit values as boundary yields the exact sup-inf over staged strategies.
fn solve_components(
    p: &Product,
    obj: &LexObjective,
    limits: &OracleLimits,
    fixed_max: Option<&[usize]>,
) -> Result<Vec<Vec<Rational>>, SolveError> {
    let n_obj = p.n_obj;
    let mut value: Vec<Option<Vec<Rational>>> = vec![None; p.len()];
    let mut pairs = 0u64;
    for comp in components(p) {
        let key = p.nodes[comp[0]].1;
        debug_assert!(comp.iter().all(|&x| p.nodes[x].1 == key));
        if key.is_full(n_obj) {
            for &x in &comp {
                value[x] = Some(settled(obj, key));
            }
            continue;
        }
        let mut local: BTreeMap<usize, usize> = comp.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let mut exits = Vec::new();
        for &x in &comp {
            for (t, _) in p.actions[x].iter().flatten() {
                if !local.contains_key(t) {
                    local.insert(*t, comp.len() + exits.len());
                    exits.push(*t);
                }
            }
        }
        let choosers = |player: Player| -> Vec<usize> {
            comp.iter()
                .copied()
                .filter(|&x| p.owner[x] == player && p.actions[x].len() > 1)
                .filter(|_| !(player == Player::Max && fixed_max.is_some()))
                .collect()
        };
        let max_nodes = choosers(Player::Max);
        let min_nodes = choosers(Player::Min);
        let max_radix: Vec<usize> = max_nodes.iter().map(|&x| p.actions[x].len()).collect();
        let min_radix: Vec<usize> = min_nodes.iter().map(|&x| p.actions[x].len()).collect();
        let count = |r: &[usize]| r.iter().try_fold(1u64, |acc, &k| acc.checked_mul(k as u64));
        let here = count(&max_radix).and_then(|a| count(&min_radix).and_then(|b| a.checked_mul(b)));
        pairs = match here.and_then(|h| pairs.checked_add(h)) {
            Some(total) if total <= limits.max_pairs => total,
            _ => return Err(SolveError::LimitExceeded(format!("more than {} strategy pairs", limits.max_pairs))),
        };

        let exit_weights: Vec<Vec<Rational>> = (0..n_obj)
            .map(|i| {
                exits
                    .iter()
                    .map(|&e| {
                        let v = &value[e].as_ref().expect("exit solved first")[i];
                        match obj.entries()[i].kind {
                            ObjectiveKind::Reach => v.clone(),
                            ObjectiveKind::Safe => Rational::one() - v,
                        }
                    })
                    .collect()
            })
            .collect();
        let base = settled(obj, key);
        let mut pick = vec![0usize; comp.len()];
        if let Some(f) = fixed_max {
            for (i, &x) in comp.iter().enumerate() {
                if p.owner[x] == Player::Max {
                    pick[i] = f[x];
                }
            }
        }
        let mut best: Vec<Option<Vec<Rational>>> = vec![None; comp.len()];
        let mut sigma = vec![0usize; max_nodes.len()];
        loop {
            for (j, &x) in max_nodes.iter().enumerate() {
                pick[local[&x]] = sigma[j];
            }
            let mut worst: Vec<Option<Vec<Rational>>> = vec![None; comp.len()];
            let mut tau = vec![0usize; min_nodes.len()];
            loop {
                for (j, &x) in min_nodes.iter().enumerate() {
                    pick[local[&x]] = tau[j];
                }
                let succ: Vec<Vec<(StateId, Rational)>> = comp
                    .iter()
                    .enumerate()
                    .map(|(i, &x)| p.actions[x][pick[i]].iter().map(|(t, q)| (local[t], q.clone())).collect())
                    .collect();
                let mut vecs: Vec<Vec<Rational>> = vec![Vec::with_capacity(n_obj); comp.len()];
                for i in 0..n_obj {
                    if key.contains(i) {
                        for v in vecs.iter_mut() {
                            v.push(base[i].clone());
                        }
                        continue;
                    }
                    let weight: Vec<Option<&Rational>> =
                        (0..comp.len()).map(|_| None).chain(exit_weights[i].iter().map(Some)).collect();
                    let r = reach_weighted(weight.len(), |s| &succ[s], &weight);
                    for (c, v) in vecs.iter_mut().enumerate() {
                        v.push(match obj.entries()[i].kind {
                            ObjectiveKind::Reach => r[c].clone(),
                            ObjectiveKind::Safe => Rational::one() - &r[c],
                        });
                    }
                }
                for (w, v) in worst.iter_mut().zip(vecs) {
                    if w.as_ref().is_none_or(|w| lex_cmp(&v, w) == Ordering::Less) {
                        *w = Some(v);
                    }
                }
                if !next_combo(&mut tau, &min_radix) {
                    break;
                }
            }
            for (b, w) in best.iter_mut().zip(worst) {
                let w = w.expect("at least one counter-strategy");
                if b.as_ref().is_none_or(|b| lex_cmp(&w, b) == Ordering::Greater) {
                    *b = Some(w);
                }
            }
            if !next_combo(&mut sigma, &max_radix) {
                break;
            }
        }
        for (i, &x) in comp.iter().enumerate() {
            value[x] = best[i].take();
        }
    }
    Ok(value.into_iter().map(|v| v.expect("every component solved")).collect())
}

/// Lex-values by exhaustive enumeration of staged deterministic strategies
/// for both players: sup over Max of inf over Min.
pub fn brute_force_lex(
    game: &StochasticGame,
    obj: &LexObjective,
    limits: &OracleLimits,
) -> Result<LexValueAssignment<Rational>, SolveError> {
    obj.check_game(game)?;
    let p = Product::build(game, obj, limits)?;
    let v = solve_components(&p, obj, limits, None)?;
    Ok(LexValueAssignment { values: p.start.iter().map(|&x| v[x].clone()).collect() })
}

/// Guaranteed lex vector of a fixed Max staged strategy, by enumeration of
/// Min's staged deterministic replies.
pub fn brute_force_strategy_value(
    game: &StochasticGame,
    obj: &LexObjective,
    sigma: &StagedStrategy,
    limits: &OracleLimits,
) -> Result<LexValueAssignment<Rational>, SolveError> {
    obj.check_game(game)?;
    let p = Product::build(game, obj, limits)?;
    let mut fixed = vec![0usize; p.len()];
    for (x, &(s, k)) in p.nodes.iter().enumerate() {
        if p.owner[x] == Player::Max && !k.is_full(p.n_obj) {
            let l = sigma.choice(game, k, s)?;
            fixed[x] = game.action_index(s, l).expect("label checked by choice");
        }
    }
    let v = solve_components(&p, obj, limits, Some(&fixed))?;
    Ok(LexValueAssignment { values: p.start.iter().map(|&x| v[x].clone()).collect() })
}

/// A truncated sampled play.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathSample {
    pub states: Vec<StateId>,
    /// Per objective: satisfied on this prefix.
    pub outcome: Vec<bool>,
}

fn sample_successor(dist: &Distribution, rng: &mut ChaCha8Rng) -> StateId {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (t, p) in dist.support() {
        acc += rational_to_f64(p);
        if u < acc {
            return *t;
        }
    }
    dist.support().last().expect("nonempty support").0
}

pub fn sample_path(
    game: &StochasticGame,
    obj: &LexObjective,
    sigma: &StagedStrategy,
    tau: &StagedStrategy,
    start: StateId,
    horizon: usize,
    rng: &mut ChaCha8Rng,
) -> Result<PathSample, SolveError> {
    let mut s = start;
    let mut key = obj.stage_of_state(s);
    let mut states = vec![s];
    for _ in 0..horizon {
        if key.is_full(obj.len()) || game.is_sink(s) {
            break;
        }
        let strat = match game.owner(s) {
            Player::Max => sigma,
            Player::Min => tau,
        };
        let label = strat.choice(game, key, s)?;
        let a = game.action_index(s, label).expect("label checked by choice");
        s = sample_successor(&game.actions(s)[a].dist, rng);
        key = key.union(obj.stage_of_state(s));
        states.push(s);
    }
    let outcome = obj
        .entries()
        .iter()
        .enumerate()
        .map(|(i, o)| match o.kind {
            ObjectiveKind::Reach => key.contains(i),
            ObjectiveKind::Safe => !key.contains(i),
        })
        .collect();
    Ok(PathSample { states, outcome })
}

/// Empirical frequency of each objective over `episodes` sampled plays.
#[allow(clippy::too_many_arguments)]
pub fn simulate(
    game: &StochasticGame,
    obj: &LexObjective,
    sigma: &StagedStrategy,
    tau: &StagedStrategy,
    start: StateId,
    episodes: usize,
    horizon: usize,
    seed: u64,
) -> Result<Vec<f64>, SolveError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = vec![0usize; obj.len()];
    for _ in 0..episodes {
        let path = sample_path(game, obj, sigma, tau, start, horizon, &mut rng)?;
        for (h, o) in hits.iter_mut().zip(&path.outcome) {
            *h += usize::from(*o);
        }
    }
    Ok(hits.into_iter().map(|h| h as f64 / episodes.max(1) as f64).collect())
}

/// Number of (state, stage) pairs the oracle works on.
pub fn product_size(game: &StochasticGame, obj: &LexObjective, limits: &OracleLimits) -> Result<usize, SolveError> {
    Ok(Product::build(game, obj, limits)?.len())
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::numeric::ratio;

    fn chain(rows: Vec<Vec<(StateId, Rational)>>) -> MarkovChain {
        MarkovChain::new(rows.into_iter().map(|r| Distribution::new(r).unwrap()).collect())
    }

    #[test]
    fn one_step() {
        let mc = chain(vec![vec![(1, ratio(1, 3)), (2, ratio(2, 3))], vec![(1, ratio(1, 1))], vec![(2, ratio(1, 1))]]);
        let q = QuantifiedObjective::indicator(ObjectiveKind::Reach, &BTreeSet::from([1])).unwrap();
        assert_eq!(mc_reach_exact(&mc, &q)[0], ratio(1, 3));
    }

    #[test]
    fn geometric_loop() {
        let mc = chain(vec![vec![(0, ratio(1, 2)), (1, ratio(1, 2))], vec![(1, ratio(1, 1))]]);
        let q = QuantifiedObjective::indicator(ObjectiveKind::Reach, &BTreeSet::from([1])).unwrap();
        assert_eq!(mc_reach_exact(&mc, &q)[0], ratio(1, 1));
    }

    #[test]
    fn weighted_targets() {
        let mc = chain(vec![vec![(1, ratio(1, 2)), (2, ratio(1, 2))], vec![(1, ratio(1, 1))], vec![(2, ratio(1, 1))]]);
        let q = QuantifiedObjective::new(ObjectiveKind::Reach, BTreeMap::from([(1, ratio(1, 2)), (2, ratio(1, 4))]))
            .unwrap();
        assert_eq!(mc_reach_exact(&mc, &q)[0], ratio(3, 8));
    }
}
