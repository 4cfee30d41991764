//! Reachability where stalling can be charged to Min.
//!
//! A play that eventually stays forever inside trap states counts as
//! reaching the target with payoff one. Restricted games need this: when
//! only lex-optimal actions remain, Min can loop among states where looping
//! already loses one of Min's higher-priority objectives, and such loops must
//! not be scored in Min's favour by a later objective.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use crate::error::SolveError;
use crate::game::{Player, StateId, StochasticGame};
use crate::numeric::{Mode, Numeric};
use crate::objective::{ObjectiveKind, QuantifiedObjective};
use crate::solve_single::{
    check_domain, effective_eps, positive_states, solve_reach, MDStrategy, SingleSolution, SolverConfig,
    ValueAssignment,
};

/// Component id per node; nodes with an empty successor list still get
/// their own component.
pub fn scc_ids(succ: &[Vec<usize>]) -> Vec<usize> {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0usize;
    let mut ncomp = 0usize;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(&(v, i)) = call.last() {
            if i < succ[v].len() {
                call.last_mut().expect("frame").1 += 1;
                let w = succ[v][i];
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    comp
}

/// Maximal end components inside `region`, using only the actions accepted
/// by `allowed`. Both players are treated as cooperating.
pub fn end_components(
    game: &StochasticGame,
    region: &[bool],
    allowed: impl Fn(StateId, usize) -> bool,
) -> Vec<Vec<StateId>> {
    let n = game.num_states();
    let mut alive = region.to_vec();
    let mut acts: Vec<Vec<usize>> = (0..n)
        .map(|s| if alive[s] { (0..game.actions(s).len()).filter(|&a| allowed(s, a)).collect() } else { Vec::new() })
        .collect();
    loop {
        let succ: Vec<Vec<usize>> = (0..n)
            .map(|s| {
                let mut out: Vec<usize> =
                    acts[s].iter().flat_map(|&a| game.actions(s)[a].dist.successors()).filter(|&t| alive[t]).collect();
                out.sort_unstable();
                out.dedup();
                out
            })
            .collect();
        let comp = scc_ids(&succ);
        let mut changed = false;
        for s in 0..n {
            if !alive[s] {
                continue;
            }
            let before = acts[s].len();
            acts[s].retain(|&a| game.actions(s)[a].dist.successors().all(|t| alive[t] && comp[t] == comp[s]));
            if acts[s].len() != before {
                changed = true;
            }
            if acts[s].is_empty() {
                alive[s] = false;
                changed = true;
            }
        }
        if !changed {
            let mut groups: std::collections::BTreeMap<usize, Vec<StateId>> = Default::default();
            for s in (0..n).filter(|&s| alive[s]) {
                groups.entry(comp[s]).or_default().push(s);
            }
            return groups.into_values().collect();
        }
    }
}

/// Like [`almost_sure_reach_under`](crate::solve_single::almost_sure_reach_under),
/// except that Min may not avoid `target` by staying forever among
/// `excused` states: such plays are Min's loss anyway.
pub fn almost_sure_reach_excusing(
    game: &StochasticGame,
    sigma: &MDStrategy,
    target: &BTreeSet<StateId>,
    excused: &BTreeSet<StateId>,
) -> bool {
    let mut chosen = vec![0usize; game.num_states()];
    for s in game.players_states(Player::Max) {
        match sigma.action_index(game, s) {
            Some(a) => chosen[s] = a,
            None => return false,
        }
    }
    let outside: Vec<bool> = (0..game.num_states()).map(|s| !target.contains(&s)).collect();
    end_components(game, &outside, |s, a| game.owner(s) == Player::Min || a == chosen[s])
        .iter()
        .all(|ec| ec.iter().all(|s| excused.contains(s)))
}

/// Moves Max off actions that let the play stay forever outside `target`
/// in an end component that is not excused. Replacement actions make
/// progress along the attractor of `target` and the excused states, so they
/// are taken from `game` itself and keep whatever restriction it carries.
/// Returns the number of states whose choice changed.
pub fn repair_stalls(
    game: &StochasticGame,
    sigma: &mut MDStrategy,
    target: &BTreeSet<StateId>,
    excused: &BTreeSet<StateId>,
) -> usize {
    let n = game.num_states();
    let mut in_a: Vec<bool> = (0..n).map(|s| target.contains(&s) || excused.contains(&s)).collect();
    let mut progress: Vec<Option<usize>> = vec![None; n];
    loop {
        let mut layer = Vec::new();
        for s in (0..n).filter(|&s| !in_a[s]) {
            let hits = |a: usize| game.actions(s)[a].dist.successors().any(|t| in_a[t]);
            match game.owner(s) {
                Player::Max => {
                    if let Some(a) = (0..game.actions(s).len()).find(|&a| hits(a)) {
                        progress[s] = Some(a);
                        layer.push(s);
                    }
                }
                Player::Min => {
                    if (0..game.actions(s).len()).all(hits) {
                        layer.push(s);
                    }
                }
            }
        }
        if layer.is_empty() {
            break;
        }
        for s in layer {
            in_a[s] = true;
        }
    }
    let outside: Vec<bool> = (0..n).map(|s| !target.contains(&s)).collect();
    let mut switched = vec![false; n];
    let mut count = 0;
    loop {
        let chosen: Vec<usize> = (0..n)
            .map(|s| if game.owner(s) == Player::Max { sigma.action_index(game, s).unwrap_or(0) } else { 0 })
            .collect();
        let mut fix = Vec::new();
        for ec in end_components(game, &outside, |s, a| game.owner(s) == Player::Min || a == chosen[s]) {
            if ec.iter().all(|s| excused.contains(s)) {
                continue;
            }
            fix.extend(ec.into_iter().filter(|&s| {
                game.owner(s) == Player::Max && !switched[s] && progress[s].is_some_and(|a| a != chosen[s])
            }));
        }
        if fix.is_empty() {
            return count;
        }
        for s in fix {
            let a = progress[s].expect("progress action");
            sigma.set(s, game.actions(s)[a].label.clone());
            switched[s] = true;
            count += 1;
        }
    }
}

/// Solves `Reach q` where staying forever inside `trap` states pays one.
/// Also returns the states with nonzero value.
///
/// Without an end component made of free trap states this is plain
/// [`solve_reach`]. Otherwise both modes run strategy iteration: Max
/// switches on strict improvement and Min answers optimally on the quotient
/// of its end components.
pub fn solve_reach_trapped<N: Numeric>(
    game: &StochasticGame,
    q: &QuantifiedObjective,
    trap: &[bool],
    cfg: &SolverConfig,
) -> Result<(SingleSolution<N>, BTreeSet<StateId>), SolveError> {
    if q.kind != ObjectiveKind::Reach {
        return Err(SolveError::WrongKind { expected: "reach" });
    }
    check_domain(game, q)?;
    let n = game.num_states();
    let fixed: Vec<Option<N>> = (0..n).map(|s| q.weight(s).map(N::from_rational)).collect();
    let free_trap: Vec<bool> = (0..n).map(|s| trap[s] && fixed[s].is_none()).collect();
    if end_components(game, &free_trap, |_, _| true).is_empty() {
        let sol = solve_reach::<N>(game, q, cfg)?;
        return Ok((sol, positive_states(game, q)));
    }
    let tol = match N::MODE {
        Mode::Exact => 0.0,
        Mode::Vi => 1e-12,
    };
    let mut sigma = vec![0usize; n];
    let mut iterations = 0u64;
    loop {
        iterations += 1;
        if iterations > cfg.max_iterations {
            return Err(SolveError::IterationLimit(cfg.max_iterations));
        }
        let (v, tau, inner) = min_response(game, &fixed, trap, &sigma, tol)?;
        iterations += inner;
        let mut improved = false;
        for s in game.players_states(Player::Max) {
            if fixed[s].is_some() {
                continue;
            }
            let mut best_a = sigma[s];
            let mut best = value_of(game, s, sigma[s], &v);
            for a in 0..game.actions(s).len() {
                let val = value_of(game, s, a, &v);
                if val.cmp_tol(&best, tol) == Ordering::Greater {
                    best_a = a;
                    best = val;
                }
            }
            if best_a != sigma[s] {
                sigma[s] = best_a;
                improved = true;
            }
        }
        if !improved && close_trap_loops(game, &fixed, trap, &mut sigma, &v, effective_eps::<N>(cfg)) {
            improved = true;
        }
        if !improved {
            let positive = (0..n).filter(|&s| !v[s].is_zero()).collect();
            let sol = SingleSolution {
                values: ValueAssignment { values: v },
                max_strategy: MDStrategy::from_indices(game, Player::Max, &sigma),
                min_strategy: MDStrategy::from_indices(game, Player::Min, &tau),
                iterations,
            };
            return Ok((sol, positive));
        }
    }
}

/// At a fixpoint of strict improvement, Max may still gain by closing a
/// loop through trap states: every action involved ties, so no single
/// switch looks better. Finds the largest set of trap states valued below
/// one where Max has a tie action staying inside and every tie action of
/// Min stays inside, then moves Max inside. Min can then only leave
/// through actions that were strictly worse for it. Returns whether any
/// choice changed.
fn close_trap_loops<N: Numeric>(
    game: &StochasticGame,
    fixed: &[Option<N>],
    trap: &[bool],
    sigma: &mut [usize],
    v: &[N],
    tol: f64,
) -> bool {
    let n = game.num_states();
    let mut region: Vec<bool> =
        (0..n).map(|s| fixed[s].is_none() && trap[s] && v[s].cmp_tol(&N::one(), tol) == Ordering::Less).collect();
    let ties = |s: StateId, a: usize| value_of(game, s, a, v).cmp_tol(&v[s], tol) == Ordering::Equal;
    let inside = |region: &[bool], s: StateId, a: usize| game.actions(s)[a].dist.successors().all(|t| region[t]);
    loop {
        let drop: Vec<StateId> = (0..n)
            .filter(|&s| region[s])
            .filter(|&s| {
                let mut tied = (0..game.actions(s).len()).filter(|&a| ties(s, a));
                match game.owner(s) {
                    Player::Max => !tied.any(|a| inside(&region, s, a)),
                    Player::Min => !tied.all(|a| inside(&region, s, a)),
                }
            })
            .collect();
        if drop.is_empty() {
            break;
        }
        for s in drop {
            region[s] = false;
        }
    }
    let mut changed = false;
    for s in game.players_states(Player::Max) {
        if !region[s] || (ties(s, sigma[s]) && inside(&region, s, sigma[s])) {
            continue;
        }
        if let Some(a) = (0..game.actions(s).len()).find(|&a| ties(s, a) && inside(&region, s, a)) {
            sigma[s] = a;
            changed = true;
        }
    }
    changed
}

fn value_of<N: Numeric>(game: &StochasticGame, s: StateId, a: usize, v: &[N]) -> N {
    game.actions(s)[a].dist.support().iter().fold(N::zero(), |acc, (t, p)| acc + N::from_rational(p) * v[*t].clone())
}

/// One node of the end-component quotient.
struct Node<N> {
    members: Vec<StateId>,
    /// Payoff of staying forever; only end components may stay.
    stay: Option<N>,
    /// Actions leaving the node that the node's owner may pick.
    exits: Vec<(StateId, usize)>,
}

#[derive(Clone, Copy, PartialEq)]
enum Pick {
    Stay,
    Exit(usize),
}

/// Min's optimal reply to the Max strategy `sigma`, by policy iteration on
/// the quotient MDP. Collapsing end components leaves every policy proper.
fn min_response<N: Numeric>(
    game: &StochasticGame,
    fixed: &[Option<N>],
    trap: &[bool],
    sigma: &[usize],
    tol: f64,
) -> Result<(Vec<N>, Vec<usize>, u64), SolveError> {
    let n = game.num_states();
    let free: Vec<bool> = fixed.iter().map(Option::is_none).collect();
    let mecs = end_components(game, &free, |s, a| game.owner(s) == Player::Min || a == sigma[s]);
    let mut node_of = vec![usize::MAX; n];
    let mut nodes: Vec<Node<N>> = Vec::new();
    for mec in mecs {
        let all_trap = mec.iter().all(|&s| trap[s]);
        for &s in &mec {
            node_of[s] = nodes.len();
        }
        nodes.push(Node { members: mec, stay: Some(if all_trap { N::one() } else { N::zero() }), exits: Vec::new() });
    }
    for s in 0..n {
        if !free[s] || node_of[s] != usize::MAX {
            continue;
        }
        node_of[s] = nodes.len();
        nodes.push(Node { members: vec![s], stay: None, exits: Vec::new() });
    }
    for (k, node) in nodes.iter_mut().enumerate() {
        for &s in &node.members {
            match game.owner(s) {
                Player::Max if node.stay.is_none() => node.exits.push((s, sigma[s])),
                Player::Max => {}
                Player::Min => {
                    for (a, act) in game.actions(s).iter().enumerate() {
                        if node.stay.is_none() || act.dist.successors().any(|t| node_of[t] != k) {
                            node.exits.push((s, a));
                        }
                    }
                }
            }
        }
    }
    let mut pick: Vec<Pick> =
        nodes.iter().map(|nd| if nd.stay.is_some() { Pick::Stay } else { Pick::Exit(0) }).collect();

    let mut rounds = 0u64;
    loop {
        rounds += 1;
        let x = evaluate(game, fixed, &nodes, &node_of, &pick)?;
        let state_value = |t: StateId| -> N {
            match &fixed[t] {
                Some(w) => w.clone(),
                None => x[node_of[t]].clone(),
            }
        };
        let option_value = |s: StateId, a: usize| -> N {
            game.actions(s)[a]
                .dist
                .support()
                .iter()
                .fold(N::zero(), |acc, (t, p)| acc + N::from_rational(p) * state_value(*t))
        };
        let mut improved = false;
        for (k, node) in nodes.iter().enumerate() {
            let mut best_pick = pick[k];
            let mut best = x[k].clone();
            if let Some(b) = &node.stay {
                if b.cmp_tol(&best, tol) == Ordering::Less {
                    best_pick = Pick::Stay;
                    best = b.clone();
                }
            }
            for (i, &(s, a)) in node.exits.iter().enumerate() {
                let val = option_value(s, a);
                if val.cmp_tol(&best, tol) == Ordering::Less {
                    best_pick = Pick::Exit(i);
                    best = val;
                }
            }
            if best_pick != pick[k] {
                pick[k] = best_pick;
                improved = true;
            }
        }
        if !improved {
            let mut values: Vec<N> = (0..n).map(state_value).collect();
            for (s, f) in fixed.iter().enumerate() {
                if let Some(w) = f {
                    values[s] = w.clone();
                }
            }
            let tau = min_choices(game, sigma, &nodes, &node_of, &pick);
            return Ok((values, tau, rounds));
        }
    }
}

/// Node values under a fixed quotient policy. Nodes that cannot reach a
/// positive payoff are pinned to an exact zero.
fn evaluate<N: Numeric>(
    game: &StochasticGame,
    fixed: &[Option<N>],
    nodes: &[Node<N>],
    node_of: &[usize],
    pick: &[Pick],
) -> Result<Vec<N>, SolveError> {
    let m = nodes.len();
    let mut live = vec![false; m];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut frontier = Vec::new();
    for k in 0..m {
        match pick[k] {
            Pick::Stay => {
                if nodes[k].stay.as_ref().is_some_and(|b| !b.is_zero()) {
                    live[k] = true;
                    frontier.push(k);
                }
            }
            Pick::Exit(i) => {
                let (s, a) = nodes[k].exits[i];
                for t in game.actions(s)[a].dist.successors() {
                    match &fixed[t] {
                        Some(w) if !w.is_zero() && !live[k] => {
                            live[k] = true;
                            frontier.push(k);
                        }
                        Some(_) => {}
                        None => preds[node_of[t]].push(k),
                    }
                }
            }
        }
    }
    while let Some(j) = frontier.pop() {
        for &k in &preds[j] {
            if !live[k] {
                live[k] = true;
                frontier.push(k);
            }
        }
    }
    let mut out = vec![N::zero(); m];
    let vars: Vec<usize> = (0..m).filter(|&k| live[k] && pick[k] != Pick::Stay).collect();
    for k in (0..m).filter(|&k| live[k] && pick[k] == Pick::Stay) {
        out[k] = nodes[k].stay.clone().expect("stay payoff");
    }
    let mut pos = vec![usize::MAX; m];
    for (i, &k) in vars.iter().enumerate() {
        pos[k] = i;
    }
    let dim = vars.len();
    let mut a = vec![vec![N::zero(); dim + 1]; dim];
    for (i, &k) in vars.iter().enumerate() {
        a[i][i] = N::one();
        let Pick::Exit(e) = pick[k] else { unreachable!("variables exit") };
        let (s, act) = nodes[k].exits[e];
        for (t, p) in game.actions(s)[act].dist.support() {
            let p = N::from_rational(p);
            match &fixed[*t] {
                Some(w) => a[i][dim] = a[i][dim].clone() + p * w.clone(),
                None => {
                    let j = node_of[*t];
                    if pos[j] != usize::MAX {
                        a[i][pos[j]] = a[i][pos[j]].clone() - p;
                    } else {
                        a[i][dim] = a[i][dim].clone() + p * out[j].clone();
                    }
                }
            }
        }
    }
    // Round-off can leave floats just outside [0, 1].
    for (i, v) in gauss(a)?.into_iter().enumerate() {
        out[vars[i]] = if v < N::zero() {
            N::zero()
        } else if v > N::one() {
            N::one()
        } else {
            v
        };
    }
    Ok(out)
}

/// Gaussian elimination with largest-magnitude pivoting on an augmented
/// `m × (m+1)` system.
fn gauss<N: Numeric>(mut a: Vec<Vec<N>>) -> Result<Vec<N>, SolveError> {
    let m = a.len();
    for col in 0..m {
        let pivot = (col..m)
            .filter(|&r| !a[r][col].is_zero())
            .max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap_or(Ordering::Equal))
            .ok_or(SolveError::Singular)?;
        a.swap(col, pivot);
        let inv = N::one() / a[col][col].clone();
        for k in col..=m {
            a[col][k] = a[col][k].clone() * inv.clone();
        }
        for r in 0..m {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for k in col..=m {
                    let d = f.clone() * a[col][k].clone();
                    a[r][k] = a[r][k].clone() - d;
                }
            }
        }
    }
    Ok(a.into_iter().map(|row| row[m].clone()).collect())
}

/// Turns a quotient policy into one Min action per state. Inside an end
/// component that exits, Min states steer towards the exiting state.
fn min_choices<N>(
    game: &StochasticGame,
    sigma: &[usize],
    nodes: &[Node<N>],
    node_of: &[usize],
    pick: &[Pick],
) -> Vec<usize> {
    let n = game.num_states();
    let mut tau = vec![0usize; n];
    for (k, node) in nodes.iter().enumerate() {
        let inside = |s: StateId, a: usize| game.actions(s)[a].dist.successors().all(|t| node_of[t] == k);
        match pick[k] {
            Pick::Stay => {
                for &s in &node.members {
                    if game.owner(s) == Player::Min {
                        tau[s] = (0..game.actions(s).len()).find(|&a| inside(s, a)).unwrap_or(0);
                    }
                }
            }
            Pick::Exit(i) => {
                let (exit_state, exit_action) = node.exits[i];
                if game.owner(exit_state) == Player::Min {
                    tau[exit_state] = exit_action;
                }
                if node.stay.is_none() {
                    continue;
                }
                // Positive attractor to the exiting state along internal actions.
                let mut reached: BTreeSet<StateId> = BTreeSet::from([exit_state]);
                loop {
                    let mut grew = false;
                    for &s in &node.members {
                        if reached.contains(&s) {
                            continue;
                        }
                        let hits = |a: usize| {
                            inside(s, a) && game.actions(s)[a].dist.successors().any(|t| reached.contains(&t))
                        };
                        let found = match game.owner(s) {
                            Player::Max => hits(sigma[s]).then_some(sigma[s]),
                            Player::Min => (0..game.actions(s).len()).find(|&a| hits(a)),
                        };
                        if let Some(a) = found {
                            if game.owner(s) == Player::Min {
                                tau[s] = a;
                            }
                            reached.insert(s);
                            grew = true;
                        }
                    }
                    if !grew {
                        break;
                    }
                }
            }
        }
    }
    tau
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::parse_game;
    use crate::numeric::{ratio, Rational};
    use num_traits::Zero;

    const LOOP: &str = "sg 1\nstate a min\nstate b min\nstate t max\nstate f max\nact a loop b:1\nact a go t:1/2 f:1/2\nact b back a:1\nobj reach t\n";

    fn setup() -> (StochasticGame, QuantifiedObjective) {
        let m = parse_game(LOOP).unwrap();
        let t = m.game.state_index("t").unwrap();
        let q = QuantifiedObjective::indicator(ObjectiveKind::Reach, &BTreeSet::from([t])).unwrap();
        (m.game, q)
    }

    #[test]
    fn excused_loops_do_not_block_certificates() {
        let (game, _) = setup();
        let sigma = MDStrategy::first_actions(&game, Player::Max);
        let target: BTreeSet<StateId> = [2, 3].into();
        assert!(!crate::solve_single::almost_sure_reach_under(&game, &sigma, &target));
        assert!(!almost_sure_reach_excusing(&game, &sigma, &target, &[0].into()));
        assert!(almost_sure_reach_excusing(&game, &sigma, &target, &[0, 1].into()));
    }

    #[test]
    fn scc_of_cycle_and_tail() {
        let comp = scc_ids(&[vec![1], vec![0], vec![0]]);
        assert_eq!(comp[0], comp[1]);
        assert_ne!(comp[0], comp[2]);
    }

    #[test]
    fn min_loop_in_trap_pays_max() {
        // Min can loop a <-> b forever or move to the target with probability 1/2.
        let (game, q) = setup();
        let cfg = SolverConfig::exact();
        let plain = solve_reach::<Rational>(&game, &q, &cfg).unwrap();
        assert_eq!(plain.values.values[0], ratio(0, 1));
        let trap = vec![true, true, false, false];
        let (sol, pos) = solve_reach_trapped::<Rational>(&game, &q, &trap, &cfg).unwrap();
        assert_eq!(sol.values.values[0], ratio(1, 2));
        assert!(pos.contains(&0) && pos.contains(&1));
        assert_eq!(sol.min_strategy.label(0), Some("go"));
        let (vi, _) = solve_reach_trapped::<f64>(&game, &q, &trap, &SolverConfig::vi()).unwrap();
        assert!((vi.values.values[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn mixed_component_pays_nothing() {
        let (game, q) = setup();
        let trap = vec![true, false, false, false];
        let (sol, pos) = solve_reach_trapped::<Rational>(&game, &q, &trap, &SolverConfig::exact()).unwrap();
        assert!(sol.values.values[0].is_zero());
        assert!(!pos.contains(&0) && !pos.contains(&1));
    }

    #[test]
    fn tie_loop_needs_min_to_stay_inside() {
        // With s1 -> s2 every move ties, but Min at s2 escapes for the same
        // value. Max gains only by s1 -> s0, which leaves Min no tie exit.
        let text = "sg 1\nstate s0 min\nstate s1 max\nstate s2 min\nstate s3 max\nstate s4 max\nstate s5 max\n\
            act s0 a0 s1:1\nact s0 a1 s3:1\nact s1 a0 s2:1\nact s1 a1 s0:1\nact s1 a2 s5:1\n\
            act s2 a0 s3:1/2 s5:1/2\nact s2 a1 s0:1\n\
            act s3 a0 s2:3/7 s4:4/7\nact s3 a1 s0:1/2 s5:1/2\nact s3 a2 s2:1\nobj reach s4\n";
        let game = parse_game(text).unwrap().game;
        let q = QuantifiedObjective::indicator(ObjectiveKind::Reach, &BTreeSet::from([4])).unwrap();
        let trap = vec![true, true, true, true, false, false];
        let (sol, _) = solve_reach_trapped::<Rational>(&game, &q, &trap, &SolverConfig::exact()).unwrap();
        assert_eq!(sol.values.values[..4], [ratio(8, 11), ratio(8, 11), ratio(4, 11), ratio(8, 11)]);
        assert_eq!(sol.max_strategy.label(1), Some("a1"));
    }
}
