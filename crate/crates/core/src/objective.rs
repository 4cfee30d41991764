//! Lexicographic objective vectors, quantified objectives and stage keys.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::game::{sinks, StateId, StochasticGame};
use crate::numeric::Rational;

/// Upper bound on the number of objectives; stage keys are bitmasks.
pub const MAX_OBJECTIVES: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ObjectiveError {
    #[error("objective vector must be nonempty")]
    Empty,
    #[error("at most {MAX_OBJECTIVES} objectives are supported, got {0}")]
    TooMany(usize),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("target state {0} out of range")]
    BadTarget(StateId),
    #[error("weight out of [0,1] at state {0}")]
    BadWeight(StateId),
    #[error("quantified objective domain must be nonempty")]
    EmptyDomain,
    #[error("quantified objectives must share one domain")]
    DomainMismatch,
    #[error("stage removes every objective")]
    FullStage,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ObjectiveKind {
    Reach,
    Safe,
}

impl ObjectiveKind {
    pub fn flipped(self) -> Self {
        match self {
            ObjectiveKind::Reach => ObjectiveKind::Safe,
            ObjectiveKind::Safe => ObjectiveKind::Reach,
        }
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObjectiveKind::Reach => "reach",
            ObjectiveKind::Safe => "safe",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Objective {
    pub kind: ObjectiveKind,
    pub target: BTreeSet<StateId>,
}

impl Objective {
    pub fn reach(target: impl IntoIterator<Item = StateId>) -> Self {
        Objective { kind: ObjectiveKind::Reach, target: target.into_iter().collect() }
    }

    pub fn safe(target: impl IntoIterator<Item = StateId>) -> Self {
        Objective { kind: ObjectiveKind::Safe, target: target.into_iter().collect() }
    }
}

/// Ordered objectives, most important first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexObjective {
    entries: Vec<Objective>,
}

impl LexObjective {
    pub fn new(entries: Vec<Objective>) -> Result<Self, ObjectiveError> {
        if entries.is_empty() {
            return Err(ObjectiveError::Empty);
        }
        if entries.len() > MAX_OBJECTIVES {
            return Err(ObjectiveError::TooMany(entries.len()));
        }
        Ok(LexObjective { entries })
    }

    pub fn entries(&self) -> &[Objective] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn check_game(&self, game: &StochasticGame) -> Result<(), ObjectiveError> {
        for o in &self.entries {
            if let Some(&bad) = o.target.iter().find(|&&t| t >= game.num_states()) {
                return Err(ObjectiveError::BadTarget(bad));
            }
        }
        Ok(())
    }

    /// True iff every target consists of sinks.
    pub fn is_absorbing(&self, game: &StochasticGame) -> bool {
        let sk = sinks(game);
        self.entries.iter().all(|o| o.target.is_subset(&sk))
    }

    pub fn stage_of_state(&self, s: StateId) -> StageKey {
        let mut key = StageKey::EMPTY;
        for (i, o) in self.entries.iter().enumerate() {
            if o.target.contains(&s) {
                key = key.with(i);
            }
        }
        key
    }

    /// Drops the entries whose positions are in `key`.
    pub fn stage_objective(&self, key: StageKey) -> Result<LexObjective, ObjectiveError> {
        if key.is_full(self.len()) {
            return Err(ObjectiveError::FullStage);
        }
        let entries =
            self.entries.iter().enumerate().filter(|(i, _)| !key.contains(*i)).map(|(_, o)| o.clone()).collect();
        LexObjective::new(entries)
    }

    /// Every Reach becomes Safe and vice versa; pair with swapped owners.
    pub fn dual(&self) -> LexObjective {
        LexObjective {
            entries: self
                .entries
                .iter()
                .map(|o| Objective { kind: o.kind.flipped(), target: o.target.clone() })
                .collect(),
        }
    }

    pub fn truncated(&self, k: usize) -> Result<LexObjective, ObjectiveError> {
        LexObjective::new(self.entries[..k.min(self.len())].to_vec())
    }

    pub fn target_union(&self) -> BTreeSet<StateId> {
        self.entries.iter().flat_map(|o| o.target.iter().copied()).collect()
    }
}

/// A reach or safety objective with weighted targets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantifiedObjective {
    pub kind: ObjectiveKind,
    weights: BTreeMap<StateId, Rational>,
}

impl QuantifiedObjective {
    pub fn new(kind: ObjectiveKind, weights: BTreeMap<StateId, Rational>) -> Result<Self, ObjectiveError> {
        if weights.is_empty() {
            return Err(ObjectiveError::EmptyDomain);
        }
        for (s, w) in &weights {
            if *w < Rational::zero() || *w > Rational::one() {
                return Err(ObjectiveError::BadWeight(*s));
            }
        }
        Ok(QuantifiedObjective { kind, weights })
    }

    /// Weight 1 on every state of `target`.
    pub fn indicator(kind: ObjectiveKind, target: &BTreeSet<StateId>) -> Result<Self, ObjectiveError> {
        Self::new(kind, target.iter().map(|&s| (s, Rational::one())).collect())
    }

    pub fn weights(&self) -> &BTreeMap<StateId, Rational> {
        &self.weights
    }

    pub fn weight(&self, s: StateId) -> Option<&Rational> {
        self.weights.get(&s)
    }

    pub fn domain(&self) -> BTreeSet<StateId> {
        self.weights.keys().copied().collect()
    }

    pub fn with_kind(&self, kind: ObjectiveKind) -> Self {
        QuantifiedObjective { kind, weights: self.weights.clone() }
    }
}

/// Quantified objectives sharing one domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantifiedLexObjective {
    entries: Vec<QuantifiedObjective>,
}

impl QuantifiedLexObjective {
    pub fn new(entries: Vec<QuantifiedObjective>) -> Result<Self, ObjectiveError> {
        if entries.is_empty() {
            return Err(ObjectiveError::Empty);
        }
        if entries.len() > MAX_OBJECTIVES {
            return Err(ObjectiveError::TooMany(entries.len()));
        }
        let dom = entries[0].domain();
        if entries.iter().any(|e| e.domain() != dom) {
            return Err(ObjectiveError::DomainMismatch);
        }
        Ok(QuantifiedLexObjective { entries })
    }

    /// Indicator weights over the union of all targets.
    pub fn from_boolean(obj: &LexObjective) -> Result<Self, ObjectiveError> {
        let domain = obj.target_union();
        let entries = obj
            .entries()
            .iter()
            .map(|o| {
                let w = domain
                    .iter()
                    .map(|&s| {
                        let v = if o.target.contains(&s) { Rational::one() } else { Rational::zero() };
                        (s, v)
                    })
                    .collect();
                QuantifiedObjective::new(o.kind, w)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(entries)
    }

    pub fn entries(&self) -> &[QuantifiedObjective] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn domain(&self) -> BTreeSet<StateId> {
        self.entries[0].domain()
    }
}

/// Set of objective indices already satisfied or violated; bit `i` is index `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct StageKey(u32);

impl StageKey {
    pub const EMPTY: StageKey = StageKey(0);

    pub fn from_bits(bits: u32) -> Self {
        StageKey(bits)
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        indices.into_iter().fold(StageKey::EMPTY, |k, i| k.with(i))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn with(self, i: usize) -> Self {
        StageKey(self.0 | (1 << i))
    }

    pub fn union(self, other: StageKey) -> Self {
        StageKey(self.0 | other.0)
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_full(self, n: usize) -> bool {
        self.0 == Self::full(n).0
    }

    pub fn full(n: usize) -> Self {
        StageKey(((1u64 << n) - 1) as u32)
    }

    pub fn is_subset(self, other: StageKey) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.contains(i))
    }

    /// Positions (in the reduced vector) of the objectives not removed.
    pub fn active(self, n: usize) -> Vec<usize> {
        (0..n).filter(|&i| !self.contains(i)).collect()
    }

    /// `none` or a comma-separated list of 1-based indices.
    pub fn render(self) -> String {
        if self.is_empty() {
            "none".to_string()
        } else {
            self.indices().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
        }
    }

    pub fn parse(text: &str) -> Option<StageKey> {
        if text == "none" {
            return Some(StageKey::EMPTY);
        }
        let mut key = StageKey::EMPTY;
        for part in text.split(',') {
            let i: usize = part.parse().ok()?;
            if i == 0 || i > MAX_OBJECTIVES {
                return None;
            }
            key = key.with(i - 1);
        }
        Some(key)
    }
}

impl fmt::Display for StageKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Per-objective values at one state.
pub type LexVector<N> = Vec<N>;

/// Lexicographic comparison, first component most important.
pub fn lex_compare<N: PartialOrd>(x: &[N], y: &[N]) -> Result<Ordering, ObjectiveError> {
    if x.len() != y.len() {
        return Err(ObjectiveError::LengthMismatch(x.len(), y.len()));
    }
    for (a, b) in x.iter().zip(y) {
        match a.partial_cmp(b) {
            Some(Ordering::Equal) => {}
            Some(o) => return Ok(o),
            None => return Ok(Ordering::Equal),
        }
    }
    Ok(Ordering::Equal)
}
