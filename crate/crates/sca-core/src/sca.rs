//! Soft component automata: finite transition systems whose transitions
//! carry an action and a preference, with an initial state and a threshold
//! that bounds admissible preferences from below.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::cas::{ActionId, Cas, CasError};
use crate::lasso::Lasso;
use crate::semiring::{Semiring, SemiringError, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub from: StateId,
    pub action: ActionId,
    pub preference: Value,
    pub to: StateId,
}

/// A component label and threshold, remembered through composition so that
/// diagnosis of a composite knows its factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentInfo {
    pub label: String,
    pub threshold: Value,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScaError {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error(transparent)]
    Action(#[from] CasError),
    #[error(transparent)]
    Semiring(#[from] SemiringError),
    #[error("automata must share the action system and the semiring to compose")]
    CompositionMismatch,
    #[error("action system has no absorbing `{0}` action composable with every action")]
    MissingHaltConventions(String),
}

/// A soft component automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sca {
    label: String,
    states: Vec<String>,
    initial: StateId,
    cas: Arc<Cas>,
    semiring: Arc<Semiring>,
    transitions: Vec<Transition>,
    threshold: Value,
    components: Vec<ComponentInfo>,
}

impl Sca {
    pub fn new(
        label: impl Into<String>,
        cas: Arc<Cas>,
        semiring: Arc<Semiring>,
        states: Vec<String>,
        initial: &str,
        threshold: Value,
        transitions: &[(&str, &str, Value, &str)],
    ) -> Result<Sca, ScaError> {
        let label = label.into();
        let mut seen = BTreeSet::new();
        for s in &states {
            if !seen.insert(s.clone()) {
                return Err(ScaError::DuplicateState(s.clone()));
            }
        }
        let find = |name: &str| -> Result<StateId, ScaError> {
            states
                .iter()
                .position(|x| x == name)
                .map(|i| StateId(i as u32))
                .ok_or_else(|| ScaError::UnknownState(name.to_string()))
        };
        if !semiring.contains(&threshold) {
            return Err(SemiringError::OutsideCarrier {
                value: threshold.to_string(),
                semiring: semiring.to_string(),
            }
            .into());
        }
        let initial = find(initial)?;
        let mut resolved = Vec::with_capacity(transitions.len());
        for (from, action, pref, to) in transitions {
            if !semiring.contains(pref) {
                return Err(SemiringError::OutsideCarrier {
                    value: pref.to_string(),
                    semiring: semiring.to_string(),
                }
                .into());
            }
            resolved.push(Transition {
                from: find(from)?,
                action: cas.action(action)?,
                preference: pref.clone(),
                to: find(to)?,
            });
        }
        let threshold_clone = threshold.clone();
        Ok(Sca {
            components: vec![ComponentInfo { label: label.clone(), threshold }],
            label,
            states,
            initial,
            cas,
            semiring,
            transitions: resolved,
            threshold: threshold_clone,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn cas(&self) -> &Arc<Cas> {
        &self.cas
    }

    pub fn semiring(&self) -> &Arc<Semiring> {
        &self.semiring
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q.index()]
    }

    pub fn state(&self, name: &str) -> Result<StateId, ScaError> {
        self.states
            .iter()
            .position(|x| x == name)
            .map(|i| StateId(i as u32))
            .ok_or_else(|| ScaError::UnknownState(name.to_string()))
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn threshold(&self) -> &Value {
        &self.threshold
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn components(&self) -> &[ComponentInfo] {
        &self.components
    }

    /// The same automaton with a different threshold. Component records are
    /// kept; only the composite bound changes.
    pub fn with_threshold(&self, threshold: Value) -> Result<Sca, ScaError> {
        if !self.semiring.contains(&threshold) {
            return Err(SemiringError::OutsideCarrier {
                value: threshold.to_string(),
                semiring: self.semiring.to_string(),
            }
            .into());
        }
        let mut out = self.clone();
        out.threshold = threshold;
        Ok(out)
    }

    /// Whether a transition preference clears the threshold.
    pub fn admissible(&self, preference: &Value) -> bool {
        self.semiring
            .leq(&self.threshold, preference)
            .expect("preferences are carrier-checked at construction")
    }

    /// Parallel composition: product states, composed actions on composable
    /// pairs, multiplied preferences and thresholds.
    pub fn compose(&self, other: &Sca) -> Result<Sca, ScaError> {
        if self.cas != other.cas || self.semiring != other.semiring {
            return Err(ScaError::CompositionMismatch);
        }
        let mut states = Vec::with_capacity(self.states.len() * other.states.len());
        for l in &self.states {
            for r in &other.states {
                states.push(format!("({l},{r})"));
            }
        }
        let pair_id = |l: StateId, r: StateId| {
            StateId((l.index() * other.states.len() + r.index()) as u32)
        };
        let mut transitions = Vec::new();
        for t0 in &self.transitions {
            for t1 in &other.transitions {
                if self.cas.composable(t0.action, t1.action) {
                    transitions.push(Transition {
                        from: pair_id(t0.from, t1.from),
                        action: self.cas.compose(t0.action, t1.action)?,
                        preference: self.semiring.times(&t0.preference, &t1.preference)?,
                        to: pair_id(t0.to, t1.to),
                    });
                }
            }
        }
        let threshold = self.semiring.times(&self.threshold, &other.threshold)?;
        let mut components = self.components.clone();
        components.extend(other.components.iter().cloned());
        Ok(Sca {
            label: format!("({},{})", self.label, other.label),
            states,
            initial: pair_id(self.initial, other.initial),
            cas: Arc::clone(&self.cas),
            semiring: Arc::clone(&self.semiring),
            transitions,
            threshold,
            components,
        })
    }

    /// Decides whether the stream denoted by `word` is a behavior: some run
    /// from the initial state follows the stream using only admissible
    /// transitions, forever.
    ///
    /// This works on the product of the automaton with the lasso positions.
    /// Prefix positions cannot repeat, so an infinite path exists exactly
    /// when the initial product node survives iterated removal of nodes
    /// without successors.
    pub fn accepts(&self, word: &Lasso<ActionId>) -> Result<bool, ScaError> {
        for pos in 0..word.period_end() {
            let a = *word.at(pos);
            if a.index() >= self.cas.action_count() {
                return Err(CasError::UnknownAction(format!("#{}", a.0)).into());
            }
        }
        let positions = word.period_end();
        let node = |q: StateId, pos: usize| q.index() * positions + pos;
        let total = self.states.len() * positions;
        let mut successors: Vec<Vec<usize>> = vec![Vec::new(); total];
        for t in &self.transitions {
            if !self.admissible(&t.preference) {
                continue;
            }
            for pos in 0..positions {
                if *word.at(pos) == t.action {
                    successors[node(t.from, pos)].push(node(t.to, word.next_pos(pos)));
                }
            }
        }
        // restrict to nodes reachable from the initial product node
        let start = node(self.initial, 0);
        let mut reachable = vec![false; total];
        let mut stack = vec![start];
        reachable[start] = true;
        while let Some(v) = stack.pop() {
            for &w in &successors[v] {
                if !reachable[w] {
                    reachable[w] = true;
                    stack.push(w);
                }
            }
        }
        // greatest fixpoint: nodes with an infinite outgoing path
        let mut alive: Vec<bool> = reachable.clone();
        loop {
            let mut changed = false;
            for v in 0..total {
                if alive[v] && !successors[v].iter().any(|&w| alive[w]) {
                    alive[v] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Ok(alive[start])
    }

    /// Adds an (otherwise unreachable) halt state with absorbing
    /// `halt`-transitions from every state at the given preference.
    ///
    /// The action system must already carry the halt conventions: an action
    /// with the given name, composable with everything, absorbing every
    /// composition.
    pub fn halt_augment(
        &self,
        halt_action: &str,
        preference: Option<Value>,
    ) -> Result<Sca, ScaError> {
        let halt = self
            .cas
            .action(halt_action)
            .map_err(|_| ScaError::MissingHaltConventions(halt_action.to_string()))?;
        let conventions_ok = self.cas.actions().all(|a| {
            self.cas.composable(halt, a) && self.cas.compose(halt, a) == Ok(halt)
        });
        if !conventions_ok {
            return Err(ScaError::MissingHaltConventions(halt_action.to_string()));
        }
        let preference = preference.unwrap_or_else(|| self.semiring.one());
        if !self.semiring.contains(&preference) {
            return Err(SemiringError::OutsideCarrier {
                value: preference.to_string(),
                semiring: self.semiring.to_string(),
            }
            .into());
        }
        let mut out = self.clone();
        let mut halt_state = halt_action.to_string();
        while out.states.contains(&halt_state) {
            halt_state.push('\'');
        }
        out.states.push(halt_state);
        let halt_id = StateId(out.states.len() as u32 - 1);
        for q in 0..out.states.len() {
            out.transitions.push(Transition {
                from: StateId(q as u32),
                action: halt,
                preference: preference.clone(),
                to: halt_id,
            });
        }
        Ok(out)
    }

    /// States reachable from the initial state over admissible transitions.
    pub fn reachable(&self) -> BTreeSet<StateId> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![self.initial];
        seen.insert(self.initial);
        while let Some(q) = stack.pop() {
            for t in &self.transitions {
                if t.from == q && self.admissible(&t.preference) && seen.insert(t.to) {
                    stack.push(t.to);
                }
            }
        }
        seen
    }

    /// Drops states unreachable over admissible transitions.
    pub fn trim(&self) -> Sca {
        let keep = self.reachable();
        let mut remap = vec![None; self.states.len()];
        let mut states = Vec::with_capacity(keep.len());
        for q in &keep {
            remap[q.index()] = Some(StateId(states.len() as u32));
            states.push(self.states[q.index()].clone());
        }
        let transitions = self
            .transitions
            .iter()
            .filter(|t| remap[t.from.index()].is_some() && remap[t.to.index()].is_some())
            .map(|t| Transition {
                from: remap[t.from.index()].unwrap(),
                action: t.action,
                preference: t.preference.clone(),
                to: remap[t.to.index()].unwrap(),
            })
            .collect();
        Sca {
            label: self.label.clone(),
            states,
            initial: remap[self.initial.index()].expect("initial is always reachable"),
            cas: Arc::clone(&self.cas),
            semiring: Arc::clone(&self.semiring),
            transitions,
            threshold: self.threshold.clone(),
            components: self.components.clone(),
        }
    }

    /// Structural isomorphism under a state-name bijection, used to state
    /// algebraic laws of composition up to renaming.
    pub fn isomorphic_by(&self, other: &Sca, rename: impl Fn(&str) -> String) -> bool {
        if self.states.len() != other.states.len()
            || self.transitions.len() != other.transitions.len()
            || self.threshold != other.threshold
        {
            return false;
        }
        let mapped: Result<Vec<StateId>, _> = self
            .states
            .iter()
            .map(|s| other.state(&rename(s)))
            .collect();
        let Ok(mapped) = mapped else { return false };
        let mut seen = BTreeSet::new();
        if !mapped.iter().all(|q| seen.insert(*q)) {
            return false;
        }
        if mapped[self.initial.index()] != other.initial {
            return false;
        }
        let key = |t: &Transition, map: &dyn Fn(StateId) -> StateId| {
            (map(t.from), t.action, t.preference.clone(), map(t.to))
        };
        let mut lhs: Vec<_> =
            self.transitions.iter().map(|t| key(t, &|q| mapped[q.index()])).collect();
        let mut rhs: Vec<_> = other.transitions.iter().map(|t| key(t, &|q| q)).collect();
        lhs.sort();
        rhs.sort();
        lhs == rhs
    }
}
