//! Diagnosing undesired behavior: the diagnostic preference of a word in a
//! component (an upper bound on any threshold that admits it), threshold
//! exclusion, and the localization of responsibility to minimal suspect
//! subsets of a composite's components.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::cas::ActionId;
use crate::lasso::Lasso;
use crate::sca::{Sca, ScaError, StateId};
use crate::semiring::{Semiring, SemiringError, Value};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiagnosticsError {
    #[error(transparent)]
    Sca(#[from] ScaError),
    #[error(transparent)]
    Semiring(#[from] SemiringError),
    #[error("the diagnostic preference of the empty word is undefined")]
    EmptyWord,
    #[error("the full component set is not suspect; nothing to localize")]
    NotSuspect,
    #[error("component count {0} exceeds the supported maximum of 63")]
    TooManyComponents(usize),
}

/// A finite word or an eventually periodic stream to diagnose.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiagnosticInput {
    Word(Vec<ActionId>),
    Stream(Lasso<ActionId>),
}

/// One step of the diagnostic trace: the states the word could be in, the
/// action consumed, and the sum of the preferences of all matching moves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagnosticStep {
    pub states: Vec<StateId>,
    pub action: ActionId,
    pub preference_sum: Value,
}

/// The diagnostic computation: the per-step state sets and preference sums,
/// and their greatest lower bound.
///
/// Thresholds play no role here; the value bounds from above every
/// threshold that could admit the word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagnosticTrace {
    pub steps: Vec<DiagnosticStep>,
    /// For streams: index of the step the computation loops back to.
    pub cycle_start: Option<usize>,
    /// The word walked outside the automaton's states at some point; from
    /// there on the empty sum (the semiring zero) enters the bound.
    pub escapes: bool,
    pub value: Value,
}

/// Computes the diagnostic preference: starting from the initial state,
/// follow the word through all matching transitions at once, summing the
/// preferences seen at each step, and take the greatest lower bound of the
/// step sums. For streams the iteration stops once the state set and the
/// position in the cycle repeat.
pub fn diagnostic_preference(
    component: &Sca,
    input: &DiagnosticInput,
) -> Result<DiagnosticTrace, DiagnosticsError> {
    let semiring = component.semiring();
    let step = |states: &BTreeSet<StateId>,
                action: ActionId|
     -> Result<(BTreeSet<StateId>, Value), DiagnosticsError> {
        let mut prefs: Vec<Value> = Vec::new();
        let mut next: BTreeSet<StateId> = BTreeSet::new();
        for t in component.transitions() {
            if t.action == action && states.contains(&t.from) {
                prefs.push(t.preference.clone());
                next.insert(t.to);
            }
        }
        let sum = semiring.big_sum(prefs.iter())?;
        Ok((next, sum))
    };

    let mut states: BTreeSet<StateId> = BTreeSet::from([component.initial()]);
    let mut steps: Vec<DiagnosticStep> = Vec::new();
    let mut cycle_start = None;

    match input {
        DiagnosticInput::Word(word) => {
            if word.is_empty() {
                return Err(DiagnosticsError::EmptyWord);
            }
            for &action in word {
                component.cas().name(action);
                let (next, sum) = step(&states, action)?;
                steps.push(DiagnosticStep {
                    states: states.iter().copied().collect(),
                    action,
                    preference_sum: sum,
                });
                states = next;
            }
        }
        DiagnosticInput::Stream(lasso) => {
            let mut seen: HashMap<(Vec<StateId>, usize), usize> = HashMap::new();
            let mut pos = 0usize;
            loop {
                let key = (states.iter().copied().collect::<Vec<_>>(), pos);
                if pos >= lasso.prefix().len() {
                    if let Some(&at) = seen.get(&key) {
                        cycle_start = Some(at);
                        break;
                    }
                    seen.insert(key, steps.len());
                }
                let action = *lasso.at(pos);
                let (next, sum) = step(&states, action)?;
                steps.push(DiagnosticStep {
                    states: states.iter().copied().collect(),
                    action,
                    preference_sum: sum,
                });
                states = next;
                pos = lasso.next_pos(pos);
            }
        }
    }

    let escapes = steps.iter().any(|s| s.states.is_empty());
    let value = semiring.glb(steps.iter().map(|s| &s.preference_sum))?;
    Ok(DiagnosticTrace { steps, cycle_start, escapes, value })
}

/// The bound that any admitted word imposes: acceptance forces the
/// threshold below the diagnostic preference.
pub fn threshold_bound_holds(
    component: &Sca,
    word: &Lasso<ActionId>,
) -> Result<bool, DiagnosticsError> {
    let trace = diagnostic_preference(component, &DiagnosticInput::Stream(word.clone()))?;
    Ok(component.semiring().leq(component.threshold(), &trace.value)?)
}

/// Re-evaluates membership at a replacement threshold; true when the word
/// is excluded there.
pub fn excludes_at(
    component: &Sca,
    threshold: Value,
    word: &Lasso<ActionId>,
) -> Result<bool, DiagnosticsError> {
    let adjusted = component.with_threshold(threshold)?;
    Ok(!adjusted.accepts(word)?)
}

fn subset_product(
    semiring: &Semiring,
    thresholds: &[Value],
    subset: u64,
    cache: &mut HashMap<u64, Value>,
) -> Result<Value, SemiringError> {
    if let Some(v) = cache.get(&subset) {
        return Ok(v.clone());
    }
    let mut acc = semiring.one();
    for (i, t) in thresholds.iter().enumerate() {
        if subset & (1 << i) != 0 {
            acc = semiring.times(&acc, t)?;
        }
    }
    cache.insert(subset, acc.clone());
    Ok(acc)
}

/// Is the subset suspect: does the product of its thresholds sit below the
/// diagnostic value? The empty product is the semiring one, so the empty
/// set is suspect only when the value is the one element.
pub fn is_suspect(
    semiring: &Semiring,
    thresholds: &[Value],
    subset: &BTreeSet<usize>,
    value: &Value,
) -> Result<bool, SemiringError> {
    let mut acc = semiring.one();
    for &i in subset {
        acc = semiring.times(&acc, &thresholds[i])?;
    }
    semiring.leq(&acc, value)
}

/// Minimal suspect subsets of the full component set, as index sets.
///
/// Recursion with memoization over subsets: strip one component at a time
/// while the remainder stays suspect; a subset none of whose strict
/// children are suspect is minimal. When the diagnostic value is the
/// semiring one, every singleton is suspect and the recursion is bypassed.
pub fn find_suspect(
    semiring: &Semiring,
    thresholds: &[Value],
    value: &Value,
) -> Result<BTreeSet<BTreeSet<usize>>, DiagnosticsError> {
    let n = thresholds.len();
    if n > 63 {
        return Err(DiagnosticsError::TooManyComponents(n));
    }
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut products: HashMap<u64, Value> = HashMap::new();
    let suspect = |subset: u64,
                   products: &mut HashMap<u64, Value>|
     -> Result<bool, SemiringError> {
        let p = subset_product(semiring, thresholds, subset, products)?;
        semiring.leq(&p, value)
    };
    if !suspect(full, &mut products)? {
        return Err(DiagnosticsError::NotSuspect);
    }
    if *value == semiring.one() {
        return Ok((0..n).map(|i| BTreeSet::from([i])).collect());
    }

    fn recurse(
        subset: u64,
        n: usize,
        semiring: &Semiring,
        thresholds: &[Value],
        value: &Value,
        products: &mut HashMap<u64, Value>,
        memo: &mut HashMap<u64, BTreeSet<u64>>,
    ) -> Result<BTreeSet<u64>, SemiringError> {
        if let Some(hit) = memo.get(&subset) {
            return Ok(hit.clone());
        }
        let mut minimal: BTreeSet<u64> = BTreeSet::new();
        for i in 0..n {
            let bit = 1u64 << i;
            if subset & bit == 0 {
                continue;
            }
            let child = subset & !bit;
            let p = subset_product(semiring, thresholds, child, products)?;
            if semiring.leq(&p, value)? {
                minimal
                    .extend(recurse(child, n, semiring, thresholds, value, products, memo)?);
            }
        }
        let result =
            if minimal.is_empty() { BTreeSet::from([subset]) } else { minimal };
        memo.insert(subset, result.clone());
        Ok(result)
    }

    let mut memo = HashMap::new();
    let masks = recurse(full, n, semiring, thresholds, value, &mut products, &mut memo)?;
    Ok(masks
        .into_iter()
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect())
}

/// A subset is innocent when it avoids every minimal suspect subset:
/// adjusting only its thresholds cannot exclude the diagnosed word.
pub fn innocence(
    semiring: &Semiring,
    thresholds: &[Value],
    subset: &BTreeSet<usize>,
    value: &Value,
) -> Result<bool, DiagnosticsError> {
    let minimal = match find_suspect(semiring, thresholds, value) {
        Ok(minimal) => minimal,
        // without a suspect full set there are no suspect subsets at all
        Err(DiagnosticsError::NotSuspect) => return Ok(true),
        Err(e) => return Err(e),
    };
    Ok(minimal.iter().all(|m| m.is_disjoint(subset)))
}

/// Suspect localization packaged for reporting.
#[derive(Debug, Clone, Serialize)]
pub struct SuspectReport {
    pub components: Vec<String>,
    pub thresholds: Vec<Value>,
    pub diagnostic_value: Value,
    pub minimal_suspect_sets: Vec<Vec<String>>,
    pub innocent_components: Vec<String>,
}

/// Runs the full localization for a composed component against a word:
/// diagnostic preference on the composite, minimal suspect subsets over the
/// factor thresholds, and the innocent factors.
pub fn localize(
    composite: &Sca,
    input: &DiagnosticInput,
    threshold_overrides: Option<Vec<Value>>,
) -> Result<SuspectReport, DiagnosticsError> {
    let semiring = composite.semiring().as_ref();
    let labels: Vec<String> =
        composite.components().iter().map(|c| c.label.clone()).collect();
    let thresholds: Vec<Value> = match threshold_overrides {
        Some(ts) => ts,
        None => composite.components().iter().map(|c| c.threshold.clone()).collect(),
    };
    let trace = diagnostic_preference(composite, input)?;
    let minimal = find_suspect(semiring, &thresholds, &trace.value)?;
    let mut innocent = Vec::new();
    for i in 0..labels.len() {
        if innocence(semiring, &thresholds, &BTreeSet::from([i]), &trace.value)? {
            innocent.push(labels[i].clone());
        }
    }
    Ok(SuspectReport {
        components: labels.clone(),
        thresholds,
        diagnostic_value: trace.value,
        minimal_suspect_sets: minimal
            .into_iter()
            .map(|s| s.into_iter().map(|i| labels[i].clone()).collect())
            .collect(),
        innocent_components: innocent,
    })
}
