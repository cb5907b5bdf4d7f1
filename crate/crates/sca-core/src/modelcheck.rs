//! The decision procedure: does every behavior of a component satisfy a
//! formula? Implemented by translating the component to a Buchi automaton
//! and checking language containment in the formula automaton, with
//! counterexample extraction and internal re-verification on failure.

use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::buchi::{self, BuchiError, Limits};
use crate::cas::ActionId;
use crate::lasso::Lasso;
use crate::logic::{self, Formula, LogicError, StageStat};
use crate::sca::Sca;
use crate::semiring::Value;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails { counterexample: Lasso<ActionId> },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

#[derive(Debug, Error)]
pub enum CheckError {
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Buchi(#[from] BuchiError),
    #[error(transparent)]
    Sca(#[from] crate::sca::ScaError),
    #[error("formula mentions actions outside the component's action system")]
    AlphabetMismatch,
    #[error(
        "internal verification of a counterexample failed ({0}); this indicates a defect in the automata pipeline"
    )]
    Unverified(&'static str),
}

/// Machine-readable record of one check: what was asked, the verdict, the
/// counterexample if any, and how large the intermediate automata grew.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub component: String,
    pub formula: String,
    pub threshold: Value,
    pub holds: bool,
    pub counterexample: Option<Lasso<String>>,
    pub stages: Vec<StageStat>,
    pub wall_millis: f64,
}

impl CheckReport {
    pub fn max_intermediate_states(&self) -> usize {
        self.stages.iter().map(|s| s.states).max().unwrap_or(0)
    }
}

fn formula_in_alphabet(formula: &Formula, actions: usize) -> bool {
    match formula {
        Formula::Top => true,
        Formula::Atom(a) => a.index() < actions,
        Formula::And(l, r) | Formula::Until(l, r) => {
            formula_in_alphabet(l, actions) && formula_in_alphabet(r, actions)
        }
        Formula::Next(f) | Formula::Not(f) | Formula::Captures(f) | Formula::Composable(f) => {
            formula_in_alphabet(f, actions)
        }
    }
}

/// Checks whether every behavior of the component satisfies the formula:
/// the language of the component's automaton must be contained in the
/// language of the formula automaton.
///
/// The witness automaton intersects the component with the compilation of
/// the negated formula. Compiling the negation directly lets the compiler
/// push the negation through the boolean structure instead of rank-basing
/// the complement of the full formula automaton; the two routes accept the
/// same language because complementation is exact.
///
/// On failure the counterexample is re-verified before being reported: it
/// must be a behavior of the component and must violate the formula, each
/// checked by the direct product membership routine rather than by the
/// emptiness search that produced it. The violation check prefers the
/// positively compiled formula automaton and falls back to the negated one
/// only when the positive compilation overflows the state budget.
pub fn check(
    component: &Sca,
    formula: &Formula,
    limits: Limits,
) -> Result<(Verdict, CheckReport), CheckError> {
    let start = Instant::now();
    if !formula_in_alphabet(formula, component.cas().action_count()) {
        return Err(CheckError::AlphabetMismatch);
    }
    let system = buchi::sca_to_ba(component);
    let mut stages = vec![StageStat { stage: "system".into(), states: system.state_count() }];

    let negated = logic::compile(&Formula::not(formula.clone()), component.cas(), limits)?;
    stages.extend(negated.stages.iter().cloned());

    let witnesses = buchi::intersect(&system, &negated.automaton, limits)?;
    stages.push(StageStat { stage: "intersect".into(), states: witnesses.state_count() });

    let verdict = match buchi::find_accepted(&witnesses) {
        None => Verdict::Holds,
        Some(counterexample) => {
            if !buchi::member(&system, &counterexample)? {
                return Err(CheckError::Unverified("counterexample is not a behavior"));
            }
            let violates = match logic::compile(formula, component.cas(), limits) {
                Ok(positive) => {
                    stages.extend(positive.stages.iter().cloned());
                    !buchi::member(&positive.automaton, &counterexample)?
                }
                Err(LogicError::Buchi(BuchiError::Capacity { .. })) => {
                    buchi::member(&negated.automaton, &counterexample)?
                }
                Err(e) => return Err(e.into()),
            };
            if !violates {
                return Err(CheckError::Unverified("counterexample satisfies the formula"));
            }
            Verdict::Fails { counterexample }
        }
    };

    let report = CheckReport {
        component: component.label().to_string(),
        formula: formula.display(component.cas()).to_string(),
        threshold: component.threshold().clone(),
        holds: verdict.holds(),
        counterexample: match &verdict {
            Verdict::Holds => None,
            Verdict::Fails { counterexample } => {
                Some(counterexample.to_names(component.cas()))
            }
        },
        stages,
        wall_millis: start.elapsed().as_secs_f64() * 1e3,
    };
    Ok((verdict, report))
}

/// Interface check: every stream composable with a behavior of the
/// component satisfies the formula. Sugar for checking the component
/// against "not composable with a violation".
pub fn check_interface(
    component: &Sca,
    formula: &Formula,
    limits: Limits,
) -> Result<(Verdict, CheckReport), CheckError> {
    let wrapped =
        Formula::not(Formula::composable(Formula::not(formula.clone())));
    check(component, &wrapped, limits)
}
