//! Bundled example systems, shared by the test suites, the command-line
//! examples and the documentation.
//!
//! `drone` is a two-component crop-surveillance model: an energy manager
//! that charges or spends one or two units per step, and a snapshot
//! bookkeeper that wants a picture of every location before moving on.
//! `fork` is a three-state system over a product semiring whose two branch
//! preferences are incomparable, which makes the sum of branch preferences
//! an imprecise guide for threshold selection.

use std::sync::Arc;

use crate::cas::{Cas, ComposablePair};
use crate::sca::Sca;
use crate::semiring::{Semiring, Value};

fn w(n: u64) -> Value {
    Value::weight(n)
}

pub struct Drone {
    pub cas: Arc<Cas>,
    pub semiring: Arc<Semiring>,
    pub energy: Sca,
    pub snapshot: Sca,
}

impl Drone {
    /// Energy and snapshot management composed at the default thresholds.
    pub fn composed(&self) -> Sca {
        self.energy.compose(&self.snapshot).expect("fixture components compose")
    }
}

/// The drone action system: three energy actions, three snapshot actions,
/// their two cross-component compositions, and an isolated `halt` action.
pub fn drone_cas() -> Cas {
    let actions: Vec<String> = [
        "charge",
        "discharge1",
        "discharge2",
        "pass",
        "move",
        "snapshot",
        "move2",
        "snapshot1",
        "halt",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let pair = |l: &str, r: &str, result: &str| ComposablePair {
        left: l.into(),
        right: r.into(),
        result: result.into(),
    };
    Cas::build(
        &actions,
        &[
            pair("move", "discharge2", "move2"),
            pair("snapshot", "discharge1", "snapshot1"),
            pair("pass", "charge", "charge"),
        ],
        true,
    )
    .expect("drone action system is valid")
}

/// The energy manager over the given structures: five charge levels,
/// starting full.
pub fn energy_over(cas: &Arc<Cas>, semiring: &Arc<Semiring>, threshold: Value) -> Sca {
    Sca::new(
        "e",
        Arc::clone(cas),
        Arc::clone(semiring),
        ["q0", "q1", "q2", "q3", "q4"].map(String::from).to_vec(),
        "q4",
        threshold,
        &[
            ("q0", "charge", w(0), "q1"),
            ("q1", "charge", w(0), "q2"),
            ("q2", "charge", w(0), "q3"),
            ("q3", "charge", w(0), "q4"),
            ("q1", "discharge1", w(2), "q0"),
            ("q2", "discharge1", w(2), "q1"),
            ("q3", "discharge1", w(2), "q2"),
            ("q4", "discharge1", w(2), "q3"),
            ("q2", "discharge2", w(5), "q0"),
            ("q3", "discharge2", w(5), "q1"),
            ("q4", "discharge2", w(5), "q2"),
        ],
    )
    .expect("energy fixture is well-formed")
}

/// The snapshot bookkeeper over the given structures: `qY`/`qN` record
/// whether the current location has been photographed.
pub fn snapshot_over(cas: &Arc<Cas>, semiring: &Arc<Semiring>, threshold: Value) -> Sca {
    Sca::new(
        "s",
        Arc::clone(cas),
        Arc::clone(semiring),
        ["qN", "qY"].map(String::from).to_vec(),
        "qN",
        threshold,
        &[
            ("qY", "move", w(0), "qN"),
            ("qN", "snapshot", w(0), "qY"),
            ("qN", "move", w(2), "qN"),
            ("qN", "pass", w(1), "qN"),
            ("qY", "pass", w(1), "qY"),
        ],
    )
    .expect("snapshot fixture is well-formed")
}

/// The drone system at its default thresholds (energy 4, snapshot 1).
pub fn drone() -> Drone {
    let cas = Arc::new(drone_cas());
    let semiring = Arc::new(Semiring::Weighted);
    let energy = energy_over(&cas, &semiring, w(4));
    let snapshot = snapshot_over(&cas, &semiring, w(1));
    Drone { cas, semiring, energy, snapshot }
}

pub struct Fork {
    pub cas: Arc<Cas>,
    pub semiring: Arc<Semiring>,
    pub sca: Sca,
}

/// A single-action system that immediately forks into one of two absorbing
/// loops; the two fork preferences are incomparable in the product order.
pub fn fork() -> Fork {
    let cas = Arc::new(Cas::build(&["a".to_string()], &[], true).expect("one-action system"));
    let semiring = Arc::new(Semiring::product(Semiring::Weighted, Semiring::Weighted));
    let sca = Sca::new(
        "fork",
        Arc::clone(&cas),
        Arc::clone(&semiring),
        ["q0", "q1", "q2"].map(String::from).to_vec(),
        "q0",
        Value::weight_pair(1, 1),
        &[
            ("q0", "a", Value::weight_pair(4, 2), "q1"),
            ("q0", "a", Value::weight_pair(2, 4), "q2"),
            ("q1", "a", Value::weight_pair(0, 0), "q1"),
            ("q2", "a", Value::weight_pair(0, 0), "q2"),
        ],
    )
    .expect("fork fixture is well-formed");
    Fork { cas, semiring, sca }
}
