//! Component action systems: a finite action alphabet together with a
//! symmetric, reflexive composability relation and a partial composition
//! operator on composable pairs.
//!
//! Action sets are small (dozens at most), so the relation, the partial
//! composition map and the derived capture preorder are kept as dense
//! indexed tables; lookups on the hot automata-product paths are O(1).

use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Index of an action in its [`Cas`]. Order follows the declared action list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionId(pub u32);

impl ActionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CasError {
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("duplicate action `{0}`")]
    DuplicateAction(String),
    #[error("actions `{0}` and `{1}` are not composable")]
    NotComposable(String, String),
    #[error(
        "composability closure forces pairs with no declared composition result: {}",
        .0.iter().map(|(a, b)| format!("({a}, {b})")).collect::<Vec<_>>().join(", ")
    )]
    UnderSpecified(Vec<(String, String)>),
    #[error("conflicting compositions declared for `{left}` and `{right}`: `{first}` and `{second}`")]
    ConflictingPair { left: String, right: String, first: String, second: String },
    #[error("action system violates its axioms:\n{0}")]
    Invalid(ValidationReport),
}

/// One violated axiom together with the witnessing actions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum AxiomViolation {
    Reflexivity { action: String },
    Symmetry { left: String, right: String },
    Idempotency { action: String, got: String },
    Commutativity { left: String, right: String, forward: String, backward: String },
    /// Both bracketings of the witness triple are defined but their results
    /// disagree.
    Associativity { a: String, b: String, c: String, detail: String },
    /// A composable pair without a composition result, a composition entry
    /// outside the relation, or a result outside the action set.
    DanglingComposition { left: String, right: String, detail: String },
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomViolation::Reflexivity { action } => {
                write!(f, "reflexivity: `{action}` is not composable with itself")
            }
            AxiomViolation::Symmetry { left, right } => {
                write!(f, "symmetry: `{left}` composable with `{right}` but not conversely")
            }
            AxiomViolation::Idempotency { action, got } => {
                write!(f, "idempotency: `{action}` composed with itself yields `{got}`")
            }
            AxiomViolation::Commutativity { left, right, forward, backward } => write!(
                f,
                "commutativity: `{left}` (.) `{right}` = `{forward}` but `{right}` (.) `{left}` = `{backward}`"
            ),
            AxiomViolation::Associativity { a, b, c, detail } => {
                write!(f, "associativity on (`{a}`, `{b}`, `{c}`): {detail}")
            }
            AxiomViolation::DanglingComposition { left, right, detail } => {
                write!(f, "composition table on (`{left}`, `{right}`): {detail}")
            }
        }
    }
}

/// Result of exhaustively checking the action-system axioms.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<AxiomViolation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            write!(f, "ok")
        } else {
            for (i, v) in self.violations.iter().enumerate() {
                if i > 0 {
                    writeln!(f)?;
                }
                write!(f, "- {v}")?;
            }
            Ok(())
        }
    }
}

/// A generator pair for the builder: `left` and `right` compose to `result`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComposablePair {
    pub left: String,
    pub right: String,
    pub result: String,
}

/// A component action system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cas {
    names: Vec<String>,
    composable: Vec<Vec<bool>>,
    compose: Vec<Vec<Option<ActionId>>>,
    captures: Vec<Vec<bool>>,
}

impl Cas {
    /// Builds an action system from generator pairs.
    ///
    /// The composability relation is the reflexive-symmetric closure of the
    /// generators, additionally closed under transitivity when `transitive`
    /// is set. Self-compositions are idempotent. Pairs forced by transitivity
    /// must come with a declared result; otherwise the builder reports them
    /// rather than inventing compositions. The finished system is validated
    /// exhaustively and axiom violations are an error.
    pub fn build(
        actions: &[String],
        pairs: &[ComposablePair],
        transitive: bool,
    ) -> Result<Cas, CasError> {
        let n = actions.len();
        let mut names = Vec::with_capacity(n);
        for a in actions {
            if names.contains(a) {
                return Err(CasError::DuplicateAction(a.clone()));
            }
            names.push(a.clone());
        }
        let find = |name: &str| -> Result<usize, CasError> {
            names
                .iter()
                .position(|x| x == name)
                .ok_or_else(|| CasError::UnknownAction(name.to_string()))
        };

        let mut composable = vec![vec![false; n]; n];
        let mut compose: Vec<Vec<Option<ActionId>>> = vec![vec![None; n]; n];
        for i in 0..n {
            composable[i][i] = true;
            compose[i][i] = Some(ActionId(i as u32));
        }
        for p in pairs {
            let (i, j) = (find(&p.left)?, find(&p.right)?);
            let r = ActionId(find(&p.result)? as u32);
            if let Some(existing) = compose[i][j] {
                if existing != r {
                    return Err(CasError::ConflictingPair {
                        left: p.left.clone(),
                        right: p.right.clone(),
                        first: names[existing.index()].clone(),
                        second: p.result.clone(),
                    });
                }
            }
            composable[i][j] = true;
            composable[j][i] = true;
            compose[i][j] = Some(r);
            compose[j][i] = Some(r);
        }

        if transitive {
            // Warshall closure of the relation; newly forced pairs need results.
            loop {
                let mut changed = false;
                for k in 0..n {
                    for i in 0..n {
                        if composable[i][k] {
                            for j in 0..n {
                                if composable[k][j] && !composable[i][j] {
                                    composable[i][j] = true;
                                    changed = true;
                                }
                            }
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            let mut missing = Vec::new();
            for i in 0..n {
                for j in i..n {
                    if composable[i][j] && compose[i][j].is_none() {
                        missing.push((names[i].clone(), names[j].clone()));
                    }
                }
            }
            if !missing.is_empty() {
                return Err(CasError::UnderSpecified(missing));
            }
        }

        let cas = Cas::from_tables(names, composable, compose);
        let report = cas.validate();
        if report.is_ok() {
            Ok(cas)
        } else {
            Err(CasError::Invalid(report))
        }
    }

    /// Assembles an action system from raw tables without validating.
    ///
    /// Intended for tests of the validator and for conventions (such as a
    /// universal halting action) that deliberately step outside the axioms.
    pub fn from_tables(
        names: Vec<String>,
        composable: Vec<Vec<bool>>,
        compose: Vec<Vec<Option<ActionId>>>,
    ) -> Cas {
        let mut cas = Cas { names, composable, compose, captures: Vec::new() };
        cas.captures = cas.derive_captures();
        cas
    }

    fn derive_captures(&self) -> Vec<Vec<bool>> {
        let n = self.names.len();
        let mut caps = vec![vec![false; n]; n];
        for a in 0..n {
            for c in 0..n {
                if self.composable[a][c] {
                    if let Some(b) = self.compose[a][c] {
                        caps[a][b.index()] = true;
                    }
                }
            }
        }
        caps
    }

    /// Extends the system with a `halt`-style action that is composable with
    /// every action and absorbs every composition. An existing action may be
    /// promoted to absorbing only while it is still isolated (related to
    /// nothing but itself); anything else is a duplicate-action error.
    ///
    /// The extension deliberately trades the incomposability-transfer law
    /// for universal composability: everything composes with the absorbing
    /// action, so incomposability does not carry over to it. It also cannot
    /// go through the transitive-closure builder, which would relate every
    /// pair of actions through the absorbing one.
    pub fn with_absorbing(&self, name: &str) -> Result<Cas, CasError> {
        let n = self.names.len();
        let existing = self.names.iter().position(|x| x == name);
        if let Some(h) = existing {
            let isolated = (0..n).all(|j| j == h || !self.composable[h][j]);
            if !isolated {
                return Err(CasError::DuplicateAction(name.to_string()));
            }
        }
        let mut names = self.names.clone();
        let halt = match existing {
            Some(h) => ActionId(h as u32),
            None => {
                names.push(name.to_string());
                ActionId(n as u32)
            }
        };
        let m = names.len();
        let mut composable = vec![vec![false; m]; m];
        let mut compose = vec![vec![None; m]; m];
        for i in 0..n {
            for j in 0..n {
                composable[i][j] = self.composable[i][j];
                compose[i][j] = self.compose[i][j];
            }
        }
        for i in 0..m {
            composable[i][halt.index()] = true;
            composable[halt.index()][i] = true;
            compose[i][halt.index()] = Some(halt);
            compose[halt.index()][i] = Some(halt);
        }
        Ok(Cas::from_tables(names, composable, compose))
    }

    pub fn action_count(&self) -> usize {
        self.names.len()
    }

    pub fn actions(&self) -> impl Iterator<Item = ActionId> + '_ {
        (0..self.names.len() as u32).map(ActionId)
    }

    pub fn action_names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, a: ActionId) -> &str {
        &self.names[a.index()]
    }

    pub fn action(&self, name: &str) -> Result<ActionId, CasError> {
        self.names
            .iter()
            .position(|x| x == name)
            .map(|i| ActionId(i as u32))
            .ok_or_else(|| CasError::UnknownAction(name.to_string()))
    }

    pub fn composable(&self, a: ActionId, b: ActionId) -> bool {
        self.composable[a.index()][b.index()]
    }

    pub fn compose(&self, a: ActionId, b: ActionId) -> Result<ActionId, CasError> {
        if self.composable(a, b) {
            if let Some(r) = self.compose[a.index()][b.index()] {
                return Ok(r);
            }
        }
        Err(CasError::NotComposable(
            self.name(a).to_string(),
            self.name(b).to_string(),
        ))
    }

    /// The capture preorder: `a` is captured by `b` when some action composes
    /// with `a` to yield `b`.
    pub fn captures(&self, a: ActionId, b: ActionId) -> bool {
        self.captures[a.index()][b.index()]
    }

    /// Actions that capture `a` (the up-set of `a` in the capture preorder).
    pub fn captured_by(&self, a: ActionId) -> impl Iterator<Item = ActionId> + '_ {
        let row = &self.captures[a.index()];
        (0..row.len() as u32).map(ActionId).filter(move |b| row[b.index()])
    }

    /// Exhaustively checks the axioms, reporting every violation with its
    /// witnesses. Violations are data, not errors: callers decide.
    pub fn validate(&self) -> ValidationReport {
        let n = self.names.len();
        let mut violations = Vec::new();
        for i in 0..n {
            if !self.composable[i][i] {
                violations.push(AxiomViolation::Reflexivity { action: self.names[i].clone() });
            }
        }
        for i in 0..n {
            for j in 0..n {
                if self.composable[i][j] && !self.composable[j][i] {
                    violations.push(AxiomViolation::Symmetry {
                        left: self.names[i].clone(),
                        right: self.names[j].clone(),
                    });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if self.composable[i][j] {
                    match self.compose[i][j] {
                        None => violations.push(AxiomViolation::DanglingComposition {
                            left: self.names[i].clone(),
                            right: self.names[j].clone(),
                            detail: "composable pair has no composition result".into(),
                        }),
                        Some(r) if r.index() >= n => {
                            violations.push(AxiomViolation::DanglingComposition {
                                left: self.names[i].clone(),
                                right: self.names[j].clone(),
                                detail: "composition result is not a declared action".into(),
                            })
                        }
                        Some(_) => {}
                    }
                } else if self.compose[i][j].is_some() {
                    violations.push(AxiomViolation::DanglingComposition {
                        left: self.names[i].clone(),
                        right: self.names[j].clone(),
                        detail: "composition defined on an incomposable pair".into(),
                    });
                }
            }
        }
        for i in 0..n {
            if self.composable[i][i] {
                if let Some(r) = self.compose[i][i] {
                    if r.index() != i {
                        violations.push(AxiomViolation::Idempotency {
                            action: self.names[i].clone(),
                            got: self.names[r.index()].clone(),
                        });
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if self.composable[i][j] && self.composable[j][i] {
                    if let (Some(x), Some(y)) = (self.compose[i][j], self.compose[j][i]) {
                        if x != y {
                            violations.push(AxiomViolation::Commutativity {
                                left: self.names[i].clone(),
                                right: self.names[j].clone(),
                                forward: self.names[x.index()].clone(),
                                backward: self.names[y.index()].clone(),
                            });
                        }
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if let Some(v) = self.associativity_violation(a, b, c) {
                        violations.push(v);
                    }
                }
            }
        }
        ValidationReport { violations }
    }

    /// Associativity is checked in the Kleene sense: whenever both
    /// bracketings of a triple are defined, they must agree. The directional
    /// transfer laws (a bracketing being defined forcing the other to be) do
    /// not hold for systems built from sparse composability generators, so
    /// they are not axioms here; see [`Cas::incomposability_transfer_failures`]
    /// for the transfer properties that do hold.
    fn associativity_violation(&self, a: usize, b: usize, c: usize) -> Option<AxiomViolation> {
        let ab = if self.composable[a][b] { self.compose[a][b] } else { None };
        let bc = if self.composable[b][c] { self.compose[b][c] } else { None };
        let left = ab.and_then(|x| {
            if self.composable[x.index()][c] { self.compose[x.index()][c] } else { None }
        });
        let right = bc.and_then(|x| {
            if self.composable[a][x.index()] { self.compose[a][x.index()] } else { None }
        });
        match (left, right) {
            (Some(x), Some(y)) if x != y => Some(AxiomViolation::Associativity {
                a: self.names[a].clone(),
                b: self.names[b].clone(),
                c: self.names[c].clone(),
                detail: format!(
                    "(a.b).c = {} but a.(b.c) = {}",
                    self.names[x.index()],
                    self.names[y.index()]
                ),
            }),
            _ => None,
        }
    }

    /// Incomposability carries over to compositions and to capturing actions:
    /// if `a` composes with `b` but not with `c`, then `a (.) b` must not
    /// compose with `c` either, and any action capturing `a` must not compose
    /// with `c`.
    ///
    /// The law is checked for third parties only: `c` equal to the composite
    /// itself (respectively to the capturing action) is excluded, because
    /// reflexivity makes the composite composable with itself even when a
    /// factor is not composable with it.
    ///
    /// Returns the witnessing triples of failures, empty when the law holds.
    pub fn incomposability_transfer_failures(&self) -> Vec<(String, String, String)> {
        let n = self.names.len();
        let mut failures = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if !self.composable[a][b] {
                    continue;
                }
                let Some(ab) = self.compose[a][b] else { continue };
                for c in 0..n {
                    if c == ab.index() {
                        continue;
                    }
                    if !self.composable[a][c] && self.composable[ab.index()][c] {
                        failures.push((
                            self.names[a].clone(),
                            self.names[b].clone(),
                            self.names[c].clone(),
                        ));
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                if !self.captures[a][b] {
                    continue;
                }
                for c in 0..n {
                    if c == b {
                        continue;
                    }
                    if !self.composable[a][c] && self.composable[b][c] {
                        failures.push((
                            self.names[a].clone(),
                            self.names[b].clone(),
                            self.names[c].clone(),
                        ));
                    }
                }
            }
        }
        failures
    }

    /// Checks that the derived capture relation is a preorder on this system.
    pub fn capture_preorder_failures(&self) -> Vec<(String, String)> {
        let n = self.names.len();
        let mut failures = Vec::new();
        for a in 0..n {
            if !self.captures[a][a] {
                failures.push((self.names[a].clone(), self.names[a].clone()));
            }
        }
        for a in 0..n {
            for b in 0..n {
                if !self.captures[a][b] {
                    continue;
                }
                for c in 0..n {
                    if self.captures[b][c] && !self.captures[a][c] {
                        failures.push((self.names[a].clone(), self.names[c].clone()));
                    }
                }
            }
        }
        failures
    }
}
