//! The system file: one JSON document declaring a semiring, an action
//! system, named components, named compositions, named formulas and named
//! streams. Loading resolves and validates everything; serialization writes
//! a document that loads back to the identical resolved system.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cas::{ActionId, Cas, CasError, ComposablePair};
use crate::lasso::Lasso;
use crate::logic::{self, Formula, LogicError};
use crate::sca::{Sca, ScaError};
use crate::semiring::{Semiring, SemiringError, Value};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{context}: {source}")]
    Semiring {
        context: String,
        #[source]
        source: SemiringError,
    },
    #[error("{context}: {source}")]
    Actions {
        context: String,
        #[source]
        source: CasError,
    },
    #[error("{context}: {source}")]
    Component {
        context: String,
        #[source]
        source: ScaError,
    },
    #[error("{context}: {source}")]
    Formula {
        context: String,
        #[source]
        source: LogicError,
    },
    #[error("{context}: unknown component `{name}`")]
    DanglingComponent { context: String, name: String },
    #[error("{context}: {message}")]
    Invalid { context: String, message: String },
}

// ---------------------------------------------------------------------------
// Wire schema
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSchema {
    semiring: SemiringSchema,
    cas: CasSchema,
    #[serde(default)]
    scas: BTreeMap<String, ScaSchema>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    compositions: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    formulas: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    lassos: BTreeMap<String, LassoSchema>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum SemiringSchema {
    Named(String),
    Product { product: [Box<SemiringSchema>; 2] },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CasSchema {
    actions: Vec<String>,
    #[serde(default)]
    composable: Vec<PairSchema>,
    #[serde(default)]
    closure: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairSchema {
    pair: [String; 2],
    result: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScaSchema {
    states: Vec<String>,
    initial: String,
    threshold: serde_json::Value,
    transitions: Vec<TransitionSchema>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionSchema {
    from: String,
    action: String,
    pref: serde_json::Value,
    to: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LassoSchema {
    #[serde(default)]
    prefix: Vec<String>,
    cycle: Vec<String>,
}

fn semiring_from_schema(schema: &SemiringSchema, context: &str) -> Result<Semiring, LoadError> {
    match schema {
        SemiringSchema::Named(name) if name == "weighted" => Ok(Semiring::Weighted),
        SemiringSchema::Named(other) => Err(LoadError::Invalid {
            context: context.to_string(),
            message: format!("unknown semiring `{other}` (expected `weighted` or a product)"),
        }),
        SemiringSchema::Product { product } => Ok(Semiring::product(
            semiring_from_schema(&product[0], &format!("{context}.product[0]"))?,
            semiring_from_schema(&product[1], &format!("{context}.product[1]"))?,
        )),
    }
}

fn semiring_to_schema(semiring: &Semiring) -> SemiringSchema {
    match semiring {
        Semiring::Weighted => SemiringSchema::Named("weighted".into()),
        Semiring::Product(l, r) => SemiringSchema::Product {
            product: [Box::new(semiring_to_schema(l)), Box::new(semiring_to_schema(r))],
        },
    }
}

// ---------------------------------------------------------------------------
// Resolved system
// ---------------------------------------------------------------------------

/// A fully resolved and validated system.
#[derive(Debug, Clone, PartialEq)]
pub struct System {
    pub semiring: Arc<Semiring>,
    pub cas: Arc<Cas>,
    /// Leaf components by name.
    pub scas: BTreeMap<String, Sca>,
    /// Composition recipes by name.
    pub compositions: BTreeMap<String, Vec<String>>,
    /// Composites built from the recipes, by name.
    pub composed: BTreeMap<String, Sca>,
    /// Formulas by name, with their source text.
    pub formulas: BTreeMap<String, (String, Formula)>,
    pub lassos: BTreeMap<String, Lasso<ActionId>>,
    cas_generators: Vec<ComposablePair>,
    cas_closure: bool,
}

impl System {
    pub fn load(path: impl AsRef<Path>) -> Result<System, LoadError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
            path: path.display().to_string(),
            source,
        })?;
        System::from_str(&text)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn from_str(text: &str) -> Result<System, LoadError> {
        let schema: FileSchema = serde_json::from_str(text)?;
        System::resolve(schema)
    }

    fn resolve(schema: FileSchema) -> Result<System, LoadError> {
        let semiring =
            Arc::new(semiring_from_schema(&schema.semiring, "semiring")?);
        let generators: Vec<ComposablePair> = schema
            .cas
            .composable
            .iter()
            .map(|p| ComposablePair {
                left: p.pair[0].clone(),
                right: p.pair[1].clone(),
                result: p.result.clone(),
            })
            .collect();
        let cas = Cas::build(&schema.cas.actions, &generators, schema.cas.closure)
            .map_err(|source| LoadError::Actions { context: "cas".into(), source })?;
        let cas = Arc::new(cas);

        let parse_value = |raw: &serde_json::Value, context: String| -> Result<Value, LoadError> {
            let value = Value::from_json(raw)
                .map_err(|source| LoadError::Semiring { context: context.clone(), source })?;
            if !semiring.contains(&value) {
                return Err(LoadError::Invalid {
                    context,
                    message: format!("value {value} is outside the declared semiring"),
                });
            }
            Ok(value)
        };

        let mut scas = BTreeMap::new();
        for (name, s) in &schema.scas {
            let context = format!("scas.{name}");
            let threshold = parse_value(&s.threshold, format!("{context}.threshold"))?;
            let mut transitions = Vec::new();
            for (i, t) in s.transitions.iter().enumerate() {
                let pref =
                    parse_value(&t.pref, format!("{context}.transitions[{i}].pref"))?;
                transitions.push((t.from.as_str(), t.action.as_str(), pref, t.to.as_str()));
            }
            let sca = Sca::new(
                name.clone(),
                Arc::clone(&cas),
                Arc::clone(&semiring),
                s.states.clone(),
                &s.initial,
                threshold,
                &transitions,
            )
            .map_err(|source| LoadError::Component { context, source })?;
            scas.insert(name.clone(), sca);
        }

        let mut composed = BTreeMap::new();
        for (name, factors) in &schema.compositions {
            let context = format!("compositions.{name}");
            if factors.is_empty() {
                return Err(LoadError::Invalid {
                    context,
                    message: "a composition needs at least one component".into(),
                });
            }
            let mut acc: Option<Sca> = None;
            for factor in factors {
                let part = scas.get(factor).ok_or_else(|| LoadError::DanglingComponent {
                    context: context.clone(),
                    name: factor.clone(),
                })?;
                acc = Some(match acc {
                    None => part.clone(),
                    Some(left) => left.compose(part).map_err(|source| {
                        LoadError::Component { context: context.clone(), source }
                    })?,
                });
            }
            composed.insert(name.clone(), acc.expect("nonempty composition"));
        }

        let mut formulas = BTreeMap::new();
        for (name, text) in &schema.formulas {
            let context = format!("formulas.{name}");
            let parsed = logic::parse(text, &cas)
                .map_err(|source| LoadError::Formula { context, source })?;
            formulas.insert(name.clone(), (text.clone(), parsed));
        }

        let mut lassos = BTreeMap::new();
        for (name, l) in &schema.lassos {
            let context = format!("lassos.{name}");
            if l.cycle.is_empty() {
                return Err(LoadError::Invalid {
                    context,
                    message: "lasso cycle must be nonempty".into(),
                });
            }
            let prefix: Vec<&str> = l.prefix.iter().map(String::as_str).collect();
            let cycle: Vec<&str> = l.cycle.iter().map(String::as_str).collect();
            let lasso = Lasso::from_names(&cas, &prefix, &cycle)
                .map_err(|source| LoadError::Actions { context, source })?;
            lassos.insert(name.clone(), lasso);
        }

        Ok(System {
            semiring,
            cas,
            scas,
            compositions: schema.compositions,
            composed,
            formulas,
            lassos,
            cas_generators: generators,
            cas_closure: schema.cas.closure,
        })
    }

    /// Looks up a leaf component or a named composition.
    pub fn component(&self, name: &str) -> Option<&Sca> {
        self.scas.get(name).or_else(|| self.composed.get(name))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let schema = FileSchema {
            semiring: semiring_to_schema(&self.semiring),
            cas: CasSchema {
                actions: self.cas.action_names().to_vec(),
                composable: self
                    .cas_generators
                    .iter()
                    .map(|p| PairSchema {
                        pair: [p.left.clone(), p.right.clone()],
                        result: p.result.clone(),
                    })
                    .collect(),
                closure: self.cas_closure,
            },
            scas: self
                .scas
                .iter()
                .map(|(name, sca)| {
                    (
                        name.clone(),
                        ScaSchema {
                            states: sca.state_names().to_vec(),
                            initial: sca.state_name(sca.initial()).to_string(),
                            threshold: serde_json::to_value(sca.threshold())
                                .expect("values serialize"),
                            transitions: sca
                                .transitions()
                                .iter()
                                .map(|t| TransitionSchema {
                                    from: sca.state_name(t.from).to_string(),
                                    action: self.cas.name(t.action).to_string(),
                                    pref: serde_json::to_value(&t.preference)
                                        .expect("values serialize"),
                                    to: sca.state_name(t.to).to_string(),
                                })
                                .collect(),
                        },
                    )
                })
                .collect(),
            compositions: self.compositions.clone(),
            formulas: self
                .formulas
                .iter()
                .map(|(name, (text, _))| (name.clone(), text.clone()))
                .collect(),
            lassos: self
                .lassos
                .iter()
                .map(|(name, lasso)| {
                    (
                        name.clone(),
                        LassoSchema {
                            prefix: lasso
                                .prefix()
                                .iter()
                                .map(|a| self.cas.name(*a).to_string())
                                .collect(),
                            cycle: lasso
                                .cycle()
                                .iter()
                                .map(|a| self.cas.name(*a).to_string())
                                .collect(),
                        },
                    )
                })
                .collect(),
        };
        serde_json::to_value(schema).expect("schema serializes")
    }

    pub fn to_string_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("schema serializes")
    }
}
