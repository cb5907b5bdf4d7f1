//! Verification toolkit for soft component automata: components whose
//! actions carry algebraic preferences, composed over a shared action
//! system, model-checked against a linear temporal logic with capture and
//! composability connectives, and diagnosed by tracing which components'
//! thresholds admit an undesired behavior.

pub mod buchi;
pub mod cas;
pub mod diagnostics;
pub mod fixtures;
pub mod lasso;
pub mod logic;
pub mod modelcheck;
pub mod sca;
pub mod semiring;
pub mod system;

pub use cas::{ActionId, Cas};
pub use lasso::Lasso;
pub use sca::{Sca, StateId};
pub use semiring::{Semiring, Value, Weight};
