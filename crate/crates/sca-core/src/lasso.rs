//! Eventually periodic streams, represented as a finite prefix followed by a
//! nonempty cycle repeated forever.
//!
//! Lassos are kept in canonical form: the cycle is primitive (not a power of
//! a shorter word) and the prefix is as short as possible, folding trailing
//! letters into the cycle. Canonical form makes equality of lassos coincide
//! with equality of the streams they denote, and keeps counterexample output
//! deterministic.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cas::{ActionId, Cas, CasError};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lasso<T = ActionId> {
    prefix: Vec<T>,
    cycle: Vec<T>,
}

impl<T: Clone + PartialEq> Lasso<T> {
    /// Builds a lasso in canonical form. Panics if the cycle is empty.
    pub fn new(prefix: Vec<T>, cycle: Vec<T>) -> Self {
        assert!(!cycle.is_empty(), "lasso cycle must be nonempty");
        let mut lasso = Lasso { prefix, cycle };
        lasso.canonicalize();
        lasso
    }

    fn canonicalize(&mut self) {
        // primitive root of the cycle
        let n = self.cycle.len();
        for d in 1..=n / 2 {
            if n % d == 0 && (d..n).all(|i| self.cycle[i] == self.cycle[i - d]) {
                self.cycle.truncate(d);
                break;
            }
        }
        // fold the prefix tail into the cycle while it matches the cycle end
        while let Some(last) = self.prefix.last() {
            if *last == *self.cycle.last().expect("nonempty") {
                let moved = self.cycle.pop().expect("nonempty");
                self.cycle.insert(0, moved);
                self.prefix.pop();
            } else {
                break;
            }
        }
    }

    pub fn prefix(&self) -> &[T] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[T] {
        &self.cycle
    }

    /// Total number of distinct positions (prefix plus one cycle unrolling).
    pub fn period_end(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    /// Letter at stream position `n`.
    pub fn at(&self, n: usize) -> &T {
        if n < self.prefix.len() {
            &self.prefix[n]
        } else {
            &self.cycle[(n - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// Successor of a position index within `0..period_end()`.
    pub fn next_pos(&self, pos: usize) -> usize {
        if pos + 1 < self.period_end() {
            pos + 1
        } else {
            self.prefix.len()
        }
    }

    /// The k-th derivative: the stream with the first `k` letters dropped.
    pub fn shift(&self, k: usize) -> Lasso<T> {
        if k <= self.prefix.len() {
            let mut prefix = self.prefix.clone();
            prefix.drain(..k);
            Lasso::new(prefix, self.cycle.clone())
        } else {
            let r = (k - self.prefix.len()) % self.cycle.len();
            let mut cycle = self.cycle.clone();
            cycle.rotate_left(r);
            Lasso::new(Vec::new(), cycle)
        }
    }

    /// First `n` letters of the denoted stream.
    pub fn unroll(&self, n: usize) -> Vec<T> {
        (0..n).map(|i| self.at(i).clone()).collect()
    }

    /// Applies a letterwise transformation, preserving the lasso shape.
    pub fn map<U: Clone + PartialEq>(&self, mut f: impl FnMut(&T) -> U) -> Lasso<U> {
        Lasso::new(
            self.prefix.iter().map(&mut f).collect(),
            self.cycle.iter().map(&mut f).collect(),
        )
    }
}

impl Lasso<ActionId> {
    pub fn from_names(cas: &Cas, prefix: &[&str], cycle: &[&str]) -> Result<Self, CasError> {
        let resolve = |names: &[&str]| -> Result<Vec<ActionId>, CasError> {
            names.iter().map(|n| cas.action(n)).collect()
        };
        Ok(Lasso::new(resolve(prefix)?, resolve(cycle)?))
    }

    pub fn display<'a>(&'a self, cas: &'a Cas) -> LassoDisplay<'a> {
        LassoDisplay { lasso: self, cas }
    }

    pub fn to_names(&self, cas: &Cas) -> Lasso<String> {
        self.map(|a| cas.name(*a).to_string())
    }
}

pub struct LassoDisplay<'a> {
    lasso: &'a Lasso<ActionId>,
    cas: &'a Cas,
}

impl fmt::Display for LassoDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names =
            |xs: &[ActionId]| xs.iter().map(|a| self.cas.name(*a)).collect::<Vec<_>>().join(", ");
        if !self.lasso.prefix.is_empty() {
            write!(f, "<{}> . ", names(&self.lasso.prefix))?;
        }
        write!(f, "<{}>^w", names(&self.lasso.cycle))
    }
}

#[derive(Deserialize)]
struct LassoWire<T> {
    prefix: Vec<T>,
    cycle: Vec<T>,
}

#[derive(Serialize)]
struct LassoWireRef<'a, T> {
    prefix: &'a [T],
    cycle: &'a [T],
}

impl<T: Serialize> Serialize for Lasso<T> {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        LassoWireRef { prefix: &self.prefix, cycle: &self.cycle }.serialize(ser)
    }
}

impl<'de, T: Deserialize<'de> + Clone + PartialEq> Deserialize<'de> for Lasso<T> {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let wire = LassoWire::<T>::deserialize(de)?;
        if wire.cycle.is_empty() {
            return Err(D::Error::custom("lasso cycle must be nonempty"));
        }
        Ok(Lasso::new(wire.prefix, wire.cycle))
    }
}

impl<T: fmt::Display> fmt::Display for Lasso<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &[T]| xs.iter().map(T::to_string).collect::<Vec<_>>().join(", ");
        if !self.prefix.is_empty() {
            write!(f, "<{}> . ", join(&self.prefix))?;
        }
        write!(f, "<{}>^w", join(&self.cycle))
    }
}
