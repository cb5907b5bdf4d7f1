//! Preference algebras: constraint semirings over which transition
//! preferences and thresholds are drawn.
//!
//! Two models are provided: the weighted semiring (nonnegative extended
//! reals, infimum as sum, extended addition as product, where a *lower*
//! weight is a *better* preference) and the pairwise product of two
//! semirings. The derived order `leq` and greatest lower bound `glb` are
//! what the diagnostic machinery runs on.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Fixed-point scale for finite weights: six decimal digits.
const SCALE: i128 = 1_000_000;

/// A nonnegative extended real, stored exactly as micro-units.
///
/// Exact representation keeps order comparisons free of tolerance
/// questions; all values used by the bundled systems are small integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Weight {
    Finite(i128),
    Infinite,
}

impl Weight {
    pub fn from_int(n: u64) -> Self {
        Weight::Finite(n as i128 * SCALE)
    }

    /// Parses a nonnegative decimal (at most six fractional digits) or `inf`.
    pub fn parse(text: &str) -> Result<Self, SemiringError> {
        let t = text.trim();
        if t.eq_ignore_ascii_case("inf") || t == "∞" {
            return Ok(Weight::Infinite);
        }
        let bad = || SemiringError::BadWeight(text.to_string());
        let (int_part, frac_part) = match t.split_once('.') {
            Some((i, f)) => (i, f),
            None => (t, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if frac_part.len() > 6 {
            return Err(SemiringError::BadWeight(format!(
                "{text}: more than six fractional digits"
            )));
        }
        let mut micros: i128 = 0;
        for c in int_part.chars() {
            let d = c.to_digit(10).ok_or_else(bad)? as i128;
            micros = micros.checked_mul(10).and_then(|m| m.checked_add(d)).ok_or_else(bad)?;
        }
        micros = micros.checked_mul(SCALE).ok_or_else(bad)?;
        let mut unit = SCALE;
        for c in frac_part.chars() {
            let d = c.to_digit(10).ok_or_else(bad)? as i128;
            unit /= 10;
            micros += d * unit;
        }
        Ok(Weight::Finite(micros))
    }

    fn checked_add(self, other: Weight) -> Weight {
        match (self, other) {
            (Weight::Finite(a), Weight::Finite(b)) => Weight::Finite(a + b),
            _ => Weight::Infinite,
        }
    }

    pub fn is_integral(&self) -> bool {
        matches!(self, Weight::Finite(m) if m % SCALE == 0)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Infinite => write!(f, "inf"),
            Weight::Finite(m) => {
                let int = m / SCALE;
                let frac = (m % SCALE).unsigned_abs();
                if frac == 0 {
                    write!(f, "{int}")
                } else {
                    let s = format!("{frac:06}");
                    write!(f, "{}.{}", int, s.trim_end_matches('0'))
                }
            }
        }
    }
}

/// An element of some semiring carrier: a weight, or a pair of elements.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Weight(Weight),
    Pair(Box<Value>, Box<Value>),
}

impl Value {
    pub fn weight(n: u64) -> Self {
        Value::Weight(Weight::from_int(n))
    }

    pub fn infinite() -> Self {
        Value::Weight(Weight::Infinite)
    }

    pub fn pair(left: Value, right: Value) -> Self {
        Value::Pair(Box::new(left), Box::new(right))
    }

    /// Convenience for pairs of integral weights.
    pub fn weight_pair(a: u64, b: u64) -> Self {
        Value::pair(Value::weight(a), Value::weight(b))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Weight(w) => write!(f, "{w}"),
            Value::Pair(a, b) => write!(f, "[{a}, {b}]"),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Weight(Weight::Infinite) => ser.serialize_str("inf"),
            Value::Weight(w @ Weight::Finite(m)) => {
                if w.is_integral() && *m >= 0 {
                    ser.serialize_u64((m / SCALE) as u64)
                } else {
                    ser.serialize_f64(*m as f64 / SCALE as f64)
                }
            }
            Value::Pair(a, b) => (a, b).serialize(ser),
        }
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = serde_json::Value::deserialize(de)?;
        Value::from_json(&raw).map_err(D::Error::custom)
    }
}

impl Value {
    pub fn from_json(raw: &serde_json::Value) -> Result<Self, SemiringError> {
        match raw {
            serde_json::Value::String(s) => Ok(Value::Weight(Weight::parse(s)?)),
            serde_json::Value::Number(n) => {
                if let Some(u) = n.as_u64() {
                    Ok(Value::weight(u))
                } else if let Some(f) = n.as_f64() {
                    // Shortest decimal rendering recovers the intended value
                    // for inputs with few fractional digits.
                    Ok(Value::Weight(Weight::parse(&format!("{f}"))?))
                } else {
                    Err(SemiringError::BadWeight(n.to_string()))
                }
            }
            serde_json::Value::Array(items) if items.len() == 2 => Ok(Value::pair(
                Value::from_json(&items[0])?,
                Value::from_json(&items[1])?,
            )),
            other => Err(SemiringError::BadWeight(other.to_string())),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SemiringError {
    #[error("value {value} is not in the carrier of the {semiring} semiring")]
    OutsideCarrier { value: String, semiring: String },
    #[error("greatest lower bound of the empty set is not defined")]
    EmptyGlb,
    #[error("cannot parse weight: {0}")]
    BadWeight(String),
}

/// A constraint semiring: a carrier with a set-indexed sum (here restricted
/// to finite sets), a product, and distinguished zero and one elements.
///
/// The sum induces the preference order `leq`; `glb` is the greatest lower
/// bound in that order, computed directly since the product need not be
/// idempotent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Semiring {
    /// Nonnegative extended reals; infimum as sum, addition as product,
    /// zero = infinity, one = 0. Lower weight means higher preference.
    Weighted,
    /// Pairwise composition of two semirings.
    Product(Box<Semiring>, Box<Semiring>),
}

impl fmt::Display for Semiring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Semiring::Weighted => write!(f, "weighted"),
            Semiring::Product(a, b) => write!(f, "product({a}, {b})"),
        }
    }
}

impl Semiring {
    pub fn product(left: Semiring, right: Semiring) -> Self {
        Semiring::Product(Box::new(left), Box::new(right))
    }

    /// Carrier membership: the value has the shape this semiring expects and
    /// every weight is nonnegative.
    pub fn contains(&self, value: &Value) -> bool {
        match (self, value) {
            (Semiring::Weighted, Value::Weight(Weight::Infinite)) => true,
            (Semiring::Weighted, Value::Weight(Weight::Finite(m))) => *m >= 0,
            (Semiring::Product(l, r), Value::Pair(a, b)) => l.contains(a) && r.contains(b),
            _ => false,
        }
    }

    fn check(&self, value: &Value) -> Result<(), SemiringError> {
        if self.contains(value) {
            Ok(())
        } else {
            Err(SemiringError::OutsideCarrier {
                value: value.to_string(),
                semiring: self.to_string(),
            })
        }
    }

    pub fn zero(&self) -> Value {
        match self {
            Semiring::Weighted => Value::infinite(),
            Semiring::Product(l, r) => Value::pair(l.zero(), r.zero()),
        }
    }

    pub fn one(&self) -> Value {
        match self {
            Semiring::Weighted => Value::weight(0),
            Semiring::Product(l, r) => Value::pair(l.one(), r.one()),
        }
    }

    fn plus_unchecked(&self, a: &Value, b: &Value) -> Value {
        match (self, a, b) {
            (Semiring::Weighted, Value::Weight(x), Value::Weight(y)) => {
                Value::Weight(*x.min(y))
            }
            (Semiring::Product(l, r), Value::Pair(a1, a2), Value::Pair(b1, b2)) => {
                Value::pair(l.plus_unchecked(a1, b1), r.plus_unchecked(a2, b2))
            }
            _ => unreachable!("carrier checked"),
        }
    }

    /// Sum of a finite set of elements; the empty sum is the zero element.
    pub fn big_sum<'a, I>(&self, items: I) -> Result<Value, SemiringError>
    where
        I: IntoIterator<Item = &'a Value>,
    {
        let mut acc = self.zero();
        for v in items {
            self.check(v)?;
            acc = self.plus_unchecked(&acc, v);
        }
        Ok(acc)
    }

    pub fn times(&self, a: &Value, b: &Value) -> Result<Value, SemiringError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.times_unchecked(a, b))
    }

    fn times_unchecked(&self, a: &Value, b: &Value) -> Value {
        match (self, a, b) {
            (Semiring::Weighted, Value::Weight(x), Value::Weight(y)) => {
                Value::Weight(x.checked_add(*y))
            }
            (Semiring::Product(l, r), Value::Pair(a1, a2), Value::Pair(b1, b2)) => {
                Value::pair(l.times_unchecked(a1, b1), r.times_unchecked(a2, b2))
            }
            _ => unreachable!("carrier checked"),
        }
    }

    /// Derived order: `a <= b` iff the sum of the two is `b`.
    pub fn leq(&self, a: &Value, b: &Value) -> Result<bool, SemiringError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.plus_unchecked(a, b) == *b)
    }

    /// Greatest lower bound of a nonempty finite set under the derived order.
    ///
    /// For the weighted semiring this is the numeric maximum; for products it
    /// is computed componentwise. The empty set is rejected.
    pub fn glb<'a, I>(&self, items: I) -> Result<Value, SemiringError>
    where
        I: IntoIterator<Item = &'a Value>,
    {
        let mut acc: Option<Value> = None;
        for v in items {
            self.check(v)?;
            acc = Some(match acc {
                None => v.clone(),
                Some(cur) => self.glb_unchecked(&cur, v),
            });
        }
        acc.ok_or(SemiringError::EmptyGlb)
    }

    fn glb_unchecked(&self, a: &Value, b: &Value) -> Value {
        match (self, a, b) {
            (Semiring::Weighted, Value::Weight(x), Value::Weight(y)) => {
                Value::Weight(*x.max(y))
            }
            (Semiring::Product(l, r), Value::Pair(a1, a2), Value::Pair(b1, b2)) => {
                Value::pair(l.glb_unchecked(a1, b1), r.glb_unchecked(a2, b2))
            }
            _ => unreachable!("carrier checked"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn w(n: u64) -> Value {
        Value::weight(n)
    }

    fn weighted_samples() -> Vec<Value> {
        let mut vals: Vec<Value> =
            [0u64, 1, 2, 4, 5, 7, 10, 11].iter().map(|&n| w(n)).collect();
        vals.push(Value::infinite());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..8 {
            vals.push(w(rng.gen_range(0..100)));
        }
        vals
    }

    fn product_samples() -> Vec<Value> {
        let ws = weighted_samples();
        let mut out = Vec::new();
        for (i, a) in ws.iter().enumerate() {
            out.push(Value::pair(a.clone(), ws[(i * 7 + 3) % ws.len()].clone()));
        }
        out
    }

    fn axiom_suite(s: &Semiring, sample: &[Value]) {
        let zero = s.zero();
        let one = s.one();
        assert_eq!(s.big_sum([]).unwrap(), zero);
        for a in sample {
            assert_eq!(s.big_sum([a]).unwrap(), *a, "singleton sum");
            assert_eq!(s.times(a, &zero).unwrap(), zero, "absorption");
            assert_eq!(s.times(a, &one).unwrap(), *a, "unit");
            for b in sample {
                assert_eq!(s.times(a, b).unwrap(), s.times(b, a).unwrap(), "commutativity");
                // intensivity: a (x) b <= a
                assert!(s.leq(&s.times(a, b).unwrap(), a).unwrap(), "intensivity");
                for c in sample {
                    let ab_c = s.times(&s.times(a, b).unwrap(), c).unwrap();
                    let a_bc = s.times(a, &s.times(b, c).unwrap()).unwrap();
                    assert_eq!(ab_c, a_bc, "associativity");
                    // distributivity over a two-element sum
                    let lhs = s.times(a, &s.big_sum([b, c]).unwrap()).unwrap();
                    let rhs = s
                        .big_sum([&s.times(a, b).unwrap(), &s.times(a, c).unwrap()])
                        .unwrap();
                    assert_eq!(lhs, rhs, "distributivity");
                }
            }
        }
        // flattening over a finite family
        let family: Vec<&[Value]> = vec![&sample[..3], &sample[3..5], &sample[5..]];
        let of_sums: Vec<Value> =
            family.iter().map(|part| s.big_sum(part.iter()).unwrap()).collect();
        let flat = s.big_sum(sample).unwrap();
        assert_eq!(s.big_sum(of_sums.iter()).unwrap(), flat, "flattening");
    }

    #[test]
    fn weighted_axioms() {
        axiom_suite(&Semiring::Weighted, &weighted_samples());
    }

    #[test]
    fn product_axioms() {
        let s = Semiring::product(Semiring::Weighted, Semiring::Weighted);
        axiom_suite(&s, &product_samples());
    }

    #[test]
    fn weighted_order_is_reversed_numeric() {
        let s = Semiring::Weighted;
        assert!(s.leq(&w(5), &w(2)).unwrap());
        assert!(!s.leq(&w(2), &w(5)).unwrap());
        let sample = weighted_samples();
        for a in &sample {
            assert!(s.leq(&s.zero(), a).unwrap(), "zero is minimal");
            for b in &sample {
                let (Value::Weight(x), Value::Weight(y)) = (a, b) else { unreachable!() };
                assert_eq!(s.leq(a, b).unwrap(), y <= x, "leq({a},{b})");
            }
        }
    }

    #[test]
    fn product_order_is_componentwise() {
        let s = Semiring::product(Semiring::Weighted, Semiring::Weighted);
        let lhs = Value::weight_pair(4, 2);
        let rhs = Value::weight_pair(2, 4);
        assert!(!s.leq(&lhs, &rhs).unwrap());
        assert!(!s.leq(&rhs, &lhs).unwrap());
        let ws = weighted_samples();
        let inner = Semiring::Weighted;
        for a in ws.iter().take(6) {
            for b in ws.iter().take(6) {
                for c in ws.iter().take(6) {
                    for d in ws.iter().take(6) {
                        let p = Value::pair(a.clone(), b.clone());
                        let q = Value::pair(c.clone(), d.clone());
                        let expect =
                            inner.leq(a, c).unwrap() && inner.leq(b, d).unwrap();
                        assert_eq!(s.leq(&p, &q).unwrap(), expect);
                    }
                }
            }
        }
    }

    #[test]
    fn glb_examples() {
        let s = Semiring::Weighted;
        assert_eq!(s.glb([&w(7), &w(1), &w(1)]).unwrap(), w(7));
        assert_eq!(s.glb([&w(3)]).unwrap(), w(3));
        let p = Semiring::product(Semiring::Weighted, Semiring::Weighted);
        assert_eq!(
            p.glb([&Value::weight_pair(2, 2), &Value::weight_pair(0, 0)]).unwrap(),
            Value::weight_pair(2, 2)
        );
        assert_eq!(s.glb([]), Err(SemiringError::EmptyGlb));
    }

    #[test]
    fn times_and_big_sum_examples() {
        let s = Semiring::Weighted;
        assert_eq!(s.times(&w(4), &w(1)).unwrap(), w(5));
        assert_eq!(s.big_sum([&w(5), &w(7)]).unwrap(), w(5));
        assert_eq!(s.times(&w(9), &s.one()).unwrap(), w(9));
        assert_eq!(s.times(&Value::infinite(), &w(1)).unwrap(), Value::infinite());
    }

    #[test]
    fn carrier_violations_are_domain_errors() {
        let s = Semiring::Weighted;
        let pair = Value::weight_pair(1, 1);
        assert!(matches!(s.leq(&pair, &w(1)), Err(SemiringError::OutsideCarrier { .. })));
        let p = Semiring::product(Semiring::Weighted, Semiring::Weighted);
        assert!(matches!(p.times(&w(1), &w(1)), Err(SemiringError::OutsideCarrier { .. })));
    }

    #[test]
    fn weight_parse_and_display() {
        assert_eq!(Weight::parse("inf").unwrap(), Weight::Infinite);
        assert_eq!(Weight::parse("2.5").unwrap().to_string(), "2.5");
        assert_eq!(Weight::parse("7").unwrap(), Weight::from_int(7));
        assert!(Weight::parse("1.2345678").is_err());
        assert!(Weight::parse("-3").is_err());
        assert!(Weight::parse("x").is_err());
    }

    #[test]
    fn value_json_round_trip() {
        for v in [w(5), Value::infinite(), Value::weight_pair(3, 3)] {
            let text = serde_json::to_string(&v).unwrap();
            let back: Value = serde_json::from_str(&text).unwrap();
            assert_eq!(back, v);
        }
        let frac: Value = serde_json::from_str("2.5").unwrap();
        assert_eq!(frac, Value::Weight(Weight::parse("2.5").unwrap()));
    }
}
