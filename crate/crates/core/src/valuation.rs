//! The rank-two valuation on `F_q(alpha, beta)` with value group `Z x Z`
//! ordered from the right: `(s, t) < (s', t')` iff `t < t'`, or `t = t'` and
//! `s < s'`. Values of quadratic extensions and quaternion algebras come from
//! halving the value of a norm.

use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, SymbolAlgebra};
use crate::error::{Error, Result};
use crate::fields::{artin_schreier_image_test, pth_root, FieldElement, FunctionField, MultiPoly};
use crate::search::{seeded_rng, CandidatePool};

pub type Rational = Ratio<i64>;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Value {
    Finite(Rational, Rational),
    Infinity,
}

impl Value {
    pub const ZERO: Value = Value::Finite(Ratio::new_raw(0, 1), Ratio::new_raw(0, 1));

    pub fn new(s: Rational, t: Rational) -> Value {
        Value::Finite(s, t)
    }

    pub fn from_ints(s: i64, t: i64) -> Value {
        Value::Finite(Ratio::from_integer(s), Ratio::from_integer(t))
    }

    /// `(s_num/s_den, t_num/t_den)`.
    pub fn frac(s_num: i64, s_den: i64, t_num: i64, t_den: i64) -> Value {
        Value::Finite(Ratio::new(s_num, s_den), Ratio::new(t_num, t_den))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Value::Finite(..))
    }

    pub fn components(&self) -> Option<(Rational, Rational)> {
        match *self {
            Value::Finite(s, t) => Some((s, t)),
            Value::Infinity => None,
        }
    }

    pub fn half(&self) -> Value {
        self.scale(Ratio::new(1, 2))
    }

    pub fn scale(&self, k: Rational) -> Value {
        match *self {
            Value::Finite(s, t) => Value::Finite(s * k, t * k),
            Value::Infinity => Value::Infinity,
        }
    }

    pub fn neg(&self) -> Option<Value> {
        match *self {
            Value::Finite(s, t) => Some(Value::Finite(-s, -t)),
            Value::Infinity => None,
        }
    }

    pub fn add(&self, other: &Value) -> Value {
        match (*self, *other) {
            (Value::Finite(a, b), Value::Finite(c, d)) => Value::Finite(a + c, b + d),
            _ => Value::Infinity,
        }
    }

    /// `None` when subtracting infinity.
    pub fn sub(&self, other: &Value) -> Option<Value> {
        Some(self.add(&other.neg()?))
    }

    pub fn in_gamma(&self) -> bool {
        matches!(self, Value::Finite(s, t) if s.is_integer() && t.is_integer())
    }

    pub fn in_two_gamma(&self) -> bool {
        self.half().in_gamma()
    }

    /// Class modulo `Z x Z`; `None` for infinity.
    pub fn class(&self) -> Option<ValueClass> {
        match *self {
            Value::Finite(s, t) => Some(ValueClass(s - s.floor(), t - t.floor())),
            Value::Infinity => None,
        }
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Infinity, Value::Infinity) => Ordering::Equal,
            (Value::Infinity, _) => Ordering::Greater,
            (_, Value::Infinity) => Ordering::Less,
            (Value::Finite(a, b), Value::Finite(c, d)) => b.cmp(d).then(a.cmp(c)),
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Finite(s, t) => write!(f, "({s},{t})"),
            Value::Infinity => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for Value {
    type Err = Error;

    fn from_str(text: &str) -> Result<Value> {
        let text = text.trim();
        if text == "inf" {
            return Ok(Value::Infinity);
        }
        let (s, t) = parse_pair(text)?;
        Ok(Value::Finite(s, t))
    }
}

fn parse_pair(text: &str) -> Result<(Rational, Rational)> {
    let bad = || Error::Syntax {
        position: 0,
        message: format!("expected a pair (s,t), got `{text}`"),
    };
    let inner = text
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(bad)?;
    let (s, t) = inner.split_once(',').ok_or_else(bad)?;
    let s: Rational = s.trim().parse().map_err(|_| bad())?;
    let t: Rational = t.trim().parse().map_err(|_| bad())?;
    Ok((s, t))
}

impl Serialize for Value {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// A class of the divisible hull modulo `Z x Z`, stored as fractional parts.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct ValueClass(pub Rational, pub Rational);

impl ValueClass {
    pub fn frac(s_num: i64, s_den: i64, t_num: i64, t_den: i64) -> ValueClass {
        ValueClass(Ratio::new(s_num, s_den), Ratio::new(t_num, t_den))
    }

    pub fn is_trivial(&self) -> bool {
        self.0 == Ratio::from_integer(0) && self.1 == Ratio::from_integer(0)
    }
}

impl fmt::Display for ValueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

impl std::str::FromStr for ValueClass {
    type Err = Error;

    fn from_str(text: &str) -> Result<ValueClass> {
        let (s, t) = parse_pair(text.trim())?;
        Ok(ValueClass(s, t))
    }
}

impl Serialize for ValueClass {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ValueClass {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Quadratic extension presented by its parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuadraticExtension {
    /// `F[g]` with `g^2 = gamma`.
    Sqrt(FieldElement),
    /// `F[g]` with `g^2 + g = gamma`.
    ArtinSchreier(FieldElement),
}

/// Values of the generators and their classes modulo `Z x Z`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RamificationReport {
    pub value_x: Value,
    pub value_y: Value,
    pub value_xy: Value,
    /// Classes of `v(x)`, `v(y)`, `v(xy)`; empty when a value is infinite.
    pub classes: Vec<ValueClass>,
    pub totally_ramified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuationContext {
    field: FunctionField,
    alpha: usize,
    beta: usize,
}

impl ValuationContext {
    pub fn new(field: &FunctionField, alpha: &str, beta: &str) -> Result<Self> {
        let find = |name: &str| {
            field
                .var_index(name)
                .ok_or_else(|| Error::UnknownVariable(name.to_string()))
        };
        let (a, b) = (find(alpha)?, find(beta)?);
        if a == b {
            return Err(Error::Precondition(
                "the two valuation variables must differ".into(),
            ));
        }
        Ok(ValuationContext {
            field: field.clone(),
            alpha: a,
            beta: b,
        })
    }

    /// Uses the variables named `a` (inner) and `b` (outer).
    pub fn standard(field: &FunctionField) -> Result<Self> {
        Self::new(field, "a", "b")
    }

    pub fn field(&self) -> &FunctionField {
        &self.field
    }

    pub fn alpha_name(&self) -> &str {
        &self.field.vars()[self.alpha]
    }

    pub fn beta_name(&self) -> &str {
        &self.field.vars()[self.beta]
    }

    fn poly_value(&self, p: &MultiPoly) -> Value {
        p.terms()
            .iter()
            .map(|(m, _)| {
                Value::from_ints(m.exponent(self.alpha) as i64, m.exponent(self.beta) as i64)
            })
            .min()
            .unwrap_or(Value::Infinity)
    }

    pub fn value_of(&self, f: &FieldElement) -> Result<Value> {
        if f.field() != &self.field {
            return Err(Error::FieldMismatch);
        }
        let allowed = (1u32 << self.alpha) | (1u32 << self.beta);
        let extra = f.var_mask() & !allowed;
        if extra != 0 {
            let name = &self.field.vars()[extra.trailing_zeros() as usize];
            return Err(Error::OutsideValuationField(name.clone()));
        }
        if f.is_zero() {
            return Ok(Value::Infinity);
        }
        let num = self.poly_value(f.numerator());
        let den = self.poly_value(f.denominator());
        Ok(num.sub(&den).expect("nonzero denominator"))
    }

    /// `v(u + v g) = v(N(u + v g)) / 2`.
    pub fn extend_to_quadratic(
        &self,
        ext: &QuadraticExtension,
        u: &FieldElement,
        v: &FieldElement,
    ) -> Result<Value> {
        if self.field.characteristic() != 2 {
            return Err(Error::WrongCharacteristic {
                expected: "2".into(),
                found: self.field.characteristic(),
            });
        }
        let norm = match ext {
            QuadraticExtension::Sqrt(g) => {
                if pth_root(g).is_some() {
                    return Err(Error::DegenerateExtension(format!("{g} is a square")));
                }
                &u.square() + &(&v.square() * g)
            }
            QuadraticExtension::ArtinSchreier(g) => {
                if artin_schreier_image_test(g).is_in_image() {
                    return Err(Error::DegenerateExtension(format!(
                        "{g} is of the form l^2 + l"
                    )));
                }
                &(&u.square() + &(u * v)) + &(&v.square() * g)
            }
        };
        Ok(self.value_of(&norm)?.half())
    }

    pub fn is_totally_ramified(&self, a: &SymbolAlgebra) -> Result<RamificationReport> {
        require_quaternion(a)?;
        let value_x = self.value_of(a.alpha())?.half();
        let value_y = self.value_of(a.beta())?.half();
        let value_xy = value_x.add(&value_y);
        let classes: Vec<ValueClass> = [value_x, value_y, value_xy]
            .iter()
            .filter_map(Value::class)
            .collect();
        let distinct = classes.len() == 3
            && classes[0] != classes[1]
            && classes[0] != classes[2]
            && classes[1] != classes[2];
        let totally_ramified = distinct
            && classes.iter().all(|c| !c.is_trivial())
            && value_x < Value::ZERO;
        Ok(RamificationReport {
            value_x,
            value_y,
            value_xy,
            classes,
            totally_ramified,
        })
    }

    fn require_totally_ramified(&self, a: &SymbolAlgebra) -> Result<RamificationReport> {
        let report = self.is_totally_ramified(a)?;
        if !report.totally_ramified {
            return Err(Error::NotTotallyRamified(format!(
                "{a}: v(x) = {}, v(y) = {}, v(xy) = {}",
                report.value_x, report.value_y, report.value_xy
            )));
        }
        Ok(report)
    }

    /// Minimum of the term values `v(c_ij) + v(x^i y^j)`.
    pub fn value_of_algebra_element(&self, t: &AlgebraElement, a: &SymbolAlgebra) -> Result<Value> {
        let report = self.require_totally_ramified(a)?;
        let basis = [Value::ZERO, report.value_y, report.value_x, report.value_xy];
        let mut best = Value::Infinity;
        for (c, bv) in t.coefficients().iter().zip(basis) {
            best = best.min(self.value_of(c)?.add(&bv));
        }
        Ok(best)
    }

    /// `v(Nrd(t)) / 2`, valid on any division algebra.
    pub fn value_via_norm(&self, t: &AlgebraElement, a: &SymbolAlgebra) -> Result<Value> {
        Ok(self.value_of(&a.reduced_norm(t)?)?.half())
    }

    /// `w(F[g : g^2 + g = gamma]) = -v(gamma)/2` for `v(gamma) < 0` outside `2 Gamma`.
    pub fn w_of_extension(&self, gamma: &FieldElement) -> Result<Value> {
        let v = self.value_of(gamma)?;
        if !(v < Value::ZERO) {
            return Err(Error::LemmaInapplicable(format!("v({gamma}) = {v} is not negative")));
        }
        if v.in_two_gamma() {
            return Err(Error::LemmaInapplicable(format!(
                "v({gamma}) = {v} lies in 2(Z x Z)"
            )));
        }
        Ok(v.half().neg().expect("finite"))
    }

    /// `min v(Trd t) - v(t)` is attained at `t = x`, giving `-v(x)`.
    pub fn w_of_algebra(&self, a: &SymbolAlgebra) -> Result<Value> {
        let report = self.require_totally_ramified(a)?;
        Ok(report.value_x.neg().expect("finite"))
    }

    /// Minimum of `v(Trd t) - v(t)` over `t = x` and `count - 1` random
    /// elements with nonzero trace.
    pub fn w_sample_bound(&self, a: &SymbolAlgebra, count: usize, seed: u64) -> Result<Value> {
        self.require_totally_ramified(a)?;
        if count == 0 {
            return Err(Error::Precondition("sample count must be positive".into()));
        }
        let mut best = self.trace_gap(&a.x(), a)?;
        let mask = (1u32 << self.alpha) | (1u32 << self.beta);
        let pool = CandidatePool::with_mask(&self.field, 2, mask);
        let mut rng = seeded_rng(seed);
        for _ in 1..count {
            let b = pool.random_nonzero(&mut rng);
            let b = b.checked_div(&pool.random_nonzero(&mut rng))?;
            let coords: Vec<FieldElement> = (0..3).map(|_| pool.random_ratio(&mut rng)).collect();
            let t = a.quaternion(&coords[0], &b, &coords[1], &coords[2]);
            best = best.min(self.trace_gap(&t, a)?);
        }
        Ok(best)
    }

    fn trace_gap(&self, t: &AlgebraElement, a: &SymbolAlgebra) -> Result<Value> {
        let trace = self.value_of(&a.reduced_trace(t)?)?;
        let value = self.value_of_algebra_element(t, a)?;
        trace
            .sub(&value)
            .ok_or_else(|| Error::Internal("zero element sampled".into()))
    }
}

fn require_quaternion(a: &SymbolAlgebra) -> Result<()> {
    if a.degree() == 2 {
        Ok(())
    } else {
        Err(Error::WrongCharacteristic {
            expected: "2".into(),
            found: a.degree() as u32,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> ValuationContext {
        ValuationContext::standard(&FunctionField::new(2, 1, &["a", "b"]).unwrap()).unwrap()
    }

    fn algebra(ctx: &ValuationContext, alpha: &str, beta: &str) -> SymbolAlgebra {
        let f = ctx.field();
        SymbolAlgebra::new(f.parse(alpha).unwrap(), f.parse(beta).unwrap()).unwrap()
    }

    #[test]
    fn right_lex_order() {
        assert!(Value::frac(-1, 2, -1, 2) < Value::frac(-1, 2, 0, 1));
        assert!(Value::frac(1, 2, 1, 2) < Value::frac(1, 1, 1, 2));
        assert!(Value::from_ints(5, 0) < Value::from_ints(0, 1));
        assert!(Value::from_ints(100, 100) < Value::Infinity);
        assert_eq!(Value::frac(-1, 2, 0, 1).to_string(), "(-1/2,0)");
        assert_eq!("(1,1/2)".parse::<Value>().unwrap(), Value::frac(1, 1, 1, 2));
    }

    #[test]
    fn values_of_functions() {
        let c = ctx();
        let f = c.field().clone();
        assert_eq!(c.value_of(&f.parse("a^-1").unwrap()).unwrap(), Value::from_ints(-1, 0));
        assert_eq!(c.value_of(&f.parse("1/(a*b)").unwrap()).unwrap(), Value::from_ints(-1, -1));
        assert_eq!(c.value_of(&f.parse("(a+b)/a^2").unwrap()).unwrap(), Value::from_ints(-1, 0));
        assert_eq!(c.value_of(&f.zero()).unwrap(), Value::Infinity);
    }

    #[test]
    fn quadratic_extensions() {
        let c = ctx();
        let f = c.field().clone();
        let (zero, one) = (f.zero(), f.one());
        let ext = QuadraticExtension::ArtinSchreier(f.parse("a^-1").unwrap());
        assert_eq!(c.extend_to_quadratic(&ext, &zero, &one).unwrap(), Value::frac(-1, 2, 0, 1));
        assert_eq!(c.extend_to_quadratic(&ext, &one, &zero).unwrap(), Value::ZERO);
        let ext = QuadraticExtension::Sqrt(f.parse("b").unwrap());
        assert_eq!(c.extend_to_quadratic(&ext, &zero, &one).unwrap(), Value::frac(0, 1, 1, 2));
        let bad = QuadraticExtension::Sqrt(f.parse("a^2").unwrap());
        assert!(matches!(
            c.extend_to_quadratic(&bad, &zero, &one),
            Err(Error::DegenerateExtension(_))
        ));
    }

    #[test]
    fn generator_values() {
        let c = ctx();
        let a = algebra(&c, "a^-1", "b");
        assert_eq!(c.value_of_algebra_element(&a.x(), &a).unwrap(), Value::frac(-1, 2, 0, 1));
        assert_eq!(c.value_of_algebra_element(&a.y(), &a).unwrap(), Value::frac(0, 1, 1, 2));
        assert_eq!(c.value_of_algebra_element(&a.xy(), &a).unwrap(), Value::frac(-1, 2, 1, 2));
        let t = a.add(&a.one(), &a.x());
        assert_eq!(c.value_of_algebra_element(&t, &a).unwrap(), c.value_via_norm(&t, &a).unwrap());
    }

    #[test]
    fn ramification_and_w() {
        let c = ctx();
        let report = c.is_totally_ramified(&algebra(&c, "a^-1", "b")).unwrap();
        assert!(report.totally_ramified);
        assert_eq!(
            report.classes,
            vec![
                ValueClass::frac(1, 2, 0, 1),
                ValueClass::frac(0, 1, 1, 2),
                ValueClass::frac(1, 2, 1, 2)
            ]
        );
        let d = algebra(&c, "a^-2*b^-1", "a");
        let report = c.is_totally_ramified(&d).unwrap();
        assert!(report.totally_ramified);
        assert_eq!(report.value_x, Value::frac(-1, 1, -1, 2));
        assert_eq!(report.value_y, Value::frac(1, 2, 0, 1));
        assert_eq!(report.value_xy, Value::frac(-1, 2, -1, 2));
        assert_eq!(c.w_of_algebra(&d).unwrap(), Value::frac(1, 1, 1, 2));
        assert!(!c.is_totally_ramified(&algebra(&c, "1", "b")).unwrap().totally_ramified);
    }

    #[test]
    fn w_of_extensions() {
        let c = ctx();
        let f = c.field().clone();
        assert_eq!(c.w_of_extension(&f.parse("a^-1").unwrap()).unwrap(), Value::frac(1, 2, 0, 1));
        assert_eq!(c.w_of_extension(&f.parse("1/(a*b)").unwrap()).unwrap(), Value::frac(1, 2, 1, 2));
        assert!(matches!(
            c.w_of_extension(&f.parse("a^-2").unwrap()),
            Err(Error::LemmaInapplicable(_))
        ));
    }

    #[test]
    fn sampled_w_bounds() {
        let c = ctx();
        let d = algebra(&c, "a^-2*b^-1", "a");
        assert_eq!(c.w_sample_bound(&d, 50, 3).unwrap(), Value::frac(1, 1, 1, 2));
        let a = algebra(&c, "a^-1", "b");
        assert_eq!(c.w_sample_bound(&a, 1, 0).unwrap(), Value::frac(1, 2, 0, 1));
    }
}
