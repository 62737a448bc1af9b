//! Rational function fields `F_q(v_1, ..., v_n)` and their elements.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::galois::{GaloisField, GaloisScalar};
use super::gcd::gcd;
use super::poly::{Monomial, MultiPoly, MAX_VARS};
use crate::error::{Error, Result};

struct FieldInner {
    gf: GaloisField,
    vars: Vec<String>,
}

/// Descriptor of `F_{p^k}(vars)`; cheap to clone.
#[derive(Clone)]
pub struct FunctionField(Arc<FieldInner>);

impl PartialEq for FunctionField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.gf == other.0.gf && self.0.vars == other.0.vars)
    }
}

impl Eq for FunctionField {}

impl fmt::Debug for FunctionField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some('a'..='z'))
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit())
}

impl FunctionField {
    pub fn new(p: u32, k: u32, vars: &[&str]) -> Result<Self> {
        Self::from_galois(GaloisField::new(p, k)?, vars)
    }

    pub fn from_galois(gf: GaloisField, vars: &[&str]) -> Result<Self> {
        if vars.len() > MAX_VARS {
            return Err(Error::UnsupportedField(format!(
                "{} variables (at most {MAX_VARS})",
                vars.len()
            )));
        }
        for (i, v) in vars.iter().enumerate() {
            if !valid_identifier(v) || *v == "w" {
                return Err(Error::UnsupportedField(format!("bad variable name `{v}`")));
            }
            if vars[..i].contains(v) {
                return Err(Error::UnsupportedField(format!("duplicate variable `{v}`")));
            }
        }
        Ok(FunctionField(Arc::new(FieldInner {
            gf,
            vars: vars.iter().map(|s| s.to_string()).collect(),
        })))
    }

    /// Parses descriptors such as `F4(a,b)`, `F9(b)` or `F2`.
    pub fn parse_descriptor(text: &str) -> Result<Self> {
        let text = text.trim();
        let syntax = |message: &str| Error::Syntax {
            position: 0,
            message: format!("{message} in field descriptor `{text}`"),
        };
        let rest = text
            .strip_prefix('F')
            .ok_or_else(|| syntax("expected leading `F`"))?;
        let (order, vars) = match rest.find('(') {
            Some(open) => {
                let inner = rest[open + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| syntax("missing `)`"))?;
                let vars: Vec<&str> = inner
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .collect();
                (&rest[..open], vars)
            }
            None => (rest, Vec::new()),
        };
        let q: u32 = order.parse().map_err(|_| syntax("bad field order"))?;
        Self::from_galois(GaloisField::with_order(q)?, &vars)
    }

    pub fn descriptor(&self) -> String {
        let q = self.0.gf.order();
        if self.0.vars.is_empty() {
            format!("F{q}")
        } else {
            format!("F{q}({})", self.0.vars.join(","))
        }
    }

    pub fn gf(&self) -> &GaloisField {
        &self.0.gf
    }

    pub fn characteristic(&self) -> u32 {
        self.0.gf.characteristic()
    }

    pub fn vars(&self) -> &[String] {
        &self.0.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.0.vars.iter().position(|v| v == name)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::from_poly(self, MultiPoly::zero())
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::from_poly(self, MultiPoly::one())
    }

    pub fn scalar(&self, c: GaloisScalar) -> FieldElement {
        FieldElement::from_poly(self, MultiPoly::constant(c))
    }

    pub fn from_int(&self, n: i64) -> FieldElement {
        self.scalar(self.0.gf.from_int(n))
    }

    pub fn generator(&self) -> FieldElement {
        self.scalar(self.0.gf.generator())
    }

    pub fn var(&self, name: &str) -> Result<FieldElement> {
        let i = self
            .var_index(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        Ok(self.var_at(i))
    }

    pub fn var_at(&self, i: usize) -> FieldElement {
        FieldElement::from_poly(self, MultiPoly::var(i))
    }

    pub fn parse(&self, text: &str) -> Result<FieldElement> {
        super::parse::parse_element(text, self)
    }

    pub(crate) fn format_poly(&self, p: &MultiPoly) -> String {
        if p.is_zero() {
            return "0".to_string();
        }
        let gf = &self.0.gf;
        let parts: Vec<String> = p
            .terms()
            .iter()
            .map(|(m, c)| {
                let mono = self.format_monomial(m);
                if mono.is_empty() {
                    gf.format(*c)
                } else if *c == GaloisScalar::ONE {
                    mono
                } else if gf.is_compound(*c) {
                    format!("({})*{mono}", gf.format(*c))
                } else {
                    format!("{}*{mono}", gf.format(*c))
                }
            })
            .collect();
        parts.join(" + ")
    }

    fn format_monomial(&self, m: &Monomial) -> String {
        let mut factors = Vec::new();
        for (i, name) in self.0.vars.iter().enumerate() {
            match m.exponent(i) {
                0 => {}
                1 => factors.push(name.clone()),
                e => factors.push(format!("{name}^{e}")),
            }
        }
        factors.join("*")
    }
}

/// An element of a [`FunctionField`], kept as a reduced fraction with a
/// monic denominator.
#[derive(Clone)]
pub struct FieldElement {
    field: FunctionField,
    num: MultiPoly,
    den: MultiPoly,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.num == other.num && self.den == other.den
    }
}

impl Eq for FieldElement {}

impl std::hash::Hash for FieldElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl FieldElement {
    pub fn new(field: &FunctionField, num: MultiPoly, den: MultiPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduced(field, num, den))
    }

    pub fn from_poly(field: &FunctionField, num: MultiPoly) -> Self {
        FieldElement {
            field: field.clone(),
            num,
            den: MultiPoly::one(),
        }
    }

    fn reduced(field: &FunctionField, num: MultiPoly, den: MultiPoly) -> Self {
        let gf = field.gf();
        if num.is_zero() {
            return field.zero();
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = gcd(&num, &den, gf);
            if g.is_one() {
                (num, den)
            } else {
                (
                    num.div_exact(&g, gf).expect("gcd divides numerator"),
                    den.div_exact(&g, gf).expect("gcd divides denominator"),
                )
            }
        };
        Self::normalized(field, num, den)
    }

    /// Makes the denominator monic; `num / den` must already be reduced.
    fn normalized(field: &FunctionField, num: MultiPoly, den: MultiPoly) -> Self {
        let gf = field.gf();
        let lc = den.leading_coeff();
        let (num, den) = if lc == GaloisScalar::ONE {
            (num, den)
        } else {
            let inv = gf.inv(lc).expect("nonzero denominator");
            (num.scale(inv, gf), den.scale(inv, gf))
        };
        FieldElement {
            field: field.clone(),
            num,
            den,
        }
    }

    pub fn field(&self) -> &FunctionField {
        &self.field
    }

    pub fn numerator(&self) -> &MultiPoly {
        &self.num
    }

    pub fn denominator(&self) -> &MultiPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// The value when this element lies in `F_q`.
    pub fn as_scalar(&self) -> Option<GaloisScalar> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    fn check_field(&self, other: &FieldElement) {
        assert!(
            self.field == other.field,
            "mixing elements of {} and {}",
            self.field.descriptor(),
            other.field.descriptor()
        );
    }

    pub fn inv(&self) -> Option<FieldElement> {
        if self.is_zero() {
            return None;
        }
        let gf = self.field.gf();
        let lc = self.num.leading_coeff();
        let inv = gf.inv(lc).expect("nonzero");
        Some(FieldElement {
            field: self.field.clone(),
            num: self.den.scale(inv, gf),
            den: self.num.scale(inv, gf),
        })
    }

    pub fn checked_div(&self, other: &FieldElement) -> Result<FieldElement> {
        let inv = other.inv().ok_or(Error::DivisionByZero)?;
        Ok(self * &inv)
    }

    pub fn pow(&self, e: i64) -> Option<FieldElement> {
        let gf = self.field.gf();
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let e = e as u32;
        Some(FieldElement {
            field: self.field.clone(),
            num: self.num.pow(e, gf),
            den: self.den.pow(e, gf),
        })
    }

    pub fn square(&self) -> FieldElement {
        self * self
    }

    pub fn scale(&self, c: GaloisScalar) -> FieldElement {
        let gf = self.field.gf();
        if c.is_zero() {
            return self.field.zero();
        }
        FieldElement {
            field: self.field.clone(),
            num: self.num.scale(c, gf),
            den: self.den.clone(),
        }
    }

    /// Frobenius `x -> x^p`, computed coefficientwise.
    pub fn frobenius(&self) -> FieldElement {
        self.pow(self.field.characteristic() as i64)
            .expect("nonnegative power")
    }

    /// Bitmask of variables appearing in numerator or denominator.
    pub fn var_mask(&self) -> u32 {
        self.num.var_mask() | self.den.var_mask()
    }

    /// Largest total degree of numerator and denominator.
    pub fn height(&self) -> u32 {
        self.num
            .total_degree()
            .unwrap_or(0)
            .max(self.den.total_degree().unwrap_or(0))
    }
}

impl fmt::Display for FieldElement {
    /// Canonical form: `num` or `num/den`, parenthesized where needed to re-parse.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = self.field.format_poly(&self.num);
        if self.den.is_one() {
            return f.write_str(&num);
        }
        let den = self.field.format_poly(&self.den);
        let num_wrapped = if self.num.terms().len() > 1 || num.contains(" ") {
            format!("({num})")
        } else {
            num
        };
        let den_simple = self.den.is_monomial() && self.den.leading().unwrap().0.0.iter().filter(|&&e| e > 0).count() == 1;
        if den_simple {
            write!(f, "{num_wrapped}/{den}")
        } else {
            write!(f, "{num_wrapped}/({den})")
        }
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Add for &FieldElement {
    type Output = FieldElement;

    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.check_field(rhs);
        let field = &self.field;
        let gf = field.gf();
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        if self.den == rhs.den {
            let num = self.num.add(&rhs.num, gf);
            if self.den.is_one() {
                return FieldElement::from_poly(field, num);
            }
            return FieldElement::reduced(field, num, self.den.clone());
        }
        // Henrici: only g = gcd(b, d) can cancel against a d' + c b'
        let g = gcd(&self.den, &rhs.den, gf);
        if g.is_one() {
            let num = self
                .num
                .mul(&rhs.den, gf)
                .add(&rhs.num.mul(&self.den, gf), gf);
            if num.is_zero() {
                return field.zero();
            }
            return FieldElement::normalized(field, num, self.den.mul(&rhs.den, gf));
        }
        let b1 = self.den.div_exact(&g, gf).expect("gcd divides");
        let d1 = rhs.den.div_exact(&g, gf).expect("gcd divides");
        let num = self.num.mul(&d1, gf).add(&rhs.num.mul(&b1, gf), gf);
        if num.is_zero() {
            return field.zero();
        }
        let h = gcd(&num, &g, gf);
        let num = num.div_exact(&h, gf).expect("gcd divides");
        let den = b1.mul(&rhs.den.div_exact(&h, gf).expect("gcd divides"), gf);
        FieldElement::normalized(field, num, den)
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;

    fn neg(self) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            num: self.num.neg(self.field.gf()),
            den: self.den.clone(),
        }
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;

    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self + &(-rhs)
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;

    fn mul(self, rhs: &FieldElement) -> FieldElement {
        self.check_field(rhs);
        let field = &self.field;
        let gf = field.gf();
        if self.is_zero() || rhs.is_zero() {
            return field.zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return FieldElement::from_poly(field, self.num.mul(&rhs.num, gf));
        }
        // cross-cancel so the product comes out reduced
        let g1 = gcd(&self.num, &rhs.den, gf);
        let g2 = gcd(&rhs.num, &self.den, gf);
        let n1 = self.num.div_exact(&g1, gf).expect("gcd divides");
        let d2 = rhs.den.div_exact(&g1, gf).expect("gcd divides");
        let n2 = rhs.num.div_exact(&g2, gf).expect("gcd divides");
        let d1 = self.den.div_exact(&g2, gf).expect("gcd divides");
        let num = n1.mul(&n2, gf);
        let den = d1.mul(&d2, gf);
        let lc = den.leading_coeff();
        let inv = gf.inv(lc).expect("nonzero");
        FieldElement {
            field: field.clone(),
            num: num.scale(inv, gf),
            den: den.scale(inv, gf),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}
