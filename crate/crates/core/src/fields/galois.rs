//! Finite fields `F_{p^k}` for small `p` and `k`.
//!
//! Elements are encoded as integers whose base-`p` digits are the coordinates
//! in the power basis `1, w, w^2, ...` of the generator `w`, a root of a fixed
//! Conway polynomial. Multiplication goes through exp/log tables built once
//! per field.

use std::fmt;

use crate::error::{Error, Result};

pub const SUPPORTED_PRIMES: [u32; 3] = [2, 3, 5];
pub const MAX_EXTENSION_DEGREE: u32 = 8;

/// Largest order for which a full addition table is precomputed.
const ADD_TABLE_LIMIT: u32 = 1024;

/// Conway polynomials, coefficients listed from the constant term upwards,
/// leading 1 included.
fn conway_modulus(p: u32, k: u32) -> Option<&'static [u32]> {
    let table: &[&[u32]] = match p {
        2 => &[
            &[1, 1],
            &[1, 1, 1],
            &[1, 1, 0, 1],
            &[1, 1, 0, 0, 1],
            &[1, 0, 1, 0, 0, 1],
            &[1, 1, 0, 1, 1, 0, 1],
            &[1, 1, 0, 0, 0, 0, 0, 1],
            &[1, 0, 1, 1, 1, 0, 0, 0, 1],
        ],
        3 => &[
            &[1, 1],
            &[2, 2, 1],
            &[1, 2, 0, 1],
            &[2, 0, 0, 2, 1],
            &[1, 2, 0, 0, 0, 1],
            &[2, 2, 1, 0, 2, 0, 1],
            &[1, 0, 2, 0, 0, 0, 0, 1],
            &[2, 2, 2, 0, 1, 2, 0, 0, 1],
        ],
        5 => &[
            &[3, 1],
            &[2, 4, 1],
            &[3, 3, 0, 1],
            &[2, 4, 4, 0, 1],
            &[3, 4, 0, 0, 0, 1],
            &[2, 0, 1, 4, 1, 0, 1],
            &[3, 3, 0, 0, 0, 0, 0, 1],
            &[2, 4, 3, 0, 1, 0, 0, 0, 1],
        ],
        _ => return None,
    };
    table.get(k.checked_sub(1)? as usize).copied()
}

/// An element of some [`GaloisField`]; meaningless without its field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct GaloisScalar(pub(crate) u32);

impl GaloisScalar {
    pub const ZERO: GaloisScalar = GaloisScalar(0);
    pub const ONE: GaloisScalar = GaloisScalar(1);

    /// Integer encoding (base-`p` digits are power-basis coordinates).
    pub fn code(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Clone)]
pub struct GaloisField {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    neg: Vec<u32>,
    add_table: Option<Vec<u32>>,
    generator: u32,
}

impl fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p, self.k)
    }
}

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k
    }
}

impl Eq for GaloisField {}

impl GaloisField {
    pub fn new(p: u32, k: u32) -> Result<Self> {
        if !SUPPORTED_PRIMES.contains(&p) {
            return Err(Error::UnsupportedField(format!(
                "characteristic {p} (supported: 2, 3, 5)"
            )));
        }
        if k == 0 || k > MAX_EXTENSION_DEGREE {
            return Err(Error::UnsupportedField(format!(
                "extension degree {k} (supported: 1..=8)"
            )));
        }
        let modulus = conway_modulus(p, k)
            .ok_or_else(|| Error::UnsupportedField(format!("no modulus for {p}^{k}")))?
            .to_vec();
        if !is_irreducible(&modulus, p) {
            return Err(Error::UnsupportedField(format!(
                "stored modulus for {p}^{k} is reducible"
            )));
        }
        let q = p.pow(k);
        let mut field = GaloisField {
            p,
            k,
            q,
            modulus,
            exp: Vec::new(),
            log: Vec::new(),
            neg: Vec::new(),
            add_table: None,
            generator: 0,
        };
        field.generator = if k == 1 {
            (p - field.modulus[0]) % p
        } else {
            p
        };
        field.build_tables();
        Ok(field)
    }

    /// Parses `q` into `(p, k)` and builds the field.
    pub fn with_order(q: u32) -> Result<Self> {
        for &p in &SUPPORTED_PRIMES {
            let mut k = 1;
            let mut pk = p;
            while pk < q {
                pk *= p;
                k += 1;
            }
            if pk == q {
                return GaloisField::new(p, k);
            }
        }
        Err(Error::UnsupportedField(format!("order {q}")))
    }

    fn build_tables(&mut self) {
        let q = self.q as usize;
        self.neg = (0..self.q).map(|a| self.neg_digits(a)).collect();
        if self.q <= ADD_TABLE_LIMIT {
            let mut table = vec![0u32; q * q];
            for a in 0..self.q {
                for b in 0..self.q {
                    table[a as usize * q + b as usize] = self.add_digits(a, b);
                }
            }
            self.add_table = Some(table);
        }
        // w is used when primitive; otherwise the smallest primitive code
        let mut candidates = std::iter::once(self.generator).chain(1..self.q);
        loop {
            let g = candidates.next().expect("a finite field has a primitive element");
            if g == 0 {
                continue;
            }
            if let Some((exp, log)) = self.try_primitive(g) {
                self.exp = exp;
                self.log = log;
                return;
            }
        }
    }

    fn try_primitive(&self, g: u32) -> Option<(Vec<u32>, Vec<u32>)> {
        let order = (self.q - 1) as usize;
        let mut exp = Vec::with_capacity(order);
        let mut log = vec![u32::MAX; self.q as usize];
        let mut cur = 1u32;
        for i in 0..order {
            if log[cur as usize] != u32::MAX {
                return None;
            }
            log[cur as usize] = i as u32;
            exp.push(cur);
            cur = self.mul_slow(cur, g);
        }
        (cur == 1).then_some((exp, log))
    }

    pub(crate) fn digits(&self, mut a: u32) -> Vec<u32> {
        let mut out = vec![0; self.k as usize];
        for d in out.iter_mut() {
            *d = a % self.p;
            a /= self.p;
        }
        out
    }

    pub(crate) fn from_digits(&self, digits: &[u32]) -> u32 {
        digits.iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }

    fn add_digits(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        self.from_digits(&sum)
    }

    fn neg_digits(&self, a: u32) -> u32 {
        let d: Vec<u32> = self.digits(a).iter().map(|x| (self.p - x) % self.p).collect();
        self.from_digits(&d)
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let (da, db) = (self.digits(a), self.digits(b));
        let k = self.k as usize;
        let mut prod = vec![0u32; 2 * k];
        for (i, x) in da.iter().enumerate() {
            for (j, y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        for top in (k..2 * k).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            prod[top] = 0;
            for (i, m) in self.modulus[..k].iter().enumerate() {
                let idx = top - k + i;
                prod[idx] = (prod[idx] + (self.p - c) * m) % self.p;
            }
        }
        self.from_digits(&prod[..k])
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Coefficients of the defining modulus, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The distinguished generator `w` (root of the modulus).
    pub fn generator(&self) -> GaloisScalar {
        GaloisScalar(self.generator)
    }

    pub fn elements(&self) -> impl Iterator<Item = GaloisScalar> {
        (0..self.q).map(GaloisScalar)
    }

    pub fn from_int(&self, n: i64) -> GaloisScalar {
        GaloisScalar(n.rem_euclid(self.p as i64) as u32)
    }

    /// Decodes a scalar code; `None` when out of range.
    pub fn from_code(&self, code: u32) -> Option<GaloisScalar> {
        (code < self.q).then_some(GaloisScalar(code))
    }

    #[inline]
    pub fn add(&self, a: GaloisScalar, b: GaloisScalar) -> GaloisScalar {
        match &self.add_table {
            Some(t) => GaloisScalar(t[(a.0 * self.q + b.0) as usize]),
            None => GaloisScalar(self.add_digits(a.0, b.0)),
        }
    }

    #[inline]
    pub fn neg(&self, a: GaloisScalar) -> GaloisScalar {
        GaloisScalar(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: GaloisScalar, b: GaloisScalar) -> GaloisScalar {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: GaloisScalar, b: GaloisScalar) -> GaloisScalar {
        if a.0 == 0 || b.0 == 0 {
            return GaloisScalar::ZERO;
        }
        let n = self.q - 1;
        let e = (self.log[a.0 as usize] + self.log[b.0 as usize]) % n;
        GaloisScalar(self.exp[e as usize])
    }

    pub fn inv(&self, a: GaloisScalar) -> Option<GaloisScalar> {
        if a.0 == 0 {
            return None;
        }
        let n = self.q - 1;
        let e = (n - self.log[a.0 as usize]) % n;
        Some(GaloisScalar(self.exp[e as usize]))
    }

    pub fn pow(&self, a: GaloisScalar, e: i64) -> Option<GaloisScalar> {
        if a.0 == 0 {
            return match e.cmp(&0) {
                std::cmp::Ordering::Less => None,
                std::cmp::Ordering::Equal => Some(GaloisScalar::ONE),
                std::cmp::Ordering::Greater => Some(GaloisScalar::ZERO),
            };
        }
        let n = (self.q - 1) as i64;
        let l = self.log[a.0 as usize] as i64;
        let idx = (l * e.rem_euclid(n)).rem_euclid(n);
        Some(GaloisScalar(self.exp[idx as usize]))
    }

    pub fn frobenius(&self, a: GaloisScalar) -> GaloisScalar {
        self.pow(a, self.p as i64).expect("nonnegative exponent")
    }

    /// Inverse Frobenius: the unique `b` with `b^p = a`.
    pub fn pth_root(&self, a: GaloisScalar) -> GaloisScalar {
        self.pow(a, (self.q / self.p) as i64).expect("nonnegative exponent")
    }

    /// Absolute trace `F_{p^k} -> F_p`, returned as an element of the prime field.
    pub fn absolute_trace(&self, a: GaloisScalar) -> GaloisScalar {
        let mut acc = GaloisScalar::ZERO;
        let mut cur = a;
        for _ in 0..self.k {
            acc = self.add(acc, cur);
            cur = self.frobenius(cur);
        }
        acc
    }

    /// Canonical text: an integer for prime fields, a polynomial in `w` otherwise.
    pub fn format(&self, a: GaloisScalar) -> String {
        if self.k == 1 {
            return a.0.to_string();
        }
        let digits = self.digits(a.0);
        let mut parts = Vec::new();
        for (i, &d) in digits.iter().enumerate().rev() {
            if d == 0 {
                continue;
            }
            let power = match i {
                0 => String::new(),
                1 => "w".to_string(),
                _ => format!("w^{i}"),
            };
            parts.push(match (d, i) {
                (_, 0) => d.to_string(),
                (1, _) => power,
                _ => format!("{d}*{power}"),
            });
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }

    /// True when the printed form needs parentheses as a factor.
    pub fn is_compound(&self, a: GaloisScalar) -> bool {
        self.k > 1 && self.digits(a.0).iter().filter(|&&d| d != 0).count() > 1
    }
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let deg = modulus.len() - 1;
    if deg <= 1 {
        return deg == 1;
    }
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for code in 0..count {
            let mut divisor = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                divisor.push(c % p);
                c /= p;
            }
            divisor.push(1);
            if poly_rem_is_zero(modulus, &divisor, p) {
                return false;
            }
        }
    }
    true
}

fn poly_rem_is_zero(num: &[u32], monic_div: &[u32], p: u32) -> bool {
    let mut r = num.to_vec();
    let dd = monic_div.len() - 1;
    for top in (dd..r.len()).rev() {
        let c = r[top];
        if c == 0 {
            continue;
        }
        for (i, m) in monic_div.iter().enumerate() {
            let idx = top - dd + i;
            r[idx] = (r[idx] + (p - c) * m) % p;
        }
    }
    r.iter().all(|&c| c == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_supported_modulus_is_irreducible_and_fields_build() {
        for &p in &SUPPORTED_PRIMES {
            for k in 1..=4 {
                let f = GaloisField::new(p, k).unwrap();
                assert_eq!(f.order(), p.pow(k));
            }
        }
        // larger ones: only the irreducibility check, tables are big
        for &p in &SUPPORTED_PRIMES {
            for k in 5..=8 {
                assert!(is_irreducible(conway_modulus(p, k).unwrap(), p), "{p}^{k}");
            }
        }
    }

    #[test]
    fn f4_generator_satisfies_w2_eq_w_plus_1() {
        let f = GaloisField::new(2, 2).unwrap();
        let w = f.generator();
        assert_eq!(f.mul(w, w), f.add(w, GaloisScalar::ONE));
        assert_eq!(f.format(f.mul(w, w)), "w + 1");
    }

    #[test]
    fn fermat_and_inverses() {
        for q in [4u32, 8, 9, 25, 27] {
            let f = GaloisField::with_order(q).unwrap();
            for a in f.elements() {
                assert_eq!(f.pow(a, q as i64).unwrap(), a);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), GaloisScalar::ONE);
                }
                assert_eq!(f.frobenius(f.pth_root(a)), a);
            }
        }
    }

    #[test]
    fn rejects_unsupported() {
        assert!(GaloisField::new(7, 1).is_err());
        assert!(GaloisField::new(2, 9).is_err());
        assert!(GaloisField::with_order(6).is_err());
    }
}
