//! Sparse multivariate polynomials over a [`GaloisField`].
//!
//! Terms are kept sorted in descending degree-lexicographic order with no
//! zero coefficients, so structural equality is polynomial equality.

use std::cmp::Ordering;

use rustc_hash::FxHashMap;

use super::galois::{GaloisField, GaloisScalar};

/// Maximum number of indeterminates in a function field.
pub const MAX_VARS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub [u16; MAX_VARS]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; MAX_VARS]);

    pub fn var(i: usize) -> Monomial {
        let mut e = [0; MAX_VARS];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponent(&self, i: usize) -> u16 {
        self.0[i]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0 == [0; MAX_VARS]
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0) {
            *a += b;
        }
        Monomial(e)
    }

    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0) {
            *a = a.checked_sub(b)?;
        }
        Some(Monomial(e))
    }

    pub fn meet(&self, other: &Monomial) -> Monomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0) {
            *a = (*a).min(b);
        }
        Monomial(e)
    }

    pub fn pow(&self, n: u16) -> Monomial {
        Monomial(self.0.map(|e| e * n))
    }
}

impl Ord for Monomial {
    /// Degree-lexicographic, earlier variables more significant.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct MultiPoly {
    terms: Vec<(Monomial, GaloisScalar)>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(GaloisScalar::ONE)
    }

    pub fn constant(c: GaloisScalar) -> Self {
        Self::term(Monomial::ONE, c)
    }

    pub fn term(m: Monomial, c: GaloisScalar) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            MultiPoly { terms: vec![(m, c)] }
        }
    }

    pub fn var(i: usize) -> Self {
        Self::term(Monomial::var(i), GaloisScalar::ONE)
    }

    /// Builds from arbitrary terms, merging duplicates and dropping zeros.
    pub fn from_terms(mut terms: Vec<(Monomial, GaloisScalar)>, gf: &GaloisField) -> Self {
        if !terms.windows(2).all(|w| w[0].0 > w[1].0) {
            terms.sort_by(|a, b| b.0.cmp(&a.0));
        }
        let mut out: Vec<(Monomial, GaloisScalar)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 = gf.add(last.1, c),
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        MultiPoly { terms: out }
    }

    pub fn terms(&self) -> &[(Monomial, GaloisScalar)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.iter().all(|(m, _)| m.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0] == (Monomial::ONE, GaloisScalar::ONE)
    }

    pub fn as_constant(&self) -> Option<GaloisScalar> {
        match self.terms.as_slice() {
            [] => Some(GaloisScalar::ZERO),
            [(m, c)] if m.is_one() => Some(*c),
            _ => None,
        }
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn leading(&self) -> Option<(Monomial, GaloisScalar)> {
        self.terms.first().copied()
    }

    pub fn leading_coeff(&self) -> GaloisScalar {
        self.terms.first().map_or(GaloisScalar::ZERO, |t| t.1)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.first().map(|(m, _)| m.degree())
    }

    pub fn degree_in(&self, var: usize) -> Option<u16> {
        self.terms.iter().map(|(m, _)| m.exponent(var)).max()
    }

    /// Bitmask of variables with a positive exponent somewhere.
    pub fn var_mask(&self) -> u32 {
        let mut mask = 0;
        for (m, _) in &self.terms {
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    mask |= 1 << i;
                }
            }
        }
        mask
    }

    /// Componentwise minimum exponent over all terms.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        match it.next() {
            None => Monomial::ONE,
            Some((first, _)) => it.fold(*first, |acc, (m, _)| acc.meet(m)),
        }
    }

    pub fn add(&self, other: &MultiPoly, gf: &GaloisField) -> MultiPoly {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Less => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    let c = gf.add(a[i].1, b[j].1);
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        MultiPoly { terms: out }
    }

    pub fn neg(&self, gf: &GaloisField) -> MultiPoly {
        MultiPoly {
            terms: self.terms.iter().map(|&(m, c)| (m, gf.neg(c))).collect(),
        }
    }

    pub fn sub(&self, other: &MultiPoly, gf: &GaloisField) -> MultiPoly {
        self.add(&other.neg(gf), gf)
    }

    pub fn scale(&self, s: GaloisScalar, gf: &GaloisField) -> MultiPoly {
        if s.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly {
            terms: self.terms.iter().map(|&(m, c)| (m, gf.mul(c, s))).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, s: GaloisScalar, gf: &GaloisField) -> MultiPoly {
        if s.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|&(t, c)| (t.mul(m), gf.mul(c, s)))
                .collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly, gf: &GaloisField) -> MultiPoly {
        if self.is_zero() || other.is_zero() {
            return MultiPoly::zero();
        }
        if other.terms.len() == 1 {
            let (m, c) = other.terms[0];
            return self.mul_term(&m, c, gf);
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms[0];
            return other.mul_term(&m, c, gf);
        }
        let mut acc: FxHashMap<Monomial, GaloisScalar> = FxHashMap::default();
        acc.reserve(self.terms.len() + other.terms.len());
        for &(ma, ca) in &self.terms {
            for &(mb, cb) in &other.terms {
                let c = acc.entry(ma.mul(&mb)).or_insert(GaloisScalar::ZERO);
                *c = gf.add(*c, gf.mul(ca, cb));
            }
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        MultiPoly { terms }
    }

    pub fn pow(&self, mut e: u32, gf: &GaloisField) -> MultiPoly {
        let mut base = self.clone();
        let mut acc = MultiPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, gf);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, gf);
            }
        }
        acc
    }

    /// Exact division; `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &MultiPoly, gf: &GaloisField) -> Option<MultiPoly> {
        let (lm, lc) = divisor.leading()?;
        if divisor.terms.len() == 1 {
            let inv = gf.inv(lc)?;
            let mut terms = Vec::with_capacity(self.terms.len());
            for &(m, c) in &self.terms {
                terms.push((m.div(&lm)?, gf.mul(c, inv)));
            }
            return Some(MultiPoly { terms });
        }
        let lc_inv = gf.inv(lc)?;
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while let Some((rm, rc)) = rem.leading() {
            let qm = rm.div(&lm)?;
            let qc = gf.mul(rc, lc_inv);
            quot.push((qm, qc));
            rem = rem.sub(&divisor.mul_term(&qm, qc, gf), gf);
        }
        Some(MultiPoly::from_terms(quot, gf))
    }

    /// Scales so the leading coefficient is 1; returns the removed factor.
    pub fn monic(&self, gf: &GaloisField) -> (MultiPoly, GaloisScalar) {
        match self.leading() {
            None => (MultiPoly::zero(), GaloisScalar::ONE),
            Some((_, lc)) if lc == GaloisScalar::ONE => (self.clone(), lc),
            Some((_, lc)) => (self.scale(gf.inv(lc).expect("nonzero"), gf), lc),
        }
    }

    /// Coefficients with respect to `var`: `self = sum_i out[i] * var^i`.
    pub fn coeffs_in(&self, var: usize, gf: &GaloisField) -> Vec<MultiPoly> {
        let deg = self.degree_in(var).unwrap_or(0) as usize;
        let mut buckets: Vec<Vec<(Monomial, GaloisScalar)>> = vec![Vec::new(); deg + 1];
        for &(m, c) in &self.terms {
            let e = m.exponent(var) as usize;
            let mut rest = m;
            rest.0[var] = 0;
            buckets[e].push((rest, c));
        }
        buckets
            .into_iter()
            .map(|t| MultiPoly::from_terms(t, gf))
            .collect()
    }

    pub fn from_coeffs(var: usize, coeffs: &[MultiPoly], gf: &GaloisField) -> MultiPoly {
        let mut terms = Vec::new();
        for (e, c) in coeffs.iter().enumerate() {
            let shift = Monomial::var(var).pow(e as u16);
            for &(m, s) in &c.terms {
                terms.push((m.mul(&shift), s));
            }
        }
        MultiPoly::from_terms(terms, gf)
    }

    pub fn map_coeffs(&self, f: impl Fn(GaloisScalar) -> GaloisScalar, gf: &GaloisField) -> Self {
        MultiPoly::from_terms(self.terms.iter().map(|&(m, c)| (m, f(c))).collect(), gf)
    }

    /// `d` with `d^p = self`, when every exponent is divisible by `p`.
    pub fn pth_root(&self, gf: &GaloisField) -> Option<MultiPoly> {
        let p = gf.characteristic() as u16;
        let mut terms = Vec::with_capacity(self.terms.len());
        for &(m, c) in &self.terms {
            let mut e = [0u16; MAX_VARS];
            for (dst, src) in e.iter_mut().zip(m.0) {
                if src % p != 0 {
                    return None;
                }
                *dst = src / p;
            }
            terms.push((Monomial(e), gf.pth_root(c)));
        }
        // the Frobenius preserves deglex order, so terms stay sorted
        Some(MultiPoly { terms })
    }

    /// Value at a point of `F_q^n`; missing coordinates count as zero.
    pub fn eval(&self, point: &[GaloisScalar], gf: &GaloisField) -> GaloisScalar {
        let mut acc = GaloisScalar::ZERO;
        for (m, c) in &self.terms {
            let mut v = *c;
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    let x = point.get(i).copied().unwrap_or(GaloisScalar::ZERO);
                    v = gf.mul(v, gf.pow(x, e as i64).unwrap_or(GaloisScalar::ZERO));
                }
            }
            acc = gf.add(acc, v);
        }
        acc
    }
}
