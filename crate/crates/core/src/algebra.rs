//! Symbol p-algebras `[alpha, beta)_p` with generators `x`, `y` subject to
//! `x^p - x = alpha`, `y^p = beta`, `y x = (x + 1) y`.
//!
//! Elements are coordinate vectors on the basis `x^i y^j`. Reduced trace and
//! norm come from the matrix of left multiplication on `A` viewed as a right
//! vector space over the maximal subfield `L = F[x]` with basis `y^j`; using
//! `l(x) y^n = y^n l(x - n)` the entry in row `k + j` and column `j` is
//! `l_k(x - k - j)`, times `beta` when `k + j` wraps past `p`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fields::{artin_schreier_image_test, pth_root, wp, FieldElement, FunctionField};
use crate::search::{layered_search, CandidatePool};
use crate::valuation::{RamificationReport, ValuationContext};

#[derive(Clone)]
pub struct SymbolAlgebra(Arc<AlgebraInner>);

struct AlgebraInner {
    p: usize,
    alpha: FieldElement,
    beta: FieldElement,
    /// `table[a * p^2 + b]` lists `(target, coefficient)` for `e_a * e_b`.
    table: Vec<Vec<(usize, FieldElement)>>,
}

impl PartialEq for SymbolAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.alpha == other.0.alpha && self.0.beta == other.0.beta
    }
}

impl Eq for SymbolAlgebra {}

impl fmt::Debug for SymbolAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SymbolAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})_{}", self.0.alpha, self.0.beta, self.0.p)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AlgebraElement {
    p: usize,
    coeffs: Vec<FieldElement>,
}

/// Outcome of a bounded witness search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchResult<T> {
    Found(T),
    /// The search space was exhausted and it provably contains every solution.
    NotFound(String),
    Unknown(String),
}

impl<T> SearchResult<T> {
    pub fn found(&self) -> Option<&T> {
        match self {
            SearchResult::Found(t) => Some(t),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplitVerdict {
    /// Carries a nonzero element of reduced norm zero.
    Split(AlgebraElement),
    Division(RamificationReport),
    Unknown(String),
}

fn binomial_mod(n: usize, k: usize, p: usize) -> usize {
    // Lucas is unnecessary for n < 2p; plain Pascal mod p
    let mut row = vec![1usize];
    for _ in 0..n {
        let mut next = vec![1usize; row.len() + 1];
        for i in 1..row.len() {
            next[i] = (row[i - 1] + row[i]) % p;
        }
        row = next;
    }
    row.get(k).copied().unwrap_or(0)
}

impl SymbolAlgebra {
    /// The degree is the characteristic of the base field.
    pub fn new(alpha: FieldElement, beta: FieldElement) -> Result<Self> {
        if alpha.field() != beta.field() {
            return Err(Error::FieldMismatch);
        }
        if beta.is_zero() {
            return Err(Error::Precondition("beta must be nonzero".into()));
        }
        let p = alpha.field().characteristic() as usize;
        let table = build_table(p, &alpha, &beta);
        Ok(SymbolAlgebra(Arc::new(AlgebraInner {
            p,
            alpha,
            beta,
            table,
        })))
    }

    /// Parses `p:alpha:beta`; `p` must equal the field characteristic.
    pub fn parse_spec(spec: &str, field: &FunctionField) -> Result<Self> {
        let parts: Vec<&str> = spec.splitn(3, ':').collect();
        if parts.len() != 3 {
            return Err(Error::Syntax {
                position: spec.len(),
                message: "expected p:alpha:beta".into(),
            });
        }
        let p: u32 = parts[0].trim().parse().map_err(|_| Error::Syntax {
            position: 0,
            message: "degree must be an integer".into(),
        })?;
        if p != field.characteristic() {
            return Err(Error::WrongCharacteristic {
                expected: format!("degree equal to the characteristic {}", field.characteristic()),
                found: p,
            });
        }
        let offset = parts[0].len() + 1;
        let alpha = field.parse(parts[1]).map_err(|e| shift_position(e, offset))?;
        let beta = field
            .parse(parts[2])
            .map_err(|e| shift_position(e, offset + parts[1].len() + 1))?;
        Self::new(alpha, beta)
    }

    pub fn degree(&self) -> usize {
        self.0.p
    }

    pub fn alpha(&self) -> &FieldElement {
        &self.0.alpha
    }

    pub fn beta(&self) -> &FieldElement {
        &self.0.beta
    }

    pub fn field(&self) -> &FunctionField {
        self.0.alpha.field()
    }

    /// `p:alpha:beta`, the inverse of [`SymbolAlgebra::parse_spec`].
    pub fn spec(&self) -> String {
        format!("{}:{}:{}", self.0.p, self.0.alpha, self.0.beta)
    }

    pub fn dimension(&self) -> usize {
        self.0.p * self.0.p
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement {
            p: self.0.p,
            coeffs: vec![self.field().zero(); self.dimension()],
        }
    }

    pub fn scalar(&self, c: &FieldElement) -> AlgebraElement {
        let mut e = self.zero();
        e.coeffs[0] = c.clone();
        e
    }

    pub fn one(&self) -> AlgebraElement {
        self.scalar(&self.field().one())
    }

    pub fn basis(&self, i: usize, j: usize) -> AlgebraElement {
        let mut e = self.zero();
        e.coeffs[i * self.0.p + j] = self.field().one();
        e
    }

    pub fn x(&self) -> AlgebraElement {
        self.basis(1, 0)
    }

    pub fn y(&self) -> AlgebraElement {
        self.basis(0, 1)
    }

    pub fn xy(&self) -> AlgebraElement {
        self.basis(1, 1)
    }

    /// `a + b x + c y + d xy` in a quaternion algebra.
    pub fn quaternion(
        &self,
        a: &FieldElement,
        b: &FieldElement,
        c: &FieldElement,
        d: &FieldElement,
    ) -> AlgebraElement {
        assert_eq!(self.0.p, 2, "quaternion coordinates need p = 2");
        AlgebraElement {
            p: 2,
            coeffs: vec![a.clone(), c.clone(), b.clone(), d.clone()],
        }
    }

    /// Element from coefficients indexed `[i][j]` on `x^i y^j`.
    pub fn element(&self, coeffs: Vec<Vec<FieldElement>>) -> Result<AlgebraElement> {
        let p = self.0.p;
        if coeffs.len() != p || coeffs.iter().any(|row| row.len() != p) {
            return Err(Error::LengthMismatch {
                expected: p * p,
                found: coeffs.iter().map(Vec::len).sum(),
            });
        }
        let flat: Vec<FieldElement> = coeffs.into_iter().flatten().collect();
        if flat.iter().any(|c| c.field() != self.field()) {
            return Err(Error::FieldMismatch);
        }
        Ok(AlgebraElement { p, coeffs: flat })
    }

    /// Rebuilds an element from `(basis name, coefficient)` pairs as produced
    /// by [`AlgebraElement::terms`].
    pub fn element_from_terms(&self, terms: &[(String, String)]) -> Result<AlgebraElement> {
        let mut e = self.zero();
        let p = self.0.p;
        for (basis, coeff) in terms {
            let idx = (0..p * p)
                .find(|&k| basis_name(k / p, k % p) == *basis)
                .ok_or_else(|| Error::Certificate(format!("unknown basis element `{basis}`")))?;
            let value = self.field().parse(coeff)?;
            e.coeffs[idx] = &e.coeffs[idx] + &value;
        }
        Ok(e)
    }

    pub fn add(&self, s: &AlgebraElement, t: &AlgebraElement) -> AlgebraElement {
        AlgebraElement {
            p: self.0.p,
            coeffs: s.coeffs.iter().zip(&t.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, s: &AlgebraElement, t: &AlgebraElement) -> AlgebraElement {
        AlgebraElement {
            p: self.0.p,
            coeffs: s.coeffs.iter().zip(&t.coeffs).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: &FieldElement, t: &AlgebraElement) -> AlgebraElement {
        AlgebraElement {
            p: self.0.p,
            coeffs: t.coeffs.iter().map(|a| c * a).collect(),
        }
    }

    pub fn multiply(&self, s: &AlgebraElement, t: &AlgebraElement) -> AlgebraElement {
        let n = self.dimension();
        let mut out = self.zero();
        for (a, sa) in s.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (b, tb) in t.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                let prod = sa * tb;
                for (target, coef) in &self.0.table[a * n + b] {
                    let term = match coef.as_scalar() {
                        Some(s) => prod.scale(s),
                        None => &prod * coef,
                    };
                    out.coeffs[*target] = &out.coeffs[*target] + &term;
                }
            }
        }
        out
    }

    pub fn pow(&self, t: &AlgebraElement, mut e: u32) -> AlgebraElement {
        let mut base = t.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.multiply(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.multiply(&base, &base);
            }
        }
        acc
    }

    /// `t^p - t`.
    pub fn artin_schreier(&self, t: &AlgebraElement) -> AlgebraElement {
        self.sub(&self.pow(t, self.0.p as u32), t)
    }

    pub fn reduced_trace(&self, t: &AlgebraElement) -> Result<FieldElement> {
        if self.0.p == 2 {
            return Ok(t.coeffs[2].clone());
        }
        self.reduced_trace_matrix(t)
    }

    pub fn reduced_norm(&self, t: &AlgebraElement) -> Result<FieldElement> {
        if self.0.p == 2 {
            let [a, c, b, d] = [&t.coeffs[0], &t.coeffs[1], &t.coeffs[2], &t.coeffs[3]];
            return Ok(quaternion_norm(a, b, c, d, &self.0.alpha, &self.0.beta));
        }
        self.reduced_norm_matrix(t)
    }

    /// Trace of the left-multiplication matrix over the maximal subfield.
    pub fn reduced_trace_matrix(&self, t: &AlgebraElement) -> Result<FieldElement> {
        let m = self.subfield_matrix(t);
        let ring = self.subfield();
        let mut acc = ring.zero();
        for (k, row) in m.iter().enumerate() {
            acc = ring.add(&acc, &row[k]);
        }
        ring.to_base(&acc)
    }

    /// Determinant of the left-multiplication matrix over the maximal subfield.
    pub fn reduced_norm_matrix(&self, t: &AlgebraElement) -> Result<FieldElement> {
        let m = self.subfield_matrix(t);
        let ring = self.subfield();
        let det = ring.determinant(&m);
        ring.to_base(&det)
    }

    /// Checks `t^2 + Trd(t) t + Nrd(t) = 0` in a quaternion algebra.
    pub fn char_poly_check(&self, t: &AlgebraElement) -> Result<bool> {
        if self.0.p != 2 {
            return Err(Error::WrongCharacteristic {
                expected: "2".into(),
                found: self.0.p as u32,
            });
        }
        let trd = self.reduced_trace(t)?;
        let nrd = self.reduced_norm(t)?;
        let lhs = self.add(
            &self.add(&self.multiply(t, t), &self.scale(&trd, t)),
            &self.scalar(&nrd),
        );
        Ok(lhs.is_zero())
    }

    /// Searches `t = x + a + m y` with `m` in `F[x]` and `t^p - t = theta`.
    ///
    /// Such `t` satisfies `t^p - t = alpha + wp(a) + N(m) beta`. For `p = 2`
    /// every solution has this shape, so exhausting a finite base field is
    /// decisive.
    pub fn find_artin_schreier_element(
        &self,
        theta: &FieldElement,
        budget: u64,
        cap: u32,
    ) -> Result<SearchResult<AlgebraElement>> {
        if artin_schreier_image_test(theta).is_in_image() {
            return Err(Error::DegenerateExtension(format!(
                "{theta} lies in the image of l -> l^p - l"
            )));
        }
        let p = self.0.p;
        let target = theta - &self.0.alpha;
        let pool = CandidatePool::new(self.field(), cap);
        let (hit, stats) = layered_search(p + 1, pool.size(), budget, |tuple| {
            let a = pool.get(tuple[0]);
            let m: Vec<FieldElement> = tuple[1..].iter().map(|&i| pool.get(i)).collect();
            let norm = self.subfield_norm(&m);
            &wp(&a) + &(&norm * &self.0.beta) == target
        });
        let Some(tuple) = hit else {
            return Ok(self.exhausted_outcome(stats.exhausted, p == 2));
        };
        let mut t = self.x();
        t.coeffs[0] = pool.get(tuple[0]);
        for (i, &idx) in tuple[1..].iter().enumerate() {
            t.coeffs[i * p + 1] = &t.coeffs[i * p + 1] + &pool.get(idx);
        }
        if self.artin_schreier(&t) != self.scalar(theta) {
            return Err(Error::Internal(format!(
                "witness {t} fails t^p - t = {theta}"
            )));
        }
        Ok(SearchResult::Found(t))
    }

    /// Searches a trace-zero `t = a + c y + d xy` with `t^2 = mu`.
    pub fn find_square_root_element(
        &self,
        mu: &FieldElement,
        budget: u64,
        cap: u32,
    ) -> Result<SearchResult<AlgebraElement>> {
        self.require_quaternion()?;
        if pth_root(mu).is_some() {
            return Err(Error::DegenerateExtension(format!("{mu} is a square")));
        }
        let pool = CandidatePool::new(self.field(), cap);
        let zero = self.field().zero();
        let (hit, stats) = layered_search(3, pool.size(), budget, |tuple| {
            let (a, c, d) = (pool.get(tuple[0]), pool.get(tuple[1]), pool.get(tuple[2]));
            quaternion_norm(&a, &zero, &c, &d, &self.0.alpha, &self.0.beta) == *mu
        });
        let Some(tuple) = hit else {
            // t^2 in F with t outside F forces Trd(t) = 0
            return Ok(self.exhausted_outcome(stats.exhausted, true));
        };
        let t = self.quaternion(&pool.get(tuple[0]), &zero, &pool.get(tuple[1]), &pool.get(tuple[2]));
        if self.multiply(&t, &t) != self.scalar(mu) {
            return Err(Error::Internal(format!("witness {t} fails t^2 = {mu}")));
        }
        Ok(SearchResult::Found(t))
    }

    /// Splitting decision: a valuation certificate for division, or a
    /// nonzero element of reduced norm zero.
    pub fn is_split(
        &self,
        budget: u64,
        cap: u32,
        ctx: Option<&ValuationContext>,
    ) -> Result<SplitVerdict> {
        if let (Some(ctx), 2) = (ctx, self.0.p) {
            if let Ok(report) = ctx.is_totally_ramified(self) {
                if report.totally_ramified {
                    return Ok(SplitVerdict::Division(report));
                }
            }
        }
        let pool = CandidatePool::new(self.field(), cap);
        let n = self.dimension();
        let mut failure = None;
        let (hit, stats) = layered_search(n, pool.size(), budget, |tuple| {
            if tuple.iter().all(|&i| i == 0) {
                return false;
            }
            let t = self.from_indices(&pool, tuple);
            match self.reduced_norm(&t) {
                Ok(nrd) => nrd.is_zero(),
                Err(e) => {
                    failure = Some(e);
                    true
                }
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        match hit {
            Some(tuple) => Ok(SplitVerdict::Split(self.from_indices(&pool, &tuple))),
            None => Ok(SplitVerdict::Unknown(format!(
                "no zero of the reduced norm among {} candidates{}",
                stats.examined,
                if stats.exhausted { " (degree cap exhausted)" } else { "" }
            ))),
        }
    }

    /// Checks that a claimed split witness is a nonzero zero divisor.
    pub fn verify_split_witness(&self, t: &AlgebraElement) -> Result<bool> {
        Ok(!t.is_zero() && self.reduced_norm(t)?.is_zero())
    }

    fn from_indices(&self, pool: &CandidatePool, tuple: &[u64]) -> AlgebraElement {
        let mut t = self.zero();
        // quaternion tuples are ordered (a, b, c, d)
        let order: Vec<usize> = if self.0.p == 2 {
            vec![0, 2, 1, 3]
        } else {
            (0..self.dimension()).collect()
        };
        for (slot, &idx) in order.iter().zip(tuple) {
            t.coeffs[*slot] = pool.get(idx);
        }
        t
    }

    fn exhausted_outcome<T>(&self, exhausted: bool, complete_family: bool) -> SearchResult<T> {
        if exhausted && complete_family && self.field().vars().is_empty() {
            SearchResult::NotFound("exhaustive search over the finite base field".into())
        } else if exhausted {
            SearchResult::Unknown("degree-capped candidates exhausted".into())
        } else {
            SearchResult::Unknown("budget exhausted".into())
        }
    }

    fn require_quaternion(&self) -> Result<()> {
        if self.0.p == 2 {
            Ok(())
        } else {
            Err(Error::WrongCharacteristic {
                expected: "2".into(),
                found: self.0.p as u32,
            })
        }
    }

    /// Norm from `L = F[x]` to `F` of `sum m_i x^i`.
    pub fn subfield_norm(&self, m: &[FieldElement]) -> FieldElement {
        if self.0.p == 2 {
            let z = self.field().zero();
            return quaternion_norm(&m[0], &m[1], &z, &z, &self.0.alpha, &self.0.beta);
        }
        let mut t = self.zero();
        for (i, c) in m.iter().enumerate() {
            t.coeffs[i * self.0.p] = c.clone();
        }
        self.reduced_norm_matrix(&t)
            .expect("norm of a subfield element lies in the base field")
    }

    fn subfield(&self) -> Subfield<'_> {
        Subfield {
            p: self.0.p,
            alpha: &self.0.alpha,
        }
    }

    fn subfield_matrix(&self, t: &AlgebraElement) -> Vec<Vec<Vec<FieldElement>>> {
        let p = self.0.p;
        let ring = self.subfield();
        let mut m = vec![vec![ring.zero(); p]; p];
        for k in 0..p {
            let lk: Vec<FieldElement> = (0..p).map(|i| t.coeffs[i * p + k].clone()).collect();
            if lk.iter().all(FieldElement::is_zero) {
                continue;
            }
            for j in 0..p {
                let mut entry = ring.shift(&lk, (k + j) % p);
                if k + j >= p {
                    entry = entry.iter().map(|c| c * &self.0.beta).collect();
                }
                m[(k + j) % p][j] = entry;
            }
        }
        m
    }
}

fn shift_position(e: Error, offset: usize) -> Error {
    match e {
        Error::Syntax { position, message } => Error::Syntax {
            position: position + offset,
            message,
        },
        other => other,
    }
}

/// `a^2 + ab + b^2 g + (c^2 + cd + d^2 g) h`.
pub fn quaternion_norm(
    a: &FieldElement,
    b: &FieldElement,
    c: &FieldElement,
    d: &FieldElement,
    gamma: &FieldElement,
    delta: &FieldElement,
) -> FieldElement {
    let first = &(&a.square() + &(a * b)) + &(&b.square() * gamma);
    let second = &(&c.square() + &(c * d)) + &(&d.square() * gamma);
    &first + &(&second * delta)
}

fn build_table(p: usize, alpha: &FieldElement, beta: &FieldElement) -> Vec<Vec<(usize, FieldElement)>> {
    let field = alpha.field();
    // x^n reduced to degree < p for n <= 2p - 2
    let mut xpow: Vec<Vec<FieldElement>> = Vec::with_capacity(2 * p - 1);
    for n in 0..2 * p - 1 {
        if n < p {
            let mut v = vec![field.zero(); p];
            v[n] = field.one();
            xpow.push(v);
        } else {
            let prev = &xpow[n - 1];
            let top = prev[p - 1].clone();
            let mut v = vec![field.zero(); p];
            v[1..p].clone_from_slice(&prev[..(p - 1)]);
            // x^p = x + alpha
            v[1] = &v[1] + &top;
            v[0] = &v[0] + &(&top * alpha);
            xpow.push(v);
        }
    }
    let n = p * p;
    let mut table = Vec::with_capacity(n * n);
    for a in 0..n {
        let (i, j) = (a / p, a % p);
        for b in 0..n {
            let (k, l) = (b / p, b % p);
            // x^i y^j x^k y^l = x^i (x + j)^k y^(j + l)
            let mut acc = vec![field.zero(); p];
            for m in 0..=k {
                let c = binomial_mod(k, m, p) * (j.pow((k - m) as u32) % p) % p;
                if c == 0 {
                    continue;
                }
                let c = field.from_int(c as i64);
                for (slot, v) in acc.iter_mut().zip(&xpow[i + m]) {
                    *slot = &*slot + &(&c * v);
                }
            }
            let jj = j + l;
            let wrap = jj >= p;
            let entries = acc
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(e, c)| (e * p + jj % p, if wrap { &c * beta } else { c }))
                .collect();
            table.push(entries);
        }
    }
    table
}

/// Arithmetic in `F[x]/(x^p - x - alpha)` on coefficient vectors.
struct Subfield<'a> {
    p: usize,
    alpha: &'a FieldElement,
}

impl Subfield<'_> {
    fn zero(&self) -> Vec<FieldElement> {
        vec![self.alpha.field().zero(); self.p]
    }

    fn one(&self) -> Vec<FieldElement> {
        let mut v = self.zero();
        v[0] = self.alpha.field().one();
        v
    }

    fn add(&self, a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
        a.iter().zip(b).map(|(s, t)| s + t).collect()
    }

    fn mul(&self, a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
        let p = self.p;
        let field = self.alpha.field();
        let mut full = vec![field.zero(); 2 * p - 1];
        for (i, ai) in a.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (j, bj) in b.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                full[i + j] = &full[i + j] + &(ai * bj);
            }
        }
        for n in (p..2 * p - 1).rev() {
            let top = std::mem::replace(&mut full[n], field.zero());
            if top.is_zero() {
                continue;
            }
            // x^n = x^(n-p+1) + alpha x^(n-p)
            full[n - p + 1] = &full[n - p + 1] + &top;
            full[n - p] = &full[n - p] + &(&top * self.alpha);
        }
        full.truncate(p);
        full
    }

    /// `l(x - n)`.
    fn shift(&self, l: &[FieldElement], n: usize) -> Vec<FieldElement> {
        let p = self.p;
        let field = self.alpha.field();
        let neg = (p - n % p) % p;
        let mut out = self.zero();
        for (i, c) in l.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (m, slot) in out.iter_mut().enumerate().take(i + 1) {
                let k = binomial_mod(i, m, p) * (neg.pow((i - m) as u32) % p) % p;
                if k != 0 {
                    *slot = &*slot + &c.scale(field.gf().from_int(k as i64));
                }
            }
        }
        out
    }

    /// Laplace expansion along rows, memoized on the set of used columns.
    fn determinant(&self, m: &[Vec<Vec<FieldElement>>]) -> Vec<FieldElement> {
        let mut memo: HashMap<u32, Vec<FieldElement>> = HashMap::new();
        self.minor(m, 0, 0, &mut memo)
    }

    fn minor(
        &self,
        m: &[Vec<Vec<FieldElement>>],
        row: usize,
        used: u32,
        memo: &mut HashMap<u32, Vec<FieldElement>>,
    ) -> Vec<FieldElement> {
        if row == m.len() {
            return self.one();
        }
        if let Some(v) = memo.get(&used) {
            return v.clone();
        }
        let mut acc = self.zero();
        let mut free_before = 0;
        for col in 0..m.len() {
            if used & (1 << col) != 0 {
                continue;
            }
            let entry = &m[row][col];
            if entry.iter().any(|c| !c.is_zero()) {
                let sub = self.minor(m, row + 1, used | (1 << col), memo);
                let mut term = self.mul(entry, &sub);
                if free_before % 2 == 1 {
                    term = term.into_iter().map(|c| -c).collect();
                }
                acc = self.add(&acc, &term);
            }
            free_before += 1;
        }
        memo.insert(used, acc.clone());
        acc
    }

    fn to_base(&self, v: &[FieldElement]) -> Result<FieldElement> {
        if v[1..].iter().any(|c| !c.is_zero()) {
            return Err(Error::Internal(
                "left-multiplication invariant left the base field".into(),
            ));
        }
        Ok(v[0].clone())
    }
}

pub(crate) fn basis_name(i: usize, j: usize) -> String {
    let part = |v: &str, e: usize| match e {
        0 => None,
        1 => Some(v.to_string()),
        _ => Some(format!("{v}^{e}")),
    };
    let parts: Vec<String> = [part("x", i), part("y", j)].into_iter().flatten().collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

impl AlgebraElement {
    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn coeff(&self, i: usize, j: usize) -> &FieldElement {
        &self.coeffs[i * self.p + j]
    }

    pub fn coefficients(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(FieldElement::is_zero)
    }

    /// Nonzero `(basis name, coefficient)` pairs, `y`-degree major.
    pub fn terms(&self) -> Vec<(String, String)> {
        let p = self.p;
        let mut out = Vec::new();
        for j in 0..p {
            for i in 0..p {
                let c = self.coeff(i, j);
                if !c.is_zero() {
                    out.push((basis_name(i, j), c.to_string()));
                }
            }
        }
        out
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        let rendered: Vec<String> = terms
            .into_iter()
            .map(|(basis, coeff)| {
                if basis == "1" {
                    coeff
                } else if coeff == "1" {
                    basis
                } else if coeff.contains([' ', '/', '-']) {
                    format!("({coeff})*{basis}")
                } else {
                    format!("{coeff}*{basis}")
                }
            })
            .collect();
        write!(f, "{}", rendered.join(" + "))
    }
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn generic() -> SymbolAlgebra {
        let f = FunctionField::new(2, 1, &["g", "h"]).unwrap();
        SymbolAlgebra::new(f.parse("g").unwrap(), f.parse("h").unwrap()).unwrap()
    }

    #[test]
    fn relations_in_quaternions() {
        let a = generic();
        let f = a.field().clone();
        let g = f.parse("g").unwrap();
        let h = f.parse("h").unwrap();
        let (x, y) = (a.x(), a.y());
        assert_eq!(a.multiply(&y, &x), a.add(&a.xy(), &y));
        assert_eq!(a.multiply(&x, &x), a.add(&x, &a.scalar(&g)));
        assert_eq!(a.multiply(&y, &y), a.scalar(&h));
        let s = a.add(&x, &y);
        let expected = a.add(&a.add(&x, &y), &a.scalar(&(&g + &h)));
        assert_eq!(a.multiply(&s, &s), expected);
    }

    #[test]
    fn norms_of_generators() {
        let a = generic();
        let f = a.field().clone();
        assert_eq!(a.reduced_norm(&a.x()).unwrap(), f.parse("g").unwrap());
        assert_eq!(a.reduced_norm(&a.y()).unwrap(), f.parse("h").unwrap());
        assert!(a.reduced_norm(&a.one()).unwrap().is_one());
        assert_eq!(a.reduced_norm_matrix(&a.x()).unwrap(), f.parse("g").unwrap());
        assert_eq!(a.reduced_trace_matrix(&a.xy()).unwrap(), f.zero());
        assert!(a.reduced_trace_matrix(&a.x()).unwrap().is_one());
    }

    #[test]
    fn trace_of_x_vanishes_for_p3() {
        let f = FunctionField::new(3, 1, &["a", "b"]).unwrap();
        let a = SymbolAlgebra::new(f.parse("a").unwrap(), f.parse("b").unwrap()).unwrap();
        assert!(a.reduced_trace(&a.x()).unwrap().is_zero());
        assert!(a.reduced_trace(&a.one()).unwrap().is_zero());
        // x^3 - x = a means Nrd(x) = a (constant term of the minimal polynomial up to sign)
        assert_eq!(a.reduced_norm(&a.x()).unwrap(), f.parse("a").unwrap());
        assert_eq!(a.reduced_norm(&a.y()).unwrap(), f.parse("b").unwrap());
        let x = a.x();
        assert_eq!(a.artin_schreier(&x), a.scalar(&f.parse("a").unwrap()));
        let y = a.y();
        assert_eq!(a.multiply(&y, &x), a.multiply(&a.add(&x, &a.one()), &y));
    }

    #[test]
    fn artin_schreier_witnesses() {
        let a = generic();
        let f = a.field().clone();
        let g = f.parse("g").unwrap();
        let t = a.find_artin_schreier_element(&g, 1000, 1).unwrap();
        assert_eq!(t, SearchResult::Found(a.x()));
        let theta = f.parse("g + h").unwrap();
        let t = a.find_artin_schreier_element(&theta, 1000, 1).unwrap();
        assert_eq!(t, SearchResult::Found(a.add(&a.x(), &a.y())));
    }

    #[test]
    fn square_root_witnesses() {
        let a = generic();
        let f = a.field().clone();
        let t = a.find_square_root_element(&f.parse("h").unwrap(), 1000, 1).unwrap();
        assert_eq!(t, SearchResult::Found(a.y()));
        let gh = f.parse("g*h").unwrap();
        let t = a.find_square_root_element(&gh, 1000, 1).unwrap();
        assert_eq!(t, SearchResult::Found(a.xy()));
        let s = a.add(&a.y(), &a.xy());
        assert_eq!(a.multiply(&s, &s), a.scalar(&gh));
    }

    #[test]
    fn printing() {
        let f = FunctionField::new(2, 1, &["a", "b"]).unwrap();
        let a = SymbolAlgebra::new(f.parse("a^-1").unwrap(), f.parse("b").unwrap()).unwrap();
        let t = a.add(&a.scale(&f.parse("a^-1").unwrap(), &a.x()), &a.y());
        assert_eq!(t.to_string(), "(1/a)*x + y");
        assert_eq!(a.to_string(), "[1/a, b)_2");
        let back = a.element_from_terms(&t.terms()).unwrap();
        assert_eq!(back, t);
    }
}
