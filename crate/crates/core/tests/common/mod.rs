#![allow(dead_code)]

use quatlink::algebra::{AlgebraElement, SymbolAlgebra};
use quatlink::fields::{FieldElement, FunctionField};
use quatlink::search::CandidatePool;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn field(desc: &str) -> FunctionField {
    FunctionField::parse_descriptor(desc).unwrap()
}

/// Coordinates are polynomials or ratios of polynomials of degree at most `cap`, each with probability one half.
pub fn mixed_element(a: &SymbolAlgebra, rng: &mut ChaCha8Rng, cap: u32) -> AlgebraElement {
    let pool = CandidatePool::new(a.field(), cap);
    let p = a.degree();
    let coeffs = (0..p)
        .map(|_| {
            (0..p)
                .map(|_| if rng.gen_bool(0.5) { pool.random(rng) } else { pool.random_ratio(rng) })
                .collect()
        })
        .collect();
    a.element(coeffs).unwrap()
}

/// Coordinates are polynomials of degree at most `cap`.
pub fn polynomial_element(a: &SymbolAlgebra, rng: &mut ChaCha8Rng, cap: u32) -> AlgebraElement {
    let pool = CandidatePool::new(a.field(), cap);
    let p = a.degree();
    let coeffs = (0..p).map(|_| (0..p).map(|_| pool.random(rng)).collect()).collect();
    a.element(coeffs).unwrap()
}

/// Coordinates are ratios of polynomials of degree at most `cap`.
pub fn ratio_element(a: &SymbolAlgebra, rng: &mut ChaCha8Rng, cap: u32) -> AlgebraElement {
    let pool = CandidatePool::new(a.field(), cap);
    let p = a.degree();
    let coeffs = (0..p).map(|_| (0..p).map(|_| pool.random_ratio(rng)).collect()).collect();
    a.element(coeffs).unwrap()
}

/// Binomial coefficient reduced mod `p`.
fn binom_mod(n: usize, k: usize, p: usize) -> usize {
    let mut c = 1u128;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    (c % p as u128) as usize
}

/// Product from the rewriting rules `y x = (x + 1) y`, `x^p = x + alpha`,
/// `y^p = beta`: `x^i y^j x^k y^l = x^i (x + j)^k y^(j + l)`.
pub fn oracle_product(a: &SymbolAlgebra, s: &AlgebraElement, t: &AlgebraElement) -> Vec<Vec<FieldElement>> {
    let f = a.field();
    let p = a.degree();
    let mut out = vec![vec![f.zero(); p]; p];
    for i in 0..p {
        for j in 0..p {
            let cs = s.coeff(i, j);
            if cs.is_zero() {
                continue;
            }
            for k in 0..p {
                for l in 0..p {
                    let ct = t.coeff(k, l);
                    if ct.is_zero() {
                        continue;
                    }
                    let coeff = cs * ct;
                    // x^i (x + j)^k as a polynomial in x, then reduced
                    let mut xpoly = vec![f.zero(); 2 * p];
                    for m in 0..=k {
                        let b = binom_mod(k, m, p) as i64;
                        let jpow = f.from_int(j as i64).pow((k - m) as i64).unwrap();
                        xpoly[i + m] = &xpoly[i + m] + &(&f.from_int(b) * &jpow);
                    }
                    for d in (p..xpoly.len()).rev() {
                        let c = std::mem::replace(&mut xpoly[d], f.zero());
                        xpoly[d - p + 1] = &xpoly[d - p + 1] + &c;
                        xpoly[d - p] = &xpoly[d - p] + &(&c * a.alpha());
                    }
                    let (ye, ycoeff) = if j + l >= p {
                        (j + l - p, a.beta().clone())
                    } else {
                        (j + l, f.one())
                    };
                    for (d, c) in xpoly.iter().enumerate().take(p) {
                        out[d][ye] = &out[d][ye] + &(&(&coeff * c) * &ycoeff);
                    }
                }
            }
        }
    }
    out
}

pub fn as_rows(e: &AlgebraElement) -> Vec<Vec<FieldElement>> {
    let p = e.degree();
    (0..p).map(|i| (0..p).map(|j| e.coeff(i, j).clone()).collect()).collect()
}

/// `a^2 + ab + b^2 gamma + (c^2 + cd + d^2 gamma) delta` on `a + b x + c y + d xy`.
pub fn closed_norm(a: &SymbolAlgebra, t: &AlgebraElement) -> FieldElement {
    let (c0, c1, c2, c3) = (t.coeff(0, 0), t.coeff(1, 0), t.coeff(0, 1), t.coeff(1, 1));
    let g = a.alpha();
    let first = &(&c0.square() + &(c0 * c1)) + &(&c1.square() * g);
    let second = &(&c2.square() + &(c2 * c3)) + &(&c3.square() * g);
    &first + &(&second * a.beta())
}


/// `t^p - t = theta` computed with [`oracle_product`].
pub fn is_artin_schreier_witness(a: &SymbolAlgebra, t: &AlgebraElement, theta: &FieldElement) -> bool {
    let p = a.degree();
    let mut power = t.clone();
    for _ in 1..p {
        let rows = oracle_product(a, &power, t);
        power = a.element(rows).unwrap();
    }
    let mut want = as_rows(t);
    want[0][0] = &want[0][0] + theta;
    as_rows(&power) == want
}

/// The final polynomial written out from the slots:
/// `P(v) = -(r-1) beta a1^p v^(2p-1) + (r-1)(C + beta a3^p) v^(p-1) - (a2^p - a1^p)`
/// with `r = (a1/a2)^(p-1)` and `C = a3^p - a1^p + (a2^p - a1^p)/(r-1)`.
pub struct CyclicOracle {
    p: i64,
    a: [FieldElement; 3],
    beta: FieldElement,
    r1: FieldElement,
    c: FieldElement,
}

impl CyclicOracle {
    pub fn new(alphas: [&FieldElement; 3], beta: &FieldElement) -> CyclicOracle {
        let f = beta.field();
        let p = f.characteristic() as i64;
        let a = alphas.map(|x| x.clone());
        let beta = beta.clone();
        let pw = |x: &FieldElement| x.pow(p).unwrap();
        let r1 = &a[0].checked_div(&a[1]).unwrap().pow(p - 1).unwrap() - &f.one();
        let c = &(&pw(&a[2]) - &pw(&a[0])) + &(&pw(&a[1]) - &pw(&a[0])).checked_div(&r1).unwrap();
        CyclicOracle { p, a, beta, r1, c }
    }

    pub fn poly(&self, v: &FieldElement) -> FieldElement {
        let p = self.p;
        let pw = |x: &FieldElement, e: i64| x.pow(e).unwrap();
        let top = &(&(&self.r1 * &self.beta) * &pw(&self.a[0], p)) * &pw(v, 2 * p - 1);
        let mid = &(&self.r1 * &(&self.c + &(&self.beta * &pw(&self.a[2], p)))) * &pw(v, p - 1);
        let low = &pw(&self.a[1], p) - &pw(&self.a[0], p);
        &(&mid - &top) - &low
    }

    pub fn u(&self, v1: &FieldElement) -> FieldElement {
        let p = self.p;
        let pw = |x: &FieldElement| x.pow(p).unwrap();
        let inner = &pw(&self.a[2]) - &(&pw(&self.a[0]) * &pw(v1));
        (&self.c + &(&self.beta * &inner)).checked_div(&self.beta).unwrap()
    }

    pub fn expression(&self, i: usize, u: &FieldElement, v: &FieldElement) -> FieldElement {
        let p = self.p;
        let ap = self.a[i].pow(p).unwrap();
        let inner = &(&u.pow(p).unwrap() - &(u * &v.pow(p - 1).unwrap())) + &(&ap * &v.pow(p).unwrap());
        &ap + &(&self.beta * &inner)
    }

    /// `E2 - E1 = -P(v1)` and `(r - 1)(E3 - E1) = P(v1)` at `v1`.
    pub fn identities_hold_at(&self, v1: &FieldElement) -> bool {
        let f = v1.field();
        let u = self.u(v1);
        let v2 = &self.a[0].checked_div(&self.a[1]).unwrap() * v1;
        let e1 = self.expression(0, &u, v1);
        let e2 = self.expression(1, &u, &v2);
        let e3 = self.expression(2, &u, &f.one());
        let p = self.poly(v1);
        &e2 - &e1 == -p.clone() && &self.r1 * &(&e3 - &e1) == p
    }
}

/// `<1, b1> (x) <1, b2> (x) ... (x) [1, a]` expanded term by term.
pub fn tensor_oracle(slots: &[FieldElement], a: &FieldElement, v: &[FieldElement]) -> FieldElement {
    let f = a.field();
    let mut acc = f.zero();
    for m in 0..(1usize << slots.len()) {
        let mut scalar = f.one();
        for (i, b) in slots.iter().enumerate() {
            if m & (1 << i) != 0 {
                scalar = &scalar * b;
            }
        }
        let (u, w) = (&v[2 * m], &v[2 * m + 1]);
        let binary = &(&(u * u) + &(u * w)) + &(&(w * w) * a);
        acc = &acc + &(&scalar * &binary);
    }
    acc
}

