//! Multivariate GCD by recursive content / primitive-part reduction and a
//! primitive pseudo-remainder sequence in one main variable.

use super::galois::{GaloisField, GaloisScalar};
use super::poly::{Monomial, MultiPoly, MAX_VARS};

/// Monic greatest common divisor; `gcd(0, 0) = 0`.
pub fn gcd(a: &MultiPoly, b: &MultiPoly, gf: &GaloisField) -> MultiPoly {
    gcd_inner(a, b, gf).monic(gf).0
}

fn gcd_inner(a: &MultiPoly, b: &MultiPoly, gf: &GaloisField) -> MultiPoly {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.is_constant() || b.is_constant() {
        return MultiPoly::one();
    }
    if a.is_monomial() {
        let m = a.leading().unwrap().0.meet(&b.monomial_content());
        return MultiPoly::term(m, gf.from_int(1));
    }
    if b.is_monomial() {
        let m = b.leading().unwrap().0.meet(&a.monomial_content());
        return MultiPoly::term(m, gf.from_int(1));
    }
    let (ma, mb) = (a.monomial_content(), b.monomial_content());
    let shared = MultiPoly::term(ma.meet(&mb), gf.from_int(1));
    let a = strip(a, &ma, gf);
    let b = strip(b, &mb, gf);
    if a.monic(gf).0 == b.monic(gf).0 {
        return a.mul(&shared, gf);
    }
    if a.is_constant() || b.is_constant() {
        return shared;
    }

    let (mask_a, mask_b) = (a.var_mask(), b.var_mask());
    let common = mask_a & mask_b;
    if common == 0 {
        // no shared variable: any common factor is a constant
        return shared;
    }
    let var = (0..MAX_VARS)
        .filter(|i| common & (1 << i) != 0)
        .min_by_key(|&i| a.degree_in(i).max(b.degree_in(i)))
        .expect("common variable");
    let ca = a.coeffs_in(var, gf);
    let cb = b.coeffs_in(var, gf);

    let cont_a = content(&ca, gf);
    let cont_b = content(&cb, gf);
    let cont = gcd_inner(&cont_a, &cont_b, gf);
    if images_coprime(&ca, &cb, gf) {
        return cont.mul(&shared, gf);
    }

    let mut pa = divide_all(&ca, &cont_a, gf);
    let mut pb = divide_all(&cb, &cont_b, gf);
    if pa.len() < pb.len() {
        std::mem::swap(&mut pa, &mut pb);
    }
    let g = loop {
        let r = pseudo_rem(&pa, &pb, gf);
        if r.is_empty() {
            break pb;
        }
        if r.len() == 1 {
            break vec![MultiPoly::one()];
        }
        pa = pb;
        pb = primitive_part(&r, gf);
    };
    let g = primitive_part(&g, gf);
    MultiPoly::from_coeffs(var, &g, gf)
        .mul(&cont, gf)
        .mul(&shared, gf)
}

const MAX_IMAGE_POINTS: u32 = 16;

/// True when some specialization of the non-main variables keeps both leading
/// coefficients nonzero and leaves coprime univariate images. The gcd then has
/// degree zero in the main variable.
fn images_coprime(ca: &[MultiPoly], cb: &[MultiPoly], gf: &GaloisField) -> bool {
    let (la, lb) = (&ca[ca.len() - 1], &cb[cb.len() - 1]);
    let mask = ca.iter().chain(cb).fold(0, |m, c| m | c.var_mask());
    let vars: Vec<usize> = (0..MAX_VARS).filter(|i| mask & (1 << i) != 0).collect();
    let q = gf.order();
    let total = q.checked_pow(vars.len() as u32).unwrap_or(u32::MAX).min(MAX_IMAGE_POINTS);
    let mut point = [GaloisScalar::ZERO; MAX_VARS];
    for t in 0..total {
        let mut digits = t;
        for &v in &vars {
            point[v] = gf.from_code(digits % q).expect("digit below order");
            digits /= q;
        }
        if la.eval(&point, gf).is_zero() || lb.eval(&point, gf).is_zero() {
            continue;
        }
        let ia: Vec<GaloisScalar> = ca.iter().map(|c| c.eval(&point, gf)).collect();
        let ib: Vec<GaloisScalar> = cb.iter().map(|c| c.eval(&point, gf)).collect();
        return uni_gcd_degree(ia, ib, gf) == 0;
    }
    false
}

fn uni_trim(v: &mut Vec<GaloisScalar>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

/// Degree of the gcd of two nonzero univariate polynomials (low-to-high coefficients).
fn uni_gcd_degree(mut a: Vec<GaloisScalar>, mut b: Vec<GaloisScalar>, gf: &GaloisField) -> usize {
    uni_trim(&mut a);
    uni_trim(&mut b);
    while !b.is_empty() {
        let inv = gf.inv(b[b.len() - 1]).expect("trimmed");
        while a.len() >= b.len() {
            let f = gf.mul(a[a.len() - 1], inv);
            let shift = a.len() - b.len();
            for (i, &c) in b.iter().enumerate() {
                a[i + shift] = gf.sub(a[i + shift], gf.mul(f, c));
            }
            uni_trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len() - 1
}

fn strip(p: &MultiPoly, m: &Monomial, gf: &GaloisField) -> MultiPoly {
    if m.is_one() {
        p.clone()
    } else {
        p.div_exact(&MultiPoly::term(*m, gf.from_int(1)), gf)
            .expect("monomial content divides")
    }
}

/// GCD of a list of coefficients, with early exit on a unit.
fn content(coeffs: &[MultiPoly], gf: &GaloisField) -> MultiPoly {
    let mut g = MultiPoly::zero();
    for c in coeffs.iter().filter(|c| !c.is_zero()) {
        g = gcd_inner(&g, c, gf);
        if g.is_constant() {
            return MultiPoly::one();
        }
    }
    g.monic(gf).0
}

fn divide_all(coeffs: &[MultiPoly], by: &MultiPoly, gf: &GaloisField) -> Vec<MultiPoly> {
    coeffs
        .iter()
        .map(|c| c.div_exact(by, gf).expect("content divides every coefficient"))
        .collect()
}

fn primitive_part(coeffs: &[MultiPoly], gf: &GaloisField) -> Vec<MultiPoly> {
    let c = content(coeffs, gf);
    let mut out = divide_all(coeffs, &c, gf);
    // fix the overall scalar so the sequence does not drift
    if let Some(top) = out.last() {
        let (_, lc) = top.monic(gf);
        let inv = gf.inv(lc).expect("nonzero leading coefficient");
        for c in out.iter_mut() {
            *c = c.scale(inv, gf);
        }
    }
    out
}

fn trim(v: &mut Vec<MultiPoly>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

/// A nonzero multiple of the remainder of `a` by `b` in `R[var]`.
fn pseudo_rem(a: &[MultiPoly], b: &[MultiPoly], gf: &GaloisField) -> Vec<MultiPoly> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lc_b = &b[db];
    let lc_b_scalar = lc_b.as_constant();
    while !r.is_empty() && r.len() > db {
        let dr = r.len() - 1;
        let lc_r = r[dr].clone();
        let shift = dr - db;
        match lc_b_scalar {
            Some(s) => {
                let f = gf.inv(s).expect("nonzero");
                for (i, bc) in b.iter().enumerate() {
                    let t = bc.mul(&lc_r, gf).scale(f, gf);
                    r[i + shift] = r[i + shift].sub(&t, gf);
                }
            }
            None => {
                for c in r.iter_mut() {
                    *c = c.mul(lc_b, gf);
                }
                for (i, bc) in b.iter().enumerate() {
                    let t = bc.mul(&lc_r, gf);
                    r[i + shift] = r[i + shift].sub(&t, gf);
                }
            }
        }
        debug_assert!(r[dr].is_zero());
        trim(&mut r);
    }
    r
}
