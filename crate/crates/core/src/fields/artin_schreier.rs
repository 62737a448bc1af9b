//! The Artin-Schreier map `l -> l^p - l`, membership in its image, and
//! p-th roots.
//!
//! Over `F_q(v_1..v_n)` membership is decided exactly. If `c = n/d` is reduced
//! with `d` monic and `c = l^p - l` with `l = r/s` reduced, then `d = s^p` and
//! `n = r^p - r s^(p-1)`. The map `r -> r^p - r s^(p-1)` is `F_p`-linear and
//! `deg r <= max(deg s, deg n / p)`, so the question becomes a finite linear
//! system over the prime field.

use super::galois::{GaloisField, GaloisScalar};
use super::poly::{Monomial, MultiPoly, MAX_VARS};
use super::rational::FieldElement;

/// Largest number of `F_p` unknowns the exact solver will set up.
pub const MAX_LINEAR_UNKNOWNS: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ImageVerdict {
    /// Carries `l` with `l^p - l = c`.
    InImage(FieldElement),
    /// Carries the obstruction that rules membership out.
    NotInImage(String),
    Unknown(String),
}

impl ImageVerdict {
    pub fn is_in_image(&self) -> bool {
        matches!(self, ImageVerdict::InImage(_))
    }

    pub fn is_not_in_image(&self) -> bool {
        matches!(self, ImageVerdict::NotInImage(_))
    }
}

/// `l^p - l`.
pub fn wp(l: &FieldElement) -> FieldElement {
    &l.frobenius() - l
}

/// `c` is in the image of `l -> l^p - l` on `F_q` iff its absolute trace is zero.
pub fn scalar_in_image_by_trace(c: GaloisScalar, gf: &GaloisField) -> bool {
    gf.absolute_trace(c).is_zero()
}

/// `d` with `d^p = c`, or `None` when `c` is not a p-th power.
pub fn pth_root(c: &FieldElement) -> Option<FieldElement> {
    let gf = c.field().gf();
    let num = c.numerator().pth_root(gf)?;
    let den = c.denominator().pth_root(gf)?;
    Some(FieldElement::new(c.field(), num, den).expect("nonzero denominator"))
}

pub fn artin_schreier_image_test(c: &FieldElement) -> ImageVerdict {
    let field = c.field();
    let gf = field.gf();
    if c.is_zero() {
        return ImageVerdict::InImage(field.zero());
    }
    if let Some(s) = c.as_scalar() {
        // F_q is algebraically closed in F_q(vars), so any l is a constant
        return match gf
            .elements()
            .find(|&l| gf.sub(gf.frobenius(l), l) == s)
        {
            Some(l) => ImageVerdict::InImage(field.scalar(l)),
            None => ImageVerdict::NotInImage(format!(
                "constant {} has nonzero absolute trace",
                gf.format(s)
            )),
        };
    }
    let Some(s) = c.denominator().pth_root(gf) else {
        return ImageVerdict::NotInImage(format!(
            "denominator {} is not a p-th power (a pole of order prime to p)",
            field.format_poly(c.denominator())
        ));
    };
    solve_numerator(c, &s)
}

fn solve_numerator(c: &FieldElement, s: &MultiPoly) -> ImageVerdict {
    let field = c.field();
    let gf = field.gf();
    let p = gf.characteristic();
    let k = gf.degree() as usize;
    let n = c.numerator();
    let deg_s = s.total_degree().unwrap_or(0);
    let deg_n = n.total_degree().unwrap_or(0);
    let bound = deg_s.max(deg_n / p);
    let mask = c.var_mask();

    let monomials = monomials_up_to(mask, bound);
    let unknowns = monomials.len() * k;
    if unknowns > MAX_LINEAR_UNKNOWNS {
        return ImageVerdict::Unknown(format!(
            "linear system with {unknowns} unknowns exceeds the solver limit"
        ));
    }
    let s_pow = s.pow(p - 1, gf);

    // columns: images of w^j * m
    let mut rows: Vec<Monomial> = n.terms().iter().map(|t| t.0).collect();
    let mut columns = Vec::with_capacity(unknowns);
    for m in &monomials {
        for j in 0..k {
            let b = MultiPoly::term(*m, GaloisScalar(p.pow(j as u32)));
            let image = b.pow(p, gf).sub(&b.mul(&s_pow, gf), gf);
            rows.extend(image.terms().iter().map(|t| t.0));
            columns.push(image);
        }
    }
    rows.sort();
    rows.dedup();
    let row_index = |m: &Monomial| rows.binary_search(m).expect("row collected");

    let height = rows.len() * k;
    let width = columns.len();
    let mut matrix = vec![vec![0u32; width + 1]; height];
    let put = |poly: &MultiPoly, col: usize, matrix: &mut Vec<Vec<u32>>| {
        for (m, coeff) in poly.terms() {
            let base = row_index(m) * k;
            for (d, digit) in gf.digits(coeff.0).into_iter().enumerate() {
                matrix[base + d][col] = digit;
            }
        }
    };
    for (col, image) in columns.iter().enumerate() {
        put(image, col, &mut matrix);
    }
    put(n, width, &mut matrix);

    let Some(solution) = solve_mod_p(matrix, width, p) else {
        return ImageVerdict::NotInImage(format!(
            "no numerator of degree <= {bound} solves r^p - r*s^(p-1) = n"
        ));
    };
    let mut terms = Vec::new();
    for (i, m) in monomials.iter().enumerate() {
        let digits = &solution[i * k..(i + 1) * k];
        let code = gf.from_digits(digits);
        if code != 0 {
            terms.push((*m, GaloisScalar(code)));
        }
    }
    let r = MultiPoly::from_terms(terms, gf);
    let lambda = FieldElement::new(field, r, s.clone()).expect("nonzero denominator");
    if &wp(&lambda) == c {
        ImageVerdict::InImage(lambda)
    } else {
        ImageVerdict::Unknown("solver produced a candidate that failed verification".into())
    }
}

/// Monomials in the variables of `mask` with total degree at most `bound`,
/// in ascending degree-lexicographic order.
pub fn monomials_up_to(mask: u32, bound: u32) -> Vec<Monomial> {
    let vars: Vec<usize> = (0..MAX_VARS).filter(|i| mask & (1 << i) != 0).collect();
    let mut out = vec![Monomial::ONE];
    for &v in &vars {
        let mut next = Vec::new();
        for m in &out {
            let mut cur = *m;
            while cur.degree() <= bound {
                next.push(cur);
                cur = cur.mul(&Monomial::var(v));
            }
        }
        out = next;
    }
    out.sort();
    out
}

/// Solves `A x = b` over `F_p` for the augmented matrix `[A | b]`; free
/// variables are set to zero.
fn solve_mod_p(mut m: Vec<Vec<u32>>, width: usize, p: u32) -> Option<Vec<u32>> {
    let inv = |a: u32| (1..p).find(|&x| a * x % p == 1).expect("nonzero mod p");
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..width {
        let Some(pr) = (row..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(row, pr);
        let f = inv(m[row][col]);
        for x in m[row].iter_mut() {
            *x = *x * f % p;
        }
        for r in 0..m.len() {
            if r != row && m[r][col] != 0 {
                let f = m[r][col];
                for c in 0..=width {
                    m[r][c] = (m[r][c] + (p - f) * m[row][c]) % p;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    if m[row..].iter().any(|r| r[width] != 0) {
        return None;
    }
    let mut x = vec![0u32; width];
    for (r, &col) in pivots.iter().enumerate() {
        x[col] = m[r][width];
    }
    Some(x)
}
