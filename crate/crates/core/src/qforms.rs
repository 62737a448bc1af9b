//! Quadratic Pfister forms `<<b1, ..., b_{n-1}; a]]` in characteristic 2 and a
//! bounded search for isotropic vectors.

use std::collections::HashMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::gcd::gcd;
use crate::fields::{FieldElement, FunctionField, GaloisField, GaloisScalar, MultiPoly};
use crate::search::{layered_search, seeded_rng, CandidatePool};

/// Default number of vectors tried by [`PfisterForm::isotropy_search`].
pub const DEFAULT_ISOTROPY_BUDGET: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PfisterForm {
    bilinear: Vec<FieldElement>,
    quadratic: FieldElement,
    /// Block `m` carries the product of the `b_i` whose bit is set in `m`.
    blocks: Vec<FieldElement>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsotropyResult {
    Isotropic(Vec<FieldElement>),
    NoWitnessFound { examined: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "camelCase")]
pub enum InseparableLinkage {
    /// An isotropic vector of the 3-fold form, which is then hyperbolic.
    Linked { form: String, witness: Vec<String> },
    /// Bounded search found no isotropic vector; evidence only.
    NotLinkedEvidence { form: String, examined: u64 },
    Unknown { form: String, reason: String },
}

impl PfisterForm {
    pub fn new(bilinear: Vec<FieldElement>, quadratic: FieldElement) -> Result<Self> {
        let field = quadratic.field().clone();
        if field.characteristic() != 2 {
            return Err(Error::WrongCharacteristic {
                expected: "2".into(),
                found: field.characteristic(),
            });
        }
        if bilinear.iter().any(|b| b.field() != &field) {
            return Err(Error::FieldMismatch);
        }
        if bilinear.iter().any(FieldElement::is_zero) {
            return Err(Error::Precondition("bilinear slots must be nonzero".into()));
        }
        let mut blocks = vec![field.one()];
        for b in &bilinear {
            let scaled: Vec<FieldElement> = blocks.iter().map(|c| c * b).collect();
            blocks.extend(scaled);
        }
        Ok(PfisterForm {
            bilinear,
            quadratic,
            blocks,
        })
    }

    /// Parses `<<b1,b2; a]]`, or `<<a]]` for a 1-fold form.
    pub fn parse(text: &str, field: &FunctionField) -> Result<Self> {
        let trimmed = text.trim();
        let body = trimmed
            .strip_prefix("<<")
            .and_then(|r| r.strip_suffix("]]"))
            .ok_or_else(|| Error::Syntax {
                position: 0,
                message: "expected <<b1,...; a]]".into(),
            })?;
        let offset = text.len() - text.trim_start().len() + 2;
        let (slots, quad, quad_offset) = match body.split_once(';') {
            Some((left, right)) => (Some(left), right, left.len() + 1),
            None => (None, body, 0),
        };
        let shift = |e: Error, by: usize| match e {
            Error::Syntax { position, message } => Error::Syntax {
                position: position + by,
                message,
            },
            other => other,
        };
        let mut bilinear = Vec::new();
        if let Some(left) = slots {
            let mut pos = 0;
            for piece in left.split(',') {
                if !piece.trim().is_empty() {
                    bilinear.push(field.parse(piece).map_err(|e| shift(e, offset + pos))?);
                }
                pos += piece.len() + 1;
            }
        }
        let quadratic = field
            .parse(quad)
            .map_err(|e| shift(e, offset + quad_offset))?;
        Self::new(bilinear, quadratic)
    }

    pub fn field(&self) -> &FunctionField {
        self.quadratic.field()
    }

    pub fn fold(&self) -> usize {
        self.bilinear.len() + 1
    }

    pub fn dimension(&self) -> usize {
        2 * self.blocks.len()
    }

    pub fn bilinear_slots(&self) -> &[FieldElement] {
        &self.bilinear
    }

    pub fn quadratic_slot(&self) -> &FieldElement {
        &self.quadratic
    }

    pub fn block_scalars(&self) -> &[FieldElement] {
        &self.blocks
    }

    /// `sum_k c_k (u_k^2 + u_k v_k + a v_k^2)` with `(u_k, v_k)` at positions `2k, 2k+1`.
    pub fn evaluate(&self, v: &[FieldElement]) -> Result<FieldElement> {
        if v.len() != self.dimension() {
            return Err(Error::LengthMismatch {
                expected: self.dimension(),
                found: v.len(),
            });
        }
        let mut acc = self.field().zero();
        for (k, c) in self.blocks.iter().enumerate() {
            let (u, w) = (&v[2 * k], &v[2 * k + 1]);
            let binary = &(&u.square() + &(u * w)) + &(&w.square() * &self.quadratic);
            acc = &acc + &(c * &binary);
        }
        Ok(acc)
    }

    /// Exhaustive layered search over polynomial vectors of degree at most
    /// `cap` for half the budget, then seeded random vectors of degree at
    /// most `cap + 1`. Scaling lets polynomial vectors stand in for all of
    /// `F^(2^n)`.
    pub fn isotropy_search(&self, cap: u32, budget: u64, seed: u64) -> Result<IsotropyResult> {
        let cleared = ClearedForm::new(self);
        let dim = self.dimension();
        let pool = CandidatePool::new(self.field(), cap);
        let exhaustive_budget = budget - budget / 2;
        let mut cache: HashMap<u64, Vec<GaloisScalar>> = HashMap::new();
        let (hit, stats) = layered_search(dim, pool.size(), exhaustive_budget, |tuple| {
            if tuple.iter().all(|&i| i == 0) {
                return false;
            }
            for &i in tuple {
                cache
                    .entry(i)
                    .or_insert_with(|| cleared.values(&pool.get_poly(i)));
            }
            let values: Vec<&[GaloisScalar]> = tuple.iter().map(|i| cache[i].as_slice()).collect();
            if !cleared.passes_filter(&values) {
                return false;
            }
            let vector: Vec<MultiPoly> = tuple.iter().map(|&i| pool.get_poly(i)).collect();
            cleared.vanishes(&vector)
        });
        if let Some(tuple) = hit {
            let v: Vec<FieldElement> = tuple.iter().map(|&i| pool.get(i)).collect();
            return self.confirm(v);
        }
        let mut examined = stats.examined;
        if !stats.exhausted {
            let wide = CandidatePool::new(self.field(), cap + 1);
            let mut rng = seeded_rng(seed);
            while examined < budget {
                examined += 1;
                let vector: Vec<MultiPoly> = (0..dim).map(|_| wide.random_poly(&mut rng)).collect();
                if vector.iter().all(MultiPoly::is_zero) {
                    continue;
                }
                let values: Vec<Vec<GaloisScalar>> = vector.iter().map(|p| cleared.values(p)).collect();
                let refs: Vec<&[GaloisScalar]> = values.iter().map(Vec::as_slice).collect();
                if cleared.passes_filter(&refs) && cleared.vanishes(&vector) {
                    let field = self.field();
                    let v = vector
                        .into_iter()
                        .map(|p| FieldElement::from_poly(field, p))
                        .collect();
                    return self.confirm(v);
                }
            }
        }
        Ok(IsotropyResult::NoWitnessFound { examined })
    }

    fn confirm(&self, v: Vec<FieldElement>) -> Result<IsotropyResult> {
        if self.evaluate(&v)?.is_zero() {
            Ok(IsotropyResult::Isotropic(v))
        } else {
            Err(Error::Internal("isotropic vector failed re-evaluation".into()))
        }
    }
}

impl fmt::Display for PfisterForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bilinear.is_empty() {
            return write!(f, "<<{}]]", self.quadratic);
        }
        let slots: Vec<String> = self.bilinear.iter().map(ToString::to_string).collect();
        write!(f, "<<{}; {}]]", slots.join(","), self.quadratic)
    }
}

/// Largest number of sample points used to reject candidates cheaply.
const MAX_SAMPLE_POINTS: usize = 64;

/// The form times a common denominator, so evaluation stays polynomial, plus
/// its block coefficients at sample points of `F_q^n`. A vector is tested
/// exactly only when the form vanishes at every sample point.
struct ClearedForm {
    square: Vec<MultiPoly>,
    quadratic: Vec<MultiPoly>,
    gf: GaloisField,
    points: Vec<Vec<GaloisScalar>>,
    square_at: Vec<Vec<GaloisScalar>>,
    quadratic_at: Vec<Vec<GaloisScalar>>,
}

impl ClearedForm {
    fn new(q: &PfisterForm) -> Self {
        let field = q.field();
        let gf = field.gf().clone();
        let mut den = MultiPoly::one();
        let coefficients: Vec<(FieldElement, FieldElement)> = q
            .blocks
            .iter()
            .map(|c| (c.clone(), c * &q.quadratic))
            .collect();
        for (c, ca) in &coefficients {
            for d in [c.denominator(), ca.denominator()] {
                let g = gcd(&den, d, &gf);
                den = den.mul(&d.div_exact(&g, &gf).expect("gcd divides"), &gf);
            }
        }
        let clear = |e: &FieldElement| {
            let factor = den.div_exact(e.denominator(), &gf).expect("lcm is a multiple");
            e.numerator().mul(&factor, &gf)
        };
        let square: Vec<MultiPoly> = coefficients.iter().map(|(c, _)| clear(c)).collect();
        let quadratic: Vec<MultiPoly> = coefficients.iter().map(|(_, ca)| clear(ca)).collect();
        let points = sample_points(&gf, field.vars().len());
        let at = |polys: &[MultiPoly]| -> Vec<Vec<GaloisScalar>> {
            polys
                .iter()
                .map(|c| points.iter().map(|pt| c.eval(pt, &gf)).collect())
                .collect()
        };
        let square_at = at(&square);
        let quadratic_at = at(&quadratic);
        ClearedForm {
            square,
            quadratic,
            gf,
            points,
            square_at,
            quadratic_at,
        }
    }

    fn values(&self, poly: &MultiPoly) -> Vec<GaloisScalar> {
        self.points.iter().map(|pt| poly.eval(pt, &self.gf)).collect()
    }

    /// Necessary condition: the form vanishes at every sample point.
    fn passes_filter(&self, values: &[&[GaloisScalar]]) -> bool {
        let gf = &self.gf;
        (0..self.points.len()).all(|pt| {
            let mut acc = GaloisScalar::ZERO;
            for k in 0..self.square.len() {
                let (u, w) = (values[2 * k][pt], values[2 * k + 1][pt]);
                let block = gf.add(
                    gf.mul(self.square_at[k][pt], gf.mul(u, gf.add(u, w))),
                    gf.mul(self.quadratic_at[k][pt], gf.mul(w, w)),
                );
                acc = gf.add(acc, block);
            }
            acc.is_zero()
        })
    }

    fn vanishes(&self, v: &[MultiPoly]) -> bool {
        let gf = &self.gf;
        let mut acc = MultiPoly::zero();
        for (k, (c, ca)) in self.square.iter().zip(&self.quadratic).enumerate() {
            let (u, w) = (&v[2 * k], &v[2 * k + 1]);
            if !u.is_zero() {
                acc = acc.add(&c.mul(&u.mul(&u.add(w, gf), gf), gf), gf);
            }
            if !w.is_zero() {
                acc = acc.add(&ca.mul(&w.mul(w, gf), gf), gf);
            }
        }
        acc.is_zero()
    }
}

/// All of `F_q^n` when small, otherwise a fixed pseudo-random subset.
fn sample_points(gf: &GaloisField, n: usize) -> Vec<Vec<GaloisScalar>> {
    let q = gf.order() as usize;
    let total = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(q));
    let decode = |mut idx: usize| -> Vec<GaloisScalar> {
        (0..n)
            .map(|_| {
                let d = idx % q;
                idx /= q;
                gf.from_code(d as u32).expect("digit below q")
            })
            .collect()
    };
    match total {
        Some(t) if t <= MAX_SAMPLE_POINTS => (0..t).map(decode).collect(),
        _ => {
            let mut rng = seeded_rng(0);
            (0..MAX_SAMPLE_POINTS)
                .map(|_| (0..n).map(|_| GaloisScalar(rng.gen_range(0..gf.order()))).collect())
                .collect()
        }
    }
}

/// Runs the isotropy search on `<<b_i, b_j; alpha]]`.
pub fn inseparable_linkage_criterion(
    alpha: &FieldElement,
    beta_i: &FieldElement,
    beta_j: &FieldElement,
    cap: u32,
    budget: u64,
    seed: u64,
) -> Result<InseparableLinkage> {
    let form = PfisterForm::new(vec![beta_i.clone(), beta_j.clone()], alpha.clone())?;
    let name = form.to_string();
    if budget == 0 {
        return Ok(InseparableLinkage::Unknown {
            form: name,
            reason: "empty search budget".into(),
        });
    }
    Ok(match form.isotropy_search(cap, budget, seed)? {
        IsotropyResult::Isotropic(v) => InseparableLinkage::Linked {
            form: name,
            witness: v.iter().map(ToString::to_string).collect(),
        },
        IsotropyResult::NoWitnessFound { examined } => InseparableLinkage::NotLinkedEvidence {
            form: name,
            examined,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_by_blocks() {
        let f = FunctionField::new(2, 1, &["a", "b"]).unwrap();
        let (zero, one) = (f.zero(), f.one());
        let q = PfisterForm::parse("<<a]]", &f).unwrap();
        assert!(q.evaluate(&[one.clone(), zero.clone()]).unwrap().is_one());
        assert_eq!(q.evaluate(&[zero.clone(), one.clone()]).unwrap(), f.parse("a").unwrap());
        let q = PfisterForm::parse("<<b; a]]", &f).unwrap();
        let v = [zero.clone(), zero.clone(), one.clone(), zero.clone()];
        assert_eq!(q.evaluate(&v).unwrap(), f.parse("b").unwrap());
        assert_eq!(q.to_string(), "<<b; a]]");
        assert!(q.evaluate(&v[..3]).is_err());
    }

    #[test]
    fn finite_field_forms_are_isotropic() {
        let f = FunctionField::new(2, 2, &[]).unwrap();
        let q = PfisterForm::parse("<<1]]", &f).unwrap();
        match q.isotropy_search(0, 1000, 0).unwrap() {
            IsotropyResult::Isotropic(v) => assert!(q.evaluate(&v).unwrap().is_zero()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degenerate_slot() {
        let f = FunctionField::new(2, 1, &["a"]).unwrap();
        let q = PfisterForm::parse("<<0]]", &f).unwrap();
        assert_eq!(
            q.isotropy_search(0, 100, 0).unwrap(),
            IsotropyResult::Isotropic(vec![f.zero(), f.one()])
        );
    }

    #[test]
    fn repeated_slot_links() {
        let f = FunctionField::new(2, 1, &["a", "b1", "b2"]).unwrap();
        let r = inseparable_linkage_criterion(
            &f.parse("a^-1").unwrap(),
            &f.parse("b1").unwrap(),
            &f.parse("b1").unwrap(),
            1,
            10_000,
            0,
        )
        .unwrap();
        assert!(matches!(r, InseparableLinkage::Linked { .. }), "{r:?}");
    }
}
