//! Deterministic enumeration and seeded sampling of bounded-degree elements.
//!
//! Candidates are polynomials of total degree at most `cap` with `F_q`
//! coefficients. Candidate `i` has the base-`q` digits of `i` as coefficients
//! on the monomials listed in ascending degree-lexicographic order, so index 0
//! is zero, `1..q` are the constants, and so on.
//!
//! Tuples of candidate indices are visited layer by layer: layer `h` holds
//! every tuple whose largest entry is `h`, and inside a layer the first
//! coordinate varies fastest. The first hit is therefore the same on every
//! run and independent of how the search is split up.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fields::artin_schreier::monomials_up_to;
use crate::fields::{FieldElement, FunctionField, GaloisScalar, Monomial, MultiPoly};

/// Default degree cap for searched coordinates.
pub const DEFAULT_CAP: u32 = 2;

#[derive(Clone, Debug)]
pub struct CandidatePool {
    field: FunctionField,
    monomials: Vec<Monomial>,
    size: u64,
}

impl CandidatePool {
    pub fn new(field: &FunctionField, cap: u32) -> Self {
        let mask = (1u32 << field.vars().len()) - 1;
        Self::with_mask(field, cap, mask)
    }

    /// Restricts candidates to the variables in `mask`.
    pub fn with_mask(field: &FunctionField, cap: u32, mask: u32) -> Self {
        let monomials = monomials_up_to(mask, cap);
        let q = field.gf().order() as u64;
        let size = (0..monomials.len()).try_fold(1u64, |acc, _| acc.checked_mul(q));
        CandidatePool {
            field: field.clone(),
            monomials,
            size: size.unwrap_or(u64::MAX),
        }
    }

    pub fn field(&self) -> &FunctionField {
        &self.field
    }

    /// Monomials carrying the base-`q` digits, least significant first.
    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    /// Number of candidates (saturating).
    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn get(&self, index: u64) -> FieldElement {
        FieldElement::from_poly(&self.field, self.get_poly(index))
    }

    pub fn get_poly(&self, mut index: u64) -> MultiPoly {
        let gf = self.field.gf();
        let q = gf.order() as u64;
        let mut terms = Vec::new();
        for m in &self.monomials {
            if index == 0 {
                break;
            }
            let digit = (index % q) as u32;
            index /= q;
            if digit != 0 {
                terms.push((*m, gf.from_code(digit).expect("digit below q")));
            }
        }
        MultiPoly::from_terms(terms, gf)
    }

    pub fn random(&self, rng: &mut ChaCha8Rng) -> FieldElement {
        FieldElement::from_poly(&self.field, self.random_poly(rng))
    }

    pub fn random_poly(&self, rng: &mut ChaCha8Rng) -> MultiPoly {
        let gf = self.field.gf();
        let terms = self
            .monomials
            .iter()
            .map(|m| (*m, GaloisScalar(rng.gen_range(0..gf.order()))))
            .collect();
        MultiPoly::from_terms(terms, gf)
    }

    /// A random nonzero candidate.
    pub fn random_nonzero(&self, rng: &mut ChaCha8Rng) -> FieldElement {
        loop {
            let c = self.random(rng);
            if !c.is_zero() {
                return c;
            }
        }
    }

    /// Ratio of two random candidates, the denominator nonzero.
    pub fn random_ratio(&self, rng: &mut ChaCha8Rng) -> FieldElement {
        let num = self.random(rng);
        let den = self.random_nonzero(rng);
        num.checked_div(&den).expect("nonzero denominator")
    }
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Tuples handed to the predicate.
    pub examined: u64,
    /// True when every tuple over the pool was visited.
    pub exhausted: bool,
}

/// Visits tuples in layered order until `visit` returns `true`, the budget
/// runs out, or the space is exhausted. Returns the accepted tuple, if any.
pub fn layered_search(
    arity: usize,
    pool_size: u64,
    budget: u64,
    mut visit: impl FnMut(&[u64]) -> bool,
) -> (Option<Vec<u64>>, SearchStats) {
    let mut stats = SearchStats::default();
    if pool_size == 0 || arity == 0 {
        stats.exhausted = true;
        return (None, stats);
    }
    let mut tuple = vec![0u64; arity];
    for h in 0..pool_size {
        // odometer over [0, h]^arity, first coordinate fastest
        tuple.iter_mut().for_each(|t| *t = 0);
        loop {
            if h == 0 || tuple.iter().any(|&t| t == h) {
                if stats.examined >= budget {
                    return (None, stats);
                }
                stats.examined += 1;
                if visit(&tuple) {
                    return (Some(tuple), stats);
                }
            }
            let mut pos = 0;
            loop {
                if pos == arity {
                    break;
                }
                if tuple[pos] < h {
                    tuple[pos] += 1;
                    break;
                }
                tuple[pos] = 0;
                pos += 1;
            }
            if pos == arity {
                break;
            }
        }
    }
    stats.exhausted = true;
    (None, stats)
}
