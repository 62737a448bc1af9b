//! Common splitting fields of several symbol algebras.
//!
//! For quaternion algebras `[g_i, h_i)` sharing a splitting field, the
//! system
//!
//! ```text
//! b^2 g_1 + N_1(c_1, d_1) h_1 = a_i^2 + a_i b + b^2 g_i + N_i(c_i, d_i) h_i   (i >= 2)
//! ```
//!
//! with `N_i(c, d) = c^2 + cd + d^2 g_i` describes them. Its solutions give
//! the splitting datum: `F[sqrt(N_1 h_1)]` when `b = 0`, otherwise
//! `F[t : t^2 + t = g_1 + N_1 h_1 / b^2]`. Once `(b, c_1, d_1)` is fixed the
//! equations decouple, so each remaining algebra is searched on its own.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::algebra::{quaternion_norm, AlgebraElement, SymbolAlgebra};
use crate::error::{Error, Result};
use crate::fields::{artin_schreier_image_test, pth_root, FieldElement, FunctionField, ImageVerdict, MultiPoly};
use crate::search::{layered_search, CandidatePool};
use crate::valuation::{RamificationReport, ValuationContext, Value, ValueClass};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum LinkageKind {
    /// Common purely inseparable splitting field `F[sqrt(gamma)]`.
    Inseparable,
    /// Common Artin-Schreier splitting field `F[t : t^p - t = theta]`.
    Cyclic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub algebra: String,
    pub element: String,
    /// `(basis, coefficient)` pairs.
    pub terms: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub name: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LinkageCertificate {
    pub linkage: LinkageKind,
    pub field: String,
    pub algebras: Vec<String>,
    /// `gamma` for an inseparable datum, `theta` for a cyclic one.
    pub datum: String,
    pub witnesses: Vec<Witness>,
    pub trace: Vec<TraceEntry>,
    pub degenerate: bool,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinkageOutcome {
    Found(LinkageCertificate),
    Unknown { examined: u64, reason: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn ok(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

fn witness_record(a: &SymbolAlgebra, t: &AlgebraElement) -> Witness {
    Witness {
        algebra: a.spec(),
        element: t.to_string(),
        terms: t.terms(),
    }
}

fn entry(name: impl Into<String>, value: &FieldElement) -> TraceEntry {
    TraceEntry {
        name: name.into(),
        value: value.to_string(),
    }
}

fn require_common_quaternion_field(algebras: &[SymbolAlgebra]) -> Result<FunctionField> {
    let first = algebras
        .first()
        .ok_or_else(|| Error::Precondition("no algebras given".into()))?;
    let field = first.field().clone();
    for a in algebras {
        if a.degree() != 2 {
            return Err(Error::WrongCharacteristic {
                expected: "2".into(),
                found: a.degree() as u32,
            });
        }
        if a.field() != &field {
            return Err(Error::FieldMismatch);
        }
    }
    Ok(field)
}

/// Bounded search for a common quadratic splitting field. `budget` counts
/// evaluations of individual equations.
pub fn triple_linkage_search(
    algebras: &[SymbolAlgebra],
    budget: u64,
    cap: u32,
) -> Result<LinkageOutcome> {
    let field = require_common_quaternion_field(algebras)?;
    if algebras.len() < 2 {
        return Err(Error::Precondition("at least two algebras are needed".into()));
    }
    let pool = CandidatePool::new(&field, cap);
    let first = &algebras[0];
    let mut spent = 0u64;
    let mut solution: Option<(Vec<u64>, Vec<Vec<u64>>)> = None;

    let (_, outer_stats) = layered_search(3, pool.size(), budget, |outer| {
        if spent >= budget {
            return true;
        }
        spent += 1;
        let (b, c1, d1) = (pool.get(outer[0]), pool.get(outer[1]), pool.get(outer[2]));
        let zero = field.zero();
        let lhs = quaternion_norm(&zero, &b, &c1, &d1, first.alpha(), first.beta());
        if b.is_zero() && lhs.is_zero() {
            // no splitting datum
            return false;
        }
        let mut inner_hits = Vec::with_capacity(algebras.len() - 1);
        for a in &algebras[1..] {
            let target = &lhs - &(&b.square() * a.alpha());
            let remaining = budget.saturating_sub(spent);
            let (hit, stats) = layered_search(3, pool.size(), remaining, |inner| {
                let (ai, ci, di) = (pool.get(inner[0]), pool.get(inner[1]), pool.get(inner[2]));
                let value = &(&ai.square() + &(&ai * &b))
                    + &(&(&(&ci.square() + &(&ci * &di)) + &(&di.square() * a.alpha())) * a.beta());
                value == target
            });
            spent += stats.examined;
            match hit {
                Some(t) => inner_hits.push(t),
                None => return spent >= budget,
            }
        }
        solution = Some((outer.to_vec(), inner_hits));
        true
    });

    let Some((outer, inner)) = solution else {
        let reason = if outer_stats.exhausted && spent < budget {
            "degree-capped candidates exhausted"
        } else {
            "budget exhausted"
        };
        return Ok(LinkageOutcome::Unknown {
            examined: spent,
            reason: reason.into(),
        });
    };
    let b = pool.get(outer[0]);
    let c1 = pool.get(outer[1]);
    let d1 = pool.get(outer[2]);
    let rest: Vec<[FieldElement; 3]> = inner
        .iter()
        .map(|t| [pool.get(t[0]), pool.get(t[1]), pool.get(t[2])])
        .collect();
    let cert = build_certificate(algebras, &field, &b, &c1, &d1, &rest)?;
    Ok(LinkageOutcome::Found(cert))
}

fn build_certificate(
    algebras: &[SymbolAlgebra],
    field: &FunctionField,
    b: &FieldElement,
    c1: &FieldElement,
    d1: &FieldElement,
    rest: &[[FieldElement; 3]],
) -> Result<LinkageCertificate> {
    let zero = field.zero();
    let first = &algebras[0];
    let n1h1 = quaternion_norm(&zero, &zero, c1, d1, first.alpha(), first.beta());
    let mut trace = vec![entry("b", b), entry("c1", c1), entry("d1", d1)];
    for (i, [a, c, d]) in rest.iter().enumerate() {
        let k = i + 2;
        trace.push(entry(format!("a{k}"), a));
        trace.push(entry(format!("c{k}"), c));
        trace.push(entry(format!("d{k}"), d));
    }
    let mut notes = Vec::new();
    let (linkage, datum, degenerate, witnesses) = if b.is_zero() {
        let gamma = n1h1;
        let degenerate = pth_root(&gamma).is_some();
        if degenerate {
            notes.push(format!("{gamma} is a square"));
        }
        let mut elems = vec![first.quaternion(&zero, &zero, c1, d1)];
        for (a, [ai, ci, di]) in algebras[1..].iter().zip(rest) {
            elems.push(a.quaternion(ai, &zero, ci, di));
        }
        (LinkageKind::Inseparable, gamma, degenerate, elems)
    } else {
        let b2 = b.square();
        let theta = first.alpha() + &n1h1.checked_div(&b2)?;
        let degenerate = match artin_schreier_image_test(&theta) {
            ImageVerdict::InImage(l) => {
                notes.push(format!("{theta} = l^2 + l with l = {l}"));
                true
            }
            ImageVerdict::NotInImage(_) => false,
            ImageVerdict::Unknown(reason) => {
                notes.push(format!("membership of theta undecided: {reason}"));
                true
            }
        };
        let inv_b = b.inv().expect("nonzero");
        let one = field.one();
        let mut elems = vec![first.quaternion(&zero, &one, &(c1 * &inv_b), &(d1 * &inv_b))];
        for (a, [ai, ci, di]) in algebras[1..].iter().zip(rest) {
            elems.push(a.quaternion(&(ai * &inv_b), &one, &(ci * &inv_b), &(di * &inv_b)));
        }
        (LinkageKind::Cyclic, theta, degenerate, elems)
    };
    let cert = LinkageCertificate {
        linkage,
        field: field.descriptor(),
        algebras: algebras.iter().map(SymbolAlgebra::spec).collect(),
        datum: datum.to_string(),
        witnesses: algebras
            .iter()
            .zip(&witnesses)
            .map(|(a, t)| witness_record(a, t))
            .collect(),
        trace,
        degenerate,
        notes,
    };
    let report = verify_linkage_certificate(&cert)?;
    if !report.ok() {
        return Err(Error::Internal(format!(
            "fresh certificate failed verification: {:?}",
            report.failures()
        )));
    }
    Ok(cert)
}

/// Re-checks every witness equation and the degeneracy flag.
pub fn verify_linkage_certificate(cert: &LinkageCertificate) -> Result<VerificationReport> {
    let field = FunctionField::parse_descriptor(&cert.field)?;
    let algebras: Vec<SymbolAlgebra> = cert
        .algebras
        .iter()
        .map(|s| SymbolAlgebra::parse_spec(s, &field))
        .collect::<Result<_>>()?;
    let datum = field.parse(&cert.datum)?;
    let mut report = VerificationReport::default();
    report.push(
        "witness count",
        cert.witnesses.len() == algebras.len(),
        format!("{} witnesses for {} algebras", cert.witnesses.len(), algebras.len()),
    );
    for (i, (a, w)) in algebras.iter().zip(&cert.witnesses).enumerate() {
        let name = format!("witness {}", i + 1);
        if w.algebra != a.spec() {
            report.push(name, false, format!("names {} instead of {}", w.algebra, a.spec()));
            continue;
        }
        let t = match a.element_from_terms(&w.terms) {
            Ok(t) => t,
            Err(e) => {
                report.push(name, false, e.to_string());
                continue;
            }
        };
        let (passed, detail) = match cert.linkage {
            LinkageKind::Cyclic => {
                let lhs = a.artin_schreier(&t);
                (lhs == a.scalar(&datum), format!("t^p - t = {lhs} in {a}"))
            }
            LinkageKind::Inseparable => {
                let sq = a.multiply(&t, &t);
                let trace_zero = a.reduced_trace(&t)?.is_zero();
                (
                    trace_zero && sq == a.scalar(&datum),
                    format!("t^2 = {sq}, Trd(t) {} 0 in {a}", if trace_zero { "=" } else { "!=" }),
                )
            }
        };
        report.push(name, passed, detail);
    }
    let degenerate = match cert.linkage {
        LinkageKind::Inseparable => pth_root(&datum).is_some(),
        LinkageKind::Cyclic => !artin_schreier_image_test(&datum).is_not_in_image(),
    };
    report.push(
        "degeneracy flag",
        degenerate == cert.degenerate,
        format!("recomputed {degenerate}, recorded {}", cert.degenerate),
    );
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NonLinkageCertificate {
    pub field: String,
    pub valuation_variables: (String, String),
    pub algebras: Vec<String>,
    pub ramification: Vec<RamificationReport>,
    pub constraint_sets: Vec<Vec<ValueClass>>,
    pub intersection: Vec<ValueClass>,
    pub threshold: Value,
    pub w_fourth: Value,
    pub conclusion: String,
}

/// Possible classes of `v(t)` for a generator `t = x + a y + b xy` of a common
/// splitting field with `w > (1/2,1/2)`: the classes of `v(y)` and `v(xy)`.
pub fn class_constraint_set(a: &SymbolAlgebra, ctx: &ValuationContext) -> Result<BTreeSet<ValueClass>> {
    let report = ctx.is_totally_ramified(a)?;
    if !report.totally_ramified {
        return Err(Error::NotTotallyRamified(a.to_string()));
    }
    Ok(report.classes[1..].iter().copied().collect())
}

fn half_half() -> Value {
    Value::frac(1, 2, 1, 2)
}

/// The four algebras `[a^-1, b)`, `[b^-1, a)`, `[a^-1 b^-1, b)`, `[a^-2 b^-1, a)`.
pub fn prop_no4_algebras(ctx: &ValuationContext) -> Result<Vec<SymbolAlgebra>> {
    let f = ctx.field();
    let (a, b) = (ctx.alpha_name(), ctx.beta_name());
    [
        (format!("{a}^-1"), b.to_string()),
        (format!("{b}^-1"), a.to_string()),
        (format!("{a}^-1*{b}^-1"), b.to_string()),
        (format!("{a}^-2*{b}^-1"), a.to_string()),
    ]
    .iter()
    .map(|(g, h)| SymbolAlgebra::new(f.parse(g)?, f.parse(h)?))
    .collect()
}

pub fn prop_no4_certificate(ctx: &ValuationContext) -> Result<NonLinkageCertificate> {
    non_linkage_certificate(ctx, &prop_no4_algebras(ctx)?)
}

/// The first three algebras force `w(K) <= (1/2,1/2)` on any common
/// splitting field `K`; the fourth has `w > (1/2,1/2)`, so no `K` splits all four.
pub fn non_linkage_certificate(
    ctx: &ValuationContext,
    algebras: &[SymbolAlgebra],
) -> Result<NonLinkageCertificate> {
    if algebras.len() != 4 {
        return Err(Error::LengthMismatch {
            expected: 4,
            found: algebras.len(),
        });
    }
    let mut ramification = Vec::new();
    for a in algebras {
        let report = ctx.is_totally_ramified(a)?;
        if !report.totally_ramified {
            return Err(Error::NotTotallyRamified(format!("{a} is not totally ramified")));
        }
        ramification.push(report);
    }
    let sets: Vec<BTreeSet<ValueClass>> = algebras[..3]
        .iter()
        .map(|a| class_constraint_set(a, ctx))
        .collect::<Result<_>>()?;
    let intersection: BTreeSet<ValueClass> = sets[0]
        .iter()
        .filter(|c| sets[1].contains(c) && sets[2].contains(c))
        .copied()
        .collect();
    if !intersection.is_empty() {
        return Err(Error::Precondition(format!(
            "class sets intersect in {:?}",
            intersection
        )));
    }
    let w_fourth = ctx.w_of_algebra(&algebras[3])?;
    let threshold = half_half();
    if w_fourth <= threshold {
        return Err(Error::Precondition(format!(
            "w of the fourth algebra is {w_fourth}, not above {threshold}"
        )));
    }
    Ok(NonLinkageCertificate {
        field: ctx.field().descriptor(),
        valuation_variables: (ctx.alpha_name().to_string(), ctx.beta_name().to_string()),
        algebras: algebras.iter().map(SymbolAlgebra::spec).collect(),
        ramification,
        constraint_sets: sets.iter().map(|s| s.iter().copied().collect()).collect(),
        intersection: Vec::new(),
        threshold,
        w_fourth,
        conclusion: format!("intersection empty; w4 = {w_fourth} > {threshold}; not linked"),
    })
}

pub fn verify_non_linkage_certificate(cert: &NonLinkageCertificate) -> Result<VerificationReport> {
    let field = FunctionField::parse_descriptor(&cert.field)?;
    let ctx = ValuationContext::new(&field, &cert.valuation_variables.0, &cert.valuation_variables.1)?;
    let algebras: Vec<SymbolAlgebra> = cert
        .algebras
        .iter()
        .map(|s| SymbolAlgebra::parse_spec(s, &field))
        .collect::<Result<_>>()?;
    let mut report = VerificationReport::default();
    match non_linkage_certificate(&ctx, &algebras) {
        Ok(fresh) => {
            report.push(
                "ramification",
                fresh.ramification == cert.ramification,
                "class reports recomputed",
            );
            report.push(
                "constraint sets",
                fresh.constraint_sets == cert.constraint_sets,
                format!("{:?}", fresh.constraint_sets.iter().map(|s| classes_text(s)).collect::<Vec<_>>()),
            );
            report.push(
                "empty intersection",
                cert.intersection.is_empty(),
                "no class lies in all three sets",
            );
            report.push(
                "threshold",
                cert.threshold == half_half(),
                format!("threshold {}", cert.threshold),
            );
            report.push(
                "w of the fourth algebra",
                fresh.w_fourth == cert.w_fourth && cert.w_fourth > cert.threshold,
                format!("{} > {}", fresh.w_fourth, cert.threshold),
            );
        }
        Err(e) => report.push("recomputation", false, e.to_string()),
    }
    Ok(report)
}

pub fn classes_text(classes: &[ValueClass]) -> String {
    let parts: Vec<String> = classes.iter().map(ToString::to_string).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Result of the three-algebra cyclic constructor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "camelCase")]
pub enum CyclicLink {
    CommonCyclic(CommonCyclic),
    /// A dependence among the slots; two of the algebras already suffice.
    DelegatedToPair { relation: String },
    /// No root of the final polynomial among the searched candidates.
    /// `identitiesModPolynomial` records that, with `v1` left as an
    /// indeterminate, the system holds modulo the polynomial.
    #[serde(rename_all = "camelCase")]
    RootOverExtension {
        polynomial: String,
        degree: usize,
        examined: u64,
        identities_mod_polynomial: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CommonCyclic {
    pub p: u32,
    pub field: String,
    pub alphas: Vec<String>,
    pub beta: String,
    pub theta: String,
    pub u: String,
    pub v: Vec<String>,
    pub polynomial: String,
    pub degree: usize,
    pub witnesses: Vec<Witness>,
}

/// Coefficients (constant first) of a univariate polynomial over the field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly(pub Vec<FieldElement>);

impl UniPoly {
    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|c| !c.is_zero())
    }

    pub fn eval(&self, v: &FieldElement) -> FieldElement {
        let mut acc = v.field().zero();
        for c in self.0.iter().rev() {
            acc = &(&acc * v) + c;
        }
        acc
    }

    fn trimmed(mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(FieldElement::is_zero) {
            coeffs.pop();
        }
        UniPoly(coeffs)
    }

    fn zip_with(&self, other: &UniPoly, f: impl Fn(&FieldElement, &FieldElement) -> FieldElement) -> UniPoly {
        let zero = self.0[0].field().zero();
        let n = self.0.len().max(other.0.len());
        let coeffs = (0..n)
            .map(|k| f(self.0.get(k).unwrap_or(&zero), other.0.get(k).unwrap_or(&zero)))
            .collect();
        Self::trimmed(coeffs)
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &FieldElement) -> UniPoly {
        Self::trimmed(self.0.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        let zero = self.0[0].field().zero();
        let mut coeffs = vec![zero; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        Self::trimmed(coeffs)
    }

    pub fn pow(&self, e: usize) -> UniPoly {
        let mut acc = UniPoly(vec![self.0[0].field().one()]);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn format(&self, var: &str) -> String {
        let mut parts = Vec::new();
        for (k, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            let coeff = c.to_string();
            parts.push(if mono.is_empty() {
                coeff
            } else if c.is_one() {
                mono
            } else {
                format!("({coeff})*{mono}")
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// `alpha^p + beta (u^p - u v^(p-1) + alpha^p v^p)`.
pub fn system_expression(
    p: u32,
    alpha: &FieldElement,
    beta: &FieldElement,
    u: &FieldElement,
    v: &FieldElement,
) -> FieldElement {
    let p = p as i64;
    let ap = alpha.pow(p).expect("nonnegative power");
    let inner = &(&u.pow(p).expect("power") - &(u * &v.pow(p - 1).expect("power")))
        + &(&ap * &v.pow(p).expect("power"));
    &ap + &(beta * &inner)
}

/// The final polynomial in `v1` and the expression for `u` given `v1`.
pub struct CyclicSystem {
    pub polynomial: UniPoly,
    c: FieldElement,
    ratio: FieldElement,
}

impl CyclicSystem {
    pub fn new(alphas: [&FieldElement; 3], beta: &FieldElement) -> Result<Self> {
        let p = beta.field().characteristic() as i64;
        let [a1, a2, a3] = alphas;
        let ratio = a1.checked_div(a2)?;
        let r = ratio.pow(p - 1).expect("nonzero");
        let r1 = &r - &beta.field().one();
        if r1.is_zero() {
            return Err(Error::Precondition(
                "(alpha1/alpha2)^(p-1) = 1: alpha2 is an F_p-multiple of alpha1".into(),
            ));
        }
        let pw = |x: &FieldElement| x.pow(p).expect("nonnegative power");
        let (a1p, a2p, a3p) = (pw(a1), pw(a2), pw(a3));
        let diff = &a2p - &a1p;
        let c = &(&a3p - &a1p) + &diff.checked_div(&r1)?;
        let n = (2 * p - 1) as usize;
        let mut coeffs = vec![beta.field().zero(); n + 1];
        coeffs[n] = -(&(&r1 * beta) * &a1p);
        coeffs[(p - 1) as usize] = &r1 * &(&c + &(beta * &a3p));
        coeffs[0] = -diff;
        Ok(CyclicSystem {
            polynomial: UniPoly::trimmed(coeffs),
            c,
            ratio,
        })
    }

    /// `u = (C + beta (alpha3^p - alpha1^p v^p)) / beta`.
    pub fn u_for(&self, alphas: [&FieldElement; 3], beta: &FieldElement, v: &FieldElement) -> FieldElement {
        let p = beta.field().characteristic() as i64;
        let pw = |x: &FieldElement, e: i64| x.pow(e).expect("nonnegative power");
        let inner = &pw(alphas[2], p) - &(&pw(alphas[0], p) * &pw(v, p));
        (&self.c + &(beta * &inner))
            .checked_div(beta)
            .expect("beta nonzero")
    }
}

/// Constructs a common cyclic splitting field for `[alpha_i, beta)_p`.
pub fn cyclic_link_three(
    alphas: [&FieldElement; 3],
    beta: &FieldElement,
    root_cap: u32,
    root_budget: u64,
) -> Result<CyclicLink> {
    let field = beta.field().clone();
    if alphas.iter().any(|a| a.field() != &field) {
        return Err(Error::FieldMismatch);
    }
    let p = field.characteristic();
    if beta.is_zero() {
        return Err(Error::Precondition("beta must be nonzero".into()));
    }
    if pth_root(beta).is_some() {
        return Err(Error::Precondition(format!("beta = {beta} is a p-th power; every [alpha, beta) is split")));
    }
    for (i, a) in alphas.iter().enumerate() {
        if artin_schreier_image_test(a).is_in_image() {
            return Err(Error::Precondition(format!(
                "alpha{} = {a} lies in the image of l -> l^p - l",
                i + 1
            )));
        }
    }
    let r = alphas[0].checked_div(alphas[1])?.pow(p as i64 - 1).expect("nonzero");
    if r.is_one() {
        return Err(Error::Precondition(
            "(alpha1/alpha2)^(p-1) = 1: alpha2 is an F_p-multiple of alpha1".into(),
        ));
    }
    if let Some(relation) = slot_dependence(alphas, p) {
        return Ok(CyclicLink::DelegatedToPair { relation });
    }
    let system = CyclicSystem::new(alphas, beta)?;
    let degree = system.polynomial.degree().expect("nonzero polynomial");
    let (root, examined) = find_root(&system.polynomial, root_cap, root_budget);
    let Some(v1) = root else {
        let identities_mod_polynomial = verify_identities_generically(alphas, beta)?.ok();
        return Ok(CyclicLink::RootOverExtension {
            polynomial: system.polynomial.format("v1"),
            degree,
            examined,
            identities_mod_polynomial,
        });
    };
    let u = system.u_for(alphas, beta, &v1);
    let v = [v1.clone(), &system.ratio * &v1, field.one()];
    let exprs: Vec<FieldElement> = (0..3)
        .map(|i| system_expression(p, alphas[i], beta, &u, &v[i]))
        .collect();
    if exprs[0] != exprs[1] || exprs[0] != exprs[2] {
        return Err(Error::Internal(format!(
            "system identities failed for v1 = {v1}: {} / {} / {}",
            exprs[0], exprs[1], exprs[2]
        )));
    }
    let theta = exprs[0].clone();
    let mut witnesses = Vec::new();
    for (alpha, vi) in alphas.iter().zip(&v) {
        let a = SymbolAlgebra::new((*alpha).clone(), beta.clone())?;
        let t = cyclic_witness(&a, &u, vi);
        if a.artin_schreier(&t) != a.scalar(&theta) {
            return Err(Error::Internal(format!("witness {t} fails in {a}")));
        }
        witnesses.push(witness_record(&a, &t));
    }
    Ok(CyclicLink::CommonCyclic(CommonCyclic {
        p,
        field: field.descriptor(),
        alphas: alphas.iter().map(|a| a.to_string()).collect(),
        beta: beta.to_string(),
        theta: theta.to_string(),
        u: u.to_string(),
        v: v.iter().map(ToString::to_string).collect(),
        polynomial: system.polynomial.format("v1"),
        degree,
        witnesses,
    }))
}

/// With `v1` as an indeterminate and `u`, `v2`, `v3` chosen as in the
/// constructor, checks `E2 - E1 = -P(v1)` and `(r - 1)(E3 - E1) = P(v1)` with
/// `r = (alpha1/alpha2)^(p-1)` as polynomial identities over the field, so
/// every root of `P` solves the system.
pub fn verify_identities_generically(
    alphas: [&FieldElement; 3],
    beta: &FieldElement,
) -> Result<VerificationReport> {
    let field = beta.field();
    let p = field.characteristic() as usize;
    let system = CyclicSystem::new(alphas, beta)?;
    let pw = |x: &FieldElement| x.pow(p as i64).expect("nonnegative power");
    let a1p = pw(alphas[0]);
    let mut u = vec![field.zero(); p + 1];
    u[0] = &system.c.checked_div(beta)? + &pw(alphas[2]);
    u[p] = -a1p;
    let u = UniPoly(u);
    let v = [
        UniPoly(vec![field.zero(), field.one()]),
        UniPoly(vec![field.zero(), system.ratio.clone()]),
        UniPoly(vec![field.one()]),
    ];
    let e: Vec<UniPoly> = (0..3)
        .map(|i| {
            let inner = u
                .pow(p)
                .sub(&u.mul(&v[i].pow(p - 1)))
                .add(&v[i].pow(p).scale(&pw(alphas[i])));
            inner.scale(beta).add(&UniPoly(vec![pw(alphas[i])]))
        })
        .collect();
    let r1 = &system.ratio.pow(p as i64 - 1).expect("nonzero") - &field.one();
    let minus_p = system.polynomial.scale(&-field.one());
    let mut report = VerificationReport::default();
    let residual = e[1].sub(&e[0]);
    report.push(
        "E2 - E1 = -P(v1)",
        residual == minus_p,
        format!("E2 - E1 = {}", residual.format("v1")),
    );
    let residual = e[2].sub(&e[0]).scale(&r1);
    report.push(
        "(r - 1)(E3 - E1) = P(v1)",
        residual == system.polynomial,
        format!("(r - 1)(E3 - E1) = {}", residual.format("v1")),
    );
    Ok(report)
}

/// `t = x' + (u + v x') y` with `x' = x + alpha`, so `x'^p - x' = alpha^p` and
/// `t^p - t = alpha^p + beta (u^p - u v^(p-1) + alpha^p v^p)`.
pub fn cyclic_witness(a: &SymbolAlgebra, u: &FieldElement, v: &FieldElement) -> AlgebraElement {
    let x_shift = a.add(&a.x(), &a.scalar(a.alpha()));
    let m = a.add(&a.scalar(u), &a.scale(v, &x_shift));
    a.add(&x_shift, &a.multiply(&m, &a.y()))
}

/// Finds `alpha3 - c1 alpha1 - c2 alpha2` or `alpha2 - c1 alpha1` in the
/// image of the Artin-Schreier map, when the test decides it.
fn slot_dependence(alphas: [&FieldElement; 3], p: u32) -> Option<String> {
    let field = alphas[0].field();
    for c1 in 0..p as i64 {
        let rest = alphas[1] - &(&field.from_int(c1) * alphas[0]);
        if artin_schreier_image_test(&rest).is_in_image() {
            return Some(format!("alpha2 - {c1}*alpha1 lies in the image of l -> l^p - l"));
        }
    }
    for c2 in 0..p as i64 {
        for c1 in 0..p as i64 {
            let rest = &(alphas[2] - &(&field.from_int(c1) * alphas[0]))
                - &(&field.from_int(c2) * alphas[1]);
            if artin_schreier_image_test(&rest).is_in_image() {
                return Some(format!(
                    "alpha3 - {c1}*alpha1 - {c2}*alpha2 lies in the image of l -> l^p - l"
                ));
            }
        }
    }
    None
}

/// Rational-root search: after clearing denominators a root `r/s` has `r`
/// dividing the constant term and `s` dividing the leading term.
pub fn find_root(poly: &UniPoly, cap: u32, budget: u64) -> (Option<FieldElement>, u64) {
    let Some(n) = poly.degree() else {
        return (None, 0);
    };
    let field = poly.0[0].field().clone();
    let gf = field.gf();
    if poly.0[0].is_zero() {
        return (Some(field.zero()), 1);
    }
    // common denominator
    let mut den = MultiPoly::one();
    for c in &poly.0 {
        let g = crate::fields::gcd::gcd(&den, c.denominator(), gf);
        den = den.mul(&c.denominator().div_exact(&g, gf).expect("gcd divides"), gf);
    }
    let coeffs: Vec<MultiPoly> = poly
        .0
        .iter()
        .map(|c| {
            let factor = den.div_exact(c.denominator(), gf).expect("multiple");
            c.numerator().mul(&factor, gf)
        })
        .collect();
    let pool = CandidatePool::new(&field, cap);
    let size = pool.size();
    let mut examined = 0u64;
    let mut numerators = Vec::new();
    let mut denominators = Vec::new();
    for i in 1..size {
        if examined >= budget {
            break;
        }
        examined += 1;
        let cand = pool.get_poly(i);
        if coeffs[0].div_exact(&cand, gf).is_some() {
            numerators.push(cand.clone());
        }
        if cand.leading_coeff() == crate::fields::GaloisScalar::ONE && coeffs[n].div_exact(&cand, gf).is_some() {
            denominators.push(cand);
        }
    }
    for s in &denominators {
        let s_pows: Vec<MultiPoly> = (0..=n).map(|k| s.pow(k as u32, gf)).collect();
        for r in &numerators {
            if examined >= budget {
                return (None, examined);
            }
            examined += 1;
            let mut acc = MultiPoly::zero();
            let mut r_pow = MultiPoly::one();
            for (k, c) in coeffs.iter().enumerate() {
                if !c.is_zero() {
                    acc = acc.add(&c.mul(&r_pow, gf).mul(&s_pows[n - k], gf), gf);
                }
                r_pow = r_pow.mul(r, gf);
            }
            if acc.is_zero() {
                let root = FieldElement::new(&field, r.clone(), s.clone()).expect("nonzero");
                debug_assert!(poly.eval(&root).is_zero());
                return (Some(root), examined);
            }
        }
    }
    (None, examined)
}

/// Checks the three system expressions against `theta` and every witness by
/// multiplication.
pub fn verify_cyclic_link_three(result: &CommonCyclic) -> Result<VerificationReport> {
    let field = FunctionField::parse_descriptor(&result.field)?;
    let alphas: Vec<FieldElement> = result
        .alphas
        .iter()
        .map(|a| field.parse(a))
        .collect::<Result<_>>()?;
    let beta = field.parse(&result.beta)?;
    let theta = field.parse(&result.theta)?;
    let u = field.parse(&result.u)?;
    let v: Vec<FieldElement> = result.v.iter().map(|s| field.parse(s)).collect::<Result<_>>()?;
    let mut report = VerificationReport::default();
    if alphas.len() != 3 || v.len() != 3 || result.witnesses.len() != 3 {
        report.push("shape", false, "expected three slots, three v values and three witnesses");
        return Ok(report);
    }
    for i in 0..3 {
        let e = system_expression(result.p, &alphas[i], &beta, &u, &v[i]);
        report.push(
            format!("system equation {}", i + 1),
            e == theta,
            format!("alpha{0}^p + beta(u^p - u v{0}^(p-1) + alpha{0}^p v{0}^p) = {e}", i + 1),
        );
    }
    for (i, (alpha, w)) in alphas.iter().zip(&result.witnesses).enumerate() {
        let a = SymbolAlgebra::new(alpha.clone(), beta.clone())?;
        let name = format!("witness {}", i + 1);
        match a.element_from_terms(&w.terms) {
            Ok(t) => {
                let lhs = a.artin_schreier(&t);
                report.push(name, lhs == a.scalar(&theta), format!("t^p - t = {lhs} in {a}"));
            }
            Err(e) => report.push(name, false, e.to_string()),
        }
    }
    report.push(
        "theta outside the Artin-Schreier image",
        !artin_schreier_image_test(&theta).is_in_image(),
        format!("theta = {theta}"),
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2ab() -> FunctionField {
        FunctionField::new(2, 1, &["a", "b"]).unwrap()
    }

    fn alg(f: &FunctionField, g: &str, h: &str) -> SymbolAlgebra {
        SymbolAlgebra::new(f.parse(g).unwrap(), f.parse(h).unwrap()).unwrap()
    }

    #[test]
    fn equal_first_slots_are_cyclically_linked() {
        let f = f2ab();
        let algebras = [alg(&f, "a^-1", "b"), alg(&f, "a^-1", "a"), alg(&f, "a^-1", "a*b+1")];
        let LinkageOutcome::Found(cert) = triple_linkage_search(&algebras, 10_000, 1).unwrap() else {
            panic!("no certificate");
        };
        assert_eq!(cert.linkage, LinkageKind::Cyclic);
        assert_eq!(cert.datum, "1/a");
        assert!(!cert.degenerate);
        assert!(verify_linkage_certificate(&cert).unwrap().ok());
    }

    #[test]
    fn split_triple_is_degenerate() {
        let f = f2ab();
        let algebras = [alg(&f, "0", "b"), alg(&f, "0", "b"), alg(&f, "0", "b")];
        let LinkageOutcome::Found(cert) = triple_linkage_search(&algebras, 10_000, 1).unwrap() else {
            panic!("no certificate");
        };
        assert!(cert.degenerate);
        assert!(verify_linkage_certificate(&cert).unwrap().ok());
    }

    #[test]
    fn perturbed_datum_fails() {
        let f = f2ab();
        let algebras = [alg(&f, "a^-1", "b"), alg(&f, "a^-1", "a"), alg(&f, "a^-1", "a*b+1")];
        let LinkageOutcome::Found(mut cert) = triple_linkage_search(&algebras, 10_000, 1).unwrap() else {
            panic!("no certificate");
        };
        cert.datum = "1/a + 1".into();
        let report = verify_linkage_certificate(&cert).unwrap();
        assert!(!report.ok());
        assert_eq!(report.failures().len(), 3);
    }

    #[test]
    fn class_sets() {
        let ctx = ValuationContext::standard(&f2ab()).unwrap();
        let algebras = prop_no4_algebras(&ctx).unwrap();
        let expected = [
            [ValueClass::frac(1, 2, 1, 2), ValueClass::frac(0, 1, 1, 2)],
            [ValueClass::frac(1, 2, 1, 2), ValueClass::frac(1, 2, 0, 1)],
            [ValueClass::frac(1, 2, 0, 1), ValueClass::frac(0, 1, 1, 2)],
        ];
        for (a, e) in algebras.iter().zip(expected) {
            assert_eq!(class_constraint_set(a, &ctx).unwrap(), e.into_iter().collect());
        }
        let cert = prop_no4_certificate(&ctx).unwrap();
        assert_eq!(cert.w_fourth, Value::frac(1, 1, 1, 2));
        assert!(verify_non_linkage_certificate(&cert).unwrap().ok());
    }

    #[test]
    fn cyclic_constructor_over_f4() {
        let f = FunctionField::new(2, 2, &["b"]).unwrap();
        let a1 = f.parse("w").unwrap();
        let a2 = f.parse("b^-1").unwrap();
        let a3 = f.parse("w*b^-1").unwrap();
        let beta = f.parse("b").unwrap();
        let system = CyclicSystem::new([&a1, &a2, &a3], &beta).unwrap();
        assert_eq!(system.polynomial.degree(), Some(3));
        let out = cyclic_link_three([&a1, &a2, &a3], &beta, 2, 100_000).unwrap();
        if let CyclicLink::CommonCyclic(c) = &out {
            assert!(verify_cyclic_link_three(c).unwrap().ok());
        }
        assert!(verify_identities_generically([&a1, &a2, &a3], &beta).unwrap().ok());
        let out = cyclic_link_three([&a1, &a2, &a1], &beta, 2, 1000).unwrap();
        assert!(matches!(out, CyclicLink::DelegatedToPair { .. }));
    }

    #[test]
    fn rational_roots_are_found() {
        let f = FunctionField::new(3, 2, &["b"]).unwrap();
        let root = f.parse("(b + 1)/b").unwrap();
        let v = f.parse("b").unwrap();
        // (X - root)(X^2 + b) = X^3 - root X^2 + b X - b root
        let poly = UniPoly(vec![-(&v * &root), v.clone(), -root.clone(), f.one()]);
        assert!(poly.eval(&root).is_zero());
        let (found, _) = find_root(&poly, 1, 100_000);
        assert_eq!(found, Some(root));
    }
}
