//! Versioned certificate files, their verification and plain-text narratives.
//!
//! A file is a JSON object carrying `toolVersion`, `schemaVersion`, the run
//! `config` and the certificate body, discriminated by `kind`. Every field
//! element appears in canonical printed form, so a verifier only needs the
//! field descriptor to rebuild everything.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::SymbolAlgebra;
use crate::error::{Error, Result};
use crate::fields::FunctionField;
use crate::linkage::{
    class_constraint_set, classes_text, cyclic_link_three, verify_cyclic_link_three,
    verify_linkage_certificate, verify_non_linkage_certificate, CyclicLink, LinkageCertificate,
    LinkageKind, NonLinkageCertificate, VerificationReport,
};
use crate::qforms::{IsotropyResult, PfisterForm};
use crate::valuation::{Value, ValueClass, ValuationContext};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunConfig {
    pub command: String,
    pub field: String,
    pub seed: u64,
    /// `None` lets every item use its own default budget.
    pub budget: Option<u64>,
    pub cap: u32,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: String::new(),
            field: "F2(a,b)".into(),
            seed: 0,
            budget: None,
            cap: crate::search::DEFAULT_CAP,
        }
    }
}

impl RunConfig {
    pub fn header(&self) -> String {
        let budget = self
            .budget
            .map_or_else(|| "default".to_string(), |b| b.to_string());
        format!(
            "quatlink {TOOL_VERSION} (schema {SCHEMA_VERSION}) command={} field={} seed={} budget={budget} cap={}",
            self.command, self.field, self.seed, self.cap
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CertificateFile {
    pub tool_version: String,
    pub schema_version: u32,
    pub config: RunConfig,
    #[serde(flatten)]
    pub body: Certificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Certificate {
    NonLinkage(NonLinkageCertificate),
    LemmaClasses(LemmaClasses),
    Linkage(LinkageCertificate),
    CyclicTriple(CyclicTriple),
    PfisterEvidence(PfisterEvidence),
}

/// Class sets forcing `w(K) <= (1/2,1/2)` on a common splitting field of three algebras.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LemmaClasses {
    pub field: String,
    pub valuation_variables: (String, String),
    pub algebras: Vec<String>,
    pub constraint_sets: Vec<Vec<ValueClass>>,
    pub intersection: Vec<ValueClass>,
    pub bound: Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CyclicTriple {
    pub runs: Vec<CyclicRun>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CyclicRun {
    pub field: String,
    pub alphas: Vec<String>,
    pub beta: String,
    pub root_cap: u32,
    pub root_budget: u64,
    pub result: CyclicLink,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PfisterEvidence {
    pub runs: Vec<IsotropyRun>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IsotropyRun {
    pub field: String,
    pub form: String,
    pub cap: u32,
    pub budget: u64,
    pub seed: u64,
    pub outcome: IsotropyOutcome,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "camelCase")]
pub enum IsotropyOutcome {
    Isotropic { witness: Vec<String> },
    NoWitnessFound { examined: u64 },
}

impl From<&IsotropyResult> for IsotropyOutcome {
    fn from(r: &IsotropyResult) -> Self {
        match r {
            IsotropyResult::Isotropic(v) => IsotropyOutcome::Isotropic {
                witness: v.iter().map(ToString::to_string).collect(),
            },
            IsotropyResult::NoWitnessFound { examined } => IsotropyOutcome::NoWitnessFound {
                examined: *examined,
            },
        }
    }
}

impl CertificateFile {
    pub fn new(config: RunConfig, body: Certificate) -> Self {
        CertificateFile {
            tool_version: TOOL_VERSION.into(),
            schema_version: SCHEMA_VERSION,
            config,
            body,
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificates serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Certificate(format!("parse error: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Certificate(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())
            .map_err(|e| Error::Certificate(format!("{}: {e}", path.display())))
    }
}

pub fn lemma_classes(ctx: &ValuationContext, algebras: &[SymbolAlgebra]) -> Result<LemmaClasses> {
    if algebras.len() != 3 {
        return Err(Error::LengthMismatch {
            expected: 3,
            found: algebras.len(),
        });
    }
    let sets: Vec<BTreeSet<ValueClass>> = algebras
        .iter()
        .map(|a| class_constraint_set(a, ctx))
        .collect::<Result<_>>()?;
    let intersection = sets[0]
        .iter()
        .filter(|c| sets[1].contains(c) && sets[2].contains(c))
        .copied()
        .collect();
    Ok(LemmaClasses {
        field: ctx.field().descriptor(),
        valuation_variables: (ctx.alpha_name().into(), ctx.beta_name().into()),
        algebras: algebras.iter().map(SymbolAlgebra::spec).collect(),
        constraint_sets: sets.iter().map(|s| s.iter().copied().collect()).collect(),
        intersection,
        bound: Value::frac(1, 2, 1, 2),
    })
}

fn verify_lemma_classes(cert: &LemmaClasses) -> Result<VerificationReport> {
    let field = FunctionField::parse_descriptor(&cert.field)?;
    let ctx = ValuationContext::new(&field, &cert.valuation_variables.0, &cert.valuation_variables.1)?;
    let algebras: Vec<SymbolAlgebra> = cert
        .algebras
        .iter()
        .map(|s| SymbolAlgebra::parse_spec(s, &field))
        .collect::<Result<_>>()?;
    let mut report = VerificationReport::default();
    match lemma_classes(&ctx, &algebras) {
        Ok(fresh) => {
            report.push(
                "constraint sets",
                fresh.constraint_sets == cert.constraint_sets,
                format!(
                    "recomputed {}",
                    fresh
                        .constraint_sets
                        .iter()
                        .map(|s| classes_text(s))
                        .collect::<Vec<_>>()
                        .join(" ")
                ),
            );
            report.push(
                "empty intersection",
                fresh.intersection.is_empty() && cert.intersection.is_empty(),
                format!("recomputed {}", classes_text(&fresh.intersection)),
            );
            report.push(
                "bound",
                cert.bound == fresh.bound,
                format!("w(K) <= {}", fresh.bound),
            );
        }
        Err(e) => report.push("recomputation", false, e.to_string()),
    }
    Ok(report)
}

fn verify_cyclic_run(run: &CyclicRun, index: usize, report: &mut VerificationReport) -> Result<()> {
    let field = FunctionField::parse_descriptor(&run.field)?;
    let alphas = run
        .alphas
        .iter()
        .map(|a| field.parse(a))
        .collect::<Result<Vec<_>>>()?;
    let beta = field.parse(&run.beta)?;
    let label = format!("run {}", index + 1);
    if alphas.len() != 3 {
        report.push(label, false, "expected three slots");
        return Ok(());
    }
    match cyclic_link_three([&alphas[0], &alphas[1], &alphas[2]], &beta, run.root_cap, run.root_budget) {
        Ok(fresh) => report.push(
            format!("{label} reproduces"),
            fresh == run.result,
            "constructor rerun on the recorded slots",
        ),
        Err(e) => report.push(format!("{label} reproduces"), false, e.to_string()),
    }
    match &run.result {
        CyclicLink::CommonCyclic(c) => {
            for check in verify_cyclic_link_three(c)?.checks {
                report.push(format!("{label} {}", check.name), check.passed, check.detail);
            }
        }
        CyclicLink::RootOverExtension {
            identities_mod_polynomial,
            ..
        } => report.push(
            format!("{label} identities modulo the polynomial"),
            *identities_mod_polynomial,
            "every root of the polynomial solves the system",
        ),
        CyclicLink::DelegatedToPair { .. } => {}
    }
    Ok(())
}

fn verify_isotropy_run(run: &IsotropyRun, index: usize, report: &mut VerificationReport) -> Result<()> {
    let field = FunctionField::parse_descriptor(&run.field)?;
    let form = PfisterForm::parse(&run.form, &field)?;
    let label = format!("run {}", index + 1);
    if let IsotropyOutcome::Isotropic { witness } = &run.outcome {
        let v = witness.iter().map(|s| field.parse(s)).collect::<Result<Vec<_>>>()?;
        let nonzero = v.iter().any(|e| !e.is_zero());
        let value = form.evaluate(&v)?;
        report.push(
            format!("{label} witness"),
            nonzero && value.is_zero(),
            format!("q(v) = {value}"),
        );
    }
    let fresh = form.isotropy_search(run.cap, run.budget, run.seed)?;
    report.push(
        format!("{label} reproduces"),
        IsotropyOutcome::from(&fresh) == run.outcome,
        "search rerun with the recorded cap, budget and seed",
    );
    Ok(())
}

/// Re-derives every claim of the certificate from its recorded inputs.
pub fn verify_certificate(file: &CertificateFile) -> Result<VerificationReport> {
    let mut report = match &file.body {
        Certificate::NonLinkage(c) => verify_non_linkage_certificate(c)?,
        Certificate::LemmaClasses(c) => verify_lemma_classes(c)?,
        Certificate::Linkage(c) => verify_linkage_certificate(c)?,
        Certificate::CyclicTriple(c) => {
            let mut report = VerificationReport::default();
            for (i, run) in c.runs.iter().enumerate() {
                verify_cyclic_run(run, i, &mut report)?;
            }
            report
        }
        Certificate::PfisterEvidence(c) => {
            let mut report = VerificationReport::default();
            for (i, run) in c.runs.iter().enumerate() {
                verify_isotropy_run(run, i, &mut report)?;
            }
            report
        }
    };
    report.push(
        "schema version",
        file.schema_version == SCHEMA_VERSION,
        format!("file {}, tool {SCHEMA_VERSION}", file.schema_version),
    );
    Ok(report)
}

fn algebra_label(spec: &str) -> String {
    let mut parts = spec.splitn(3, ':');
    match (parts.next(), parts.next(), parts.next()) {
        (Some(p), Some(a), Some(b)) => format!("[{a}, {b})_{p}"),
        _ => spec.to_string(),
    }
}

/// Plain-text account of the certificate's argument.
pub fn explain(file: &CertificateFile) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", file.config.header());
    match &file.body {
        Certificate::NonLinkage(c) => explain_non_linkage(c, &mut out),
        Certificate::LemmaClasses(c) => explain_lemma(c, &mut out),
        Certificate::Linkage(c) => explain_linkage(c, &mut out),
        Certificate::CyclicTriple(c) => {
            for (i, run) in c.runs.iter().enumerate() {
                explain_cyclic(i, run, &mut out);
            }
        }
        Certificate::PfisterEvidence(c) => {
            for (i, run) in c.runs.iter().enumerate() {
                explain_isotropy(i, run, &mut out);
            }
        }
    }
    out
}

fn explain_non_linkage(c: &NonLinkageCertificate, out: &mut String) {
    let (a, b) = &c.valuation_variables;
    let _ = writeln!(out, "Four quaternion algebras over {} with the ({a},{b})-adic valuation.", c.field);
    for (i, (spec, r)) in c.algebras.iter().zip(&c.ramification).enumerate() {
        let _ = writeln!(
            out,
            "A{} = {}: v(x) = {}, v(y) = {}, v(xy) = {}, classes {}, totally ramified: {}",
            i + 1,
            algebra_label(spec),
            r.value_x,
            r.value_y,
            r.value_xy,
            classes_text(&r.classes),
            r.totally_ramified
        );
    }
    let _ = writeln!(
        out,
        "If K = F[t] splits A1, A2, A3 with w(K) > {}, then v(t) mod Gamma lies in:",
        c.threshold
    );
    for (i, set) in c.constraint_sets.iter().enumerate() {
        let _ = writeln!(out, "  A{}: {}", i + 1, classes_text(set));
    }
    let _ = writeln!(
        out,
        "These sets meet in {}, so w(K) <= {} for every common splitting field of A1, A2, A3.",
        classes_text(&c.intersection),
        c.threshold
    );
    let _ = writeln!(
        out,
        "A4 has w(A4) = -v(x) = {}; a splitting field K of A4 has w(K) >= w(A4).",
        c.w_fourth
    );
    let _ = writeln!(out, "{}", c.conclusion);
}

fn explain_lemma(c: &LemmaClasses, out: &mut String) {
    let _ = writeln!(out, "Three quaternion algebras over {}.", c.field);
    for (i, (spec, set)) in c.algebras.iter().zip(&c.constraint_sets).enumerate() {
        let _ = writeln!(
            out,
            "A{} = {}: a generator t = x + ay + bxy with w > {} has v(t) mod Gamma in {}",
            i + 1,
            algebra_label(spec),
            c.bound,
            classes_text(set)
        );
    }
    let _ = writeln!(out, "intersection {}", classes_text(&c.intersection));
    let _ = writeln!(
        out,
        "any common quadratic splitting field K has w(K) <= {}",
        c.bound
    );
}

fn explain_linkage(c: &LinkageCertificate, out: &mut String) {
    let labels: Vec<String> = c.algebras.iter().map(|s| algebra_label(s)).collect();
    let _ = writeln!(out, "Algebras over {}: {}", c.field, labels.join(", "));
    match c.linkage {
        LinkageKind::Cyclic => {
            let _ = writeln!(out, "common cyclic splitting field F[t : t^2 + t = theta], theta = {}", c.datum);
        }
        LinkageKind::Inseparable => {
            let _ = writeln!(out, "common inseparable splitting field F[sqrt(gamma)], gamma = {}", c.datum);
        }
    }
    let relation = match c.linkage {
        LinkageKind::Cyclic => "t^2 + t = theta",
        LinkageKind::Inseparable => "t^2 = gamma, Trd(t) = 0",
    };
    for (i, w) in c.witnesses.iter().enumerate() {
        let _ = writeln!(out, "  t{} = {} in {} ({relation})", i + 1, w.element, algebra_label(&w.algebra));
    }
    if !c.trace.is_empty() {
        let solved: Vec<String> = c.trace.iter().map(|e| format!("{} = {}", e.name, e.value)).collect();
        let _ = writeln!(out, "solver trace: {}", solved.join(", "));
    }
    for note in &c.notes {
        let _ = writeln!(out, "note: {note}");
    }
    if c.degenerate {
        let _ = writeln!(out, "degenerate: the datum does not define a field extension");
    }
}

fn explain_cyclic(i: usize, run: &CyclicRun, out: &mut String) {
    let _ = writeln!(
        out,
        "run {}: alphas {} and beta = {} over {}",
        i + 1,
        run.alphas.join(", "),
        run.beta,
        run.field
    );
    match &run.result {
        CyclicLink::CommonCyclic(c) => {
            let _ = writeln!(out, "  P(v1) = {} (degree {})", c.polynomial, c.degree);
            let _ = writeln!(out, "  root v1 = {}, v = ({}), u1 = u2 = u3 = {}", c.v[0], c.v.join(", "), c.u);
            let _ = writeln!(out, "  theta = {}", c.theta);
            for (j, w) in c.witnesses.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "  t{} = {} in {} with t^p - t = theta",
                    j + 1,
                    w.element,
                    algebra_label(&w.algebra)
                );
            }
        }
        CyclicLink::DelegatedToPair { relation } => {
            let _ = writeln!(out, "  slots are dependent ({relation}); two algebras already carry the linkage");
        }
        CyclicLink::RootOverExtension {
            polynomial,
            degree,
            examined,
            identities_mod_polynomial,
        } => {
            let _ = writeln!(out, "  P(v1) = {polynomial} (degree {degree})");
            let _ = writeln!(
                out,
                "  no root among {examined} candidates; a root exists over an extension of degree at most {degree}"
            );
            let _ = writeln!(out, "  system identities hold modulo P: {identities_mod_polynomial}");
        }
    }
}

fn explain_isotropy(i: usize, run: &IsotropyRun, out: &mut String) {
    let _ = writeln!(
        out,
        "run {}: {} over {} (cap {}, budget {}, seed {})",
        i + 1,
        run.form,
        run.field,
        run.cap,
        run.budget,
        run.seed
    );
    match &run.outcome {
        IsotropyOutcome::Isotropic { witness } => {
            let _ = writeln!(out, "  isotropic, hence hyperbolic: v = ({})", witness.join(", "));
        }
        IsotropyOutcome::NoWitnessFound { examined } => {
            let _ = writeln!(
                out,
                "  no isotropic vector among {examined} vectors: evidence of anisotropy, not a proof"
            );
        }
    }
}
