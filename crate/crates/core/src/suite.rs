//! The reproduction bundle: five certificates, each verified and compared
//! against a table of expected values.

use std::collections::BTreeSet;
use std::path::Path;

use serde::Serialize;

use crate::algebra::SymbolAlgebra;
use crate::certificate::{
    lemma_classes, verify_certificate, Certificate, CertificateFile, CyclicRun, CyclicTriple,
    IsotropyOutcome, IsotropyRun, PfisterEvidence, RunConfig,
};
use crate::error::{Error, Result};
use crate::fields::FunctionField;
use crate::linkage::{
    cyclic_link_three, prop_no4_algebras, prop_no4_certificate, triple_linkage_search, CyclicLink,
    LinkageOutcome,
};
use crate::qforms::PfisterForm;
use crate::search::{seeded_rng, CandidatePool};
use crate::valuation::{Value, ValueClass, ValuationContext};

/// Exhaustive budget for the triple-linkage demo: all `4^9` coefficient tuples.
pub const LINK3_BUDGET: u64 = 262_144;
pub const ROOT_BUDGET: u64 = 100_000;
pub const QFORM_BUDGET: u64 = 20_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpectedValues {
    pub constraint_sets: Vec<BTreeSet<ValueClass>>,
    pub w_fourth: Value,
    /// Degree of the final polynomial for each constructor demo.
    pub constructor_degrees: Vec<usize>,
    pub anisotropic_form: &'static str,
    pub isotropic_control: &'static str,
}

impl Default for ExpectedValues {
    fn default() -> Self {
        let half = |s: i64, t: i64| ValueClass::frac(s, 2, t, 2);
        ExpectedValues {
            constraint_sets: vec![
                [half(1, 1), half(0, 1)].into_iter().collect(),
                [half(1, 1), half(1, 0)].into_iter().collect(),
                [half(1, 0), half(0, 1)].into_iter().collect(),
            ],
            w_fourth: Value::frac(1, 1, 1, 2),
            constructor_degrees: vec![3, 5, 3],
            anisotropic_form: "<<b1,b2; a^-1]]",
            isotropic_control: "<<w,w + 1; w]]",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteItem {
    pub name: String,
    pub file: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub header: String,
    pub items: Vec<SuiteItem>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    pub fn first_failure(&self) -> Option<&SuiteItem> {
        self.items.iter().find(|i| !i.passed)
    }
}

type Built = (Certificate, Vec<String>);

fn as_set(classes: &[ValueClass]) -> BTreeSet<ValueClass> {
    classes.iter().copied().collect()
}

fn build_prop_no4(config: &RunConfig, expected: &ExpectedValues) -> Result<Built> {
    let field = FunctionField::parse_descriptor(&config.field)?;
    let ctx = ValuationContext::standard(&field)?;
    let cert = prop_no4_certificate(&ctx)?;
    let mut problems = Vec::new();
    let sets: Vec<BTreeSet<ValueClass>> = cert.constraint_sets.iter().map(|s| as_set(s)).collect();
    if sets != expected.constraint_sets {
        problems.push(format!("constraint sets {sets:?}"));
    }
    if cert.w_fourth != expected.w_fourth {
        problems.push(format!("w4 = {}, expected {}", cert.w_fourth, expected.w_fourth));
    }
    Ok((Certificate::NonLinkage(cert), problems))
}

fn build_lemma(config: &RunConfig, expected: &ExpectedValues) -> Result<Built> {
    let field = FunctionField::parse_descriptor(&config.field)?;
    let ctx = ValuationContext::standard(&field)?;
    let algebras = prop_no4_algebras(&ctx)?;
    let cert = lemma_classes(&ctx, &algebras[..3])?;
    let mut problems = Vec::new();
    let sets: Vec<BTreeSet<ValueClass>> = cert.constraint_sets.iter().map(|s| as_set(s)).collect();
    if sets != expected.constraint_sets {
        problems.push(format!("constraint sets {sets:?}"));
    }
    if !cert.intersection.is_empty() {
        problems.push("class sets intersect".into());
    }
    Ok((Certificate::LemmaClasses(cert), problems))
}

/// Three quaternion algebras with `F_4` slots over `F_4(a,b)`, drawn from the seed.
pub fn link3_demo_algebras(seed: u64) -> Result<Vec<SymbolAlgebra>> {
    let field = FunctionField::new(2, 2, &["a", "b"])?;
    let constants = CandidatePool::new(&field, 0);
    let mut rng = seeded_rng(seed);
    (0..3)
        .map(|_| {
            let gamma = constants.random_nonzero(&mut rng);
            let delta = constants.random_nonzero(&mut rng);
            SymbolAlgebra::new(gamma, delta)
        })
        .collect()
}

fn build_link3(config: &RunConfig) -> Result<Built> {
    let algebras = link3_demo_algebras(config.seed)?;
    let budget = config.budget.unwrap_or(LINK3_BUDGET);
    match triple_linkage_search(&algebras, budget, config.cap)? {
        LinkageOutcome::Found(cert) => Ok((Certificate::Linkage(cert), Vec::new())),
        LinkageOutcome::Unknown { examined, reason } => Err(Error::Precondition(format!(
            "no certificate after {examined} evaluations ({reason})"
        ))),
    }
}

/// Slot choices for the constructor demos: `(descriptor, alphas, beta)`.
pub const CONSTRUCT3_DEMOS: [(&str, [&str; 3], &str); 3] = [
    ("F4(b)", ["w", "b^-1", "w*b^-1"], "b"),
    ("F9(b)", ["w", "b^-1", "w*b^-1"], "b"),
    ("F4(b)", ["(w*b + 1)/b", "(b + w)/b", "w + 1"], "b + 1"),
];

pub fn cyclic_run(descriptor: &str, alphas: [&str; 3], beta: &str, cap: u32, budget: u64) -> Result<CyclicRun> {
    let field = FunctionField::parse_descriptor(descriptor)?;
    let parsed = alphas.iter().map(|a| field.parse(a)).collect::<Result<Vec<_>>>()?;
    let beta = field.parse(beta)?;
    let result = cyclic_link_three([&parsed[0], &parsed[1], &parsed[2]], &beta, cap, budget)?;
    Ok(CyclicRun {
        field: field.descriptor(),
        alphas: parsed.iter().map(ToString::to_string).collect(),
        beta: beta.to_string(),
        root_cap: cap,
        root_budget: budget,
        result,
    })
}

fn build_construct3(config: &RunConfig, expected: &ExpectedValues) -> Result<Built> {
    let budget = config.budget.unwrap_or(ROOT_BUDGET);
    let mut runs = Vec::new();
    let mut problems = Vec::new();
    for ((descriptor, alphas, beta), want) in CONSTRUCT3_DEMOS.iter().zip(&expected.constructor_degrees) {
        let run = cyclic_run(descriptor, *alphas, beta, config.cap, budget)?;
        let degree = match &run.result {
            CyclicLink::CommonCyclic(c) => Some(c.degree),
            CyclicLink::RootOverExtension { degree, .. } => Some(*degree),
            CyclicLink::DelegatedToPair { .. } => None,
        };
        if degree != Some(*want) {
            problems.push(format!("{descriptor}: degree {degree:?}, expected {want}"));
        }
        runs.push(run);
    }
    Ok((Certificate::CyclicTriple(CyclicTriple { runs }), problems))
}

pub fn isotropy_run(descriptor: &str, form: &str, cap: u32, budget: u64, seed: u64) -> Result<IsotropyRun> {
    let field = FunctionField::parse_descriptor(descriptor)?;
    let form = PfisterForm::parse(form, &field)?;
    let outcome = IsotropyOutcome::from(&form.isotropy_search(cap, budget, seed)?);
    Ok(IsotropyRun {
        field: field.descriptor(),
        form: form.to_string(),
        cap,
        budget,
        seed,
        outcome,
    })
}

fn build_qform(config: &RunConfig, expected: &ExpectedValues) -> Result<Built> {
    let budget = config.budget.unwrap_or(QFORM_BUDGET);
    let main = isotropy_run("F2(a,b1,b2,b3)", expected.anisotropic_form, config.cap, budget, config.seed)?;
    let control = isotropy_run("F4", expected.isotropic_control, config.cap, budget, config.seed)?;
    let mut problems = Vec::new();
    if !matches!(main.outcome, IsotropyOutcome::NoWitnessFound { .. }) {
        problems.push(format!("{} was found isotropic", main.form));
    }
    if !matches!(control.outcome, IsotropyOutcome::Isotropic { .. }) {
        problems.push(format!("{} over F4 was not found isotropic", control.form));
    }
    Ok((
        Certificate::PfisterEvidence(PfisterEvidence {
            runs: vec![main, control],
        }),
        problems,
    ))
}

/// Runs every item, writes one certificate per item into `out`, and reports
/// per-item verification against `expected`.
pub fn run_paper_suite(config: &RunConfig, expected: &ExpectedValues, out: &Path) -> Result<SuiteReport> {
    std::fs::create_dir_all(out).map_err(|e| Error::Certificate(format!("{}: {e}", out.display())))?;
    let items: [(&str, &str, Box<dyn Fn() -> Result<Built>>); 5] = [
        ("prop-no4", "prop_no4.json", Box::new(|| build_prop_no4(config, expected))),
        ("lemma-classes", "lemma_classes.json", Box::new(|| build_lemma(config, expected))),
        ("link3", "link3.json", Box::new(|| build_link3(config))),
        ("construct3", "construct3.json", Box::new(|| build_construct3(config, expected))),
        ("qform", "qform.json", Box::new(|| build_qform(config, expected))),
    ];
    let mut report = SuiteReport {
        header: config.header(),
        items: Vec::new(),
    };
    for (name, file, build) in items {
        let item = match build() {
            Ok((body, problems)) => {
                let cert = CertificateFile::new(config.clone(), body);
                cert.write(&out.join(file))?;
                let verification = verify_certificate(&cert)?;
                let mut details: Vec<String> = verification
                    .failures()
                    .iter()
                    .map(|c| format!("{}: {}", c.name, c.detail))
                    .collect();
                details.extend(problems);
                SuiteItem {
                    name: name.into(),
                    file: file.into(),
                    passed: details.is_empty(),
                    detail: if details.is_empty() {
                        format!("{} checks passed", verification.checks.len())
                    } else {
                        details.join("; ")
                    },
                }
            }
            Err(e) => SuiteItem {
                name: name.into(),
                file: file.into(),
                passed: false,
                detail: e.to_string(),
            },
        };
        report.items.push(item);
    }
    Ok(report)
}
