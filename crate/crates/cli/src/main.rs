use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use quatlink::algebra::SymbolAlgebra;
use quatlink::certificate::{
    explain, lemma_classes, verify_certificate, Certificate, CertificateFile, CyclicTriple,
    PfisterEvidence, RunConfig,
};
use quatlink::fields::FunctionField;
use quatlink::linkage::{
    prop_no4_algebras, prop_no4_certificate, triple_linkage_search, LinkageOutcome,
    VerificationReport,
};
use quatlink::qforms::DEFAULT_ISOTROPY_BUDGET;
use quatlink::search::DEFAULT_CAP;
use quatlink::suite::{cyclic_run, isotropy_run, run_paper_suite, ExpectedValues, LINK3_BUDGET, ROOT_BUDGET};
use quatlink::valuation::ValuationContext;

/// Writes to stdout; a closed pipe ends the process quietly.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        if let Err(e) = write!(std::io::stdout().lock(), $($arg)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
        }
    }};
}

macro_rules! outln {
    ($($arg:tt)*) => {{
        out!($($arg)*);
        out!("\n");
    }};
}

const EXIT_VERIFICATION: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "quatlink", version, about = "Linkage certificates for quaternion and symbol p-algebras")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Base field, e.g. F2(a,b) or F9(b).
    #[arg(long, global = true, default_value = "F2(a,b)")]
    field: String,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Search budget; each command has its own default.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Degree cap for searched coordinates.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: u32,
    /// Directory receiving certificate files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search a common quadratic splitting field of three quaternion algebras.
    Link3 {
        #[arg(long, default_value_t = 2)]
        p: u32,
        /// Algebra `alpha:beta` or `p:alpha:beta`; give exactly three.
        #[arg(long = "alg", alias = "symbol", required = true, num_args = 1)]
        algebras: Vec<String>,
    },
    /// Reproduction items.
    Paper {
        #[command(subcommand)]
        item: PaperItem,
    },
    /// Common cyclic splitting field of `[alpha_i, beta)_p`, i = 1, 2, 3.
    Construct3 {
        #[arg(long)]
        p: Option<u32>,
        /// Three comma-separated slots.
        #[arg(long, value_delimiter = ',', num_args = 1)]
        alphas: Vec<String>,
        #[arg(long)]
        beta: String,
    },
    /// Re-verify a certificate file.
    Verify {
        #[arg(long)]
        cert: PathBuf,
    },
    /// Print the argument recorded in a certificate file.
    Explain {
        #[arg(long)]
        cert: PathBuf,
    },
    /// Quadratic Pfister forms.
    Qform {
        #[command(subcommand)]
        action: QformAction,
    },
}

#[derive(Subcommand, Debug)]
enum PaperItem {
    /// Non-linkage certificate for the four fixed algebras.
    PropNo4,
    /// Class sets bounding w on a common splitting field of three algebras.
    LemmaClasses,
    /// Every item, one certificate file each.
    Suite,
}

#[derive(Subcommand, Debug)]
enum QformAction {
    /// Bounded isotropy search.
    Iso {
        /// Form `<<b1,...; a]]`.
        #[arg(long)]
        form: String,
    },
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(anyhow::Error),
    Verification(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

impl From<quatlink::Error> for Failure {
    fn from(e: quatlink::Error) -> Self {
        match e {
            quatlink::Error::Internal(m) => Failure::Verification(m),
            other => Failure::Usage(other.into()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Verification(m)) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(EXIT_VERIFICATION)
        }
    }
}

fn config_for(global: &GlobalArgs, command: &str, field: &str) -> RunConfig {
    RunConfig {
        command: command.into(),
        field: field.into(),
        seed: global.seed,
        budget: global.budget,
        cap: global.cap,
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let g = &cli.global;
    match &cli.command {
        Command::Link3 { p, algebras } => link3(g, *p, algebras),
        Command::Paper { item } => match item {
            PaperItem::PropNo4 => {
                let config = config_for(g, "paper prop-no4", &g.field);
                let ctx = ValuationContext::standard(&parse_field(&g.field)?)?;
                let cert = CertificateFile::new(config, Certificate::NonLinkage(prop_no4_certificate(&ctx)?));
                emit(g, &cert, "prop_no4.json")
            }
            PaperItem::LemmaClasses => {
                let config = config_for(g, "paper lemma-classes", &g.field);
                let ctx = ValuationContext::standard(&parse_field(&g.field)?)?;
                let algebras = prop_no4_algebras(&ctx)?;
                let body = Certificate::LemmaClasses(lemma_classes(&ctx, &algebras[..3])?);
                emit(g, &CertificateFile::new(config, body), "lemma_classes.json")
            }
            PaperItem::Suite => suite(g),
        },
        Command::Construct3 { p, alphas, beta } => {
            let field = parse_field(&g.field)?;
            if let Some(p) = p {
                if *p != field.characteristic() {
                    return Err(anyhow!("--p {p} does not match the characteristic of {}", g.field).into());
                }
            }
            let [a1, a2, a3] = alphas.as_slice() else {
                return Err(anyhow!("--alphas needs exactly three slots, got {}", alphas.len()).into());
            };
            let budget = g.budget.unwrap_or(ROOT_BUDGET);
            let run = cyclic_run(&g.field, [a1, a2, a3], beta, g.cap, budget)?;
            let config = config_for(g, "construct3", &field.descriptor());
            let body = Certificate::CyclicTriple(CyclicTriple { runs: vec![run] });
            emit(g, &CertificateFile::new(config, body), "construct3.json")
        }
        Command::Verify { cert } => {
            let file = load(cert)?;
            let report = verify_certificate(&file)?;
            print_report(g, &file, &report);
            if report.ok() {
                Ok(())
            } else {
                Err(Failure::Verification(failure_summary(&report)))
            }
        }
        Command::Explain { cert } => {
            let file = load(cert)?;
            match g.format {
                Format::Text => out!("{}", explain(&file)),
                Format::Json => outln!(
                    "{}",
                    serde_json::json!({ "header": file.config.header(), "narrative": explain(&file) })
                ),
            }
            Ok(())
        }
        Command::Qform {
            action: QformAction::Iso { form },
        } => {
            let field = parse_field(&g.field)?;
            let budget = g.budget.unwrap_or(DEFAULT_ISOTROPY_BUDGET);
            let run = isotropy_run(&g.field, form, g.cap, budget, g.seed)?;
            let config = config_for(g, "qform iso", &field.descriptor());
            let body = Certificate::PfisterEvidence(PfisterEvidence { runs: vec![run] });
            emit(g, &CertificateFile::new(config, body), "qform.json")
        }
    }
}

fn parse_field(descriptor: &str) -> Result<FunctionField, Failure> {
    FunctionField::parse_descriptor(descriptor)
        .with_context(|| format!("bad --field `{descriptor}`"))
        .map_err(Failure::Usage)
}

fn load(path: &Path) -> Result<CertificateFile, Failure> {
    CertificateFile::load(path)
        .with_context(|| format!("cannot read certificate {}", path.display()))
        .map_err(Failure::Usage)
}

fn link3(g: &GlobalArgs, p: u32, specs: &[String]) -> Result<(), Failure> {
    if specs.len() != 3 {
        return Err(anyhow!("--alg must be given exactly three times, got {}", specs.len()).into());
    }
    let field = parse_field(&g.field)?;
    if p != 2 || field.characteristic() != 2 {
        return Err(anyhow!("link3 handles quaternion algebras: need --p 2 over a field of characteristic 2").into());
    }
    let algebras = specs
        .iter()
        .map(|s| {
            let full = if s.matches(':').count() == 1 { format!("{p}:{s}") } else { s.clone() };
            SymbolAlgebra::parse_spec(&full, &field).with_context(|| format!("bad algebra `{s}`"))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let config = config_for(g, "link3", &field.descriptor());
    let budget = g.budget.unwrap_or(LINK3_BUDGET);
    match triple_linkage_search(&algebras, budget, g.cap)? {
        LinkageOutcome::Found(cert) => emit(g, &CertificateFile::new(config, Certificate::Linkage(cert)), "link3.json"),
        LinkageOutcome::Unknown { examined, reason } => {
            match g.format {
                Format::Text => {
                    outln!("{}", config.header());
                    outln!("unknown: no certificate after {examined} evaluations ({reason})");
                }
                Format::Json => outln!(
                    "{}",
                    serde_json::json!({
                        "header": config.header(),
                        "outcome": "unknown",
                        "examined": examined,
                        "reason": reason,
                    })
                ),
            }
            Ok(())
        }
    }
}

fn suite(g: &GlobalArgs) -> Result<(), Failure> {
    let config = config_for(g, "paper suite", &g.field);
    let out = g.out.clone().unwrap_or_else(|| PathBuf::from("quatlink-certs"));
    let report = run_paper_suite(&config, &ExpectedValues::default(), &out)?;
    match g.format {
        Format::Text => {
            outln!("{}", report.header);
            for item in &report.items {
                let status = if item.passed { "PASS" } else { "FAIL" };
                outln!("{status} {} -> {}: {}", item.name, out.join(&item.file).display(), item.detail);
            }
        }
        Format::Json => outln!(
            "{}",
            serde_json::to_string_pretty(&report).map_err(|e| Failure::Usage(e.into()))?
        ),
    }
    match report.first_failure() {
        None => Ok(()),
        Some(item) => Err(Failure::Verification(format!("{}: {}", item.name, item.detail))),
    }
}

fn failure_summary(report: &VerificationReport) -> String {
    report
        .failures()
        .iter()
        .map(|c| format!("{}: {}", c.name, c.detail))
        .collect::<Vec<_>>()
        .join("; ")
}

fn print_report(g: &GlobalArgs, file: &CertificateFile, report: &VerificationReport) {
    match g.format {
        Format::Text => {
            outln!("{}", file.config.header());
            for c in &report.checks {
                let status = if c.passed { "ok  " } else { "FAIL" };
                outln!("{status} {}: {}", c.name, c.detail);
            }
            outln!("{}", if report.ok() { "verified" } else { "not verified" });
        }
        Format::Json => outln!(
            "{}",
            serde_json::json!({ "header": file.config.header(), "verified": report.ok(), "checks": report.checks })
        ),
    }
}

/// Verifies a fresh certificate, prints it, and writes it under `--out`.
fn emit(g: &GlobalArgs, cert: &CertificateFile, name: &str) -> Result<(), Failure> {
    let report = verify_certificate(cert)?;
    match g.format {
        Format::Text => {
            out!("{}", explain(cert));
            outln!(
                "verification: {} ({} checks)",
                if report.ok() { "passed" } else { "FAILED" },
                report.checks.len()
            );
        }
        Format::Json => out!("{}", cert.to_json()),
    }
    if let Some(dir) = &g.out {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        let path = dir.join(name);
        cert.write(&path)?;
        if g.format == Format::Text {
            outln!("certificate written to {}", path.display());
        }
    }
    if report.ok() {
        Ok(())
    } else {
        Err(Failure::Verification(failure_summary(&report)))
    }
}

