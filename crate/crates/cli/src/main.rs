//! `ppg`: command line access to piecewise-projective group elements,
//! witness constructions and the acceptance suites.
//!
//! Exit codes: 0 success, 1 usage, 2 invalid input, 3 a check failed.

mod report;

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ppgroup::constructions::{
    chabauty_escape, escape_report, sample_points, ConstructionError, Searcher,
};
use ppgroup::text::{
    format_document, format_element, parse_document, parse_interval, parse_matrix, parse_number,
    parse_primes, ElementDocument,
};
use ppgroup::{PPMap, PrimeSet};

use report::Report;

#[derive(Parser)]
#[command(name = "ppg", version, about = "Piecewise-projective group elements and witnesses")]
struct Cli {
    /// Write the run report to this file (`-` for stdout)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Largest entry bound for hyperbolic searches
    #[arg(long, global = true)]
    max_bound: Option<i64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an element and print its normal form
    Parse { file: PathBuf },
    /// Print the normalized document
    Format { file: PathBuf },
    /// Print f∘g
    Compose { f: PathBuf, g: PathBuf },
    Invert { file: PathBuf },
    /// Print f g f⁻¹ g⁻¹
    Commutator { f: PathBuf, g: PathBuf },
    /// Evaluate at a point given in the number grammar
    Eval {
        file: PathBuf,
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    Support { file: PathBuf },
    /// Membership in the subgroup over Z[1/T]
    Member {
        file: PathBuf,
        #[arg(long = "T")]
        t: String,
    },
    /// Extend a matrix from an interval and build the commutator element
    LemmaExtend {
        #[arg(long)]
        matrix: String,
        #[arg(long, allow_hyphen_values = true)]
        interval: String,
        #[arg(long = "T")]
        t: String,
    },
    #[command(subcommand)]
    Witness(Witness),
    /// A common exponent moving every element of a set out of Γ_T
    Escape {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        p: u64,
        #[arg(long = "T")]
        t: String,
    },
    #[command(subcommand)]
    Verify(Verify),
}

#[derive(Subcommand)]
enum Witness {
    /// h ∈ Γ_T with g⁻¹hg ∉ Γ_T
    Commensurate {
        #[arg(long)]
        g: PathBuf,
        #[arg(long = "S")]
        s: String,
        #[arg(long = "T")]
        t: String,
        #[arg(long)]
        p: Option<u64>,
    },
    /// Escape exponent of one element
    Unconfine {
        #[arg(long)]
        element: PathBuf,
        #[arg(long)]
        p: u64,
        #[arg(long = "T")]
        t: String,
    },
}

#[derive(Subcommand)]
enum Verify {
    /// Run the acceptance suites
    Suite {
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(e: impl Display) -> Failure {
    Failure {
        code: 1,
        message: e.to_string(),
    }
}

fn invalid(e: impl Display) -> Failure {
    Failure {
        code: 2,
        message: e.to_string(),
    }
}

impl From<ConstructionError> for Failure {
    fn from(e: ConstructionError) -> Self {
        let code = match e {
            ConstructionError::BudgetExhausted { .. } => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<String, Failure>;

fn read_document(path: &Path, report: &mut Report) -> Result<ElementDocument, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    report.input(&path.display().to_string(), text.as_bytes());
    parse_document(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn read_element(path: &Path, report: &mut Report) -> Result<PPMap, Failure> {
    Ok(read_document(path, report)?.element)
}

fn primes(src: &str) -> Result<PrimeSet, Failure> {
    parse_primes(src).map_err(|e| invalid(format!("prime set {src:?}: {e}")))
}

fn element_output(report: &mut Report, f: &PPMap) -> String {
    report.output("element", f);
    format_element(f)
}

fn run(command: &Command, searcher: &Searcher, report: &mut Report) -> Outcome {
    match command {
        Command::Parse { file } => {
            let doc = read_document(file, report)?;
            report.output("pieces", &doc.element.pieces().len());
            Ok(element_output(report, &doc.element))
        }
        Command::Format { file } => {
            let doc = read_document(file, report)?;
            let text = format_document(&doc);
            report.output("document", &text);
            Ok(text.trim_end().to_string())
        }
        Command::Compose { f, g } => {
            let (f, g) = (read_element(f, report)?, read_element(g, report)?);
            Ok(element_output(report, &f.compose(&g)))
        }
        Command::Invert { file } => {
            let f = read_element(file, report)?;
            Ok(element_output(report, &f.inverse()))
        }
        Command::Commutator { f, g } => {
            let (f, g) = (read_element(f, report)?, read_element(g, report)?);
            Ok(element_output(report, &PPMap::commutator(&f, &g)))
        }
        Command::Eval { file, x } => {
            let f = read_element(file, report)?;
            let x = parse_number(x).map_err(|e| invalid(format!("point {x:?}: {e}")))?;
            let y = f.eval(&x);
            report.output("value", &y);
            Ok(y.to_string())
        }
        Command::Support { file } => {
            let s = read_element(file, report)?.support();
            report.output("support", &s);
            report.output("compact", &s.is_compact());
            Ok(s.to_string())
        }
        Command::Member { file, t } => {
            let (f, t) = (read_element(file, report)?, primes(t)?);
            let member = f.in_subgroup(&t);
            report.output("ring", &t);
            report.output("member", &member);
            Ok(member.to_string())
        }
        Command::LemmaExtend { matrix, interval, t } => {
            let h0 = parse_matrix(matrix).map_err(|e| invalid(format!("matrix {matrix:?}: {e}")))?;
            let i = parse_interval(interval)
                .map_err(|e| invalid(format!("interval {interval:?}: {e}")))?;
            let t = primes(t)?;
            let (h, cert) = searcher.lemma_element(&h0, &i, &t)?;
            report.output("certificate", &cert);
            let samples = sample_points(&i, 20);
            let agrees = samples
                .iter()
                .all(|x| h0.apply_finite(x).is_some_and(|y| h.eval(x) == y));
            report.check("agrees on the interval", agrees, "20 exact sample points");
            report.check("compact support", h.support().is_compact(), &h.support().to_string());
            report.check("over the ring", h.in_subgroup(&t), &t.to_list());
            let valid = cert.validate();
            report.check(
                "certificate revalidates",
                valid.is_ok(),
                &valid.err().map(|e| e.0).unwrap_or_default(),
            );
            report.output("element", &h);
            Ok(format!("h1: {}\nh: {}", format_element(&cert.h1), format_element(&h)))
        }
        Command::Witness(Witness::Commensurate { g, s, t, p }) => {
            let g = read_element(g, report)?;
            let (s, t) = (primes(s)?, primes(t)?);
            let w = searcher.commensuration_witness(&g, &s, &t, *p)?;
            report.output("witness", &w);
            let valid = w.certificate.validate();
            report.check(
                "certificate revalidates",
                valid.is_ok() && w.certificate.h == w.h,
                &valid.err().map(|e| e.0).unwrap_or_default(),
            );
            report.check("h in the subgroup", w.h.in_subgroup(&t), &t.to_list());
            let inside = w.h.conjugate_by(&g).in_subgroup(&t);
            report.check("conjugate leaves the subgroup", !inside, "full piecewise conjugation");
            Ok(format!(
                "offending entry {} = {} (p = {}), n = {}\nh: {}",
                w.offending.entry,
                w.offending.value,
                w.offending.prime,
                w.n,
                format_element(&w.h)
            ))
        }
        Command::Witness(Witness::Unconfine { element, p, t }) => {
            let h = read_element(element, report)?;
            let t = primes(t)?;
            let r = escape_report(&h, *p, &t)?;
            report.output("report", &r);
            let mut lines = vec![format!("N = {}", r.threshold)];
            for e in r.below.iter().chain(&r.evidence) {
                let escaped = !e.conjugate_in_ring;
                if e.n >= r.threshold {
                    report.check(&format!("escape at n = {}", e.n), escaped, &e.top_right.to_string());
                }
                lines.push(format!("n = {}: top right {}, escaped {escaped}", e.n, e.top_right));
            }
            Ok(lines.join("\n"))
        }
        Command::Escape { set, p, t } => {
            let t = primes(t)?;
            let mut files: Vec<PathBuf> = fs::read_dir(set)
                .map_err(|e| usage(format!("{}: {e}", set.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "ppg"))
                .collect();
            files.sort();
            let elements = files
                .iter()
                .map(|f| read_element(f, report))
                .collect::<Result<Vec<_>, _>>()?;
            let r = chabauty_escape(&elements, *p, &t)?;
            report.output("n", &r.n);
            report.output("thresholds", &r.reports.iter().map(|x| x.threshold).collect::<Vec<_>>());
            for (file, escaped) in files.iter().zip(&r.escapes) {
                report.check(&format!("{} escapes", file.display()), *escaped, "full piecewise conjugation");
            }
            Ok(format!("n = {}", r.n))
        }
        Command::Verify(Verify::Suite { seed }) => {
            let results = ppgroup_verify::run_all(*seed);
            let mut lines = Vec::new();
            for r in &results {
                report.output("criterion", r);
                report.check(&format!("criterion {}", r.id), r.passed, r.name);
                lines.push(r.line());
            }
            Ok(lines.join("\n"))
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Parse { .. } => "parse",
        Command::Format { .. } => "format",
        Command::Compose { .. } => "compose",
        Command::Invert { .. } => "invert",
        Command::Commutator { .. } => "commutator",
        Command::Eval { .. } => "eval",
        Command::Support { .. } => "support",
        Command::Member { .. } => "member",
        Command::LemmaExtend { .. } => "lemma-extend",
        Command::Witness(Witness::Commensurate { .. }) => "witness commensurate",
        Command::Witness(Witness::Unconfine { .. }) => "witness unconfine",
        Command::Escape { .. } => "escape",
        Command::Verify(_) => "verify suite",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mut report = Report::new(command_name(&cli.command), &args);
    let mut searcher = Searcher::default();
    if let Some(b) = cli.max_bound {
        searcher.budget.max_bound = b;
    }
    let (code, text) = match run(&cli.command, &searcher, &mut report) {
        Ok(text) => (if report.all_passed() { 0 } else { 3 }, Some(text)),
        Err(f) => {
            report.check("run", false, &f.message);
            eprintln!("error: {}", f.message);
            (f.code, None)
        }
    };
    if code == 3 && text.is_some() {
        eprintln!("error: {} check(s) failed", report.failed());
    }
    let doc = report.finish();
    match cli.out.as_deref() {
        Some(p) if p == Path::new("-") => print!("{doc}"),
        other => {
            if let Some(text) = text {
                println!("{text}");
            }
            if let Some(p) = other {
                if let Err(e) = fs::write(p, doc) {
                    eprintln!("error: {}: {e}", p.display());
                    return ExitCode::from(1);
                }
            }
        }
    }
    ExitCode::from(code)
}
