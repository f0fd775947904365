//! `ctrec`: constant terms, Dyson checks and recurrence certificates from the
//! command line.
//!
//! Exit codes: 0 success, 1 mathematical failure, 2 input error, 3 resource
//! limit, 4 inconclusive elimination.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use ctrec_core::annihilator::{certify, default_shift_names, verify_operator, ProductOracle, DEFAULT_GRID};
use ctrec_core::certificate::{certificate_to_json, operator_to_json, read_operator, SpecFile};
use ctrec_core::dyson::{self, DysonInstance, RecursiveEvaluator};
use ctrec_core::expr_parse::{parse_laurent, ExprSource};
use ctrec_core::{DiffOperator, Error, MultiIndex, ResourceLimits};

#[derive(Parser, Debug)]
#[command(name = "ctrec", version, about = "Constant terms of Laurent-polynomial products and their pure recurrences")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,

    #[arg(long, global = true, default_value_t = 1_000_000)]
    max_spairs: usize,

    #[arg(long, global = true, default_value_t = 1_000_000)]
    max_terms: usize,

    #[arg(long, global = true, default_value_t = 600)]
    timeout_seconds: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Constant term of a Laurent-polynomial expression.
    Ct {
        /// Comma-separated variable names.
        #[arg(long, value_delimiter = ',', required = true)]
        vars: Vec<String>,
        expr: String,
    },
    /// Dyson constant term G(a) by brute force, recursion and/or the multinomial.
    Dyson {
        #[arg(long)]
        n: usize,
        /// Comma-separated exponents a_1..a_n.
        #[arg(long, value_delimiter = ',', conflicts_with = "amax", required_unless_present = "amax")]
        a: Option<Vec<u32>>,
        /// Check every a in {0..amax}^n.
        #[arg(long)]
        amax: Option<u32>,
        #[arg(long, value_enum, default_value_t = Method::All)]
        method: Method,
    },
    /// Exact check of sum_j prod_{i != j} (1 - x_j/x_i)^-1 = 1.
    Lagrange {
        #[arg(long)]
        n: usize,
    },
    /// Discover a pure recurrence for prod R_i^a_i and write a certificate.
    Annihilate {
        /// Spec file (JSON with n, vars, R, dehomogenize).
        spec: PathBuf,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: u32,
        /// Where to write the certificate JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Largest accepted n.
        #[arg(long, default_value_t = 4)]
        max_n: usize,
    },
    /// Re-verify a stored operator against the brute-force constant-term oracle.
    Verify {
        /// Certificate, operator JSON, or an expression in A1..An.
        operator: PathBuf,
        /// Spec file the operator is claimed to annihilate.
        spec: PathBuf,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: u32,
    },
    /// Print the spec file for the Dyson product in n variables.
    DysonSpec {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        dehomogenize: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Method {
    Brute,
    Recursive,
    Formula,
    All,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn math(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::ResourceLimit { .. } => 3,
            Error::NoRecurrence { .. } => 4,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let limits = ResourceLimits {
        max_spairs: cli.max_spairs,
        max_terms: cli.max_terms,
        timeout: Duration::from_secs(cli.timeout_seconds),
    };
    match &cli.command {
        Command::Ct { vars, expr } => cmd_ct(cli.json, expr, vars),
        Command::Dyson { n, a, amax, method } => cmd_dyson(cli.json, *n, a.as_deref(), *amax, *method, &limits),
        Command::Lagrange { n } => cmd_lagrange(cli.json, *n, &limits),
        Command::Annihilate { spec, grid, out, max_n } => {
            cmd_annihilate(cli.json, spec, *grid, out.as_deref(), *max_n, &limits)
        }
        Command::Verify { operator, spec, grid } => cmd_verify(cli.json, operator, spec, *grid, &limits),
        Command::DysonSpec { n, dehomogenize } => {
            let mut spec = SpecFile::dyson(*n)?;
            spec.dehomogenize = *dehomogenize;
            spec.to_spec()?;
            println!("{}", spec.to_json());
            Ok(())
        }
    }
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("json value"));
}

fn cmd_ct(as_json: bool, expr: &str, vars: &[String]) -> Outcome {
    let src = ExprSource::new(expr, vars.to_vec()).map_err(Error::from)?;
    let p = parse_laurent(&src).map_err(Error::from)?;
    let ct = p.constant_term();
    if as_json {
        print_json(&json!({ "constant_term": ct.to_string() }));
    } else {
        println!("{ct}");
    }
    Ok(())
}

fn cmd_dyson(
    as_json: bool,
    n: usize,
    a: Option<&[u32]>,
    amax: Option<u32>,
    method: Method,
    limits: &ResourceLimits,
) -> Outcome {
    if n == 0 {
        return Err(Failure::input("--n must be at least 1"));
    }
    if let Some(amax) = amax {
        let report = dyson::dyson_verify(n, amax, limits)?;
        if as_json {
            print_json(&serde_json::to_value(&report).expect("report serializes"));
        } else {
            println!("{report}");
        }
        return if report.pass {
            Ok(())
        } else {
            Err(Failure::math(""))
        };
    }
    let a = a.expect("clap requires --a or --amax");
    if a.len() != n {
        return Err(Failure::input(format!("--a has {} entries but --n is {n}", a.len())));
    }
    let a = MultiIndex::new(a.to_vec());
    if method == Method::All {
        let row = dyson::dyson_row(&a, limits, &mut RecursiveEvaluator::new())?;
        if as_json {
            print_json(&serde_json::to_value(&row).expect("row serializes"));
        } else {
            println!("{row}");
        }
        return if row.ok {
            Ok(())
        } else {
            Err(Failure::math(""))
        };
    }
    let inst = DysonInstance::new(a.clone())?;
    let (name, value) = match method {
        Method::Brute => ("brute", dyson::dyson_ct_bruteforce(&inst, limits)?.to_string()),
        Method::Recursive => ("recursive", dyson::dyson_ct_recursive(&inst).to_string()),
        Method::Formula => ("multinomial", dyson::multinomial(&a).to_string()),
        Method::All => unreachable!("handled above"),
    };
    if as_json {
        print_json(&json!({ "a": a.entries(), name: value }));
    } else {
        println!("a={a} {name}={value}");
    }
    Ok(())
}

fn cmd_lagrange(as_json: bool, n: usize, limits: &ResourceLimits) -> Outcome {
    if n == 0 {
        return Err(Failure::input("--n must be at least 1"));
    }
    let holds = dyson::lagrange_check(n, limits)?;
    if as_json {
        print_json(&json!({ "n": n, "holds": holds }));
    } else if holds {
        println!("identity holds (n={n})");
    } else {
        println!("identity FAILS (n={n})");
    }
    if holds {
        Ok(())
    } else {
        Err(Failure::math(""))
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn read_spec(path: &Path) -> Result<ctrec_core::AnnihilatorSpec, Failure> {
    Ok(SpecFile::from_json(&read_file(path)?)?.to_spec()?)
}

fn operator_json(op: &DiffOperator, names: &[String]) -> serde_json::Value {
    json!({
        "text": op.to_pretty_string(names),
        "terms": operator_to_json(op),
    })
}

fn cmd_annihilate(
    as_json: bool,
    spec_path: &Path,
    grid: u32,
    out: Option<&Path>,
    max_n: usize,
    limits: &ResourceLimits,
) -> Outcome {
    let spec = read_spec(spec_path)?;
    if spec.n() > max_n {
        return Err(Failure::input(format!(
            "n = {} exceeds the configured maximum {max_n} (raise --max-n to try anyway)",
            spec.n()
        )));
    }
    let (cert, report) = certify(&spec, grid, limits)?;
    let text = certificate_to_json(&cert);
    if let Some(out) = out {
        fs::write(out, &text).map_err(|e| Failure::input(format!("{}: {e}", out.display())))?;
    }
    let names = spec.ring().shift_names().to_vec();
    if as_json {
        print_json(&json!({
            "operator": operator_json(&cert.operator, &names),
            "good_form": operator_json(&cert.good_form, &names),
            "elimination_basis_size": cert.elimination_basis.len(),
            "homogeneous_degree0": spec.is_homogeneous_degree0(),
            "grid_bound": grid,
            "checked": report.checked,
            "pass": report.pass,
            "out": out.map(|p| p.display().to_string()),
        }));
    } else {
        println!("operator: {}", cert.operator.to_pretty_string(&names));
        println!("good form: {}", cert.good_form.to_pretty_string(&names));
        if cert.elimination_basis.len() > 1 {
            println!("elimination basis: {} operators", cert.elimination_basis.len());
        }
        if !spec.is_homogeneous_degree0() {
            println!("note: R is not homogeneous of degree 0");
        }
        print_report_line(&report, grid, spec.n());
        if let Some(out) = out {
            println!("certificate written to {}", out.display());
        }
    }
    if report.pass {
        Ok(())
    } else {
        Err(Failure::math(""))
    }
}

fn print_report_line(report: &ctrec_core::VerificationReport, grid: u32, n: usize) {
    match &report.first_failure {
        None => println!(
            "verified on grid {{0..{grid}}}^{n}: {} points, all residuals 0",
            report.checked
        ),
        Some((a, r)) => println!("FAIL at a={a}: residual {r}"),
    }
}

fn cmd_verify(as_json: bool, op_path: &Path, spec_path: &Path, grid: u32, limits: &ResourceLimits) -> Outcome {
    let spec = read_spec(spec_path)?;
    let op = read_operator(&read_file(op_path)?, spec.n())?;
    let mut oracle = ProductOracle::constant_term(&spec, limits);
    let report = verify_operator(&op, grid, |a| oracle.value(a))?;
    if as_json {
        print_json(&json!({
            "operator": operator_json(&op, &default_shift_names(spec.n())),
            "grid_bound": grid,
            "checked": report.checked,
            "pass": report.pass,
            "first_failure": report.first_failure.as_ref().map(|(a, r)| json!({
                "a": a.entries(),
                "value": r.to_string(),
            })),
        }));
    } else {
        print_report_line(&report, grid, spec.n());
    }
    if report.pass {
        Ok(())
    } else {
        Err(Failure::math(""))
    }
}
