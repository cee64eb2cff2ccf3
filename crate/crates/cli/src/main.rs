//! `quatfact`: factor bivariate quaternionic polynomials from the command line.
//!
//! Exit codes: 0 success, 1 failure (including a residual above tolerance),
//! 2 norm condition violated, 3 mismatched polynomials, 64 usage, parse or
//! input error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use quatfact::bi_factor::{enumerate, equivalent, s_equivalent, t_equivalent, verify, Context};
use quatfact::dual_lift::{build_lift_system, solve_lift, verify_lift};
use quatfact::io::{parse_factorization, parse_poly};
use quatfact::real_poly::{nfc_rank1, rp_quadratic_factors_with};
use quatfact::strategy::{for_var, Registry};
use quatfact::{roots, Error, Factorization, QuatPoly, Real, Tol, Var};

const EXIT_FAILURE: u8 = 1;
const EXIT_NFC: u8 = 2;
const EXIT_MISMATCH: u8 = 3;
const EXIT_USAGE: u8 = 64;

/// Largest change of a residual between `factor` and `verify`.
const REPRODUCE: f64 = 1e-12;

#[derive(Parser, Debug)]
#[command(name = "quatfact", version, about = "Factor bivariate quaternionic polynomials into univariate linear factors")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Variable whose quadratic norm factors are ordered by --order.
    #[arg(long, global = true, value_enum)]
    var: Option<VarArg>,

    /// Permutation of the quadratic norm factors, e.g. 0,2,1.
    #[arg(long, global = true, value_delimiter = ',')]
    order: Option<Vec<usize>>,

    /// Base tolerance; all thresholds are scaled from it.
    #[arg(long, global = true, env = "QUATFACT_EPS", default_value_t = 1e-9)]
    eps: f64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Factorization strategy; defaults to the multiplication technique
    /// for --var.
    #[arg(long, global = true)]
    method: Option<String>,

    /// Real root finder.
    #[arg(long, global = true, default_value = "aberth")]
    finder: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that the norm polynomial splits as P(t)·R(s).
    Nfc { input: PathBuf },
    /// Factor K·Q into linear factors.
    Factor { input: PathBuf },
    /// Factor for every ordering of the norm factors and classify K = 1 runs.
    Enumerate { input: PathBuf },
    /// Compare two factorizations of the same polynomial.
    Equiv { first: PathBuf, second: PathBuf },
    /// Solve for the dual parts lifting two factorizations.
    Lift { first: PathBuf, second: PathBuf },
    /// Recompute the residual of a `factor` report.
    Verify {
        report: PathBuf,
        /// Polynomial file; defaults to the one embedded in the report.
        input: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VarArg {
    S,
    T,
}

impl From<VarArg> for Var {
    fn from(v: VarArg) -> Var {
        match v {
            VarArg::S => Var::S,
            VarArg::T => Var::T,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::Json(_) | Error::InvalidOrder(_) | Error::UnknownStrategy(_) => EXIT_USAGE,
            Error::NfcViolated(_) | Error::NotRankOne { .. } => EXIT_NFC,
            Error::MismatchedPolynomials(_) | Error::DifferentPolynomials(_) => EXIT_MISMATCH,
            _ => EXIT_FAILURE,
        };
        Failure { code, message: e.to_string() }
    }
}

/// Records for the json format, the same content as text, and the exit code.
struct Outcome {
    records: Vec<Value>,
    text: String,
    code: u8,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Json if out.records.len() == 1 => {
                    println!("{}", serde_json::to_string_pretty(&out.records[0]).expect("json value"))
                }
                Format::Json => {
                    for r in &out.records {
                        println!("{r}");
                    }
                }
                Format::Text => print!("{}", out.text),
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    if !(cli.eps > 0.0 && cli.eps.is_finite()) {
        return Err(Failure::usage(format!("--eps must be positive, got {}", cli.eps)));
    }
    let tol = Tol::new(cli.eps);
    let ctx = Context::new(tol).with_finder(roots::finder(&cli.finder).map_err(|e| Failure::usage(e.to_string()))?);
    match &cli.command {
        Command::Nfc { input } => nfc(&read_poly(input)?, &ctx),
        Command::Factor { input } => factor(cli, &read_poly(input)?, &ctx),
        Command::Enumerate { input } => run_enumerate(cli, &read_poly(input)?, &ctx),
        Command::Equiv { first, second } => equiv(&read_factorization(first)?, &read_factorization(second)?, &ctx),
        Command::Lift { first, second } => lift(&read_factorization(first)?, &read_factorization(second)?, &ctx),
        Command::Verify { report, input } => run_verify(report, input.as_deref(), &ctx),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn read_poly(path: &Path) -> Result<QuatPoly, Failure> {
    parse_poly(&read(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn read_factorization(path: &Path) -> Result<Factorization, Failure> {
    parse_factorization(&read(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn factor_lines(f: &Factorization) -> String {
    let mut s = format!("K = {}\nunit = {}\n", f.k, f.unit);
    for x in &f.factors {
        s += &format!("  {x}\n");
    }
    s
}

fn nfc(q: &QuatPoly, ctx: &Context) -> Result<Outcome, Failure> {
    let n = q.norm_poly(ctx.tol.structural())?;
    match nfc_rank1(&n, &ctx.tol) {
        Ok(split) => {
            let t = rp_quadratic_factors_with(&split.p, ctx.finder.as_ref(), &ctx.tol)?;
            let s = rp_quadratic_factors_with(&split.r, ctx.finder.as_ref(), &ctx.tol)?;
            let list = |v: &[quatfact::RealPoly]| v.iter().map(|p| format!("  {p}\n")).collect::<String>();
            let text = format!(
                "satisfied: true\nmax 2x2 minor = {}\nP = {}\nR = {}\nt-factors:\n{}s-factors:\n{}",
                Real(split.max_minor),
                split.p,
                split.r,
                list(&t.factors),
                list(&s.factors)
            );
            let record = json!({
                "satisfied": true,
                "max_minor": split.max_minor,
                "P": split.p,
                "R": split.r,
                "t_factors": t.factors,
                "s_factors": s.factors,
            });
            Ok(Outcome { records: vec![record], text, code: 0 })
        }
        Err(Error::NotRankOne { max_minor, allowed }) => {
            eprintln!("error: norm polynomial is not a product P(t)·R(s): 2x2 minor {max_minor:e} exceeds {allowed:e}");
            let text = format!("satisfied: false\nmax 2x2 minor = {}\nallowed = {}\n", Real(max_minor), Real(allowed));
            let record = json!({ "satisfied": false, "max_minor": max_minor, "allowed": allowed });
            Ok(Outcome { records: vec![record], text, code: EXIT_NFC })
        }
        Err(e) => Err(e.into()),
    }
}

fn factor(cli: &Cli, q: &QuatPoly, ctx: &Context) -> Result<Outcome, Failure> {
    let var: Var = cli.var.unwrap_or(VarArg::S).into();
    let method = cli.method.as_deref().unwrap_or(for_var(var));
    let strategy = Registry::builtin().get(method)?;
    let f = strategy.factor(q, cli.order.as_deref(), ctx)?;
    let residual = verify(q, &f);
    let code = if residual <= ctx.tol.residual() { 0 } else { EXIT_FAILURE };
    let mut record = serde_json::to_value(&f).expect("factorization serializes");
    record["method"] = json!(method);
    record["order"] = json!(cli.order);
    record["residual"] = json!(residual);
    record["polynomial"] = serde_json::to_value(q).expect("polynomial serializes");
    let text = format!("method = {method}\n{}residual = {}\n", factor_lines(&f), Real(residual));
    Ok(Outcome { records: vec![record], text, code })
}

fn run_enumerate(cli: &Cli, q: &QuatPoly, ctx: &Context) -> Result<Outcome, Failure> {
    let vars = match cli.var {
        Some(v) => vec![v.into()],
        None => vec![Var::S, Var::T],
    };
    let report = enumerate(q, &vars, ctx)?;
    let mut records = Vec::new();
    let mut text = String::new();
    for e in &report.entries {
        records.push(serde_json::to_value(e).expect("entry serializes"));
        let class = e.class.map_or("-".to_string(), |c| c.to_string());
        text += &format!("{} {:?} K = {} class {class}\n", e.var, e.order, e.factorization.k);
    }
    let summary = json!({
        "summary": {
            "runs": report.entries.len(),
            "k_one_count": report.k_one_count,
            "class_count": report.class_count,
        }
    });
    records.push(summary);
    text += &format!(
        "summary: {} runs, {} with K = 1, {} classes\n",
        report.entries.len(),
        report.k_one_count,
        report.class_count
    );
    Ok(Outcome { records, text, code: 0 })
}

fn equiv(a: &Factorization, b: &Factorization, ctx: &Context) -> Result<Outcome, Failure> {
    let t = t_equivalent(a, b, &ctx.tol)?;
    let s = s_equivalent(a, b, &ctx.tol)?;
    let e = equivalent(a, b, &ctx.tol)?;
    let text = format!("t-equivalent: {t}\ns-equivalent: {s}\nequivalent: {e}\n");
    let record = json!({ "t_equivalent": t, "s_equivalent": s, "equivalent": e });
    Ok(Outcome { records: vec![record], text, code: 0 })
}

fn lift(a: &Factorization, b: &Factorization, ctx: &Context) -> Result<Outcome, Failure> {
    let sys = build_lift_system(a, b, &ctx.tol)?;
    let sol = solve_lift(&sys, &ctx.tol);
    let residuals: Vec<f64> = sol.basis.iter().map(|x| verify_lift(a, b, x)).collect();
    let ok = residuals.iter().all(|&r| r <= ctx.tol.residual());
    let mut text = format!("rows = {}\nunknowns = {}\ndimension = {}\n", sys.matrix.nrows(), sys.unknowns(), sol.dimension);
    for (x, r) in sol.basis.iter().zip(&residuals) {
        let coords: Vec<String> = x.iter().map(|&c| Real(c).to_string()).collect();
        text += &format!("basis [{}] verify = {}\n", coords.join(", "), Real(*r));
    }
    let mut record = serde_json::to_value(&sol).expect("solution serializes");
    record["rows"] = json!(sys.matrix.nrows());
    record["unknowns"] = json!(sys.unknowns());
    record["verify"] = json!(residuals);
    Ok(Outcome { records: vec![record], text, code: if ok { 0 } else { EXIT_FAILURE } })
}

fn run_verify(report: &Path, input: Option<&Path>, ctx: &Context) -> Result<Outcome, Failure> {
    let raw = read(report)?;
    let value: Value = serde_json::from_str(&raw).map_err(|e| Failure::usage(format!("{}: {e}", report.display())))?;
    let f = parse_factorization(&raw).map_err(|e| Failure::usage(format!("{}: {e}", report.display())))?;
    let q = match (input, value.get("polynomial")) {
        (Some(path), _) => read_poly(path)?,
        (None, Some(p)) => serde_json::from_value(p.clone())
            .map_err(|e| Failure::usage(format!("{}: polynomial: {e}", report.display())))?,
        (None, None) => return Err(Failure::usage("report has no polynomial; pass the polynomial file")),
    };
    let residual = verify(&q, &f);
    let stored = value.get("residual").and_then(Value::as_f64);
    let reproduced = stored.is_none_or(|r| (r - residual).abs() <= REPRODUCE);
    let within = residual <= ctx.tol.residual();
    if !reproduced {
        eprintln!("error: residual {residual:e} does not reproduce the reported {:e}", stored.unwrap_or(f64::NAN));
    }
    let code = if reproduced && within { 0 } else { EXIT_FAILURE };
    let text = match stored {
        Some(r) => format!("residual = {}\nreported = {}\nreproduced: {reproduced}\n", Real(residual), Real(r)),
        None => format!("residual = {}\n", Real(residual)),
    };
    let record = json!({ "residual": residual, "reported": stored, "reproduced": reproduced, "within_tolerance": within });
    Ok(Outcome { records: vec![record], text, code })
}
