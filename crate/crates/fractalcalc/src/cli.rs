//! Command-line front-end: staircase tables, dimension estimation, fractal
//! ODE solving from problem files, and the packaged demos.
//!
//! Exit codes: 0 success, 2 input error, 3 numeric/singularity error.

use crate::demos::{fmt17, run_demo, DemoName};
use crate::error::{Error, Result};
use crate::fode_solver::{
    solve, BasisFn, FODEProblem, FODESolution, ForcingAtom, ForcingTerm, Particular, RootSet,
    VopParticular,
};
use crate::fractal_calculus::DEFAULT_CELLS;
use crate::fractal_set::{CantorSpec, Staircase};
use crate::symbolic::{Term, TermSum};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const DEPTH_ENV: &str = "FRACTALCALC_DEPTH";

#[derive(Parser, Debug)]
#[command(name = "fractalcalc", version, about = "Calculus on Cantor-like sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Set description: cantor:m=<int>,r=<real>[,a=<real>,b=<real>]
    #[arg(long, global = true, default_value = "cantor:m=2,r=0.3333333333333333")]
    set: String,

    /// Override the staircase order (default ln m / ln(1/r))
    #[arg(long, global = true)]
    alpha: Option<f64>,

    /// Recursion depth for membership and staircase queries
    /// (flag beats the FRACTALCALC_DEPTH env var beats the set default)
    #[arg(long, global = true)]
    depth: Option<u32>,

    /// Base path for output files (<out>.json and <out>.csv); stdout if absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Stream picked when writing to stdout
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Sample count for tables
    #[arg(long, global = true, default_value_t = 256)]
    grid: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate the integral staircase S(x) over [a, b]
    Staircase,
    /// Estimate the gamma-dimension of the set
    Dim,
    /// Solve a linear fractal ODE from a problem file
    Solve {
        /// Problem JSON (coeffs, forcing, ics, x0, set, alpha)
        #[arg(required_unless_present = "resample", conflicts_with = "resample")]
        problem: Option<PathBuf>,
        /// Re-sample a previously written solution JSON instead
        #[arg(long)]
        resample: Option<PathBuf>,
    },
    /// Run a packaged worked example
    Demo {
        /// oscillator4 | resonant3 | vop3 | spring_mass
        name: String,
        /// Grid size for the demo table
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<()> {
    let out = match &cli.command {
        Command::Staircase => cmd_staircase(cli)?,
        Command::Dim => cmd_dim(cli)?,
        Command::Solve { problem, resample } => match (problem, resample) {
            (Some(path), None) => cmd_solve(cli, path)?,
            (None, Some(path)) => cmd_resample(cli, path)?,
            _ => return Err(Error::Spec("give a problem file or --resample, not both".into())),
        },
        Command::Demo { name, samples } => cmd_demo(cli, name, *samples)?,
    };
    emit(cli, &out)
}

struct Output {
    json: String,
    csv: String,
}

fn emit(cli: &Cli, out: &Output) -> Result<()> {
    match &cli.out {
        Some(base) => {
            std::fs::write(base.with_extension("json"), &out.json)?;
            std::fs::write(base.with_extension("csv"), &out.csv)?;
        }
        None => match cli.format {
            Format::Csv => print!("{}", out.csv),
            Format::Json => println!("{}", out.json),
        },
    }
    Ok(())
}

/// `cantor:m=<int>,r=<real>[,a=<real>,b=<real>]`
fn parse_set(s: &str) -> Result<CantorSpec> {
    let body = s.strip_prefix("cantor:").ok_or_else(|| {
        Error::Spec(format!(
            "unsupported set {s:?}; expected cantor:m=<int>,r=<real>[,a=<real>,b=<real>]"
        ))
    })?;
    let (mut m, mut r) = (None, None);
    let (mut a, mut b) = (0.0, 1.0);
    for field in body.split(',') {
        let (key, val) = field
            .split_once('=')
            .ok_or_else(|| Error::Spec(format!("malformed set field {field:?}")))?;
        let val = val.trim();
        match key.trim() {
            "m" => {
                m = Some(val.parse::<u32>().map_err(|_| {
                    Error::Spec(format!("m must be a positive integer, got {val:?}"))
                })?)
            }
            "r" => {
                r = Some(val.parse::<f64>().map_err(|_| {
                    Error::Spec(format!("r must be a real number, got {val:?}"))
                })?)
            }
            "a" => {
                a = val.parse().map_err(|_| {
                    Error::Spec(format!("a must be a real number, got {val:?}"))
                })?
            }
            "b" => {
                b = val.parse().map_err(|_| {
                    Error::Spec(format!("b must be a real number, got {val:?}"))
                })?
            }
            other => return Err(Error::Spec(format!("unknown set field {other:?}"))),
        }
    }
    let m = m.ok_or_else(|| Error::Spec("set string is missing m".into()))?;
    let r = r.ok_or_else(|| Error::Spec("set string is missing r".into()))?;
    CantorSpec::new(a, b, m, r)
}

/// Flag beats environment beats the spec default.
fn resolve_depth(flag: Option<u32>) -> Result<Option<u32>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(DEPTH_ENV) {
        Ok(raw) => {
            let d: u32 = raw.trim().parse().map_err(|_| {
                Error::Spec(format!("{DEPTH_ENV} must be a positive integer, got {raw:?}"))
            })?;
            if d == 0 {
                return Err(Error::Spec(format!("{DEPTH_ENV} must be positive")));
            }
            Ok(Some(d))
        }
        Err(_) => Ok(None),
    }
}

fn apply_overrides(mut spec: CantorSpec, cli: &Cli) -> Result<CantorSpec> {
    if let Some(d) = resolve_depth(cli.depth)? {
        spec.depth_max = d;
        spec.validate()?;
    }
    Ok(spec)
}

fn staircase_for(spec: CantorSpec, alpha: Option<f64>) -> Result<Staircase> {
    let mut s = Staircase::new(spec);
    if let Some(a) = alpha {
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::AlphaRange(a));
        }
        s = s.with_alpha(a);
    }
    Ok(s)
}

fn cmd_staircase(cli: &Cli) -> Result<Output> {
    let spec = apply_overrides(parse_set(&cli.set)?, cli)?;
    let s = staircase_for(spec, cli.alpha)?;
    let n = cli.grid.max(2);
    let mut xs = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    let mut csv = String::from("x,S\n");
    for i in 0..n {
        let x = spec.a + spec.len() * i as f64 / (n - 1) as f64;
        let v = s.eval(x)?;
        csv.push_str(&fmt17(x));
        csv.push(',');
        csv.push_str(&fmt17(v));
        csv.push('\n');
        xs.push(x);
        values.push(v);
    }
    let json = serde_json::to_string_pretty(&serde_json::json!({
        "set": spec,
        "alpha": s.alpha,
        "normalization": s.normalization,
        "depth": s.depth,
        "grid": n,
        "x": xs,
        "s": values,
    }))?;
    Ok(Output { json, csv })
}

fn cmd_dim(cli: &Cli) -> Result<Output> {
    let spec = apply_overrides(parse_set(&cli.set)?, cli)?;
    let d = spec.gamma_dimension(spec.a, spec.b)?;
    let json = serde_json::to_string_pretty(&serde_json::json!({
        "set": spec,
        "gamma_dimension": d,
    }))?;
    let csv = format!("gamma_dimension\n{}\n", fmt17(d));
    Ok(Output { json, csv })
}

fn cmd_demo(cli: &Cli, name: &str, samples: usize) -> Result<Output> {
    let name: DemoName = name.parse()?;
    let spec = apply_overrides(parse_set(&cli.set)?, cli)?;
    let report = run_demo(name, spec, samples)?;
    Ok(Output { json: report.summary_json()?, csv: report.to_csv() })
}

/// Problem file, `set` and `alpha` falling back to the command line.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    coeffs: Vec<f64>,
    #[serde(default)]
    forcing: Option<ForcingFile>,
    #[serde(default)]
    ics: Option<Vec<f64>>,
    x0: f64,
    #[serde(default)]
    set: Option<CantorSpec>,
    #[serde(default)]
    alpha: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum ForcingFile {
    Atoms { atoms: Vec<ForcingAtom> },
    Expr { expr: String },
}

impl ForcingFile {
    fn term(&self) -> Result<ForcingTerm> {
        match self {
            ForcingFile::Atoms { atoms } => Ok(ForcingTerm::atoms(atoms.clone())),
            ForcingFile::Expr { expr } => builtin_forcing(expr),
        }
    }
}

/// Named right-hand sides available to problem files.
fn builtin_forcing(name: &str) -> Result<ForcingTerm> {
    match name {
        "exp_over_t2" => Ok(ForcingTerm::custom(|t: f64| t.exp() / (t * t), 1e-6)),
        other => Err(Error::Problem(format!(
            "unknown forcing builtin {other:?}; available: exp_over_t2"
        ))),
    }
}

/// Everything needed to re-evaluate the solution without re-deriving it.
#[derive(Debug, Serialize, Deserialize)]
struct SolutionFile {
    problem: ProblemEcho,
    staircase: Staircase,
    roots: Vec<RootOut>,
    basis: Vec<BasisFn>,
    hom_coeffs: Option<Vec<f64>>,
    particular: Option<ParticularOut>,
    grid: GridOut,
}

#[derive(Debug, Serialize, Deserialize)]
struct ProblemEcho {
    coeffs: Vec<f64>,
    forcing: Option<ForcingFile>,
    ics: Option<Vec<f64>>,
    x0: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct RootOut {
    re: f64,
    im: f64,
    multiplicity: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum ParticularOut {
    ClosedForm { terms: Vec<Term> },
    Quadrature { expr: String, t_min: f64, cells: usize },
}

#[derive(Debug, Serialize, Deserialize)]
struct GridOut {
    n: usize,
}

fn cmd_solve(cli: &Cli, path: &Path) -> Result<Output> {
    let raw = std::fs::read_to_string(path)?;
    let pf: ProblemFile = serde_json::from_str(&raw)?;
    let spec = apply_overrides(
        match pf.set {
            Some(s) => s,
            None => parse_set(&cli.set)?,
        },
        cli,
    )?;
    let staircase = staircase_for(spec, pf.alpha.or(cli.alpha))?;
    let forcing = pf.forcing.as_ref().map(|f| f.term()).transpose()?;
    // an empty ics list means "leave the constants free", same as absent
    let ics = pf.ics.clone().filter(|v| !v.is_empty());
    let problem = FODEProblem { coeffs: pf.coeffs.clone(), forcing, ics: ics.clone(), x0: pf.x0, staircase };
    let sol = solve(&problem)?;
    let particular = match &sol.particular {
        None => None,
        Some(Particular::ClosedForm(ts)) => {
            Some(ParticularOut::ClosedForm { terms: ts.terms.clone() })
        }
        Some(Particular::Quadrature(vp)) => {
            let ForcingFile::Expr { expr } = pf.forcing.as_ref().expect("quadrature needs forcing")
            else {
                unreachable!("atom forcing is handled in closed form");
            };
            Some(ParticularOut::Quadrature {
                expr: expr.clone(),
                t_min: vp.t_min(),
                cells: DEFAULT_CELLS,
            })
        }
    };
    let sf = SolutionFile {
        problem: ProblemEcho { coeffs: pf.coeffs, forcing: pf.forcing, ics, x0: pf.x0 },
        staircase,
        roots: sol
            .roots
            .roots
            .iter()
            .map(|(z, m)| RootOut { re: z.re, im: z.im, multiplicity: *m })
            .collect(),
        basis: sol.basis.clone(),
        hom_coeffs: sol.hom_coeffs.clone(),
        particular,
        grid: GridOut { n: cli.grid.max(2) },
    };
    render_solution(&sf, &sol)
}

/// Rebuilds the solution a written JSON describes and re-samples it; the
/// output is byte-identical to the original run.
fn cmd_resample(_cli: &Cli, path: &Path) -> Result<Output> {
    let raw = std::fs::read_to_string(path)?;
    let sf: SolutionFile = serde_json::from_str(&raw)?;
    let staircase = sf.staircase;
    let particular = match &sf.particular {
        None => None,
        Some(ParticularOut::ClosedForm { terms }) => {
            Some(Particular::ClosedForm(TermSum::from_terms(terms.clone())))
        }
        Some(ParticularOut::Quadrature { expr, cells, .. }) => {
            let problem = FODEProblem {
                coeffs: sf.problem.coeffs.clone(),
                forcing: Some(builtin_forcing(expr)?),
                ics: sf.problem.ics.clone(),
                x0: sf.problem.x0,
                staircase,
            };
            Some(Particular::Quadrature(VopParticular::from_parts(
                sf.basis.clone(),
                &problem,
                *cells,
            )?))
        }
    };
    let sol = FODESolution {
        basis: sf.basis.clone(),
        hom_coeffs: sf.hom_coeffs.clone(),
        particular,
        roots: RootSet {
            roots: sf
                .roots
                .iter()
                .map(|r| (Complex64::new(r.re, r.im), r.multiplicity))
                .collect(),
        },
        staircase,
        x0: sf.problem.x0,
    };
    render_solution(&sf, &sol)
}

/// Samples f uniformly in x from the anchor to the right endpoint; the IVP
/// data live at x0, and a singular forcing can make t below S(x0)
/// unreachable.
fn render_solution(sf: &SolutionFile, sol: &FODESolution) -> Result<Output> {
    let n = sf.grid.n.max(2);
    let (a, b) = (sol.x0, sol.staircase.spec.b);
    let mut csv = String::from("x,S,f\n");
    for i in 0..n {
        let x = a + (b - a) * i as f64 / (n - 1) as f64;
        let t = sol.staircase.eval(x)?;
        csv.push_str(&fmt17(x));
        csv.push(',');
        csv.push_str(&fmt17(t));
        csv.push(',');
        csv.push_str(&fmt17(sol.eval_t(t)?));
        csv.push('\n');
    }
    Ok(Output { json: serde_json::to_string_pretty(sf)?, csv })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_strings_parse() {
        let spec = parse_set("cantor:m=2,r=0.3333333333333333").unwrap();
        assert_eq!(spec.m, 2);
        assert!((spec.r - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!((spec.a, spec.b), (0.0, 1.0));

        let spec = parse_set("cantor:m=3,r=0.2,a=-1,b=2").unwrap();
        assert_eq!((spec.m, spec.a, spec.b), (3, -1.0, 2.0));

        assert!(parse_set("koch:m=2,r=0.3").is_err());
        assert!(parse_set("cantor:m=2").is_err());
        assert!(parse_set("cantor:m=2,r=0.6").is_err()); // m*r > 1
        assert!(parse_set("cantor:m=2,r=0.3,q=1").is_err());
    }

    #[test]
    fn builtin_forcing_registry() {
        assert!(builtin_forcing("exp_over_t2").is_ok());
        assert!(matches!(builtin_forcing("nope"), Err(Error::Problem(_))));
    }

    #[test]
    fn alpha_override_is_validated() {
        let spec = CantorSpec::triadic();
        assert!(staircase_for(spec, Some(1.5)).is_err());
        assert!(staircase_for(spec, Some(-0.2)).is_err());
        let s = staircase_for(spec, Some(0.5)).unwrap();
        assert_eq!(s.alpha, 0.5);
    }

    #[test]
    fn forcing_file_shapes() {
        let atoms: ForcingFile =
            serde_json::from_str(r#"{"atoms":[{"poly":[4.0],"lambda":1.0}]}"#).unwrap();
        assert!(matches!(atoms, ForcingFile::Atoms { .. }));
        let expr: ForcingFile = serde_json::from_str(r#"{"expr":"exp_over_t2"}"#).unwrap();
        assert!(matches!(expr, ForcingFile::Expr { .. }));
        assert!(serde_json::from_str::<ForcingFile>(r#"{"nope":1}"#).is_err());
    }
}
