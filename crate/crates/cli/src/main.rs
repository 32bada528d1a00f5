//! `mixspec`: spectra of the mixed potential `a r + b r² + c/r + l(l+1)/r²`.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mixspec_core::{
    build_hierarchy, emit_curves, render_curves, render_levels, render_members, render_report,
    run_comparison, solve_levels, validate_params, Error, Format, GridOverrides, LevelRecord,
    MemberRecord, ParameterSet, PotentialParams, SolverOptions, Usage,
};
use thiserror::Error;

// Guards against requests that would only exhaust memory or time.
const MAX_LEVELS: usize = 200;
const MAX_POINTS: usize = 1_000_000;

#[derive(Parser, Debug)]
#[command(
    name = "mixspec",
    version,
    about = "Spectra of the mixed linear, quadratic and Coulomb potential"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form hierarchy: k, a_k, l_k, offset, E_k
    Spectrum {
        #[command(flatten)]
        params: SetArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Shooting eigenvalues of an arbitrary mixed potential
    Numeric {
        /// Built-in parameter set (I or II); solves one of its members
        #[arg(long, conflicts_with_all = ["a", "b", "c", "l"])]
        set: Option<String>,
        /// Hierarchy member solved when --set is given
        #[arg(long, requires = "set", default_value_t = 0)]
        member: usize,
        #[arg(long, allow_negative_numbers = true)]
        a: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        b: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        c: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        l: Option<f64>,
        /// Highest node count solved for
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Closed-form levels against shooting results for every member
    Compare {
        #[command(flatten)]
        params: SetArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Member potentials sampled on a uniform radial grid
    Curves {
        #[command(flatten)]
        params: SetArgs,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.3)]
        r_lo: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 4.0)]
        r_hi: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args, Debug)]
struct SetArgs {
    /// Built-in parameter set: I or II
    #[arg(long, conflicts_with_all = ["l", "b", "c"])]
    set: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    l: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    /// Highest member index (defaults to 4)
    #[arg(long)]
    k_max: Option<usize>,
}

#[derive(Args, Debug)]
struct SolverArgs {
    #[arg(long, allow_negative_numbers = true)]
    rmin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    rmax: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    tol: Option<f64>,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// human, csv or json
    #[arg(long, value_parser = parse_format)]
    format: Option<Format>,
    /// Write to this file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Error)]
enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonFinite { .. } | Error::BracketFailed { .. } | Error::ZeroNorm => {
                Failure::Numeric(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }
}

type Outcome = Result<(), Failure>;

impl SetArgs {
    fn resolve(&self) -> Result<ParameterSet, Failure> {
        let set = match &self.set {
            Some(name) => named_set(name)?,
            None => {
                let missing: Vec<&str> = [("--l", self.l), ("--b", self.b), ("--c", self.c)]
                    .iter()
                    .filter(|(_, v)| v.is_none())
                    .map(|(n, _)| *n)
                    .collect();
                if !missing.is_empty() {
                    return Err(Failure::Usage(format!(
                        "either --set or all of --l --b --c is required (missing {})",
                        missing.join(" ")
                    )));
                }
                ParameterSet::new(
                    "custom",
                    self.l.unwrap_or_default(),
                    self.b.unwrap_or_default(),
                    self.c.unwrap_or_default(),
                    4,
                )
            }
        };
        let set = match self.k_max {
            Some(k) => set.with_k_max(k),
            None => set,
        };
        check_levels("--k-max", set.k_max)?;
        Ok(set)
    }
}

impl SolverArgs {
    fn overrides(&self) -> GridOverrides {
        GridOverrides {
            r_min: self.rmin,
            r_max: self.rmax,
            n_steps: self.steps,
        }
    }

    fn options(&self) -> SolverOptions {
        let mut opts = SolverOptions::default();
        if let Some(tol) = self.tol {
            opts.tol = tol;
        }
        opts
    }
}

impl OutputArgs {
    fn emit(&self, text: &str) -> Outcome {
        match &self.out {
            Some(path) => fs::write(path, text)
                .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
            None => {
                let mut stdout = io::stdout().lock();
                // a closed pipe downstream is not an error worth reporting
                let _ = stdout
                    .write_all(text.as_bytes())
                    .and_then(|_| stdout.flush());
                Ok(())
            }
        }
    }
}

fn named_set(name: &str) -> Result<ParameterSet, Failure> {
    ParameterSet::named(name)
        .ok_or_else(|| Failure::Usage(format!("unknown parameter set {name:?} (expected I or II)")))
}

fn check_levels(flag: &str, n: usize) -> Outcome {
    if n > MAX_LEVELS {
        return Err(Failure::Usage(format!(
            "{flag} must be at most {MAX_LEVELS} (got {n})"
        )));
    }
    Ok(())
}

fn cmd_spectrum(params: &SetArgs, output: &OutputArgs) -> Outcome {
    let set = params.resolve()?;
    let members = build_hierarchy(set.l, set.b, set.c, set.k_max)?;
    let records: Vec<MemberRecord> = members.iter().map(MemberRecord::from).collect();
    output.emit(&render_members(
        &records,
        output.format.unwrap_or(Format::Human),
    )?)
}

fn cmd_numeric(
    set: Option<&str>,
    member: usize,
    coeffs: [Option<f64>; 4],
    n_max: usize,
    solver: &SolverArgs,
    output: &OutputArgs,
) -> Outcome {
    check_levels("--n-max", n_max)?;
    let potential = match set {
        Some(name) => {
            let set = named_set(name)?;
            check_levels("--member", member)?;
            let members = build_hierarchy(set.l, set.b, set.c, member)?;
            members[member].params
        }
        None => {
            let [a, b, c, l] = coeffs;
            let b = b.ok_or_else(|| Failure::Usage("--b is required without --set".into()))?;
            PotentialParams::new(a.unwrap_or(0.0), b, c.unwrap_or(0.0), l.unwrap_or(0.0))
        }
    };
    let potential = validate_params(potential, Usage::Numeric)?.into_inner();
    let levels = solve_levels(&potential, n_max, &solver.overrides(), &solver.options())?;
    let records: Vec<LevelRecord> = levels.iter().map(LevelRecord::from).collect();
    output.emit(&render_levels(
        &records,
        output.format.unwrap_or(Format::Human),
    )?)
}

fn cmd_compare(params: &SetArgs, solver: &SolverArgs, output: &OutputArgs) -> Outcome {
    let set = params.resolve()?;
    let opts = solver.options();
    let overrides = solver.overrides();
    let report = run_comparison(&set, &overrides, &opts)?;
    output.emit(&render_report(
        &report,
        output.format.unwrap_or(Format::Human),
    )?)?;
    for d in &report.diagnostics {
        eprintln!("warning: {d}");
    }
    if let Some(row) = report
        .rows
        .iter()
        .find(|r| r.numeric_by_member.iter().all(Option::is_none))
    {
        return Err(Failure::Numeric(format!(
            "every solve failed for n = {}",
            row.n
        )));
    }
    Ok(())
}

fn cmd_curves(
    params: &SetArgs,
    r_lo: f64,
    r_hi: f64,
    points: usize,
    output: &OutputArgs,
) -> Outcome {
    let set = params.resolve()?;
    if points > MAX_POINTS {
        return Err(Failure::Usage(format!(
            "--points must be at most {MAX_POINTS} (got {points})"
        )));
    }
    let curves = emit_curves(&set, r_lo, r_hi, points)?;
    output.emit(&render_curves(
        &curves,
        output.format.unwrap_or(Format::Csv),
    )?)
}

fn run(cli: Cli) -> Outcome {
    match &cli.command {
        Command::Spectrum { params, output } => cmd_spectrum(params, output),
        Command::Numeric {
            set,
            member,
            a,
            b,
            c,
            l,
            n_max,
            solver,
            output,
        } => cmd_numeric(
            set.as_deref(),
            *member,
            [*a, *b, *c, *l],
            *n_max,
            solver,
            output,
        ),
        Command::Compare {
            params,
            solver,
            output,
        } => cmd_compare(params, solver, output),
        Command::Curves {
            params,
            r_lo,
            r_hi,
            points,
            output,
        } => cmd_curves(params, *r_lo, *r_hi, *points, output),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
