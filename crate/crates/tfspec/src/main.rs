//! `tfspec`: convergence studies for the tempered fractional spectral
//! solvers, plus the acceptance checklist (`tfspec verify`).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use tfspec::harness::{run_case, write_csv, write_svg, CaseId, ExampleCase, DEFAULT_NS};
use tfspec::Error;

#[derive(Parser)]
#[command(name = "tfspec", version, about = "Spectral solvers for tempered fractional two-point boundary problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one convergence study and print/emit the error table.
    Run(StudyArgs),
    /// Run one study per value in --alpha1-list and emit a combined report.
    Sweep(StudyArgs),
    /// Run the full acceptance checklist; exit code 0 only if all pass.
    Verify,
}

#[derive(Args, Default, Clone)]
struct StudyArgs {
    /// Case id: adv_jump, adv_h3, adv_singular_rhs, adv_dterm,
    /// diff_ml_poly, diff_ml_exp
    #[arg(long)]
    case: Option<String>,
    /// Leading fractional order a1
    #[arg(long)]
    alpha1: Option<f64>,
    /// Several a1 values (sweep only), comma separated
    #[arg(long, value_name = "LIST")]
    alpha1_list: Option<String>,
    /// Lower fractional order a2 (default 0 for advection, 1.1 for diffusion)
    #[arg(long)]
    alpha2: Option<f64>,
    /// Coefficient of the lower-order term (default depends on the case)
    #[arg(long)]
    d: Option<f64>,
    /// Tempering parameter (default 1)
    #[arg(long)]
    lambda: Option<f64>,
    /// Truncations, comma separated (default 8,16,32,64,128,256)
    #[arg(long, value_name = "LIST")]
    ns: Option<String>,
    /// Power-law smoothness knob of adv_dterm (default 3)
    #[arg(long)]
    m: Option<f64>,
    /// Endpoint-exponent knob of adv_dterm (default 0.3)
    #[arg(long)]
    gamma: Option<f64>,
    /// Write the error table as CSV
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write a log-log SVG chart
    #[arg(long)]
    svg: Option<PathBuf>,
    /// JSON config with the same keys as the flags; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

/// The JSON config mirrors the flags.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    case: Option<String>,
    alpha1: Option<f64>,
    alpha1_list: Option<Vec<f64>>,
    alpha2: Option<f64>,
    d: Option<f64>,
    lambda: Option<f64>,
    ns: Option<Vec<usize>>,
    m: Option<f64>,
    gamma: Option<f64>,
    csv: Option<PathBuf>,
    svg: Option<PathBuf>,
}

struct Study {
    case: ExampleCase,
    alpha1_values: Vec<f64>,
    alpha2: f64,
    d: f64,
    lambda: f64,
    ns: Vec<usize>,
    csv: Option<PathBuf>,
    svg: Option<PathBuf>,
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, Error> {
    text.split(',')
        .map(|tok| tok.trim())
        .filter(|tok| !tok.is_empty())
        .map(|tok| {
            tok.parse::<T>()
                .map_err(|_| Error::Case(format!("cannot parse '{tok}' in {what}")))
        })
        .collect()
}

fn default_d(case: &CaseId) -> f64 {
    match case {
        CaseId::AdvJump | CaseId::AdvH3 | CaseId::AdvSingularRhs => 0.0,
        CaseId::AdvDterm { .. } => 5.0,
        CaseId::DiffMlPoly => -1.0,
        CaseId::DiffMlExp => 100.0,
    }
}

fn resolve(args: &StudyArgs, sweep: bool) -> Result<Study, Error> {
    let file: ConfigFile = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;
            serde_json::from_str(&text)
                .map_err(|e| Error::Case(format!("config {}: {e}", path.display())))?
        }
        None => ConfigFile::default(),
    };

    let case_name = args
        .case
        .clone()
        .or(file.case)
        .ok_or_else(|| Error::Case("--case is required".to_string()))?;
    let m = args.m.or(file.m).unwrap_or(3.0);
    let gamma = args.gamma.or(file.gamma).unwrap_or(0.3);
    let case = ExampleCase::from_name(&case_name, m, gamma)?;

    let alpha1_values = if sweep {
        match (&args.alpha1_list, &file.alpha1_list) {
            (Some(list), _) => parse_list(list, "--alpha1-list")?,
            (None, Some(list)) => list.clone(),
            (None, None) => return Err(Error::Case("sweep needs --alpha1-list".to_string())),
        }
    } else {
        vec![args
            .alpha1
            .or(file.alpha1)
            .ok_or_else(|| Error::Case("--alpha1 is required".to_string()))?]
    };

    let alpha2 = args.alpha2.or(file.alpha2).unwrap_or(match case.regime() {
        tfspec::advection::Regime::Advection => 0.0,
        tfspec::advection::Regime::Diffusion => 1.1,
    });
    let d = args.d.or(file.d).unwrap_or_else(|| default_d(&case.id));
    let lambda = args.lambda.or(file.lambda).unwrap_or(1.0);
    let ns = match (&args.ns, &file.ns) {
        (Some(list), _) => parse_list(list, "--ns")?,
        (None, Some(list)) => list.clone(),
        (None, None) => DEFAULT_NS.to_vec(),
    };

    Ok(Study {
        case,
        alpha1_values,
        alpha2,
        d,
        lambda,
        ns,
        csv: args.csv.clone().or(file.csv),
        svg: args.svg.clone().or(file.svg),
    })
}

fn print_report(r: &tfspec::harness::ConvergenceReport) {
    println!(
        "case {}  a1={} a2={} d={} lambda={}",
        r.case, r.alpha1, r.alpha2, r.d, r.lambda
    );
    println!("{:>6} {:>14} {:>10}", "N", "L2 error", "time [s]");
    for ((n, err), t) in r.rows.iter().zip(&r.wall_times) {
        println!("{n:>6} {err:>14.6e} {t:>10.4}");
    }
    println!("fitted rate (last 4 points): {:.4}", r.fitted_rate);
}

fn run_study(study: &Study) -> Result<(), Error> {
    let mut reports = Vec::new();
    for &a1 in &study.alpha1_values {
        let report = run_case(&study.case, a1, study.alpha2, study.d, study.lambda, &study.ns)?;
        print_report(&report);
        println!();
        reports.push(report);
    }
    if let Some(csv) = &study.csv {
        write_csv(&reports, csv)?;
        println!("wrote {}", csv.display());
    }
    if let Some(svg) = &study.svg {
        write_svg(&reports, svg)?;
        println!("wrote {}", svg.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => match resolve(&args, false).and_then(|s| run_study(&s)) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::FAILURE
            }
        },
        Command::Sweep(args) => match resolve(&args, true).and_then(|s| run_study(&s)) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::FAILURE
            }
        },
        Command::Verify => {
            let results = tfspec::verify::run_all();
            let mut all_ok = true;
            for r in &results {
                println!("{}", r.line());
                all_ok &= r.passed;
            }
            if all_ok {
                println!("all criteria passed");
                ExitCode::SUCCESS
            } else {
                println!("some criteria failed");
                ExitCode::FAILURE
            }
        }
    }
}
