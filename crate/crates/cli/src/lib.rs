//! Command-line front end for `tempus-core`.
//!
//! Exit codes: 0 when every certificate passes, 1 when a certificate fails
//! its bound, 2 for configuration or I/O errors, 3 when the equation
//! violates a hypothesis (complex or repeated roots, non-regressive
//! coefficients, Riccati breakdown).

pub mod config;
pub mod error;
pub mod expr;
pub mod report;

use std::fs;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use tempus_core::{
    certify_second_order_cc_factored, lemma_constant, perturb, run_campaign, Coefficient, Equation,
    EquationSpec, GridFunction, TimeScale, TimeScaleFamily, Verdict,
};

use crate::config::{sample, Candidate, Format, ProblemConfig};
use crate::error::CliError;
use crate::report::ConstantsRow;

pub const SEED_ENV: &str = "TEMPUS_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "tempus",
    version,
    about = "Hyers-Ulam stability certificates on finite time scales"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify one approximate solution.
    Certify(Common),
    /// Certify many perturbed solutions with consecutive seeds.
    Campaign {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Tabulate the analytic constants over a sweep of grid parameters.
    Constants {
        #[command(flatten)]
        common: Common,
        /// `h=0.5,0.25` (uniform), `q=2,1.5` (q-scale) or `n=10,20`.
        #[arg(long)]
        sweep: String,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    pub config: PathBuf,
    #[arg(long)]
    pub output_dir: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Print the normalized config as JSON and exit.
    #[arg(long)]
    pub dump_config: bool,
}

/// Outcome of a successful run.
pub enum Outcome {
    Pass,
    Fail,
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Certify(common) => {
            let Some(cfg) = load(&common)? else {
                return Ok(Outcome::Pass);
            };
            certify(&cfg, &common)
        }
        Command::Campaign { common, trials } => {
            let Some(cfg) = load(&common)? else {
                return Ok(Outcome::Pass);
            };
            campaign(&cfg, &common, trials)
        }
        Command::Constants { common, sweep } => {
            let Some(cfg) = load(&common)? else {
                return Ok(Outcome::Pass);
            };
            constants(&cfg, &common, &sweep)
        }
    }
}

fn load(common: &Common) -> Result<Option<ProblemConfig>, CliError> {
    let text = fs::read_to_string(&common.config)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", common.config.display())))?;
    let cfg = ProblemConfig::from_json(&text)?;
    if common.dump_config {
        println!("{}", cfg.to_json());
        return Ok(None);
    }
    Ok(Some(cfg))
}

fn output_dir(cfg: &ProblemConfig, common: &Common) -> Result<PathBuf, CliError> {
    let dir = PathBuf::from(cfg.output_dir(common.output_dir.as_deref()));
    fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

fn announce(paths: &[PathBuf]) {
    for p in paths {
        eprintln!("wrote {}", p.display());
    }
}

fn certify(cfg: &ProblemConfig, common: &Common) -> Result<Outcome, CliError> {
    let ts = cfg.timescale()?;
    let eq = cfg.equation_on(&ts)?;
    let (y, seed) = match cfg.candidate(None)? {
        Candidate::Inline(values) => (
            GridFunction::new(&ts, values).map_err(|e| CliError::from_library(e, "perturbation.values"))?,
            None,
        ),
        Candidate::Generated(spec) => {
            let exact = eq
                .exact_solution()
                .map_err(|e| CliError::from_library(e, "equation"))?;
            let y = perturb(&exact, &spec, &eq).map_err(|e| CliError::from_library(e, "perturbation"))?;
            (y, Some(spec.seed))
        }
    };
    let cert = eq
        .certify(&y)
        .map_err(|e| CliError::from_library(e, "equation"))?;
    let dir = output_dir(cfg, common)?;
    let written = match cfg.format(common.format) {
        Format::Csv => report::write_certificate_csv(&dir, seed, &y, &cert)?,
        Format::Json => report::write_certificate_json(&dir, seed, &y, &cert)?,
    };
    announce(&written);
    println!("{}", report::summary_line(&cert.certificate));
    Ok(match cert.certificate.verdict {
        Verdict::Pass => Outcome::Pass,
        Verdict::Fail => Outcome::Fail,
    })
}

fn seed_override() -> Result<Option<u64>, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s.trim().parse().map(Some).map_err(|_| CliError::Config {
            key: SEED_ENV.into(),
            message: format!("expected an unsigned integer, got {s:?}"),
        }),
        Err(_) => Ok(None),
    }
}

fn campaign(cfg: &ProblemConfig, common: &Common, trials: usize) -> Result<Outcome, CliError> {
    if trials == 0 {
        return Err(CliError::Config {
            key: "--trials".into(),
            message: "need at least one trial".into(),
        });
    }
    let spec = match cfg.candidate(seed_override()?)? {
        Candidate::Generated(spec) => spec,
        Candidate::Inline(_) => {
            return Err(CliError::Config {
                key: "perturbation.values".into(),
                message: "campaigns need a generated perturbation, not inline values".into(),
            })
        }
    };
    let ts = cfg.timescale()?;
    let eq = cfg.equation_on(&ts)?;
    let report = run_campaign(&eq, &spec, trials).map_err(CliError::from_campaign)?;
    let dir = output_dir(cfg, common)?;
    let written = match cfg.format(common.format) {
        Format::Csv => report::write_campaign_csv(&dir, &report)?,
        Format::Json => report::write_campaign_json(&dir, &report)?,
    };
    announce(&written);
    println!(
        "trials={} pass={} max_empirical_constant={} max_analytic_constant={} worst_trial_seed={}",
        report.trials,
        report.pass_count,
        report::num(report.max_empirical_constant),
        report
            .max_analytic_constant
            .map(report::num)
            .unwrap_or_else(|| "none".into()),
        report.worst_trial_seed
    );
    Ok(if report.all_pass() {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

/// Parses `name=v1,v2,...`.
pub fn parse_sweep(sweep: &str) -> Result<(String, Vec<f64>), CliError> {
    let bad = |message: String| CliError::Config {
        key: "--sweep".into(),
        message,
    };
    let (name, list) = sweep
        .split_once('=')
        .ok_or_else(|| bad(format!("expected name=v1,v2,..., got {sweep:?}")))?;
    let name = name.trim();
    if !matches!(name, "h" | "q" | "n") {
        return Err(bad(format!("unknown sweep parameter {name:?}; use h, q or n")));
    }
    let values = list
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| bad(format!("not a number: {v:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err(bad("empty sweep".into()));
    }
    Ok((name.to_string(), values))
}

fn swept_family(family: &TimeScaleFamily, name: &str, value: f64) -> Result<TimeScaleFamily, CliError> {
    let mismatch = || CliError::Config {
        key: "timescale".into(),
        message: format!("sweep parameter {name} does not apply to this time scale family"),
    };
    let count = || {
        if value >= 0.0 && value.fract() == 0.0 {
            Ok(value as usize)
        } else {
            Err(CliError::Config {
                key: "--sweep".into(),
                message: format!("n must be a non-negative integer, got {value}"),
            })
        }
    };
    Ok(match (family.clone(), name) {
        (TimeScaleFamily::Uniform { a, b, .. }, "h") => TimeScaleFamily::Uniform { a, b, h: value },
        (TimeScaleFamily::QScale { t0, n, .. }, "q") => TimeScaleFamily::QScale { t0, q: value, n },
        (TimeScaleFamily::QScale { t0, q, .. }, "n") => TimeScaleFamily::QScale { t0, q, n: count()? },
        (TimeScaleFamily::Sample { a, b, .. }, "n") => TimeScaleFamily::Sample { a, b, n: count()? },
        _ => return Err(mismatch()),
    })
}

/// Analytic constants of one problem instance. First-order problems fill
/// `lemma`; second-order problems fill the factor constants and `product`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Constants {
    pub lemma: Option<f64>,
    pub inner: Option<f64>,
    pub outer: Option<f64>,
    pub product: Option<f64>,
}

/// Constants of the configured equation on `ts`.
pub fn constants_of(cfg: &ProblemConfig, ts: &Arc<TimeScale>) -> Result<Constants, CliError> {
    if cfg.equation.order == 1 {
        let d = Coefficient::new(sample(
            cfg.equation.d.as_ref().expect("validated"),
            ts,
            "equation.d",
        )?);
        let l = lemma_constant(&d).map_err(|e| CliError::from_library(e, "equation.d"))?;
        return Ok(Constants {
            lemma: Some(l.value),
            ..Constants::default()
        });
    }
    let eq: EquationSpec = cfg.equation_on(ts)?;
    let exact = eq
        .exact_solution()
        .map_err(|e| CliError::from_library(e, "equation"))?;
    let cert = match eq.equation() {
        Equation::ConstantCoefficients {
            alpha,
            beta,
            forcing: None,
        } => certify_second_order_cc_factored(&exact, *alpha, *beta),
        _ => eq.certify(&exact),
    }
    .map_err(|e| CliError::from_library(e, "equation"))?
    .certificate;
    let h = cert.hypotheses;
    Ok(Constants {
        lemma: None,
        inner: h.inner_constant,
        outer: h.outer_constant,
        product: cert.analytic_constant,
    })
}

fn constants(cfg: &ProblemConfig, common: &Common, sweep: &str) -> Result<Outcome, CliError> {
    let (name, values) = parse_sweep(sweep)?;
    let mut rows = Vec::with_capacity(values.len());
    for value in values {
        let family = swept_family(&cfg.timescale, &name, value)?;
        let mut swept = cfg.clone();
        swept.timescale = family;
        let ts = swept.timescale()?;
        let k = constants_of(&swept, &ts)?;
        rows.push(ConstantsRow {
            parameter: name.clone(),
            value,
            points: ts.len(),
            lemma_constant: k.lemma,
            inner_constant: k.inner,
            outer_constant: k.outer,
            product: k.product,
        });
    }
    let dir = output_dir(cfg, common)?;
    let written = match cfg.format(common.format) {
        Format::Csv => report::write_constants_csv(&dir, &rows)?,
        Format::Json => report::write_constants_json(&dir, &rows)?,
    };
    announce(&written);
    for r in &rows {
        let k = r.lemma_constant.or(r.product);
        println!(
            "{}={} points={} constant={}",
            r.parameter,
            report::num(r.value),
            r.points,
            k.map(report::num).unwrap_or_else(|| "none".into())
        );
    }
    Ok(Outcome::Pass)
}

/// Runs the CLI and returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    match run(cli) {
        Ok(Outcome::Pass) => 0,
        Ok(Outcome::Fail) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
