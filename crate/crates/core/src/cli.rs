//! Command-line front end.
//!
//! Every subcommand produces named artifacts. With `--output DIR` they are
//! written as files; otherwise they go to standard output in order.

use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::json;

use crate::bounds::{derive_implications, sweep_curves};
use crate::error::{Error, Result};
use crate::extreal::{format_f64, ExtReal, Nats, Unit};
use crate::io::{finite_document, parse_mechanism, Mechanism};
use crate::leakage::{Guarantee, LeakageProfile, LevelReport};
use crate::mechanisms::{
    gaussian_pmc_bounds, gaussian_pmc_quadrature, gaussian_pmc_uniform, gaussian_tail_bound,
    laplace_mean_sup_pmc, laplace_pmc_at, GaussianPerturb, InputLaw, LaplaceMean, MonteCarlo,
};
use crate::oracles::{certify, SearchConfig};
use crate::props::{format_table, run_suite};
use crate::scalar::Scalar;

#[derive(Debug, Parser)]
#[command(name = "pmc", version, about = "Pointwise leakage analysis of privacy mechanisms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Directory for output files; standard output when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Numeric backend for finite mechanisms.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Float)]
    pub mode: Mode,

    /// Display unit. Inputs and storage are always in nats.
    #[arg(long, global = true, value_enum, default_value_t = UnitArg::Nats)]
    pub unit: UnitArg,

    /// Seed for every sampled search and Monte Carlo estimate.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Float,
    Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UnitArg {
    Nats,
    Bits,
}

impl From<UnitArg> for Unit {
    fn from(u: UnitArg) -> Unit {
        match u {
            UnitArg::Nats => Unit::Nats,
            UnitArg::Bits => Unit::Bits,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-outcome leakage profile and aggregate guarantee levels.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        /// Grid points for continuous mechanisms.
        #[arg(long, default_value_t = 21)]
        steps: usize,
    },
    /// Guarantees implied by one guarantee for a given smallest prior mass.
    Translate(TranslateArgs),
    /// Tabulates both translation curves.
    Sweep {
        #[arg(long)]
        pmin: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Certifies the closed form at one outcome against brute-force adversaries.
    Oracle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        y: usize,
        /// Lattice points per kernel coordinate.
        #[arg(long, default_value_t = 11)]
        grid: usize,
        #[arg(long, default_value_t = 3)]
        max_u: usize,
        #[arg(long, default_value_t = 20_000)]
        iterations: usize,
    },
    /// Dumps the constructed mechanism.
    Mechanism {
        #[arg(long)]
        input: PathBuf,
    },
    /// Runs the property suite on seeded random instances.
    Props {
        #[arg(long, default_value_t = 1000)]
        instances: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

#[derive(Debug, Args)]
#[group(skip)]
#[command(group(
    ArgGroup::new("guarantee")
        .required(true)
        .multiple(false)
        .args(["pml", "pmc", "lip", "ldp", "alip"])
))]
pub struct TranslateArgs {
    #[arg(long, value_parser = parse_level)]
    pub pml: Option<Nats>,
    #[arg(long, value_parser = parse_level)]
    pub pmc: Option<Nats>,
    #[arg(long, value_parser = parse_level)]
    pub lip: Option<Nats>,
    #[arg(long, value_parser = parse_level)]
    pub ldp: Option<Nats>,
    /// `EPS_L,EPS_U`.
    #[arg(long, value_parser = parse_pair)]
    pub alip: Option<(Nats, Nats)>,
    #[arg(long)]
    pub pmin: f64,
}

fn parse_level(text: &str) -> std::result::Result<Nats, String> {
    let t = text.trim();
    if t == "inf" {
        return Ok(ExtReal::Infinite);
    }
    t.parse::<f64>()
        .map_err(|e| e.to_string())
        .and_then(|v| if v.is_nan() { Err("NaN level".into()) } else { Ok(Nats::from_f64(v)) })
}

fn parse_pair(text: &str) -> std::result::Result<(Nats, Nats), String> {
    let (l, u) = text.split_once(',').ok_or("expected EPS_L,EPS_U")?;
    Ok((parse_level(l)?, parse_level(u)?))
}

impl TranslateArgs {
    fn guarantee(&self) -> Guarantee {
        if let Some(eps) = &self.pml {
            Guarantee::Pml { eps: eps.clone() }
        } else if let Some(eps) = &self.pmc {
            Guarantee::Pmc { eps: eps.clone() }
        } else if let Some(eps) = &self.lip {
            Guarantee::Lip { eps: eps.clone() }
        } else if let Some(eps) = &self.ldp {
            Guarantee::Ldp { eps: eps.clone() }
        } else {
            let (eps_l, eps_u) = self.alip.clone().expect("clap enforces one guarantee");
            Guarantee::Alip { eps_l, eps_u }
        }
    }
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    PropertyViolation = 1,
    InputError = 2,
}

/// Result of one run: named artifacts plus a status.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub artifacts: Vec<(String, String)>,
    pub status: Status,
}

impl Outcome {
    fn ok(artifacts: Vec<(String, String)>) -> Self {
        Outcome {
            artifacts,
            status: Status::Ok,
        }
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse {
        field: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let unit = Unit::from(cli.unit);
    match &cli.command {
        Command::Analyze { input, steps } => {
            let text = read(input)?;
            match cli.mode {
                Mode::Float => analyze::<f64>(&text, unit, *steps, cli.seed),
                Mode::Rational => analyze::<BigRational>(&text, unit, *steps, cli.seed),
            }
        }
        Command::Translate(args) => {
            let result = derive_implications(&args.guarantee(), args.pmin)?;
            Ok(Outcome::ok(vec![(
                "translation.json".into(),
                pretty(&result.in_unit(unit)),
            )]))
        }
        Command::Sweep { pmin, steps } => {
            let table = sweep_curves(*pmin, *steps)?;
            Ok(Outcome::ok(vec![
                ("lower.csv".into(), table.lower_csv(unit)),
                ("upper.csv".into(), table.upper_csv(unit)),
            ]))
        }
        Command::Oracle {
            input,
            y,
            grid,
            max_u,
            iterations,
        } => {
            let text = read(input)?;
            let cfg = SearchConfig {
                resolution: *grid,
                max_u: *max_u,
                max_iterations: *iterations,
                seed: cli.seed,
                ..SearchConfig::default()
            };
            match cli.mode {
                Mode::Float => oracle::<f64>(&text, *y, &cfg, 1e-9),
                Mode::Rational => oracle::<BigRational>(&text, *y, &cfg, 0.0),
            }
        }
        Command::Mechanism { input } => {
            let text = read(input)?;
            match cli.mode {
                Mode::Float => dump::<f64>(&text),
                Mode::Rational => dump::<BigRational>(&text),
            }
        }
        Command::Props { instances, tol } => {
            let outcomes = match cli.mode {
                Mode::Float => run_suite::<f64>(cli.seed, *instances, *tol)?,
                Mode::Rational => run_suite::<BigRational>(cli.seed, *instances, *tol)?,
            };
            let status = if outcomes.iter().all(|o| o.passed()) {
                Status::Ok
            } else {
                Status::PropertyViolation
            };
            Ok(Outcome {
                artifacts: vec![("props.txt".into(), format_table(&outcomes))],
                status,
            })
        }
    }
}

fn analyze<S: Scalar>(text: &str, unit: Unit, steps: usize, seed: u64) -> Result<Outcome> {
    match parse_mechanism::<S>(text)? {
        Mechanism::Finite(joint) => Ok(Outcome::ok(vec![
            ("profile.csv".into(), LeakageProfile::new(&joint).to_csv(unit)),
            ("levels.json".into(), pretty(&LevelReport::new(&joint).in_unit(unit))),
        ])),
        Mechanism::LaplaceMean(m) => analyze_laplace(&m, unit, steps, seed),
        Mechanism::Gaussian(m) => analyze_gaussian(&m, unit, steps),
    }
}

fn scale(unit: Unit) -> f64 {
    match unit {
        Unit::Nats => 1.0,
        Unit::Bits => std::f64::consts::LN_2,
    }
}

fn grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::InvalidParameter(format!("steps = {steps} is below 2")));
    }
    Ok((0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect())
}

fn csv_table(header: &[String], rows: &[Vec<f64>], unit: Unit) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header).expect("in-memory write");
    for row in rows {
        // first column is the outcome, never rescaled
        let cells = row
            .iter()
            .enumerate()
            .map(|(i, v)| format_f64(if i == 0 { *v } else { v / scale(unit) }));
        writer.write_record(cells).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 output")
}

fn law_json(law: &InputLaw) -> serde_json::Value {
    let (lo, hi) = law.support();
    match law {
        InputLaw::Uniform { .. } => json!({"type": "uniform", "lo": lo, "hi": hi}),
        InputLaw::TruncatedExponential { rate, .. } => {
            json!({"type": "truncated_exponential", "lo": lo, "hi": hi, "rate": rate})
        }
        InputLaw::Custom { mean, .. } => json!({"type": "custom", "lo": lo, "hi": hi, "mean": mean}),
    }
}

fn analyze_laplace(m: &LaplaceMean, unit: Unit, steps: usize, seed: u64) -> Result<Outcome> {
    let (c, d) = m.law().support();
    let w = d - c;
    let mc = MonteCarlo {
        seed,
        ..MonteCarlo::default()
    };
    let rows = grid(c - w, d + w, steps)?
        .into_iter()
        .map(|y| Ok(vec![y, laplace_pmc_at(m, y, &mc)?]))
        .collect::<Result<Vec<_>>>()?;
    let s = scale(unit);
    let levels = json!({
        "family": "laplace_mean",
        "unit": unit.suffix(),
        "sup_pmc": laplace_mean_sup_pmc(m)? / s,
        "dp_level": w / (m.n() as f64 * m.scale()) / s,
    });
    Ok(Outcome::ok(vec![
        (
            "profile.csv".into(),
            csv_table(&["y".into(), format!("pmc_{}", unit.suffix())], &rows, unit),
        ),
        ("levels.json".into(), pretty(&levels)),
    ]))
}

fn analyze_gaussian(m: &GaussianPerturb, unit: Unit, steps: usize) -> Result<Outcome> {
    let reach = m.amplitude() + 4.0 * m.sigma();
    let uniform = matches!(m.law(), InputLaw::Uniform { .. });
    let rows = grid(-reach, reach, steps)?
        .into_iter()
        .map(|y| {
            let v = if uniform {
                gaussian_pmc_uniform(m, y)?
            } else {
                gaussian_pmc_quadrature(m, y)?
            };
            let (lo, hi) = gaussian_pmc_bounds(m, y);
            Ok(vec![y, v, lo, hi])
        })
        .collect::<Result<Vec<_>>>()?;
    let sfx = unit.suffix();
    let tail: Vec<_> = [1.0, 2.0, 4.0]
        .iter()
        .map(|&beta| {
            Ok(json!({
                "beta": beta / scale(unit),
                "threshold": (beta + m.r() / 2.0) / scale(unit),
                "bound": gaussian_tail_bound(m.r(), beta)?,
            }))
        })
        .collect::<Result<_>>()?;
    let levels = json!({
        "family": "gaussian",
        "unit": sfx,
        "r": m.r(),
        "law": law_json(m.law()),
        "tail": tail,
    });
    Ok(Outcome::ok(vec![
        (
            "profile.csv".into(),
            csv_table(
                &[
                    "y".into(),
                    format!("pmc_{sfx}"),
                    format!("lower_{sfx}"),
                    format!("upper_{sfx}"),
                ],
                &rows,
                unit,
            ),
        ),
        ("levels.json".into(), pretty(&levels)),
    ]))
}

fn oracle<S: Scalar>(text: &str, y: usize, cfg: &SearchConfig, tol: f64) -> Result<Outcome> {
    let joint = parse_mechanism::<S>(text)?.into_finite()?;
    let report = certify(&joint, y, cfg)?;
    let status = if report.dominance_violated(tol) {
        Status::PropertyViolation
    } else {
        Status::Ok
    };
    Ok(Outcome {
        artifacts: vec![("oracle.json".into(), pretty(&report))],
        status,
    })
}

fn dump<S: Scalar>(text: &str) -> Result<Outcome> {
    let doc = match parse_mechanism::<S>(text)? {
        Mechanism::Finite(joint) => finite_document(&joint),
        Mechanism::LaplaceMean(m) => json!({
            "family": "laplace_mean",
            "n": m.n(),
            "b": m.scale(),
            "law": law_json(m.law()),
            "law_mean": m.law().mean(),
        }),
        Mechanism::Gaussian(m) => json!({
            "family": "gaussian",
            "amplitude": m.amplitude(),
            "sigma": m.sigma(),
            "law": law_json(m.law()),
        }),
    };
    Ok(Outcome::ok(vec![("mechanism.json".into(), pretty(&doc))]))
}

/// Writes artifacts to `dir`, or concatenates them for standard output.
pub fn emit(outcome: &Outcome, dir: Option<&PathBuf>) -> std::io::Result<String> {
    match dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            for (name, content) in &outcome.artifacts {
                std::fs::write(dir.join(name), content)?;
            }
            Ok(String::new())
        }
        None if outcome.artifacts.len() == 1 => Ok(outcome.artifacts[0].1.clone()),
        None => Ok(outcome
            .artifacts
            .iter()
            .map(|(name, content)| format!("# {name}\n{content}"))
            .collect::<Vec<_>>()
            .join("\n")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Result<Outcome> {
        let cli = Cli::try_parse_from(std::iter::once("pmc").chain(args.iter().copied()))
            .expect("valid arguments");
        run(&cli)
    }

    #[test]
    fn translate_pml_to_pmc() {
        let out = run_args(&["translate", "--pml", "0.405465", "--pmin", "0.5"]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.artifacts[0].1).unwrap();
        let pmc = v["implied"]
            .as_array()
            .unwrap()
            .iter()
            .find(|g| g["kind"] == "PMC")
            .unwrap()["eps"]
            .as_f64()
            .unwrap();
        assert!((pmc - 2f64.ln()).abs() < 1e-5);
    }

    #[test]
    fn translate_outside_regime_is_flagged() {
        let out = run_args(&["translate", "--pml", "0.8", "--pmin", "0.5"]).unwrap();
        let text = &out.artifacts[0].1;
        assert!(text.contains("\"inf\"") && text.contains("OutsideHighPrivacy"));
    }

    #[test]
    fn translate_rejects_bad_pmin() {
        assert!(matches!(
            run_args(&["translate", "--pml", "0.1", "--pmin", "1.5"]),
            Err(Error::InvalidPmin(_))
        ));
    }

    #[test]
    fn sweep_has_origin_row() {
        let out = run_args(&["sweep", "--pmin", "0.5", "--steps", "2"]).unwrap();
        assert_eq!(out.artifacts.len(), 2);
        assert!(out.artifacts[0].1.starts_with("eps_u,eps_l_star\n0.0,0.0\n"));
        let bits = run_args(&["sweep", "--pmin", "0.5", "--unit", "bits"]).unwrap();
        assert!(bits.artifacts[1].1.starts_with("eps_l_bits,eps_u_star_bits\n"));
    }

    #[test]
    fn props_table_passes() {
        let out = run_args(&["props", "--instances", "20", "--seed", "4"]).unwrap();
        assert_eq!(out.status, Status::Ok);
    }

    #[test]
    fn level_parsing() {
        assert_eq!(parse_level("inf"), Ok(ExtReal::Infinite));
        assert!(parse_level("NaN").is_err());
        assert_eq!(parse_pair("0.1,inf"), Ok((ExtReal::Finite(0.1), ExtReal::Infinite)));
    }
}
