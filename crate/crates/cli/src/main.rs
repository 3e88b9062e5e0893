//! Command-line front end: Schreier families, norms, dual norms, section
//! vertices, witness families and the seeded check suites.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use epspace::constructions::c5_witness;
use epspace::harness::{run_suite, SuiteReport, Verdict};
use epspace::norm::{norm, Engine};
use epspace::rational::{fmt_rational, parse_rational};
use epspace::schreier::DEFAULT_ENUM_CAP;
use epspace::{
    dual_norm, schreier_enumerate, schreier_maximal, schreier_member, section_extreme_points,
    FinSet, Ordinal, SpaceConfig, SparseVector,
};

#[derive(Parser)]
#[command(name = "epspace", version, about = "Exact norm computations on finite sections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Schreier family membership and enumeration.
    Schreier {
        #[command(subcommand)]
        op: SchreierOp,
    },
    /// Norm of a vector.
    Norm {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "vec", allow_hyphen_values = true)]
        vector: String,
        #[arg(long, value_enum, default_value_t = EngineArg::Bb)]
        engine: EngineArg,
        #[arg(long)]
        json: bool,
    },
    /// Dual norm of a functional given by its coefficients.
    Dualnorm {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        func: String,
        #[arg(long)]
        json: bool,
    },
    /// Vertices of the unit ball restricted to a few coordinates.
    Extreme {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        coords: String,
        #[arg(long)]
        json: bool,
    },
    /// Witness family for a set of block indices.
    Witness {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        set: String,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        json: bool,
    },
    /// Seeded check suites; exits with status 1 when any check fails.
    Check {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        suite: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the full report to this file.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Quantitative validation of a configuration.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Subcommand)]
enum SchreierOp {
    Member {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        set: String,
    },
    Enum {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        max_n: usize,
        #[arg(long, default_value_t = DEFAULT_ENUM_CAP)]
        cap: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Exhaustive,
    Bb,
}

fn load(path: &PathBuf) -> Result<SpaceConfig> {
    SpaceConfig::from_file(path).with_context(|| format!("loading {}", path.display()))
}

fn ordinal(s: &str) -> Result<Ordinal> {
    s.parse().with_context(|| format!("bad ordinal `{s}`"))
}

fn finset(s: &str) -> Result<FinSet> {
    s.parse().with_context(|| format!("bad set `{s}`"))
}

fn vector(s: &str) -> Result<SparseVector> {
    s.parse().with_context(|| format!("bad vector `{s}`"))
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn print_suite(report: &SuiteReport) {
    for r in &report.reports {
        let verdict = match r.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "FAIL",
        };
        println!(
            "{:<5} {verdict}  instances={} skipped={} failures={} runtime_ms={}",
            r.id,
            r.instances,
            r.skipped,
            r.failures.len(),
            r.runtime_ms
        );
        for f in r.failures.iter().take(5) {
            println!("  {} | {} {} {}", f.input, f.lhs, f.relation, f.rhs);
        }
    }
    println!("seed = {}", report.seed);
    println!("config = {}", report.config_digest);
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Schreier { op } => match op {
            SchreierOp::Member { alpha, set } => {
                let a = ordinal(&alpha)?;
                let f = finset(&set)?;
                let member = schreier_member(&f, &a);
                println!("member = {member}");
                if member {
                    println!("maximal = {}", schreier_maximal(&f, &a)?);
                }
            }
            SchreierOp::Enum { alpha, max_n, cap } => {
                let mut out = std::io::stdout().lock();
                for f in schreier_enumerate(&ordinal(&alpha)?, max_n, cap)? {
                    // A closed pipe (e.g. `| head`) just ends the listing.
                    if writeln!(out, "{f}").is_err() {
                        break;
                    }
                }
            }
        },
        Command::Norm {
            config,
            vector: v,
            engine,
            json,
        } => {
            let cfg = load(&config)?;
            let engine = match engine {
                EngineArg::Exhaustive => Engine::Exhaustive,
                EngineArg::Bb => Engine::BranchAndBound,
            };
            let r = norm(&vector(&v)?, &cfg, engine)?;
            println!("value = {}", fmt_rational(&r.value));
            if json {
                print_json(&r)?;
            }
        }
        Command::Dualnorm { config, func, json } => {
            let cfg = load(&config)?;
            let r = dual_norm(&vector(&func)?, &cfg)?;
            println!("value = {}", fmt_rational(&r.value));
            if json {
                print_json(&r)?;
            }
        }
        Command::Extreme {
            config,
            coords,
            json,
        } => {
            let cfg = load(&config)?;
            let pts = section_extreme_points(&cfg, &finset(&coords)?)?;
            println!("count = {}", pts.len());
            if json {
                print_json(&pts)?;
            } else {
                for p in &pts {
                    println!("{p}");
                }
            }
        }
        Command::Witness {
            config,
            set,
            alpha,
            eps,
            strict,
            json,
        } => {
            let cfg = load(&config)?;
            let m = finset(&set)?.into_vec();
            let eps = parse_rational(&eps)?;
            let w = c5_witness(&m, &ordinal(&alpha)?, &eps, &cfg, strict)?;
            if json {
                print_json(&w)?;
            } else {
                println!("k = {}", w.k);
                println!("order = {}", w.order);
                println!("shift = {}", w.shift);
                println!("D = {}", fmt_rational(&w.d));
                for (i, t) in w.tau.iter().enumerate() {
                    println!("tau_{} = {t}", i + 1);
                }
                for (m, u) in &w.u {
                    println!("u_{m} = {u}");
                }
                println!("total norm = {}", fmt_rational(&w.report.total_norm));
                println!("dominated = {}", w.report.dominated);
                println!("sets checked = {}", w.report.sets_checked);
                println!("max small norm = {}", fmt_rational(&w.report.max_small_norm));
            }
        }
        Command::Check {
            config,
            suite,
            seed,
            json,
        } => {
            let cfg = load(&config)?;
            let ids: Vec<&str> = suite.iter().map(String::as_str).collect();
            let report = run_suite(&cfg, &ids, seed)?;
            print_suite(&report);
            if let Some(path) = json {
                std::fs::write(&path, serde_json::to_string_pretty(&report)?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            return Ok(report.verdict == Verdict::Pass);
        }
        Command::Validate { config } => {
            let cfg = load(&config)?;
            let report = cfg.validate();
            println!("{report}");
            if !report.is_ok() {
                bail!("configuration is not valid for mode {}", cfg.mode());
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
