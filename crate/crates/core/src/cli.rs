//! Command-line front end. Every command is deterministic in `--seed`;
//! outputs are pretty-printed JSON or plain tables.
//!
//! Exit codes: 0 success, 1 failed check or mismatch, 2 bad arguments or
//! malformed input, 3 sample budget exhausted during recovery.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::foliation::tangent_space;
use crate::props::{run_props, PropsConfig, PropsReport, Suite};
use crate::ratlin::Vector;
use crate::reconstruct::{recover_factors, verify_round_trip};
use crate::squares::complete_square;
use crate::tensor_space::{generate_instance, seeded_rng, FactorShape, InstanceFile, TensorSpaceInstance};

#[derive(Debug, Parser)]
#[command(name = "tensorcone", version, about = "Recover tensor factors from the cone of simple vectors")]
pub struct RunConfig {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Trials per shape for property runs.
    #[arg(long, global = true, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    /// Write the main JSON output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Suppress progress and summary lines.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a scrambled instance.
    Gen {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// Include a base point.
        #[arg(long)]
        pointed: bool,
    },
    /// Recover the factors of an instance and check them against the hidden
    /// factorization.
    Recover {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Membership test for one vector.
    SimpleCheck {
        #[arg(long)]
        instance: PathBuf,
        /// A JSON array of rationals, or a path to a file holding one.
        #[arg(long)]
        vector: String,
    },
    /// Complete `[[a, b], [c, ?]]` from a JSON file `{"a": .., "b": .., "c": ..}`.
    SquareComplete {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        input: PathBuf,
    },
    /// Run property suites.
    Props {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Tangent dimensions `m + n - 1` for shapes of equal ambient dimension.
    SpinDemo {
        /// Comma-separated shapes such as `4x3,2x6`.
        #[arg(long, default_value = "4x3,2x6")]
        dims: String,
    },
    /// Naturality and functor-law checks on random morphisms.
    Naturality,
}

/// Runs the command line `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    match dispatch(&cfg, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::RetryExhausted { .. } => 3,
        Error::Mismatch(_) => 1,
        Error::Malformed(_) | Error::InvalidInput(_) | Error::DimensionMismatch { .. } | Error::ShapeMismatch => 2,
        _ => 1,
    }
}

fn dispatch(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match &cfg.command {
        Command::Gen { m, n, pointed } => {
            let shape = FactorShape::new(*m as usize, *n as usize)?;
            let inst = generate_instance(shape, cfg.seed, *pointed);
            emit(cfg, out, &inst.to_file())?;
            Ok(0)
        }
        Command::Recover { instance } => cmd_recover(cfg, instance, out),
        Command::SimpleCheck { instance, vector } => {
            let inst = load_instance(instance)?;
            let text = if vector.trim_start().starts_with('[') { vector.clone() } else { read(Path::new(vector))? };
            let v: Vector = parse_json(&text)?;
            let simple = inst.is_simple(&v)?;
            emit(cfg, out, &serde_json::json!({ "simple": simple }))?;
            Ok(0)
        }
        Command::SquareComplete { instance, input } => {
            #[derive(Deserialize)]
            struct Corners {
                a: Vector,
                b: Vector,
                c: Vector,
            }
            let inst = load_instance(instance)?;
            let corners: Corners = parse_json(&read(input)?)?;
            let done = complete_square(&inst, &corners.a, &corners.b, &corners.c)?;
            emit(cfg, out, &done)?;
            Ok(0)
        }
        Command::Props { suite, inject_fault } => {
            let suite: Suite = suite.parse()?;
            let mut pc = PropsConfig::new(suite, cfg.trials as usize, cfg.seed);
            pc.inject_fault = *inject_fault;
            let report = run_props(&pc);
            if !cfg.quiet {
                print_counts(&report, out)?;
            }
            if let Some(path) = &cfg.out {
                write_json(path, &report)?;
            }
            if let Some(cx) = &report.counterexample {
                let _ = writeln!(err, "counterexample:\n{}", to_json(cx)?);
            }
            Ok(if report.passed { 0 } else { 1 })
        }
        Command::SpinDemo { dims } => cmd_spin_demo(cfg, dims, out),
        Command::Naturality => {
            let report = run_props(&PropsConfig::new(Suite::Naturality, cfg.trials as usize, cfg.seed));
            let passed = |p: &str| report.count(p).map_or(0, |c| c.passed);
            let laws = passed("functor_laws");
            let summary = serde_json::json!({
                "trials": report.trials * Suite::Naturality.default_shapes().len(),
                "psi_pass": passed("psi_natural"),
                "phi_pass": passed("phi_natural"),
                "functor_law_pass": laws,
            });
            emit(cfg, out, &summary)?;
            Ok(if report.passed { 0 } else { 1 })
        }
    }
}

fn cmd_recover(cfg: &RunConfig, path: &Path, out: &mut dyn Write) -> Result<i32> {
    let inst = load_instance(path)?;
    let outcome = recover_factors(&inst, &mut seeded_rng(cfg.seed), None).and_then(|r| verify_round_trip(&inst, &r));
    match outcome {
        Ok(report) => {
            emit(cfg, out, &report)?;
            Ok(0)
        }
        Err(e @ (Error::Mismatch(_) | Error::RetryExhausted { .. })) => {
            let shape = inst.shape();
            let failure = serde_json::json!({
                "success": false,
                "m": shape.m,
                "n": shape.n,
                "error": e.to_string(),
                "oracle_calls": inst.oracle_calls(),
            });
            emit(cfg, out, &failure)?;
            Ok(exit_code(&e))
        }
        Err(e) => Err(e),
    }
}

fn cmd_spin_demo(cfg: &RunConfig, dims: &str, out: &mut dyn Write) -> Result<i32> {
    let shapes = parse_dims(dims)?;
    let io = |e: std::io::Error| Error::InvalidInput(e.to_string());
    writeln!(out, "{:<8} {:>7} {:>9} {:>9}", "shape", "ambient", "tangent", "m+n-1").map_err(io)?;
    for shape in shapes {
        let inst = generate_instance(shape, cfg.seed, false);
        let v = inst.sample_simple(&mut seeded_rng(cfg.seed));
        let tangent = tangent_space(&inst, &v)?.dim();
        let note = if shape.is_trivial() { "  (no quadrics: every vector is simple)" } else { "" };
        writeln!(out, "{:<8} {:>7} {:>9} {:>9}{note}", shape.to_string(), shape.dim(), tangent, shape.m + shape.n - 1)
            .map_err(io)?;
    }
    Ok(0)
}

/// Parses `4x3,2x6` into shapes.
pub fn parse_dims(dims: &str) -> Result<Vec<FactorShape>> {
    dims.split(',')
        .map(|item| {
            let bad = || Error::InvalidInput(format!("bad shape {item:?}, expected MxN"));
            let (m, n) = item.trim().split_once(['x', 'X']).ok_or_else(bad)?;
            let m = m.trim().parse().map_err(|_| bad())?;
            let n = n.trim().parse().map_err(|_| bad())?;
            FactorShape::new(m, n).map_err(|_| bad())
        })
        .collect()
}

fn print_counts(report: &PropsReport, out: &mut dyn Write) -> Result<()> {
    let io = |e: std::io::Error| Error::InvalidInput(e.to_string());
    for c in &report.properties {
        let status = if c.failed == 0 { "ok" } else { "FAIL" };
        writeln!(out, "{:<12} {:<28} passed {:>6} failed {:>4}  {status}", c.suite, c.property, c.passed, c.failed)
            .map_err(io)?;
    }
    writeln!(out, "{}", if report.passed { "all properties hold" } else { "property violations found" }).map_err(io)
}

/// Reads an instance file, rebuilding the quadrics from the scramble.
pub fn load_instance(path: &Path) -> Result<TensorSpaceInstance> {
    let file: InstanceFile = parse_json(&read(path)?)?;
    let inst = TensorSpaceInstance::from_file(&file).map_err(|e| Error::Malformed(e.to_string()))?;
    if file.quadric_count != 0 && file.quadric_count != inst.quadrics().len() {
        return Err(Error::Malformed(format!(
            "file declares {} quadrics, shape has {}",
            file.quadric_count,
            inst.quadrics().len()
        )));
    }
    Ok(inst)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Malformed(e.to_string()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json(value)? + "\n").map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn emit<T: Serialize>(cfg: &RunConfig, out: &mut dyn Write, value: &T) -> Result<()> {
    match &cfg.out {
        Some(path) => write_json(path, value),
        None => writeln!(out, "{}", to_json(value)?).map_err(|e| Error::InvalidInput(e.to_string())),
    }
}
