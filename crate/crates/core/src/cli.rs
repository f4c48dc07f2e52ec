//! The `frame-decomp` command line front end.
//!
//! Exit codes: 0 success or pass, 1 verification failure, 2 input error,
//! 3 precondition error, 4 label mismatch between a family and a result.
//!
//! Tolerances default to `rank_rel_tol=1e-10, ortho_tol=1e-9,
//! report_tol=1e-9` and can be overridden with `FRAME_DECOMP_TOL`, either as a
//! single number (applied to `ortho_tol` and `report_tol`) or as a
//! comma-separated `key=value` list.

use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::decomp::{self, DecompConfig, Strategy};
use crate::error::Error;
use crate::frames;
use crate::io::{self, AnyFamily, DecompositionReport, FamilyFile, ReportFile};
use crate::linops::{Label, Scalar, Tolerances, VectorFamily};
use crate::zoo::GeneratorSpec;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_LABEL_MISMATCH: i32 = 4;

pub const TOLERANCE_ENV: &str = "FRAME_DECOMP_TOL";

#[derive(Debug, Parser)]
#[command(
    name = "frame-decomp",
    version,
    about = "Blocking decompositions of finite frames"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GenKind {
    ShiftPair,
    DyadicReorder,
    UnionOnb,
    RandomBessel,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StrategyArg {
    Ordered,
    Greedy,
    RieszScaled,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Ordered => Strategy::Ordered,
            StrategyArg::Greedy => Strategy::Greedy,
            StrategyArg::RieszScaled => Strategy::RieszScaled,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a family file.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        copies: Option<usize>,
        #[arg(long)]
        bessel: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Frame, Bessel and Riesz bounds of a family ("-" reads stdin).
    Analyze {
        family: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Split a family into two nearly block-orthogonal parts.
    Decompose {
        family: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        epsilon: f64,
        #[arg(long, value_enum, default_value = "ordered")]
        strategy: StrategyArg,
        #[arg(long)]
        allow_non_unit: bool,
        /// Label of the vector forming the first block (greedy only).
        #[arg(long)]
        start_index: Option<Label>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Re-check a decomposition report against its family.
    Verify { family: PathBuf, result: PathBuf },
    /// Evaluate the consecutive-overlap impossibility certificate.
    Certify {
        family: PathBuf,
        /// Blocks of labels, e.g. "1-2;3-4;5,7;6,8".
        #[arg(long)]
        blocks: String,
        #[arg(long, allow_negative_numbers = true)]
        epsilon: f64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

/// A failed command: exit code plus diagnostic.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    fn input(e: impl std::fmt::Display) -> Self {
        Self::new(EXIT_INPUT, e.to_string())
    }
}

/// Exit code for a library error raised while running a construction.
fn classify(e: &Error) -> i32 {
    match e {
        Error::InvalidEpsilon(_)
        | Error::NotUnitNorm { .. }
        | Error::LinearlyDependent { .. }
        | Error::NoCrossing
        | Error::NotConsecutiveOverlap { .. }
        | Error::EmptyFamily => EXIT_PRECONDITION,
        _ => EXIT_INPUT,
    }
}

/// Parses `FRAME_DECOMP_TOL`.
pub fn parse_tolerances(spec: &str) -> Result<Tolerances, String> {
    let mut tol = Tolerances::default();
    let spec = spec.trim();
    if let Ok(v) = spec.parse::<f64>() {
        tol.ortho_tol = v;
        tol.report_tol = v;
    } else {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got {item:?}"))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| format!("invalid number in {item:?}"))?;
            match key.trim() {
                "rank_rel_tol" => tol.rank_rel_tol = value,
                "ortho_tol" => tol.ortho_tol = value,
                "report_tol" => tol.report_tol = value,
                other => return Err(format!("unknown tolerance {other:?}")),
            }
        }
    }
    tol.validate().map_err(|e| e.to_string())?;
    Ok(tol)
}

fn tolerances_from_env() -> Result<Tolerances, Failure> {
    match std::env::var(TOLERANCE_ENV) {
        Ok(spec) => parse_tolerances(&spec)
            .map_err(|e| Failure::new(EXIT_INPUT, format!("{TOLERANCE_ENV}: {e}"))),
        Err(_) => Ok(Tolerances::default()),
    }
}

/// Parses a block grammar such as `"1-2;3-4;5,7"` into label lists.
pub fn parse_blocks(spec: &str) -> Result<Vec<Vec<Label>>, String> {
    let mut blocks = Vec::new();
    for block in spec.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let mut labels = Vec::new();
        for item in block.split(',').map(str::trim) {
            let parse = |s: &str| {
                s.trim()
                    .parse::<Label>()
                    .map_err(|_| format!("invalid label {s:?}"))
            };
            match item.split_once('-') {
                Some((a, b)) => {
                    let (a, b) = (parse(a)?, parse(b)?);
                    if a > b {
                        return Err(format!("empty range {item:?}"));
                    }
                    labels.extend(a..=b);
                }
                None => labels.push(parse(item)?),
            }
        }
        blocks.push(labels);
    }
    if blocks.is_empty() {
        return Err("no blocks given".into());
    }
    Ok(blocks)
}

fn read_input(path: &PathBuf) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::input(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
    }
}

fn load_family(path: &PathBuf) -> Result<AnyFamily, Failure> {
    let text = read_input(path)?;
    let file =
        io::parse_family(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    file.to_any().map_err(Failure::input)
}

/// Result of a successful command: text for stdout or the output file, and
/// the exit code.
pub struct Outcome {
    pub text: String,
    pub output: Option<PathBuf>,
    pub code: i32,
}

impl Outcome {
    fn json<S: Serialize>(value: &S, output: Option<PathBuf>) -> Self {
        Self {
            text: io::to_json(value),
            output,
            code: EXIT_OK,
        }
    }
}

/// Executes a parsed command without touching stdout.
pub fn execute(command: Command) -> Result<Outcome, Failure> {
    let tol = tolerances_from_env()?;
    match command {
        Command::Gen {
            kind,
            n,
            dim,
            copies,
            bessel,
            seed,
            output,
        } => {
            let need = |name: &str, v: Option<usize>| {
                v.ok_or_else(|| Failure::input(format!("--{name} is required for this kind")))
            };
            let spec = match kind {
                GenKind::ShiftPair => GeneratorSpec::ShiftPair { n: need("n", n)? },
                GenKind::DyadicReorder => GeneratorSpec::DyadicReorder { n: need("n", n)? },
                GenKind::UnionOnb => GeneratorSpec::UnionOnb {
                    dim: need("dim", dim)?,
                    copies: copies.unwrap_or(1),
                    seed,
                },
                GenKind::RandomBessel => GeneratorSpec::RandomBessel {
                    dim: need("dim", dim)?,
                    n: need("n", n)?,
                    bessel: bessel
                        .ok_or_else(|| Failure::input("--bessel is required for this kind"))?,
                    seed,
                },
            };
            let family = spec.generate().map_err(Failure::input)?;
            Ok(Outcome::json(&FamilyFile::from_family(&family), output))
        }
        Command::Analyze { family, output } => {
            let report = match load_family(&family)? {
                AnyFamily::Real(f) => frames::spectral_report(&f, &tol),
                AnyFamily::Complex(f) => frames::spectral_report(&f, &tol),
            }
            .map_err(|e| Failure::new(classify(&e), e.to_string()))?;
            Ok(Outcome::json(&ReportFile::Spectral(report), output))
        }
        Command::Decompose {
            family,
            epsilon,
            strategy,
            allow_non_unit,
            start_index,
            output,
        } => {
            let config = DecompConfig {
                tol,
                allow_non_unit,
                start: 0,
            };
            let report = match load_family(&family)? {
                AnyFamily::Real(f) => {
                    run_decompose(&f, epsilon, strategy.into(), config, start_index)?
                }
                AnyFamily::Complex(f) => {
                    run_decompose(&f, epsilon, strategy.into(), config, start_index)?
                }
            };
            Ok(Outcome::json(&ReportFile::Decomposition(report), output))
        }
        Command::Verify { family, result } => {
            let family = load_family(&family)?;
            let text = read_input(&result)?;
            let report = match io::parse_report(&text).map_err(Failure::input)? {
                ReportFile::Decomposition(d) => d,
                _ => return Err(Failure::input("result file does not hold a decomposition")),
            };
            let verification = match &family {
                AnyFamily::Real(f) => run_verify(f, &report, &tol)?,
                AnyFamily::Complex(f) => run_verify(f, &report, &tol)?,
            };
            let code = if verification.ok {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAIL
            };
            Ok(Outcome {
                text: io::to_json(&verification),
                output: None,
                code,
            })
        }
        Command::Certify {
            family,
            blocks,
            epsilon,
            output,
        } => {
            let labels = parse_blocks(&blocks).map_err(Failure::input)?;
            let certificate = match load_family(&family)? {
                AnyFamily::Real(f) => run_certify(&f, &labels, epsilon, &tol)?,
                AnyFamily::Complex(f) => run_certify(&f, &labels, epsilon, &tol)?,
            };
            Ok(Outcome::json(&ReportFile::Certificate(certificate), output))
        }
    }
}

fn run_decompose<T: Scalar>(
    family: &VectorFamily<T>,
    epsilon: f64,
    strategy: Strategy,
    mut config: DecompConfig,
    start_index: Option<Label>,
) -> Result<DecompositionReport, Failure> {
    if let Some(label) = start_index {
        config.start = family
            .position_of(label)
            .ok_or_else(|| Failure::input(format!("unknown start label {label}")))?;
    }
    let result = decomp::decompose(family, epsilon, strategy, &config)
        .map_err(|e| Failure::new(classify(&e), format!("precondition failed: {e}")))?;
    let verification = decomp::verify_ledger(family, &result, &config.tol);
    if !verification.ok {
        return Err(Failure::new(
            EXIT_VERIFY_FAIL,
            format!(
                "refusing to emit an unverified result: {}",
                serde_json::to_string(&verification.violation).unwrap_or_default()
            ),
        ));
    }
    Ok(DecompositionReport::from_result(family, &result))
}

fn run_verify<T: Scalar>(
    family: &VectorFamily<T>,
    report: &DecompositionReport,
    tol: &Tolerances,
) -> Result<decomp::LedgerVerification, Failure> {
    let result = report.to_result(family).map_err(|e| match e {
        Error::UnknownLabel(_) | Error::LengthMismatch { .. } | Error::DuplicateLabel(_) => {
            Failure::new(
                EXIT_LABEL_MISMATCH,
                format!("result does not match the family: {e}"),
            )
        }
        other => Failure::input(other),
    })?;
    Ok(decomp::verify_ledger(family, &result, tol))
}

fn run_certify<T: Scalar>(
    family: &VectorFamily<T>,
    labels: &[Vec<Label>],
    epsilon: f64,
    tol: &Tolerances,
) -> Result<decomp::PerturbationCertificate, Failure> {
    let blocks = labels
        .iter()
        .map(|b| family.positions_of(b))
        .collect::<Result<Vec<_>, _>>()
        .map_err(Failure::input)?;
    decomp::impossibility_certificate(family, &blocks, epsilon, tol)
        .map_err(|e| Failure::new(classify(&e), e.to_string()))
}

/// Runs the CLI on `args` and returns the process exit code. Output is written
/// only after the command has fully succeeded.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(outcome) => {
            let written = match &outcome.output {
                Some(path) => std::fs::write(path, &outcome.text),
                None => std::io::stdout().write_all(outcome.text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: cannot write output: {e}");
                return EXIT_INPUT;
            }
            outcome.code
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_grammar() {
        assert_eq!(
            parse_blocks("1-2;3-4;5,7;6, 8").unwrap(),
            vec![vec![1, 2], vec![3, 4], vec![5, 7], vec![6, 8]]
        );
        assert_eq!(
            parse_blocks("1-8").unwrap(),
            vec![(1..=8).collect::<Vec<_>>()]
        );
        assert!(parse_blocks("").is_err());
        assert!(parse_blocks("3-1").is_err());
        assert!(parse_blocks("a").is_err());
    }

    #[test]
    fn tolerance_overrides() {
        let t = parse_tolerances("1e-7").unwrap();
        assert_eq!(
            (t.ortho_tol, t.report_tol, t.rank_rel_tol),
            (1e-7, 1e-7, 1e-10)
        );
        let t = parse_tolerances("rank_rel_tol=1e-12, report_tol=1e-8").unwrap();
        assert_eq!(
            (t.rank_rel_tol, t.ortho_tol, t.report_tol),
            (1e-12, 1e-9, 1e-8)
        );
        assert!(parse_tolerances("ortho_tol=-1").is_err());
        assert!(parse_tolerances("speed=3").is_err());
        assert!(parse_tolerances("rank_rel_tol=2").is_err());
    }
}
