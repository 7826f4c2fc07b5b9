//! The `eigenframe` command.
//!
//! Exit codes: 0 success, 1 semantic failure (invalid table, failed
//! verification, point outside the region, infeasible target), 2 usage or IO
//! error. Failures also print `{"error": kind, "message": text}` on stderr.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use eigenframe_core::construction::{construct_frame, table_targets, UnitaryChoice};
use eigenframe_core::eigensteps::{
    sample_eigensteps, untf53_lambda, untf53_mu, untf53_region_contains, untf53_region_vertices,
    untf53_table, Region53Point, SamplerConfig,
};
use eigenframe_core::spectra::{entry_bounds, validate_eigensteps, Lengths, Spectrum};
use eigenframe_core::verification::{eigensteps_of_frame, untf53_closed_form, verify_frame};
use eigenframe_core::{Error, Tolerance};
use serde::Serialize;

use crate::format::{
    from_json, to_json, BoundsFile, FormatError, FrameFile, RegionFile, TableFile,
    ValidationFile, VerificationFile, VerticesFile,
};

/// Agreement required between the constructed 3×5 frame and its closed form.
const CLOSED_FORM_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "eigenframe", version, about = "Frames with prescribed spectrum and lengths")]
pub struct Cli {
    /// Comparison tolerance.
    #[arg(long, global = true, default_value_t = 1e-9, value_parser = parse_tol)]
    pub tol: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenstep tables.
    #[command(subcommand)]
    Eigensteps(EigenstepsCommand),
    /// Frame construction and checks.
    #[command(subcommand)]
    Frame(FrameCommand),
    /// The two-parameter family of 3×5 unit norm tight frames.
    #[command(subcommand)]
    Untf53(Untf53Command),
}

#[derive(Debug, Args)]
pub struct Targets {
    /// Frame operator spectrum, comma separated.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub lambda: Vec<f64>,
    /// Squared lengths, comma separated.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub mu: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct Point {
    #[arg(long, allow_hyphen_values = true)]
    pub x: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub y: f64,
}

#[derive(Debug, Subcommand)]
pub enum EigenstepsCommand {
    /// Check a table file; exit 0 iff valid.
    Validate { table: PathBuf },
    /// Draw a random valid table.
    Sample {
        #[command(flatten)]
        targets: Targets,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        attempts: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Per-entry brackets and forced entries.
    Bounds {
        #[command(flatten)]
        targets: Targets,
    },
}

#[derive(Debug, Subcommand)]
pub enum FrameCommand {
    /// Build a frame from a table file.
    Construct {
        table: PathBuf,
        #[arg(long, value_enum, default_value_t = Choice::Identity)]
        u1: Choice,
        #[arg(long, value_enum, default_value_t = Choice::Identity)]
        v: Choice,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a frame file against targets; exit 0 iff both match.
    ///
    /// Targets default to the `lambda`/`mu` stored in the file.
    Verify {
        frame: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        lambda: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        mu: Option<Vec<f64>>,
    },
    /// Recover the eigensteps of a frame file.
    Eigensteps {
        frame: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum Untf53Command {
    /// Table for a parameter point.
    Table {
        #[command(flatten)]
        point: Point,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Membership in the parameter region; exit 0 iff inside.
    Region {
        #[command(flatten)]
        point: Point,
    },
    /// Corners of the parameter region.
    Vertices,
    /// Construct the frame for a point, cross-checked against the closed form
    /// when the point is interior.
    Frame {
        #[command(flatten)]
        point: Point,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Choice {
    Identity,
    Random,
}

impl From<Choice> for UnitaryChoice {
    fn from(c: Choice) -> Self {
        match c {
            Choice::Identity => UnitaryChoice::Identity,
            Choice::Random => UnitaryChoice::Random,
        }
    }
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if t.is_finite() && t >= 0.0 {
        Ok(t)
    } else {
        Err("tolerance must be finite and nonnegative".into())
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            kind: "usage",
            message: message.into(),
        }
    }

    fn semantic(kind: &'static str, message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            kind,
            message: message.into(),
        }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Core(c) => c.into(),
            other => Failure {
                code: 2,
                kind: "input",
                message: other.to_string(),
            },
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let kind = match e {
            Error::InfeasibleTarget => "infeasible_target",
            Error::SamplerExhausted { .. } => "sampler_exhausted",
            Error::InvalidTable { .. } => "invalid_table",
            Error::OutsideRegion => "outside_region",
            _ => "numerical",
        };
        Failure::semantic(kind, e.to_string())
    }
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    message: &'a str,
}

/// What a command produced: a JSON document and, when the command's check
/// did not pass, the failure to report alongside it.
struct Outcome {
    document: String,
    output: Option<PathBuf>,
    failure: Option<Failure>,
}

impl Outcome {
    fn ok(document: String) -> Self {
        Outcome {
            document,
            output: None,
            failure: None,
        }
    }

    fn to(mut self, output: Option<PathBuf>) -> Self {
        self.output = output;
        self
    }

    fn unless(mut self, ok: bool, kind: &'static str, message: &str) -> Self {
        if !ok {
            self.failure = Some(Failure::semantic(kind, message));
        }
        self
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return 0;
        }
        Err(e) => return report(&Failure::usage(e.to_string().trim_end())),
    };
    match execute(&cli).and_then(emit) {
        Ok(None) => 0,
        Ok(Some(f)) | Err(f) => report(&f),
    }
}

fn report(f: &Failure) -> i32 {
    eprint!(
        "{}",
        to_json(&ErrorReport {
            error: f.kind,
            message: &f.message,
        })
    );
    f.code
}

fn emit(outcome: Outcome) -> Result<Option<Failure>, Failure> {
    match &outcome.output {
        Some(path) => fs::write(path, &outcome.document).map_err(|e| Failure {
            code: 2,
            kind: "io",
            message: format!("{}: {e}", path.display()),
        })?,
        None => print!("{}", outcome.document),
    }
    Ok(outcome.failure)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        kind: "io",
        message: format!("{}: {e}", path.display()),
    })
}

fn targets(lambda: &[f64], mu: &[f64], tol: Tolerance) -> Result<(Spectrum, Lengths), Failure> {
    let lambda = Spectrum::new(lambda.to_vec(), tol).map_err(|e| Failure::usage(format!("--lambda: {e}")))?;
    let mu = Lengths::new(mu.to_vec(), tol).map_err(|e| Failure::usage(format!("--mu: {e}")))?;
    Ok((lambda, mu))
}

fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    let tol = Tolerance::new(cli.tol);
    match &cli.command {
        Command::Eigensteps(cmd) => eigensteps(cmd, tol),
        Command::Frame(cmd) => frame(cmd, tol),
        Command::Untf53(cmd) => untf53(cmd, tol),
    }
}

fn eigensteps(cmd: &EigenstepsCommand, tol: Tolerance) -> Result<Outcome, Failure> {
    match cmd {
        EigenstepsCommand::Validate { table } => {
            let file: TableFile = from_json(&read(table)?)?;
            let (lambda, mu) = file.targets(tol)?;
            let report = validate_eigensteps(&file.table()?, &lambda, &mu, tol)?;
            let doc = ValidationFile::from(&report);
            let n = doc.violations.len();
            Ok(Outcome::ok(to_json(&doc)).unless(
                doc.valid,
                "invalid_table",
                &format!("{n} violation(s)"),
            ))
        }
        EigenstepsCommand::Sample {
            targets: t,
            seed,
            attempts,
            output,
        } => {
            let (lambda, mu) = targets(&t.lambda, &t.mu, tol)?;
            if *attempts == 0 {
                return Err(Failure::usage("--attempts must be positive"));
            }
            let cfg = SamplerConfig {
                seed: *seed,
                max_attempts: *attempts,
                tol,
            };
            let table = sample_eigensteps(&lambda, &mu, &cfg)?;
            Ok(Outcome::ok(to_json(&TableFile::new(&table, &lambda, &mu))).to(output.clone()))
        }
        EigenstepsCommand::Bounds { targets: t } => {
            let (lambda, mu) = targets(&t.lambda, &t.mu, tol)?;
            let bounds = entry_bounds(&lambda, &mu, tol);
            Ok(Outcome::ok(to_json(&BoundsFile::from(&bounds))).unless(
                !bounds.is_empty(),
                "infeasible_target",
                "some entry has an empty bracket",
            ))
        }
    }
}

fn frame(cmd: &FrameCommand, tol: Tolerance) -> Result<Outcome, Failure> {
    match cmd {
        FrameCommand::Construct {
            table,
            u1,
            v,
            seed,
            output,
        } => {
            let file: TableFile = from_json(&read(table)?)?;
            let table = file.table()?;
            let (lambda, mu) = file.targets(tol)?;
            let c = construct_frame(&table, (*u1).into(), (*v).into(), *seed, tol)?;
            let doc = FrameFile::from_construction(&c, &lambda, &mu);
            Ok(Outcome::ok(to_json(&doc)).to(output.clone()))
        }
        FrameCommand::Verify { frame, lambda, mu } => {
            let file: FrameFile = from_json(&read(frame)?)?;
            let f = file.frame()?;
            let lambda = lambda
                .clone()
                .or_else(|| file.lambda.clone())
                .ok_or_else(|| Failure::usage("no --lambda given and none stored in the frame file"))?;
            let mu = mu
                .clone()
                .or_else(|| file.mu.clone())
                .ok_or_else(|| Failure::usage("no --mu given and none stored in the frame file"))?;
            let (lambda, mu) = targets(&lambda, &mu, tol)?;
            let report = verify_frame(&f, &lambda, &mu, tol)?;
            Ok(Outcome::ok(to_json(&VerificationFile::from(&report))).unless(
                report.all_ok(),
                "verification_failed",
                &format!(
                    "spectrum error {:e}, length error {:e}",
                    report.max_spectrum_error, report.max_length_error
                ),
            ))
        }
        FrameCommand::Eigensteps { frame, output } => {
            let file: FrameFile = from_json(&read(frame)?)?;
            let table = eigensteps_of_frame(&file.frame()?)?;
            Ok(Outcome::ok(to_json(&TableFile::from_table(&table))).to(output.clone()))
        }
    }
}

fn untf53(cmd: &Untf53Command, tol: Tolerance) -> Result<Outcome, Failure> {
    let point = |p: &Point| Region53Point::new(p.x, p.y);
    match cmd {
        Untf53Command::Table { point: p, output } => {
            let table = untf53_table(point(p));
            let doc = TableFile::new(&table, &untf53_lambda(), &untf53_mu());
            Ok(Outcome::ok(to_json(&doc)).to(output.clone()))
        }
        Untf53Command::Region { point: p } => {
            let inside = untf53_region_contains(point(p), tol);
            let doc = RegionFile {
                x: p.x,
                y: p.y,
                inside,
            };
            Ok(Outcome::ok(to_json(&doc)).unless(
                inside,
                "outside_region",
                "point violates an interlacing inequality",
            ))
        }
        Untf53Command::Vertices => {
            let vertices = untf53_region_vertices().iter().map(|v| [v.x, v.y]).collect();
            Ok(Outcome::ok(to_json(&VerticesFile { vertices })))
        }
        Untf53Command::Frame { point: p, output } => {
            let p = point(p);
            if !untf53_region_contains(p, tol) {
                return Err(Error::OutsideRegion.into());
            }
            let table = untf53_table(p);
            let c = construct_frame(&table, UnitaryChoice::Identity, UnitaryChoice::Identity, 0, tol)?;
            let (lambda, mu) = table_targets(&table, tol)?;
            match untf53_closed_form(p, tol) {
                Ok(closed) => {
                    let d = closed.max_abs_diff(&c.frame);
                    if d > CLOSED_FORM_TOL {
                        return Err(Failure::semantic(
                            "closed_form_mismatch",
                            format!("constructed frame deviates from the closed form by {d:e}"),
                        ));
                    }
                }
                Err(Error::BoundaryPoint) => {}
                Err(e) => return Err(e.into()),
            }
            let doc = FrameFile::from_construction(&c, &lambda, &mu);
            Ok(Outcome::ok(to_json(&doc)).to(output.clone()))
        }
    }
}
