//! `curved-dirac` command line front end.
//!
//! Configuration is a TOML document with the sections `[omega]`, `[params]`,
//! an optional `[grid]` and optional `[options]`. Data files are written
//! atomically and are byte-identical for identical input; timings go to a
//! separate `*_metadata.json`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conformal::{ConformalFactor, Family};
use crate::discrete::{assemble, near_zero_eigen, Boundary, Grid, GridSpec};
use crate::error::Error;
use crate::geometry::default_step;
use crate::verify::{
    acceptance_suite, configuration_checks, geometry_errors, Check, Metadata, Overrides,
    Provenance, Status, VerificationReport, CLIFFORD_TOL, GEOMETRY_FD_TOL,
};
use crate::zeromode::{build_zero_mode, degeneracy, ky_range, Branch, Degeneracy, PhysicalParams};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

const DEFAULT_GRID: (f64, f64, usize) = (-5.0, 5.0, 1001);
const GEOMETRY_SAMPLES: usize = 101;
const GEOMETRY_HALF_WIDTH: f64 = 10.0;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// Number of near-zero eigenvalues of the discretized operator to report.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigen_count: Option<usize>,
    /// Tolerance applied to every quadrature-based check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub omega: ConformalFactor,
    pub params: PhysicalParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
    #[serde(default)]
    pub options: Options,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            omega: ConformalFactor::cosh_power(1.0, 1).expect("valid default factor"),
            params: PhysicalParams {
                mass: 1.5,
                kv: 2.5,
                ky: 0.0,
                length: 2.0 * std::f64::consts::PI,
                sigma: Branch::Plus,
            },
            grid: None,
            options: Options::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let config: RunConfig =
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if let Some(tol) = self.options.tol {
            if !(tol.is_finite() && tol >= 0.0) {
                return Err(CliError::Config(format!(
                    "options.tol must be finite and non-negative, got {tol}"
                )));
            }
        }
        Ok(())
    }

    /// Output grid: `[grid]` if present, else `[-5, 5]` with 1001 nodes.
    pub fn output_grid(&self) -> Grid {
        self.grid.unwrap_or_else(|| {
            let (lo, hi, n) = DEFAULT_GRID;
            Grid::new(lo, hi, n).expect("valid default grid")
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Failed(_) => EXIT_CHECK_FAILED,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Failed(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::QuadratureNonConvergence { .. }
            | Error::QuadratureMismatch { .. }
            | Error::EigenNonConvergence(_)
            | Error::NonFinite { .. } => CliError::Failed(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "curved-dirac", version, about = "Zero modes of the Dirac equation on conformally flat (2+1)-dimensional spacetimes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Tolerance for quadrature-based checks.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Number of grid points, overriding `[grid].n_points`.
    #[arg(long = "grid-n", global = true)]
    pub grid_n: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Check frames, connections and the Clifford algebra against FD oracles.
    Geometry,
    /// Build the normalized zero mode and export it as JSON and CSV.
    Zeromode,
    /// Run the acceptance suite plus configuration-specific checks.
    Verify,
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<i32, CliError> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::from_toml(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(tol) = cli.tol {
        config.options.tol = Some(tol);
        config.validate()?;
    }
    if let Some(n) = cli.grid_n {
        let g = config.output_grid();
        config.grid = Some(Grid::new(g.x_min(), g.x_max(), n)?);
    }
    std::fs::create_dir_all(&cli.out)
        .map_err(|e| CliError::Failed(format!("cannot create {}: {e}", cli.out.display())))?;
    match cli.command {
        Command::Geometry => report_command(&cli.out, "geometry", cmd_geometry(&config)),
        Command::Zeromode => {
            let files = cmd_zeromode(&config)?;
            write_atomic(&cli.out.join("zeromode.json"), &files.json)?;
            write_atomic(&cli.out.join("zeromode.csv"), &files.csv)?;
            println!(
                "lambda = {}  N = {:.16e}  degeneracy = {}",
                files.summary.lambda, files.summary.n, files.summary.degeneracy.count
            );
            Ok(EXIT_PASS)
        }
        Command::Verify => report_command(&cli.out, "verify", cmd_verify(&config)),
    }
}

fn report_command(out: &Path, name: &str, report: VerificationReport) -> Result<i32, CliError> {
    for line in report.summary_lines() {
        println!("{line}");
    }
    let (checks, metadata) = report_files(&report);
    write_atomic(&out.join(format!("{name}_report.json")), &checks)?;
    write_atomic(&out.join(format!("{name}_metadata.json")), &metadata)?;
    Ok(if report.any_failed() {
        EXIT_CHECK_FAILED
    } else {
        EXIT_PASS
    })
}

/// The deterministic report body and the separate metadata block.
pub fn report_files(report: &VerificationReport) -> (String, String) {
    #[derive(Serialize)]
    struct Body<'a> {
        command: &'a str,
        checks: &'a [Check],
    }
    #[derive(Serialize)]
    struct Meta<'a> {
        command: &'a str,
        metadata: &'a Metadata,
        check_seconds: Vec<(&'a str, f64)>,
    }
    let body = Body {
        command: &report.command,
        checks: &report.checks,
    };
    let meta = Meta {
        command: &report.command,
        metadata: &report.metadata,
        check_seconds: report
            .checks
            .iter()
            .map(|c| (c.name.as_str(), c.elapsed.as_secs_f64()))
            .collect(),
    };
    (
        serde_json::to_string_pretty(&body).expect("report serializes") + "\n",
        serde_json::to_string_pretty(&meta).expect("metadata serializes") + "\n",
    )
}

pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let io = |e: std::io::Error| CliError::Failed(format!("writing {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Sample abscissae for the geometry checks: the configured grid, or 101
/// points on `[-10, 10]`; tabulated factors stay inside their hull with room
/// for the finite-difference stencil.
pub fn geometry_samples(config: &RunConfig) -> Vec<f64> {
    let (mut lo, mut hi, mut n) = match config.grid {
        Some(g) => (g.x_min(), g.x_max(), g.n_points()),
        None => (-GEOMETRY_HALF_WIDTH, GEOMETRY_HALF_WIDTH, GEOMETRY_SAMPLES),
    };
    if let Family::Tabulated { .. } = config.omega.family() {
        let (a, b) = config.omega.domain();
        let margin = 2.0 * default_step(a.abs().max(b.abs()));
        lo = lo.max(a + margin);
        hi = hi.min(b - margin);
        if lo >= hi {
            return Vec::new();
        }
    }
    if n < 2 {
        n = 2;
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

pub fn cmd_geometry(config: &RunConfig) -> VerificationReport {
    let start = Instant::now();
    let samples = geometry_samples(config);
    let mut fd = Check::new("geometry FD connections", Provenance::FiniteDifference);
    let mut exact = Check::new("geometry frame and Clifford identities", Provenance::Algebra);
    let (mut worst_fd, mut worst_exact) = (0.0f64, 0.0f64);
    let mut failure = None;
    for &x in &samples {
        match geometry_errors(&config.omega, x) {
            Ok((a, b)) => {
                worst_fd = worst_fd.max(a);
                worst_exact = worst_exact.max(b);
            }
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    let note = format!("{} samples of {}", samples.len(), config.omega.label());
    let checks = match (failure, samples.is_empty()) {
        (Some(e), _) => vec![fd.failed(&e), exact.failed(&e)],
        (None, true) => {
            let e = Error::InvalidGrid("no sample points inside the factor's domain".into());
            vec![fd.failed(&e), exact.failed(&e)]
        }
        (None, false) => {
            fd.note.clone_from(&note);
            exact.note = note;
            vec![
                fd.below(worst_fd, GEOMETRY_FD_TOL, None),
                exact.below(worst_exact, CLIFFORD_TOL, None),
            ]
        }
    };
    VerificationReport::new("geometry", checks, start.elapsed())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroModeSummary {
    pub omega: String,
    pub params: PhysicalParams,
    pub lambda: Complex64,
    pub chi: [Complex64; 2],
    #[serde(rename = "N")]
    pub n: f64,
    pub reciprocal_integral: f64,
    pub degeneracy: Degeneracy,
    pub ky_range: (f64, f64),
    pub grid: GridSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub near_zero_eigenvalues: Option<Vec<Complex64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroModeFiles {
    pub summary: ZeroModeSummary,
    pub json: String,
    pub csv: String,
}

pub const CSV_HEADER: &str = "x,re_psi1,im_psi1,re_psi2,im_psi2,P";

pub fn cmd_zeromode(config: &RunConfig) -> Result<ZeroModeFiles, CliError> {
    let p = &config.params;
    let mode = build_zero_mode(p, &config.omega)?;
    let grid = config.output_grid();

    let mut csv = String::with_capacity(grid.n_points() * 140);
    csv.push_str(CSV_HEADER);
    csv.push_str("\r\n");
    for x in grid.nodes() {
        let psi = mode.psi(x, 0.0)?;
        let density = mode.density(x)?;
        writeln!(
            csv,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\r",
            x, psi[0].re, psi[0].im, psi[1].re, psi[1].im, density
        )
        .expect("writing to a String");
    }

    let near_zero = match config.options.eigen_count {
        Some(k) if k > 0 => {
            let h = assemble(p, &config.omega, &grid, Boundary::Dirichlet)?;
            Some(near_zero_eigen(&h, k)?)
        }
        _ => None,
    };
    let summary = ZeroModeSummary {
        omega: config.omega.label(),
        params: *p,
        lambda: mode.lambda(),
        chi: mode.chi(),
        n: mode.norm_constant(),
        reciprocal_integral: mode.reciprocal_integral(),
        degeneracy: degeneracy(p),
        ky_range: ky_range(p)?,
        grid: grid.into(),
        near_zero_eigenvalues: near_zero,
    };
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
    Ok(ZeroModeFiles { summary, json, csv })
}

pub fn cmd_verify(config: &RunConfig) -> VerificationReport {
    let start = Instant::now();
    let overrides = Overrides {
        quadrature: config.options.tol,
    };
    let mut checks = acceptance_suite(&overrides);
    let specific = configuration_checks(&config.params, &config.omega, &overrides);
    if let Some(c) = specific
        .iter()
        .find(|c| matches!(c.status, Status::SkippedDegenerate | Status::SkippedInadmissible))
    {
        eprintln!("configuration checks skipped: {}", c.note);
    }
    checks.extend(specific);
    VerificationReport::new("verify", checks, start.elapsed())
}
