//! Command-line front end for `mapcones`.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |---|---|
//! | 0 | IN (`check`), witness found (`witness`), success, or a passing report (`verify`) |
//! | 1 | OUT, no witness, or a failing report |
//! | 2 | UNDECIDED |
//! | 64 | unparsable file or command line |
//! | 65 | dimension or data error (mismatched sizes, non-Hermitian input) |
//! | 66 | unknown cone, theorem or format name |
//! | 70 | internal failure (no convergence, invalid certificate) |
//! | 74 | I/O failure |

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use mapcones::cones::{
    in_e, in_f, in_p, in_s, is_block_positive, is_cop, is_cp, is_decomposable, is_positive_map, is_separable,
    witness_search, Certificate, ConeId, DykstraConfig, Status, Verdict,
};
use mapcones::harness::{emit_report, verify, ConeSampler, ReportFormat, TheoremId};
use mapcones::mapfile::{fmt_f64, MapFile};
use mapcones::{choi, Dims, Error, MapRep};

pub mod exit {
    pub const IN: i32 = 0;
    pub const OUT: i32 = 1;
    pub const UNDECIDED: i32 = 2;
    pub const USAGE: i32 = 64;
    pub const DATA: i32 = 65;
    pub const UNKNOWN_NAME: i32 = 66;
    pub const INTERNAL: i32 = 70;
    pub const IO: i32 = 74;
}

/// Seed used when `--seed` is absent.
pub const DEFAULT_SEED: u64 = 20_090_101;

#[derive(Debug, Parser)]
#[command(name = "mapcones", version, about = "Cones of positive maps via Choi matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test membership of a map (or composite operator) in a cone.
    Check {
        file: PathBuf,
        /// cp, cop, p, d, s, pos, psd, f, e, sep or blockpos
        cone: String,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Restarts for the product-vector search (pos, blockpos).
        #[arg(long, default_value_t = 8)]
        restarts: usize,
    },
    /// Print Tr(C_a C_b).
    Pair { a: PathBuf, b: PathBuf },
    /// Search for a PPT witness of non-decomposability.
    Witness {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Write the witness here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a random member of a map cone.
    Random {
        cone: String,
        n: usize,
        m: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite and print its report.
    Verify {
        theorem: String,
        n: usize,
        m: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// json or markdown
        #[arg(long, default_value = "json")]
        format: String,
    },
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse(_) | Error::NonFinite { .. } | Error::InvalidConfig(_) => exit::USAGE,
            Error::DimensionMismatch(_) | Error::InvalidDims(_) | Error::NotHermitian { .. } | Error::InvalidState(_) => {
                exit::DATA
            }
            Error::UnknownName(_) => exit::UNKNOWN_NAME,
            _ => exit::INTERNAL,
        };
        Self::new(code, e.to_string())
    }
}

type CliResult = std::result::Result<i32, CliError>;

fn read_file(path: &Path) -> std::result::Result<MapFile, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::new(exit::IO, format!("cannot read {}: {e}", path.display())))?;
    Ok(MapFile::parse(&text)?)
}

fn write_text(path: Option<&Path>, text: &str, out: &mut dyn Write) -> std::result::Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::new(exit::IO, format!("cannot write {}: {e}", p.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::new(exit::IO, format!("cannot write output: {e}"))),
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::new(exit::IO, format!("cannot write output: {e}"))
}

/// Exit code of a verdict.
pub fn verdict_code<T: mapcones::Real>(v: &Verdict<T>) -> i32 {
    match v.status {
        Status::In => exit::IN,
        Status::Out => exit::OUT,
        Status::Undecided => exit::UNDECIDED,
    }
}

/// Real number with 12 significant digits, trailing zeros trimmed.
pub fn fmt_sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x:.1}");
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&mag) {
        return format!("{x:.11e}");
    }
    let decimals = (11 - mag).max(1) as usize;
    let s = format!("{x:.decimals$}");
    let trimmed = s.trim_end_matches('0');
    if trimmed.ends_with('.') {
        format!("{trimmed}0")
    } else {
        trimmed.to_string()
    }
}

fn fmt_vec(v: &[mapcones::C64]) -> String {
    let parts: Vec<String> = v.iter().map(|z| format!("[{}, {}]", fmt_f64(z.re), fmt_f64(z.im))).collect();
    format!("[{}]", parts.join(", "))
}

fn describe(v: &Verdict, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "status: {}", v.status)?;
    if v.heuristic {
        writeln!(out, "heuristic: true")?;
    }
    let Some(c) = &v.certificate else {
        return Ok(());
    };
    writeln!(out, "certificate: {}", c.kind())?;
    match c {
        Certificate::MinEigen {
            spectrum,
            min_eigenvalue,
            vector,
        } => {
            writeln!(out, "  spectrum: {spectrum:?}")?;
            writeln!(out, "  min_eigenvalue: {}", fmt_f64(*min_eigenvalue))?;
            writeln!(out, "  vector: {}", fmt_vec(vector))?;
        }
        Certificate::PptSpectra {
            min_eigenvalue,
            pt_min_eigenvalue,
        } => {
            writeln!(out, "  min_eigenvalue: {}", fmt_f64(*min_eigenvalue))?;
            writeln!(out, "  pt_min_eigenvalue: {}", fmt_f64(*pt_min_eigenvalue))?;
        }
        Certificate::Decomposition { residual, .. } => {
            writeln!(out, "  residual: {}", fmt_f64(*residual))?;
        }
        Certificate::Witness { value, .. } | Certificate::EntanglementWitness { value, .. } => {
            writeln!(out, "  value: {}", fmt_f64(*value))?;
        }
        Certificate::ProductVectors { xi, eta, value } => {
            writeln!(out, "  value: {}", fmt_f64(*value))?;
            writeln!(out, "  xi: {}", fmt_vec(xi))?;
            writeln!(out, "  eta: {}", fmt_vec(eta))?;
        }
        Certificate::SeparableDecomposition { weights, residual, .. } => {
            writeln!(out, "  terms: {}", weights.len())?;
            writeln!(out, "  residual: {}", fmt_f64(*residual))?;
        }
        Certificate::SampleViolation {
            index, min_eigenvalue, ..
        } => {
            writeln!(out, "  index: {index}")?;
            writeln!(out, "  min_eigenvalue: {}", fmt_f64(*min_eigenvalue))?;
        }
        Certificate::Search { restarts, best_value } => {
            writeln!(out, "  restarts: {restarts}")?;
            writeln!(out, "  best_value: {}", fmt_f64(*best_value))?;
        }
    }
    Ok(())
}

fn check(file: &Path, cone: &str, tol: f64, seed: u64, restarts: usize, out: &mut dyn Write) -> CliResult {
    let cone: ConeId = cone.parse()?;
    let f = read_file(file)?;
    let (d, x) = (f.dims, &f.choi);
    let phi = || MapRep::from_choi(d, x.clone());
    let cfg = DykstraConfig::with_tol(tol);
    cfg.validate()?;
    let v = match cone {
        ConeId::MapCp | ConeId::OpPsd => is_cp(&phi()?, tol)?,
        ConeId::MapCop => is_cop(&phi()?, tol)?,
        ConeId::MapP => in_p(&phi()?, tol)?,
        ConeId::MapD => is_decomposable(&phi()?, &cfg)?,
        ConeId::MapS => in_s(&phi()?, tol, seed)?,
        ConeId::MapPos => is_positive_map(&phi()?, restarts, tol, seed)?,
        ConeId::OpF => in_f(x, d, tol)?,
        ConeId::OpE => in_e(x, d, &cfg)?,
        ConeId::OpSep => is_separable(x, d, tol, seed)?,
        ConeId::OpBlockPos => is_block_positive(x, d, restarts, tol, seed)?,
    };
    writeln!(out, "cone: {cone}").map_err(io_err)?;
    writeln!(out, "dims: {}x{}", d.n, d.m).map_err(io_err)?;
    describe(&v, out).map_err(io_err)?;
    Ok(verdict_code(&v))
}

fn pair(a: &Path, b: &Path, out: &mut dyn Write) -> CliResult {
    let fa = read_file(a)?;
    let fb = read_file(b)?;
    if fa.dims != fb.dims {
        return Err(CliError::new(
            exit::DATA,
            format!(
                "dimension mismatch: ({}, {}) vs ({}, {})",
                fa.dims.n, fa.dims.m, fb.dims.n, fb.dims.m
            ),
        ));
    }
    let v = choi::pairing(&fa.to_map(), &fb.to_map())?;
    writeln!(out, "{}", fmt_sig12(v)).map_err(io_err)?;
    Ok(exit::IN)
}

fn witness(file: &Path, tol: f64, seed: u64, target: Option<&Path>, out: &mut dyn Write) -> CliResult {
    let f = read_file(file)?;
    let cfg = DykstraConfig::with_tol(tol);
    cfg.validate()?;
    let mut v = is_decomposable(&f.to_map(), &cfg)?;
    if v.is_undecided() {
        // second attempt from seeded restarts
        if let Some(found) = witness_search(&f.choi, f.dims, &cfg, 4, seed)? {
            v = Verdict::outside(Certificate::Witness {
                w: found.w,
                value: found.value,
            });
        }
    }
    match (v.status, v.certificate) {
        (Status::Out, Some(Certificate::Witness { w, value })) => {
            let tr = w.trace().re;
            let valid = (tr - 1.0).abs() <= 1e-9 && in_f(&w, f.dims, tol)?.is_in();
            if !valid {
                return Err(CliError::new(exit::INTERNAL, "witness failed post-validation"));
            }
            let text = MapFile::new(f.dims, w)?.with_violation(value).to_json();
            write_text(target, &text, out)?;
            if target.is_some() {
                writeln!(out, "violation: {}", fmt_f64(value)).map_err(io_err)?;
            }
            Ok(exit::IN)
        }
        (Status::Undecided, _) => {
            writeln!(out, "undecided").map_err(io_err)?;
            Ok(exit::UNDECIDED)
        }
        _ => {
            writeln!(out, "none").map_err(io_err)?;
            Ok(exit::OUT)
        }
    }
}

fn random(cone: &str, n: usize, m: usize, seed: u64, target: Option<&Path>, out: &mut dyn Write) -> CliResult {
    let cone: ConeId = cone.parse()?;
    if !cone.is_map_cone() {
        return Err(CliError::new(
            exit::UNKNOWN_NAME,
            format!("`{cone}` is an operator cone; random sampling takes cp, cop, p, d, s or pos"),
        ));
    }
    let d = Dims::new(n, m)?;
    let phi = ConeSampler::new(cone, d, seed)?.draw()?;
    write_text(target, &MapFile::from_map(&phi).to_json(), out)?;
    Ok(exit::IN)
}

#[allow(clippy::too_many_arguments)]
fn run_verify(
    theorem: &str,
    n: usize,
    m: usize,
    trials: usize,
    seed: u64,
    tol: f64,
    format: &str,
    out: &mut dyn Write,
) -> CliResult {
    let id: TheoremId = theorem.parse()?;
    let format: ReportFormat = format.parse()?;
    let report = verify(id, Dims::new(n, m)?, trials, seed, tol)?;
    write_text(None, &emit_report(&report, format), out)?;
    Ok(if report.passed() { exit::IN } else { exit::OUT })
}

/// Runs a parsed command, writing results to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult {
    match cli.command {
        Command::Check {
            file,
            cone,
            tol,
            seed,
            restarts,
        } => check(&file, &cone, tol, seed, restarts, out),
        Command::Pair { a, b } => pair(&a, &b, out),
        Command::Witness {
            file,
            tol,
            seed,
            out: target,
        } => witness(&file, tol, seed, target.as_deref(), out),
        Command::Random {
            cone,
            n,
            m,
            seed,
            out: target,
        } => random(&cone, n, m, seed, target.as_deref(), out),
        Command::Verify {
            theorem,
            n,
            m,
            trials,
            seed,
            tol,
            format,
        } => run_verify(&theorem, n, m, trials, seed, tol, &format, out),
    }
}

/// Parses `args` and runs; returns the process exit code. Usage errors exit
/// with 64 so that they never collide with verdict codes.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::IN };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
            } else {
                let _ = out.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match run(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}
