//! Command-line front end. Results go to stdout, diagnostics to stderr.
//!
//! Exit codes: 0 on success, 1 on domain errors (for example a matrix that is
//! not positive semidefinite, or a failed `verify` suite), 2 on I/O, parse
//! and usage errors.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::blocks::{delta_central_detail, delta_direct_sum_bound, delta_prime, CentralSearchConfig};
use crate::contrast::{delta, delta2, delta_scan, ContrastReport, ScanConfig};
use crate::error::Error;
use crate::image::{image_contrast_report, ImageMode};
use crate::pnm::{parse_pnm, PnmError};
use crate::report::{fmt_sig, path_name, InputInfo, Metric, ReportDocument};
use crate::text::{parse_blocks, parse_matrix_text, LoadError, TextError};
use crate::verify;

#[derive(Debug, Parser)]
#[command(name = "opcontrast", version, about = "Contrast of positive operators, block operators and images")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Contrast of a PSD matrix.
    Delta {
        file: PathBuf,
        /// Minimize ‖1 - x/A‖ directly instead of using the closed form.
        #[arg(long)]
        scan: bool,
        #[arg(long)]
        json: bool,
    },
    /// Blockwise and central contrast of a block operator.
    Blocks {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Contrast of squared singular values of a rectangular matrix.
    Delta2 {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Contrast of a PGM/PPM image.
    Image {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "michelson")]
        mode: ImageMode,
        #[arg(long)]
        json: bool,
    },
    /// Run the randomized property suites.
    Verify {
        /// Samples per suite.
        #[arg(long, default_value_t = 200)]
        seeds: usize,
        /// Base seed for the sample generators.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Membership in the cone {x : Δ(x) ≤ c}.
    Cone {
        file: PathBuf,
        #[arg(long = "c")]
        level: f64,
        #[arg(long, default_value_t = 0.0)]
        slack: f64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Text { path: String, source: TextError },
    #[error("{path}: {source}")]
    Image { path: String, source: PnmError },
    #[error("{path}: {source}")]
    Invalid { path: String, source: Error },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(#[from] Error),
    #[error("{failed} property suite(s) failed")]
    VerifyFailed { failed: usize, output: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Domain(_) | Self::VerifyFailed { .. } => 1,
            Self::Invalid { source, .. } if is_domain(source) => 1,
            _ => 2,
        }
    }
}

fn is_domain(e: &Error) -> bool {
    matches!(
        e,
        Error::NotPositive { .. }
            | Error::SingularMatrix { .. }
            | Error::ZeroOperator
            | Error::NonConvergence { .. }
            | Error::EigenNonConvergence { .. }
    )
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn read_text(path: &Path) -> Result<String, CliError> {
    let bytes = read(path)?;
    String::from_utf8(bytes).map_err(|e| CliError::Text {
        path: path.display().to_string(),
        source: TextError {
            offset: e.utf8_error().valid_up_to(),
            line: 0,
            message: "invalid UTF-8".into(),
        },
    })
}

fn load_err(path: &Path, e: LoadError) -> CliError {
    let path = path.display().to_string();
    match e {
        LoadError::Syntax(source) => CliError::Text { path, source },
        LoadError::Matrix(source) => CliError::Invalid { path, source },
    }
}

fn render(doc: &ReportDocument, json: bool) -> String {
    if json {
        let mut s = doc.to_json();
        s.push('\n');
        s
    } else {
        doc.to_text()
    }
}

fn contrast_text(r: &ContrastReport) -> String {
    let mut s = format!(
        "delta = {}\npath = {}\nlambda_min = {}\nlambda_max = {}\n",
        fmt_sig(r.value),
        path_name(r.path),
        fmt_sig(r.bounds.lo),
        fmt_sig(r.bounds.hi)
    );
    if let Some(a) = r.optimal_scale {
        s.push_str(&format!("optimal_scale = {}\n", fmt_sig(a)));
    }
    s.push_str(&format!("singular = {}\n", r.singular));
    s
}

/// Runs one parsed command and returns what should be printed on stdout.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Delta { file, scan, json } => {
            let m = load_hermitian(file)?;
            let r = if *scan {
                delta_scan(&m, &ScanConfig::default())
            } else {
                delta(&m)
            }
            .map_err(|source| invalid(file, source))?;
            if *json {
                let mut doc = matrix_doc(file, vec![m.dim(), m.dim()], serde_json::json!({ "scan": scan }));
                doc.push(Metric::from_contrast("delta", &r));
                Ok(render(&doc, true))
            } else {
                Ok(contrast_text(&r))
            }
        }
        Command::Blocks { file, json } => {
            let src = read_text(file)?;
            let b = parse_blocks(&src).map_err(|e| load_err(file, e))?;
            let cfg = CentralSearchConfig::default();
            let prime = delta_prime(&b)?;
            let central = delta_central_detail(&b, &cfg)?;
            let bound = delta_direct_sum_bound(&b, &cfg)?;
            let mut doc = matrix_doc(file, b.dims(), serde_json::to_value(cfg).expect("plain struct"));
            for (k, (blk, label)) in b.blocks().iter().zip(b.labels()).enumerate() {
                let name = label.clone().unwrap_or_else(|| k.to_string());
                doc.push(Metric::from_contrast(format!("delta.block[{name}]"), &delta(blk)?));
            }
            doc.push(Metric::plain("delta_prime", prime));
            doc.push(Metric {
                optimal_scale: central.scale,
                path: Some("central_search".into()),
                ..Metric::plain("delta_central", central.value)
            });
            doc.push(Metric::plain("direct_sum_bound.lhs", bound.lhs));
            doc.push(Metric::plain("direct_sum_bound.rhs", bound.rhs));
            let mut out = render(&doc, *json);
            if !*json {
                let holds = bound.lhs <= bound.rhs + 2e-3;
                out.push_str(&format!("direct_sum_bound = {}\n", if holds { "holds" } else { "VIOLATED" }));
            }
            Ok(out)
        }
        Command::Delta2 { file, json } => {
            let src = read_text(file)?;
            let m = parse_matrix_text(&src)
                .map_err(|source| CliError::Text {
                    path: file.display().to_string(),
                    source,
                })?
                .into_rect()
                .map_err(|source| invalid(file, source))?;
            let mut doc = matrix_doc(file, vec![m.rows(), m.cols()], serde_json::json!({}));
            doc.push(Metric::plain("delta2", delta2(&m)?));
            Ok(render(&doc, *json))
        }
        Command::Image { file, mode, json } => {
            let bytes = read(file)?;
            let img = parse_pnm(&bytes).map_err(|source| CliError::Image {
                path: file.display().to_string(),
                source,
            })?;
            let doc = image_contrast_report(&img, *mode, Some(&file.display().to_string()))?;
            Ok(render(&doc, *json))
        }
        Command::Verify { seeds, seed, json } => {
            if *seeds == 0 {
                return Err(CliError::Usage("--seeds must be at least 1".into()));
            }
            let results = verify::run_all(*seeds, *seed);
            let failed = results.iter().filter(|r| !r.passed()).count();
            let out = if *json {
                let mut s = serde_json::to_string_pretty(&serde_json::to_value(&results).expect("serializable"))
                    .expect("value serializes");
                s.push('\n');
                s
            } else {
                let mut s = String::new();
                for r in &results {
                    let tag = match (r.passed(), r.informational) {
                        (true, true) => "INFO",
                        (true, false) => "PASS",
                        (false, _) => "FAIL",
                    };
                    s.push_str(&format!("{tag}  {} ({} cases)", r.name, r.cases));
                    if let Some(n) = &r.note {
                        s.push_str(&format!(": {n}"));
                    }
                    if let Some(f) = &r.first_failure {
                        s.push_str(&format!(": {f}"));
                    }
                    s.push('\n');
                }
                s
            };
            if failed > 0 {
                return Err(CliError::VerifyFailed { failed, output: out });
            }
            Ok(out)
        }
        Command::Cone { file, level, slack, json } => {
            if !(0.0..=1.0).contains(level) {
                return Err(CliError::Usage(format!("--c must lie in [0, 1], got {level}")));
            }
            let m = load_hermitian(file)?;
            let r = delta(&m).map_err(|source| invalid(file, source))?;
            let member = r.value <= level + slack;
            let mut doc = matrix_doc(
                file,
                vec![m.dim(), m.dim()],
                serde_json::json!({ "c": level, "slack": slack }),
            );
            doc.push(Metric::from_contrast("delta", &r));
            doc.push(Metric::plain("member", if member { 1.0 } else { 0.0 }));
            if *json {
                Ok(render(&doc, true))
            } else {
                Ok(format!(
                    "delta = {}\nc = {}\nmember = {member}\n",
                    fmt_sig(r.value),
                    fmt_sig(*level)
                ))
            }
        }
    }
}

fn invalid(path: &Path, source: Error) -> CliError {
    CliError::Invalid {
        path: path.display().to_string(),
        source,
    }
}

fn load_hermitian(path: &Path) -> Result<crate::linalg::HermitianMatrix, CliError> {
    let src = read_text(path)?;
    let m = parse_matrix_text(&src).map_err(|source| CliError::Text {
        path: path.display().to_string(),
        source,
    })?;
    m.into_hermitian().map_err(|source| invalid(path, source))
}

fn matrix_doc(path: &Path, shape: Vec<usize>, config: serde_json::Value) -> ReportDocument {
    ReportDocument::new(
        InputInfo {
            path: Some(path.display().to_string()),
            shape,
        },
        config,
    )
}

/// Parses `args` (including the program name) and executes. Returns the
/// exit code with captured stdout and stderr text.
pub fn run_captured<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 { (0, text, String::new()) } else { (2, String::new(), text) };
        }
    };
    match execute(&cli) {
        Ok(out) => (0, out, String::new()),
        Err(CliError::VerifyFailed { failed, output }) => {
            (1, output, format!("error: {failed} property suite(s) failed\n"))
        }
        Err(e) => (e.exit_code(), String::new(), format!("error: {e}\n")),
    }
}
