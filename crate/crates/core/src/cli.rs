//! Command-line front end. Every artifact carries the resolved run
//! configuration and the library version: JSON files under a `run` key,
//! CSV files as a leading `#` comment line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::data::{
    file_dataset, split_preset, synthetic_dataset, ColumnSelector, SynthKind, SynthSpec,
};
use crate::error::{Error, Result};
use crate::export::{create, fmt_f64};
use crate::forecast::{compare, FeatureKind, ForecastConfig};
use crate::kernel::{
    complete_eigenbasis, kernel_eval, metric_tensor, motif_decomposition, MetricTensor,
    AREA_THRESHOLD,
};
use crate::reservoir::{feature_map, CycleReservoir, FORECAST_INPUT_SCALE, KERNEL_INPUT_SCALE};
use crate::spectral::{
    align_motifs_to_fourier, motif_fft, real_fourier_basis, rho_sweep, RelativeAreaReport,
    SweepMode,
};
use crate::structure::{
    build_gram_block, canonicalize_symmetry, matrix_structure, verify_harmonic,
    verify_idempotent_scaled, verify_rank, MAX_GRAM_ROWS,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Grid used by `area-sweep` when `--rho-grid` is absent.
pub const DEFAULT_RHO_GRID: [f64; 5] = [0.9, 0.95, 0.9812798473475446, 0.999, 1.0];

#[derive(Debug, Parser)]
#[command(
    name = "scrkernel",
    version,
    about = "Simple cycle reservoir kernels, motifs and forecasting"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Write the motif basis and motif DFT magnitudes.
    Motifs(MotifsArgs),
    /// Run the structural checks and exit 1 if any fails.
    Verify(VerifyArgs),
    /// Relative area of motif spectra over a grid of spectral radii.
    AreaSweep(AreaArgs),
    /// Compare motif, Fourier and reservoir-state readouts on one series.
    Forecast(ForecastArgs),
    /// Sample the real Fourier basis at an arbitrary window length.
    FourierBasis(FourierArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReservoirArgs {
    /// Reservoir size.
    #[arg(long, default_value_t = 97)]
    pub n: usize,
    /// Spectral radius in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    /// Look-back window length; defaults to n.
    #[arg(long)]
    pub tau: Option<usize>,
}

impl ReservoirArgs {
    fn tau(&self) -> usize {
        self.tau.unwrap_or(self.n)
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("--n must be at least 1".into()));
        }
        if self.tau == Some(0) {
            return Err(Error::Config("--tau must be at least 1".into()));
        }
        check_rho(self.rho)
    }

    fn reservoir(&self, scale: f64) -> Result<CycleReservoir> {
        self.validate()?;
        CycleReservoir::with_pi_pattern(self.n, self.rho, scale)
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho <= 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "spectral radius must lie in (0, 1], got {rho}"
        )))
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MotifsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub reservoir: ReservoirArgs,
    /// Keep motifs with weight at least this fraction of the largest.
    #[arg(long, default_value_t = 0.0)]
    pub threshold: f64,
    /// Output directory (must exist).
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub reservoir: ReservoirArgs,
    /// Seed for the random windows of the kernel-identity check.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AreaMode {
    Scr,
    Random,
    Both,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AreaArgs {
    #[arg(long, default_value_t = 97)]
    pub n: usize,
    /// Comma-separated spectral radii.
    #[arg(long, value_delimiter = ',')]
    pub rho_grid: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = AreaMode::Scr)]
    pub mode: AreaMode,
    /// Seed of the random baseline coupling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also dump the (re, im) motif DFT coefficients of the SCR sweep.
    #[arg(long)]
    pub dump_coefficients: bool,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ForecastArgs {
    #[arg(long, default_value_t = 97)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    #[arg(long, default_value_t = 194)]
    pub tau: usize,
    #[arg(long, default_value_t = 168)]
    pub horizon: usize,
    /// Ridge coefficient.
    #[arg(long, default_value_t = 1e-3)]
    pub alpha: f64,
    /// Input scale of the reservoir-state model.
    #[arg(long, default_value_t = FORECAST_INPUT_SCALE)]
    pub r_in: f64,
    /// Relative motif threshold for rmm-scr (0 keeps all motifs).
    #[arg(long, default_value_t = 0.0)]
    pub threshold: f64,
    /// CSV file with a header row; omit to use a synthetic series.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Column name or zero-based index (required with --data).
    #[arg(long)]
    pub column: Option<String>,
    /// Synthetic series kind when --data is absent.
    #[arg(long, default_value = "sum-of-sines")]
    pub synth: String,
    /// Synthetic series length.
    #[arg(long, default_value_t = 4000)]
    pub length: usize,
    /// Comma-separated train/validation/test fractions.
    #[arg(long, value_delimiter = ',', conflicts_with = "preset")]
    pub splits: Option<Vec<f64>>,
    /// Named split preset, e.g. ett-12-4-4.
    #[arg(long)]
    pub preset: Option<String>,
    /// Seed for synthetic data.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated models.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "rmm-scr,rmm-fourier,scr-state"
    )]
    pub models: Vec<String>,
    /// Also write per-window test predictions.
    #[arg(long)]
    pub dump_predictions: bool,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FourierArgs {
    /// Number of samples per column.
    #[arg(long)]
    pub tau: usize,
    /// Number of columns; defaults to tau.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

/// Resolved configuration echoed into every artifact.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub version: String,
    #[serde(flatten)]
    pub command: Command,
}

impl Command {
    /// Same command with optional flags replaced by their effective values.
    pub fn resolved(&self) -> Self {
        let mut c = self.clone();
        match &mut c {
            Command::Motifs(a) => a.reservoir.tau = Some(a.reservoir.tau()),
            Command::Verify(a) => a.reservoir.tau = Some(a.reservoir.tau()),
            Command::AreaSweep(a) => {
                a.rho_grid.get_or_insert_with(|| DEFAULT_RHO_GRID.to_vec());
            }
            Command::Forecast(a) => {
                if a.splits.is_none() && a.preset.is_none() {
                    a.splits = Some(vec![0.6, 0.2, 0.2]);
                }
            }
            Command::FourierBasis(a) => a.n = Some(a.n.unwrap_or(a.tau)),
        }
        c
    }
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            version: crate::VERSION.to_string(),
            command: command.resolved(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("run config serializes")
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    run: &'a RunConfig,
    result: &'a T,
}

fn write_json_artifact<T: Serialize>(
    dir: &Path,
    name: &str,
    run: &RunConfig,
    value: &T,
) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut w = create(&path)?;
    serde_json::to_writer_pretty(&mut w, &Envelope { run, result: value })?;
    writeln!(w).map_err(|e| Error::io(&path, e))?;
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn write_csv_artifact(
    dir: &Path,
    name: &str,
    run: &RunConfig,
    body: impl FnOnce(&mut Vec<u8>) -> Result<()>,
) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut buf = format!("# {}\n", run.to_json()).into_bytes();
    body(&mut buf)?;
    let mut w = create(&path)?;
    w.write_all(&buf).map_err(|e| Error::io(&path, e))?;
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn require_dir(dir: &Path) -> Result<()> {
    if dir.is_dir() {
        Ok(())
    } else {
        Err(Error::io(
            dir,
            std::io::Error::new(
                std::io::ErrorKind::NotFound,
                "output directory does not exist",
            ),
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Property is not expected at this spectral radius and does not hold.
    ExpectedFail,
    /// Not gated at this configuration; reported for information.
    Info,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    pub deviation: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: String,
}

impl CheckResult {
    fn gated(name: &str, ok: bool, deviation: f64, tolerance: f64, detail: String) -> Self {
        Self {
            name: name.into(),
            status: if ok {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            deviation: Some(deviation),
            tolerance: Some(tolerance),
            detail,
        }
    }

    fn skipped(name: &str, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status: CheckStatus::Skipped,
            deviation: None,
            tolerance: None,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub n: usize,
    pub rho: f64,
    pub tau: usize,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks
            .iter()
            .filter(|c| c.status == CheckStatus::Fail)
            .collect()
    }
}

pub const LEMMA_TOL: f64 = 1e-9;
pub const KERNEL_TOL: f64 = 1e-9;
pub const STRUCTURE_TOL: f64 = 1e-12;
pub const SUBSPACE_TOL: f64 = 1e-8;
pub const WEIGHT_TOL: f64 = 1e-8;
pub const PAIR_TOL: f64 = 1e-9;
pub const CANONICAL_TOL: f64 = 1e-8;

/// Runs the structural suite for one reservoir. Checks that only hold at
/// unit spectral radius are reported as expected failures below it.
pub fn run_verification(r: &CycleReservoir, tau: usize, seed: u64) -> Result<VerifyReport> {
    let n = r.n();
    let rho = r.rho();
    let unit = rho == 1.0;
    let mut checks = Vec::new();

    if tau * n <= MAX_GRAM_ROWS {
        let g = build_gram_block(r, tau)?;
        let dev = verify_idempotent_scaled(&g)?;
        checks.push(CheckResult::gated(
            "gram-scaled-idempotent",
            dev <= LEMMA_TOL * g.lambda,
            dev,
            LEMMA_TOL * g.lambda,
            format!("max|X^2 - lambda X| with lambda = {}", g.lambda),
        ));
        let rank = verify_rank(&g)?;
        checks.push(CheckResult::gated(
            "gram-lambda-multiplicity",
            rank.multiplicity == n,
            rank.max_deviation,
            0.0,
            format!("multiplicity {} (expected {n})", rank.multiplicity),
        ));
    } else {
        let why = format!("X would have {} rows (limit {MAX_GRAM_ROWS})", tau * n);
        checks.push(CheckResult::skipped("gram-scaled-idempotent", why.clone()));
        checks.push(CheckResult::skipped("gram-lambda-multiplicity", why));
    }

    let q = metric_tensor(r, tau)?;
    checks.push(kernel_identity_check(&q, seed)?);

    let s = matrix_structure(&q.q, STRUCTURE_TOL)?;
    let circulant_expected = unit && tau.is_multiple_of(n);
    for (name, check, expected) in [
        ("q-toeplitz", s.toeplitz, unit),
        ("q-centrosymmetric", s.centrosymmetric, unit),
        ("q-circulant", s.circulant, circulant_expected),
    ] {
        let status = match (expected, check.holds) {
            (true, true) => CheckStatus::Pass,
            (true, false) => CheckStatus::Fail,
            (false, false) => CheckStatus::ExpectedFail,
            (false, true) => CheckStatus::Info,
        };
        checks.push(CheckResult {
            name: name.into(),
            status,
            deviation: Some(check.max_deviation),
            tolerance: Some(STRUCTURE_TOL),
            detail: if expected {
                "relative to max|Q|".into()
            } else {
                format!("not expected at rho={rho}, tau={tau}")
            },
        });
    }

    if unit {
        let full = complete_eigenbasis(&q)?;
        let (_, census) = canonicalize_symmetry(&full, CANONICAL_TOL)?;
        let c = census.census.expect("canonicalization reports a census");
        let want = (tau.div_ceil(2), tau / 2);
        checks.push(CheckResult::gated(
            "symmetry-census",
            (c.n_symmetric, c.n_skew) == want,
            0.0,
            0.0,
            format!(
                "{} symmetric, {} skew (expected {}, {})",
                c.n_symmetric, c.n_skew, want.0, want.1
            ),
        ));
    } else {
        checks.push(CheckResult::skipped("symmetry-census", "needs rho = 1"));
    }

    if unit && tau == n {
        let motifs = motif_decomposition(&q, 0.0)?;
        let h = verify_harmonic(&motifs, r)?;
        checks.push(CheckResult::gated(
            "harmonic-subspaces",
            1.0 - h.min_cosine <= SUBSPACE_TOL,
            1.0 - h.min_cosine,
            SUBSPACE_TOL,
            "1 - min principal-angle cosine over weight classes".into(),
        ));
        checks.push(CheckResult::gated(
            "harmonic-weights",
            h.max_weight_rel_error <= WEIGHT_TOL,
            h.max_weight_rel_error,
            WEIGHT_TOL,
            "relative error against n|d_j|^2".into(),
        ));
        checks.push(CheckResult::gated(
            "harmonic-pairing",
            h.max_pair_rel_gap <= PAIR_TOL,
            h.max_pair_rel_gap,
            PAIR_TOL,
            "relative gap within conjugate frequency pairs".into(),
        ));
        let mixed = h.classes.iter().any(|c| c.frequencies.len() > 1);
        if mixed || motifs.n_m() < n {
            checks.push(CheckResult::skipped(
                "fourier-alignment",
                "distinct frequencies share a weight or Q is rank deficient; per-motif assignment is not unique",
            ));
        } else {
            let (canon, _) = canonicalize_symmetry(&motifs, CANONICAL_TOL)?;
            let a = align_motifs_to_fourier(&canon, &real_fourier_basis(n, n)?)?;
            checks.push(CheckResult::gated(
                "fourier-alignment",
                1.0 - a.min_cosine <= SUBSPACE_TOL && a.unmatched_motifs.is_empty(),
                1.0 - a.min_cosine,
                SUBSPACE_TOL,
                format!("{} unmatched motifs", a.unmatched_motifs.len()),
            ));
        }
    } else {
        for name in [
            "harmonic-subspaces",
            "harmonic-weights",
            "harmonic-pairing",
            "fourier-alignment",
        ] {
            checks.push(CheckResult::skipped(name, "needs rho = 1 and tau = n"));
        }
    }

    let passed = checks.iter().all(|c| c.status != CheckStatus::Fail);
    Ok(VerifyReport {
        n,
        rho,
        tau,
        passed,
        checks,
    })
}

/// `|uᵀQv − ⟨φ(u), φ(v)⟩| ≤ tol·(1 + |uᵀQv|)` over 200 seeded random pairs.
fn kernel_identity_check(q: &MetricTensor, seed: u64) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let u: Vec<f64> = (0..q.tau).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..q.tau).map(|_| rng.random_range(-1.0..1.0)).collect();
        let k = kernel_eval(q, &u, &v)?;
        let pu = feature_map(&q.source, &u);
        let pv = feature_map(&q.source, &v);
        let direct: f64 = pu.iter().zip(&pv).map(|(a, b)| a * b).sum();
        worst = worst.max((k - direct).abs() / (1.0 + k.abs()));
    }
    Ok(CheckResult::gated(
        "kernel-identity",
        worst <= KERNEL_TOL,
        worst,
        KERNEL_TOL,
        "200 random window pairs".into(),
    ))
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Precondition(_) | Error::Structural(_) | Error::Resource(_) => {
            EXIT_CONFIG
        }
        Error::Io { .. }
        | Error::Csv(_)
        | Error::Json(_)
        | Error::Data { .. }
        | Error::MissingColumn { .. }
        | Error::InsufficientData { .. } => EXIT_IO,
        Error::Convergence { .. }
        | Error::Singular(_)
        | Error::StructureViolation(_)
        | Error::Ambiguity(_) => EXIT_VERIFY_FAILED,
    }
}

/// What a command produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    /// False only when a verification check failed.
    pub passed: bool,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("{}", f.display());
            }
            if outcome.passed {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(command: &Command) -> Result<Outcome> {
    let run = RunConfig::new(command.clone());
    match command {
        Command::Motifs(a) => cmd_motifs(a, &run),
        Command::Verify(a) => cmd_verify(a, &run),
        Command::AreaSweep(a) => cmd_area_sweep(a, &run),
        Command::Forecast(a) => cmd_forecast(a, &run),
        Command::FourierBasis(a) => cmd_fourier_basis(a, &run),
    }
}

fn cmd_motifs(a: &MotifsArgs, run: &RunConfig) -> Result<Outcome> {
    let r = a.reservoir.reservoir(KERNEL_INPUT_SCALE)?;
    if !(0.0..1.0).contains(&a.threshold) {
        return Err(Error::Config(format!(
            "--threshold must lie in [0, 1), got {}",
            a.threshold
        )));
    }
    require_dir(&a.out)?;
    let q = metric_tensor(&r, a.reservoir.tau())?;
    let m = motif_decomposition(&q, a.threshold)?;
    let mut files = vec![write_csv_artifact(&a.out, "motifs.csv", run, |buf| {
        m.write_csv(buf)
    })?];
    if m.n_m() > 0 {
        let fft = motif_fft(&m)?;
        files.push(write_csv_artifact(&a.out, "motifs_fft.csv", run, |buf| {
            let mut w = csv::Writer::from_writer(buf);
            let mut header = vec!["bin".to_string()];
            header.extend((0..m.n_m()).map(|i| format!("motif_{i}")));
            w.write_record(&header)?;
            for k in 0..fft.rows() {
                let mut row = vec![k.to_string()];
                row.extend((0..fft.cols()).map(|j| fmt_f64(fft[(k, j)].norm())));
                w.write_record(&row)?;
            }
            w.flush().map_err(|e| Error::io("motifs_fft.csv", e))?;
            Ok(())
        })?);
    }
    Ok(Outcome {
        files,
        passed: true,
    })
}

fn cmd_verify(a: &VerifyArgs, run: &RunConfig) -> Result<Outcome> {
    let r = a.reservoir.reservoir(KERNEL_INPUT_SCALE)?;
    require_dir(&a.out)?;
    let report = run_verification(&r, a.reservoir.tau(), a.seed)?;
    for c in &report.checks {
        let status = serde_json::to_value(c.status)?;
        eprintln!("{:<26} {}", c.name, status.as_str().unwrap_or_default());
    }
    for f in report.failures() {
        eprintln!("FAILED: {} ({})", f.name, f.detail);
    }
    let path = write_json_artifact(&a.out, "verify.json", run, &report)?;
    Ok(Outcome {
        files: vec![path],
        passed: report.passed,
    })
}

fn cmd_area_sweep(a: &AreaArgs, run: &RunConfig) -> Result<Outcome> {
    if a.n == 0 {
        return Err(Error::Config("--n must be at least 1".into()));
    }
    let grid = a
        .rho_grid
        .clone()
        .unwrap_or_else(|| DEFAULT_RHO_GRID.to_vec());
    if grid.is_empty() {
        return Err(Error::Config("--rho-grid is empty".into()));
    }
    for &rho in &grid {
        check_rho(rho)?;
    }
    require_dir(&a.out)?;
    let signs = crate::reservoir::pi_sign_pattern(a.n)?;
    let scr = match a.mode {
        AreaMode::Scr | AreaMode::Both => Some(rho_sweep(&signs, &grid, SweepMode::Scr, a.seed)?),
        AreaMode::Random => None,
    };
    let random = match a.mode {
        AreaMode::Random | AreaMode::Both => {
            Some(rho_sweep(&signs, &grid, SweepMode::Random, a.seed)?)
        }
        AreaMode::Scr => None,
    };

    let mut files = vec![write_csv_artifact(&a.out, "area.csv", run, |buf| {
        write_area_rows(buf, &grid, scr.as_deref(), random.as_deref())
    })?];

    if a.dump_coefficients {
        files.push(write_csv_artifact(
            &a.out,
            "area_coefficients.csv",
            run,
            |buf| {
                let mut w = csv::Writer::from_writer(buf);
                w.write_record(["rho", "motif", "bin", "re", "im"])?;
                for &rho in &grid {
                    let r = CycleReservoir::new(rho, signs.clone(), KERNEL_INPUT_SCALE)?;
                    let m = motif_decomposition(&metric_tensor(&r, a.n)?, AREA_THRESHOLD)?;
                    if m.n_m() == 0 {
                        continue;
                    }
                    let fft = motif_fft(&m)?;
                    for j in 0..fft.cols() {
                        for k in 0..fft.rows() {
                            let z = fft[(k, j)];
                            w.write_record([
                                fmt_f64(rho),
                                j.to_string(),
                                k.to_string(),
                                fmt_f64(z.re),
                                fmt_f64(z.im),
                            ])?;
                        }
                    }
                }
                w.flush()
                    .map_err(|e| Error::io("area_coefficients.csv", e))?;
                Ok(())
            },
        )?);
    }
    Ok(Outcome {
        files,
        passed: true,
    })
}

fn write_area_rows(
    buf: &mut Vec<u8>,
    grid: &[f64],
    scr: Option<&[RelativeAreaReport]>,
    random: Option<&[RelativeAreaReport]>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(buf);
    let mut header = vec!["rho"];
    if scr.is_some() {
        header.extend(["area", "retained_motifs", "visited_cells", "clamped"]);
    }
    if random.is_some() {
        header.extend([
            "random_area",
            "random_retained_motifs",
            "random_visited_cells",
            "random_clamped",
        ]);
    }
    w.write_record(&header)?;
    for (i, &rho) in grid.iter().enumerate() {
        let mut row = vec![fmt_f64(rho)];
        for rep in [scr, random].into_iter().flatten() {
            let r = &rep[i];
            row.extend([
                fmt_f64(r.area),
                r.retained_motifs.to_string(),
                r.visited_cells.to_string(),
                r.clamped.to_string(),
            ]);
        }
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("area.csv", e))?;
    Ok(())
}

impl ForecastArgs {
    pub fn fractions(&self) -> Result<[f64; 3]> {
        match (&self.splits, &self.preset) {
            (Some(s), _) => <[f64; 3]>::try_from(s.as_slice()).map_err(|_| {
                Error::Config(format!("--splits needs three fractions, got {}", s.len()))
            }),
            (None, Some(p)) => split_preset(p),
            (None, None) => Ok([0.6, 0.2, 0.2]),
        }
    }

    pub fn forecast_config(&self) -> Result<ForecastConfig> {
        let models = self
            .models
            .iter()
            .map(|m| m.parse::<FeatureKind>())
            .collect::<Result<Vec<_>>>()?;
        let cfg = ForecastConfig {
            n: self.n,
            rho: self.rho,
            tau: self.tau,
            horizon: self.horizon,
            alpha: self.alpha,
            r_in: self.r_in,
            threshold: self.threshold,
            seed: self.seed,
            models,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn cmd_forecast(a: &ForecastArgs, run: &RunConfig) -> Result<Outcome> {
    let cfg = a.forecast_config()?;
    let fractions = a.fractions()?;
    let dataset = match &a.data {
        Some(path) => {
            let column = a
                .column
                .as_deref()
                .ok_or_else(|| Error::Config("--column is required with --data".into()))?;
            require_dir(&a.out)?;
            file_dataset(path, &ColumnSelector::from(column), fractions)?
        }
        None => {
            let kind: SynthKind = a.synth.parse()?;
            require_dir(&a.out)?;
            synthetic_dataset(&SynthSpec::default_for(kind), a.length, a.seed, fractions)?
        }
    };
    let report = compare(&cfg, &dataset)?;
    let mut files = vec![
        write_json_artifact(&a.out, "forecast.json", run, &report)?,
        write_csv_artifact(&a.out, "forecast.csv", run, |buf| report.write_csv(buf))?,
        write_json_artifact(&a.out, "dataset.json", run, &dataset.manifest())?,
    ];
    if a.dump_predictions {
        files.push(write_csv_artifact(&a.out, "predictions.csv", run, |buf| {
            report.write_predictions_csv(buf)
        })?);
    }
    Ok(Outcome {
        files,
        passed: true,
    })
}

fn cmd_fourier_basis(a: &FourierArgs, run: &RunConfig) -> Result<Outcome> {
    let n = a.n.unwrap_or(a.tau);
    if a.tau == 0 || n == 0 || n > a.tau {
        return Err(Error::Config(format!(
            "need 1 <= n <= tau, got n={n}, tau={}",
            a.tau
        )));
    }
    require_dir(&a.out)?;
    let f = real_fourier_basis(a.tau, n)?;
    let path = write_csv_artifact(&a.out, "fourier_basis.csv", run, |buf| {
        let mut w = csv::Writer::from_writer(buf);
        let header: Vec<String> = f
            .enumeration
            .iter()
            .map(|c| {
                let kind = serde_json::to_value(c.kind).ok();
                let kind = kind
                    .as_ref()
                    .and_then(|v| v.as_str())
                    .unwrap_or("col")
                    .to_string();
                format!("{kind}_{}", c.frequency)
            })
            .collect();
        w.write_record(&header)?;
        for i in 0..f.f.rows() {
            w.write_record(f.f.row(i).iter().map(|x| fmt_f64(*x)))?;
        }
        w.flush().map_err(|e| Error::io("fourier_basis.csv", e))?;
        Ok(())
    })?;
    Ok(Outcome {
        files: vec![path],
        passed: true,
    })
}
