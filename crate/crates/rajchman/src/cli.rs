//! Command-line orchestration for the `rajchman` binary.
//!
//! Two top-level commands: `validate` checks a spec file, and `run` executes
//! a named experiment against it, writing CSV/JSON artifacts plus a run
//! manifest into an output directory. Numeric outputs are byte-identical for
//! a fixed (spec, command, parameters, seed) regardless of worker count; the
//! manifest records workers and wall time but they do not enter the manifest
//! id embedded in the result files.
//!
//! Exit codes: 0 success, 2 spec validation failure, 3 unparseable spec file,
//! 4 bad parameters, 5 computation failure.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::dioph;
use crate::ifs::{IfsSpec, SpecFileError};
use crate::regularity;
use crate::spectral::{self, ScanBand, ScanParams, SpectrumScan};
use crate::walk::{self, StepDistribution};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID_SPEC: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_PARAMS: i32 = 4;
pub const EXIT_COMPUTE: i32 = 5;

/// Numerical experiments on self-similar measures.
#[derive(Debug, Parser)]
#[command(name = "rajchman", version, about)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a spec file; echo the (optionally normalized) system.
    Validate {
        /// IFS spec file: {"maps": [{"r": .., "b": .., "p": ..}, ..]}
        spec: PathBuf,
        /// Also conjugate the attractor hull into [0, 1] before echoing.
        #[arg(long)]
        normalize: bool,
    },
    /// Run a named experiment and write its artifacts.
    Run {
        #[command(subcommand)]
        experiment: Experiment,
    },
}

#[derive(Debug, Subcommand)]
enum Experiment {
    /// Exact moments of the self-similar measure.
    Moments(MomentsArgs),
    /// Transform value at one frequency with a certified error bound.
    Fourier(FourierArgs),
    /// Band scan of |transform| over a frequency range.
    Scan(ScanArgs),
    /// Fit the logarithmic decay exponent to a previous scan.
    Fit(FitArgs),
    /// Overshoot law of the stopped random walk versus its limit.
    Renewal(RenewalArgs),
    /// Residual of the stopping-set phase identity.
    Identity(IdentityArgs),
    /// Arithmetic diagnostics: group classification and approximation exponents.
    Dioph(DiophArgs),
    /// Correlation-exponent fit of ball masses.
    Holder(HolderArgs),
    /// Pair mass of the diagonal strip at given widths.
    Corr(CorrArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// IFS spec file.
    spec: PathBuf,
    /// Directory for result files and the run manifest.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Master seed for all random streams of the run.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = all cores). Defaults to RAJCHMAN_WORKERS if set.
    #[arg(long, default_value_t = default_workers())]
    workers: usize,
}

fn default_workers() -> usize {
    std::env::var("RAJCHMAN_WORKERS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(0)
}

#[derive(Debug, Args)]
struct MomentsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Highest moment order.
    #[arg(long, default_value_t = 8)]
    k: usize,
}

#[derive(Debug, Args)]
struct FourierArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Frequency to evaluate at.
    #[arg(long)]
    xi: f64,
    /// Certified truncation tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, default_value_t = 1.0)]
    xi_min: f64,
    #[arg(long)]
    xi_max: f64,
    /// Geometric bands per decade of frequency.
    #[arg(long, default_value_t = 4.0)]
    bands_per_decade: f64,
    /// Deterministic points per band; as many jittered points are added.
    #[arg(long, default_value_t = 8)]
    samples_per_band: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Scan CSV produced by `run scan`.
    #[arg(long)]
    scan: PathBuf,
}

#[derive(Debug, Args)]
struct RenewalArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Stopping level.
    #[arg(long, default_value_t = 30.0)]
    t: f64,
    /// Trajectories.
    #[arg(long, default_value_t = 1_000_000)]
    n: u64,
    /// Histogram bins over [0, max step].
    #[arg(long, default_value_t = 64)]
    bins: usize,
}

#[derive(Debug, Args)]
struct IdentityArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    s: f64,
    #[arg(long)]
    t: f64,
    #[arg(long)]
    x: f64,
    #[arg(long)]
    y: f64,
}

#[derive(Debug, Args)]
struct DiophArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Continued-fraction depth for the classification.
    #[arg(long, default_value_t = 30)]
    depth: usize,
    /// Exponent weighting the Laplace-defect scan.
    #[arg(long, default_value_t = 1.0)]
    l: f64,
    /// Run the weighted Laplace-defect scan up to this frequency
    /// and emit its CSV.
    #[arg(long)]
    b_max: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    grid_step: f64,
}

#[derive(Debug, Args)]
struct HolderArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, default_value_t = 0.2)]
    r_max: f64,
    #[arg(long, default_value_t = 0.002)]
    r_min: f64,
    /// Number of log-spaced radii.
    #[arg(long, default_value_t = 6)]
    radii: usize,
    /// Sample points for the pair statistic.
    #[arg(long, default_value_t = 200_000)]
    n: u64,
}

#[derive(Debug, Args)]
struct CorrArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Strip half-widths, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.1")]
    deltas: Vec<f64>,
    /// Independent pairs per width.
    #[arg(long, default_value_t = 1_000_000)]
    n: u64,
}

#[derive(Debug)]
enum CliError {
    InvalidSpec(String),
    Parse(String),
    Params(String),
    Compute(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::InvalidSpec(_) => EXIT_INVALID_SPEC,
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Params(_) => EXIT_PARAMS,
            CliError::Compute(_) => EXIT_COMPUTE,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::InvalidSpec(_) => "validation",
            CliError::Parse(_) => "parse",
            CliError::Params(_) => "parameters",
            CliError::Compute(_) => "compute",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::InvalidSpec(m)
            | CliError::Parse(m)
            | CliError::Params(m)
            | CliError::Compute(m) => m,
        }
    }
}

impl From<spectral::SpectralError> for CliError {
    fn from(e: spectral::SpectralError) -> Self {
        CliError::Compute(e.to_string())
    }
}

impl From<walk::WalkError> for CliError {
    fn from(e: walk::WalkError) -> Self {
        CliError::Compute(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Compute(format!("io: {e}"))
    }
}

/// Parse arguments and run; returns the process exit code.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap handles --help/--version as "errors" with success status
            if err.use_stderr() {
                eprintln!("{err}");
                return EXIT_PARAMS;
            }
            print!("{err}");
            return EXIT_OK;
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            let payload = json!({
                "error": { "kind": err.kind(), "message": err.message() }
            });
            eprintln!("{payload}");
            err.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate { spec, normalize } => cmd_validate(&spec, normalize),
        Command::Run { experiment } => match experiment {
            Experiment::Moments(a) => run_moments(a),
            Experiment::Fourier(a) => run_fourier(a),
            Experiment::Scan(a) => run_scan(a),
            Experiment::Fit(a) => run_fit(a),
            Experiment::Renewal(a) => run_renewal(a),
            Experiment::Identity(a) => run_identity(a),
            Experiment::Dioph(a) => run_dioph(a),
            Experiment::Holder(a) => run_holder(a),
            Experiment::Corr(a) => run_corr(a),
        },
    }
}

fn read_spec(path: &Path) -> Result<(IfsSpec, String), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let spec = IfsSpec::from_json_str(&text).map_err(|e| match e {
        SpecFileError::Parse(inner) => CliError::Parse(format!(
            "{}: line {}, column {}: {inner}",
            path.display(),
            inner.line(),
            inner.column()
        )),
        SpecFileError::Invalid(inner) => CliError::InvalidSpec(inner.to_string()),
    })?;
    Ok((spec, text))
}

fn cmd_validate(path: &Path, normalize: bool) -> Result<(), CliError> {
    let (spec, _) = read_spec(path)?;
    let echoed = if normalize {
        spec.normalize_to_unit()
    } else {
        spec.clone()
    };
    let (lo, hi) = spec.hull();
    let report = json!({
        "valid": true,
        "maps": spec.alphabet_len(),
        "normalized": echoed.is_normalized(),
        "hull": [lo, hi],
        "spec": serde_json::from_str::<serde_json::Value>(&echoed.to_json_string()).unwrap(),
    });
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    Ok(())
}

/// Reproducibility record written next to every result file.
#[derive(Debug, Serialize)]
struct RunManifest {
    manifest_id: String,
    tool_version: String,
    command: String,
    spec_path: String,
    spec_sha256: String,
    parameters: serde_json::Value,
    master_seed: u64,
    workers: usize,
    wall_time_s: f64,
}

struct Run {
    manifest_id: String,
    out_dir: PathBuf,
    seed: u64,
    workers: usize,
    command: &'static str,
    spec_path: String,
    spec_sha256: String,
    parameters: serde_json::Value,
    started: Instant,
    files: Vec<String>,
}

impl Run {
    /// Identity covers everything that determines the numbers: tool version,
    /// command, spec bytes, parameters, seed. Workers and wall time stay out.
    fn begin(
        command: &'static str,
        common: &CommonArgs,
        spec_text: &str,
        parameters: serde_json::Value,
    ) -> Result<Run, CliError> {
        let spec_sha256 = hex_digest(spec_text.as_bytes());
        let identity = format!(
            "{}\n{}\n{}\n{}\n{}",
            env!("CARGO_PKG_VERSION"),
            command,
            spec_sha256,
            serde_json::to_string(&parameters).unwrap(),
            common.seed
        );
        std::fs::create_dir_all(&common.out)?;
        Ok(Run {
            manifest_id: hex_digest(identity.as_bytes()),
            out_dir: common.out.clone(),
            seed: common.seed,
            workers: common.workers,
            command,
            spec_path: common.spec.display().to_string(),
            spec_sha256,
            parameters,
            started: Instant::now(),
            files: Vec::new(),
        })
    }

    fn write_json(&mut self, name: &str, body: serde_json::Value) -> Result<(), CliError> {
        let mut object = serde_json::Map::new();
        object.insert("manifest_id".into(), json!(self.manifest_id));
        if let serde_json::Value::Object(map) = body {
            object.extend(map);
        }
        let path = self.out_dir.join(name);
        std::fs::write(
            &path,
            serde_json::to_string_pretty(&serde_json::Value::Object(object)).unwrap(),
        )?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn write_csv(&mut self, name: &str, header: &str, rows: &[Vec<f64>]) -> Result<(), CliError> {
        let mut text = format!("# manifest_id={}\n{header}\n", self.manifest_id);
        for row in rows {
            let mut line = String::new();
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    line.push(',');
                }
                write!(line, "{v}").unwrap();
            }
            text.push_str(&line);
            text.push('\n');
        }
        std::fs::write(self.out_dir.join(name), text)?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn finish(mut self, summary: &[(&str, String)]) -> Result<(), CliError> {
        let manifest = RunManifest {
            manifest_id: self.manifest_id.clone(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: self.command.into(),
            spec_path: self.spec_path.clone(),
            spec_sha256: self.spec_sha256.clone(),
            parameters: self.parameters.clone(),
            master_seed: self.seed,
            workers: self.workers,
            wall_time_s: self.started.elapsed().as_secs_f64(),
        };
        std::fs::write(
            self.out_dir.join("manifest.json"),
            serde_json::to_string_pretty(&manifest).unwrap(),
        )?;
        self.files.push("manifest.json".to_string());
        println!("command        {}", self.command);
        println!("manifest_id    {}", self.manifest_id);
        for (key, value) in summary {
            println!("{key:<14} {value}");
        }
        println!("files          {}", self.files.join(", "));
        Ok(())
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn run_moments(args: MomentsArgs) -> Result<(), CliError> {
    if args.k > 200 {
        return Err(CliError::Params("k must be at most 200".into()));
    }
    let (spec, text) = read_spec(&args.common.spec)?;
    let spec = spec.normalize_to_unit();
    let mut run = Run::begin("moments", &args.common, &text, json!({ "k": args.k }))?;
    let moments = spec.moments(args.k);
    run.write_json("moments.json", json!({ "k_max": args.k, "values": moments.values }))?;
    run.finish(&[
        ("k_max", args.k.to_string()),
        ("m_1", format!("{}", moments.values.get(1).copied().unwrap_or(1.0))),
    ])
}

fn run_fourier(args: FourierArgs) -> Result<(), CliError> {
    if !(args.tol > 0.0) {
        return Err(CliError::Params("tol must be positive".into()));
    }
    let (spec, text) = read_spec(&args.common.spec)?;
    let spec = spec.normalize_to_unit();
    let mut run = Run::begin(
        "fourier",
        &args.common,
        &text,
        json!({ "xi": args.xi, "tol": args.tol }),
    )?;
    let eval = spectral::fourier_recursive(&spec, args.xi, args.tol)?;
    run.write_json(
        "fourier.json",
        json!({
            "xi": eval.frequency,
            "re": eval.value.re,
            "im": eval.value.im,
            "error_bound": eval.error_bound,
        }),
    )?;
    run.finish(&[
        ("xi", format!("{}", eval.frequency)),
        ("abs", format!("{}", eval.value.norm())),
        ("error_bound", format!("{:e}", eval.error_bound)),
    ])
}

fn run_scan(args: ScanArgs) -> Result<(), CliError> {
    if !(args.xi_max > args.xi_min.max(1.0)) {
        return Err(CliError::Params("xi-max must exceed max(xi-min, 1)".into()));
    }
    if !(args.bands_per_decade > 0.0) || args.samples_per_band == 0 || !(args.tol > 0.0) {
        return Err(CliError::Params(
            "bands-per-decade, samples-per-band and tol must be positive".into(),
        ));
    }
    let (spec, text) = read_spec(&args.common.spec)?;
    let spec = spec.normalize_to_unit();
    let parameters = json!({
        "xi_min": args.xi_min,
        "xi_max": args.xi_max,
        "bands_per_decade": args.bands_per_decade,
        "samples_per_band": args.samples_per_band,
        "tol": args.tol,
    });
    let mut run = Run::begin("scan", &args.common, &text, parameters)?;
    let lo = args.xi_min.max(1.0);
    let decades = (args.xi_max / lo).log10();
    let band_count = ((decades * args.bands_per_decade).ceil() as usize).max(1);
    let params = ScanParams {
        xi_min: lo,
        xi_max: args.xi_max,
        band_count,
        samples_per_band: args.samples_per_band,
        tol: args.tol,
        seed: args.common.seed,
    };
    let scan = spectral::spectrum_scan(&spec, &params, args.common.workers)?;
    let rows: Vec<Vec<f64>> = scan
        .bands
        .iter()
        .map(|b| vec![b.xi_low, b.xi_high, b.sup_abs, b.samples as f64])
        .collect();
    run.write_csv("scan.csv", "xi_low,xi_high,sup_abs_mu_hat,n_samples", &rows)?;
    run.finish(&[
        ("bands", band_count.to_string()),
        ("first_sup", format!("{}", scan.bands.first().unwrap().sup_abs)),
        ("last_sup", format!("{}", scan.bands.last().unwrap().sup_abs)),
    ])
}

fn run_fit(args: FitArgs) -> Result<(), CliError> {
    let (_, text) = read_spec(&args.common.spec)?;
    let scan_text = std::fs::read_to_string(&args.scan)
        .map_err(|e| CliError::Params(format!("cannot read scan csv: {e}")))?;
    let scan = parse_scan_csv(&scan_text)
        .map_err(|e| CliError::Params(format!("{}: {e}", args.scan.display())))?;
    let mut run = Run::begin(
        "fit",
        &args.common,
        &text,
        json!({ "scan": args.scan.display().to_string() }),
    )?;
    let fit = spectral::fit_log_decay(&scan)?;
    run.write_json(
        "fit.json",
        json!({
            "beta": fit.beta,
            "intercept": fit.intercept,
            "residual": fit.residual,
            "bands_used": scan
                .bands
                .iter()
                .filter(|b| b.xi_low >= spectral::FIT_MIN_FREQUENCY)
                .count(),
        }),
    )?;
    run.finish(&[
        ("beta", format!("{}", fit.beta)),
        ("residual", format!("{}", fit.residual)),
    ])
}

fn parse_scan_csv(text: &str) -> Result<SpectrumScan, String> {
    let mut bands = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("xi_low") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(format!("expected 4 columns, got {}", fields.len()));
        }
        let parse = |s: &str| s.parse::<f64>().map_err(|e| format!("bad number {s}: {e}"));
        bands.push(ScanBand {
            xi_low: parse(fields[0])?,
            xi_high: parse(fields[1])?,
            sup_abs: parse(fields[2])?,
            samples: parse(fields[3])? as u32,
        });
    }
    if bands.is_empty() {
        return Err("no bands in scan csv".into());
    }
    Ok(SpectrumScan { bands })
}

fn run_renewal(args: RenewalArgs) -> Result<(), CliError> {
    if args.n == 0 || args.bins == 0 {
        return Err(CliError::Params("n and bins must be positive".into()));
    }
    let (spec, text) = read_spec(&args.common.spec)?;
    let parameters = json!({ "t": args.t, "n": args.n, "bins": args.bins });
    let mut run = Run::begin("renewal", &args.common, &text, parameters)?;
    let dist = StepDistribution::from_spec(&spec);
    let histogram = walk::overshoot_histogram(
        &dist,
        args.t,
        args.n,
        args.bins,
        args.common.seed,
        args.common.workers,
    );
    let ks = walk::overshoot_ks(&dist, args.t, args.n, args.common.seed, args.common.workers);
    let rows: Vec<Vec<f64>> = histogram
        .iter()
        .map(|b| vec![b.bin_left, b.bin_right, b.empirical_mass, b.limit_mass])
        .collect();
    run.write_csv(
        "renewal_overshoot.csv",
        "bin_left,bin_right,empirical_mass,limit_mass",
        &rows,
    )?;
    run.write_json(
        "renewal.json",
        json!({
            "t": args.t,
            "n": args.n,
            "ks": ks,
            "sigma": dist.mean(),
            "max_step": dist.max_step(),
        }),
    )?;
    run.finish(&[
        ("t", format!("{}", args.t)),
        ("ks", format!("{}", ks)),
        ("sigma", format!("{}", dist.mean())),
    ])
}

fn run_identity(args: IdentityArgs) -> Result<(), CliError> {
    if !(args.t.is_finite() && args.s.is_finite()) {
        return Err(CliError::Params("s and t must be finite".into()));
    }
    let (spec, text) = read_spec(&args.common.spec)?;
    let spec = spec.normalize_to_unit();
    let parameters = json!({ "s": args.s, "t": args.t, "x": args.x, "y": args.y });
    let mut run = Run::begin("identity", &args.common, &text, parameters)?;
    let check = spectral::stopping_sum_identity(&spec, args.s, args.t, args.x, args.y)?;
    run.write_json(
        "identity.json",
        json!({
            "s": args.s,
            "t": args.t,
            "x": args.x,
            "y": args.y,
            "lhs_re": check.lhs.re,
            "lhs_im": check.lhs.im,
            "rhs_re": check.rhs.re,
            "rhs_im": check.rhs.im,
            "residual": check.residual,
        }),
    )?;
    run.finish(&[("residual", format!("{:e}", check.residual))])
}

fn run_dioph(args: DiophArgs) -> Result<(), CliError> {
    if let Some(b_max) = args.b_max {
        if !(b_max > 1.0) || !(args.grid_step > 0.0) {
            return Err(CliError::Params("b-max must exceed 1 and grid-step be positive".into()));
        }
    }
    let (spec, text) = read_spec(&args.common.spec)?;
    let parameters = json!({
        "depth": args.depth,
        "l": args.l,
        "b_max": args.b_max,
        "grid_step": args.grid_step,
    });
    let mut run = Run::begin("dioph", &args.common, &text, parameters)?;
    let dist = StepDistribution::from_spec(&spec);
    let classification = dioph::classify_atoms(&dist, args.depth);
    // report the continued fraction and approximation exponents of the
    // witness pair's log-ratio (or the first pair when there is none)
    let atoms = dist.atoms();
    let (i, j) = classification.witness_pair.unwrap_or((0, 1));
    let (convergents, l_estimate) = if atoms.len() >= 2 {
        let ratio = atoms[j.min(atoms.len() - 1)].log_step / atoms[i].log_step;
        let cf = dioph::continued_fraction(ratio, args.depth);
        let l_estimate = dioph::diophantine_exponent_estimate(ratio, args.depth)
            .map(|e| e.l_estimate)
            .ok();
        (cf.convergents, l_estimate)
    } else {
        (Vec::new(), None)
    };
    let mut report = json!({
        "verdict": classification.verdict,
        "witness": match classification.verdict {
            dioph::GroupVerdict::Lattice => json!({ "generator": classification.generator }),
            dioph::GroupVerdict::NonLattice => json!({ "pair": classification.witness_pair }),
            dioph::GroupVerdict::Undetermined => serde_json::Value::Null,
        },
        "convergents": convergents,
        "l_estimate": l_estimate,
    });
    let mut summary = vec![(
        "verdict",
        serde_json::to_string(&classification.verdict).unwrap(),
    )];
    if let Some(b_max) = args.b_max {
        let scan = walk::weakly_dioph_scan(&dist, args.l, b_max, args.grid_step);
        let rows: Vec<Vec<f64>> = walk::weakly_dioph_series(&dist, args.l, b_max, args.grid_step)
            .map(|(b, defect, weighted)| vec![b, defect, weighted])
            .collect();
        run.write_csv(
            "dioph_scan.csv",
            "b,abs_one_minus_laplace,weighted",
            &rows,
        )?;
        report["scan_minimum"] = json!(scan.minimum);
        report["scan_argmin"] = json!(scan.argmin);
        summary.push(("scan_min", format!("{:e}", scan.minimum)));
    }
    run.write_json("dioph.json", report)?;
    run.finish(&summary)
}

fn run_holder(args: HolderArgs) -> Result<(), CliError> {
    if !(args.r_min > 0.0 && args.r_max > args.r_min) || args.radii < 2 || args.n < 2 {
        return Err(CliError::Params(
            "need r-max > r-min > 0, at least 2 radii and n >= 2".into(),
        ));
    }
    let (spec, text) = read_spec(&args.common.spec)?;
    let spec = spec.normalize_to_unit();
    let parameters = json!({
        "r_max": args.r_max,
        "r_min": args.r_min,
        "radii": args.radii,
        "n": args.n,
    });
    let mut run = Run::begin("holder", &args.common, &text, parameters)?;
    let ratio = args.r_min / args.r_max;
    let radii: Vec<f64> = (0..args.radii)
        .map(|k| args.r_max * ratio.powf(k as f64 / (args.radii - 1) as f64))
        .collect();
    let curve = regularity::holder_mass_curve(
        &spec,
        &radii,
        args.n,
        args.common.seed,
        args.common.workers,
    );
    let fit = regularity::holder_exponent_fit(
        &spec,
        &radii,
        args.n,
        args.common.seed,
        args.common.workers,
    );
    let rows: Vec<Vec<f64>> = curve
        .iter()
        .map(|p| vec![p.radius, p.mass_estimate, p.se])
        .collect();
    run.write_csv("holder.csv", "radius,mass_estimate,se", &rows)?;
    run.write_json(
        "holder_fit.json",
        json!({
            "alpha": fit.alpha,
            "C": fit.c_constant,
            "residual": fit.residual,
            "radii_range": [radii.last().unwrap(), radii.first().unwrap()],
            "exponent_kind": "correlation (pair-counting); a companion lower bound to the uniform ball-mass exponent",
        }),
    )?;
    run.finish(&[
        ("alpha", format!("{}", fit.alpha)),
        ("C", format!("{}", fit.c_constant)),
    ])
}

fn run_corr(args: CorrArgs) -> Result<(), CliError> {
    if args.deltas.is_empty() || args.deltas.iter().any(|&d| !(d > 0.0)) || args.n == 0 {
        return Err(CliError::Params("deltas must be positive and n nonzero".into()));
    }
    let (spec, text) = read_spec(&args.common.spec)?;
    let spec = spec.normalize_to_unit();
    let parameters = json!({ "deltas": args.deltas, "n": args.n });
    let mut run = Run::begin("corr", &args.common, &text, parameters)?;
    let mut rows = Vec::new();
    for &delta in &args.deltas {
        let est =
            regularity::correlation_mass(&spec, delta, args.n, args.common.seed, args.common.workers);
        rows.push(vec![delta, est.value, est.std_error]);
    }
    run.write_csv("corr.csv", "radius,mass_estimate,se", &rows)?;
    let last = rows.last().unwrap();
    run.finish(&[
        ("deltas", args.deltas.len().to_string()),
        ("last_mass", format!("{} (se {})", last[1], last[2])),
    ])
}
