//! `modmi` command-line interface.
//!
//! [`run`] parses arguments and executes one subcommand, returning the exit
//! code with everything the command printed, so the binary and the tests
//! share one code path.

pub mod render;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use modmi::infotheory::LogBase;
use modmi::ingestion::{write_labels_text, StreamKind};
use modmi::pipeline::{AnalysisConfig, InfoReport};
use modmi::quantizer::{fit, FitParams};
use modmi::synthetic::{exhaustive_stream, gen_gaussian_mixture, JointPmf};
use modmi::{
    analyze, assign, load_codebook, load_manifest, read_feature_matrix, save_codebook,
    sweep_clusters, write_feature_matrix, write_labels, Error,
};

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "MODMI_THREADS";

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "modmi", version, about = "Entropy, mutual information and co-information of aligned multimodal streams")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a k-means codebook to an FMX1 feature file.
    Fit(FitArgs),
    /// Label feature rows with their nearest codebook centroid.
    Assign(AssignArgs),
    /// Quantize and analyze the streams of a manifest.
    Analyze(AnalyzeArgs),
    /// Analyze once per cluster count.
    Sweep(SweepArgs),
    /// Write synthetic streams and a manifest.
    #[command(subcommand)]
    Synth(SynthCommand),
    /// Re-render a saved JSON report.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct KmeansFlags {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(long = "max-iter", default_value_t = 300)]
    pub max_iter: usize,
    /// z-normalize each feature dimension before clustering.
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// FMX1 feature file.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub clusters: usize,
    #[command(flatten)]
    pub kmeans: KmeansFlags,
    /// KMC1 codebook to write.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AssignArgs {
    #[arg(long)]
    pub codebook: PathBuf,
    #[arg(long)]
    pub input: PathBuf,
    /// Label file to write; `.txt` writes one id per line, anything else LBL1.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Base {
    #[value(name = "2")]
    Two,
    #[value(name = "e")]
    E,
    #[value(name = "10")]
    Ten,
}

impl From<Base> for LogBase {
    fn from(b: Base) -> Self {
        match b {
            Base::Two => LogBase::Two,
            Base::E => LogBase::E,
            Base::Ten => LogBase::Ten,
        }
    }
}

#[derive(Debug, Args)]
pub struct AnalysisFlags {
    /// Cluster count for feature streams without a manifest override.
    #[arg(long, default_value_t = 2000)]
    pub clusters: usize,
    /// Common frame rate in Hz; defaults to the manifest's target_rate_hz.
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long, value_enum, default_value = "2")]
    pub base: Base,
    #[command(flatten)]
    pub kmeans: KmeansFlags,
}

impl AnalysisFlags {
    fn config(&self) -> AnalysisConfig {
        AnalysisConfig {
            target_rate_hz: self.rate,
            clusters: self.clusters,
            seed: self.kmeans.seed,
            tol: self.kmeans.tol,
            max_iter: self.kmeans.max_iter,
            normalize: self.kmeans.normalize,
            log_base: self.base.into(),
        }
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[command(flatten)]
    pub analysis: AnalysisFlags,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Comma-separated cluster counts, e.g. `100,200,500`.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub ks: Vec<usize>,
    #[command(flatten)]
    pub analysis: AnalysisFlags,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum SynthCommand {
    /// Balanced bits V, T and S = V xor T, as label streams.
    Xor {
        #[arg(long, default_value_t = 1)]
        copies: usize,
        #[arg(long = "out-dir")]
        out_dir: PathBuf,
    },
    /// Gaussian clusters on the axes as feature stream `S`, with component
    /// ids as label stream `T`.
    Blobs {
        #[arg(long, default_value_t = 3)]
        centers: usize,
        #[arg(long, default_value_t = 2)]
        dims: usize,
        /// Distance of each center from the origin along its axis.
        #[arg(long, default_value_t = 100.0)]
        separation: f64,
        #[arg(long, default_value_t = 1.0)]
        stddev: f64,
        #[arg(long = "n-per-center", default_value_t = 1000)]
        n_per_center: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "out-dir")]
        out_dir: PathBuf,
    },
}

/// Exit code and captured output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Usage(String),
    Error(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

type CmdResult = std::result::Result<String, Failure>;

/// Parses `args` (including the program name) and runs the command on a
/// pool of `threads` workers, or rayon's default when `None`.
pub fn run<I, T>(args: I, threads: Option<usize>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            return Outcome {
                code: EXIT_FAILURE,
                stdout: String::new(),
                stderr: format!("error: cannot start worker threads: {e}\n"),
            }
        }
    };
    match pool.install(|| execute(cli.command)) {
        Ok(stdout) => Outcome { code: 0, stdout, stderr: String::new() },
        Err(Failure::Usage(msg)) => Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
        Err(Failure::Error(e)) => {
            let code = match e.root() {
                Error::InfeasibleK { .. } => EXIT_USAGE,
                _ => EXIT_FAILURE,
            };
            Outcome { code, stdout: String::new(), stderr: format!("error: {e}\n") }
        }
    }
}

/// Reads the thread cap from [`THREADS_ENV`].
pub fn threads_from_env() -> std::result::Result<Option<usize>, String> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!("{THREADS_ENV} must be a positive integer, got {v:?}")),
        },
        _ => Ok(None),
    }
}

fn execute(command: Command) -> CmdResult {
    match command {
        Command::Fit(a) => cmd_fit(a),
        Command::Assign(a) => cmd_assign(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Synth(s) => cmd_synth(s),
        Command::Report(a) => cmd_report(a),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| {
        Failure::Error(Error::Io {
            path: path.to_path_buf(),
            source: e,
        })
    })
}

/// Writes `text` to `out`, or returns it for stdout.
fn emit(text: String, out: Option<&Path>) -> CmdResult {
    match out {
        Some(path) => {
            write_file(path, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn render(report: &InfoReport, format: Format) -> CmdResult {
    match format {
        Format::Json => Ok(report.to_json()),
        Format::Table => Ok(render::table(report)),
        Format::Svg => render::svg(report).ok_or_else(|| {
            Failure::Usage("svg output needs exactly three streams with V, T and S roles".into())
        }),
    }
}

fn cmd_fit(a: FitArgs) -> CmdResult {
    let x = read_feature_matrix(&a.input)?;
    let params = FitParams {
        k: a.clusters,
        seed: a.kmeans.seed,
        tol: a.kmeans.tol,
        max_iter: a.kmeans.max_iter,
        normalize: a.kmeans.normalize,
    };
    let cb = fit(&x, &params)?;
    save_codebook(&cb, &a.out)?;
    Ok(format!(
        "k={} iterations={} final_distortion={}\n",
        cb.k(),
        cb.iterations_run().unwrap_or(0),
        cb.final_distortion().unwrap_or(0.0)
    ))
}

fn cmd_assign(a: AssignArgs) -> CmdResult {
    let cb = load_codebook(&a.codebook)?;
    let x = read_feature_matrix(&a.input)?;
    let labels = assign(&cb, &x)?;
    if a.out.extension().is_some_and(|e| e == "txt") {
        write_labels_text(&labels, &a.out)?;
    } else {
        write_labels(&labels, &a.out)?;
    }
    Ok(format!(
        "frames={} k={} distinct={}\n",
        labels.len(),
        cb.k(),
        labels.distinct_symbols()
    ))
}

fn cmd_analyze(a: AnalyzeArgs) -> CmdResult {
    let manifest = load_manifest(&a.manifest)?;
    let report = analyze(&manifest, &a.analysis.config())?;
    emit(render(&report, a.format)?, a.out.as_deref())
}

fn cmd_sweep(a: SweepArgs) -> CmdResult {
    if a.ks.is_empty() || a.ks.contains(&0) {
        return Err(Failure::Usage("--ks needs one or more positive cluster counts".into()));
    }
    let manifest = load_manifest(&a.manifest)?;
    let reports = sweep_clusters(&manifest, &a.analysis.config(), &a.ks)?;
    let text = match a.format {
        Format::Table => render::sweep_table(&reports),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&reports).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Svg => return Err(Failure::Usage("sweep supports table and json output".into())),
    };
    emit(text, a.out.as_deref())
}

fn cmd_report(a: ReportArgs) -> CmdResult {
    let json = fs::read_to_string(&a.input).map_err(|e| Error::Io {
        path: a.input.clone(),
        source: e,
    })?;
    let report = InfoReport::from_json(&json)?;
    emit(render(&report, a.format)?, a.out.as_deref())
}

fn manifest_entry(name: &str, file: &str, kind: StreamKind) -> serde_json::Value {
    serde_json::json!({
        "name": name,
        "path": file,
        "kind": kind,
        "sample_rate_hz": modmi::ingestion::DEFAULT_RATE_HZ,
    })
}

fn write_manifest(dir: &Path, entries: Vec<serde_json::Value>) -> Result<PathBuf, Failure> {
    let path = dir.join("manifest.json");
    let json = serde_json::json!({
        "target_rate_hz": modmi::ingestion::DEFAULT_RATE_HZ,
        "streams": entries,
    });
    let mut text = serde_json::to_string_pretty(&json).expect("manifest serializes");
    text.push('\n');
    write_file(&path, &text)?;
    Ok(path)
}

fn create_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| {
        Failure::Error(Error::Io {
            path: dir.to_path_buf(),
            source: e,
        })
    })
}

fn cmd_synth(s: SynthCommand) -> CmdResult {
    match s {
        SynthCommand::Xor { copies, out_dir } => {
            create_dir(&out_dir)?;
            let streams = exhaustive_stream(&JointPmf::xor(), copies)?;
            let mut entries = Vec::new();
            for seq in &streams {
                let file = format!("{}.lbl", seq.modality_tag());
                write_labels(seq, out_dir.join(&file))?;
                entries.push(manifest_entry(seq.modality_tag(), &file, StreamKind::Labels));
            }
            let m = write_manifest(&out_dir, entries)?;
            Ok(format!("wrote {}\n", m.display()))
        }
        SynthCommand::Blobs {
            centers,
            dims,
            separation,
            stddev,
            n_per_center,
            seed,
            out_dir,
        } => {
            if centers == 0 || dims == 0 {
                return Err(Failure::Usage("--centers and --dims must be positive".into()));
            }
            create_dir(&out_dir)?;
            // Center c sits on axis c mod dims, on the positive side for the
            // first pass over the axes and the negative side for the next.
            let points: Vec<Vec<f64>> = (0..centers)
                .map(|c| {
                    let mut p = vec![0.0; dims];
                    let sign = if (c / dims) % 2 == 0 { 1.0 } else { -1.0 };
                    let scale = 1.0 + (c / (2 * dims)) as f64;
                    p[c % dims] = sign * scale * separation;
                    p
                })
                .collect();
            let (x, t) = gen_gaussian_mixture(&points, stddev, n_per_center, seed)?;
            write_feature_matrix(&x, out_dir.join("S.fmx"))?;
            write_labels(&t, out_dir.join("T.lbl"))?;
            let m = write_manifest(
                &out_dir,
                vec![
                    manifest_entry("S", "S.fmx", StreamKind::Features),
                    manifest_entry("T", "T.lbl", StreamKind::Labels),
                ],
            )?;
            Ok(format!("wrote {}\n", m.display()))
        }
    }
}
