use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, ValueEnum};
use said::{BaselineMethod, SaidParams};

/// A downscaling method selectable on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Said,
    Baseline(BaselineMethod),
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Said => f.write_str("said"),
            Method::Baseline(b) => b.fmt(f),
        }
    }
}

impl FromStr for Method {
    type Err = said::Error;

    fn from_str(s: &str) -> said::Result<Self> {
        if s.trim().eq_ignore_ascii_case("said") {
            Ok(Method::Said)
        } else {
            s.parse().map(Method::Baseline)
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    #[default]
    Csv,
    Markdown,
}

/// Everything a batch run needs, after validation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub methods: Vec<Method>,
    pub scale: f64,
    pub output_dir: PathBuf,
    pub params: SaidParams,
    pub reference_dir: Option<PathBuf>,
    pub report: ReportFormat,
    pub trace: bool,
    pub jobs: Option<usize>,
    pub decimals: usize,
}

const DEFAULTS: SaidParams = SaidParams {
    sigma: 1.0,
    gamma: 0.5,
    alpha: 0.5,
    beta: 0.1,
    antialias: false,
    texture_normalize: false,
};

#[derive(Parser, Debug)]
#[command(name = "said", version, about = "Structure-aware image downscaling with PSNR/SSIM reports")]
struct Cli {
    /// Input images or directories of images (PNG, PPM, PGM).
    #[arg(required = true, value_name = "INPUT")]
    inputs: Vec<PathBuf>,

    /// Methods to run, comma separated: said, bicubic, lanczos, lanczosN.
    #[arg(long, value_delimiter = ',', default_value = "said")]
    method: Vec<Method>,

    /// Downscaling factor, any real number above 1.
    #[arg(long, value_parser = parse_scale)]
    scale: f64,

    /// Gaussian blur standard deviation for the unsharp mask.
    #[arg(long, default_value_t = DEFAULTS.sigma)]
    sigma: f64,

    /// Unsharp-mask strength.
    #[arg(long, default_value_t = DEFAULTS.gamma)]
    gamma: f64,

    /// Texture gain at edges.
    #[arg(long, default_value_t = DEFAULTS.alpha)]
    alpha: f64,

    /// Texture gain everywhere.
    #[arg(long, default_value_t = DEFAULTS.beta)]
    beta: f64,

    /// Widen resampling kernels by the scale factor.
    #[arg(long)]
    antialias: bool,

    /// Scale the texture map to a peak magnitude of 1 before fusion.
    #[arg(long)]
    texture_normalize: bool,

    /// Directory holding reference images with matching file names.
    #[arg(long, value_name = "DIR")]
    reference_dir: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    report: ReportFormat,

    /// Also write the intermediate stages of the said method.
    #[arg(long)]
    trace: bool,

    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// Number of images processed at once.
    #[arg(long, env = "SAID_JOBS", value_parser = parse_jobs)]
    jobs: Option<usize>,

    /// Decimal places for report values.
    #[arg(long, default_value_t = 2)]
    decimals: usize,
}

fn parse_scale(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() && v > 1.0 {
        Ok(v)
    } else {
        Err(format!("scale must exceed 1, got {v}"))
    }
}

fn parse_jobs(s: &str) -> Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("jobs must be a positive integer, got `{s}`")),
    }
}

/// Parses a full argument vector, program name included.
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let params = SaidParams {
        sigma: cli.sigma,
        gamma: cli.gamma,
        alpha: cli.alpha,
        beta: cli.beta,
        antialias: cli.antialias,
        texture_normalize: cli.texture_normalize,
    };
    params
        .validate()
        .map_err(|e| Cli::command().error(ErrorKind::ValueValidation, e))?;
    Ok(RunConfig {
        inputs: cli.inputs,
        methods: cli.method,
        scale: cli.scale,
        output_dir: cli.out,
        params,
        reference_dir: cli.reference_dir,
        report: cli.report,
        trace: cli.trace,
        jobs: cli.jobs,
        decimals: cli.decimals,
    })
}
