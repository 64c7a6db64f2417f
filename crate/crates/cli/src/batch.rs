use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use said::io::{self, ImageFormat};
use said::pipeline::{baseline_downscale, said_downscale, SaidTrace};
use said::resample::ScaleSpec;
use said::{clamp_unit, Image, MetricReport, Plane};

use crate::args::{Method, RunConfig};
use crate::report::{ReportRow, MEAN_ROW};

const EXTENSIONS: [&str; 4] = ["png", "ppm", "pgm", "pnm"];

/// Problems that stop a run before any image is processed.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("no input images found")]
    NoInputs,
    #[error("cannot read directory {path}: {source}")]
    ReadDir { path: PathBuf, source: std::io::Error },
    #[error("cannot create output directory {path}: {source}")]
    OutputDir { path: PathBuf, source: std::io::Error },
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error(transparent)]
    Said(#[from] said::Error),
}

/// A per-file problem; the rest of the batch still runs.
#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub file: PathBuf,
    pub method: Option<Method>,
    pub message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.method {
            Some(m) => write!(f, "{} ({m}): {}", self.file.display(), self.message),
            None => write!(f, "{}: {}", self.file.display(), self.message),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunReport {
    pub rows: Vec<ReportRow>,
    pub failures: Vec<Failure>,
    pub written: Vec<PathBuf>,
}

impl RunReport {
    pub fn succeeded(&self) -> bool {
        self.failures.is_empty()
    }
}

fn is_image(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
}

/// Expands directories into their image files, sorted by name.
pub fn collect_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, RunError> {
    let mut files = Vec::new();
    for path in inputs {
        if path.is_dir() {
            let entries = std::fs::read_dir(path)
                .map_err(|source| RunError::ReadDir { path: path.clone(), source })?;
            let mut found: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file() && is_image(p))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(path.clone());
        }
    }
    if files.is_empty() {
        return Err(RunError::NoInputs);
    }
    Ok(files)
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "image".into(), |s| s.to_string_lossy().into_owned())
}

fn display_name(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

/// `<stem>_<method>_x<scale>[_<stage>].<ext>`, keeping the input's format.
pub fn output_path(config: &RunConfig, input: &Path, method: Method, stage: Option<&str>) -> PathBuf {
    let ext = input
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .filter(|e| EXTENSIONS.contains(&e.as_str()))
        .unwrap_or_else(|| "png".into());
    let suffix = stage.map(|s| format!("_{s}")).unwrap_or_default();
    config
        .output_dir
        .join(format!("{}_{method}_x{}{suffix}.{ext}", stem(input), config.scale))
}

fn find_reference(dir: &Path, input: &Path) -> Option<PathBuf> {
    let exact = dir.join(input.file_name()?);
    if exact.is_file() {
        return Some(exact);
    }
    let stem = stem(input);
    EXTENSIONS
        .iter()
        .map(|e| dir.join(format!("{stem}.{e}")))
        .find(|p| p.is_file())
}

fn save(img: &Image, path: &Path, written: &mut Vec<PathBuf>) -> said::Result<()> {
    let format = ImageFormat::from_path(path).unwrap_or(ImageFormat::Png);
    io::save(img, path, format)?;
    written.push(path.to_path_buf());
    Ok(())
}

fn stages(trace: &SaidTrace, colorspace: said::ColorSpace) -> said::Result<Vec<(&'static str, Image)>> {
    let texture = |maps: &[said::TextureMap]| {
        let planes: Vec<Plane> = maps
            .iter()
            .map(|t| t.plane().map(|v| (0.5 + 0.5 * v).clamp(0.0, 1.0)))
            .collect();
        Image::from_planes(colorspace, planes)
    };
    Ok(vec![
        ("edge", Image::gray(trace.edge_map.plane().clone())),
        ("edge_down", Image::gray(trace.edge_map_down.plane().clone())),
        ("blurred", trace.blurred.map_channels(clamp_unit)),
        ("sharpened", trace.sharpened.map_channels(clamp_unit)),
        ("sharpened_down", trace.sharpened_down.map_channels(clamp_unit)),
        ("bicubic", trace.bicubic.map_channels(clamp_unit)),
        ("blended", trace.blended.map_channels(clamp_unit)),
        ("texture", texture(&trace.texture)?),
        ("texture_down", texture(&trace.texture_down)?),
    ])
}

/// Outcome of one input file, before rows are grouped by method.
struct FileOutcome {
    rows: Vec<(Method, ReportRow)>,
    failures: Vec<Failure>,
    written: Vec<PathBuf>,
}

fn process(config: &RunConfig, input: &Path) -> FileOutcome {
    let mut out = FileOutcome { rows: Vec::new(), failures: Vec::new(), written: Vec::new() };
    let fail = |method, message: String| Failure { file: input.to_path_buf(), method, message };

    let img = match io::load(input) {
        Ok(img) => img,
        Err(e) => {
            out.failures.push(fail(None, e.to_string()));
            return out;
        }
    };
    let reference = match &config.reference_dir {
        None => None,
        Some(dir) => match find_reference(dir, input) {
            None => {
                out.failures.push(fail(None, format!("no reference image in {}", dir.display())));
                None
            }
            Some(path) => match io::load(&path) {
                Ok(r) => Some(r),
                Err(e) => {
                    out.failures.push(fail(None, format!("reference: {e}")));
                    None
                }
            },
        },
    };

    let spec = match ScaleSpec::factor(config.scale) {
        Ok(s) => s.with_antialias(config.params.antialias),
        Err(e) => {
            out.failures.push(fail(None, e.to_string()));
            return out;
        }
    };
    for &method in &config.methods {
        let result = match method {
            Method::Said => said_downscale(&img, &spec, &config.params, config.trace),
            Method::Baseline(b) => baseline_downscale(&img, &spec, b).map(|i| (i, None)),
        };
        let (small, trace) = match result {
            Ok(r) => r,
            Err(e) => {
                out.failures.push(fail(Some(method), e.to_string()));
                continue;
            }
        };
        if let Err(e) = save(&small, &output_path(config, input, method, None), &mut out.written) {
            out.failures.push(fail(Some(method), e.to_string()));
        }
        if let Some(trace) = trace {
            let saved = stages(&trace, img.colorspace()).and_then(|list| {
                list.iter().try_for_each(|(stage, image)| {
                    save(image, &output_path(config, input, method, Some(stage)), &mut out.written)
                })
            });
            if let Err(e) = saved {
                out.failures.push(fail(Some(method), format!("trace: {e}")));
            }
        }
        let metrics = match &reference {
            Some(r) => match MetricReport::compare(&small, r) {
                Ok(m) => Some(m),
                Err(e) => {
                    out.failures.push(fail(Some(method), e.to_string()));
                    None
                }
            },
            None => None,
        };
        out.rows.push((
            method,
            ReportRow {
                file: display_name(input),
                method: method.to_string(),
                scale: config.scale,
                psnr_db: metrics.map(|m| m.psnr_db),
                ssim: metrics.map(|m| m.ssim),
            },
        ));
    }
    out
}

fn mean_row(method: Method, scale: f64, rows: &[&ReportRow]) -> Option<ReportRow> {
    let scored: Vec<_> = rows.iter().filter_map(|r| Some((r.psnr_db?, r.ssim?))).collect();
    if scored.is_empty() {
        return None;
    }
    let n = scored.len() as f64;
    Some(ReportRow {
        file: MEAN_ROW.to_owned(),
        method: method.to_string(),
        scale,
        psnr_db: Some(scored.iter().map(|s| s.0).sum::<f64>() / n),
        ssim: Some(scored.iter().map(|s| s.1).sum::<f64>() / n),
    })
}

/// Runs every method over every input. Rows are grouped by method in the
/// configured order, files in input order, each group closed by a mean row
/// when metrics were computed.
pub fn run(config: &RunConfig) -> Result<RunReport, RunError> {
    let inputs = collect_inputs(&config.inputs)?;
    std::fs::create_dir_all(&config.output_dir)
        .map_err(|source| RunError::OutputDir { path: config.output_dir.clone(), source })?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = config.jobs {
        pool = pool.num_threads(jobs);
    }
    let outcomes: Vec<FileOutcome> =
        pool.build()?.install(|| inputs.par_iter().map(|p| process(config, p)).collect());

    let mut report = RunReport::default();
    let mut by_method: HashMap<String, Vec<ReportRow>> = HashMap::new();
    for o in outcomes {
        for (method, row) in o.rows {
            by_method.entry(method.to_string()).or_default().push(row);
        }
        report.failures.extend(o.failures);
        report.written.extend(o.written);
    }
    for (i, &method) in config.methods.iter().enumerate() {
        if config.methods[..i].contains(&method) {
            continue;
        }
        let rows = by_method.remove(&method.to_string()).unwrap_or_default();
        let mean = mean_row(method, config.scale, &rows.iter().collect::<Vec<_>>());
        report.rows.extend(rows);
        report.rows.extend(mean);
    }
    Ok(report)
}
