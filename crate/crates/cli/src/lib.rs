//! Batch front-end for the `said` library: downscale files with one or more
//! methods and compare them against reference images.

mod args;
mod batch;
mod report;

pub use args::{parse_args, Method, ReportFormat, RunConfig};
pub use batch::{collect_inputs, output_path, run, Failure, RunError, RunReport};
pub use report::{render, render_csv, render_markdown, ReportRow, MEAN_ROW};
