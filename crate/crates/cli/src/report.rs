use crate::args::ReportFormat;

/// One line of the comparison report. `file` is `mean` for the aggregate row.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub file: String,
    pub method: String,
    pub scale: f64,
    pub psnr_db: Option<f64>,
    pub ssim: Option<f64>,
}

pub const MEAN_ROW: &str = "mean";

fn value(v: Option<f64>, decimals: usize) -> String {
    match v {
        None => String::new(),
        Some(v) if v == f64::INFINITY => "inf".to_owned(),
        Some(v) => format!("{v:.decimals$}"),
    }
}

pub fn render(rows: &[ReportRow], format: ReportFormat, decimals: usize) -> String {
    match format {
        ReportFormat::Csv => render_csv(rows, decimals),
        ReportFormat::Markdown => render_markdown(rows, decimals),
    }
}

pub fn render_csv(rows: &[ReportRow], decimals: usize) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["file", "method", "scale", "psnr_db", "ssim"]).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.file.clone(),
            r.method.clone(),
            r.scale.to_string(),
            value(r.psnr_db, decimals),
            value(r.ssim, decimals),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

/// One row per method, one column per file, cells as `PSNR / SSIM`.
pub fn render_markdown(rows: &[ReportRow], decimals: usize) -> String {
    let mut files: Vec<&str> = Vec::new();
    let mut methods: Vec<&str> = Vec::new();
    for r in rows {
        if !files.contains(&r.file.as_str()) {
            files.push(&r.file);
        }
        if !methods.contains(&r.method.as_str()) {
            methods.push(&r.method);
        }
    }
    // keep the aggregate column last
    if let Some(i) = files.iter().position(|f| *f == MEAN_ROW) {
        let mean = files.remove(i);
        files.push(mean);
    }
    let escape = |s: &str| s.replace('|', "\\|");

    let mut out = String::from("| Method |");
    for f in &files {
        out.push_str(&format!(" {} |", escape(f)));
    }
    out.push_str("\n|---|");
    out.push_str(&"---|".repeat(files.len()));
    out.push('\n');
    for m in &methods {
        out.push_str(&format!("| {} |", escape(m)));
        for f in &files {
            let cell = rows
                .iter()
                .find(|r| r.method == *m && r.file == *f)
                .filter(|r| r.psnr_db.is_some())
                .map(|r| format!("{} / {}", value(r.psnr_db, decimals), value(r.ssim, decimals)))
                .unwrap_or_else(|| "n/a".to_owned());
            out.push_str(&format!(" {cell} |"));
        }
        out.push('\n');
    }
    out
}
