//! CSV tables and SVG scatter plots of one condition against another.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::results::{ResultTable, TEST_FAMILY};

#[derive(Debug, Clone, PartialEq)]
pub enum Format {
    Csv,
    /// One panel per `(x condition, y condition)` pair.
    SvgScatter(Vec<(String, String)>),
}

/// Writes the table in `format` below `dir` and returns the written paths.
/// CSV output is `<experiment>.csv` (rows), `<experiment>-summary.csv`,
/// plus `tests.csv` and `<experiment>-metrics.csv` when present.
pub fn emit(table: &ResultTable, format: &Format, dir: &Path) -> Result<Vec<PathBuf>> {
    if table.aggregates.is_empty() {
        return Err(Error::Empty(format!("{} has no aggregate rows", table.experiment)));
    }
    table.check_aggregates()?;
    fs::create_dir_all(dir).map_err(|e| write_err(dir, e))?;
    let mut written = Vec::new();
    let mut put = |name: String, bytes: Vec<u8>| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, bytes).map_err(|e| write_err(&path, e))?;
        written.push(path);
        Ok(())
    };
    match format {
        Format::Csv => {
            put(format!("{}.csv", table.experiment), rows_csv(table)?)?;
            put(format!("{}-summary.csv", table.experiment), summary_csv(table)?)?;
            if !table.tests.is_empty() {
                put("tests.csv".into(), tests_csv(table)?)?;
            }
            if !table.metrics.is_empty() {
                put(format!("{}-metrics.csv", table.experiment), metrics_csv(table)?)?;
            }
        }
        Format::SvgScatter(panels) => {
            put(format!("{}.svg", table.experiment), render_scatter(table, panels)?.into_bytes())?;
        }
    }
    Ok(written)
}

fn write_err(path: &Path, source: std::io::Error) -> Error {
    Error::Write {
        path: path.display().to_string(),
        source,
    }
}

/// Shortest round-trip representation, so emitted numbers re-parse exactly.
fn num(x: f64) -> String {
    format!("{x}")
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

pub fn rows_csv(table: &ResultTable) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["dataset", "model", "condition", "repetition", "accuracy"])?;
    for r in &table.rows {
        w.write_record([&r.dataset, &r.model, &r.condition, &r.repetition.to_string(), &num(r.accuracy)])?;
    }
    finish(w)
}

pub fn summary_csv(table: &ResultTable) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["dataset", "model", "condition", "n", "mean", "std", "half_std"])?;
    for a in &table.aggregates {
        w.write_record([
            &a.dataset,
            &a.model,
            &a.condition,
            &a.n.to_string(),
            &num(a.mean),
            &num(a.std),
            &num(a.std / 2.0),
        ])?;
    }
    finish(w)
}

pub fn tests_csv(table: &ResultTable) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "experiment", "dataset", "model", "a", "b", "mean_a", "mean_b", "t", "dof", "p", "significant", "test",
    ])?;
    for t in &table.tests {
        w.write_record([
            &table.experiment,
            &t.dataset,
            &t.model,
            &t.a,
            &t.b,
            &num(t.mean_a),
            &num(t.mean_b),
            &num(t.t),
            &num(t.dof),
            &num(t.p),
            &t.significant.to_string(),
            TEST_FAMILY,
        ])?;
    }
    finish(w)
}

pub fn metrics_csv(table: &ResultTable) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["dataset", "model", "metric", "value"])?;
    for m in &table.metrics {
        let v = m.value.map_or_else(|| "undefined".to_string(), num);
        w.write_record([&m.dataset, &m.model, &m.metric, &v])?;
    }
    finish(w)
}

pub const PANEL: f64 = 300.0;
pub const MARGIN: f64 = 50.0;
const LEGEND: f64 = 150.0;
const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

/// Pixel position of accuracy pair `(x, y)` in panel `k`; both axes span
/// `[0, 1]`.
pub fn map_point(k: usize, x: f64, y: f64) -> (f64, f64) {
    let left = MARGIN + k as f64 * (PANEL + MARGIN);
    (left + x * PANEL, MARGIN + (1.0 - y) * PANEL)
}

fn f2(x: f64) -> String {
    format!("{x:.2}")
}

/// Marker shape for dataset `d`, centred on the origin.
fn marker(d: usize, color: &str) -> String {
    let s = 5.0;
    match d % 4 {
        0 => format!(r#"<circle r="{s}" fill="{color}"/>"#),
        1 => format!(r#"<rect x="-{s}" y="-{s}" width="{}" height="{}" fill="{color}"/>"#, 2.0 * s, 2.0 * s),
        2 => format!(r#"<polygon points="0,-{s} {s},{s} -{s},{s}" fill="{color}"/>"#),
        _ => format!(r#"<polygon points="0,-{s} {s},0 0,{s} -{s},0" fill="{color}"/>"#),
    }
}

/// Mean accuracy of one condition against another per (dataset, model),
/// with ½-standard-deviation error bars. Output depends only on the table.
pub fn render_scatter(table: &ResultTable, panels: &[(String, String)]) -> Result<String> {
    if table.aggregates.is_empty() || panels.is_empty() {
        return Err(Error::Empty("scatter needs aggregate rows and at least one panel".into()));
    }
    let datasets = table.datasets();
    let models = table.models();
    let width = MARGIN + panels.len() as f64 * (PANEL + MARGIN) + LEGEND;
    let height = PANEL + 2.0 * MARGIN;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}" font-family="sans-serif" font-size="11">"#,
        f2(width),
        f2(height),
        f2(width),
        f2(height)
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (k, (xc, yc)) in panels.iter().enumerate() {
        let (x0, y0) = map_point(k, 0.0, 0.0);
        let (x1, y1) = map_point(k, 1.0, 1.0);
        let _ = writeln!(s, r#"<g class="panel">"#);
        let _ = writeln!(
            s,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            f2(x0),
            f2(y1),
            f2(PANEL),
            f2(PANEL)
        );
        let _ = writeln!(
            s,
            r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#bbbbbb" stroke-dasharray="4 3"/>"##,
            f2(x0),
            f2(y0),
            f2(x1),
            f2(y1)
        );
        for t in 0..=5 {
            let v = t as f64 / 5.0;
            let (tx, _) = map_point(k, v, 0.0);
            let (_, ty) = map_point(k, 0.0, v);
            let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{v:.1}</text>"#, f2(tx), f2(y0 + 14.0));
            let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{v:.1}</text>"#, f2(x0 - 4.0), f2(ty + 4.0));
        }
        let _ = writeln!(
            s,
            r#"<text class="xlabel" x="{}" y="{}" text-anchor="middle">accuracy ({})</text>"#,
            f2((x0 + x1) / 2.0),
            f2(y0 + 32.0),
            escape(xc)
        );
        let _ = writeln!(
            s,
            r#"<text class="ylabel" x="{}" y="{}" text-anchor="middle" transform="rotate(-90 {} {})">accuracy ({})</text>"#,
            f2(x0 - 34.0),
            f2((y0 + y1) / 2.0),
            f2(x0 - 34.0),
            f2((y0 + y1) / 2.0),
            escape(yc)
        );
        for (d, ds) in datasets.iter().enumerate() {
            for (m, model) in models.iter().enumerate() {
                let (Some(ax), Some(ay)) = (table.get(ds, model, xc), table.get(ds, model, yc)) else {
                    continue;
                };
                let color = PALETTE[m % PALETTE.len()];
                let (px, py) = map_point(k, ax.mean, ay.mean);
                let hx = ax.std / 2.0 * PANEL;
                let hy = ay.std / 2.0 * PANEL;
                let _ = writeln!(
                    s,
                    r#"<path class="errorbar" d="M{} {}H{}M{} {}V{}" stroke="{color}"/>"#,
                    f2(px - hx),
                    f2(py),
                    f2(px + hx),
                    f2(px),
                    f2(py - hy),
                    f2(py + hy)
                );
                let _ = writeln!(
                    s,
                    r#"<g class="point" transform="translate({} {})"><title>{} / {}</title>{}</g>"#,
                    f2(px),
                    f2(py),
                    escape(ds),
                    escape(model),
                    marker(d, color)
                );
            }
        }
        let _ = writeln!(s, "</g>");
    }
    let lx = MARGIN + panels.len() as f64 * (PANEL + MARGIN);
    let mut ly = MARGIN;
    let _ = writeln!(s, r#"<g class="legend">"#);
    for (m, model) in models.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<rect x="{}" y="{}" width="10" height="10" fill="{}"/><text x="{}" y="{}">{}</text>"#,
            f2(lx),
            f2(ly - 9.0),
            PALETTE[m % PALETTE.len()],
            f2(lx + 16.0),
            f2(ly),
            escape(model)
        );
        ly += 16.0;
    }
    ly += 8.0;
    for (d, ds) in datasets.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<g transform="translate({} {})">{}</g><text x="{}" y="{}">{}</text>"#,
            f2(lx + 5.0),
            f2(ly - 4.0),
            marker(d, "black"),
            f2(lx + 16.0),
            f2(ly),
            escape(ds)
        );
        ly += 16.0;
    }
    let _ = writeln!(s, "</g>\n</svg>");
    Ok(s)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
