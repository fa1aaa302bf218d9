use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{read_traces, split_instance_id, BenchError, TraceRow};

/// Relative errors are clipped to this value before taking logarithms.
pub const PLOT_FLOOR: f64 = 1e-16;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 120.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 50.0;
type Cells = BTreeMap<(String, String), BTreeMap<String, Vec<(usize, f64)>>>;

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn file_stem(experiment: &str, cell: &str) -> String {
    let cell: String = cell
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
        .collect();
    format!("{experiment}__{cell}")
}

/// Groups trace rows into plot cells. For every cell the lowest seed is
/// drawn; series are keyed by solver name.
fn group(rows: &[TraceRow]) -> Cells {
    let mut lowest: BTreeMap<(String, String), u64> = BTreeMap::new();
    for r in rows {
        let (cell, seed) = split_instance_id(&r.instance_id);
        let e = lowest.entry((r.experiment.clone(), cell.to_string())).or_insert(seed);
        *e = (*e).min(seed);
    }
    let mut cells = Cells::new();
    for r in rows {
        let (cell, seed) = split_instance_id(&r.instance_id);
        let key = (r.experiment.clone(), cell.to_string());
        if lowest[&key] != seed {
            continue;
        }
        cells
            .entry(key)
            .or_default()
            .entry(r.solver.clone())
            .or_default()
            .push((r.iter, r.rel_error));
    }
    cells
}

fn render(experiment: &str, cell: &str, seed_note: &str, series: &BTreeMap<String, Vec<(usize, f64)>>) -> String {
    let clip = |v: f64| if v.is_finite() { v.max(PLOT_FLOOR) } else { 1.0 };
    let points = series.values().flatten();
    let max_iter = points.clone().map(|p| p.0).max().unwrap_or(1).max(1);
    let (lo, hi) = points
        .map(|p| clip(p.1).log10())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let y_lo = lo.floor();
    let y_hi = if hi.ceil() > y_lo { hi.ceil() } else { y_lo + 1.0 };
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |it: usize| LEFT + plot_w * if max_iter > 1 { (it as f64 - 1.0) / (max_iter as f64 - 1.0) } else { 0.5 };
    let py = |v: f64| TOP + plot_h * (y_hi - clip(v).log10()) / (y_hi - y_lo);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let title = cell.replace(';', ", ");
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="13">{}</text>"#,
        WIDTH / 2.0,
        escape(&format!("{experiment}: {title}"))
    );
    let _ = writeln!(
        s,
        r##"<text x="{}" y="36" text-anchor="middle" font-size="11" fill="#555">{}</text>"##,
        WIDTH / 2.0,
        escape(seed_note)
    );

    // decade grid and labels
    let mut decade = y_lo as i64;
    while decade as f64 <= y_hi {
        let y = py(10f64.powi(decade as i32));
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/>"##,
            LEFT + plot_w
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{decade}</text>"#,
            LEFT - 6.0,
            y + 4.0
        );
        decade += 1;
    }
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for frac in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let it = 1.0 + frac * (max_iter as f64 - 1.0);
        let x = LEFT + plot_w * frac;
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + plot_h + 16.0,
            it.round() as u64
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">iteration</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">relative error</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    for (idx, (solver, pts)) in series.iter().enumerate() {
        let color = COLORS[idx % COLORS.len()];
        if pts.len() == 1 {
            let (it, v) = pts[0];
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                px(it),
                py(v)
            );
        } else {
            let mut coords = String::new();
            let mut last = String::new();
            for (i, &(it, v)) in pts.iter().enumerate() {
                let c = format!("{:.1},{:.1}", px(it), py(v));
                if c != last || i + 1 == pts.len() {
                    coords.push_str(&c);
                    coords.push(' ');
                    last = c;
                }
            }
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                coords.trim_end()
            );
        }
        let ly = TOP + 14.0 + 18.0 * idx as f64;
        let lx = LEFT + plot_w + 10.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            escape(solver)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// One SVG document per plot cell, as `(file name, contents)`, sorted by name.
pub fn render_plots(rows: &[TraceRow]) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = group(rows)
        .into_iter()
        .map(|((experiment, cell), series)| {
            let seed = rows
                .iter()
                .filter(|r| r.experiment == experiment)
                .map(|r| split_instance_id(&r.instance_id))
                .filter(|(c, _)| *c == cell)
                .map(|(_, s)| s)
                .min()
                .unwrap_or(0);
            let svg = render(&experiment, &cell, &format!("seed {seed}"), &series);
            (format!("{}.svg", file_stem(&experiment, &cell)), svg)
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Reads a trace CSV and writes one convergence plot per cell into `out_dir`.
pub fn plot_convergence(trace_csv: &Path, out_dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    let rows = read_traces(trace_csv)?;
    std::fs::create_dir_all(out_dir).map_err(|source| BenchError::Io {
        path: out_dir.to_owned(),
        source,
    })?;
    let mut written = Vec::new();
    for (name, svg) in render_plots(&rows) {
        let path = out_dir.join(name);
        std::fs::write(&path, svg).map_err(|source| BenchError::Io {
            path: path.clone(),
            source,
        })?;
        written.push(path);
    }
    Ok(written)
}
