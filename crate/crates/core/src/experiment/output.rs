use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use super::sweep::SweepResult;
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};

pub const TRAJECTORY_COLUMNS: [&str; 12] = [
    "t_ns", "re_rho11", "im_rho11", "re_rho22", "im_rho22", "re_rho12", "im_rho12", "re_rho21",
    "im_rho21", "trace", "purity", "min_eig",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Svg,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "svg" => Ok(Self::Svg),
            "json" => Ok(Self::Json),
            _ => Err(format!("unknown format `{s}` (expected csv, svg or json)")),
        }
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::io(path, std::io::Error::other(format!("{other:?}"))),
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// One row per sample, 17 significant digits.
pub fn trajectory_csv(traj: &Trajectory) -> Result<String> {
    if traj.is_empty() {
        return Err(Error::InvalidState("empty trajectory".into()));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let here = Path::new("<memory>");
    w.write_record(TRAJECTORY_COLUMNS)
        .map_err(|e| csv_err(here, e))?;
    for i in 0..traj.len() {
        let row = [
            traj.times[i],
            traj.rho11[i].re,
            traj.rho11[i].im,
            traj.rho22[i].re,
            traj.rho22[i].im,
            traj.rho12[i].re,
            traj.rho12[i].im,
            traj.rho21[i].re,
            traj.rho21[i].im,
            traj.trace[i],
            traj.purity[i],
            traj.min_eigenvalue[i],
        ];
        w.write_record(row.iter().map(|&x| num(x)))
            .map_err(|e| csv_err(here, e))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::io(here, e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("ascii"))
}

/// Parsed trajectory CSV: the header and numeric rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn parse_csv(text: &str) -> Result<CsvTable> {
    let here = Path::new("<memory>");
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r
        .headers()
        .map_err(|e| csv_err(here, e))?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| csv_err(here, e))?;
        let row = rec
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| Error::InvalidState(format!("bad number `{s}`: {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(CsvTable { header, rows })
}

/// Axis column then one F1 column per family ratio.
pub fn sweep_csv(s: &SweepResult) -> Result<String> {
    let here = Path::new("<memory>");
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![s.axis_label().to_owned()];
    header.extend(s.spec.family.iter().map(|r| format!("f1_gp_over_g_{r}")));
    w.write_record(&header).map_err(|e| csv_err(here, e))?;
    for (v, row) in s.values.iter().zip(&s.f1) {
        let rec = std::iter::once(num(*v)).chain(row.iter().map(|&x| num(x)));
        w.write_record(rec).map_err(|e| csv_err(here, e))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::io(here, e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("ascii"))
}

const W: f64 = 720.0;
const H: f64 = 420.0;
const MARGIN: f64 = 56.0;
const PALETTE: [&str; 7] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf",
];

struct Series<'a> {
    label: String,
    xs: &'a [f64],
    ys: Vec<f64>,
}

fn line_plot(title: &str, x_label: &str, y_range: (f64, f64), series: &[Series]) -> String {
    let (x0, x1) = series
        .iter()
        .flat_map(|s| s.xs.iter().copied())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
            (a.min(x), b.max(x))
        });
    let x1 = if x1 > x0 { x1 } else { x0 + 1.0 };
    let (y0, y1) = y_range;
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let py = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{title}</text>"#,
        W / 2.0
    );
    let (l, r, t, b) = (MARGIN, W - MARGIN, MARGIN, H - MARGIN);
    let _ = writeln!(
        s,
        r#"<polyline points="{l},{t} {l},{b} {r},{b}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let yv = y0 + (y1 - y0) * k as f64 / 4.0;
        let xv = x0 + (x1 - x0) * k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{yv:.3}</text>"#,
            l - 6.0,
            py(yv) + 4.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{xv:.4}</text>"#,
            px(xv),
            b + 18.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text>"#,
        W / 2.0,
        H - 12.0
    );
    for (i, ser) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = ser
            .xs
            .iter()
            .zip(&ser.ys)
            .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y.clamp(y0, y1))))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
        let ly = t + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            r - 120.0,
            r - 100.0,
            r - 94.0,
            ly + 4.0,
            ser.label
        );
    }
    s.push_str("</svg>\n");
    s
}

/// ρ11, ρ22 and |ρ12| against t.
pub fn trajectory_svg(traj: &Trajectory) -> String {
    let series = [
        Series {
            label: "rho11".into(),
            xs: &traj.times,
            ys: traj.rho11.iter().map(|z| z.re).collect(),
        },
        Series {
            label: "rho22".into(),
            xs: &traj.times,
            ys: traj.rho22.iter().map(|z| z.re).collect(),
        },
        Series {
            label: "|rho12|".into(),
            xs: &traj.times,
            ys: traj.rho12.iter().map(|z| z.norm()).collect(),
        },
    ];
    line_plot("density-matrix elements", "t (ns)", (0.0, 1.0), &series)
}

pub fn sweep_svg(s: &SweepResult) -> String {
    let all = s.f1.iter().flatten().copied();
    let lo = all.fold(1.0_f64, f64::min);
    let lo = ((lo * 20.0).floor() / 20.0).min(0.95);
    let series: Vec<Series> = s
        .spec
        .family
        .iter()
        .enumerate()
        .map(|(c, r)| Series {
            label: format!("g'/g = {r}"),
            xs: &s.values,
            ys: s.column(c),
        })
        .collect();
    line_plot("F1", s.axis_label(), (lo, 1.0), &series)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("summary serialises");
    s.push('\n');
    s
}

pub fn write_file(path: &Path, contents: &str) -> Result<PathBuf> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            ensure_dir(dir)?;
        }
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))?;
    Ok(path.to_path_buf())
}

/// Writes `{stem}.csv`, `{stem}.svg` and/or `{stem}.json` into `dir`.
pub fn emit_outputs<S: Serialize>(
    traj: &Trajectory,
    summary: &S,
    formats: &[OutputFormat],
    dir: &Path,
    stem: &str,
) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let mut out = Vec::new();
    for f in formats {
        let path = match f {
            OutputFormat::Csv => {
                write_file(&dir.join(format!("{stem}.csv")), &trajectory_csv(traj)?)?
            }
            OutputFormat::Svg => {
                write_file(&dir.join(format!("{stem}.svg")), &trajectory_svg(traj))?
            }
            OutputFormat::Json => write_file(&dir.join(format!("{stem}.json")), &to_json(summary))?,
        };
        out.push(path);
    }
    Ok(out)
}
