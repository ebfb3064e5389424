//! Output files: JSONL record streams, versioned CSV tables, SVG plots and
//! the manifest that makes a run replayable.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{Config, Format, SEED_SCHEME};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
    #[error("serialization: {0}")]
    Serialize(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
}

fn file_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::File { path: path.to_path_buf(), source }
}

/// Table with a schema id written as the first (comment) line.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub schema: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Cell text for a JSON value: strings unquoted, `null` empty, the rest as JSON.
fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl CsvTable {
    pub fn new(schema: impl Into<String>, columns: &[&str]) -> Self {
        Self { schema: schema.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    /// One row per record, columns from the record's fields (sorted by name).
    pub fn from_records<T: Serialize>(schema: impl Into<String>, records: &[T]) -> Result<Self, IoError> {
        let values = records.iter().map(serde_json::to_value).collect::<Result<Vec<_>, _>>()?;
        let mut table = Self { schema: schema.into(), columns: Vec::new(), rows: Vec::new() };
        for v in &values {
            let Value::Object(map) = v else {
                return Err(IoError::Invalid("records must serialize to objects".into()));
            };
            if table.columns.is_empty() {
                table.columns = map.keys().cloned().collect();
            }
            table.rows.push(table.columns.iter().map(|c| map.get(c).map(cell).unwrap_or_default()).collect());
        }
        Ok(table)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# schema: {}\n", self.schema);
        let line = |cells: &[String]| cells.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",");
        out.push_str(&line(&self.columns));
        out.push('\n');
        for r in &self.rows {
            out.push_str(&line(r));
            out.push('\n');
        }
        out
    }
}

pub fn to_jsonl<T: Serialize>(records: &[T]) -> Result<String, IoError> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn from_jsonl<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>, IoError> {
    text.lines().filter(|l| !l.is_empty()).map(|l| serde_json::from_str(l).map_err(IoError::from)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Plot {
    /// Empirical distribution functions; infinite samples are left out of the steps.
    Ecdf { title: String, series: Vec<(String, Vec<f64>)> },
    /// Points on log-log axes with an optional fitted line `log y = intercept + slope log x`.
    LogLog { title: String, points: Vec<(f64, f64)>, fit: Option<(f64, f64)> },
    /// A sequence against its index.
    Trace { title: String, values: Vec<f64> },
}

const W: f64 = 480.0;
const H: f64 = 320.0;
const PAD: f64 = 40.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Self {
        let span = |v: &mut dyn Iterator<Item = f64>| {
            let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
            if !lo.is_finite() {
                (0.0, 1.0)
            } else if hi > lo {
                (lo, hi)
            } else {
                (lo - 0.5, hi + 0.5)
            }
        };
        let (x0, x1) = span(&mut xs.clone());
        let (y0, y1) = span(&mut ys.clone());
        Self { x0, x1, y0, y1 }
    }

    fn x(&self, v: f64) -> f64 {
        PAD + (v - self.x0) / (self.x1 - self.x0) * (W - 2.0 * PAD)
    }

    fn y(&self, v: f64) -> f64 {
        H - PAD - (v - self.y0) / (self.y1 - self.y0) * (H - 2.0 * PAD)
    }
}

fn header(out: &mut String, title: &str, f: &Frame, xlabel: &str, ylabel: &str) {
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(out, r#"<title>{}</title>"#, escape(title));
    let _ = writeln!(out, r#"<line class="axis" x1="{PAD}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, H - PAD, W - PAD, H - PAD);
    let _ = writeln!(out, r#"<line class="axis" x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{}" stroke="black"/>"#, H - PAD);
    let _ = writeln!(out, r#"<text class="label" x="{}" y="{}" text-anchor="middle">{}</text>"#, W / 2.0, H - 8.0, escape(xlabel));
    let _ = writeln!(out, r#"<text class="label" x="12" y="{}" transform="rotate(-90 12 {})" text-anchor="middle">{}</text>"#, H / 2.0, H / 2.0, escape(ylabel));
    let _ = writeln!(out, r#"<text class="tick" x="{PAD}" y="{}" text-anchor="middle">{:.3}</text>"#, H - PAD + 14.0, f.x0);
    let _ = writeln!(out, r#"<text class="tick" x="{}" y="{}" text-anchor="middle">{:.3}</text>"#, W - PAD, H - PAD + 14.0, f.x1);
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Standalone SVG. ECDF plots draw one `class="step"` segment per distinct
/// finite sample value (the level after that value), joined by `class="riser"`
/// segments.
pub fn render_svg(plot: &Plot) -> String {
    let mut out = String::new();
    match plot {
        Plot::Ecdf { title, series } => {
            let finite = || series.iter().flat_map(|(_, s)| s.iter().copied().filter(|v| v.is_finite()));
            let f = Frame::new(finite(), [0.0, 1.0].into_iter());
            header(&mut out, title, &f, "value", "F");
            for (k, (name, samples)) in series.iter().enumerate() {
                let color = COLORS[k % COLORS.len()];
                let mut v: Vec<f64> = samples.iter().copied().filter(|x| x.is_finite()).collect();
                v.sort_by(|a, b| a.total_cmp(b));
                let n = samples.len() as f64;
                let _ = writeln!(out, r#"<g class="series" stroke="{color}"><title>{}</title>"#, escape(name));
                let mut i = 0;
                let mut level = 0.0;
                while i < v.len() {
                    let x = v[i];
                    while i < v.len() && v[i] == x {
                        i += 1;
                    }
                    let next_x = if i < v.len() { f.x(v[i]) } else { W - PAD };
                    let new_level = i as f64 / n;
                    let _ = writeln!(out, r#"<line class="riser" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#, f.x(x), f.y(level), f.x(x), f.y(new_level));
                    let _ = writeln!(out, r#"<line class="step" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#, f.x(x), f.y(new_level), next_x, f.y(new_level));
                    level = new_level;
                }
                out.push_str("</g>\n");
            }
        }
        Plot::LogLog { title, points, fit } => {
            let logs: Vec<(f64, f64)> = points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
            let f = Frame::new(logs.iter().map(|p| p.0), logs.iter().map(|p| p.1));
            header(&mut out, title, &f, "log size", "log value");
            for (x, y) in &logs {
                let _ = writeln!(out, r#"<circle class="point" cx="{:.2}" cy="{:.2}" r="3" fill="{}"/>"#, f.x(*x), f.y(*y), COLORS[0]);
            }
            if let Some((slope, intercept)) = fit {
                let line = |x: f64| intercept + slope * x;
                let _ = writeln!(
                    out,
                    r#"<line class="fit" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}"><title>slope {slope:.4}</title></line>"#,
                    f.x(f.x0),
                    f.y(line(f.x0)),
                    f.x(f.x1),
                    f.y(line(f.x1)),
                    COLORS[1]
                );
            }
        }
        Plot::Trace { title, values } => {
            let f = Frame::new((0..values.len()).map(|i| i as f64), values.iter().copied().filter(|v| v.is_finite()));
            header(&mut out, title, &f, "index", "value");
            let pts: Vec<String> = values.iter().enumerate().filter(|(_, v)| v.is_finite()).map(|(i, v)| format!("{:.2},{:.2}", f.x(i as f64), f.y(*v))).collect();
            let _ = writeln!(out, r#"<polyline class="trace" fill="none" stroke="{}" points="{}"/>"#, COLORS[0], pts.join(" "));
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Number of elements of each class in an SVG produced by [`render_svg`].
pub fn svg_structure(svg: &str) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for part in svg.split("class=\"").skip(1) {
        if let Some(end) = part.find('"') {
            *out.entry(part[..end].to_string()).or_default() += 1;
        }
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Write to a sibling temporary file, then rename over the target.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    let name = path.file_name().ok_or_else(|| IoError::Invalid(format!("{} has no file name", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, bytes).map_err(file_err(&tmp))?;
    fs::rename(&tmp, path).map_err(file_err(path))
}

/// Everything a command produces, before it touches the disk.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outputs {
    /// `(file name, contents)` in write order.
    pub files: Vec<(String, Vec<u8>)>,
    pub seeds_derived: u64,
    pub seed_collisions: u64,
}

pub const RECORDS_STEM: &str = "records";
pub const SUMMARY_FILE: &str = "summary.csv";

impl Outputs {
    /// Records as `records.jsonl` or `records.csv`, then the summary and plots.
    pub fn new<T: Serialize>(format: Format, schema: &str, records: &[T], summary: &CsvTable, plots: &[(String, Plot)]) -> Result<Self, IoError> {
        let mut out = Self::default();
        match format {
            Format::Jsonl => out.add(format!("{RECORDS_STEM}.jsonl"), to_jsonl(records)?.into_bytes()),
            Format::Csv => out.add(format!("{RECORDS_STEM}.csv"), CsvTable::from_records(schema, records)?.to_csv().into_bytes()),
        }
        out.add(SUMMARY_FILE.into(), summary.to_csv().into_bytes());
        for (name, p) in plots {
            out.add(name.clone(), render_svg(p).into_bytes());
        }
        Ok(out)
    }

    pub fn add(&mut self, name: String, bytes: Vec<u8>) {
        self.files.push((name, bytes));
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, b)| b.as_slice())
    }
}

/// Replay record written after every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub seed_scheme: String,
    pub config: Config,
    /// SHA-256 of each output file.
    pub checksums: BTreeMap<String, String>,
    /// SHA-256 of input files named in the configuration.
    #[serde(default)]
    pub inputs: BTreeMap<String, String>,
    pub seeds_derived: u64,
    pub seed_collisions: u64,
}

pub const MANIFEST_FILE: &str = "manifest.json";
pub const TOOL: &str = "blanket-lab";

impl Manifest {
    pub fn load(path: &Path) -> Result<Self, IoError> {
        let text = fs::read_to_string(path).map_err(file_err(path))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Writes every output into `config.out`, then the manifest (atomically, last).
pub fn emit_outputs(config: &Config, outputs: &Outputs, inputs: BTreeMap<String, String>) -> Result<Manifest, IoError> {
    let dir = &config.out;
    fs::create_dir_all(dir).map_err(file_err(dir))?;
    let mut checksums = BTreeMap::new();
    for (name, bytes) in &outputs.files {
        if name == MANIFEST_FILE || name.contains(['/', '\\']) {
            return Err(IoError::Invalid(format!("invalid output name `{name}`")));
        }
        write_atomic(&dir.join(name), bytes)?;
        checksums.insert(name.clone(), sha256_hex(bytes));
    }
    let manifest = Manifest {
        tool: TOOL.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed_scheme: SEED_SCHEME.into(),
        config: config.clone(),
        checksums,
        inputs,
        seeds_derived: outputs.seeds_derived,
        seed_collisions: outputs.seed_collisions,
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    write_atomic(&dir.join(MANIFEST_FILE), text.as_bytes())?;
    Ok(manifest)
}

/// Files whose replayed contents differ from the manifest: byte comparison for
/// tables and streams, element counts for SVG.
pub fn replay_mismatches(manifest: &Manifest, original_dir: &Path, replayed: &Outputs) -> Result<Vec<String>, IoError> {
    let mut bad = Vec::new();
    for (name, sum) in &manifest.checksums {
        let Some(bytes) = replayed.get(name) else {
            bad.push(name.clone());
            continue;
        };
        if name.ends_with(".svg") {
            let path = original_dir.join(name);
            let old = fs::read_to_string(&path).map_err(file_err(&path))?;
            if svg_structure(&old) != svg_structure(&String::from_utf8_lossy(bytes)) {
                bad.push(name.clone());
            }
        } else if &sha256_hex(bytes) != sum {
            bad.push(name.clone());
        }
    }
    Ok(bad)
}
