//! Fidelity-versus-strength sweeps and their CSV/JSON serialization.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channels::{make_channel, ChannelKind};
use crate::circuits::u_prep;
use crate::error::{Error, Result};
use crate::estimation::{fidelity_exact, fidelity_sampled, point_seed, Mode};
use crate::optimizer::optimize_xi_exact;
use crate::par;
use crate::schemes::{input_state, resolve_scheme, run_protected, Scheme};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_THETA: f64 = 2.0 * PI / 3.0;
pub const DEFAULT_SHOTS: u64 = 10_000;
pub const DEFAULT_GRID_POINTS: usize = 21;
pub const DEFAULT_BASE_SEED: u64 = 20_230_101;
pub const MAX_QUBITS: usize = 10;

pub const CSV_HEADER: [&str; 8] = [
    "scheme", "kind", "n", "theta", "p", "fidelity", "stderr", "xi",
];

/// `points` evenly spaced strengths from 0 to 1 inclusive.
pub fn default_p_grid(points: usize) -> Vec<f64> {
    linspace(0.0, 1.0, points)
}

pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// Parses `start:stop:count` into an evenly spaced grid.
pub fn parse_p_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let [start, stop, count] = parts[..] else {
        return Err(Error::input(format!(
            "p grid '{text}' must have the form start:stop:count"
        )));
    };
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| Error::input(format!("p grid bound '{s}' is not a number")))
    };
    let (start, stop) = (num(start)?, num(stop)?);
    let count: usize = count
        .parse()
        .map_err(|_| Error::input(format!("p grid count '{count}' is not a positive integer")))?;
    if count == 0 {
        return Err(Error::input("p grid count must be at least 1"));
    }
    if !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&stop) {
        return Err(Error::input(format!(
            "p grid bounds must lie in [0, 1], got {start}:{stop}"
        )));
    }
    if count > 1 && stop <= start {
        return Err(Error::input("p grid stop must exceed start"));
    }
    Ok(linspace(start, stop, count))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub n: usize,
    pub theta: f64,
    pub kinds: Vec<ChannelKind>,
    pub schemes: Vec<Scheme>,
    pub p_grid: Vec<f64>,
    pub mode: Mode,
    pub shots: u64,
    pub base_seed: u64,
    pub optimize_xi: bool,
    /// Worker threads; `None` uses every available core, `Some(1)` runs
    /// sequentially.
    pub width: Option<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            n: 2,
            theta: DEFAULT_THETA,
            kinds: ChannelKind::ALL.to_vec(),
            schemes: Scheme::ALL.to_vec(),
            p_grid: default_p_grid(DEFAULT_GRID_POINTS),
            mode: Mode::Exact,
            shots: DEFAULT_SHOTS,
            base_seed: DEFAULT_BASE_SEED,
            optimize_xi: true,
            width: None,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 || self.n > MAX_QUBITS {
            return Err(Error::input(format!(
                "n must lie in 1..={MAX_QUBITS}, got {}",
                self.n
            )));
        }
        if !self.theta.is_finite() {
            return Err(Error::input("theta must be finite"));
        }
        if self.kinds.is_empty() || self.schemes.is_empty() {
            return Err(Error::input(
                "sweep needs at least one channel and one scheme",
            ));
        }
        if self.p_grid.is_empty() {
            return Err(Error::input("p grid is empty"));
        }
        if let Some(p) = self.p_grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::input(format!("p grid value {p} outside [0, 1]")));
        }
        if self.p_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::input("p grid must be strictly increasing"));
        }
        if self.mode == Mode::Sampled && self.shots == 0 {
            return Err(Error::input("sampled mode needs at least one shot"));
        }
        if self.width == Some(0) {
            return Err(Error::input("parallel width must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub p: f64,
    pub fidelity: f64,
    pub stderr: f64,
    pub xi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveMetadata {
    pub mode: Mode,
    pub shots: u64,
    pub base_seed: u64,
    pub version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityCurve {
    pub scheme: Scheme,
    pub kind: ChannelKind,
    pub n: usize,
    pub theta: f64,
    pub points: Vec<CurvePoint>,
    pub metadata: CurveMetadata,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointFailure {
    pub scheme: Scheme,
    pub kind: ChannelKind,
    pub p: f64,
    pub message: String,
}

impl fmt::Display for PointFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} / {} at p={}: {}",
            self.scheme, self.kind, self.p, self.message
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepReport {
    pub curves: Vec<FidelityCurve>,
    pub failures: Vec<PointFailure>,
}

/// Evaluates one `(scheme, kind, p)` point of a sweep.
pub fn evaluate_point(
    cfg: &SweepConfig,
    scheme: Scheme,
    kind: ChannelKind,
    p_index: usize,
) -> Result<CurvePoint> {
    let p = *cfg
        .p_grid
        .get(p_index)
        .ok_or_else(|| Error::input(format!("p index {p_index} out of range")))?;
    let xi = if scheme.uses_xi() && cfg.optimize_xi {
        optimize_xi_exact(scheme, kind, p, cfg.n, cfg.theta)?.xi_star
    } else {
        0.0
    };
    let inst = resolve_scheme(scheme, kind, cfg.n, cfg.theta, xi)?;
    let ch = make_channel(kind, p)?;
    let psi = input_state(cfg.n, cfg.theta)?;
    let rho = run_protected(&inst, &ch, &psi)?;
    let est = match cfg.mode {
        Mode::Exact => fidelity_exact(&psi, &rho)?,
        Mode::Sampled => {
            let seed = point_seed(cfg.base_seed, scheme.id(), kind.id(), p_index as u64);
            fidelity_sampled(&u_prep(cfg.n, cfg.theta)?, &rho, cfg.shots, seed)?
        }
    };
    Ok(CurvePoint {
        p,
        fidelity: est.value,
        stderr: est.stderr,
        xi,
    })
}

/// Runs every `(kind, scheme, p)` point. Curves come out ordered by kind,
/// then scheme, as listed in the config; points within a curve follow the p
/// grid. Failed points are dropped from their curve and listed in
/// `failures`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let mut tasks = Vec::new();
    for &kind in &cfg.kinds {
        for &scheme in &cfg.schemes {
            for i in 0..cfg.p_grid.len() {
                tasks.push((scheme, kind, i));
            }
        }
    }
    let results = par::with_width(cfg.width, || {
        if cfg.width == Some(1) {
            tasks
                .iter()
                .map(|&(s, k, i)| evaluate_point(cfg, s, k, i))
                .collect::<Vec<_>>()
        } else {
            par::map(&tasks, |&(s, k, i)| evaluate_point(cfg, s, k, i))
        }
    });

    let metadata = CurveMetadata {
        mode: cfg.mode,
        shots: if cfg.mode == Mode::Sampled {
            cfg.shots
        } else {
            0
        },
        base_seed: cfg.base_seed,
        version: TOOL_VERSION.to_string(),
    };
    let mut report = SweepReport::default();
    let mut results = tasks.iter().zip(results);
    for &kind in &cfg.kinds {
        for &scheme in &cfg.schemes {
            let mut curve = FidelityCurve {
                scheme,
                kind,
                n: cfg.n,
                theta: cfg.theta,
                points: Vec::with_capacity(cfg.p_grid.len()),
                metadata: metadata.clone(),
            };
            for _ in 0..cfg.p_grid.len() {
                let (&(_, _, i), outcome) = results.next().expect("one result per task");
                match outcome {
                    Ok(point) => curve.points.push(point),
                    Err(e) => report.failures.push(PointFailure {
                        scheme,
                        kind,
                        p: cfg.p_grid[i],
                        message: e.to_string(),
                    }),
                }
            }
            report.curves.push(curve);
        }
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::input(format!(
                "unknown format '{other}' (expected csv or json)"
            ))),
        }
    }
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// Formats `x` with 12 significant digits, `%.12g` style: trailing zeros are
/// dropped and scientific notation is used outside `1e-5 ≤ |x| < 1e12`.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        trim_fraction(format!("{:.*}", (11 - exp) as usize, x))
    } else {
        format!("{}e{exp}", trim_fraction(mantissa.to_string()))
    }
}

fn trim_fraction(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// One CSV data row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub scheme: Scheme,
    pub kind: ChannelKind,
    pub n: usize,
    pub theta: f64,
    pub p: f64,
    pub fidelity: f64,
    pub stderr: f64,
    pub xi: f64,
}

pub fn curves_to_csv(curves: &[FidelityCurve]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::validation(format!("csv encoding: {e}"));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for c in curves {
        for pt in &c.points {
            w.write_record([
                c.scheme.name().to_string(),
                c.kind.name().to_string(),
                c.n.to_string(),
                format_sig12(c.theta),
                format_sig12(pt.p),
                format_sig12(pt.fidelity),
                format_sig12(pt.stderr),
                format_sig12(pt.xi),
            ])
            .map_err(csv_err)?;
        }
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::validation(format!("csv encoding: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r
        .headers()
        .map_err(|e| Error::input(format!("csv header: {e}")))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::input(format!(
            "unexpected csv header {:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    r.deserialize()
        .map(|row| row.map_err(|e| Error::input(format!("csv row: {e}"))))
        .collect()
}

pub fn curves_to_json(curves: &[FidelityCurve]) -> Result<String> {
    serde_json::to_string_pretty(curves)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Error::validation(format!("json encoding: {e}")))
}

pub fn parse_json(text: &str) -> Result<Vec<FidelityCurve>> {
    serde_json::from_str(text).map_err(|e| Error::input(format!("json: {e}")))
}

pub fn render(curves: &[FidelityCurve], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => curves_to_csv(curves),
        OutputFormat::Json => curves_to_json(curves),
    }
}

/// Writes `curves` to `path` in the requested format.
pub fn serialize(curves: &[FidelityCurve], format: OutputFormat, path: &Path) -> Result<()> {
    let text = render(curves, format).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
