//! Command implementations behind the `expsum` binary. Kept in the library
//! so that integration tests can drive them without spawning processes.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conjecture::linspace;
use crate::error::Error;
use crate::objective::{phi, phi_sign_cluster_axis, sweep_surface, FrequencySet, SurfaceMode};
use crate::optimize::{minimize_phi, solve_v0, OptimizeConfig};
use crate::signal::{SampledSignal, Signal};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REPRODUCTION_MISS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Reference values checked by `expsum reproduce`, with their tolerances.
pub const V0_TARGET: (f64, f64) = (0.742019, 1e-5);
pub const PHI_MIN_TARGET: (f64, f64) = (0.4749383, 1e-5);
pub const CLUSTER_LIMIT_TARGET: (f64, f64) = (0.25, 1e-6);

pub const CSV_HEADER: [&str; 3] = ["x", "f_re", "f_im"];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Compute(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_USAGE
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

/// `sign` or `csv:PATH`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SignalSource {
    Sign,
    Csv(PathBuf),
}

impl FromStr for SignalSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sign" => Ok(SignalSource::Sign),
            _ => match s.strip_prefix("csv:") {
                Some(path) if !path.is_empty() => Ok(SignalSource::Csv(PathBuf::from(path))),
                _ => Err(format!("expected `sign` or `csv:PATH`, got `{s}`")),
            },
        }
    }
}

impl fmt::Display for SignalSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignalSource::Sign => write!(f, "sign"),
            SignalSource::Csv(p) => write!(f, "csv:{}", p.display()),
        }
    }
}

impl SignalSource {
    pub fn load(&self) -> Result<Signal, CliError> {
        match self {
            SignalSource::Sign => Ok(Signal::Sign),
            SignalSource::Csv(path) => read_signal_csv(path),
        }
    }
}

/// Reads a `x,f_re,f_im` table. Errors carry the 1-based line number.
pub fn read_signal_csv(path: &Path) -> Result<Signal, CliError> {
    let input_err = |message: String| CliError::Input {
        path: path.display().to_string(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| input_err(e.to_string()))?;
    let header = reader
        .headers()
        .map_err(|e| input_err(format!("line 1: {e}")))?
        .clone();
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(input_err(format!(
            "line 1: expected header `{}`, got `{}`",
            CSV_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }

    let mut grid = Vec::new();
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            input_err(format!("line {line}: {e}"))
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |k: usize| -> Result<f64, CliError> {
            let raw = record.get(k).unwrap_or("");
            raw.parse::<f64>()
                .map_err(|_| input_err(format!("line {line}: `{raw}` in column {} is not a number", CSV_HEADER[k])))
        };
        grid.push(field(0)?);
        values.push(Complex64::new(field(1)?, field(2)?));
    }
    SampledSignal::new(grid, values)
        .map(Signal::Sampled)
        .map_err(|e| input_err(e.to_string()))
}

/// Writes a sampled signal in the format read by [`read_signal_csv`], with
/// 17 significant digits so values round-trip exactly.
pub fn write_signal_csv(path: &Path, signal: &SampledSignal) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        writeln!(out, "{}", CSV_HEADER.join(","))?;
        for (x, f) in signal.grid().iter().zip(signal.values()) {
            writeln!(out, "{x:.16e},{:.16e},{:.16e}", f.re, f.im)?;
        }
        out.flush()
    };
    write().map_err(|e| CliError::io(path, e))
}

/// `MIN:MAX:STEPS`, with `STEPS ≥ 1` points including both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRange {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl FromStr for GridRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected MIN:MAX:STEPS, got `{s}`"));
        }
        let num = |p: &str| {
            p.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("`{p}` is not a finite number"))
        };
        let steps: i64 = parts[2]
            .trim()
            .parse()
            .map_err(|_| format!("`{}` is not an integer step count", parts[2]))?;
        if steps <= 0 {
            return Err(format!("step count must be positive, got {steps}"));
        }
        Ok(GridRange {
            min: num(parts[0])?,
            max: num(parts[1])?,
            steps: steps as usize,
        })
    }
}

impl GridRange {
    pub fn points(&self) -> Vec<f64> {
        linspace((self.min, self.max), self.steps)
    }
}

/// Which objective `phi-map` evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    One,
    TwoCluster,
}

impl FromStr for MapKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "1" => Ok(MapKind::One),
            "2cluster" => Ok(MapKind::TwoCluster),
            _ => Err(format!("expected `1` or `2cluster`, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FitOptions {
    pub signal: SignalSource,
    pub n: usize,
    pub starts: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisEntry {
    pub degree: u32,
    /// `[u, v]` of the frequency `u + iv`.
    pub lambda: [f64; 2],
    /// `[re, im]`.
    pub coefficient: [f64; 2],
}

/// Result of `expsum fit`, serialized as TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub signal: String,
    pub n: usize,
    pub seed: u64,
    pub starts: usize,
    pub starts_converged: usize,
    pub evaluations: usize,
    pub f_min: f64,
    pub rms_deflection: f64,
    /// `[u, v]` per frequency, in search order.
    pub lambdas: Vec<[f64; 2]>,
    /// `[re, im]` per basis term, aligned with `basis`.
    pub coefficients: Vec<[f64; 2]>,
    pub basis: Vec<BasisEntry>,
}

impl FitReport {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("report fields are all serializable")
    }

    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }
}

pub fn run_fit(opts: &FitOptions) -> Result<FitReport, CliError> {
    if opts.n == 0 || opts.starts == 0 {
        return Err(CliError::Usage("--n and --starts must be positive".into()));
    }
    let signal = opts.signal.load()?;
    let config = OptimizeConfig {
        n: opts.n,
        starts: opts.starts,
        seed: opts.seed,
        ..OptimizeConfig::default()
    };
    let result = minimize_phi(&signal, &config)?;
    let fit = &result.fit;
    Ok(FitReport {
        signal: opts.signal.to_string(),
        n: opts.n,
        seed: opts.seed,
        starts: opts.starts,
        starts_converged: result.starts_converged,
        evaluations: result.evaluations,
        f_min: fit.f_min,
        rms_deflection: fit.rms_deflection(),
        lambdas: result
            .best_freqs
            .lambdas()
            .iter()
            .map(|l| [l.re, l.im])
            .collect(),
        coefficients: fit.coefficients.iter().map(|a| [a.re, a.im]).collect(),
        basis: fit
            .basis
            .terms()
            .iter()
            .zip(&fit.coefficients)
            .map(|(t, a)| BasisEntry {
                degree: t.degree,
                lambda: [t.lambda.re, t.lambda.im],
                coefficient: [a.re, a.im],
            })
            .collect(),
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

#[derive(Debug, Clone)]
pub struct PhiMapOptions {
    pub signal: SignalSource,
    pub kind: MapKind,
    pub u: GridRange,
    pub v: GridRange,
}

/// `u,v,phi` rows, row-major with `u` outermost, 17 significant digits.
pub fn phi_map_csv(opts: &PhiMapOptions) -> Result<String, CliError> {
    let signal = opts.signal.load()?;
    let mode = match opts.kind {
        MapKind::One => SurfaceMode::OneFrequency,
        MapKind::TwoCluster => SurfaceMode::DoubleCluster,
    };
    let points = sweep_surface(&opts.u.points(), &opts.v.points(), mode, &signal)?;
    let mut out = String::from("u,v,phi\n");
    for p in points {
        out.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", p.u, p.v, p.phi));
    }
    Ok(out)
}

/// One line of the reproduction table.
#[derive(Debug, Clone, PartialEq)]
pub struct ReproductionRow {
    pub label: &'static str,
    pub value: String,
    /// `(target, tolerance, passed)` for checked quantities.
    pub check: Option<(f64, f64, bool)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reproduction {
    pub rows: Vec<ReproductionRow>,
}

impl Reproduction {
    pub fn passed(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.check.is_none_or(|(_, _, ok)| ok))
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            EXIT_OK
        } else {
            EXIT_REPRODUCTION_MISS
        }
    }
}

impl fmt::Display for Reproduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<44} {:<34} check", "quantity", "value")?;
        for row in &self.rows {
            let check = match row.check {
                Some((target, tol, ok)) => format!(
                    "{} (target {target}, tol {tol:e})",
                    if ok { "PASS" } else { "FAIL" }
                ),
                None => String::from("-"),
            };
            writeln!(f, "{:<44} {:<34} {}", row.label, row.value, check)?;
        }
        write!(f, "{}", if self.passed() { "all checks passed" } else { "REPRODUCTION MISS" })
    }
}

fn checked(label: &'static str, value: f64, (target, tol): (f64, f64)) -> ReproductionRow {
    ReproductionRow {
        label,
        value: format!("{value:.10}"),
        check: Some((target, tol, (value - target).abs() < tol)),
    }
}

/// Recomputes the sign-function reference values. `perturbation` is added
/// to the computed `v0` before anything downstream uses it; it exists so
/// the failure path can be exercised.
pub fn reproduce(perturbation: f64) -> Result<Reproduction, CliError> {
    let sign = Signal::Sign;
    let v0 = solve_v0()? + perturbation;
    let at = |lambdas: Vec<Complex64>| -> Result<f64, CliError> {
        Ok(phi(&FrequencySet::with_default_tol(lambdas)?, &sign)?)
    };
    let phi_plus = at(vec![Complex64::new(0.0, v0)])?;
    let phi_minus = at(vec![Complex64::new(0.0, -v0)])?;
    let cluster_limit = phi_sign_cluster_axis(0.0);
    let cluster_pipeline = at(vec![Complex64::new(0.0, 0.0); 2])?;

    let one = minimize_phi(
        &sign,
        &OptimizeConfig {
            n: 1,
            seed: 7,
            ..OptimizeConfig::default()
        },
    )?;
    let two = minimize_phi(
        &sign,
        &OptimizeConfig {
            n: 2,
            starts: 64,
            seed: 7,
            ..OptimizeConfig::default()
        },
    )?;
    let fmt_lambdas = |freqs: &FrequencySet| {
        freqs
            .lambdas()
            .iter()
            .map(|l| format!("{:+.6}{:+.6}i", l.re, l.im))
            .collect::<Vec<_>>()
            .join(", ")
    };

    Ok(Reproduction {
        rows: vec![
            checked("v0 (root of pi v sin(pi v) + cos(pi v) = 1)", v0, V0_TARGET),
            checked("phi(+i v0), one frequency", phi_plus, PHI_MIN_TARGET),
            checked("phi(-i v0), one frequency", phi_minus, PHI_MIN_TARGET),
            ReproductionRow {
                label: "cos^2(pi v0)",
                value: format!("{:.10}", (std::f64::consts::PI * v0).cos().powi(2)),
                check: None,
            },
            checked("double cluster at 0, closed-form limit", cluster_limit, CLUSTER_LIMIT_TARGET),
            ReproductionRow {
                label: "double cluster at 0, pipeline",
                value: format!("{cluster_pipeline:.10}"),
                check: None,
            },
            ReproductionRow {
                label: "n=1 search (32 starts, seed 7): phi",
                value: format!("{:.10}", one.best_phi),
                check: None,
            },
            ReproductionRow {
                label: "n=1 search: frequency",
                value: fmt_lambdas(&one.best_freqs),
                check: None,
            },
            ReproductionRow {
                label: "n=2 search (64 starts, seed 7): phi",
                value: format!("{:.10}", two.best_phi),
                check: None,
            },
            ReproductionRow {
                label: "n=2 search: frequencies",
                value: fmt_lambdas(&two.best_freqs),
                check: None,
            },
        ],
    })
}
