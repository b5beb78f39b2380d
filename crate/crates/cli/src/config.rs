//! Run configuration, readable from JSON.
//!
//! ```json
//! {
//!   "case": "disk-case2",
//!   "solver": "wos",
//!   "alpha": 1.5,
//!   "seed": 7,
//!   "params": { "paths": 100000 },
//!   "grid": { "kind": "slice", "line": "y0", "n": 41 },
//!   "out": "disk2_wos.csv"
//! }
//! ```
//!
//! `alpha`, `seed`, `params`, `grid` and `out` are optional. Parameter values
//! may be JSON numbers or strings.

use crate::cases::Case;
use crate::CliError;
use fraclap::{Domain, Point};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    /// Eigenbasis solve with harmonic lifting of nonzero data.
    Spectral,
    /// Eigenbasis solve with a nonharmonic lifting.
    SpectralLift,
    /// Eigenbasis solve with heat-semigroup multipliers.
    SpectralHeatsg,
    Wos,
    Rbf,
    Fvm,
}

impl SolverKind {
    pub const ALL: [SolverKind; 6] =
        [SolverKind::Spectral, SolverKind::SpectralLift, SolverKind::SpectralHeatsg, SolverKind::Wos, SolverKind::Rbf, SolverKind::Fvm];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Spectral => "spectral",
            SolverKind::SpectralLift => "spectral-lift",
            SolverKind::SpectralHeatsg => "spectral-heatsg",
            SolverKind::Wos => "wos",
            SolverKind::Rbf => "rbf",
            SolverKind::Fvm => "fvm",
        }
    }

    pub fn parse(s: &str) -> Result<Self, CliError> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| CliError::Config(format!("unknown solver {s:?}")))
    }

    fn is_spectral(self) -> bool {
        matches!(self, SolverKind::Spectral | SolverKind::SpectralLift | SolverKind::SpectralHeatsg)
    }

    /// Rejects solver/case pairs the solver cannot handle.
    pub fn check_applicable(self, case: &Case, alpha: f64) -> Result<(), CliError> {
        let fail = |why: &str| Err(CliError::Incompatible(format!("{} cannot solve {}: {why}", self.name(), case.name)));
        if alpha == 2.0 && !self.is_spectral() {
            return fail("alpha = 2 is only available to the spectral solvers");
        }
        if !self.is_spectral() && case.data == crate::cases::DataSupport::BoundaryOnly {
            return fail("the integral operator needs data on the whole exterior");
        }
        match self {
            SolverKind::Fvm if case.dim() != 1 => fail("the finite-volume solver is one-dimensional"),
            SolverKind::Fvm if !case.zero_data() => fail("the finite-volume solver needs zero exterior data"),
            SolverKind::Rbf if alpha == 1.0 => fail("the directional constant is undefined at alpha = 1"),
            SolverKind::Rbf if matches!(case.domain, Domain::Disk { .. } | Domain::Rectangle { .. } | Domain::LShape | Domain::Interval { .. }) => Ok(()),
            SolverKind::Rbf => fail("no collocation preset for this domain"),
            SolverKind::SpectralLift if !case.zero_data() && case.lift.is_none() => fail("the case has no smooth lifting"),
            _ => Ok(()),
        }
    }
}

/// Slice lines through the reference square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SliceLine {
    /// `y = 0`
    Y0,
    /// `y = x`
    Yx,
    /// `y = 1 - x`
    Y1mx,
}

impl SliceLine {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "y0" => Ok(SliceLine::Y0),
            "yx" => Ok(SliceLine::Yx),
            "y1mx" => Ok(SliceLine::Y1mx),
            _ => Err(CliError::Config(format!("unknown slice {s:?}; use y0, yx or y1mx"))),
        }
    }

    pub fn point(self, t: f64) -> Point {
        match self {
            SliceLine::Y0 => [t, 0.0],
            SliceLine::Yx => [t, t],
            SliceLine::Y1mx => [t, 1.0 - t],
        }
    }

    pub fn contains(self, p: Point) -> bool {
        let tol = 1e-12;
        match self {
            SliceLine::Y0 => p[1].abs() <= tol,
            SliceLine::Yx => (p[1] - p[0]).abs() <= tol,
            SliceLine::Y1mx => (p[1] - 1.0 + p[0]).abs() <= tol,
        }
    }
}

/// Where the solution is reported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GridSpec {
    /// `n` uniform points across the bounding box in 1D, or an `n × n`
    /// tensor grid in 2D; points outside the closed domain are dropped.
    Uniform { n: usize },
    /// `n` points of `x ∈ [-1, 1]` along a line, inside the closed domain.
    Slice { line: SliceLine, n: usize },
    Points { points: Vec<Point> },
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::Uniform { n: 41 }
    }
}

impl GridSpec {
    pub fn points(&self, dom: &Domain) -> Result<Vec<Point>, CliError> {
        let lin = |a: f64, b: f64, n: usize| -> Vec<f64> {
            (0..n).map(|i| if n == 1 { 0.5 * (a + b) } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect()
        };
        let pts: Vec<Point> = match self {
            GridSpec::Uniform { n } => {
                let (lo, hi) = dom.bounding_box();
                let xs = lin(lo[0], hi[0], *n);
                if dom.dim() == 1 {
                    xs.into_iter().map(|x| [x, 0.0]).collect()
                } else {
                    let ys = lin(lo[1], hi[1], *n);
                    ys.iter().flat_map(|&y| xs.iter().map(move |&x| [x, y])).filter(|&p| dom.contains(p)).collect()
                }
            }
            GridSpec::Slice { line, n } => {
                if dom.dim() == 1 {
                    return Err(CliError::Config("slices need a two-dimensional case".into()));
                }
                lin(-1.0, 1.0, *n).into_iter().map(|t| line.point(t)).filter(|&p| dom.contains(p)).collect()
            }
            GridSpec::Points { points } => points.clone(),
        };
        if pts.is_empty() {
            return Err(CliError::Config("the evaluation grid has no points in the domain".into()));
        }
        Ok(pts)
    }

    /// Parses `uniform:N`, `slice:LINE:N` or `points:x,y;x,y;...`.
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let bad = || CliError::Config(format!("cannot parse grid {s:?}"));
        let num = |v: &str| v.trim().parse::<usize>().map_err(|_| bad());
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["uniform", n] => Ok(GridSpec::Uniform { n: num(n)? }),
            ["slice", line, n] => Ok(GridSpec::Slice { line: SliceLine::parse(line)?, n: num(n)? }),
            ["points", list] => {
                let points = list
                    .split(';')
                    .map(|p| {
                        let c: Vec<f64> = p.split(',').map(|v| v.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
                        match c.as_slice() {
                            [x] => Ok([*x, 0.0]),
                            [x, y] => Ok([*x, *y]),
                            _ => Err(bad()),
                        }
                    })
                    .collect::<Result<_, _>>()?;
                Ok(GridSpec::Points { points })
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub case: String,
    pub solver: SolverKind,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(case: &str, solver: SolverKind) -> Self {
        RunConfig { case: case.into(), solver, alpha: None, seed: 0, params: BTreeMap::new(), grid: GridSpec::default(), out: None }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("run config: {e}")))
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.into(), serde_json::Value::String(value.to_string()));
        self
    }

    pub fn params(&self) -> Params<'_> {
        Params(&self.params)
    }
}

/// Typed access to `key=value` parameters.
#[derive(Debug, Clone, Copy)]
pub struct Params<'a>(pub &'a BTreeMap<String, serde_json::Value>);

impl Params<'_> {
    fn raw(&self, key: &str) -> Option<String> {
        self.0.get(key).map(|v| match v {
            serde_json::Value::String(s) => s.clone(),
            other => other.to_string(),
        })
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some(s) => s.parse().map_err(|_| CliError::Config(format!("parameter {key} = {s:?} is not a number"))),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some(s) => s
                .parse::<usize>()
                .or_else(|_| {
                    // accept 1e5 style integers
                    s.parse::<f64>().ok().filter(|v| v.fract() == 0.0 && *v >= 0.0 && *v < 1e18).map(|v| v as usize).ok_or(())
                })
                .map_err(|_| CliError::Config(format!("parameter {key} = {s:?} is not a non-negative integer"))),
        }
    }

    pub fn str_or(&self, key: &str, default: &str) -> String {
        self.raw(key).unwrap_or_else(|| default.to_string())
    }

    /// Comma-separated list of numbers.
    pub fn list_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        match self.raw(key) {
            None => Ok(default.to_vec()),
            Some(s) => s
                .trim_matches(|c| c == '[' || c == ']')
                .split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|_| CliError::Config(format!("parameter {key}: cannot parse {v:?}"))))
                .collect(),
        }
    }

    /// Rejects keys outside `known`, so misspelt parameters do not pass silently.
    pub fn check_known(&self, known: &[&str]) -> Result<(), CliError> {
        match self.0.keys().find(|k| !known.contains(&k.as_str())) {
            Some(k) => Err(CliError::Config(format!("unknown parameter {k:?}; expected one of {}", known.join(", ")))),
            None => Ok(()),
        }
    }

    pub fn render(&self) -> String {
        self.0.keys().map(|k| format!("{k}={}", self.raw(k).unwrap_or_default())).collect::<Vec<_>>().join(" ")
    }
}

/// Parses `key=value`.
pub fn parse_key_value(s: &str) -> Result<(String, String), CliError> {
    s.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .filter(|(k, _)| !k.is_empty())
        .ok_or_else(|| CliError::Config(format!("expected key=value, got {s:?}")))
}
