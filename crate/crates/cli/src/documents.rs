//! Versioned JSON documents read and written by the command line.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context};
use lenscount_core::certify::theorem_bounds;
use lenscount_core::constructions::{Configuration, ConstructionParams};
use lenscount_core::scanner::ScanSpec;
use lenscount_core::solver::{Window, DEFAULT_DEDUPE_RADIUS, DEFAULT_TOL};
use lenscount_core::timedelay::PettersReport;
use lenscount_core::{
    Certificate, FieldKind, LensField, MassConfig, Polynomial, RationalLens, SolveOptions, SolveReport,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

fn format_version() -> u32 {
    FORMAT_VERSION
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub tol: f64,
    pub sing_tol: f64,
    pub dedupe_radius: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol: DEFAULT_TOL,
            sing_tol: lenscount_core::lens::DEFAULT_SING_TOL,
            dedupe_radius: DEFAULT_DEDUPE_RADIUS,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> anyhow::Result<()> {
        for (name, v) in [
            ("tol", self.tol),
            ("sing_tol", self.sing_tol),
            ("dedupe_radius", self.dedupe_radius),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                bail!("tolerance {name} must be positive and finite, got {v}");
            }
        }
        Ok(())
    }

    pub fn options(&self) -> SolveOptions {
        SolveOptions {
            tol: self.tol,
            sing_tol: self.sing_tol,
            dedupe_radius: self.dedupe_radius,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalPayload {
    pub numerator: Polynomial,
    pub denominator: Polynomial,
}

/// The equation to solve; the payload shape is fixed by the kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "lowercase")]
pub enum Problem {
    /// Ascending coefficients of `p`.
    Poly(Polynomial),
    Rational(RationalPayload),
    Masses(MassConfig),
}

impl Problem {
    pub fn field(&self) -> lenscount_core::Result<LensField> {
        match self {
            Problem::Poly(p) => LensField::poly(p.clone()),
            Problem::Rational(r) => LensField::rational(RationalLens::new(r.numerator.clone(), r.denominator.clone())?),
            Problem::Masses(cfg) => LensField::from_masses(cfg),
        }
    }

    /// Family whose count bounds apply: positive masses are physical.
    pub fn bounds_kind(&self) -> FieldKind {
        match self {
            Problem::Poly(_) => FieldKind::Poly,
            Problem::Rational(_) => FieldKind::Rational,
            Problem::Masses(_) => FieldKind::Physical,
        }
    }
}

impl From<Configuration> for Problem {
    fn from(c: Configuration) -> Self {
        match c {
            Configuration::Masses(m) => Problem::Masses(m),
            Configuration::Poly(p) => Problem::Poly(p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default = "format_version")]
    pub format_version: u32,
    #[serde(flatten)]
    pub problem: Problem,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "yes")]
    pub certify: bool,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn new(problem: Problem) -> Self {
        RunConfig {
            format_version: FORMAT_VERSION,
            problem,
            tolerances: Tolerances::default(),
            certify: true,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    #[serde(default = "format_version")]
    pub format_version: u32,
    pub fixed: MassConfig,
    pub new_sigma: f64,
    pub window: Window,
    /// Cells along x and y.
    pub resolution: (usize, usize),
    #[serde(default)]
    pub exclusion_radius: Option<f64>,
}

impl ScanConfig {
    pub fn spec(&self) -> lenscount_core::Result<ScanSpec> {
        ScanSpec::new(
            self.fixed.clone(),
            self.new_sigma,
            self.window,
            self.resolution,
            self.exclusion_radius,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// Simple and certified by winding balance.
    Certified,
    /// Simple, certification not requested.
    Solved,
    NonSimple,
    Uncertified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsVerdict {
    pub kind: FieldKind,
    pub n: usize,
    pub k: usize,
    pub lower: Option<usize>,
    pub upper: Option<usize>,
    /// `k` lies in the progression `lower, lower + 2, ..., upper`.
    pub holds: bool,
}

impl BoundsVerdict {
    pub fn new(kind: FieldKind, n: usize, k: usize) -> Self {
        let bounds = theorem_bounds(kind, n);
        BoundsVerdict {
            kind,
            n,
            k,
            lower: bounds.map(|b| b.0),
            upper: bounds.map(|b| b.1),
            holds: lenscount_core::check_theorem_bounds(kind, n, k),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveDocument {
    pub format_version: u32,
    pub config: RunConfig,
    pub status: Status,
    pub k: usize,
    #[serde(flatten)]
    pub report: SolveReport,
    pub certificate: Option<Certificate>,
    pub theorem_bounds: BoundsVerdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructDocument {
    pub format_version: u32,
    pub family: String,
    pub config: RunConfig,
    pub expected_k: usize,
    pub params_used: ConstructionParams,
    pub status: Status,
    pub k: usize,
    #[serde(flatten)]
    pub report: SolveReport,
    pub certificate: Certificate,
    pub theorem_bounds: BoundsVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub format_version: u32,
    pub cells: usize,
    /// Certified count -> number of cells.
    pub histogram: BTreeMap<usize, usize>,
    pub non_simple: usize,
    pub excluded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeDelayEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub config: MassConfig,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub petters: Option<PettersReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeDelayDocument {
    pub format_version: u32,
    pub grid: usize,
    pub entries: Vec<TimeDelayEntry>,
    pub passed: usize,
    pub failed: usize,
    /// Sweep configurations that were not simple and so carry no verdict.
    pub skipped: usize,
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("{} is not valid JSON", path.display()))?;
    match value.get("format_version").and_then(|v| v.as_u64()) {
        Some(v) if v == FORMAT_VERSION as u64 => {}
        Some(v) => bail!("{}: unsupported format_version {v}", path.display()),
        None => bail!("{}: missing format_version", path.display()),
    }
    serde_json::from_value(value).with_context(|| format!("{} is malformed", path.display()))
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("documents serialize");
    text.push('\n');
    text
}
