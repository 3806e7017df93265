//! Argument-principle certificates for solve reports.
//!
//! For `f = h - conj(z)` a simple zero has winding `+1` (sense-preserving) or
//! `-1` (sense-reversing), every pole of a rational `h` has winding `-1`, and
//! a large circle has winding `n` (polynomial `h`) or `-1` (rational `h`).
//! The winding over the large circle equals the sum over all small circles
//! around zeros and poles, so a missed or misclassified zero breaks the
//! accounting.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::lens::{FieldKind, LensField};
use crate::solver::{solve, SolveOptions, SolveReport};

pub const INIT_SAMPLES: usize = 64;
pub const MAX_DEPTH: u32 = 24;
/// A winding estimate farther than this from an integer is rejected.
const INTEGER_SLACK: f64 = 0.01;
const GUARD_RELATIVE: f64 = 1e-6;
const GUARD_ABSOLUTE: f64 = 1e-9;
/// Small circles have radius at most this fraction of the field's natural scale.
const SMALL_RADIUS_FACTOR: f64 = 1e-3;
const MAX_DOUBLINGS: usize = 64;
const DOMINANCE_SAMPLES: usize = 256;

/// Positively oriented circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub center: Complex64,
    pub radius: f64,
}

impl Contour {
    pub fn new(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidInput(format!("contour radius {radius} must be positive")));
        }
        Ok(Contour { center, radius })
    }

    /// Point at parameter `t`, one turn per unit `t`.
    pub fn point(&self, t: f64) -> Complex64 {
        self.center + Complex64::from_polar(self.radius, TAU * t)
    }

    pub fn guard_distance(&self) -> f64 {
        self.radius * GUARD_RELATIVE + GUARD_ABSOLUTE
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindingOptions {
    pub init_samples: usize,
    pub max_depth: u32,
}

impl Default for WindingOptions {
    fn default() -> Self {
        WindingOptions {
            init_samples: INIT_SAMPLES,
            max_depth: MAX_DEPTH,
        }
    }
}

/// Winding number of `f` around `c`, guarded against the poles of `f`.
pub fn winding_number(f: &LensField, c: &Contour, opts: WindingOptions) -> Result<i64> {
    winding_avoiding(f, c, opts, &[])
}

/// As [`winding_number`], additionally guarded against the points in `avoid`.
fn winding_avoiding(f: &LensField, c: &Contour, opts: WindingOptions, avoid: &[Complex64]) -> Result<i64> {
    let guard = c.guard_distance();
    let sample = |t: f64| -> Result<Complex64> {
        let z = c.point(t);
        if f.poles().iter().chain(avoid).any(|&p| (p - z).norm() <= guard) {
            return Err(Error::GuardViolation { sample: z });
        }
        match f.eval(z) {
            Ok(v) if v.norm() > 0.0 && v.re.is_finite() && v.im.is_finite() => Ok(v),
            Ok(_) | Err(Error::AtPole(_)) => Err(Error::GuardViolation { sample: z }),
            Err(e) => Err(e),
        }
    };

    let n = opts.init_samples.max(3);
    let first = sample(0.0)?;
    let (mut t0, mut f0) = (0.0, first);
    let mut total = 0.0;
    for i in 1..=n {
        let t1 = i as f64 / n as f64;
        let f1 = if i == n { first } else { sample(t1)? };
        total += arc_phase(&sample, (t0, f0), (t1, f1), opts.max_depth, c)?;
        (t0, f0) = (t1, f1);
    }

    let w = total / TAU;
    let rounded = w.round();
    if (w - rounded).abs() >= INTEGER_SLACK {
        return Err(Error::PhaseAmbiguity {
            center: c.center,
            radius: c.radius,
        });
    }
    Ok(rounded as i64)
}

/// Phase change of `f` along the arc `[a.0, b.0]`, bisecting every step whose
/// jump is not below `pi/2`.
fn arc_phase(
    sample: &dyn Fn(f64) -> Result<Complex64>,
    a: (f64, Complex64),
    b: (f64, Complex64),
    depth_left: u32,
    c: &Contour,
) -> Result<f64> {
    let jump = (b.1 / a.1).arg();
    if jump.abs() < FRAC_PI_2 {
        return Ok(jump);
    }
    if depth_left == 0 {
        return Err(Error::PhaseAmbiguity {
            center: c.center,
            radius: c.radius,
        });
    }
    let tm = 0.5 * (a.0 + b.0);
    let mid = (tm, sample(tm)?);
    Ok(arc_phase(sample, a, mid, depth_left - 1, c)? + arc_phase(sample, mid, b, depth_left - 1, c)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub big_circle_winding: i64,
    pub per_zero_windings: Vec<i64>,
    pub per_pole_windings: Vec<i64>,
    pub balanced: bool,
    pub claimed_counts: (usize, usize),
    /// Radius of the enclosing circle that was used.
    pub radius: f64,
}

/// Winding of the enclosing circle implied by the asymptotics of `f`.
pub fn expected_big_winding(f: &LensField) -> i64 {
    if f.is_poly() {
        f.degree() as i64
    } else {
        -1
    }
}

/// Whether the circle `|z| = r` lies where the asymptotic term of `f` dominates.
fn dominated(f: &LensField, r: f64) -> bool {
    match f {
        LensField::Poly(p) => {
            let n = p.degree();
            let lead = p.leading().norm() * r.powi(n as i32);
            let rest: f64 = p.coeffs()[..n]
                .iter()
                .enumerate()
                .map(|(k, a)| a.norm() * r.powi(k as i32))
                .sum::<f64>()
                + r;
            lead > rest
        }
        LensField::Rational(_) => (0..DOMINANCE_SAMPLES).all(|i| {
            let z = Complex64::from_polar(r, TAU * i as f64 / DOMINANCE_SAMPLES as f64);
            f.holomorphic(z).is_ok_and(|h| h.norm() < 0.5 * r)
        }),
    }
}

/// Radius of the enclosing circle: at least `2 + 2 max|zero or pole|` and
/// `requested`, doubled until the asymptotic term dominates.
pub fn enclosing_radius(f: &LensField, zeros: &[Complex64], requested: Option<f64>) -> Result<f64> {
    let reach = zeros.iter().chain(f.poles()).map(|z| z.norm()).fold(0.0, f64::max);
    let mut r = (2.0 + 2.0 * reach).max(requested.unwrap_or(0.0));
    for _ in 0..MAX_DOUBLINGS {
        if dominated(f, r) {
            return Ok(r);
        }
        r *= 2.0;
    }
    Err(Error::NonConvergence(format!(
        "no dominating circle found up to radius {r:.3e}"
    )))
}

/// Radius of the isolating circle around `points[i]`.
fn isolation_radius(points: &[Complex64], i: usize, cap: f64) -> f64 {
    let nearest = points
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, p)| (p - points[i]).norm())
        .fold(f64::INFINITY, f64::min);
    cap.min(0.5 * nearest)
}

/// Pairwise disjoint disks around the reported zeros, in report order: each
/// has half the distance to the nearest other zero or pole as radius.
pub fn zero_isolation_disks(f: &LensField, report: &SolveReport) -> Vec<Contour> {
    let zeros = report.locations();
    let points: Vec<Complex64> = zeros.iter().chain(f.poles()).copied().collect();
    (0..zeros.len())
        .map(|i| Contour {
            center: zeros[i],
            radius: isolation_radius(&points, i, f64::INFINITY),
        })
        .collect()
}

/// [`certify_with`] using the default execution strategy.
pub fn certify(f: &LensField, report: &SolveReport, radius: Option<f64>) -> Result<Certificate> {
    certify_with(f, report, radius, Execution::default())
}

/// Certifies `report` by winding numbers.
///
/// Fails with `NonSimple` when the report is flagged non-simple and with
/// `CountMismatch` when any of the checks fails: per-zero windings match the
/// orientations, each pole winds `-order` times, the windings balance, and the
/// enclosing winding has its asymptotic value.
pub fn certify_with(f: &LensField, report: &SolveReport, radius: Option<f64>, exec: Execution) -> Result<Certificate> {
    if !report.simple {
        return Err(Error::NonSimple("report contains singular or ambiguous zeros".into()));
    }
    let zeros = report.locations();
    let poles = f.poles();
    let points: Vec<Complex64> = zeros.iter().chain(poles).copied().collect();
    let big_r = enclosing_radius(f, &zeros, radius)?;
    let cap = SMALL_RADIUS_FACTOR * f.natural_scale();

    let mut contours: Vec<Contour> = Vec::with_capacity(points.len() + 1);
    contours.push(Contour::new(Complex64::new(0.0, 0.0), big_r)?);
    for i in 0..points.len() {
        contours.push(Contour::new(points[i], isolation_radius(&points, i, cap))?);
    }
    let opts = WindingOptions::default();
    let windings: Vec<Result<i64>> = exec.map_slice(&contours, |c| winding_avoiding(f, c, opts, &points));
    let windings = windings.into_iter().collect::<Result<Vec<i64>>>()?;

    let big = windings[0];
    let per_zero = windings[1..=zeros.len()].to_vec();
    let per_pole = windings[zeros.len() + 1..].to_vec();
    let balanced = big == per_zero.iter().sum::<i64>() + per_pole.iter().sum::<i64>();
    let certificate = Certificate {
        big_circle_winding: big,
        per_zero_windings: per_zero,
        per_pole_windings: per_pole,
        balanced,
        claimed_counts: (report.k_plus, report.k_minus),
        radius: big_r,
    };

    let mut failures = Vec::new();
    for (s, &w) in report.solutions.iter().zip(&certificate.per_zero_windings) {
        if s.orientation.order() != Some(w) {
            failures.push(format!(
                "zero {} has winding {w} but orientation {:?}",
                s.location, s.orientation
            ));
        }
    }
    for ((p, &order), &w) in poles.iter().zip(f.pole_orders()).zip(&certificate.per_pole_windings) {
        if w != -(order as i64) {
            failures.push(format!("pole {p} of order {order} has winding {w}"));
        }
    }
    if !balanced {
        let small: i64 =
            certificate.per_zero_windings.iter().sum::<i64>() + certificate.per_pole_windings.iter().sum::<i64>();
        failures.push(format!(
            "enclosing winding {big} differs from the small-circle sum {small}"
        ));
    }
    let expected = expected_big_winding(f);
    if big != expected {
        failures.push(format!("enclosing winding {big}, expected {expected}"));
    }
    if failures.is_empty() {
        Ok(certificate)
    } else {
        Err(Error::CountMismatch(failures.join("; ")))
    }
}

/// Solves and certifies in one step.
pub fn certified_solve(f: &LensField, opts: &SolveOptions) -> Result<(SolveReport, Certificate)> {
    let report = solve(f, opts)?;
    let certificate = certify(f, &report, None)?;
    Ok((report, certificate))
}

/// The image-count range `(lo, hi)` for degree `n`: polynomial `n..=3n-2`,
/// rational `n-1..=5n-5`, physical `n+1..=5n-5`. Counts step by 2 from `lo`.
pub fn theorem_bounds(kind: FieldKind, n: usize) -> Option<(usize, usize)> {
    if n < 2 {
        return None;
    }
    Some(match kind {
        FieldKind::Poly => (n, 3 * n - 2),
        FieldKind::Rational => (n - 1, 5 * n - 5),
        FieldKind::Physical => (n + 1, 5 * n - 5),
    })
}

/// Membership of `k` in the image-count progression of [`theorem_bounds`].
pub fn check_theorem_bounds(kind: FieldKind, n: usize, k: usize) -> bool {
    theorem_bounds(kind, n).is_some_and(|(lo, hi)| (lo..=hi).contains(&k) && (k - lo).is_multiple_of(2))
}
