//! Enumeration of all zeros of `f(z) = h(z) - conj(z)`.
//!
//! `conj(z) = r(z)` implies `z = rbar(r(z))`, where `rbar` has conjugated
//! coefficients. Clearing denominators turns that into one polynomial `F`
//! whose roots contain every zero of `f` (plus spurious two-cycles of
//! `z -> conj(r(z))`). Candidates are polished by Newton on `f` itself and
//! filtered by residual.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::lens::{FieldKind, LensField, Orientation, DEFAULT_SING_TOL};
use crate::poly::{Polynomial, MAX_DEGREE};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_DEDUPE_RADIUS: f64 = 1e-6;
/// Aberth budget for the reduced polynomial. Its roots only seed the polish on
/// the field itself, so estimates that stall at a cluster of nearly multiple
/// roots are used as they are.
const REDUCED_MAX_SWEEPS: usize = 400;
/// Two distinct zeros closer than this multiple of the dedupe radius make the
/// report ambiguous.
const AMBIGUITY_FACTOR: f64 = 100.0;
const POLISH_MAX_ITER: usize = 60;
const POLISH_MAX_DRIFT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub tol: f64,
    pub sing_tol: f64,
    pub dedupe_radius: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: DEFAULT_TOL,
            sing_tol: DEFAULT_SING_TOL,
            dedupe_radius: DEFAULT_DEDUPE_RADIUS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LensSolution {
    pub location: Complex64,
    pub orientation: Orientation,
    pub jacobian: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub kind: FieldKind,
    pub solutions: Vec<LensSolution>,
    pub k_plus: usize,
    pub k_minus: usize,
    pub simple: bool,
    pub degree_n: usize,
}

impl SolveReport {
    pub fn k(&self) -> usize {
        self.solutions.len()
    }

    pub fn locations(&self) -> Vec<Complex64> {
        self.solutions.iter().map(|s| s.location).collect()
    }

    /// `k_plus - k_minus`
    pub fn orientation_sum(&self) -> i64 {
        self.k_plus as i64 - self.k_minus as i64
    }

    /// Rebuilds the counts from the solution list.
    pub fn recount(&mut self) {
        self.k_plus = self
            .solutions
            .iter()
            .filter(|s| s.orientation == Orientation::SensePreserving)
            .count();
        self.k_minus = self
            .solutions
            .iter()
            .filter(|s| s.orientation == Orientation::SenseReversing)
            .count();
    }
}

/// The polynomial `F` whose roots contain all zeros of `f`.
pub fn reduce_to_polynomial(f: &LensField) -> Result<Polynomial> {
    match f {
        LensField::Poly(p) => {
            let degree = p.degree() * p.degree();
            if degree > MAX_DEGREE {
                return Err(Error::DegreeOverflow {
                    degree,
                    cap: MAX_DEGREE,
                });
            }
            let z = Polynomial::monomial(Complex64::new(1.0, 0.0), 1);
            Ok(p.conj_coeffs().compose(p).sub(&z))
        }
        LensField::Rational(r) => {
            let n = r.degree();
            let degree = n * n + 1;
            if degree > MAX_DEGREE {
                return Err(Error::DegreeOverflow {
                    degree,
                    cap: MAX_DEGREE,
                });
            }
            let (p, q) = (r.numerator(), r.denominator());
            let p_pows: Vec<Polynomial> =
                std::iter::successors(Some(Polynomial::constant(1.0.into())), |acc| Some(acc.mul(p)))
                    .take(n + 1)
                    .collect();
            let q_pows: Vec<Polynomial> =
                std::iter::successors(Some(Polynomial::constant(1.0.into())), |acc| Some(acc.mul(q)))
                    .take(n + 1)
                    .collect();
            let coeff = |poly: &Polynomial, k: usize| poly.coeffs().get(k).copied().unwrap_or_default().conj();
            let mut big_p = Polynomial::zero();
            let mut big_q = Polynomial::zero();
            for k in 0..=n {
                let term = p_pows[k].mul(&q_pows[n - k]);
                big_p = big_p.add(&term.scale_by(coeff(p, k)));
                big_q = big_q.add(&term.scale_by(coeff(q, k)));
            }
            let z = Polynomial::monomial(Complex64::new(1.0, 0.0), 1);
            Ok(z.mul(&big_q).sub(&big_p))
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Give up once the iterate wanders farther than this from the start.
    pub max_drift: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            tol: DEFAULT_TOL,
            max_iter: POLISH_MAX_ITER,
            max_drift: POLISH_MAX_DRIFT,
        }
    }
}

/// Real 2-D Newton on `f = h - conj(z)`.
///
/// With the Wirtinger pair `f_z = h'`, `f_zbar = -1`, the linearization
/// `h' d - conj(d) = -f` solves to `d = -(conj(h') f + conj(f)) / (|h'|^2 - 1)`.
/// Steps are halved while they increase `|f|`. After the residual target is
/// met a few extra steps are taken while they keep reducing `|f|`.
pub fn newton_polish(f: &LensField, z0: Complex64, opts: NewtonOptions) -> Result<Complex64> {
    let mut z = z0;
    let mut fz = f.eval(z)?;
    let mut extra = 0;
    for _ in 0..opts.max_iter {
        let res = fz.norm();
        if res == 0.0 {
            return Ok(z);
        }
        if res <= opts.tol {
            extra += 1;
            if extra > 3 {
                return Ok(z);
            }
        }
        let a = f.holomorphic_derivative(z)?;
        let det = a.norm_sqr() - 1.0;
        if det.abs() < 1e-14 {
            return Err(Error::JacobianSingular(z));
        }
        let step = -(a.conj() * fz + fz.conj()) / det;
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let cand = z + step * t;
            if let Ok(fc) = f.eval(cand) {
                if fc.norm() < res {
                    accepted = Some((cand, fc));
                    break;
                }
            }
            t *= 0.5;
        }
        match accepted {
            Some((zn, fzn)) => {
                z = zn;
                fz = fzn;
            }
            None if res <= opts.tol => return Ok(z),
            None => return Err(Error::NonConvergence(format!("Newton stalled at {z}, |f| = {res:.3e}"))),
        }
        if (z - z0).norm() > opts.max_drift {
            return Err(Error::NonConvergence(format!("Newton drifted from {z0} to {z}")));
        }
    }
    if fz.norm() <= opts.tol {
        Ok(z)
    } else {
        Err(Error::NonConvergence(format!(
            "Newton budget exhausted at {z}, |f| = {:.3e}",
            fz.norm()
        )))
    }
}

fn cmp_complex(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Greedy clustering: keeps the first point of every cluster of radius
/// `radius`. Returns the survivors sorted by (re, im) and the smallest
/// distance between two survivors.
fn dedupe(mut points: Vec<Complex64>, radius: f64) -> (Vec<Complex64>, f64) {
    points.sort_by(cmp_complex);
    let mut kept: Vec<Complex64> = Vec::new();
    for z in points {
        if kept.iter().all(|k| (k - z).norm() > radius) {
            kept.push(z);
        }
    }
    kept.sort_by(cmp_complex);
    let mut min_gap = f64::INFINITY;
    for (i, a) in kept.iter().enumerate() {
        for b in &kept[i + 1..] {
            min_gap = min_gap.min((a - b).norm());
        }
    }
    (kept, min_gap)
}

/// Finds every zero of `f`, classifies it and counts orientations.
///
/// Tolerances are in units of the field's natural scale: the field is centered
/// at its pole centroid and scaled into a unit-sized box before solving.
pub fn solve(f: &LensField, opts: &SolveOptions) -> Result<SolveReport> {
    // w = (z - center) / s
    let center = f.pole_centroid();
    let centered = f.translated(center)?;
    let s = centered.natural_scale();
    let g = centered.rescaled(s)?;
    let reduced = reduce_to_polynomial(&g)?;
    let (candidates, _) = reduced.root_estimates(REDUCED_MAX_SWEEPS)?;

    let newton = NewtonOptions {
        tol: opts.tol,
        ..NewtonOptions::default()
    };
    let mut polished = Vec::new();
    for w in candidates {
        if g.poles().iter().any(|&p| (p - w).norm() <= opts.dedupe_radius) {
            continue;
        }
        if let Ok(z) = newton_polish(&g, w, newton) {
            if g.eval(z).is_ok_and(|v| v.norm() <= opts.tol) {
                polished.push(z);
            }
        }
    }
    let (zeros, min_gap) = dedupe(polished, opts.dedupe_radius);
    let mut simple = min_gap > AMBIGUITY_FACTOR * opts.dedupe_radius;

    let mut solutions = Vec::with_capacity(zeros.len());
    for w in zeros {
        // final polish in the original coordinates
        let z0 = center + w * s;
        let z = newton_polish(
            f,
            z0,
            NewtonOptions {
                tol: opts.tol * s.max(1.0),
                max_drift: opts.dedupe_radius * s,
                ..newton
            },
        )
        .unwrap_or(z0);
        let jacobian = f.jacobian(z)?;
        let orientation = Orientation::from_jacobian(jacobian, opts.sing_tol);
        if orientation == Orientation::Singular {
            simple = false;
        }
        solutions.push(LensSolution {
            location: z,
            orientation,
            jacobian,
            residual: f.eval(z)?.norm(),
        });
    }
    solutions.sort_by(|a, b| cmp_complex(&a.location, &b.location));

    let mut report = SolveReport {
        kind: if f.is_poly() {
            FieldKind::Poly
        } else {
            FieldKind::Rational
        },
        solutions,
        k_plus: 0,
        k_minus: 0,
        simple,
        degree_n: f.degree(),
    };
    report.recount();
    Ok(report)
}

/// Axis-aligned rectangle `[xmin, xmax] x [ymin, ymax]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Window {
    pub fn square(center: Complex64, half_width: f64) -> Self {
        Window {
            xmin: center.re - half_width,
            xmax: center.re + half_width,
            ymin: center.im - half_width,
            ymax: center.im + half_width,
        }
    }

    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.xmin && z.re <= self.xmax && z.im >= self.ymin && z.im <= self.ymax
    }
}

/// Rings of extra starts around each pole: radii shrink geometrically from the
/// lattice spacing, since images near a mass have basins far below it.
const POLE_RINGS: usize = 12;
const POLE_RING_POINTS: usize = 24;

/// Independent oracle: Newton from every node of a `grid_n x grid_n` lattice
/// over `window`, and from rings around every pole.
pub fn brute_force_solve(
    f: &LensField,
    window: Window,
    grid_n: usize,
    tol: f64,
    dedupe_radius: f64,
    exec: Execution,
) -> Vec<Complex64> {
    let opts = NewtonOptions {
        tol,
        max_iter: 200,
        max_drift: f64::INFINITY,
    };
    let step = |lo: f64, hi: f64, i: usize| {
        if grid_n == 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * i as f64 / (grid_n - 1) as f64
        }
    };
    let mut starts: Vec<Complex64> = (0..grid_n * grid_n)
        .map(|idx| {
            let (i, j) = (idx % grid_n, idx / grid_n);
            Complex64::new(step(window.xmin, window.xmax, i), step(window.ymin, window.ymax, j))
        })
        .collect();
    let spacing = window.width().max(window.height()) / grid_n.max(2) as f64;
    for &p in f.poles() {
        for k in 0..POLE_RINGS {
            let r = spacing * 0.5f64.powi(k as i32);
            for m in 0..POLE_RING_POINTS {
                let t = std::f64::consts::TAU * (m as f64 + 0.5 * (k % 2) as f64) / POLE_RING_POINTS as f64;
                starts.push(p + Complex64::from_polar(r, t));
            }
        }
    }
    let found: Vec<Option<Complex64>> = exec.map_slice(&starts, |&z0| newton_polish(f, z0, opts).ok());
    dedupe(found.into_iter().flatten().collect(), dedupe_radius).0
}
