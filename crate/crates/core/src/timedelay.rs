//! Time-delay potential `T(z) = |z|^2/2 - sum_j sigma_j ln|z - z_j|`.
//!
//! `2 dT/dz = conj(z) - sum_j sigma_j/(z - z_j) = -f(z)`, so images are the
//! critical points of `T`, and the Hessian determinant is `1 - |r'(z)|^2`, the
//! negated lens Jacobian. Since the Laplacian of `T` is 2, sense-reversing
//! images are minima and sense-preserving images are saddles.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::certify::certified_solve;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::lens::{LensField, MassConfig, Orientation};
use crate::solver::SolveOptions;

/// Grid side of the Petters scan.
pub const PETTERS_GRID: usize = 300;
/// Mass exclusion radius of the Petters scan, relative to the natural scale.
const PETTERS_EXCLUSION: f64 = 1e-3;
const HESSIAN_AGREEMENT: f64 = 1e-8;

pub fn time_delay(cfg: &MassConfig, z: Complex64) -> Result<f64> {
    let mut t = 0.5 * z.norm_sqr();
    for m in cfg.masses() {
        let d = (z - m.position).norm();
        if d <= crate::lens::POLE_TOL {
            return Err(Error::AtMass(z));
        }
        t -= m.sigma * d.ln();
    }
    Ok(t)
}

/// `dT/dz = (T_x - i T_y) / 2`
pub fn grad_t(cfg: &MassConfig, z: Complex64) -> Result<Complex64> {
    Ok(0.5 * (z.conj() - cfg.deflection(z)?))
}

/// `d^2 T / dz^2 = sum_j sigma_j / (2 (z - z_j)^2)`
fn t_zz(cfg: &MassConfig, z: Complex64) -> Result<Complex64> {
    let mut sum = Complex64::new(0.0, 0.0);
    for m in cfg.masses() {
        let d = z - m.position;
        if d.norm() <= crate::lens::POLE_TOL {
            return Err(Error::AtMass(z));
        }
        sum += m.sigma / (2.0 * d * d);
    }
    Ok(sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MorseType {
    Minimum,
    Saddle,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub location: Complex64,
    pub morse_type: MorseType,
    pub hessian_det: f64,
}

/// Classifies `z` by the determinant of the real Hessian of `T`.
pub fn hessian_class(cfg: &MassConfig, z: Complex64, tol: f64) -> Result<CriticalPoint> {
    let tzz = t_zz(cfg, z)?;
    let t_xx = 1.0 + 2.0 * tzz.re;
    let t_yy = 1.0 - 2.0 * tzz.re;
    let t_xy = -2.0 * tzz.im;
    let hessian_det = t_xx * t_yy - t_xy * t_xy;

    let r_prime: Complex64 = cfg
        .masses()
        .iter()
        .map(|m| -m.sigma / ((z - m.position) * (z - m.position)))
        .sum();
    let jacobian = r_prime.norm_sqr() - 1.0;
    debug_assert!(
        (hessian_det + jacobian).abs() <= HESSIAN_AGREEMENT * (1.0 + jacobian.abs()),
        "Hessian {hessian_det} and Jacobian {jacobian} disagree at {z}"
    );

    let morse_type = if hessian_det > tol {
        MorseType::Minimum
    } else if hessian_det < -tol {
        MorseType::Saddle
    } else {
        MorseType::Degenerate
    };
    Ok(CriticalPoint {
        location: z,
        morse_type,
        hessian_det,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageDelay {
    pub critical: CriticalPoint,
    pub orientation: Orientation,
    pub time_delay: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PettersReport {
    pub n: usize,
    pub k: usize,
    pub k_plus: usize,
    pub k_minus: usize,
    pub images: Vec<ImageDelay>,
    pub minima: usize,
    pub saddles: usize,
    /// Index into `images` of the image with the smallest delay.
    pub min_image: usize,
    pub grid_min_location: Complex64,
    pub grid_min_value: f64,
    /// `k >= n + 1`
    pub count_ok: bool,
    pub has_reversing: bool,
    pub min_is_reversing: bool,
    /// No grid point of the region lies below the smallest image delay, and the
    /// image nearest to the grid minimum is sense-reversing.
    pub grid_agrees: bool,
    pub passed: bool,
}

/// Minimum of `T` over a `grid x grid` lattice of the disk `|z| <= radius`
/// with small disks around the masses removed.
pub fn grid_minimum(
    cfg: &MassConfig,
    radius: f64,
    exclusion: f64,
    grid: usize,
    exec: Execution,
) -> Option<(Complex64, f64)> {
    let h = 2.0 * radius / (grid.max(2) - 1) as f64;
    let values = exec.map_indexed(grid * grid, |idx| {
        let z = Complex64::new(-radius + h * (idx % grid) as f64, -radius + h * (idx / grid) as f64);
        if z.norm() > radius || cfg.positions().any(|p| (p - z).norm() < exclusion) {
            return None;
        }
        time_delay(cfg, z).ok().map(|t| (z, t))
    });
    // first minimum in index order, independent of scheduling
    values
        .into_iter()
        .flatten()
        .fold(None, |best: Option<(Complex64, f64)>, cur| match best {
            Some(b) if b.1 <= cur.1 => Some(b),
            _ => Some(cur),
        })
}

/// Checks the lower bound `k >= n + 1` and the minimum-of-`T` argument behind
/// it on a certified configuration.
pub fn petters_check(cfg: &MassConfig) -> Result<PettersReport> {
    petters_check_with(cfg, &SolveOptions::default(), PETTERS_GRID, Execution::default())
}

pub fn petters_check_with(
    cfg: &MassConfig,
    opts: &SolveOptions,
    grid: usize,
    exec: Execution,
) -> Result<PettersReport> {
    let field = LensField::from_masses(cfg)?;
    let (report, certificate) = certified_solve(&field, opts)?;
    let n = cfg.len();

    let mut images = Vec::with_capacity(report.k());
    for s in &report.solutions {
        images.push(ImageDelay {
            critical: hessian_class(cfg, s.location, opts.sing_tol)?,
            orientation: s.orientation,
            time_delay: time_delay(cfg, s.location)?,
        });
    }
    let min_image = (0..images.len())
        .min_by(|&a, &b| images[a].time_delay.total_cmp(&images[b].time_delay))
        .ok_or_else(|| Error::CountMismatch("no images".into()))?;
    let minima = images
        .iter()
        .filter(|i| i.critical.morse_type == MorseType::Minimum)
        .count();
    let saddles = images
        .iter()
        .filter(|i| i.critical.morse_type == MorseType::Saddle)
        .count();

    let count_ok = report.k() > n;
    let has_reversing = report.k_minus >= 1;
    let min_is_reversing = images[min_image].orientation == Orientation::SenseReversing;

    let exclusion = PETTERS_EXCLUSION * field.natural_scale();
    let (grid_min_location, grid_min_value) = grid_minimum(cfg, certificate.radius, exclusion, grid, exec)
        .ok_or_else(|| Error::InvalidInput("Petters grid is empty".into()))?;
    let slack = 1e-9 * (1.0 + images[min_image].time_delay.abs());
    let nearest = (0..images.len())
        .min_by(|&a, &b| {
            let da = (images[a].critical.location - grid_min_location).norm();
            let db = (images[b].critical.location - grid_min_location).norm();
            da.total_cmp(&db)
        })
        .expect("at least one image");
    let grid_agrees = grid_min_value >= images[min_image].time_delay - slack
        && images[nearest].orientation == Orientation::SenseReversing;

    if !(count_ok && has_reversing && min_is_reversing) {
        return Err(Error::CountMismatch(format!(
            "lower-bound argument fails on a certified configuration: k = {}, n = {n}, k_minus = {}, \
             minimal-delay image orientation {:?}",
            report.k(),
            report.k_minus,
            images[min_image].orientation
        )));
    }
    Ok(PettersReport {
        n,
        k: report.k(),
        k_plus: report.k_plus,
        k_minus: report.k_minus,
        images,
        minima,
        saddles,
        min_image,
        grid_min_location,
        grid_min_value,
        count_ok,
        has_reversing,
        min_is_reversing,
        grid_agrees,
        passed: count_ok && has_reversing && min_is_reversing && grid_agrees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lens::{Mass, DEFAULT_SING_TOL};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single() -> MassConfig {
        MassConfig::new(vec![Mass::new(c(0.0, 0.0), 1.0)]).unwrap()
    }

    fn pair(d: f64) -> MassConfig {
        MassConfig::new(vec![Mass::new(c(d, 0.0), 0.5), Mass::new(c(-d, 0.0), 0.5)]).unwrap()
    }

    #[test]
    fn delay_values() {
        assert!((time_delay(&single(), c(1.0, 0.0)).unwrap() - 0.5).abs() < 1e-15);
        let e = std::f64::consts::E;
        assert!((time_delay(&single(), c(e, 0.0)).unwrap() - (0.5 * e * e - 1.0)).abs() < 1e-14);
        let want = 2.0 - 5f64.ln() / 2.0;
        assert!((time_delay(&pair(1.0), c(0.0, 2.0)).unwrap() - want).abs() < 1e-14);
        assert!(matches!(time_delay(&single(), c(0.0, 0.0)), Err(Error::AtMass(_))));
    }

    #[test]
    fn gradient_values() {
        assert!((grad_t(&single(), c(2.0, 0.0)).unwrap() - c(0.75, 0.0)).norm() < 1e-15);
        let s = 2f64.sqrt();
        assert!(grad_t(&pair(1.0), c(s, 0.0)).unwrap().norm() < 1e-15);
    }

    #[test]
    fn hessian_examples() {
        // r'(z) = -(z^2 + 1)/(z^2 - 1)^2, so |r'(sqrt 2)| = 3
        let cp = hessian_class(&pair(1.0), c(2f64.sqrt(), 0.0), DEFAULT_SING_TOL).unwrap();
        assert!((cp.hessian_det + 8.0).abs() < 1e-12);
        assert_eq!(cp.morse_type, MorseType::Saddle);
        let origin = hessian_class(&pair(1.0), c(0.0, 0.0), DEFAULT_SING_TOL).unwrap();
        assert_eq!(origin.morse_type, MorseType::Degenerate);
        let far = hessian_class(&pair(1.0), c(50.0, 40.0), DEFAULT_SING_TOL).unwrap();
        assert!((far.hessian_det - 1.0).abs() < 1e-6);
        assert_eq!(far.morse_type, MorseType::Minimum);
    }

    #[test]
    fn petters_on_pair() {
        let rep = petters_check(&pair(1.01)).unwrap();
        assert_eq!(rep.k, 3);
        assert_eq!((rep.minima, rep.saddles), (1, 2));
        assert!(rep.passed && rep.count_ok && rep.min_is_reversing);
        assert!(rep.images[rep.min_image].critical.location.norm() < 1e-9);
    }

    #[test]
    fn grid_minimum_is_schedule_independent() {
        let cfg = pair(1.3);
        let a = grid_minimum(&cfg, 3.0, 1e-3, 101, Execution::Sequential);
        let b = grid_minimum(&cfg, 3.0, 1e-3, 101, Execution::Parallel);
        assert_eq!(a, b);
    }
}
