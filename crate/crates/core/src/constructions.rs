//! Generators for lenses with prescribed image counts.
//!
//! Every generator validates its output by solving and certifying; small
//! parameters that the underlying arguments only need to be "small enough"
//! are taken from fixed ladders, and the first value that certifies wins.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::certify::{certified_solve, zero_isolation_disks, Certificate};
use crate::error::{Error, Result};
use crate::lens::{LensField, Mass, MassConfig, Orientation};
use crate::poly::Polynomial;
use crate::solver::{SolveOptions, SolveReport};

/// Candidate values for a small mass or perturbation, largest first.
pub const EPSILON_LADDER: [f64; 7] = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5];
/// Candidate values of `C = A c` for an even number of circle masses.
pub const EVEN_C_LADDER: [f64; 5] = [1.01, 1.02, 1.05, 1.1, 1.2];
/// Multiples of the tangency value `C*` tried for an odd number of circle masses.
pub const ODD_C_FACTORS: [f64; 3] = [0.99, 1.0, 1.01];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "lowercase")]
pub enum Configuration {
    Masses(MassConfig),
    Poly(Polynomial),
}

impl Configuration {
    pub fn field(&self) -> Result<LensField> {
        match self {
            Configuration::Masses(cfg) => LensField::from_masses(cfg),
            Configuration::Poly(p) => LensField::poly(p.clone()),
        }
    }

    pub fn masses(&self) -> Option<&MassConfig> {
        match self {
            Configuration::Masses(cfg) => Some(cfg),
            Configuration::Poly(_) => None,
        }
    }
}

/// Parameters a construction settled on; unset entries do not apply.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Complex64>,
    /// `a^n`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "A")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    /// `A c`
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "C")]
    pub amplitude_c: Option<f64>,
    /// Outward shift applied to a degenerate base configuration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub displacement: Option<f64>,
    /// Coefficients added along a polynomial chain, one per step.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub chain: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionResult {
    pub config: Configuration,
    pub expected_k: usize,
    pub params_used: ConstructionParams,
    pub validated: bool,
    pub report: SolveReport,
    pub certificate: Certificate,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Solves and certifies `config`, requiring exactly `expected_k` simple zeros.
fn validate(config: &Configuration, expected_k: usize) -> std::result::Result<(SolveReport, Certificate), String> {
    let field = config.field().map_err(|e| e.to_string())?;
    let (report, certificate) = certified_solve(&field, &SolveOptions::default()).map_err(|e| e.to_string())?;
    if report.k() != expected_k {
        return Err(format!("certified {} images, expected {expected_k}", report.k()));
    }
    Ok((report, certificate))
}

fn finish(
    config: Configuration,
    expected_k: usize,
    params_used: ConstructionParams,
    (report, certificate): (SolveReport, Certificate),
) -> ConstructionResult {
    ConstructionResult {
        config,
        expected_k,
        params_used,
        validated: true,
        report,
        certificate,
    }
}

fn validation_failed(reason: impl Into<String>, trace: Vec<String>) -> Error {
    Error::ValidationFailed {
        reason: reason.into(),
        trace,
    }
}

/// Radius of the equal-mass circle lens with `3n + 1` images.
pub fn default_circle_radius(n: usize) -> f64 {
    let m = n as f64;
    (m - 1.0).powf(-1.0 / m) * ((m - 1.0) / m).sqrt()
}

fn circle_masses(n: usize, a: f64) -> Vec<Mass> {
    (0..n)
        .map(|j| Mass::new(Complex64::from_polar(a, TAU * j as f64 / n as f64), 1.0 / n as f64))
        .collect()
}

fn require_at_least_two(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 masses, got {n}")));
    }
    Ok(())
}

/// `n` masses `1/n` equally spaced on the circle of radius `a`.
pub fn circle_config(n: usize, a: Option<f64>) -> Result<ConstructionResult> {
    require_at_least_two(n)?;
    let a = a.unwrap_or_else(|| default_circle_radius(n));
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidInput(format!("circle radius {a} must be positive")));
    }
    let expected_k = if n == 2 { 5 } else { 3 * n + 1 };
    let config = Configuration::Masses(MassConfig::new(circle_masses(n, a))?);
    let params = ConstructionParams {
        a: Some(a),
        c: Some(a.powi(n as i32)),
        ..Default::default()
    };
    match validate(&config, expected_k) {
        Ok(v) => Ok(finish(config, expected_k, params, v)),
        Err(msg) => Err(validation_failed(
            format!("circle lens with n = {n}, a = {a}"),
            vec![msg],
        )),
    }
}

/// `m` masses with `5m - 5` images: the circle lens for `m <= 3`, otherwise
/// `m - 1` circle masses plus a small mass at the center.
pub fn rhie_config(m: usize, eps: Option<f64>) -> Result<ConstructionResult> {
    require_at_least_two(m)?;
    let expected_k = 5 * m - 5;
    if m <= 3 {
        return circle_config(m, None);
    }
    let n = m - 1;
    let a = default_circle_radius(n);
    let ladder: Vec<f64> = eps.map_or_else(|| EPSILON_LADDER.to_vec(), |e| vec![e]);
    let mut trace = Vec::new();
    for eps in ladder {
        let mut masses = circle_masses(n, a);
        masses.push(Mass::new(c(0.0, 0.0), eps));
        let config = Configuration::Masses(MassConfig::new(masses)?);
        match validate(&config, expected_k) {
            Ok(v) => {
                let params = ConstructionParams {
                    a: Some(a),
                    c: Some(a.powi(n as i32)),
                    epsilon: Some(eps),
                    ..Default::default()
                };
                return Ok(finish(config, expected_k, params, v));
            }
            Err(msg) => trace.push(format!("eps = {eps:e}: {msg}")),
        }
    }
    Err(validation_failed(
        format!("no central mass certifies {expected_k} images for m = {m}"),
        trace,
    ))
}

/// The amplitude `C*` at which `sin(n t) = C cos(t)` first acquires a
/// tangency, for odd `n`: the smallest `|sin(n t) / cos(t)|` over critical
/// points, which are the roots of `n cos(n t) cos(t) + sin(n t) sin(t)`.
/// Returns `C*` and the tangency angle.
pub fn odd_tangency_amplitude(n: usize) -> (f64, f64) {
    let nf = n as f64;
    let g = |t: f64| nf * (nf * t).cos() * t.cos() + (nf * t).sin() * t.sin();
    let h = |t: f64| (nf * t).sin() / t.cos();
    let samples = 64 * n;
    let (lo, hi) = (-FRAC_PI_2, FRAC_PI_2);
    let mut best = (f64::INFINITY, 0.0);
    for i in 0..samples {
        let mut a = lo + (hi - lo) * i as f64 / samples as f64;
        let mut b = lo + (hi - lo) * (i + 1) as f64 / samples as f64;
        if i == 0 {
            a += 1e-9;
        }
        if i + 1 == samples {
            b -= 1e-9;
        }
        let (ga, gb) = (g(a), g(b));
        if ga.signum() == gb.signum() {
            continue;
        }
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            if g(m).signum() == ga.signum() {
                a = m;
            } else {
                b = m;
            }
        }
        let t = 0.5 * (a + b);
        let v = h(t).abs();
        if v < best.0 {
            best = (v, t);
        }
    }
    best
}

/// `m` masses with `5m - 7` images.
///
/// `m = 2`: masses `1/2` at `+-1` pushed outward by the smallest certified
/// displacement (the unperturbed pair has a zero with vanishing Jacobian at the
/// origin). `m = 3`: unit masses at `1/2` and `-1/2 +- i sqrt(3)/2`.
/// `m >= 4`: `m - 1` circle masses and a small mass `eps` at
/// `b = A eps^((m-2)/2) e^(i phi)`.
pub fn perturbed_rhie_config(m: usize) -> Result<ConstructionResult> {
    require_at_least_two(m)?;
    let expected_k = 5 * m - 7;
    let mut trace = Vec::new();
    match m {
        2 => {
            let displacements = std::iter::once(0.0).chain(EPSILON_LADDER.iter().rev().copied());
            for d in displacements {
                let x = 1.0 + d;
                let config = Configuration::Masses(MassConfig::new(vec![
                    Mass::new(c(x, 0.0), 0.5),
                    Mass::new(c(-x, 0.0), 0.5),
                ])?);
                match validate(&config, expected_k) {
                    Ok(v) => {
                        let params = ConstructionParams {
                            displacement: Some(d),
                            ..Default::default()
                        };
                        return Ok(finish(config, expected_k, params, v));
                    }
                    Err(msg) => trace.push(format!("displacement = {d:e}: {msg}")),
                }
            }
        }
        3 => {
            let h = 3f64.sqrt() / 2.0;
            let config = Configuration::Masses(MassConfig::new(vec![
                Mass::new(c(0.5, 0.0), 1.0),
                Mass::new(c(-0.5, h), 1.0),
                Mass::new(c(-0.5, -h), 1.0),
            ])?);
            match validate(&config, expected_k) {
                Ok(v) => return Ok(finish(config, expected_k, ConstructionParams::default(), v)),
                Err(msg) => trace.push(msg),
            }
        }
        _ => {
            let n = m - 1;
            let a = default_circle_radius(n);
            let cn = a.powi(n as i32);
            let (phi, amplitudes): (f64, Vec<f64>) = if n.is_multiple_of(2) {
                (FRAC_PI_2 + PI / (2.0 * n as f64), EVEN_C_LADDER.to_vec())
            } else {
                let (c_star, _) = odd_tangency_amplitude(n);
                (FRAC_PI_2, ODD_C_FACTORS.iter().map(|f| f * c_star).collect())
            };
            for &eps in &EPSILON_LADDER {
                for &big_c in &amplitudes {
                    let amplitude = big_c / cn;
                    let b = Complex64::from_polar(amplitude * eps.powf((n as f64 - 1.0) / 2.0), phi);
                    let mut masses = circle_masses(n, a);
                    masses.push(Mass::new(b, eps));
                    let config = Configuration::Masses(MassConfig::new(masses)?);
                    match validate(&config, expected_k) {
                        Ok(v) => {
                            let params = ConstructionParams {
                                a: Some(a),
                                epsilon: Some(eps),
                                b: Some(b),
                                c: Some(cn),
                                amplitude: Some(amplitude),
                                phi: Some(phi),
                                amplitude_c: Some(big_c),
                                ..Default::default()
                            };
                            return Ok(finish(config, expected_k, params, v));
                        }
                        Err(msg) => trace.push(format!("eps = {eps:e}, C = {big_c:.6}: {msg}")),
                    }
                }
            }
        }
    }
    Err(validation_failed(
        format!("no perturbation certifies {expected_k} images for m = {m}"),
        trace,
    ))
}

/// Index pairs `(old, new)` matching every old zero to the unique new zero in
/// its disk, or `None` if some disk does not hold exactly one new zero.
fn match_in_disks(disks: &[crate::certify::Contour], new: &[Complex64]) -> Option<Vec<(usize, usize)>> {
    let mut pairs = Vec::with_capacity(disks.len());
    for (i, d) in disks.iter().enumerate() {
        let inside: Vec<usize> = (0..new.len())
            .filter(|&j| (new[j] - d.center).norm() < d.radius)
            .collect();
        if inside.len() != 1 {
            return None;
        }
        pairs.push((i, inside[0]));
    }
    Some(pairs)
}

/// Checks one induction step: one more image, all of them where expected.
fn check_step(
    old: &SolveReport,
    disks: &[crate::certify::Contour],
    new: &SolveReport,
) -> std::result::Result<(), String> {
    if new.k() != old.k() + 1 {
        return Err(format!("{} images, expected {}", new.k(), old.k() + 1));
    }
    if new.k_minus != old.k_minus {
        return Err(format!("k_minus changed from {} to {}", old.k_minus, new.k_minus));
    }
    let locations = new.locations();
    let pairs = match_in_disks(disks, &locations).ok_or("an old image left its isolation disk")?;
    for &(i, j) in &pairs {
        if old.solutions[i].orientation != new.solutions[j].orientation {
            return Err(format!("image near {} changed orientation", old.solutions[i].location));
        }
    }
    let fresh: Vec<&Complex64> = locations
        .iter()
        .filter(|z| disks.iter().all(|d| (*z - d.center).norm() >= d.radius))
        .collect();
    if fresh.len() != 1 {
        return Err(format!("{} images outside the old isolation disks", fresh.len()));
    }
    let fresh_orientation = new
        .solutions
        .iter()
        .find(|s| s.location == *fresh[0])
        .map(|s| s.orientation);
    if fresh_orientation != Some(Orientation::SensePreserving) {
        return Err("new image is not sense-preserving".into());
    }
    Ok(())
}

/// Adds a small mass at `z_tilde`, which must raise the certified image count
/// by exactly one without moving any old image out of its isolation disk.
pub fn add_mass(cfg: &MassConfig, z_tilde: Complex64, eps: Option<f64>) -> Result<ConstructionResult> {
    let old_field = LensField::from_masses(cfg)?;
    let (old, _) = certified_solve(&old_field, &SolveOptions::default())?;
    if cfg
        .positions()
        .any(|p| (p - z_tilde).norm() <= crate::lens::MIN_SEPARATION)
    {
        return Err(Error::InvalidInput(format!("{z_tilde} coincides with a mass")));
    }
    if old
        .solutions
        .iter()
        .any(|s| (s.location - z_tilde).norm() <= SolveOptions::default().dedupe_radius)
    {
        return Err(Error::InvalidInput(format!("{z_tilde} coincides with an image")));
    }
    // isolation disks that also keep clear of the new mass
    let mut disks = zero_isolation_disks(&old_field, &old);
    for d in &mut disks {
        d.radius = d.radius.min(0.5 * (d.center - z_tilde).norm());
    }

    let expected_k = old.k() + 1;
    let ladder: Vec<f64> = eps.map_or_else(|| EPSILON_LADDER.to_vec(), |e| vec![e]);
    let mut trace = Vec::new();
    for eps in ladder {
        let config = Configuration::Masses(cfg.with_mass(Mass::new(z_tilde, eps))?);
        let outcome = validate(&config, expected_k).and_then(|v| check_step(&old, &disks, &v.0).map(|_| v));
        match outcome {
            Ok(v) => {
                let params = ConstructionParams {
                    epsilon: Some(eps),
                    ..Default::default()
                };
                return Ok(finish(config, expected_k, params, v));
            }
            Err(msg) => trace.push(format!("eps = {eps:e}: {msg}")),
        }
    }
    Err(validation_failed(
        format!("no mass at {z_tilde} adds exactly one image"),
        trace,
    ))
}

/// A certified polynomial of degree `n` with `k` solutions of `p(z) = conj(z)`.
///
/// Starts from `z^2 + 1` (2 solutions) or `z^2` (4 solutions) and raises the
/// degree by adding `eps z^(m+1)`, each step adding exactly one solution, so
/// only `k = n` and `k = n + 2` are reachable.
pub fn poly_example(n: usize, k: usize) -> Result<ConstructionResult> {
    require_at_least_two(n)?;
    if !crate::certify::check_theorem_bounds(crate::lens::FieldKind::Poly, n, k) {
        return Err(Error::InvalidInput(format!(
            "no polynomial of degree {n} has {k} solutions"
        )));
    }
    let base = match k.checked_sub(n - 2) {
        Some(2) => Polynomial::from_real(&[1.0, 0.0, 1.0]),
        Some(4) => Polynomial::from_real(&[0.0, 0.0, 1.0]),
        _ => {
            return Err(Error::Unsupported(format!(
                "degree {n} with {k} solutions is not reachable from z^2 + 1 or z^2"
            )))
        }
    };
    let base_k = k + 2 - n;
    let mut p = base;
    let mut config = Configuration::Poly(p.clone());
    let mut validated =
        validate(&config, base_k).map_err(|msg| validation_failed("polynomial base case", vec![msg]))?;
    let mut chain = Vec::new();
    for degree in 3..=n {
        let field = LensField::poly(p.clone())?;
        let disks = zero_isolation_disks(&field, &validated.0);
        let mut trace = Vec::new();
        let mut next = None;
        for &eps in &EPSILON_LADDER {
            let candidate = p.add(&Polynomial::monomial(c(eps, 0.0), degree));
            let cfg = Configuration::Poly(candidate.clone());
            let outcome =
                validate(&cfg, validated.0.k() + 1).and_then(|v| check_step(&validated.0, &disks, &v.0).map(|_| v));
            match outcome {
                Ok(v) => {
                    next = Some((candidate, cfg, v, eps));
                    break;
                }
                Err(msg) => trace.push(format!("degree {degree}, eps = {eps:e}: {msg}")),
            }
        }
        let (candidate, cfg, v, eps) = next.ok_or_else(|| validation_failed("polynomial chain step", trace))?;
        p = candidate;
        config = cfg;
        validated = v;
        chain.push(eps);
    }
    let params = ConstructionParams {
        chain,
        ..Default::default()
    };
    Ok(finish(config, k, params, validated))
}

/// `n` masses in the disk of radius `box_radius`, pairwise at least
/// `box_radius / (4n)` apart, with masses log-uniform in `[0.1, 10]`.
pub fn random_config(n: usize, seed: u64, box_radius: f64) -> Result<MassConfig> {
    require_at_least_two(n)?;
    if !(box_radius > 0.0 && box_radius.is_finite()) {
        return Err(Error::InvalidInput(format!("box radius {box_radius} must be positive")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let min_sep = box_radius / (4.0 * n as f64);
    let mut masses: Vec<Mass> = Vec::with_capacity(n);
    while masses.len() < n {
        let r = box_radius * rng.gen::<f64>().sqrt();
        let z = Complex64::from_polar(r, TAU * rng.gen::<f64>());
        if masses.iter().any(|m| (m.position - z).norm() < min_sep) {
            continue;
        }
        let sigma = (rng.gen_range(0.1f64.ln()..10f64.ln())).exp();
        masses.push(Mass::new(z, sigma));
    }
    MassConfig::new(masses)
}

/// Degree-`n` polynomial with coefficients uniform in the unit square and a
/// leading coefficient of modulus at least 1/2.
pub fn random_polynomial(n: usize, seed: u64) -> Result<Polynomial> {
    require_at_least_two(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs: Vec<Complex64> = (0..n)
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let lead = Complex64::from_polar(rng.gen_range(0.5..1.0), TAU * rng.gen::<f64>());
    coeffs.push(lead);
    Ok(Polynomial::new(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_radius_closed_form() {
        assert!((default_circle_radius(2) - 0.5f64.sqrt()).abs() < 1e-15);
        let a3 = default_circle_radius(3);
        assert!((a3 - 2f64.powf(-1.0 / 3.0) * (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn circle_counts() {
        assert_eq!(circle_config(2, None).unwrap().report.k(), 5);
        assert_eq!(circle_config(3, None).unwrap().report.k(), 10);
        assert_eq!(circle_config(5, None).unwrap().report.k(), 16);
        assert!(circle_config(1, None).is_err());
    }

    #[test]
    fn circle_pair_is_z_over_z_squared_minus_half() {
        let res = circle_config(2, None).unwrap();
        let cfg = res.config.masses().unwrap();
        let r = crate::lens::RationalLens::from_masses(cfg).unwrap();
        for z in [c(0.3, 0.2), c(-1.1, 0.7)] {
            let want = z / (z * z - 0.5);
            assert!((r.eval(z).unwrap() - want).norm() < 1e-14);
        }
    }

    #[test]
    fn rhie_counts() {
        let r4 = rhie_config(4, None).unwrap();
        assert_eq!(r4.report.k(), 15);
        assert_eq!((r4.report.k_plus, r4.report.k_minus), (9, 6));
        assert_eq!(r4.certificate.per_pole_windings, vec![-1; 4]);
        assert_eq!(rhie_config(2, None).unwrap().report.k(), 5);
    }

    #[test]
    fn perturbed_base_cases() {
        let p2 = perturbed_rhie_config(2).unwrap();
        assert_eq!(p2.report.k(), 3);
        assert!(p2.params_used.displacement.unwrap() > 0.0);
        let p3 = perturbed_rhie_config(3).unwrap();
        assert_eq!(p3.report.k(), 8);
        assert_eq!(p3.params_used.displacement, None);
    }

    #[test]
    fn odd_tangency_satisfies_squared_identity() {
        for n in [3usize, 5, 7] {
            let (cs, t) = odd_tangency_amplitude(n);
            let nf = n as f64;
            // sin(n t) = C cos(t) and n cos(n t) = -C sin(t)
            assert!(((nf * t).sin() - cs * t.cos()).abs() < 1e-9 || ((nf * t).sin() + cs * t.cos()).abs() < 1e-9);
            let lhs = nf * nf;
            let rhs = cs * cs + cs * cs * (nf * nf - 1.0) * t.cos().powi(2);
            assert!((lhs - rhs).abs() < 1e-8 * lhs, "n = {n}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn add_mass_examples() {
        let base = perturbed_rhie_config(2).unwrap();
        let cfg = base.config.masses().unwrap().clone();
        let one = add_mass(&cfg, c(3.0, 0.0), None).unwrap();
        assert_eq!(one.report.k(), 4);
        assert_eq!(one.report.k_minus, base.report.k_minus);

        let circle = circle_config(3, None).unwrap();
        let more = add_mass(circle.config.masses().unwrap(), c(0.0, 2.0), None).unwrap();
        assert_eq!(more.report.k(), 11);

        let two = add_mass(one.config.masses().unwrap(), c(-3.0, 1.0), None).unwrap();
        assert_eq!(two.report.k(), 5);
        assert_eq!(two.config.masses().unwrap().len(), 4);
        assert!(crate::certify::check_theorem_bounds(
            crate::lens::FieldKind::Physical,
            4,
            5
        ));
    }

    #[test]
    fn add_mass_rejects_bad_positions() {
        let cfg = perturbed_rhie_config(2).unwrap().config.masses().unwrap().clone();
        let on_mass = cfg.masses()[0].position;
        assert!(add_mass(&cfg, on_mass, None).is_err());
    }

    #[test]
    fn poly_examples() {
        let p22 = poly_example(2, 2).unwrap();
        assert_eq!(p22.config, Configuration::Poly(Polynomial::from_real(&[1.0, 0.0, 1.0])));
        let p24 = poly_example(2, 4).unwrap();
        assert_eq!(p24.config, Configuration::Poly(Polynomial::from_real(&[0.0, 0.0, 1.0])));
        let p35 = poly_example(3, 5).unwrap();
        assert_eq!(p35.report.k(), 5);
        assert_eq!(p35.params_used.chain.len(), 1);
        assert!(matches!(poly_example(3, 7), Err(Error::Unsupported(_))));
        assert!(matches!(poly_example(3, 4), Err(Error::InvalidInput(_))));
        let p44 = poly_example(4, 4).unwrap();
        assert_eq!(p44.report.orientation_sum(), 4);
    }

    #[test]
    fn random_config_is_deterministic_and_separated() {
        let a = random_config(2, 0, 1.0).unwrap();
        assert_eq!(a, random_config(2, 0, 1.0).unwrap());
        assert_ne!(a, random_config(2, 1, 1.0).unwrap());
        let cfg = random_config(6, 3, 2.0).unwrap();
        let pos: Vec<Complex64> = cfg.positions().collect();
        for i in 0..pos.len() {
            assert!(pos[i].norm() <= 2.0);
            for j in 0..i {
                assert!((pos[i] - pos[j]).norm() >= 2.0 / 24.0);
            }
        }
        assert!(cfg.masses().iter().all(|m| (0.1..=10.0).contains(&m.sigma)));
    }

    #[test]
    fn random_config_count_in_bounds() {
        let cfg = random_config(5, 7, 2.0).unwrap();
        let (report, _) = certified_solve(&LensField::from_masses(&cfg).unwrap(), &SolveOptions::default()).unwrap();
        assert!(crate::certify::check_theorem_bounds(
            crate::lens::FieldKind::Physical,
            5,
            report.k()
        ));
    }

    #[test]
    fn translation_with_comoving_source_keeps_count() {
        let cfg = random_config(3, 1, 1.0).unwrap();
        let shift = c(10.0, 10.0);
        let opts = SolveOptions::default();
        let (before, _) = certified_solve(&LensField::from_masses(&cfg).unwrap(), &opts).unwrap();
        let moved = crate::lens::RationalLens::from_masses_with_source(&cfg.translated(shift), shift).unwrap();
        let (after, _) = certified_solve(&LensField::rational(moved).unwrap(), &opts).unwrap();
        assert_eq!(before.k(), after.k());
        for (a, b) in before.solutions.iter().zip(&after.solutions) {
            assert!((a.location + shift - b.location).norm() < 1e-8);
        }
    }
}
