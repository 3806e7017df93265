//! Dense complex polynomials in ascending coefficient order, with a
//! simultaneous (Aberth-Ehrlich) root finder.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest degree any constructed polynomial may have.
pub const MAX_DEGREE: usize = 2000;

/// Leading coefficients below this fraction of the largest coefficient are
/// treated as numerical dust and trimmed.
pub const TRIM_RELATIVE: f64 = 1e-14;

/// Default sweep budget for [`Polynomial::roots`].
pub const DEFAULT_MAX_SWEEPS: usize = 200;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Coefficients in ascending order; serializes as that list.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl From<Vec<Complex64>> for Polynomial {
    fn from(coeffs: Vec<Complex64>) -> Self {
        Polynomial::new(coeffs)
    }
}

impl From<Polynomial> for Vec<Complex64> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial{:?}", self.coeffs)
    }
}

impl Polynomial {
    /// Builds a polynomial from ascending coefficients, trimming negligible
    /// leading terms. An empty list is the zero polynomial.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        while coeffs.len() > 1 {
            let lead = coeffs.last().unwrap().norm();
            if lead == 0.0 || lead < TRIM_RELATIVE * scale {
                coeffs.pop();
            } else {
                break;
            }
        }
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        Polynomial { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: vec![ZERO] }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// `c * z^k`
    pub fn monomial(c: Complex64, k: usize) -> Self {
        let mut coeffs = vec![ZERO; k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// The monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        roots
            .iter()
            .fold(Self::constant(ONE), |acc, &r| acc.mul(&Polynomial::new(vec![-r, ONE])))
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        *self.coeffs.last().unwrap()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == ZERO
    }

    /// Largest coefficient modulus.
    pub fn scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = ZERO;
        let mut dp = ZERO;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// The coefficient-conjugate polynomial, so that
    /// `conj(p(conj(z))) == p.conj_coeffs()(z)`.
    pub fn conj_coeffs(&self) -> Self {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    pub fn scale_by(&self, c: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    /// `p(s * z)` for a complex factor `s`.
    pub fn rescale_argument(&self, s: Complex64) -> Self {
        let mut power = ONE;
        let mut out = Vec::with_capacity(self.coeffs.len());
        for &c in &self.coeffs {
            out.push(c * power);
            power *= s;
        }
        Self::new(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| self.coeffs.get(k).copied().unwrap_or(ZERO) + other.coeffs.get(k).copied().unwrap_or(ZERO))
            .collect();
        Self::new(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Polynomial {
            coeffs: self.coeffs.iter().map(|&c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::new(coeffs)
    }

    /// `self(other(z))`, by Horner's scheme on polynomials.
    pub fn compose(&self, other: &Self) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, &c| acc.mul(other).add(&Self::constant(c)))
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::constant(ONE), |acc, _| acc.mul(self))
    }

    /// All `degree()` roots, with multiplicity.
    ///
    /// `tol` is a backward-error target: each returned root `z` satisfies
    /// `|p(z)| <= tol * sum_k |a_k| |z|^k`.
    pub fn roots(&self, tol: f64) -> Result<Vec<Complex64>> {
        self.roots_with_budget(tol, DEFAULT_MAX_SWEEPS)
    }

    pub fn roots_with_budget(&self, tol: f64, max_sweeps: usize) -> Result<Vec<Complex64>> {
        let (roots, worst) = self.root_estimates(max_sweeps)?;
        if !(worst <= tol.max(backward_floor(self.degree()))) {
            let at = roots
                .iter()
                .copied()
                .max_by(|a, b| self.backward_error(*a).total_cmp(&self.backward_error(*b)))
                .unwrap_or(ZERO);
            return Err(Error::NonConvergence(format!(
                "Aberth iteration: backward error {worst:.3e} at {at} exceeds {tol:.1e}"
            )));
        }
        Ok(roots)
    }

    /// All `degree()` root approximations after at most `max_sweeps` Aberth
    /// sweeps, together with the largest relative backward error among them.
    /// Unlike [`Polynomial::roots`] this never fails on slow convergence, which
    /// occurs at clusters of nearly multiple roots.
    pub fn root_estimates(&self, max_sweeps: usize) -> Result<(Vec<Complex64>, f64)> {
        let n = self.degree();
        if n == 0 {
            return Err(Error::InvalidInput("root finding needs degree >= 1".to_string()));
        }
        // Exact zero roots are factored out so they never enter the iteration.
        let shift = self.coeffs.iter().take_while(|c| **c == ZERO).count();
        let mut roots = vec![ZERO; shift];
        let reduced = Polynomial {
            coeffs: self.coeffs[shift..].to_vec(),
        };
        match reduced.degree() {
            0 => {}
            1 => roots.push(-reduced.coeffs[0] / reduced.coeffs[1]),
            _ => roots.extend(reduced.aberth(max_sweeps)),
        }
        let worst = roots.iter().map(|&z| self.backward_error(z)).fold(0.0, f64::max);
        Ok((roots, worst))
    }

    /// `|p(z)| / sum_k |a_k| |z|^k`
    fn backward_error(&self, z: Complex64) -> f64 {
        let r = z.norm();
        let mag = self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm());
        if mag == 0.0 {
            0.0
        } else {
            self.eval(z).norm() / mag
        }
    }

    /// Iterates until every root reaches the working-precision floor or stops
    /// moving.
    fn aberth(&self, max_sweeps: usize) -> Vec<Complex64> {
        let n = self.degree();
        let abs_coeffs: Vec<f64> = self.coeffs.iter().map(|c| c.norm()).collect();
        let mut z = newton_polygon_guesses(&abs_coeffs);
        let floor = backward_floor(n);
        let mut done = vec![false; n];

        for _ in 0..max_sweeps {
            let mut all_done = true;
            for i in 0..n {
                if done[i] {
                    continue;
                }
                let (ratio, backward) = self.newton_ratio(z[i], &abs_coeffs);
                let repulsion: Complex64 = (0..n).filter(|&j| j != i).map(|j| ONE / (z[i] - z[j])).sum();
                let delta = ratio / (ONE - ratio * repulsion);
                if !delta.re.is_finite() || !delta.im.is_finite() {
                    // Collided with another iterate; nudge and retry next sweep.
                    let bump = Complex64::new(1e-8, 1e-8) * (1.0 + z[i].norm());
                    z[i] += bump;
                    all_done = false;
                    continue;
                }
                z[i] -= delta;
                if backward <= floor || delta.norm() <= f64::EPSILON * z[i].norm() {
                    done[i] = true;
                } else {
                    all_done = false;
                }
            }
            if all_done {
                break;
            }
        }

        z
    }

    /// Returns `p(z)/p'(z)` and the relative backward error of `z`.
    /// Outside the unit disk the reversed polynomial in `1/z` is used, which
    /// keeps large roots from overflowing.
    fn newton_ratio(&self, z: Complex64, abs_coeffs: &[f64]) -> (Complex64, f64) {
        let n = self.degree();
        if z.norm() <= 1.0 {
            let (p, dp) = self.eval_with_derivative(z);
            let mag = horner_abs(abs_coeffs.iter().rev(), z.norm());
            (p / dp, p.norm() / mag)
        } else {
            let w = z.inv();
            let mut r = ZERO;
            let mut dr = ZERO;
            for &c in &self.coeffs {
                dr = dr * w + r;
                r = r * w + c;
            }
            let mag = horner_abs(abs_coeffs.iter(), w.norm());
            let denom = r * n as f64 - w * dr;
            (z * r / denom, r.norm() / mag)
        }
    }
}

fn horner_abs<'a>(coeffs: impl Iterator<Item = &'a f64>, x: f64) -> f64 {
    coeffs.fold(0.0, |acc, &c| acc * x + c)
}

/// Relative backward error reachable in double precision for degree `n`.
fn backward_floor(n: usize) -> f64 {
    4.0 * f64::EPSILON * (n as f64 + 1.0)
}

/// Initial iterates from the upper convex hull of `(k, log|a_k|)`: each hull
/// edge contributes a circle of the radius it predicts, with as many points as
/// the edge spans.
fn newton_polygon_guesses(abs_coeffs: &[f64]) -> Vec<Complex64> {
    let n = abs_coeffs.len() - 1;
    let pts: Vec<(usize, f64)> = abs_coeffs
        .iter()
        .enumerate()
        .filter(|(_, &a)| a > 0.0)
        .map(|(k, &a)| (k, a.ln()))
        .collect();

    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (k1, y1) = hull[hull.len() - 2];
            let (k2, y2) = hull[hull.len() - 1];
            let cross = (k2 as f64 - k1 as f64) * (p.1 - y1) - (y2 - y1) * (p.0 as f64 - k1 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }

    let mut guesses = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let (k0, y0) = w[0];
        let (k1, y1) = w[1];
        let count = k1 - k0;
        let radius = ((y0 - y1) / count as f64).exp();
        for j in 0..count {
            let angle = 2.0 * PI * j as f64 / count as f64 + 2.0 * PI * k0 as f64 / n as f64 + 0.4;
            guesses.push(Complex64::from_polar(radius, angle));
        }
    }
    guesses
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Self) -> Polynomial {
        Polynomial::add(self, rhs)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Self) -> Polynomial {
        Polynomial::sub(self, rhs)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Self) -> Polynomial {
        Polynomial::mul(self, rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_poly(rng: &mut ChaCha8Rng, degree: usize) -> Polynomial {
        Polynomial::new(
            (0..=degree)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )
    }

    fn random_point(rng: &mut ChaCha8Rng) -> Complex64 {
        c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5))
    }

    fn rel_err(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn eval_basic() {
        let p = Polynomial::from_real(&[1.0, 0.0, 1.0]);
        assert_eq!(p.eval(c(0.0, 1.0)), ZERO);
        let q = Polynomial::from_real(&[3.0, 2.0]);
        assert_eq!(q.eval(ZERO), c(3.0, 0.0));
    }

    #[test]
    fn eval_matches_power_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let p = random_poly(&mut rng, 8);
            let z = random_point(&mut rng);
            let naive: Complex64 = p.coeffs().iter().enumerate().map(|(k, &a)| a * z.powu(k as u32)).sum();
            assert!(rel_err(p.eval(z), naive) < 1e-12);
        }
    }

    #[test]
    fn derivative_rules() {
        assert_eq!(
            Polynomial::from_real(&[1.0, 0.0, 1.0]).derivative(),
            Polynomial::from_real(&[0.0, 2.0])
        );
        assert!(Polynomial::from_real(&[5.0]).derivative().is_zero());
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = 1e-6;
        for _ in 0..30 {
            let p = random_poly(&mut rng, 6);
            let z = random_point(&mut rng);
            let fd = (p.eval(z + h) - p.eval(z - h)) / (2.0 * h);
            assert!(rel_err(p.derivative().eval(z), fd) < 1e-6);
        }
    }

    #[test]
    fn conj_coeffs_identity() {
        let p = Polynomial::new(vec![ONE, c(0.0, 1.0)]);
        assert_eq!(p.conj_coeffs(), Polynomial::new(vec![ONE, c(0.0, -1.0)]));
        let real = Polynomial::from_real(&[1.0, -2.0, 3.0]);
        assert_eq!(real.conj_coeffs(), real);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let p = random_poly(&mut rng, 7);
            let z = random_point(&mut rng);
            let lhs = p.eval(z.conj()).conj();
            assert!((lhs - p.conj_coeffs().eval(z)).norm() < 1e-12);
        }
    }

    #[test]
    fn ring_operations() {
        let zp1 = Polynomial::from_real(&[1.0, 1.0]);
        let zm1 = Polynomial::from_real(&[-1.0, 1.0]);
        assert_eq!(&zp1 * &zm1, Polynomial::from_real(&[-1.0, 0.0, 1.0]));
        let z2 = Polynomial::from_real(&[0.0, 0.0, 1.0]);
        assert_eq!(z2.compose(&zp1), Polynomial::from_real(&[1.0, 2.0, 1.0]));
        assert_eq!(&(&zp1 + &zm1) - &zp1, zm1);
    }

    #[test]
    fn compose_matches_nested_eval() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..30 {
            let dp = rng.gen_range(0..=5);
            let dq = rng.gen_range(0..=5);
            let p = random_poly(&mut rng, dp);
            let q = random_poly(&mut rng, dq);
            let z = random_point(&mut rng);
            let expect = p.eval(q.eval(z));
            let got = p.compose(&q).eval(z);
            assert!((got - expect).norm() <= 1e-10 * expect.norm().max(1.0));
            assert_eq!(p.compose(&q).degree(), dp * dq);
        }
    }

    #[test]
    fn product_rule_numerically() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let p = random_poly(&mut rng, 5);
            let q = random_poly(&mut rng, 4);
            let z = random_point(&mut rng);
            let lhs = (&p * &q).derivative().eval(z);
            let rhs = p.derivative().eval(z) * q.eval(z) + p.eval(z) * q.derivative().eval(z);
            assert!(rel_err(lhs, rhs) < 1e-8);
        }
    }

    #[test]
    fn trims_leading_dust() {
        let p = Polynomial::new(vec![ONE, ONE, c(1e-17, 0.0)]);
        assert_eq!(p.degree(), 1);
        assert_eq!(Polynomial::new(vec![]).degree(), 0);
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn roots_of_small_cases() {
        let r = sorted(Polynomial::from_real(&[1.0, 0.0, 1.0]).roots(1e-12).unwrap());
        assert!((r[0] - c(0.0, -1.0)).norm() < 1e-12);
        assert!((r[1] - c(0.0, 1.0)).norm() < 1e-12);

        let r = sorted(Polynomial::from_real(&[0.0, -1.5, 0.0, 1.0]).roots(1e-12).unwrap());
        let s = 1.5f64.sqrt();
        assert!((r[0] - c(-s, 0.0)).norm() < 1e-12);
        assert!(r[1].norm() < 1e-12);
        assert!((r[2] - c(s, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn recovers_constructed_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut rho: Vec<Complex64> = Vec::new();
        while rho.len() < 12 {
            let z = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            if rho.iter().all(|r| (r - z).norm() > 0.1) {
                rho.push(z);
            }
        }
        let p = Polynomial::from_roots(&rho);
        let found = p.roots(1e-12).unwrap();
        for r in &rho {
            let best = found.iter().map(|f| (f - r).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-8, "root {r} missed by {best}");
        }
    }

    #[test]
    fn spread_root_moduli_converge() {
        // roots from 1e-3 to 1e3 in modulus; wider spreads push the leading
        // coefficient under the trimming threshold
        let rho: Vec<Complex64> = (0..7)
            .map(|k| Complex64::from_polar(10f64.powi(k - 3), k as f64))
            .collect();
        let p = Polynomial::from_roots(&rho);
        let found = p.roots(1e-12).unwrap();
        for r in &rho {
            let best = found.iter().map(|f| (f - r).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-8 * r.norm().max(1.0), "root {r} missed by {best}");
        }
    }

    #[test]
    fn huge_spread_trims_leading_dust() {
        let rho: Vec<Complex64> = (0..11).map(|k| c(10f64.powi(k - 4), 0.0)).collect();
        assert!(Polynomial::from_roots(&rho).degree() < 11);
    }

    #[test]
    fn multiple_roots_cluster() {
        let p = Polynomial::from_roots(&[ONE, ONE, c(-2.0, 0.0)]);
        let r = p.roots(1e-12).unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r.iter().filter(|z| (*z - ONE).norm() < 1e-6).count(), 2);
    }

    #[test]
    fn roots_needs_positive_degree() {
        assert!(Polynomial::from_real(&[2.0]).roots(1e-12).is_err());
    }
}
