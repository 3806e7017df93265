//! Mass configurations, rational lens functions and the harmonic field
//! `f(z) = r(z) - conj(z)` whose zeros are the lensed images.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Minimum separation between two mass positions.
pub const MIN_SEPARATION: f64 = 1e-12;
/// Evaluation points closer than this to a pole are rejected.
pub const POLE_TOL: f64 = 1e-12;
/// Default threshold on `|jacobian|` below which a point is `Singular`.
pub const DEFAULT_SING_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mass {
    pub position: Complex64,
    pub sigma: f64,
}

impl Mass {
    pub fn new(position: Complex64, sigma: f64) -> Self {
        Mass { position, sigma }
    }
}

/// A point of the configuration space: distinct positions, positive masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Mass>", into = "Vec<Mass>")]
pub struct MassConfig {
    masses: Vec<Mass>,
}

impl TryFrom<Vec<Mass>> for MassConfig {
    type Error = Error;
    fn try_from(masses: Vec<Mass>) -> Result<Self> {
        MassConfig::new(masses)
    }
}

impl From<MassConfig> for Vec<Mass> {
    fn from(cfg: MassConfig) -> Self {
        cfg.masses
    }
}

impl MassConfig {
    pub fn new(masses: Vec<Mass>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::InvalidInput("mass configuration is empty".into()));
        }
        for m in &masses {
            if !(m.sigma > 0.0 && m.sigma.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "mass at {} has non-positive sigma {}",
                    m.position, m.sigma
                )));
            }
            if !(m.position.re.is_finite() && m.position.im.is_finite()) {
                return Err(Error::InvalidInput("non-finite mass position".into()));
            }
        }
        for (i, a) in masses.iter().enumerate() {
            for b in &masses[i + 1..] {
                if (a.position - b.position).norm() <= MIN_SEPARATION {
                    return Err(Error::DegeneratePositions(a.position, b.position));
                }
            }
        }
        Ok(MassConfig { masses })
    }

    pub fn masses(&self) -> &[Mass] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn positions(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.masses.iter().map(|m| m.position)
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().map(|m| m.sigma).sum()
    }

    pub fn max_radius(&self) -> f64 {
        self.positions().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// A copy with one more mass.
    pub fn with_mass(&self, mass: Mass) -> Result<Self> {
        let mut masses = self.masses.clone();
        masses.push(mass);
        MassConfig::new(masses)
    }

    /// Every position shifted by `c`.
    pub fn translated(&self, c: Complex64) -> Self {
        MassConfig {
            masses: self.masses.iter().map(|m| Mass::new(m.position + c, m.sigma)).collect(),
        }
    }

    /// `sum_j sigma_j / (z - z_j)`, summed directly.
    pub fn deflection(&self, z: Complex64) -> Result<Complex64> {
        let mut sum = Complex64::new(0.0, 0.0);
        for m in &self.masses {
            let d = z - m.position;
            if d.norm() <= POLE_TOL {
                return Err(Error::AtMass(z));
            }
            sum += m.sigma / d;
        }
        Ok(sum)
    }
}

/// `r = p / q` with `deg q >= deg p` and no common roots.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalLens {
    p: Polynomial,
    q: Polynomial,
    /// Distinct roots of `q`.
    poles: Vec<Complex64>,
    /// Multiplicity of each pole.
    orders: Vec<usize>,
}

/// Roots of `q` closer than this, relative to the largest root modulus (at
/// least 1), are one multiple pole. A root of multiplicity `m` is computed
/// with an error of order `eps^(1/m)`.
const POLE_CLUSTER: f64 = 1e-5;

/// Groups nearly equal roots; each group is replaced by its mean, which is
/// far more accurate than the individual members.
fn cluster_roots(roots: &[Complex64]) -> (Vec<Complex64>, Vec<usize>) {
    let reach = roots.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let tol = POLE_CLUSTER * reach;
    let mut groups: Vec<Vec<Complex64>> = Vec::new();
    for &z in roots {
        match groups.iter_mut().find(|g| g.iter().any(|w| (w - z).norm() <= tol)) {
            Some(g) => g.push(z),
            None => groups.push(vec![z]),
        }
    }
    groups
        .into_iter()
        .map(|g| (g.iter().sum::<Complex64>() / g.len() as f64, g.len()))
        .unzip()
}

impl RationalLens {
    pub fn new(p: Polynomial, q: Polynomial) -> Result<Self> {
        if q.degree() == 0 {
            return Err(Error::InvalidInput("denominator must have degree >= 1".into()));
        }
        if q.degree() < p.degree() {
            return Err(Error::InvalidInput(format!(
                "numerator degree {} exceeds denominator degree {}",
                p.degree(),
                q.degree()
            )));
        }
        let (poles, orders) = cluster_roots(&q.roots(1e-14)?);
        Self::with_poles(p, q, poles, orders)
    }

    fn with_poles(p: Polynomial, q: Polynomial, poles: Vec<Complex64>, orders: Vec<usize>) -> Result<Self> {
        let scale = p.scale().max(1e-300);
        for &z in &poles {
            let mag: f64 = p.coeffs().iter().rev().fold(0.0, |acc, c| acc * z.norm() + c.norm());
            if p.eval(z).norm() < 1e-10 * mag.max(scale) {
                return Err(Error::InvalidInput(format!(
                    "numerator and denominator share the root {z}"
                )));
            }
        }
        Ok(RationalLens { p, q, poles, orders })
    }

    /// `q(z) = prod (z - z_j)`, `p(z) = sum_j sigma_j prod_{k != j} (z - z_k)`.
    pub fn from_masses(cfg: &MassConfig) -> Result<Self> {
        Self::from_masses_with_source(cfg, Complex64::new(0.0, 0.0))
    }

    /// Lens function for a source at `source`: the image equation
    /// `conj(z - source) = sum_j sigma_j / (z - z_j)` is `r(z) = conj(z)` with
    /// `r = sum_j sigma_j / (z - z_j) + conj(source)`.
    pub fn from_masses_with_source(cfg: &MassConfig, source: Complex64) -> Result<Self> {
        let positions: Vec<Complex64> = cfg.positions().collect();
        let q = Polynomial::from_roots(&positions);
        let mut p = Polynomial::zero();
        for (j, m) in cfg.masses().iter().enumerate() {
            let others: Vec<Complex64> = positions
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &z)| z)
                .collect();
            p = p.add(&Polynomial::from_roots(&others).scale_by(Complex64::new(m.sigma, 0.0)));
        }
        if source != Complex64::new(0.0, 0.0) {
            p = p.add(&q.scale_by(source.conj()));
        }
        let orders = vec![1; positions.len()];
        Self::with_poles(p, q, positions, orders)
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.p
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.q
    }

    /// Distinct poles.
    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }

    /// Multiplicities of [`RationalLens::poles`], summing to `deg q`.
    pub fn pole_orders(&self) -> &[usize] {
        &self.orders
    }

    pub fn degree(&self) -> usize {
        self.q.degree().max(self.p.degree())
    }

    fn check_pole(&self, z: Complex64) -> Result<()> {
        if self.poles.iter().any(|&w| (z - w).norm() <= POLE_TOL) {
            Err(Error::AtPole(z))
        } else {
            Ok(())
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.check_pole(z)?;
        Ok(self.p.eval(z) / self.q.eval(z))
    }

    /// `r'(z) = (p'q - pq') / q^2`
    pub fn derivative_at(&self, z: Complex64) -> Result<Complex64> {
        self.check_pole(z)?;
        let (p, dp) = self.p.eval_with_derivative(z);
        let (q, dq) = self.q.eval_with_derivative(z);
        Ok((dp * q - p * dq) / (q * q))
    }
}

/// The harmonic field whose zeros are solutions of `h(z) = conj(z)`.
#[derive(Debug, Clone, PartialEq)]
pub enum LensField {
    Rational(RationalLens),
    Poly(Polynomial),
}

/// Which family a field belongs to, for count identities and bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Poly,
    Rational,
    Physical,
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FieldKind::Poly => "poly",
            FieldKind::Rational => "rational",
            FieldKind::Physical => "physical",
        })
    }
}

impl LensField {
    pub fn poly(p: Polynomial) -> Result<Self> {
        if p.degree() < 2 {
            return Err(Error::InvalidInput(format!(
                "polynomial lens fields need degree >= 2, got {}",
                p.degree()
            )));
        }
        Ok(LensField::Poly(p))
    }

    pub fn rational(r: RationalLens) -> Result<Self> {
        if r.degree() < 2 {
            return Err(Error::InvalidInput(format!(
                "rational lens fields need degree >= 2, got {}",
                r.degree()
            )));
        }
        Ok(LensField::Rational(r))
    }

    pub fn from_masses(cfg: &MassConfig) -> Result<Self> {
        Self::rational(RationalLens::from_masses(cfg)?)
    }

    pub fn degree(&self) -> usize {
        match self {
            LensField::Rational(r) => r.degree(),
            LensField::Poly(p) => p.degree(),
        }
    }

    pub fn poles(&self) -> &[Complex64] {
        match self {
            LensField::Rational(r) => r.poles(),
            LensField::Poly(_) => &[],
        }
    }

    pub fn pole_orders(&self) -> &[usize] {
        match self {
            LensField::Rational(r) => r.pole_orders(),
            LensField::Poly(_) => &[],
        }
    }

    pub fn is_poly(&self) -> bool {
        matches!(self, LensField::Poly(_))
    }

    /// The holomorphic part `h` at `z`.
    pub fn holomorphic(&self, z: Complex64) -> Result<Complex64> {
        match self {
            LensField::Rational(r) => r.eval(z),
            LensField::Poly(p) => Ok(p.eval(z)),
        }
    }

    /// `h'(z)`
    pub fn holomorphic_derivative(&self, z: Complex64) -> Result<Complex64> {
        match self {
            LensField::Rational(r) => r.derivative_at(z),
            LensField::Poly(p) => Ok(p.eval_with_derivative(z).1),
        }
    }

    /// `f(z) = h(z) - conj(z)`
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.holomorphic(z)? - z.conj())
    }

    /// Real Jacobian determinant of `f`: `|h'(z)|^2 - 1`.
    pub fn jacobian(&self, z: Complex64) -> Result<f64> {
        Ok(self.holomorphic_derivative(z)?.norm_sqr() - 1.0)
    }

    pub fn classify(&self, z: Complex64, sing_tol: f64) -> Result<Orientation> {
        Ok(Orientation::from_jacobian(self.jacobian(z)?, sing_tol))
    }

    /// The field in coordinates `z = s w`, divided by `s` so that its zeros are
    /// the original zeros divided by `s`.
    pub fn rescaled(&self, s: f64) -> Result<Self> {
        let sc = Complex64::new(s, 0.0);
        match self {
            LensField::Poly(p) => Ok(LensField::Poly(p.rescale_argument(sc).scale_by(sc.inv()))),
            LensField::Rational(r) => {
                let p = r.p.rescale_argument(sc);
                let q = r.q.rescale_argument(sc).scale_by(sc);
                let poles = r.poles.iter().map(|z| z / s).collect();
                Ok(LensField::Rational(RationalLens {
                    p,
                    q,
                    poles,
                    orders: r.orders.clone(),
                }))
            }
        }
    }

    /// The field in coordinates `z = w + z0`, i.e. `g(w) = f(w + z0)`, whose
    /// zeros are the original zeros shifted by `-z0`.
    pub fn translated(&self, z0: Complex64) -> Result<Self> {
        let shift = Polynomial::new(vec![z0, Complex64::new(1.0, 0.0)]);
        match self {
            LensField::Poly(p) => Ok(LensField::Poly(p.compose(&shift).sub(&Polynomial::constant(z0.conj())))),
            LensField::Rational(r) => {
                let q = r.q.compose(&shift);
                let p = r.p.compose(&shift).sub(&q.scale_by(z0.conj()));
                let poles = r.poles.iter().map(|z| z - z0).collect();
                Ok(LensField::Rational(RationalLens {
                    p,
                    q,
                    poles,
                    orders: r.orders.clone(),
                }))
            }
        }
    }

    /// Mean of the poles; the origin for polynomials.
    pub fn pole_centroid(&self) -> Complex64 {
        let poles = self.poles();
        if poles.is_empty() {
            return Complex64::new(0.0, 0.0);
        }
        poles.iter().sum::<Complex64>() / poles.len() as f64
    }

    /// A length scale for the zero set: every zero and pole lies within a
    /// modest multiple of it.
    pub fn natural_scale(&self) -> f64 {
        let s = match self {
            LensField::Poly(p) => {
                // positive root of |a_n| x^n = sum_{k<n} |a_k'| x^k with the
                // conj(z) term folded into k = 1
                let n = p.degree();
                let mut abs: Vec<f64> = p.coeffs().iter().map(|c| c.norm()).collect();
                abs[1] += 1.0;
                cauchy_radius(&abs, n)
            }
            LensField::Rational(r) => {
                let qn = r.q.leading().norm();
                let n = r.q.degree();
                let a_lead = r.p.coeffs().get(n).map_or(0.0, |c| c.norm()) / qn;
                let a_next = r.p.coeffs().get(n - 1).map_or(0.0, |c| c.norm()) / qn;
                let pole_r = r.poles.iter().map(|z| z.norm()).fold(0.0, f64::max);
                pole_r.max(a_next.sqrt()).max(a_lead)
            }
        };
        if s.is_finite() && s > 0.0 {
            s
        } else {
            1.0
        }
    }
}

fn cauchy_radius(abs: &[f64], n: usize) -> f64 {
    let lead = abs[n];
    let g = |x: f64| {
        let lower = abs[..n].iter().rev().fold(0.0, |acc, &c| acc * x + c);
        lead * x.powi(n as i32) - lower
    };
    // g(x)/x is increasing for x > 0; bracket then bisect
    let (mut lo, mut hi) = (0.0, 1.0);
    while !(g(hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return 1.0;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Orientation of `f` at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    SensePreserving,
    SenseReversing,
    Singular,
}

impl Orientation {
    pub fn from_jacobian(jacobian: f64, sing_tol: f64) -> Self {
        if jacobian > sing_tol {
            Orientation::SensePreserving
        } else if jacobian < -sing_tol {
            Orientation::SenseReversing
        } else {
            Orientation::Singular
        }
    }

    /// Order of a simple zero with this orientation; `None` when singular.
    pub fn order(self) -> Option<i64> {
        match self {
            Orientation::SensePreserving => Some(1),
            Orientation::SenseReversing => Some(-1),
            Orientation::Singular => None,
        }
    }
}
