//! The Blaschke family `B_a(z) = z^{d+1} ((z - a) / (1 - conj(a) z))^d` on the
//! Riemann sphere: evaluation, derivative, critical set, fixed points and
//! parameter-region classification.

use num_complex::Complex;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::circle::{CircleLift, RotationEstimate};
use crate::error::{Error, Result};
use crate::fmt::Sig17;
use crate::roots;
use crate::scalar::{frac, Real};

/// Tie tolerance for `|a|` against the region boundaries 1 and 2d+1.
pub const REGION_EPS: f64 = 1e-12;

/// Iterations used by [`MapParams::connectivity_verdict`] to measure the
/// circle rotation number.
const VERDICT_ITER: usize = 4000;
const VERDICT_QMAX: u32 = 24;

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpherePoint<T> {
    Finite(Complex<T>),
    Infinity,
}

impl<T: Real> SpherePoint<T> {
    /// Wraps `z`, mapping any non-finite value to [`SpherePoint::Infinity`].
    pub fn new(z: Complex<T>) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            SpherePoint::Finite(z)
        } else {
            SpherePoint::Infinity
        }
    }

    pub fn finite(self) -> Option<Complex<T>> {
        match self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    pub fn is_infinity(self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    /// Chordal distance on the unit sphere, bounded by 2.
    pub fn chordal_distance(self, other: Self) -> T {
        chordal(self, other)
    }
}

impl<T: Real> From<Complex<T>> for SpherePoint<T> {
    fn from(z: Complex<T>) -> Self {
        SpherePoint::new(z)
    }
}

fn chordal<T: Real>(p: SpherePoint<T>, q: SpherePoint<T>) -> T {
    let two = T::lit(2.0);
    match (p, q) {
        (SpherePoint::Infinity, SpherePoint::Infinity) => T::zero(),
        (SpherePoint::Finite(z), SpherePoint::Infinity) | (SpherePoint::Infinity, SpherePoint::Finite(z)) => {
            two / (T::one() + z.norm_sqr()).sqrt()
        }
        (SpherePoint::Finite(z), SpherePoint::Finite(w)) => {
            two * (z - w).norm() / ((T::one() + z.norm_sqr()).sqrt() * (T::one() + w.norm_sqr()).sqrt())
        }
    }
}

/// The reflection `z -> 1/conj(z)` across the unit circle, swapping 0 and ∞.
pub fn involution<T: Real>(z: SpherePoint<T>) -> SpherePoint<T> {
    match z {
        SpherePoint::Infinity => SpherePoint::Finite(Complex::new(T::zero(), T::zero())),
        SpherePoint::Finite(w) if w.re == T::zero() && w.im == T::zero() => SpherePoint::Infinity,
        SpherePoint::Finite(w) => SpherePoint::new(w.conj().inv()),
    }
}

/// Reduces the two-parameter family `e^{2πit} B_c` to the one-parameter
/// family: returns `a = c e^{iπt/d}`.
pub fn reduce_parameters<T: Real>(c: Complex<T>, t: T, d: u32) -> Complex<T> {
    let phase = T::PI() * t / T::from_u32(d.max(1)).unwrap();
    c * Complex::from_polar(T::one(), phase)
}

/// Parameter regions of the family, separated by `|a| = 1` and `|a| = 2d+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RegionClass {
    /// `|a| <= 1`: the Julia set is the unit circle.
    TrivialDisk,
    /// `1 < |a| < 2d+1`: both free critical points on the circle.
    Endomorphism,
    /// `|a| = 2d+1`: the circle map is a homeomorphism with one critical point.
    HomeoBoundary,
    /// `|a| > 2d+1`: the circle map is an analytic diffeomorphism.
    Diffeo,
}

impl RegionClass {
    pub fn name(self) -> &'static str {
        match self {
            RegionClass::TrivialDisk => "TrivialDisk",
            RegionClass::Endomorphism => "Endomorphism",
            RegionClass::HomeoBoundary => "HomeoBoundary",
            RegionClass::Diffeo => "Diffeo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FixedPointLocation {
    Zero,
    Infinity,
    OnCircle,
    OffCircle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointRecord<T> {
    pub point: SpherePoint<T>,
    pub multiplier: Complex<T>,
    /// Chordal distance between `B(point)` and `point`.
    pub residual: T,
    pub location: FixedPointLocation,
}

impl<T: Real> Serialize for FixedPointRecord<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("FixedPointRecord", 4)?;
        s.serialize_field("point", &SphereJson(self.point))?;
        s.serialize_field("multiplier", &ComplexJson(self.multiplier))?;
        s.serialize_field("residual", &Sig17(self.residual.to_f64_lossy()))?;
        s.serialize_field("location", &self.location)?;
        s.end()
    }
}

/// JSON view of a complex number as `{"re": .., "im": ..}`.
pub struct ComplexJson<T>(pub Complex<T>);

impl<T: Real> Serialize for ComplexJson<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Complex", 2)?;
        s.serialize_field("re", &Sig17(self.0.re.to_f64_lossy()))?;
        s.serialize_field("im", &Sig17(self.0.im.to_f64_lossy()))?;
        s.end()
    }
}

/// JSON view of a sphere point: a complex object or the string `"infinity"`.
pub struct SphereJson<T>(pub SpherePoint<T>);

impl<T: Real> Serialize for SphereJson<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            SpherePoint::Finite(z) => ComplexJson(z).serialize(serializer),
            SpherePoint::Infinity => serializer.serialize_str("infinity"),
        }
    }
}

/// Critical points of `B_a` with multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalSet<T> {
    /// 0 and ∞ with multiplicity d; a and 1/conj(a) with multiplicity d-1 when d >= 2.
    pub fixed_critical: Vec<(SpherePoint<T>, u32)>,
    /// `(c_plus, c_minus)`, the roots of the quadratic factor of `B'`.
    pub free: (Complex<T>, Complex<T>),
    /// Co-critical points `(c_plus', c_minus')`, endomorphism region only.
    pub cocritical: Option<(Complex<T>, Complex<T>)>,
}

impl<T: Real> CriticalSet<T> {
    pub fn total_multiplicity(&self) -> u32 {
        self.fixed_critical.iter().map(|(_, m)| m).sum::<u32>() + 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Connectivity {
    Connected,
    ConnectedUnlessHermanRing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityReport<T> {
    pub verdict: Connectivity,
    pub region: RegionClass,
    /// Measured circle rotation number, only for `|a| > 2d+1`.
    pub rotation: Option<RotationEstimate<T>>,
}

/// One member of the family: degree parameter `d` and complex parameter `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapParams<T> {
    d: u32,
    a: Complex<T>,
}

impl<T: Real> MapParams<T> {
    pub fn new(d: u32, a: Complex<T>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("d must be at least 1".into()));
        }
        if !(a.re.is_finite() && a.im.is_finite()) {
            return Err(Error::InvalidParameter("a must be finite".into()));
        }
        Ok(Self { d, a })
    }

    /// `a = r e^{2πiα}` with α first reduced to `(-1/(4d), 1/(4d)]`.
    ///
    /// Rotating `a` by a `2d`-th root of unity gives a conjugate map, so the
    /// reduction does not change the dynamics.
    pub fn from_polar(d: u32, r: T, alpha: T) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("d must be at least 1".into()));
        }
        if !(r >= T::zero()) || !r.is_finite() || !alpha.is_finite() {
            return Err(Error::InvalidParameter("need finite r >= 0 and finite alpha".into()));
        }
        let alpha = reduce_alpha(alpha, d);
        Self::new(d, Complex::from_polar(r, T::tau() * alpha))
    }

    /// Builds the reduced member conjugate to `e^{2πit} B_c`.
    pub fn from_ct(c: Complex<T>, t: T, d: u32) -> Result<Self> {
        Self::new(d, reduce_parameters(c, t, d))
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn a(&self) -> Complex<T> {
        self.a
    }

    pub fn r(&self) -> T {
        self.a.norm()
    }

    /// `arg(a) / 2π`, reduced to the fundamental domain `(-1/(4d), 1/(4d)]`.
    pub fn alpha(&self) -> T {
        reduce_alpha(self.a.arg() / T::tau(), self.d)
    }

    fn dt(&self) -> T {
        T::from_u32(self.d).unwrap()
    }

    fn is_unimodular(&self) -> bool {
        (self.r() - T::one()).abs() <= T::lit(REGION_EPS)
    }

    /// Evaluates `B_a` on plain complex numbers; returns a non-finite value
    /// at the pole. Hot-loop entry point used by the renderers.
    pub fn apply(&self, z: Complex<T>) -> Complex<T> {
        let a = self.a;
        if self.is_unimodular() {
            // (z - a)/(1 - conj(a) z) collapses to -a when |a| = 1
            return (-a).powu(self.d) * z.powu(self.d + 1);
        }
        let big = T::lit(2.0) * self.r().max(T::one());
        if z.norm() > big {
            let w = z.inv();
            let u = w.powu(self.d + 1) * ((w - a.conj()) / (Complex::new(T::one(), T::zero()) - a * w)).powu(self.d);
            if u.re == T::zero() && u.im == T::zero() {
                return Complex::new(T::infinity(), T::zero());
            }
            return u.inv();
        }
        let den = Complex::new(T::one(), T::zero()) - a.conj() * z;
        if den.re == T::zero() && den.im == T::zero() {
            return Complex::new(T::infinity(), T::zero());
        }
        z.powu(self.d + 1) * ((z - a) / den).powu(self.d)
    }

    pub fn evaluate(&self, z: SpherePoint<T>) -> SpherePoint<T> {
        match z {
            SpherePoint::Infinity => SpherePoint::Infinity,
            SpherePoint::Finite(z) => SpherePoint::new(self.apply(z)),
        }
    }

    /// The quadratic `h(z) = conj(a)(d+1)z² - (2d+1+|a|²)z + a(d+1)`.
    pub fn h(&self, z: Complex<T>) -> Complex<T> {
        let d1 = self.dt() + T::one();
        let mid = T::lit(2.0) * self.dt() + T::one() + self.a.norm_sqr();
        self.a.conj() * d1 * z * z - z * mid + self.a * d1
    }

    /// `B'_a(z) = -z^d (z-a)^{d-1} h(z) / (1 - conj(a) z)^{d+1}`.
    pub fn derivative(&self, z: SpherePoint<T>) -> Result<Complex<T>> {
        let z = z.finite().ok_or(Error::PoleDerivative)?;
        Ok(self.derivative_at(z)?)
    }

    pub(crate) fn derivative_at(&self, z: Complex<T>) -> Result<Complex<T>> {
        let d = self.d;
        let a = self.a;
        if self.is_unimodular() {
            return Ok((-a).powu(d) * z.powu(d) * (self.dt() + T::one()));
        }
        let den = Complex::new(T::one(), T::zero()) - a.conj() * z;
        if den.re == T::zero() && den.im == T::zero() {
            return Err(Error::PoleDerivative);
        }
        let v = -(z.powu(d) * (z - a).powu(d - 1) * self.h(z)) / den.powu(d + 1);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::PoleDerivative)
        }
    }

    /// `c_± = a (2d+1+|a|² ± √Δ) / (2(d+1)|a|²)` with
    /// `Δ = (|a|² - (2d+1)²)(|a|² - 1)`.
    pub fn free_critical_points(&self) -> Result<(Complex<T>, Complex<T>)> {
        let r2 = self.a.norm_sqr();
        if r2 == T::zero() {
            return Err(Error::DegenerateParameter);
        }
        let two = T::lit(2.0);
        let k = two * self.dt() + T::one();
        let delta = (r2 - k * k) * (r2 - T::one());
        let root = if delta >= T::zero() {
            Complex::new(delta.sqrt(), T::zero())
        } else {
            Complex::new(T::zero(), (-delta).sqrt())
        };
        let scale = self.a / (two * (self.dt() + T::one()) * r2);
        let base = Complex::new(k + r2, T::zero());
        Ok(((base + root) * scale, (base - root) * scale))
    }

    pub fn critical_set(&self) -> Result<CriticalSet<T>> {
        let free = self.free_critical_points()?;
        let zero = SpherePoint::Finite(Complex::new(T::zero(), T::zero()));
        let mut fixed_critical = vec![(zero, self.d), (SpherePoint::Infinity, self.d)];
        if self.d >= 2 {
            fixed_critical.push((SpherePoint::Finite(self.a), self.d - 1));
            fixed_critical.push((SpherePoint::new(self.a.conj().inv()), self.d - 1));
        }
        let cocritical = match self.classify_region() {
            RegionClass::Endomorphism => self.cocritical_points(),
            _ => None,
        };
        Ok(CriticalSet { fixed_critical, free, cocritical })
    }

    /// Co-critical points on the circle: the other point on the lift with the
    /// same lift value as each critical angle.
    fn cocritical_points(&self) -> Option<(Complex<T>, Complex<T>)> {
        let lift = CircleLift::from_params(self).ok()?;
        let angles = lift.critical_angles();
        if angles.len() != 2 {
            return None;
        }
        let (x_plus, x_minus) = (angles[0], angles[1]);
        // x_minus is a local max, x_plus a local min of the lift; the other
        // preimage of each critical value lies on the adjacent increasing branch.
        let co_plus = lift.solve_increasing(lift.eval(x_plus), x_plus - T::one(), x_minus)?;
        let co_minus = lift.solve_increasing(lift.eval(x_minus), x_plus, x_minus + T::one())?;
        Some((self.circle_point(co_plus), self.circle_point(co_minus)))
    }

    /// Plane point of the unit circle corresponding to lift angle `x`:
    /// `e^{2πix} · a/|a|`, so that `B_a(circle_point(x)) = circle_point(G(x))`.
    pub fn circle_point(&self, x: T) -> Complex<T> {
        let r = self.r();
        let unit = if r > T::zero() { self.a / r } else { Complex::new(T::one(), T::zero()) };
        Complex::from_polar(T::one(), T::tau() * frac(x)) * unit
    }

    pub fn classify_region(&self) -> RegionClass {
        let r = self.r();
        let eps = T::lit(REGION_EPS);
        let outer = T::lit(2.0) * self.dt() + T::one();
        if r <= T::one() + eps {
            RegionClass::TrivialDisk
        } else if (r - outer).abs() <= eps {
            RegionClass::HomeoBoundary
        } else if r < outer {
            RegionClass::Endomorphism
        } else {
            RegionClass::Diffeo
        }
    }

    /// Coefficients of `z^d (z-a)^d - (1 - conj(a) z)^d`, whose roots together
    /// with 0 and ∞ are the fixed points of `B_a`.
    pub fn fixed_point_polynomial(&self) -> Vec<Complex<T>> {
        let one = Complex::new(T::one(), T::zero());
        let zero = Complex::new(T::zero(), T::zero());
        let shifted = roots::binomial_power(-self.a, one, self.d);
        let mut coeffs = vec![zero; self.d as usize];
        coeffs.extend(shifted);
        for (k, c) in roots::binomial_power(one, -self.a.conj(), self.d).into_iter().enumerate() {
            coeffs[k] = coeffs[k] - c;
        }
        coeffs
    }

    /// All `2d + 2` fixed points with multipliers and residuals.
    pub fn fixed_points(&self) -> Result<Vec<FixedPointRecord<T>>> {
        if self.a.norm() == T::zero() {
            return Err(Error::DegenerateParameter);
        }
        let coeffs = self.fixed_point_polynomial();
        let found = roots::aberth(&coeffs, 2000, T::lit(1e-15))?;
        let zero = Complex::new(T::zero(), T::zero());
        let mut out = vec![
            FixedPointRecord {
                point: SpherePoint::Finite(zero),
                multiplier: zero,
                residual: T::zero(),
                location: FixedPointLocation::Zero,
            },
            FixedPointRecord {
                point: SpherePoint::Infinity,
                multiplier: zero,
                residual: T::zero(),
                location: FixedPointLocation::Infinity,
            },
        ];
        for z in found {
            let z = roots::polish(&coeffs, z, 8);
            let point = SpherePoint::Finite(z);
            let residual = chordal(self.evaluate(point), point);
            let multiplier = self.derivative_at(z).unwrap_or(Complex::new(T::infinity(), T::zero()));
            let location = if (z.norm() - T::one()).abs() <= T::lit(1e-8) {
                FixedPointLocation::OnCircle
            } else {
                FixedPointLocation::OffCircle
            };
            out.push(FixedPointRecord { point, multiplier, residual, location });
        }
        Ok(out)
    }

    /// Julia-set connectivity decision rule.
    ///
    /// Herman rings need two critical orbits accumulating on distinct
    /// boundary components, which is impossible when both free critical points
    /// sit on the circle (`1 <= |a| <= 2d+1`) or when the Julia set is the
    /// circle (`|a| < 1`). For `|a| > 2d+1` a confirmed rational rotation
    /// number also rules out a ring at this parameter.
    pub fn connectivity_verdict(&self) -> ConnectivityReport<T> {
        let region = self.classify_region();
        if region != RegionClass::Diffeo {
            return ConnectivityReport { verdict: Connectivity::Connected, region, rotation: None };
        }
        let lift = CircleLift::from_params(self).expect("diffeo region has r > 1");
        let estimate = lift.rotation_number(T::zero(), VERDICT_ITER, VERDICT_QMAX);
        let verdict = if estimate.rational_lock.is_some() {
            Connectivity::Connected
        } else {
            Connectivity::ConnectedUnlessHermanRing
        };
        ConnectivityReport { verdict, region, rotation: Some(estimate) }
    }
}

/// Reduces α modulo `1/(2d)` into `(-1/(4d), 1/(4d)]`.
pub fn reduce_alpha<T: Real>(alpha: T, d: u32) -> T {
    let period = T::one() / (T::lit(2.0) * T::from_u32(d.max(1)).unwrap());
    let half = period / T::lit(2.0);
    // shift into (-half, half]
    let shifted = half - alpha;
    let k = (shifted / period).floor();
    let reduced = alpha + k * period;
    if reduced <= -half {
        reduced + period
    } else if reduced > half {
        reduced - period
    } else {
        reduced
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn p(d: u32, a: C) -> MapParams<f64> {
        MapParams::new(d, a).unwrap()
    }

    /// `e^{2πit} z^{d+1} ((z-c)/(1-conj(c) z))^d`, straight from the definition.
    fn two_param(d: u32, cc: C, t: f64, z: C) -> C {
        C::from_polar(1.0, std::f64::consts::TAU * t) * z.powu(d + 1) * ((z - cc) / (1.0 - cc.conj() * z)).powu(d)
    }

    #[test]
    fn reduce_parameters_examples() {
        assert!((reduce_parameters(c(0.0, 1.0), 0.0, 2) - c(0.0, 1.0)).norm() < 1e-15);
        assert!((reduce_parameters(c(2.0, 0.0), 0.5, 1) - c(0.0, 2.0)).norm() < 1e-15);
        assert!((reduce_parameters(c(1.0, 0.0), 1.0, 2) - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn reduced_family_is_conjugate_by_rotation() {
        // B_{c,t} = eta^{-1} ∘ B_a ∘ eta with eta(z) = e^{-2πiα} z, α = -t/(2d)
        let cases = [(2, c(1.0, 0.0), 1.0), (1, c(2.0, 0.0), 0.5), (3, c(1.3, -0.4), 0.37)];
        let starts = [c(0.3, 0.2), c(-0.5, 0.7), c(0.9, -0.1), c(0.1, -0.95), c(0.6, 0.6)];
        for (d, cc, t) in cases {
            let params = MapParams::from_ct(cc, t, d).unwrap();
            let alpha = -t / (2.0 * d as f64);
            let eta = C::from_polar(1.0, -std::f64::consts::TAU * alpha);
            for &z0 in &starts {
                let (mut z, mut w) = (z0, eta * z0);
                for _ in 0..20 {
                    z = two_param(d, cc, t, z);
                    w = params.apply(w);
                    // both orbits stay in compact regions or escape together
                    let zs = SpherePoint::new(eta * z);
                    assert!(chordal(zs, SpherePoint::new(w)) <= 1e-10, "d={d} c={cc} t={t}");
                }
            }
        }
    }

    #[test]
    fn evaluate_examples() {
        let m = p(1, c(4.0, 0.0));
        assert!((m.apply(c(-1.0, 0.0)) - c(-1.0, 0.0)).norm() < 1e-15);
        let m2 = p(2, c(0.7, -1.1));
        assert_eq!(m2.evaluate(SpherePoint::Finite(c(0.0, 0.0))), SpherePoint::Finite(c(0.0, 0.0)));
        let m3 = p(2, c(3.0, 0.0));
        for k in 0..50 {
            let z = C::from_polar(1.0, 0.123 * k as f64);
            assert!((m3.apply(z).norm() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn pole_and_infinity() {
        let m = p(2, c(2.0, 1.0));
        let pole = SpherePoint::Finite(m.a().conj().inv());
        assert_eq!(m.evaluate(pole), SpherePoint::Infinity);
        assert_eq!(m.evaluate(SpherePoint::Infinity), SpherePoint::Infinity);
        // reciprocal branch agrees with the direct formula just inside the switch radius
        let z = c(9.0, 3.0);
        let direct = z.powu(3) * ((z - m.a()) / (1.0 - m.a().conj() * z)).powu(2);
        assert!((m.apply(z) - direct).norm() / direct.norm() < 1e-13);
        let huge = m.apply(c(1e200, 0.0));
        assert_eq!(SpherePoint::new(huge), SpherePoint::Infinity);
    }

    #[test]
    fn derivative_examples() {
        let m = p(1, c(4.0, 0.0));
        let d1 = m.derivative(SpherePoint::Finite(c(1.0, 0.0))).unwrap();
        assert!((d1 - c(1.0 / 3.0, 0.0)).norm() < 1e-14);
        let dm1 = m.derivative(SpherePoint::Finite(c(-1.0, 0.0))).unwrap();
        assert!((dm1 - c(7.0 / 5.0, 0.0)).norm() < 1e-14);
        for d in 1..4 {
            let m = p(d, c(1.7, 0.3));
            assert_eq!(m.derivative(SpherePoint::Finite(c(0.0, 0.0))).unwrap().norm(), 0.0);
        }
        let m2 = p(1, c(2.0, 0.0));
        let root = c(7.0 / 8.0, 15f64.sqrt() / 8.0);
        assert!(m2.derivative(SpherePoint::Finite(root)).unwrap().norm() < 1e-14);
        let pole = SpherePoint::Finite(c(0.25, 0.0));
        assert_eq!(m.derivative(pole), Err(Error::PoleDerivative));
        assert_eq!(m.derivative(SpherePoint::Infinity), Err(Error::PoleDerivative));
    }

    #[test]
    fn free_critical_point_examples() {
        let (cp, cm) = p(1, c(2.0, 0.0)).free_critical_points().unwrap();
        let s = 15f64.sqrt() / 8.0;
        assert!((cp - c(7.0 / 8.0, s)).norm() < 1e-15);
        assert!((cm - c(7.0 / 8.0, -s)).norm() < 1e-15);
        let (cp, cm) = p(1, c(4.0, 0.0)).free_critical_points().unwrap();
        let r105 = 105f64.sqrt();
        assert!((cp.re - (19.0 + r105) / 16.0).abs() < 1e-15 && cp.im == 0.0);
        assert!((cm.re - (19.0 - r105) / 16.0).abs() < 1e-15);
        assert!((cp * cm - c(1.0, 0.0)).norm() < 1e-15);
        for d in 1..4 {
            let a = C::from_polar(1.0, 0.7);
            let (cp, cm) = p(d, a).free_critical_points().unwrap();
            assert!((cp - a).norm() < 1e-15 && (cm - a).norm() < 1e-15);
        }
        assert_eq!(p(2, c(0.0, 0.0)).free_critical_points(), Err(Error::DegenerateParameter));
    }

    #[test]
    fn region_examples() {
        assert_eq!(p(2, c(0.5, 0.0)).classify_region(), RegionClass::TrivialDisk);
        assert_eq!(p(2, c(3.0, 0.0)).classify_region(), RegionClass::Endomorphism);
        assert_eq!(p(2, c(5.0, 0.0)).classify_region(), RegionClass::HomeoBoundary);
        assert_eq!(p(2, c(6.0, 0.0)).classify_region(), RegionClass::Diffeo);
        assert_eq!(p(2, c(1.0, 0.0)).classify_region(), RegionClass::TrivialDisk);
        assert_eq!(p(2, c(1.0 + 5e-13, 0.0)).classify_region(), RegionClass::TrivialDisk);
        assert_eq!(p(2, c(5.0 - 5e-13, 0.0)).classify_region(), RegionClass::HomeoBoundary);
        assert_eq!(p(2, c(1.0 + 1e-9, 0.0)).classify_region(), RegionClass::Endomorphism);
    }

    #[test]
    fn fixed_points_d1_a4() {
        let recs = p(1, c(4.0, 0.0)).fixed_points().unwrap();
        assert_eq!(recs.len(), 4);
        let find = |w: C| {
            recs.iter()
                .find(|r| r.point.finite().map_or(false, |z| (z - w).norm() < 1e-12))
                .unwrap_or_else(|| panic!("missing {w}"))
        };
        assert!((find(c(1.0, 0.0)).multiplier - c(1.0 / 3.0, 0.0)).norm() < 1e-12);
        assert!((find(c(-1.0, 0.0)).multiplier - c(7.0 / 5.0, 0.0)).norm() < 1e-12);
        assert_eq!(find(c(0.0, 0.0)).multiplier.norm(), 0.0);
        assert!(recs.iter().any(|r| r.point.is_infinity() && r.multiplier.norm() == 0.0));
        assert!(recs.iter().all(|r| r.residual <= 1e-9));
    }

    #[test]
    fn fixed_points_count_d2() {
        let recs = p(2, c(2.0, 1.0)).fixed_points().unwrap();
        assert_eq!(recs.len(), 6);
        assert!(recs.iter().all(|r| r.residual <= 1e-9));
    }

    #[test]
    fn involution_examples() {
        let z = involution(SpherePoint::Finite(c(0.0, 2.0)));
        assert!((z.finite().unwrap() - c(0.0, 0.5)).norm() < 1e-16);
        let u = C::from_polar(1.0, 1.234);
        assert!((involution(SpherePoint::Finite(u)).finite().unwrap() - u).norm() < 1e-15);
        assert_eq!(involution(SpherePoint::Finite(c(0.0, 0.0))), SpherePoint::Infinity);
        assert_eq!(involution(SpherePoint::<f64>::Infinity), SpherePoint::Finite(c(0.0, 0.0)));
    }

    #[test]
    fn alpha_reduction() {
        for d in 1..5 {
            let q = 1.0 / (4.0 * d as f64);
            for k in -20..20 {
                let x = k as f64 * 0.0371;
                let r = reduce_alpha(x, d);
                assert!(r > -q - 1e-15 && r <= q + 1e-15, "{x} -> {r}");
                let steps = (x - r) * 2.0 * d as f64;
                assert!((steps - steps.round()).abs() < 1e-9);
            }
            assert!((reduce_alpha(q, d) - q).abs() < 1e-15);
            assert!((reduce_alpha(-q, d) - q).abs() < 1e-15);
        }
    }

    #[test]
    fn connectivity_examples() {
        assert_eq!(p(2, c(2.0, 0.0)).connectivity_verdict().verdict, Connectivity::Connected);
        assert_eq!(p(2, c(0.5, 0.0)).connectivity_verdict().verdict, Connectivity::Connected);
        let rep = p(1, c(4.0, 0.0)).connectivity_verdict();
        assert_eq!(rep.verdict, Connectivity::Connected);
        let lock = rep.rotation.unwrap().rational_lock.unwrap();
        assert_eq!((lock.p, lock.q), (0, 1));
    }

    #[test]
    fn cocritical_points_share_critical_values() {
        let m = p(2, C::from_polar(2.5, 0.2));
        let set = m.critical_set().unwrap();
        let (cp, cm) = set.free;
        let (kp, km) = set.cocritical.unwrap();
        assert!((m.apply(kp) - m.apply(cp)).norm() < 1e-9);
        assert!((m.apply(km) - m.apply(cm)).norm() < 1e-9);
        assert!((kp - cp).norm() > 1e-3 && (km - cm).norm() > 1e-3);
        assert_eq!(set.total_multiplicity(), 8);
        assert!(p(2, c(6.0, 0.0)).critical_set().unwrap().cocritical.is_none());
    }

    #[test]
    fn f32_instantiation() {
        let m = MapParams::<f32>::new(1, Complex::new(4.0, 0.0)).unwrap();
        let z = m.apply(Complex::new(-1.0, 0.0));
        assert!((z.re + 1.0).abs() < 1e-6);
        assert_eq!(m.classify_region(), RegionClass::Diffeo);
    }
}
