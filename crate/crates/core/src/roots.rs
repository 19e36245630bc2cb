//! Simultaneous polynomial root finding (Aberth–Ehrlich iteration).

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Evaluates `p(z)` and `p'(z)` by Horner's rule.
///
/// `coeffs[k]` is the coefficient of `z^k`.
pub fn horner<T: Real>(coeffs: &[Complex<T>], z: Complex<T>) -> (Complex<T>, Complex<T>) {
    let mut p = Complex::new(T::zero(), T::zero());
    let mut dp = p;
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Multiplies two polynomials given in ascending coefficient order.
pub fn convolve<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex::new(T::zero(), T::zero()); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = out[i + j] + x * y;
        }
    }
    out
}

/// Coefficients of `(u + v z)^n`, ascending.
pub fn binomial_power<T: Real>(u: Complex<T>, v: Complex<T>, n: u32) -> Vec<Complex<T>> {
    let mut out = vec![Complex::new(T::one(), T::zero())];
    for _ in 0..n {
        out = convolve(&out, &[u, v]);
    }
    out
}

/// Finds all roots of the polynomial with ascending coefficients `coeffs`.
///
/// The leading coefficient must be non-zero. Initial guesses sit on a circle
/// whose radius bounds the root moduli (Cauchy bound), rotated off the real
/// axis so conjugate-symmetric inputs do not start on a symmetry line.
pub fn aberth<T: Real>(coeffs: &[Complex<T>], max_iter: usize, tol: T) -> Result<Vec<Complex<T>>> {
    let degree = coeffs.len().saturating_sub(1);
    if degree == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[degree];
    if lead.norm() == T::zero() {
        return Err(Error::InvalidParameter("leading coefficient is zero".into()));
    }
    let bound = T::one()
        + coeffs[..degree]
            .iter()
            .map(|c| (*c / lead).norm())
            .fold(T::zero(), T::max);
    let radius = bound.min(T::lit(1e3)) * T::lit(0.5) + T::lit(0.1);
    let n = T::from_usize(degree).unwrap();
    let mut z: Vec<Complex<T>> = (0..degree)
        .map(|k| {
            let theta = T::tau() * (T::from_usize(k).unwrap() + T::lit(0.4)) / n;
            Complex::from_polar(radius, theta)
        })
        .collect();

    let mut done = vec![false; degree];
    for _ in 0..max_iter {
        for i in 0..degree {
            if done[i] {
                continue;
            }
            let (p, dp) = horner(coeffs, z[i]);
            // residual at the rounding level of Horner's rule counts as converged
            if p.norm() <= rounding_bound(coeffs, z[i]) {
                done[i] = true;
                continue;
            }
            let ratio = p / dp;
            let mut repulsion = Complex::new(T::zero(), T::zero());
            for (j, &zj) in z.iter().enumerate() {
                if j != i {
                    repulsion = repulsion + (z[i] - zj).inv();
                }
            }
            let denom = Complex::new(T::one(), T::zero()) - ratio * repulsion;
            let step = if denom.norm() == T::zero() { ratio } else { ratio / denom };
            if !step.re.is_finite() || !step.im.is_finite() {
                continue;
            }
            z[i] = z[i] - step;
            if step.norm() <= tol * T::one().max(z[i].norm()) {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            return Ok(z);
        }
    }
    Err(Error::SolverDivergence { iterations: max_iter })
}

/// Size of the rounding error Horner's rule can make at `z`.
fn rounding_bound<T: Real>(coeffs: &[Complex<T>], z: Complex<T>) -> T {
    let r = z.norm();
    let mut acc = T::zero();
    for c in coeffs.iter().rev() {
        acc = acc * r + c.norm();
    }
    acc * T::epsilon() * T::lit(4.0) * T::from_usize(coeffs.len()).unwrap()
}

/// Newton polish of a single root; returns the input if Newton misbehaves.
pub fn polish<T: Real>(coeffs: &[Complex<T>], mut z: Complex<T>, iters: usize) -> Complex<T> {
    for _ in 0..iters {
        let (p, dp) = horner(coeffs, z);
        if dp.norm() == T::zero() {
            break;
        }
        let step = p / dp;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        let next = z - step;
        if horner(coeffs, next).0.norm() > p.norm() {
            break;
        }
        z = next;
        if step.norm() <= T::epsilon() * T::one().max(z.norm()) {
            break;
        }
    }
    z
}
