//! Dynamics of the circle restriction through its degree-one lift
//! `G_{r,α}`: rotation numbers, rotation intervals, periodic cycles,
//! adjacency and superattracting parameters.

use num_integer::Integer;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fmt::Sig17;
use crate::map::{MapParams, RegionClass, REGION_EPS};
use crate::scalar::{circle_dist, frac, Real};

/// Grid used to scan `[0, 1)` for periodic points.
pub const CYCLE_GRID: usize = 4096;
/// Grid of the rotation-interval envelopes unless the caller overrides it.
pub const DEFAULT_ENVELOPE_GRID: usize = 1024;
/// Residual required for a lock or cycle to count as confirmed.
pub const CYCLE_TOL: f64 = 1e-10;

const SUPERATTRACTING_EPS: f64 = 1e-9;
const INDIFFERENT_BAND: f64 = 1e-8;

const ADJ_BURN_IN: usize = 10_000;
const ADJ_WINDOW: usize = 1_000;
const ADJ_PROXIMITY: f64 = 1e-8;
const ADJ_MAX_PERIOD: usize = 64;

/// A reduced fraction `p/q` with `0 <= p < q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RationalLock {
    pub p: u32,
    pub q: u32,
}

impl RationalLock {
    fn from_lift(p_lift: i64, q: u32) -> Self {
        let g = p_lift.gcd(&(q as i64)).max(1);
        let q2 = q as i64 / g;
        Self { p: (p_lift / g).rem_euclid(q2) as u32, q: q2 as u32 }
    }
}

impl std::fmt::Display for RationalLock {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationEstimate<T> {
    /// Rotation number reduced to `[0, 1)`.
    pub value: T,
    pub error_bound: T,
    pub rational_lock: Option<RationalLock>,
    /// Unreduced estimate `(G^n(x0) - x0) / n` for this lift.
    pub lift_value: T,
}

impl<T: Real> Serialize for RotationEstimate<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("RotationEstimate", 3)?;
        s.serialize_field("value", &Sig17(self.value.to_f64_lossy()))?;
        s.serialize_field("error_bound", &Sig17(self.error_bound.to_f64_lossy()))?;
        s.serialize_field("rational_lock", &self.rational_lock)?;
        s.end()
    }
}

/// Rotation interval `[lo, hi]`.
///
/// Both endpoints carry the same integer shift, chosen so that
/// `lo.value ∈ [0, 1)`; `hi.value` may therefore reach 1 or beyond when the
/// interval straddles an integer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationInterval<T> {
    pub lo: RotationEstimate<T>,
    pub hi: RotationEstimate<T>,
}

impl<T: Real> RotationInterval<T> {
    /// Whether `rho` (taken mod 1) lies in `[lo - slack, hi + slack]`.
    pub fn contains(&self, rho: T, slack: T) -> bool {
        let lo = self.lo.value - slack;
        let hi = self.hi.value + slack;
        let mut m = (lo - rho).floor();
        while rho + m <= hi {
            if rho + m >= lo {
                return true;
            }
            m = m + T::one();
        }
        false
    }

    /// Summed error bounds of the two endpoints.
    pub fn slack(&self) -> T {
        self.lo.error_bound + self.hi.error_bound
    }
}

impl<T: Real> Serialize for RotationInterval<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("RotationInterval", 2)?;
        s.serialize_field("lo", &self.lo)?;
        s.serialize_field("hi", &self.hi)?;
        s.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Stability {
    SuperAttracting,
    Attracting,
    Indifferent,
    Repelling,
}

impl Stability {
    pub fn classify<T: Real>(multiplier: T) -> Self {
        let m = multiplier.abs();
        if m <= T::lit(SUPERATTRACTING_EPS) {
            Stability::SuperAttracting
        } else if m < T::one() - T::lit(INDIFFERENT_BAND) {
            Stability::Attracting
        } else if m <= T::one() + T::lit(INDIFFERENT_BAND) {
            Stability::Indifferent
        } else {
            Stability::Repelling
        }
    }

    pub fn is_repelling(self) -> bool {
        self == Stability::Repelling
    }
}

/// A periodic orbit of the circle map with rotation number `p/q`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleCycle<T> {
    /// Orbit points in `[0, 1)`, sorted.
    pub angles: Vec<T>,
    /// Orbit points in dynamical order, starting from the smallest angle.
    pub orbit: Vec<T>,
    /// Numerator reduced to `0 <= p < q`.
    pub p: u32,
    pub q: u32,
    /// Integer `p'` with `G^q(x) = x + p'` on the orbit, for this lift.
    pub lift_offset: i64,
    pub multiplier: T,
    pub stability: Stability,
}

impl<T: Real> CircleCycle<T> {
    /// Circle distance from `x` to the nearest orbit point.
    pub fn distance(&self, x: T) -> T {
        self.angles.iter().map(|&a| circle_dist(a, x)).fold(T::infinity(), T::min)
    }
}

impl<T: Real> Serialize for CircleCycle<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let f = |v: &[T]| v.iter().map(|x| Sig17(x.to_f64_lossy())).collect::<Vec<_>>();
        let mut s = serializer.serialize_struct("CircleCycle", 6)?;
        s.serialize_field("angles", &f(&self.angles))?;
        s.serialize_field("p", &self.p)?;
        s.serialize_field("q", &self.q)?;
        s.serialize_field("lift_offset", &self.lift_offset)?;
        s.serialize_field("multiplier", &Sig17(self.multiplier.to_f64_lossy()))?;
        s.serialize_field("stability", &self.stability)?;
        s.end()
    }
}

/// Monotone grid envelopes of the lift, used for the rotation interval.
#[derive(Debug, Clone)]
pub struct Envelopes<T> {
    /// `G` at the grid points `i / n`.
    pub values: Vec<T>,
    /// Max of `G` over grid points `y <= i/n`, periodically extended.
    pub upper: Vec<T>,
    /// Min of `G` over grid points `y >= i/n`, periodically extended.
    pub lower: Vec<T>,
    /// Bound on how far `G` rises above or dips below its values at the
    /// ends of a grid cell: `Lip / 2n`.
    pub margin: T,
}

impl<T: Real> Envelopes<T> {
    fn n(&self) -> usize {
        self.values.len()
    }

    fn cell(&self, x: T) -> (T, usize) {
        let k = x.floor();
        let pos = ((x - k) * T::from_usize(self.n()).unwrap()).floor();
        (k, pos.to_usize().unwrap_or(0).min(self.n() - 1))
    }

    /// Monotone step map `F_u >= G`: on the cell `[i/n, (i+1)/n)` it takes
    /// the grid max through the right endpoint plus the margin.
    pub fn upper_at(&self, x: T) -> T {
        let (k, i) = self.cell(x);
        let top = if i + 1 == self.n() { self.upper[0] + T::one() } else { self.upper[i + 1] };
        top + k + self.margin
    }

    /// Monotone step map `F_l <= G`: on the cell `[i/n, (i+1)/n)` it takes
    /// the grid min from the left endpoint minus the margin.
    pub fn lower_at(&self, x: T) -> T {
        let (k, i) = self.cell(x);
        self.lower[i] + k - self.margin
    }
}

/// The lift `G(x) = x + 2dα + d·Arg(e^{4πix} - 2r e^{2πix} + r²)/2π` of
/// `g = e^{4πidα} B_r` restricted to the circle.
///
/// For `r > 1` the quadratic `w² - 2rw + r²` never meets the negative real
/// axis on `|w| = 1`, so the principal argument is already continuous in `x`
/// and no winding bookkeeping is needed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleLift<T> {
    d: u32,
    r: T,
    alpha: T,
}

impl<T: Real> CircleLift<T> {
    pub fn new(d: u32, r: T, alpha: T) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("d must be at least 1".into()));
        }
        if !(r > T::one()) || !r.is_finite() || !alpha.is_finite() {
            return Err(Error::InvalidParameter("the circle lift needs finite r > 1".into()));
        }
        Ok(Self { d, r, alpha })
    }

    /// Lift of the circle map of `params`, whose `|a|` must exceed 1.
    pub fn from_params(params: &MapParams<T>) -> Result<Self> {
        if params.r() <= T::one() + T::lit(REGION_EPS) {
            return Err(Error::RegionMismatch);
        }
        Self::new(params.d(), params.r(), params.alpha())
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn r(&self) -> T {
        self.r
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    fn dt(&self) -> T {
        T::from_u32(self.d).unwrap()
    }

    pub fn eval(&self, x: T) -> T {
        let (s, c) = (T::tau() * frac(x)).sin_cos();
        let r = self.r;
        // w² - 2rw + r² with w = e^{2πix}
        let re = c * c - s * s - T::lit(2.0) * r * c + r * r;
        let im = T::lit(2.0) * s * c - T::lit(2.0) * r * s;
        let dt = self.dt();
        x + T::lit(2.0) * dt * self.alpha + dt * im.atan2(re) / T::tau()
    }

    pub fn derivative(&self, x: T) -> T {
        let r = self.r;
        let dt = self.dt();
        let c = (T::tau() * frac(x)).cos();
        dt + T::one() + dt * (T::one() - r * r) / (T::one() - T::lit(2.0) * r * c + r * r)
    }

    /// `G^n(x)`.
    pub fn iterate(&self, mut x: T, n: usize) -> T {
        for _ in 0..n {
            x = self.eval(x);
        }
        x
    }

    /// `G^n(x)` and `(G^n)'(x)`.
    fn iterate_with_derivative(&self, mut x: T, n: usize) -> (T, T) {
        let mut dx = T::one();
        for _ in 0..n {
            dx = dx * self.derivative(x);
            x = self.eval(x);
        }
        (x, dx)
    }

    /// Critical angles: `[x_+, x_-]` with `x_- = -x_+` inside the
    /// endomorphism range, `[0]` at `r = 2d+1`, empty beyond.
    ///
    /// `x_+ > 0` is a local minimum of the lift, `x_-` a local maximum.
    pub fn critical_angles(&self) -> Vec<T> {
        let dt = self.dt();
        let k = T::lit(2.0) * dt + T::one();
        let r = self.r;
        if (r - k).abs() <= T::lit(REGION_EPS) {
            return vec![T::zero()];
        }
        if r > k {
            return Vec::new();
        }
        let c = ((k + r * r) / (T::lit(2.0) * r * (dt + T::one()))).min(T::one()).max(-T::one());
        let x = c.acos() / T::tau();
        vec![x, -x]
    }

    /// Solves `G(x) = target` on `[lo, hi]`, where `G` is increasing.
    pub(crate) fn solve_increasing(&self, target: T, mut lo: T, mut hi: T) -> Option<T> {
        let (flo, fhi) = (self.eval(lo) - target, self.eval(hi) - target);
        if flo > T::zero() || fhi < T::zero() {
            return None;
        }
        for _ in 0..200 {
            let mid = (lo + hi) / T::lit(2.0);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some((lo + hi) / T::lit(2.0))
    }

    /// Rotation number from the orbit of `x0`, with an attempted rational lock.
    pub fn rotation_number(&self, x0: T, n_iter: usize, q_max: u32) -> RotationEstimate<T> {
        let n_iter = n_iter.max(1);
        let xn = self.iterate(x0, n_iter);
        let nt = T::from_usize(n_iter).unwrap();
        let lift_value = (xn - x0) / nt;
        let error_bound = T::lit(2.0) / nt;
        let rational_lock = self.find_lock(lift_value, error_bound, xn, q_max);
        RotationEstimate { value: frac(lift_value), error_bound, rational_lock, lift_value }
    }

    fn find_lock(&self, est: T, bound: T, hint: T, q_max: u32) -> Option<RationalLock> {
        let mut candidates: Vec<(u64, u32, i64)> = Vec::new();
        for q in 1..=q_max {
            let qt = T::from_u32(q).unwrap();
            let lo = ((est - bound) * qt).ceil().to_i64()?;
            let hi = ((est + bound) * qt).floor().to_i64()?;
            for p in lo..=hi {
                if p.gcd(&(q as i64)) == 1 {
                    candidates.push((stern_brocot_depth(p.rem_euclid(q as i64) as u64, q as u64), q, p));
                }
            }
        }
        candidates.sort();
        candidates
            .into_iter()
            .find(|&(_, q, p)| self.confirm_cycle(p, q, hint))
            .map(|(_, q, p)| RationalLock::from_lift(p, q))
    }

    /// Confirms a root of `G^q(x) - x - p` by polishing the hint, falling back
    /// to a sign-change scan over the circle.
    fn confirm_cycle(&self, p: i64, q: u32, hint: T) -> bool {
        let tol = T::lit(CYCLE_TOL);
        let pt = T::from_i64(p).unwrap();
        let phi = |x: T| self.iterate(x, q as usize) - x - pt;
        if let Some(x) = self.newton_cycle(p, q, frac(hint)) {
            if phi(x).abs() <= tol {
                return true;
            }
        }
        let n = 512;
        let grid: Vec<T> = (0..=n).map(|i| phi(T::from_usize(i).unwrap() / T::from_usize(n).unwrap())).collect();
        for i in 0..n {
            if grid[i] == T::zero() {
                return true;
            }
            if grid[i] * grid[i + 1] < T::zero() {
                let a = T::from_usize(i).unwrap() / T::from_usize(n).unwrap();
                let b = T::from_usize(i + 1).unwrap() / T::from_usize(n).unwrap();
                let x = self.bisect_cycle(p, q, a, b);
                if phi(x).abs() <= tol {
                    return true;
                }
            }
        }
        false
    }

    /// Damped Newton on `G^q(x) - x - p`; `None` if it stalls.
    fn newton_cycle(&self, p: i64, q: u32, mut x: T) -> Option<T> {
        let pt = T::from_i64(p).unwrap();
        let step_cap = T::lit(0.05);
        for _ in 0..40 {
            let (y, dy) = self.iterate_with_derivative(x, q as usize);
            let f = y - x - pt;
            if f.abs() <= T::epsilon() * T::lit(16.0) {
                return Some(x);
            }
            let slope = dy - T::one();
            if slope == T::zero() || !slope.is_finite() {
                return None;
            }
            let step = (f / slope).max(-step_cap).min(step_cap);
            x = x - step;
        }
        Some(x)
    }

    fn bisect_cycle(&self, p: i64, q: u32, mut a: T, mut b: T) -> T {
        let pt = T::from_i64(p).unwrap();
        let phi = |x: T| self.iterate(x, q as usize) - x - pt;
        let fa = phi(a);
        for _ in 0..200 {
            let m = (a + b) / T::lit(2.0);
            if m <= a || m >= b {
                break;
            }
            let fm = phi(m);
            if fm == T::zero() {
                return m;
            }
            if (fm < T::zero()) == (fa < T::zero()) {
                a = m;
            } else {
                b = m;
            }
        }
        let x = (a + b) / T::lit(2.0);
        // a couple of Newton steps for the last bits; keep them only if they help
        let mut best = x;
        let mut best_f = phi(x).abs();
        let mut y = x;
        for _ in 0..3 {
            let (g, dg) = self.iterate_with_derivative(y, q as usize);
            let slope = dg - T::one();
            if slope == T::zero() || !slope.is_finite() {
                break;
            }
            y = y - (g - y - pt) / slope;
            let fy = phi(y).abs();
            if fy < best_f {
                best = y;
                best_f = fy;
            }
        }
        best
    }

    /// Grid envelopes on `grid_n` points; `F_l <= G <= F_u` everywhere.
    pub fn envelopes(&self, grid_n: usize) -> Envelopes<T> {
        let n = grid_n.max(2);
        let nt = T::from_usize(n).unwrap();
        let values: Vec<T> = (0..n).map(|i| self.eval(T::from_usize(i).unwrap() / nt)).collect();
        // upper[i] = max(max_{j<=i} G_j, max_{j>i} (G_j - 1))
        let mut prefix_max = vec![T::neg_infinity(); n];
        let mut suffix_max = vec![T::neg_infinity(); n + 1];
        let mut prefix_min = vec![T::infinity(); n + 1];
        let mut suffix_min = vec![T::infinity(); n];
        for i in 0..n {
            prefix_max[i] = if i == 0 { values[0] } else { prefix_max[i - 1].max(values[i]) };
            prefix_min[i + 1] = prefix_min[i].min(values[i] + T::one());
        }
        for i in (0..n).rev() {
            suffix_max[i] = suffix_max[i + 1].max(values[i] - T::one());
            suffix_min[i] = if i == n - 1 { values[i] } else { suffix_min[i + 1].min(values[i]) };
        }
        let upper = (0..n).map(|i| prefix_max[i].max(suffix_max[i + 1])).collect();
        // lower[i] = min(min_{j>=i} G_j, min_{j<i} (G_j + 1))
        let lower = (0..n).map(|i| suffix_min[i].min(prefix_min[i])).collect();
        let margin = self.lipschitz() / (T::lit(2.0) * nt);
        Envelopes { values, upper, lower, margin }
    }

    /// Largest `|G'|` on the circle, attained at `x = 0` or `x = 1/2`.
    fn lipschitz(&self) -> T {
        self.derivative(T::zero()).abs().max(self.derivative(T::lit(0.5)).abs())
    }

    /// Rotation interval from the rotation numbers of the grid envelopes.
    ///
    /// The envelopes bound `G` from both sides, so `[lo, hi]` encloses the
    /// rotation set; `error_bound` covers only the finite orbit length.
    pub fn rotation_interval(&self, grid_n: usize, n_iter: usize) -> RotationInterval<T> {
        let n_iter = n_iter.max(1);
        let nt = T::from_usize(n_iter).unwrap();
        let k = T::lit(2.0) * self.dt() + T::one();
        if self.r >= k - T::lit(REGION_EPS) {
            let est = self.rotation_number(T::zero(), n_iter, 0);
            return RotationInterval { lo: est, hi: est };
        }
        let env = self.envelopes(grid_n);
        let mut xu = T::zero();
        let mut xl = T::zero();
        for _ in 0..n_iter {
            xu = env.upper_at(xu);
            xl = env.lower_at(xl);
        }
        let (rho_u, rho_l) = (xu / nt, xl / nt);
        let bound = T::lit(2.0) / nt;
        let shift = rho_l.floor();
        let mk = |v: T| RotationEstimate { value: v - shift, error_bound: bound, rational_lock: None, lift_value: v };
        RotationInterval { lo: mk(rho_l), hi: mk(rho_u) }
    }

    /// Lift offsets `p' ≡ p (mod q)` in `-q..=2q` tried for the cycle equation.
    fn offset_window(p: i64, q: u32) -> Vec<i64> {
        let q = q as i64;
        let base = p.rem_euclid(q);
        let mut out: Vec<i64> = (-2..=2).map(|k| base + k * q).filter(|&v| v >= -q && v <= 2 * q).collect();
        out.sort_by_key(|&v| ((v - p).abs(), v));
        out
    }

    /// All cycles of `G^q(x) - x - p' = 0` over the lift-offset window, each
    /// reported once.
    pub fn circle_cycles(&self, p: i64, q: u32) -> Result<Vec<CircleCycle<T>>> {
        if q == 0 {
            return Err(Error::InvalidParameter("q must be at least 1".into()));
        }
        let qn = q as usize;
        let n = CYCLE_GRID;
        let nt = T::from_usize(n).unwrap();
        let xs: Vec<T> = (0..=n).map(|i| T::from_usize(i).unwrap() / nt).collect();
        let psi: Vec<T> = xs.iter().map(|&x| self.iterate(x, qn) - x).collect();
        let tol = T::lit(CYCLE_TOL);
        let mut cycles: Vec<CircleCycle<T>> = Vec::new();
        let mut lower: Option<u32> = None;
        for offset in Self::offset_window(p, q) {
            let pt = T::from_i64(offset).unwrap();
            let mut roots = Vec::new();
            for i in 0..n {
                let (a, b) = (psi[i] - pt, psi[i + 1] - pt);
                if a == T::zero() {
                    roots.push(xs[i]);
                } else if a * b < T::zero() {
                    roots.push(self.bisect_cycle(offset, q, xs[i], xs[i + 1]));
                }
            }
            for x in roots {
                let x = frac(x);
                if (self.iterate(x, qn) - x - pt).abs() > tol {
                    continue;
                }
                if cycles.iter().any(|c| c.distance(x) <= T::lit(1e-7)) {
                    continue;
                }
                let period = self.true_period(x, q);
                if period < q {
                    lower = Some(lower.map_or(period, |l: u32| l.min(period)));
                    continue;
                }
                cycles.push(self.build_cycle(x, offset, q));
            }
        }
        if cycles.is_empty() {
            if let Some(true_period) = lower {
                return Err(Error::LowerPeriod { true_period, requested: q });
            }
        }
        Ok(cycles)
    }

    fn true_period(&self, x: T, q: u32) -> u32 {
        let mut y = x;
        for k in 1..q {
            y = self.eval(y);
            if q % k == 0 && circle_dist(y, x) <= T::lit(1e-9) {
                return k;
            }
        }
        q
    }

    fn build_cycle(&self, x: T, offset: i64, q: u32) -> CircleCycle<T> {
        let mut orbit = Vec::with_capacity(q as usize);
        let mut multiplier = T::one();
        let mut y = x;
        for _ in 0..q {
            orbit.push(frac(y));
            multiplier = multiplier * self.derivative(y);
            y = self.eval(y);
        }
        let start = (0..orbit.len())
            .min_by(|&i, &j| orbit[i].partial_cmp(&orbit[j]).unwrap())
            .unwrap_or(0);
        orbit.rotate_left(start);
        let mut angles = orbit.clone();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let lock = RationalLock::from_lift(offset, q);
        let p = if lock.q == q { lock.p } else { offset.rem_euclid(q as i64) as u32 };
        CircleCycle { angles, orbit, p, q, lift_offset: offset, multiplier, stability: Stability::classify(multiplier) }
    }

    /// The cycle with rotation number `p/q` of smallest `|multiplier|`.
    pub fn find_circle_cycle(&self, p: i64, q: u32) -> Result<Option<CircleCycle<T>>> {
        let cycles = self.circle_cycles(p, q)?;
        Ok(cycles
            .into_iter()
            .min_by(|a, b| a.multiplier.abs().partial_cmp(&b.multiplier.abs()).unwrap()))
    }

    /// Circle map on `[0, 1)`.
    fn step(&self, x: T) -> T {
        frac(self.eval(x))
    }
}

/// Depth of `p/q ∈ [0, 1)` in the Stern–Brocot tree (sum of continued
/// fraction quotients).
fn stern_brocot_depth(mut p: u64, mut q: u64) -> u64 {
    let mut depth = 0;
    while p != 0 {
        depth += q / p;
        let r = q % p;
        q = p;
        p = r;
    }
    depth
}

/// Where a critical orbit ends up after the burn-in.
enum Fate {
    /// Within the proximity bound of the given cycle through the whole window.
    Cycle(usize),
    /// Settled on some other periodic orbit.
    Elsewhere,
    Unknown,
}

fn critical_fate<T: Real>(lift: &CircleLift<T>, x0: T, cycles: &[CircleCycle<T>]) -> Fate {
    let eps = T::lit(ADJ_PROXIMITY);
    let mut x = frac(x0);
    for _ in 0..ADJ_BURN_IN {
        x = lift.step(x);
    }
    let mut tracking: Vec<bool> = cycles.iter().map(|c| c.distance(x) <= eps).collect();
    let start = x;
    let mut first_return = None;
    for k in 1..=ADJ_WINDOW {
        x = lift.step(x);
        for (flag, c) in tracking.iter_mut().zip(cycles) {
            *flag = *flag && c.distance(x) <= eps;
        }
        if first_return.is_none() && k <= ADJ_MAX_PERIOD && circle_dist(x, start) <= eps {
            first_return = Some(k);
        }
    }
    if let Some(i) = tracking.iter().position(|&t| t) {
        return Fate::Cycle(i);
    }
    if first_return.is_some() {
        Fate::Elsewhere
    } else {
        Fate::Unknown
    }
}

/// Whether both critical orbits are captured by one non-repelling `p/q`
/// circle cycle.
pub fn is_adjacent<T: Real>(params: &MapParams<T>, p: i64, q: u32) -> Result<bool> {
    if params.classify_region() != RegionClass::Endomorphism {
        return Err(Error::RegionMismatch);
    }
    let lift = CircleLift::from_params(params)?;
    let cycles = match lift.circle_cycles(p, q) {
        Ok(c) => c,
        Err(Error::LowerPeriod { .. }) => Vec::new(),
        Err(e) => return Err(e),
    };
    let attracting: Vec<CircleCycle<T>> = cycles.into_iter().filter(|c| !c.stability.is_repelling()).collect();
    if attracting.is_empty() {
        return Ok(false);
    }
    let fates: Vec<Fate> = lift.critical_angles().into_iter().map(|x| critical_fate(&lift, x, &attracting)).collect();
    match fates.as_slice() {
        [Fate::Cycle(i), Fate::Cycle(j)] => Ok(i == j),
        [Fate::Unknown, _] | [_, Fate::Unknown] => Err(Error::Inconclusive),
        _ => Ok(false),
    }
}

/// Finds α in `bracket` where the critical angle `x_+` is `q`-periodic with
/// rotation number `p/q`, by bisection on `G^q(x_+) - x_+ - p'`.
pub fn find_superattracting_alpha<T: Real>(d: u32, r: T, p: i64, q: u32, bracket: (T, T)) -> Result<T> {
    if q == 0 {
        return Err(Error::InvalidParameter("q must be at least 1".into()));
    }
    let outer = T::lit(2.0) * T::from_u32(d).unwrap_or(T::zero()) + T::one();
    if d == 0 || !(r > T::one()) || r > outer + T::lit(REGION_EPS) {
        return Err(Error::InvalidParameter("need d >= 1 and 1 < r <= 2d+1".into()));
    }
    let (lo0, hi0) = bracket;
    if !(lo0 < hi0) {
        return Err(Error::InvalidParameter("bracket must satisfy lo < hi".into()));
    }
    let x_plus = CircleLift::new(d, r, T::zero())?.critical_angles()[0];
    let f = |alpha: T, offset: T| {
        let lift = CircleLift { d, r, alpha };
        lift.iterate(x_plus, q as usize) - x_plus - offset
    };
    for offset in CircleLift::<T>::offset_window(p, q) {
        let pt = T::from_i64(offset).unwrap();
        let (mut lo, mut hi) = (lo0, hi0);
        let (flo, fhi) = (f(lo, pt), f(hi, pt));
        if flo * fhi > T::zero() {
            continue;
        }
        if flo == T::zero() {
            return Ok(lo);
        }
        for _ in 0..200 {
            let mid = (lo + hi) / T::lit(2.0);
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = f(mid, pt);
            if fm == T::zero() {
                return Ok(mid);
            }
            if (fm < T::zero()) == (flo < T::zero()) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let best = if f(lo, pt).abs() <= f(hi, pt).abs() { lo } else { hi };
        let tol = T::lit(1e-12).max(T::epsilon() * T::lit(1e3));
        if f(best, pt).abs() > tol {
            return Err(Error::VerificationFailure("superattracting residual above tolerance".into()));
        }
        return Ok(best);
    }
    Err(Error::NoSignChange)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    fn lift(d: u32, r: f64, alpha: f64) -> CircleLift<f64> {
        CircleLift::new(d, r, alpha).unwrap()
    }

    #[test]
    fn lift_values() {
        let l = lift(1, 3.0, 0.0);
        assert_eq!(l.eval(0.0), 0.0);
        // continuous lift: G(1/2) = 1/2, which is 3/2 up to the integer offset
        assert!((l.eval(0.5) - 0.5).abs() < 1e-12);
        for k in -3..4 {
            for &x in &[0.1, 0.37, 0.81] {
                assert!((l.eval(x + k as f64) - l.eval(x) - k as f64).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn lift_matches_plane_map() {
        for &(d, r, alpha) in &[(1, 3.0, 0.1), (2, 2.0, -0.07), (3, 8.5, 0.05), (2, 4.9, 0.125)] {
            let l = lift(d, r, alpha);
            let m = MapParams::new(d, Complex::new(r, 0.0)).unwrap();
            let rot = Complex::from_polar(1.0, std::f64::consts::TAU * 2.0 * d as f64 * alpha);
            for i in 0..200 {
                let x = i as f64 / 200.0 + 0.001;
                let lhs = Complex::from_polar(1.0, std::f64::consts::TAU * l.eval(x));
                let rhs = rot * m.apply(Complex::from_polar(1.0, std::f64::consts::TAU * x));
                assert!((lhs - rhs).norm() < 1e-10, "d={d} r={r} x={x}");
            }
        }
    }

    #[test]
    fn derivative_values() {
        let l = lift(1, 4.0, 0.3);
        assert!((l.derivative(0.0) - 1.0 / 3.0).abs() < 1e-14);
        assert!((l.derivative(0.5) - 7.0 / 5.0).abs() < 1e-14);
        assert!(lift(2, 5.0, 0.0).derivative(0.0).abs() < 1e-14);
        let l = lift(2, 2.3, 0.04);
        for i in 0..50 {
            let x = i as f64 / 50.0 + 0.003;
            let h = 1e-6;
            let fd = (l.eval(x + h) - l.eval(x - h)) / (2.0 * h);
            assert!((fd - l.derivative(x)).abs() < 1e-6);
        }
    }

    #[test]
    fn critical_angle_values() {
        let a = lift(1, 2.0, 0.0).critical_angles();
        assert_eq!(a.len(), 2);
        assert!(((std::f64::consts::TAU * a[0]).cos() - 7.0 / 8.0).abs() < 1e-14);
        assert!((a[0] - 0.080430).abs() < 1e-6 && (a[0] + a[1]).abs() < 1e-15);
        assert_eq!(lift(1, 3.0, 0.0).critical_angles(), vec![0.0]);
        assert!(lift(2, 6.0, 0.0).critical_angles().is_empty());
        let l = lift(3, 4.2, 0.01);
        for x in l.critical_angles() {
            assert!(l.derivative(x).abs() < 1e-12);
        }
        // the angle of c_+ matches x_+ after undoing the rotation by arg(a)
        let m = MapParams::new(1, Complex::new(2.0, 0.0)).unwrap();
        let (cp, _) = m.free_critical_points().unwrap();
        assert!((cp.arg() / std::f64::consts::TAU - a[0]).abs() < 1e-14);
    }

    #[test]
    fn rotation_number_attracting_fixed_point() {
        let est = lift(1, 4.0, 0.0).rotation_number(0.3, 2000, 12);
        assert!(est.value < 1e-3 || est.value > 1.0 - 1e-3);
        assert_eq!(est.rational_lock, Some(RationalLock { p: 0, q: 1 }));
    }

    #[test]
    fn superattracting_half_cycle() {
        let alpha = find_superattracting_alpha(2, 2.0, 1, 2, (-0.125, 0.125)).unwrap();
        let l = lift(2, 2.0, alpha);
        let xp = l.critical_angles()[0];
        let res = l.iterate(xp, 2) - xp;
        assert!((res - res.round()).abs() <= 1e-12);
        let est = l.rotation_number(0.1, 4000, 12);
        assert_eq!(est.rational_lock, Some(RationalLock { p: 1, q: 2 }));
        let iv = l.rotation_interval(1024, 4000);
        assert!(iv.contains(0.5, iv.slack()));
        // the other critical orbit is captured by an attracting fixed point here
        let m = MapParams::from_polar(2, 2.0, alpha).unwrap();
        assert_eq!(is_adjacent(&m, 1, 2), Ok(false));
        let cyc = l.find_circle_cycle(1, 2).unwrap().unwrap();
        assert_eq!(cyc.stability, Stability::SuperAttracting);
    }

    #[test]
    fn superattracting_errors() {
        assert_eq!(find_superattracting_alpha(2, 2.0, 1, 2, (0.24, 0.25)), Err(Error::NoSignChange));
        let a0 = find_superattracting_alpha(1, 2.0, 0, 1, (-0.25, 0.25)).unwrap();
        let l = lift(1, 2.0, a0);
        let xp = l.critical_angles()[0];
        assert!(circle_dist(l.eval(xp), xp) < 1e-12);
    }

    #[test]
    fn circle_cycle_examples() {
        let l = lift(1, 4.0, 0.0);
        let c = l.find_circle_cycle(0, 1).unwrap().unwrap();
        assert!(c.angles[0].abs() < 1e-12);
        assert!((c.multiplier - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(c.stability, Stability::Attracting);
        let all = l.circle_cycles(1, 1).unwrap();
        let half = all.iter().find(|c| (c.angles[0] - 0.5).abs() < 1e-12).unwrap();
        assert!((half.multiplier - 7.0 / 5.0).abs() < 1e-12);
        assert_eq!(half.stability, Stability::Repelling);
        assert_eq!(all.len(), 2);
    }

    #[test]
    fn no_cycle_outside_tongue() {
        // rotation number near 0.3 at this α: no 1/3-cycle
        let d = 2;
        let mut found = None;
        for i in 0..400 {
            let alpha = -0.125 + i as f64 * 0.25 / 400.0;
            let l = lift(d, 6.0, alpha);
            let est = l.rotation_number(0.0, 4000, 0);
            if (est.value - 0.3).abs() < 0.01 {
                found = Some(l);
                break;
            }
        }
        let l = found.expect("rotation 0.3 reachable");
        assert!(l.find_circle_cycle(1, 3).unwrap().is_none());
    }

    #[test]
    fn lower_period_is_rejected() {
        let l = lift(1, 4.0, 0.0);
        assert!(matches!(l.circle_cycles(0, 2), Err(Error::LowerPeriod { true_period: 1, requested: 2 })));
    }

    #[test]
    fn adjacency_examples() {
        let m = MapParams::new(1, Complex::new(4.0, 0.0)).unwrap();
        assert_eq!(is_adjacent(&m, 0, 1), Err(Error::RegionMismatch));
        let m = MapParams::new(2, Complex::new(1.5, 0.0)).unwrap();
        assert!((CircleLift::<f64>::from_params(&m).unwrap().derivative(0.0) + 7.0).abs() < 1e-12);
        assert_eq!(is_adjacent(&m, 0, 1), Ok(false));
    }

    /// Iterates the plane map from both free critical points.
    fn plane_fates(m: &MapParams<f64>, n: usize) -> (Complex<f64>, Complex<f64>) {
        let (mut u, mut v) = m.free_critical_points().unwrap();
        for _ in 0..n {
            u = m.apply(u);
            v = m.apply(v);
        }
        (u, v)
    }

    #[test]
    fn adjacency_against_plane_orbits() {
        let alpha = find_superattracting_alpha(2, 2.0, 1, 2, (-0.125, 0.125)).unwrap();
        let m = MapParams::from_polar(2, 2.0, alpha).unwrap();
        let (u, v) = plane_fates(&m, 20_000);
        // c_+ sits on a 2-cycle, c_- on a fixed point
        assert!((m.apply(m.apply(u)) - u).norm() < 1e-10 && (m.apply(u) - u).norm() > 0.1);
        assert!((m.apply(v) - v).norm() < 1e-10);

        let m = MapParams::from_polar(2, 2.0, -0.08375).unwrap();
        let (u, v) = plane_fates(&m, 20_000);
        assert!((m.apply(m.apply(u)) - u).norm() < 1e-10 && (m.apply(u) - u).norm() > 0.1);
        assert!((u - v).norm() < 1e-8 || (m.apply(u) - v).norm() < 1e-8);
        assert_eq!(is_adjacent(&m, 1, 2), Ok(true));
    }

    #[test]
    fn rotation_interval_examples() {
        let iv = lift(2, 6.0, 0.07).rotation_interval(1024, 4000);
        assert!((iv.lo.value - iv.hi.value).abs() <= 2e-4);
        let iv = lift(1, 2.0, 0.0).rotation_interval(1024, 4000);
        assert!(iv.contains(0.0, iv.slack()));
        assert!(iv.lo.value <= iv.hi.value + iv.slack());
    }

    #[test]
    fn envelope_ordering() {
        let env = lift(2, 2.5, 0.03).envelopes(1024);
        for i in 0..1024 {
            assert!(env.lower[i] <= env.values[i] && env.values[i] <= env.upper[i]);
            if i > 0 {
                assert!(env.upper[i - 1] <= env.upper[i] && env.lower[i - 1] <= env.lower[i]);
            }
        }
    }

    #[test]
    fn stern_brocot() {
        assert_eq!(stern_brocot_depth(0, 1), 0);
        assert_eq!(stern_brocot_depth(1, 2), 2);
        assert_eq!(stern_brocot_depth(1, 3), 3);
        assert_eq!(stern_brocot_depth(2, 5), 4);
    }

    #[test]
    fn lock_reduction() {
        assert_eq!(RationalLock::from_lift(-1, 2), RationalLock { p: 1, q: 2 });
        assert_eq!(RationalLock::from_lift(3, 1), RationalLock { p: 0, q: 1 });
        assert_eq!(RationalLock::from_lift(5, 3), RationalLock { p: 2, q: 3 });
    }
}
