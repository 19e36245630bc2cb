//! Böttcher rays of the superattracting basins of ∞ and 0, traced by
//! pulling back along the forward orbit of the angle, and the
//! bi-accessibility check built on them.

use num_complex::Complex;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::circle::{is_adjacent, CircleCycle, CircleLift};
use crate::error::{Error, Result};
use crate::fmt::{sig17, Sig17};
use crate::map::{involution, ComplexJson, MapParams, RegionClass, SpherePoint};
use crate::rotation::{enumerate_cycles, mn_apply, RationalAngle};
use crate::scalar::Real;

/// Largest allowed distance between a landing point and its cycle point.
pub const GAP_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Basin {
    Zero,
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RayStatus {
    Landed,
    BudgetExhausted,
    BranchLost,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayOptions<T> {
    /// Samples per factor `d+1` of potential.
    pub substeps: usize,
    /// Samples whose diameter decides landing.
    pub tail: usize,
    pub landing_tol: T,
    pub newton_iters: usize,
}

impl<T: Real> Default for RayOptions<T> {
    fn default() -> Self {
        RayOptions { substeps: 8, tail: 10, landing_tol: T::lit(1e-8), newton_iters: 50 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoettcherRay<T> {
    pub basin: Basin,
    pub angle: RationalAngle,
    /// Decreasing.
    pub potentials: Vec<T>,
    pub points: Vec<Complex<T>>,
    pub landing: Option<Complex<T>>,
    pub status: RayStatus,
    pub tail_diameter: T,
}

impl<T: Real> BoettcherRay<T> {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,potential,re,im\n");
        for (k, (t, z)) in self.potentials.iter().zip(&self.points).enumerate() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                k,
                sig17(t.to_f64_lossy()),
                sig17(z.re.to_f64_lossy()),
                sig17(z.im.to_f64_lossy())
            ));
        }
        out
    }
}

/// Leading factor `μ` of the Böttcher map at ∞, `φ(z) ≈ μ z`.
///
/// `B(z) ≈ (-1/ā)^d z^{d+1}` near ∞, so `μ^d = (-1/ā)^d`; of the `d` choices
/// we take `μ = -1/ā`, under which the ray of angle 0 is the ray asymptotic
/// to the direction of `-a`.
pub fn boettcher_factor<T: Real>(params: &MapParams<T>) -> Complex<T> {
    let a = params.a();
    if a.norm() == T::zero() {
        return Complex::new(T::one(), T::zero());
    }
    -(a.conj().inv())
}

/// Default start modulus `(100 max(|a|, 1))^{d+1}`.
pub fn default_r0<T: Real>(params: &MapParams<T>) -> T {
    (T::lit(100.0) * params.r().max(T::one())).powi(params.d() as i32 + 1)
}

/// Leading-order inverse Böttcher point at modulus `r0` and `angle`.
pub fn boettcher_start<T: Real>(params: &MapParams<T>, basin: Basin, angle: T, r0: T) -> Complex<T> {
    match basin {
        Basin::Infinity => Complex::from_polar(r0, T::tau() * angle) / boettcher_factor(params),
        Basin::Zero => {
            let w = boettcher_start(params, Basin::Infinity, -angle, r0);
            involution(SpherePoint::Finite(w)).finite().expect("start is finite and non-zero")
        }
    }
}

/// Solves `B(w) = target` by damped Newton from `seed`.
fn pullback<T: Real>(params: &MapParams<T>, target: Complex<T>, seed: Complex<T>, iters: usize) -> Option<Complex<T>> {
    let scale = target.norm().max(T::min_positive_value());
    let mut w = seed;
    let mut res = (params.apply(w) - target).norm();
    for _ in 0..iters {
        if res <= T::epsilon() * T::lit(4.0) * scale {
            break;
        }
        let dw = params.derivative_at(w).ok()?;
        let step = (params.apply(w) - target) / dw;
        if !(step.re.is_finite() && step.im.is_finite()) {
            return None;
        }
        let mut lambda = T::one();
        let mut improved = false;
        for _ in 0..30 {
            let cand = w - step * lambda;
            let r = (params.apply(cand) - target).norm();
            if r < res {
                w = cand;
                res = r;
                improved = true;
                break;
            }
            lambda = lambda * T::lit(0.5);
        }
        if !improved || step.norm() * lambda <= T::epsilon() * w.norm() {
            break;
        }
    }
    (res <= T::lit(1e-10) * scale).then_some(w)
}

/// Step length in the coordinate where the ray comes in from ∞, so that
/// both basins see the same steps.
fn step_len<T: Real>(basin: Basin, a: Complex<T>, b: Complex<T>) -> T {
    match basin {
        Basin::Infinity => (a - b).norm(),
        Basin::Zero => (a - b).norm() / (a.norm() * b.norm()),
    }
}

fn tail_diameter<T: Real>(pts: &[Complex<T>]) -> T {
    let mut d = T::zero();
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            d = d.max((a - b).norm());
        }
    }
    d
}

/// Forward orbit of `angle` under `m_{d+1}` until it repeats, with the
/// index each element maps to.
fn angle_orbit(n: u32, angle: RationalAngle) -> (Vec<RationalAngle>, Vec<usize>, Option<usize>) {
    let mut orbit = vec![angle];
    loop {
        let next = mn_apply(n, *orbit.last().unwrap());
        if let Some(i) = orbit.iter().position(|&t| t == next) {
            let mut succ: Vec<usize> = (1..orbit.len()).collect();
            succ.push(i);
            // period of the starting angle, if it lies on the cycle
            let period = (i == 0).then_some(orbit.len());
            return (orbit, succ, period);
        }
        orbit.push(next);
    }
}

pub fn trace_ray<T: Real>(params: &MapParams<T>, basin: Basin, angle: RationalAngle, depth: usize) -> BoettcherRay<T> {
    trace_ray_with(params, basin, angle, depth, RayOptions::default())
}

/// Traces the ray at `angle` together with the rays of its forward orbit:
/// sample `i` of a ray solves `B(w) = ` sample `i - substeps` of the image
/// ray, seeded at sample `i - 1`.
pub fn trace_ray_with<T: Real>(
    params: &MapParams<T>,
    basin: Basin,
    angle: RationalAngle,
    depth: usize,
    opts: RayOptions<T>,
) -> BoettcherRay<T> {
    let d = params.d();
    let n = d + 1;
    let s = opts.substeps.max(1);
    let (orbit, succ, period) = angle_orbit(n, angle);
    let r0 = default_r0(params);
    let t0 = r0.ln();
    let nt = T::from_u32(n).unwrap();
    let potential = |i: usize| t0 * nt.powf(-T::from_usize(i).unwrap() / T::from_usize(s).unwrap());
    let total = (depth * s).max(s);

    let mut rays: Vec<Vec<Complex<T>>> = orbit
        .iter()
        .map(|th| {
            (0..s)
                .map(|i| boettcher_start(params, basin, T::lit(th.to_f64()), potential(i).exp()))
                .collect()
        })
        .collect();
    let mut status = RayStatus::BudgetExhausted;
    let mut diam = T::infinity();
    'levels: for i in s..total {
        let mut next = Vec::with_capacity(orbit.len());
        for (k, ray) in rays.iter().enumerate() {
            let target = rays[succ[k]][i - s];
            let seed = ray[i - 1];
            let prev_step = step_len(basin, ray[i - 1], ray[i - 2]);
            match pullback(params, target, seed, opts.newton_iters) {
                // branch continuity: a step may not exceed twice the previous one
                Some(w) if step_len(basin, w, seed) <= T::lit(2.0) * prev_step + T::lit(1e-14) => next.push(w),
                _ => {
                    status = RayStatus::BranchLost;
                    break 'levels;
                }
            }
        }
        for (ray, w) in rays.iter_mut().zip(next) {
            ray.push(w);
        }
        let pts = &rays[0];
        if pts.len() >= s + opts.tail {
            diam = tail_diameter(&pts[pts.len() - opts.tail..]);
            if diam <= opts.landing_tol {
                status = RayStatus::Landed;
                break;
            }
        }
    }
    let points = rays.swap_remove(0);
    let potentials: Vec<T> = (0..points.len()).map(potential).collect();
    let landing = (status == RayStatus::Landed).then(|| {
        let last = *points.last().unwrap();
        period
            .and_then(|k| polish_periodic(params, last, k))
            .filter(|z| (z - last).norm() <= T::lit(10.0) * diam + T::lit(1e-12))
            .unwrap_or(last)
    });
    if status != RayStatus::Landed && points.len() >= opts.tail {
        diam = tail_diameter(&points[points.len() - opts.tail..]);
    }
    BoettcherRay { basin, angle, potentials, points, landing, status, tail_diameter: diam }
}

/// Newton on `B^k(z) = z`, used to sharpen the landing point of a periodic ray.
fn polish_periodic<T: Real>(params: &MapParams<T>, mut z: Complex<T>, k: usize) -> Option<Complex<T>> {
    let one = Complex::new(T::one(), T::zero());
    for _ in 0..20 {
        let mut w = z;
        let mut dw = one;
        for _ in 0..k {
            dw = dw * params.derivative_at(w).ok()?;
            w = params.apply(w);
        }
        let step = (w - z) / (dw - one);
        if !(step.re.is_finite() && step.im.is_finite()) {
            return None;
        }
        z = z - step;
        if step.norm() <= T::epsilon() * T::lit(4.0) * z.norm().max(T::one()) {
            return Some(z);
        }
    }
    Some(z)
}

/// One traced ray of a bi-accessibility check.
#[derive(Debug, Clone, PartialEq)]
pub struct RayLanding<T> {
    pub basin: Basin,
    pub angle: RationalAngle,
    pub status: RayStatus,
    pub landing: Option<Complex<T>>,
    /// Index of the nearest cycle point.
    pub cycle_index: usize,
    pub gap: T,
}

impl<T: Real> Serialize for RayLanding<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("RayLanding", 6)?;
        s.serialize_field("basin", &self.basin)?;
        s.serialize_field("angle", &self.angle)?;
        s.serialize_field("status", &self.status)?;
        s.serialize_field("landing", &self.landing.map(ComplexJson))?;
        s.serialize_field("cycle_index", &self.cycle_index)?;
        s.serialize_field("gap", &Sig17(self.gap.to_f64_lossy()))?;
        s.end()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiAccessReport<T> {
    pub params: MapParams<T>,
    pub p: u32,
    pub q: u32,
    /// The repelling circle cycle the rays land on.
    pub circle_cycle: CircleCycle<T>,
    /// Plane points of `circle_cycle.angles`.
    pub cycle_points: Vec<Complex<T>>,
    pub infinity_angles: Vec<RationalAngle>,
    pub zero_angles: Vec<RationalAngle>,
    pub rays: Vec<RayLanding<T>>,
    pub gaps: Vec<T>,
    pub verdict: bool,
}

impl<T: Real> Serialize for BiAccessReport<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("BiAccessReport", 11)?;
        s.serialize_field("d", &self.params.d())?;
        s.serialize_field("a", &ComplexJson(self.params.a()))?;
        s.serialize_field("p", &self.p)?;
        s.serialize_field("q", &self.q)?;
        s.serialize_field("circle_cycle", &self.circle_cycle)?;
        s.serialize_field("cycle_points", &self.cycle_points.iter().map(|&z| ComplexJson(z)).collect::<Vec<_>>())?;
        s.serialize_field("infinity_angles", &self.infinity_angles)?;
        s.serialize_field("zero_angles", &self.zero_angles)?;
        s.serialize_field("rays", &self.rays)?;
        s.serialize_field("gaps", &self.gaps.iter().map(|g| Sig17(g.to_f64_lossy())).collect::<Vec<_>>())?;
        s.serialize_field("verdict", &self.verdict)?;
        s.end()
    }
}

/// Angles of the `p/q` cycles of `m_{d+1}` inside `[(d-1)/d, 1)`.
pub fn sector_angles(d: u32, p: u32, q: u32) -> Result<Vec<RationalAngle>> {
    let left = num_rational::Ratio::new(d as i64 - 1, d as i64);
    let mut out: Vec<RationalAngle> = enumerate_cycles(d + 1, q)?
        .into_iter()
        .filter(|c| (c.p, c.q) == (p, q))
        .filter(|c| c.points.iter().all(|t| t.value() >= left))
        .flat_map(|c| c.points)
        .collect();
    out.sort();
    Ok(out)
}

/// Checks that the rays of the sector cycle and their mirror images land
/// on a repelling `p/q` circle cycle, after confirming the parameter is
/// adjacent in the `p/q` tongue.
pub fn verify_biaccessible<T: Real>(params: &MapParams<T>, p: u32, q: u32, depth: usize) -> Result<BiAccessReport<T>> {
    match params.classify_region() {
        RegionClass::TrivialDisk => return Err(Error::NotAdjacent),
        RegionClass::Endomorphism => {
            if !matches!(is_adjacent(params, p as i64, q), Ok(true)) {
                return Err(Error::NotAdjacent);
            }
        }
        RegionClass::HomeoBoundary | RegionClass::Diffeo => {
            let lift = CircleLift::from_params(params)?;
            let cycles = lift.circle_cycles(p as i64, q).unwrap_or_default();
            if !cycles.iter().any(|c| !c.stability.is_repelling()) {
                return Err(Error::NotAdjacent);
            }
        }
    }
    match_landings(params, p, q, depth)
}

/// Ray tracing and landing matching without the adjacency precondition.
pub fn match_landings<T: Real>(params: &MapParams<T>, p: u32, q: u32, depth: usize) -> Result<BiAccessReport<T>> {
    if q == 0 || p >= q.max(1) {
        return Err(Error::InvalidParameter("need 0 <= p < q".into()));
    }
    let lift = CircleLift::from_params(params).map_err(|_| Error::NotAdjacent)?;
    let repelling: Vec<CircleCycle<T>> = lift
        .circle_cycles(p as i64, q)
        .unwrap_or_default()
        .into_iter()
        .filter(|c| c.stability.is_repelling())
        .collect();
    if repelling.is_empty() {
        return Err(Error::NoRepellingCycle);
    }
    let infinity_angles = sector_angles(params.d(), p, q)?;
    let mut zero_angles: Vec<RationalAngle> = infinity_angles.iter().map(RationalAngle::neg).collect();
    zero_angles.sort();
    let jobs: Vec<(Basin, RationalAngle)> = infinity_angles
        .iter()
        .map(|&t| (Basin::Infinity, t))
        .chain(zero_angles.iter().map(|&t| (Basin::Zero, t)))
        .collect();
    let traced: Vec<BoettcherRay<T>> = jobs.par_iter().map(|&(b, t)| trace_ray(params, b, t, depth)).collect();
    if let Some(bad) = traced.iter().find(|r| r.status != RayStatus::Landed) {
        return Err(Error::RayBudget { angle: bad.angle.to_string() });
    }

    // pick the repelling cycle the landings sit closest to
    let mut best: Option<BiAccessReport<T>> = None;
    for cycle in repelling {
        let cycle_points: Vec<Complex<T>> = cycle.angles.iter().map(|&x| params.circle_point(x)).collect();
        let rays: Vec<RayLanding<T>> = traced
            .iter()
            .map(|ray| {
                let z = ray.landing.expect("landed");
                let (idx, gap) = cycle_points
                    .iter()
                    .map(|c| (z - c).norm())
                    .enumerate()
                    .fold((0, T::infinity()), |acc, (i, g)| if g < acc.1 { (i, g) } else { acc });
                RayLanding { basin: ray.basin, angle: ray.angle, status: ray.status, landing: ray.landing, cycle_index: idx, gap }
            })
            .collect();
        let gaps: Vec<T> = rays.iter().map(|r| r.gap).collect();
        let tol = T::lit(GAP_TOL);
        let covered = |basin: Basin, i: usize| rays.iter().any(|r| r.basin == basin && r.cycle_index == i && r.gap <= tol);
        let on_circle = rays.iter().all(|r| (r.landing.unwrap().norm() - T::one()).abs() <= tol);
        let verdict = on_circle
            && gaps.iter().all(|&g| g <= tol)
            && (0..cycle_points.len()).all(|i| covered(Basin::Infinity, i) && covered(Basin::Zero, i));
        let worst = gaps.iter().fold(T::zero(), |a, &g| a.max(g));
        let better = best.as_ref().map_or(true, |b| {
            b.gaps.iter().fold(T::zero(), |a, &g| a.max(g)) > worst
        });
        if better {
            best = Some(BiAccessReport {
                params: *params,
                p,
                q,
                circle_cycle: cycle,
                cycle_points,
                infinity_angles: infinity_angles.clone(),
                zero_angles: zero_angles.clone(),
                rays,
                gaps,
                verdict,
            });
        }
    }
    Ok(best.expect("at least one repelling cycle"))
}
