use num_integer::Integer;
use num_rational::Ratio;
use serde::Serialize;

use super::angle::{mn_apply, RationalAngle};
use super::Q;
use crate::error::{Error, Result};

/// Largest period `enumerate_cycles` accepts.
pub const MAX_PERIOD: u32 = 12;
/// Largest `n^q - 1` `enumerate_cycles` will scan.
pub const MAX_POINTS: i64 = 1 << 26;

/// A period-`q` cycle of `m_n` that is a rotation set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MnCycle {
    pub n: u32,
    /// Sorted ascending.
    pub points: Vec<RationalAngle>,
    pub p: u32,
    pub q: u32,
    #[serde(serialize_with = "ser_ratios")]
    pub deployment: Vec<Q>,
}

pub(crate) fn ser_ratios<S: serde::Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleInvariants {
    pub is_rotation_set: bool,
    /// Rotation number `p/q`, present when the set is a rotation set.
    pub rotation: Option<(u32, u32)>,
    pub deployment: Vec<Q>,
}

/// Rotation number, circular order and deployment of an `m_n`-invariant set.
pub fn cycle_invariants(n: u32, xs: &[RationalAngle]) -> Result<CycleInvariants> {
    if n < 2 || xs.is_empty() {
        return Err(Error::InvalidParameter("need n >= 2 and a non-empty set".into()));
    }
    let mut pts = xs.to_vec();
    pts.sort();
    pts.dedup();
    let len = pts.len();
    let images: Vec<RationalAngle> = pts.iter().map(|&t| mn_apply(n, t)).collect();
    let mut sorted_images = images.clone();
    sorted_images.sort();
    sorted_images.dedup();
    if sorted_images != pts {
        return Err(Error::NotInvariant);
    }
    let index = |t: &RationalAngle| pts.binary_search(t).expect("invariant set");
    // order is preserved iff the image of the i-th point is the (i+s)-th point
    let shift = index(&images[0]);
    let is_rotation_set = images.iter().enumerate().all(|(i, t)| index(t) == (i + shift) % len);
    let rotation = is_rotation_set.then(|| {
        let g = shift.gcd(&len).max(1);
        ((shift / g) as u32, (len / g) as u32)
    });
    let sectors = (n - 1) as i64;
    let mut counts = vec![0i64; sectors as usize];
    for t in &pts {
        // t ∈ [u_{i-1}, u_i) with u_i = i/(n-1)
        let i = Integer::div_floor(&(t.num() * sectors), &t.den());
        counts[i as usize] += 1;
    }
    let deployment = counts.into_iter().map(|c| Ratio::new(c, len as i64)).collect();
    Ok(CycleInvariants { is_rotation_set, rotation, deployment })
}

/// All period-`q` cycles of `m_n` that preserve circular order, ordered by
/// their smallest point.
pub fn enumerate_cycles(n: u32, q: u32) -> Result<Vec<MnCycle>> {
    if n < 2 || q == 0 {
        return Err(Error::InvalidParameter("need n >= 2 and q >= 1".into()));
    }
    if q > MAX_PERIOD {
        return Err(Error::BudgetExceeded(format!("period {q} above {MAX_PERIOD}")));
    }
    let total = (n as i64)
        .checked_pow(q)
        .map(|v| v - 1)
        .filter(|&v| v <= MAX_POINTS)
        .ok_or_else(|| Error::BudgetExceeded(format!("{n}^{q} - 1 points above {MAX_POINTS}")))?;
    let mut out = Vec::new();
    let mut orbit = Vec::with_capacity(q as usize);
    'outer: for k in 0..total {
        orbit.clear();
        orbit.push(k);
        let mut j = (k * n as i64) % total.max(1);
        while j != k {
            // only the orbit minimum represents the cycle
            if j < k || orbit.len() as u32 >= q {
                continue 'outer;
            }
            orbit.push(j);
            j = (j * n as i64) % total;
        }
        if orbit.len() as u32 != q {
            continue;
        }
        let points: Vec<RationalAngle> = orbit.iter().map(|&j| RationalAngle::from_ratio(Ratio::new(j, total))).collect();
        let inv = cycle_invariants(n, &points)?;
        if let Some((p, qq)) = inv.rotation {
            let mut points = points;
            points.sort();
            out.push(MnCycle { n, points, p, q: qq, deployment: inv.deployment });
        }
    }
    Ok(out)
}

/// The unique cycle with rotation number `p/q` and deployment `delta`.
pub fn goldberg_realize(n: u32, p: u32, q: u32, delta: &[Q]) -> Result<MnCycle> {
    if n < 2 || q < 2 || p == 0 || p >= q || p.gcd(&q) != 1 {
        return Err(Error::InvalidParameter("need n >= 2 and reduced 0 < p/q < 1".into()));
    }
    if delta.len() != (n - 1) as usize {
        return Err(Error::InvalidParameter(format!("deployment needs {} entries", n - 1)));
    }
    if delta.iter().any(|d| *d < Ratio::from_integer(0)) || delta.iter().sum::<Q>() != Ratio::from_integer(1) {
        return Err(Error::InvalidParameter("deployment must lie in the simplex".into()));
    }
    if delta.iter().any(|d| !(*d * q as i64).is_integer()) {
        return Err(Error::IntegralityViolation);
    }
    let mut matches: Vec<MnCycle> = enumerate_cycles(n, q)?
        .into_iter()
        .filter(|c| c.p == p && c.q == q && c.deployment == delta)
        .collect();
    if matches.len() != 1 {
        return Err(Error::UniquenessViolation { count: matches.len() });
    }
    Ok(matches.remove(0))
}
