use num_integer::Integer;
use num_rational::Ratio;
use serde::Serialize;

use super::angle::{mn_apply, RationalAngle};
use super::cycles::enumerate_cycles;
use super::Q;
use crate::error::{Error, Result};

/// `(a', b') = ((d²+d-1)/(d(d+1)), d/(d+1))`: `J_* = [b', a')` is the gap
/// between the two branches `J_0 = [(d-1)/d, b')` and `J_1 = [a', 1)`.
pub fn partition_points(d: u32) -> Result<(RationalAngle, RationalAngle)> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be at least 1".into()));
    }
    let d = d as i64;
    Ok((RationalAngle::new(d * d + d - 1, d * (d + 1))?, RationalAngle::new(d, d + 1)?))
}

/// Branch data for `m_{d+1}` on `I = [(d-1)/d, 1)`.
struct Branches {
    n: i64,
    left: Q,
    a_prime: Q,
    b_prime: Q,
}

impl Branches {
    fn new(d: u32) -> Self {
        let di = d as i64;
        Branches {
            n: di + 1,
            left: Ratio::new(di - 1, di),
            a_prime: Ratio::new(di * di + di - 1, di * (di + 1)),
            b_prime: Ratio::new(di, di + 1),
        }
    }

    /// Symbol of `t`, `None` inside the gap or outside `I`.
    fn symbol(&self, t: Q) -> Option<u8> {
        if t >= self.left && t < self.b_prime {
            Some(0)
        } else if t >= self.a_prime && t < Ratio::from_integer(1) {
            Some(1)
        } else {
            None
        }
    }

    /// Integer subtracted by the affine branch on `J_s`.
    fn offset(&self, s: u8) -> i64 {
        self.n - 2 + s as i64
    }

    fn forward(&self, s: u8, x: Q) -> Q {
        x * self.n - self.offset(s)
    }

    fn inverse(&self, s: u8, y: Q) -> Q {
        (y + self.offset(s)) / self.n
    }

    /// Closure of `J_s`.
    fn closure(&self, s: u8) -> (Q, Q) {
        match s {
            0 => (self.left, self.b_prime),
            _ => (self.a_prime, Ratio::from_integer(1)),
        }
    }
}

/// Symbols of `m_{d+1}^k(t)` for `k = 1..=length`.
///
/// `t` itself must lie in `J_0 ∪ J_1`; `NotInLambda { step }` reports the
/// first iterate (0 for `t`) that falls in the gap.
pub fn itinerary(d: u32, t: RationalAngle, length: usize) -> Result<Vec<u8>> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be at least 1".into()));
    }
    let br = Branches::new(d);
    if t.value() < br.left {
        return Err(Error::InvalidParameter(format!("{t} lies outside [(d-1)/d, 1)")));
    }
    br.symbol(t.value()).ok_or(Error::NotInLambda { step: 0 })?;
    let mut out = Vec::with_capacity(length);
    let mut x = t;
    for step in 1..=length {
        x = mn_apply(br.n as u32, x);
        out.push(br.symbol(x.value()).ok_or(Error::NotInLambda { step })?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ItineraryInterval {
    pub d: u32,
    pub p: u32,
    pub q: u32,
    pub a: RationalAngle,
    pub b: RationalAngle,
    /// `s_1 .. s_q`: symbols of `t_1, m(t_1), ..., m^{q-1}(t_1)`.
    pub itinerary: Vec<u8>,
    #[serde(rename = "t1")]
    pub isolated_point: RationalAngle,
    /// The sector cycle containing `t_1`.
    pub cycle: Vec<RationalAngle>,
}

/// Builds `[a, b] = J_{s_1 … s_q s_1}` around the first point of the `p/q`
/// cycle inside `[(d-1)/d, 1)` and checks its three defining properties.
pub fn gen_interval(d: u32, p: u32, q: u32) -> Result<ItineraryInterval> {
    if d == 0 || q < 2 || p == 0 || p >= q || p.gcd(&q) != 1 {
        return Err(Error::InvalidParameter("need d >= 1 and reduced 0 < p/q < 1".into()));
    }
    let br = Branches::new(d);
    let n = br.n as u32;
    let mut sector: Vec<_> = enumerate_cycles(n, q)?
        .into_iter()
        .filter(|c| c.p == p && c.q == q && c.points.iter().all(|t| t.value() >= br.left))
        .collect();
    let cycle = match sector.len() {
        0 => return Err(Error::NoSectorCycle),
        1 => sector.remove(0).points,
        k => return Err(Error::VerificationFailure(format!("{k} cycles in the last sector"))),
    };
    let t1 = *cycle
        .iter()
        .find(|t| br.symbol(t.value()) == Some(0))
        .ok_or_else(|| Error::VerificationFailure("sector cycle misses J_0".into()))?;

    let mut symbols = vec![0u8];
    symbols.extend(itinerary(d, t1, q as usize - 1)?);

    let (mut lo, mut hi) = br.closure(symbols[0]);
    for &s in symbols.iter().rev() {
        lo = br.inverse(s, lo);
        hi = br.inverse(s, hi);
    }
    let (a, b) = (RationalAngle::from_ratio(lo), RationalAngle::from_ratio(hi));

    // (1) m^q(a) = (d-1)/d and m^{q+1}(b) = 0
    let iterate = |t: RationalAngle, k: u32| (0..k).fold(t, |x, _| mn_apply(n, x));
    if iterate(a, q).value() != br.left || iterate(b, q + 1) != RationalAngle::zero() {
        return Err(Error::VerificationFailure("endpoint images".into()));
    }
    // (2) X ∩ [a, b] = {t_1}
    let inside: Vec<_> = cycle.iter().filter(|t| t.value() >= lo && t.value() <= hi).collect();
    if inside != [&t1] {
        return Err(Error::VerificationFailure("cycle points inside [a, b]".into()));
    }
    // (3) [a, b] ⊆ m^q([a, b]), tracking the interval through the affine branches
    let (mut x, mut y) = (lo, hi);
    for _ in 0..q {
        let s = br
            .symbol(x)
            .ok_or_else(|| Error::VerificationFailure("interval left the branches".into()))?;
        let (_, right) = br.closure(s);
        if y > right {
            return Err(Error::VerificationFailure("interval straddles a branch boundary".into()));
        }
        x = br.forward(s, x);
        y = br.forward(s, y);
    }
    if !(x <= lo && hi <= y) {
        return Err(Error::VerificationFailure("[a, b] not inside its q-th image".into()));
    }

    Ok(ItineraryInterval { d, p, q, a, b, itinerary: symbols, isolated_point: t1, cycle })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ra(n: i64, d: i64) -> RationalAngle {
        RationalAngle::new(n, d).unwrap()
    }

    #[test]
    fn partition_examples() {
        assert_eq!(partition_points(2).unwrap(), (ra(5, 6), ra(2, 3)));
        assert_eq!(partition_points(1).unwrap(), (ra(1, 2), ra(1, 2)));
        assert_eq!(partition_points(3).unwrap(), (ra(11, 12), ra(3, 4)));
        for d in 1..6u32 {
            let (a, b) = partition_points(d).unwrap();
            assert_eq!(mn_apply(d + 1, a), ra(d as i64 - 1, d as i64));
            assert_eq!(mn_apply(d + 1, b), RationalAngle::zero());
        }
    }

    #[test]
    fn itinerary_examples() {
        assert_eq!(itinerary(2, ra(5, 8), 4).unwrap(), vec![1, 0, 1, 0]);
        assert_eq!(itinerary(2, ra(7, 8), 4).unwrap(), vec![0, 1, 0, 1]);
        assert_eq!(itinerary(2, ra(7, 10), 1), Err(Error::NotInLambda { step: 0 }));
        assert!(itinerary(2, ra(1, 4), 1).is_err());
    }

    /// Independent oracle: the tightest pair of candidate endpoints around
    /// `t1`, candidates being all solutions of `m^q(a) = (d-1)/d` and
    /// `m^{q+1}(b) = 0`, written down in closed form.
    fn tight_endpoints(d: i64, q: u32, t1: Q) -> (Q, Q) {
        let n = d + 1;
        let nq = n.pow(q);
        let a = (0..nq)
            .map(|k| (Ratio::new(d - 1, d) + k) / nq)
            .filter(|x| *x <= t1)
            .max()
            .unwrap();
        let b = (0..n * nq).map(|k| Ratio::new(k, n * nq)).filter(|x| *x >= t1).min().unwrap();
        (a, b)
    }

    /// Brute-force sector cycle: smallest point in J_0 of the p/q cycle of
    /// m_{d+1} lying in [(d-1)/d, 1), from integer orbits of k/((d+1)^q - 1).
    fn brute_t1(d: i64, p: i64, q: u32) -> Q {
        let n = d + 1;
        let m = n.pow(q) - 1;
        let mut best: Option<Q> = None;
        for k in 0..m {
            let mut orbit = vec![k];
            let mut j = k * n % m;
            while j != k {
                orbit.push(j);
                j = j * n % m;
            }
            if orbit.len() as u32 != q {
                continue;
            }
            if orbit.iter().any(|&j| j * d < (d - 1) * m) {
                continue;
            }
            let mut sorted = orbit.clone();
            sorted.sort();
            // rotation number from the index shift of the first point
            let pos = |x: i64| sorted.iter().position(|&y| y == x).unwrap();
            let shift = (pos(orbit[1]) + q as usize - pos(orbit[0])) % q as usize;
            let ok = orbit.iter().all(|&x| pos(x * n % m) == (pos(x) + shift) % q as usize);
            if !ok || shift as i64 != p {
                continue;
            }
            let t1 = sorted.iter().map(|&j| Ratio::new(j, m)).find(|x| *x < Ratio::new(d, d + 1)).unwrap();
            best = Some(best.map_or(t1, |b: Q| b.min(t1)));
        }
        best.unwrap()
    }

    #[test]
    fn pinned_intervals() {
        let iv = gen_interval(2, 1, 2).unwrap();
        assert_eq!((iv.a, iv.b, iv.isolated_point), (ra(11, 18), ra(17, 27), ra(5, 8)));
        assert_eq!(iv.itinerary, vec![0, 1]);
        let iv = gen_interval(1, 1, 2).unwrap();
        assert_eq!((iv.a, iv.b, iv.isolated_point), (ra(1, 4), ra(3, 8), ra(1, 3)));
        assert_eq!(iv.cycle, vec![ra(1, 3), ra(2, 3)]);
    }

    #[test]
    fn one_third_against_oracle() {
        let t1 = brute_t1(2, 1, 3);
        let (a, b) = tight_endpoints(2, 3, t1);
        let iv = gen_interval(2, 1, 3).unwrap();
        assert_eq!(iv.isolated_point.value(), t1);
        assert_eq!((iv.a.value(), iv.b.value()), (a, b));
    }

    #[test]
    fn all_small_cases_against_oracle() {
        for d in 1..5u32 {
            for q in 2..6u32 {
                for p in 1..q {
                    if p.gcd(&q) != 1 {
                        continue;
                    }
                    let iv = gen_interval(d, p, q).unwrap();
                    let t1 = brute_t1(d as i64, p as i64, q);
                    assert_eq!(iv.isolated_point.value(), t1, "d={d} {p}/{q}");
                    assert_eq!((iv.a.value(), iv.b.value()), tight_endpoints(d as i64, q, t1), "d={d} {p}/{q}");
                }
            }
        }
    }
}
