use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A point `num/den` of ℝ/ℤ, stored reduced with `0 <= num < den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalAngle(Ratio<i64>);

impl RationalAngle {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        Ok(Self::from_ratio(Ratio::new(num, den)))
    }

    /// Reduces any rational mod 1.
    pub fn from_ratio(r: Ratio<i64>) -> Self {
        let den = *r.denom();
        let num = r.numer().rem_euclid(den);
        RationalAngle(Ratio::new(num, den))
    }

    pub fn zero() -> Self {
        RationalAngle(Ratio::from_integer(0))
    }

    pub fn num(&self) -> i64 {
        *self.0.numer()
    }

    pub fn den(&self) -> i64 {
        *self.0.denom()
    }

    pub fn value(&self) -> Ratio<i64> {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.num() as f64 / self.den() as f64
    }

    /// `-t mod 1`.
    pub fn neg(&self) -> Self {
        Self::from_ratio(-self.0)
    }
}

impl fmt::Display for RationalAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num(), self.den())
    }
}

impl FromStr for RationalAngle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("not a fraction: {s}"));
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?),
            None => (s.trim().parse().map_err(|_| bad())?, 1),
        };
        RationalAngle::new(n, d)
    }
}

impl Serialize for RationalAngle {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// `m_n(t) = n t mod 1`.
pub fn mn_apply(n: u32, t: RationalAngle) -> RationalAngle {
    let den = t.den();
    let num = ((n as i128 * t.num() as i128) % den as i128) as i64;
    RationalAngle(Ratio::new(num, den))
}

pub fn mn_iterate(n: u32, mut t: RationalAngle, k: usize) -> RationalAngle {
    for _ in 0..k {
        t = mn_apply(n, t);
    }
    t
}
