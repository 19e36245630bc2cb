use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar the planar and circle dynamics are written over.
///
/// Implemented for `f32` and `f64`. Tolerances throughout the crate are
/// stated for `f64`; `f32` instantiations run the same algorithms with
/// proportionally looser results.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Default + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer representable")
    }

    #[inline]
    fn tau() -> Self {
        Self::TAU()
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + ToPrimitive + Default + Debug + Display + Send + Sync + 'static
{
}

/// Reduces `x` to `[0, 1)`.
#[inline]
pub fn frac<T: Real>(x: T) -> T {
    let f = x - x.floor();
    // x.floor() can round so that f == 1 for tiny negative x
    if f >= T::one() {
        T::zero()
    } else {
        f
    }
}

/// Distance between two points of ℝ/ℤ.
#[inline]
pub fn circle_dist<T: Real>(x: T, y: T) -> T {
    let f = frac(x - y);
    f.min(T::one() - f)
}
