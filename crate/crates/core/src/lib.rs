//! Dynamics of the generalized Blaschke family
//! `B_a(z) = z^{d+1} ((z - a) / (1 - conj(a) z))^d`.
//!
//! The planar and circle modules are generic over the float type through
//! [`Real`]; the aliases below fix it to `f64`. Rotation-set combinatorics
//! are exact and use `i64` rationals.

pub mod circle;
pub mod error;
pub mod fmt;
pub mod map;
pub mod render;
pub mod roots;
pub mod rays;
pub mod rotation;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Params = map::MapParams<f64>;
pub type Point = map::SpherePoint<f64>;
pub type Lift = circle::CircleLift<f64>;
