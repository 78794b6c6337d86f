//! Generic real scalar for all numerics in this crate.

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Real scalar type (`f32` or `f64`) the whole numeric core is generic over.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Sum
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Shorthand conversion from an `f64` literal into the working scalar.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal must convert into the scalar type")
}

/// Tolerance that honors both a fixed `f64` gate and the scalar's own
/// precision. For `f64` this is the stated tolerance; for coarser scalars it
/// widens to a small multiple of the machine epsilon so invariants remain
/// checkable.
#[inline]
pub fn tolerance<T: Real>(spec: f64) -> T {
    let fixed = real::<T>(spec);
    let floor = T::epsilon() * real::<T>(64.0);
    fixed.max(floor)
}
