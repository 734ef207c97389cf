//! Scalar abstractions shared by the numeric modules.
//!
//! Codebook generation only needs ordered field arithmetic, so it works over
//! exact rationals as well as floats. Entropy and edge detection need
//! logarithms and square roots and therefore require [`Real`].

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Ordered field element usable as a training-vector component.
pub trait Scalar:
    Num + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync
{
    /// Converts a count into the scalar type.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }
}

impl<T> Scalar for T where
    T: Num + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync
{
}

/// Floating point scalar: f32 or f64.
pub trait Real: Scalar + Float {}

impl<T> Real for T where T: Scalar + Float {}

/// Rounds half-up to the nearest integer and clamps to `[0, 255]`.
pub(crate) fn round_to_u8<T: Real>(v: T) -> u8 {
    let r = (v + T::from_f64(0.5).unwrap()).floor();
    let r = r.to_f64().unwrap_or(0.0);
    r.clamp(0.0, 255.0) as u8
}
