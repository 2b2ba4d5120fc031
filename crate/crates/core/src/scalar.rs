//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Default + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal or configuration value into `Self`.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 value not representable")
    }

    /// Lossy conversion back to `f64`, used for reporting and error payloads.
    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Wraps an angle into `[0, 2π)`.
#[inline]
pub fn wrap_phase<T: Real>(theta: T) -> T {
    let two_pi = T::TAU();
    let w = theta % two_pi;
    let w = if w < T::zero() { w + two_pi } else { w };
    // `x % 2π + 2π` can round up to exactly 2π for tiny negative x.
    if w >= two_pi {
        T::zero()
    } else {
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn wrap_phase_lands_in_range() {
        assert_eq!(wrap_phase(0.0_f64), 0.0);
        assert!((wrap_phase(-PI / 2.0) - 1.5 * PI).abs() < 1e-15);
        assert!((wrap_phase(5.0 * PI) - PI).abs() < 1e-12);
        assert_eq!(wrap_phase(-1e-300_f64), 0.0);
        assert_eq!(wrap_phase(TAU), 0.0);
        let w = wrap_phase(-0.25_f32);
        assert!(w > 0.0 && w < std::f32::consts::TAU);
    }
}
