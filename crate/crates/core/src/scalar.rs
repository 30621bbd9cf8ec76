//! Scalar abstraction shared by the analytic engine, the gate compiler and the VM.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar the core math is written against: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Reduces an angle into `(-π, π]`.
    fn wrap_angle(self) -> Self {
        let two_pi = Self::TAU();
        let mut a = self % two_pi;
        if a <= -Self::PI() {
            a += two_pi;
        } else if a > Self::PI() {
            a -= two_pi;
        }
        a
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `e^{iθ}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// Smallest absolute difference between two angles modulo 2π.
pub fn angle_distance<T: Real>(a: T, b: T) -> T {
    (a - b).wrap_angle().abs()
}
