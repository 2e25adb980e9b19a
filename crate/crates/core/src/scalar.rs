//! Scalar abstraction shared by the numeric modules.

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar type backing complex amplitudes: `f32` or `f64`.
///
/// Tolerances throughout the crate are specified as `f64` literals and
/// converted with [`Real::lit`]; with `f32` they saturate at machine
/// precision, so certification work should use `f64`.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync + 'static {
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Machine epsilon as the scalar type.
    fn eps() -> Self {
        Self::default_epsilon()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex amplitude over a [`Real`] scalar.
pub type C<T> = Complex<T>;

/// Modulus `|z|`.
pub fn cabs<T: Real>(z: C<T>) -> T {
    z.re.hypot(z.im)
}

#[cfg(test)]
pub(crate) fn c<T: Real>(re: f64, im: f64) -> C<T> {
    Complex::new(T::lit(re), T::lit(im))
}

pub(crate) fn one<T: Real>() -> C<T> {
    Complex::new(T::one(), T::zero())
}

pub(crate) fn zero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

/// `e^{2πi·power/order}` evaluated from the reduced angle, never by
/// repeated multiplication. Quarter turns are exact.
pub fn root_of_unity<T: Real>(order: usize, power: usize) -> C<T> {
    assert!(order > 0, "root of unity of order zero");
    let reduced = power % order;
    if (4 * reduced) % order == 0 {
        return match 4 * reduced / order {
            0 => one(),
            1 => Complex::new(T::zero(), T::one()),
            2 => Complex::new(-T::one(), T::zero()),
            _ => Complex::new(T::zero(), -T::one()),
        };
    }
    let angle = T::two_pi() * T::lit(reduced as f64) / T::lit(order as f64);
    Complex::new(angle.cos(), angle.sin())
}
