//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All operator algebra is written against [`Real`], so the same code runs in
//! `f32` or `f64`. Integer Z_d bookkeeping (charges, exponents) never touches
//! floating point at all.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real field used for amplitudes, energies and rates.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossless-enough conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite value")
    }
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
}

/// Complex amplitude over a [`Real`] field.
pub type Amp<T> = Complex<T>;

/// `ω^n` with `ω = exp(2πi/d)`.
///
/// Quarter turns are produced exactly so that qubit and ququart phases stay
/// real/imaginary without rounding residue.
pub fn root_of_unity<T: Real>(d: u32, n: i64) -> Amp<T> {
    let d = d as i64;
    let n = n.rem_euclid(d);
    if (4 * n) % d == 0 {
        return match (4 * n) / d {
            0 => Complex::new(T::one(), T::zero()),
            1 => Complex::new(T::zero(), T::one()),
            2 => Complex::new(-T::one(), T::zero()),
            _ => Complex::new(T::zero(), -T::one()),
        };
    }
    let theta = T::TAU() * T::lit(n as f64) / T::lit(d as f64);
    Complex::new(theta.cos(), theta.sin())
}

pub(crate) fn c<T: Real>(re: f64) -> Amp<T> {
    Complex::new(T::lit(re), T::zero())
}

pub(crate) fn creal<T: Real>(re: T) -> Amp<T> {
    Complex::new(re, T::zero())
}

/// Local energy `-cos(2πa/d)` contributed by one stabilizer with charge `a`.
pub fn charge_energy<T: Real>(d: u32, a: u32) -> T {
    -root_of_unity::<T>(d, a as i64).re
}
