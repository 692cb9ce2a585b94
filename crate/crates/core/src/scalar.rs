//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All physics is written against [`Real`], so the same code runs in `f32`
//! for quick previews and in `f64` for the oracle comparisons.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Reduced Planck constant in μeV·ps (CODATA 2018, exact to the quoted digits).
pub const HBAR_UEV_PS: f64 = 658.211_956_9;

/// Floating point scalar usable throughout the simulator.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossless-enough conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal must be representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn hbar() -> Self {
        Self::lit(HBAR_UEV_PS)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`] scalar.
pub type Cplx<T> = Complex<T>;

#[inline]
pub(crate) fn cplx<T: Real>(re: T, im: T) -> Cplx<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn czero<T: Real>() -> Cplx<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub(crate) fn cone<T: Real>() -> Cplx<T> {
    Complex::new(T::one(), T::zero())
}

/// `exp(-i·energy·time/ħ)` with energy in μeV and time in ps.
#[inline]
pub fn phase_factor<T: Real>(energy: Cplx<T>, time: T) -> Cplx<T> {
    let arg = energy * time / T::hbar();
    Complex::new(arg.im, -arg.re).exp()
}
