//! Floating-point abstraction shared by every module.

use std::fmt::{Debug, Display};
use std::sync::atomic::{AtomicU64, Ordering};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar type used throughout the crate. Implemented for `f32` and `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this type.
    #[inline]
    fn c(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// A tolerance no tighter than what this precision can honour.
    ///
    /// Returns `max(k·t, 64·ε)` where `k` is the process-wide
    /// [`tolerance_scale`], so that f64-calibrated tolerances degrade
    /// gracefully for `f32`.
    #[inline]
    fn tol(t: f64) -> Self {
        let floor = Self::epsilon() * Self::c(64.0);
        Self::c(t * tolerance_scale()).max(floor)
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn two() -> Self {
        Self::c(2.0)
    }

    #[inline]
    fn half() -> Self {
        Self::c(0.5)
    }

    /// Representative of `self` modulo `period` in `[0, period)`.
    #[inline]
    fn modulo(self, period: Self) -> Self {
        let r = self % period;
        if r < Self::zero() {
            r + period
        } else {
            r
        }
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

static TOLERANCE_SCALE: AtomicU64 = AtomicU64::new(0x3FF0_0000_0000_0000);

/// Factor applied to every tolerance passed through [`Scalar::tol`]; defaults to 1.
pub fn tolerance_scale() -> f64 {
    f64::from_bits(TOLERANCE_SCALE.load(Ordering::Relaxed))
}

/// Sets the process-wide tolerance factor. Non-positive or non-finite values are ignored.
pub fn set_tolerance_scale(k: f64) {
    if k.is_finite() && k > 0.0 {
        TOLERANCE_SCALE.store(k.to_bits(), Ordering::Relaxed);
    }
}
