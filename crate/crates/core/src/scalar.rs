//! Scalar abstraction shared by every numeric routine in the crate.

use nalgebra::RealField;
use num_traits::ToPrimitive;

/// Real scalar the models, scores and statistics are generic over.
///
/// Implemented for `f32` and `f64`. Arithmetic and elementary functions come
/// from [`RealField`]; `ToPrimitive` is used when values leave the numeric core
/// (CSV output, summary statistics).
pub trait Real: RealField + Copy + ToPrimitive {
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        nalgebra::convert(x)
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::lit(n as f64)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Absolute value. Spelled out because `RealField` inherits two `abs` methods.
    #[inline]
    fn magnitude(self) -> Self {
        nalgebra::ComplexField::abs(self)
    }

    #[inline]
    fn finite(self) -> bool {
        nalgebra::ComplexField::is_finite(&self)
    }
}

impl Real for f32 {}
impl Real for f64 {}
