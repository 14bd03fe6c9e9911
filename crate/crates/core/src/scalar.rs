//! Floating-point scalar abstraction.
//!
//! All solver math is generic over [`Scalar`]; concrete aliases for the
//! common instantiations live at the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps};

/// Real scalar type the solver is generic over.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssignOps + Sum + Debug + Display + Send + Sync + 'static
{
    /// Conversion from an `f64` literal (tolerances, defaults).
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable in scalar type")
    }

    /// Conversion from an index or count.
    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count not representable in scalar type")
    }

    /// Conversion from a signed integer (temporal mode numbers).
    #[inline]
    fn of_i64(n: i64) -> Self {
        Self::from_i64(n).expect("integer not representable in scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
