//! Scalar abstraction shared by the generic parts of the crate.

use nalgebra::RealField;
use num_traits::{Float, FromPrimitive};
use serde::{de::DeserializeOwned, Serialize};

/// Floating-point scalar (`f32` or `f64`) usable by the matrix code.
///
/// Both `Float` and `RealField` provide methods such as `sqrt`; generic code
/// calls them through `Float::` to stay unambiguous.
pub trait Real:
    RealField + Float + FromPrimitive + Copy + Send + Sync + Serialize + DeserializeOwned + 'static
{
    /// Converts an `f64` literal into `Self`.
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("literal representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}
