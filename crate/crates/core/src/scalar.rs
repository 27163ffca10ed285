//! Coefficient trait for the polynomial substrate.
//!
//! All core math is generic over [`Scalar`]; the identity checks shipped with
//! the tool instantiate it with arbitrary-precision rationals (see the crate
//! root aliases), floating point types satisfy the same bounds for rough
//! experiments.

use std::fmt::{Debug, Display};

use num_traits::{FromPrimitive, Signed};

/// Coefficient ring for polynomials: exact field-like scalars.
///
/// `Signed` pulls in the full `Num` bundle (ring ops, `zero`/`one`, exact
/// division for fields) plus `abs`, which the norm computations need.
pub trait Scalar:
    Signed + PartialOrd + FromPrimitive + Clone + Debug + Display + 'static
{
    /// Embed a small signed integer.
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer embeds into scalar")
    }

    /// `self^exp` by repeated squaring.
    fn powi(&self, exp: usize) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        result
    }
}

impl<T> Scalar for T where
    T: Signed + PartialOrd + FromPrimitive + Clone + Debug + Display + 'static
{
}
