use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// Exact integer scalars usable by the lattice and polyhedral kernels.
///
/// Everything in this crate is exact: there is deliberately no floating point
/// implementation. `BigInt` is the production scalar (see [`crate::Int`]);
/// the machine integers are available for small, bounded computations and
/// for cross-checking in tests.
pub trait Scalar:
    'static
    + Clone
    + Debug
    + Display
    + Ord
    + Hash
    + Send
    + Sync
    + Signed
    + Integer
    + FromPrimitive
    + ToPrimitive
{
    fn from_i64_exact(v: i64) -> Self {
        Self::from_i64(v).expect("scalar type cannot represent i64 value")
    }

    /// Ceiling division, `b` nonzero.
    fn div_ceil_exact(&self, b: &Self) -> Self {
        -((-self.clone()).div_floor(b))
    }
}

impl Scalar for i64 {}
impl Scalar for i128 {}
impl Scalar for BigInt {}

/// gcd of a slice, zero for an empty or all-zero slice.
pub fn gcd_all<T: Scalar>(values: &[T]) -> T {
    values.iter().fold(T::zero(), |acc, v| acc.gcd(v))
}
