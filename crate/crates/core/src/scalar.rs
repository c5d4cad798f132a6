//! Floating-point abstraction shared by the numerical modules.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

use crate::linalg::{dense_eigh, Eigen, NoConvergence};

/// Real scalar type the spectral code is generic over (`f32` or `f64`).
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Converts a count or index.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Eigendecomposition of a real symmetric row-major matrix.
    fn eigh_real(a: &[Self], n: usize, vectors: bool) -> Result<Eigen<Self>, NoConvergence>;

    /// Eigendecomposition of a complex Hermitian row-major matrix.
    fn eigh_complex(
        a: &[Complex<Self>],
        n: usize,
        vectors: bool,
    ) -> Result<Eigen<Complex<Self>>, NoConvergence>;
}

macro_rules! impl_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn eigh_real(a: &[$t], n: usize, vectors: bool) -> Result<Eigen<$t>, NoConvergence> {
                dense_eigh(a, n, vectors)
            }

            fn eigh_complex(
                a: &[Complex<$t>],
                n: usize,
                vectors: bool,
            ) -> Result<Eigen<Complex<$t>>, NoConvergence> {
                dense_eigh(a, n, vectors)
            }
        }
    };
}

impl_scalar!(f32);
impl_scalar!(f64);
