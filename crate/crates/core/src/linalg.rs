//! Dense Hermitian eigendecomposition for row-major matrices, real
//! symmetric (`T`) or complex Hermitian (`Complex<T>`), backed by LAPACK through ndarray-linalg.

use std::ops::{Add, Mul, Neg, Sub};

use ndarray::{Array2, ShapeBuilder};
use ndarray_linalg::{EigValsh, Eigh, Lapack, UPLO};
use num_complex::Complex;
use num_traits::Float;

use crate::scalar::Scalar;

/// Matrix element: a real scalar or a complex number over one.
pub trait Field:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + std::fmt::Debug
{
    type Real: Scalar;

    fn zero_elem() -> Self;
    fn from_real(r: Self::Real) -> Self;
    fn conj(self) -> Self;
    fn re(self) -> Self::Real;
    fn norm_sqr(self) -> Self::Real;
    fn scale(self, r: Self::Real) -> Self;

    fn modulus(self) -> Self::Real {
        self.norm_sqr().sqrt()
    }

    /// Eigendecomposition of an `n × n` Hermitian matrix of this element type.
    fn decompose(a: &[Self], n: usize, want_vectors: bool) -> Result<Eigen<Self>, NoConvergence>;
}

impl<T: Scalar> Field for T {
    type Real = T;

    fn zero_elem() -> Self {
        T::zero()
    }
    fn from_real(r: T) -> Self {
        r
    }
    fn conj(self) -> Self {
        self
    }
    fn re(self) -> T {
        self
    }
    fn norm_sqr(self) -> T {
        self * self
    }
    fn scale(self, r: T) -> Self {
        self * r
    }
    fn modulus(self) -> T {
        Float::abs(self)
    }
    fn decompose(a: &[T], n: usize, want_vectors: bool) -> Result<Eigen<T>, NoConvergence> {
        T::eigh_real(a, n, want_vectors)
    }
}

impl<T: Scalar> Field for Complex<T> {
    type Real = T;

    fn zero_elem() -> Self {
        Complex::new(T::zero(), T::zero())
    }
    fn from_real(r: T) -> Self {
        Complex::new(r, T::zero())
    }
    fn conj(self) -> Self {
        Complex::conj(&self)
    }
    fn re(self) -> T {
        self.re
    }
    fn norm_sqr(self) -> T {
        Complex::norm_sqr(&self)
    }
    fn scale(self, r: T) -> Self {
        Complex::new(self.re * r, self.im * r)
    }
    fn modulus(self) -> T {
        self.re.hypot(self.im)
    }
    fn decompose(
        a: &[Complex<T>],
        n: usize,
        want_vectors: bool,
    ) -> Result<Eigen<Complex<T>>, NoConvergence> {
        T::eigh_complex(a, n, want_vectors)
    }
}

/// The iterative solver ran out of iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoConvergence;

/// Eigenvalues (ascending) and, optionally, eigenvectors stored column-wise
/// in a row-major `n × n` buffer: component `r` of vector `c` is `vectors[r * n + c]`.
#[derive(Debug, Clone)]
pub struct Eigen<E: Field> {
    pub values: Vec<E::Real>,
    pub vectors: Option<Vec<E>>,
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigenvalues<E: Field>(a: &[E], n: usize) -> Result<Vec<E::Real>, NoConvergence> {
    Ok(eigh(a, n, false)?.values)
}

/// Full Hermitian eigendecomposition. Only the lower triangle is read.
pub fn eigh<E: Field>(a: &[E], n: usize, want_vectors: bool) -> Result<Eigen<E>, NoConvergence> {
    assert_eq!(a.len(), n * n, "matrix buffer does not match dimension");
    if n == 0 {
        return Ok(Eigen {
            values: Vec::new(),
            vectors: want_vectors.then(Vec::new),
        });
    }
    E::decompose(a, n, want_vectors)
}

/// Concrete backend behind [`Scalar::eigh_real`] and [`Scalar::eigh_complex`].
pub(crate) fn dense_eigh<E>(
    a: &[E],
    n: usize,
    want_vectors: bool,
) -> Result<Eigen<E>, NoConvergence>
where
    E: Field + Lapack<Real = <E as Field>::Real>,
{
    // Column-major: a row-major complex buffer is read as its conjugate.
    let m = Array2::from_shape_fn((n, n).f(), |(r, c)| a[r * n + c]);
    if !want_vectors {
        let values = m.eigvalsh(UPLO::Lower).map_err(|_| NoConvergence)?;
        return Ok(Eigen {
            values: values.to_vec(),
            vectors: None,
        });
    }
    let (values, vectors) = m.eigh(UPLO::Lower).map_err(|_| NoConvergence)?;
    Ok(Eigen {
        values: values.to_vec(),
        vectors: Some(vectors.iter().copied().collect()),
    })
}
