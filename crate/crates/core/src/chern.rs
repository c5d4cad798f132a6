//! Lattice Chern numbers from link variables of the Bloch eigenvectors.
//!
//! Each plaquette of the `n1 × n2` mesh contributes the phase of the product
//! of its four normalized overlap determinants; the sum over the torus is
//! `2π` times an integer. A band range (a single band or all bands below a
//! gap) only needs to be separated from its neighbours at every mesh point.
//!
//! This module shares no code with the Diophantine labels in [`crate::flux`].

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flux::RationalFlux;
use crate::scalar::Scalar;
use crate::spectrum::{band_edges, hamiltonian, mesh_momentum};

/// Eigenvalue separation below which a band range counts as touching.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Largest tolerated distance of a plaquette sum from an integer.
pub const INTEGER_RESIDUE_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChernResult<T> {
    pub flux: RationalFlux,
    /// One integer per band, bottom to top.
    pub band_cherns: Vec<i64>,
    pub mesh: (usize, usize),
    /// Smallest separation between adjacent bands met on the mesh.
    pub min_plaquette_gap: T,
}

/// Eigensystems of the Bloch Hamiltonian on the whole mesh, computed once
/// and reused for any number of band ranges.
#[derive(Debug, Clone)]
pub struct ChernMesh<T: Scalar> {
    flux: RationalFlux,
    n1: usize,
    n2: usize,
    q: usize,
    values: Vec<Vec<T>>,
    vectors: Vec<Vec<Complex<T>>>,
}

impl<T: Scalar> ChernMesh<T> {
    pub fn new(flux: RationalFlux, n1: usize, n2: usize) -> Result<Self> {
        if n1 < 2 || n2 < 2 {
            return Err(Error::Config(format!(
                "Chern mesh {n1}x{n2} needs at least 2x2"
            )));
        }
        let q = flux.q() as usize;
        let systems: Vec<_> = (0..n1 * n2)
            .into_par_iter()
            .map(|idx| {
                let (k1, k2) = mesh_momentum::<T>(flux.q(), n1, n2, idx / n2, idx % n2);
                hamiltonian(flux, k1, k2).eigensystem()
            })
            .collect::<Result<_>>()?;
        let (values, vectors) = systems
            .into_iter()
            .map(|e| (e.values, e.vectors.expect("vectors requested")))
            .unzip();
        Ok(ChernMesh {
            flux,
            n1,
            n2,
            q,
            values,
            vectors,
        })
    }

    pub fn flux(&self) -> RationalFlux {
        self.flux
    }

    /// Smallest separation between bands `b` and `b + 1` (0-based) over the mesh,
    /// with the k-point where it occurs.
    fn separation(&self, b: usize) -> (T, usize) {
        let mut best = (T::infinity(), 0);
        for (idx, vals) in self.values.iter().enumerate() {
            let d = vals[b + 1] - vals[b];
            if d < best.0 {
                best = (d, idx);
            }
        }
        best
    }

    fn degenerate(&self, band: usize, idx: usize) -> Error {
        let (k1, k2) = mesh_momentum::<T>(
            self.flux.q(),
            self.n1,
            self.n2,
            idx / self.n2,
            idx % self.n2,
        );
        Error::DegenerateBand {
            flux: self.flux,
            band,
            k1: k1.as_f64(),
            k2: k2.as_f64(),
        }
    }

    /// Chern number of bands `first..=last` (1-based, inclusive).
    pub fn range_chern(&self, first: usize, last: usize) -> Result<i64> {
        assert!(
            1 <= first && first <= last && last <= self.q,
            "band range out of bounds"
        );
        let tol = T::lit(DEGENERACY_TOL);
        if first > 1 {
            let (gap, idx) = self.separation(first - 2);
            if gap <= tol {
                return Err(self.degenerate(first, idx));
            }
        }
        if last < self.q {
            let (gap, idx) = self.separation(last - 1);
            if gap <= tol {
                return Err(self.degenerate(last, idx));
            }
        }
        let cols: Vec<usize> = (first - 1..last).collect();
        let at = |i1: usize, i2: usize| (i1 % self.n1) * self.n2 + (i2 % self.n2);
        let link = |a: usize, b: usize| -> Complex<T> {
            let u = overlap_det(&self.vectors[a], &self.vectors[b], self.q, &cols);
            let norm = u.norm();
            if norm > T::zero() {
                u / norm
            } else {
                Complex::new(T::one(), T::zero())
            }
        };
        // Rows are summed in parallel, then reduced in fixed order.
        let row_sums: Vec<T> = (0..self.n1)
            .into_par_iter()
            .map(|i1| {
                let mut acc = T::zero();
                for i2 in 0..self.n2 {
                    let k = at(i1, i2);
                    let k_1 = at(i1 + 1, i2);
                    let k_2 = at(i1, i2 + 1);
                    let k_12 = at(i1 + 1, i2 + 1);
                    // Loop k → k+ê₂ → k+ê₁+ê₂ → k+ê₁ → k; with this orientation the
                    // integer equals ∂ρ/∂Φ̃ in the gap above the range.
                    let w = link(k, k_2) * link(k_2, k_12) * link(k_12, k_1) * link(k_1, k);
                    acc += w.im.atan2(w.re);
                }
                acc
            })
            .collect();
        let total = row_sums.into_iter().fold(T::zero(), |a, b| a + b) / T::TAU();
        let rounded = total.round();
        let residual = (total - rounded).abs();
        if residual.as_f64() > INTEGER_RESIDUE_TOL {
            return Err(Error::MeshTooCoarse {
                value: total.as_f64(),
                residual: residual.as_f64(),
            });
        }
        Ok(rounded.to_i64().expect("Chern number fits in i64"))
    }

    /// Chern numbers of every band plus the smallest band separation.
    pub fn all_bands(&self) -> Result<ChernResult<T>> {
        let band_cherns = (1..=self.q)
            .map(|b| self.range_chern(b, b))
            .collect::<Result<Vec<_>>>()?;
        let min_plaquette_gap = (0..self.q.saturating_sub(1))
            .map(|b| self.separation(b).0)
            .fold(T::infinity(), T::min);
        Ok(ChernResult {
            flux: self.flux,
            band_cherns,
            mesh: (self.n1, self.n2),
            min_plaquette_gap,
        })
    }
}

/// `det(A_colsᴴ · B_cols)` for eigenvector buffers of dimension `q`.
fn overlap_det<T: Scalar>(
    a: &[Complex<T>],
    b: &[Complex<T>],
    q: usize,
    cols: &[usize],
) -> Complex<T> {
    let m = cols.len();
    let mut s = vec![Complex::new(T::zero(), T::zero()); m * m];
    for (x, &ca) in cols.iter().enumerate() {
        for (y, &cb) in cols.iter().enumerate() {
            let mut acc = Complex::new(T::zero(), T::zero());
            for r in 0..q {
                acc += a[r * q + ca].conj() * b[r * q + cb];
            }
            s[x * m + y] = acc;
        }
    }
    determinant(&mut s, m)
}

/// LU determinant with partial pivoting; destroys `m`.
fn determinant<T: Scalar>(m: &mut [Complex<T>], n: usize) -> Complex<T> {
    let mut det = Complex::new(T::one(), T::zero());
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| {
                m[x * n + col]
                    .norm()
                    .partial_cmp(&m[y * n + col].norm())
                    .unwrap()
            })
            .unwrap();
        if m[pivot * n + col].norm() == T::zero() {
            return Complex::new(T::zero(), T::zero());
        }
        if pivot != col {
            for c in 0..n {
                m.swap(pivot * n + c, col * n + c);
            }
            det = -det;
        }
        let d = m[col * n + col];
        det *= d;
        for r in col + 1..n {
            let factor = m[r * n + col] / d;
            for c in col..n {
                let sub = factor * m[col * n + c];
                m[r * n + c] -= sub;
            }
        }
    }
    det
}

/// Fails early when bands `first..=last` touch a neighbour at a band-edge momentum.
fn check_edges_isolated(flux: RationalFlux, first: usize, last: usize) -> Result<()> {
    let bs = band_edges::<f64>(flux)?;
    let corner = std::f64::consts::PI / flux.q() as f64;
    let touching = |upper: usize| bs.bands[upper].lo - bs.bands[upper - 1].hi <= DEGENERACY_TOL;
    for (boundary, band) in [(first - 1, first), (last, last)] {
        if boundary >= 1 && boundary < bs.q() && touching(boundary) {
            return Err(Error::DegenerateBand {
                flux,
                band,
                k1: corner,
                k2: corner,
            });
        }
    }
    Ok(())
}

/// Chern number of band `band` (1-based).
pub fn band_chern<T: Scalar>(flux: RationalFlux, band: usize, n1: usize, n2: usize) -> Result<i64> {
    let q = flux.q() as usize;
    if band < 1 || band > q {
        return Err(Error::Config(format!("band {band} outside 1..={q}")));
    }
    check_edges_isolated(flux, band, band)?;
    ChernMesh::<T>::new(flux, n1, n2)?.range_chern(band, band)
}

/// Hall integer of gap `j`: the Chern number of all bands below it.
pub fn gap_chern<T: Scalar>(flux: RationalFlux, j: i64, n1: usize, n2: usize) -> Result<i64> {
    let q = flux.q();
    if j < 1 || j > q - 1 {
        return Err(Error::GapIndex { j, q });
    }
    check_edges_isolated(flux, 1, j as usize)?;
    ChernMesh::<T>::new(flux, n1, n2)?.range_chern(1, j as usize)
}

/// Chern numbers of every band.
pub fn chern_numbers<T: Scalar>(
    flux: RationalFlux,
    n1: usize,
    n2: usize,
) -> Result<ChernResult<T>> {
    ChernMesh::<T>::new(flux, n1, n2)?.all_bands()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::reduce;

    fn f(p: i64, q: i64) -> RationalFlux {
        reduce(p, q).unwrap()
    }

    #[test]
    fn determinant_small() {
        let c = |re: f64, im: f64| Complex::new(re, im);
        let mut m = vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)];
        assert!((determinant(&mut m, 2) - c(-2.0, 0.0)).norm() < 1e-14);
        let mut m = vec![c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)];
        assert!((determinant(&mut m, 2) - c(-1.0, 0.0)).norm() < 1e-14);
        let mut m = vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
        assert!((determinant(&mut m, 2) - c(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn third_band_cherns() {
        let r = chern_numbers::<f64>(f(1, 3), 60, 60).unwrap();
        assert_eq!(r.band_cherns, vec![1, -2, 1]);
        assert!(r.min_plaquette_gap > 0.1);
        assert_eq!(gap_chern::<f64>(f(1, 3), 1, 60, 60).unwrap(), 1);
        assert_eq!(gap_chern::<f64>(f(1, 3), 2, 60, 60).unwrap(), -1);
    }

    #[test]
    fn two_fifths_band_cherns() {
        let r = chern_numbers::<f64>(f(2, 5), 60, 60).unwrap();
        assert_eq!(r.band_cherns, vec![-2, 3, -2, 3, -2]);
        assert_eq!(gap_chern::<f64>(f(2, 5), 1, 60, 60).unwrap(), -2);
        assert_eq!(band_chern::<f64>(f(2, 5), 2, 60, 60).unwrap(), 3);
    }

    #[test]
    fn touching_bands_are_rejected() {
        assert!(matches!(
            band_chern::<f64>(f(1, 2), 1, 60, 60),
            Err(Error::DegenerateBand { band: 1, .. })
        ));
        // straight on the mesh, bypassing the band-edge precheck
        let mesh = ChernMesh::<f64>::new(f(1, 2), 60, 60).unwrap();
        assert!(matches!(
            mesh.range_chern(1, 1),
            Err(Error::DegenerateBand { .. })
        ));
        // the full occupied set below an open gap of even q is fine
        assert_eq!(gap_chern::<f64>(f(1, 4), 3, 40, 40).unwrap(), -1);
    }

    #[test]
    fn index_errors() {
        assert!(band_chern::<f64>(f(1, 3), 0, 10, 10).is_err());
        assert!(band_chern::<f64>(f(1, 3), 4, 10, 10).is_err());
        assert!(matches!(
            gap_chern::<f64>(f(1, 3), 3, 10, 10),
            Err(Error::GapIndex { .. })
        ));
        assert!(ChernMesh::<f64>::new(f(1, 3), 1, 10).is_err());
    }

    #[test]
    fn band_cherns_sum_to_zero() {
        for flux in [f(1, 3), f(2, 5), f(1, 5), f(3, 7), f(2, 7)] {
            let r = chern_numbers::<f64>(flux, 40, 40).unwrap();
            assert_eq!(r.band_cherns.iter().sum::<i64>(), 0, "{flux}");
        }
    }
}
