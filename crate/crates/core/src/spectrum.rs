//! Harper Bloch Hamiltonian at rational flux, band edges, labeled gaps and
//! mesh spectra over the magnetic Brillouin zone `[0, 2π/q) × [0, 2π)`.
//!
//! Energies use hopping ½, so the zero-flux band is `cos k₁ + cos k₂ ∈ [−2, 2]`.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flux::{Diophantine, GapLabel, GapLabeler, RationalFlux};
use crate::linalg::{self, Eigen};
use crate::scalar::Scalar;

/// Default threshold separating open gaps from numerically closed ones.
pub const DEFAULT_MIN_WIDTH: f64 = 1e-9;

/// `q × q` Bloch matrix at momentum `(k1, k2)`, stored row-major.
#[derive(Debug, Clone)]
pub struct BlochHamiltonian<T> {
    pub flux: RationalFlux,
    pub k1: T,
    pub k2: T,
    dim: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Scalar> BlochHamiltonian<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, r: usize, c: usize) -> Complex<T> {
        self.entries[r * self.dim + c]
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    /// `max |H − Hᴴ|`.
    pub fn hermiticity_defect(&self) -> T {
        let n = self.dim;
        let mut worst = T::zero();
        for r in 0..n {
            for c in 0..n {
                let d = self.entry(r, c) - self.entry(c, r).conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    pub fn trace(&self) -> T {
        (0..self.dim).fold(T::zero(), |acc, i| acc + self.entry(i, i).re)
    }

    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        linalg::eigenvalues(&self.entries, self.dim).map_err(|_| self.no_convergence())
    }

    pub fn eigensystem(&self) -> Result<Eigen<Complex<T>>> {
        linalg::eigh(&self.entries, self.dim, true).map_err(|_| self.no_convergence())
    }

    fn no_convergence(&self) -> Error {
        Error::NoConvergence {
            k1: self.k1.as_f64(),
            k2: self.k2.as_f64(),
        }
    }
}

/// On-site phase `2π·((r·p) mod q)/q`, reduced in integers so that `p` and
/// `p + q` give bitwise identical matrices.
fn site_phase<T: Scalar>(r: usize, p: i64, q: i64) -> T {
    let s = (r as i128 * p as i128).rem_euclid(q as i128) as i64;
    T::TAU() * T::from_i64(s).unwrap() / T::from_i64(q).unwrap()
}

/// Builds the Harper Bloch Hamiltonian.
///
/// Diagonal `cos(k2 + 2π r p/q)`, nearest-neighbour hopping ½ and the
/// boundary bond `½ e^{∓i q k1}` closing the magnetic cell. For `q = 2` the
/// boundary bond lands on the ordinary off-diagonal and the two add up.
pub fn hamiltonian<T: Scalar>(flux: RationalFlux, k1: T, k2: T) -> BlochHamiltonian<T> {
    let q = flux.q() as usize;
    let p = flux.p();
    let mut entries = vec![Complex::new(T::zero(), T::zero()); q * q];
    if q == 1 {
        entries[0] = Complex::new(k1.cos() + k2.cos(), T::zero());
    } else {
        let half = T::lit(0.5);
        for r in 0..q {
            entries[r * q + r] =
                Complex::new((k2 + site_phase::<T>(r, p, q as i64)).cos(), T::zero());
        }
        for r in 0..q - 1 {
            entries[r * q + r + 1] += Complex::new(half, T::zero());
            entries[(r + 1) * q + r] += Complex::new(half, T::zero());
        }
        let theta = T::from_count(q) * k1;
        entries[q - 1] += Complex::from_polar(half, -theta);
        entries[(q - 1) * q] += Complex::from_polar(half, theta);
    }
    BlochHamiltonian {
        flux,
        k1,
        k2,
        dim: q,
        entries,
    }
}

/// Real Bloch matrix at `k1 ∈ {0, π/q}`, where the boundary bond is `±½`.
fn edge_matrix<T: Scalar>(p: i64, q: usize, boundary_sign: T, k2: T) -> Vec<T> {
    if q == 1 {
        // cos k1 + cos k2 with k1 = k2 ∈ {0, π}
        return vec![boundary_sign + boundary_sign];
    }
    let half = T::lit(0.5);
    let mut m = vec![T::zero(); q * q];
    for r in 0..q {
        m[r * q + r] = (k2 + site_phase::<T>(r, p, q as i64)).cos();
    }
    for r in 0..q - 1 {
        m[r * q + r + 1] += half;
        m[(r + 1) * q + r] += half;
    }
    m[q - 1] += half * boundary_sign;
    m[(q - 1) * q] += half * boundary_sign;
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Band<T> {
    pub lo: T,
    pub hi: T,
}

/// Interval between bands `j` and `j + 1` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gap<T> {
    pub j: i64,
    pub lo: T,
    pub hi: T,
    /// `None` for touching or numerically closed gaps.
    pub label: Option<GapLabel>,
}

impl<T: Scalar> Gap<T> {
    pub fn is_open(&self) -> bool {
        self.label.is_some()
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }

    pub fn contains(&self, mu: T) -> bool {
        self.is_open() && self.lo < mu && mu < self.hi
    }
}

/// Where a chemical potential sits relative to a band structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Below,
    /// Inside band `b` (1-based), edges included.
    Band(usize),
    Gap(GapLabel),
    Above,
}

impl Region {
    /// `(k, n)` such that the density is `n + k·Φ̃`; defined outside bands.
    pub fn hall_pair(&self) -> Option<(i64, i64)> {
        match self {
            Region::Below => Some((0, 0)),
            Region::Above => Some((0, 1)),
            Region::Gap(l) => Some((l.k, l.n)),
            Region::Band(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandStructure<T> {
    pub flux: RationalFlux,
    pub bands: Vec<Band<T>>,
    /// Empty until filled by [`gaps`]; then one entry per `j = 1..q−1`.
    pub gaps: Vec<Gap<T>>,
}

impl<T: Scalar> BandStructure<T> {
    pub fn q(&self) -> usize {
        self.bands.len()
    }

    pub fn bottom(&self) -> T {
        self.bands[0].lo
    }

    pub fn top(&self) -> T {
        self.bands[self.bands.len() - 1].hi
    }

    pub fn open_gaps(&self) -> impl Iterator<Item = &Gap<T>> {
        self.gaps.iter().filter(|g| g.is_open())
    }

    /// Locates `mu`. Band edges count as inside the band; a gap that is not
    /// open counts as band (the lower one).
    pub fn classify(&self, mu: T) -> Region {
        if mu < self.bottom() {
            return Region::Below;
        }
        if mu > self.top() {
            return Region::Above;
        }
        for (b, band) in self.bands.iter().enumerate() {
            if mu <= band.hi {
                if mu >= band.lo {
                    return Region::Band(b + 1);
                }
                // strictly between band b and band b+1 (1-based b)
                return match self.gaps.get(b - 1) {
                    Some(g) if g.is_open() => Region::Gap(g.label.unwrap()),
                    _ => Region::Band(b),
                };
            }
        }
        Region::Above
    }
}

/// Band edges from the eigenvalues at `k = (0, 0)` and `k = (π/q, π/q)`.
///
/// The flux is reduced to `min(p mod q, q − p mod q)/q` first, so the result
/// is identical for `p/q`, `(p + q)/q`, `−p/q` and `(q − p)/q`. The edges are
/// symmetrized under `E → −E`, which the spectrum satisfies exactly.
pub fn band_edges<T: Scalar>(flux: RationalFlux) -> Result<BandStructure<T>> {
    let q = flux.q() as usize;
    let mut p = flux.p().rem_euclid(flux.q());
    if 2 * p > flux.q() {
        p = flux.q() - p;
    }
    let corner = T::PI() / T::from_count(q);
    let mut edges = Vec::with_capacity(2 * q);
    for (sign, k2) in [(T::one(), T::zero()), (-T::one(), corner)] {
        let m = edge_matrix(p, q, sign, k2);
        let k1 = if sign > T::zero() {
            0.0
        } else {
            corner.as_f64()
        };
        edges.extend(
            linalg::eigenvalues(&m, q).map_err(|_| Error::NoConvergence {
                k1,
                k2: k2.as_f64(),
            })?,
        );
    }
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let last = 2 * q - 1;
    let two = T::lit(2.0);
    for i in 0..q {
        let v = (edges[i] - edges[last - i]) / two;
        edges[i] = v;
        edges[last - i] = -v;
    }
    let bands = edges
        .chunks(2)
        .map(|pair| Band {
            lo: pair[0],
            hi: pair[1],
        })
        .collect();
    Ok(BandStructure {
        flux,
        bands,
        gaps: Vec::new(),
    })
}

/// Band edges plus the `q − 1` gaps, labeled by the Diophantine rule.
pub fn gaps<T: Scalar>(flux: RationalFlux, min_width: T) -> Result<BandStructure<T>> {
    gaps_with(flux, min_width, &Diophantine)
}

/// As [`gaps`], with a caller-supplied labeler.
pub fn gaps_with<T: Scalar>(
    flux: RationalFlux,
    min_width: T,
    labeler: &dyn GapLabeler,
) -> Result<BandStructure<T>> {
    let mut bs = band_edges::<T>(flux)?;
    let q = bs.q();
    let mut gaps = Vec::with_capacity(q.saturating_sub(1));
    for j in 1..q {
        let lo = bs.bands[j - 1].hi;
        let hi = bs.bands[j].lo;
        let central = q % 2 == 0 && 2 * j == q;
        let label = if !central && hi - lo > min_width {
            match labeler.label(flux, j as i64) {
                Ok(l) => Some(l),
                Err(Error::ClosedGap { .. }) => None,
                Err(e) => return Err(e),
            }
        } else {
            None
        };
        let (lo, hi) = if label.is_some() {
            (lo, hi)
        } else {
            let mid = (lo + hi) / T::lit(2.0);
            (mid, mid)
        };
        gaps.push(Gap {
            j: j as i64,
            lo,
            hi,
            label,
        });
    }
    bs.gaps = gaps;
    Ok(bs)
}

/// Sorted eigenvalues on a uniform `n1 × n2` mesh of the magnetic Brillouin zone.
#[derive(Debug, Clone)]
pub struct MeshSpectrum<T> {
    pub flux: RationalFlux,
    pub n1: usize,
    pub n2: usize,
    q: usize,
    values: Vec<T>,
}

impl<T: Scalar> MeshSpectrum<T> {
    pub fn bands(&self) -> usize {
        self.q
    }

    /// Number of k-points.
    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn at(&self, i1: usize, i2: usize) -> &[T] {
        let idx = i1 * self.n2 + i2;
        &self.values[idx * self.q..(idx + 1) * self.q]
    }

    /// Per-k-point eigenvalue slices in mesh order.
    pub fn iter(&self) -> impl Iterator<Item = &[T]> {
        self.values.chunks(self.q)
    }

    pub fn all_values(&self) -> &[T] {
        &self.values
    }

    /// `(1/q)·⟨Σ_b (μ − E_b)₊⟩`, energy per unit cell.
    pub fn pressure(&self, mu: T) -> T {
        let mut total = T::zero();
        for e in self.values.iter() {
            if *e < mu {
                total += mu - *e;
            }
        }
        total / T::from_count(self.values.len())
    }

    /// `(1/q)·⟨#{b : E_b < μ}⟩`, particles per unit cell.
    pub fn density(&self, mu: T) -> T {
        let count = self.values.iter().filter(|e| **e < mu).count();
        T::from_count(count) / T::from_count(self.values.len())
    }
}

/// Momentum of mesh point `(i1, i2)`.
pub fn mesh_momentum<T: Scalar>(q: i64, n1: usize, n2: usize, i1: usize, i2: usize) -> (T, T) {
    let k1 = T::TAU() * T::from_count(i1) / (T::from_i64(q).unwrap() * T::from_count(n1));
    let k2 = T::TAU() * T::from_count(i2) / T::from_count(n2);
    (k1, k2)
}

pub fn spectrum_mesh<T: Scalar>(
    flux: RationalFlux,
    n1: usize,
    n2: usize,
) -> Result<MeshSpectrum<T>> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::Config(format!(
            "mesh {n1}x{n2} must be at least 1x1"
        )));
    }
    let q = flux.q();
    let rows: Vec<Vec<T>> = (0..n1 * n2)
        .into_par_iter()
        .map(|idx| {
            let (k1, k2) = mesh_momentum::<T>(q, n1, n2, idx / n2, idx % n2);
            hamiltonian(flux, k1, k2).eigenvalues()
        })
        .collect::<Result<_>>()?;
    Ok(MeshSpectrum {
        flux,
        n1,
        n2,
        q: q as usize,
        values: rows.into_iter().flatten().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::{farey_sequence, reduce};

    fn f(p: i64, q: i64) -> RationalFlux {
        reduce(p, q).unwrap()
    }

    #[test]
    fn zero_flux_is_the_bare_dispersion() {
        for (k1, k2) in [(0.0, 0.0), (0.3, -1.2), (2.0, 3.0)] {
            let h = hamiltonian::<f64>(RationalFlux::ZERO, k1, k2);
            assert_eq!(h.dim(), 1);
            assert_eq!(h.eigenvalues().unwrap(), vec![f64::cos(k1) + f64::cos(k2)]);
        }
    }

    #[test]
    fn half_flux_at_origin() {
        let h = hamiltonian::<f64>(f(1, 2), 0.0, 0.0);
        assert!((h.entry(0, 0).re - 1.0).abs() < 1e-15);
        assert!((h.entry(1, 1).re + 1.0).abs() < 1e-15);
        assert!((h.entry(0, 1).norm() - 1.0).abs() < 1e-15);
        let e = h.eigenvalues().unwrap();
        assert!((e[0] + 2f64.sqrt()).abs() < 1e-14);
        assert!((e[1] - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn hermitian_and_traceless() {
        for flux in farey_sequence(9).into_iter().filter(|f| f.q() >= 2) {
            for (k1, k2) in [(0.0, 0.0), (0.17, 2.3), (1.1, -0.4)] {
                let h = hamiltonian::<f64>(flux, k1, k2);
                assert!(h.hermiticity_defect() < 1e-14);
                assert!(h.trace().abs() < 1e-13, "{flux}");
            }
        }
    }

    #[test]
    fn third_band_edges() {
        let bs = band_edges::<f64>(f(1, 3)).unwrap();
        let s3 = 3f64.sqrt();
        let want = [
            (-(1.0 + s3) / 2.0, -1.0),
            ((1.0 - s3) / 2.0, (s3 - 1.0) / 2.0),
            (1.0, (1.0 + s3) / 2.0),
        ];
        for (band, (lo, hi)) in bs.bands.iter().zip(want) {
            assert!((band.lo - lo).abs() < 1e-12 && (band.hi - hi).abs() < 1e-12);
        }
    }

    #[test]
    fn folding_and_reflection_give_identical_edges() {
        for flux in farey_sequence(12) {
            let base = band_edges::<f64>(flux).unwrap().bands;
            for other in [
                flux.reflected(),
                flux.shifted(1),
                flux.negated(),
                flux.shifted(-3),
            ] {
                assert_eq!(band_edges::<f64>(other).unwrap().bands, base);
            }
        }
    }

    #[test]
    fn gap_labels_and_closed_center() {
        let bs = gaps::<f64>(f(1, 3), 1e-9).unwrap();
        let ks: Vec<_> = bs.open_gaps().map(|g| g.label.unwrap().k).collect();
        assert_eq!(ks, vec![1, -1]);
        let half = gaps::<f64>(f(1, 2), 1e-9).unwrap();
        assert_eq!(half.gaps.len(), 1);
        assert!(!half.gaps[0].is_open());
        assert_eq!(half.gaps[0].width(), 0.0);
        assert!(gaps::<f64>(RationalFlux::ZERO, 1e-9)
            .unwrap()
            .gaps
            .is_empty());
    }

    #[test]
    fn odd_denominators_open_every_gap() {
        for flux in farey_sequence(12)
            .into_iter()
            .filter(|f| f.q() % 2 == 1 && f.q() > 1)
        {
            let bs = gaps::<f64>(flux, 1e-9).unwrap();
            assert_eq!(bs.open_gaps().count(), flux.q() as usize - 1, "{flux}");
        }
        for flux in farey_sequence(12).into_iter().filter(|f| f.q() % 2 == 0) {
            let bs = gaps::<f64>(flux, 1e-9).unwrap();
            assert_eq!(bs.open_gaps().count(), flux.q() as usize - 2, "{flux}");
        }
    }

    #[test]
    fn classify_regions() {
        let bs = gaps::<f64>(f(1, 3), 1e-9).unwrap();
        assert_eq!(bs.classify(-3.0), Region::Below);
        assert_eq!(bs.classify(3.0), Region::Above);
        assert_eq!(bs.classify(-1.2), Region::Band(1));
        assert_eq!(bs.classify(0.0), Region::Band(2));
        assert!(matches!(
            bs.classify(0.7),
            Region::Gap(GapLabel { j: 2, k: -1, n: 1 })
        ));
        let half = gaps::<f64>(f(1, 2), 1e-9).unwrap();
        assert!(matches!(half.classify(0.0), Region::Band(_)));
    }

    #[test]
    fn mesh_examples() {
        let m = spectrum_mesh::<f64>(RationalFlux::ZERO, 4, 4).unwrap();
        assert_eq!(m.len(), 16);
        for i1 in 0..4 {
            for i2 in 0..4 {
                let (k1, k2) = mesh_momentum::<f64>(1, 4, 4, i1, i2);
                assert!((m.at(i1, i2)[0] - (k1.cos() + k2.cos())).abs() < 1e-15);
            }
        }
        let m = spectrum_mesh::<f64>(f(1, 2), 16, 16).unwrap();
        assert!(m
            .all_values()
            .iter()
            .all(|e| e.abs() <= 2f64.sqrt() + 1e-12));
        let m = spectrum_mesh::<f64>(f(1, 3), 32, 32).unwrap();
        let min = m.all_values().iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((min + (1.0 + 3f64.sqrt()) / 2.0).abs() < 1e-9);
        assert!(spectrum_mesh::<f64>(f(1, 3), 0, 4).is_err());
    }

    #[test]
    fn mesh_stays_inside_band_edges() {
        for flux in farey_sequence(12) {
            let bs = band_edges::<f64>(flux).unwrap();
            let mesh = spectrum_mesh::<f64>(flux, 64, 64).unwrap();
            for e in mesh.all_values() {
                assert!(
                    bs.bands
                        .iter()
                        .any(|b| b.lo - 1e-9 <= *e && *e <= b.hi + 1e-9),
                    "{flux}: {e} outside bands"
                );
            }
            // (π/q, π/q) is equivalent to a mesh point iff q·k₂ ≡ π (mod 2π) is reachable
            let q = flux.q() as usize;
            let attained = (0..64).any(|i2| (2 * i2 * q) % 128 == 64);
            for (b, band) in bs.bands.iter().enumerate().filter(|_| attained) {
                let lo = mesh.iter().map(|v| v[b]).fold(f64::INFINITY, f64::min);
                let hi = mesh.iter().map(|v| v[b]).fold(f64::NEG_INFINITY, f64::max);
                assert!(
                    (lo - band.lo).abs() < 1e-9 && (hi - band.hi).abs() < 1e-9,
                    "{flux} band {b}"
                );
            }
        }
    }

    #[test]
    fn mesh_spectrum_is_electron_hole_symmetric() {
        for flux in [f(1, 3), f(2, 5), f(1, 4), f(3, 7)] {
            let mesh = spectrum_mesh::<f64>(flux, 8, 8).unwrap();
            let mut v = mesh.all_values().to_vec();
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let n = v.len();
            for i in 0..n {
                assert!((v[i] + v[n - 1 - i]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn single_precision_band_edges() {
        let bs = band_edges::<f32>(f(1, 3)).unwrap();
        assert!((bs.bands[0].lo + (1.0 + 3f32.sqrt()) / 2.0).abs() < 1e-5);
        assert!((bs.bands[2].lo - 1.0).abs() < 1e-5);
    }
}
