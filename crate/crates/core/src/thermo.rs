//! Zero-temperature thermodynamics of the Harper model.
//!
//! Units: `e = ħ = 1`, unit cell area 1, so `B = 2π·Φ̃` with `Φ̃ = p/q` the
//! flux per cell, and the conductance quantum is `1/2π`. Pressure is the
//! grand potential with the sign flipped, per unit cell:
//! `P(μ) = (1/q)·⟨Σ_b (μ − E_b(k))₊⟩` over the magnetic Brillouin zone.
//! Density `ρ = ∂P/∂μ`, magnetization `M = ∂P/∂B`, Hall conductance
//! `σ = ∂ρ/∂B`. In a gap `ρ = n + k·Φ̃`, so `σ = k/2π`.

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flux::{
    best_approximant, farey_neighbors, farey_sequence, label_gap, reduce, swapped_label,
    GapLabeler, RationalFlux,
};
use crate::scalar::Scalar;
use crate::spectrum::{gaps, gaps_with, spectrum_mesh, BandStructure, Region};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermoSample<T> {
    pub mu: T,
    pub flux: RationalFlux,
    pub pressure: T,
    pub density: T,
    /// `∂P/∂B`; absent when μ sits in a band at some stencil flux.
    pub magnetization: Option<T>,
    /// Hall integer `k` (conductance `k/2π`); absent inside bands.
    pub hall_k: Option<i64>,
}

impl<T: Scalar> ThermoSample<T> {
    /// Hall conductance in natural units.
    pub fn sigma_hall(&self) -> Option<T> {
        self.hall_k.map(|k| T::from_i64(k).unwrap() / T::TAU())
    }
}

/// `P(μ)` at `flux` on an `n1 × n2` mesh.
pub fn pressure<T: Scalar>(mu: T, flux: RationalFlux, n1: usize, n2: usize) -> Result<T> {
    Ok(spectrum_mesh::<T>(flux, n1, n2)?.pressure(mu))
}

/// `ρ(μ)` at `flux` on an `n1 × n2` mesh.
pub fn density<T: Scalar>(mu: T, flux: RationalFlux, n1: usize, n2: usize) -> Result<T> {
    Ok(spectrum_mesh::<T>(flux, n1, n2)?.density(mu))
}

/// Density from the gap-labeling identity alone: `0` below, `1` above,
/// `j/q` in open gap `j`; `None` inside a band.
pub fn density_exact<T: Scalar>(mu: T, bands: &BandStructure<T>) -> Option<Ratio<i64>> {
    let q = bands.flux.q();
    match bands.classify(mu) {
        Region::Below => Some(Ratio::from_integer(0)),
        Region::Above => Some(Ratio::from_integer(1)),
        Region::Gap(l) => Some(Ratio::new(l.j, q)),
        Region::Band(_) => None,
    }
}

/// Hall integer from the Středa slope `Δρ/ΔΦ̃` between two fluxes that share
/// an open gap at `mu`.
///
/// The densities are `j/q` and `j′/q′`, taken from the gap indices, and the
/// quotient is formed in exact integer arithmetic.
pub fn streda_sigma<T: Scalar>(
    mu: T,
    flux: RationalFlux,
    neighbor: RationalFlux,
    min_width: T,
) -> Result<i64> {
    if flux == neighbor {
        return Err(Error::GapNotTracked(format!("{flux} compared with itself")));
    }
    let a = gaps::<T>(flux, min_width)?;
    let b = gaps::<T>(neighbor, min_width)?;
    let (la, lb) = match (a.classify(mu), b.classify(mu)) {
        (Region::Gap(la), Region::Gap(lb)) => (la, lb),
        _ => {
            return Err(Error::GapNotTracked(format!(
                "μ = {mu} is not in an open gap of both {flux} and {neighbor}"
            )))
        }
    };
    if (la.k, la.n) != (lb.k, lb.n) {
        return Err(Error::GapNotTracked(format!(
            "gap labels ({}, {}) at {flux} and ({}, {}) at {neighbor} differ",
            la.k, la.n, lb.k, lb.n
        )));
    }
    let (p1, q1) = (flux.p() as i128, flux.q() as i128);
    let (p2, q2) = (neighbor.p() as i128, neighbor.q() as i128);
    let num = lb.j as i128 * q1 - la.j as i128 * q2;
    let den = p2 * q1 - p1 * q2;
    if num % den != 0 {
        return Err(Error::GapNotTracked(format!(
            "Středa quotient {num}/{den} is not an integer"
        )));
    }
    Ok((num / den) as i64)
}

/// Secant `(P(μ, Φ̃₊) − P(μ, Φ̃₋)) / (2π (Φ̃₊ − Φ̃₋))` and whether μ lies in a
/// region with the same `(k, n)` at all three fluxes.
pub fn magnetization_stencil<T: Scalar>(
    mu: T,
    center: RationalFlux,
    left: RationalFlux,
    right: RationalFlux,
    n1: usize,
    n2: usize,
) -> Result<(T, bool)> {
    let width = T::lit(crate::spectrum::DEFAULT_MIN_WIDTH);
    let pairs = [left, center, right]
        .iter()
        .map(|f| Ok(gaps::<T>(*f, width)?.classify(mu).hall_pair()))
        .collect::<Result<Vec<_>>>()?;
    let tracked = pairs[0].is_some() && pairs.iter().all(|p| *p == pairs[0]);
    let pl = pressure(mu, left, n1, n2)?;
    let pr = pressure(mu, right, n1, n2)?;
    let dphi = (right.ratio() - left.ratio()).to_f64_lossy();
    let m = (pr - pl) / (T::TAU() * T::lit(dphi));
    Ok((m, tracked))
}

/// `M = ∂P/∂B` by a secant over `flux ± delta`, each end snapped to a
/// rational with denominator at most `qmax`.
pub fn magnetization<T: Scalar>(
    mu: T,
    flux: RationalFlux,
    delta: T,
    qmax: i64,
    n1: usize,
    n2: usize,
) -> Result<T> {
    let x: T = flux.value();
    let left = best_approximant(x - delta, qmax);
    let right = best_approximant(x + delta, qmax);
    if left >= flux || right <= flux {
        return Err(Error::Config(format!(
            "stencil ±{delta} around {flux} collapses at qmax = {qmax}"
        )));
    }
    let (m, tracked) = magnetization_stencil(mu, flux, left, right, n1, n2)?;
    if !tracked {
        return Err(Error::GapNotTracked(format!(
            "μ = {mu} does not stay in one gap over [{left}, {right}]"
        )));
    }
    Ok(m)
}

/// As [`magnetization`], with the Farey neighbours of `flux` in `F_qmax` as
/// the stencil.
pub fn magnetization_farey<T: Scalar>(
    mu: T,
    flux: RationalFlux,
    qmax: i64,
    n1: usize,
    n2: usize,
) -> Result<T> {
    let (left, right) = farey_neighbors(flux, qmax)?;
    let (m, tracked) = magnetization_stencil(mu, flux, left, right, n1, n2)?;
    if !tracked {
        return Err(Error::GapNotTracked(format!(
            "μ = {mu} does not stay in one gap over [{left}, {right}]"
        )));
    }
    Ok(m)
}

/// Samples `P, ρ, M, k` on a list of chemical potentials. The magnetization
/// stencil is the pair of Farey neighbours of `flux` in `F_stencil_qmax`.
pub fn thermo_samples<T: Scalar>(
    flux: RationalFlux,
    mus: &[T],
    n1: usize,
    n2: usize,
    stencil_qmax: i64,
) -> Result<Vec<ThermoSample<T>>> {
    let (left, right) = farey_neighbors(flux, stencil_qmax)?;
    let width = T::lit(crate::spectrum::DEFAULT_MIN_WIDTH);
    let structures = [
        gaps::<T>(left, width)?,
        gaps::<T>(flux, width)?,
        gaps::<T>(right, width)?,
    ];
    let center = spectrum_mesh::<T>(flux, n1, n2)?;
    let ml = spectrum_mesh::<T>(left, n1, n2)?;
    let mr = spectrum_mesh::<T>(right, n1, n2)?;
    let dphi = T::lit((right.ratio() - left.ratio()).to_f64_lossy());
    Ok(mus
        .iter()
        .map(|&mu| {
            let pairs: Vec<_> = structures
                .iter()
                .map(|s| s.classify(mu).hall_pair())
                .collect();
            let tracked = pairs[0].is_some() && pairs.iter().all(|p| *p == pairs[0]);
            ThermoSample {
                mu,
                flux,
                pressure: center.pressure(mu),
                density: center.density(mu),
                magnetization: tracked
                    .then(|| (mr.pressure(mu) - ml.pressure(mu)) / (T::TAU() * dphi)),
                hall_k: pairs[1].map(|(k, _)| k),
            }
        })
        .collect())
}

/// Largest violations of the pressure symmetries over the sampled grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetryReport {
    /// `|P(μ, Φ) − P(μ, −Φ)|`
    pub reflection: f64,
    /// `|P(μ, Φ) − P(μ, Φ + 1)|`
    pub periodicity: f64,
    /// `|P(μ, Φ) − μ − P(−μ, Φ)|`
    pub electron_hole: f64,
    /// `|P(μ, Φ) + μ − P(−μ, Φ)|`, the opposite sign convention, kept for reference.
    pub electron_hole_opposite_sign: f64,
}

impl SymmetryReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.reflection < tol && self.periodicity < tol && self.electron_hole < tol
    }
}

pub fn check_symmetries<T: Scalar>(
    mus: &[T],
    fluxes: &[RationalFlux],
    n1: usize,
    n2: usize,
) -> Result<SymmetryReport> {
    let mut report = SymmetryReport {
        reflection: 0.0,
        periodicity: 0.0,
        electron_hole: 0.0,
        electron_hole_opposite_sign: 0.0,
    };
    for &flux in fluxes {
        let base = spectrum_mesh::<T>(flux, n1, n2)?;
        let neg = spectrum_mesh::<T>(flux.negated(), n1, n2)?;
        let shifted = spectrum_mesh::<T>(flux.shifted(1), n1, n2)?;
        for &mu in mus {
            let p = base.pressure(mu);
            let p_flip = base.pressure(-mu);
            let worse = |acc: f64, x: T| acc.max(x.abs().as_f64());
            report.reflection = worse(report.reflection, p - neg.pressure(mu));
            report.periodicity = worse(report.periodicity, p - shifted.pressure(mu));
            report.electron_hole = worse(report.electron_hole, p - mu - p_flip);
            report.electron_hole_opposite_sign =
                worse(report.electron_hole_opposite_sign, p + mu - p_flip);
        }
    }
    Ok(report)
}

/// One gap of the Harper model at the dual flux, seen from the Landau side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualGap {
    pub j: i64,
    pub k: i64,
    pub n: i64,
    /// `j = n·q′ + k·p′` at the dual flux `p′/q′`.
    pub identity_holds: bool,
    /// `2π σ_l = ρ_b − Φ̃_b·(2π σ_b)`, exact; must equal `n`.
    pub landau_hall: Ratio<i64>,
    /// Hall integer read off `P_l` by a Středa slope against a neighbouring
    /// flux carrying the same gap; `None` when no neighbour was found.
    pub streda_n: Option<i64>,
    /// Centered label from the swapped Diophantine equation.
    pub swapped: i64,
    /// `swapped ≡ n` modulo the dual numerator.
    pub swapped_congruent: bool,
}

impl DualGap {
    pub fn passed(&self) -> bool {
        self.identity_holds
            && self.landau_hall == Ratio::from_integer(self.n)
            && self.streda_n.is_none_or(|s| s == self.n)
            && self.swapped_congruent
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualityReport {
    /// Landau flux quanta per cell, `p/q`.
    pub landau_flux: RationalFlux,
    /// Harper flux `q/p` carrying the same spectrum.
    pub dual_flux: RationalFlux,
    pub gaps: Vec<DualGap>,
    /// `2π σ_l` for a full level (`ρ_b = 1`, `σ_b = 0`).
    pub full_level: Ratio<i64>,
    /// `2π σ_l` for an empty level.
    pub empty_level: Ratio<i64>,
    /// `max |P_l(μ) − Φ̃_l·μ|` over the μ-grid points above the spectrum.
    pub full_pressure_residual: f64,
    /// Sign `s` in `m_l = s·P_b/2π − Φ̃_b·m_b` that fits the full-level limit.
    pub magnetization_sign: i8,
    /// Residuals of the magnetization relation with `s = +1` and `s = −1`.
    pub magnetization_residuals: (f64, f64),
}

impl DualityReport {
    pub fn passed(&self) -> bool {
        self.gaps.iter().all(DualGap::passed)
            && self.full_level == Ratio::from_integer(1)
            && self.empty_level == Ratio::from_integer(0)
            && self.full_pressure_residual < 1e-9
    }
}

/// Landau-split pressure `P_l(μ; Φ̃) = Φ̃ · P_b(μ; 1/Φ̃)`.
pub fn landau_pressure<T: Scalar>(
    mu: T,
    landau_flux: RationalFlux,
    n1: usize,
    n2: usize,
) -> Result<T> {
    let dual = landau_flux.reciprocal()?;
    Ok(landau_flux.value::<T>() * pressure(mu, dual, n1, n2)?)
}

/// Checks the Harper ↔ Landau duality for Landau flux `p/q`.
pub fn check_duality<T: Scalar>(
    p: i64,
    q: i64,
    mus: &[T],
    n1: usize,
    n2: usize,
    labeler: &dyn GapLabeler,
) -> Result<DualityReport> {
    if p == 0 {
        return Err(Error::ZeroFlux);
    }
    if q <= 0 || p < 0 {
        return Err(Error::NonPositive { p, q });
    }
    let landau = reduce(p, q)?;
    if landau.p() != p {
        return Err(Error::NotCoprime { p, q });
    }
    let dual = landau.reciprocal()?;
    let width = T::lit(crate::spectrum::DEFAULT_MIN_WIDTH);
    let bs = gaps_with::<T>(dual, width, labeler)?;
    let dual_mesh = spectrum_mesh::<T>(dual, n1, n2)?;
    let f_l: T = landau.value();

    let mut out = Vec::new();
    for gap in bs.open_gaps() {
        let label = gap.label.unwrap();
        let (j, k, n) = (label.j, label.k, label.n);
        let identity_holds = label.satisfies_identity(dual);
        let rho_b = Ratio::new(j, dual.q());
        let landau_hall = rho_b - dual.ratio() * Ratio::from_integer(k);

        let mu = (gap.lo + gap.hi) / T::lit(2.0);
        let rho_l = f_l * dual_mesh.density(mu);
        let streda_n = match tracked_neighbor(dual, mu, (k, n), width)? {
            Some(other) => {
                let other_landau = other.reciprocal()?;
                let f_other: T = other_landau.value();
                let rho_other = f_other * density(mu, other, n1, n2)?;
                let slope = (rho_other - rho_l) / (f_other - f_l);
                Some(slope.round().to_i64().unwrap())
            }
            None => None,
        };
        let swapped = swapped_label(dual, j)?;
        let swapped_congruent = (swapped - n).rem_euclid(dual.p()) == 0;
        out.push(DualGap {
            j,
            k,
            n,
            identity_holds,
            landau_hall,
            streda_n,
            swapped,
            swapped_congruent,
        });
    }

    // Full and empty level: ρ_b ∈ {1, 0}, σ_b = 0.
    let full_level = Ratio::from_integer(1) - dual.ratio() * Ratio::from_integer(0);
    let empty_level = Ratio::from_integer(0) - dual.ratio() * Ratio::from_integer(0);

    let top = T::lit(2.0);
    let mut full_pressure_residual = 0.0f64;
    for &mu in mus.iter().filter(|mu| **mu > top) {
        let pl = f_l * dual_mesh.pressure(mu);
        full_pressure_residual = full_pressure_residual.max((pl - f_l * mu).abs().as_f64());
    }

    // Magnetization relation in the full-level limit, where P_b = μ for every flux.
    let mu = T::lit(3.0);
    let stencil_order = (2 * q).max(p + 1).max(4);
    let (ll, lr) = farey_neighbors(landau, stencil_order)?;
    let m_l = (lr.value::<T>() * pressure(mu, lr.reciprocal()?, n1, n2)?
        - ll.value::<T>() * pressure(mu, ll.reciprocal()?, n1, n2)?)
        / (T::TAU() * T::lit((lr.ratio() - ll.ratio()).to_f64_lossy()));
    let (bl, br) = farey_neighbors(dual, (2 * p).max(q + 1).max(4))?;
    let m_b = (pressure(mu, br, n1, n2)? - pressure(mu, bl, n1, n2)?)
        / (T::TAU() * T::lit((br.ratio() - bl.ratio()).to_f64_lossy()));
    let p_b = dual_mesh.pressure(mu);
    let v: T = dual.value();
    let residual = |s: T| (m_l - (s * p_b / T::TAU() - v * m_b)).abs().as_f64();
    let plus = residual(T::one());
    let minus = residual(-T::one());
    Ok(DualityReport {
        landau_flux: landau,
        dual_flux: dual,
        gaps: out,
        full_level,
        empty_level,
        full_pressure_residual,
        magnetization_sign: if plus <= minus { 1 } else { -1 },
        magnetization_residuals: (plus, minus),
    })
}

/// Nearest Harper flux with the same integer part as `flux` whose open gap at
/// `mu` carries the label pair `pair`.
fn tracked_neighbor<T: Scalar>(
    flux: RationalFlux,
    mu: T,
    pair: (i64, i64),
    width: T,
) -> Result<Option<RationalFlux>> {
    let whole = flux.floor();
    let order = (3 * flux.q()).max(12);
    let mut candidates: Vec<RationalFlux> = farey_sequence(order)
        .into_iter()
        .map(|c| c.shifted(whole))
        .filter(|c| *c != flux && c.p() != 0)
        .collect();
    let dist = |c: &RationalFlux| {
        let d = c.ratio() - flux.ratio();
        if d < Ratio::from_integer(0) {
            -d
        } else {
            d
        }
    };
    candidates.sort_by(|a, b| dist(a).cmp(&dist(b)).then(a.q().cmp(&b.q())));
    for c in candidates {
        let bs = gaps::<T>(c, width)?;
        if let Region::Gap(l) = bs.classify(mu) {
            let l = label_gap(c, l.j)?;
            if (l.k, l.n) == pair {
                return Ok(Some(c));
            }
        }
    }
    Ok(None)
}

/// Monotonicity class of `H(B)` on one grid interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HClass {
    /// `ΔH > 0`: `B(H)` single-valued here.
    Invertible,
    /// `ΔH ≤ 0`: several `B` share one `H`; magnetic domains may coexist.
    CoexistenceCandidate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HScanRecord {
    pub mu: f64,
    /// Grid values of `B`.
    pub b: Vec<f64>,
    /// Flux each grid point was snapped to.
    pub flux: Vec<RationalFlux>,
    pub magnetization: Vec<f64>,
    /// `H = B − 4πM`.
    pub h: Vec<f64>,
    /// Whether μ stayed in one gap across the magnetization stencil.
    pub tracked: Vec<bool>,
    /// One entry per interval `[b_i, b_{i+1}]`.
    pub intervals: Vec<HClass>,
}

/// `H = B − 4πM` pointwise and the sign class of each `ΔH`.
pub fn classify_h<T: Scalar>(b: &[T], m: &[T]) -> (Vec<T>, Vec<HClass>) {
    assert_eq!(b.len(), m.len());
    let four_pi = T::lit(4.0) * T::PI();
    let h: Vec<T> = b.iter().zip(m).map(|(&b, &m)| b - four_pi * m).collect();
    let classes = h
        .windows(2)
        .map(|w| {
            if w[1] - w[0] > T::zero() {
                HClass::Invertible
            } else {
                HClass::CoexistenceCandidate
            }
        })
        .collect();
    (h, classes)
}

/// Tabulates `M(B)` and `H(B)` at fixed μ on `steps` evenly spaced `B` values.
///
/// Each `B` is snapped to the nearest flux with denominator `≤ qmax`; `M` is
/// the secant over that flux's Farey neighbours in `F_qmax`. The output is a
/// numerical table only.
pub fn h_field_scan(
    mu: f64,
    b_from: f64,
    b_to: f64,
    steps: usize,
    qmax: i64,
    n1: usize,
    n2: usize,
) -> Result<HScanRecord> {
    if steps < 2 {
        return Err(Error::Config("scan needs at least 2 steps".into()));
    }
    if !(b_from.is_finite() && b_to.is_finite()) || b_from >= b_to {
        return Err(Error::Config(format!("empty B window [{b_from}, {b_to}]")));
    }
    let tau = std::f64::consts::TAU;
    let b: Vec<f64> = (0..steps)
        .map(|i| b_from + (b_to - b_from) * i as f64 / (steps - 1) as f64)
        .collect();
    let flux: Vec<RationalFlux> = b.iter().map(|&b| best_approximant(b / tau, qmax)).collect();
    let mut magnetization = Vec::with_capacity(steps);
    let mut tracked = Vec::with_capacity(steps);
    for &f in &flux {
        let (left, right) = farey_neighbors(f, qmax.max(f.q()))?;
        let (m, t) = magnetization_stencil(mu, f, left, right, n1, n2)?;
        magnetization.push(m);
        tracked.push(t);
    }
    let (h, intervals) = classify_h(&b, &magnetization);
    Ok(HScanRecord {
        mu,
        b,
        flux,
        magnetization,
        h,
        tracked,
        intervals,
    })
}

trait LossyRatio {
    fn to_f64_lossy(&self) -> f64;
}

impl LossyRatio for Ratio<i64> {
    fn to_f64_lossy(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::Diophantine;

    fn f(p: i64, q: i64) -> RationalFlux {
        reduce(p, q).unwrap()
    }

    #[test]
    fn pressure_limits() {
        for flux in [RationalFlux::ZERO, f(1, 3), f(2, 5)] {
            assert_eq!(pressure(-3.0, flux, 8, 8).unwrap(), 0.0);
        }
        assert!((pressure(3.0f64, f(1, 3), 64, 64).unwrap() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn zero_flux_pressure_at_band_center() {
        // ∫(−cos k1 − cos k2)₊ d²k / 4π² = 4/π²; the kink along |k1|+|k2| = π
        // limits the trapezoid rule to O(1/N²).
        let exact = 4.0 / std::f64::consts::PI.powi(2);
        let coarse = pressure(0.0, RationalFlux::ZERO, 128, 128).unwrap();
        let fine = pressure(0.0, RationalFlux::ZERO, 512, 512).unwrap();
        assert!((fine - exact).abs() < 1e-4);
        assert!((fine - exact).abs() < (coarse - exact).abs());
    }

    #[test]
    fn density_examples() {
        assert_eq!(density(0.7, f(1, 3), 16, 16).unwrap(), 2.0 / 3.0);
        assert_eq!(density(-3.0, f(1, 3), 4, 4).unwrap(), 0.0);
        assert_eq!(density(3.0, f(1, 3), 4, 4).unwrap(), 1.0);
        let bs = gaps::<f64>(f(1, 3), 1e-9).unwrap();
        assert_eq!(density_exact(0.7, &bs), Some(Ratio::new(2, 3)));
        assert_eq!(density_exact(-0.7, &bs), Some(Ratio::new(1, 3)));
        assert_eq!(density_exact(0.0, &bs), None);
        assert_eq!(density_exact(5.0, &bs), Some(Ratio::from_integer(1)));
    }

    #[test]
    fn density_is_derivative_of_pressure() {
        let mesh = spectrum_mesh::<f64>(f(2, 5), 24, 24).unwrap();
        let h = 1e-6;
        for i in 0..41 {
            let mu = -2.0 + 0.1 * i as f64 + 0.013;
            let fd = (mesh.pressure(mu + h) - mesh.pressure(mu - h)) / (2.0 * h);
            // the mesh density is a step function; the difference quotient
            // brackets it unless an eigenvalue sits within h of μ
            let near = mesh.all_values().iter().any(|e| (e - mu).abs() < h);
            if !near {
                assert!((fd - mesh.density(mu)).abs() < 1e-6, "μ = {mu}");
            }
        }
    }

    #[test]
    fn streda_examples() {
        assert_eq!(streda_sigma(-0.6, f(1, 3), f(2, 5), 1e-9).unwrap(), 1);
        assert_eq!(streda_sigma(0.6, f(1, 3), f(2, 5), 1e-9).unwrap(), -1);
        assert!(matches!(
            streda_sigma(0.0, RationalFlux::ZERO, f(1, 3), 1e-9),
            Err(Error::GapNotTracked(_))
        ));
        // gap 1 of 1/3 (k = 1) against gap 1 of 2/5 (k = −2): different gaps
        assert!(matches!(
            streda_sigma(-1.1, f(1, 3), f(2, 5), 1e-9),
            Err(Error::GapNotTracked(_))
        ));
    }

    #[test]
    fn magnetization_limits() {
        let m = magnetization(3.0f64, f(1, 3), 0.02, 64, 16, 16).unwrap();
        assert!(m.abs() < 1e-6);
        assert_eq!(magnetization(-3.0, f(1, 3), 0.02, 64, 16, 16).unwrap(), 0.0);
        assert!(matches!(
            magnetization(0.0, f(1, 3), 0.02, 64, 16, 16),
            Err(Error::GapNotTracked(_))
        ));
        assert!(magnetization(3.0, f(1, 3), 1e-6, 8, 16, 16).is_err());
    }

    #[test]
    fn magnetization_slope_in_gap_is_hall_conductance() {
        // gap 1 of 1/3 is (−1, −0.366) and carries k = 1
        let m1 = magnetization_farey(-0.8, f(1, 3), 64, 8, 8).unwrap();
        let m2 = magnetization_farey(-0.5, f(1, 3), 64, 8, 8).unwrap();
        let slope = (m2 - m1) / 0.3;
        assert!(
            (slope - 1.0 / std::f64::consts::TAU).abs() < 1e-3,
            "{slope}"
        );
    }

    #[test]
    fn pressure_convex_and_gap_linear() {
        for flux in [RationalFlux::ZERO, f(1, 2), f(1, 3), f(2, 5)] {
            let mesh = spectrum_mesh::<f64>(flux, 32, 32).unwrap();
            let mus: Vec<f64> = (0..201).map(|i| -2.5 + 5.0 * i as f64 / 200.0).collect();
            let p: Vec<f64> = mus.iter().map(|&m| mesh.pressure(m)).collect();
            for w in p.windows(3) {
                assert!(w[2] - 2.0 * w[1] + w[0] >= -1e-9);
                assert!(w[1] >= w[0]);
            }
            let bs = gaps::<f64>(flux, 1e-9).unwrap();
            for g in bs.open_gaps() {
                let (a, b) = (g.lo + 1e-6, g.hi - 1e-6);
                let slope = (mesh.pressure(b) - mesh.pressure(a)) / (b - a);
                let want = g.label.unwrap().j as f64 / flux.q() as f64;
                assert!((slope - want).abs() < 1e-8);
                for t in [0.25, 0.5, 0.75] {
                    let mu = a + t * (b - a);
                    let secant = mesh.pressure(a) + slope * (mu - a);
                    assert!((mesh.pressure(mu) - secant).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn symmetry_report() {
        let mus: Vec<f64> = (0..101).map(|i| -3.0 + 0.06 * i as f64).collect();
        let r = check_symmetries(&mus, &[f(1, 3), f(2, 5)], 16, 16).unwrap();
        assert!(r.passed(1e-8), "{r:?}");
        assert!(r.electron_hole_opposite_sign > 1.0);
        let mesh = spectrum_mesh::<f64>(f(1, 3), 16, 16).unwrap();
        assert!((mesh.pressure(3.0) - 3.0 - mesh.pressure(-3.0)).abs() < 1e-12);
    }

    #[test]
    fn duality_report_small() {
        let mus = [-3.0, 0.0, 2.5, 3.0];
        let r = check_duality(3, 5, &mus, 8, 8, &Diophantine).unwrap();
        assert_eq!(r.dual_flux, f(5, 3));
        assert_eq!(r.gaps.len(), 2);
        for g in &r.gaps {
            assert!(g.passed(), "{g:?}");
            assert_eq!(g.streda_n, Some(g.n));
        }
        assert_eq!(r.full_level, Ratio::from_integer(1));
        assert_eq!(r.magnetization_sign, 1);
        assert!(r.magnetization_residuals.0 < 1e-9);
        assert!(r.passed());
        assert!(matches!(
            check_duality(0, 1, &mus, 4, 4, &Diophantine),
            Err(Error::ZeroFlux)
        ));
    }

    #[test]
    fn landau_pressure_full_level() {
        let p = landau_pressure(3.0f64, f(2, 7), 8, 8).unwrap();
        assert!((p - 3.0 * 2.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn h_scan_classification() {
        let b = [0.0, 0.5, 1.0, 1.5];
        let (h, classes) = classify_h(&b, &[0.0; 4]);
        assert_eq!(h, b.to_vec());
        assert!(classes.iter().all(|c| *c == HClass::Invertible));
        let (_, classes) = classify_h(&[0.0, 1.0, 2.0], &[0.0, 0.5, 0.0]);
        assert_eq!(
            classes,
            vec![HClass::CoexistenceCandidate, HClass::Invertible]
        );

        let below = h_field_scan(-3.0, 0.5, 2.5, 5, 12, 4, 4).unwrap();
        assert!(below.magnetization.iter().all(|m| *m == 0.0));
        assert_eq!(below.h, below.b);
        assert!(below.intervals.iter().all(|c| *c == HClass::Invertible));

        let a = h_field_scan(-0.7, 1.8, 2.4, 6, 16, 6, 6).unwrap();
        let b = h_field_scan(-0.7, 1.8, 2.4, 6, 16, 6, 6).unwrap();
        assert_eq!(a, b);
        assert!(h_field_scan(0.0, 1.0, 1.0, 4, 8, 4, 4).is_err());
        assert!(h_field_scan(0.0, 0.0, 1.0, 1, 8, 4, 4).is_err());
    }
}
