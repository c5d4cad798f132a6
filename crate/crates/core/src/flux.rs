//! Exact integer arithmetic on rational fluxes.
//!
//! A flux `p/q` counts flux quanta per unit cell. Everything here is done in
//! integers (widened to `i128` where products appear); floating point only
//! enters through [`best_approximant`], whose input is a real number.
//!
//! The gap labels come from the Diophantine equation `p·m − q·n = 1`: the
//! Hall integer of gap `j` is `k_j = j·m mod q` taken in `(−q/2, q/2]`, and
//! its partner `n_j = (j − k_j·p)/q` so that `j = n_j·q + k_j·p`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Reduced fraction `p/q` with `q ≥ 1` and `gcd(p, q) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "(i64, i64)", try_from = "(i64, i64)")]
pub struct RationalFlux {
    p: i64,
    q: i64,
}

impl RationalFlux {
    pub const ZERO: RationalFlux = RationalFlux { p: 0, q: 1 };

    /// Reduces `p/q`; see [`reduce`].
    pub fn new(p: i64, q: i64) -> Result<Self> {
        reduce(p, q)
    }

    #[inline]
    pub fn p(&self) -> i64 {
        self.p
    }

    #[inline]
    pub fn q(&self) -> i64 {
        self.q
    }

    /// Exact value as a ratio.
    pub fn ratio(&self) -> Ratio<i64> {
        Ratio::new_raw(self.p, self.q)
    }

    /// Value as a float. Only the final division is inexact.
    pub fn value<T: Scalar>(&self) -> T {
        T::from_i64(self.p).unwrap() / T::from_i64(self.q).unwrap()
    }

    /// Representative in `[0, 1)` (or `1/1` stays `0/1`), using `Φ → Φ + 1` periodicity.
    pub fn folded(&self) -> RationalFlux {
        RationalFlux {
            p: self.p.rem_euclid(self.q),
            q: self.q,
        }
    }

    /// `−p/q`.
    pub fn negated(&self) -> RationalFlux {
        RationalFlux {
            p: -self.p,
            q: self.q,
        }
    }

    /// `p/q + n` for an integer shift.
    pub fn shifted(&self, n: i64) -> RationalFlux {
        RationalFlux {
            p: self.p + n * self.q,
            q: self.q,
        }
    }

    /// `(q − p)/q`, the reflection `Φ → 1 − Φ`.
    pub fn reflected(&self) -> RationalFlux {
        RationalFlux {
            p: self.q - self.p,
            q: self.q,
        }
    }

    /// `q/p`; fails for zero flux.
    pub fn reciprocal(&self) -> Result<RationalFlux> {
        if self.p == 0 {
            return Err(Error::ZeroFlux);
        }
        reduce(self.q, self.p)
    }

    /// Integer part `⌊p/q⌋`.
    pub fn floor(&self) -> i64 {
        self.p.div_euclid(self.q)
    }
}

impl fmt::Display for RationalFlux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl PartialOrd for RationalFlux {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RationalFlux {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = self.p as i128 * other.q as i128;
        let rhs = other.p as i128 * self.q as i128;
        lhs.cmp(&rhs)
    }
}

impl From<RationalFlux> for (i64, i64) {
    fn from(f: RationalFlux) -> Self {
        (f.p, f.q)
    }
}

impl TryFrom<(i64, i64)> for RationalFlux {
    type Error = Error;

    fn try_from((p, q): (i64, i64)) -> Result<Self> {
        reduce(p, q)
    }
}

impl FromStr for RationalFlux {
    type Err = Error;

    /// Accepts `P/Q` or a bare integer `P`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Config(format!("cannot parse flux {s:?}; expected P/Q"));
        match s.split_once('/') {
            Some((p, q)) => {
                let p = p.trim().parse::<i64>().map_err(|_| bad())?;
                let q = q.trim().parse::<i64>().map_err(|_| bad())?;
                reduce(p, q)
            }
            None => {
                let p = s.parse::<i64>().map_err(|_| bad())?;
                reduce(p, 1)
            }
        }
    }
}

/// Integer pair attached to an open gap: `j = n·q + k·p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GapLabel {
    /// Gap index, `1 ≤ j ≤ q − 1`.
    pub j: i64,
    /// Tight-binding Hall integer.
    pub k: i64,
    /// Landau / integrated-density integer.
    pub n: i64,
}

impl GapLabel {
    /// Checks `j = n·q + k·p` for the given flux.
    pub fn satisfies_identity(&self, flux: RationalFlux) -> bool {
        self.j as i128 == self.n as i128 * flux.q as i128 + self.k as i128 * flux.p as i128
    }
}

/// Canonical reduced fraction with positive denominator.
pub fn reduce(p: i64, q: i64) -> Result<RationalFlux> {
    if q == 0 {
        return Err(Error::ZeroDenominator);
    }
    if p == 0 {
        return Ok(RationalFlux::ZERO);
    }
    let g = gcd(p as i128, q as i128);
    let sign = if q < 0 { -1 } else { 1 };
    let p = (sign * p as i128 / g) as i64;
    let q = (sign * q as i128 / g) as i64;
    Ok(RationalFlux { p, q })
}

/// Solves `p·m − q·n = 1` with `0 ≤ m < q`.
///
/// Runs the extended Euclidean algorithm in `i128`, so inputs up to `i64::MAX`
/// do not overflow.
pub fn extended_euclid(p: i64, q: i64) -> Result<(i64, i64)> {
    if p <= 0 || q <= 0 {
        return Err(Error::NonPositive { p, q });
    }
    let (g, x, _) = ext_gcd(p as i128, q as i128);
    if g != 1 {
        return Err(Error::NotCoprime { p, q });
    }
    // p·x ≡ 1 (mod q)
    let q128 = q as i128;
    let m = x.rem_euclid(q128);
    let n = (p as i128 * m - 1) / q128;
    debug_assert_eq!(p as i128 * m - q128 * n, 1);
    Ok((m as i64, n as i64))
}

/// Returns `(g, x, y)` with `a·x + b·y = g = gcd(a, b)`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let quot = r0 / r1;
        (r0, r1) = (r1, r0 - quot * r1);
        (s0, s1) = (s1, s0 - quot * s1);
        (t0, t1) = (t1, t0 - quot * t1);
    }
    (r0, s0, t0)
}

/// Representative of `x mod modulus` in `(−modulus/2, modulus/2]`.
fn centered(x: i128, modulus: i128) -> i128 {
    let r = x.rem_euclid(modulus);
    if 2 * r > modulus {
        r - modulus
    } else {
        r
    }
}

/// Diophantine label of gap `j` at `flux`.
///
/// `k` is periodic in the flux, so it is computed from the folded numerator;
/// `n` uses the numerator as given, which keeps `j = n·q + k·p` exact for
/// fluxes outside `[0, 1]` as well.
pub fn label_gap(flux: RationalFlux, j: i64) -> Result<GapLabel> {
    let (p, q) = (flux.p, flux.q);
    if j < 1 || j > q - 1 {
        return Err(Error::GapIndex { j, q });
    }
    let folded = p.rem_euclid(q);
    if folded == 0 {
        return Err(Error::ZeroFlux);
    }
    if q % 2 == 0 && 2 * j == q {
        return Err(Error::ClosedGap { flux, j });
    }
    let (m, _) = extended_euclid(folded, q)?;
    let k = centered(j as i128 * m as i128, q as i128);
    let rest = j as i128 - k * p as i128;
    debug_assert_eq!(rest % q as i128, 0);
    let n = rest / q as i128;
    Ok(GapLabel {
        j,
        k: k as i64,
        n: n as i64,
    })
}

/// Label from the swapped equation `q·m′ − p·n′ = 1`: `j·m′ mod p` in `(−p/2, p/2]`.
///
/// Always congruent to `label_gap(flux, j).n` modulo `p`; equal to it only
/// when that `n` happens to fall inside the centered window.
pub fn swapped_label(flux: RationalFlux, j: i64) -> Result<i64> {
    let (p, q) = (flux.p, flux.q);
    if j < 1 || j > q - 1 {
        return Err(Error::GapIndex { j, q });
    }
    if p <= 0 {
        return Err(Error::ZeroFlux);
    }
    if p == 1 {
        return Ok(0);
    }
    let (m, _) = extended_euclid(q, p)?;
    Ok(centered(j as i128 * m as i128, p as i128) as i64)
}

/// Anything that attaches labels to gaps. [`Diophantine`] is the real one;
/// the check runners accept others so that a corrupted labeler can be fed in.
pub trait GapLabeler: Sync {
    fn label(&self, flux: RationalFlux, j: i64) -> Result<GapLabel>;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Diophantine;

impl GapLabeler for Diophantine {
    fn label(&self, flux: RationalFlux, j: i64) -> Result<GapLabel> {
        label_gap(flux, j)
    }
}

/// Farey sequence `F_qmax`: reduced `p/q` in `[0, 1]` with `q ≤ qmax`, ascending.
pub fn farey_sequence(qmax: i64) -> Vec<RationalFlux> {
    let n = qmax.max(1);
    let mut out = vec![RationalFlux::ZERO];
    let (mut a, mut b, mut c, mut d) = (0i64, 1i64, 1i64, n);
    while c <= n {
        out.push(RationalFlux { p: c, q: d });
        let k = (n + b) / d;
        (a, b, c, d) = (c, d, k * c - a, k * d - b);
    }
    out
}

/// Left and right neighbours of `flux` in the Farey sequence of order `qmax`
/// extended to the whole real line (`qmax ≥ q`).
///
/// The neighbours satisfy `p·q_l − p_l·q = 1` and `p_r·q − p·q_r = 1`.
pub fn farey_neighbors(flux: RationalFlux, qmax: i64) -> Result<(RationalFlux, RationalFlux)> {
    let (p, q) = (flux.p as i128, flux.q as i128);
    if (qmax as i128) < q {
        return Err(Error::Config(format!(
            "Farey order {qmax} below denominator of {flux}"
        )));
    }
    // m ≡ p⁻¹ (mod q)
    let m = if q == 1 {
        0
    } else {
        extended_euclid(flux.p.rem_euclid(flux.q), flux.q)?.0 as i128
    };
    let largest = |residue: i128| -> i128 {
        let r = residue.rem_euclid(q);
        let top = qmax as i128;
        top - (top - r).rem_euclid(q)
    };
    let q_right = largest(-m);
    let p_right = (1 + p * q_right) / q;
    let q_left = largest(m);
    let p_left = (p * q_left - 1) / q;
    let left = reduce(p_left as i64, q_left as i64)?;
    let right = reduce(p_right as i64, q_right as i64)?;
    Ok((left, right))
}

/// Best rational approximation of a real `x` with denominator at most `qmax`.
///
/// Minimizes `|x − p/q|`; ties go to the smaller `q`, then the smaller `p`.
/// Values outside `[0, 1]` are handled through their integer part.
pub fn best_approximant<T: Scalar>(x: T, qmax: i64) -> RationalFlux {
    assert!(x.is_finite(), "best_approximant needs a finite input");
    let qmax = qmax.max(1);
    let whole = x.floor();
    let frac = x - whole;
    let shift = whole.to_i64().expect("integer part fits in i64");
    let mut best = (0i64, 1i64);
    let mut best_dist = frac;
    for q in 1..=qmax {
        let qf = T::from_i64(q).unwrap();
        let lo = (frac * qf).floor().to_i64().unwrap().clamp(0, q);
        for p in [lo, (lo + 1).min(q)] {
            let dist = (frac - T::from_i64(p).unwrap() / qf).abs();
            if dist < best_dist {
                best = (p, q);
                best_dist = dist;
            }
        }
    }
    reduce(best.0 + shift * best.1, best.1).expect("positive denominator")
}

/// Exact counterpart of [`best_approximant`] for a rational input.
pub fn best_approximant_exact(x: Ratio<i64>, qmax: i64) -> RationalFlux {
    let qmax = qmax.max(1);
    let (num, den) = (*x.numer() as i128, *x.denom() as i128);
    let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
    let whole = num.div_euclid(den);
    let frac_num = num - whole * den;
    // |frac − p/q| = |frac_num·q − p·den| / (den·q); compare cross-multiplied.
    let mut best = (0i128, 1i128);
    let mut best_err = frac_num; // numerator of distance for p/q = 0/1, over den·1
    for q in 1..=qmax as i128 {
        let lo = (frac_num * q).div_euclid(den).clamp(0, q);
        for p in [lo, (lo + 1).min(q)] {
            let err = (frac_num * q - p * den).abs();
            // err/(den·q) < best_err/(den·best_q)
            if err * best.1 < best_err * q {
                best = (p, q);
                best_err = err;
            }
        }
    }
    reduce((best.0 + whole * best.1) as i64, best.1 as i64).expect("positive denominator")
}
