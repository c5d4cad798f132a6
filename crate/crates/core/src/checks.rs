//! Verification suites run by `butterfly check`. Each takes the labeler under
//! test, so a deliberately corrupted one can be fed in.

use std::fmt;

use rayon::prelude::*;

use crate::chern::ChernMesh;
use crate::error::{Error, Result};
use crate::flux::{farey_sequence, label_gap, Diophantine, GapLabel, GapLabeler, RationalFlux};
use crate::spectrum::{gaps_with, BandStructure, DEFAULT_MIN_WIDTH};
use crate::thermo::{check_duality as duality_report, check_symmetries};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub suite: &'static str,
    pub lines: Vec<CheckLine>,
}

impl CheckReport {
    fn new(suite: &'static str) -> Self {
        CheckReport {
            suite,
            lines: Vec::new(),
        }
    }

    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.lines.push(CheckLine {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckLine> {
        self.lines.iter().filter(|l| !l.passed)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            let tag = if l.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{tag} {}: {} {}", self.suite, l.name, l.detail)?;
        }
        let failed = self.failures().count();
        writeln!(
            f,
            "{} {}: {} checks, {} failed",
            if failed == 0 { "PASS" } else { "FAIL" },
            self.suite,
            self.lines.len(),
            failed
        )
    }
}

/// Diophantine labels except at one `(flux, j)`, where `k` is off by one.
/// The target matches any flux with the same value modulo 1.
#[derive(Debug, Clone, Copy)]
pub struct PerturbedLabeler {
    pub flux: RationalFlux,
    pub j: i64,
}

impl GapLabeler for PerturbedLabeler {
    fn label(&self, flux: RationalFlux, j: i64) -> Result<GapLabel> {
        let mut l = label_gap(flux, j)?;
        if flux.folded() == self.flux.folded() && j == self.j {
            l.k += 1;
        }
        Ok(l)
    }
}

/// Coprime `p/q` with `0 < p < q ≤ qmax`, ordered by `(q, p)`.
fn interior_fluxes(qmax: i64) -> Vec<RationalFlux> {
    let mut v: Vec<RationalFlux> = farey_sequence(qmax)
        .into_iter()
        .filter(|f| f.p() > 0 && f.p() < f.q())
        .collect();
    v.sort_by_key(|f| (f.q(), f.p()));
    v
}

fn structures(
    fluxes: &[RationalFlux],
    labeler: &dyn GapLabeler,
) -> Result<Vec<BandStructure<f64>>> {
    fluxes
        .par_iter()
        .map(|&f| gaps_with::<f64>(f, DEFAULT_MIN_WIDTH, labeler))
        .collect()
}

/// `j = n·q + k·p`, `|k| ≤ q/2` and `k_{q−j} = −k_j` for every open gap.
pub fn check_labels(qmax: i64, labeler: &dyn GapLabeler) -> Result<CheckReport> {
    let mut report = CheckReport::new("labels");
    let fluxes = interior_fluxes(qmax);
    let mut gaps = 0;
    for bs in structures(&fluxes, labeler)? {
        let f = bs.flux;
        let labels: Vec<Option<GapLabel>> = bs.gaps.iter().map(|g| g.label).collect();
        for (i, l) in labels.iter().enumerate() {
            let Some(l) = l else { continue };
            gaps += 1;
            if !l.satisfies_identity(f) {
                report.push(
                    format!("{f} j={}", l.j),
                    false,
                    format!("j ≠ n·q + k·p for (k, n) = ({}, {})", l.k, l.n),
                );
            }
            if 2 * l.k.abs() > f.q() {
                report.push(
                    format!("{f} j={}", l.j),
                    false,
                    format!("|k| = {} exceeds q/2", l.k.abs()),
                );
            }
            let mirror = labels[labels.len() - 1 - i];
            match mirror {
                Some(m) if m.k == -l.k => {}
                _ => report.push(
                    format!("{f} j={}", l.j),
                    false,
                    format!("k_{{q−j}} = {:?} is not −{}", mirror.map(|m| m.k), l.k),
                ),
            }
        }
    }
    report.push(
        "identity, bound and antisymmetry",
        report.lines.is_empty(),
        format!("{gaps} gaps over {} fluxes with q ≤ {qmax}", fluxes.len()),
    );
    Ok(report)
}

/// Gap Chern numbers from the link method against the labels, plus the band
/// Chern numbers of 1/3 and 2/5.
pub fn check_chern(
    qmax: i64,
    n1: usize,
    n2: usize,
    labeler: &dyn GapLabeler,
) -> Result<CheckReport> {
    let mut report = CheckReport::new("chern");
    let fluxes = interior_fluxes(qmax);
    let mut gaps = 0;
    for bs in structures(&fluxes, labeler)? {
        let open: Vec<GapLabel> = bs.open_gaps().map(|g| g.label.unwrap()).collect();
        if open.is_empty() {
            continue;
        }
        let mesh = ChernMesh::<f64>::new(bs.flux, n1, n2)?;
        for l in open {
            gaps += 1;
            match mesh.range_chern(1, l.j as usize) {
                Ok(c) if c == l.k => {}
                Ok(c) => report.push(
                    format!("{} j={}", bs.flux, l.j),
                    false,
                    format!("Chern {c}, label k = {}", l.k),
                ),
                Err(e) => report.push(format!("{} j={}", bs.flux, l.j), false, e.to_string()),
            }
        }
    }
    report.push(
        "gap Chern = k",
        report.lines.is_empty(),
        format!("{gaps} gaps, q ≤ {qmax}, mesh {n1}×{n2}"),
    );
    for (flux, want) in [
        (RationalFlux::new(1, 3)?, vec![1, -2, 1]),
        (RationalFlux::new(2, 5)?, vec![-2, 3, -2, 3, -2]),
    ] {
        let got = ChernMesh::<f64>::new(flux, n1, n2)?
            .all_bands()?
            .band_cherns;
        report.push(
            format!("band Cherns of {flux}"),
            got == want,
            format!("{got:?}"),
        );
    }
    Ok(report)
}

/// Středa slopes between every pair of fluxes (`q, q′ ≤ qmax`) that share a
/// gap. Pairs are matched by their Diophantine labels and an overlapping μ
/// interval; the exact slope is compared with the labeler's `k`.
pub fn check_streda(qmax: i64, labeler: &dyn GapLabeler) -> Result<CheckReport> {
    let mut report = CheckReport::new("streda");
    let fluxes = interior_fluxes(qmax);
    let reference = structures(&fluxes, &Diophantine)?;
    let claimed = structures(&fluxes, labeler)?;
    let mut pairs = 0usize;
    for (a, ca) in reference.iter().zip(&claimed) {
        for b in &reference {
            if a.flux == b.flux {
                continue;
            }
            for (ga, gc) in a.gaps.iter().zip(&ca.gaps) {
                let (Some(la), Some(lc)) = (ga.label, gc.label) else {
                    continue;
                };
                let Some(gb) = b.open_gaps().find(|g| {
                    let lb = g.label.unwrap();
                    (lb.k, lb.n) == (la.k, la.n) && g.lo.max(ga.lo) < g.hi.min(ga.hi)
                }) else {
                    continue;
                };
                pairs += 1;
                let s = exact_streda(a.flux, la.j, b.flux, gb.j)?;
                if s != lc.k {
                    report.push(
                        format!("{} j={} vs {} j={}", a.flux, la.j, b.flux, gb.j),
                        false,
                        format!("Středa {s}, label k = {}", lc.k),
                    );
                }
            }
        }
    }
    report.push(
        "Středa slope = k",
        report.lines.is_empty(),
        format!("{pairs} tracked gap pairs, q ≤ {qmax}"),
    );
    Ok(report)
}

fn exact_streda(a: RationalFlux, ja: i64, b: RationalFlux, jb: i64) -> Result<i64> {
    let (p1, q1) = (a.p() as i128, a.q() as i128);
    let (p2, q2) = (b.p() as i128, b.q() as i128);
    let num = jb as i128 * q1 - ja as i128 * q2;
    let den = p2 * q1 - p1 * q2;
    if den == 0 || num % den != 0 {
        return Err(Error::GapNotTracked(format!(
            "{num}/{den} between {a} and {b}"
        )));
    }
    Ok((num / den) as i64)
}

/// Pressure symmetries `Φ → −Φ`, `Φ → Φ + 1` and electron-hole on a μ grid,
/// and the label reflections `k_{q−j} = −k_j` and `k(1 − Φ) = −k(Φ)`.
pub fn check_symmetry(
    qmax: i64,
    n1: usize,
    n2: usize,
    labeler: &dyn GapLabeler,
) -> Result<CheckReport> {
    let mut report = CheckReport::new("symmetry");
    let fluxes = interior_fluxes(qmax);
    let mus: Vec<f64> = (0..61).map(|i| -3.0 + 0.1 * i as f64).collect();
    let pressure_fluxes: Vec<RationalFlux> =
        fluxes.iter().copied().filter(|f| f.q() <= 8).collect();
    let r = check_symmetries(&mus, &pressure_fluxes, n1, n2)?;
    let tol = 1e-8;
    report.push(
        "P(μ,Φ) = P(μ,−Φ)",
        r.reflection < tol,
        format!("max residual {:.3e}", r.reflection),
    );
    report.push(
        "P(μ,Φ) = P(μ,Φ+1)",
        r.periodicity < tol,
        format!("max residual {:.3e}", r.periodicity),
    );
    report.push(
        "P(μ,Φ) = μ + P(−μ,Φ)",
        r.electron_hole < tol,
        format!(
            "max residual {:.3e} (opposite sign: {:.3e})",
            r.electron_hole, r.electron_hole_opposite_sign
        ),
    );

    let mut bad = Vec::new();
    for f in &fluxes {
        let q = f.q();
        let mirror = f.reflected();
        for j in 1..q {
            let (Ok(a), Ok(b), Ok(c)) = (
                labeler.label(*f, j),
                labeler.label(*f, q - j),
                labeler.label(mirror, j),
            ) else {
                continue;
            };
            if a.k != -b.k || a.k != -c.k {
                bad.push(format!("{f} j={j}"));
            }
        }
    }
    report.push(
        "label reflections",
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} fluxes with q ≤ {qmax}", fluxes.len())
        } else {
            format!("violated at {}", bad.join(", "))
        },
    );
    Ok(report)
}

/// Harper ↔ Landau duality for every coprime `p, q ≤ qmax`.
pub fn check_duality(
    qmax: i64,
    n1: usize,
    n2: usize,
    labeler: &dyn GapLabeler,
) -> Result<CheckReport> {
    let mut report = CheckReport::new("duality");
    let mus = [-3.0, -1.0, 0.0, 1.0, 2.5, 3.0];
    let pairs: Vec<(i64, i64)> = (1..=qmax)
        .flat_map(|p| (1..=qmax).map(move |q| (p, q)))
        .filter(|&(p, q)| RationalFlux::new(p, q).map(|f| f.p() == p).unwrap_or(false))
        .collect();
    let reports = pairs
        .par_iter()
        .map(|&(p, q)| duality_report::<f64>(p, q, &mus, n1, n2, labeler))
        .collect::<Result<Vec<_>>>()?;
    let (mut gaps, mut tracked) = (0, 0);
    let mut signs = std::collections::BTreeSet::new();
    for r in &reports {
        signs.insert(r.magnetization_sign);
        for g in &r.gaps {
            gaps += 1;
            tracked += g.streda_n.is_some() as usize;
            if !g.passed() {
                report.push(
                    format!("{} j={}", r.landau_flux, g.j),
                    false,
                    format!(
                        "(k, n) = ({}, {}), 2πσ_l = {}, Středa {:?}, swapped {}",
                        g.k, g.n, g.landau_hall, g.streda_n, g.swapped
                    ),
                );
            }
        }
        if !r.passed() && r.gaps.iter().all(|g| g.passed()) {
            report.push(
                r.landau_flux.to_string(),
                false,
                format!(
                    "full level {}, empty level {}, P_l residual {:.3e}",
                    r.full_level, r.empty_level, r.full_pressure_residual
                ),
            );
        }
    }
    report.push(
        "2πσ_l = ρ_b − Φ̃_b·k = n, full level 1, empty level 0",
        report.lines.is_empty(),
        format!(
            "{} pairs, {gaps} gaps, {tracked} read by Středa on P_l, magnetization sign {:?}",
            reports.len(),
            signs
        ),
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perturbed() -> PerturbedLabeler {
        PerturbedLabeler {
            flux: RationalFlux::new(2, 5).unwrap(),
            j: 1,
        }
    }

    #[test]
    fn suites_pass_with_diophantine() {
        assert!(check_labels(12, &Diophantine).unwrap().passed());
        assert!(check_chern(4, 24, 24, &Diophantine).unwrap().passed());
        assert!(check_streda(7, &Diophantine).unwrap().passed());
        assert!(check_symmetry(5, 8, 8, &Diophantine).unwrap().passed());
        assert!(check_duality(5, 6, 6, &Diophantine).unwrap().passed());
    }

    #[test]
    fn suites_fail_with_one_bad_label() {
        let bad = perturbed();
        assert!(!check_labels(12, &bad).unwrap().passed());
        assert!(!check_chern(5, 24, 24, &bad).unwrap().passed());
        assert!(!check_streda(7, &bad).unwrap().passed());
        assert!(!check_symmetry(5, 8, 8, &bad).unwrap().passed());
        assert!(!check_duality(7, 6, 6, &bad).unwrap().passed());
    }

    #[test]
    fn perturbation_is_local() {
        let bad = perturbed();
        let f = RationalFlux::new(2, 5).unwrap();
        assert_eq!(bad.label(f, 1).unwrap().k, label_gap(f, 1).unwrap().k + 1);
        assert_eq!(bad.label(f, 2).unwrap(), label_gap(f, 2).unwrap());
        let g = RationalFlux::new(7, 5).unwrap();
        assert_eq!(bad.label(g, 1).unwrap().k, label_gap(g, 1).unwrap().k + 1);
    }

    #[test]
    fn report_text() {
        let r = check_labels(6, &Diophantine).unwrap();
        let text = r.to_string();
        assert!(text
            .lines()
            .last()
            .unwrap()
            .starts_with("PASS labels: 1 checks, 0 failed"));
    }
}
