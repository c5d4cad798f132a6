//! Finite-torus oracle. The Harper Hamiltonian on an `L × L` torus (Landau
//! gauge, `L` a multiple of `q`) is diagonalized directly with a Jacobi
//! rotation solver written here, sharing no code with the Bloch path.
//! Its spectrum coincides with the Bloch spectrum sampled at the
//! `(L/q) × L` momenta allowed by the torus.

use hofstadter_core::thermo::pressure;
use hofstadter_core::{reduce, RationalFlux};

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi sweeps.
fn jacobi_eigenvalues(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].powi(2))
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut v: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    v.sort_by(|x, y| x.partial_cmp(y).unwrap());
    v
}

/// Torus eigenvalues. The complex Hermitian `H = A + iB` is embedded as the
/// real symmetric `[[A, −B], [B, A]]`, whose spectrum is that of `H` twice.
fn torus_spectrum(flux: RationalFlux, l: usize) -> Vec<f64> {
    assert_eq!(l % flux.q() as usize, 0);
    let n = l * l;
    let mut re = vec![0.0; n * n];
    let mut im = vec![0.0; n * n];
    let site = |x: usize, y: usize| (x % l) * l + (y % l);
    let phi = flux.p() as f64 / flux.q() as f64;
    for x in 0..l {
        for y in 0..l {
            let a = site(x, y);
            let bx = site(x + 1, y);
            re[a * n + bx] += 0.5;
            re[bx * n + a] += 0.5;
            let by = site(x, y + 1);
            let theta = std::f64::consts::TAU * phi * x as f64;
            re[by * n + a] += 0.5 * theta.cos();
            im[by * n + a] += 0.5 * theta.sin();
            re[a * n + by] += 0.5 * theta.cos();
            im[a * n + by] -= 0.5 * theta.sin();
        }
    }
    let m = 2 * n;
    let mut big = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            big[i * m + j] = re[i * n + j];
            big[(i + n) * m + j + n] = re[i * n + j];
            big[i * m + j + n] = -im[i * n + j];
            big[(i + n) * m + j] = im[i * n + j];
        }
    }
    let doubled = jacobi_eigenvalues(big, m);
    doubled.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect()
}

fn torus_pressure(values: &[f64], mu: f64) -> f64 {
    values.iter().map(|e| (mu - e).max(0.0)).sum::<f64>() / values.len() as f64
}

#[test]
fn torus_matches_bloch_pressure() {
    for (p, q, l) in [(1, 2, 4), (1, 3, 6), (2, 5, 5)] {
        let flux = reduce(p, q).unwrap();
        let values = torus_spectrum(flux, l);
        let n1 = l / q as usize;
        for i in 0..41 {
            let mu = -2.5 + 0.125 * i as f64;
            let want = torus_pressure(&values, mu);
            let got = pressure(mu, flux, n1, l).unwrap();
            assert!((got - want).abs() < 1e-10, "{flux} μ={mu}: {got} vs {want}");
        }
    }
}

#[test]
fn electron_hole_sign_on_torus() {
    // On a bipartite torus (even L) the spectrum is symmetric under E → −E,
    // so Σ(−μ − E)₊ = Σ(E − μ)₊ and Σ(μ − E)₊ − Σ(E − μ)₊ = N·μ − tr H = N·μ.
    for (p, q, l) in [(1, 3, 6), (2, 5, 10)] {
        let values = torus_spectrum(reduce(p, q).unwrap(), l);
        assert!(values.iter().sum::<f64>().abs() < 1e-9);
        for mu in [0.3, 0.9, 1.7, 2.4] {
            let lhs = torus_pressure(&values, mu);
            let plus = mu + torus_pressure(&values, -mu);
            let minus = -mu + torus_pressure(&values, -mu);
            assert!((lhs - plus).abs() < 1e-10);
            assert!((lhs - minus).abs() > 0.5);
        }
    }
}

#[test]
fn torus_band_edges_inside_bloch_bands() {
    let flux = reduce(1, 3).unwrap();
    let bs = hofstadter_core::gaps::<f64>(flux, 1e-9).unwrap();
    for e in torus_spectrum(flux, 6) {
        assert!(
            bs.bands
                .iter()
                .any(|b| b.lo - 1e-10 <= e && e <= b.hi + 1e-10),
            "{e} outside every band"
        );
    }
}
