//! Rasterized butterflies written as binary pixmaps (P6, maxval 255).
//!
//! Rows run top to bottom with the vertical coordinate increasing downward:
//! flux `Φ̃` for `tb` and `mono`, `v = 1/Φ̃` (cells per flux quantum) for
//! `landau`. Columns run left to right in μ.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flux::{best_approximant_exact, RationalFlux};
use crate::spectrum::{gaps, BandStructure, Region, DEFAULT_MIN_WIDTH};

pub type Rgb = [u8; 3];

pub const WHITE: Rgb = [255, 255, 255];
pub const BLACK: Rgb = [0, 0, 0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// Gaps colored by `k`, bands black.
    Tb,
    /// Bands black, everything else white.
    Mono,
    /// Gaps of the dual flux colored by `n`, bands black.
    Landau,
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tb" => Ok(Kind::Tb),
            "mono" => Ok(Kind::Mono),
            "landau" => Ok(Kind::Landau),
            _ => Err(Error::Config(format!("unknown diagram kind `{s}`"))),
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Tb => "tb",
            Kind::Mono => "mono",
            Kind::Landau => "landau",
        })
    }
}

/// What a pixel color stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pixel {
    Label(i64),
    Band,
}

/// Integer → color map. Warm for positive labels, cold for negative, white
/// for zero; labels beyond ±8 take the ±8 color.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorTable {
    warm: [Rgb; 8],
    cold: [Rgb; 8],
}

impl Default for ColorTable {
    fn default() -> Self {
        ColorTable {
            warm: [
                [220, 30, 30],
                [245, 140, 20],
                [250, 200, 40],
                [250, 240, 80],
                [220, 240, 90],
                [190, 230, 90],
                [160, 220, 90],
                [130, 210, 90],
            ],
            cold: [
                [40, 60, 220],
                [30, 140, 240],
                [40, 210, 230],
                [140, 240, 230],
                [165, 240, 240],
                [185, 245, 245],
                [205, 248, 248],
                [225, 252, 252],
            ],
        }
    }
}

impl ColorTable {
    pub const CLAMP: i64 = 8;

    pub fn color(&self, k: i64) -> Rgb {
        let i = k.unsigned_abs().min(Self::CLAMP as u64) as usize;
        match k.signum() {
            0 => WHITE,
            1 => self.warm[i - 1],
            _ => self.cold[i - 1],
        }
    }

    /// Inverse of [`color`](Self::color) on its image, plus black for bands.
    /// Labels come back clamped to `[−8, 8]`.
    pub fn decode(&self, rgb: Rgb) -> Option<Pixel> {
        if rgb == BLACK {
            return Some(Pixel::Band);
        }
        if rgb == WHITE {
            return Some(Pixel::Label(0));
        }
        if let Some(i) = self.warm.iter().position(|c| *c == rgb) {
            return Some(Pixel::Label(i as i64 + 1));
        }
        self.cold
            .iter()
            .position(|c| *c == rgb)
            .map(|i| Pixel::Label(-(i as i64) - 1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RasterConfig {
    pub kind: Kind,
    pub width: usize,
    pub height: usize,
    pub mu_window: (f64, f64),
    /// Vertical window, exact: flux for `tb`/`mono`, `v = 1/Φ̃` for `landau`.
    pub flux_window: (Ratio<i64>, Ratio<i64>),
    pub qmax: i64,
    pub min_width: f64,
    pub colors: ColorTable,
}

impl RasterConfig {
    pub const DEFAULT_VMAX: i64 = 4;

    /// Defaults for `kind` at the given size: μ ∈ [−2.2, 2.2], flux ∈ [0, 1]
    /// (or v ∈ [1, 4]), `qmax = clamp(height/8, 8, 120)`.
    pub fn new(kind: Kind, width: usize, height: usize) -> Self {
        let flux_window = match kind {
            Kind::Landau => (
                Ratio::from_integer(1),
                Ratio::from_integer(Self::DEFAULT_VMAX),
            ),
            _ => (Ratio::from_integer(0), Ratio::from_integer(1)),
        };
        RasterConfig {
            kind,
            width,
            height,
            mu_window: (-2.2, 2.2),
            flux_window,
            qmax: Self::default_qmax(height),
            min_width: DEFAULT_MIN_WIDTH,
            colors: ColorTable::default(),
        }
    }

    pub fn default_qmax(height: usize) -> i64 {
        ((height / 8) as i64).clamp(8, 120)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width < 16 || self.height < 16 {
            return Err(Error::Config(format!(
                "image must be at least 16×16, got {}×{}",
                self.width, self.height
            )));
        }
        if self.qmax < 2 {
            return Err(Error::Config(format!(
                "qmax must be ≥ 2, got {}",
                self.qmax
            )));
        }
        let (lo, hi) = self.mu_window;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Config(format!("empty μ window [{lo}, {hi}]")));
        }
        let (a, b) = self.flux_window;
        if a >= b {
            return Err(Error::Config(format!("empty flux window [{a}, {b}]")));
        }
        if self.kind == Kind::Landau && a <= Ratio::from_integer(0) {
            return Err(Error::Config(format!(
                "landau window must start above 0, got {a}"
            )));
        }
        if self.min_width.is_nan() || self.min_width < 0.0 {
            return Err(Error::Config(format!("bad min width {}", self.min_width)));
        }
        Ok(())
    }

    /// Snapped vertical coordinate of row `y`: the row center, mapped exactly
    /// into the window, then replaced by its best approximant.
    pub fn row_flux(&self, y: usize) -> RationalFlux {
        let (a, b) = self.flux_window;
        let t = Ratio::new(2 * y as i64 + 1, 2 * self.height as i64);
        best_approximant_exact(a + (b - a) * t, self.qmax)
    }

    /// Chemical potential at the center of column `x`.
    pub fn column_mu(&self, x: usize) -> f64 {
        let (lo, hi) = self.mu_window;
        let center = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let w = self.width as f64;
        center + half * ((2 * x + 1) as f64 - w) / w
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pixmap {
    pub width: usize,
    pub height: usize,
    /// RGB triples, row-major, top row first.
    pub data: Vec<u8>,
}

impl Pixmap {
    pub fn pixel(&self, x: usize, y: usize) -> Rgb {
        let i = 3 * (y * self.width + x);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.data);
        out
    }
}

/// Renders on rayon's global pool.
pub fn render(config: &RasterConfig) -> Result<Pixmap> {
    config.validate()?;
    let rows: Vec<RationalFlux> = (0..config.height).map(|y| config.row_flux(y)).collect();
    let mut unique = rows.clone();
    unique.sort();
    unique.dedup();
    let cache: BTreeMap<RationalFlux, BandStructure<f64>> = unique
        .par_iter()
        .map(|&f| gaps::<f64>(f, config.min_width).map(|bs| (f, bs)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .collect();
    let mus: Vec<f64> = (0..config.width).map(|x| config.column_mu(x)).collect();
    let lines: Vec<Vec<u8>> = rows
        .par_iter()
        .map(|f| {
            let bs = &cache[f];
            mus.iter()
                .flat_map(|&mu| shade(config, bs.classify(mu)))
                .collect()
        })
        .collect();
    Ok(Pixmap {
        width: config.width,
        height: config.height,
        data: lines.concat(),
    })
}

/// Renders on a dedicated pool of `threads` workers.
pub fn render_with_threads(config: &RasterConfig, threads: usize) -> Result<Pixmap> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| render(config))
}

fn shade(config: &RasterConfig, region: Region) -> Rgb {
    match (config.kind, region) {
        (_, Region::Band(_)) => BLACK,
        (_, Region::Below | Region::Above) => WHITE,
        (Kind::Mono, Region::Gap(_)) => WHITE,
        (Kind::Tb, Region::Gap(l)) => config.colors.color(l.k),
        // labels at the unreduced dual flux, so `n` counts Landau levels
        (Kind::Landau, Region::Gap(l)) => config.colors.color(l.n),
    }
}
