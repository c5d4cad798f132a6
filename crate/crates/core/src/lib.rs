//! Harper-model (Hofstadter butterfly) spectra at rational flux.
//!
//! * [`flux`]: exact flux arithmetic, Farey sequences, Diophantine gap labels.
//! * [`spectrum`]: Bloch Hamiltonian, band edges, gaps, mesh spectra.
//! * [`chern`]: Chern numbers by the lattice link method.
//! * [`thermo`]: pressure, density, magnetization, Středa slopes, symmetry
//!   and duality checks, the `H = B − 4πM` scan.
//! * [`render`]: colored and monochrome butterflies as P6 pixmaps.
//! * [`table`]: CSV/JSON output.
//! * [`checks`]: the verification suites behind `butterfly check`.
//!
//! The numerical code is generic over [`Scalar`] (`f32`, `f64`); the aliases
//! below fix it to `f64`, with `F32` variants where single precision is useful.

pub mod checks;
pub mod chern;
pub mod error;
pub mod flux;
pub mod linalg;
pub mod render;
pub mod scalar;
pub mod spectrum;
pub mod table;
pub mod thermo;

pub use error::{Error, Result};
pub use flux::{
    best_approximant, best_approximant_exact, extended_euclid, farey_neighbors, farey_sequence,
    label_gap, reduce, swapped_label, Diophantine, GapLabel, GapLabeler, RationalFlux,
};
pub use render::{render, ColorTable, Kind, Pixmap, RasterConfig};
pub use scalar::Scalar;
pub use spectrum::{band_edges, gaps, hamiltonian, spectrum_mesh, Region};
pub use table::{emit_gaps, fmt_sig, gap_rows, Format, GapRow};

/// Exact flux value.
pub type Flux = num_rational::Ratio<i64>;

pub type BlochHamiltonian = spectrum::BlochHamiltonian<f64>;
pub type BandStructure = spectrum::BandStructure<f64>;
pub type BandStructureF32 = spectrum::BandStructure<f32>;
pub type Band = spectrum::Band<f64>;
pub type Gap = spectrum::Gap<f64>;
pub type MeshSpectrum = spectrum::MeshSpectrum<f64>;
pub type MeshSpectrumF32 = spectrum::MeshSpectrum<f32>;
pub type ChernMesh = chern::ChernMesh<f64>;
pub type ChernResult = chern::ChernResult<f64>;
pub type ThermoSample = thermo::ThermoSample<f64>;
