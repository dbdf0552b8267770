//! Eigenvalue counting functions of the Laplacian on flat and spherical
//! surfaces: exact spectra, refined Weyl asymptotics, averaged error terms
//! and their almost periodic structure.

pub mod analysis;
pub mod asymptotics;
pub mod average;
pub mod catalog;
pub mod error;
pub mod exact;
pub mod lattice;
pub mod oracle;
pub mod spectrum;
pub mod sum;

pub use catalog::{Bc, CylBc, Irrep, RectBc, RightIsoBc, SectorBase, SurfaceSpec, TriBc};
pub use error::{Error, Result};
pub use exact::Exact;
