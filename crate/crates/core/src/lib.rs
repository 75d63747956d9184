//! Entropic optimal-transport distances and barycenters for power spectral
//! densities on the circle, and stable all-pole (AR) centroids fitted to
//! sets of spectra.

pub mod ar;
pub mod centroid;
pub mod classify;
pub mod error;
mod lbfgs;
pub mod oracle;
pub mod ot;
pub mod spectral;

pub use error::{Error, Result};
