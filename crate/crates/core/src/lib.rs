//! Passive imaging of sound-soft obstacles from randomly placed point sources.
//!
//! The pipeline has five stages, one module each:
//!
//! * [`specfun`]: cylinder functions and the 2D Helmholtz Green kernels.
//! * [`geometry`]: obstacle boundaries, receiver/source circles, sampling grids.
//! * [`forward`]: Nyström solver for the exterior Dirichlet problem plus a
//!   separation-of-variables oracle for disks.
//! * [`passive`]: synthetic passive records, multiplicative noise, and the
//!   receiver-pair calibration matrix.
//! * [`imaging`]: the cross-correlation matrix, its active reference, and the
//!   doubly cross-correlating indicator (with a reverse-time-migration baseline).
//!
//! [`harness`] ties them together: configuration, presets, file formats, metrics.

pub mod error;
pub mod forward;
pub mod geometry;
pub mod harness;
pub mod imaging;
pub mod passive;
pub mod rng;
pub mod specfun;

pub use error::{Error, Result};

/// Dense complex matrix used for records, correlations and system matrices.
pub type CMatrix = nalgebra::DMatrix<num_complex::Complex64>;
