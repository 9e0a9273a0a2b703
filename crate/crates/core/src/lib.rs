//! Photon statistics of a resonantly driven two-level emitter in a
//! micropillar cavity.
//!
//! The crate covers the analytic side (intensity correlation, Mollow
//! triplet, Purcell-tuned lifetime, Hong-Ou-Mandel interference), a
//! quantum-jump simulator that produces photon click streams, the
//! instrument chain that turns either into measured histograms, and
//! forward-model fitting that maps histograms back to emitter parameters.

pub mod cavity;
pub mod error;
pub mod fitting;
pub mod hom;
pub mod instrument;
pub mod tls;
pub mod trajectory;
pub mod units;

pub use error::{Error, Result};
pub use units::{
    ClickStream, CorrelationCurve, DephasingTime, DriveParams, EmitterParams, Grid,
    InterferometerParams, IrfParams, Spectrum,
};
