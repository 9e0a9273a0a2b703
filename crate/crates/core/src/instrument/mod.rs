//! Everything between the physics and the recorded data: detector timing
//! blur, uncorrelated background, coincidence histogramming and files.

mod background;
mod convolution;
mod correlator;
pub mod io;

pub use background::{mix_background, mix_background_curve, unmix_background, unmix_background_curve};
pub use convolution::{convolve_irf, gaussian_kernel, smear};
pub use correlator::{autocorrelate_clicks, correlate_clicks, Histogram};
