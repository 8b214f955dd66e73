//! Anomaly and repair laws, samplers, and the modulo-period convergence
//! machinery.
//!
//! The central object is the law of a cumulative clock reduced modulo the
//! utility period `p`. [`wrap_density`] folds a density onto `[0, p)`,
//! [`convolve_mod_p`] adds independent wrapped variables, and the Fourier
//! bounds in [`fourier`] control how fast repeated sums approach the uniform
//! law on `[0, p)`.

mod density;
pub mod fourier;
mod models;
mod wrapped;

pub use density::{Density, Gaussian};
pub use fourier::{
    fourier_bound_exponential, fourier_bound_general, fourier_coefficients, FourierBound,
    DEFAULT_TERMS,
};
pub use models::{
    DurationSampler, Fixed, GeneralDensity, HistogramDensity, InterArrivalModel, MaintenanceKind,
    MaintenanceModel,
};
pub use wrapped::{
    convolve_direct, convolve_fft, convolve_mod_p, self_convolve, sup_distance_to_uniform,
    wrap_density, wrapped_masses, WrappedDensity, DEFAULT_BINS, DIRECT_CONVOLUTION_MAX_BINS,
    MAX_WRAP_PERIODS, WRAP_TAIL_MASS,
};
