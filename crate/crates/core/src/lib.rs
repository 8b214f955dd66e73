//! Long-run utility loss of a system whose demand is periodic and whose
//! components go through random anomaly/repair cycles.
//!
//! The crate is organised around five areas:
//!
//! * [`stochastic`]: inter-arrival and repair laws, wrapped (modulo-period)
//!   densities and the Fourier bounds on their distance to the uniform law.
//! * [`utility`]: periodic utility profiles and additive noise processes.
//! * [`engine`]: alternating-renewal simulation, loss integrals, running
//!   losses, network aggregation and convergence-stage detection.
//! * [`theory`]: closed-form limit, availability decomposition and the
//!   variance/covariance bound evaluators.
//! * [`estimate`]: trouble-ticket and KPI ingestion plus parameter fitting.
//!
//! Monte Carlo work is spread over threads with rayon when the `parallel`
//! feature is enabled (the default) and runs sequentially otherwise; results
//! are identical either way because every replication and every cell draws
//! from its own derived random stream.

pub mod engine;
pub mod error;
pub mod estimate;
pub mod par;
pub mod rng;
pub mod stochastic;
pub mod theory;
pub mod utility;

pub use error::{Error, Result};
