//! Periodic utility profiles `U(t)` and the additive noise `B(t)` that
//! perturbs them.

mod noise;
mod profile;

pub use noise::{corrupted_utility, sample_noise_path, NoiseKind, NoiseModel, NoisePath};
pub use profile::{PeriodicProfile, ProfileForm};
