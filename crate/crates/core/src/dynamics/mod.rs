//! Time evolution: the free propagator, Strang splitting for the full
//! equation, the Duhamel operator and Picard iteration, and the
//! experiments built on them.

mod duhamel;
mod evolve;
mod local_time;
mod propagator;
mod rescale;
mod scatter;
mod trajectory;

pub use duhamel::{duhamel_j, duhamel_j_all, picard_iterate, picard_iterate_with, PicardOptions, PicardResult};
pub use evolve::{energy, energy_with_kernel, evolve, evolve_with, kinetic_energy, EvolveOptions};
pub use local_time::{local_time_datum, local_time_probe, LocalTimeOptions, LocalTimeReport};
pub use propagator::{free_propagate, free_propagate_spectral, free_trajectory};
pub use rescale::{rescale, rescale_trajectory};
pub use scatter::{scattering_extract, ScatterRecord};
pub use trajectory::Trajectory;
