//! Irreversible parallel Ising dynamics on the torus.
//!
//! Numeric code is generic over [`scalar::Real`] (`f32` or `f64`); the
//! aliases below fix `f64`.

pub mod error;
pub mod exact;
pub mod experiments;
pub mod kernel;
pub mod lattice;
pub mod scalar;
pub mod spin;
pub mod stats;
pub mod coupling;
pub mod effective;

pub use error::{Error, Result};
pub use lattice::{Axis, Bond, Direction, Site, TorusGeometry};
pub use spin::{ContourStats, SpinConfiguration};

pub type Params = kernel::PcaParameters<f64>;
pub type Kernel = kernel::PcaKernel<f64>;
