pub mod dynamics;
pub mod eigen;
pub mod error;
pub mod integrator;
pub mod kinematics;
pub mod params;
pub mod real;
pub mod regcheck;
pub mod regularization;
pub mod series;
pub mod stability;

pub use error::{Error, Result};
pub use kinematics::{FourVector, ScalarState, WorldlineState};
pub use params::ModelParams;
pub use real::Real;

/// Library version recorded in run metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
