//! Structure-preserving spectral simulation of the periodic nonlinear string
//! and finite-dimensional camel / capacity tooling.

pub mod camel;
pub mod error;
pub mod galerkin;
pub mod integrators;
pub mod linear;
pub mod nonlinearity;
pub mod optimize;
pub mod phase_space;
pub mod quadrature;

pub use error::{Error, Result};
pub use integrators::{FlowConfig, GenericHamiltonianSystem, Scheme, Trajectory};
pub use nonlinearity::NonlinearitySpec;
pub use phase_space::{GridFunction, ModeIndex, PhaseVector, Region};
