//! Finite-dimensional camel tooling: coisotropic cylinders, camel points,
//! a priori bounds, model capacities and the Hamiltonian group operations.

pub mod algebra;
pub mod bounds;
pub mod capacity;
pub mod cylinder;
pub mod displacement;
pub mod enclosing;
pub mod modes;
pub mod points;
pub mod swap;

pub use algebra::{compose_hamiltonians, invert_hamiltonian, verify_algebra, AlgebraOptions, AlgebraReport};
pub use bounds::{camel_bound_check, camel_radius_bound, cutoff_hamiltonian, CamelBoundReport};
pub use capacity::{capacity_oracle, capacity_table, CapacityOracleEntry, ModelShape};
pub use cylinder::{sample_cylinder, BaseShape, CoisotropicCylinder};
pub use displacement::{displacement_demo, DisplacementReport, MonotoneProfile};
pub use enclosing::{min_enclosing_ball, Ball};
pub use modes::{maximize_mode, mode_witness_cloud, ModeBase, ModeSearch, ModeWitness, WitnessCloud};
pub use points::{find_camel_points, reduce_points, reverify_points, CamelPointSet, CamelSearch};
pub use swap::{swap, swap_counterexample, swap_matrix, SwapReport};
