//! Deterministic lattice traffic-flow maps with `M` lanes and maximal velocity `v`.
//!
//! Configurations are finite arrays of site occupancies, either periodic (rings) or padded with
//! constant empty/full tails. Densities and fluxes are exact rationals.

pub mod clusters;
pub mod dynamics;
pub mod error;
pub mod lattice;
pub mod measures;
pub mod sawtooth;
pub mod substitution;
pub mod tracer;

pub use error::{Error, Result};
pub use lattice::{Boundary, Configuration, Density, WindowSpec, Word};
pub use num_rational::BigRational;
