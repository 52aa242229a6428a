//! Finite-difference residuals of the coupled Einstein, scalar and Maxwell
//! equations on four-dimensional coordinate patches.

pub mod config;
pub mod geometry;
pub mod grid;
pub mod residuals;
pub mod transport;

pub use grid::GridPatch;
pub use residuals::{residuals, FieldConfiguration, ResidualReport, Theory};
pub use transport::{equivariance_check, transport_config, ChartMap, EquivarianceReport};
