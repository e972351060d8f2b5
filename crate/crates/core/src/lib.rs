//! Exact localization graph sums for N-mixed-spin-P fields on the quintic.
//!
//! Modules, bottom up: [`algebra`] (exact arithmetic and the t-specialization),
//! [`oracles`] (vertex integrals and unknown symbols), [`graphs`] (decorated
//! graphs), [`enumerate`], [`localization`] (graph contributions) and
//! [`correlator`] (series assembly and the degree bound).

pub mod algebra;
pub mod correlator;
pub mod enumerate;
pub mod graphs;
pub mod localization;
pub mod oracles;
