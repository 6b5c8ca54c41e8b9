//! Numerical laboratory for the planar plasma-sheath problem: a cold-wall
//! half line with Boltzmann electrons and a full (non-isentropic) ion fluid.
//!
//! The crate covers the stationary problem (Sagdeev potential, quadrature
//! construction, far-field asymptotics in both the generic and the critical
//! Bohm regimes), time evolution of perturbations around a stationary
//! profile, and the weighted-norm diagnostics used to measure decay.

pub mod config;
pub mod degenerate;
pub mod diagnostics;
pub mod error;
pub mod evolution;
pub mod io;
pub mod numerics;
pub mod params;
pub mod pipeline;
pub mod sagdeev;
pub mod stationary;

pub use error::{Result, SheathError};
