//! Weyl curvature of 4-dimensional metrics, the Weyl endomorphism on
//! bivectors under a Riemannian metric and its Lorentzian partner, the
//! annihilation condition `W(T,·,·,T) = 0`, and Petrov classification.

// Index loops mirror the tensor formulas they implement.
#![allow(clippy::needless_range_loop)]

pub mod annihilator;
pub mod bivector;
pub mod chart;
pub mod curvature;
pub mod error;
pub mod exec;
pub mod expr;
pub mod jet;
pub mod operator;
pub mod petrov;
pub mod quadform;
pub mod synthetic;
pub mod verify;

pub use error::{Error, ErrorClass, Result};
pub use exec::Execution;
