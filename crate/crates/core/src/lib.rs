//! Fredholm tests for differential operators on manifolds with cylindrical,
//! hyperbolic and conical ends.
//!
//! The pipeline is: build a [`opalg::BoundaryOperator`] on a collar, check
//! ellipticity, form its limit operators ([`limitops`]), and decide their
//! invertibility ([`fredholm`]). [`numoracle`] re-derives every verdict by
//! brute force.

pub mod crosssec;
pub mod error;
pub mod fredholm;
pub mod liestruct;
pub mod limitops;
pub mod numoracle;
pub mod opalg;
pub mod par;
pub mod poly;

pub use error::{Error, Result};
pub use par::Execution;
