//! Verification and numerics toolkit for the barotropic geopotential
//! forecast equation on the β-plane.

pub mod check;
pub mod conservation;
pub mod error;
pub mod exprs;
pub mod foliation;
pub mod jet;
pub mod model;
pub mod numerics;
pub mod solutions;
pub mod symmetry;

pub use error::{Error, Result};
