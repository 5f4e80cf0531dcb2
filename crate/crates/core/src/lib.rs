//! Exact computations with A-infinity algebras and modules.

pub mod coeff;
pub mod linalg;
pub mod graded;
pub mod algebra;
pub mod module;
pub mod bar;
pub mod transfer;
pub mod hochschild;
pub mod rees;
pub mod hbar;
pub mod formality;
pub mod probe;
pub mod document;
pub mod fixtures;
