//! Exact workbench for higher-order derivation systems on finitely
//! generated rational function fields.

pub mod cli;
pub mod density;
pub mod derivation;
pub mod sequence;
pub mod field;
pub mod gamma;
mod gcd;
pub mod indep;
pub mod json;
pub mod parser;
pub mod poly;
pub mod rational;
pub mod sample;
pub mod system;
