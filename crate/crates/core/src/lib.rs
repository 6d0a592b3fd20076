pub mod cli;
pub mod composer;
pub mod error;
pub mod fields;
pub mod ideal;
pub mod lab;
pub mod linalg;
pub mod prandtl;
pub mod quadrature;
pub mod scenario;
pub mod viscous;

pub use error::{Error, Result};
