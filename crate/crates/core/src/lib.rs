//! Numerical workbench for relativistic Thomas-Fermi-Weizsäcker-Dirac type
//! density functionals of atoms and molecules.

pub mod bounds;
pub mod edf;
pub mod error;
pub mod quad;
pub mod radial;
pub mod sampling;
pub mod semiclassic;
pub mod specfun;
pub mod stability;

pub use error::{Error, Result};
