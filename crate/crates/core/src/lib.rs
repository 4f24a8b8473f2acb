//! Gateaux derivatives of the operator norm on complex matrices and of the
//! sup norm on functions over a finite set. Birkhoff-James orthogonality and
//! subdifferential membership are decided from the same top eigenspace, with
//! certificates that can be checked independently.

pub mod config;
pub mod error;
pub mod feasibility;
pub mod function_space;
pub mod derivative;
pub mod linalg;
pub mod oracle;
pub mod orthogonality;

pub use config::ToleranceConfig;
pub use error::{GateauxError, Result};
pub use linalg::{ComplexMatrix, MaxEigenspace, SpectralData};
pub use num_complex::Complex64;
