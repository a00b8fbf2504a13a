//! Random semiregular graphs: generators, exact spectra, asymptotic
//! predictions for the algebraic connectivity, and generating-function
//! series for closed-walk counts.

pub mod asymptotics;
pub mod dsu;
pub mod eigen;
pub mod error;
pub mod experiments;
pub mod generators;
pub mod graph;
pub mod io;
pub mod matrix;
pub mod poly;
pub mod quadrature;
pub mod series;
pub mod spectra;

pub use error::{Error, Result};
pub use graph::Multigraph;
pub use matrix::DenseMatrix;
pub use num_rational::BigRational;
