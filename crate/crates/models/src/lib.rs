//! Concrete realizations of word series: polynomial and Fourier-polynomial
//! vector fields, word basis functions, Lie and Poisson brackets, closed-form
//! unperturbed flows and model files.

pub mod checks;
pub mod config;
pub mod field;
pub mod hamiltonian;
pub mod jet;
pub mod model;
pub mod poly;
pub mod series;

pub use field::{lie_bracket, GradedField, VectorField};
pub use jet::Jet;
pub use model::{eigen_split, symmetric_reduction, AssumptionReport, EigenSplit, LetterSpec, Model};
pub use poly::Poly;
pub use series::{GradedMap, WordBasis};
