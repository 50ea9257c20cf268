//! Truncated coefficient algebra for word series and extended word series.
//!
//! Words over a finite alphabet index coefficient families ([`CoeffMap`]).
//! Convolution, the shuffle group of characters and its Lie algebra of
//! infinitesimal characters live in [`coeff`]; frequency bookkeeping and the
//! extended group in [`freq`] and [`extended`]; normal forms and commuting
//! decompositions in [`normal_form`], [`decompose`] and [`group_nf`].

pub mod coeff;
pub mod decompose;
pub mod error;
pub mod exppoly;
pub mod extended;
pub mod freq;
pub mod group_nf;
pub mod linalg;
pub mod normal_form;
pub mod random;
pub mod scalar;
pub mod serial;
pub mod word;

pub use coeff::CoeffMap;
pub use decompose::{CharacterizationReport, Decomposition};
pub use group_nf::GroupNormalForm;
pub use error::{Error, Result};
pub use exppoly::ExpPoly;
pub use extended::{ExpCurve, ExtCoeff, Membership};
pub use normal_form::{NormalFormReport, NormalFormResult};
pub use freq::{FreqTable, FreqVector, WordFrequency};
pub use scalar::{GaussianRational, Mode, Scalar};
pub use word::{Letter, Word, WordSpace};
