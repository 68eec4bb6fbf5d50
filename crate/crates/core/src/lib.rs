//! Exact realization of the algebra of correspondences on tensor powers of
//! the first cohomology of a polarized abelian datum, together with
//! independent oracles for its centralizer description and canonical
//! isotypic decompositions of exterior powers.

pub mod config;
pub mod error;
pub mod exactfield;
pub mod isotypic;
pub mod lefschetz;
pub mod motivicalg;
pub mod par;
pub mod tensorops;
pub mod weyldiagrams;

pub use error::{Error, FieldError, Result, ValidationError};
