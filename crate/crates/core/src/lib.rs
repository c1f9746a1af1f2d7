//! Executable diagonalization over a total program language.
//!
//! [`kernel`] defines the language, [`enumeration`] orders its programs,
//! [`diagonal`] builds functions that escape any enumeration, [`refuter`]
//! turns a would-be decider into a counterexample, and [`synthesis`] with
//! [`spaces`] reconstruct programs from component facts.

pub mod diagonal;
pub mod enumeration;
pub mod kernel;
pub mod refuter;
pub mod spaces;
pub mod synthesis;
