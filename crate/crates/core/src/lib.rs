//! Ideal computations in finite rings given only as black boxes.

pub mod abelian;
pub mod blackbox;
pub mod conformance;
pub mod error;
pub mod idealcore;
pub mod intlinalg;
pub mod numtheory;
pub mod qsim;
pub mod reference;
pub mod ringops;

pub use error::{Error, Result};
