//! Ω-Rota–Baxter algebras on typed decorated planar trees and typed words,
//! together with the finite parameter structures that index them.

mod cursor;
pub mod classify;
pub mod error;
pub mod kvfile;
pub mod omega;
pub mod rba;
pub mod scalars;
pub mod trees;
pub mod words;

pub use error::{Error, ParseError, Result};
pub use omega::{AxiomReport, Level, OmegaStructure, OpTable, Status};
pub use scalars::{FormalSum, Scalar};
