//! Open-system simulation of dephased spin-1 and Hubbard chains: Lindblad
//! generators, Liouvillian spectra, strong dynamical symmetries, dense and
//! trajectory time evolution, and synchronisation witnesses.

pub mod analysis;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod liouville;
pub mod linalg;
pub mod models;
pub mod symmetry;
pub mod tolerances;

pub use error::{Error, Result};
pub use tolerances::Tolerances;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
