//! Vectorized Lindblad generators, their spectra, asymptotic projections
//! and perturbative eigenvalue shifts.

mod perturbation;
mod projection;
mod spectrum;
mod superop;

pub use perturbation::{
    detuned_omegas, first_order_shift, shift_scan, shift_scan_with, FirstOrderShift, ModeTrack, ShiftRow, ShiftScan,
};
pub use projection::{asymptotic_projection, AsymptoticDecomposition, AsymptoticTerm, ObservablePrediction};
pub use spectrum::{eigenvalues, spectrum, spectrum_with, ModeClass, SpectralDecomposition};
pub use superop::{build_superoperator, devectorize, vectorize, Superoperator};
