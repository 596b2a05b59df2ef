mod correlation;
mod fits;
mod spectral;
mod witnesses;

pub use correlation::{pearson, WindowSpec};
pub use fits::{fit_exponential, fit_gaussian, fit_power_law, ExponentialFit, GaussianFit, PowerLawFit};
pub use spectral::{fourier_amplitude, turning_point_prevalence, turning_points, FourierSpectrum, PrevalenceHistogram};
pub use witnesses::{coherence, negativity};
