//! Closed-form evaluators for the two case (b) examples.

pub mod electron_phonon;
pub mod two_level;

pub use electron_phonon::{
    alpha_zeta_psi, electron_phonon_exchange, electron_phonon_matrix_element, series_matrix_element,
    AlphaZetaPsi, ElectronPhononParams, SeriesMatrixElement,
};
pub use two_level::{
    propagator_coefficients, two_level_delta_e, two_level_speed, PropagatorCoefficients, SystemLevel,
    TwoLevelParams,
};
