//! Energy exchange between an open quantum system and its environment.
//!
//! The crate builds finite-dimensional models `H = H_S + H_E + H_SE` on
//! truncated Fock and level spaces, propagates them exactly, and evaluates
//! the first moment of the environment-energy counting statistics (`ΔE(t)`)
//! and its rate (`V_E(t)`), each through two independent routes.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature; enable `libm` in that configuration for the float intrinsics.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod analytic;
pub mod cumulant;
mod eigen;
mod error;
mod expm;
pub mod hilbert;
pub mod matrix;
pub mod model;
pub mod numerics;
pub mod propagator;
pub mod zassenhaus;

pub use cumulant::{
    case_b_delta_e, case_b_speed_split, characteristic_function, energy_exchange,
    energy_exchange_oracle, exchange_speed, sweep, CumulantConfig, ExchangeEngine, Method, Sample,
    TimeSeries,
};
pub use error::{Error, Result};
pub use hilbert::{
    boson_ladder, commutator, fermion_ladder, is_zero, lift, make_space, FactorKind, HilbertSpace,
    Operator,
};
pub use matrix::Matrix;
pub use model::{
    build_electron_phonon_q0, build_generic, build_impurity_bec, build_two_level_env,
    classify_commutation, initial_state, CommutationClass, ElectronPhononQ0, ImpurityBecParams,
    ImpurityCoupling, InitialState, ModelSpec,
};
pub use numerics::Numerics;
pub use propagator::{
    eta_shifted_evolution, evolution, expm, hermitian_eig, propagate_density,
    SpectralDecomposition,
};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
