//! Tolerances shared by construction checks and composed quantities.

/// One record of every numerical threshold the crate applies.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct Numerics {
    /// Hermiticity and normalization of constructed inputs.
    pub construction: f64,
    /// Quantities composed from several products (unitarity, spectra).
    pub composed: f64,
    /// Commutator vanishing test used by the classifier, relative to the
    /// magnitude of the products being subtracted.
    pub commutator: f64,
    /// Relative agreement demanded between the analytic and finite-difference routes.
    pub path_agreement: f64,
}

impl Numerics {
    pub const DEFAULT: Numerics = Numerics {
        construction: 1e-10,
        composed: 1e-9,
        commutator: 1e-10,
        path_agreement: 1e-7,
    };
}

impl Default for Numerics {
    fn default() -> Self {
        Self::DEFAULT
    }
}
