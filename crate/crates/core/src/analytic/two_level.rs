//! A system with levels `ε_j` coupled to a two-level environment through an
//! `H_SE` that is diagonal in the system levels.
//!
//! Within sector `j` the evolution is `U_j(t) = e^{-iε_j t} W_j(t)` with
//! `W_j = e^{-i(h_e + B_j)t}`, `h_e = diag(E1, E2)` and `B_j` the coupling
//! block. The coefficient bundle strips the free phases from the entries of
//! `W_j`:
//!
//! ```text
//! W_11            = e^{-iE1 t} (a11 + i b11)
//! conj(W_22)      = e^{+iE2 t} (a22 + i b22)
//! conj(W_21)      = e^{+iE1 t} (a12 + i b12)
//! W_21            = e^{-iE2 t} (a21 − i b21)
//! ```
//!
//! `b11` and `b22` are carried explicitly; they vanish only when the
//! diagonal of `B_j` is zero.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::{initial_state, InitialState, ModelSpec};
use crate::numerics::Numerics;
use crate::C64;

/// One system level and its coupling block
/// `B_j = [[h11, R12 + i I12], [R12 − i I12, h22]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct SystemLevel {
    pub epsilon: f64,
    pub amplitude: C64,
    pub r12: f64,
    pub i12: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub h11: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub h22: f64,
}

impl SystemLevel {
    pub fn coupling_block(&self) -> Matrix {
        let off = C64::new(self.r12, self.i12);
        Matrix::from_fn(2, |a, b| match (a, b) {
            (0, 0) => C64::new(self.h11, 0.0),
            (1, 1) => C64::new(self.h22, 0.0),
            (0, 1) => off,
            _ => off.conj(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct TwoLevelParams {
    pub levels: Vec<SystemLevel>,
    pub e1: f64,
    pub e2: f64,
    pub d11: f64,
    pub d22: f64,
    /// Phenomenological `e^{c t²}` envelope; 0 for the exact model.
    #[cfg_attr(feature = "serde", serde(default))]
    pub c_damp: f64,
}

impl TwoLevelParams {
    pub fn validate(&self) -> Result<()> {
        let tol = Numerics::DEFAULT.construction;
        if self.levels.is_empty() {
            return Err(Error::InvalidParameter("need at least one system level".into()));
        }
        let finite = self
            .levels
            .iter()
            .flat_map(|l| [l.epsilon, l.amplitude.re, l.amplitude.im, l.r12, l.i12, l.h11, l.h22])
            .chain([self.e1, self.e2, self.d11, self.d22, self.c_damp])
            .all(f64::is_finite);
        if !finite {
            return Err(Error::InvalidParameter("non-finite two-level parameter".into()));
        }
        let norm: f64 = self.levels.iter().map(|l| l.amplitude.norm_sqr()).sum();
        if (norm - 1.0).abs() > tol {
            return Err(Error::Normalization { what: "system amplitudes".into(), deviation: norm - 1.0 });
        }
        if self.d11 < 0.0 || self.d22 < 0.0 || (self.d11 + self.d22 - 1.0).abs() > tol {
            return Err(Error::Normalization {
                what: "environment weights".into(),
                deviation: self.d11 + self.d22 - 1.0,
            });
        }
        Ok(())
    }

    /// `Δ12 = E1 − E2`.
    pub fn delta12(&self) -> f64 {
        self.e1 - self.e2
    }

    /// Product initial state matching these amplitudes and weights on `model`.
    pub fn initial_state(&self, model: &ModelSpec) -> Result<InitialState> {
        let c: Vec<C64> = self.levels.iter().map(|l| l.amplitude).collect();
        initial_state(model, &c, &[self.d11, self.d22])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorCoefficients {
    pub a11: f64,
    pub b11: f64,
    pub a22: f64,
    pub b22: f64,
    pub a12: f64,
    pub b12: f64,
    pub a21: f64,
    pub b21: f64,
}

impl PropagatorCoefficients {
    /// `(|W_11|² + |W_21|², |W_22|² + |W_12|²)`, both 1 for a unitary block.
    pub fn column_norms(&self) -> (f64, f64) {
        (
            self.a11 * self.a11 + self.b11 * self.b11 + self.a21 * self.a21 + self.b21 * self.b21,
            self.a22 * self.a22 + self.b22 * self.b22 + self.a12 * self.a12 + self.b12 * self.b12,
        )
    }
}

/// `e^{-iKt}` for a Hermitian 2×2 `K`, from `K = m·I + n·σ`.
pub(crate) fn exp_2x2(k: &Matrix, t: f64) -> Matrix {
    let m = 0.5 * (k[(0, 0)].re + k[(1, 1)].re);
    let nz = 0.5 * (k[(0, 0)].re - k[(1, 1)].re);
    let r = (nz * nz + k[(0, 1)].norm_sqr()).sqrt();
    let (cos, sinc) = if r * t.abs() < 1e-8 {
        let x2 = (r * t) * (r * t);
        (1.0 - x2 / 2.0, t * (1.0 - x2 / 6.0))
    } else {
        ((r * t).cos(), (r * t).sin() / r)
    };
    let phase = C64::from_polar(1.0, -m * t);
    let minus_i_sinc = C64::new(0.0, -sinc);
    Matrix::from_fn(2, |a, b| {
        let traceless = if a == b { k[(a, a)] - m } else { k[(a, b)] };
        let id = if a == b { cos } else { 0.0 };
        phase * (C64::new(id, 0.0) + minus_i_sinc * traceless)
    })
}

pub fn propagator_coefficients(params: &TwoLevelParams, j: usize, t: f64) -> Result<PropagatorCoefficients> {
    let level = params
        .levels
        .get(j)
        .ok_or_else(|| Error::InvalidParameter(alloc::format!("level {j} of {}", params.levels.len())))?;
    let k = Matrix::from_real_diagonal(&[params.e1, params.e2]).add(&level.coupling_block());
    let w = exp_2x2(&k, t);
    let e1 = C64::from_polar(1.0, params.e1 * t);
    let e2 = C64::from_polar(1.0, params.e2 * t);
    let z11 = w[(0, 0)] * e1;
    let z22 = w[(1, 1)].conj() * e2.conj();
    let z12 = w[(1, 0)].conj() * e1.conj();
    let z21 = w[(1, 0)] * e2;
    Ok(PropagatorCoefficients {
        a11: z11.re,
        b11: z11.im,
        a22: z22.re,
        b22: z22.im,
        a12: z12.re,
        b12: z12.im,
        a21: z21.re,
        b21: -z21.im,
    })
}

fn coefficients(params: &TwoLevelParams, t: f64) -> impl Iterator<Item = (&SystemLevel, PropagatorCoefficients)> {
    params.levels.iter().enumerate().map(move |(j, l)| {
        // index is in range by construction
        (l, propagator_coefficients(params, j, t).expect("level index in range"))
    })
}

/// `ΔE(t) = e^{ct²} Δ12 Σ_j |c_j|² (d22 − d11) (a12² + b12²)`.
pub fn two_level_delta_e(params: &TwoLevelParams, t: f64) -> f64 {
    let sum: f64 = coefficients(params, t)
        .map(|(l, k)| l.amplitude.norm_sqr() * (k.a12 * k.a12 + k.b12 * k.b12))
        .sum();
    (params.c_damp * t * t).exp() * params.delta12() * (params.d22 - params.d11) * sum
}

/// `⟨2|Ω_j(t)|1⟩` with `Ω_j = U_j diag(d11, d22) U_j†`.
///
/// Row orthogonality of `U_j` reduces it to
/// `(d11 − d22) e^{iΔ12 t} (a21 − i b21)(a11 − i b11)`.
pub fn omega_21(params: &TwoLevelParams, k: &PropagatorCoefficients, t: f64) -> C64 {
    let p = C64::new(k.a21, -k.b21) * C64::new(k.a11, -k.b11);
    C64::from_polar(1.0, params.delta12() * t) * p * (params.d11 - params.d22)
}

/// `V_E(t) = 2e^{ct²} Δ12 Σ_j |c_j|² [I12 Re⟨2|Ω_j|1⟩ + R12 Im⟨2|Ω_j|1⟩]`.
pub fn two_level_speed(params: &TwoLevelParams, t: f64) -> f64 {
    let sum: f64 = coefficients(params, t)
        .map(|(l, k)| {
            let o = omega_21(params, &k, t);
            l.amplitude.norm_sqr() * (l.i12 * o.re + l.r12 * o.im)
        })
        .sum();
    2.0 * (params.c_damp * t * t).exp() * params.delta12() * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::expm;
    use alloc::vec;

    fn params() -> TwoLevelParams {
        TwoLevelParams {
            levels: vec![
                SystemLevel { epsilon: 0.3, amplitude: C64::new(0.6, 0.0), r12: 0.4, i12: -0.2, h11: 0.1, h22: -0.3 },
                SystemLevel { epsilon: -0.7, amplitude: C64::new(0.0, 0.8), r12: -0.25, i12: 0.5, h11: 0.0, h22: 0.2 },
            ],
            e1: 1.2,
            e2: 0.1,
            d11: 0.8,
            d22: 0.2,
            c_damp: 0.0,
        }
    }

    #[test]
    fn identity_pattern_at_zero() {
        let k = propagator_coefficients(&params(), 1, 0.0).unwrap();
        assert_eq!(
            k,
            PropagatorCoefficients { a11: 1.0, b11: 0.0, a22: 1.0, b22: 0.0, a12: 0.0, b12: 0.0, a21: 0.0, b21: 0.0 }
        );
        assert!(propagator_coefficients(&params(), 2, 0.0).is_err());
    }

    #[test]
    fn closed_form_matches_expm() {
        let p = params();
        for level in &p.levels {
            let k = Matrix::from_real_diagonal(&[p.e1, p.e2]).add(&level.coupling_block());
            for t in [0.1, 1.7, -2.3, 40.0] {
                let direct = expm(&k.scale(C64::new(0.0, -t))).unwrap();
                assert!(exp_2x2(&k, t).max_abs_diff(&direct) < 1e-12);
            }
        }
    }

    #[test]
    fn zero_coupling_is_constant() {
        let mut p = params();
        for l in &mut p.levels {
            *l = SystemLevel { r12: 0.0, i12: 0.0, h11: 0.0, h22: 0.0, ..*l };
        }
        for t in [0.0, 0.4, 3.0] {
            let k = propagator_coefficients(&p, 0, t).unwrap();
            assert!((k.a11 - 1.0).abs() < 1e-15 && (k.a22 - 1.0).abs() < 1e-15);
            assert!(k.b11.abs() < 1e-15 && k.a12.abs() < 1e-15 && k.b21.abs() < 1e-15);
            assert_eq!(two_level_delta_e(&p, t), 0.0);
            assert_eq!(two_level_speed(&p, t), 0.0);
        }
    }

    #[test]
    fn columns_stay_normalized() {
        let p = params();
        for t in [0.0, 0.5, 9.0] {
            let (c1, c2) = propagator_coefficients(&p, 0, t).unwrap().column_norms();
            assert!((c1 - 1.0).abs() < 1e-12 && (c2 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_weights_give_no_exchange() {
        let p = TwoLevelParams { d11: 0.5, d22: 0.5, ..params() };
        for t in [0.0, 1.0, 2.5] {
            assert_eq!(two_level_delta_e(&p, t), 0.0);
        }
    }

    #[test]
    fn speed_is_derivative_of_delta_e() {
        let p = params();
        let h = 1e-4;
        for t in [0.3, 1.1, 4.0] {
            let fd = (two_level_delta_e(&p, t + h) - two_level_delta_e(&p, t - h)) / (2.0 * h);
            assert!((fd - two_level_speed(&p, t)).abs() < 1e-7);
        }
    }

    #[test]
    fn validation() {
        assert!(params().validate().is_ok());
        assert!(TwoLevelParams { d11: 0.9, ..params() }.validate().is_err());
        assert!(TwoLevelParams { levels: vec![], ..params() }.validate().is_err());
    }
}
