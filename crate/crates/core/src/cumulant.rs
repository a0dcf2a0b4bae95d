//! Characteristic function, energy exchange `ΔE(t)` and exchange speed
//! `V_E(t)`.
//!
//! The counting field conjugates the evolution with the environment
//! Hamiltonian, `U_θ(t) = e^{iθH_E} U(t) e^{-iθH_E}`, and
//! `χ(η, t) = Tr[U_{η/2}(t) ρ(0) U†_{-η/2}(t)]`. Its first derivative in
//! `iη` at `η = 0` is `ΔE(t) = ⟨H_E⟩_t − ⟨H_E⟩_0`, positive when the
//! environment gains energy. `V_E = dΔE/dt`, positive when energy flows from
//! the system into the environment.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::{classify_commutation, CommutationClass, InitialState, ModelSpec};
use crate::numerics::Numerics;
use crate::propagator::{hermitian_eig, SpectralDecomposition};
use crate::C64;

pub const DELTA_E_CONVENTION: &str = "delta_e = <H_E>(t) - <H_E>(0); positive when the environment gains energy";
pub const V_E_CONVENTION: &str = "v_e = d(delta_e)/dt; positive when energy flows from system to environment";

/// Which evaluation routes produce a number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Method {
    Analytic,
    FiniteDifference,
    /// Both routes, with a hard failure when they disagree.
    #[default]
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CumulantConfig {
    /// Counting-field step; `None` means `1e-4 / ‖H_E‖`.
    pub eta_step: Option<f64>,
    /// Time step; `None` means `1e-3 / ‖H‖`.
    pub dt_step: Option<f64>,
    pub method: Method,
    /// Counting field at which [`Sample::chi`] is evaluated.
    pub reference_eta: f64,
    pub numerics: Numerics,
}

impl Default for CumulantConfig {
    fn default() -> Self {
        CumulantConfig {
            eta_step: None,
            dt_step: None,
            method: Method::Both,
            reference_eta: 0.0,
            numerics: Numerics::DEFAULT,
        }
    }
}

impl CumulantConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, step) in [("eta_step", self.eta_step), ("dt_step", self.dt_step)] {
            if let Some(h) = step {
                if !(h > 0.0 && h.is_finite()) {
                    return Err(Error::InvalidParameter(alloc::format!("{name} must be positive, got {h}")));
                }
            }
        }
        if !self.reference_eta.is_finite() {
            return Err(Error::InvalidParameter("reference_eta must be finite".into()));
        }
        Ok(())
    }
}

/// Values at one time point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub delta_e: f64,
    pub v_e: f64,
    pub chi: C64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub t: Vec<f64>,
    pub delta_e: Vec<f64>,
    pub v_e: Vec<f64>,
    pub chi: Vec<C64>,
    pub reference_eta: f64,
    pub model_name: String,
    pub class: CommutationClass,
    pub method: Method,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn from_samples(engine: &ExchangeEngine<'_>, samples: &[Sample]) -> TimeSeries {
        TimeSeries {
            t: samples.iter().map(|s| s.t).collect(),
            delta_e: samples.iter().map(|s| s.delta_e).collect(),
            v_e: samples.iter().map(|s| s.v_e).collect(),
            chi: samples.iter().map(|s| s.chi).collect(),
            reference_eta: engine.config().reference_eta,
            model_name: engine.model().name().into(),
            class: *engine.class(),
            method: engine.config().method,
        }
    }
}

/// Checks that a grid is finite, strictly increasing and starts at 0.
pub fn validate_grid(t_grid: &[f64]) -> Result<()> {
    match t_grid.first() {
        None => return Err(Error::InvalidGrid("empty grid".into())),
        Some(&t0) if t0 != 0.0 => return Err(Error::InvalidGrid(alloc::format!("grid starts at {t0}, not 0"))),
        _ => {}
    }
    if let Some(w) = t_grid.windows(2).find(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
        return Err(Error::InvalidGrid(alloc::format!("grid not strictly increasing at {} -> {}", w[0], w[1])));
    }
    Ok(())
}

/// Per-sector data of a model whose coupling is block diagonal in the
/// system eigenbasis.
#[derive(Debug, Clone)]
struct Sectors {
    weights: Vec<f64>,
    env_energies: Vec<f64>,
    env_weights: Vec<f64>,
    /// Spectral decomposition of each sector block `ε_j + h_e + B_j`.
    blocks: Vec<SpectralDecomposition>,
    /// Coupling blocks `B_j` in the environment eigenbasis.
    couplings: Vec<Matrix>,
}

/// Shared factorization of one model and initial state, reused across
/// every time point.
#[derive(Debug, Clone)]
pub struct ExchangeEngine<'a> {
    model: &'a ModelSpec,
    state: &'a InitialState,
    cfg: CumulantConfig,
    class: CommutationClass,
    spectral: SpectralDecomposition,
    h_e: Matrix,
    he_diag: Option<Vec<f64>>,
    he_spectral: Option<SpectralDecomposition>,
    he0: f64,
    norm_h: f64,
    norm_he: f64,
    sectors: Option<Sectors>,
}

impl<'a> ExchangeEngine<'a> {
    pub fn new(model: &'a ModelSpec, state: &'a InitialState, cfg: CumulantConfig) -> Result<Self> {
        cfg.validate()?;
        if state.rho0().dim() != model.space().dim() {
            return Err(Error::DimensionMismatch { expected: model.space().dim(), found: state.rho0().dim() });
        }
        let class = classify_commutation(model, cfg.numerics.commutator);
        let spectral = hermitian_eig(&model.hamiltonian())?;
        let h_e = model.h_e().matrix().clone();
        let (he_diag, he_spectral, norm_he) = if h_e.is_diagonal() {
            let d: Vec<f64> = h_e.diagonal().iter().map(|z| z.re).collect();
            let norm = d.iter().fold(0.0f64, |m, e| m.max(e.abs()));
            (Some(d), None, norm)
        } else {
            let s = hermitian_eig(&h_e)?;
            let norm = s.spectral_norm();
            (None, Some(s), norm)
        };
        let he0 = h_e.trace_product(state.rho0()).re;
        let norm_h = spectral.spectral_norm();
        let sectors = if class.case_b { Some(sectors(model, state, cfg.numerics)?) } else { None };
        Ok(ExchangeEngine { model, state, cfg, class, spectral, h_e, he_diag, he_spectral, he0, norm_h, norm_he, sectors })
    }

    pub fn model(&self) -> &ModelSpec {
        self.model
    }

    pub fn config(&self) -> &CumulantConfig {
        &self.cfg
    }

    pub fn class(&self) -> &CommutationClass {
        &self.class
    }

    /// Spectral norm of the total Hamiltonian.
    pub fn norm_h(&self) -> f64 {
        self.norm_h
    }

    /// Spectral norm of the environment Hamiltonian.
    pub fn norm_he(&self) -> f64 {
        self.norm_he
    }

    pub fn eta_step(&self) -> f64 {
        self.cfg.eta_step.unwrap_or(if self.norm_he > 0.0 { 1e-4 / self.norm_he } else { 1e-4 })
    }

    pub fn dt_step(&self) -> f64 {
        self.cfg.dt_step.unwrap_or(if self.norm_h > 0.0 { 1e-3 / self.norm_h } else { 1e-3 })
    }

    pub fn evolution(&self, t: f64) -> Matrix {
        self.spectral.evolution(t)
    }

    /// `e^{iθH_E} A e^{-iθH_E}`.
    fn conjugate_env(&self, a: &Matrix, theta: f64) -> Matrix {
        if theta == 0.0 {
            return a.clone();
        }
        match (&self.he_diag, &self.he_spectral) {
            (Some(e), _) => Matrix::from_fn(a.dim(), |i, j| a[(i, j)] * C64::from_polar(1.0, theta * (e[i] - e[j]))),
            (None, Some(s)) => s.phase(theta).matmul(a).matmul(&s.phase(-theta)),
            (None, None) => unreachable!("engine always stores one H_E representation"),
        }
    }

    /// `χ(η, t)` from a precomputed `U(t)`.
    fn chi_from(&self, u: &Matrix, eta: f64) -> C64 {
        let plus = self.conjugate_env(u, eta / 2.0);
        let minus = self.conjugate_env(u, -eta / 2.0);
        plus.matmul(self.state.rho0()).trace_product(&minus.adjoint())
    }

    pub fn characteristic_function(&self, eta: f64, t: f64) -> C64 {
        self.chi_from(&self.evolution(t), eta)
    }

    /// `Re Tr{[H_E, U] ρ(0) U†}` with the residual imaginary part checked.
    fn delta_e_from(&self, u: &Matrix) -> Result<f64> {
        let comm = self.h_e.matmul(u).sub(&u.matmul(&self.h_e));
        let z = comm.matmul(self.state.rho0()).trace_product(&u.adjoint());
        self.check_real(z, self.norm_he, "imaginary part of delta_e")
    }

    fn check_real(&self, z: C64, scale: f64, what: &str) -> Result<f64> {
        if z.im.abs() > self.cfg.numerics.commutator * scale.max(1.0) {
            return Err(Error::NotHermitian { what: what.into(), deviation: z.im.abs() });
        }
        Ok(z.re)
    }

    /// Analytic `ΔE(t)`.
    pub fn energy_exchange_analytic(&self, t: f64) -> Result<f64> {
        self.delta_e_from(&self.evolution(t))
    }

    /// `⟨H_E⟩_t − ⟨H_E⟩_0`, no counting field involved.
    pub fn energy_exchange_oracle(&self, t: f64) -> f64 {
        let u = self.evolution(t);
        let rho_t = u.matmul(self.state.rho0()).matmul(&u.adjoint());
        self.h_e.trace_product(&rho_t).re - self.he0
    }

    /// Plain central difference of `χ` in `iη` with step `h`.
    pub fn eta_difference(&self, t: f64, h: f64) -> f64 {
        let u = self.evolution(t);
        self.eta_difference_from(&u, h)
    }

    fn eta_difference_from(&self, u: &Matrix, h: f64) -> f64 {
        let d = (self.chi_from(u, h) - self.chi_from(u, -h)) / (2.0 * h);
        (d * C64::new(0.0, -1.0)).re
    }

    /// `ΔE(t)` from finite differences of `χ` with one Richardson step.
    pub fn energy_exchange_fd(&self, t: f64) -> f64 {
        let u = self.evolution(t);
        let h = self.eta_step();
        richardson(self.eta_difference_from(&u, h), self.eta_difference_from(&u, h / 2.0))
    }

    /// Analytic `V_E(t) = Tr{[H_E, dU/dt] ρ(0) U†} + Tr{[H_E, U] ρ(0) dU†/dt}`.
    ///
    /// Each term alone carries an imaginary part; their sum must not.
    pub fn exchange_speed_analytic(&self, t: f64) -> Result<f64> {
        let u = self.evolution(t);
        let du = self.spectral.apply(|l| C64::new(0.0, -l) * C64::from_polar(1.0, -l * t));
        let comm = |m: &Matrix| self.h_e.matmul(m).sub(&m.matmul(&self.h_e));
        let rho0 = self.state.rho0();
        let z = comm(&du).matmul(rho0).trace_product(&u.adjoint())
            + comm(&u).matmul(rho0).trace_product(&du.adjoint());
        self.check_real(z, self.norm_he * self.norm_h, "imaginary part of v_e")
    }

    /// Plain central difference of the analytic `ΔE` in `t` with step `h`.
    pub fn time_difference(&self, t: f64, h: f64) -> Result<f64> {
        Ok((self.energy_exchange_analytic(t + h)? - self.energy_exchange_analytic(t - h)?) / (2.0 * h))
    }

    /// `V_E(t)` from finite differences of `ΔE` with one Richardson step.
    pub fn exchange_speed_fd(&self, t: f64) -> Result<f64> {
        let h = self.dt_step();
        Ok(richardson(self.time_difference(t, h)?, self.time_difference(t, h / 2.0)?))
    }

    fn select(&self, quantity: &'static str, t: f64, analytic: Option<f64>, fd: Option<f64>, scale: f64) -> Result<f64> {
        match (analytic, fd) {
            (Some(a), Some(f)) => {
                if (a - f).abs() > self.cfg.numerics.path_agreement * scale.max(a.abs()).max(f64::MIN_POSITIVE) {
                    return Err(Error::PathDisagreement { quantity, t, analytic: a, finite_difference: f });
                }
                Ok(a)
            }
            (Some(a), None) => Ok(a),
            (None, Some(f)) => Ok(f),
            (None, None) => unreachable!("a method always selects a path"),
        }
    }

    fn paths(&self) -> (bool, bool) {
        match self.cfg.method {
            Method::Analytic => (true, false),
            Method::FiniteDifference => (false, true),
            Method::Both => (true, true),
        }
    }

    /// `ΔE(t)` by the configured method.
    pub fn energy_exchange(&self, t: f64) -> Result<f64> {
        let (use_a, use_f) = self.paths();
        let a = if use_a { Some(self.energy_exchange_analytic(t)?) } else { None };
        let f = if use_f { Some(self.energy_exchange_fd(t)) } else { None };
        self.select("delta_e", t, a, f, self.norm_he)
    }

    /// `V_E(t)` by the configured method.
    pub fn exchange_speed(&self, t: f64) -> Result<f64> {
        let (use_a, use_f) = self.paths();
        let a = if use_a { Some(self.exchange_speed_analytic(t)?) } else { None };
        let f = if use_f { Some(self.exchange_speed_fd(t)?) } else { None };
        self.select("v_e", t, a, f, self.norm_he * self.norm_h)
    }

    pub fn sample(&self, t: f64) -> Result<Sample> {
        Ok(Sample {
            t,
            delta_e: self.energy_exchange(t)?,
            v_e: self.exchange_speed(t)?,
            chi: self.characteristic_function(self.cfg.reference_eta, t),
        })
    }

    fn sectors(&self) -> Result<&Sectors> {
        self.sectors.as_ref().ok_or(Error::NotCaseB(self.class.system_commutator))
    }

    /// `ΔE(t) = Σ_j |c_j|² Σ_{γ,γ1} (E_γ − E_γ1) |⟨jγ|U|jγ1⟩|² d_γ1`.
    pub fn case_b_delta_e(&self, t: f64) -> Result<f64> {
        let s = self.sectors()?;
        let mut total = 0.0;
        for (p, block) in s.weights.iter().zip(&s.blocks) {
            if *p == 0.0 {
                continue;
            }
            let w = block.evolution(t);
            let mut acc = 0.0;
            for (g, eg) in s.env_energies.iter().enumerate() {
                for (g1, (eg1, d)) in s.env_energies.iter().zip(&s.env_weights).enumerate() {
                    acc += (eg - eg1) * w[(g, g1)].norm_sqr() * d;
                }
            }
            total += p * acc;
        }
        Ok(total)
    }

    /// `(V⁽¹⁾, V⁽²⁾ + c.c.)` of the case (b) speed split.
    ///
    /// `V⁽¹⁾ = (−i/2) Σ_j |c_j|² Tr{[h_e, B_j] Ω_j}` with
    /// `Ω_j = W_j D W_j†`, so that `V_E = 2V⁽¹⁾`. `V⁽²⁾` collects the
    /// remaining sector-diagonal terms of the expanded derivative,
    /// `(−i/2) Σ_j |c_j|² (Tr{K_j [h_e, W_j] D W_j†} − Tr{K_j W_j D [h_e, W_j†]})`.
    pub fn case_b_speed_split(&self, t: f64) -> Result<(f64, f64)> {
        let s = self.sectors()?;
        let h = Matrix::from_real_diagonal(&s.env_energies);
        let d = Matrix::from_real_diagonal(&s.env_weights);
        let half_minus_i = C64::new(0.0, -0.5);
        let mut v1 = C64::new(0.0, 0.0);
        let mut v2 = C64::new(0.0, 0.0);
        for ((p, block), b) in s.weights.iter().zip(&s.blocks).zip(&s.couplings) {
            if *p == 0.0 {
                continue;
            }
            let w = block.evolution(t);
            let wd = w.adjoint();
            let omega = w.matmul(&d).matmul(&wd);
            let hb = h.matmul(b).sub(&b.matmul(&h));
            v1 += hb.trace_product(&omega) * *p;
            let k = block.reconstruct();
            let hw = h.matmul(&w).sub(&w.matmul(&h));
            let hwd = h.matmul(&wd).sub(&wd.matmul(&h));
            let second = k.matmul(&hw).matmul(&d).trace_product(&wd);
            let third = k.matmul(&w).matmul(&d).trace_product(&hwd);
            v2 += (second - third) * *p;
        }
        let v1 = self.check_real(v1 * half_minus_i, self.norm_he * self.norm_h, "imaginary part of V_E^(1)")?;
        let v2 = v2 * half_minus_i;
        Ok((v1, 2.0 * v2.re))
    }
}

fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

/// Splits `H` into per-sector blocks in the product of the system and
/// environment eigenbases.
fn sectors(model: &ModelSpec, state: &InitialState, numerics: Numerics) -> Result<Sectors> {
    let ds = model.dim_system();
    let de = model.dim_env();
    let sb = model.system_basis();
    let eb = model.env_basis();
    let rotate = |m: &Matrix| -> Matrix {
        if sb.natural && eb.natural {
            m.clone()
        } else {
            let v = sb.vectors.kron(&eb.vectors);
            v.adjoint().matmul(m).matmul(&v)
        }
    };
    let h = rotate(&model.hamiltonian());
    let h_se = rotate(model.h_se().matrix());
    let tol = numerics.commutator * h.max_abs().max(1.0);
    let mut leak = 0.0f64;
    for j in 0..ds {
        for k in 0..ds {
            if j == k {
                continue;
            }
            for g in 0..de {
                for g1 in 0..de {
                    leak = leak.max(h[(j * de + g, k * de + g1)].norm());
                }
            }
        }
    }
    if leak > tol {
        return Err(Error::NotCaseB(leak));
    }
    let block = |m: &Matrix, j: usize| Matrix::from_fn(de, |g, g1| m[(j * de + g, j * de + g1)]);
    let blocks = (0..ds).map(|j| hermitian_eig(&block(&h, j))).collect::<Result<Vec<_>>>()?;
    let couplings = (0..ds).map(|j| block(&h_se, j)).collect();
    Ok(Sectors {
        weights: state.populations(),
        env_energies: eb.energies.clone(),
        env_weights: state.env_weights().to_vec(),
        blocks,
        couplings,
    })
}

pub fn characteristic_function(model: &ModelSpec, state: &InitialState, eta: f64, t: f64) -> Result<C64> {
    let engine = ExchangeEngine::new(model, state, CumulantConfig::default())?;
    Ok(engine.characteristic_function(eta, t))
}

pub fn energy_exchange(model: &ModelSpec, state: &InitialState, t: f64, cfg: &CumulantConfig) -> Result<f64> {
    ExchangeEngine::new(model, state, *cfg)?.energy_exchange(t)
}

pub fn energy_exchange_oracle(model: &ModelSpec, state: &InitialState, t: f64) -> Result<f64> {
    let cfg = CumulantConfig { method: Method::Analytic, ..CumulantConfig::default() };
    Ok(ExchangeEngine::new(model, state, cfg)?.energy_exchange_oracle(t))
}

pub fn exchange_speed(model: &ModelSpec, state: &InitialState, t: f64, cfg: &CumulantConfig) -> Result<f64> {
    ExchangeEngine::new(model, state, *cfg)?.exchange_speed(t)
}

pub fn case_b_delta_e(model: &ModelSpec, state: &InitialState, t: f64) -> Result<f64> {
    ExchangeEngine::new(model, state, CumulantConfig::default())?.case_b_delta_e(t)
}

pub fn case_b_speed_split(model: &ModelSpec, state: &InitialState, t: f64) -> Result<(f64, f64)> {
    ExchangeEngine::new(model, state, CumulantConfig::default())?.case_b_speed_split(t)
}

/// Evaluates every grid point against one shared factorization.
pub fn sweep(model: &ModelSpec, state: &InitialState, t_grid: &[f64], cfg: &CumulantConfig) -> Result<TimeSeries> {
    validate_grid(t_grid)?;
    let engine = ExchangeEngine::new(model, state, *cfg)?;
    let samples = t_grid.iter().map(|&t| engine.sample(t)).collect::<Result<Vec<_>>>()?;
    Ok(TimeSeries::from_samples(&engine, &samples))
}
