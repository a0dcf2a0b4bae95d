//! Model Hamiltonians `H = H_S + H_E + H_SE` on `S ⊗ E`, product initial
//! states, and the commutation classifier.
//!
//! Every model keeps its local `H_S` and `H_E`. Initial amplitudes and
//! weights are expressed in their eigenbases: a local Hamiltonian that is
//! already diagonal keeps its natural basis order, any other one uses the
//! ascending eigenbasis from [`hermitian_eig`].

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::analytic::two_level::TwoLevelParams;
use crate::error::{Error, Result};
use crate::hilbert::{
    boson_ladder, check_hermitian, commutator, fermion_ladder, is_zero, lift, make_space,
    FactorKind, HilbertSpace, Operator,
};
use crate::matrix::Matrix;
use crate::numerics::Numerics;
use crate::propagator::hermitian_eig;
use crate::C64;

/// Eigenvalues and eigenvector columns of a local Hamiltonian, in the order
/// used to index amplitudes and weights.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalBasis {
    pub energies: Vec<f64>,
    pub vectors: Matrix,
    /// True when the vectors are the computational basis.
    pub natural: bool,
}

impl LocalBasis {
    fn of(h: &Matrix) -> Result<LocalBasis> {
        if h.is_diagonal() {
            return Ok(LocalBasis {
                energies: h.diagonal().iter().map(|z| z.re).collect(),
                vectors: Matrix::identity(h.dim()),
                natural: true,
            });
        }
        let d = hermitian_eig(h)?;
        Ok(LocalBasis {
            energies: d.eigenvalues().to_vec(),
            vectors: d.eigenvectors().clone(),
            natural: false,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    name: String,
    system: HilbertSpace,
    environment: HilbertSpace,
    h_s_local: Matrix,
    h_e_local: Matrix,
    h_s: Operator,
    h_e: Operator,
    h_se: Operator,
    system_basis: LocalBasis,
    env_basis: LocalBasis,
    params: BTreeMap<String, f64>,
}

impl ModelSpec {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn system(&self) -> &HilbertSpace {
        &self.system
    }

    pub fn environment(&self) -> &HilbertSpace {
        &self.environment
    }

    /// Joint space `S ⊗ E`.
    pub fn space(&self) -> &HilbertSpace {
        self.h_s.space()
    }

    pub fn dim_system(&self) -> usize {
        self.system.dim()
    }

    pub fn dim_env(&self) -> usize {
        self.environment.dim()
    }

    pub fn h_s(&self) -> &Operator {
        &self.h_s
    }

    pub fn h_e(&self) -> &Operator {
        &self.h_e
    }

    pub fn h_se(&self) -> &Operator {
        &self.h_se
    }

    pub fn h_s_local(&self) -> &Matrix {
        &self.h_s_local
    }

    pub fn h_e_local(&self) -> &Matrix {
        &self.h_e_local
    }

    pub fn system_basis(&self) -> &LocalBasis {
        &self.system_basis
    }

    pub fn env_basis(&self) -> &LocalBasis {
        &self.env_basis
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    /// Total Hamiltonian `H_S + H_E + H_SE`.
    pub fn hamiltonian(&self) -> Matrix {
        self.h_s.matrix().add(self.h_e.matrix()).add(self.h_se.matrix())
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }
}

/// Assembles a model from local `H_S` on `system`, local `H_E` on
/// `environment` and `H_SE` on the joint space.
pub fn build_generic(
    system: &HilbertSpace,
    environment: &HilbertSpace,
    h_s_local: &Matrix,
    h_e_local: &Matrix,
    h_se: &Matrix,
) -> Result<ModelSpec> {
    let tol = Numerics::DEFAULT.construction;
    let space = system.tensor(environment)?;
    for (m, expected) in [
        (h_s_local, system.dim()),
        (h_e_local, environment.dim()),
        (h_se, space.dim()),
    ] {
        if m.dim() != expected {
            return Err(Error::DimensionMismatch { expected, found: m.dim() });
        }
    }
    let h_s_op = Operator::new(system.clone(), h_s_local.clone())?;
    let h_e_op = Operator::new(environment.clone(), h_e_local.clone())?;
    let h_se = Operator::new(space.clone(), h_se.clone())?;
    check_hermitian(&h_s_op, "H_S", tol)?;
    check_hermitian(&h_e_op, "H_E", tol)?;
    check_hermitian(&h_se, "H_SE", tol)?;

    let h_s = h_s_op.tensor(&Operator::identity(environment))?;
    let h_e = Operator::identity(system).tensor(&h_e_op)?;
    let c = commutator(&h_s, &h_e)?;
    if !is_zero(&c, 1e-12) {
        return Err(Error::SubsystemsDoNotCommute(c.max_abs()));
    }
    Ok(ModelSpec {
        name: "generic".into(),
        system: system.clone(),
        environment: environment.clone(),
        system_basis: LocalBasis::of(h_s_local)?,
        env_basis: LocalBasis::of(h_e_local)?,
        h_s_local: h_s_local.clone(),
        h_e_local: h_e_local.clone(),
        h_s,
        h_e,
        h_se,
        params: BTreeMap::new(),
    })
}

/// Fock truncation used when a configuration leaves it out.
pub const DEFAULT_N_MAX: usize = 8;

#[cfg(feature = "serde")]
fn default_n_max() -> usize {
    DEFAULT_N_MAX
}

#[cfg(feature = "serde")]
fn unit_volume() -> f64 {
    1.0
}

/// Form of the zero-momentum-transfer impurity–condensate coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ImpurityCoupling {
    /// `(1/V) Σ_{k3,k4} c†_{k3} c_{k4} ⊗ a†_{k4} a_{k3}`; needs equal mode counts.
    Exchange,
    /// `(1/V) Σ_k c†_k c_k ⊗ Σ_{k'} a†_{k'} a_{k'}`.
    DensityDensity,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ImpurityBecParams {
    /// Impurity mode energies `ε_k`, one per fermion mode.
    pub epsilon: Vec<f64>,
    /// Boson mode energies `e_k`, one per boson mode.
    pub boson_energies: Vec<f64>,
    /// Boson–boson strength, constant in the transferred momentum.
    #[cfg_attr(feature = "serde", serde(default))]
    pub v_b: f64,
    #[cfg_attr(feature = "serde", serde(default = "unit_volume"))]
    pub volume: f64,
    #[cfg_attr(feature = "serde", serde(default = "default_n_max"))]
    pub n_max: usize,
    /// Impurity momentum transfer; only 0 is supported.
    #[cfg_attr(feature = "serde", serde(default))]
    pub q: i64,
    pub coupling: ImpurityCoupling,
}

/// Fermionic impurity in a condensate at zero momentum transfer.
///
/// Boson modes are momentum labels on a ring, so the quartic term
/// `(1/2V) Σ V_B a†_{k1+q} a†_{k2−q} a_{k2} a_{k1}` keeps indices modulo the
/// mode count.
pub fn build_impurity_bec(p: &ImpurityBecParams) -> Result<ModelSpec> {
    if p.q != 0 {
        return Err(Error::InvalidParameter(format!("momentum transfer q = {} (only q = 0)", p.q)));
    }
    if p.n_max < 1 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    if p.epsilon.is_empty() || p.boson_energies.is_empty() {
        return Err(Error::InvalidParameter("need at least one fermion and one boson mode".into()));
    }
    if !(p.volume > 0.0) {
        return Err(Error::InvalidParameter("volume must be positive".into()));
    }
    let kf = p.epsilon.len();
    let kb = p.boson_energies.len();
    if p.coupling == ImpurityCoupling::Exchange && kf != kb {
        return Err(Error::InvalidParameter(format!(
            "exchange coupling pairs fermion and boson momenta: {kf} vs {kb} modes"
        )));
    }

    let system = make_space(&[FactorKind::FermionModes(kf)])?;
    let environment = make_space(&alloc::vec![FactorKind::BosonFock(p.n_max); kb])?;
    let fermions = (0..kf).map(|k| fermion_ladder(k, kf)).collect::<Result<Vec<_>>>()?;
    let (a, ad) = boson_ladder(p.n_max)?;
    let a: Vec<Matrix> = (0..kb)
        .map(|k| lift(a.matrix(), k, &environment).map(Operator::into_matrix))
        .collect::<Result<_>>()?;
    let ad: Vec<Matrix> = (0..kb)
        .map(|k| lift(ad.matrix(), k, &environment).map(Operator::into_matrix))
        .collect::<Result<_>>()?;
    let fermion_pair = |k3: usize, k4: usize| fermions[k3].1.matrix().matmul(fermions[k4].0.matrix());

    let mut h_s = Matrix::zeros(system.dim());
    for (k, &eps) in p.epsilon.iter().enumerate() {
        h_s = h_s.add(&fermion_pair(k, k).scale_real(eps));
    }

    let mut h_e = Matrix::zeros(environment.dim());
    for (k, &e) in p.boson_energies.iter().enumerate() {
        h_e = h_e.add(&ad[k].matmul(&a[k]).scale_real(e));
    }
    if p.v_b != 0.0 {
        let pref = p.v_b / (2.0 * p.volume);
        for k1 in 0..kb {
            for k2 in 0..kb {
                for q in 0..kb {
                    let term = ad[(k1 + q) % kb]
                        .matmul(&ad[(k2 + kb - q) % kb])
                        .matmul(&a[k2])
                        .matmul(&a[k1]);
                    h_e = h_e.add(&term.scale_real(pref));
                }
            }
        }
    }

    let inv_v = 1.0 / p.volume;
    let h_se = match p.coupling {
        ImpurityCoupling::Exchange => {
            let mut acc = Matrix::zeros(system.dim() * environment.dim());
            for k3 in 0..kf {
                for k4 in 0..kf {
                    let boson = ad[k4].matmul(&a[k3]);
                    acc = acc.add(&fermion_pair(k3, k4).kron(&boson));
                }
            }
            acc.scale_real(inv_v)
        }
        ImpurityCoupling::DensityDensity => {
            let nf = (0..kf).fold(Matrix::zeros(system.dim()), |m, k| m.add(&fermion_pair(k, k)));
            let nb = (0..kb).fold(Matrix::zeros(environment.dim()), |m, k| m.add(&ad[k].matmul(&a[k])));
            nf.kron(&nb).scale_real(inv_v)
        }
    };

    let mut model = build_generic(&system, &environment, &h_s, &h_e, &h_se)?
        .with_name("impurity-bec-q0")
        .with_param("fermion_modes", kf as f64)
        .with_param("boson_modes", kb as f64)
        .with_param("v_b", p.v_b)
        .with_param("volume", p.volume)
        .with_param("n_max", p.n_max as f64)
        .with_param("q", 0.0)
        .with_param(
            "exchange_coupling",
            if p.coupling == ImpurityCoupling::Exchange { 1.0 } else { 0.0 },
        );
    for (k, &e) in p.epsilon.iter().enumerate() {
        model = model.with_param(&format!("epsilon_{k}"), e);
    }
    for (k, &e) in p.boson_energies.iter().enumerate() {
        model = model.with_param(&format!("boson_energy_{k}"), e);
    }
    Ok(model)
}

/// Two-level environment with `H_S = diag(ε_j)`, `H_E = diag(E1, E2)` and an
/// `H_SE` that is block diagonal in the system levels.
pub fn build_two_level_env(p: &TwoLevelParams) -> Result<ModelSpec> {
    p.validate()?;
    let epsilon: Vec<f64> = p.levels.iter().map(|l| l.epsilon).collect();
    let j = epsilon.len();
    let mut h_se = Matrix::zeros(2 * j);
    for (k, level) in p.levels.iter().enumerate() {
        let block = level.coupling_block();
        for a in 0..2 {
            for b in 0..2 {
                h_se[(2 * k + a, 2 * k + b)] = block[(a, b)];
            }
        }
    }
    let model = two_level_env_with_coupling(&epsilon, p.e1, p.e2, &h_se)?;
    Ok(model.with_param("c_damp", p.c_damp).with_param("d11", p.d11).with_param("d22", p.d22))
}

/// Two-level environment with an arbitrary coupling, rejected unless it
/// commutes with `H_S`.
pub fn two_level_env_with_coupling(epsilon: &[f64], e1: f64, e2: f64, h_se: &Matrix) -> Result<ModelSpec> {
    if epsilon.is_empty() {
        return Err(Error::InvalidParameter("need at least one system level".into()));
    }
    let system = make_space(&[FactorKind::Levels(epsilon.len())])?;
    let environment = make_space(&[FactorKind::Levels(2)])?;
    let model = build_generic(
        &system,
        &environment,
        &Matrix::from_real_diagonal(epsilon),
        &Matrix::from_real_diagonal(&[e1, e2]),
        h_se,
    )?;
    let c = commutator(model.h_s(), model.h_se())?;
    if !is_zero(&c, Numerics::DEFAULT.commutator) {
        return Err(Error::NotCaseB(c.max_abs()));
    }
    let mut model = model.with_name("two-level-env").with_param("e1", e1).with_param("e2", e2);
    for (k, &e) in epsilon.iter().enumerate() {
        model = model.with_param(&format!("epsilon_{k}"), e);
    }
    Ok(model)
}

/// Parameters of the electron–phonon model restricted to the zero phonon mode.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ElectronPhononQ0 {
    /// Number of electron states `ν`.
    pub nu: usize,
    pub epsilon: Vec<f64>,
    pub omega0: f64,
    /// Electron–phonon coupling `V_ph-e(0)`.
    pub coupling: f64,
    #[cfg_attr(feature = "serde", serde(default = "default_n_max"))]
    pub n_max: usize,
}

/// `H_S = Σ ε_k c†_k c_k`, `H_E = ω₀ a†a`, `H_SE = V₀ (Σ_k c†_k c_k) ⊗ (a† + a)`.
pub fn build_electron_phonon_q0(p: &ElectronPhononQ0) -> Result<ModelSpec> {
    if p.nu < 1 {
        return Err(Error::InvalidParameter("need at least one electron state".into()));
    }
    if p.epsilon.len() != p.nu {
        return Err(Error::InvalidParameter(format!(
            "{} electron energies for nu = {}",
            p.epsilon.len(),
            p.nu
        )));
    }
    if !(p.omega0 > 0.0) {
        return Err(Error::InvalidParameter("omega0 must be positive".into()));
    }
    if p.n_max < 2 {
        return Err(Error::InvalidParameter("n_max must be at least 2".into()));
    }
    let system = make_space(&[FactorKind::FermionModes(p.nu)])?;
    let environment = make_space(&[FactorKind::BosonFock(p.n_max)])?;
    let mut h_s = Matrix::zeros(system.dim());
    let mut number = Matrix::zeros(system.dim());
    for (k, &eps) in p.epsilon.iter().enumerate() {
        let (c, cd) = fermion_ladder(k, p.nu)?;
        let n_k = cd.matrix().matmul(c.matrix());
        h_s = h_s.add(&n_k.scale_real(eps));
        number = number.add(&n_k);
    }
    let (a, ad) = boson_ladder(p.n_max)?;
    let h_e = ad.matrix().matmul(a.matrix()).scale_real(p.omega0);
    let displacement = a.matrix().add(ad.matrix());
    let h_se = number.kron(&displacement).scale_real(p.coupling);
    let mut model = build_generic(&system, &environment, &h_s, &h_e, &h_se)?
        .with_name("electron-phonon-q0")
        .with_param("nu", p.nu as f64)
        .with_param("omega0", p.omega0)
        .with_param("coupling", p.coupling)
        .with_param("n_max", p.n_max as f64);
    for (k, &e) in p.epsilon.iter().enumerate() {
        model = model.with_param(&format!("epsilon_{k}"), e);
    }
    Ok(model)
}

/// `ρ(0) = ρ_S(0) ⊗ ρ_E(0)` with `ρ_S = |ψ⟩⟨ψ|`, `ψ = Σ c_k |i_k⟩` and
/// `ρ_E = Σ d_γ |γ⟩⟨γ|`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialState {
    system_amplitudes: Vec<C64>,
    env_weights: Vec<f64>,
    rho0: Matrix,
}

impl InitialState {
    pub fn system_amplitudes(&self) -> &[C64] {
        &self.system_amplitudes
    }

    pub fn env_weights(&self) -> &[f64] {
        &self.env_weights
    }

    pub fn rho0(&self) -> &Matrix {
        &self.rho0
    }

    /// `|c_j|²` for each system eigenstate.
    pub fn populations(&self) -> Vec<f64> {
        self.system_amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }
}

pub fn initial_state(model: &ModelSpec, c: &[C64], d: &[f64]) -> Result<InitialState> {
    let tol = Numerics::DEFAULT.construction;
    if c.len() != model.dim_system() {
        return Err(Error::DimensionMismatch { expected: model.dim_system(), found: c.len() });
    }
    if d.len() != model.dim_env() {
        return Err(Error::DimensionMismatch { expected: model.dim_env(), found: d.len() });
    }
    let norm: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    if !((norm - 1.0).abs() <= tol) {
        return Err(Error::Normalization { what: "system amplitudes".into(), deviation: norm - 1.0 });
    }
    if let Some(&w) = d.iter().find(|w| !(**w >= 0.0)) {
        return Err(Error::Normalization { what: "environment weights (negative)".into(), deviation: w });
    }
    let total: f64 = d.iter().sum();
    if !((total - 1.0).abs() <= tol) {
        return Err(Error::Normalization { what: "environment weights".into(), deviation: total - 1.0 });
    }

    let vs = &model.system_basis().vectors;
    let psi: Vec<C64> = (0..vs.dim()).map(|r| (0..vs.dim()).map(|k| vs[(r, k)] * c[k]).sum()).collect();
    let rho_s = Matrix::from_fn(psi.len(), |i, j| psi[i] * psi[j].conj());
    let ve = &model.env_basis().vectors;
    let weights: Vec<C64> = d.iter().map(|&w| C64::new(w, 0.0)).collect();
    let rho_e = ve.scale_columns(&weights).matmul(&ve.adjoint());
    Ok(InitialState { system_amplitudes: c.to_vec(), env_weights: d.to_vec(), rho0: rho_s.kron(&rho_e) })
}

/// Which of the two commutation structures a model has.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CommutationClass {
    /// `[H_E, H_SE] = 0`.
    pub case_a: bool,
    /// `[H_S, H_SE] = 0`.
    pub case_b: bool,
    pub tolerance: f64,
    /// Measured `max|[H_E, H_SE]|`.
    pub env_commutator: f64,
    /// Measured `max|[H_S, H_SE]|`.
    pub system_commutator: f64,
}

pub fn classify_commutation(model: &ModelSpec, tol: f64) -> CommutationClass {
    // operators of one model always share the joint space
    let ca = commutator(model.h_e(), model.h_se()).expect("model operators share a space");
    let cb = commutator(model.h_s(), model.h_se()).expect("model operators share a space");
    CommutationClass {
        case_a: is_zero(&ca, tol),
        case_b: is_zero(&cb, tol),
        tolerance: tol,
        env_commutator: ca.max_abs(),
        system_commutator: cb.max_abs(),
    }
}
