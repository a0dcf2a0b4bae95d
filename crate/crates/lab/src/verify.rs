//! The `verify` command: named numerical checks grouped into suites.

use std::path::Path;

use exchange_lab_core::analytic::electron_phonon::{alpha_zeta_psi, zeta_direct, zeta_series, ElectronPhononParams};
use exchange_lab_core::analytic::two_level::{two_level_delta_e, two_level_speed, SystemLevel, TwoLevelParams};
use exchange_lab_core::zassenhaus::{bch_closed_form, electron_phonon_factorization, error_table, truncation_error, Scenario};
use exchange_lab_core::{
    build_electron_phonon_q0, build_generic, build_impurity_bec, build_two_level_env, classify_commutation, evolution,
    expm, hermitian_eig, initial_state, make_space, propagate_density, CumulantConfig, ElectronPhononQ0,
    Error as CoreError, ExchangeEngine, FactorKind, ImpurityBecParams, ImpurityCoupling, InitialState, Matrix,
    Method, ModelSpec, Numerics, C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::LabError;
use crate::output::emit;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    CaseA,
    CaseB,
    Zassenhaus,
    Analytic,
    Numerics,
}

impl Suite {
    pub const ALL: [Suite; 6] = [Suite::All, Suite::CaseA, Suite::CaseB, Suite::Zassenhaus, Suite::Analytic, Suite::Numerics];

    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::CaseA => "case-a",
            Suite::CaseB => "case-b",
            Suite::Zassenhaus => "zassenhaus",
            Suite::Analytic => "analytic",
            Suite::Numerics => "numerics",
        }
    }

    pub fn from_name(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub model: String,
    /// `None` when the computation itself failed.
    pub measured: Option<f64>,
    pub bound: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    /// Passes when `measured ≤ bound`.
    pub fn at_most(name: &str, model: &str, measured: f64, bound: f64) -> Check {
        Check { name: name.into(), model: model.into(), measured: Some(measured), bound, passed: measured <= bound, detail: None }
    }

    /// Passes when `measured ≥ bound`.
    pub fn at_least(name: &str, model: &str, measured: f64, bound: f64) -> Check {
        Check { name: name.into(), model: model.into(), measured: Some(measured), bound, passed: measured >= bound, detail: None }
    }

    pub fn failed(name: &str, model: &str, bound: f64, detail: String) -> Check {
        Check { name: name.into(), model: model.into(), measured: None, bound, passed: false, detail: Some(detail) }
    }
}

type Checked<T> = Result<T, CoreError>;

/// Runs `f` and records an upper-bound check, or a failure if `f` errors.
fn upper(name: &str, model: &str, bound: f64, f: impl FnOnce() -> Checked<f64>) -> Check {
    match f() {
        Ok(m) => Check::at_most(name, model, m, bound),
        Err(e) => Check::failed(name, model, bound, e.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(suite: &str, checks: Vec<Check>) -> Self {
        VerificationReport { suite: suite.into(), passed: checks.iter().all(|c| c.passed), checks }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn uniform(n: usize, t_max: f64) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect()
}

fn max_abs(values: impl IntoIterator<Item = Checked<f64>>) -> Checked<f64> {
    values.into_iter().try_fold(0.0f64, |m, v| Ok(m.max(v?.abs())))
}

fn single_level(n: usize) -> exchange_lab_core::HilbertSpace {
    make_space(&[FactorKind::Levels(n)]).expect("level count is positive")
}

/// Case (a) instances: the single-mode condensate impurity and a diagonal coupling on two qubits.
pub fn case_a_models() -> Vec<(ModelSpec, InitialState)> {
    let imp = build_impurity_bec(&ImpurityBecParams {
        epsilon: vec![0.45],
        boson_energies: vec![0.8],
        v_b: 0.25,
        volume: 1.0,
        n_max: 6,
        q: 0,
        coupling: ImpurityCoupling::Exchange,
    })
    .expect("valid impurity parameters");
    let mut d = vec![0.0; 7];
    d[1] = 0.6;
    d[3] = 0.4;
    let h = 0.5f64.sqrt();
    let imp_state = initial_state(&imp, &[c(h, 0.0), c(0.0, h)], &d).expect("normalized");

    let s = single_level(2);
    let h_s = Matrix::from_fn(2, |i, j| match (i, j) {
        (0, 0) => c(0.3, 0.0),
        (1, 1) => c(-0.2, 0.0),
        (0, 1) => c(0.4, 0.1),
        _ => c(0.4, -0.1),
    });
    let h_e = Matrix::from_real_diagonal(&[0.9, -0.35]);
    let h_se = Matrix::from_real_diagonal(&[0.17, -0.42, 0.08, 0.61]);
    let diag = build_generic(&s, &s, &h_s, &h_e, &h_se).expect("Hermitian inputs").with_name("generic-diagonal-coupling");
    let diag_state = initial_state(&diag, &[c(0.8, 0.0), c(0.0, 0.6)], &[0.7, 0.3]).expect("normalized");
    vec![(imp, imp_state), (diag, diag_state)]
}

fn case_a_checks() -> Vec<Check> {
    let mut checks = Vec::new();
    for (model, state) in case_a_models() {
        let name = model.name().to_string();
        let class = classify_commutation(&model, Numerics::DEFAULT.commutator);
        checks.push(Check::at_most("case-a-certified", &name, class.env_commutator, Numerics::DEFAULT.commutator));
        let engine = match ExchangeEngine::new(&model, &state, CumulantConfig::default()) {
            Ok(e) => e,
            Err(e) => {
                checks.push(Check::failed("case-a-engine", &name, 0.0, e.to_string()));
                continue;
            }
        };
        let bound = 1e-10 * engine.norm_he();
        let grid = uniform(200, 20.0 / engine.norm_h());
        checks.push(upper("case-a-delta-e-zero", &name, bound, || max_abs(grid.iter().map(|&t| engine.energy_exchange(t)))));
        checks.push(upper("case-a-v-e-zero", &name, bound, || max_abs(grid.iter().map(|&t| engine.exchange_speed(t)))));
        checks.push(Check::at_most(
            "case-a-chi-unity",
            &name,
            [0.3, 1.7].iter().map(|&eta| (engine.characteristic_function(eta, grid[57]) - 1.0).norm()).fold(0.0, f64::max),
            1e-12,
        ));
    }
    let literal = build_impurity_bec(&ImpurityBecParams {
        epsilon: vec![0.45, 0.7],
        boson_energies: vec![0.8, 1.3],
        v_b: 0.0,
        volume: 1.0,
        n_max: 2,
        q: 0,
        coupling: ImpurityCoupling::Exchange,
    })
    .expect("valid impurity parameters");
    let class = classify_commutation(&literal, Numerics::DEFAULT.commutator);
    checks.push(Check::at_least("literal-exchange-commutator-nonzero", "impurity-bec-q0 (2 modes)", class.env_commutator, 1e-6));
    checks
}

pub fn phonon_model(coupling: f64, n_max: usize) -> ModelSpec {
    build_electron_phonon_q0(&ElectronPhononQ0 { nu: 2, epsilon: vec![0.3, 0.8], omega0: 1.0, coupling, n_max })
        .expect("valid electron-phonon parameters")
}

/// One- and two-electron superposition with the phonon in its vacuum.
pub fn phonon_state(model: &ModelSpec) -> InitialState {
    let mut amps = vec![c(0.0, 0.0); 4];
    amps[1] = c(0.6, 0.0);
    amps[2] = c(0.0, 0.48);
    amps[3] = c(0.64, 0.0);
    let mut d = vec![0.0; model.dim_env()];
    d[0] = 1.0;
    initial_state(model, &amps, &d).expect("normalized")
}

pub fn two_level_params() -> TwoLevelParams {
    TwoLevelParams {
        levels: vec![
            SystemLevel { epsilon: 0.2, amplitude: c(0.6, 0.0), r12: 0.35, i12: -0.15, h11: 0.1, h22: -0.2 },
            SystemLevel { epsilon: 1.4, amplitude: c(0.0, 0.8), r12: -0.2, i12: 0.45, h11: 0.0, h22: 0.3 },
        ],
        e1: 1.0,
        e2: 0.25,
        d11: 0.75,
        d22: 0.25,
        c_damp: 0.0,
    }
}

fn case_b_checks() -> Vec<Check> {
    let mut checks = Vec::new();
    let model = phonon_model(0.2, 12);
    let state = phonon_state(&model);
    let name = model.name().to_string();
    let engine = match ExchangeEngine::new(&model, &state, CumulantConfig::default()) {
        Ok(e) => e,
        Err(e) => return vec![Check::failed("case-b-engine", &name, 0.0, e.to_string())],
    };
    let scale = engine.norm_h() * engine.norm_he();
    let grid = uniform(40, 12.0);
    let split: Checked<Vec<(f64, f64, f64)>> = grid
        .iter()
        .map(|&t| {
            let (v1, v2) = engine.case_b_speed_split(t)?;
            Ok((v1, v2, engine.exchange_speed(t)?))
        })
        .collect();
    match split {
        Ok(rows) => {
            let v2 = rows.iter().map(|r| r.1.abs()).fold(0.0, f64::max);
            let twice = rows.iter().map(|r| (2.0 * r.0 - r.2).abs()).fold(0.0, f64::max);
            checks.push(Check::at_most("case-b-v2-plus-cc", &name, v2, 1e-9 * scale));
            checks.push(Check::at_most("case-b-twice-v1", &name, twice, 1e-8 * scale));
        }
        Err(e) => checks.push(Check::failed("case-b-speed-split", &name, 1e-9 * scale, e.to_string())),
    }
    checks.push(upper("case-b-sector-delta-e", &name, 1e-9, || {
        max_abs(grid.iter().map(|&t| Ok(engine.case_b_delta_e(t)? - engine.energy_exchange(t)?)))
    }));

    let p = two_level_params();
    let tl = build_two_level_env(&p).expect("valid two-level parameters");
    let tl_state = p.initial_state(&tl).expect("normalized");
    checks.push(upper("case-b-sector-delta-e", tl.name(), 1e-9, || {
        let e = ExchangeEngine::new(&tl, &tl_state, CumulantConfig::default())?;
        max_abs(grid.iter().map(|&t| Ok(e.case_b_delta_e(t)? - e.energy_exchange(t)?)))
    }));
    checks
}

fn zassenhaus_checks() -> Vec<Check> {
    let mut checks = Vec::new();
    let (x, y) = Scenario::Commuting.generators(0.9);
    checks.push(upper("zassenhaus-commuting-order2", "commuting", 1e-10, || truncation_error(&x, &y, 2)));
    let (x, y) = Scenario::Heisenberg.generators(1.3);
    checks.push(upper("bch-central-closed-form", "heisenberg", 1e-10, || {
        Ok(bch_closed_form(&x, &y)?.max_abs_diff(&expm(&x.add(&y))?))
    }));
    match error_table(Scenario::Pauli, &crate::zreport::default_grid()) {
        Ok(table) => {
            for (k, s) in table.slopes.iter().enumerate() {
                let name = format!("zassenhaus-slope-order{}", k + 2);
                match s {
                    Some(s) => checks.push(Check::at_most(&name, "pauli", (s - (k as f64 + 3.0)).abs(), 0.2)),
                    None => checks.push(Check::failed(&name, "pauli", 0.2, "no points above roundoff".into())),
                }
            }
        }
        Err(e) => checks.push(Check::failed("zassenhaus-slopes", "pauli", 0.2, e.to_string())),
    }
    let model = phonon_model(0.3, 10);
    checks.push(upper("electron-phonon-factorization", model.name(), 1e-10, || {
        max_abs([0.0, 0.7, 3.9, 11.0].iter().map(|&t| {
            Ok(electron_phonon_factorization(&model, t)?.max_abs_diff(&evolution(&model.hamiltonian(), t)?))
        }))
    }));
    checks
}

/// Largest `|ΔE|` over 20 phonon periods and over their last quarter.
pub fn phonon_envelope(n_max: usize) -> Checked<(f64, f64)> {
    let model = phonon_model(0.2, n_max);
    let state = phonon_state(&model);
    let cfg = CumulantConfig { method: Method::Analytic, ..CumulantConfig::default() };
    let engine = ExchangeEngine::new(&model, &state, cfg)?;
    let grid = uniform(400, 20.0 * 2.0 * std::f64::consts::PI);
    let values = grid.iter().map(|&t| engine.energy_exchange(t)).collect::<Checked<Vec<_>>>()?;
    let global = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let late = values[300..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok((global, late))
}

fn analytic_checks() -> Vec<Check> {
    let mut checks = Vec::new();
    let p = two_level_params();
    let model = build_two_level_env(&p).expect("valid two-level parameters");
    let state = p.initial_state(&model).expect("normalized");
    let grid = uniform(200, 30.0);
    match ExchangeEngine::new(&model, &state, CumulantConfig::default()) {
        Ok(e) => {
            checks.push(upper("two-level-delta-e-closed-form", model.name(), 1e-8, || {
                max_abs(grid.iter().map(|&t| Ok(two_level_delta_e(&p, t) - e.energy_exchange(t)?)))
            }));
            checks.push(upper("two-level-v-e-closed-form", model.name(), 1e-6, || {
                max_abs(grid.iter().map(|&t| Ok(two_level_speed(&p, t) - e.exchange_speed(t)?)))
            }));
        }
        Err(e) => checks.push(Check::failed("two-level-engine", model.name(), 0.0, e.to_string())),
    }
    let sign = (p.delta12() * (p.d22 - p.d11)).signum();
    let flips = grid.iter().filter(|&&t| {
        let v = two_level_delta_e(&p, t);
        v != 0.0 && v.signum() != sign
    });
    checks.push(Check::at_most("two-level-fixed-sign", model.name(), flips.count() as f64, 0.0));
    let damped = TwoLevelParams { c_damp: -0.05, ..p.clone() };
    let envelope = uniform(200, 40.0)
        .iter()
        .map(|&t| (two_level_delta_e(&damped, t) * (-damped.c_damp * t * t).exp()).abs())
        .fold(0.0, f64::max);
    checks.push(Check::at_most("two-level-damped-envelope", model.name(), envelope, p.delta12().abs()));

    let ep = ElectronPhononParams::fully_occupied(
        ElectronPhononQ0 { nu: 2, epsilon: vec![0.3, 0.8], omega0: 1.0, coupling: 0.35, n_max: 8 },
        0,
        0,
    );
    let psi_max = (0..10_000).map(|k| alpha_zeta_psi(&ep, 0.01 * k as f64).psi).fold(f64::NEG_INFINITY, f64::max);
    checks.push(Check::at_most("psi-non-positive", "electron-phonon-q0", psi_max, 0.0));
    let g = ep.g();
    let t = 1e-3 / g;
    checks.push(Check::at_most("zeta-series-limit", "electron-phonon-q0", (zeta_series(1.0, g, t) - zeta_direct(1.0, g, t)).abs(), 1e-9));

    match (phonon_envelope(10), phonon_envelope(20)) {
        (Ok((coarse, _)), Ok((fine, late))) => {
            checks.push(Check::at_most("phonon-truncation-envelope", "electron-phonon-q0", (coarse - fine).abs() / fine, 0.01));
            checks.push(Check::at_least("phonon-no-decay", "electron-phonon-q0", late / fine, 0.5));
        }
        (Err(e), _) | (_, Err(e)) => checks.push(Check::failed("phonon-envelope", "electron-phonon-q0", 0.01, e.to_string())),
    }
    checks
}

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let a = Matrix::from_fn(n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    a.add(&a.adjoint()).scale_real(0.5)
}

/// Seeded random models on `2 ⊗ 2` and `2 ⊗ 3` with random product states.
pub fn random_models(seed: u64, count: usize) -> Vec<(ModelSpec, InitialState)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let (ds, de) = (2, 2 + k % 2);
            let m = build_generic(
                &single_level(ds),
                &single_level(de),
                &random_hermitian(&mut rng, ds),
                &random_hermitian(&mut rng, de),
                &random_hermitian(&mut rng, ds * de),
            )
            .expect("Hermitian by construction")
            .with_name(format!("random-{k}"));
            let amps: Vec<C64> = (0..ds).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let amps: Vec<C64> = amps.iter().map(|z| z / norm).collect();
            let w: Vec<f64> = (0..de).map(|_| rng.gen_range(0.05..1.0)).collect();
            let total: f64 = w.iter().sum();
            let w: Vec<f64> = w.iter().map(|x| x / total).collect();
            let s = initial_state(&m, &amps, &w).expect("normalized by construction");
            (m, s)
        })
        .collect()
}

fn unitarity_defect(u: &Matrix) -> f64 {
    u.adjoint().matmul(u).max_abs_diff(&Matrix::identity(u.dim()))
}

fn sorted_spectrum(m: &Matrix) -> Checked<Vec<f64>> {
    let mut v = hermitian_eig(m)?.eigenvalues().to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Standard checks on one model and state over `grid`.
fn model_checks(model: &ModelSpec, state: &InitialState, grid: &[f64], cfg: CumulantConfig) -> Vec<Check> {
    let name = model.name().to_string();
    let engine = match ExchangeEngine::new(model, state, cfg) {
        Ok(e) => e,
        Err(e) => return vec![Check::failed("engine", &name, 0.0, e.to_string())],
    };
    let mut checks = vec![
        upper("initial-delta-e", &name, 1e-12 * engine.norm_he(), || engine.energy_exchange(0.0)),
        Check::at_most(
            "chi-normalization",
            &name,
            grid.iter().map(|&t| (engine.characteristic_function(0.0, t) - 1.0).norm()).fold(0.0, f64::max),
            1e-12,
        ),
        Check::at_most(
            "unitarity",
            &name,
            grid.iter().map(|&t| unitarity_defect(&engine.evolution(t))).fold(0.0, f64::max),
            1e-10,
        ),
    ];
    let oracle = grid.iter().try_fold(0.0f64, |m, &t| {
        let de = engine.energy_exchange(t)?;
        let o = engine.energy_exchange_oracle(t);
        Ok::<_, CoreError>(m.max((de - o).abs() / o.abs().max(1.0)))
    });
    checks.push(match oracle {
        Ok(m) => Check::at_most("oracle-equivalence", &name, m, 1e-8),
        Err(e) => Check::failed("oracle-equivalence", &name, 1e-8, e.to_string()),
    });
    checks.push(upper("dual-path-speed", &name, 0.0, || grid.iter().try_for_each(|&t| engine.exchange_speed(t).map(|_| ())).map(|_| 0.0)));
    checks.push(upper("spectrum-preserved", &name, 1e-9, || {
        let before = sorted_spectrum(state.rho0())?;
        let t = grid[grid.len() - 1];
        let after = sorted_spectrum(&propagate_density(state.rho0(), &engine.evolution(t))?)?;
        Ok(before.iter().zip(&after).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }));
    checks
}

/// Observed orders of the plain central differences in `η` and `t`.
pub fn convergence_orders(engine: &ExchangeEngine<'_>, t: f64) -> Checked<(f64, f64)> {
    let de = engine.energy_exchange_analytic(t)?;
    let h = 0.2 / engine.norm_he();
    let eta = ((engine.eta_difference(t, h) - de).abs() / (engine.eta_difference(t, h / 2.0) - de).abs()).log2();
    let v = engine.exchange_speed_analytic(t)?;
    let h = 0.2 / engine.norm_h();
    let time = ((engine.time_difference(t, h)? - v).abs() / (engine.time_difference(t, h / 2.0)? - v).abs()).log2();
    Ok((eta, time))
}

fn numerics_checks() -> Vec<Check> {
    let mut checks = Vec::new();
    let grid = uniform(25, 12.0);
    for (m, s) in random_models(7, 10) {
        checks.extend(model_checks(&m, &s, &grid, CumulantConfig::default()));
    }
    let model = phonon_model(0.25, 10);
    let state = phonon_state(&model);
    checks.extend(model_checks(&model, &state, &grid, CumulantConfig::default()));
    let orders = ExchangeEngine::new(&model, &state, CumulantConfig::default()).and_then(|e| convergence_orders(&e, 1.3));
    match orders {
        Ok((eta, time)) => {
            checks.push(Check::at_least("eta-difference-order", model.name(), eta, 1.9));
            checks.push(Check::at_least("time-difference-order", model.name(), time, 1.9));
        }
        Err(e) => checks.push(Check::failed("difference-orders", model.name(), 1.9, e.to_string())),
    }
    checks
}

/// Checks on a user configuration; construction failures become named checks.
pub fn config_checks(cfg: &RunConfig) -> Vec<Check> {
    let label = cfg.model.as_str();
    match cfg.build() {
        Ok((model, state)) => {
            let mut grid = cfg.grid.points();
            if grid.len() > 50 {
                let stride = grid.len().div_ceil(50);
                grid = grid.into_iter().step_by(stride).collect();
            }
            model_checks(&model, &state, &grid, cfg.numerics.cumulant())
        }
        Err(LabError::Schema(msg)) => {
            let name = if msg.contains("not Hermitian") { "config-model-hermitian" } else { "config-model-build" };
            vec![Check::failed(name, label, 0.0, msg)]
        }
        Err(e) => vec![Check::failed("config-model-build", label, 0.0, e.to_string())],
    }
}

pub fn run_suite(suite: Suite) -> Vec<Check> {
    match suite {
        Suite::All => [Suite::CaseA, Suite::CaseB, Suite::Zassenhaus, Suite::Analytic, Suite::Numerics]
            .into_iter()
            .flat_map(run_suite)
            .collect(),
        Suite::CaseA => case_a_checks(),
        Suite::CaseB => case_b_checks(),
        Suite::Zassenhaus => zassenhaus_checks(),
        Suite::Analytic => analytic_checks(),
        Suite::Numerics => numerics_checks(),
    }
}

pub fn cmd_verify(suite: &str, json: Option<&Path>, config: Option<&Path>) -> Result<VerificationReport, LabError> {
    let suite = Suite::from_name(suite).ok_or_else(|| {
        let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
        LabError::Schema(format!("unknown suite {suite:?}; expected one of {}", names.join(", ")))
    })?;
    let cfg = config.map(RunConfig::load).transpose()?;
    let mut checks = run_suite(suite);
    if let Some(cfg) = &cfg {
        checks.extend(config_checks(cfg));
    }
    let report = VerificationReport::new(suite.name(), checks);
    let text = report.to_json();
    match json {
        Some(path) => emit(&text, Some(path))?,
        None => emit(&text, None)?,
    }
    Ok(report)
}
