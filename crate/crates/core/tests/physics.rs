use exchange_lab_core::analytic::electron_phonon::{
    alpha_zeta_psi, electron_phonon_matrix_elements, zeta_direct, zeta_series, ElectronPhononParams,
};
use exchange_lab_core::analytic::two_level::{two_level_delta_e, two_level_speed, SystemLevel, TwoLevelParams};
use exchange_lab_core::hilbert::{partial_trace_system, pauli};
use exchange_lab_core::model::two_level_env_with_coupling;
use exchange_lab_core::zassenhaus::{
    electron_phonon_factorization, error_table, log_grid, zassenhaus_product, zassenhaus_terms, fitted_slope,
    Scenario,
};
use exchange_lab_core::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn phonon(coupling: f64, n_max: usize) -> ElectronPhononQ0 {
    ElectronPhononQ0 { nu: 2, epsilon: vec![0.3, 0.8], omega0: 1.0, coupling, n_max }
}

/// Superposition over the one- and two-electron sectors, phonon vacuum.
fn phonon_state(model: &ModelSpec) -> InitialState {
    let mut amps = vec![c(0.0, 0.0); 4];
    amps[1] = c(0.6, 0.0);
    amps[2] = c(0.0, 0.48);
    amps[3] = c(0.64, 0.0);
    let mut d = vec![0.0; model.dim_env()];
    d[0] = 1.0;
    initial_state(model, &amps, &d).unwrap()
}

/// Displaced oscillator from the vacuum: `2g²/ω (1 − cos ωt)` per sector.
fn displaced_delta_e(coupling: f64, omega: f64, t: f64) -> f64 {
    [(0.36, 1.0), (0.2304, 1.0), (0.4096, 2.0)]
        .iter()
        .map(|(p, n)| {
            let g: f64 = coupling * n;
            p * 2.0 * g * g / omega * (1.0 - (omega * t).cos())
        })
        .sum()
}

fn two_level() -> TwoLevelParams {
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

#[test]
fn electron_phonon_matches_displaced_oscillator() {
    let model = build_electron_phonon_q0(&phonon(0.15, 20)).unwrap();
    let state = phonon_state(&model);
    let engine = ExchangeEngine::new(&model, &state, CumulantConfig::default()).unwrap();
    for t in [0.0, 0.4, 1.7, 3.1, 9.0] {
        let exact = displaced_delta_e(0.15, 1.0, t);
        assert!((engine.energy_exchange(t).unwrap() - exact).abs() < 1e-9, "t = {t}");
        assert!((engine.case_b_delta_e(t).unwrap() - exact).abs() < 1e-9);
    }
}

#[test]
fn electron_phonon_case_b_split() {
    let model = build_electron_phonon_q0(&phonon(0.2, 12)).unwrap();
    let state = phonon_state(&model);
    let engine = ExchangeEngine::new(&model, &state, CumulantConfig::default()).unwrap();
    let scale = engine.norm_h() * engine.norm_he();
    for t in [0.0, 0.8, 2.5, 6.0] {
        let (v1, v2cc) = engine.case_b_speed_split(t).unwrap();
        let v = engine.exchange_speed(t).unwrap();
        assert!(v2cc.abs() <= 1e-9 * scale);
        assert!((2.0 * v1 - v).abs() <= 1e-8 * scale);
        assert!((engine.case_b_delta_e(t).unwrap() - engine.energy_exchange(t).unwrap()).abs() < 1e-9);
    }
}

#[test]
fn zero_coupling_and_vacuum_sector_give_nothing() {
    let model = build_electron_phonon_q0(&phonon(0.0, 6)).unwrap();
    let state = phonon_state(&model);
    let ts = sweep(&model, &state, &[0.0, 1.0, 2.0], &CumulantConfig::default()).unwrap();
    assert!(ts.delta_e.iter().chain(&ts.v_e).all(|v| v.abs() < 1e-14));

    let model = build_electron_phonon_q0(&phonon(0.4, 6)).unwrap();
    let mut amps = vec![c(0.0, 0.0); 4];
    amps[0] = c(1.0, 0.0);
    let mut d = vec![0.0; 7];
    d[2] = 1.0;
    let state = initial_state(&model, &amps, &d).unwrap();
    let engine = ExchangeEngine::new(&model, &state, CumulantConfig::default()).unwrap();
    assert!(engine.energy_exchange(2.3).unwrap().abs() < 1e-13);
}

#[test]
fn factorization_is_exact() {
    let model = build_electron_phonon_q0(&phonon(0.3, 10)).unwrap();
    for t in [0.0, 0.6, 4.2] {
        let direct = evolution(&model.hamiltonian(), t).unwrap();
        assert!(electron_phonon_factorization(&model, t).unwrap().max_abs_diff(&direct) < 1e-10);
    }
    assert_eq!(electron_phonon_factorization(&model, 0.0).unwrap(), Matrix::identity(model.space().dim()));
}

#[test]
fn numeric_matrix_element_is_bounded_and_recurrent() {
    let p = ElectronPhononParams::fully_occupied(phonon(0.2, 16), 0, 0);
    let period = 2.0 * std::f64::consts::PI;
    let ts: Vec<f64> = (0..400).map(|k| 20.0 * period * k as f64 / 399.0).collect();
    let e = electron_phonon_matrix_elements(&p, &ts).unwrap();
    assert!(e.iter().all(|z| z.norm() <= 1.0 + 1e-12));
    // returns to |E| = 1 at each phonon period when g t is small
    let late = e[300..].iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(late > 0.9);
}

#[test]
fn two_level_closed_form_matches_engine() {
    let p = two_level();
    let model = build_two_level_env(&p).unwrap();
    let state = p.initial_state(&model).unwrap();
    let engine = ExchangeEngine::new(&model, &state, CumulantConfig::default()).unwrap();
    let sign = (p.delta12() * (p.d22 - p.d11)).signum();
    for k in 0..200 {
        let t = 30.0 * k as f64 / 199.0;
        let de = two_level_delta_e(&p, t);
        assert!((de - engine.energy_exchange(t).unwrap()).abs() < 1e-8);
        assert!((two_level_speed(&p, t) - engine.exchange_speed(t).unwrap()).abs() < 1e-6);
        assert!((engine.case_b_delta_e(t).unwrap() - de).abs() < 1e-9);
        assert!(de == 0.0 || de.signum() == sign);
    }
}

#[test]
fn two_level_damped_envelope() {
    let p = TwoLevelParams { c_damp: -0.05, ..two_level() };
    let bound = p.delta12().abs() * (p.d22 - p.d11).abs();
    for k in 0..200 {
        let t = 40.0 * k as f64 / 199.0;
        let de = two_level_delta_e(&p, t);
        assert!((de * (-p.c_damp * t * t).exp()).abs() <= bound + 1e-12);
    }
    assert!(two_level_delta_e(&p, 40.0).abs() < 1e-30);
}

#[test]
fn two_level_coupling_is_case_b_only() {
    let (x, _, _) = pauli();
    let h_se = Matrix::from_real_diagonal(&[1.0, 0.0]).kron(&x.scale_real(0.3));
    let m = two_level_env_with_coupling(&[0.0, 1.0], 1.0, 0.0, &h_se).unwrap();
    let class = classify_commutation(&m, 1e-10);
    assert!(class.case_b && !class.case_a);
}

#[test]
fn case_a_reduced_environment_is_stationary() {
    let p = ImpurityBecParams {
        epsilon: vec![0.4],
        boson_energies: vec![0.9],
        v_b: 0.3,
        volume: 1.0,
        n_max: 4,
        q: 0,
        coupling: ImpurityCoupling::Exchange,
    };
    let model = build_impurity_bec(&p).unwrap();
    let h = 0.5f64.sqrt();
    let mut d = vec![0.0; 5];
    d[2] = 1.0;
    let state = initial_state(&model, &[c(h, 0.0), c(0.0, h)], &d).unwrap();
    let rho_e0 = partial_trace_system(state.rho0(), 2, 5).unwrap();
    for t in [0.5, 3.0, 11.0] {
        let u = evolution(&model.hamiltonian(), t).unwrap();
        let rho = propagate_density(state.rho0(), &u).unwrap();
        assert!(partial_trace_system(&rho, 2, 5).unwrap().max_abs_diff(&rho_e0) < 1e-12);
    }
    let ts = sweep(&model, &state, &[0.0, 1.0, 5.0], &CumulantConfig::default()).unwrap();
    assert!(ts.delta_e.iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn observed_convergence_orders() {
    let model = build_electron_phonon_q0(&phonon(0.25, 10)).unwrap();
    let state = phonon_state(&model);
    let e = ExchangeEngine::new(&model, &state, CumulantConfig::default()).unwrap();
    let t = 1.3;
    let de = e.energy_exchange_analytic(t).unwrap();
    let h = 0.2 / e.norm_he();
    let err = |h: f64| (e.eta_difference(t, h) - de).abs();
    assert!((err(h) / err(h / 2.0)).log2() >= 1.9);
    let v = e.exchange_speed_analytic(t).unwrap();
    let h = 0.2 / e.norm_h();
    let err = |h: f64| (e.time_difference(t, h).unwrap() - v).abs();
    assert!((err(h) / err(h / 2.0)).log2() >= 1.9);
}

#[test]
fn alpha_zeta_against_scalar_evaluation() {
    let p = ElectronPhononParams::fully_occupied(phonon(0.35, 8), 0, 0);
    let g = 0.7;
    for k in 0..100 {
        let t = 0.37 * k as f64;
        let v = alpha_zeta_psi(&p, t);
        assert!((v.alpha - g * t.sin()).abs() <= 1e-12);
        if (g * t).abs() >= 1e-4 {
            assert!((v.zeta - (1.0 - (g * t).cos()) / g).abs() <= 1e-12);
        }
        assert!(v.psi <= 0.0);
    }
    let t = 1e-3 / g;
    assert!((zeta_series(1.0, g, t) - zeta_direct(1.0, g, t)).abs() < 1e-9);
}

#[test]
fn zassenhaus_slopes() {
    let ts = log_grid(1e-3, 1e-1, 9);
    let table = error_table(Scenario::Pauli, &ts).unwrap();
    for (k, slope) in table.slopes.iter().enumerate() {
        let slope = slope.expect("enough points above roundoff");
        assert!((slope - (k as f64 + 3.0)).abs() < 0.2, "order {} slope {slope}", k + 2);
    }
    let table = error_table(Scenario::Commuting, &ts).unwrap();
    assert!(table.errors.iter().flatten().all(|e| *e < 1e-10));
}

#[test]
fn published_fourth_order_term_stalls() {
    let printed = zassenhaus_terms(4).unwrap();
    let ts = log_grid(1e-3, 1e-1, 9);
    let pts: Vec<(f64, f64)> = ts
        .iter()
        .map(|&t| {
            let (x, y) = Scenario::Pauli.generators(t);
            let err = zassenhaus_product(&x, &y, &printed).unwrap().max_abs_diff(&expm(&x.add(&y)).unwrap());
            (t, err)
        })
        .collect();
    let slope = fitted_slope(&pts).unwrap();
    assert!(slope < 3.5, "slope {slope}");
}
