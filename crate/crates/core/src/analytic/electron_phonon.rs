//! Electron–phonon model at zero phonon momentum.
//!
//! With `N_e` occupied electron modes the phonon sees the displaced
//! oscillator `ω₀ a†a + g(a + a†)`, `g = V₀ N_e`.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::cumulant::{sweep, CumulantConfig, TimeSeries};
use crate::error::{Error, Result};
use crate::model::{build_electron_phonon_q0, ElectronPhononQ0, InitialState, ModelSpec};
use crate::propagator::{hermitian_eig, SpectralDecomposition};
use crate::C64;

/// Below this `|g t|` the ζ expression switches to its series.
pub const ZETA_SERIES_THRESHOLD: f64 = 1e-4;

/// Largest change between `n_max` and `2 n_max` accepted for a numeric
/// matrix element.
pub const TRUNCATION_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct ElectronPhononParams {
    pub model: ElectronPhononQ0,
    pub n0: usize,
    pub n0p: usize,
    /// Occupied electron modes of `|k⟩`.
    pub occupied: Vec<usize>,
}

impl ElectronPhononParams {
    /// All `ν` electron modes occupied.
    pub fn fully_occupied(model: ElectronPhononQ0, n0: usize, n0p: usize) -> Self {
        let occupied = (0..model.nu).collect();
        ElectronPhononParams { model, n0, n0p, occupied }
    }

    pub fn validate(&self) -> Result<()> {
        let nu = self.model.nu;
        if let Some(&m) = self.occupied.iter().find(|&&m| m >= nu) {
            return Err(Error::ModeOutOfRange { mode: m, modes: nu });
        }
        let mut sorted = self.occupied.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.occupied.len() {
            return Err(Error::InvalidParameter("occupied modes repeat".into()));
        }
        if self.n0.max(self.n0p) > self.model.n_max {
            return Err(Error::InvalidParameter("n_max below the requested phonon numbers".into()));
        }
        if !(self.model.omega0 > 0.0) {
            return Err(Error::InvalidParameter("omega0 must be positive".into()));
        }
        Ok(())
    }

    /// Effective coupling `g = V₀ N_e`.
    pub fn g(&self) -> f64 {
        self.model.coupling * self.occupied.len() as f64
    }

    /// Sum of the occupied electron energies.
    pub fn electron_energy(&self) -> f64 {
        self.occupied.iter().map(|&k| self.model.epsilon[k]).sum()
    }

    /// Index of `|k⟩` in the fermion space; mode 0 is the leading bit.
    pub fn system_index(&self) -> usize {
        self.occupied.iter().map(|&m| 1usize << (self.model.nu - 1 - m)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaZetaPsi {
    pub alpha: f64,
    pub zeta: f64,
    pub psi: f64,
}

/// `ω₀(1 − cos gt)/g`.
pub fn zeta_direct(omega0: f64, g: f64, t: f64) -> f64 {
    omega0 * (1.0 - (g * t).cos()) / g
}

/// `ω₀ t (x/2 − x³/24)` with `x = gt`.
pub fn zeta_series(omega0: f64, g: f64, t: f64) -> f64 {
    let x = g * t;
    omega0 * t * (x / 2.0 - x * x * x / 24.0)
}

pub fn alpha_zeta_psi(params: &ElectronPhononParams, t: f64) -> AlphaZetaPsi {
    let g = params.g();
    let w = params.model.omega0;
    let alpha = g * (w * t).sin() / w;
    let zeta = if (g * t).abs() < ZETA_SERIES_THRESHOLD { zeta_series(w, g, t) } else { zeta_direct(w, g, t) };
    AlphaZetaPsi { alpha, zeta, psi: -0.5 * (alpha * alpha + zeta * zeta) }
}

struct Propagator {
    spectral: SpectralDecomposition,
    row: usize,
    col: usize,
}

impl Propagator {
    fn new(params: &ElectronPhononParams, n_max: usize) -> Result<Self> {
        let model = build_electron_phonon_q0(&ElectronPhononQ0 { n_max, ..params.model.clone() })?;
        let de = n_max + 1;
        let s = params.system_index();
        Ok(Propagator {
            spectral: hermitian_eig(&model.hamiltonian())?,
            row: s * de + params.n0,
            col: s * de + params.n0p,
        })
    }

    fn element(&self, t: f64) -> C64 {
        let v = self.spectral.eigenvectors();
        self.spectral
            .eigenvalues()
            .iter()
            .enumerate()
            .map(|(k, &l)| v[(self.row, k)] * v[(self.col, k)].conj() * C64::from_polar(1.0, -l * t))
            .sum()
    }
}

/// `⟨k n₀| e^{-iHt} |k n₀'⟩` on the truncated model, one value per time.
///
/// Each value is recomputed with twice the truncation; a change above
/// [`TRUNCATION_TOLERANCE`] is an error.
pub fn electron_phonon_matrix_elements(params: &ElectronPhononParams, ts: &[f64]) -> Result<Vec<C64>> {
    params.validate()?;
    let base = Propagator::new(params, params.model.n_max)?;
    let wide = Propagator::new(params, 2 * params.model.n_max)?;
    ts.iter()
        .map(|&t| {
            let e = base.element(t);
            let change = (e - wide.element(t)).norm();
            if change > TRUNCATION_TOLERANCE {
                return Err(Error::TruncationNotConverged { relative_change: change });
            }
            Ok(e)
        })
        .collect()
}

pub fn electron_phonon_matrix_element(params: &ElectronPhononParams, t: f64) -> Result<C64> {
    Ok(electron_phonon_matrix_elements(params, &[t])?[0])
}

/// Closed form assembled from the displaced-oscillator expansion, with
/// `(n₂!)²(n₄!)²` in the denominator and the free index `n₃` summed up to
/// `n_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesMatrixElement {
    /// `N⁻¹ e^{-iεt} e^{-iω₀n₀t} F(t)`.
    pub value: C64,
    pub f: C64,
    /// `N = 2π (n₀! n₀'!)^{1/2}`.
    pub normalization: f64,
    /// Magnitude of the last `n₃` shell.
    pub last_shell: f64,
    /// Whether the last shell is below `1e-10 |F|`.
    pub converged: bool,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn i_pow(n: usize) -> C64 {
    // (−i)^n
    match n % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, -1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, 1.0),
    }
}

pub fn series_matrix_element(params: &ElectronPhononParams, t: f64) -> Result<SeriesMatrixElement> {
    params.validate()?;
    let AlphaZetaPsi { alpha, zeta, psi } = alpha_zeta_psi(params, t);
    let (n0, n0p) = (params.n0, params.n0p);
    let pre = factorial(n0) * factorial(n0p) * psi.exp();
    let mut f = C64::new(0.0, 0.0);
    let mut last_shell = 0.0;
    for n3 in 0..=params.model.n_max {
        let mut shell = C64::new(0.0, 0.0);
        for n2 in 0..=n0.min(n3) {
            for n4 in 0..=n3.min(n0p) {
                let sign = if (n0p + n2 + n4) % 2 == 0 { 1.0 } else { -1.0 };
                let num = (factorial(n2) * factorial(n3)).powi(2)
                    * alpha.powi((n0 + n3 - 2 * n2) as i32)
                    * zeta.powi((n0p + n3) as i32 - 2 * n4 as i32);
                let den = (factorial(n2) * factorial(n4)).powi(2)
                    * factorial(n0 - n2)
                    * factorial(n3 - n4)
                    * factorial(n3 - n2)
                    * factorial(n0p - n4);
                shell += i_pow(n0 + n3) * (sign * num / den);
            }
        }
        f += shell * pre;
        last_shell = shell.norm() * pre;
    }
    let normalization = 2.0 * core::f64::consts::PI * (factorial(n0) * factorial(n0p)).sqrt();
    let phase = C64::from_polar(1.0, -(params.electron_energy() + params.model.omega0 * n0 as f64) * t);
    Ok(SeriesMatrixElement {
        value: phase * f / normalization,
        f,
        normalization,
        last_shell,
        converged: last_shell <= 1e-10 * f.norm(),
    })
}

/// Side-by-side numeric and closed-form matrix elements at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixElementComparison {
    pub t: f64,
    pub numeric: C64,
    pub series: SeriesMatrixElement,
    pub difference: f64,
}

/// Reports the closed form against the numeric path without judging it.
pub fn compare_matrix_elements(params: &ElectronPhononParams, ts: &[f64]) -> Result<Vec<MatrixElementComparison>> {
    let numeric = electron_phonon_matrix_elements(params, ts)?;
    ts.iter()
        .zip(numeric)
        .map(|(&t, numeric)| {
            let series = series_matrix_element(params, t)?;
            Ok(MatrixElementComparison { t, numeric, series, difference: (numeric - series.value).norm() })
        })
        .collect()
}

/// `ΔE` and `V_E` of the model through the generic engine.
pub fn electron_phonon_exchange(
    model: &ModelSpec,
    state: &InitialState,
    t_grid: &[f64],
    cfg: &CumulantConfig,
) -> Result<TimeSeries> {
    sweep(model, state, t_grid, cfg)
}
