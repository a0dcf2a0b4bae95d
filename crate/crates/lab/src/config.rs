//! JSON run configuration.
//!
//! Every record rejects unknown keys. Model parameters arrive as a raw JSON
//! value and are decoded against the schema of the named model, so a bad
//! key or type fails before any computation starts.

use std::path::Path;

use exchange_lab_core::analytic::two_level::TwoLevelParams;
use exchange_lab_core::{
    build_electron_phonon_q0, build_generic, build_impurity_bec, build_two_level_env, initial_state,
    make_space, CumulantConfig, ElectronPhononQ0, FactorKind, ImpurityBecParams, InitialState, Matrix,
    Method, ModelSpec, Numerics, C64,
};
use serde::{Deserialize, Serialize};

use crate::error::LabError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelName {
    Generic,
    ImpurityBecQ0,
    TwoLevelEnv,
    ElectronPhononQ0,
}

impl ModelName {
    pub const ALL: [ModelName; 4] =
        [ModelName::Generic, ModelName::ImpurityBecQ0, ModelName::TwoLevelEnv, ModelName::ElectronPhononQ0];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelName::Generic => "generic",
            ModelName::ImpurityBecQ0 => "impurity-bec-q0",
            ModelName::TwoLevelEnv => "two-level-env",
            ModelName::ElectronPhononQ0 => "electron-phonon-q0",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ModelName::Generic => "explicit H_S, H_E and H_SE matrices on level/Fock/fermion factors",
            ModelName::ImpurityBecQ0 => "fermionic impurity in a truncated condensate, zero momentum transfer",
            ModelName::TwoLevelEnv => "system levels coupled to a two-level environment, block-diagonal H_SE",
            ModelName::ElectronPhononQ0 => "electrons coupled to the zero phonon mode",
        }
    }
}

/// Square complex matrix as rows of `[re, im]` pairs.
pub type MatrixConfig = Vec<Vec<[f64; 2]>>;

fn matrix(rows: &MatrixConfig, what: &str) -> Result<Matrix, LabError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(LabError::Schema(format!("{what} must be a non-empty square matrix")));
    }
    Ok(Matrix::from_fn(n, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenericParams {
    pub system: Vec<FactorKind>,
    pub environment: Vec<FactorKind>,
    pub h_s: MatrixConfig,
    pub h_e: MatrixConfig,
    pub h_se: MatrixConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialStateConfig {
    /// System amplitudes over the `H_S` eigenbasis, as `[re, im]`.
    pub c: Vec<[f64; 2]>,
    /// Environment weights over the `H_E` eigenbasis.
    pub d: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub t_max: f64,
    /// Number of grid points, including `t = 0`.
    pub steps: usize,
}

impl GridConfig {
    pub fn validate(&self) -> Result<(), LabError> {
        if self.steps < 1 {
            return Err(LabError::Schema("grid.steps must be at least 1".into()));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(LabError::Schema("grid.t_max must be positive".into()));
        }
        Ok(())
    }

    /// `t_i = t_max · i / (steps − 1)`; a single step is `[0]`.
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![0.0];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps).map(|i| self.t_max * i as f64 / last).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericsConfig {
    pub eta_step: Option<f64>,
    pub dt_step: Option<f64>,
    pub method: Method,
    pub reference_eta: f64,
    pub tolerances: Numerics,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        NumericsConfig { eta_step: None, dt_step: None, method: Method::Both, reference_eta: 0.0, tolerances: Numerics::DEFAULT }
    }
}

impl NumericsConfig {
    pub fn cumulant(&self) -> CumulantConfig {
        CumulantConfig {
            eta_step: self.eta_step,
            dt_step: self.dt_step,
            method: self.method,
            reference_eta: self.reference_eta,
            numerics: self.tolerances,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<String>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelName,
    #[serde(default)]
    pub params: serde_json::Value,
    #[serde(default)]
    pub initial_state: Option<InitialStateConfig>,
    pub grid: GridConfig,
    #[serde(default)]
    pub numerics: NumericsConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Model parameters decoded for the named model.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelParams {
    Generic(GenericParams),
    ImpurityBec(ImpurityBecParams),
    TwoLevel(TwoLevelParams),
    ElectronPhonon(ElectronPhononQ0),
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig, LabError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(LabError::schema)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig, LabError> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        RunConfig::from_json(&text)
    }

    /// Schema checks that need no model construction.
    pub fn validate(&self) -> Result<(), LabError> {
        self.grid.validate()?;
        self.numerics.cumulant().validate().map_err(LabError::schema)?;
        let params = self.model_params()?;
        match (&params, &self.initial_state) {
            (ModelParams::TwoLevel(_), Some(_)) => Err(LabError::Schema(
                "two-level-env takes amplitudes from params.levels and weights from d11/d22; drop initial_state".into(),
            )),
            (ModelParams::TwoLevel(_), None) => Ok(()),
            (_, None) => Err(LabError::Schema(format!("{} needs initial_state", self.model.as_str()))),
            (_, Some(_)) => Ok(()),
        }
    }

    pub fn model_params(&self) -> Result<ModelParams, LabError> {
        let v = self.params.clone();
        let decoded = match self.model {
            ModelName::Generic => serde_json::from_value(v).map(ModelParams::Generic),
            ModelName::ImpurityBecQ0 => serde_json::from_value(v).map(ModelParams::ImpurityBec),
            ModelName::TwoLevelEnv => serde_json::from_value(v).map(ModelParams::TwoLevel),
            ModelName::ElectronPhononQ0 => serde_json::from_value(v).map(ModelParams::ElectronPhonon),
        };
        decoded.map_err(|e| LabError::Schema(format!("params for {}: {e}", self.model.as_str())))
    }

    /// Builds the model and its initial state; any rejection is a schema error.
    pub fn build(&self) -> Result<(ModelSpec, InitialState), LabError> {
        let model = match self.model_params()? {
            ModelParams::Generic(p) => {
                let system = make_space(&p.system).map_err(LabError::schema)?;
                let environment = make_space(&p.environment).map_err(LabError::schema)?;
                build_generic(
                    &system,
                    &environment,
                    &matrix(&p.h_s, "h_s")?,
                    &matrix(&p.h_e, "h_e")?,
                    &matrix(&p.h_se, "h_se")?,
                )
            }
            ModelParams::ImpurityBec(p) => build_impurity_bec(&p),
            ModelParams::ElectronPhonon(p) => build_electron_phonon_q0(&p),
            ModelParams::TwoLevel(p) => {
                let model = build_two_level_env(&p).map_err(LabError::schema)?;
                let state = p.initial_state(&model).map_err(LabError::schema)?;
                return Ok((model, state));
            }
        }
        .map_err(LabError::schema)?;
        let st = self.initial_state.as_ref().ok_or_else(|| LabError::Schema("missing initial_state".into()))?;
        let c: Vec<C64> = st.c.iter().map(|z| C64::new(z[0], z[1])).collect();
        let state = initial_state(&model, &c, &st.d).map_err(LabError::schema)?;
        Ok((model, state))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_LEVEL: &str = r#"{
        "model": "two-level-env",
        "params": {"levels": [{"epsilon": 0.1, "amplitude": [1.0, 0.0], "r12": 0.3, "i12": 0.1}],
                   "e1": 1.0, "e2": 0.0, "d11": 1.0, "d22": 0.0},
        "grid": {"t_max": 2.0, "steps": 5}
    }"#;

    #[test]
    fn two_level_config_builds() {
        let cfg = RunConfig::from_json(TWO_LEVEL).unwrap();
        let (m, s) = cfg.build().unwrap();
        assert_eq!(m.name(), "two-level-env");
        assert_eq!(s.env_weights(), &[1.0, 0.0]);
        assert_eq!(cfg.grid.points(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = TWO_LEVEL.replace("\"grid\"", "\"gird\": 1, \"grid\"");
        assert!(matches!(RunConfig::from_json(&bad), Err(LabError::Schema(_))));
        let bad = TWO_LEVEL.replace("\"e1\"", "\"bogus\": 2, \"e1\"");
        assert!(matches!(RunConfig::from_json(&bad), Err(LabError::Schema(_))));
        let bad = TWO_LEVEL.replace("\"steps\": 5", "\"steps\": 0");
        assert!(matches!(RunConfig::from_json(&bad), Err(LabError::Schema(_))));
        let bad = TWO_LEVEL.replace("\"steps\": 5", "\"steps\": \"5\"");
        assert!(matches!(RunConfig::from_json(&bad), Err(LabError::Schema(_))));
    }

    #[test]
    fn single_step_grid() {
        assert_eq!(GridConfig { t_max: 3.0, steps: 1 }.points(), vec![0.0]);
    }
}
