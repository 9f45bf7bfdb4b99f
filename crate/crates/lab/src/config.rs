//! Experiment configuration documents.

use std::path::{Path, PathBuf};

use radwave_core::radial::MIN_POINTS;
use radwave_core::solver::{Nonlinearity, SolverConfig, DEFAULT_CFL};
use radwave_core::{Profile, RadialGrid, WaveState};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{LabError, LabResult};

/// Radial initial profile, tagged by `kind`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    Gaussian { a: f64 },
    Bump { a: f64, b: f64 },
    Polydecay { a: f64, m: f64 },
}

impl ProfileSpec {
    pub fn to_profile(self) -> LabResult<Profile> {
        let raw = match self {
            ProfileSpec::Gaussian { a } => Profile::Gaussian { a },
            ProfileSpec::Bump { a, b } => Profile::Bump { a, b },
            ProfileSpec::Polydecay { a, m } => Profile::PolyDecay { a, m },
        };
        raw.validated().map_err(|e| LabError::in_config(e, "profile"))
    }
}

impl From<Profile> for ProfileSpec {
    fn from(p: Profile) -> Self {
        match p {
            Profile::Gaussian { a } => ProfileSpec::Gaussian { a },
            Profile::Bump { a, b } => ProfileSpec::Bump { a, b },
            Profile::PolyDecay { a, m } => ProfileSpec::Polydecay { a, m },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub r_max: f64,
    /// Interior points; the spacing is `r_max/(n+1)`.
    pub n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Full nonlinear flow with flat-space diagnostics.
    Full,
    /// Fourier-truncation split `u = v + w` evolved as a coupled pair.
    Split,
    /// Hyperbolic-coordinate flow; `grid.r_max` is the extent in `s`.
    Hyperbolic,
    /// Free flow compared with the exact solution at three resolutions.
    FreeOracle,
}

fn default_amplitude() -> f64 {
    1.0
}
fn default_epsilon() -> f64 {
    0.05
}
fn default_c_morawetz() -> f64 {
    radwave_core::functionals::DEFAULT_C_MORAWETZ
}
fn default_dt_factor() -> f64 {
    DEFAULT_CFL
}
fn default_record_every() -> usize {
    1
}
fn default_checkpoints() -> usize {
    5
}

/// One experiment. Data are at rest: `u_0 = amplitude·profile`, `u_1 = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub p: f64,
    pub profile: ProfileSpec,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_c_morawetz")]
    pub c_morawetz: f64,
    pub grid: GridSpec,
    /// `dt = dt_factor·h`.
    #[serde(default = "default_dt_factor")]
    pub dt_factor: f64,
    pub t_end: f64,
    pub mode: Mode,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    /// Drives the random corpus entries only, never the numerics.
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    /// Number of checkpoint files written along the run (endpoints included).
    #[serde(default = "default_checkpoints")]
    pub checkpoints: usize,
}

impl ExperimentConfig {
    pub fn new(p: f64, profile: ProfileSpec, grid: GridSpec, t_end: f64, mode: Mode) -> Self {
        ExperimentConfig {
            p,
            profile,
            amplitude: default_amplitude(),
            epsilon: default_epsilon(),
            c_morawetz: default_c_morawetz(),
            grid,
            dt_factor: default_dt_factor(),
            t_end,
            mode,
            record_every: default_record_every(),
            seed: 0,
            out_dir: None,
            checkpoints: default_checkpoints(),
        }
    }

    pub fn load(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path).map_err(LabError::io(path))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text).map_err(LabError::json(path))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every field; errors name the offending field path.
    pub fn validate(&self) -> LabResult<()> {
        let p_ok = match self.mode {
            Mode::Hyperbolic => (3.0..=5.0).contains(&self.p),
            _ => self.p > 3.0 && self.p <= 5.0,
        };
        if !p_ok {
            let range = if self.mode == Mode::Hyperbolic { "[3, 5]" } else { "(3, 5]" };
            return Err(LabError::invalid("p", format!("{} outside {range}", self.p)));
        }
        self.profile.to_profile()?;
        if !self.amplitude.is_finite() {
            return Err(LabError::invalid("amplitude", "must be finite"));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(LabError::invalid("epsilon", "must be positive"));
        }
        if !(self.c_morawetz.is_finite() && self.c_morawetz >= 0.0) {
            return Err(LabError::invalid("c_morawetz", "must be non-negative"));
        }
        if !(self.grid.r_max.is_finite() && self.grid.r_max > 0.0) {
            return Err(LabError::invalid("grid.r_max", "must be positive"));
        }
        let min_n = if self.mode == Mode::FreeOracle { 4 * MIN_POINTS } else { MIN_POINTS };
        if self.grid.n < min_n {
            return Err(LabError::invalid("grid.n", format!("need at least {min_n} points")));
        }
        if !(self.dt_factor > 0.0 && self.dt_factor <= DEFAULT_CFL) {
            return Err(LabError::invalid(
                "dt_factor",
                format!("must lie in (0, {DEFAULT_CFL}], got {}", self.dt_factor),
            ));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(LabError::invalid("t_end", "must be finite and non-negative"));
        }
        // the virial quadrature needs samples no further apart than h
        if self.record_every == 0 || self.record_every as f64 * self.dt_factor > 1.0 {
            return Err(LabError::invalid(
                "record_every",
                "need record_every ≥ 1 and record_every·dt_factor ≤ 1",
            ));
        }
        if self.checkpoints < 2 {
            return Err(LabError::invalid("checkpoints", "need at least the two endpoints"));
        }
        Ok(())
    }

    pub fn radial_grid(&self) -> LabResult<RadialGrid> {
        self.grid_with(self.grid.n)
    }

    pub(crate) fn grid_with(&self, n: usize) -> LabResult<RadialGrid> {
        RadialGrid::new(self.grid.r_max, n).map_err(|e| LabError::in_config(e, "grid"))
    }

    pub fn solver(&self, grid: &RadialGrid) -> SolverConfig {
        let cfg = SolverConfig::new(self.p, self.dt_factor * grid.spacing(), self.t_end)
            .with_record_every(self.record_every);
        match self.mode {
            Mode::FreeOracle => cfg.free(),
            _ => cfg,
        }
    }

    pub fn nonlinearity(&self) -> Nonlinearity {
        match self.mode {
            Mode::FreeOracle => Nonlinearity::Off,
            _ => Nonlinearity::Defocusing,
        }
    }

    pub fn initial_state(&self, grid: &RadialGrid) -> LabResult<WaveState> {
        let u = self.profile.to_profile()?.sample(grid)?;
        Ok(WaveState::at_rest(u.scaled(self.amplitude)))
    }

    /// Whether the dotted `path` names a field of the serialized document.
    pub fn has_field(&self, path: &str) -> bool {
        let doc = serde_json::to_value(self).expect("configuration serializes");
        let mut slot = &doc;
        for key in path.split('.') {
            match slot.as_object().and_then(|m| m.get(key)) {
                Some(next) => slot = next,
                None => return key == "out_dir" && path == "out_dir",
            }
        }
        true
    }

    /// Copy with the dotted `path` set to `value`, validated.
    pub fn with_field(&self, path: &str, value: Value) -> LabResult<Self> {
        let mut doc = serde_json::to_value(self).expect("configuration serializes");
        let mut slot = &mut doc;
        for key in path.split('.') {
            slot = slot
                .as_object_mut()
                .and_then(|m| m.get_mut(key))
                .ok_or_else(|| LabError::invalid(path, "no such configuration field"))?;
        }
        *slot = value;
        let cfg: ExperimentConfig =
            serde_json::from_value(doc).map_err(|e| LabError::invalid(path, e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentConfig {
        ExperimentConfig::new(
            4.0,
            ProfileSpec::Gaussian { a: 1.0 },
            GridSpec { r_max: 20.0, n: 255 },
            1.0,
            Mode::Full,
        )
    }

    fn field_of(err: LabError) -> String {
        match err {
            LabError::InvalidArgument { field, .. } => field,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn defaults_fill_in_from_json() {
        let cfg: ExperimentConfig = serde_json::from_str(
            r#"{"p":4,"profile":{"kind":"gaussian","a":1},"grid":{"r_max":20,"n":255},"t_end":1,"mode":"full"}"#,
        )
        .unwrap();
        assert_eq!(cfg, base());
    }

    #[test]
    fn errors_name_the_field_path() {
        let mut cfg = base();
        cfg.p = 2.0;
        assert_eq!(field_of(cfg.validate().unwrap_err()), "p");
        let mut cfg = base();
        cfg.profile = ProfileSpec::Gaussian { a: -1.0 };
        assert_eq!(field_of(cfg.validate().unwrap_err()), "profile.a");
        let mut cfg = base();
        cfg.dt_factor = 0.7;
        assert_eq!(field_of(cfg.validate().unwrap_err()), "dt_factor");
        let mut cfg = base();
        cfg.grid.n = 2;
        assert_eq!(field_of(cfg.validate().unwrap_err()), "grid.n");
        let mut cfg = base();
        cfg.record_every = 4;
        assert_eq!(field_of(cfg.validate().unwrap_err()), "record_every");
    }

    #[test]
    fn cubic_exponent_is_admitted_only_in_hyperbolic_mode() {
        let mut cfg = base();
        cfg.p = 3.0;
        assert!(cfg.validate().is_err());
        cfg.mode = Mode::Hyperbolic;
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn field_override_walks_dotted_paths() {
        let cfg = base().with_field("grid.n", Value::from(511)).unwrap();
        assert_eq!(cfg.grid.n, 511);
        let err = base().with_field("grid.m", Value::from(1)).unwrap_err();
        assert_eq!(field_of(err), "grid.m");
        let err = base().with_field("p", Value::from(9.0)).unwrap_err();
        assert_eq!(field_of(err), "p");
    }
}
