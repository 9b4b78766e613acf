//! TOML run configuration for the CLI: model selection, grid, parameters,
//! initial data, stepping rule and output destinations.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::{StepRule, StepperConfig};
use crate::models::{self, ModelId, ModelSpec, ModelState, Params};
use crate::spectral1d::{self, Spectrum1D};
use crate::spectral2d::{self, Field2D};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Catalog id, e.g. "burgers" or "euler-2d".
    pub model: String,
    #[serde(default)]
    pub grid: GridConfig,
    /// Only keys the model declares are accepted.
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub initial: InitialConfig,
    pub time: TimeConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// 1D mode cutoff, or the side of a square 2D grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nx: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ny: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    /// One of sine, two-mode, taylor-green, shear, random-band.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    /// Seed for the random-band preset.
    #[serde(default)]
    pub seed: u64,
    /// Explicit mode list for the primary field; companion fields start
    /// at zero. Mutually exclusive with `preset`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modes: Option<Vec<ModeConfig>>,
}

/// One cosine mode `amp * cos(k x + phase)` on the circle (`k`) or
/// `amp * cos(kx x + ky y + phase)` on the torus (`kx`, `ky`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kx: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ky: Option<i64>,
    pub amp: f64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_final: f64,
    /// Fixed step; mutually exclusive with `cfl`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// CFL number in (0, 1]; mutually exclusive with `dt`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cfl: Option<f64>,
    /// Record every `stride` steps.
    #[serde(default = "default_stride")]
    pub stride: usize,
}

fn default_stride() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Destination directory; defaults to the working directory.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directory: Option<String>,
    /// Field names to dump as snapshots at every recorded time; empty
    /// means series only.
    #[serde(default)]
    pub fields: Vec<String>,
}

impl RunConfig {
    pub fn from_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Validate and assemble everything a run needs.
    pub fn build(&self) -> Result<(ModelSpec, ModelState, StepperConfig)> {
        let id = ModelId::parse(&self.model)?;
        let spec = ModelSpec::with_params(id, self.build_params(id)?);
        let (n1, n2) = self.resolve_grid(id)?;
        let mut state = self.build_state(&spec, n1, n2)?;
        self.apply_background_field(id, &mut state);
        let stepper = self.build_stepper()?;
        Ok((spec, state, stepper))
    }

    fn build_params(&self, id: ModelId) -> Result<Params> {
        let legal = id.parameters();
        let mut p = Params::default();
        for (key, &value) in &self.params {
            if !legal.contains(&key.as_str()) {
                return Err(Error::Config(format!(
                    "model `{}` does not take parameter `{key}` (legal: {})",
                    id.name(),
                    if legal.is_empty() { "none".into() } else { legal.join(", ") },
                )));
            }
            match key.as_str() {
                "a" => p.a = value,
                "beta" => p.beta = value,
                "brunt" => p.brunt = value,
                "alpha2" => p.alpha2 = value,
                "b" => p.b = value,
                "b0x" | "b0y" => {} // handled as initial data
                _ => unreachable!("legal list covers all keys"),
            }
        }
        Ok(p)
    }

    fn resolve_grid(&self, id: ModelId) -> Result<(usize, usize)> {
        let g = &self.grid;
        if id.is_one_dimensional() {
            if g.nx.is_some() || g.ny.is_some() {
                return Err(Error::Config(format!(
                    "model `{}` takes a 1D grid: use [grid] n",
                    id.name()
                )));
            }
            let n = g.n.unwrap_or(spectral1d::DEFAULT_CUTOFF);
            if n == 0 {
                return Err(Error::Config("[grid] n must be positive".into()));
            }
            return Ok((n, n));
        }
        let (nx, ny) = match (g.n, g.nx, g.ny) {
            (Some(n), None, None) => (n, n),
            (None, Some(nx), Some(ny)) => (nx, ny),
            (None, None, None) => (spectral2d::DEFAULT_GRID, spectral2d::DEFAULT_GRID),
            _ => {
                return Err(Error::Config(
                    "[grid] takes either n or the pair nx, ny".into(),
                ))
            }
        };
        if !nx.is_power_of_two() || !ny.is_power_of_two() {
            return Err(Error::Config(format!(
                "2D grid must be powers of two, got {nx} x {ny}"
            )));
        }
        Ok((nx, ny))
    }

    fn build_state(&self, spec: &ModelSpec, n1: usize, n2: usize) -> Result<ModelState> {
        let init = &self.initial;
        match (&init.preset, &init.modes) {
            (Some(_), Some(_)) => Err(Error::Config(
                "[initial] takes either preset or modes, not both".into(),
            )),
            (Some(name), None) => models::preset(spec, name, n1, n2, init.seed),
            (None, None) => models::preset(spec, "sine", n1, n2, init.seed),
            (None, Some(modes)) => {
                if spec.id.is_one_dimensional() {
                    let mut u = Spectrum1D::zeros(n1);
                    for m in modes {
                        let (Some(k), None, None) = (m.k, m.kx, m.ky) else {
                            return Err(Error::Config(
                                "1D modes use k, not kx/ky".into(),
                            ));
                        };
                        // amp cos(kx + phase): c_k += amp/2 e^{i phase}.
                        let half = 0.5
                            * m.amp
                            * num_complex::Complex64::new(0.0, m.phase).exp();
                        u.set_mode(k, u.coeff(k) + half);
                    }
                    models::state_from_profile(spec, u)
                } else {
                    let mut f = Field2D::zeros(n1, n2);
                    for m in modes {
                        let (None, Some(kx), Some(ky)) = (m.k, m.kx, m.ky) else {
                            return Err(Error::Config(
                                "2D modes use kx and ky, not k".into(),
                            ));
                        };
                        let half = 0.5
                            * m.amp
                            * num_complex::Complex64::new(0.0, m.phase).exp();
                        f.set_mode(kx, ky, f.coeff(kx, ky) + half);
                    }
                    models::state_from_vorticity(spec, f)
                }
            }
        }
    }

    /// `b0x`/`b0y` set the harmonic (mean) part of the magnetic field.
    fn apply_background_field(&self, id: ModelId, state: &mut ModelState) {
        if id != ModelId::Mhd2d {
            return;
        }
        if let ModelState::VecPair2 { b, .. } = state {
            if let Some(&v) = self.params.get("b0x") {
                b.mean[0] = v;
            }
            if let Some(&v) = self.params.get("b0y") {
                b.mean[1] = v;
            }
        }
    }

    fn build_stepper(&self) -> Result<StepperConfig> {
        let t = &self.time;
        let rule = match (t.dt, t.cfl) {
            (Some(dt), None) => StepRule::Fixed(dt),
            (None, Some(c)) => StepRule::Cfl(c),
            (None, None) => StepRule::Cfl(0.5),
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "[time] takes either dt or cfl, not both".into(),
                ))
            }
        };
        let cfg = StepperConfig {
            rule,
            t_final: t.t_final,
            record_stride: t.stride,
        };
        cfg.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"
model = "kdv"

[grid]
n = 85

[params]
a = 0.5

[initial]
preset = "two-mode"

[time]
t_final = 0.1
cfl = 0.4
stride = 10

[output]
directory = "out"
fields = ["u"]
"#;

    #[test]
    fn example_builds() {
        let cfg = RunConfig::from_str(EXAMPLE).unwrap();
        let (spec, state, stepper) = cfg.build().unwrap();
        assert_eq!(spec.id, ModelId::Kdv);
        assert_eq!(spec.params.a, 0.5);
        assert!(matches!(state, ModelState::Wave1 { .. }));
        assert_eq!(stepper.rule, StepRule::Cfl(0.4));
    }

    #[test]
    fn round_trip() {
        let cfg = RunConfig::from_str(EXAMPLE).unwrap();
        let echoed = RunConfig::from_str(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, echoed);
    }

    #[test]
    fn rejects_illegal_parameter() {
        let text = EXAMPLE.replace("a = 0.5", "beta = 0.5");
        let err = RunConfig::from_str(&text).unwrap().build().unwrap_err();
        assert!(err.to_string().contains("beta"));
    }

    #[test]
    fn rejects_unknown_model_and_bad_grid() {
        let bad = EXAMPLE.replace("\"kdv\"", "\"nope\"");
        assert!(RunConfig::from_str(&bad).unwrap().build().is_err());
        let bad = EXAMPLE.replace("\"kdv\"", "\"euler-2d\"").replace("a = 0.5", "");
        // 1D grid key and non-power-of-two sizes both rejected for 2D.
        assert!(RunConfig::from_str(&bad).unwrap().build().is_err());
    }

    #[test]
    fn mode_list_matches_preset() {
        let text = r#"
model = "burgers"
[initial]
modes = [{ k = 1, amp = 1.0, phase = -1.5707963267948966 }]
[time]
t_final = 0.0
"#;
        // cos(x - pi/2) = sin x.
        let (_, state, _) = RunConfig::from_str(text).unwrap().build().unwrap();
        let spec = ModelSpec::new(ModelId::Burgers);
        let want = models::preset(&spec, "sine", 85, 85, 0).unwrap();
        let (ModelState::Wave1 { u }, ModelState::Wave1 { u: w }) = (&state, &want) else {
            unreachable!()
        };
        assert!(u.sub(w).max_coeff() < 1e-15);
    }

    #[test]
    fn malformed_toml_is_config_error() {
        assert!(matches!(
            RunConfig::from_str("model = ["),
            Err(Error::Config(_))
        ));
    }
}
