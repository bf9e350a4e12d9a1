//! Run configuration: a single TOML file drives every command.
//!
//! All numeric fields are dimensionless ratios (frequencies in units of
//! the bare splitting). Unknown keys are rejected so typos surface as
//! configuration errors (exit code 2).

use crate::bath::BathSpec;
use crate::driving::{DriveComponent, DrivingSpec, Waveform};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    Sambe,
    Chrw,
    Rwa,
}

impl std::str::FromStr for SolverMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sambe" => Ok(SolverMethod::Sambe),
            "chrw" => Ok(SolverMethod::Chrw),
            "rwa" => Ok(SolverMethod::Rwa),
            other => Err(Error::InvalidConfig(format!(
                "unknown solver '{other}' (expected sambe, chrw, or rwa)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DrivingConfig {
    pub kind: String,
    #[serde(default = "one")]
    pub omega0: f64,
    pub omega_l: f64,
    #[serde(default)]
    pub amplitude: f64,
    /// Relative amplitude of the second harmonic (biharmonic only).
    #[serde(default)]
    pub r: f64,
    /// Relative phase of the second harmonic (biharmonic only).
    #[serde(default)]
    pub phi: f64,
    /// Number of odd harmonics (square_wave only).
    #[serde(default = "default_n_terms")]
    pub n_terms: usize,
    /// Explicit component list (custom only).
    #[serde(default)]
    pub components: Vec<CustomComponent>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomComponent {
    pub harmonic: usize,
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
    #[serde(default = "cosine")]
    pub waveform: Waveform,
}

fn one() -> f64 {
    1.0
}
fn default_n_terms() -> usize {
    100
}
fn cosine() -> Waveform {
    Waveform::Cosine
}

impl DrivingConfig {
    pub fn build(&self) -> Result<DrivingSpec> {
        match self.kind.as_str() {
            "harmonic" => {
                let mut s = DrivingSpec::harmonic(self.amplitude, self.omega_l)?;
                s.omega0 = self.omega0;
                Ok(s)
            }
            "biharmonic" => {
                let mut s =
                    DrivingSpec::biharmonic(self.amplitude, self.r, self.phi, self.omega_l)?;
                s.omega0 = self.omega0;
                Ok(s)
            }
            "square_wave" => {
                let mut s =
                    DrivingSpec::square_wave_like(self.amplitude, self.omega_l, self.n_terms)?;
                s.omega0 = self.omega0;
                Ok(s)
            }
            "custom" => DrivingSpec::new(
                self.omega0,
                self.omega_l,
                self.components
                    .iter()
                    .map(|c| (c.harmonic, c.amplitude, c.phase, c.waveform)),
            ),
            other => Err(Error::InvalidConfig(format!(
                "unknown driving kind '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_method")]
    pub method: SolverMethod,
    #[serde(default)]
    pub n_max: Option<usize>,
    #[serde(default)]
    pub lamb_shift: bool,
}

fn default_method() -> SolverMethod {
    SolverMethod::Sambe
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: SolverMethod::Sambe,
            n_max: None,
            lamb_shift: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    #[serde(default)]
    pub omega_min: f64,
    #[serde(default = "default_omega_max")]
    pub omega_max: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    /// Restrict lines to |n| <= n_window; all above the weight floor if
    /// absent.
    #[serde(default)]
    pub n_window: Option<i64>,
}

fn default_omega_max() -> f64 {
    2.0
}
fn default_points() -> usize {
    2000
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            omega_min: 0.0,
            omega_max: default_omega_max(),
            points: default_points(),
            n_window: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    #[serde(default)]
    pub a_over_omega_l_min: f64,
    #[serde(default = "default_compare_max")]
    pub a_over_omega_l_max: f64,
    #[serde(default = "default_compare_points")]
    pub points: usize,
}

fn default_compare_max() -> f64 {
    3.0
}
fn default_compare_points() -> usize {
    61
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            a_over_omega_l_min: 0.0,
            a_over_omega_l_max: default_compare_max(),
            points: default_compare_points(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonanceConfig {
    pub omega_l_min: f64,
    pub omega_l_max: f64,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "default_refine_tol")]
    pub refine_tol: f64,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    /// Also emit the r = 0 (single-harmonic) reference column.
    #[serde(default)]
    pub harmonic_reference: bool,
    /// Also emit the co-rotating comparison column.
    #[serde(default)]
    pub rwa_reference: bool,
}

fn default_grid_points() -> usize {
    crate::resonance::DEFAULT_GRID_POINTS
}
fn default_refine_tol() -> f64 {
    crate::resonance::DEFAULT_REFINE_TOL
}
fn default_threshold() -> f64 {
    crate::resonance::DEFAULT_PEAK_THRESHOLD
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// One of: amplitude, omega_l, r, phi, kappa, alpha.
    pub parameter: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub dir: Option<String>,
}

/// Full run configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub driving: DrivingConfig,
    #[serde(default)]
    pub baths: Vec<BathSpec>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub compare: Option<CompareConfig>,
    #[serde(default)]
    pub resonance: Option<ResonanceConfig>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let spec = self.driving.build()?;
        for b in &self.baths {
            b.validate()?;
        }
        if !(self.spectrum.omega_min < self.spectrum.omega_max) {
            return Err(Error::InvalidConfig(
                "spectrum window needs omega_min < omega_max".into(),
            ));
        }
        if self.spectrum.points < 2 {
            return Err(Error::InvalidConfig(
                "spectrum grid needs at least 2 points".into(),
            ));
        }
        if matches!(self.solver.method, SolverMethod::Chrw | SolverMethod::Rwa)
            && spec.as_pure_harmonic().is_none()
        {
            return Err(Error::InvalidConfig(
                "chrw/rwa solvers are only valid for single-harmonic cosine driving".into(),
            ));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(Error::InvalidConfig("sweep needs at least one value".into()));
            }
            if sweep.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidConfig("sweep values must be finite".into()));
            }
            const PARAMS: &[&str] = &["amplitude", "omega_l", "r", "phi", "kappa", "alpha"];
            if !PARAMS.contains(&sweep.parameter.as_str()) {
                return Err(Error::InvalidConfig(format!(
                    "unknown sweep parameter '{}' (expected one of {PARAMS:?})",
                    sweep.parameter
                )));
            }
        }
        if let Some(c) = &self.compare {
            if !(c.a_over_omega_l_min < c.a_over_omega_l_max) || c.points < 2 {
                return Err(Error::InvalidConfig("bad compare grid".into()));
            }
        }
        Ok(())
    }

    /// Apply a swept parameter value, returning the modified copy.
    pub fn with_parameter(&self, parameter: &str, value: f64) -> Result<RunConfig> {
        let mut cfg = self.clone();
        match parameter {
            "amplitude" => cfg.driving.amplitude = value,
            "omega_l" => cfg.driving.omega_l = value,
            "r" => cfg.driving.r = value,
            "phi" => cfg.driving.phi = value,
            "kappa" => {
                for b in cfg.baths.iter_mut() {
                    if let BathSpec::Radiative { kappa } = b {
                        *kappa = value;
                    }
                }
            }
            "alpha" => {
                for b in cfg.baths.iter_mut() {
                    if let BathSpec::Ohmic { alpha, .. } = b {
                        *alpha = value;
                    }
                }
            }
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown sweep parameter '{other}'"
                )))
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Components of a `DrivingSpec` as canonical custom components (used to
/// echo the fully resolved drive into output headers).
pub fn resolved_components(spec: &DrivingSpec) -> Vec<DriveComponent> {
    spec.components().to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"
[driving]
kind = "biharmonic"
amplitude = 0.5
omega_l = 1.0
r = 1.0
phi = 0.0

[[baths]]
kind = "radiative"
kappa = 0.02

[[baths]]
kind = "ohmic"
alpha = 0.01
omega_c = 10.0

[solver]
method = "sambe"

[spectrum]
omega_min = 0.0
omega_max = 4.0
points = 500
"#;

    #[test]
    fn parses_example() {
        let cfg = RunConfig::from_toml(EXAMPLE).unwrap();
        assert_eq!(cfg.baths.len(), 2);
        let spec = cfg.driving.build().unwrap();
        assert_eq!(spec.components().len(), 2);
        assert_eq!(cfg.solver.method, SolverMethod::Sambe);
    }

    #[test]
    fn roundtrips_through_toml() {
        let cfg = RunConfig::from_toml(EXAMPLE).unwrap();
        let text = cfg.to_toml();
        let again = RunConfig::from_toml(&text).unwrap();
        assert_eq!(text, again.to_toml());
    }

    #[test]
    fn rejects_unknown_keys() {
        let bad = EXAMPLE.replace("omega_l = 1.0", "omega_l = 1.0\nbogus = 3");
        assert!(RunConfig::from_toml(&bad).is_err());
    }

    #[test]
    fn rejects_chrw_for_biharmonic() {
        let bad = EXAMPLE.replace("method = \"sambe\"", "method = \"chrw\"");
        let err = RunConfig::from_toml(&bad).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn rejects_bad_window() {
        let bad = EXAMPLE.replace("omega_max = 4.0", "omega_max = -1.0");
        assert!(RunConfig::from_toml(&bad).is_err());
    }

    #[test]
    fn custom_driving_components() {
        let text = r#"
[driving]
kind = "custom"
omega_l = 1.0

[[driving.components]]
harmonic = 1
amplitude = 0.25

[[driving.components]]
harmonic = 3
amplitude = 0.05
waveform = "sine"
"#;
        let cfg = RunConfig::from_toml(text).unwrap();
        let spec = cfg.driving.build().unwrap();
        assert_eq!(spec.components().len(), 2);
        assert_eq!(spec.max_harmonic(), 3);
    }

    #[test]
    fn sweep_parameter_application() {
        let mut cfg = RunConfig::from_toml(EXAMPLE).unwrap();
        cfg.sweep = Some(SweepConfig {
            parameter: "amplitude".into(),
            values: vec![0.1, 0.2],
        });
        cfg.validate().unwrap();
        let swept = cfg.with_parameter("amplitude", 0.7).unwrap();
        assert_eq!(swept.driving.amplitude, 0.7);
        assert!(cfg.with_parameter("nonsense", 1.0).is_err());
    }
}
