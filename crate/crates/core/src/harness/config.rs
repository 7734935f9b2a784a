//! JSON run configuration.

use serde::Deserialize;
use std::path::Path;
use thiserror::Error;

use crate::direct::operator::MIN_POINTS;
use crate::profile::{JunctionProfile, RampShape, SemiclassicalParams};

#[derive(Error, Debug)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid `{field}`: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyUnit {
    #[default]
    Absolute,
    /// Energies other than `delta0` are multiples of `delta0`.
    Delta0,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthUnit {
    #[default]
    Absolute,
    /// Lengths other than `lead_half_length` are multiples of it.
    LeadHalfLength,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Units {
    #[serde(default)]
    pub energy: EnergyUnit,
    #[serde(default)]
    pub length: LengthUnit,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub delta0: f64,
    pub mu0: f64,
    pub x1: f64,
    pub x2: f64,
    pub lead_half_length: f64,
    #[serde(default = "default_shape")]
    pub ramp_shape: RampShape,
}

fn default_shape() -> RampShape {
    RampShape::QuinticSmoothstep
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverToggles {
    #[serde(default)]
    pub bohr_sommerfeld: bool,
    #[serde(default)]
    pub hard_wall: bool,
    #[serde(default)]
    pub direct: bool,
    #[serde(default)]
    pub resonances: bool,
}

impl Default for SolverToggles {
    fn default() -> Self {
        Self {
            bohr_sommerfeld: true,
            hard_wall: false,
            direct: false,
            resonances: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub half_width: f64,
    pub n: usize,
    #[serde(default)]
    pub x_scale_start: Option<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            half_width: 3.0,
            n: 4000,
            x_scale_start: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "out_spectrum")]
    pub spectrum: String,
    #[serde(default = "out_hardwall")]
    pub hardwall: String,
    #[serde(default = "out_widths")]
    pub widths: String,
    #[serde(default = "out_widths_fit")]
    pub widths_fit: String,
    #[serde(default = "out_compare")]
    pub compare: String,
    #[serde(default = "out_table_d")]
    pub table_d: String,
}

fn out_spectrum() -> String {
    "spectrum.csv".into()
}
fn out_hardwall() -> String {
    "hardwall.csv".into()
}
fn out_widths() -> String {
    "widths.csv".into()
}
fn out_widths_fit() -> String {
    "widths_fit.csv".into()
}
fn out_compare() -> String {
    "compare.csv".into()
}
fn out_table_d() -> String {
    "table_d.csv".into()
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            spectrum: out_spectrum(),
            hardwall: out_hardwall(),
            widths: out_widths(),
            widths_fit: out_widths_fit(),
            compare: out_compare(),
            table_d: out_table_d(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcceptanceConfig {
    /// Largest allowed `|E_hw - E_bs|`, in units of `delta0`.
    #[serde(default = "default_hw_tol")]
    pub hard_wall: f64,
    /// Largest allowed `|E_bs - E_direct|` at the smallest `h`, in units of `delta0`.
    #[serde(default = "default_direct_tol")]
    pub direct: f64,
}

fn default_hw_tol() -> f64 {
    0.02
}
fn default_direct_tol() -> f64 {
    0.01
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        Self {
            hard_wall: default_hw_tol(),
            direct: default_direct_tol(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableDConfig {
    pub nu_list: Vec<f64>,
    pub z_min: f64,
    pub z_max: f64,
    pub points: usize,
    #[serde(default)]
    pub z_imag: f64,
}

impl Default for TableDConfig {
    fn default() -> Self {
        Self {
            nu_list: vec![-0.5, 0.0, 0.5, 1.0, 2.0],
            z_min: -5.0,
            z_max: 5.0,
            points: 101,
            z_imag: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub units: Units,
    pub profile: ProfileConfig,
    pub h_list: Vec<f64>,
    pub phi_list: Vec<f64>,
    pub window: [f64; 2],
    #[serde(default)]
    pub solvers: SolverToggles,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default = "default_thetas")]
    pub theta_list: Vec<f64>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default = "default_dphi")]
    pub dphi: f64,
    /// Level tracked across `h` for the width fit, in energy units.
    #[serde(default)]
    pub reference_energy: Option<f64>,
    #[serde(default)]
    pub tol_root: Option<f64>,
    #[serde(default)]
    pub tol_quad: Option<f64>,
    #[serde(default)]
    pub acceptance: AcceptanceConfig,
    #[serde(default)]
    pub table_d: TableDConfig,
}

fn default_thetas() -> Vec<f64> {
    vec![0.1]
}
fn default_dphi() -> f64 {
    1e-3
}

/// Configuration converted to absolute units and checked.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub config: RunConfig,
    /// Absolute value of one configured energy unit.
    pub energy_scale: f64,
    /// Absolute value of one configured length unit.
    pub length_scale: f64,
    pub delta0: f64,
    pub mu0: f64,
    pub x1: f64,
    pub x2: f64,
    pub lead_half_length: f64,
    pub window: (f64, f64),
    pub half_width: f64,
    pub x_scale_start: Option<f64>,
    pub reference_energy: f64,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn resolve(&self) -> Result<Resolved, ConfigError> {
        let p = &self.profile;
        for (name, v) in [
            ("profile.delta0", p.delta0),
            ("profile.mu0", p.mu0),
            ("profile.x1", p.x1),
            ("profile.x2", p.x2),
            ("profile.lead_half_length", p.lead_half_length),
        ] {
            if !v.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        if !(p.delta0 > 0.0) {
            return Err(invalid("profile.delta0", "must be positive"));
        }
        if !(p.lead_half_length > 0.0) {
            return Err(invalid("profile.lead_half_length", "must be positive"));
        }
        let es = match self.units.energy {
            EnergyUnit::Absolute => 1.0,
            EnergyUnit::Delta0 => p.delta0,
        };
        let ls = match self.units.length {
            LengthUnit::Absolute => 1.0,
            LengthUnit::LeadHalfLength => p.lead_half_length,
        };
        let delta0 = p.delta0;
        let mu0 = p.mu0 * es;
        let (x1, x2, l) = (p.x1 * ls, p.x2 * ls, p.lead_half_length);

        if self.h_list.is_empty() {
            return Err(invalid("h_list", "must not be empty"));
        }
        for (i, &h) in self.h_list.iter().enumerate() {
            if !(h > 0.0 && h.is_finite()) {
                return Err(invalid(format!("h_list[{i}]"), format!("h must be positive, got {h}")));
            }
        }
        if self.phi_list.is_empty() {
            return Err(invalid("phi_list", "must not be empty"));
        }
        for (i, phi) in self.phi_list.iter().enumerate() {
            if !phi.is_finite() {
                return Err(invalid(format!("phi_list[{i}]"), "must be finite"));
            }
        }
        let window = (self.window[0] * es, self.window[1] * es);
        if !(window.0 >= 0.0 && window.0 < window.1 && window.1 <= delta0) {
            return Err(invalid(
                "window",
                format!("must satisfy 0 <= lo < hi <= delta0, got {:?}", self.window),
            ));
        }
        if self.grid.n < MIN_POINTS {
            return Err(invalid(
                "grid.n",
                format!("must be at least {MIN_POINTS}, got {}", self.grid.n),
            ));
        }
        let half_width = self.grid.half_width * ls;
        if !(half_width > x2) {
            return Err(invalid("grid.half_width", "must exceed profile.x2"));
        }
        let x_scale_start = self.grid.x_scale_start.map(|x| x * ls);
        if let Some(xs) = x_scale_start {
            if !(xs >= x2 && xs < half_width) {
                return Err(invalid("grid.x_scale_start", "must lie in [x2, half_width)"));
            }
        }
        for (i, &t) in self.theta_list.iter().enumerate() {
            if !(0.05..=0.3).contains(&t) {
                return Err(invalid(
                    format!("theta_list[{i}]"),
                    format!("must lie in [0.05, 0.3], got {t}"),
                ));
            }
        }
        if self.solvers.resonances && self.theta_list.is_empty() {
            return Err(invalid("theta_list", "must not be empty when resonances are enabled"));
        }
        if !(self.dphi > 0.0 && self.dphi < 0.1) {
            return Err(invalid("dphi", "must lie in (0, 0.1)"));
        }
        for (name, t) in [("tol_root", self.tol_root), ("tol_quad", self.tol_quad)] {
            if let Some(t) = t {
                if !(t > 0.0) {
                    return Err(invalid(name, "must be positive"));
                }
            }
        }
        if !(self.table_d.points >= 2) {
            return Err(invalid("table_d.points", "need at least 2 points"));
        }
        if !(self.table_d.z_min < self.table_d.z_max) {
            return Err(invalid("table_d.z_max", "must exceed z_min"));
        }
        let reference_energy = self.reference_energy.map(|e| e * es).unwrap_or(0.5 * delta0);
        if !(reference_energy > 0.0 && reference_energy < delta0) {
            return Err(invalid("reference_energy", "must lie inside (0, delta0)"));
        }

        let r = Resolved {
            config: self.clone(),
            energy_scale: es,
            length_scale: ls,
            delta0,
            mu0,
            x1,
            x2,
            lead_half_length: l,
            window,
            half_width,
            x_scale_start,
            reference_energy,
        };
        r.profile(0.0)?;
        Ok(r)
    }
}

impl Resolved {
    pub fn profile(&self, phi: f64) -> Result<JunctionProfile, ConfigError> {
        let built = match self.config.profile.ramp_shape {
            RampShape::HardWall => JunctionProfile::hard_wall(self.delta0, self.mu0, phi, self.lead_half_length),
            shape => JunctionProfile::new(
                self.delta0,
                self.mu0,
                phi,
                self.x1,
                self.x2,
                self.lead_half_length,
                shape,
            ),
        };
        built.map_err(|e| invalid("profile", e.to_string()))
    }

    pub fn params(&self, profile: &JunctionProfile, h: f64) -> Result<SemiclassicalParams, ConfigError> {
        SemiclassicalParams::with_tolerances(
            profile,
            h,
            self.window,
            self.config.tol_root.unwrap_or(SemiclassicalParams::DEFAULT_TOL_ROOT),
            self.config.tol_quad.unwrap_or(SemiclassicalParams::DEFAULT_TOL_QUAD),
        )
        .map_err(|e| invalid("window", e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const MINIMAL: &str = r#"{
        "units": {"energy": "delta0", "length": "lead_half_length"},
        "profile": {"delta0": 1.0, "mu0": 4.0, "x1": 0.5, "x2": 1.5, "lead_half_length": 1.0},
        "h_list": [0.05],
        "phi_list": [0.5],
        "window": [0.0, 1.0]
    }"#;

    fn with(field: &str, value: &str) -> String {
        let mut v: serde_json::Value = serde_json::from_str(MINIMAL).unwrap();
        let mut target = &mut v;
        let parts: Vec<&str> = field.split('.').collect();
        for p in &parts[..parts.len() - 1] {
            target = target.get_mut(*p).unwrap();
        }
        target[parts[parts.len() - 1]] = serde_json::from_str(value).unwrap();
        v.to_string()
    }

    fn field_of(err: ConfigError) -> String {
        match err {
            ConfigError::Invalid { field, .. } => field,
            other => panic!("expected validation error, got {other}"),
        }
    }

    #[test]
    fn minimal_config_resolves() {
        let r = RunConfig::from_json(MINIMAL).unwrap().resolve().unwrap();
        assert_eq!(r.window, (0.0, 1.0));
        assert_eq!(r.config.grid.n, 4000);
        assert!(r.config.solvers.bohr_sommerfeld);
        assert_eq!(r.reference_energy, 0.5);
    }

    #[test]
    fn units_rescale_inputs() {
        let text = with("profile.delta0", "2.0");
        let text = text.replace("\"lead_half_length\":1.0", "\"lead_half_length\":2.0");
        let r = RunConfig::from_json(&text).unwrap().resolve().unwrap();
        assert_eq!(r.mu0, 8.0);
        assert_eq!(r.window, (0.0, 2.0));
        assert_eq!((r.x1, r.x2), (1.0, 3.0));
        assert_eq!(r.half_width, 6.0);
    }

    #[test]
    fn validation_names_the_field() {
        let cases = [
            ("h_list", "[0.05, -0.1]", "h_list[1]"),
            ("h_list", "[]", "h_list"),
            ("phi_list", "[]", "phi_list"),
            ("window", "[0.5, 0.2]", "window"),
            ("grid", r#"{"half_width": 3.0, "n": 100}"#, "grid.n"),
            ("grid", r#"{"half_width": 1.0, "n": 600}"#, "grid.half_width"),
            ("theta_list", "[0.5]", "theta_list[0]"),
            ("profile.mu0", "0.5", "profile"),
            ("profile.delta0", "-1.0", "profile.delta0"),
        ];
        for (field, value, expected) in cases {
            let cfg = RunConfig::from_json(&with(field, value)).unwrap();
            assert_eq!(field_of(cfg.resolve().unwrap_err()), expected, "{field} = {value}");
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = with("profile.delta0", "1.0").replace("\"h_list\"", "\"h_lst\":[1],\"h_list\"");
        assert!(matches!(RunConfig::from_json(&text), Err(ConfigError::Parse(_))));
    }
}
