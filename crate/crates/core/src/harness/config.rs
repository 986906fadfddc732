//! Declarative run configuration (TOML) with `key=value` overrides.

use super::solve::Problem;
use crate::ddg::{QuadraturePolicy, SchemeConfig, Variant};
use crate::error::{Error, Result};
use crate::limiter::LimiterConfig;
use crate::mesh::DiagonalPattern;
use crate::models::{DiffusionModel, ModelName};
use crate::timestep::{CflMode, DiffusionScale, TimeConfig};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub name: String,
    pub mu: f64,
    /// Porous-medium exponent.
    pub exponent: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            name: "heat".into(),
            mu: 0.01,
            exponent: 3.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SchemeSection {
    pub variant: String,
    pub degree: usize,
    pub beta0: Option<f64>,
    pub beta0v: Option<f64>,
    pub beta1: Option<f64>,
}

impl Default for SchemeSection {
    fn default() -> Self {
        Self {
            variant: "ddgic".into(),
            degree: 2,
            beta0: None,
            beta0v: None,
            beta1: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeshSection {
    pub levels: Vec<usize>,
    pub pattern: DiagonalPattern,
}

impl Default for MeshSection {
    fn default() -> Self {
        Self {
            levels: vec![5, 10, 20],
            pattern: DiagonalPattern::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeSection {
    pub cfl: f64,
    pub final_time: f64,
    pub mode: CflMode,
    pub scale: DiffusionScale,
    pub safety: f64,
    pub restart: bool,
    pub dt_floor: f64,
    pub max_steps: usize,
}

impl Default for TimeSection {
    fn default() -> Self {
        let t = TimeConfig::<f64>::new(0.1, 1.0);
        Self {
            cfl: t.cfl,
            final_time: t.final_time,
            mode: t.mode,
            scale: t.scale,
            safety: t.safety,
            restart: t.restart,
            dt_floor: t.dt_floor,
            max_steps: t.max_steps,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSection {
    /// Volume/edge exactness; defaults to `2k+1`, or `4k+1` for strongly
    /// nonlinear models.
    pub volume: Option<usize>,
    pub edge: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LimiterSection {
    /// `auto` follows the model's bounds; `on` and `off` force it.
    pub mode: String,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl Default for LimiterSection {
    fn default() -> Self {
        Self {
            mode: "auto".into(),
            lower: None,
            upper: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    /// Sub-triangle subdivisions per element edge in field exports.
    pub resolution: usize,
    pub vtk: bool,
    /// Exactness of the `L²` error rule; defaults to `2k+1`.
    pub l2_exactness: Option<usize>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("output"),
            resolution: 3,
            vtk: true,
            l2_exactness: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub model: ModelSection,
    pub scheme: SchemeSection,
    pub mesh: MeshSection,
    pub time: TimeSection,
    pub quadrature: QuadratureSection,
    pub limiter: LimiterSection,
    pub output: OutputSection,
    pub seed: u64,
}

fn parse_value(raw: &str) -> toml::Value {
    let wrapped = format!("v = {raw}");
    match wrapped.parse::<toml::Table>() {
        Ok(mut t) => t
            .remove("v")
            .unwrap_or_else(|| toml::Value::String(raw.into())),
        Err(_) => toml::Value::String(raw.into()),
    }
}

/// Sets `a.b.c = value` in `table`, creating intermediate tables.
fn set_path(table: &mut toml::Table, key: &str, value: toml::Value) -> Result<()> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts
        .pop()
        .filter(|s| !s.is_empty())
        .ok_or_else(|| Error::Config(format!("empty key in `{key}`")))?;
    let mut cur = table;
    for p in parts {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(Default::default()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("`{p}` in `{key}` is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

impl RunConfig {
    /// Parses TOML text and applies `key=value` overrides in order.
    pub fn from_toml_with_overrides(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(|e| Error::Config(format!("{e}")))?;
        for o in overrides {
            let (k, v) = o.split_once('=').ok_or_else(|| {
                Error::Config(format!("override `{o}` is not of the form key=value"))
            })?;
            set_path(&mut table, k.trim(), parse_value(v.trim()))?;
        }
        let config: RunConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?,
            None => String::new(),
        };
        Self::from_toml_with_overrides(&text, overrides)
    }

    /// The configuration as TOML, for echoing into outputs.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configuration always serialises")
    }

    pub fn validate(&self) -> Result<()> {
        self.model_name()?;
        self.variant()?;
        if self.scheme.degree > crate::basis::MAX_DEGREE {
            return Err(Error::UnsupportedDegree(self.scheme.degree));
        }
        if self.mesh.levels.is_empty() || self.mesh.levels.contains(&0) {
            return Err(Error::Config(
                "mesh.levels must list positive cells-per-side counts".into(),
            ));
        }
        if !["auto", "on", "off"].contains(&self.limiter.mode.as_str()) {
            return Err(Error::Config(format!(
                "limiter.mode must be auto, on or off (got `{}`)",
                self.limiter.mode
            )));
        }
        if self.output.resolution == 0 {
            return Err(Error::Config("output.resolution must be at least 1".into()));
        }
        self.time_config().validate()
    }

    pub fn model_name(&self) -> Result<ModelName> {
        self.model.name.parse().map_err(Error::Config)
    }

    pub fn variant(&self) -> Result<Variant> {
        self.scheme.variant.parse().map_err(Error::Config)
    }

    pub fn build_model(&self) -> Result<DiffusionModel<f64>> {
        Ok(self.model_name()?.build(self.model.mu, self.model.exponent))
    }

    pub fn scheme_config(&self) -> Result<SchemeConfig<f64>> {
        let mut s = SchemeConfig::with_defaults(self.variant()?, self.scheme.degree);
        if let Some(b) = self.scheme.beta0 {
            s.beta0 = b;
            s.beta0v = b * 0.5;
        }
        if let Some(b) = self.scheme.beta0v {
            s.beta0v = b;
        }
        if let Some(b) = self.scheme.beta1 {
            s.beta1 = b;
        }
        Ok(s)
    }

    pub fn quadrature_policy(&self, model: &DiffusionModel<f64>) -> QuadraturePolicy {
        let base = QuadraturePolicy::for_model(model, self.scheme.degree);
        QuadraturePolicy {
            volume: self.quadrature.volume.unwrap_or(base.volume),
            edge: self.quadrature.edge.unwrap_or(base.edge),
        }
    }

    pub fn time_config(&self) -> TimeConfig<f64> {
        let t = &self.time;
        TimeConfig {
            cfl: t.cfl,
            final_time: t.final_time,
            mode: t.mode,
            scale: t.scale,
            safety: t.safety,
            restart: t.restart,
            dt_floor: t.dt_floor,
            max_steps: t.max_steps,
        }
    }

    pub fn limiter_config(
        &self,
        model: &DiffusionModel<f64>,
    ) -> Result<Option<LimiterConfig<f64>>> {
        let bounds = match self.limiter.mode.as_str() {
            "off" => return Ok(None),
            "on" => Some(
                model
                    .solution_bounds
                    .unwrap_or((f64::NEG_INFINITY, f64::INFINITY)),
            ),
            _ => model.solution_bounds,
        };
        bounds
            .map(|(lo, hi)| {
                LimiterConfig::new(
                    self.limiter.lower.unwrap_or(lo),
                    self.limiter.upper.unwrap_or(hi),
                )
            })
            .transpose()
    }

    /// The problem on the mesh with `n_per_side` cells per side.
    pub fn problem(&self, n_per_side: usize) -> Result<Problem<f64>> {
        let model = self.build_model()?;
        Ok(Problem {
            scheme: self.scheme_config()?,
            n_per_side,
            pattern: self.mesh.pattern,
            quadrature: self.quadrature_policy(&model),
            time: self.time_config(),
            limiter: self.limiter_config(&model)?,
            model,
        })
    }

    pub fn l2_exactness(&self) -> usize {
        self.output
            .l2_exactness
            .unwrap_or(2 * self.scheme.degree + 1)
    }

    /// Configuration for one of the example problems, with the parameters
    /// the examples are usually run with.
    pub fn preset(name: ModelName) -> Self {
        let mut c = RunConfig::default();
        c.model.name = name.as_str().into();
        match name {
            ModelName::Bumps => {
                c.model.mu = 1.0;
                c.model.exponent = 2.0;
                c.time.final_time = 4.0;
                c.scheme.variant = "symmetric".into();
                c.mesh.levels = vec![20];
            }
            ModelName::Block => {
                c.model.mu = 1.0;
                c.model.exponent = 2.0;
                c.time.final_time = 0.005;
                c.mesh.levels = vec![20];
            }
            ModelName::Blowup => {
                c.model.mu = 1.0;
                c.time.cfl = 0.01;
                c.time.final_time = 1.0;
                c.time.mode = CflMode::Blowup;
                c.time.scale = DiffusionScale::Nominal;
                c.time.restart = true;
                c.mesh.levels = vec![16];
                c.quadrature.volume = Some(2 * c.scheme.degree + 1);
                c.quadrature.edge = Some(2 * c.scheme.degree + 1);
            }
            _ => {}
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = RunConfig::from_toml_with_overrides("", &[]).unwrap();
        assert_eq!(c, RunConfig::default());
        let again = RunConfig::from_toml_with_overrides(&c.to_toml(), &[]).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn file_and_overrides() {
        let text = r#"
            seed = 4
            [model]
            name = "anisotropic"
            [scheme]
            variant = "nonsymmetric"
            degree = 3
            [mesh]
            levels = [5, 10]
        "#;
        let over = vec![
            "time.cfl=0.05".to_string(),
            "mesh.levels=[4, 8, 16]".to_string(),
            "scheme.variant=symmetric".to_string(),
            "mesh.pattern=alternating".to_string(),
        ];
        let c = RunConfig::from_toml_with_overrides(text, &over).unwrap();
        assert_eq!(c.model.name, "anisotropic");
        assert_eq!(c.scheme.degree, 3);
        assert_eq!(c.time.cfl, 0.05);
        assert_eq!(c.mesh.levels, vec![4, 8, 16]);
        assert_eq!(c.variant().unwrap(), Variant::Symmetric);
        assert_eq!(c.mesh.pattern, DiagonalPattern::Alternating);
        assert_eq!(c.seed, 4);
    }

    #[test]
    fn rejects_bad_input() {
        for over in [
            "model.name=maxwell",
            "scheme.variant=sipg",
            "scheme.degree=7",
            "mesh.levels=[]",
            "limiter.mode=sometimes",
        ] {
            assert!(
                RunConfig::from_toml_with_overrides("", &[over.to_string()]).is_err(),
                "{over}"
            );
        }
        assert!(RunConfig::from_toml_with_overrides("[model]\nnmae = 1", &[]).is_err());
        assert!(RunConfig::from_toml_with_overrides("", &["nokey".into()]).is_err());
        assert!(RunConfig::from_toml_with_overrides("", &["time.cfl=-1".into()]).is_err());
    }

    #[test]
    fn derived_settings() {
        let c = RunConfig::preset(ModelName::PorousManufactured);
        let m = c.build_model().unwrap();
        assert_eq!(c.quadrature_policy(&m), QuadraturePolicy::rich(2));
        assert_eq!(c.limiter_config(&m).unwrap(), None);

        let b = RunConfig::preset(ModelName::Block);
        let m = b.build_model().unwrap();
        assert_eq!(
            b.limiter_config(&m).unwrap(),
            Some(LimiterConfig::new(0.0, 1.0).unwrap())
        );

        let mut s = RunConfig::default();
        s.scheme.beta0 = Some(16.0);
        let sc = s.scheme_config().unwrap();
        assert_eq!((sc.beta0, sc.beta0v), (16.0, 8.0));
        assert_eq!(s.l2_exactness(), 5);
    }
}
