//! JSON run and sweep configurations. Parsing is strict — unknown keys are
//! errors — and resolution fills omitted sections from the named model's
//! customary parameters before validating everything against the module
//! constructors.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::models::{
    self, LinearParams, ModelBundle, ModelInstance, NetworkParams, ScalarParams,
};
use crate::trigger::{DelaySpec, TriggerConfig};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    #[serde(default)]
    pub trigger: Option<TriggerSection>,
    #[serde(default)]
    pub delay: Option<DelaySection>,
    #[serde(default)]
    pub x0: Option<Vec<f64>>,
    #[serde(default)]
    pub horizon: Option<usize>,
    #[serde(default)]
    pub outputs: OutputsSection,
    #[serde(default)]
    pub flags: FlagsSection,
    #[serde(default)]
    pub certify: CertifySection,
}

/// Exactly one of `name`, `scalar`, `linear`, `network` selects the model;
/// `overrides` is only meaningful next to `name`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub overrides: Option<OverridesSection>,
    #[serde(default)]
    pub scalar: Option<ScalarSection>,
    #[serde(default)]
    pub linear: Option<MatrixSection>,
    #[serde(default)]
    pub network: Option<NetworkSection>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverridesSection {
    #[serde(default)]
    pub k_gain: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarSection {
    pub a1: f64,
    pub a2: f64,
    pub b_in: f64,
    pub k_gain: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSection {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub k: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    pub c_diag: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub k: Vec<Vec<f64>>,
    pub l_diag: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriggerSection {
    pub a: f64,
    pub b: f64,
    pub delta: usize,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DelaySection {
    pub gamma: usize,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsSection {
    #[serde(default)]
    pub trajectory_csv: Option<String>,
    #[serde(default)]
    pub report: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlagsSection {
    #[serde(default)]
    pub allow_v0_above_a: bool,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifySection {
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_region_radius")]
    pub region_radius: f64,
    #[serde(default = "default_sample_count")]
    pub sample_count: usize,
}

fn default_epsilon() -> f64 {
    1.0
}

fn default_region_radius() -> f64 {
    1.0
}

fn default_sample_count() -> usize {
    4096
}

impl Default for CertifySection {
    fn default() -> Self {
        CertifySection {
            epsilon: default_epsilon(),
            region_radius: default_region_radius(),
            sample_count: default_sample_count(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub model: ModelSpec,
    #[serde(default)]
    pub base: SweepBase,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub output_csv: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBase {
    #[serde(default)]
    pub trigger: Option<TriggerSection>,
    #[serde(default)]
    pub delay: Option<DelaySection>,
    #[serde(default)]
    pub x0: Option<Vec<f64>>,
    #[serde(default)]
    pub horizon: Option<usize>,
    #[serde(default)]
    pub flags: FlagsSection,
}

/// Grid axes; an absent axis degenerates to the base value, an explicitly
/// empty axis empties the whole grid.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default)]
    pub a: Option<Vec<f64>>,
    #[serde(default)]
    pub b: Option<Vec<f64>>,
    #[serde(default)]
    pub delta: Option<Vec<usize>>,
    #[serde(default)]
    pub gamma: Option<Vec<usize>>,
    #[serde(default)]
    pub k_gain: Option<Vec<f64>>,
}

pub fn parse_run_config(text: &str) -> Result<RunConfig> {
    serde_json::from_str(text).map_err(|e| Error::Config(format!("config parse error: {e}")))
}

pub fn load_run_config(path: &Path) -> Result<RunConfig> {
    parse_run_config(&std::fs::read_to_string(path)?)
}

pub fn parse_sweep_config(text: &str) -> Result<SweepConfig> {
    serde_json::from_str(text).map_err(|e| Error::Config(format!("config parse error: {e}")))
}

pub fn load_sweep_config(path: &Path) -> Result<SweepConfig> {
    parse_sweep_config(&std::fs::read_to_string(path)?)
}

impl ModelSpec {
    fn check_shape(&self) -> Result<()> {
        let sources = [
            self.name.is_some(),
            self.scalar.is_some(),
            self.linear.is_some(),
            self.network.is_some(),
        ]
        .iter()
        .filter(|p| **p)
        .count();
        if sources != 1 {
            return Err(Error::Config(
                "model must specify exactly one of: name, scalar, linear, network".into(),
            ));
        }
        if self.overrides.is_some() && self.name.is_none() {
            return Err(Error::Config(
                "model overrides apply to named models only".into(),
            ));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        match (&self.name, &self.scalar, &self.linear, &self.network) {
            (Some(name), ..) => name.clone(),
            (_, Some(_), ..) => "inline-scalar".into(),
            (_, _, Some(_), _) => "inline-linear".into(),
            _ => "inline-network".into(),
        }
    }

    pub fn instantiate(&self, delay: &DelaySpec) -> Result<ModelInstance> {
        self.check_shape()?;
        if let Some(name) = &self.name {
            let k_gain = self.overrides.and_then(|o| o.k_gain);
            return models::named_instance(name, delay, k_gain);
        }
        if let Some(s) = &self.scalar {
            return Ok(ModelInstance::Scalar(ScalarParams {
                a1: s.a1,
                a2: s.a2,
                b_in: s.b_in,
                k_gain: s.k_gain,
            }));
        }
        if let Some(l) = &self.linear {
            return Ok(ModelInstance::Linear(LinearParams {
                a: to_matrix(&l.a, "A")?,
                b: to_matrix(&l.b, "B")?,
                k: to_matrix(&l.k, "K")?,
            }));
        }
        let n = self.network.as_ref().expect("shape checked above");
        Ok(ModelInstance::Network(NetworkParams {
            c_diag: to_vector(&n.c_diag, "c_diag")?,
            a: to_matrix(&n.a, "A")?,
            b: to_matrix(&n.b, "B")?,
            k: to_matrix(&n.k, "K")?,
            l_diag: to_vector(&n.l_diag, "l_diag")?,
        }))
    }
}

fn to_matrix(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    if rows.is_empty() || rows[0].is_empty() {
        return Err(Error::Config(format!("matrix {what} must be nonempty")));
    }
    let ncols = rows[0].len();
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Config(format!(
            "matrix {what} has ragged rows (expected {ncols} columns in every row)"
        )));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Config(format!(
            "matrix {what} contains a non-finite entry"
        )));
    }
    Ok(DMatrix::from_row_iterator(
        rows.len(),
        ncols,
        rows.iter().flatten().cloned(),
    ))
}

fn to_vector(entries: &[f64], what: &str) -> Result<DVector<f64>> {
    if entries.is_empty() {
        return Err(Error::Config(format!("vector {what} must be nonempty")));
    }
    if entries.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config(format!(
            "vector {what} contains a non-finite entry"
        )));
    }
    Ok(DVector::from_vec(entries.to_vec()))
}

/// A run configuration with every blank filled and every invariant checked.
#[derive(Debug, Clone)]
pub struct ResolvedRun {
    pub label: String,
    pub instance: ModelInstance,
    pub bundle: ModelBundle,
    pub trigger: TriggerConfig,
    pub delay: DelaySpec,
    pub x0: DVector<f64>,
    pub horizon: usize,
    pub allow_v0_above_a: bool,
    pub outputs: OutputsSection,
    pub certify: CertifySection,
}

impl RunConfig {
    pub fn resolve(&self) -> Result<ResolvedRun> {
        self.model.check_shape()?;
        let defaults = self
            .model
            .name
            .as_deref()
            .map(models::defaults)
            .transpose()?;
        let gamma = self
            .delay
            .map(|d| d.gamma)
            .or(defaults.as_ref().map(|d| d.gamma))
            .ok_or_else(|| {
                Error::Config("inline models need an explicit delay section".into())
            })?;
        let delay = DelaySpec::new(gamma);
        let instance = self.model.instantiate(&delay)?;
        let bundle = instance.build(&delay)?;
        let trig = self
            .trigger
            .or(defaults.as_ref().map(|d| TriggerSection {
                a: d.a,
                b: d.b,
                delta: d.delta,
            }))
            .ok_or_else(|| {
                Error::Config("inline models need an explicit trigger section".into())
            })?;
        let trigger = TriggerConfig::new(trig.a, trig.b, trig.delta)?;
        let x0_raw = self
            .x0
            .clone()
            .or(defaults.as_ref().map(|d| d.x0.clone()))
            .ok_or_else(|| Error::Config("inline models need an explicit x0".into()))?;
        let x0 = to_vector(&x0_raw, "x0")?;
        if x0.len() != bundle.system.state_dim() {
            return Err(Error::Config(format!(
                "x0 has {} entries but the model has {} states",
                x0.len(),
                bundle.system.state_dim()
            )));
        }
        let horizon = self
            .horizon
            .or(defaults.as_ref().map(|d| d.horizon))
            .ok_or_else(|| Error::Config("inline models need an explicit horizon".into()))?;
        Ok(ResolvedRun {
            label: self.model.label(),
            instance,
            bundle,
            trigger,
            delay,
            x0,
            horizon,
            allow_v0_above_a: self.flags.allow_v0_above_a,
            outputs: self.outputs.clone(),
            certify: self.certify,
        })
    }
}

/// One sweep grid point. `k_gain` is `None` when the axis is absent (the
/// model keeps its own gain); `knob` is the value reported in the CSV.
#[derive(Debug, Clone, Copy)]
pub struct SweepCell {
    pub a: f64,
    pub b: f64,
    pub delta: usize,
    pub gamma: usize,
    pub k_gain: Option<f64>,
    pub knob: f64,
}

#[derive(Debug, Clone)]
pub struct ResolvedSweep {
    pub label: String,
    pub spec: ModelSpec,
    pub x0: Vec<f64>,
    pub horizon: usize,
    pub allow_v0_above_a: bool,
    pub cells: Vec<SweepCell>,
    pub output_csv: Option<String>,
}

impl SweepConfig {
    /// Expands the grid in lexicographic order (a, then b, then delta, then
    /// gamma, then k_gain, each axis in its listed order). Per-cell
    /// validity is deliberately not checked here — failing cells become
    /// tagged rows downstream.
    pub fn resolve(&self) -> Result<ResolvedSweep> {
        self.model.check_shape()?;
        let defaults = self
            .model
            .name
            .as_deref()
            .map(models::defaults)
            .transpose()?;
        let trig = self
            .base
            .trigger
            .or(defaults.as_ref().map(|d| TriggerSection {
                a: d.a,
                b: d.b,
                delta: d.delta,
            }))
            .ok_or_else(|| {
                Error::Config("inline models need an explicit base.trigger section".into())
            })?;
        let gamma0 = self
            .base
            .delay
            .map(|d| d.gamma)
            .or(defaults.as_ref().map(|d| d.gamma))
            .ok_or_else(|| {
                Error::Config("inline models need an explicit base.delay section".into())
            })?;
        let x0 = self
            .base
            .x0
            .clone()
            .or(defaults.as_ref().map(|d| d.x0.clone()))
            .ok_or_else(|| Error::Config("inline models need an explicit base.x0".into()))?;
        let horizon = self
            .base
            .horizon
            .or(defaults.as_ref().map(|d| d.horizon))
            .ok_or_else(|| {
                Error::Config("inline models need an explicit base.horizon".into())
            })?;

        let natural_knob = self
            .model
            .instantiate(&DelaySpec::new(gamma0))
            .map(|inst| inst.gain_knob())
            .unwrap_or(f64::NAN);

        let a_axis = self.grid.a.clone().unwrap_or_else(|| vec![trig.a]);
        let b_axis = self.grid.b.clone().unwrap_or_else(|| vec![trig.b]);
        let delta_axis = self.grid.delta.clone().unwrap_or_else(|| vec![trig.delta]);
        let gamma_axis = self.grid.gamma.clone().unwrap_or_else(|| vec![gamma0]);
        let k_axis: Vec<Option<f64>> = match &self.grid.k_gain {
            Some(vals) => vals.iter().map(|v| Some(*v)).collect(),
            None => vec![None],
        };

        let mut cells = Vec::new();
        for &a in &a_axis {
            for &b in &b_axis {
                for &delta in &delta_axis {
                    for &gamma in &gamma_axis {
                        for &k_gain in &k_axis {
                            cells.push(SweepCell {
                                a,
                                b,
                                delta,
                                gamma,
                                k_gain,
                                knob: k_gain.unwrap_or(natural_knob),
                            });
                        }
                    }
                }
            }
        }
        Ok(ResolvedSweep {
            label: self.model.label(),
            spec: self.model.clone(),
            x0,
            horizon,
            allow_v0_above_a: self.base.flags.allow_v0_above_a,
            cells,
            output_csv: self.output_csv.clone(),
        })
    }
}
