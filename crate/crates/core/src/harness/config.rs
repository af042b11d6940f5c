//! Run configuration: group selection (preset or explicit roots),
//! multiplicity values, arithmetic mode, and optional quadrature
//! parameters, loaded from JSON.

use serde::{Deserialize, Serialize};

use crate::dunkl::DunklContext;
use crate::error::{DunklError, Result};
use crate::pairing::QuadSpec;
use crate::poly::Vector;
use crate::reflection::{GroupPreset, MultiplicityFunction, ReflectionGroup, RootSystem};
use crate::scalar::Scalar;

/// Top-level configuration accepted by the CLI and the suites.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Config {
    pub group: GroupConfig,
    pub multiplicity: MultiplicityConfig,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad: Option<QuadConfig>,
}

/// Either a named preset (`{"preset": "B", "N": 2}`) or explicit positive
/// root representatives (`{"positive_roots": [[1,0],[0,1],...]}`).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupConfig {
    Preset {
        preset: String,
        #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m: Option<usize>,
    },
    Roots {
        positive_roots: Vec<Vec<ScalarLiteral>>,
    },
}

/// One multiplicity value per root orbit, in orbit order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MultiplicityConfig {
    pub orbit_values: Vec<ScalarLiteral>,
}

/// Arithmetic mode for the run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    Float,
}

/// Optional quadrature overrides; missing fields fall back to the
/// defaults of [`QuadSpec`].
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct QuadConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes_per_axis: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius_cutoff: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl QuadConfig {
    pub fn to_spec(&self) -> QuadSpec {
        let base = QuadSpec::default();
        QuadSpec {
            nodes_per_axis: self.nodes_per_axis.unwrap_or(base.nodes_per_axis),
            radius_cutoff: self.radius_cutoff.unwrap_or(base.radius_cutoff),
            tolerance: self.tolerance.unwrap_or(base.tolerance),
        }
    }
}

/// A number in a config file: integer, float, or a string scalar literal
/// such as `"5/2"`. Exact mode rejects non-integral floats — spell them
/// as fraction strings so nothing is silently rounded.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarLiteral {
    Int(i64),
    Float(f64),
    Text(String),
}

impl ScalarLiteral {
    pub fn to_scalar<S: Scalar>(&self) -> Result<S> {
        match self {
            ScalarLiteral::Int(v) => Ok(S::from_i64(*v)),
            ScalarLiteral::Float(v) => {
                if v.fract() == 0.0 && v.abs() < 9e15 {
                    Ok(S::from_i64(*v as i64))
                } else if S::IS_EXACT {
                    Err(DunklError::Parse(format!(
                        "non-integral float {v} in exact mode; write it as a fraction string like \"1/2\""
                    )))
                } else {
                    S::parse(&format!("{v}"))
                }
            }
            ScalarLiteral::Text(s) => S::parse(s),
        }
    }
}

impl Config {
    pub fn from_json(text: &str) -> Result<Config> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Config> {
        Config::from_json(&std::fs::read_to_string(path)?)
    }

    /// Resolve the group section to a root system.
    pub fn root_system<S: Scalar>(&self) -> Result<RootSystem<S>> {
        match &self.group {
            GroupConfig::Preset { preset, n, m } => {
                let preset = parse_preset(preset, *n, *m)?;
                preset.root_system()
            }
            GroupConfig::Roots { positive_roots } => {
                if positive_roots.is_empty() {
                    return Err(DunklError::InvalidRootSystem(
                        "positive_roots must be nonempty".into(),
                    ));
                }
                let nvars = positive_roots[0].len();
                let roots = positive_roots
                    .iter()
                    .map(|row| {
                        let coords: Result<Vec<S>> =
                            row.iter().map(|v| v.to_scalar::<S>()).collect();
                        Ok(Vector(coords?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                RootSystem::new(nvars, roots)
            }
        }
    }

    pub fn multiplicity_values<S: Scalar>(&self) -> Result<Vec<S>> {
        self.multiplicity
            .orbit_values
            .iter()
            .map(|v| v.to_scalar::<S>())
            .collect()
    }

    /// Build the full operator context in the scalar type `S`.
    pub fn build_context<S: Scalar>(&self, n_max: usize) -> Result<DunklContext<S>> {
        let rs = self.root_system::<S>()?;
        let mult = MultiplicityFunction::new(&rs, self.multiplicity_values()?)?;
        let group = ReflectionGroup::build(rs)?;
        DunklContext::new(group, mult, n_max)
    }

    /// Quadrature parameters (configured or default).
    pub fn quad_spec(&self) -> QuadSpec {
        self.quad
            .as_ref()
            .map(QuadConfig::to_spec)
            .unwrap_or_default()
    }
}

fn parse_preset(name: &str, n: Option<usize>, m: Option<usize>) -> Result<GroupPreset> {
    let need_n = || {
        n.ok_or_else(|| {
            DunklError::InvalidArgument(format!("preset {name:?} requires the field \"N\""))
        })
    };
    match name.to_ascii_uppercase().as_str() {
        "Z2" | "Z2^N" => Ok(GroupPreset::Z2 { n: need_n()? }),
        "A" => Ok(GroupPreset::A { n: need_n()? }),
        "B" => Ok(GroupPreset::B { n: need_n()? }),
        "D" => Ok(GroupPreset::D { n: need_n()? }),
        "I2" => {
            let m = m.or(n).ok_or_else(|| {
                DunklError::InvalidArgument("preset \"I2\" requires the field \"m\"".into())
            })?;
            Ok(GroupPreset::I2 { m })
        }
        other => Err(DunklError::InvalidArgument(format!(
            "unknown group preset {other:?} (expected Z2, A, B, D, or I2)"
        ))),
    }
}
