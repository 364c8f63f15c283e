//! JSON problem files.
//!
//! ```json
//! {"mode": "vortex", "preset": "taubes", "vortices": [{"vertex": 17, "n": 1}],
//!  "boundary": "dirichlet_zero", "scale": 1.0}
//! ```
//!
//! Mapping mode takes `source_geometry`, `target_geometry`, `theta_targets`
//! and `pinned` (objects keyed by vertex index), and optionally explicit
//! edge `lengths` keyed by `"i,j"`, a start point `u0`, `scale` and `gauge`.
//! Vertices listed in neither map keep their source cone angle.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::energy::{MappingProblem, ProblemError, ScaleFactors};
use crate::geometry::{DiscreteMetric, Geometry, GeometryError};
use crate::mesh::EmbeddedMesh;
use crate::solver::Gauge;
use crate::vortex::{BoundaryCondition, VortexCenter, VortexConstants, VortexError, VortexKind, VortexSpec};

#[derive(Debug, Error)]
pub enum ProblemFileError {
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("give exactly one of `preset` and `constants`")]
    ConstantsConflict,
    #[error("bad edge key `{0}`, expected \"i,j\"")]
    BadEdgeKey(String),
    #[error("edge {0}-{1} is not an edge of the mesh")]
    UnknownEdge(usize, usize),
    #[error("no length given for edge {0}-{1}")]
    MissingLength(usize, usize),
    #[error("u0 has {found} entries, mesh has {expected} vertices")]
    U0Length { expected: usize, found: usize },
    #[error("scale must be positive and finite, got {0}")]
    InvalidScale(f64),
    #[error(transparent)]
    Vortex(#[from] VortexError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn one() -> f64 {
    1.0
}

fn is_one(x: &f64) -> bool {
    *x == 1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VortexInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<VortexKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<VortexConstants>,
    pub vortices: Vec<VortexCenter>,
    #[serde(default)]
    pub boundary: BoundaryCondition,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub scale: f64,
}

impl VortexInput {
    pub fn to_spec(&self) -> Result<VortexSpec, ProblemFileError> {
        let constants = match (self.preset, self.constants) {
            (Some(k), None) => k.constants(),
            (None, Some(c)) => {
                c.validate()?;
                c
            }
            _ => return Err(ProblemFileError::ConstantsConflict),
        };
        Ok(VortexSpec {
            constants,
            vortices: self.vortices.clone(),
            boundary: self.boundary,
            length_scale: self.scale,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MappingInput {
    pub source_geometry: Geometry,
    pub target_geometry: Geometry,
    #[serde(default)]
    pub theta_targets: BTreeMap<usize, f64>,
    #[serde(default)]
    pub pinned: BTreeMap<usize, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lengths: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u0: Option<Vec<f64>>,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub scale: f64,
    #[serde(default)]
    pub gauge: Gauge,
}

fn parse_edge_key(key: &str) -> Result<(usize, usize), ProblemFileError> {
    let bad = || ProblemFileError::BadEdgeKey(key.to_owned());
    let (a, b) = key.split_once(',').ok_or_else(bad)?;
    let a = a.trim().parse().map_err(|_| bad())?;
    let b = b.trim().parse().map_err(|_| bad())?;
    Ok((a, b))
}

impl MappingInput {
    /// Source edge lengths (before `scale`): explicit `lengths` if given,
    /// otherwise the embedding's euclidean lengths.
    pub fn source_lengths(&self, mesh: &EmbeddedMesh) -> Result<Vec<f64>, ProblemFileError> {
        let Some(map) = &self.lengths else {
            return Ok(mesh.edge_lengths());
        };
        let s = &mesh.surface;
        let mut out = vec![None; s.edge_count()];
        for (key, &l) in map {
            let (a, b) = parse_edge_key(key)?;
            let e = s.find_edge(a, b).ok_or(ProblemFileError::UnknownEdge(a, b))?;
            out[e.index()] = Some(l);
        }
        out.into_iter()
            .enumerate()
            .map(|(e, l)| {
                let [a, b] = s.edges()[e];
                l.ok_or(ProblemFileError::MissingLength(a, b))
            })
            .collect()
    }

    /// Builds the mapping problem and the start point.
    pub fn build(&self, mesh: &EmbeddedMesh) -> Result<(MappingProblem, ScaleFactors), ProblemFileError> {
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(ProblemFileError::InvalidScale(self.scale));
        }
        let lengths: Vec<f64> = self.source_lengths(mesh)?.iter().map(|l| l * self.scale).collect();
        let source = DiscreteMetric::new(mesh.surface.clone(), self.source_geometry, lengths)?;
        let n = mesh.surface.vertex_count();
        let mut targets = self.theta_targets.clone();
        let listed = |v: &usize| targets.contains_key(v) || self.pinned.contains_key(v);
        let unlisted: Vec<usize> = (0..n).filter(|v| !listed(v)).collect();
        if !unlisted.is_empty() {
            let report = source.validate();
            if !report.is_admissible() {
                return Err(ProblemError::InadmissibleSource(report).into());
            }
            let theta = source.cone_angles()?;
            for v in unlisted {
                targets.insert(v, theta[v]);
            }
        }
        let problem = MappingProblem::new(source, self.target_geometry, &targets, &self.pinned)?;
        let u0 = match &self.u0 {
            Some(u) if u.len() != n => {
                return Err(ProblemFileError::U0Length {
                    expected: n,
                    found: u.len(),
                })
            }
            Some(u) => {
                let mut u = u.clone();
                problem.embed_pinned(&mut u);
                ScaleFactors(u)
            }
            None => problem.initial_scale_factors(),
        };
        Ok((problem, u0))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ProblemFile {
    Vortex(VortexInput),
    Mapping(MappingInput),
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> ProblemFileError {
    ProblemFileError::Schema {
        path: path.into(),
        message: message.into(),
    }
}

fn typed<T: for<'de> Deserialize<'de>>(value: Value) -> Result<T, ProblemFileError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        schema(path, e.into_inner().to_string())
    })
}

/// Parses a problem file. Only structural checks and the `(c0, c)` pair are
/// validated here; everything needing the mesh happens when building.
pub fn parse_problem(bytes: &[u8]) -> Result<ProblemFile, ProblemFileError> {
    let value: Value = serde_json::from_slice(bytes).map_err(|e| schema(".", e.to_string()))?;
    let Value::Object(mut obj) = value else {
        return Err(schema(".", "expected a JSON object"));
    };
    let mode = match obj.remove("mode") {
        Some(Value::String(m)) => m,
        Some(_) => return Err(schema("mode", "expected a string")),
        None => return Err(schema(".", "missing field `mode`")),
    };
    let file = match mode.as_str() {
        "vortex" => {
            let input: VortexInput = typed(Value::Object(obj))?;
            input.to_spec()?;
            ProblemFile::Vortex(input)
        }
        "mapping" => ProblemFile::Mapping(typed(Value::Object(obj))?),
        other => {
            return Err(schema(
                "mode",
                format!("unknown mode `{other}`, expected `vortex` or `mapping`"),
            ))
        }
    };
    Ok(file)
}

pub fn to_json(file: &ProblemFile) -> String {
    serde_json::to_string_pretty(file).expect("problem files serialize")
}
