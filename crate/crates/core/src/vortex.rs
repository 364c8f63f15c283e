//! Integrable vortex configurations as discrete conformal maps.
//!
//! The source metric is the input mesh read in the geometry of curvature
//! `C₀`; target cone angles equal the source ones except at vortex centers,
//! where `2π·n` is added, and the target geometry has curvature `C`. The
//! Higgs amplitude is `e^u`, the Baptista metric the rescaled metric.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::energy::{EnergyError, MappingProblem, ProblemError, VertexRole};
use crate::geometry::{DiscreteMetric, Geometry, GeometryError, ValidationReport};
use crate::numeric::CompensatedSum;
use crate::solver::{solve, Solution, SolverOptions};
use crate::surface::{TriangulatedSurface, VertexId};

/// The five admissible vortex equations.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VortexKind {
    Taubes,
    Bradlow,
    AmbjornOlesen,
    JackiwPi,
    Popov,
}

impl VortexKind {
    pub const ALL: [VortexKind; 5] = [
        VortexKind::Taubes,
        VortexKind::Bradlow,
        VortexKind::AmbjornOlesen,
        VortexKind::JackiwPi,
        VortexKind::Popov,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VortexKind::Taubes => "taubes",
            VortexKind::Bradlow => "bradlow",
            VortexKind::AmbjornOlesen => "ambjorn-olesen",
            VortexKind::JackiwPi => "jackiw-pi",
            VortexKind::Popov => "popov",
        }
    }

    pub fn constants(self) -> VortexConstants {
        let (c0, c) = match self {
            VortexKind::Taubes => (-1, -1),
            VortexKind::Bradlow => (-1, 0),
            VortexKind::AmbjornOlesen => (-1, 1),
            VortexKind::JackiwPi => (0, 1),
            VortexKind::Popov => (1, 1),
        };
        VortexConstants { c0, c }
    }

    pub fn from_constants(c0: i32, c: i32) -> Option<VortexKind> {
        VortexKind::ALL
            .into_iter()
            .find(|k| k.constants() == VortexConstants { c0, c })
    }
}

impl fmt::Display for VortexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VortexKind {
    type Err = VortexError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        VortexKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| VortexError::UnknownPreset(s.to_owned()))
    }
}

pub fn preset(name: &str) -> Result<VortexConstants, VortexError> {
    Ok(name.parse::<VortexKind>()?.constants())
}

/// Geometry whose curvature constant is `c` (−1, 0 or +1).
pub fn geometry_for(c: i32) -> Option<Geometry> {
    Geometry::from_curvature(c)
}

fn admissible_list() -> String {
    VortexKind::ALL
        .iter()
        .map(|k| {
            let c = k.constants();
            format!("{} ({}, {})", k.name(), c.c0, c.c)
        })
        .collect::<Vec<_>>()
        .join(", ")
}

/// `(C₀, C)`: background curvature of the source and target geometries.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VortexConstants {
    pub c0: i32,
    pub c: i32,
}

impl VortexConstants {
    pub fn new(c0: i32, c: i32) -> Result<Self, VortexError> {
        let k = Self { c0, c };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<VortexKind, VortexError> {
        VortexKind::from_constants(self.c0, self.c).ok_or(VortexError::ExcludedConstants { c0: self.c0, c: self.c })
    }

    pub fn source_geometry(&self) -> Geometry {
        geometry_for(self.c0).expect("validated constants")
    }

    pub fn target_geometry(&self) -> Geometry {
        geometry_for(self.c).expect("validated constants")
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCondition {
    /// `u = 0` on the boundary, angles prescribed at interior vertices.
    #[default]
    DirichletZero,
    /// Boundary vertices keep their source cone angle.
    Free,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VortexCenter {
    pub vertex: usize,
    pub n: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VortexSpec {
    pub constants: VortexConstants,
    pub vortices: Vec<VortexCenter>,
    pub boundary: BoundaryCondition,
    pub length_scale: f64,
}

impl VortexSpec {
    pub fn new(kind: VortexKind, vortices: Vec<VortexCenter>) -> Self {
        Self {
            constants: kind.constants(),
            vortices,
            boundary: BoundaryCondition::DirichletZero,
            length_scale: 1.0,
        }
    }

    pub fn total_vortex_number(&self) -> u64 {
        self.vortices.iter().map(|c| c.n as u64).sum()
    }

    /// Checks everything that does not need the surface.
    pub fn validate(&self) -> Result<VortexKind, VortexError> {
        let kind = self.constants.validate()?;
        if !(self.length_scale.is_finite() && self.length_scale > 0.0) {
            return Err(VortexError::InvalidScale(self.length_scale));
        }
        if self.vortices.is_empty() {
            return Err(VortexError::NonPositiveN);
        }
        let mut seen = BTreeSet::new();
        for c in &self.vortices {
            if c.n == 0 {
                return Err(VortexError::NonPositiveN);
            }
            if !seen.insert(c.vertex) {
                return Err(VortexError::DuplicateCenter(c.vertex));
            }
        }
        Ok(kind)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VortexError {
    #[error("unknown vortex preset `{0}`; expected one of: {list}", list = admissible_list())]
    UnknownPreset(String),
    #[error("constants (c0, c) = ({c0}, {c}) do not define a vortex equation; admissible types: {list}", list = admissible_list())]
    ExcludedConstants { c0: i32, c: i32 },
    #[error("vortex numbers must be positive and the vortex list non-empty")]
    NonPositiveN,
    #[error("vertex {0} is listed as a vortex center more than once")]
    DuplicateCenter(usize),
    #[error("vortex center {0} is not a vertex of the mesh")]
    CenterOutOfRange(usize),
    #[error("vortex center {0} lies on the boundary")]
    CenterOnBoundary(usize),
    #[error("length scale must be positive and finite, got {0}")]
    InvalidScale(f64),
    #[error("source metric is not admissible: {0}")]
    InadmissibleSource(ValidationReport),
    #[error("closed euclidean target needs cone angles summing to {required}, got {sum}")]
    SolvabilityViolation { sum: f64, required: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Problem(ProblemError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
}

impl From<ProblemError> for VortexError {
    fn from(e: ProblemError) -> Self {
        match e {
            ProblemError::InadmissibleSource(r) => VortexError::InadmissibleSource(r),
            ProblemError::SolvabilityViolation { sum, required } => VortexError::SolvabilityViolation { sum, required },
            other => VortexError::Problem(other),
        }
    }
}

/// A mapping problem together with the vortex data it was built from.
#[derive(Clone, Debug)]
pub struct VortexProblem {
    pub spec: VortexSpec,
    pub problem: MappingProblem,
    /// Cone angles of the source metric.
    pub source_angles: Vec<f64>,
    /// Prescribed angles; `None` at pinned vertices.
    pub target_angles: Vec<Option<f64>>,
}

impl VortexProblem {
    /// `Σ (Θ̃_target − Θ)` over free vertices, which equals `2πN`.
    pub fn angle_excess(&self) -> f64 {
        self.target_angles
            .iter()
            .zip(&self.source_angles)
            .filter_map(|(t, s)| t.map(|t| t - s))
            .collect::<CompensatedSum>()
            .value()
    }
}

pub fn build_problem(
    surface: Arc<TriangulatedSurface>,
    lengths: &[f64],
    spec: &VortexSpec,
) -> Result<VortexProblem, VortexError> {
    spec.validate()?;
    let n = surface.vertex_count();
    for c in &spec.vortices {
        if c.vertex >= n {
            return Err(VortexError::CenterOutOfRange(c.vertex));
        }
        if surface.is_boundary_vertex(VertexId(c.vertex)) {
            return Err(VortexError::CenterOnBoundary(c.vertex));
        }
    }
    let scaled: Vec<f64> = lengths.iter().map(|l| l * spec.length_scale).collect();
    let source = DiscreteMetric::new(surface.clone(), spec.constants.source_geometry(), scaled)?;
    let report = source.validate();
    if !report.is_admissible() {
        return Err(VortexError::InadmissibleSource(report));
    }
    let source_angles = source.cone_angles()?;

    let mut excess = vec![0u32; n];
    for c in &spec.vortices {
        excess[c.vertex] = c.n;
    }
    let roles: Vec<VertexRole> = (0..n)
        .map(|v| {
            let pinned = spec.boundary == BoundaryCondition::DirichletZero && surface.is_boundary_vertex(VertexId(v));
            if pinned {
                VertexRole::Pinned { u: 0.0 }
            } else {
                VertexRole::Free {
                    target_angle: source_angles[v] + 2.0 * PI * excess[v] as f64,
                }
            }
        })
        .collect();
    let target_angles = roles
        .iter()
        .map(|r| match *r {
            VertexRole::Free { target_angle } => Some(target_angle),
            VertexRole::Pinned { .. } => None,
        })
        .collect();
    let problem = MappingProblem::from_roles(source, spec.constants.target_geometry(), roles)?;
    Ok(VortexProblem {
        spec: spec.clone(),
        problem,
        source_angles,
        target_angles,
    })
}

#[derive(Clone, Debug)]
pub struct VortexSolution {
    pub kind: VortexKind,
    pub constants: VortexConstants,
    pub total_vortex_number: u64,
    pub source_metric: DiscreteMetric,
    pub source_angles: Vec<f64>,
    pub target_angles: Vec<Option<f64>>,
    /// `e^{u_v}` per vertex.
    pub higgs_amplitude: Vec<f64>,
    /// Rescaled metric in the target geometry; `None` unless `u` is feasible.
    pub baptista_metric: Option<DiscreteMetric>,
    pub solution: Solution,
}

impl VortexSolution {
    pub fn u(&self) -> &[f64] {
        &self.solution.u
    }

    pub fn achieved_angles(&self) -> &[f64] {
        &self.solution.achieved_angles
    }

    /// Largest `|Θ̃_achieved − Θ̃_target|` over free vertices.
    pub fn max_angle_residual(&self) -> f64 {
        self.target_angles
            .iter()
            .zip(self.achieved_angles())
            .filter_map(|(t, a)| t.map(|t| (t - a).abs()))
            .fold(0.0, f64::max)
    }
}

/// Solves a prepared vortex problem starting from `u = 0` (pinned values embedded).
pub fn solve_problem(vp: &VortexProblem, options: &SolverOptions) -> Result<VortexSolution, VortexError> {
    let kind = vp.spec.validate()?;
    let u0 = vp.problem.initial_scale_factors();
    let solution = solve(&vp.problem, &u0, options)?;
    let higgs_amplitude = solution.u.iter().map(|u| u.exp()).collect();
    Ok(VortexSolution {
        kind,
        constants: vp.spec.constants,
        total_vortex_number: vp.spec.total_vortex_number(),
        source_metric: vp.problem.source().clone(),
        source_angles: vp.source_angles.clone(),
        target_angles: vp.target_angles.clone(),
        higgs_amplitude,
        baptista_metric: solution.target_metric.clone(),
        solution,
    })
}

pub fn run(
    surface: Arc<TriangulatedSurface>,
    lengths: &[f64],
    spec: &VortexSpec,
    options: &SolverOptions,
) -> Result<VortexSolution, VortexError> {
    let vp = build_problem(surface, lengths, spec)?;
    solve_problem(&vp, options)
}
