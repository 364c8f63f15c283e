//! The convex variational energy whose critical points are discrete
//! conformal maps with prescribed cone angles.
//!
//! For scale factors `u` and rescaled log lengths `λ̃_ij = u_i + u_j + λ_ij`
//!
//! ```text
//! E(u) = Σ_faces [ f(λ̃_jk, λ̃_ki, λ̃_ij) - π/2 (λ̃_jk + λ̃_ki + λ̃_ij) ] + Σ_v Θ_v u_v
//! f(λ) = Σ β_m λ_m + Σ Л(α_m) + Σ Л(β_m) + Л((π - Σ α_m) / 2)
//! ```
//!
//! where `α` are the interior angles of the rescaled triangle in the target
//! geometry and `β` solve `α_i + β_j + β_k = π`. Since `∂f/∂λ_m = β_m`, the
//! gradient is `∂E/∂u_v = Θ_v - Θ̃_v(u)`: the prescribed angle minus the
//! angle currently achieved.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::{Deref, DerefMut};

use thiserror::Error;

use crate::geometry::{
    accumulate_cone_angles, decode_rescaled, triangle_angles, DiscreteMetric, Geometry, GeometryError, TriangleAngles,
    ValidationReport,
};
use crate::linalg::SparseSymmetric;
use crate::lobachevsky::lobachevsky;
use crate::numeric::CompensatedSum;

/// Central-difference step for the per-face angle derivatives.
const HESSIAN_STEP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnergyError {
    #[error("scale factors leave the feasible region:\n{0}")]
    Infeasible(ValidationReport),
    #[error("circumcircle angle {beta} of face {face} is outside (-π, π)")]
    BetaOutOfRange { face: usize, beta: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("source metric is not admissible:\n{0}")]
    InadmissibleSource(ValidationReport),
    #[error("vertex {0} is out of range")]
    VertexOutOfRange(usize),
    #[error("vertex {0} is both pinned and given a target angle")]
    PinnedAndFree(usize),
    #[error("vertex {0} has neither a target angle nor a pinned value")]
    Unassigned(usize),
    #[error("target angle {angle} at vertex {vertex} is not a positive finite number")]
    InvalidTargetAngle { vertex: usize, angle: f64 },
    #[error("pinned value {value} at vertex {vertex} is not finite")]
    InvalidPinnedValue { vertex: usize, value: f64 },
    #[error(
        "closed surface with euclidean target: target angles sum to {sum}, \
         but solvability requires π·|F| = {required}"
    )]
    SolvabilityViolation { sum: f64, required: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub enum VertexRole {
    /// Scale factor is solved for so that the cone angle becomes `target_angle`.
    Free { target_angle: f64 },
    /// Scale factor is held at `u`.
    Pinned { u: f64 },
}

/// Log conformal factors `u`, one per vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleFactors(pub Vec<f64>);

impl ScaleFactors {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ScaleFactors {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for ScaleFactors {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

/// Discrete conformal mapping problem: find `u` such that the rescaled
/// metric, read in the target geometry, has the prescribed cone angles at
/// every free vertex.
#[derive(Clone, Debug)]
pub struct MappingProblem {
    source: DiscreteMetric,
    target: Geometry,
    roles: Vec<VertexRole>,
    free: Vec<usize>,
    free_index: Vec<Option<usize>>,
    source_log_lengths: Vec<f64>,
}

/// Tolerance of the closed euclidean solvability check, relative to `π·|F|`.
const SOLVABILITY_TOL: f64 = 1e-9;

impl MappingProblem {
    pub fn new(
        source: DiscreteMetric,
        target: Geometry,
        target_angles: &BTreeMap<usize, f64>,
        pinned: &BTreeMap<usize, f64>,
    ) -> Result<Self, ProblemError> {
        let n = source.surface().vertex_count();
        for &v in target_angles.keys().chain(pinned.keys()) {
            if v >= n {
                return Err(ProblemError::VertexOutOfRange(v));
            }
        }
        let roles = (0..n)
            .map(|v| match (target_angles.get(&v), pinned.get(&v)) {
                (Some(_), Some(_)) => Err(ProblemError::PinnedAndFree(v)),
                (Some(&t), None) => Ok(VertexRole::Free { target_angle: t }),
                (None, Some(&u)) => Ok(VertexRole::Pinned { u }),
                (None, None) => Err(ProblemError::Unassigned(v)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_roles(source, target, roles)
    }

    pub fn from_roles(source: DiscreteMetric, target: Geometry, roles: Vec<VertexRole>) -> Result<Self, ProblemError> {
        let surface = source.surface().clone();
        assert_eq!(roles.len(), surface.vertex_count(), "one role per vertex");
        let report = source.validate();
        if !report.is_admissible() {
            return Err(ProblemError::InadmissibleSource(report));
        }
        let mut free = Vec::new();
        let mut free_index = vec![None; roles.len()];
        for (v, role) in roles.iter().enumerate() {
            match *role {
                VertexRole::Free { target_angle } => {
                    if !(target_angle.is_finite() && target_angle > 0.0) {
                        return Err(ProblemError::InvalidTargetAngle {
                            vertex: v,
                            angle: target_angle,
                        });
                    }
                    free_index[v] = Some(free.len());
                    free.push(v);
                }
                VertexRole::Pinned { u } => {
                    if !u.is_finite() {
                        return Err(ProblemError::InvalidPinnedValue { vertex: v, value: u });
                    }
                }
            }
        }
        if surface.is_closed() && target == Geometry::Euclidean && free.len() == roles.len() {
            let sum: f64 = roles
                .iter()
                .map(|r| match r {
                    VertexRole::Free { target_angle } => *target_angle,
                    VertexRole::Pinned { .. } => 0.0,
                })
                .collect::<CompensatedSum>()
                .value();
            let required = PI * surface.face_count() as f64;
            if (sum - required).abs() > SOLVABILITY_TOL * required.max(1.0) {
                return Err(ProblemError::SolvabilityViolation { sum, required });
            }
        }
        let source_log_lengths = source.log_lengths()?;
        Ok(Self {
            source,
            target,
            roles,
            free,
            free_index,
            source_log_lengths,
        })
    }

    pub fn source(&self) -> &DiscreteMetric {
        &self.source
    }

    pub fn target_geometry(&self) -> Geometry {
        self.target
    }

    pub fn roles(&self) -> &[VertexRole] {
        &self.roles
    }

    pub fn vertex_count(&self) -> usize {
        self.roles.len()
    }

    /// Free vertices in ascending order; gradient and Hessian entries follow
    /// this order.
    pub fn free_vertices(&self) -> &[usize] {
        &self.free
    }

    pub fn free_index(&self, v: usize) -> Option<usize> {
        self.free_index[v]
    }

    pub fn target_angle(&self, v: usize) -> Option<f64> {
        match self.roles[v] {
            VertexRole::Free { target_angle } => Some(target_angle),
            VertexRole::Pinned { .. } => None,
        }
    }

    pub fn pinned_value(&self, v: usize) -> Option<f64> {
        match self.roles[v] {
            VertexRole::Pinned { u } => Some(u),
            VertexRole::Free { .. } => None,
        }
    }

    pub fn has_pinned(&self) -> bool {
        self.free.len() < self.roles.len()
    }

    pub fn source_log_lengths(&self) -> &[f64] {
        &self.source_log_lengths
    }

    /// Zero scale factors with the pinned values filled in.
    pub fn initial_scale_factors(&self) -> ScaleFactors {
        let mut u = ScaleFactors::zeros(self.vertex_count());
        self.embed_pinned(&mut u);
        u
    }

    pub fn embed_pinned(&self, u: &mut [f64]) {
        for (v, role) in self.roles.iter().enumerate() {
            if let VertexRole::Pinned { u: value } = *role {
                u[v] = value;
            }
        }
    }

    /// Rescaled log lengths of face `f`, `[m]` opposite corner `m`.
    fn face_log_lengths(&self, f: usize, u: &[f64]) -> [f64; 3] {
        let surface = self.source.surface();
        let tri = surface.faces()[f];
        let fe = surface.face_edges()[f];
        std::array::from_fn(|m| u[tri[(m + 1) % 3]] + u[tri[(m + 2) % 3]] + self.source_log_lengths[fe[m]])
    }

    /// The rescaled metric in the target geometry.
    pub fn rescaled_metric(&self, u: &[f64]) -> Result<DiscreteMetric, ValidationReport> {
        self.source.rescale(u, self.target)
    }
}

/// Companions `β` of the interior angles, with `α_i + β_j + β_k = π`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct CircumAngles {
    pub betas: [f64; 3],
}

/// Closed-form solution `β_m = α_m + (π - Σα) / 2` of the linear system
/// `α_i + β_j + β_k = π`.
pub fn beta_from_alpha(angles: &TriangleAngles) -> Result<CircumAngles, EnergyError> {
    let half_excess = 0.5 * (PI - angles.sum());
    let betas = angles.angles.map(|a| a + half_excess);
    if let Some(&beta) = betas.iter().find(|b| !(b.abs() < PI)) {
        return Err(EnergyError::BetaOutOfRange { face: usize::MAX, beta });
    }
    Ok(CircumAngles { betas })
}

fn potential_from_angles(angles: &TriangleAngles, log_lengths: [f64; 3]) -> Result<f64, EnergyError> {
    let betas = beta_from_alpha(angles)?.betas;
    let mut f = CompensatedSum::new();
    for m in 0..3 {
        f.add(betas[m] * log_lengths[m]);
        f.add(lobachevsky(angles.angles[m]));
        f.add(lobachevsky(betas[m]));
    }
    f.add(lobachevsky(0.5 * (PI - angles.sum())));
    Ok(f.value())
}

/// Triangle potential `f` of a triangle with log lengths `λ` in `target`.
pub fn triangle_potential(target: Geometry, log_lengths: [f64; 3]) -> Result<f64, EnergyError> {
    let lengths = log_lengths
        .iter()
        .map(|&lam| target.length_from_log(lam))
        .collect::<Result<Vec<_>, _>>()?;
    let angles = triangle_angles(target, [lengths[0], lengths[1], lengths[2]])?;
    potential_from_angles(&angles, log_lengths)
}

/// Value, gradient and achieved angles at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyEvaluation {
    /// `None` when `u` is infeasible.
    pub value: Option<f64>,
    /// Entries follow [`MappingProblem::free_vertices`]; empty when infeasible.
    pub gradient: Vec<f64>,
    /// Cone angles of the rescaled metric; empty when infeasible.
    pub achieved_angles: Vec<f64>,
    pub feasibility: ValidationReport,
}

impl EnergyEvaluation {
    pub fn is_feasible(&self) -> bool {
        self.feasibility.is_admissible()
    }

    pub fn gradient_norm(&self) -> f64 {
        crate::numeric::max_abs(&self.gradient)
    }
}

/// Reports every constraint of the feasible region that `u` violates.
pub fn feasibility(problem: &MappingProblem, u: &[f64]) -> ValidationReport {
    decode_rescaled(problem.source.surface(), &problem.source_log_lengths, u, problem.target).1
}

pub fn energy(problem: &MappingProblem, u: &[f64]) -> Result<EnergyEvaluation, EnergyError> {
    assert_eq!(u.len(), problem.vertex_count(), "one scale factor per vertex");
    let surface = problem.source.surface();
    let (lengths, report) = decode_rescaled(surface, &problem.source_log_lengths, u, problem.target);
    if !report.is_admissible() {
        return Ok(EnergyEvaluation {
            value: None,
            gradient: Vec::new(),
            achieved_angles: Vec::new(),
            feasibility: report,
        });
    }
    let mut value = CompensatedSum::new();
    let mut face_angles = Vec::with_capacity(surface.face_count());
    for (f, fe) in surface.face_edges().iter().enumerate() {
        let l = fe.map(|e| lengths[e].expect("feasible lengths decode"));
        let angles = triangle_angles(problem.target, l)?;
        let lam = problem.face_log_lengths(f, u);
        let pot = potential_from_angles(&angles, lam).map_err(|e| match e {
            EnergyError::BetaOutOfRange { beta, .. } => EnergyError::BetaOutOfRange { face: f, beta },
            other => other,
        })?;
        value.add(pot);
        value.add(-FRAC_PI_2 * (lam[0] + lam[1] + lam[2]));
        face_angles.push(angles);
    }
    for &v in &problem.free {
        value.add(problem.target_angle(v).unwrap() * u[v]);
    }
    let achieved = accumulate_cone_angles(surface, &face_angles);
    let gradient = problem
        .free
        .iter()
        .map(|&v| problem.target_angle(v).unwrap() - achieved[v])
        .collect();
    Ok(EnergyEvaluation {
        value: Some(value.value()),
        gradient,
        achieved_angles: achieved,
        feasibility: report,
    })
}

/// `∂E/∂u_v = Θ_v - Θ̃_v(u)` over the free vertices.
pub fn gradient(problem: &MappingProblem, u: &[f64]) -> Result<Vec<f64>, EnergyError> {
    let eval = energy(problem, u)?;
    if !eval.is_feasible() {
        return Err(EnergyError::Infeasible(eval.feasibility));
    }
    Ok(eval.gradient)
}

fn face_angles_at(problem: &MappingProblem, base_log: [f64; 3], uf: [f64; 3]) -> Option<[f64; 3]> {
    let mut l = [0.0; 3];
    for m in 0..3 {
        let lam = uf[(m + 1) % 3] + uf[(m + 2) % 3] + base_log[m];
        l[m] = problem.target.length_from_log(lam).ok()?;
    }
    triangle_angles(problem.target, l).ok().map(|t| t.angles)
}

/// Hessian of the energy on the free vertices.
///
/// Each face contributes `-∂α_a/∂u_b` for its three corners, differentiated
/// numerically (central differences, one-sided next to the boundary of the
/// feasible region) and symmetrized.
pub fn hessian(problem: &MappingProblem, u: &[f64]) -> Result<SparseSymmetric, EnergyError> {
    let report = feasibility(problem, u);
    if !report.is_admissible() {
        return Err(EnergyError::Infeasible(report));
    }
    let surface = problem.source.surface();
    let h = HESSIAN_STEP;
    let mut triplets = Vec::with_capacity(9 * surface.face_count());
    for (f, tri) in surface.faces().iter().enumerate() {
        let fe = surface.face_edges()[f];
        let base_log = fe.map(|e| problem.source_log_lengths[e]);
        let uf = tri.map(|v| u[v]);
        let center = face_angles_at(problem, base_log, uf).ok_or_else(|| EnergyError::Infeasible(report.clone()))?;
        // block[a][b] = -∂α_a / ∂u_b
        let mut block = [[0.0; 3]; 3];
        for b in 0..3 {
            let mut up = uf;
            up[b] += h;
            let mut dn = uf;
            dn[b] -= h;
            let deriv: [f64; 3] = match (
                face_angles_at(problem, base_log, up),
                face_angles_at(problem, base_log, dn),
            ) {
                (Some(p), Some(q)) => std::array::from_fn(|a| (p[a] - q[a]) / (2.0 * h)),
                (Some(p), None) => std::array::from_fn(|a| (p[a] - center[a]) / h),
                (None, Some(q)) => std::array::from_fn(|a| (center[a] - q[a]) / h),
                (None, None) => return Err(EnergyError::Infeasible(report)),
            };
            for a in 0..3 {
                block[a][b] = -deriv[a];
            }
        }
        for a in 0..3 {
            let Some(ia) = problem.free_index[tri[a]] else { continue };
            for b in 0..3 {
                let Some(ib) = problem.free_index[tri[b]] else { continue };
                if ia >= ib {
                    triplets.push((ia, ib, 0.5 * (block[a][b] + block[b][a])));
                }
            }
        }
    }
    Ok(SparseSymmetric::from_lower_triplets(problem.free.len(), triplets))
}
