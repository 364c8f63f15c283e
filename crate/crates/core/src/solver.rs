//! Damped Newton minimization of the conformal energy, restricted to the
//! feasible region by backtracking.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::energy::{energy, hessian, EnergyError, EnergyEvaluation, MappingProblem, ScaleFactors};
use crate::geometry::{DiscreteMetric, Geometry};
use crate::linalg::{solve_shifted, Factorization, LinearSolveError};
use crate::numeric::max_abs;

/// How the constant null direction of a euclidean target without pinned
/// vertices is removed.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Gauge {
    /// Newton steps leave the first free vertex fixed.
    #[default]
    PinFirstVertex,
    /// `u` is kept at zero mean.
    MeanZero,
    /// No gauge; the singular Hessian is handled by the Tikhonov shift.
    None,
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct SolverOptions {
    /// Convergence threshold on the max-norm of the gradient (radians).
    pub grad_tol: f64,
    pub max_iterations: usize,
    /// Backtracking factor.
    pub shrink: f64,
    /// Armijo constant.
    pub sufficient_decrease: f64,
    /// Initial Tikhonov shift; escalated ×10 on factorization failure.
    pub regularization: f64,
    pub gauge: Gauge,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            grad_tol: 1e-10,
            max_iterations: 100,
            shrink: 0.5,
            sufficient_decrease: 1e-4,
            regularization: 0.0,
            gauge: Gauge::PinFirstVertex,
        }
    }
}

/// Smallest accepted step length, relative to the Newton step.
const MIN_STEP: f64 = 1e-14;
const MAX_SHIFT_ESCALATIONS: usize = 40;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIter,
    InfeasibleStart,
    LineSearchStall,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIter => "max_iter",
            SolveStatus::InfeasibleStart => "infeasible_start",
            SolveStatus::LineSearchStall => "line_search_stall",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub u: ScaleFactors,
    pub iterations: usize,
    pub final_grad_norm: f64,
    /// Cone angles of the rescaled metric at `u`; empty on infeasible start.
    pub achieved_angles: Vec<f64>,
    /// The rescaled metric in the target geometry; `None` on infeasible start.
    pub target_metric: Option<DiscreteMetric>,
    pub status: SolveStatus,
    /// Energy after each accepted iterate, starting with `u0`.
    pub energy_history: Vec<f64>,
}

impl Solution {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }
}

struct Iterate {
    u: Vec<f64>,
    eval: EnergyEvaluation,
}

impl Iterate {
    fn value(&self) -> f64 {
        self.eval.value.expect("iterates are feasible")
    }

    fn grad_sq(&self) -> f64 {
        self.eval.gradient.iter().map(|g| g * g).sum()
    }
}

fn gauge_active(problem: &MappingProblem, options: &SolverOptions) -> bool {
    problem.target_geometry() == Geometry::Euclidean
        && !problem.has_pinned()
        && options.gauge != Gauge::None
        && !problem.free_vertices().is_empty()
}

/// Newton direction on the free vertices, solving `H d = -g`.
fn newton_direction(
    problem: &MappingProblem,
    u: &[f64],
    grad: &[f64],
    options: &SolverOptions,
) -> Result<Vec<f64>, EnergyError> {
    let h = hessian(problem, u)?;
    let n = grad.len();
    // with a gauge, the first free vertex is dropped from the system
    let keep: Vec<usize> = if gauge_active(problem, options) {
        (1..n).collect()
    } else {
        (0..n).collect()
    };
    let system = if keep.len() == n {
        h
    } else {
        h.principal_submatrix(&keep)
    };
    let rhs: Vec<f64> = keep.iter().map(|&i| -grad[i]).collect();

    let method = if problem.target_geometry() == Geometry::Spherical {
        Factorization::Lu
    } else {
        Factorization::Cholesky
    };
    let scale = system.max_abs_diagonal().max(1.0);
    let mut shift = options.regularization;
    let mut reduced = None;
    for _ in 0..MAX_SHIFT_ESCALATIONS {
        match solve_shifted(&system, shift, &rhs, method) {
            Ok(x) => {
                reduced = Some(x);
                break;
            }
            Err(LinearSolveError::NotPositiveDefinite | LinearSolveError::Singular) => {
                shift = if shift == 0.0 { 1e-10 * scale } else { shift * 10.0 };
            }
            Err(LinearSolveError::Backend(_)) => break,
        }
    }
    let Some(reduced) = reduced else {
        // no usable factorization: fall back to steepest descent
        return Ok(grad.iter().map(|g| -g).collect());
    };
    let mut d = vec![0.0; n];
    for (k, &i) in keep.iter().enumerate() {
        d[i] = reduced[k];
    }
    Ok(d)
}

fn accept_step(target: Geometry, current: &Iterate, trial: &EnergyEvaluation, t: f64, slope: f64, c: f64) -> bool {
    if !trial.is_feasible() {
        return false;
    }
    let trial_grad_sq: f64 = trial.gradient.iter().map(|g| g * g).sum();
    if target == Geometry::Spherical {
        // E need not be convex: merit is the gradient norm
        return trial_grad_sq <= (1.0 - 2.0 * c * t) * current.grad_sq();
    }
    let e0 = current.value();
    let e1 = trial.value.unwrap();
    if e1 - e0 <= c * t * slope {
        return true;
    }
    // below the resolution of E the decrease test is noise; fall back to the gradient
    let resolution = 1e-13 * (1.0 + e0.abs());
    (t * slope).abs() < resolution && e1 - e0 <= resolution && trial_grad_sq < current.grad_sq()
}

/// Minimizes the energy of `problem` from `u0` (whose pinned entries are
/// overwritten with the pinned values).
pub fn solve(problem: &MappingProblem, u0: &[f64], options: &SolverOptions) -> Result<Solution, EnergyError> {
    assert!(options.grad_tol > 0.0 && options.shrink > 0.0 && options.shrink < 1.0);
    let mut u = u0.to_vec();
    problem.embed_pinned(&mut u);
    let gauge = gauge_active(problem, options);
    if gauge && options.gauge == Gauge::MeanZero {
        let mean = u.iter().sum::<f64>() / u.len() as f64;
        u.iter_mut().for_each(|x| *x -= mean);
    }
    let eval = energy(problem, &u)?;
    if !eval.is_feasible() {
        return Ok(Solution {
            u: ScaleFactors(u),
            iterations: 0,
            final_grad_norm: f64::NAN,
            achieved_angles: Vec::new(),
            target_metric: None,
            status: SolveStatus::InfeasibleStart,
            energy_history: Vec::new(),
        });
    }
    let mut cur = Iterate { u, eval };
    let mut history = vec![cur.value()];
    let free = problem.free_vertices().to_vec();
    let target = problem.target_geometry();

    let mut iterations = 0;
    let status = loop {
        if cur.eval.gradient_norm() < options.grad_tol {
            break SolveStatus::Converged;
        }
        if iterations >= options.max_iterations {
            break SolveStatus::MaxIter;
        }
        let mut d = newton_direction(problem, &cur.u, &cur.eval.gradient, options)?;
        if gauge && options.gauge == Gauge::MeanZero {
            // H·1 = 0, so recentering keeps d a Newton direction
            let mean = d.iter().sum::<f64>() / problem.vertex_count() as f64;
            d.iter_mut().for_each(|x| *x -= mean);
        }
        let mut slope: f64 = cur.eval.gradient.iter().zip(&d).map(|(g, x)| g * x).sum();
        if target != Geometry::Spherical && slope >= 0.0 {
            d = cur.eval.gradient.iter().map(|g| -g).collect();
            slope = -cur.grad_sq();
        }

        let mut t = 1.0;
        let accepted = loop {
            let mut trial_u = cur.u.clone();
            for (k, &v) in free.iter().enumerate() {
                trial_u[v] += t * d[k];
            }
            let trial = energy(problem, &trial_u)?;
            if accept_step(target, &cur, &trial, t, slope, options.sufficient_decrease) {
                break Some(Iterate {
                    u: trial_u,
                    eval: trial,
                });
            }
            t *= options.shrink;
            if t < MIN_STEP {
                break None;
            }
        };
        iterations += 1;
        match accepted {
            Some(next) => {
                cur = next;
                history.push(cur.value());
            }
            None => break SolveStatus::LineSearchStall,
        }
    };

    let target_metric = problem.rescaled_metric(&cur.u).ok();
    Ok(Solution {
        final_grad_norm: cur.eval.gradient_norm(),
        achieved_angles: cur.eval.achieved_angles,
        u: ScaleFactors(cur.u),
        iterations,
        target_metric,
        status,
        energy_history: history,
    })
}

/// Angle bookkeeping for one vertex.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ResidualRow {
    pub vertex: usize,
    /// `None` for pinned vertices.
    pub target: Option<f64>,
    pub achieved: f64,
    /// `target - achieved`, equal to the gradient entry.
    pub difference: Option<f64>,
}

pub fn residual_report(problem: &MappingProblem, u: &[f64]) -> Result<Vec<ResidualRow>, EnergyError> {
    let eval = energy(problem, u)?;
    if !eval.is_feasible() {
        return Err(EnergyError::Infeasible(eval.feasibility));
    }
    Ok((0..problem.vertex_count())
        .map(|v| {
            let target = problem.target_angle(v);
            let achieved = eval.achieved_angles[v];
            ResidualRow {
                vertex: v,
                target,
                achieved,
                difference: target.map(|t| t - achieved),
            }
        })
        .collect())
}

pub fn max_residual(rows: &[ResidualRow]) -> f64 {
    let diffs: Vec<f64> = rows.iter().filter_map(|r| r.difference).collect();
    max_abs(&diffs)
}
