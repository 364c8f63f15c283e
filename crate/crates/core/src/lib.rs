//! Discrete conformal maps between piecewise euclidean, hyperbolic and
//! spherical triangulated surfaces, and their use for computing
//! integrable vortex configurations.

pub mod cli;
pub mod energy;
pub mod fixtures;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod lobachevsky;
pub mod mesh;
pub mod numeric;
pub mod solver;
pub mod surface;
pub mod vortex;

pub use energy::{MappingProblem, ScaleFactors, VertexRole};
pub use geometry::{DiscreteMetric, Geometry};
pub use lobachevsky::lobachevsky;
pub use solver::{solve, Gauge, Solution, SolveStatus, SolverOptions};
pub use surface::TriangulatedSurface;
pub use vortex::{VortexKind, VortexSolution, VortexSpec};
