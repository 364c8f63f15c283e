//! Discrete metrics in the three constant-curvature geometries.
//!
//! A metric assigns an intrinsic length `l` to every edge; faces are read as
//! euclidean, hyperbolic or spherical triangles. Conformal rescaling acts on
//! the chord `L` (the ambient secant length of a geodesic segment) through
//! the log length `λ = 2 log L`, so that `λ̃_ij = u_i + u_j + λ_ij`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::CompensatedSum;
use crate::surface::{TriangulatedSurface, VertexId};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Euclidean,
    Hyperbolic,
    Spherical,
}

impl Geometry {
    pub const ALL: [Geometry; 3] = [Geometry::Euclidean, Geometry::Hyperbolic, Geometry::Spherical];

    /// Curvature constant `C_g`: +1 spherical, 0 euclidean, -1 hyperbolic.
    pub fn curvature(self) -> i32 {
        match self {
            Geometry::Spherical => 1,
            Geometry::Euclidean => 0,
            Geometry::Hyperbolic => -1,
        }
    }

    pub fn from_curvature(c: i32) -> Option<Self> {
        match c {
            1 => Some(Geometry::Spherical),
            0 => Some(Geometry::Euclidean),
            -1 => Some(Geometry::Hyperbolic),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Geometry::Euclidean => "euclidean",
            Geometry::Hyperbolic => "hyperbolic",
            Geometry::Spherical => "spherical",
        }
    }

    /// Chord length `L` of a segment of intrinsic length `l`.
    pub fn chord_length(self, l: f64) -> Result<f64, GeometryError> {
        if !(l.is_finite() && l > 0.0) {
            return Err(GeometryError::InvalidLength(l));
        }
        Ok(match self {
            Geometry::Euclidean => l,
            Geometry::Hyperbolic => (0.5 * l).sinh(),
            Geometry::Spherical => {
                if l >= PI {
                    return Err(GeometryError::SphericalLengthOverflow(l));
                }
                (0.5 * l).sin()
            }
        })
    }

    /// Intrinsic length of a segment with chord `chord`.
    pub fn inverse_chord(self, chord: f64) -> Result<f64, GeometryError> {
        if !(chord.is_finite() && chord > 0.0) {
            return Err(GeometryError::InvalidLength(chord));
        }
        Ok(match self {
            Geometry::Euclidean => chord,
            Geometry::Hyperbolic => 2.0 * chord.asinh(),
            Geometry::Spherical => {
                if chord >= 1.0 {
                    return Err(GeometryError::SphericalChordOverflow(chord));
                }
                2.0 * chord.asin()
            }
        })
    }

    /// Log length `λ = 2 log L`.
    pub fn log_length(self, l: f64) -> Result<f64, GeometryError> {
        Ok(2.0 * self.chord_length(l)?.ln())
    }

    /// Intrinsic length with log length `lambda`.
    pub fn length_from_log(self, lambda: f64) -> Result<f64, GeometryError> {
        self.inverse_chord((0.5 * lambda).exp())
    }

    fn half_angle_factor(self, x: f64) -> f64 {
        match self {
            Geometry::Euclidean => x,
            Geometry::Hyperbolic => x.sinh(),
            Geometry::Spherical => x.sin(),
        }
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Geometry {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "euclidean" => Ok(Geometry::Euclidean),
            "hyperbolic" => Ok(Geometry::Hyperbolic),
            "spherical" => Ok(Geometry::Spherical),
            other => Err(GeometryError::UnknownGeometry(other.to_owned())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("length {0} is not a positive finite number")]
    InvalidLength(f64),
    #[error("spherical length {0} is not below π")]
    SphericalLengthOverflow(f64),
    #[error("spherical chord {0} is not below 1")]
    SphericalChordOverflow(f64),
    #[error("lengths {lengths:?} do not form a {geometry} triangle")]
    InvalidTriangle { geometry: Geometry, lengths: [f64; 3] },
    #[error("expected {expected} edge lengths, got {found}")]
    LengthCountMismatch { expected: usize, found: usize },
    #[error("unknown geometry {0:?} (expected euclidean, hyperbolic or spherical)")]
    UnknownGeometry(String),
    #[error("the surface has boundary")]
    BoundaryPresent,
}

/// Interior angles of one triangle, `angles[m]` at the corner opposite the
/// side `lengths[m]`, and its area.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct TriangleAngles {
    pub angles: [f64; 3],
    pub area: f64,
}

impl TriangleAngles {
    pub fn sum(&self) -> f64 {
        self.angles.iter().sum()
    }
}

/// Interior angles from side lengths via the half-angle tangent
/// `tan(α/2) = sqrt(M(s-b) M(s-c) / (M(s) M(s-a)))`, `M` being the identity,
/// `sinh` or `sin`.
pub fn triangle_angles(geometry: Geometry, lengths: [f64; 3]) -> Result<TriangleAngles, GeometryError> {
    let invalid = || GeometryError::InvalidTriangle { geometry, lengths };
    let [a, b, c] = lengths;
    if !lengths.iter().all(|l| l.is_finite() && *l > 0.0) {
        return Err(invalid());
    }
    // s - l_m, formed without going through s
    let d = [0.5 * (b + c - a), 0.5 * (c + a - b), 0.5 * (a + b - c)];
    if d.iter().any(|&x| x <= 0.0) {
        return Err(invalid());
    }
    let s = 0.5 * (a + b + c);
    if geometry == Geometry::Spherical && s >= PI {
        return Err(invalid());
    }
    let ms = geometry.half_angle_factor(s);
    let md = d.map(|x| geometry.half_angle_factor(x));
    let angles: [f64; 3] = std::array::from_fn(|m| {
        let (p, q) = ((m + 1) % 3, (m + 2) % 3);
        2.0 * (md[p] * md[q]).sqrt().atan2((ms * md[m]).sqrt())
    });
    let area = match geometry {
        Geometry::Euclidean => (s * d[0] * d[1] * d[2]).sqrt(),
        Geometry::Spherical => angles.iter().sum::<f64>() - PI,
        Geometry::Hyperbolic => PI - angles.iter().sum::<f64>(),
    };
    Ok(TriangleAngles { angles, area })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Some side is not shorter than the sum of the other two.
    TriangleInequality { face: usize, lengths: [f64; 3] },
    /// Spherical face with perimeter `>= 2π`.
    Perimeter { face: usize, perimeter: f64 },
    /// Spherical edge with `l >= π`.
    EdgeTooLong { edge: usize, length: f64 },
    /// Rescaled spherical chord `>= 1`.
    ChordOverflow { edge: usize, chord: f64 },
    /// Rescaling produced a non-finite or zero length.
    NonFiniteLength { edge: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TriangleInequality { face, lengths } => {
                write!(f, "face {face}: triangle inequality fails for lengths {lengths:?}")
            }
            Violation::Perimeter { face, perimeter } => {
                write!(f, "face {face}: spherical perimeter {perimeter} is not below 2π")
            }
            Violation::EdgeTooLong { edge, length } => {
                write!(f, "edge {edge}: spherical length {length} is not below π")
            }
            Violation::ChordOverflow { edge, chord } => {
                write!(f, "edge {edge}: spherical chord {chord} is not below 1")
            }
            Violation::NonFiniteLength { edge } => write!(f, "edge {edge}: length is not finite"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_admissible(&self) -> bool {
        self.violations.is_empty()
    }

    /// Faces named by any violation, ascending and deduplicated.
    pub fn violating_faces(&self) -> Vec<usize> {
        let mut faces: Vec<usize> = self
            .violations
            .iter()
            .filter_map(|v| match v {
                Violation::TriangleInequality { face, .. } | Violation::Perimeter { face, .. } => Some(*face),
                _ => None,
            })
            .collect();
        faces.dedup();
        faces
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "admissible");
        }
        writeln!(f, "{} violation(s):", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

/// Edge lengths on a surface together with the geometry of its faces.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMetric {
    surface: Arc<TriangulatedSurface>,
    geometry: Geometry,
    lengths: Vec<f64>,
}

impl DiscreteMetric {
    /// Wraps positive finite lengths, one per edge in edge order. Triangle
    /// inequalities are not checked here; see [`DiscreteMetric::validate`].
    pub fn new(
        surface: Arc<TriangulatedSurface>,
        geometry: Geometry,
        lengths: Vec<f64>,
    ) -> Result<Self, GeometryError> {
        if lengths.len() != surface.edge_count() {
            return Err(GeometryError::LengthCountMismatch {
                expected: surface.edge_count(),
                found: lengths.len(),
            });
        }
        if let Some(&l) = lengths.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(GeometryError::InvalidLength(l));
        }
        Ok(Self {
            surface,
            geometry,
            lengths,
        })
    }

    pub fn surface(&self) -> &Arc<TriangulatedSurface> {
        &self.surface
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    /// Side lengths of face `f`, `[m]` opposite corner `m`.
    pub fn face_lengths(&self, f: usize) -> [f64; 3] {
        self.surface.face_edges()[f].map(|e| self.lengths[e])
    }

    /// Same lengths read in another geometry.
    pub fn reinterpret(&self, geometry: Geometry) -> DiscreteMetric {
        DiscreteMetric {
            surface: self.surface.clone(),
            geometry,
            lengths: self.lengths.clone(),
        }
    }

    pub fn chords(&self) -> Result<Vec<f64>, GeometryError> {
        self.lengths.iter().map(|&l| self.geometry.chord_length(l)).collect()
    }

    /// `λ = 2 log L` per edge.
    pub fn log_lengths(&self) -> Result<Vec<f64>, GeometryError> {
        self.lengths.iter().map(|&l| self.geometry.log_length(l)).collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.geometry == Geometry::Spherical {
            for (e, &l) in self.lengths.iter().enumerate() {
                if l >= PI {
                    violations.push(Violation::EdgeTooLong { edge: e, length: l });
                }
            }
        }
        for f in 0..self.surface.face_count() {
            check_face(self.geometry, f, self.face_lengths(f), &mut violations);
        }
        ValidationReport { violations }
    }

    pub fn is_admissible(&self) -> bool {
        self.validate().is_admissible()
    }

    pub fn face_angles(&self) -> Result<Vec<TriangleAngles>, GeometryError> {
        (0..self.surface.face_count())
            .map(|f| triangle_angles(self.geometry, self.face_lengths(f)))
            .collect()
    }

    /// Total angle `Θ_v` around every vertex.
    pub fn cone_angles(&self) -> Result<Vec<f64>, GeometryError> {
        let angles = self.face_angles()?;
        Ok(accumulate_cone_angles(&self.surface, &angles))
    }

    /// Conformally rescaled metric in `target`: `λ̃_ij = u_i + u_j + λ_ij`,
    /// decoded back to intrinsic lengths in the target geometry. Returns the
    /// violation report when the result is not an admissible metric.
    pub fn rescale(&self, u: &[f64], target: Geometry) -> Result<DiscreteMetric, ValidationReport> {
        assert_eq!(u.len(), self.surface.vertex_count(), "one scale factor per vertex");
        let log_lengths = self.log_lengths().map_err(|_| self.validate())?;
        let (lengths, report) = decode_rescaled(&self.surface, &log_lengths, u, target);
        if !report.is_admissible() {
            return Err(report);
        }
        Ok(DiscreteMetric {
            surface: self.surface.clone(),
            geometry: target,
            lengths: lengths.into_iter().map(|l| l.unwrap()).collect(),
        })
    }

    /// `Σ_v (2π - Θ_v) + C_g Σ_f area_f - 2π χ`, which vanishes identically
    /// on closed surfaces.
    pub fn gauss_bonnet_residual(&self) -> Result<f64, GeometryError> {
        if !self.surface.is_closed() {
            return Err(GeometryError::BoundaryPresent);
        }
        let angles = self.face_angles()?;
        let theta = accumulate_cone_angles(&self.surface, &angles);
        let mut sum = CompensatedSum::new();
        for t in theta {
            sum.add(2.0 * PI - t);
        }
        let c = self.geometry.curvature() as f64;
        for a in &angles {
            sum.add(c * a.area);
        }
        sum.add(-2.0 * PI * self.surface.euler_characteristic() as f64);
        Ok(sum.value())
    }
}

fn check_face(geometry: Geometry, face: usize, l: [f64; 3], out: &mut Vec<Violation>) {
    let [a, b, c] = l;
    if !(a < b + c && b < c + a && c < a + b) {
        out.push(Violation::TriangleInequality { face, lengths: l });
    }
    if geometry == Geometry::Spherical {
        let perimeter = a + b + c;
        if perimeter >= 2.0 * PI {
            out.push(Violation::Perimeter { face, perimeter });
        }
    }
}

/// Decodes rescaled log lengths edge by edge and checks every face whose
/// edges all decoded. Entries are `None` for edges that failed to decode.
pub(crate) fn decode_rescaled(
    surface: &TriangulatedSurface,
    log_lengths: &[f64],
    u: &[f64],
    target: Geometry,
) -> (Vec<Option<f64>>, ValidationReport) {
    let mut violations = Vec::new();
    let lengths: Vec<Option<f64>> = surface
        .edges()
        .iter()
        .zip(log_lengths)
        .enumerate()
        .map(|(e, (&[i, j], &lam))| {
            let lam_new = u[i] + u[j] + lam;
            match target.length_from_log(lam_new) {
                Ok(l) => Some(l),
                Err(GeometryError::SphericalChordOverflow(chord)) => {
                    violations.push(Violation::ChordOverflow { edge: e, chord });
                    None
                }
                Err(_) => {
                    violations.push(Violation::NonFiniteLength { edge: e });
                    None
                }
            }
        })
        .collect();
    for (f, fe) in surface.face_edges().iter().enumerate() {
        if let [Some(a), Some(b), Some(c)] = fe.map(|e| lengths[e]) {
            check_face(target, f, [a, b, c], &mut violations);
        }
    }
    (lengths, ValidationReport { violations })
}

pub(crate) fn accumulate_cone_angles(surface: &TriangulatedSurface, angles: &[TriangleAngles]) -> Vec<f64> {
    (0..surface.vertex_count())
        .map(|v| {
            surface
                .vertex_star(VertexId(v))
                .iter()
                .map(|s| angles[s.face.index()].angles[s.corner])
                .collect::<CompensatedSum>()
                .value()
        })
        .collect()
}
