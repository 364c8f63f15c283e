//! Solution files: JSON with global, per-vertex and per-edge sections, and
//! a CSV mirror of the per-vertex table.
//!
//! Reals are written with 17 significant digits so they read back
//! bit-for-bit; non-finite values are written as `null`.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::energy::MappingProblem;
use crate::geometry::Geometry;
use crate::solver::{Solution, SolveStatus};
use crate::vortex::VortexSolution;

pub(crate) fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

mod num {
    use serde::de::Deserializer;
    use serde::ser::{Error, Serializer};
    use serde::{Deserialize, Serialize};
    use serde_json::value::RawValue;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            RawValue::from_string(super::format_real(*x))
                .map_err(S::Error::custom)?
                .serialize(s)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

mod opt_num {
    use serde::de::Deserializer;
    use serde::ser::Serializer;
    use serde::Deserialize;

    pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => super::num::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Option::<f64>::deserialize(d)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlobalRecord {
    /// `vortex` or `mapping`.
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub total_vortex_number: Option<u64>,
    pub status: SolveStatus,
    pub iterations: usize,
    #[serde(with = "num")]
    pub final_grad_norm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c0: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<i32>,
    pub source_geometry: Geometry,
    pub target_geometry: Geometry,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexRecord {
    pub vertex: usize,
    #[serde(with = "num")]
    pub u: f64,
    #[serde(with = "num")]
    pub higgs_amplitude: f64,
    #[serde(with = "num")]
    pub theta_source: f64,
    /// `null` at pinned vertices.
    #[serde(with = "opt_num", default)]
    pub theta_target: Option<f64>,
    /// `null` when `u` is infeasible.
    #[serde(with = "opt_num", default)]
    pub theta_achieved: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub edge: usize,
    pub i: usize,
    pub j: usize,
    #[serde(with = "num")]
    pub l_source: f64,
    /// Rescaled length in the target geometry; `null` when infeasible.
    #[serde(with = "opt_num", default)]
    pub l_baptista: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub global: GlobalRecord,
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<EdgeRecord>,
}

fn tables(
    problem_source: &crate::geometry::DiscreteMetric,
    source_angles: &[f64],
    targets: &[Option<f64>],
    solution: &Solution,
) -> (Vec<VertexRecord>, Vec<EdgeRecord>) {
    let achieved = &solution.achieved_angles;
    let vertices = (0..source_angles.len())
        .map(|v| VertexRecord {
            vertex: v,
            u: solution.u[v],
            higgs_amplitude: solution.u[v].exp(),
            theta_source: source_angles[v],
            theta_target: targets[v],
            theta_achieved: achieved.get(v).copied(),
        })
        .collect();
    let target_lengths = solution.target_metric.as_ref().map(|m| m.lengths());
    let edges = problem_source
        .surface()
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &[i, j])| EdgeRecord {
            edge: e,
            i,
            j,
            l_source: problem_source.lengths()[e],
            l_baptista: target_lengths.map(|l| l[e]),
        })
        .collect();
    (vertices, edges)
}

impl SolutionFile {
    pub fn from_vortex(sol: &VortexSolution) -> Self {
        let (vertices, edges) = tables(
            &sol.source_metric,
            &sol.source_angles,
            &sol.target_angles,
            &sol.solution,
        );
        SolutionFile {
            global: GlobalRecord {
                mode: "vortex".into(),
                preset: Some(sol.kind.name().into()),
                total_vortex_number: Some(sol.total_vortex_number),
                status: sol.solution.status,
                iterations: sol.solution.iterations,
                final_grad_norm: sol.solution.final_grad_norm,
                c0: Some(sol.constants.c0),
                c: Some(sol.constants.c),
                source_geometry: sol.constants.source_geometry(),
                target_geometry: sol.constants.target_geometry(),
            },
            vertices,
            edges,
        }
    }

    /// Panics if the problem's source metric has no cone angles, which
    /// cannot happen for a constructed problem.
    pub fn from_mapping(problem: &MappingProblem, sol: &Solution) -> Self {
        let source = problem.source();
        let theta = source.cone_angles().expect("problem sources are admissible");
        let targets: Vec<Option<f64>> = (0..problem.vertex_count()).map(|v| problem.target_angle(v)).collect();
        let (vertices, edges) = tables(source, &theta, &targets, sol);
        SolutionFile {
            global: GlobalRecord {
                mode: "mapping".into(),
                preset: None,
                total_vortex_number: None,
                status: sol.status,
                iterations: sol.iterations,
                final_grad_norm: sol.final_grad_norm,
                c0: None,
                c: None,
                source_geometry: source.geometry(),
                target_geometry: problem.target_geometry(),
            },
            vertices,
            edges,
        }
    }

    pub fn u(&self) -> Vec<f64> {
        self.vertices.iter().map(|v| v.u).collect()
    }

    pub fn higgs_amplitude(&self) -> Vec<f64> {
        self.vertices.iter().map(|v| v.higgs_amplitude).collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("solution files serialize");
        s.push('\n');
        s
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, serde_json::Error> {
        serde_json::from_slice(bytes)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> io::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let opt = |x: Option<f64>| x.map(format_real).unwrap_or_default();
        out.write_record([
            "vertex",
            "u",
            "higgs_amplitude",
            "theta_source",
            "theta_target",
            "theta_achieved",
        ])?;
        for v in &self.vertices {
            out.write_record([
                v.vertex.to_string(),
                format_real(v.u),
                format_real(v.higgs_amplitude),
                format_real(v.theta_source),
                opt(v.theta_target),
                opt(v.theta_achieved),
            ])?;
        }
        out.flush()
    }

    /// Writes `solution.json` and `solution.csv` into `dir`, creating it.
    pub fn write_to_dir(&self, dir: &Path) -> io::Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let json = dir.join("solution.json");
        let csv = dir.join("solution.csv");
        fs::write(&json, self.to_json())?;
        self.write_csv(fs::File::create(&csv)?)?;
        Ok((json, csv))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SolutionFile {
        SolutionFile {
            global: GlobalRecord {
                mode: "vortex".into(),
                preset: Some("taubes".into()),
                total_vortex_number: Some(2),
                status: SolveStatus::Converged,
                iterations: 5,
                final_grad_norm: 3.0e-13,
                c0: Some(-1),
                c: Some(-1),
                source_geometry: Geometry::Hyperbolic,
                target_geometry: Geometry::Hyperbolic,
            },
            vertices: vec![VertexRecord {
                vertex: 0,
                u: -0.1f64.sqrt() / 3.0,
                higgs_amplitude: 0.1,
                theta_source: std::f64::consts::TAU,
                theta_target: None,
                theta_achieved: Some(1e-300),
            }],
            edges: vec![EdgeRecord {
                edge: 0,
                i: 0,
                j: 1,
                l_source: 0.1 + 0.2,
                l_baptista: None,
            }],
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let f = sample();
        let text = f.to_json();
        assert!(text.contains("\"N\": 2"));
        assert!(text.contains("\"theta_target\": null"));
        let back = SolutionFile::from_json(text.as_bytes()).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.vertices[0].u.to_bits(), f.vertices[0].u.to_bits());
    }

    #[test]
    fn nan_is_null() {
        let mut f = sample();
        f.global.final_grad_norm = f64::NAN;
        let back = SolutionFile::from_json(f.to_json().as_bytes()).unwrap();
        assert!(back.global.final_grad_norm.is_nan());
    }

    #[test]
    fn csv_header() {
        let mut buf = Vec::new();
        sample().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("vertex,u,higgs_amplitude,theta_source,theta_target,theta_achieved")
        );
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 6);
        assert_eq!(row[4], "");
    }
}
