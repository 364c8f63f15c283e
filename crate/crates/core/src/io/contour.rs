//! Level curves of a piecewise linear vertex field (marching triangles).

use thiserror::Error;

use crate::mesh::EmbeddedMesh;

/// Endpoints closer than this (mesh units) are joined.
const JOIN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContourError {
    #[error("contours need a planar mesh (all z = 0)")]
    NonPlanarMesh,
    #[error("field has {found} values, mesh has {expected} vertices")]
    FieldLength { expected: usize, found: usize },
    #[error("field value at vertex {0} is not finite")]
    NonFiniteField(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Polyline {
    pub points: Vec<[f64; 2]>,
    /// Mesh edge carrying each point.
    pub edges: Vec<usize>,
    pub closed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContourSet {
    pub levels: Vec<f64>,
    /// `lines[k]` are the chains of `levels[k]`.
    pub lines: Vec<Vec<Polyline>>,
}

impl ContourSet {
    pub fn is_empty(&self) -> bool {
        self.lines.iter().all(Vec::is_empty)
    }

    pub fn polyline_count(&self) -> usize {
        self.lines.iter().map(Vec::len).sum()
    }
}

/// `count` equidistant levels strictly between the extreme field values;
/// empty for a constant field.
pub fn default_levels(field: &[f64], count: usize) -> Vec<f64> {
    let lo = field.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = field.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Vec::new();
    }
    (1..=count)
        .map(|k| lo + (hi - lo) * k as f64 / (count + 1) as f64)
        .filter(|&c| c > lo && c < hi)
        .collect()
}

pub fn extract_contours(mesh: &EmbeddedMesh, field: &[f64], levels: &[f64]) -> Result<ContourSet, ContourError> {
    if !mesh.is_planar() {
        return Err(ContourError::NonPlanarMesh);
    }
    let n = mesh.surface.vertex_count();
    if field.len() != n {
        return Err(ContourError::FieldLength {
            expected: n,
            found: field.len(),
        });
    }
    if let Some(v) = field.iter().position(|x| !x.is_finite()) {
        return Err(ContourError::NonFiniteField(v));
    }
    let lines = levels.iter().map(|&c| level_curves(mesh, field, c)).collect();
    Ok(ContourSet {
        levels: levels.to_vec(),
        lines,
    })
}

fn crossing(mesh: &EmbeddedMesh, field: &[f64], e: usize, c: f64) -> Option<[f64; 2]> {
    let [a, b] = mesh.surface.edges()[e];
    let (fa, fb) = (field[a], field[b]);
    if (fa >= c) == (fb >= c) {
        return None;
    }
    let t = (c - fa) / (fb - fa);
    let (pa, pb) = (mesh.xy(a), mesh.xy(b));
    Some([pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])])
}

fn close(p: [f64; 2], q: [f64; 2]) -> bool {
    (p[0] - q[0]).abs() <= JOIN_TOL && (p[1] - q[1]).abs() <= JOIN_TOL
}

fn level_curves(mesh: &EmbeddedMesh, field: &[f64], c: f64) -> Vec<Polyline> {
    let s = &mesh.surface;
    let points: Vec<Option<[f64; 2]>> = (0..s.edge_count()).map(|e| crossing(mesh, field, e, c)).collect();
    // each crossed triangle contributes one segment between two crossed edges
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); s.edge_count()];
    for fe in s.face_edges() {
        let hit: Vec<usize> = fe.iter().copied().filter(|&e| points[e].is_some()).collect();
        if let [p, q] = hit[..] {
            adj[p].push(q);
            adj[q].push(p);
        }
    }

    let mut visited = vec![false; s.edge_count()];
    let mut chains: Vec<(Vec<usize>, bool)> = Vec::new();
    let walk = |start: usize, visited: &mut Vec<bool>| {
        let mut chain = vec![start];
        visited[start] = true;
        let mut cur = start;
        let closed;
        loop {
            let next = adj[cur].iter().copied().find(|&x| !visited[x]);
            match next {
                Some(x) => {
                    visited[x] = true;
                    chain.push(x);
                    cur = x;
                }
                None => {
                    closed = chain.len() > 2 && adj[cur].contains(&start);
                    break;
                }
            }
        }
        (chain, closed)
    };
    for e in 0..s.edge_count() {
        if adj[e].len() == 1 && !visited[e] {
            chains.push(walk(e, &mut visited));
        }
    }
    for e in 0..s.edge_count() {
        if !adj[e].is_empty() && !visited[e] {
            chains.push(walk(e, &mut visited));
        }
    }

    let mut lines: Vec<Polyline> = chains
        .into_iter()
        .map(|(edges, closed)| {
            let points = edges.iter().map(|&e| points[e].unwrap()).collect();
            dedup(Polyline { points, edges, closed })
        })
        .collect();
    join_open_chains(&mut lines);
    lines
}

/// Drops consecutive coincident points (field values equal to the level at a
/// vertex put several crossings on that vertex).
fn dedup(mut line: Polyline) -> Polyline {
    let mut keep = vec![true; line.points.len()];
    for k in 1..line.points.len() {
        if close(line.points[k - 1], line.points[k]) {
            keep[k] = false;
        }
    }
    let mut it = keep.iter();
    line.points.retain(|_| *it.next().unwrap());
    let mut it = keep.iter();
    line.edges.retain(|_| *it.next().unwrap());
    if line.closed && line.points.len() > 1 && close(line.points[0], *line.points.last().unwrap()) {
        line.points.pop();
        line.edges.pop();
    }
    line
}

fn join_open_chains(lines: &mut Vec<Polyline>) {
    loop {
        let mut joined = false;
        'outer: for i in 0..lines.len() {
            if lines[i].closed {
                continue;
            }
            if lines[i].points.len() > 2 && close(lines[i].points[0], *lines[i].points.last().unwrap()) {
                let l = &mut lines[i];
                l.points.pop();
                l.edges.pop();
                l.closed = true;
                joined = true;
                break;
            }
            for j in 0..lines.len() {
                if i == j || lines[j].closed {
                    continue;
                }
                let (a0, a1) = (lines[i].points[0], *lines[i].points.last().unwrap());
                let (b0, b1) = (lines[j].points[0], *lines[j].points.last().unwrap());
                if !(close(a1, b0) || close(a1, b1) || close(a0, b1) || close(a0, b0)) {
                    continue;
                }
                let mut base = lines[i].clone();
                let mut other = lines[j].clone();
                if close(a1, b0) {
                } else if close(a1, b1) {
                    other.points.reverse();
                    other.edges.reverse();
                } else if close(a0, b1) {
                    std::mem::swap(&mut base, &mut other);
                } else {
                    base.points.reverse();
                    base.edges.reverse();
                }
                base.points.extend(other.points.into_iter().skip(1));
                base.edges.extend(other.edges.into_iter().skip(1));
                let (lo, hi) = (i.min(j), i.max(j));
                lines.remove(hi);
                lines[lo] = base;
                joined = true;
                break 'outer;
            }
        }
        if !joined {
            return;
        }
    }
}
