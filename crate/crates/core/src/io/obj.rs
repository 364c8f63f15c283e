//! Wavefront OBJ meshes: `v` and triangular `f` records only.

use std::io::{self, Write};
use std::sync::Arc;

use thiserror::Error;

use crate::mesh::EmbeddedMesh;
use crate::surface::{SurfaceError, TriangulatedSurface};

#[derive(Debug, Error)]
pub enum ObjError {
    #[error("line {line}: {message}")]
    MalformedRecord { line: usize, message: String },
    #[error("line {line}: face has {corners} corners, only triangles are supported")]
    NonTriangleFace { line: usize, corners: usize },
    #[error("line {line}: non-finite vertex coordinate")]
    NonFiniteCoordinate { line: usize },
    #[error("edge {a}-{b} has zero length")]
    ZeroLengthEdge { a: usize, b: usize },
    #[error("invalid surface: {0}")]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn malformed(line: usize, message: impl Into<String>) -> ObjError {
    ObjError::MalformedRecord {
        line,
        message: message.into(),
    }
}

/// Resolves an OBJ vertex reference (`7`, `7/2`, `7//3`, `-1`) given the
/// number of vertices read so far.
fn vertex_ref(token: &str, seen: usize, line: usize) -> Result<usize, ObjError> {
    let head = token.split('/').next().unwrap_or("");
    let k: i64 = head
        .parse()
        .map_err(|_| malformed(line, format!("bad vertex reference `{token}`")))?;
    let idx = if k > 0 {
        k - 1
    } else if k < 0 {
        seen as i64 + k
    } else {
        -1
    };
    if idx < 0 || idx as usize >= seen {
        return Err(malformed(
            line,
            format!("vertex index {k} out of range ({seen} vertices defined)"),
        ));
    }
    Ok(idx as usize)
}

pub fn parse_obj(bytes: &[u8]) -> Result<EmbeddedMesh, ObjError> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1;
        malformed(line, "not valid UTF-8")
    })?;
    let mut positions: Vec<[f64; 3]> = Vec::new();
    let mut faces: Vec<[usize; 3]> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = content.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let coords: Vec<&str> = tokens.collect();
                if !(2..=4).contains(&coords.len()) {
                    return Err(malformed(line, "vertex needs 2 or 3 coordinates"));
                }
                let mut p = [0.0f64; 3];
                // a fourth value is the optional homogeneous weight
                for (k, c) in coords.iter().take(3).enumerate() {
                    p[k] = c
                        .parse()
                        .map_err(|_| malformed(line, format!("bad coordinate `{c}`")))?;
                }
                if !p.iter().all(|x| x.is_finite()) {
                    return Err(ObjError::NonFiniteCoordinate { line });
                }
                positions.push(p);
            }
            Some("f") => {
                let refs: Vec<&str> = tokens.collect();
                if refs.len() != 3 {
                    if refs.len() < 3 {
                        return Err(malformed(line, "face needs at least 3 vertices"));
                    }
                    return Err(ObjError::NonTriangleFace {
                        line,
                        corners: refs.len(),
                    });
                }
                let mut f = [0; 3];
                for (k, r) in refs.iter().enumerate() {
                    f[k] = vertex_ref(r, positions.len(), line)?;
                }
                faces.push(f);
            }
            _ => {}
        }
    }
    let surface = TriangulatedSurface::new(positions.len(), faces)?;
    let mesh = EmbeddedMesh::new(Arc::new(surface), positions);
    for (e, l) in mesh.edge_lengths().into_iter().enumerate() {
        if !(l > 0.0) {
            let [a, b] = mesh.surface.edges()[e];
            return Err(ObjError::ZeroLengthEdge { a, b });
        }
    }
    Ok(mesh)
}

pub fn write_obj<W: Write>(mesh: &EmbeddedMesh, mut w: W) -> io::Result<()> {
    for p in &mesh.positions {
        writeln!(w, "v {} {} {}", p[0], p[1], p[2])?;
    }
    for f in mesh.surface.faces() {
        writeln!(w, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
    }
    Ok(())
}
