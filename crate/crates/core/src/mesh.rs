//! Triangulated surfaces with vertex coordinates.

use std::sync::Arc;

use crate::surface::TriangulatedSurface;

#[derive(Clone, Debug)]
pub struct EmbeddedMesh {
    pub surface: Arc<TriangulatedSurface>,
    pub positions: Vec<[f64; 3]>,
}

impl EmbeddedMesh {
    pub fn new(surface: Arc<TriangulatedSurface>, positions: Vec<[f64; 3]>) -> Self {
        assert_eq!(surface.vertex_count(), positions.len(), "one position per vertex");
        Self { surface, positions }
    }

    /// Euclidean distances between edge endpoints, in canonical edge order.
    pub fn edge_lengths(&self) -> Vec<f64> {
        self.surface
            .edges()
            .iter()
            .map(|&[a, b]| distance(self.positions[a], self.positions[b]))
            .collect()
    }

    /// True when every `z` coordinate is zero.
    pub fn is_planar(&self) -> bool {
        self.positions.iter().all(|p| p[2] == 0.0)
    }

    pub fn xy(&self, v: usize) -> [f64; 2] {
        [self.positions[v][0], self.positions[v][1]]
    }

    pub fn scaled(&self, s: f64) -> EmbeddedMesh {
        let positions = self.positions.iter().map(|p| p.map(|x| x * s)).collect();
        EmbeddedMesh::new(self.surface.clone(), positions)
    }
}

pub fn distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}
