//! Mesh generators used by tests, benchmarks and the sample data.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::linalg::{solve_shifted, Factorization, SparseSymmetric};
use crate::mesh::EmbeddedMesh;
use crate::surface::TriangulatedSurface;

fn build(positions: Vec<[f64; 3]>, faces: Vec<[usize; 3]>) -> EmbeddedMesh {
    let surface = TriangulatedSurface::new(positions.len(), faces).expect("generator produces a valid surface");
    EmbeddedMesh::new(Arc::new(surface), positions)
}

/// Disk of radius `radius` with the combinatorics of the regular triangular
/// lattice inside a hexagon of `rings` rings: the outer ring is spread evenly
/// over the circle and interior vertices are placed by a uniform-weight
/// harmonic (Tutte) embedding, which keeps stars near the center close to
/// equilateral. Interior vertices have valence six; vertex 0 is the center
/// and vertices are ordered by ring, then by polar angle.
pub fn disk(radius: f64, rings: usize) -> EmbeddedMesh {
    assert!(rings >= 1);
    let k = rings as i64;
    let ring = |a: i64, b: i64| a.abs().max(b.abs()).max((a + b).abs());
    let mut nodes: Vec<(i64, f64, i64, i64)> = Vec::new();
    for a in -k..=k {
        for b in -k..=k {
            let r = ring(a, b);
            if r <= k {
                let (x, y) = (a as f64 + 0.5 * b as f64, 0.5 * 3f64.sqrt() * b as f64);
                nodes.push((r, y.atan2(x).rem_euclid(2.0 * PI), a, b));
            }
        }
    }
    nodes.sort_by(|p, q| p.0.cmp(&q.0).then(p.1.total_cmp(&q.1)));
    let index: HashMap<(i64, i64), usize> = nodes.iter().enumerate().map(|(i, n)| ((n.2, n.3), i)).collect();
    let mut faces = Vec::new();
    for a in -k..k {
        for b in -k..k {
            for tri in [
                [(a, b), (a + 1, b), (a, b + 1)],
                [(a + 1, b), (a + 1, b + 1), (a, b + 1)],
            ] {
                if let (Some(&p), Some(&q), Some(&r)) = (index.get(&tri[0]), index.get(&tri[1]), index.get(&tri[2])) {
                    faces.push([p, q, r]);
                }
            }
        }
    }
    let n = nodes.len();
    let surface = TriangulatedSurface::new(n, faces).expect("lattice hexagon is a disk");

    let mut positions = vec![[0.0; 3]; n];
    let first_outer = n - 6 * rings;
    for j in 0..6 * rings {
        let t = 2.0 * PI * j as f64 / (6 * rings) as f64;
        positions[first_outer + j] = [radius * t.cos(), radius * t.sin(), 0.0];
    }
    if first_outer > 0 {
        let mut trips = Vec::new();
        let mut rhs = vec![[0.0; 2]; first_outer];
        for &[p, q] in surface.edges() {
            for (v, w) in [(p, q), (q, p)] {
                if v >= first_outer {
                    continue;
                }
                trips.push((v, v, 1.0));
                if w < first_outer {
                    if v > w {
                        trips.push((v, w, -1.0));
                    }
                } else {
                    rhs[v][0] += positions[w][0];
                    rhs[v][1] += positions[w][1];
                }
            }
        }
        let lap = SparseSymmetric::from_lower_triplets(first_outer, trips);
        for c in 0..2 {
            let b: Vec<f64> = rhs.iter().map(|r| r[c]).collect();
            let x = solve_shifted(&lap, 0.0, &b, Factorization::Cholesky)
                .expect("graph Laplacian with boundary is definite");
            for v in 0..first_outer {
                positions[v][c] = x[v];
            }
        }
    }
    EmbeddedMesh::new(Arc::new(surface), positions)
}

/// Grid of `n × n` squares covering `[-side/2, side/2]²`, split along
/// alternating diagonals. Vertex `(i, j)` with `i + j` even has valence
/// eight and all incident angles equal to π/4.
pub fn square(side: f64, n: usize) -> EmbeddedMesh {
    assert!(n >= 1);
    let idx = |i: usize, j: usize| j * (n + 1) + i;
    let h = side / n as f64;
    let positions = (0..=n)
        .flat_map(|j| (0..=n).map(move |i| [-side / 2.0 + i as f64 * h, -side / 2.0 + j as f64 * h, 0.0]))
        .collect();
    let mut faces = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            if (i + j) % 2 == 0 {
                faces.push([a, b, c]);
                faces.push([a, c, d]);
            } else {
                faces.push([a, b, d]);
                faces.push([b, c, d]);
            }
        }
    }
    build(positions, faces)
}

pub fn tetrahedron() -> EmbeddedMesh {
    let positions = vec![[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
    build(positions, vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]])
}

pub fn octahedron() -> EmbeddedMesh {
    let positions = vec![
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ];
    let faces = vec![
        [0, 2, 4],
        [2, 1, 4],
        [1, 3, 4],
        [3, 0, 4],
        [2, 0, 5],
        [1, 2, 5],
        [3, 1, 5],
        [0, 3, 5],
    ];
    build(positions, faces)
}

pub fn icosahedron() -> EmbeddedMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let positions = raw.iter().map(|&p| normalize(p)).collect();
    let faces = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    build(positions, faces)
}

fn normalize(p: [f64; 3]) -> [f64; 3] {
    let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    p.map(|x| x / n)
}

/// Unit-sphere icosahedron refined `levels` times by midpoint subdivision
/// (12, 42, 162, ... vertices).
pub fn icosphere(levels: usize) -> EmbeddedMesh {
    let base = icosahedron();
    let mut positions = base.positions.clone();
    let mut faces = base.surface.faces().to_vec();
    for _ in 0..levels {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, positions: &mut Vec<[f64; 3]>| {
            let key = (a.min(b), a.max(b));
            *mid.entry(key).or_insert_with(|| {
                let (p, q) = (positions[a], positions[b]);
                positions.push(normalize([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                positions.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut positions);
            let bc = midpoint(b, c, &mut positions);
            let ca = midpoint(c, a, &mut positions);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    build(positions, faces)
}

/// Torus of revolution with an `m × n` quad grid (`m, n ≥ 3`).
pub fn torus(m: usize, n: usize, major: f64, minor: f64) -> EmbeddedMesh {
    assert!(m >= 3 && n >= 3);
    let idx = |i: usize, j: usize| (j % n) * m + i % m;
    let mut positions = Vec::with_capacity(m * n);
    for j in 0..n {
        let phi = 2.0 * PI * j as f64 / n as f64;
        for i in 0..m {
            let theta = 2.0 * PI * i as f64 / m as f64;
            let r = major + minor * theta.cos();
            positions.push([r * phi.cos(), r * phi.sin(), minor * theta.sin()]);
        }
    }
    let mut faces = Vec::new();
    for j in 0..n {
        for i in 0..m {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    build(positions, faces)
}

/// Closed genus-two surface: two `m × n` torus grids, each with one
/// square removed, glued along the square holes. Combinatorial only.
pub fn genus_two(m: usize, n: usize) -> TriangulatedSurface {
    assert!(m >= 4 && n >= 4);
    let k = m * n;
    let idx = |i: usize, j: usize| (j % n) * m + i % m;
    let grid_faces = |skip: (usize, usize)| {
        let mut faces = Vec::new();
        for j in 0..n {
            for i in 0..m {
                if (i, j) == skip {
                    continue;
                }
                let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
                faces.push([a, b, c]);
                faces.push([a, c, d]);
            }
        }
        faces
    };
    let hole = [idx(0, 0), idx(1, 0), idx(1, 1), idx(0, 1)];
    let mut faces = grid_faces((0, 0));
    // the second copy is reversed, so identifying hole corners one-to-one
    // makes the shared edges run in opposite directions
    let relabel = |v: usize| {
        if hole.contains(&v) {
            v
        } else {
            k + v - hole.iter().filter(|&&h| h < v).count()
        }
    };
    for [a, b, c] in grid_faces((0, 0)) {
        faces.push([relabel(a), relabel(c), relabel(b)]);
    }
    let used = 2 * k - 4;
    TriangulatedSurface::new(used, faces).expect("glued tori form a closed surface")
}
