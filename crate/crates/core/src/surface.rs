//! Combinatorics of oriented triangulated surfaces, possibly with boundary.
//!
//! Edges are unoriented and numbered lexicographically by their canonical
//! `(min, max)` vertex pair. Inside a face `(i, j, k)` the corner at position
//! `m` is opposite the edge joining the other two corners, so `face_edges[f][0]`
//! is the edge `jk`, `face_edges[f][1]` is `ki` and `face_edges[f][2]` is `ij`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

macro_rules! index_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub usize);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

index_newtype!(
    /// Dense vertex index.
    VertexId
);
index_newtype!(
    /// Dense edge index, lexicographic on the canonical vertex pair.
    EdgeId
);
index_newtype!(
    /// Dense face index, in input order.
    FaceId
);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("face {face} references vertex {vertex}, but the surface has {vertex_count} vertices")]
    VertexOutOfRange {
        face: usize,
        vertex: usize,
        vertex_count: usize,
    },
    #[error("face {face} repeats a vertex: {corners:?}")]
    DegenerateFace { face: usize, corners: [usize; 3] },
    #[error("edge ({0}, {1}) is shared by more than two faces")]
    NonManifoldEdge(usize, usize),
    #[error("faces {0} and {1} traverse their shared edge in the same direction")]
    InconsistentOrientation(usize, usize),
    #[error("vertex {0} is not used by any face")]
    IsolatedVertex(usize),
    #[error("the link of vertex {0} is neither a single path nor a single cycle")]
    NonDiskLink(usize),
    #[error("the surface has no faces")]
    Empty,
}

/// One entry of a vertex star: an incident face and the corner position
/// (0, 1 or 2) the vertex occupies in it.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct StarEntry {
    pub face: FaceId,
    pub corner: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangulatedSurface {
    vertex_count: usize,
    faces: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    face_edges: Vec<[usize; 3]>,
    edge_faces: Vec<(usize, Option<usize>)>,
    boundary_vertex: Vec<bool>,
    stars: Vec<Vec<StarEntry>>,
}

impl TriangulatedSurface {
    /// Builds and validates a surface from oriented vertex triples.
    pub fn new(vertex_count: usize, faces: Vec<[usize; 3]>) -> Result<Self, SurfaceError> {
        if faces.is_empty() {
            return Err(SurfaceError::Empty);
        }
        for (f, tri) in faces.iter().enumerate() {
            for &v in tri {
                if v >= vertex_count {
                    return Err(SurfaceError::VertexOutOfRange {
                        face: f,
                        vertex: v,
                        vertex_count,
                    });
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[2] == tri[0] {
                return Err(SurfaceError::DegenerateFace { face: f, corners: *tri });
            }
        }

        // canonical pair -> list of (face, traversed from min to max)
        let mut incidence: BTreeMap<(usize, usize), Vec<(usize, bool)>> = BTreeMap::new();
        for (f, tri) in faces.iter().enumerate() {
            for m in 0..3 {
                let a = tri[(m + 1) % 3];
                let b = tri[(m + 2) % 3];
                incidence.entry((a.min(b), a.max(b))).or_default().push((f, a < b));
            }
        }

        let mut edges = Vec::with_capacity(incidence.len());
        let mut edge_faces = Vec::with_capacity(incidence.len());
        let mut edge_index = BTreeMap::new();
        for (&(a, b), inc) in &incidence {
            match inc.as_slice() {
                [(f, _)] => edge_faces.push((*f, None)),
                [(f, df), (g, dg)] => {
                    if df == dg {
                        return Err(SurfaceError::InconsistentOrientation(*f, *g));
                    }
                    edge_faces.push((*f, Some(*g)));
                }
                _ => return Err(SurfaceError::NonManifoldEdge(a, b)),
            }
            edge_index.insert((a, b), edges.len());
            edges.push([a, b]);
        }

        let face_edges: Vec<[usize; 3]> = faces
            .iter()
            .map(|tri| {
                std::array::from_fn(|m| {
                    let a = tri[(m + 1) % 3];
                    let b = tri[(m + 2) % 3];
                    edge_index[&(a.min(b), a.max(b))]
                })
            })
            .collect();

        let mut incident: Vec<Vec<(usize, usize)>> = vec![Vec::new(); vertex_count];
        for (f, tri) in faces.iter().enumerate() {
            for (m, &v) in tri.iter().enumerate() {
                incident[v].push((f, m));
            }
        }

        let mut boundary_vertex = vec![false; vertex_count];
        for (e, &(_, other)) in edge_faces.iter().enumerate() {
            if other.is_none() {
                boundary_vertex[edges[e][0]] = true;
                boundary_vertex[edges[e][1]] = true;
            }
        }

        let mut stars = Vec::with_capacity(vertex_count);
        for (v, inc) in incident.iter().enumerate() {
            if inc.is_empty() {
                return Err(SurfaceError::IsolatedVertex(v));
            }
            stars.push(order_star(v, inc, &faces)?);
        }

        Ok(Self {
            vertex_count,
            faces,
            edges,
            face_edges,
            edge_faces,
            boundary_vertex,
            stars,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn face(&self, f: FaceId) -> [usize; 3] {
        self.faces[f.0]
    }

    /// Canonical `(min, max)` vertex pairs in edge order.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> [usize; 2] {
        self.edges[e.0]
    }

    /// Edge ids of each face, `[m]` being the edge opposite corner `m`.
    pub fn face_edges(&self) -> &[[usize; 3]] {
        &self.face_edges
    }

    /// The one or two faces incident to an edge.
    pub fn edge_faces(&self, e: EdgeId) -> (FaceId, Option<FaceId>) {
        let (f, g) = self.edge_faces[e.0];
        (FaceId(f), g.map(FaceId))
    }

    pub fn find_edge(&self, a: usize, b: usize) -> Option<EdgeId> {
        let key = [a.min(b), a.max(b)];
        self.edges.binary_search(&key).ok().map(EdgeId)
    }

    pub fn is_boundary_edge(&self, e: EdgeId) -> bool {
        self.edge_faces[e.0].1.is_none()
    }

    pub fn is_boundary_vertex(&self, v: VertexId) -> bool {
        self.boundary_vertex[v.0]
    }

    pub fn boundary_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.boundary_vertex
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(v, _)| VertexId(v))
    }

    pub fn boundary_edge_count(&self) -> usize {
        self.edge_faces.iter().filter(|(_, g)| g.is_none()).count()
    }

    pub fn is_closed(&self) -> bool {
        self.edge_faces.iter().all(|(_, g)| g.is_some())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    /// Faces around `v` in cyclic order (interior vertex) or from one
    /// boundary edge to the other (boundary vertex).
    pub fn vertex_star(&self, v: VertexId) -> &[StarEntry] {
        &self.stars[v.0]
    }

    /// Vertices adjacent to `v`, in star order.
    pub fn neighbors(&self, v: VertexId) -> Vec<usize> {
        let star = &self.stars[v.0];
        let mut out: Vec<usize> = star.iter().map(|s| self.faces[s.face.0][(s.corner + 1) % 3]).collect();
        if self.boundary_vertex[v.0] {
            let last = star[star.len() - 1];
            out.push(self.faces[last.face.0][(last.corner + 2) % 3]);
        }
        out
    }

    /// Boundary cycles as vertex loops, each traversed along the orientation
    /// of its adjacent face. Loops are listed by their smallest edge id.
    pub fn boundary_loops(&self) -> Vec<Vec<usize>> {
        // directed boundary edge a -> b as traversed by its only face
        let mut next: BTreeMap<usize, usize> = BTreeMap::new();
        for (f, tri) in self.faces.iter().enumerate() {
            for m in 0..3 {
                let e = self.face_edges[f][m];
                if self.edge_faces[e].1.is_none() {
                    next.insert(tri[(m + 1) % 3], tri[(m + 2) % 3]);
                }
            }
        }
        let mut loops = Vec::new();
        let mut visited = vec![false; self.vertex_count];
        for (e, &(_, other)) in self.edge_faces.iter().enumerate() {
            if other.is_some() || visited[self.edges[e][0]] {
                continue;
            }
            let start = self.edges[e][0];
            let mut lp = vec![start];
            visited[start] = true;
            let mut cur = next[&start];
            while cur != start {
                visited[cur] = true;
                lp.push(cur);
                cur = next[&cur];
            }
            loops.push(lp);
        }
        loops
    }
}

/// Orders the faces around `v` by walking its link. In face `(v, a, b)` the
/// link edge runs `a -> b`; consistent orientation makes each link vertex
/// start and end at most one link edge.
fn order_star(v: usize, incident: &[(usize, usize)], faces: &[[usize; 3]]) -> Result<Vec<StarEntry>, SurfaceError> {
    let mut by_start: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    let mut ends: BTreeMap<usize, usize> = BTreeMap::new();
    for &(f, m) in incident {
        let a = faces[f][(m + 1) % 3];
        let b = faces[f][(m + 2) % 3];
        if by_start.insert(a, (f, m)).is_some() || ends.insert(b, f).is_some() {
            return Err(SurfaceError::NonDiskLink(v));
        }
    }
    let path_starts: Vec<usize> = by_start.keys().copied().filter(|a| !ends.contains_key(a)).collect();
    let first = match path_starts.as_slice() {
        [] => incident.iter().map(|&(f, _)| f).min().map(|f| {
            let m = incident.iter().find(|&&(g, _)| g == f).unwrap().1;
            faces[f][(m + 1) % 3]
        }),
        [a] => Some(*a),
        _ => return Err(SurfaceError::NonDiskLink(v)),
    }
    .expect("incident list is non-empty");

    let mut star = Vec::with_capacity(incident.len());
    let mut cur = first;
    while let Some(&(f, m)) = by_start.get(&cur) {
        star.push(StarEntry {
            face: FaceId(f),
            corner: m,
        });
        cur = faces[f][(m + 2) % 3];
        if cur == first || star.len() > incident.len() {
            break;
        }
    }
    if star.len() != incident.len() {
        return Err(SurfaceError::NonDiskLink(v));
    }
    Ok(star)
}
