//! Indexed hex-dominant volume mesh with full topological adjacency.
//!
//! A [`HexDominantMesh`] is built once from raw cell descriptions (each cell a
//! closed shell of face loops) and is immutable afterwards. Faces shared by two
//! cells are stored once; edges are deduplicated by their vertex pair. Handles
//! of every element kind are dense and assigned in first-appearance order, so
//! identical input always produces identical handles.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

macro_rules! define_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }

        impl From<usize> for $name {
            #[inline]
            fn from(i: usize) -> Self {
                $name(i as u32)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

define_id!(
    /// Dense vertex handle in `[0, num_vertices)`.
    VertexId
);
define_id!(
    /// Dense edge handle in `[0, num_edges)`.
    EdgeId
);
define_id!(
    /// Dense face handle in `[0, num_faces)`.
    FaceId
);
define_id!(
    /// Dense cell handle in `[0, num_cells)`.
    CellId
);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum CellKind {
    Hex,
    NonHex,
}

/// One input cell: a closed shell given as face loops over global vertex indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawCell {
    pub faces: Vec<Vec<usize>>,
}

impl RawCell {
    pub fn new(faces: Vec<Vec<usize>>) -> Self {
        RawCell { faces }
    }

    /// Hexahedron from eight corners in the usual VTK / MEDIT order
    /// (bottom loop 0..4, top loop 4..8, `i` above `i - 4`).
    pub fn hexahedron(v: [usize; 8]) -> Self {
        RawCell::new(vec![
            vec![v[0], v[3], v[2], v[1]],
            vec![v[4], v[5], v[6], v[7]],
            vec![v[0], v[1], v[5], v[4]],
            vec![v[1], v[2], v[6], v[5]],
            vec![v[2], v[3], v[7], v[6]],
            vec![v[3], v[0], v[4], v[7]],
        ])
    }

    pub fn tetrahedron(v: [usize; 4]) -> Self {
        RawCell::new(vec![
            vec![v[0], v[2], v[1]],
            vec![v[0], v[1], v[3]],
            vec![v[1], v[2], v[3]],
            vec![v[0], v[3], v[2]],
        ])
    }

    /// Triangular prism (wedge): triangles `0,1,2` and `3,4,5`, with `i` joined to `i + 3`.
    pub fn prism(v: [usize; 6]) -> Self {
        RawCell::new(vec![
            vec![v[0], v[1], v[2]],
            vec![v[3], v[5], v[4]],
            vec![v[0], v[3], v[4], v[1]],
            vec![v[1], v[4], v[5], v[2]],
            vec![v[2], v[5], v[3], v[0]],
        ])
    }

    /// Pyramid with quad base `0..4` and apex `4`.
    pub fn pyramid(v: [usize; 5]) -> Self {
        RawCell::new(vec![
            vec![v[0], v[3], v[2], v[1]],
            vec![v[0], v[1], v[4]],
            vec![v[1], v[2], v[4]],
            vec![v[2], v[3], v[4]],
            vec![v[3], v[0], v[4]],
        ])
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MeshError {
    #[error("face {face:?} is shared by more than two cells")]
    NonManifoldFace { face: Vec<usize> },
    #[error("faces of cell {cell} do not form a closed shell")]
    OpenShell { cell: usize },
    #[error("cell {cell} references vertex {vertex}, but only {num_vertices} vertices exist")]
    DanglingIndex {
        cell: usize,
        vertex: usize,
        num_vertices: usize,
    },
    #[error("cell {cell} has a face with fewer than three distinct vertices")]
    DegenerateFace { cell: usize },
    #[error("unsupported recipe: {0}")]
    UnsupportedRecipe(String),
}

#[derive(Clone, Debug)]
pub struct Face {
    /// Canonical loop: the lexicographically smallest rotation/reflection.
    pub vertices: Vec<VertexId>,
    /// `edges[i]` joins `vertices[i]` and `vertices[(i + 1) % n]`.
    pub edges: Vec<EdgeId>,
}

impl Face {
    pub fn is_quad(&self) -> bool {
        self.vertices.len() == 4
    }
}

#[derive(Clone, Debug)]
pub struct Cell {
    pub kind: CellKind,
    pub faces: Vec<FaceId>,
    /// Sorted ascending.
    pub edges: Vec<EdgeId>,
    /// Sorted ascending.
    pub vertices: Vec<VertexId>,
}

#[derive(Clone, Debug)]
pub struct HexDominantMesh {
    positions: Vec<[f64; 3]>,
    edges: Vec<[VertexId; 2]>,
    faces: Vec<Face>,
    cells: Vec<Cell>,
    vertex_edges: Vec<Vec<EdgeId>>,
    vertex_faces: Vec<Vec<FaceId>>,
    vertex_cells: Vec<Vec<CellId>>,
    edge_faces: Vec<Vec<FaceId>>,
    edge_cells: Vec<Vec<CellId>>,
    face_cells: Vec<Vec<CellId>>,
    vertex_boundary: Vec<bool>,
    edge_boundary: Vec<bool>,
    face_boundary: Vec<bool>,
    non_conforming: bool,
}

fn canonical_loop(lp: &[usize]) -> Vec<usize> {
    let n = lp.len();
    let mut best: Option<Vec<usize>> = None;
    for start in 0..n {
        for dir in [1isize, -1] {
            let cand: Vec<usize> = (0..n)
                .map(|k| {
                    let idx = (start as isize + dir * k as isize).rem_euclid(n as isize) as usize;
                    lp[idx]
                })
                .collect();
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    best.unwrap_or_default()
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Builds the indexed mesh from raw cells.
///
/// Faces are matched across cells by their vertex set. A face that finds no
/// partner is a boundary face. Cells are classified `Hex` purely
/// combinatorially: 8 vertices, 6 quad faces, every vertex on exactly 3 faces.
pub fn build_mesh(
    positions: Vec<[f64; 3]>,
    raw_cells: &[RawCell],
) -> Result<HexDominantMesh, MeshError> {
    let nv = positions.len();
    let mut face_lookup: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut face_loops: Vec<Vec<usize>> = Vec::new();
    let mut face_cells: Vec<Vec<CellId>> = Vec::new();
    let mut cell_faces: Vec<Vec<FaceId>> = Vec::with_capacity(raw_cells.len());

    for (ci, raw) in raw_cells.iter().enumerate() {
        let mut fids = Vec::with_capacity(raw.faces.len());
        let mut shell_edges: HashMap<(usize, usize), u32> = HashMap::new();
        for lp in &raw.faces {
            if let Some(&v) = lp.iter().find(|&&v| v >= nv) {
                return Err(MeshError::DanglingIndex {
                    cell: ci,
                    vertex: v,
                    num_vertices: nv,
                });
            }
            let mut set = lp.clone();
            set.sort_unstable();
            set.dedup();
            if set.len() < 3 || set.len() != lp.len() {
                return Err(MeshError::DegenerateFace { cell: ci });
            }
            for k in 0..lp.len() {
                *shell_edges
                    .entry(edge_key(lp[k], lp[(k + 1) % lp.len()]))
                    .or_insert(0) += 1;
            }
            let fid = match face_lookup.get(&set) {
                Some(&f) => f,
                None => {
                    let f = face_loops.len();
                    face_lookup.insert(set.clone(), f);
                    face_loops.push(canonical_loop(lp));
                    face_cells.push(Vec::new());
                    f
                }
            };
            if face_cells[fid].last() == Some(&CellId::from(ci)) {
                return Err(MeshError::OpenShell { cell: ci });
            }
            face_cells[fid].push(CellId::from(ci));
            if face_cells[fid].len() > 2 {
                return Err(MeshError::NonManifoldFace { face: set });
            }
            fids.push(FaceId::from(fid));
        }
        if raw.faces.len() < 4 || shell_edges.values().any(|&c| c != 2) {
            return Err(MeshError::OpenShell { cell: ci });
        }
        cell_faces.push(fids);
    }

    // Edges in order of first appearance over faces.
    let mut edge_lookup: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges: Vec<[VertexId; 2]> = Vec::new();
    let mut faces: Vec<Face> = Vec::with_capacity(face_loops.len());
    for lp in &face_loops {
        let n = lp.len();
        let mut fe = Vec::with_capacity(n);
        for k in 0..n {
            let key = edge_key(lp[k], lp[(k + 1) % n]);
            let eid = *edge_lookup.entry(key).or_insert_with(|| {
                edges.push([VertexId::from(key.0), VertexId::from(key.1)]);
                edges.len() - 1
            });
            fe.push(EdgeId::from(eid));
        }
        faces.push(Face {
            vertices: lp.iter().map(|&v| VertexId::from(v)).collect(),
            edges: fe,
        });
    }

    let mut cells = Vec::with_capacity(cell_faces.len());
    for fids in cell_faces {
        let mut ce: Vec<EdgeId> = fids
            .iter()
            .flat_map(|f| faces[f.index()].edges.iter().copied())
            .collect();
        ce.sort_unstable();
        ce.dedup();
        let mut cv: Vec<VertexId> = fids
            .iter()
            .flat_map(|f| faces[f.index()].vertices.iter().copied())
            .collect();
        cv.sort_unstable();
        cv.dedup();
        let is_hex = cv.len() == 8
            && fids.len() == 6
            && fids.iter().all(|f| faces[f.index()].is_quad())
            && cv.iter().all(|v| {
                fids.iter()
                    .filter(|f| faces[f.index()].vertices.contains(v))
                    .count()
                    == 3
            });
        cells.push(Cell {
            kind: if is_hex {
                CellKind::Hex
            } else {
                CellKind::NonHex
            },
            faces: fids,
            edges: ce,
            vertices: cv,
        });
    }

    let ne = edges.len();
    let mut vertex_edges = vec![Vec::new(); nv];
    let mut vertex_faces = vec![Vec::new(); nv];
    let mut vertex_cells = vec![Vec::new(); nv];
    let mut edge_faces = vec![Vec::new(); ne];
    let mut edge_cells = vec![Vec::new(); ne];
    for (ei, e) in edges.iter().enumerate() {
        for v in e {
            vertex_edges[v.index()].push(EdgeId::from(ei));
        }
    }
    for (fi, f) in faces.iter().enumerate() {
        for v in &f.vertices {
            vertex_faces[v.index()].push(FaceId::from(fi));
        }
        for e in &f.edges {
            edge_faces[e.index()].push(FaceId::from(fi));
        }
    }
    for (ci, c) in cells.iter().enumerate() {
        for v in &c.vertices {
            vertex_cells[v.index()].push(CellId::from(ci));
        }
        for e in &c.edges {
            edge_cells[e.index()].push(CellId::from(ci));
        }
    }

    let face_boundary: Vec<bool> = face_cells.iter().map(|c| c.len() == 1).collect();
    let mut edge_boundary = vec![false; ne];
    let mut vertex_boundary = vec![false; nv];
    let mut boundary_faces_per_edge = vec![0u32; ne];
    for (fi, f) in faces.iter().enumerate() {
        if face_boundary[fi] {
            for e in &f.edges {
                edge_boundary[e.index()] = true;
                boundary_faces_per_edge[e.index()] += 1;
            }
            for v in &f.vertices {
                vertex_boundary[v.index()] = true;
            }
        }
    }
    // A conforming mesh closes its boundary surface: every boundary edge lies on
    // exactly two boundary faces. Hanging vertices and unmatched faces break that.
    let non_conforming = boundary_faces_per_edge
        .iter()
        .zip(&edge_boundary)
        .any(|(&n, &b)| b && n != 2);

    Ok(HexDominantMesh {
        positions,
        edges,
        faces,
        cells,
        vertex_edges,
        vertex_faces,
        vertex_cells,
        edge_faces,
        edge_cells,
        face_cells,
        vertex_boundary,
        edge_boundary,
        face_boundary,
        non_conforming,
    })
}

impl HexDominantMesh {
    pub fn num_vertices(&self) -> usize {
        self.positions.len()
    }
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }
    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.num_vertices()).map(VertexId::from)
    }
    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.num_edges()).map(EdgeId::from)
    }
    pub fn face_ids(&self) -> impl Iterator<Item = FaceId> {
        (0..self.num_faces()).map(FaceId::from)
    }
    pub fn cell_ids(&self) -> impl Iterator<Item = CellId> {
        (0..self.num_cells()).map(CellId::from)
    }

    pub fn positions(&self) -> &[[f64; 3]] {
        &self.positions
    }
    pub fn position(&self, v: VertexId) -> [f64; 3] {
        self.positions[v.index()]
    }

    pub fn edge_vertices(&self, e: EdgeId) -> [VertexId; 2] {
        self.edges[e.index()]
    }
    pub fn face(&self, f: FaceId) -> &Face {
        &self.faces[f.index()]
    }
    pub fn cell(&self, c: CellId) -> &Cell {
        &self.cells[c.index()]
    }
    pub fn cell_kind(&self, c: CellId) -> CellKind {
        self.cells[c.index()].kind
    }
    pub fn is_hex(&self, c: CellId) -> bool {
        self.cell_kind(c) == CellKind::Hex
    }

    pub fn vertex_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.vertex_edges[v.index()]
    }
    pub fn vertex_faces(&self, v: VertexId) -> &[FaceId] {
        &self.vertex_faces[v.index()]
    }
    pub fn vertex_cells(&self, v: VertexId) -> &[CellId] {
        &self.vertex_cells[v.index()]
    }
    pub fn edge_faces(&self, e: EdgeId) -> &[FaceId] {
        &self.edge_faces[e.index()]
    }
    pub fn edge_cells(&self, e: EdgeId) -> &[CellId] {
        &self.edge_cells[e.index()]
    }
    pub fn face_cells(&self, f: FaceId) -> &[CellId] {
        &self.face_cells[f.index()]
    }

    pub fn is_boundary_vertex(&self, v: VertexId) -> bool {
        self.vertex_boundary[v.index()]
    }
    pub fn is_boundary_edge(&self, e: EdgeId) -> bool {
        self.edge_boundary[e.index()]
    }
    pub fn is_boundary_face(&self, f: FaceId) -> bool {
        self.face_boundary[f.index()]
    }

    /// True when some boundary edge does not lie on exactly two boundary faces.
    pub fn is_non_conforming(&self) -> bool {
        self.non_conforming
    }

    /// Number of cells around `e`.
    pub fn edge_valence(&self, e: EdgeId) -> usize {
        self.edge_cells[e.index()].len()
    }

    /// Number of cells around `v`. Exposed for completeness; nothing downstream uses it.
    pub fn vertex_valence(&self, v: VertexId) -> usize {
        self.vertex_cells[v.index()].len()
    }

    /// Interior edges are regular at valence 4, boundary edges at valence 2.
    pub fn is_irregular(&self, e: EdgeId) -> bool {
        let n = self.edge_valence(e);
        if self.is_boundary_edge(e) {
            n != 2
        } else {
            n != 4
        }
    }

    /// True when `e` is incident to at least one non-hex cell.
    pub fn touches_nonhex(&self, e: EdgeId) -> bool {
        self.edge_cells(e).iter().any(|&c| !self.is_hex(c))
    }

    pub fn other_vertex(&self, e: EdgeId, v: VertexId) -> VertexId {
        let [a, b] = self.edges[e.index()];
        if a == v {
            b
        } else {
            a
        }
    }

    /// The edge joining `a` and `b`, if any.
    pub fn find_edge(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        self.vertex_edges(a)
            .iter()
            .copied()
            .find(|&e| self.other_vertex(e, a) == b)
    }

    pub fn shares_vertex(&self, a: EdgeId, b: EdgeId) -> Option<VertexId> {
        let [a0, a1] = self.edges[a.index()];
        let [b0, b1] = self.edges[b.index()];
        if a0 == b0 || a0 == b1 {
            Some(a0)
        } else if a1 == b0 || a1 == b1 {
            Some(a1)
        } else {
            None
        }
    }

    /// For a quad face containing `e`, the edge opposite to it.
    pub fn opposite_in_quad(&self, f: FaceId, e: EdgeId) -> Option<EdgeId> {
        let face = self.face(f);
        if !face.is_quad() {
            return None;
        }
        let k = face.edges.iter().position(|&x| x == e)?;
        Some(face.edges[(k + 2) % 4])
    }

    pub fn num_hex_cells(&self) -> usize {
        self.cells
            .iter()
            .filter(|c| c.kind == CellKind::Hex)
            .count()
    }

    /// Cells adjacent to `c` through a shared face.
    pub fn face_neighbors(&self, c: CellId) -> impl Iterator<Item = CellId> + '_ {
        self.cell(c)
            .faces
            .iter()
            .filter_map(move |&f| self.face_cells(f).iter().copied().find(|&o| o != c))
    }

    pub fn cells_share_face(&self, a: CellId, b: CellId) -> bool {
        self.cell(a)
            .faces
            .iter()
            .any(|&f| self.face_cells(f).contains(&b))
    }

    /// Face loops of `c` as global vertex indices, in the cell's face order.
    pub fn cell_face_loops(&self, c: CellId) -> Vec<Vec<usize>> {
        self.cell(c)
            .faces
            .iter()
            .map(|&f| self.face(f).vertices.iter().map(|v| v.index()).collect())
            .collect()
    }

    /// Sub-mesh induced by `cells`. Returns the mesh plus the map from
    /// sub-mesh vertex index to parent vertex. Vertex order is preserved.
    pub fn submesh(&self, cells: &[CellId]) -> (HexDominantMesh, Vec<VertexId>) {
        let mut sorted = cells.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut used = vec![false; self.num_vertices()];
        for &c in &sorted {
            for v in &self.cell(c).vertices {
                used[v.index()] = true;
            }
        }
        let mut remap = vec![usize::MAX; self.num_vertices()];
        let mut back = Vec::new();
        let mut positions = Vec::new();
        for (i, &u) in used.iter().enumerate() {
            if u {
                remap[i] = back.len();
                back.push(VertexId::from(i));
                positions.push(self.positions[i]);
            }
        }
        let raw: Vec<RawCell> = sorted
            .iter()
            .map(|&c| {
                RawCell::new(
                    self.cell_face_loops(c)
                        .into_iter()
                        .map(|lp| lp.into_iter().map(|v| remap[v]).collect())
                        .collect(),
                )
            })
            .collect();
        let sub = build_mesh(positions, &raw)
            .expect("cells of a valid mesh always form a valid sub-mesh");
        (sub, back)
    }
}
