//! Hybrid base complex.
//!
//! Separation surfaces are swept from every singularity and pseudo-singularity
//! across regular interior edges until they reach the boundary or another
//! singular / pseudo-singular edge. Together with the boundary surface and the
//! faces of non-hex cells they form the [`Frame`]. Flood-filling hex cells
//! across non-frame faces then yields the components; each non-hex cell is a
//! component of its own.

use std::collections::{HashMap, VecDeque};

use petgraph::unionfind::UnionFind;
use serde::Serialize;
use thiserror::Error;

use crate::mesh::{CellId, EdgeId, FaceId, HexDominantMesh, VertexId};
use crate::singularity::{collect_mask, HybridSingularityGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BaseComplexError {
    #[error("frame tracing did not reach a fixed point after {0} rounds")]
    NonTermination(usize),
}

/// Union of separation surfaces, singular curves and boundary, as element masks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    vertices: Vec<bool>,
    edges: Vec<bool>,
    faces: Vec<bool>,
}

impl Frame {
    pub fn empty(mesh: &HexDominantMesh) -> Self {
        Frame {
            vertices: vec![false; mesh.num_vertices()],
            edges: vec![false; mesh.num_edges()],
            faces: vec![false; mesh.num_faces()],
        }
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices[v.index()]
    }
    pub fn contains_edge(&self, e: EdgeId) -> bool {
        self.edges[e.index()]
    }
    pub fn contains_face(&self, f: FaceId) -> bool {
        self.faces[f.index()]
    }

    pub fn vertices(&self) -> Vec<VertexId> {
        collect_mask(&self.vertices)
    }
    pub fn edges(&self) -> Vec<EdgeId> {
        collect_mask(&self.edges)
    }
    pub fn faces(&self) -> Vec<FaceId> {
        collect_mask(&self.faces)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.iter().filter(|&&b| b).count()
    }
    pub fn num_edges(&self) -> usize {
        self.edges.iter().filter(|&&b| b).count()
    }
    pub fn num_faces(&self) -> usize {
        self.faces.iter().filter(|&&b| b).count()
    }

    /// Returns true if anything was added.
    pub fn add_vertex(&mut self, v: VertexId) -> bool {
        !std::mem::replace(&mut self.vertices[v.index()], true)
    }

    pub fn add_edge(&mut self, mesh: &HexDominantMesh, e: EdgeId) -> bool {
        let mut changed = !std::mem::replace(&mut self.edges[e.index()], true);
        for v in mesh.edge_vertices(e) {
            changed |= self.add_vertex(v);
        }
        changed
    }

    pub fn add_face(&mut self, mesh: &HexDominantMesh, f: FaceId) -> bool {
        let mut changed = !std::mem::replace(&mut self.faces[f.index()], true);
        for &e in &mesh.face(f).edges {
            changed |= self.add_edge(mesh, e);
        }
        changed
    }

    /// Edge-of-face and vertex-of-edge closure.
    pub fn is_closed(&self, mesh: &HexDominantMesh) -> bool {
        mesh.face_ids()
            .filter(|&f| self.contains_face(f))
            .all(|f| mesh.face(f).edges.iter().all(|&e| self.contains_edge(e)))
            && mesh.edge_ids().filter(|&e| self.contains_edge(e)).all(|e| {
                mesh.edge_vertices(e)
                    .iter()
                    .all(|&v| self.contains_vertex(v))
            })
    }
}

/// The edge at `v` that continues `e` straight on: the unique edge sharing no
/// face and no cell with `e`. For boundary edges only boundary edges and
/// boundary faces are considered, so the continuation runs along the surface.
pub fn straight_edge_continuation(
    mesh: &HexDominantMesh,
    e: EdgeId,
    v: VertexId,
) -> Option<EdgeId> {
    let boundary = mesh.is_boundary_edge(e);
    let faces_of = |x: EdgeId| {
        mesh.edge_faces(x)
            .iter()
            .copied()
            .filter(move |&f| !boundary || mesh.is_boundary_face(f))
    };
    let mut found = None;
    for &cand in mesh.vertex_edges(v) {
        if cand == e || (boundary && !mesh.is_boundary_edge(cand)) {
            continue;
        }
        let shares = faces_of(cand).any(|f| faces_of(e).any(|g| g == f))
            || mesh
                .edge_cells(cand)
                .iter()
                .any(|c| mesh.edge_cells(e).contains(c));
        if !shares {
            if found.is_some() {
                return None;
            }
            found = Some(cand);
        }
    }
    found
}

/// True when a separation surface may cross `e`: an interior edge with four
/// incident hex cells.
pub fn is_passable(mesh: &HexDominantMesh, e: EdgeId) -> bool {
    !mesh.is_boundary_edge(e)
        && mesh.edge_valence(e) == 4
        && mesh.edge_cells(e).iter().all(|&c| mesh.is_hex(c))
        && mesh.edge_faces(e).iter().all(|&f| mesh.face(f).is_quad())
}

/// The face continuing quad `f` across its edge `e`: the face around `e` that
/// shares no cell with `f`. `None` if `e` is not passable.
pub fn surface_face_continuation(mesh: &HexDominantMesh, f: FaceId, e: EdgeId) -> Option<FaceId> {
    if !mesh.face(f).is_quad() || !mesh.face(f).edges.contains(&e) || !is_passable(mesh, e) {
        return None;
    }
    let cells_f = mesh.face_cells(f);
    let mut found = None;
    for &g in mesh.edge_faces(e) {
        if g == f || mesh.face_cells(g).iter().any(|c| cells_f.contains(c)) {
            continue;
        }
        if found.is_some() {
            return None;
        }
        found = Some(g);
    }
    found
}

/// Builds the frame of the hybrid base complex.
///
/// Seeds: singular and pseudo-singular vertices and edges, faces of non-hex
/// cells, boundary faces. Every quad face around a seed edge starts a
/// separation surface, swept breadth-first across passable edges. Edge traces
/// then run straight from every singular / pseudo-singular vertex until they
/// reach a frame vertex or the continuation is undefined. Rounds repeat until
/// nothing changes.
pub fn trace_frame(
    mesh: &HexDominantMesh,
    hsg: &HybridSingularityGraph,
) -> Result<Frame, BaseComplexError> {
    let mut frame = Frame::empty(mesh);
    let mut stop_vertex = vec![false; mesh.num_vertices()];
    for &v in hsg
        .singular_vertices
        .iter()
        .chain(&hsg.pseudo_singular_vertices)
    {
        stop_vertex[v.index()] = true;
        frame.add_vertex(v);
    }
    let mut seed_edges: Vec<EdgeId> = hsg
        .singularity_edges()
        .chain(hsg.pseudo_singularities.iter().copied())
        .collect();
    seed_edges.sort_unstable();
    seed_edges.dedup();
    for &e in &seed_edges {
        frame.add_edge(mesh, e);
    }
    for f in mesh.face_ids() {
        if mesh.is_boundary_face(f) || mesh.face_cells(f).iter().any(|&c| !mesh.is_hex(c)) {
            frame.add_face(mesh, f);
        }
    }

    let mut swept = vec![false; mesh.num_faces()];
    let max_rounds = mesh.num_edges() + 1;
    for round in 0.. {
        if round >= max_rounds {
            return Err(BaseComplexError::NonTermination(round));
        }
        let mut changed = false;

        for &e in &seed_edges {
            for &f in mesh.edge_faces(e) {
                if swept[f.index()] || !mesh.face(f).is_quad() {
                    continue;
                }
                changed |= sweep_surface(mesh, f, &mut frame, &mut swept);
            }
        }

        for v in mesh.vertex_ids().filter(|v| stop_vertex[v.index()]) {
            for &e in mesh.vertex_edges(v) {
                if frame.contains_edge(e) {
                    continue;
                }
                changed |= trace_edges(mesh, e, v, &mut frame);
            }
        }

        if !changed {
            break;
        }
    }
    Ok(frame)
}

fn sweep_surface(
    mesh: &HexDominantMesh,
    seed: FaceId,
    frame: &mut Frame,
    swept: &mut [bool],
) -> bool {
    let mut changed = frame.add_face(mesh, seed);
    swept[seed.index()] = true;
    let mut queue = VecDeque::from([seed]);
    while let Some(g) = queue.pop_front() {
        for &e in &mesh.face(g).edges {
            if let Some(h) = surface_face_continuation(mesh, g, e) {
                if !swept[h.index()] {
                    swept[h.index()] = true;
                    changed |= frame.add_face(mesh, h);
                    queue.push_back(h);
                }
            }
        }
    }
    changed
}

fn trace_edges(mesh: &HexDominantMesh, first: EdgeId, from: VertexId, frame: &mut Frame) -> bool {
    let mut changed = false;
    let (mut e, mut v) = (first, from);
    loop {
        if frame.contains_edge(e) {
            break;
        }
        let w = mesh.other_vertex(e, v);
        let was_frame_vertex = frame.contains_vertex(w);
        changed |= frame.add_edge(mesh, e);
        if was_frame_vertex {
            break;
        }
        match straight_edge_continuation(mesh, e, w) {
            Some(n) => {
                e = n;
                v = w;
            }
            None => break,
        }
    }
    changed
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ComponentKind {
    Hex,
    NonHex,
}

#[derive(Clone, Debug, Serialize)]
pub struct Component {
    /// Sorted ascending.
    pub cells: Vec<CellId>,
    pub kind: ComponentKind,
    /// Number of surface patches (base complex faces) bounding the component.
    pub num_patches: usize,
    /// Hex component that is not bounded by six patches.
    pub is_ring: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HybridBaseComplex {
    pub components: Vec<Component>,
    /// Component index per mesh cell.
    pub cell_component: Vec<usize>,
    /// Mesh faces lying on component interfaces or the boundary.
    pub faces: Vec<FaceId>,
    /// Crease edges of at least one component.
    pub edges: Vec<EdgeId>,
    /// Vertices where at least three crease edges of one component meet.
    pub corners: Vec<VertexId>,
}

impl HybridBaseComplex {
    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn num_hex_components(&self) -> usize {
        self.components
            .iter()
            .filter(|c| c.kind == ComponentKind::Hex)
            .count()
    }

    pub fn num_nonhex_components(&self) -> usize {
        self.num_components() - self.num_hex_components()
    }
}

/// Splits the cells into components separated by frame faces.
pub fn partition_components(mesh: &HexDominantMesh, frame: &Frame) -> HybridBaseComplex {
    const UNSET: usize = usize::MAX;
    let mut cell_component = vec![UNSET; mesh.num_cells()];
    let mut members: Vec<Vec<CellId>> = Vec::new();
    for c in mesh.cell_ids() {
        if cell_component[c.index()] != UNSET {
            continue;
        }
        let id = members.len();
        cell_component[c.index()] = id;
        let mut cells = vec![c];
        if mesh.is_hex(c) {
            let mut queue = VecDeque::from([c]);
            while let Some(x) = queue.pop_front() {
                for &f in &mesh.cell(x).faces {
                    if frame.contains_face(f) {
                        continue;
                    }
                    for &y in mesh.face_cells(f) {
                        if cell_component[y.index()] == UNSET {
                            debug_assert!(mesh.is_hex(y));
                            cell_component[y.index()] = id;
                            cells.push(y);
                            queue.push_back(y);
                        }
                    }
                }
            }
        }
        cells.sort_unstable();
        members.push(cells);
    }

    let faces: Vec<FaceId> = mesh
        .face_ids()
        .filter(|&f| {
            let cs = mesh.face_cells(f);
            cs.len() == 1 || cell_component[cs[0].index()] != cell_component[cs[1].index()]
        })
        .collect();

    let mut crease = vec![false; mesh.num_edges()];
    let mut corner = vec![false; mesh.num_vertices()];
    let mut components = Vec::with_capacity(members.len());
    for (id, cells) in members.into_iter().enumerate() {
        let kind = if mesh.is_hex(cells[0]) {
            ComponentKind::Hex
        } else {
            ComponentKind::NonHex
        };
        let shape = component_shape(mesh, &cells, id, &cell_component);
        for &e in &shape.creases {
            crease[e.index()] = true;
        }
        let mut per_vertex: HashMap<VertexId, usize> = HashMap::new();
        for &e in &shape.creases {
            for v in mesh.edge_vertices(e) {
                *per_vertex.entry(v).or_insert(0) += 1;
            }
        }
        for (v, n) in per_vertex {
            if n >= 3 {
                corner[v.index()] = true;
            }
        }
        components.push(Component {
            is_ring: kind == ComponentKind::Hex && shape.num_patches != 6,
            cells,
            kind,
            num_patches: shape.num_patches,
        });
    }

    HybridBaseComplex {
        components,
        cell_component,
        faces,
        edges: collect_mask(&crease),
        corners: collect_mask(&corner),
    }
}

struct ComponentShape {
    num_patches: usize,
    creases: Vec<EdgeId>,
}

fn component_shape(
    mesh: &HexDominantMesh,
    cells: &[CellId],
    id: usize,
    cell_component: &[usize],
) -> ComponentShape {
    let mut local_valence: HashMap<EdgeId, usize> = HashMap::new();
    for &c in cells {
        for &e in &mesh.cell(c).edges {
            *local_valence.entry(e).or_insert(0) += 1;
        }
    }
    let mut surface: Vec<FaceId> = cells
        .iter()
        .flat_map(|&c| mesh.cell(c).faces.iter().copied())
        .filter(|&f| {
            mesh.face_cells(f)
                .iter()
                .filter(|c| cell_component[c.index()] == id)
                .count()
                == 1
        })
        .collect();
    surface.sort_unstable();
    surface.dedup();

    let mut faces_at_edge: HashMap<EdgeId, Vec<usize>> = HashMap::new();
    for (k, &f) in surface.iter().enumerate() {
        for &e in &mesh.face(f).edges {
            faces_at_edge.entry(e).or_default().push(k);
        }
    }
    let mut uf = UnionFind::<usize>::new(surface.len());
    let mut creases = Vec::new();
    for (&e, fs) in &faces_at_edge {
        if fs.len() == 2 && local_valence.get(&e) == Some(&2) {
            uf.union(fs[0], fs[1]);
        } else {
            creases.push(e);
        }
    }
    creases.sort_unstable();
    let mut labels = uf.into_labeling();
    labels.sort_unstable();
    labels.dedup();
    ComponentShape {
        num_patches: labels.len(),
        creases,
    }
}

/// Frame and components in one call.
pub fn extract_base_complex(
    mesh: &HexDominantMesh,
    hsg: &HybridSingularityGraph,
) -> Result<(Frame, HybridBaseComplex), BaseComplexError> {
    let frame = trace_frame(mesh, hsg)?;
    let complex = partition_components(mesh, &frame);
    Ok((frame, complex))
}
