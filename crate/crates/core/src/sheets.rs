//! Sheets: layers of hex cells swept out by classes of parallel edges.
//!
//! Two edges are parallel when they are opposite sides of one quad face. A
//! sheet is a transitive closure of that relation over quads of hex cells,
//! together with the hex cells touching its edges. Classification looks at
//! every vertex shared by two parallel edges of the same sheet; decomposition
//! splits self-intersecting sheets into subsheets that never meet themselves
//! inside one cell.

use std::collections::{BTreeMap, VecDeque};

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::base_complex::{straight_edge_continuation, ComponentKind, HybridBaseComplex};
use crate::mesh::{CellId, EdgeId, HexDominantMesh, VertexId};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SheetLevel {
    #[default]
    Mesh,
    BaseComplex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SheetFlags {
    pub perfect: bool,
    /// Parallel edges share a vertex through a non-hex cell.
    pub t1: bool,
    /// Parallel edges share a vertex in two face-adjacent hex cells.
    pub t2: bool,
    /// Parallel edges are neighbours inside one hex cell.
    pub t3: bool,
}

impl Default for SheetFlags {
    fn default() -> Self {
        SheetFlags {
            perfect: true,
            t1: false,
            t2: false,
            t3: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sheet {
    /// Sorted ascending.
    pub parallel_edges: Vec<EdgeId>,
    /// Hex cells containing at least one parallel edge, ascending.
    pub cells: Vec<CellId>,
    pub adjacent_nonhex: Vec<CellId>,
    pub unmatched_vertices: Vec<VertexId>,
    pub flags: SheetFlags,
    pub level: SheetLevel,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubSheet {
    pub parent: usize,
    pub parallel_edges: Vec<EdgeId>,
    pub cells: Vec<CellId>,
    pub adjacent_nonhex: Vec<CellId>,
    pub unmatched_vertices: Vec<VertexId>,
    pub flags: SheetFlags,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub flags: SheetFlags,
    pub unmatched_vertices: Vec<VertexId>,
}

/// True iff some quad face holds both edges and they share no vertex.
pub fn parallel(mesh: &HexDominantMesh, a: EdgeId, b: EdgeId) -> bool {
    a != b
        && mesh.shares_vertex(a, b).is_none()
        && mesh
            .edge_faces(a)
            .iter()
            .any(|&f| mesh.opposite_in_quad(f, a) == Some(b))
}

/// Edges parallel to `e` through quads of hex cells, ascending.
fn hex_parallels(mesh: &HexDominantMesh, e: EdgeId) -> Vec<EdgeId> {
    let mut out: Vec<EdgeId> = mesh
        .edge_faces(e)
        .iter()
        .filter(|&&f| mesh.face_cells(f).iter().any(|&c| mesh.is_hex(c)))
        .filter_map(|&f| mesh.opposite_in_quad(f, e))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn edge_in_hex(mesh: &HexDominantMesh, e: EdgeId) -> bool {
    mesh.edge_cells(e).iter().any(|&c| mesh.is_hex(c))
}

/// Mesh-level sheets, ordered by their smallest edge.
pub fn extract_sheets(mesh: &HexDominantMesh) -> Vec<Sheet> {
    let mut uf = UnionFind::<usize>::new(mesh.num_edges());
    union_parallels(mesh, &mut uf);
    sheets_from_classes(mesh, uf, SheetLevel::Mesh)
}

/// Block-level sheets: parallel classes are further merged along straight
/// edge chains that run through the interior of one hex component, so each
/// sheet spans whole base-complex blocks.
pub fn extract_block_sheets(mesh: &HexDominantMesh, complex: &HybridBaseComplex) -> Vec<Sheet> {
    let mut uf = UnionFind::<usize>::new(mesh.num_edges());
    union_parallels(mesh, &mut uf);
    let mut corner = vec![false; mesh.num_vertices()];
    for &v in &complex.corners {
        corner[v.index()] = true;
    }
    let hex_components = |e: EdgeId| {
        let mut ks: Vec<usize> = mesh
            .edge_cells(e)
            .iter()
            .map(|c| complex.cell_component[c.index()])
            .filter(|&k| complex.components[k].kind == ComponentKind::Hex)
            .collect();
        ks.sort_unstable();
        ks.dedup();
        ks
    };
    for e in mesh.edge_ids() {
        let ke = hex_components(e);
        if ke.is_empty() {
            continue;
        }
        for v in mesh.edge_vertices(e) {
            if corner[v.index()] {
                continue;
            }
            if let Some(n) = straight_edge_continuation(mesh, e, v) {
                if hex_components(n).iter().any(|k| ke.contains(k)) {
                    uf.union(e.index(), n.index());
                }
            }
        }
    }
    sheets_from_classes(mesh, uf, SheetLevel::BaseComplex)
}

/// Dispatches on `level`; `complex` is required for block level.
pub fn extract_sheets_at(
    mesh: &HexDominantMesh,
    level: SheetLevel,
    complex: &HybridBaseComplex,
) -> Vec<Sheet> {
    match level {
        SheetLevel::Mesh => extract_sheets(mesh),
        SheetLevel::BaseComplex => extract_block_sheets(mesh, complex),
    }
}

fn union_parallels(mesh: &HexDominantMesh, uf: &mut UnionFind<usize>) {
    for f in mesh.face_ids() {
        let face = mesh.face(f);
        if !face.is_quad() || !mesh.face_cells(f).iter().any(|&c| mesh.is_hex(c)) {
            continue;
        }
        uf.union(face.edges[0].index(), face.edges[2].index());
        uf.union(face.edges[1].index(), face.edges[3].index());
    }
}

fn sheets_from_classes(
    mesh: &HexDominantMesh,
    uf: UnionFind<usize>,
    level: SheetLevel,
) -> Vec<Sheet> {
    let labels = uf.into_labeling();
    // BTreeMap keyed by first edge id keeps the order deterministic.
    let mut classes: BTreeMap<usize, Vec<EdgeId>> = BTreeMap::new();
    let mut first_of_label: Vec<Option<usize>> = vec![None; labels.len()];
    for e in mesh.edge_ids().filter(|&e| edge_in_hex(mesh, e)) {
        let key = *first_of_label[labels[e.index()]].get_or_insert(e.index());
        classes.entry(key).or_default().push(e);
    }
    classes
        .into_values()
        .map(|edges| Sheet {
            cells: hex_cells_of(mesh, &edges),
            parallel_edges: edges,
            adjacent_nonhex: Vec::new(),
            unmatched_vertices: Vec::new(),
            flags: SheetFlags::default(),
            level,
        })
        .collect()
}

fn hex_cells_of(mesh: &HexDominantMesh, edges: &[EdgeId]) -> Vec<CellId> {
    let mut cells: Vec<CellId> = edges
        .iter()
        .flat_map(|&e| mesh.edge_cells(e).iter().copied())
        .filter(|&c| mesh.is_hex(c))
        .collect();
    cells.sort_unstable();
    cells.dedup();
    cells
}

fn nonhex_cells_of(mesh: &HexDominantMesh, edges: &[EdgeId]) -> Vec<CellId> {
    let mut cells: Vec<CellId> = edges
        .iter()
        .flat_map(|&e| mesh.edge_cells(e).iter().copied())
        .filter(|&c| !mesh.is_hex(c))
        .collect();
    cells.sort_unstable();
    cells.dedup();
    cells
}

/// Fills `adjacent_nonhex` with the non-hex cells touching the parallel edges.
pub fn augment_nonhex(mesh: &HexDominantMesh, sheet: &Sheet) -> Sheet {
    Sheet {
        adjacent_nonhex: nonhex_cells_of(mesh, &sheet.parallel_edges),
        ..sheet.clone()
    }
}

/// Classifies every vertex-sharing pair of parallel edges.
pub fn classify_sheet(mesh: &HexDominantMesh, sheet: &Sheet) -> Classification {
    classify_edges(mesh, &sheet.parallel_edges)
}

/// Classification of an arbitrary parallel edge set.
pub fn classify_edges(mesh: &HexDominantMesh, edges: &[EdgeId]) -> Classification {
    let mut member = vec![false; mesh.num_edges()];
    for &e in edges {
        member[e.index()] = true;
    }
    let mut flags = SheetFlags::default();
    let mut unmatched = Vec::new();
    let mut touched = vec![false; mesh.num_vertices()];
    for &e in edges {
        for v in mesh.edge_vertices(e) {
            if std::mem::replace(&mut touched[v.index()], true) {
                continue;
            }
            let at_v: Vec<EdgeId> = mesh
                .vertex_edges(v)
                .iter()
                .copied()
                .filter(|x| member[x.index()])
                .collect();
            if at_v.len() < 2 {
                continue;
            }
            unmatched.push(v);
            for (i, &a) in at_v.iter().enumerate() {
                for &b in &at_v[i + 1..] {
                    classify_pair(mesh, v, a, b, &mut flags);
                }
            }
        }
    }
    unmatched.sort_unstable();
    flags.perfect = unmatched.is_empty();
    Classification {
        flags,
        unmatched_vertices: unmatched,
    }
}

fn classify_pair(
    mesh: &HexDominantMesh,
    v: VertexId,
    a: EdgeId,
    b: EdgeId,
    flags: &mut SheetFlags,
) {
    let contains = |c: CellId, e: EdgeId| mesh.cell(c).edges.binary_search(&e).is_ok();
    if mesh
        .vertex_cells(v)
        .iter()
        .any(|&c| !mesh.is_hex(c) && (contains(c, a) || contains(c, b)))
    {
        flags.t1 = true;
    }
    let hex_a: Vec<CellId> = mesh
        .edge_cells(a)
        .iter()
        .copied()
        .filter(|&c| mesh.is_hex(c))
        .collect();
    let hex_b: Vec<CellId> = mesh
        .edge_cells(b)
        .iter()
        .copied()
        .filter(|&c| mesh.is_hex(c))
        .collect();
    if hex_a.iter().any(|c| hex_b.contains(c)) {
        flags.t3 = true;
    } else if hex_a
        .iter()
        .any(|&x| hex_b.iter().any(|&y| mesh.cells_share_face(x, y)))
    {
        flags.t2 = true;
    }
}

/// Sheet with `adjacent_nonhex`, flags and unmatched vertices filled in.
pub fn classified(mesh: &HexDominantMesh, sheet: &Sheet) -> Sheet {
    let mut out = augment_nonhex(mesh, sheet);
    let c = classify_sheet(mesh, &out);
    out.flags = c.flags;
    out.unmatched_vertices = c.unmatched_vertices;
    out
}

/// Splits a sheet into subsheets free of self-intersection.
///
/// Each pass grows a parallel edge set breadth-first from the smallest
/// unconsumed edge, refusing any edge that would sit next to a member inside
/// one hex cell. Edges of earlier passes may be reused. The subsheet's cells
/// are the hex cells whose eight corners are all reached by member edges
/// lying in that cell; members outside every such cell are dropped.
pub fn decompose_sheet(mesh: &HexDominantMesh, parent: usize, sheet: &Sheet) -> Vec<SubSheet> {
    let mut in_sheet = vec![false; mesh.num_edges()];
    for &e in &sheet.parallel_edges {
        in_sheet[e.index()] = true;
    }
    let mut consumed = vec![false; mesh.num_edges()];
    let mut out = Vec::new();
    for &seed in &sheet.parallel_edges {
        if consumed[seed.index()] {
            continue;
        }
        consumed[seed.index()] = true;
        let members = grow_subsheet(mesh, seed, &in_sheet);
        let cells = covered_cells(mesh, &members);
        let kept: Vec<EdgeId> = members
            .into_iter()
            .filter(|e| {
                mesh.edge_cells(*e)
                    .iter()
                    .any(|c| cells.binary_search(c).is_ok())
            })
            .collect();
        for &e in &kept {
            consumed[e.index()] = true;
        }
        if kept.is_empty() {
            continue;
        }
        let c = classify_edges(mesh, &kept);
        out.push(SubSheet {
            parent,
            adjacent_nonhex: nonhex_cells_of(mesh, &kept),
            parallel_edges: kept,
            cells,
            unmatched_vertices: c.unmatched_vertices,
            flags: c.flags,
        });
    }
    out
}

fn grow_subsheet(mesh: &HexDominantMesh, seed: EdgeId, in_sheet: &[bool]) -> Vec<EdgeId> {
    let mut member = vec![false; mesh.num_edges()];
    member[seed.index()] = true;
    let mut members = vec![seed];
    let mut queue = VecDeque::from([seed]);
    while let Some(e) = queue.pop_front() {
        for n in hex_parallels(mesh, e) {
            if member[n.index()] || !in_sheet[n.index()] {
                continue;
            }
            if neighbours_member_in_hex(mesh, n, &member) {
                continue;
            }
            member[n.index()] = true;
            members.push(n);
            queue.push_back(n);
        }
    }
    members.sort_unstable();
    members
}

/// Some hex cell holds `e` and a member edge sharing a vertex with it.
fn neighbours_member_in_hex(mesh: &HexDominantMesh, e: EdgeId, member: &[bool]) -> bool {
    mesh.edge_cells(e).iter().any(|&c| {
        mesh.is_hex(c)
            && mesh
                .cell(c)
                .edges
                .iter()
                .any(|&x| x != e && member[x.index()] && mesh.shares_vertex(x, e).is_some())
    })
}

fn covered_cells(mesh: &HexDominantMesh, members: &[EdgeId]) -> Vec<CellId> {
    let mut candidates: Vec<CellId> = members
        .iter()
        .flat_map(|&e| mesh.edge_cells(e).iter().copied())
        .filter(|&c| mesh.is_hex(c))
        .collect();
    candidates.sort_unstable();
    candidates.dedup();
    candidates
        .into_iter()
        .filter(|&c| {
            let cell = mesh.cell(c);
            let mut reached: Vec<VertexId> = cell
                .edges
                .iter()
                .filter(|e| members.binary_search(e).is_ok())
                .flat_map(|&e| mesh.edge_vertices(e))
                .collect();
            reached.sort_unstable();
            reached.dedup();
            reached == cell.vertices
        })
        .collect()
}
