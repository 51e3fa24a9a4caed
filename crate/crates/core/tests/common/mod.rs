//! Independent brute-force oracles shared by the integration tests. They
//! favour plain scans and set iteration over the library's indexed shortcuts.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use hexstruct_core::mesh::{CellId, EdgeId, FaceId, HexDominantMesh, VertexId};
use hexstruct_core::synth::{synth_grid, synth_inject_nonhex, Recipe};
use hexstruct_core::SheetFlags;

pub fn endpoints(m: &HexDominantMesh, e: EdgeId) -> BTreeSet<VertexId> {
    m.edge_vertices(e).into_iter().collect()
}

pub fn cell_has_edge(m: &HexDominantMesh, c: CellId, e: EdgeId) -> bool {
    m.cell(c).edges.contains(&e)
}

/// Opposite edge pairs of every quad face that belongs to a hex cell.
pub fn hex_quad_parallel_pairs(m: &HexDominantMesh) -> Vec<(EdgeId, EdgeId)> {
    let mut out = Vec::new();
    for c in m.cell_ids().filter(|&c| m.is_hex(c)) {
        for &f in &m.cell(c).faces {
            let es = &m.face(f).edges;
            if es.len() == 4 {
                out.push((es[0], es[2]));
                out.push((es[1], es[3]));
            }
        }
    }
    out
}

/// Parallel classes by label propagation until nothing changes.
pub fn closure_classes(m: &HexDominantMesh) -> BTreeSet<BTreeSet<EdgeId>> {
    let in_hex: BTreeSet<EdgeId> = m
        .cell_ids()
        .filter(|&c| m.is_hex(c))
        .flat_map(|c| m.cell(c).edges.clone())
        .collect();
    let mut label: BTreeMap<EdgeId, u32> = in_hex.iter().map(|&e| (e, e.0)).collect();
    let pairs = hex_quad_parallel_pairs(m);
    loop {
        let mut changed = false;
        for &(a, b) in &pairs {
            let l = label[&a].min(label[&b]);
            for x in [a, b] {
                if label[&x] != l {
                    label.insert(x, l);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut classes: BTreeMap<u32, BTreeSet<EdgeId>> = BTreeMap::new();
    for (e, l) in label {
        classes.entry(l).or_default().insert(e);
    }
    classes.into_values().collect()
}

#[derive(Debug, PartialEq, Eq)]
pub struct OracleClass {
    pub perfect: bool,
    pub t1: bool,
    pub t2: bool,
    pub t3: bool,
    pub unmatched: BTreeSet<VertexId>,
}

impl OracleClass {
    pub fn matches(&self, f: &SheetFlags) -> bool {
        (self.perfect, self.t1, self.t2, self.t3) == (f.perfect, f.t1, f.t2, f.t3)
    }
}

/// Enumerates all vertex-sharing pairs of the edge set and classifies each.
pub fn brute_classify(m: &HexDominantMesh, edges: &[EdgeId]) -> OracleClass {
    let mut out = OracleClass {
        perfect: true,
        t1: false,
        t2: false,
        t3: false,
        unmatched: BTreeSet::new(),
    };
    let faces_of = |c: CellId| -> BTreeSet<FaceId> { m.cell(c).faces.iter().copied().collect() };
    for (i, &a) in edges.iter().enumerate() {
        for &b in &edges[i + 1..] {
            let shared: Vec<VertexId> = endpoints(m, a)
                .intersection(&endpoints(m, b))
                .copied()
                .collect();
            let Some(&v) = shared.first() else { continue };
            out.unmatched.insert(v);
            for c in m.cell_ids() {
                if !m.is_hex(c)
                    && m.cell(c).vertices.contains(&v)
                    && (cell_has_edge(m, c, a) || cell_has_edge(m, c, b))
                {
                    out.t1 = true;
                }
            }
            let hexes_a: Vec<CellId> = m
                .cell_ids()
                .filter(|&c| m.is_hex(c) && cell_has_edge(m, c, a))
                .collect();
            let hexes_b: Vec<CellId> = m
                .cell_ids()
                .filter(|&c| m.is_hex(c) && cell_has_edge(m, c, b))
                .collect();
            let common = hexes_a.iter().any(|c| hexes_b.contains(c));
            if common {
                out.t3 = true;
            } else {
                for &x in &hexes_a {
                    for &y in &hexes_b {
                        if x != y && !faces_of(x).is_disjoint(&faces_of(y)) {
                            out.t2 = true;
                        }
                    }
                }
            }
        }
    }
    out.perfect = out.unmatched.is_empty();
    out
}

/// Number of edges of `a` that are opposite, in some quad, to an edge of `b`.
pub fn parallel_count(m: &HexDominantMesh, a: &[EdgeId], b: &[EdgeId]) -> usize {
    a.iter()
        .filter(|&&x| {
            m.face_ids().any(|f| {
                let es = &m.face(f).edges;
                es.len() == 4
                    && es
                        .iter()
                        .position(|&y| y == x)
                        .is_some_and(|k| b.contains(&es[(k + 2) % 4]))
            })
        })
        .count()
}

/// Grid plus a sequence of recipe attempts; failed attempts are skipped.
pub fn random_mesh(dims: [usize; 3], recipes: &[(u8, usize)]) -> HexDominantMesh {
    let mut m = synth_grid(dims[0], dims[1], dims[2]).unwrap();
    for &(kind, seed) in recipes {
        let cell = seed % m.num_cells();
        let r = match kind % 4 {
            0 => Recipe::SplitHex { cell },
            1 => Recipe::GluePrism { cell },
            2 => Recipe::GluePyramid { cell },
            _ => Recipe::Doublet { cell },
        };
        if m.is_hex(CellId::from(cell)) {
            if let Ok(next) = synth_inject_nonhex(&m, r) {
                m = next;
            }
        }
    }
    m
}

/// Frame rebuilt with naive set iteration: surfaces grown to a fixed point
/// from the quads around every seed edge, then straight edge traces from
/// every stop vertex.
pub fn naive_frame(
    m: &HexDominantMesh,
) -> (BTreeSet<FaceId>, BTreeSet<EdgeId>, BTreeSet<VertexId>) {
    let touches_nonhex = |e: EdgeId| m.edge_cells(e).iter().any(|&c| !m.is_hex(c));
    let pseudo: BTreeSet<EdgeId> = m.edge_ids().filter(|&e| touches_nonhex(e)).collect();
    let singular: BTreeSet<EdgeId> = m
        .edge_ids()
        .filter(|&e| m.is_irregular(e) && !touches_nonhex(e))
        .collect();
    let seeds: BTreeSet<EdgeId> = pseudo.union(&singular).copied().collect();

    let mut stop: BTreeSet<VertexId> = pseudo.iter().flat_map(|&e| endpoints(m, e)).collect();
    let class = |e: EdgeId| (m.edge_valence(e), m.is_boundary_edge(e));
    for &e in &singular {
        for v in endpoints(m, e) {
            if stop.contains(&v) {
                continue;
            }
            let same = singular
                .iter()
                .filter(|&&x| class(x) == class(e) && endpoints(m, x).contains(&v))
                .count();
            if same != 2 {
                stop.insert(v);
            }
        }
    }

    let passable = |e: EdgeId| {
        !m.is_boundary_edge(e)
            && m.edge_cells(e).len() == 4
            && m.edge_cells(e).iter().all(|&c| m.is_hex(c))
            && m.edge_faces(e).iter().all(|&f| m.face(f).edges.len() == 4)
    };
    let mut surface: BTreeSet<FaceId> = seeds
        .iter()
        .flat_map(|&e| m.edge_faces(e).iter().copied())
        .filter(|&f| m.face(f).edges.len() == 4)
        .collect();
    loop {
        let mut grown = surface.clone();
        for &f in &surface {
            for &e in &m.face(f).edges {
                if !passable(e) {
                    continue;
                }
                for &g in m.edge_faces(e) {
                    let disjoint = m.face_cells(g).iter().all(|c| !m.face_cells(f).contains(c));
                    if g != f && disjoint {
                        grown.insert(g);
                    }
                }
            }
        }
        if grown == surface {
            break;
        }
        surface = grown;
    }
    let mut faces: BTreeSet<FaceId> = m
        .face_ids()
        .filter(|&f| m.face_cells(f).len() == 1 || m.face_cells(f).iter().any(|&c| !m.is_hex(c)))
        .collect();
    faces.extend(surface);
    let mut edges: BTreeSet<EdgeId> = faces
        .iter()
        .flat_map(|&f| m.face(f).edges.clone())
        .collect();
    edges.extend(&seeds);
    let mut verts: BTreeSet<VertexId> = edges.iter().flat_map(|&e| endpoints(m, e)).collect();
    verts.extend(&stop);

    let straight = |e: EdgeId, w: VertexId| -> Option<EdgeId> {
        let boundary = m.is_boundary_edge(e);
        let fs = |x: EdgeId| -> BTreeSet<FaceId> {
            m.edge_faces(x)
                .iter()
                .copied()
                .filter(|&f| !boundary || m.face_cells(f).len() == 1)
                .collect()
        };
        let cs = |x: EdgeId| -> BTreeSet<CellId> { m.edge_cells(x).iter().copied().collect() };
        let cands: Vec<EdgeId> = m
            .edge_ids()
            .filter(|&x| x != e && endpoints(m, x).contains(&w))
            .filter(|&x| !boundary || m.is_boundary_edge(x))
            .filter(|&x| fs(x).is_disjoint(&fs(e)) && cs(x).is_disjoint(&cs(e)))
            .collect();
        (cands.len() == 1).then(|| cands[0])
    };
    for &v in &stop.clone() {
        let start: Vec<EdgeId> = m
            .edge_ids()
            .filter(|&e| endpoints(m, e).contains(&v))
            .collect();
        for e0 in start {
            let (mut e, mut at) = (e0, v);
            while !edges.contains(&e) {
                let w = *endpoints(m, e).iter().find(|&&x| x != at).unwrap();
                let was = verts.contains(&w);
                edges.insert(e);
                verts.insert(at);
                verts.insert(w);
                if was {
                    break;
                }
                match straight(e, w) {
                    Some(n) => {
                        e = n;
                        at = w;
                    }
                    None => break,
                }
            }
        }
    }
    (faces, edges, verts)
}
