//! Singularity graphs.
//!
//! Two flavours are extracted from a mesh:
//!
//! * the hybrid singularity graph, where every edge touching a non-hex cell is
//!   its own pseudo-singularity and only hex-only irregular edges form chains;
//! * the valence-based singularity graph (VSG), which chains every irregular
//!   edge, non-hex neighbours or not.
//!
//! Chains are maximal simple paths of edges sharing valence and boundary class.
//! A chain stops at a vertex where the number of selected edges of its class is
//! not exactly two (an end or a branch), and at caller-supplied stop vertices.

use serde::Serialize;

use crate::mesh::{EdgeId, HexDominantMesh, VertexId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Singularity {
    /// Edges in path order.
    pub edges: Vec<EdgeId>,
    /// Path vertices; `edges.len() + 1` entries, first == last when closed.
    pub vertices: Vec<VertexId>,
    pub valence: usize,
    pub on_boundary: bool,
    pub closed: bool,
}

impl Singularity {
    /// End vertices of an open chain.
    pub fn ends(&self) -> Option<[VertexId; 2]> {
        if self.closed {
            None
        } else {
            Some([self.vertices[0], *self.vertices.last().unwrap()])
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct HybridSingularityGraph {
    pub singularities: Vec<Singularity>,
    /// One entry per edge incident to a non-hex cell, ascending.
    pub pseudo_singularities: Vec<EdgeId>,
    pub singular_vertices: Vec<VertexId>,
    pub pseudo_singular_vertices: Vec<VertexId>,
}

impl HybridSingularityGraph {
    pub fn singularity_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.singularities
            .iter()
            .flat_map(|s| s.edges.iter().copied())
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ValenceSingularityGraph {
    pub singularities: Vec<Singularity>,
    pub singular_vertices: Vec<VertexId>,
}

impl ValenceSingularityGraph {
    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.singularities
            .iter()
            .flat_map(|s| s.edges.iter().copied())
    }

    /// Per-edge index of the owning singularity.
    pub fn edge_owner(&self, num_edges: usize) -> Vec<Option<usize>> {
        let mut owner = vec![None; num_edges];
        for (i, s) in self.singularities.iter().enumerate() {
            for e in &s.edges {
                owner[e.index()] = Some(i);
            }
        }
        owner
    }
}

fn class_of(mesh: &HexDominantMesh, e: EdgeId) -> (usize, bool) {
    (mesh.edge_valence(e), mesh.is_boundary_edge(e))
}

/// The unique selected edge continuing `e` through `v`, if the chain may continue.
fn continuation(
    mesh: &HexDominantMesh,
    selected: &[bool],
    stop: &dyn Fn(VertexId) -> bool,
    e: EdgeId,
    v: VertexId,
) -> Option<EdgeId> {
    if stop(v) {
        return None;
    }
    let class = class_of(mesh, e);
    let mut same = mesh
        .vertex_edges(v)
        .iter()
        .copied()
        .filter(|&x| selected[x.index()] && class_of(mesh, x) == class);
    let (a, b, c) = (same.next(), same.next(), same.next());
    match (a, b, c) {
        (Some(a), Some(b), None) => Some(if a == e { b } else { a }),
        _ => None,
    }
}

/// Partitions the selected edges into maximal chains.
pub(crate) fn build_chains(
    mesh: &HexDominantMesh,
    selected: &[bool],
    stop: &dyn Fn(VertexId) -> bool,
) -> Vec<Singularity> {
    let mut visited = vec![false; mesh.num_edges()];
    let mut chains = Vec::new();
    for e0 in mesh.edge_ids() {
        if !selected[e0.index()] || visited[e0.index()] {
            continue;
        }
        let [a, b] = mesh.edge_vertices(e0);
        visited[e0.index()] = true;

        // Forward through b, then (for open chains) backward through a.
        let mut forward = Vec::new();
        let mut closed = false;
        let (mut cur, mut v) = (e0, b);
        while let Some(n) = continuation(mesh, selected, stop, cur, v) {
            if n == e0 {
                closed = true;
                break;
            }
            if visited[n.index()] {
                break;
            }
            visited[n.index()] = true;
            forward.push(n);
            v = mesh.other_vertex(n, v);
            cur = n;
        }

        let mut backward = Vec::new();
        let mut start = a;
        if !closed {
            let mut cur = e0;
            while let Some(n) = continuation(mesh, selected, stop, cur, start) {
                if visited[n.index()] {
                    break;
                }
                visited[n.index()] = true;
                backward.push(n);
                start = mesh.other_vertex(n, start);
                cur = n;
            }
        }

        let mut edges: Vec<EdgeId> = backward.iter().rev().copied().collect();
        edges.push(e0);
        edges.extend(forward);
        let mut vertices = walk_vertices(mesh, &edges, start);
        if !closed && vertices.first() > vertices.last() {
            edges.reverse();
            vertices.reverse();
        }
        let (valence, on_boundary) = class_of(mesh, e0);
        chains.push(Singularity {
            edges,
            vertices,
            valence,
            on_boundary,
            closed,
        });
    }
    chains
}

fn walk_vertices(mesh: &HexDominantMesh, edges: &[EdgeId], start: VertexId) -> Vec<VertexId> {
    let mut out = Vec::with_capacity(edges.len() + 1);
    let mut v = start;
    out.push(v);
    for &e in edges {
        v = mesh.other_vertex(e, v);
        out.push(v);
    }
    out
}

/// Hybrid singularity graph: pseudo-singularities for non-hex edges, chains of
/// hex-only irregular edges that stop at pseudo-singular vertices.
pub fn extract_hybrid_singularity_graph(mesh: &HexDominantMesh) -> HybridSingularityGraph {
    let pseudo: Vec<EdgeId> = mesh
        .edge_ids()
        .filter(|&e| mesh.touches_nonhex(e))
        .collect();
    let mut pseudo_vertex = vec![false; mesh.num_vertices()];
    for &e in &pseudo {
        for v in mesh.edge_vertices(e) {
            pseudo_vertex[v.index()] = true;
        }
    }
    let selected: Vec<bool> = mesh
        .edge_ids()
        .map(|e| mesh.is_irregular(e) && !mesh.touches_nonhex(e))
        .collect();
    let stop = |v: VertexId| pseudo_vertex[v.index()];
    let singularities = build_chains(mesh, &selected, &stop);

    let mut singular = vec![false; mesh.num_vertices()];
    for s in &singularities {
        if let Some(ends) = s.ends() {
            for v in ends {
                if !pseudo_vertex[v.index()] {
                    singular[v.index()] = true;
                }
            }
        }
    }
    HybridSingularityGraph {
        singularities,
        pseudo_singularities: pseudo,
        singular_vertices: collect_mask(&singular),
        pseudo_singular_vertices: collect_mask(&pseudo_vertex),
    }
}

/// Valence-based singularity graph: all irregular edges, chained by valence
/// and boundary class.
pub fn extract_vsg(mesh: &HexDominantMesh) -> ValenceSingularityGraph {
    let selected: Vec<bool> = mesh.edge_ids().map(|e| mesh.is_irregular(e)).collect();
    let singularities = build_chains(mesh, &selected, &|_| false);
    let mut singular = vec![false; mesh.num_vertices()];
    for s in &singularities {
        if let Some(ends) = s.ends() {
            for v in ends {
                singular[v.index()] = true;
            }
        }
    }
    ValenceSingularityGraph {
        singularities,
        singular_vertices: collect_mask(&singular),
    }
}

pub(crate) fn collect_mask<T: From<usize>>(mask: &[bool]) -> Vec<T> {
    mask.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| T::from(i))
        .collect()
}
