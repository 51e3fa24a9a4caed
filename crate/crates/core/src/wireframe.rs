//! VSG wireframe: the valence-based singularity graph plus straight traces
//! from its singular vertices, cut into segments between nodes and then
//! thinned by importance rules.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::base_complex::straight_edge_continuation;
use crate::mesh::{CellId, EdgeId, HexDominantMesh, VertexId};
use crate::singularity::{extract_vsg, ValenceSingularityGraph};

pub const DEFAULT_RHO: f64 = 0.8;
pub const DEFAULT_OPACITY_MIN: f64 = 0.15;
pub const DEFAULT_OPACITY_LAMBDA: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WireframeParams {
    pub rho: f64,
    pub opacity_min: f64,
    pub opacity_lambda: f64,
}

impl Default for WireframeParams {
    fn default() -> Self {
        WireframeParams {
            rho: DEFAULT_RHO,
            opacity_min: DEFAULT_OPACITY_MIN,
            opacity_lambda: DEFAULT_OPACITY_LAMBDA,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Segment {
    pub edges: Vec<EdgeId>,
    /// `edges.len() + 1` entries; first == last for a closed loop.
    pub vertices: Vec<VertexId>,
    pub closed: bool,
    /// Contains at least one irregular edge.
    pub is_irregular: bool,
    pub important: bool,
    pub reactivated: bool,
    /// Colour of the owning singularity; `None` for regular segments.
    pub color_class: Option<usize>,
    /// Per-edge opacity, aligned with `edges`; empty until assigned.
    pub opacity: Vec<f64>,
}

impl Segment {
    pub fn retained(&self) -> bool {
        self.important || self.reactivated
    }

    pub fn ends(&self) -> [VertexId; 2] {
        [self.vertices[0], *self.vertices.last().unwrap()]
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct VsgWireframe {
    pub nodes: Vec<VertexId>,
    pub singular_vertices: Vec<VertexId>,
    pub segments: Vec<Segment>,
}

impl VsgWireframe {
    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.segments.iter().flat_map(|s| s.edges.iter().copied())
    }

    pub fn retained_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.segments
            .iter()
            .filter(|s| s.retained())
            .flat_map(|s| s.edges.iter().copied())
    }

    pub fn num_retained(&self) -> usize {
        self.segments.iter().filter(|s| s.retained()).count()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ColorAssignment {
    /// Singularity index pairs `(i, j)` with `i < j`.
    pub partial_parallel_pairs: Vec<(usize, usize)>,
    /// Colour per VSG singularity.
    pub color_class: Vec<usize>,
    pub rho: f64,
}

/// Complete wireframe: VSG edges plus traces, segmented.
pub fn build_wireframe(mesh: &HexDominantMesh, vsg: &ValenceSingularityGraph) -> VsgWireframe {
    let mut in_w = vec![false; mesh.num_edges()];
    for e in vsg.edges() {
        in_w[e.index()] = true;
    }
    let mut singular = vec![false; mesh.num_vertices()];
    for &v in &vsg.singular_vertices {
        singular[v.index()] = true;
    }
    let touches_irregular: Vec<bool> = mesh
        .vertex_ids()
        .map(|v| mesh.vertex_edges(v).iter().any(|&e| mesh.is_irregular(e)))
        .collect();

    for &v in &vsg.singular_vertices {
        for &e in mesh.vertex_edges(v) {
            if !mesh.is_irregular(e) {
                trace(mesh, v, e, &singular, &touches_irregular, &mut in_w);
            }
        }
    }
    segment(mesh, &in_w, &singular, &vsg.singular_vertices)
}

fn trace(
    mesh: &HexDominantMesh,
    from: VertexId,
    first: EdgeId,
    singular: &[bool],
    touches_irregular: &[bool],
    in_w: &mut [bool],
) {
    let interior = !mesh.is_boundary_edge(first);
    let mut seen = BTreeSet::new();
    let (mut e, mut v) = (first, from);
    while seen.insert(e) {
        in_w[e.index()] = true;
        let w = mesh.other_vertex(e, v);
        if singular[w.index()]
            || touches_irregular[w.index()]
            || (interior && mesh.is_boundary_vertex(w))
        {
            break;
        }
        match straight_edge_continuation(mesh, e, w) {
            Some(n) if !mesh.is_irregular(n) => {
                e = n;
                v = w;
            }
            _ => break,
        }
    }
}

fn segment(
    mesh: &HexDominantMesh,
    in_w: &[bool],
    singular: &[bool],
    singular_vertices: &[VertexId],
) -> VsgWireframe {
    let w_edges = |v: VertexId| {
        mesh.vertex_edges(v)
            .iter()
            .copied()
            .filter(|e| in_w[e.index()])
            .collect::<Vec<_>>()
    };
    let is_node: Vec<bool> = mesh
        .vertex_ids()
        .map(|v| {
            let es = w_edges(v);
            singular[v.index()]
                || (!es.is_empty() && es.len() != 2)
                || (es.len() == 2 && mesh.is_irregular(es[0]) != mesh.is_irregular(es[1]))
        })
        .collect();

    let mut visited = vec![false; mesh.num_edges()];
    let mut segments = Vec::new();
    let walk = |start: VertexId, e0: EdgeId, visited: &mut Vec<bool>| {
        let mut edges = vec![e0];
        visited[e0.index()] = true;
        let mut vertices = vec![start, mesh.other_vertex(e0, start)];
        let mut cur = e0;
        loop {
            let v = *vertices.last().unwrap();
            if is_node[v.index()] || v == start {
                break;
            }
            let next = w_edges(v).into_iter().find(|&x| x != cur).unwrap();
            if visited[next.index()] {
                break;
            }
            visited[next.index()] = true;
            edges.push(next);
            vertices.push(mesh.other_vertex(next, v));
            cur = next;
        }
        let closed = vertices.first() == vertices.last();
        Segment {
            is_irregular: edges.iter().any(|&e| mesh.is_irregular(e)),
            edges,
            vertices,
            closed,
            important: true,
            reactivated: false,
            color_class: None,
            opacity: Vec::new(),
        }
    };

    for v in mesh.vertex_ids().filter(|v| is_node[v.index()]) {
        for e in w_edges(v) {
            if !visited[e.index()] {
                segments.push(walk(v, e, &mut visited));
            }
        }
    }
    // Node-free loops.
    for e in mesh.edge_ids() {
        if in_w[e.index()] && !visited[e.index()] {
            let start = mesh.edge_vertices(e)[0];
            segments.push(walk(start, e, &mut visited));
        }
    }

    let nodes = mesh
        .vertex_ids()
        .filter(|v| is_node[v.index()] && (singular[v.index()] || !w_edges(*v).is_empty()))
        .collect();
    VsgWireframe {
        nodes,
        singular_vertices: singular_vertices.to_vec(),
        segments,
    }
}

/// Boundary vertex with exactly three incident boundary quads.
pub fn is_boundary_corner(mesh: &HexDominantMesh, v: VertexId) -> bool {
    mesh.is_boundary_vertex(v)
        && mesh
            .vertex_faces(v)
            .iter()
            .filter(|&&f| mesh.is_boundary_face(f) && mesh.face(f).is_quad())
            .count()
            == 3
}

fn node_is_important(mesh: &HexDominantMesh, singular: &[bool], v: VertexId) -> bool {
    if !singular[v.index()] {
        return false;
    }
    let all_quads = mesh.vertex_faces(v).iter().all(|&f| mesh.face(f).is_quad());
    !(is_boundary_corner(mesh, v) && all_quads)
}

/// Pairing rules at one singular vertex. `pairs` lists pairable segment ids;
/// returns the ids that become non-important.
///
/// Mutually exclusive pairs are both dropped. A segment whose partners are all
/// exclusive to it is dropped together with its lowest-id partner. Anything
/// with multiple options on every side is left alone.
pub fn resolve_pairings(pairs: &[(usize, usize)]) -> BTreeSet<usize> {
    let mut options: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for &(a, b) in pairs {
        if a != b {
            options.entry(a).or_default().insert(b);
            options.entry(b).or_default().insert(a);
        }
    }
    let exclusive_to = |x: usize, a: usize| options[&x].len() == 1 && options[&x].contains(&a);
    let mut out = BTreeSet::new();
    for (&a, partners) in &options {
        if !partners.iter().all(|&x| exclusive_to(x, a)) {
            continue;
        }
        // Covers the one-partner case too: lowest-id partner is the only one.
        out.insert(a);
        out.insert(*partners.iter().next().unwrap());
    }
    out
}

fn first_edge_at(seg: &Segment, v: VertexId) -> Vec<EdgeId> {
    let mut out = Vec::new();
    if seg.vertices[0] == v {
        out.push(seg.edges[0]);
    }
    if *seg.vertices.last().unwrap() == v {
        out.push(*seg.edges.last().unwrap());
    }
    out
}

fn pairable(mesh: &HexDominantMesh, a: EdgeId, b: EdgeId) -> bool {
    let quads_only = |e: EdgeId| mesh.edge_faces(e).iter().all(|&f| mesh.face(f).is_quad());
    a != b
        && !mesh
            .edge_cells(a)
            .iter()
            .any(|c| mesh.edge_cells(b).contains(c))
        && quads_only(a)
        && quads_only(b)
}

/// Applies the node, end-node and pairing rules to regular segments.
/// Resets all flags first, so repeated application gives the same result.
pub fn mark_non_important(wf: &mut VsgWireframe, mesh: &HexDominantMesh) {
    let mut singular = vec![false; mesh.num_vertices()];
    for &v in &wf.singular_vertices {
        singular[v.index()] = true;
    }
    for s in &mut wf.segments {
        s.reactivated = false;
        s.important = true;
        if !s.is_irregular {
            let [a, b] = s.ends();
            if !node_is_important(mesh, &singular, a) && !node_is_important(mesh, &singular, b) {
                s.important = false;
            }
        }
    }

    let mut at_vertex: BTreeMap<VertexId, Vec<(usize, EdgeId)>> = BTreeMap::new();
    for (i, s) in wf.segments.iter().enumerate() {
        if s.is_irregular {
            continue;
        }
        for v in s.ends() {
            if singular[v.index()] {
                for e in first_edge_at(s, v) {
                    at_vertex.entry(v).or_default().push((i, e));
                }
            }
        }
    }
    let mut drop = BTreeSet::new();
    for incident in at_vertex.values_mut() {
        incident.sort_unstable();
        incident.dedup();
        let mut pairs = Vec::new();
        for (k, &(i, a)) in incident.iter().enumerate() {
            for &(j, b) in &incident[k + 1..] {
                if i != j && pairable(mesh, a, b) {
                    pairs.push((i, j));
                }
            }
        }
        drop.extend(resolve_pairings(&pairs));
    }
    for i in drop {
        wf.segments[i].important = false;
    }
}

/// Brings back non-important segments that touch an irregular edge.
pub fn reactivate(wf: &mut VsgWireframe, mesh: &HexDominantMesh) {
    for s in &mut wf.segments {
        if !s.important {
            s.reactivated = s
                .vertices
                .iter()
                .any(|&v| mesh.vertex_edges(v).iter().any(|&e| mesh.is_irregular(e)));
        }
    }
}

/// Unions partially parallel singularities and colours the classes greedily.
pub fn assign_colors(
    mesh: &HexDominantMesh,
    vsg: &ValenceSingularityGraph,
    rho: f64,
) -> ColorAssignment {
    let n = vsg.singularities.len();
    let owner = vsg.edge_owner(mesh.num_edges());

    // parallel_in[(i, j)] = edges of singularity i parallel to some edge of j.
    let mut parallel_in: HashMap<(usize, usize), BTreeSet<EdgeId>> = HashMap::new();
    for (i, s) in vsg.singularities.iter().enumerate() {
        for &e in &s.edges {
            for &f in mesh.edge_faces(e) {
                if let Some(p) = mesh.opposite_in_quad(f, e) {
                    if let Some(j) = owner[p.index()] {
                        if j != i {
                            parallel_in.entry((i, j)).or_default().insert(e);
                        }
                    }
                }
            }
        }
    }
    let ratio = |i: usize, j: usize| {
        parallel_in.get(&(i, j)).map_or(0, |s| s.len()) as f64
            / vsg.singularities[i].edges.len() as f64
    };
    let mut pairs: Vec<(usize, usize)> = parallel_in
        .keys()
        .filter(|&&(i, j)| i < j && ratio(i, j).min(ratio(j, i)) >= rho)
        .copied()
        .collect();
    pairs.sort_unstable();

    let mut uf = UnionFind::<usize>::new(n);
    for &(i, j) in &pairs {
        uf.union(i, j);
    }
    let labels = uf.into_labeling();
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        classes.entry(l).or_default().push(i);
    }
    let mut order: Vec<Vec<usize>> = classes.into_values().collect();
    order.sort_by_key(|c| (c.len(), c[0]));

    let mut at_vertex: HashMap<VertexId, Vec<usize>> = HashMap::new();
    for (i, s) in vsg.singularities.iter().enumerate() {
        for &v in &s.vertices {
            at_vertex.entry(v).or_default().push(i);
        }
    }
    let mut color: Vec<Option<usize>> = vec![None; n];
    for class in &order {
        let mut used = BTreeSet::new();
        for &i in class {
            for v in &vsg.singularities[i].vertices {
                for &j in &at_vertex[v] {
                    if labels[j] != labels[i] {
                        if let Some(c) = color[j] {
                            used.insert(c);
                        }
                    }
                }
            }
        }
        let c = (0..).find(|c| !used.contains(c)).unwrap();
        for &i in class {
            color[i] = Some(c);
        }
    }
    ColorAssignment {
        partial_parallel_pairs: pairs,
        color_class: color.into_iter().map(Option::unwrap).collect(),
        rho,
    }
}

/// Copies singularity colours onto the irregular segments.
pub fn apply_colors(
    wf: &mut VsgWireframe,
    vsg: &ValenceSingularityGraph,
    colors: &ColorAssignment,
    num_edges: usize,
) {
    let owner = vsg.edge_owner(num_edges);
    for s in &mut wf.segments {
        s.color_class = s
            .edges
            .iter()
            .find_map(|e| owner[e.index()])
            .map(|i| colors.color_class[i]);
    }
}

/// Per-edge opacity over retained segments: `max(o_min, exp(-lambda * d))`,
/// `d` the hop distance to the nearest irregular or non-hex edge.
/// Hidden segments get an empty opacity vector.
pub fn assign_opacity(wf: &mut VsgWireframe, mesh: &HexDominantMesh, o_min: f64, lambda: f64) {
    let mut retained = vec![false; mesh.num_edges()];
    for e in wf.retained_edges() {
        retained[e.index()] = true;
    }
    let mut hops: Vec<Option<u32>> = vec![None; mesh.num_edges()];
    let mut queue = VecDeque::new();
    for e in mesh.edge_ids() {
        if retained[e.index()] && (mesh.is_irregular(e) || mesh.touches_nonhex(e)) {
            hops[e.index()] = Some(0);
            queue.push_back(e);
        }
    }
    while let Some(e) = queue.pop_front() {
        let d = hops[e.index()].unwrap();
        for v in mesh.edge_vertices(e) {
            for &n in mesh.vertex_edges(v) {
                if retained[n.index()] && hops[n.index()].is_none() {
                    hops[n.index()] = Some(d + 1);
                    queue.push_back(n);
                }
            }
        }
    }
    for s in &mut wf.segments {
        s.opacity = if s.retained() {
            s.edges
                .iter()
                .map(|e| match hops[e.index()] {
                    Some(d) => opacity_at(d, o_min, lambda),
                    None => o_min,
                })
                .collect()
        } else {
            Vec::new()
        };
    }
}

pub fn opacity_at(hops: u32, o_min: f64, lambda: f64) -> f64 {
    (-lambda * hops as f64).exp().max(o_min)
}

/// Build, simplify, colour and shade in one call.
pub fn compute_wireframe(
    mesh: &HexDominantMesh,
    vsg: &ValenceSingularityGraph,
    params: &WireframeParams,
) -> (VsgWireframe, ColorAssignment) {
    let mut wf = build_wireframe(mesh, vsg);
    mark_non_important(&mut wf, mesh);
    reactivate(&mut wf, mesh);
    let colors = assign_colors(mesh, vsg, params.rho);
    apply_colors(&mut wf, vsg, &colors, mesh.num_edges());
    assign_opacity(&mut wf, mesh, params.opacity_min, params.opacity_lambda);
    (wf, colors)
}

/// Full pipeline on the submesh induced by `cells`, reported in the parent
/// mesh's handles.
pub fn sheet_wireframe(
    mesh: &HexDominantMesh,
    cells: &[CellId],
    params: &WireframeParams,
) -> VsgWireframe {
    let (sub, back) = mesh.submesh(cells);
    let vsg = extract_vsg(&sub);
    let (wf, _) = compute_wireframe(&sub, &vsg, params);
    let map_v = |v: VertexId| back[v.index()];
    let map_e = |e: EdgeId| {
        let [a, b] = sub.edge_vertices(e);
        mesh.find_edge(map_v(a), map_v(b))
            .expect("submesh edge exists in parent")
    };
    VsgWireframe {
        nodes: wf.nodes.iter().map(|&v| map_v(v)).collect(),
        singular_vertices: wf.singular_vertices.iter().map(|&v| map_v(v)).collect(),
        segments: wf
            .segments
            .into_iter()
            .map(|s| Segment {
                edges: s.edges.iter().map(|&e| map_e(e)).collect(),
                vertices: s.vertices.iter().map(|&v| map_v(v)).collect(),
                ..s
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{fixtures, synth_grid};

    #[test]
    fn lone_hub_drops_higher_partner() {
        // e1 = 1 pairs with e2 = 2 and e3 = 3, which pair only with e1.
        let out = resolve_pairings(&[(1, 2), (1, 3)]);
        assert_eq!(out, BTreeSet::from([1, 2]));
    }

    #[test]
    fn exclusive_pair_is_kept() {
        assert_eq!(resolve_pairings(&[(4, 7)]), BTreeSet::from([4, 7]));
    }

    #[test]
    fn cycle_of_multi_pairable_segments_keeps_nothing() {
        let out = resolve_pairings(&[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert!(out.is_empty());
    }

    #[test]
    fn grid_wireframe_is_the_twelve_creases() {
        let m = synth_grid(3, 3, 3).unwrap();
        let vsg = extract_vsg(&m);
        let (wf, colors) = compute_wireframe(&m, &vsg, &WireframeParams::default());
        assert_eq!(wf.segments.len(), 12);
        assert!(wf.segments.iter().all(|s| s.is_irregular && s.retained()));
        assert!(wf
            .segments
            .iter()
            .all(|s| s.opacity.iter().all(|&o| o == 1.0)));
        assert_eq!(wf.nodes.len(), 8);
        // Creases of one direction are three cells apart; no shared quad.
        assert!(colors.partial_parallel_pairs.is_empty());
    }

    #[test]
    fn single_hex_parallel_edges_share_colours() {
        let m = synth_grid(1, 1, 1).unwrap();
        let vsg = extract_vsg(&m);
        let c = assign_colors(&m, &vsg, 0.8);
        // Four parallel classes of one direction collapse into one union class.
        assert_eq!(c.partial_parallel_pairs.len(), 12);
        let distinct: BTreeSet<usize> = c.color_class.iter().copied().collect();
        assert_eq!(distinct.len(), 3);
    }

    #[test]
    fn opacity_law() {
        assert_eq!(opacity_at(0, 0.15, 0.5), 1.0);
        assert!((opacity_at(2, 0.15, 0.5) - (-1.0f64).exp()).abs() < 1e-12);
        assert_eq!(opacity_at(20, 0.15, 0.5), 0.15);
    }

    #[test]
    fn marking_is_idempotent() {
        let m = fixtures::doublet_with_prism();
        let vsg = extract_vsg(&m);
        let mut wf = build_wireframe(&m, &vsg);
        mark_non_important(&mut wf, &m);
        let once = wf.clone();
        mark_non_important(&mut wf, &m);
        assert_eq!(once, wf);
    }

    #[test]
    fn whole_mesh_sheet_wireframe_matches_global() {
        let m = fixtures::glued_prism();
        let all: Vec<CellId> = m.cell_ids().collect();
        let p = WireframeParams::default();
        let (global, _) = compute_wireframe(&m, &extract_vsg(&m), &p);
        assert_eq!(sheet_wireframe(&m, &all, &p), global);
    }
}
