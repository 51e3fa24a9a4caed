//! Structured grids and small non-hex injections used as fixtures.

use std::fmt;
use std::str::FromStr;

use crate::mesh::{build_mesh, CellId, HexDominantMesh, MeshError, RawCell, VertexId};

/// `nx * ny * nz` unit hexahedra. Vertex `(i, j, k)` has index
/// `i + (nx + 1) * (j + (ny + 1) * k)`; cells are ordered with `i` fastest.
pub fn synth_grid(nx: usize, ny: usize, nz: usize) -> Result<HexDominantMesh, MeshError> {
    if nx == 0 || ny == 0 || nz == 0 {
        return Err(MeshError::UnsupportedRecipe(format!(
            "grid dimensions must be positive, got {nx}x{ny}x{nz}"
        )));
    }
    let vid = |i: usize, j: usize, k: usize| i + (nx + 1) * (j + (ny + 1) * k);
    let mut positions = Vec::with_capacity((nx + 1) * (ny + 1) * (nz + 1));
    for k in 0..=nz {
        for j in 0..=ny {
            for i in 0..=nx {
                positions.push([i as f64, j as f64, k as f64]);
            }
        }
    }
    let mut cells = Vec::with_capacity(nx * ny * nz);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                cells.push(RawCell::hexahedron([
                    vid(i, j, k),
                    vid(i + 1, j, k),
                    vid(i + 1, j + 1, k),
                    vid(i, j + 1, k),
                    vid(i, j, k + 1),
                    vid(i + 1, j, k + 1),
                    vid(i + 1, j + 1, k + 1),
                    vid(i, j + 1, k + 1),
                ]));
            }
        }
    }
    build_mesh(positions, &cells)
}

/// Local edit applied to one hex cell of an existing mesh.
///
/// "Bottom" and "top" are the cell's faces with the lowest and highest
/// centroid z.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Recipe {
    /// Split the hex into two prisms along a diagonal of its bottom/top faces.
    /// Both faces must be on the boundary.
    SplitHex { cell: usize },
    /// Glue a triangular prism onto the (boundary) top face.
    GluePrism { cell: usize },
    /// Glue a pyramid onto the (boundary) top face.
    GluePyramid { cell: usize },
    /// Replace the hex by three hexes whose cross-section is a quad doublet.
    /// One of the resulting sheets passes through the first new hex twice,
    /// in two directions. Bottom and top faces must be on the boundary.
    Doublet { cell: usize },
}

impl Recipe {
    pub fn cell(self) -> usize {
        match self {
            Recipe::SplitHex { cell }
            | Recipe::GluePrism { cell }
            | Recipe::GluePyramid { cell }
            | Recipe::Doublet { cell } => cell,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Recipe::SplitHex { .. } => "split-hex",
            Recipe::GluePrism { .. } => "glue-prism",
            Recipe::GluePyramid { .. } => "glue-pyramid",
            Recipe::Doublet { .. } => "doublet",
        }
    }

    fn with_cell(self, cell: usize) -> Recipe {
        match self {
            Recipe::SplitHex { .. } => Recipe::SplitHex { cell },
            Recipe::GluePrism { .. } => Recipe::GluePrism { cell },
            Recipe::GluePyramid { .. } => Recipe::GluePyramid { cell },
            Recipe::Doublet { .. } => Recipe::Doublet { cell },
        }
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name(), self.cell())
    }
}

/// Parses `NAME` or `NAME:CELL`, e.g. `glue-prism:4`. The cell defaults to 0.
impl FromStr for Recipe {
    type Err = MeshError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, cell) = match s.split_once(':') {
            Some((n, c)) => (
                n,
                c.parse::<usize>()
                    .map_err(|_| MeshError::UnsupportedRecipe(s.to_string()))?,
            ),
            None => (s, 0),
        };
        let base = match name {
            "split-hex" => Recipe::SplitHex { cell: 0 },
            "glue-prism" => Recipe::GluePrism { cell: 0 },
            "glue-pyramid" => Recipe::GluePyramid { cell: 0 },
            "doublet" => Recipe::Doublet { cell: 0 },
            _ => return Err(MeshError::UnsupportedRecipe(s.to_string())),
        };
        Ok(base.with_cell(cell))
    }
}

struct HexFrame {
    bottom: [usize; 4],
    top: [usize; 4],
}

fn centroid(mesh: &HexDominantMesh, vs: &[VertexId]) -> [f64; 3] {
    let mut c = [0.0; 3];
    for v in vs {
        let p = mesh.position(*v);
        for k in 0..3 {
            c[k] += p[k];
        }
    }
    c.map(|x| x / vs.len() as f64)
}

fn lerp(a: [f64; 3], b: [f64; 3], t: f64) -> [f64; 3] {
    [
        a[0] + (b[0] - a[0]) * t,
        a[1] + (b[1] - a[1]) * t,
        a[2] + (b[2] - a[2]) * t,
    ]
}

/// Bottom/top loops of a hex cell, with `top[i]` joined to `bottom[i]` by an edge.
fn hex_frame(
    mesh: &HexDominantMesh,
    c: CellId,
    need_boundary_bottom: bool,
    need_boundary_top: bool,
) -> Result<HexFrame, MeshError> {
    let bad = |why: &str| MeshError::UnsupportedRecipe(format!("cell {c}: {why}"));
    if c.index() >= mesh.num_cells() {
        return Err(bad("no such cell"));
    }
    if !mesh.is_hex(c) {
        return Err(bad("not a hex"));
    }
    let cell = mesh.cell(c);
    let z = |f: &crate::mesh::FaceId| centroid(mesh, &mesh.face(*f).vertices)[2];
    let bottom_f = *cell
        .faces
        .iter()
        .min_by(|a, b| z(a).total_cmp(&z(b)).then(a.cmp(b)))
        .unwrap();
    let bottom_vs = mesh.face(bottom_f).vertices.clone();
    let top_f = *cell
        .faces
        .iter()
        .find(|&&f| mesh.face(f).vertices.iter().all(|v| !bottom_vs.contains(v)))
        .ok_or_else(|| bad("no opposite face"))?;
    if need_boundary_bottom && !mesh.is_boundary_face(bottom_f) {
        return Err(bad("bottom face is not on the boundary"));
    }
    if need_boundary_top && !mesh.is_boundary_face(top_f) {
        return Err(bad("top face is not on the boundary"));
    }
    let top_vs = &mesh.face(top_f).vertices;
    let mut top = [0usize; 4];
    for (i, &b) in bottom_vs.iter().enumerate() {
        let t = cell
            .edges
            .iter()
            .map(|&e| mesh.edge_vertices(e))
            .find_map(|[p, q]| {
                if p == b && top_vs.contains(&q) {
                    Some(q)
                } else if q == b && top_vs.contains(&p) {
                    Some(p)
                } else {
                    None
                }
            })
            .ok_or_else(|| bad("malformed hex"))?;
        top[i] = t.index();
    }
    Ok(HexFrame {
        bottom: [0, 1, 2, 3].map(|i| bottom_vs[i].index()),
        top,
    })
}

/// Applies `recipe` to a copy of `mesh`.
pub fn synth_inject_nonhex(
    mesh: &HexDominantMesh,
    recipe: Recipe,
) -> Result<HexDominantMesh, MeshError> {
    let c = CellId::from(recipe.cell());
    let mut positions = mesh.positions().to_vec();
    let mut cells: Vec<RawCell> = mesh
        .cell_ids()
        .map(|c| RawCell::new(mesh.cell_face_loops(c)))
        .collect();
    match recipe {
        Recipe::SplitHex { .. } => {
            let HexFrame { bottom: b, top: t } = hex_frame(mesh, c, true, true)?;
            cells[c.index()] = RawCell::prism([b[0], b[1], b[2], t[0], t[1], t[2]]);
            cells.push(RawCell::prism([b[0], b[2], b[3], t[0], t[2], t[3]]));
        }
        Recipe::GluePrism { .. } => {
            let HexFrame { bottom: b, top: t } = hex_frame(mesh, c, false, true)?;
            let lift = lift_vector(&positions, &b, &t);
            let p = add(lerp(positions[t[0]], positions[t[3]], 0.5), lift);
            let q = add(lerp(positions[t[1]], positions[t[2]], 0.5), lift);
            let (pi, qi) = (positions.len(), positions.len() + 1);
            positions.push(p);
            positions.push(q);
            cells.push(RawCell::prism([t[0], t[3], pi, t[1], t[2], qi]));
        }
        Recipe::GluePyramid { .. } => {
            let HexFrame { bottom: b, top: t } = hex_frame(mesh, c, false, true)?;
            let lift = lift_vector(&positions, &b, &t);
            let mid = lerp(
                lerp(positions[t[0]], positions[t[2]], 0.5),
                lerp(positions[t[1]], positions[t[3]], 0.5),
                0.5,
            );
            positions.push(add(mid, lift));
            cells.push(RawCell::pyramid([
                t[0],
                t[1],
                t[2],
                t[3],
                positions.len() - 1,
            ]));
        }
        Recipe::Doublet { .. } => {
            let HexFrame { bottom: b, top: t } = hex_frame(mesh, c, true, true)?;
            // Cross-section corners: z = 0, e = 1, o = 2, w = 3; two new
            // interior points `ib` (low) and `it` (between ib and o).
            let mut layer = |lp: [usize; 4]| -> [usize; 6] {
                let ps = lp.map(|v| positions[v]);
                let center = lerp(lerp(ps[0], ps[2], 0.5), lerp(ps[1], ps[3], 0.5), 0.5);
                let ib = lerp(center, ps[0], 0.15);
                let it = lerp(center, ps[2], 0.35);
                positions.push(ib);
                positions.push(it);
                [
                    lp[0],
                    lp[1],
                    lp[2],
                    lp[3],
                    positions.len() - 2,
                    positions.len() - 1,
                ]
            };
            let lb = layer(b);
            let lt = layer(t);
            let (z, e, o, w, ib, it) = (0, 1, 2, 3, 4, 5);
            let hex = |q: [usize; 4]| {
                RawCell::hexahedron([
                    lb[q[0]], lb[q[1]], lb[q[2]], lb[q[3]], lt[q[0]], lt[q[1]], lt[q[2]], lt[q[3]],
                ])
            };
            cells[c.index()] = hex([ib, w, z, e]);
            cells.push(hex([it, o, w, ib]));
            cells.push(hex([it, ib, e, o]));
        }
    }
    build_mesh(positions, &cells)
}

fn add(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn lift_vector(positions: &[[f64; 3]], b: &[usize; 4], t: &[usize; 4]) -> [f64; 3] {
    let d = [0, 1, 2].map(|k| positions[t[0]][k] - positions[b[0]][k]);
    d.map(|x| 0.5 * x)
}

/// Named fixtures shared by tests, benches and the CLI.
pub mod fixtures {
    use super::*;

    /// One hexahedron split into two prisms (14 edges, 0 hex cells).
    pub fn split_hex() -> HexDominantMesh {
        let g = synth_grid(1, 1, 1).unwrap();
        synth_inject_nonhex(&g, Recipe::SplitHex { cell: 0 }).unwrap()
    }

    /// A cube with a prism glued on its top face.
    pub fn cube_with_prism() -> HexDominantMesh {
        let g = synth_grid(1, 1, 1).unwrap();
        synth_inject_nonhex(&g, Recipe::GluePrism { cell: 0 }).unwrap()
    }

    /// `synth_grid(2, 2, 1)` with a prism glued on the top face of cell 0.
    pub fn glued_prism() -> HexDominantMesh {
        let g = synth_grid(2, 2, 1).unwrap();
        synth_inject_nonhex(&g, Recipe::GluePrism { cell: 0 }).unwrap()
    }

    /// Minimal self-intersecting sheet: one hex replaced by a 3-hex doublet.
    pub fn self_intersecting() -> HexDominantMesh {
        let g = synth_grid(1, 1, 1).unwrap();
        synth_inject_nonhex(&g, Recipe::Doublet { cell: 0 }).unwrap()
    }

    /// Doublet in the middle of a 3x3x1 grid, plus a prism glued on the
    /// doubly-crossed hex. Its self-intersecting sheet also touches a non-hex.
    pub fn doublet_with_prism() -> HexDominantMesh {
        let g = synth_grid(3, 3, 1).unwrap();
        let d = synth_inject_nonhex(&g, Recipe::Doublet { cell: 4 }).unwrap();
        synth_inject_nonhex(&d, Recipe::GluePrism { cell: 4 }).unwrap()
    }

    /// Four hexes and two pyramids.
    pub fn hexes_and_pyramids() -> HexDominantMesh {
        let g = synth_grid(2, 2, 1).unwrap();
        let a = synth_inject_nonhex(&g, Recipe::GluePyramid { cell: 0 }).unwrap();
        synth_inject_nonhex(&a, Recipe::GluePyramid { cell: 3 }).unwrap()
    }

    /// 20x20x15 grid (6,000 hexes) with four prisms glued on its top layer.
    pub fn large_mixed() -> HexDominantMesh {
        let mut m = synth_grid(20, 20, 15).unwrap();
        let top = 20 * 20 * 14;
        for (i, j) in [(2, 3), (10, 10), (11, 10), (17, 5)] {
            m = synth_inject_nonhex(
                &m,
                Recipe::GluePrism {
                    cell: top + i + 20 * j,
                },
            )
            .unwrap();
        }
        m
    }

    /// Every named fixture, with its name.
    pub fn all() -> Vec<(&'static str, HexDominantMesh)> {
        vec![
            ("grid-1", synth_grid(1, 1, 1).unwrap()),
            ("grid-1x1x2", synth_grid(1, 1, 2).unwrap()),
            ("grid-2", synth_grid(2, 2, 2).unwrap()),
            ("grid-3", synth_grid(3, 3, 3).unwrap()),
            ("split-hex", split_hex()),
            ("cube-with-prism", cube_with_prism()),
            ("glued-prism", glued_prism()),
            ("self-intersecting", self_intersecting()),
            ("doublet-with-prism", doublet_with_prism()),
            ("hexes-and-pyramids", hexes_and_pyramids()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::CellKind;

    #[test]
    fn grid_counts() {
        let g = synth_grid(1, 1, 2).unwrap();
        assert_eq!((g.num_vertices(), g.num_cells()), (12, 2));
        let g = synth_grid(3, 3, 3).unwrap();
        assert_eq!(g.num_cells(), 27);
        assert_eq!(g.num_hex_cells(), 27);
    }

    #[test]
    fn zero_dimension_is_rejected() {
        assert!(synth_grid(0, 1, 1).is_err());
    }

    #[test]
    fn split_hex_gives_two_prisms() {
        let m = fixtures::split_hex();
        assert_eq!(m.num_cells(), 2);
        assert_eq!(m.num_hex_cells(), 0);
        assert_eq!(m.num_edges(), 14);
    }

    #[test]
    fn split_hex_needs_boundary_caps() {
        let g = synth_grid(1, 1, 3).unwrap();
        let err = synth_inject_nonhex(&g, Recipe::SplitHex { cell: 1 }).unwrap_err();
        assert!(matches!(err, MeshError::UnsupportedRecipe(_)));
    }

    #[test]
    fn recipe_names_parse() {
        assert_eq!(
            "glue-prism:4".parse::<Recipe>().unwrap(),
            Recipe::GluePrism { cell: 4 }
        );
        assert_eq!(
            "doublet".parse::<Recipe>().unwrap(),
            Recipe::Doublet { cell: 0 }
        );
        assert!("y-junction:x".parse::<Recipe>().is_err());
        assert!("melt".parse::<Recipe>().is_err());
    }

    #[test]
    fn injections_stay_conforming() {
        for (name, m) in fixtures::all() {
            assert!(!m.is_non_conforming(), "{name}");
        }
    }

    #[test]
    fn doublet_has_three_hexes_and_a_valence_two_edge() {
        let m = fixtures::self_intersecting();
        assert_eq!(m.num_cells(), 3);
        assert!(m.cell_ids().all(|c| m.cell_kind(c) == CellKind::Hex));
        // The vertical edge through the doublet vertex is interior with valence 2.
        assert!(m
            .edge_ids()
            .any(|e| !m.is_boundary_edge(e) && m.edge_valence(e) == 2));
    }
}
