//! Viewer-agnostic exports of the extracted structures as VTK legacy files.
//! Colours travel as small integer classes; viewers map them to a palette.

use std::fmt::Write as _;

use super::vtk::{header, write_grid, write_points};
use super::{fmt_g9, IoError};
use crate::base_complex::{ComponentKind, HybridBaseComplex};
use crate::mesh::{CellId, EdgeId, HexDominantMesh, VertexId};
use crate::sheets::{Sheet, SubSheet};
use crate::singularity::HybridSingularityGraph;
use crate::wireframe::VsgWireframe;

#[derive(Clone, Debug, PartialEq)]
pub enum Attribute {
    Int(String, Vec<i64>),
    Float(String, Vec<f64>),
}

impl Attribute {
    fn name(&self) -> &str {
        match self {
            Attribute::Int(n, _) | Attribute::Float(n, _) => n,
        }
    }
    fn len(&self) -> usize {
        match self {
            Attribute::Int(_, v) => v.len(),
            Attribute::Float(_, v) => v.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExportGroup {
    Cells {
        name: String,
        cells: Vec<CellId>,
        attributes: Vec<Attribute>,
    },
    Lines {
        name: String,
        edges: Vec<EdgeId>,
        attributes: Vec<Attribute>,
    },
    Vertices {
        name: String,
        vertices: Vec<VertexId>,
        attributes: Vec<Attribute>,
    },
}

impl ExportGroup {
    pub fn name(&self) -> &str {
        match self {
            ExportGroup::Cells { name, .. }
            | ExportGroup::Lines { name, .. }
            | ExportGroup::Vertices { name, .. } => name,
        }
    }
}

/// Named element groups; each becomes one `<name>.vtk` file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SceneExport {
    pub groups: Vec<ExportGroup>,
}

/// Renders every group. Returns `(file name, contents)` pairs in group order.
pub fn write_vtk_export(
    mesh: &HexDominantMesh,
    scene: &SceneExport,
) -> Result<Vec<(String, String)>, IoError> {
    scene
        .groups
        .iter()
        .map(|g| Ok((format!("{}.vtk", g.name()), write_group(mesh, g)?)))
        .collect()
}

fn check<T: Copy>(
    group: &str,
    ids: &[T],
    limit: usize,
    index: impl Fn(T) -> usize,
    attributes: &[Attribute],
) -> Result<(), IoError> {
    if let Some(&bad) = ids.iter().find(|&&x| index(x) >= limit) {
        return Err(IoError::DanglingReference(format!(
            "group {group}: id {} out of {limit}",
            index(bad)
        )));
    }
    if let Some(a) = attributes.iter().find(|a| a.len() != ids.len()) {
        return Err(IoError::DanglingReference(format!(
            "group {group}: attribute {} has {} values for {} elements",
            a.name(),
            a.len(),
            ids.len()
        )));
    }
    Ok(())
}

fn write_group(mesh: &HexDominantMesh, group: &ExportGroup) -> Result<String, IoError> {
    match group {
        ExportGroup::Cells {
            name,
            cells,
            attributes,
        } => {
            check(name, cells, mesh.num_cells(), CellId::index, attributes)?;
            let (mut s, _) = write_grid(mesh, name, cells);
            write_cell_data(&mut s, cells.len(), attributes);
            Ok(s)
        }
        ExportGroup::Lines {
            name,
            edges,
            attributes,
        } => {
            check(name, edges, mesh.num_edges(), EdgeId::index, attributes)?;
            let verts: Vec<Vec<VertexId>> = edges
                .iter()
                .map(|&e| mesh.edge_vertices(e).to_vec())
                .collect();
            Ok(write_polydata(mesh, name, "LINES", &verts, attributes))
        }
        ExportGroup::Vertices {
            name,
            vertices,
            attributes,
        } => {
            check(
                name,
                vertices,
                mesh.num_vertices(),
                VertexId::index,
                attributes,
            )?;
            let verts: Vec<Vec<VertexId>> = vertices.iter().map(|&v| vec![v]).collect();
            Ok(write_polydata(mesh, name, "VERTICES", &verts, attributes))
        }
    }
}

fn write_polydata(
    mesh: &HexDominantMesh,
    title: &str,
    kind: &str,
    prims: &[Vec<VertexId>],
    attributes: &[Attribute],
) -> String {
    let mut points: Vec<usize> = prims.iter().flatten().map(|v| v.index()).collect();
    points.sort_unstable();
    points.dedup();
    let mut s = String::new();
    header(&mut s, title, "POLYDATA");
    write_points(&mut s, mesh, &points);
    let size: usize = prims.iter().map(|p| p.len() + 1).sum();
    writeln!(s, "{kind} {} {size}", prims.len()).unwrap();
    for p in prims {
        write!(s, "{}", p.len()).unwrap();
        for v in p {
            let local = points.binary_search(&v.index()).unwrap();
            write!(s, " {local}").unwrap();
        }
        s.push('\n');
    }
    write_cell_data(&mut s, prims.len(), attributes);
    s
}

fn write_cell_data(s: &mut String, n: usize, attributes: &[Attribute]) {
    if n == 0 || attributes.is_empty() {
        return;
    }
    writeln!(s, "CELL_DATA {n}").unwrap();
    for a in attributes {
        match a {
            Attribute::Int(name, values) => {
                writeln!(s, "SCALARS {name} int 1\nLOOKUP_TABLE default").unwrap();
                for v in values {
                    writeln!(s, "{v}").unwrap();
                }
            }
            Attribute::Float(name, values) => {
                writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default").unwrap();
                for &v in values {
                    writeln!(s, "{}", fmt_g9(v)).unwrap();
                }
            }
        }
    }
}

fn flag(b: bool) -> i64 {
    i64::from(b)
}

/// Singularity and pseudo-singularity edges plus their special vertices.
pub fn hsg_export(hsg: &HybridSingularityGraph, mesh: &HexDominantMesh) -> SceneExport {
    let mut edges = Vec::new();
    let mut ids = Vec::new();
    let mut valence = Vec::new();
    for (i, s) in hsg.singularities.iter().enumerate() {
        for &e in &s.edges {
            edges.push(e);
            ids.push(i as i64);
            valence.push(s.valence as i64);
        }
    }
    for &e in &hsg.pseudo_singularities {
        edges.push(e);
        ids.push(-1);
        valence.push(mesh.edge_valence(e) as i64);
    }
    let pseudo = ids.iter().map(|&i| flag(i < 0)).collect();
    let vertices: Vec<VertexId> = hsg
        .singular_vertices
        .iter()
        .chain(&hsg.pseudo_singular_vertices)
        .copied()
        .collect();
    let highlight = hsg
        .singular_vertices
        .iter()
        .map(|_| 1)
        .chain(hsg.pseudo_singular_vertices.iter().map(|_| 2))
        .collect();
    SceneExport {
        groups: vec![
            ExportGroup::Lines {
                name: "hsg".into(),
                edges,
                attributes: vec![
                    Attribute::Int("singularity_id".into(), ids),
                    Attribute::Int("pseudo".into(), pseudo),
                    Attribute::Int("valence".into(), valence),
                ],
            },
            ExportGroup::Vertices {
                name: "hsg_vertices".into(),
                vertices,
                attributes: vec![Attribute::Int("highlight".into(), highlight)],
            },
        ],
    }
}

/// All cells with their component id and kind (0 hex, 1 non-hex).
pub fn complex_export(complex: &HybridBaseComplex) -> SceneExport {
    let cells: Vec<CellId> = (0..complex.cell_component.len())
        .map(CellId::from)
        .collect();
    let ids = complex.cell_component.iter().map(|&k| k as i64).collect();
    let kinds = complex
        .cell_component
        .iter()
        .map(|&k| flag(complex.components[k].kind == ComponentKind::NonHex))
        .collect();
    SceneExport {
        groups: vec![ExportGroup::Cells {
            name: "complex".into(),
            cells,
            attributes: vec![
                Attribute::Int("component_id".into(), ids),
                Attribute::Int("component_kind".into(), kinds),
            ],
        }],
    }
}

/// Hex cells holding two parallel edges of the set that meet at a vertex.
pub fn self_intersection_cells(
    mesh: &HexDominantMesh,
    edges: &[EdgeId],
    cells: &[CellId],
) -> Vec<CellId> {
    cells
        .iter()
        .copied()
        .filter(|&c| {
            let inside: Vec<EdgeId> = mesh
                .cell(c)
                .edges
                .iter()
                .copied()
                .filter(|e| edges.binary_search(e).is_ok())
                .collect();
            inside.iter().enumerate().any(|(i, &a)| {
                inside[i + 1..]
                    .iter()
                    .any(|&b| mesh.shares_vertex(a, b).is_some())
            })
        })
        .collect()
}

fn sheet_groups(
    mesh: &HexDominantMesh,
    prefix: &str,
    id: usize,
    edges: &[EdgeId],
    cells: &[CellId],
    unmatched: &[VertexId],
) -> Vec<ExportGroup> {
    let crossing = self_intersection_cells(mesh, edges, cells);
    let self_intersect = cells
        .iter()
        .map(|c| flag(crossing.binary_search(c).is_ok()))
        .collect();
    vec![
        ExportGroup::Cells {
            name: format!("{prefix}_{id:03}"),
            cells: cells.to_vec(),
            attributes: vec![
                Attribute::Int("sheet_id".into(), vec![id as i64; cells.len()]),
                Attribute::Int("self_intersect".into(), self_intersect),
            ],
        },
        ExportGroup::Lines {
            name: format!("{prefix}_{id:03}_edges"),
            edges: edges.to_vec(),
            attributes: vec![Attribute::Int(
                "sheet_id".into(),
                vec![id as i64; edges.len()],
            )],
        },
        ExportGroup::Vertices {
            name: format!("{prefix}_{id:03}_unmatched"),
            vertices: unmatched.to_vec(),
            attributes: vec![Attribute::Int("highlight".into(), vec![1; unmatched.len()])],
        },
    ]
}

/// Three groups per sheet (cells, parallel edges, unmatched vertices), then
/// the same for each subsheet.
pub fn sheets_export(
    mesh: &HexDominantMesh,
    sheets: &[Sheet],
    subsheets: &[SubSheet],
) -> SceneExport {
    let mut groups = Vec::new();
    for (i, s) in sheets.iter().enumerate() {
        groups.extend(sheet_groups(
            mesh,
            "sheet",
            i,
            &s.parallel_edges,
            &s.cells,
            &s.unmatched_vertices,
        ));
    }
    for (i, s) in subsheets.iter().enumerate() {
        groups.extend(sheet_groups(
            mesh,
            "subsheet",
            i,
            &s.parallel_edges,
            &s.cells,
            &s.unmatched_vertices,
        ));
    }
    SceneExport { groups }
}

/// One line per wireframe mesh edge. Hidden edges carry opacity 0; regular
/// edges carry valence -1 and, outside singularities, colour class -1.
pub fn wireframe_export(mesh: &HexDominantMesh, wf: &VsgWireframe, name: &str) -> SceneExport {
    let mut edges = Vec::new();
    let (mut color, mut opacity, mut important, mut reactivated, mut valence) =
        (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for s in &wf.segments {
        for (k, &e) in s.edges.iter().enumerate() {
            edges.push(e);
            color.push(s.color_class.map_or(-1, |c| c as i64));
            opacity.push(s.opacity.get(k).copied().unwrap_or(0.0));
            important.push(flag(s.important));
            reactivated.push(flag(s.reactivated));
            valence.push(if mesh.is_irregular(e) {
                mesh.edge_valence(e) as i64
            } else {
                -1
            });
        }
    }
    let nodes = wf.nodes.clone();
    let singular: Vec<i64> = nodes
        .iter()
        .map(|v| flag(wf.singular_vertices.binary_search(v).is_ok()))
        .collect();
    SceneExport {
        groups: vec![
            ExportGroup::Lines {
                name: name.to_string(),
                edges,
                attributes: vec![
                    Attribute::Int("color_class".into(), color),
                    Attribute::Float("opacity".into(), opacity),
                    Attribute::Int("important".into(), important),
                    Attribute::Int("reactivated".into(), reactivated),
                    Attribute::Int("valence".into(), valence),
                ],
            },
            ExportGroup::Vertices {
                name: format!("{name}_nodes"),
                vertices: nodes,
                attributes: vec![Attribute::Int("highlight".into(), singular)],
            },
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_complex::extract_base_complex;
    use crate::singularity::extract_hybrid_singularity_graph;
    use crate::synth::{fixtures, synth_grid};

    fn component_ids(text: &str) -> Vec<i64> {
        let start = text
            .find("SCALARS component_id int 1\nLOOKUP_TABLE default\n")
            .unwrap();
        text[start..]
            .lines()
            .skip(2)
            .take_while(|l| !l.starts_with("SCALARS"))
            .map(|l| l.parse().unwrap())
            .collect()
    }

    #[test]
    fn grid_complex_is_one_component() {
        let m = synth_grid(2, 2, 2).unwrap();
        let h = extract_hybrid_singularity_graph(&m);
        let (_, bc) = extract_base_complex(&m, &h).unwrap();
        let files = write_vtk_export(&m, &complex_export(&bc)).unwrap();
        assert_eq!(files.len(), 1);
        assert_eq!(files[0].0, "complex.vtk");
        assert_eq!(component_ids(&files[0].1), vec![0; 8]);
    }

    #[test]
    fn cube_with_prism_has_two_component_ids() {
        let m = fixtures::cube_with_prism();
        let h = extract_hybrid_singularity_graph(&m);
        let (_, bc) = extract_base_complex(&m, &h).unwrap();
        let files = write_vtk_export(&m, &complex_export(&bc)).unwrap();
        let mut ids = component_ids(&files[0].1);
        ids.dedup();
        assert_eq!(ids, vec![0, 1]);
    }

    #[test]
    fn empty_wireframe_has_no_lines() {
        let m = synth_grid(1, 1, 1).unwrap();
        let files =
            write_vtk_export(&m, &wireframe_export(&m, &VsgWireframe::default(), "wf")).unwrap();
        assert!(files[0].1.contains("LINES 0 0\n"));
        assert!(!files[0].1.contains("CELL_DATA"));
    }

    #[test]
    fn dangling_ids_are_rejected() {
        let m = synth_grid(1, 1, 1).unwrap();
        let scene = SceneExport {
            groups: vec![ExportGroup::Lines {
                name: "x".into(),
                edges: vec![EdgeId(999)],
                attributes: vec![],
            }],
        };
        assert!(matches!(
            write_vtk_export(&m, &scene),
            Err(IoError::DanglingReference(_))
        ));
    }
}
