use std::fmt::Write as _;

use super::{fmt_g9, CellRecord, IoError, RawMesh, RecordKind, Tokens};
use crate::mesh::{CellId, HexDominantMesh};

const VTK_TETRA: u32 = 10;
const VTK_HEXAHEDRON: u32 = 12;
const VTK_WEDGE: u32 = 13;
const VTK_PYRAMID: u32 = 14;
const VTK_POLYHEDRON: u32 = 42;

/// Parses an ASCII legacy `UNSTRUCTURED_GRID`. Sections after `CELL_TYPES`
/// (point or cell data) are ignored.
pub fn read_vtk_legacy(bytes: &[u8]) -> Result<RawMesh, IoError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|_| IoError::MalformedHeader("file is not UTF-8 text".into()))?;
    let mut lines = text.lines();
    let version = lines.next().unwrap_or("");
    if !version.trim_start().starts_with("# vtk DataFile") {
        return Err(IoError::MalformedHeader(format!(
            "bad magic line {version:?}"
        )));
    }
    let _title = lines
        .next()
        .ok_or_else(|| IoError::MalformedHeader("missing title line".into()))?;
    let encoding = lines
        .next()
        .ok_or_else(|| IoError::MalformedHeader("missing encoding line".into()))?
        .trim();
    if !encoding.eq_ignore_ascii_case("ASCII") {
        return Err(IoError::MalformedHeader(format!(
            "unsupported encoding {encoding:?}"
        )));
    }
    let rest: String = lines.collect::<Vec<_>>().join("\n");
    let mut t = Tokens::new(&rest, None);

    expect_keyword(&mut t, "DATASET")?;
    let kind = t
        .next()
        .ok_or_else(|| IoError::MalformedHeader("missing dataset type".into()))?
        .1;
    if !kind.eq_ignore_ascii_case("UNSTRUCTURED_GRID") {
        return Err(IoError::MalformedHeader(format!(
            "unsupported dataset {kind}"
        )));
    }

    let mut positions = Vec::new();
    let mut records: Vec<Vec<usize>> = Vec::new();
    let mut types: Vec<u32> = Vec::new();
    while let Some((_, kw)) = t.next() {
        match kw.to_ascii_uppercase().as_str() {
            "POINTS" => {
                let n = count(&mut t, "POINTS")?;
                let _dtype = t.next().ok_or_else(|| truncated("POINTS type"))?;
                positions.reserve(n);
                for _ in 0..n {
                    let mut p = [0.0; 3];
                    for c in &mut p {
                        *c = number(&mut t, "POINTS")?;
                    }
                    positions.push(p);
                }
            }
            "CELLS" => {
                let n = count(&mut t, "CELLS")?;
                let _size = count(&mut t, "CELLS")?;
                records.reserve(n);
                for _ in 0..n {
                    let k = count(&mut t, "CELLS")?;
                    let mut rec = Vec::with_capacity(k);
                    for _ in 0..k {
                        rec.push(count(&mut t, "CELLS")?);
                    }
                    records.push(rec);
                }
            }
            "CELL_TYPES" => {
                let n = count(&mut t, "CELL_TYPES")?;
                for _ in 0..n {
                    types.push(count(&mut t, "CELL_TYPES")? as u32);
                }
            }
            "CELL_DATA" | "POINT_DATA" => break,
            "METADATA" | "FIELD" => break,
            other => {
                return Err(IoError::MalformedHeader(format!(
                    "unexpected keyword {other}"
                )));
            }
        }
    }
    if types.len() != records.len() {
        return Err(truncated(&format!(
            "{} cells but {} cell types",
            records.len(),
            types.len()
        )));
    }

    let mut cells = Vec::with_capacity(records.len());
    for (i, (rec, &code)) in records.into_iter().zip(&types).enumerate() {
        let (kind, n) = match code {
            VTK_TETRA => (RecordKind::Tetra, 4),
            VTK_HEXAHEDRON => (RecordKind::Hexahedron, 8),
            VTK_WEDGE => (RecordKind::Wedge, 6),
            VTK_PYRAMID => (RecordKind::Pyramid, 5),
            VTK_POLYHEDRON => {
                cells.push(CellRecord {
                    kind: RecordKind::Polyhedron,
                    vertices: Vec::new(),
                    faces: face_stream(&rec, i)?,
                });
                continue;
            }
            _ => return Err(IoError::UnsupportedCellType { code, cell: i }),
        };
        if rec.len() != n {
            return Err(IoError::MalformedSection {
                section: "CELLS".into(),
                detail: format!(
                    "cell {i} of type {code} has {} points, expected {n}",
                    rec.len()
                ),
            });
        }
        cells.push(CellRecord {
            kind,
            vertices: rec,
            faces: Vec::new(),
        });
    }
    Ok(RawMesh { positions, cells })
}

fn face_stream(rec: &[usize], cell: usize) -> Result<Vec<Vec<usize>>, IoError> {
    let bad = |detail: &str| IoError::MalformedSection {
        section: "CELLS".into(),
        detail: format!("polyhedron {cell}: {detail}"),
    };
    let (&nf, mut rest) = rec.split_first().ok_or_else(|| bad("empty face stream"))?;
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (&k, tail) = rest
            .split_first()
            .ok_or_else(|| bad("face stream ends early"))?;
        if tail.len() < k {
            return Err(bad("face stream ends early"));
        }
        faces.push(tail[..k].to_vec());
        rest = &tail[k..];
    }
    if !rest.is_empty() {
        return Err(bad("trailing entries after the last face"));
    }
    Ok(faces)
}

fn expect_keyword(t: &mut Tokens, kw: &str) -> Result<(), IoError> {
    match t.next() {
        Some((_, x)) if x.eq_ignore_ascii_case(kw) => Ok(()),
        Some((ln, x)) => Err(IoError::MalformedHeader(format!(
            "line {ln}: expected {kw}, found {x}"
        ))),
        None => Err(IoError::MalformedHeader(format!("missing {kw}"))),
    }
}

fn truncated(what: &str) -> IoError {
    IoError::TruncatedStream(what.to_string())
}

fn count(t: &mut Tokens, section: &str) -> Result<usize, IoError> {
    let (ln, tok) = t.next().ok_or_else(|| truncated(section))?;
    tok.parse().map_err(|_| IoError::MalformedSection {
        section: section.into(),
        detail: format!("line {ln}: expected a non-negative integer, found {tok}"),
    })
}

fn number(t: &mut Tokens, section: &str) -> Result<f64, IoError> {
    let (ln, tok) = t.next().ok_or_else(|| truncated(section))?;
    tok.parse().map_err(|_| IoError::MalformedSection {
        section: section.into(),
        detail: format!("line {ln}: expected a number, found {tok}"),
    })
}

/// Corner order of a hex cell as VTK expects it: a bottom loop followed by
/// the partner of each bottom corner.
pub fn hex_corner_order(mesh: &HexDominantMesh, c: CellId) -> [usize; 8] {
    let cell = mesh.cell(c);
    let bottom = &mesh.face(cell.faces[0]).vertices;
    let mut out = [0usize; 8];
    for (i, &b) in bottom.iter().enumerate() {
        out[i] = b.index();
        let partner = cell
            .edges
            .iter()
            .map(|&e| mesh.edge_vertices(e))
            .filter(|vs| vs.contains(&b))
            .map(|[x, y]| if x == b { y } else { x })
            .find(|v| !bottom.contains(v))
            .expect("hex corner has a vertical edge");
        out[i + 4] = partner.index();
    }
    out
}

/// Writes the given cells (all cells when `cells` is `None`) as an ASCII
/// `UNSTRUCTURED_GRID`: hexes as type 12, everything else as type 42. Points
/// are compacted to those referenced, in ascending order.
pub fn write_vtk_mesh(mesh: &HexDominantMesh, title: &str) -> String {
    let cells: Vec<CellId> = mesh.cell_ids().collect();
    write_grid(mesh, title, &cells).0
}

/// Returns the file text without trailing data sections, plus the point map.
pub(crate) fn write_grid(
    mesh: &HexDominantMesh,
    title: &str,
    cells: &[CellId],
) -> (String, Vec<usize>) {
    let mut used = vec![false; mesh.num_vertices()];
    for &c in cells {
        for v in &mesh.cell(c).vertices {
            used[v.index()] = true;
        }
    }
    let mut remap = vec![usize::MAX; mesh.num_vertices()];
    let mut points = Vec::new();
    for (i, &u) in used.iter().enumerate() {
        if u {
            remap[i] = points.len();
            points.push(i);
        }
    }

    let mut s = String::new();
    header(&mut s, title, "UNSTRUCTURED_GRID");
    write_points(&mut s, mesh, &points);

    let mut body = String::new();
    let mut size = 0usize;
    let mut types = Vec::with_capacity(cells.len());
    for &c in cells {
        if mesh.is_hex(c) {
            let order = hex_corner_order(mesh, c);
            body.push('8');
            for v in order {
                write!(body, " {}", remap[v]).unwrap();
            }
            size += 9;
            types.push(VTK_HEXAHEDRON);
        } else {
            let loops = mesh.cell_face_loops(c);
            let n: usize = 1 + loops.iter().map(|l| l.len() + 1).sum::<usize>();
            write!(body, "{n} {}", loops.len()).unwrap();
            for lp in &loops {
                write!(body, " {}", lp.len()).unwrap();
                for &v in lp {
                    write!(body, " {}", remap[v]).unwrap();
                }
            }
            size += n + 1;
            types.push(VTK_POLYHEDRON);
        }
        body.push('\n');
    }
    writeln!(s, "CELLS {} {}", cells.len(), size).unwrap();
    s.push_str(&body);
    writeln!(s, "CELL_TYPES {}", cells.len()).unwrap();
    for t in types {
        writeln!(s, "{t}").unwrap();
    }
    (s, remap)
}

pub(crate) fn header(s: &mut String, title: &str, dataset: &str) {
    s.push_str("# vtk DataFile Version 3.0\n");
    // The title line must not contain a newline.
    s.push_str(&title.replace(['\n', '\r'], " "));
    s.push('\n');
    s.push_str("ASCII\n");
    writeln!(s, "DATASET {dataset}").unwrap();
}

pub(crate) fn write_points(s: &mut String, mesh: &HexDominantMesh, points: &[usize]) {
    writeln!(s, "POINTS {} double", points.len()).unwrap();
    for &i in points {
        let [x, y, z] = mesh.positions()[i];
        writeln!(s, "{} {} {}", fmt_g9(x), fmt_g9(y), fmt_g9(z)).unwrap();
    }
}
