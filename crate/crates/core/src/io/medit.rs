use super::{CellRecord, IoError, RawMesh, RecordKind, Tokens};

/// Surface and auxiliary sections that lenient mode skips: name, integers per
/// entry, whether a reference follows each entry.
const SKIPPABLE: &[(&str, usize, bool)] = &[
    ("Edges", 2, true),
    ("Triangles", 3, true),
    ("Quadrilaterals", 4, true),
    ("Corners", 1, false),
    ("Ridges", 1, false),
    ("RequiredVertices", 1, false),
    ("RequiredEdges", 1, false),
    ("RequiredTriangles", 1, false),
    ("RequiredQuadrilaterals", 1, false),
];

/// Parses an ASCII MEDIT `.mesh` file. In strict mode only the header and the
/// volume sections are accepted.
pub fn read_medit(bytes: &[u8], strict: bool) -> Result<RawMesh, IoError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|_| IoError::MalformedHeader("file is not UTF-8 text".into()))?;
    let mut t = Tokens::new(text, Some('#'));
    let mut positions = Vec::new();
    let mut cells = Vec::new();
    while let Some((ln, kw)) = t.next() {
        match kw {
            "MeshVersionFormatted" | "Dimension" => {
                let v = int(&mut t, kw)?;
                if kw == "Dimension" && v != 3 {
                    return Err(IoError::MalformedSection {
                        section: kw.into(),
                        detail: format!("only 3D meshes are supported, found {v}"),
                    });
                }
            }
            "Vertices" => {
                let n = int(&mut t, kw)?;
                positions.reserve(n);
                for _ in 0..n {
                    let mut p = [0.0; 3];
                    for c in &mut p {
                        *c = float(&mut t, kw)?;
                    }
                    let _ref = int_signed(&mut t, kw)?;
                    positions.push(p);
                }
            }
            "Hexahedra" => read_cells(&mut t, kw, RecordKind::Hexahedron, 8, &mut cells)?,
            "Tetrahedra" => read_cells(&mut t, kw, RecordKind::Tetra, 4, &mut cells)?,
            "Prisms" => read_cells(&mut t, kw, RecordKind::Wedge, 6, &mut cells)?,
            "Pyramids" => read_cells(&mut t, kw, RecordKind::Pyramid, 5, &mut cells)?,
            "End" => break,
            other => {
                if strict {
                    return Err(IoError::UnknownKeywordInStrictMode(other.to_string()));
                }
                let Some(&(_, width, has_ref)) = SKIPPABLE.iter().find(|(k, _, _)| *k == other)
                else {
                    return Err(IoError::MalformedSection {
                        section: other.into(),
                        detail: format!("line {ln}: unknown keyword"),
                    });
                };
                let n = int(&mut t, other)?;
                for _ in 0..n * (width + usize::from(has_ref)) {
                    int_signed(&mut t, other)?;
                }
            }
        }
    }
    Ok(RawMesh { positions, cells })
}

fn read_cells(
    t: &mut Tokens,
    section: &str,
    kind: RecordKind,
    width: usize,
    out: &mut Vec<CellRecord>,
) -> Result<(), IoError> {
    let n = int(t, section)?;
    out.reserve(n);
    for _ in 0..n {
        let mut vertices = Vec::with_capacity(width);
        for _ in 0..width {
            let i = int(t, section)?;
            if i == 0 {
                return Err(IoError::MalformedSection {
                    section: section.into(),
                    detail: "vertex index 0 in a 1-based file".into(),
                });
            }
            vertices.push(i - 1);
        }
        let _ref = int_signed(t, section)?;
        out.push(CellRecord {
            kind,
            vertices,
            faces: Vec::new(),
        });
    }
    Ok(())
}

fn token<'a>(t: &mut Tokens<'a>, section: &str) -> Result<(usize, &'a str), IoError> {
    t.next().ok_or_else(|| IoError::MalformedSection {
        section: section.into(),
        detail: "unexpected end of file".into(),
    })
}

fn parse<T: std::str::FromStr>(t: &mut Tokens, section: &str, what: &str) -> Result<T, IoError> {
    let (ln, tok) = token(t, section)?;
    tok.parse().map_err(|_| IoError::MalformedSection {
        section: section.into(),
        detail: format!("line {ln}: expected {what}, found {tok}"),
    })
}

fn int(t: &mut Tokens, section: &str) -> Result<usize, IoError> {
    parse(t, section, "a non-negative integer")
}

fn int_signed(t: &mut Tokens, section: &str) -> Result<i64, IoError> {
    parse(t, section, "an integer")
}

fn float(t: &mut Tokens, section: &str) -> Result<f64, IoError> {
    parse(t, section, "a number")
}

#[cfg(test)]
mod tests {
    use super::*;

    const CUBE: &str = "MeshVersionFormatted 2
Dimension 3
Vertices
8
0 0 0 1
1 0 0 1
1 1 0 1
0 1 0 1
0 0 1 1
1 0 1 1
1 1 1 1
0 1 1 1
Hexahedra
1
1 2 3 4 5 6 7 8 0
End
";

    #[test]
    fn one_hex() {
        let raw = read_medit(CUBE.as_bytes(), true).unwrap();
        assert_eq!(raw.cells[0].vertices, (0..8).collect::<Vec<_>>());
        assert_eq!(raw.build().unwrap().num_hex_cells(), 1);
    }

    #[test]
    fn one_prism() {
        let text = "Dimension 3\nVertices 6\n0 0 0 0\n1 0 0 0\n0 1 0 0\n0 0 1 0\n1 0 1 0\n0 1 1 0\nPrisms 1\n1 2 3 4 5 6 1\nEnd\n";
        let m = read_medit(text.as_bytes(), true).unwrap().build().unwrap();
        assert_eq!(m.num_cells(), 1);
        assert_eq!(m.num_hex_cells(), 0);
    }

    #[test]
    fn surface_sections_are_skipped_unless_strict() {
        let text = CUBE.replace("End", "Quadrilaterals\n1\n1 2 3 4 7\n# comment\nEnd");
        assert_eq!(read_medit(text.as_bytes(), false).unwrap().cells.len(), 1);
        assert!(matches!(
            read_medit(text.as_bytes(), true),
            Err(IoError::UnknownKeywordInStrictMode(k)) if k == "Quadrilaterals"
        ));
    }

    #[test]
    fn malformed_sections() {
        let text = CUBE.replace("1 2 3 4 5 6 7 8 0", "1 2 3 x 5 6 7 8 0");
        assert!(matches!(
            read_medit(text.as_bytes(), false),
            Err(IoError::MalformedSection { .. })
        ));
        let cut = CUBE.replace("1 2 3 4 5 6 7 8 0\nEnd\n", "1 2 3");
        assert!(matches!(
            read_medit(cut.as_bytes(), false),
            Err(IoError::MalformedSection { .. })
        ));
        let unknown = CUBE.replace("End", "Bogus 1 2");
        assert!(matches!(
            read_medit(unknown.as_bytes(), false),
            Err(IoError::MalformedSection { .. })
        ));
    }
}
