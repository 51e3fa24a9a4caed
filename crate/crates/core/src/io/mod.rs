//! Mesh readers (VTK legacy ASCII, MEDIT) and VTK writers for meshes and
//! structure exports.

pub mod export;
pub mod medit;
pub mod vtk;

use std::path::Path;

use thiserror::Error;

use crate::mesh::{build_mesh, HexDominantMesh, MeshError, RawCell};

pub use export::{write_vtk_export, ExportGroup, SceneExport};
pub use medit::read_medit;
pub use vtk::{read_vtk_legacy, write_vtk_mesh};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("unsupported cell type {code} (cell {cell})")]
    UnsupportedCellType { code: u32, cell: usize },
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("truncated stream: {0}")]
    TruncatedStream(String),
    #[error("malformed section {section}: {detail}")]
    MalformedSection { section: String, detail: String },
    #[error("unknown keyword {0} in strict mode")]
    UnknownKeywordInStrictMode(String),
    #[error("export references missing element: {0}")]
    DanglingReference(String),
    #[error("unrecognised mesh file extension: {0}")]
    UnknownFormat(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecordKind {
    Tetra,
    Hexahedron,
    Wedge,
    Pyramid,
    Polyhedron,
}

/// One cell as read from a file, before topology is built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellRecord {
    pub kind: RecordKind,
    /// Corner list for fixed-shape cells; empty for polyhedra.
    pub vertices: Vec<usize>,
    /// Face loops for polyhedra; empty otherwise.
    pub faces: Vec<Vec<usize>>,
}

impl CellRecord {
    pub fn to_raw_cell(&self) -> RawCell {
        let v = &self.vertices;
        match self.kind {
            RecordKind::Tetra => RawCell::tetrahedron([v[0], v[1], v[2], v[3]]),
            RecordKind::Hexahedron => {
                RawCell::hexahedron([v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]])
            }
            RecordKind::Wedge => RawCell::prism([v[0], v[1], v[2], v[3], v[4], v[5]]),
            RecordKind::Pyramid => RawCell::pyramid([v[0], v[1], v[2], v[3], v[4]]),
            RecordKind::Polyhedron => RawCell::new(self.faces.clone()),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawMesh {
    pub positions: Vec<[f64; 3]>,
    pub cells: Vec<CellRecord>,
}

impl RawMesh {
    pub fn build(self) -> Result<HexDominantMesh, MeshError> {
        let raw: Vec<RawCell> = self.cells.iter().map(CellRecord::to_raw_cell).collect();
        build_mesh(self.positions, &raw)
    }
}

/// Reads `.vtk` or `.mesh` by extension. `strict` applies to MEDIT only.
pub fn read_mesh_file(path: &Path, strict: bool) -> Result<RawMesh, IoError> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    let bytes = std::fs::read(path)?;
    match ext.as_str() {
        "vtk" => read_vtk_legacy(&bytes),
        "mesh" => read_medit(&bytes, strict),
        _ => Err(IoError::UnknownFormat(path.display().to_string())),
    }
}

/// `printf("%.9g")`.
pub fn fmt_g9(x: f64) -> String {
    const P: i32 = 9;
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if !(-4..P).contains(&exp) {
        let m = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        trim_fraction(&format!("{:.*}", (P - 1 - exp) as usize, x)).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Whitespace tokenizer with line tracking for error messages.
pub(crate) struct Tokens<'a> {
    iter: std::vec::IntoIter<(usize, &'a str)>,
}

impl<'a> Tokens<'a> {
    pub(crate) fn new(text: &'a str, comment: Option<char>) -> Self {
        let mut toks = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = match comment {
                Some(c) => line.split(c).next().unwrap_or(""),
                None => line,
            };
            toks.extend(line.split_whitespace().map(|t| (ln + 1, t)));
        }
        Tokens {
            iter: toks.into_iter(),
        }
    }

    pub(crate) fn next(&mut self) -> Option<(usize, &'a str)> {
        self.iter.next()
    }
}

#[cfg(test)]
mod tests {
    use super::fmt_g9;

    #[test]
    fn g9_matches_printf() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (0.1, "0.1"),
            (1.0 / 3.0, "0.333333333"),
            (123456789.0, "123456789"),
            (1234567890.0, "1.23456789e+09"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (1e100, "1e+100"),
            (0.35, "0.35"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_g9(x), want, "{x}");
        }
    }
}
