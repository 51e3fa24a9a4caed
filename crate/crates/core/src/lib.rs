//! Global structure of hexahedral-dominant meshes: hybrid singularity graph,
//! hybrid base complex, sheets and subsheets, and the simplified VSG wireframe.
//!
//! ```
//! use hexstruct_core::{analyze, synth_grid, AnalysisOptions};
//!
//! let mesh = synth_grid(3, 3, 3).unwrap();
//! let a = analyze("grid", &mesh, &AnalysisOptions::default()).unwrap();
//! assert_eq!(a.report.num_components, 1);
//! assert_eq!(a.report.n_sheets, 9);
//! ```

pub mod analysis;
pub mod base_complex;
pub mod io;
pub mod mesh;
pub mod report;
pub mod sheets;
pub mod singularity;
pub mod synth;
pub mod wireframe;

pub use analysis::{analyze, Analysis, AnalysisOptions};
pub use base_complex::{
    extract_base_complex, partition_components, trace_frame, BaseComplexError, Component,
    ComponentKind, Frame, HybridBaseComplex,
};
pub use io::{read_mesh_file, IoError, RawMesh};
pub use mesh::{
    build_mesh, CellId, CellKind, EdgeId, FaceId, HexDominantMesh, MeshError, RawCell, VertexId,
};
pub use report::{ReportFormat, StructureReport, Timings};
pub use sheets::{Sheet, SheetFlags, SheetLevel, SubSheet};
pub use singularity::{
    extract_hybrid_singularity_graph, extract_vsg, HybridSingularityGraph, Singularity,
    ValenceSingularityGraph,
};
pub use synth::{synth_grid, synth_inject_nonhex, Recipe};
pub use wireframe::{ColorAssignment, VsgWireframe, WireframeParams};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    BaseComplex(#[from] BaseComplexError),
}

/// Reads and builds a mesh file in one step.
pub fn load_mesh(path: &std::path::Path, strict: bool) -> Result<HexDominantMesh, Error> {
    Ok(read_mesh_file(path, strict)?.build()?)
}
