//! The full pipeline with per-stage timings.

use std::time::Instant;

use crate::base_complex::{extract_base_complex, ComponentKind, Frame, HybridBaseComplex};
use crate::mesh::HexDominantMesh;
use crate::report::{StructureReport, Timings};
use crate::sheets::{classified, decompose_sheet, extract_sheets_at, Sheet, SheetLevel, SubSheet};
use crate::singularity::{
    extract_hybrid_singularity_graph, extract_vsg, HybridSingularityGraph, ValenceSingularityGraph,
};
use crate::wireframe::{compute_wireframe, ColorAssignment, VsgWireframe, WireframeParams};
use crate::Error;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AnalysisOptions {
    pub level: SheetLevel,
    pub wireframe: WireframeParams,
    /// Decompose every t3 sheet instead of only the largest.
    pub decompose_all: bool,
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub hsg: HybridSingularityGraph,
    pub frame: Frame,
    pub complex: HybridBaseComplex,
    pub vsg: ValenceSingularityGraph,
    pub wireframe: VsgWireframe,
    pub colors: ColorAssignment,
    /// Augmented and classified.
    pub sheets: Vec<Sheet>,
    /// Subsheets of every decomposed sheet, `parent` indexing `sheets`.
    pub subsheets: Vec<SubSheet>,
    pub report: StructureReport,
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed().as_secs_f64())
}

/// Largest t3 sheet by cell count; ties go to the lower index.
pub fn largest_t3(sheets: &[Sheet]) -> Option<usize> {
    sheets
        .iter()
        .enumerate()
        .filter(|(_, s)| s.flags.t3)
        .max_by(|(i, a), (j, b)| a.cells.len().cmp(&b.cells.len()).then(j.cmp(i)))
        .map(|(i, _)| i)
}

pub fn analyze(
    name: &str,
    mesh: &HexDominantMesh,
    opts: &AnalysisOptions,
) -> Result<Analysis, Error> {
    let (hsg, t_gs) = timed(|| extract_hybrid_singularity_graph(mesh));
    let (bc, t_gb) = timed(|| extract_base_complex(mesh, &hsg));
    let (frame, complex) = bc?;
    let ((vsg, (wireframe, colors)), t_vsgw) = timed(|| {
        let vsg = extract_vsg(mesh);
        let wf = compute_wireframe(mesh, &vsg, &opts.wireframe);
        (vsg, wf)
    });
    let (sheets, t_gsh) = timed(|| {
        extract_sheets_at(mesh, opts.level, &complex)
            .iter()
            .map(|s| classified(mesh, s))
            .collect::<Vec<_>>()
    });
    let largest = largest_t3(&sheets);
    let ((subsheets, n_largest), t_gsh_star) = timed(|| {
        let targets: Vec<usize> = if opts.decompose_all {
            (0..sheets.len()).filter(|&i| sheets[i].flags.t3).collect()
        } else {
            largest.into_iter().collect()
        };
        let mut all = Vec::new();
        let mut n_largest = 0;
        for i in targets {
            let subs = decompose_sheet(mesh, i, &sheets[i]);
            if Some(i) == largest {
                n_largest = subs.len();
            }
            all.extend(subs);
        }
        (all, n_largest)
    });

    log::debug!(
        "{name}: graph {t_gs:.3}s, complex {t_gb:.3}s, wireframe {t_vsgw:.3}s, sheets {t_gsh:.3}s, decomposition {t_gsh_star:.3}s"
    );
    if mesh.is_non_conforming() {
        log::warn!("{name}: mesh has non-conforming faces");
    }

    let num_cells = mesh.num_cells();
    let hex_components = complex.num_hex_components();
    let count = |p: fn(&Sheet) -> bool| sheets.iter().filter(|s| p(s)).count();
    let report = StructureReport {
        mesh: name.to_string(),
        num_cells,
        hex_ratio: ratio(mesh.num_hex_cells(), num_cells),
        num_components: complex.num_components(),
        hexbc_ratio: ratio(hex_components, complex.num_components()),
        n_sheets: sheets.len(),
        n_t1: count(|s| s.flags.t1),
        n_t2: count(|s| s.flags.t2),
        n_t3: count(|s| s.flags.t3),
        n_subsheets_largest_t3: n_largest,
        timings: Timings {
            graph: t_gs,
            complex: t_gb,
            wireframe: t_vsgw,
            sheets: t_gsh,
            decomposition: t_gsh_star,
        },
        non_conforming: mesh.is_non_conforming(),
    };
    debug_assert_eq!(
        complex
            .components
            .iter()
            .filter(|c| c.kind == ComponentKind::NonHex)
            .count(),
        num_cells - mesh.num_hex_cells()
    );
    Ok(Analysis {
        hsg,
        frame,
        complex,
        vsg,
        wireframe,
        colors,
        sheets,
        subsheets,
        report,
    })
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}
