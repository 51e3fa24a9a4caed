use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use hexstruct_core::io::export::{complex_export, hsg_export, sheets_export, wireframe_export};
use hexstruct_core::io::{write_vtk_export, write_vtk_mesh, SceneExport};
use hexstruct_core::report::{compare_reports, write_comparison, write_report, write_reports};
use hexstruct_core::wireframe::{
    sheet_wireframe, DEFAULT_OPACITY_LAMBDA, DEFAULT_OPACITY_MIN, DEFAULT_RHO,
};
use hexstruct_core::{
    analyze, load_mesh, synth_grid, synth_inject_nonhex, Analysis, AnalysisOptions, CellId, Error,
    HexDominantMesh, IoError, Recipe, ReportFormat, SheetLevel, StructureReport, WireframeParams,
};

const EXIT_PARSE: u8 = 2;
const EXIT_UNSUPPORTED: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "hexstruct",
    version,
    about = "Global structure of hex-dominant meshes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyse one mesh and write its structure report.
    Analyze(AnalyzeArgs),
    /// Analyse two meshes and report both plus the differences.
    Compare(CompareArgs),
    /// Analyse every .vtk and .mesh file in a directory.
    Batch(BatchArgs),
    /// Write a synthetic mesh as VTK.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => ReportFormat::Json,
            Format::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Level {
    Mesh,
    BaseComplex,
}

#[derive(Args, Clone)]
struct PipelineArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Partial-parallel ratio threshold for colouring.
    #[arg(long, default_value_t = DEFAULT_RHO)]
    rho: f64,
    #[arg(long, default_value_t = DEFAULT_OPACITY_MIN)]
    opacity_min: f64,
    #[arg(long, default_value_t = DEFAULT_OPACITY_LAMBDA)]
    opacity_lambda: f64,
    /// Granularity of sheet extraction.
    #[arg(long, value_enum, default_value = "mesh")]
    level: Level,
    /// Decompose every self-intersecting sheet, not only the largest.
    #[arg(long)]
    decompose_all: bool,
    /// Reject unknown MEDIT sections; in batch mode also fail on any error.
    #[arg(long)]
    strict: bool,
    /// Write the report here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

impl PipelineArgs {
    fn options(&self) -> AnalysisOptions {
        AnalysisOptions {
            level: match self.level {
                Level::Mesh => SheetLevel::Mesh,
                Level::BaseComplex => SheetLevel::BaseComplex,
            },
            wireframe: WireframeParams {
                rho: self.rho,
                opacity_min: self.opacity_min,
                opacity_lambda: self.opacity_lambda,
            },
            decompose_all: self.decompose_all,
        }
    }
}

#[derive(Args, Clone)]
struct SynthSource {
    /// Structured grid "N" or "NX,NY,NZ" instead of an input file.
    #[arg(long)]
    synth_grid: Option<String>,
    /// Non-hex injection "NAME[:CELL]" applied to the synthetic grid; repeatable.
    #[arg(long)]
    synth_recipe: Vec<Recipe>,
}

#[derive(Args)]
struct AnalyzeArgs {
    input: Option<PathBuf>,
    #[command(flatten)]
    source: SynthSource,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Directory for the hybrid singularity graph export.
    #[arg(long)]
    export_hsg: Option<PathBuf>,
    /// Directory for the base complex export.
    #[arg(long)]
    export_complex: Option<PathBuf>,
    /// Directory for sheet and subsheet exports.
    #[arg(long)]
    export_sheets: Option<PathBuf>,
    /// Directory for the global wireframe export.
    #[arg(long)]
    export_wireframe: Option<PathBuf>,
    /// Directory for per-sheet and per-subsheet wireframes.
    #[arg(long)]
    export_sheet_wireframes: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    a: PathBuf,
    b: PathBuf,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Args)]
struct BatchArgs {
    dir: PathBuf,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    source: SynthSource,
    #[arg(long, short)]
    output: PathBuf,
}

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn internal(error: anyhow::Error) -> Self {
        Failure {
            code: EXIT_INTERNAL,
            error,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io(IoError::UnsupportedCellType { .. }) => EXIT_UNSUPPORTED,
            Error::Io(_) | Error::Mesh(_) => EXIT_PARSE,
            Error::BaseComplex(_) => EXIT_INTERNAL,
        };
        Failure {
            code,
            error: e.into(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::internal(e)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("HEXSTRUCT_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Batch(a) => cmd_batch(a),
        Command::Synth(a) => cmd_synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("hexstruct: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn parse_grid(grid: &str) -> Result<[usize; 3], Failure> {
    let parts: Result<Vec<usize>, _> = grid.split(',').map(|p| p.trim().parse()).collect();
    match parts.as_deref() {
        Ok([n]) => Ok([*n; 3]),
        Ok([x, y, z]) => Ok([*x, *y, *z]),
        _ => Err(Failure {
            code: EXIT_PARSE,
            error: anyhow::anyhow!("--synth-grid expects N or NX,NY,NZ, got {grid:?}"),
        }),
    }
}

fn synth_mesh(grid: &str, recipes: &[Recipe]) -> Result<(String, HexDominantMesh), Failure> {
    let [nx, ny, nz] = parse_grid(grid)?;
    let mut mesh = synth_grid(nx, ny, nz).map_err(Error::from)?;
    let mut name = format!("synth-grid-{nx}x{ny}x{nz}");
    for &r in recipes {
        mesh = synth_inject_nonhex(&mesh, r).map_err(Error::from)?;
        name.push_str(&format!("+{r}"));
    }
    Ok((name, mesh))
}

fn mesh_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn load(path: &Path, strict: bool) -> Result<(String, HexDominantMesh), Failure> {
    let mesh = load_mesh(path, strict).map_err(|e| {
        let mut f = Failure::from(e);
        f.error = f.error.context(format!("reading {}", path.display()));
        f
    })?;
    Ok((mesh_name(path), mesh))
}

fn emit(bytes: &[u8], output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout()
            .write_all(bytes)
            .context("writing to standard output")?,
    }
    Ok(())
}

fn write_scene(mesh: &HexDominantMesh, scene: &SceneExport, dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (name, text) in write_vtk_export(mesh, scene).map_err(Error::from)? {
        let path = dir.join(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<(), Failure> {
    let (name, mesh) = match (&args.input, &args.source.synth_grid) {
        (Some(path), None) => load(path, args.pipeline.strict)?,
        (None, Some(grid)) => synth_mesh(grid, &args.source.synth_recipe)?,
        _ => {
            return Err(Failure {
                code: EXIT_PARSE,
                error: anyhow::anyhow!("give exactly one of INPUT or --synth-grid"),
            })
        }
    };
    let opts = args.pipeline.options();
    let a = analyze(&name, &mesh, &opts)?;
    log::info!(
        "{name}: {} cells, {} components",
        mesh.num_cells(),
        a.complex.num_components()
    );

    if let Some(dir) = &args.export_hsg {
        write_scene(&mesh, &hsg_export(&a.hsg, &mesh), dir)?;
    }
    if let Some(dir) = &args.export_complex {
        write_scene(&mesh, &complex_export(&a.complex), dir)?;
    }
    if let Some(dir) = &args.export_sheets {
        write_scene(&mesh, &sheets_export(&mesh, &a.sheets, &a.subsheets), dir)?;
    }
    if let Some(dir) = &args.export_wireframe {
        write_scene(
            &mesh,
            &wireframe_export(&mesh, &a.wireframe, "wireframe"),
            dir,
        )?;
    }
    if let Some(dir) = &args.export_sheet_wireframes {
        write_scene(&mesh, &sheet_wireframes(&mesh, &a, &opts), dir)?;
    }
    emit(
        &write_report(&a.report, args.pipeline.format.into()),
        args.pipeline.output.as_deref(),
    )
}

fn sheet_wireframes(mesh: &HexDominantMesh, a: &Analysis, opts: &AnalysisOptions) -> SceneExport {
    let with_nonhex = |cells: &[CellId], nonhex: &[CellId]| {
        let mut all = cells.to_vec();
        all.extend_from_slice(nonhex);
        all
    };
    let mut jobs: Vec<(String, Vec<CellId>)> = Vec::new();
    for (i, s) in a.sheets.iter().enumerate() {
        jobs.push((
            format!("sheet_{i:03}_wireframe"),
            with_nonhex(&s.cells, &s.adjacent_nonhex),
        ));
    }
    for (i, s) in a.subsheets.iter().enumerate() {
        jobs.push((
            format!("subsheet_{i:03}_wireframe"),
            with_nonhex(&s.cells, &s.adjacent_nonhex),
        ));
    }
    let groups = jobs
        .par_iter()
        .map(|(name, cells)| {
            let wf = sheet_wireframe(mesh, cells, &opts.wireframe);
            wireframe_export(mesh, &wf, name).groups
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    SceneExport { groups }
}

fn cmd_compare(args: CompareArgs) -> Result<(), Failure> {
    let opts = args.pipeline.options();
    let mut reports = Vec::new();
    for path in [&args.a, &args.b] {
        let (name, mesh) = load(path, args.pipeline.strict)?;
        reports.push(analyze(&name, &mesh, &opts)?.report);
    }
    let cmp = compare_reports(&reports[0], &reports[1]);
    emit(
        &write_comparison(&cmp, args.pipeline.format.into()),
        args.pipeline.output.as_deref(),
    )
}

fn batch_inputs(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let entries = fs::read_dir(dir).map_err(|e| Failure {
        code: EXIT_PARSE,
        error: anyhow::Error::new(e).context(format!("reading directory {}", dir.display())),
    })?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| {
            p.is_file()
                && matches!(
                    p.extension()
                        .and_then(|e| e.to_str())
                        .map(str::to_ascii_lowercase)
                        .as_deref(),
                    Some("vtk" | "mesh")
                )
        })
        .collect();
    paths.sort();
    Ok(paths)
}

fn cmd_batch(args: BatchArgs) -> Result<(), Failure> {
    let paths = batch_inputs(&args.dir)?;
    let opts = args.pipeline.options();
    let strict = args.pipeline.strict;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .context("starting worker pool")?;
    let results: Vec<Result<StructureReport, Failure>> = pool.install(|| {
        paths
            .par_iter()
            .map(|p| {
                let (name, mesh) = load(p, strict)?;
                Ok(analyze(&name, &mesh, &opts)?.report)
            })
            .collect()
    });

    let mut reports = Vec::new();
    let mut first_failure = None;
    let mut failed = 0usize;
    for (path, r) in paths.iter().zip(results) {
        match r {
            Ok(rep) => reports.push(rep),
            Err(f) => {
                failed += 1;
                log::error!("{}: {:#}", path.display(), f.error);
                first_failure.get_or_insert(f);
            }
        }
    }
    emit(
        &write_reports(&reports, args.pipeline.format.into()),
        args.pipeline.output.as_deref(),
    )?;
    eprintln!(
        "hexstruct: {} meshes analysed, {failed} failed",
        reports.len()
    );
    match first_failure {
        Some(f) if strict => Err(f),
        _ => Ok(()),
    }
}

fn cmd_synth(args: SynthArgs) -> Result<(), Failure> {
    let grid = args.source.synth_grid.as_deref().ok_or_else(|| Failure {
        code: EXIT_PARSE,
        error: anyhow::anyhow!("synth needs --synth-grid"),
    })?;
    let (name, mesh) = synth_mesh(grid, &args.source.synth_recipe)?;
    emit(write_vtk_mesh(&mesh, &name).as_bytes(), Some(&args.output))
}
