use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use htg_core::generate::{generate, CanonicalGrid};
use htg_core::io::{load_grid, save_grid, write_mesh_native, MeshDocument};
use htg_core::selection::extract_selection;
use htg_core::{
    adaptive_surface, elevate_by_depth, extract_surface_2d, extract_surface_3d, Camera2D, Error, HyperTreeGrid,
    SelectionKind, SelectionOutput, SelectionRequest,
};

#[derive(Debug, Parser)]
#[command(name = "htg", version, about = "Hypertree grid surface and selection filters")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a canonical grid: paper2d, paper3d, uniform(d,f,k) or random(d,f,k).
    Gen {
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 0.0)]
        mask_density: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Full surface: every unmasked leaf in 2D, the outer faces in 3D.
    Surface(MeshArgs),
    /// Camera-dependent 2D surface (3D grids get the full outer surface).
    Adaptive {
        #[command(flatten)]
        mesh: MeshArgs,
        /// w,h,z,s,cx,cy: window pixels, zoom, pixel threshold, view center.
        #[arg(long, allow_hyphen_values = true)]
        camera: String,
    },
    /// Select cells by global Id.
    SelectIds {
        #[command(flatten)]
        mesh: MeshArgs,
        #[command(flatten)]
        select: SelectArgs,
        /// Comma-separated Ids.
        #[arg(long)]
        ids: Option<String>,
    },
    /// Select leaves containing world-space points.
    SelectLocations {
        #[command(flatten)]
        mesh: MeshArgs,
        #[command(flatten)]
        select: SelectArgs,
        /// Points as `x,y[,z];x,y[,z];...`.
        #[arg(long, allow_hyphen_values = true)]
        points: Option<String>,
    },
    /// 2D surface with each quad lifted to depth × height-scale.
    Elevate {
        #[command(flatten)]
        mesh: MeshArgs,
        #[arg(long, default_value_t = 1.0)]
        height_scale: f64,
    },
    /// Cell counts and leaf depth histogram.
    Stats {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct MeshArgs {
    #[arg(long)]
    grid: PathBuf,
    /// Output file; omitted means only the summary line is printed.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Native)]
    format: Format,
}

#[derive(Debug, Args)]
struct SelectArgs {
    /// Emit a per-cell selection mask instead of extracted cells.
    #[arg(long)]
    preserve_topology: bool,
    /// Allow masked cells to be selected.
    #[arg(long)]
    include_masked: bool,
    /// JSON request document; replaces --ids / --points.
    #[arg(long)]
    request: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Obj,
    Native,
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Params(String),
}

impl CliError {
    pub const GENERIC: u8 = 1;
    pub const PARSE: u8 = 2;
    pub const PARAMS: u8 = 3;
    pub const DIMENSION: u8 = 4;

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Params(_) => Self::PARAMS,
            CliError::Core(e) => match e {
                Error::WrongDimension { .. } | Error::DimensionMismatch { .. } => Self::DIMENSION,
                Error::InvalidCamera(_)
                | Error::NonPositiveArgument(_)
                | Error::UnknownCanonicalGrid(_)
                | Error::IndexOutOfRange(_)
                | Error::NotRefined => Self::PARAMS,
                Error::Io(_) => Self::GENERIC,
                _ => Self::PARSE,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => e.fmt(f),
            CliError::Params(m) => write!(f, "bad parameters: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Core(Error::Io(e))
    }
}

/// One line per invocation: command, input cells, output cells, filter time.
pub struct Summary {
    command: &'static str,
    input_cells: usize,
    output_cells: usize,
    elapsed_ms: f64,
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "command={} input_cells={} output_cells={} elapsed_ms={:.3}",
            self.command, self.input_cells, self.output_cells, self.elapsed_ms
        )
    }
}

fn parse_numbers(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| CliError::Params(format!("bad number {v:?} in {what}"))))
        .collect()
}

pub fn parse_camera(s: &str) -> Result<Camera2D, CliError> {
    let v = parse_numbers(s, "--camera")?;
    let [w, h, z, scale, cx, cy] = v[..] else {
        return Err(CliError::Params(format!("--camera needs 6 values w,h,z,s,cx,cy, got {}", v.len())));
    };
    Ok(Camera2D::new(w, h, z, scale, [cx, cy]))
}

fn parse_ids(s: &str) -> Result<Vec<u64>, CliError> {
    s.split(',')
        .filter(|v| !v.trim().is_empty())
        .map(|v| v.trim().parse::<u64>().map_err(|_| CliError::Params(format!("bad id {v:?}"))))
        .collect()
}

fn parse_points(s: &str) -> Result<Vec<Vec<f64>>, CliError> {
    s.split(';').filter(|p| !p.trim().is_empty()).map(|p| parse_numbers(p, "--points")).collect()
}

fn read_request(path: &Path) -> Result<SelectionRequest, CliError> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Core(Error::Parse(e.to_string())))
}

fn timed<T>(f: impl FnOnce() -> htg_core::Result<T>) -> Result<(T, f64), CliError> {
    let start = Instant::now();
    let v = f()?;
    Ok((v, start.elapsed().as_secs_f64() * 1e3))
}

fn write_output(doc: &MeshDocument, out: Option<&Path>, format: Format) -> Result<(), CliError> {
    let Some(path) = out else { return Ok(()) };
    let mut w = BufWriter::new(File::create(path)?);
    match (format, doc) {
        (Format::Native, _) => write_mesh_native(doc, &mut w)?,
        (Format::Obj, MeshDocument::PolyMesh(m)) => m.write_obj(&mut w)?,
        (Format::Obj, MeshDocument::UnstructuredMesh(m)) => m.write_obj(&mut w)?,
        (Format::Obj, MeshDocument::SelectionMask { .. }) => {
            return Err(CliError::Params("a preserve-topology mask has no OBJ form; use --format native".into()))
        }
    }
    w.flush()?;
    Ok(())
}

fn mesh_command(
    command: &'static str,
    args: &MeshArgs,
    filter: impl FnOnce(&HyperTreeGrid) -> htg_core::Result<MeshDocument>,
) -> Result<Summary, CliError> {
    let grid = load_grid(&args.grid)?;
    let (doc, elapsed_ms) = timed(|| filter(&grid))?;
    write_output(&doc, args.out.as_deref(), args.format)?;
    Ok(Summary { command, input_cells: grid.total_cells(), output_cells: doc.cell_count(), elapsed_ms })
}

fn selection_document(out: SelectionOutput) -> MeshDocument {
    match out {
        SelectionOutput::Mask(bits) => MeshDocument::selection_mask(&bits),
        SelectionOutput::Mesh(m) => MeshDocument::UnstructuredMesh(m),
    }
}

fn selection_request(select: &SelectArgs, inline: Option<SelectionKind>) -> Result<SelectionRequest, CliError> {
    let mut req = match (&select.request, inline) {
        (Some(path), None) => read_request(path)?,
        (None, Some(kind)) => SelectionRequest { kind, preserve_topology: false, include_masked: false },
        (Some(_), Some(_)) => return Err(CliError::Params("give either --request or inline values, not both".into())),
        (None, None) => return Err(CliError::Params("nothing to select".into())),
    };
    req.preserve_topology |= select.preserve_topology;
    req.include_masked |= select.include_masked;
    Ok(req)
}

pub fn run(cli: Cli) -> Result<Summary, CliError> {
    match cli.command {
        Command::Gen { name, seed, mask_density, out } => {
            let which: CanonicalGrid = name.parse()?;
            if !(0.0..=1.0).contains(&mask_density) {
                return Err(CliError::Params(format!("--mask-density {mask_density} outside [0, 1]")));
            }
            let (grid, elapsed_ms) = timed(|| generate(which, seed, mask_density))?;
            save_grid(&grid, &out)?;
            Ok(Summary { command: "gen", input_cells: 0, output_cells: grid.total_cells(), elapsed_ms })
        }
        Command::Surface(args) => mesh_command("surface", &args, |g| {
            let m = if g.dimension() == 2 { extract_surface_2d(g)? } else { extract_surface_3d(g)? };
            Ok(MeshDocument::PolyMesh(m))
        }),
        Command::Adaptive { mesh, camera } => {
            let camera = parse_camera(&camera)?;
            camera.validate()?;
            mesh_command("adaptive", &mesh, |g| Ok(MeshDocument::PolyMesh(adaptive_surface(g, &camera)?)))
        }
        Command::SelectIds { mesh, select, ids } => {
            let inline = ids.as_deref().map(parse_ids).transpose()?.map(|ids| SelectionKind::Ids { ids });
            let req = selection_request(&select, inline)?;
            if !matches!(req.kind, SelectionKind::Ids { .. }) {
                return Err(CliError::Params("select-ids needs an ids request".into()));
            }
            mesh_command("select-ids", &mesh, |g| Ok(selection_document(extract_selection(g, &req)?)))
        }
        Command::SelectLocations { mesh, select, points } => {
            let inline = points.as_deref().map(parse_points).transpose()?.map(|points| SelectionKind::Locations { points });
            let req = selection_request(&select, inline)?;
            if !matches!(req.kind, SelectionKind::Locations { .. }) {
                return Err(CliError::Params("select-locations needs a locations request".into()));
            }
            mesh_command("select-locations", &mesh, |g| Ok(selection_document(extract_selection(g, &req)?)))
        }
        Command::Elevate { mesh, height_scale } => {
            if !height_scale.is_finite() {
                return Err(CliError::Params("--height-scale must be finite".into()));
            }
            mesh_command("elevate", &mesh, |g| Ok(MeshDocument::PolyMesh(elevate_by_depth(g, height_scale)?)))
        }
        Command::Stats { grid, out } => {
            let grid = load_grid(&grid)?;
            let (stats, elapsed_ms) = timed(|| Ok(grid.stats()))?;
            let text = serde_json::to_string_pretty(&stats).expect("stats serialize");
            match out {
                Some(path) => std::fs::write(path, text + "\n")?,
                None => println!("{text}"),
            }
            Ok(Summary { command: "stats", input_cells: grid.total_cells(), output_cells: stats.leaf_count, elapsed_ms })
        }
    }
}
