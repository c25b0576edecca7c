//! `slicyl` command-line front end.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use slicyl::mesh::EdgeDefectKind;
use slicyl::SlicylError;

const EXIT_CODES: &str = "\
Exit codes:
   0  success
   1  I/O error (E_IO)
   2  mesh is not a closed 2-manifold (E_NON_MANIFOLD); bypass with --force
   3  a facet crosses the x-axis (E_AXIS_CROSSING_FACET)
   4  degree or contour error (E_DEGREE, E_OPEN_CHAIN, E_AMBIGUOUS_WINDING,
      E_ODD_TYPE_II, E_ARC_ORACLE, E_DEGENERATE_PLANE)
   5  facet interior passed without edge crossings, with --strict (E_INTERIOR_PASS)
   6  unreadable STL (E_EMPTY_FILE, E_TRUNCATED, E_PARSE)
   7  skewer axis has zero length (E_ZERO_AXIS)
   8  no usable slicyl radii (E_NO_LAYERS, E_DECOLLIDE_FAIL)
   9  active and naive slicing disagree (bench only, E_ORACLE_MISMATCH)
  64  usage error (E_USAGE, E_PARAM)

On failure a one-line JSON error record is written to stderr.";

#[derive(Debug, Parser)]
#[command(name = "slicyl", version, about = "Cylindrical slicing of STL meshes for additive-lathe printing")]
#[command(after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Slice a mesh into cylindrical layers and write contours.
    #[command(after_help = EXIT_CODES)]
    Slice(SliceConfig),
    /// Print mesh statistics, manifold status and bounding cylinder.
    #[command(after_help = EXIT_CODES)]
    Info(InfoArgs),
    /// Time active-table slicing against brute force on generated tubes (CSV).
    #[command(after_help = EXIT_CODES)]
    Bench(BenchArgs),
    /// Write a generated test mesh as binary STL.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Svg,
    Both,
}

fn parse_point(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected X,Y,Z but got `{s}`"));
    }
    let mut p = [0.0; 3];
    for (slot, text) in p.iter_mut().zip(&parts) {
        *slot = text
            .parse::<f64>()
            .map_err(|e| format!("bad coordinate `{text}`: {e}"))?;
        if !slot.is_finite() {
            return Err(format!("coordinate `{text}` is not finite"));
        }
    }
    Ok(p)
}

#[derive(Debug, Clone, Args)]
pub struct AxisArgs {
    /// Skewer axis start point (one opening of the bore), as X,Y,Z.
    #[arg(long, value_name = "X,Y,Z", value_parser = parse_point, requires = "axis_b")]
    pub axis_a: Option<[f64; 3]>,
    /// Skewer axis end point (the opposite opening), as X,Y,Z.
    #[arg(long, value_name = "X,Y,Z", value_parser = parse_point, requires = "axis_a")]
    pub axis_b: Option<[f64; 3]>,
    /// The mesh is already aligned with the x-axis; skip the transform.
    #[arg(long, conflicts_with_all = ["axis_a", "axis_b"])]
    pub pre_aligned: bool,
    /// Shift along x applied after alignment.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub x_offset: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SliceConfig {
    /// Input STL (binary or ASCII).
    pub input: PathBuf,
    #[command(flatten)]
    pub axis: AxisArgs,
    /// Mandrel radius r_m.
    #[arg(long, short = 'm')]
    pub mandrel_radius: f64,
    /// Layer thickness delta.
    #[arg(long, short = 'd')]
    pub layer_thickness: f64,
    /// Decollision band; defaults to 1e-6 * layer thickness.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Layer JSON path; SVGs go to `<output stem>_svg/`. Defaults to
    /// `<input stem>.layers.json` next to the input.
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Split contour steps whose arc on the slicyl is longer than this.
    #[arg(long, value_name = "LENGTH")]
    pub max_arc_subdivide: Option<f64>,
    /// Slice even if the mesh fails the manifold check.
    #[arg(long)]
    pub force: bool,
    /// Treat facets passed through without edge crossings as an error.
    #[arg(long)]
    pub strict: bool,
    /// Worker threads (SLICYL_THREADS overrides; default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

impl SliceConfig {
    fn validate(&self) -> Result<(), String> {
        if !(self.layer_thickness > 0.0) || !self.layer_thickness.is_finite() {
            return Err(format!("--layer-thickness must be positive, got {}", self.layer_thickness));
        }
        if !(self.mandrel_radius >= 0.0) || !self.mandrel_radius.is_finite() {
            return Err(format!("--mandrel-radius must be non-negative, got {}", self.mandrel_radius));
        }
        if let Some(eps) = self.epsilon {
            if !(eps > 0.0) {
                return Err(format!("--epsilon must be positive, got {eps}"));
            }
        }
        if let Some(arc) = self.max_arc_subdivide {
            if !(arc > 0.0) {
                return Err(format!("--max-arc-subdivide must be positive, got {arc}"));
            }
        }
        if self.axis.axis_a.is_none() && !self.axis.pre_aligned {
            return Err("give --axis-a and --axis-b, or --pre-aligned".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Args)]
pub struct InfoArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub axis: AxisArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Approximate facet counts of the generated tubes.
    #[arg(long, value_delimiter = ',', default_values_t = [2_000usize, 10_000, 50_000])]
    pub sizes: Vec<usize>,
    /// Number of layers per tube.
    #[arg(long, default_value_t = 200)]
    pub layers: usize,
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Square block along x with a polygonal bore.
    Cube {
        #[arg(long, default_value_t = 20.0)]
        side: f64,
        #[arg(long, default_value_t = 2.0)]
        bore_radius: f64,
        #[arg(long, default_value_t = 32)]
        segments: usize,
        #[arg(long, short = 'o')]
        output: PathBuf,
    },
    /// Annular tube along x, optionally with jittered vertices.
    Tube {
        #[arg(long, default_value_t = 10.0)]
        length: f64,
        #[arg(long, default_value_t = 2.0)]
        inner_radius: f64,
        #[arg(long, default_value_t = 5.0)]
        outer_radius: f64,
        #[arg(long, default_value_t = 32)]
        segments: usize,
        #[arg(long, default_value_t = 1)]
        axial_divisions: usize,
        #[arg(long, default_value_t = 1)]
        radial_divisions: usize,
        #[arg(long, default_value_t = 0.0)]
        perturbation: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short = 'o')]
        output: PathBuf,
    },
}

/// Failure of a command: either a library error or a CLI-level one.
#[derive(Debug)]
pub enum Failure {
    Lib(SlicylError),
    Usage(String),
    OracleMismatch(String),
}

impl From<SlicylError> for Failure {
    fn from(e: SlicylError) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Lib(SlicylError::Io(e))
    }
}

pub fn exit_code(e: &SlicylError) -> u8 {
    match e {
        SlicylError::Io(_) => 1,
        SlicylError::NonManifold(_) => 2,
        SlicylError::AxisCrossingFacet { .. } => 3,
        SlicylError::Degree { .. }
        | SlicylError::OpenChain { .. }
        | SlicylError::AmbiguousWinding(_)
        | SlicylError::OddTypeII { .. }
        | SlicylError::ArcOracle { .. }
        | SlicylError::DegeneratePlane => 4,
        SlicylError::InteriorPass { .. } => 5,
        SlicylError::EmptyFile | SlicylError::Truncated { .. } | SlicylError::Parse(_) => 6,
        SlicylError::ZeroAxis => 7,
        SlicylError::NoLayers { .. } | SlicylError::DecollideFail { .. } => 8,
        SlicylError::Param(_) => 64,
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Lib(e) => exit_code(e),
            Failure::Usage(_) => 64,
            Failure::OracleMismatch(_) => 9,
        }
    }

    fn record(&self) -> serde_json::Value {
        let (error, message) = match self {
            Failure::Lib(e) => (e.code(), e.to_string()),
            Failure::Usage(m) => ("E_USAGE", m.clone()),
            Failure::OracleMismatch(m) => ("E_ORACLE_MISMATCH", m.clone()),
        };
        let mut rec = json!({ "error": error, "message": message, "exit_code": self.code() });
        if let Failure::Lib(e) = self {
            let details = match e {
                SlicylError::NonManifold(report) => Some(json!({
                    "boundary_edges": report.count(EdgeDefectKind::Boundary),
                    "overshared_edges": report.count(EdgeDefectKind::Overshared),
                    "orientation_edges": report.count(EdgeDefectKind::Orientation),
                    "offending": report.offending,
                })),
                SlicylError::Degree { point, degree, facets } => {
                    Some(json!({ "point": point, "degree": degree, "facets": facets }))
                }
                SlicylError::AxisCrossingFacet { facet } => Some(json!({ "facet": facet })),
                SlicylError::OddTypeII { layer, count } | SlicylError::InteriorPass { layer, count } => {
                    Some(json!({ "layer": layer, "count": count }))
                }
                SlicylError::Truncated { count, expected, found } => {
                    Some(json!({ "count": count, "expected": expected, "found": found }))
                }
                _ => None,
            };
            if let Some(d) = details {
                rec["details"] = d;
            }
        }
        rec
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 64 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Slice(cfg) => cfg
            .validate()
            .map_err(Failure::Usage)
            .and_then(|()| commands::slice(&cfg)),
        Command::Info(args) => commands::info(&args),
        Command::Bench(args) => commands::bench(&args),
        Command::Gen(g) => commands::gen(&g),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.record());
            ExitCode::from(f.code())
        }
    }
}
