use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use slicyl::active::build_active_table;
use slicyl::contour::ContourKind;
use slicyl::export::{layer_svg, LayerDocument};
use slicyl::geometry::Point;
use slicyl::mesh::{validate_manifold, EdgeDefectKind, WeldReport};
use slicyl::oracle::{gen_cube_with_bore, gen_tube_with, naive_slice_layer, GeneratedMesh, TubeOptions};
use slicyl::orientation::{apply_transform, compute_skewer_transform, RigidTransform, SkewerAxis};
use slicyl::pipeline::{slice_layer, slice_mesh, SliceParams};
use slicyl::slicing::{bounding_cylinder, build_slicyl_set};
use slicyl::stl::{detect_format, parse_stl, to_binary_bytes, StlFormat};
use slicyl::{weld_and_index, SlicylError, TriangleMesh};

use crate::{AxisArgs, BenchArgs, Failure, GenCommand, InfoArgs, OutputFormat, SliceConfig};

/// `println!` that tolerates a closed stdout (e.g. piped into `head`).
macro_rules! say {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

struct Loaded {
    format: StlFormat,
    mesh: TriangleMesh,
    weld: WeldReport,
}

fn load(path: &Path) -> Result<Loaded, Failure> {
    let bytes = fs::read(path)?;
    let format = detect_format(&bytes)?;
    let raw = parse_stl(&bytes)?;
    let (mesh, weld) = weld_and_index(&raw);
    Ok(Loaded { format, mesh, weld })
}

/// Aligns the mesh per the axis flags; `None` when no axis was given and
/// the mesh was not declared pre-aligned.
fn orient(mesh: &TriangleMesh, axis: &AxisArgs) -> Result<Option<TriangleMesh>, Failure> {
    let transform = match (axis.axis_a, axis.axis_b) {
        (Some(a), Some(b)) => {
            compute_skewer_transform(&SkewerAxis::new(Point::from(a), Point::from(b)))?.with_x_offset(axis.x_offset)
        }
        _ if axis.pre_aligned => RigidTransform::identity().with_x_offset(axis.x_offset),
        _ => return Ok(None),
    };
    Ok(Some(apply_transform(mesh, &transform)))
}

fn configure_threads(hint: Option<usize>) -> Result<(), Failure> {
    let from_env = match std::env::var("SLICYL_THREADS") {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|_| Failure::Usage(format!("SLICYL_THREADS must be a positive integer, got `{v}`")))?,
        ),
        Err(_) => None,
    };
    if let Some(n) = from_env.or(hint) {
        if n == 0 {
            return Err(Failure::Usage("thread count must be at least 1".into()));
        }
        // a second initialisation (only possible in-process) keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn default_output(input: &Path) -> PathBuf {
    input.with_extension("layers.json")
}

fn svg_dir(json_path: &Path) -> PathBuf {
    let stem = json_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "layers".into());
    let stem = stem.strip_suffix(".layers").unwrap_or(&stem).to_string();
    json_path.with_file_name(format!("{stem}_svg"))
}

pub fn slice(cfg: &SliceConfig) -> Result<(), Failure> {
    configure_threads(cfg.threads)?;
    let loaded = load(&cfg.input)?;
    let mesh = orient(&loaded.mesh, &cfg.axis)?.expect("validated: axis or --pre-aligned is present");

    let mut params = SliceParams::new(cfg.mandrel_radius, cfg.layer_thickness);
    params.epsilon = cfg.epsilon;
    params.contour.max_arc = cfg.max_arc_subdivide;
    params.force = cfg.force;
    let out = slice_mesh(&mesh, &params)?;

    let passes = out.interior_passes();
    if cfg.strict {
        if let Some(&(layer, _)) = passes.first() {
            let count = passes.iter().filter(|(l, _)| *l == layer).count();
            return Err(SlicylError::InteriorPass { layer, count }.into());
        }
    }

    let json_path = cfg.output.clone().unwrap_or_else(|| default_output(&cfg.input));
    if matches!(cfg.format, OutputFormat::Json | OutputFormat::Both) {
        let doc = LayerDocument::new(cfg.mandrel_radius, cfg.layer_thickness, &out.contours);
        fs::write(&json_path, doc.to_json())?;
    }
    if matches!(cfg.format, OutputFormat::Svg | OutputFormat::Both) {
        let dir = svg_dir(&json_path);
        fs::create_dir_all(&dir)?;
        let width = out.contours.len().to_string().len().max(3);
        for lc in &out.contours {
            let svg = layer_svg(lc, out.bounding.x_min, out.bounding.x_max);
            fs::write(dir.join(format!("layer_{:0width$}.svg", lc.index)), svg)?;
        }
    }

    say!(
        "bounding cylinder: radius {:.6}, length {:.6}; {} layers",
        out.bounding.radius,
        out.bounding.length,
        out.contours.len()
    );
    say!("{:>6} {:>12} {:>7} {:>8} {:>8}", "layer", "radius", "type_I", "type_II", "points");
    let mut total = [0usize; 3];
    for lc in &out.contours {
        let t1 = lc.count(ContourKind::TypeI);
        let t2 = lc.count(ContourKind::TypeII);
        let pts: usize = lc.contours.iter().map(|c| c.points.len()).sum();
        total[0] += t1;
        total[1] += t2;
        total[2] += pts;
        say!("{:>6} {:>12.6} {:>7} {:>8} {:>8}", lc.index, lc.radius, t1, t2, pts);
    }
    say!("{:>6} {:>12} {:>7} {:>8} {:>8}", "total", "", total[0], total[1], total[2]);
    if !passes.is_empty() {
        say!("warning: {} facet interior pass(es) without edge crossings", passes.len());
    }
    Ok(())
}

pub fn info(args: &InfoArgs) -> Result<(), Failure> {
    let loaded = load(&args.input)?;
    let mesh = orient(&loaded.mesh, &args.axis)?.unwrap_or(loaded.mesh);
    let format = match loaded.format {
        StlFormat::Binary => "binary",
        StlFormat::Ascii => "ascii",
    };
    say!("format: {format}");
    say!("facets: {}", mesh.facets().len());
    say!("vertices: {}", mesh.vertices().len());
    say!("edges: {}", mesh.edges().len());
    say!("degenerate facets dropped: {}", loaded.weld.degenerate_facets);
    say!("normal overrides: {}", loaded.weld.normal_overrides);
    let report = validate_manifold(&mesh);
    if report.is_manifold() {
        say!("manifold: yes");
    } else {
        say!(
            "manifold: no ({} boundary, {} overshared, {} orientation edges)",
            report.count(EdgeDefectKind::Boundary),
            report.count(EdgeDefectKind::Overshared),
            report.count(EdgeDefectKind::Orientation)
        );
    }
    let bc = bounding_cylinder(&mesh);
    say!(
        "bounding cylinder: radius {}, length {}, x {} .. {}",
        bc.radius, bc.length, bc.x_min, bc.x_max
    );
    Ok(())
}

/// Tube with roughly `facets` facets: `4 * segments * (axial + radial)`.
fn bench_tube(facets: usize) -> Result<GeneratedMesh, Failure> {
    let segments = ((facets as f64 / 5.0).sqrt().ceil() as usize).max(16);
    let axial = ((facets as f64 / (5.0 * segments as f64)).ceil() as usize).max(1);
    let opts = TubeOptions {
        axial_divisions: axial,
        radial_divisions: (axial / 4).max(1),
        ..TubeOptions::default()
    };
    Ok(gen_tube_with(10.0, 2.0, 5.0, segments, &opts)?)
}

pub fn bench(args: &BenchArgs) -> Result<(), Failure> {
    if args.layers == 0 || args.sizes.is_empty() {
        return Err(Failure::Usage("bench needs at least one size and one layer".into()));
    }
    // r_m = 2 inside an outer radius of 5 gives floor(3 / delta) layers
    let delta = 3.0 / (args.layers as f64 + 0.5);
    let mut cases = Vec::new();
    for &size in &args.sizes {
        let mesh = bench_tube(size)?.mesh;
        let bc = bounding_cylinder(&mesh);
        let set = build_slicyl_set(&mesh, 2.0, delta, None, &bc)?;
        let table = build_active_table(&mesh, &set)?;
        for pos in 0..set.count() {
            let naive = naive_slice_layer(&mesh, set.index_of(pos), set.radii[pos])?;
            let active = slice_layer(&mesh, &table, &set, pos)?;
            if naive != active {
                return Err(Failure::OracleMismatch(format!(
                    "{} facets, layer {}: active and naive slices differ",
                    mesh.facets().len(),
                    set.index_of(pos)
                )));
            }
        }
        cases.push((mesh, set));
    }

    say!("facets,layers,naive_s,active_s,table_s,speedup");
    for (mesh, set) in &cases {
        let t = Instant::now();
        for pos in 0..set.count() {
            std::hint::black_box(naive_slice_layer(mesh, set.index_of(pos), set.radii[pos])?);
        }
        let naive = t.elapsed().as_secs_f64();

        let t = Instant::now();
        let table = build_active_table(mesh, set)?;
        let table_s = t.elapsed().as_secs_f64();
        let t = Instant::now();
        for pos in 0..set.count() {
            std::hint::black_box(slice_layer(mesh, &table, set, pos)?);
        }
        let active = t.elapsed().as_secs_f64();
        say!(
            "{},{},{:.6},{:.6},{:.6},{:.3}",
            mesh.facets().len(),
            set.count(),
            naive,
            active,
            table_s,
            naive / (active + table_s)
        );
    }
    Ok(())
}

pub fn gen(cmd: &GenCommand) -> Result<(), Failure> {
    let (g, output) = match cmd {
        GenCommand::Cube {
            side,
            bore_radius,
            segments,
            output,
        } => (gen_cube_with_bore(*side, *bore_radius, *segments)?, output),
        GenCommand::Tube {
            length,
            inner_radius,
            outer_radius,
            segments,
            axial_divisions,
            radial_divisions,
            perturbation,
            seed,
            output,
        } => {
            let opts = TubeOptions {
                axial_divisions: *axial_divisions,
                radial_divisions: *radial_divisions,
                perturbation: *perturbation,
                seed: *seed,
            };
            (gen_tube_with(*length, *inner_radius, *outer_radius, *segments, &opts)?, output)
        }
    };
    fs::write(output, to_binary_bytes(&g.mesh.to_raw_facets()))?;
    say!("{}: {} facets -> {}", g.descriptor, g.mesh.facets().len(), output.display());
    Ok(())
}
