//! `voxelight` command line: generate demo clouds, validate and inspect cloud
//! files, and render them with a scene configuration.
//!
//! Exit codes: 0 success, 1 usage error, 2 input or validation error,
//! 3 internal or output error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use voxelight::formats::{
    parse_scene, read_cloud_with_header, serialize_cloud, serialize_scene, validate_cloud,
    Encoding, Quantization,
};
use voxelight::model::{match_preset, ATTRIBUTE_NAMES};
use voxelight::scenegen::demo_scene;
use voxelight::shading::{render, tone_map, DEFAULT_DISPLAY_GAMMA};
use voxelight::VoxelGrid;

#[derive(Parser)]
#[command(name = "voxelight", version, about = "Volumetric voxel cloud toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum QuantizeArg {
    Uint8,
}

#[derive(Subcommand)]
enum Command {
    /// Write a demo cloud and, optionally, its scene configuration.
    Generate {
        #[arg(long)]
        scene: String,
        #[arg(long)]
        out: PathBuf,
        /// For day_night_building, writes STEM_day.json and STEM_night.json.
        #[arg(long)]
        scene_out: Option<PathBuf>,
        #[arg(long, value_enum)]
        quantize: Option<QuantizeArg>,
    },
    /// Render a cloud to PPM (or PNG when OUT ends in .png).
    Render {
        /// Defaults to the scene file's `cloud`, relative to the scene file.
        #[arg(long)]
        cloud: Option<PathBuf>,
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        spp: Option<u32>,
        #[arg(long)]
        depth: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        width: Option<u32>,
        #[arg(long)]
        height: Option<u32>,
    },
    /// Check a cloud file and list every violation.
    Validate {
        #[arg(long)]
        cloud: PathBuf,
    },
    /// Summarize a cloud file.
    Info {
        #[arg(long)]
        cloud: PathBuf,
    },
}

enum Failure {
    Input(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Internal(m) => m,
        }
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_output(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::Internal(format!("{}: {e}", path.display())))
}

fn load_cloud(path: &Path) -> Result<VoxelGrid, Failure> {
    let bytes = read_input(path)?;
    read_cloud_with_header(&bytes)
        .map(|(_, grid)| grid)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Path to `target` as seen from the directory holding `from`.
fn relative_to(target: &Path, from: &Path) -> String {
    let dir = |p: &Path| p.parent().map(Path::to_path_buf).unwrap_or_default();
    if dir(target) == dir(from) {
        if let Some(name) = target.file_name() {
            return name.to_string_lossy().into_owned();
        }
    }
    fs::canonicalize(target)
        .unwrap_or_else(|_| target.to_path_buf())
        .to_string_lossy()
        .into_owned()
}

fn generate(
    scene: &str,
    out: &Path,
    scene_out: Option<&Path>,
    quantize: Option<QuantizeArg>,
) -> Result<(), Failure> {
    let demo = demo_scene(scene).map_err(|e| Failure::Input(e.to_string()))?;
    let quantization = match quantize {
        Some(QuantizeArg::Uint8) => Quantization::Uint8,
        None => Quantization::Float32,
    };
    write_output(
        out,
        &serialize_cloud(&demo.grid, Encoding::BinaryLittleEndian, quantization),
    )?;
    let Some(scene_out) = scene_out else {
        return Ok(());
    };
    for (suffix, mut cfg) in demo.configs {
        let path = if suffix.is_empty() {
            scene_out.to_path_buf()
        } else {
            let stem = scene_out.file_stem().unwrap_or_default().to_string_lossy();
            let ext = scene_out
                .extension()
                .map_or("json".into(), |e| e.to_string_lossy());
            scene_out.with_file_name(format!("{stem}_{suffix}.{ext}"))
        };
        cfg.cloud = relative_to(out, &path);
        write_output(&path, &serialize_scene(&cfg))?;
    }
    Ok(())
}

struct RenderArgs<'a> {
    cloud: Option<&'a Path>,
    scene: &'a Path,
    out: &'a Path,
    spp: Option<u32>,
    depth: Option<u32>,
    seed: Option<u64>,
    width: Option<u32>,
    height: Option<u32>,
}

fn render_cmd(args: RenderArgs<'_>) -> Result<(), Failure> {
    let scene_bytes = read_input(args.scene)?;
    let mut cfg = parse_scene(&scene_bytes)
        .map_err(|e| Failure::Input(format!("{}: {e}", args.scene.display())))?;
    if let Some(v) = args.spp {
        cfg.render.spp = v;
    }
    if let Some(v) = args.depth {
        cfg.render.max_depth = v;
    }
    if let Some(v) = args.seed {
        cfg.render.seed = v;
    }
    if let Some(v) = args.width {
        cfg.camera.width = v;
    }
    if let Some(v) = args.height {
        cfg.camera.height = v;
    }
    let cloud_path = match args.cloud {
        Some(p) => p.to_path_buf(),
        None => args
            .scene
            .parent()
            .unwrap_or(Path::new(""))
            .join(&cfg.cloud),
    };
    let grid = load_cloud(&cloud_path)?;
    let scene = cfg
        .to_scene(grid)
        .map_err(|e| Failure::Input(format!("{}: {e}", args.scene.display())))?;
    let image = tone_map(&render(&scene), DEFAULT_DISPLAY_GAMMA);
    let is_png = args
        .out
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("png"));
    if is_png {
        image::save_buffer(
            args.out,
            &image.data,
            image.width,
            image.height,
            image::ExtendedColorType::Rgb8,
        )
        .map_err(|e| Failure::Internal(format!("{}: {e}", args.out.display())))
    } else {
        write_output(args.out, &image.to_ppm())
    }
}

fn validate(cloud: &Path) -> Result<(), Failure> {
    let bytes = read_input(cloud)?;
    let errors = validate_cloud(&bytes);
    if errors.is_empty() {
        println!("OK");
        return Ok(());
    }
    for e in &errors {
        eprintln!("{}: {e}", cloud.display());
    }
    Err(Failure::Input(format!(
        "{}: {} violation(s)",
        cloud.display(),
        errors.len()
    )))
}

fn info(cloud: &Path) -> Result<(), Failure> {
    let bytes = read_input(cloud)?;
    let (header, grid) = read_cloud_with_header(&bytes)
        .map_err(|e| Failure::Input(format!("{}: {e}", cloud.display())))?;
    let d = header.dims;
    println!("dims: {} {} {}", d.x, d.y, d.z);
    println!("voxel_size: {}", header.voxel_size);
    println!("occupied: {}", grid.occupied_count());
    let n = grid.occupied_count();
    let mut min = [f32::INFINITY; 7];
    let mut max = [f32::NEG_INFINITY; 7];
    let mut sum = [0f64; 7];
    let mut matches: std::collections::BTreeMap<&str, usize> = Default::default();
    for (_, attrs) in grid.iter() {
        for (i, v) in attrs.to_array().into_iter().enumerate() {
            min[i] = min[i].min(v);
            max[i] = max[i].max(v);
            sum[i] += v as f64;
        }
        *matches
            .entry(match_preset(&attrs).unwrap_or("(none)"))
            .or_default() += 1;
    }
    if n > 0 {
        for (i, name) in ATTRIBUTE_NAMES.iter().enumerate() {
            println!(
                "{name}: min {} max {} mean {:.6}",
                min[i],
                max[i],
                sum[i] / n as f64
            );
        }
    }
    for (name, count) in matches {
        println!("material {name}: {count}");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Generate {
            scene,
            out,
            scene_out,
            quantize,
        } => generate(&scene, &out, scene_out.as_deref(), quantize),
        Command::Render {
            cloud,
            scene,
            out,
            spp,
            depth,
            seed,
            width,
            height,
        } => render_cmd(RenderArgs {
            cloud: cloud.as_deref(),
            scene: &scene,
            out: &out,
            spp,
            depth,
            seed,
            width,
            height,
        }),
        Command::Validate { cloud } => validate(&cloud),
        Command::Info { cloud } => info(&cloud),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(f)) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
        Err(_) => ExitCode::from(3),
    }
}
