use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use tissuesim::harness::{comparison_csv, load_scenario, run, run_angles, write_run, Scenario};
use tissuesim::meshgen::{load_mask, mesh_polygon, trace_boundary};
use tissuesim::{Polygon, Vec2};

/// Deterministic 2D soft-tissue simulation.
#[derive(Parser)]
#[command(name = "tissuesim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a mesh document from a PGM mask or a polygon document.
    Mesh(MeshArgs),
    /// Run a scenario and write energy.csv, mesh.json, final_state.json and frames/.
    Simulate(SimulateArgs),
    /// Run a scenario once per insertion angle and write comparison.csv.
    Angles(AnglesArgs),
}

#[derive(Args)]
struct MeshArgs {
    /// Binary PGM (P2 or P5) tissue mask.
    #[arg(long, conflicts_with = "polygon", required_unless_present = "polygon")]
    mask: Option<PathBuf>,
    /// Gray level at or above which a pixel is tissue.
    #[arg(long, default_value_t = 128, requires = "mask")]
    threshold: u8,
    /// Polygon document: {"vertices": [[x, y], ...]}.
    #[arg(long)]
    polygon: Option<PathBuf>,
    /// Target point spacing in world units.
    #[arg(long)]
    spacing: f64,
    /// World units per pixel for masks.
    #[arg(long, default_value_t = 1.0, requires = "mask")]
    scale: f64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory; overrides the scenario's output.dir.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    frame_stride: Option<u64>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Clone)]
struct Angle {
    label: String,
    degrees: f64,
}

fn parse_angle(s: &str) -> Result<Angle, String> {
    match s.parse::<f64>() {
        Ok(d) if d.is_finite() => Ok(Angle {
            label: s.to_string(),
            degrees: d,
        }),
        _ => Err(format!("not a finite number of degrees: {s:?}")),
    }
}

#[derive(Args)]
struct AnglesArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Insertion angle in degrees from the upward vertical; repeat for each run.
    #[arg(long = "angle", required = true, value_parser = parse_angle)]
    angles: Vec<Angle>,
}

fn prepare(args: &RunArgs) -> Result<(Scenario, PathBuf)> {
    let mut scenario = load_scenario(&args.scenario)?;
    if let Some(stride) = args.frame_stride {
        scenario.output.frame_stride = stride as usize;
    }
    let out = match (&args.out, &scenario.output.dir) {
        (Some(d), _) | (None, Some(d)) => d.clone(),
        (None, None) => bail!("no output directory: pass --out or set output.dir in the scenario"),
    };
    Ok((scenario, out))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn mesh(args: MeshArgs) -> Result<()> {
    if !(args.spacing > 0.0 && args.spacing.is_finite()) {
        bail!("--spacing must be positive, got {}", args.spacing);
    }
    let polygon = if let Some(path) = &args.mask {
        let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
        let mask = load_mask(&bytes, args.threshold).with_context(|| path.display().to_string())?;
        trace_boundary(&mask)?.transformed(args.scale, Vec2::ZERO)?
    } else {
        let path = args.polygon.as_ref().expect("clap enforces mask or polygon");
        let text =
            std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        Polygon::from_json(&text).with_context(|| path.display().to_string())?
    };
    let mesh = mesh_polygon(&polygon, args.spacing)?;
    match &args.out {
        Some(path) => write_file(path, &mesh.to_json()),
        None => {
            println!("{}", mesh.to_json());
            Ok(())
        }
    }
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let (scenario, out) = prepare(&args.run)?;
    let output = run(&scenario)?;
    write_run(&output, &out)?;
    Ok(())
}

fn angles(args: AnglesArgs) -> Result<()> {
    let (scenario, out) = prepare(&args.run)?;
    for (i, a) in args.angles.iter().enumerate() {
        if args.angles[..i].iter().any(|b| b.label == a.label) {
            bail!("angle {} given twice", a.label);
        }
    }
    let degrees: Vec<f64> = args.angles.iter().map(|a| a.degrees).collect();
    let outputs = run_angles(&scenario, &degrees)?;
    for (angle, output) in args.angles.iter().zip(&outputs) {
        write_run(output, &out.join(format!("angle_{}", angle.label)))?;
    }
    let labels: Vec<String> = args.angles.iter().map(|a| a.label.clone()).collect();
    let series: Vec<_> = outputs.into_iter().map(|o| o.energy_series).collect();
    write_file(&out.join("comparison.csv"), &comparison_csv(&labels, &series))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Mesh(a) => mesh(a),
        Command::Simulate(a) => simulate(a),
        Command::Angles(a) => angles(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = format!("{e:#}").replace('\n', " ");
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}
