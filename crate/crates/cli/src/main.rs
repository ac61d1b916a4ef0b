//! `collimetric`: evaluate query point clouds against ground truth for
//! robotic collision avoidance.
//!
//! Exit codes: 0 success, 1 evaluation error, 2 usage error.

mod args;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Result;
use clap::{Args, CommandFactory, Parser, Subcommand};
use collimetric_core::baseline::{baseline_metrics, BaselineOptions, HausdorffVariant, DEFAULT_EMD_CAP};
use collimetric_core::collision::{evaluate_detailed, tolerance_sweep, EvalConfig, GripperSpec};
use collimetric_core::io::{load_scaled, save_point_cloud, CloudFormat};
use collimetric_core::report::{
    export_collision_map, render_sweep_svg, write_paths_csv, ReportDocument, SweepDocument, SweepMetric,
};
use collimetric_core::synth::{BlobSpec, BoxSpec, HoleSpec, RodSpec, SceneSpec};
use collimetric_core::{Error as CoreError, Point3, PointCloud};

use args::{Directions, TzList};

#[derive(Parser)]
#[command(
    name = "collimetric",
    version,
    about = "Collision-avoidance metrics for 3D point clouds"
)]
struct Cli {
    /// Worker threads; defaults to all cores. Results do not depend on it.
    #[arg(long, global = true, env = "COLLIMETRIC_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate gripper descents and report FPC/FNC rates and the collision F-score.
    Evaluate(EvaluateArgs),
    /// Chamfer, Hausdorff, precision/recall/F-score and optionally EMD.
    Baseline(BaselineArgs),
    /// Evaluate at several Z tolerances and chart one metric.
    Sweep(SweepArgs),
    /// Generate a synthetic scene.
    Synth(SynthArgs),
}

#[derive(Args)]
struct Inputs {
    /// Ground-truth point cloud (.ply, .xyz, .csv).
    gt: PathBuf,
    /// Query point cloud under evaluation.
    query: PathBuf,
    /// Input format: auto, ply-ascii, ply-binary-le, xyz or csv.
    #[arg(long, default_value = "auto")]
    format: CloudFormat,
    /// Factor converting file units to millimeters.
    #[arg(long, default_value_t = 1.0, value_parser = args::positive)]
    unit_scale: f64,
}

impl Inputs {
    fn load(&self) -> Result<(PointCloud, PointCloud)> {
        let load = |p: &Path| load_scaled(p, self.format, self.unit_scale);
        Ok((load(&self.gt)?, load(&self.query)?))
    }
}

#[derive(Args)]
struct EvalFlags {
    /// Gripper cross-section LxM and extent N along the motion, mm.
    #[arg(long, default_value = "10x10x10", value_parser = args::gripper)]
    gripper: GripperSpec,
    /// Path grid step in the plane perpendicular to each direction, mm (also the lateral tolerance).
    #[arg(long, default_value_t = 5.0, value_parser = args::positive)]
    step: f64,
    /// Ground-truth outlier threshold: collision needs more than this many points in the gripper.
    #[arg(long, default_value_t = 15)]
    n_gt: usize,
    /// Query outlier threshold: collision needs more than this many points in the gripper.
    #[arg(long, default_value_t = 5)]
    n_q: usize,
    /// Direction preset `1`, `4` or `7`, or unit-less vectors `x,y,z;x,y,z` (normalized).
    #[arg(long, default_value = "1", value_parser = args::directions)]
    directions: Directions,
    /// Negate every direction (for z-up scenes, where top-down is -Z).
    #[arg(long)]
    flip_directions: bool,
}

impl EvalFlags {
    fn config(&self, t_z: f64) -> EvalConfig {
        EvalConfig {
            t_z,
            gripper: self.gripper,
            g_step: self.step,
            n_gt: self.n_gt,
            n_q: self.n_q,
            directions: self
                .directions
                .0
                .iter()
                .map(|&d| if self.flip_directions { Point3::ZERO - d } else { d })
                .collect(),
        }
    }
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[command(flatten)]
    eval: EvalFlags,
    /// Z tolerance along the direction, mm.
    #[arg(long, default_value_t = 10.0, value_parser = args::non_negative)]
    tz: f64,
    /// Write the JSON report here.
    #[arg(long)]
    out_json: Option<PathBuf>,
    /// Write the colored collision map (PLY) here.
    #[arg(long)]
    out_map: Option<PathBuf>,
    /// Write per-path records (CSV) here.
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// Include wall-clock timing in the JSON report.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct BaselineArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Distance threshold for precision/recall/F-score, mm.
    #[arg(long = "d", default_value_t = 10.0, value_parser = args::positive)]
    d: f64,
    /// Combine one-sided Hausdorff distances by `sum` or `max`.
    #[arg(long, default_value = "sum")]
    hausdorff: HausdorffVariant,
    /// Also compute the exact EMD (equal-size clouds only).
    #[arg(long)]
    emd: bool,
    /// Largest cloud size accepted for EMD.
    #[arg(long, default_value_t = DEFAULT_EMD_CAP)]
    emd_cap: usize,
    /// Write the metrics as JSON here.
    #[arg(long)]
    out_json: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[command(flatten)]
    eval: EvalFlags,
    /// Strictly increasing Z tolerances, mm.
    #[arg(long, default_value = "2.5,5,7.5,10,12.5,15,17.5,20", value_parser = args::tz_list)]
    tz_list: TzList,
    /// Metric to chart: r_fpc, r_fnc or fc.
    #[arg(long, default_value = "r_fpc")]
    metric: SweepMetric,
    /// Write the SVG chart here.
    #[arg(long)]
    out_svg: Option<PathBuf>,
    /// Write every sweep point as JSON here.
    #[arg(long)]
    out_json: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Scene description file (TOML); inline flags below are ignored when given.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Plane extent WxH, mm.
    #[arg(long, default_value = "400x400", value_parser = args::extent)]
    plane: (f64, f64),
    /// Lattice spacing, mm.
    #[arg(long, default_value_t = 1.0, value_parser = args::positive)]
    spacing: f64,
    /// Seed for random components.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Box `cx,cy,cz,sx,sy,sz`, mm (repeatable).
    #[arg(long = "box", value_parser = args::tuple::<6>)]
    boxes: Vec<[f64; 6]>,
    /// Vertical rod `bx,by,bz,diameter,height`, mm (repeatable).
    #[arg(long = "rod", value_parser = args::tuple::<5>)]
    rods: Vec<[f64; 5]>,
    /// Ghost blob `cx,cy,cz,size,count` (repeatable).
    #[arg(long = "blob", value_parser = args::tuple::<5>)]
    blobs: Vec<[f64; 5]>,
    /// Hole `x,y,radius`, mm (repeatable).
    #[arg(long = "hole", value_parser = args::tuple::<3>)]
    holes: Vec<[f64; 3]>,
    /// Gaussian noise sigma, mm.
    #[arg(long, default_value_t = 0.0, value_parser = args::non_negative)]
    noise: f64,
    /// Fraction of points kept, (0, 1].
    #[arg(long, default_value_t = 1.0)]
    keep: f64,
    /// Output file; format from the extension unless --format is given.
    #[arg(long)]
    out: PathBuf,
    /// Output format: auto, ply-ascii, ply-binary-le, xyz or csv.
    #[arg(long, default_value = "auto")]
    format: CloudFormat,
}

impl SynthArgs {
    fn inline_spec(&self) -> std::result::Result<SceneSpec, String> {
        let mut spec = SceneSpec::plane(self.plane, self.spacing);
        spec.seed = self.seed;
        spec.noise = self.noise;
        spec.keep_fraction = self.keep;
        spec.boxes = self
            .boxes
            .iter()
            .map(|b| BoxSpec {
                center: [b[0], b[1], b[2]],
                size: [b[3], b[4], b[5]],
            })
            .collect();
        spec.rods = self
            .rods
            .iter()
            .map(|r| RodSpec {
                base: [r[0], r[1], r[2]],
                diameter: r[3],
                height: r[4],
            })
            .collect();
        spec.blobs = self
            .blobs
            .iter()
            .map(|b| {
                if b[4] < 1.0 || b[4].fract() != 0.0 {
                    Err(format!("blob count must be a positive integer, got {}", b[4]))
                } else {
                    Ok(BlobSpec {
                        center: [b[0], b[1], b[2]],
                        size: b[3],
                        count: b[4] as usize,
                    })
                }
            })
            .collect::<std::result::Result<_, _>>()?;
        spec.holes = self
            .holes
            .iter()
            .map(|h| HoleSpec {
                center: [h[0], h[1]],
                radius: h[2],
            })
            .collect();
        Ok(spec)
    }
}

/// Failure carrying its exit code.
enum Failure {
    Usage(String),
    Eval(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Eval(e)
    }
}

fn percent(r: f64) -> String {
    format!("{:.2}%", 100.0 * r)
}

fn run_evaluate(a: &EvaluateArgs) -> Result<()> {
    let start = Instant::now();
    let (gt, query) = a.inputs.load()?;
    let config = a.eval.config(a.tz);
    let (report, records) = evaluate_detailed(&gt, &query, &config)?;
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    if let Some(p) = &a.out_json {
        let mut doc = ReportDocument::new(&report);
        if a.timing {
            doc = doc.with_timing(elapsed_ms);
        }
        doc.write(p)?;
    }
    if let Some(p) = &a.out_map {
        export_collision_map(&records, p)?;
    }
    if let Some(p) = &a.out_csv {
        write_paths_csv(&records, p)?;
    }
    println!(
        "R_FPC={} R_FNC={} FC={}",
        percent(report.r_fpc),
        percent(report.r_fnc),
        percent(report.fc)
    );
    Ok(())
}

fn run_baseline(a: &BaselineArgs) -> Result<()> {
    let (gt, query) = a.inputs.load()?;
    let opts = BaselineOptions {
        threshold_d: a.d,
        hausdorff: a.hausdorff,
        emd_cap: a.emd.then_some(a.emd_cap),
    };
    let r = baseline_metrics(&query, &gt, &opts)?;
    if let Some(p) = &a.out_json {
        let text = serde_json::to_string_pretty(&r)? + "\n";
        std::fs::write(p, text).map_err(|e| anyhow::anyhow!("{}: {e}", p.display()))?;
    }
    println!("Chamfer [mm^2]  {:.6}", r.chamfer);
    println!("Hausdorff [mm]  {:.6} ({:?})", r.hausdorff, r.hausdorff_variant);
    println!("Precision [%]   {:.2}", 100.0 * r.precision);
    println!("Recall [%]      {:.2}", 100.0 * r.recall);
    println!("F-score [%]     {:.2}", 100.0 * r.fscore);
    println!("d [mm]          {}", r.threshold_d);
    if let Some(emd) = r.emd {
        println!("EMD [mm]        {emd:.6}");
    }
    Ok(())
}

fn run_sweep(a: &SweepArgs) -> Result<()> {
    let (gt, query) = a.inputs.load()?;
    let config = a.eval.config(a.tz_list.0[0]);
    let series = tolerance_sweep(&gt, &query, &config, &a.tz_list.0)?;
    if let Some(p) = &a.out_svg {
        render_sweep_svg(&series, a.metric, p)?;
    }
    if let Some(p) = &a.out_json {
        SweepDocument::new(&series).expect("non-empty sweep").write(p)?;
    }
    for point in &series.points {
        println!(
            "T_Z={} R_FPC={} R_FNC={} FC={}",
            point.t_z,
            percent(point.report.r_fpc),
            percent(point.report.r_fnc),
            percent(point.report.fc)
        );
    }
    Ok(())
}

fn run_synth(a: &SynthArgs) -> std::result::Result<(), Failure> {
    let spec = match &a.spec {
        Some(path) => match SceneSpec::load(path) {
            Ok(spec) => spec,
            Err(e @ CoreError::Parse { .. }) => return Err(Failure::Usage(e.to_string())),
            Err(e) => return Err(Failure::Eval(e.into())),
        },
        None => a.inline_spec().map_err(Failure::Usage)?,
    };
    let cloud = spec.generate().map_err(anyhow::Error::from)?;
    save_point_cloud(&cloud, &a.out, a.format).map_err(anyhow::Error::from)?;
    println!("wrote {} points to {}", cloud.len(), a.out.display());
    Ok(())
}

fn run(cli: Cli) -> std::result::Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Eval(e.into()))?;
    }
    match &cli.command {
        Command::Evaluate(a) => run_evaluate(a)?,
        Command::Baseline(a) => run_baseline(a)?,
        Command::Sweep(a) => run_sweep(a)?,
        Command::Synth(a) => run_synth(a)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            let _ = Cli::command()
                .error(clap::error::ErrorKind::ValueValidation, msg)
                .print();
            ExitCode::from(2)
        }
        Err(Failure::Eval(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
