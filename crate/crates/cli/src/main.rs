use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use shapetrack::harness::{replay, run_simulation_with, BeliefSnapshot, RunOptions, Scenario, ScenarioConfig, StepReport};
use shapetrack::sh::ShCoefficients;
use shapetrack::tracking::TrackerConfig;
use shapetrack::Vec3;

#[derive(Parser)]
#[command(
    name = "shapetrack",
    version,
    about = "Track the pose and shape of star-convex objects from 3D point measurements"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulated scenario and stream per-step metrics as JSON lines.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        steps: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the tracker over recorded frame files (frame_000001.txt, ...).
    Replay {
        dir: PathBuf,
        /// Scenario or tracker config; only the tracker settings are used.
        config: PathBuf,
        #[arg(long)]
        steps: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Tessellate a saved belief or coefficient file into an OBJ mesh.
    ExportMesh {
        state: PathBuf,
        out: PathBuf,
        /// Latitude and longitude segments.
        #[arg(long, num_args = 2, value_names = ["N_THETA", "N_PHI"], default_values_t = [48, 96])]
        resolution: Vec<usize>,
        /// Star point for a bare coefficient file, as x,y,z.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, value_name = "X,Y,Z")]
        star: Option<Vec<f64>>,
    },
    /// Run the same scenario at several series degrees.
    Sweep {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        orders: Vec<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        steps: Option<usize>,
        /// JSON-lines output, one object per order and step; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct OutputArgs {
    /// JSON-lines metrics file; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Export the estimate as an OBJ every k steps.
    #[arg(long, value_name = "K")]
    mesh_every: Option<usize>,
    /// Directory for mesh snapshots.
    #[arg(long, default_value = ".")]
    mesh_dir: PathBuf,
    /// Save the final belief as JSON.
    #[arg(long)]
    state_out: Option<PathBuf>,
    /// Add per-step wall time to the metrics (output is then not reproducible).
    #[arg(long)]
    timing: bool,
}

impl OutputArgs {
    fn options(&self) -> Result<RunOptions, String> {
        if self.mesh_every == Some(0) {
            return Err("--mesh-every must be at least 1".into());
        }
        if self.mesh_every.is_some() {
            std::fs::create_dir_all(&self.mesh_dir).map_err(|e| format!("{}: {e}", self.mesh_dir.display()))?;
        }
        Ok(RunOptions {
            timing: self.timing,
            mesh_every: self.mesh_every,
            mesh_dir: self.mesh_dir.clone(),
            state_out: self.state_out.clone(),
            ..Default::default()
        })
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Simulate {
            config,
            seed,
            steps,
            output,
        } => {
            let scenario = load_scenario(&config, seed, steps, None)?;
            let options = output.options()?;
            let mut sink = open_sink(output.out.as_deref())?;
            run_simulation_with(&scenario, &options, |r| write_line(&mut sink, r)).map_err(|e| e.to_string())?;
            sink.flush().map_err(|e| e.to_string())
        }
        Command::Replay {
            dir,
            config,
            steps,
            output,
        } => {
            let tracker = load_tracker_config(&config)?;
            let options = RunOptions {
                max_frames: steps,
                ..output.options()?
            };
            let mut sink = open_sink(output.out.as_deref())?;
            replay(&dir, &tracker, &options, |r| write_line(&mut sink, r)).map_err(|e| e.to_string())?;
            sink.flush().map_err(|e| e.to_string())
        }
        Command::ExportMesh {
            state,
            out,
            resolution,
            star,
        } => {
            let (coeffs, star_point) = load_state(&state, star)?;
            shapetrack::harness::export_mesh(&coeffs, &star_point, &out, (resolution[0], resolution[1])).map_err(|e| e.to_string())
        }
        Command::Sweep {
            config,
            orders,
            seed,
            steps,
            out,
        } => sweep(&config, &orders, seed, steps, out.as_deref()),
    }
}

fn load_scenario(path: &Path, seed: Option<u64>, steps: Option<usize>, degree: Option<usize>) -> Result<Scenario, String> {
    let mut config = ScenarioConfig::load(path).map_err(|e| e.to_string())?;
    if let Some(s) = seed {
        config.seed = s;
    }
    if let Some(n) = steps {
        config.frames = n;
    }
    if let Some(l) = degree {
        config.tracker.degree = l;
    }
    Scenario::new(config).map_err(|e| format!("{}: {e}", path.display()))
}

/// Accepts either a full scenario file (its `tracker` table is used) or a
/// bare tracker config.
fn load_tracker_config(path: &Path) -> Result<TrackerConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let value: serde_json::Value = if is_json {
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?
    } else {
        let table: toml::Table = toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::to_value(table).map_err(|e| e.to_string())?
    };
    let tracker = match value.get("tracker") {
        Some(t) => t.clone(),
        None => value,
    };
    let config: TrackerConfig = serde_json::from_value(tracker).map_err(|e| format!("{}: {e}", path.display()))?;
    config.validate().map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(config)
}

fn load_state(path: &Path, star: Option<Vec<f64>>) -> Result<(ShCoefficients, Vec3), String> {
    if star.as_ref().is_some_and(|s| s.len() != 3) {
        return Err("--star takes three comma-separated numbers".into());
    }
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    if let Ok(snapshot) = serde_json::from_str::<BeliefSnapshot>(&text) {
        let coeffs = snapshot.coefficients().map_err(|e| format!("{}: {e}", path.display()))?;
        let position = star.map(|s| Vec3::new(s[0], s[1], s[2])).unwrap_or_else(|| snapshot.position());
        return Ok((coeffs, position));
    }
    let coeffs: ShCoefficients =
        serde_json::from_str(&text).map_err(|e| format!("{}: neither a belief snapshot nor a coefficient file: {e}", path.display()))?;
    let position = star.map(|s| Vec3::new(s[0], s[1], s[2])).unwrap_or_else(Vec3::zeros);
    Ok((coeffs, position))
}

#[derive(Serialize)]
struct SweepLine<'a> {
    order: usize,
    #[serde(flatten)]
    report: &'a StepReport,
}

fn sweep(path: &Path, orders: &[usize], seed: Option<u64>, steps: Option<usize>, out: Option<&Path>) -> Result<(), String> {
    let scenarios = orders
        .iter()
        .map(|&l| load_scenario(path, seed, steps, Some(l)))
        .collect::<Result<Vec<_>, _>>()?;
    // Orders are independent, so they run side by side; output keeps the
    // requested order.
    let results: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = scenarios
            .iter()
            .map(|s| scope.spawn(move || run_simulation_with(s, &RunOptions::default(), |_| Ok(()))))
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let mut sink = open_sink(out)?;
    for (&order, result) in orders.iter().zip(results) {
        let reports = result.map_err(|e| format!("order {order}: {e}"))?;
        for report in &reports {
            let line = serde_json::to_string(&SweepLine { order, report }).map_err(|e| e.to_string())?;
            writeln!(sink, "{line}").map_err(|e| e.to_string())?;
        }
        if let Some(last) = reports.last() {
            log::info!("order {order}: final IoU {:?}", last.iou);
        }
    }
    sink.flush().map_err(|e| e.to_string())
}

fn open_sink(path: Option<&Path>) -> Result<Box<dyn Write>, String> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| format!("{}: {e}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_line(sink: &mut Box<dyn Write>, report: &StepReport) -> shapetrack::Result<()> {
    let line = report.to_json_line()?;
    writeln!(sink, "{line}")
        .and_then(|_| sink.flush())
        .map_err(|source| shapetrack::Error::Io {
            path: PathBuf::from("<metrics output>"),
            source,
        })
}
