//! Command-line driver: argument parsing and the four subcommands.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use log::info;

use trajcover::candidates::{write_candidate_table, CandidateRule};
use trajcover::error::{Error, Result};
use trajcover::eval::{approximation_report, assign_labels, loglog_slope, metrics, write_metrics_csv, MetricsRow};
use trajcover::freespace::build_free_space;
use trajcover::io_formats::{
    load_ground_truth, load_pose_csv, load_trajectories_csv, write_json_file, write_trajectories_csv, FormatSpec,
    ResultDoc, Trajectories,
};
use trajcover::pipeline::{cluster, ClusteringConfig, ClusteringResult};
use trajcover::setcover::{GainMeasure, StopRule};
use trajcover::simplification::delta_good_simplify;
use trajcover::synthetic::{drifters, DrifterConfig};
use trajcover::PolygonalCurve;

#[derive(Debug, Parser)]
#[command(
    name = "trajcover",
    version,
    about = "Subtrajectory clustering under the Fréchet distance"
)]
pub struct Cli {
    /// More log output (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simplify every trajectory and write the result as CSV.
    Simplify(SimplifyArgs),
    /// Cluster trajectories and write the result as JSON.
    Cluster(ClusterArgs),
    /// Label the frames of a pose sequence and score them against ground truth.
    Label(LabelArgs),
    /// Time the pipeline over a sweep of input sizes.
    Bench(BenchArgs),
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

fn fraction(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v <= 1.0 => Ok(v),
        _ => Err(format!("expected a number in (0, 1], got {s:?}")),
    }
}

fn pair(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected I,J, got {s:?}"))?;
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

#[derive(Debug, Args)]
pub struct FormatArgs {
    /// Name of the trajectory id column.
    #[arg(long, default_value = "id")]
    pub id_col: String,
    /// Coordinate columns, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "x,y")]
    pub coords: Vec<String>,
    /// Timestamp column, carried through to exported CSV.
    #[arg(long)]
    pub time_col: Option<String>,
    /// Read `lon`,`lat` columns (unless --coords is given) and project them
    /// to planar meters about the data centroid.
    #[arg(long)]
    pub lonlat: bool,
}

impl FormatArgs {
    fn spec(&self) -> FormatSpec {
        let mut spec = FormatSpec {
            id: self.id_col.clone(),
            coords: self.coords.clone(),
            time: self.time_col.clone(),
            project: self.lonlat,
        };
        if self.lonlat && self.coords == ["x", "y"] {
            spec.coords = FormatSpec::lon_lat().coords;
        }
        spec
    }
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Fréchet bound between each curve and its simplification.
    #[arg(long, value_parser = positive, required_unless_present = "delta")]
    pub delta_simp: Option<f64>,
    /// Coverage radius.
    #[arg(long, value_parser = positive, required_unless_present = "delta")]
    pub delta_free: Option<f64>,
    /// Sets --delta-simp to 3Δ and --delta-free to 8Δ.
    #[arg(long, value_parser = positive, conflicts_with_all = ["delta_simp", "delta_free"])]
    pub delta: Option<f64>,
    /// Stop once this fraction of the total curve length is covered.
    #[arg(long, value_parser = fraction)]
    pub coverage: Option<f64>,
    /// Stop after this many centers.
    #[arg(long)]
    pub max_rounds: Option<usize>,
    /// Use every pair of extremal coordinates as a candidate.
    #[arg(long)]
    pub theory_candidates: bool,
    /// Score candidates by newly covered arrangement pieces instead of arc length.
    #[arg(long)]
    pub arrangement_greedy: bool,
    /// Worker threads (default: all cores).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: Option<u64>,
}

impl ParamArgs {
    fn deltas(&self) -> (f64, f64) {
        match self.delta {
            Some(d) => (3.0 * d, 8.0 * d),
            None => (
                self.delta_simp.expect("required by clap"),
                self.delta_free.expect("required by clap"),
            ),
        }
    }

    fn config(&self, l: usize) -> ClusteringConfig<f64> {
        let (ds, df) = self.deltas();
        ClusteringConfig {
            stop: StopRule {
                fraction: self.coverage,
                max_rounds: self.max_rounds,
            },
            candidate_rule: if self.theory_candidates {
                CandidateRule::AllPairs
            } else {
                CandidateRule::PowerOfTwo
            },
            gain: if self.arrangement_greedy {
                GainMeasure::ArrangementPieces
            } else {
                GainMeasure::ArcLength
            },
            workers: self.workers.map(|w| w as usize),
            ..ClusteringConfig::new(ds, df, l)
        }
    }
}

#[derive(Debug, Args)]
pub struct SimplifyArgs {
    /// Trajectory CSV.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Output CSV (standard output when omitted).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Fréchet bound between each curve and its simplification.
    #[arg(long, value_parser = positive)]
    pub delta_simp: f64,
    #[command(flatten)]
    pub format: FormatArgs,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// Trajectory CSV.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Result JSON.
    #[arg(long, short)]
    pub output: PathBuf,
    /// Maximum number of edges of a center.
    #[arg(short = 'l', long = "max-edges", value_parser = clap::value_parser!(u64).range(1..))]
    pub l: u64,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Also write centers and coverage as GeoJSON (planar 2-D input only).
    #[arg(long)]
    pub geojson: Option<PathBuf>,
    /// Write the candidate table as CSV.
    #[arg(long)]
    pub candidates_out: Option<PathBuf>,
    /// Write the occupancy grid of the free space of simplified curves I,J.
    #[arg(long, value_parser = pair, requires = "freespace_out")]
    pub freespace_pair: Option<(usize, usize)>,
    /// Destination of the occupancy grid.
    #[arg(long, requires = "freespace_pair")]
    pub freespace_out: Option<PathBuf>,
    #[command(flatten)]
    pub format: FormatArgs,
}

#[derive(Debug, Args)]
pub struct LabelArgs {
    /// Pose CSV, one frame per row with 3·J coordinates.
    #[arg(long)]
    pub poses: PathBuf,
    /// Ground-truth CSV with `frame_index,label`.
    #[arg(long)]
    pub truth: PathBuf,
    /// Frame labels CSV (`l,frame,label`).
    #[arg(long, short)]
    pub output: PathBuf,
    /// Metrics CSV (`trial,method,accuracy,precision,recall,seconds`).
    #[arg(long)]
    pub metrics: PathBuf,
    /// Trial name in the metrics rows (default: pose file stem).
    #[arg(long)]
    pub trial: Option<String>,
    /// Complexity bounds; one run each.
    #[arg(short = 'l', long = "max-edges", value_delimiter = ',', required = true,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub l: Vec<u64>,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Total point counts to time.
    #[arg(long, value_delimiter = ',', default_value = "10000,30000,100000")]
    pub sizes: Vec<usize>,
    /// Take curves from this trajectory CSV instead of generating them.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Points per generated curve.
    #[arg(long, default_value_t = 400)]
    pub points_per_curve: usize,
    /// Seed of the generator.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Maximum number of edges of a center.
    #[arg(short = 'l', long = "max-edges", default_value_t = 3,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub l: u64,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Timing CSV (standard output when omitted).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub format: FormatArgs,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::Format {
        path: path.to_owned(),
        message: e.to_string(),
    })
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn total_vertices(curves: &[PolygonalCurve]) -> usize {
    curves.iter().map(PolygonalCurve::num_vertices).sum()
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simplify(a) => simplify(a),
        Command::Cluster(a) => cluster_cmd(a),
        Command::Label(a) => label(a),
        Command::Bench(a) => bench(a),
    }
}

fn simplify(a: SimplifyArgs) -> Result<()> {
    let spec = a.format.spec();
    let traj = load_trajectories_csv(&a.input, &spec)?;
    let mut out = Trajectories {
        ids: traj.ids.clone(),
        curves: Vec::with_capacity(traj.curves.len()),
        timestamps: Vec::with_capacity(traj.curves.len()),
    };
    // a simplification at Δ is within 3Δ of its curve
    for (c, ts) in traj.curves.iter().zip(&traj.timestamps) {
        let s = delta_good_simplify(c, a.delta_simp / 3.0)?;
        out.timestamps.push(
            ts.as_ref()
                .map(|t| s.source_indices.iter().map(|&i| t[i].clone()).collect()),
        );
        out.curves.push(s.curve);
    }
    let planar = FormatSpec { project: false, ..spec };
    write_trajectories_csv(sink(a.output.as_deref())?, &out, &planar)?;
    eprintln!(
        "curves {}  vertices {} -> {}",
        traj.curves.len(),
        total_vertices(&traj.curves),
        total_vertices(&out.curves)
    );
    Ok(())
}

fn print_summary(doc: &ResultDoc, result: &ClusteringResult<f64>) {
    let s = &doc.summary;
    println!("curves               {}", s.curves);
    println!("input vertices       {}", s.input_vertices);
    println!("simplified vertices  {}", s.simplified_vertices);
    println!("extremal coordinates {}", s.extremal_coordinates);
    println!("candidates           {}", s.candidates);
    println!("centers              {}", s.centers);
    println!("coverage fraction    {:.6}", s.coverage_fraction);
    println!("lower bound          {}", s.lower_bound);
    match s.ratio {
        Some(r) => println!("ratio                {r:.3}"),
        None => println!("ratio                n/a"),
    }
    for (name, t) in result.timings.rows() {
        println!("time {name:<15} {t:.3}s");
    }
    println!("time total           {:.3}s", result.timings.total());
}

fn cluster_cmd(a: ClusterArgs) -> Result<()> {
    let traj = load_trajectories_csv(&a.input, &a.format.spec())?;
    let config = a.params.config(a.l as usize);
    let result = cluster(&traj.curves, &config)?;
    let doc = ResultDoc::new(&result, &config, &traj.ids, total_vertices(&traj.curves));
    if let Some(path) = &a.geojson {
        let g = doc.to_geojson(&result)?;
        write_json_file(path, &g)?;
    }
    doc.write_json(create(&a.output)?)?;
    if let Some(path) = &a.candidates_out {
        write_candidate_table(create(path)?, &result.candidates)?;
    }
    if let (Some((i, j)), Some(path)) = (a.freespace_pair, &a.freespace_out) {
        let s = result.simplified_curves();
        let m = s.len();
        let (p, q) = match (s.get(i), s.get(j)) {
            (Some(p), Some(q)) => (p, q),
            _ => {
                return Err(Error::Parameter(format!(
                    "free-space pair {i},{j} out of range for {m} curves"
                )))
            }
        };
        let diag = build_free_space(p, q, config.delta_free);
        let mut w = create(path)?;
        w.write_all(diag.occupancy_grid().as_bytes())?;
        w.flush()?;
    }
    info!("wrote {}", a.output.display());
    print_summary(&doc, &result);
    Ok(())
}

fn label(a: LabelArgs) -> Result<()> {
    let poses = load_pose_csv(&a.poses)?;
    let truth = load_ground_truth(&a.truth)?;
    if truth.len() != poses.num_frames() {
        return Err(Error::Format {
            path: a.truth.clone(),
            message: format!("{} labels for {} frames", truth.len(), poses.num_frames()),
        });
    }
    let trial = a.trial.clone().unwrap_or_else(|| {
        a.poses
            .file_stem()
            .map_or_else(|| "trial".into(), |s| s.to_string_lossy().into_owned())
    });
    let mut labels = csv::Writer::from_writer(create(&a.output)?);
    labels.write_record(["l", "frame", "label"])?;
    let mut rows = Vec::new();
    for &l in &a.l {
        let start = Instant::now();
        let config = a.params.config(l as usize);
        let result = cluster(std::slice::from_ref(&poses.curve), &config)?;
        let labeling = assign_labels(&result, &poses.curve, &poses.frame_vertex, &truth)?;
        let seconds = start.elapsed().as_secs_f64();
        let m = metrics(&labeling.labels, &truth)?;
        for (f, lab) in labeling.labels.iter().enumerate() {
            labels.write_record([l.to_string(), f.to_string(), lab.clone()])?;
        }
        println!(
            "l={l:<3} centers {:<4} accuracy {:.4} precision {:.4} recall {:.4} ({seconds:.3}s)",
            result.centers.len(),
            m.accuracy,
            m.macro_precision,
            m.macro_recall
        );
        rows.push(MetricsRow::new(trial.clone(), format!("greedy-l{l}"), m, seconds));
    }
    labels.flush()?;
    write_metrics_csv(create(&a.metrics)?, &rows)?;
    Ok(())
}

/// Curves of `pool` taken in order until `n` points are reached; the last
/// curve is truncated.
fn prefix_of(pool: &[PolygonalCurve], n: usize) -> Result<Vec<PolygonalCurve>> {
    let mut out = Vec::new();
    let mut left = n;
    for c in pool {
        if left < 2 {
            break;
        }
        if c.num_vertices() <= left {
            left -= c.num_vertices();
            out.push(c.clone());
        } else {
            let pts: Vec<&[f64]> = c.vertices().take(left).collect();
            out.push(PolygonalCurve::new(&pts)?);
            left = 0;
        }
    }
    if left >= 2 {
        return Err(Error::Parameter(format!(
            "dataset has {} points, fewer than {n}",
            n - left
        )));
    }
    Ok(out)
}

fn bench(a: BenchArgs) -> Result<()> {
    if a.sizes.is_empty() {
        return Err(Error::Parameter("no sizes given".into()));
    }
    let pool = match &a.input {
        Some(p) => Some(load_trajectories_csv(p, &a.format.spec())?.curves),
        None => None,
    };
    let config = a.params.config(a.l as usize);
    let mut out = csv::Writer::from_writer(sink(a.output.as_deref())?);
    out.write_record([
        "n",
        "curves",
        "simplify",
        "freespace",
        "candidates",
        "coverage",
        "greedy",
        "total",
        "centers",
        "lower_bound",
    ])?;
    let mut points = Vec::new();
    for &n in &a.sizes {
        let curves = match &pool {
            Some(pool) => prefix_of(pool, n)?,
            None => drifters(&DrifterConfig::with_total_points(n, a.points_per_curve), a.seed)?,
        };
        let n_actual = total_vertices(&curves);
        let result = cluster(&curves, &config)?;
        let t = result.timings;
        info!("n={n_actual}: {:.3}s", t.total());
        out.write_record([
            n_actual.to_string(),
            curves.len().to_string(),
            t.simplify.to_string(),
            t.freespace.to_string(),
            t.candidates.to_string(),
            t.coverage.to_string(),
            t.greedy.to_string(),
            t.total().to_string(),
            result.centers.len().to_string(),
            result.lower_bound.to_string(),
        ])?;
        out.flush()?;
        points.push((n_actual as f64, t.total()));
        if let Ok(r) = approximation_report(&result) {
            eprintln!(
                "n={n_actual} centers {} lower bound {} ratio {:.3}",
                r.solution_size, r.lower_bound, r.ratio
            );
        }
    }
    if let Some(slope) = loglog_slope(&points) {
        eprintln!("fitted log-log slope {slope:.3}");
    }
    Ok(())
}
