//! CSV ingestion of trajectories and pose sequences, and result export as
//! JSON and GeoJSON.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use log::{info, warn};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::geometry::{CurveParam, PolygonalCurve, DEFAULT_COORD_TOLERANCE};
use crate::pipeline::{ClusteringConfig, ClusteringResult, PhaseTimings};
use crate::scalar::dist;

/// Mean Earth radius in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_008.8;

/// Column names of a trajectory CSV.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormatSpec {
    pub id: String,
    /// Coordinate columns in order; two or more.
    pub coords: Vec<String>,
    /// Optional timestamp column, carried through unchanged.
    pub time: Option<String>,
    /// Treat the two coordinate columns as (longitude, latitude) in degrees
    /// and project them to planar meters.
    pub project: bool,
}

impl Default for FormatSpec {
    fn default() -> Self {
        Self {
            id: "id".into(),
            coords: vec!["x".into(), "y".into()],
            time: None,
            project: false,
        }
    }
}

impl FormatSpec {
    /// `lon`/`lat` columns projected to meters.
    pub fn lon_lat() -> Self {
        Self {
            coords: vec!["lon".into(), "lat".into()],
            project: true,
            ..Self::default()
        }
    }
}

/// One input trajectory as read from disk.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub curve_id: String,
    pub points: Vec<Vec<f64>>,
    pub timestamps: Option<Vec<String>>,
}

/// Loaded trajectories: ids and curves in order of first appearance.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectories {
    pub ids: Vec<String>,
    pub curves: Vec<PolygonalCurve<f64>>,
    /// Timestamps of the kept vertices, when the format names a time column.
    pub timestamps: Vec<Option<Vec<String>>>,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::Format {
        path: path.to_owned(),
        message: e.to_string(),
    })
}

fn column(headers: &csv::StringRecord, name: &str, path: &Path) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| Error::Format {
            path: path.to_owned(),
            message: format!("missing column {name:?}"),
        })
}

fn parse_cell(rec: &csv::StringRecord, col: usize, name: &str, row: usize, path: &Path) -> Result<f64> {
    let cell = rec.get(col).unwrap_or("").trim();
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::Data {
            path: path.to_owned(),
            row,
            column: Some(name.to_owned()),
            message: format!("not a finite number: {cell:?}"),
        }),
    }
}

/// Reads raw records grouped by id. Rows are numbered from 1 after the
/// header.
pub fn read_trajectory_records<R: Read>(reader: R, spec: &FormatSpec, path: &Path) -> Result<Vec<TrajectoryRecord>> {
    if spec.coords.len() < 2 || (spec.project && spec.coords.len() != 2) {
        return Err(Error::param(
            "format needs two or more coordinate columns, exactly two when projecting",
        ));
    }
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let id_col = column(&headers, &spec.id, path)?;
    let coord_cols = spec
        .coords
        .iter()
        .map(|c| column(&headers, c, path))
        .collect::<Result<Vec<_>>>()?;
    let time_col = spec.time.as_deref().map(|t| column(&headers, t, path)).transpose()?;

    let mut records: Vec<TrajectoryRecord> = Vec::new();
    let mut slot: HashMap<String, usize> = HashMap::new();
    for (k, rec) in rdr.records().enumerate() {
        let row = k + 1;
        let rec = rec?;
        let id = rec.get(id_col).unwrap_or("").to_owned();
        let point = coord_cols
            .iter()
            .zip(&spec.coords)
            .map(|(&c, name)| parse_cell(&rec, c, name, row, path))
            .collect::<Result<Vec<_>>>()?;
        let i = *slot.entry(id.clone()).or_insert_with(|| {
            records.push(TrajectoryRecord {
                curve_id: id,
                points: Vec::new(),
                timestamps: time_col.map(|_| Vec::new()),
            });
            records.len() - 1
        });
        records[i].points.push(point);
        if let (Some(c), Some(ts)) = (time_col, records[i].timestamps.as_mut()) {
            ts.push(rec.get(c).unwrap_or("").to_owned());
        }
    }
    if spec.project {
        project_equirectangular(&mut records);
    }
    Ok(records)
}

/// Projects (lon, lat) degrees to planar meters about the centroid of all
/// points. Distances are accurate near the centroid only.
pub fn project_equirectangular(records: &mut [TrajectoryRecord]) {
    let n: usize = records.iter().map(|r| r.points.len()).sum();
    if n == 0 {
        return;
    }
    let (mut lon0, mut lat0) = (0.0, 0.0);
    for p in records.iter().flat_map(|r| &r.points) {
        lon0 += p[0];
        lat0 += p[1];
    }
    lon0 /= n as f64;
    lat0 /= n as f64;
    let cos0 = lat0.to_radians().cos();
    for p in records.iter_mut().flat_map(|r| &mut r.points) {
        let x = EARTH_RADIUS_M * (p[0] - lon0).to_radians() * cos0;
        let y = EARTH_RADIUS_M * (p[1] - lat0).to_radians();
        p[0] = x;
        p[1] = y;
    }
}

/// Indices of the points kept after dropping consecutive repeats, and for
/// each input point the index of the kept vertex it maps to.
fn dedup_map(points: &[Vec<f64>]) -> (Vec<usize>, Vec<usize>) {
    let mut kept: Vec<usize> = Vec::with_capacity(points.len());
    let mut map = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        match kept.last() {
            Some(&k) if dist(&points[k], p) <= DEFAULT_COORD_TOLERANCE => {}
            _ => kept.push(i),
        }
        map.push(kept.len() - 1);
    }
    (kept, map)
}

/// Builds curves from records, dropping repeated consecutive points and
/// skipping curves with fewer than two distinct points. Fails when no curve
/// survives.
pub fn curves_from_records(records: Vec<TrajectoryRecord>, path: &Path) -> Result<Trajectories> {
    let mut out = Trajectories {
        ids: Vec::new(),
        curves: Vec::new(),
        timestamps: Vec::new(),
    };
    let mut dropped = 0;
    let mut skipped = 0;
    for r in records {
        let (kept, _) = dedup_map(&r.points);
        dropped += r.points.len() - kept.len();
        if kept.len() < 2 {
            warn!("{}: skipping degenerate curve {:?}", path.display(), r.curve_id);
            skipped += 1;
            continue;
        }
        let pts: Vec<&[f64]> = kept.iter().map(|&i| r.points[i].as_slice()).collect();
        let curve = PolygonalCurve::new(&pts).map_err(|e| Error::Format {
            path: path.to_owned(),
            message: format!("curve {:?}: {e}", r.curve_id),
        })?;
        out.timestamps
            .push(r.timestamps.map(|ts| kept.iter().map(|&i| ts[i].clone()).collect()));
        out.ids.push(r.curve_id);
        out.curves.push(curve);
    }
    if dropped > 0 {
        info!("{}: dropped {dropped} repeated consecutive points", path.display());
    }
    if out.curves.is_empty() {
        return Err(Error::DegenerateCurve(format!(
            "{}: no curve with two distinct points ({skipped} skipped)",
            path.display()
        )));
    }
    Ok(out)
}

/// Loads one curve per id, in order of first appearance.
pub fn load_trajectories_csv(path: impl AsRef<Path>, spec: &FormatSpec) -> Result<Trajectories> {
    let path = path.as_ref();
    let records = read_trajectory_records(open(path)?, spec, path)?;
    curves_from_records(records, path)
}

/// Writes `id,<coords>[,time]` rows using the column names of `spec`.
pub fn write_trajectories_csv<W: Write>(w: W, traj: &Trajectories, spec: &FormatSpec) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec![spec.id.clone()];
    header.extend(spec.coords.iter().cloned());
    header.extend(spec.time.iter().cloned());
    out.write_record(&header)?;
    for (k, (id, c)) in traj.ids.iter().zip(&traj.curves).enumerate() {
        if c.dim() != spec.coords.len() {
            return Err(Error::DimensionMismatch {
                expected: spec.coords.len(),
                found: c.dim(),
            });
        }
        for (i, v) in c.vertices().enumerate() {
            let mut row = vec![id.clone()];
            row.extend(v.iter().map(f64::to_string));
            if spec.time.is_some() {
                let ts = traj.timestamps.get(k).and_then(Option::as_ref);
                row.push(ts.and_then(|t| t.get(i)).cloned().unwrap_or_default());
            }
            out.write_record(&row)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// A pose sequence as one curve in `R^(3J)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PoseSequence {
    pub curve: PolygonalCurve<f64>,
    /// Vertex of `curve` for each input frame; repeated poses share a vertex.
    pub frame_vertex: Vec<usize>,
    pub joints: usize,
}

impl PoseSequence {
    pub fn num_frames(&self) -> usize {
        self.frame_vertex.len()
    }
}

/// Reads one pose per row, `3J` numeric columns. A first row without any
/// numeric cell is taken as a header.
pub fn read_pose_csv<R: Read>(reader: R, path: &Path) -> Result<PoseSequence> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if k == 0 && rec.iter().all(|c| c.parse::<f64>().is_err()) {
            continue;
        }
        let w = *width.get_or_insert(rec.len());
        if rec.len() != w {
            return Err(Error::Data {
                path: path.to_owned(),
                row: k,
                column: None,
                message: format!("ragged row: {} columns, expected {w}", rec.len()),
            });
        }
        if w == 0 || w % 3 != 0 {
            return Err(Error::Format {
                path: path.to_owned(),
                message: format!("{w} columns is not a multiple of 3"),
            });
        }
        let row = (0..w)
            .map(|c| parse_cell(&rec, c, &format!("column {c}"), k, path))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let joints = width.unwrap_or(0) / 3;
    let (kept, frame_vertex) = dedup_map(&rows);
    if kept.len() < 2 {
        return Err(Error::DegenerateCurve(format!(
            "{}: fewer than 2 distinct poses",
            path.display()
        )));
    }
    let pts: Vec<&[f64]> = kept.iter().map(|&i| rows[i].as_slice()).collect();
    Ok(PoseSequence {
        curve: PolygonalCurve::new(&pts)?,
        frame_vertex,
        joints,
    })
}

pub fn load_pose_csv(path: impl AsRef<Path>) -> Result<PoseSequence> {
    let path = path.as_ref();
    read_pose_csv(open(path)?, path)
}

/// Reads `frame_index,label` rows; indices must be exactly `0..N`.
pub fn read_ground_truth<R: Read>(reader: R, path: &Path) -> Result<Vec<String>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let fcol = column(&headers, "frame_index", path)?;
    let lcol = column(&headers, "label", path)?;
    let mut rows: Vec<(usize, String)> = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let cell = rec.get(fcol).unwrap_or("");
        let frame = cell.parse::<usize>().map_err(|_| Error::Data {
            path: path.to_owned(),
            row: k + 1,
            column: Some("frame_index".into()),
            message: format!("not a frame index: {cell:?}"),
        })?;
        rows.push((frame, rec.get(lcol).unwrap_or("").to_owned()));
    }
    rows.sort_by_key(|r| r.0);
    for (i, (f, _)) in rows.iter().enumerate() {
        if *f != i {
            return Err(Error::Format {
                path: path.to_owned(),
                message: format!("frame indices must be 0..{} without gaps or repeats", rows.len()),
            });
        }
    }
    Ok(rows.into_iter().map(|r| r.1).collect())
}

pub fn load_ground_truth(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let path = path.as_ref();
    read_ground_truth(open(path)?, path)
}

/// A curve parameter in serialized form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamDoc {
    pub edge: usize,
    pub t: f64,
    /// Fraction of the curve's edges, in `[0, 1]`.
    pub fraction: f64,
}

impl ParamDoc {
    fn new(p: CurveParam<f64>, n_edges: usize) -> Self {
        Self {
            edge: p.edge(),
            t: p.t(),
            fraction: p.fraction(n_edges),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalDoc {
    pub curve: usize,
    pub curve_id: String,
    pub start: ParamDoc,
    pub end: ParamDoc,
    /// The interval expanded to vertex boundaries of the input curve.
    pub source_vertices: [usize; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterDoc {
    pub rank: usize,
    pub candidate: usize,
    pub curve: usize,
    pub curve_id: String,
    pub start: ParamDoc,
    pub end: ParamDoc,
    pub vertices: Vec<Vec<f64>>,
    pub coverage: Vec<IntervalDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceDoc {
    pub candidate: usize,
    pub gain: f64,
    pub coverage_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigDoc {
    pub delta_simp: f64,
    pub delta_free: f64,
    pub l: usize,
    pub coverage_fraction: Option<f64>,
    pub max_rounds: Option<usize>,
    pub all_pairs: bool,
    pub arrangement_gain: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryDoc {
    pub curves: usize,
    pub input_vertices: usize,
    pub simplified_vertices: usize,
    pub extremal_coordinates: usize,
    pub candidates: usize,
    pub centers: usize,
    pub coverage_fraction: f64,
    pub lower_bound: usize,
    pub ratio: Option<f64>,
}

/// Run metadata; excluded from determinism comparisons.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunDoc {
    pub timestamp: u64,
    pub version: String,
    pub timings: PhaseTimingsDoc,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimingsDoc {
    pub simplify: f64,
    pub freespace: f64,
    pub candidates: f64,
    pub coverage: f64,
    pub greedy: f64,
    pub total: f64,
}

impl From<PhaseTimings> for PhaseTimingsDoc {
    fn from(t: PhaseTimings) -> Self {
        Self {
            simplify: t.simplify,
            freespace: t.freespace,
            candidates: t.candidates,
            coverage: t.coverage,
            greedy: t.greedy,
            total: t.total(),
        }
    }
}

/// The result JSON document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultDoc {
    pub config: ConfigDoc,
    pub summary: SummaryDoc,
    pub centers: Vec<CenterDoc>,
    pub trace: Vec<TraceDoc>,
    pub run: RunDoc,
}

impl ResultDoc {
    /// `ids` names the input curves; `input_vertices` is their total vertex
    /// count.
    pub fn new(
        result: &ClusteringResult<f64>,
        config: &ClusteringConfig<f64>,
        ids: &[String],
        input_vertices: usize,
    ) -> Self {
        let curves = result.simplified_curves();
        let name = |i: usize| ids.get(i).cloned().unwrap_or_else(|| i.to_string());
        let centers = result
            .centers
            .iter()
            .enumerate()
            .map(|(rank, c)| {
                let sub = c.subcurve;
                let n = curves[sub.curve_id].num_edges();
                CenterDoc {
                    rank,
                    candidate: c.candidate,
                    curve: sub.curve_id,
                    curve_id: name(sub.curve_id),
                    start: ParamDoc::new(sub.start, n),
                    end: ParamDoc::new(sub.end, n),
                    vertices: c.curve.vertices().map(<[f64]>::to_vec).collect(),
                    coverage: c
                        .coverage
                        .spans()
                        .iter()
                        .map(|s| {
                            let n = curves[s.curve].num_edges();
                            let (lo, hi) = result.simplifications[s.curve].expand_to_source(s.start, s.end);
                            IntervalDoc {
                                curve: s.curve,
                                curve_id: name(s.curve),
                                start: ParamDoc::new(s.start, n),
                                end: ParamDoc::new(s.end, n),
                                source_vertices: [lo, hi],
                            }
                        })
                        .collect(),
                }
            })
            .collect();
        let sol = &result.solution;
        let trace = sol
            .chosen
            .iter()
            .zip(&sol.gains)
            .zip(&sol.coverage_fraction)
            .map(|((&candidate, &gain), &coverage_fraction)| TraceDoc {
                candidate,
                gain,
                coverage_fraction,
            })
            .collect();
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        Self {
            config: ConfigDoc {
                delta_simp: config.delta_simp,
                delta_free: config.delta_free,
                l: config.l,
                coverage_fraction: config.stop.fraction,
                max_rounds: config.stop.max_rounds,
                all_pairs: config.candidate_rule == crate::candidates::CandidateRule::AllPairs,
                arrangement_gain: config.gain == crate::setcover::GainMeasure::ArrangementPieces,
            },
            summary: SummaryDoc {
                curves: curves.len(),
                input_vertices,
                simplified_vertices: curves.iter().map(PolygonalCurve::num_vertices).sum(),
                extremal_coordinates: result.index_size,
                candidates: result.candidates.len(),
                centers: result.centers.len(),
                coverage_fraction: sol.final_fraction(),
                lower_bound: result.lower_bound,
                ratio: (result.lower_bound > 0).then(|| result.centers.len() as f64 / result.lower_bound as f64),
            },
            centers,
            trace,
            run: RunDoc {
                timestamp,
                version: env!("CARGO_PKG_VERSION").into(),
                timings: result.timings.into(),
            },
        }
    }

    /// The document with the `run` block zeroed, for comparisons.
    pub fn without_run(&self) -> Self {
        Self {
            run: RunDoc {
                timestamp: 0,
                version: String::new(),
                timings: PhaseTimings::default().into(),
            },
            ..self.clone()
        }
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        let mut w = BufWriter::new(w);
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    pub fn read_json<R: Read>(r: R) -> Result<Self> {
        Ok(serde_json::from_reader(BufReader::new(r))?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_json(open(path.as_ref())?)
    }

    /// Centers as `LineString` features with their rank, and the covered
    /// part of each curve as a `MultiLineString`. Planar coordinates are
    /// written as given.
    pub fn to_geojson(&self, result: &ClusteringResult<f64>) -> Result<serde_json::Value> {
        let curves = result.simplified_curves();
        if let Some(c) = curves.iter().find(|c| c.dim() != 2) {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: c.dim(),
            });
        }
        let mut features: Vec<serde_json::Value> = self
            .centers
            .iter()
            .map(|c| {
                json!({
                    "type": "Feature",
                    "geometry": { "type": "LineString", "coordinates": c.vertices },
                    "properties": { "kind": "center", "rank": c.rank, "candidate": c.candidate, "curve_id": c.curve_id },
                })
            })
            .collect();
        let covered = &result.solution.covered;
        for (i, curve) in curves.iter().enumerate() {
            let lines = covered
                .on_curve(i)
                .iter()
                .map(|s| {
                    curve
                        .extract_subcurve(s.start, s.end)
                        .map(|sub| sub.vertices().map(<[f64]>::to_vec).collect::<Vec<_>>())
                })
                .collect::<Result<Vec<_>>>()?;
            if lines.is_empty() {
                continue;
            }
            let curve_id = self
                .centers
                .iter()
                .flat_map(|c| &c.coverage)
                .find(|iv| iv.curve == i)
                .map_or_else(|| i.to_string(), |iv| iv.curve_id.clone());
            features.push(json!({
                "type": "Feature",
                "geometry": { "type": "MultiLineString", "coordinates": lines },
                "properties": { "kind": "coverage", "curve": i, "curve_id": curve_id },
            }));
        }
        Ok(json!({ "type": "FeatureCollection", "features": features }))
    }
}

/// Writes `value` as pretty JSON to `path`.
pub fn write_json_file(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).map_err(|e| Error::Format {
        path: PathBuf::from(path),
        message: e.to_string(),
    })?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
