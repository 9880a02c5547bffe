//! Frame labeling from cluster centers, classification metrics, and
//! approximation-ratio reporting.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::PolygonalCurve;
use crate::pipeline::ClusteringResult;

/// Label of a frame covered by centers with different labels.
pub const TRANSITION: &str = "transition";
/// Label of a frame no center covers.
pub const UNCOVERED: &str = "uncovered";

/// One label per frame.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Labeling {
    pub labels: Vec<String>,
    /// Majority ground-truth label of each center, in solution order.
    pub center_labels: Vec<String>,
}

/// For each center, the sorted frames of curve 0 it covers. `curve` is the
/// input curve behind the first simplification and `frame_vertex[f]` the
/// vertex of frame `f`; a frame is covered when its vertex parameter on the
/// simplification lies in one of the center's closed spans.
pub fn covered_frames(
    result: &ClusteringResult<f64>,
    curve: &PolygonalCurve<f64>,
    frame_vertex: &[usize],
) -> Vec<Vec<usize>> {
    let params = result.simplifications[0].source_params(curve);
    result
        .centers
        .iter()
        .map(|c| {
            frame_vertex
                .iter()
                .enumerate()
                .filter(|(_, &v)| c.coverage.contains(0, params[v]))
                .map(|(f, _)| f)
                .collect()
        })
        .collect()
}

fn majority<'a>(labels: impl Iterator<Item = &'a str>) -> Option<&'a str> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for l in labels {
        *counts.entry(l).or_default() += 1;
    }
    // BTreeMap iterates in label order, so the first maximum is the
    // lexicographically smallest
    let best = counts.values().copied().max()?;
    counts.into_iter().find(|&(_, c)| c == best).map(|(l, _)| l)
}

/// Labels the frames of a single pose curve, clustered as curve 0 of
/// `result`. `frame_vertex` maps frames to vertices of `curve`; pass `0..N`
/// when every frame is its own vertex.
pub fn assign_labels(
    result: &ClusteringResult<f64>,
    curve: &PolygonalCurve<f64>,
    frame_vertex: &[usize],
    truth: &[String],
) -> Result<Labeling> {
    if frame_vertex.len() != truth.len() {
        return Err(Error::param(format!(
            "{} frames but {} ground-truth labels",
            frame_vertex.len(),
            truth.len()
        )));
    }
    let n_vertices = curve.num_vertices();
    if let Some(&v) = frame_vertex.iter().find(|&&v| v >= n_vertices) {
        return Err(Error::param(format!(
            "frame maps to vertex {v} of a {n_vertices}-vertex curve"
        )));
    }
    let frames = covered_frames(result, curve, frame_vertex);
    let center_labels: Vec<String> = frames
        .iter()
        .map(|fs| {
            majority(fs.iter().map(|&f| truth[f].as_str()))
                .unwrap_or(UNCOVERED)
                .to_owned()
        })
        .collect();
    let mut per_frame: Vec<BTreeSet<&str>> = vec![BTreeSet::new(); truth.len()];
    for (fs, label) in frames.iter().zip(&center_labels) {
        for &f in fs {
            per_frame[f].insert(label);
        }
    }
    let labels = per_frame
        .into_iter()
        .map(|set| match set.len() {
            0 => UNCOVERED.to_owned(),
            1 => set.into_iter().next().unwrap().to_owned(),
            _ => TRANSITION.to_owned(),
        })
        .collect();
    Ok(Labeling { labels, center_labels })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
}

/// Counts of `(truth, predicted)` label pairs.
pub fn confusion(pred: &[String], truth: &[String]) -> Result<BTreeMap<(String, String), usize>> {
    if pred.len() != truth.len() {
        return Err(Error::param(format!(
            "{} predicted labels but {} ground-truth labels",
            pred.len(),
            truth.len()
        )));
    }
    let mut m = BTreeMap::new();
    for (p, t) in pred.iter().zip(truth) {
        *m.entry((t.clone(), p.clone())).or_default() += 1;
    }
    Ok(m)
}

/// Accuracy, and precision and recall averaged over the ground-truth
/// classes. A class never predicted has precision 0.
pub fn metrics(pred: &[String], truth: &[String]) -> Result<Metrics> {
    let m = confusion(pred, truth)?;
    if truth.is_empty() {
        return Err(Error::param("no frames"));
    }
    let classes: BTreeSet<&str> = truth.iter().map(String::as_str).collect();
    let correct: usize = m.iter().filter(|((t, p), _)| t == p).map(|(_, c)| c).sum();
    let (mut precision, mut recall) = (0.0, 0.0);
    for class in &classes {
        let tp = m.get(&(class.to_string(), class.to_string())).copied().unwrap_or(0) as f64;
        let predicted: usize = m.iter().filter(|((_, p), _)| p == class).map(|(_, c)| c).sum();
        let actual: usize = m.iter().filter(|((t, _), _)| t == class).map(|(_, c)| c).sum();
        if predicted > 0 {
            precision += tp / predicted as f64;
        }
        recall += tp / actual as f64;
    }
    let k = classes.len() as f64;
    Ok(Metrics {
        accuracy: correct as f64 / truth.len() as f64,
        macro_precision: precision / k,
        macro_recall: recall / k,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ApproximationReport {
    pub solution_size: usize,
    pub lower_bound: usize,
    /// `solution_size / lower_bound`.
    pub ratio: f64,
}

pub fn approximation_report(result: &ClusteringResult<f64>) -> Result<ApproximationReport> {
    if result.lower_bound == 0 {
        return Err(Error::param("lower bound is zero"));
    }
    Ok(ApproximationReport {
        solution_size: result.centers.len(),
        lower_bound: result.lower_bound,
        ratio: result.centers.len() as f64 / result.lower_bound as f64,
    })
}

/// One line of the metrics CSV.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricsRow {
    pub trial: String,
    pub method: String,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub seconds: f64,
}

impl MetricsRow {
    pub fn new(trial: impl Into<String>, method: impl Into<String>, m: Metrics, seconds: f64) -> Self {
        Self {
            trial: trial.into(),
            method: method.into(),
            accuracy: m.accuracy,
            precision: m.macro_precision,
            recall: m.macro_recall,
            seconds,
        }
    }
}

/// Writes `trial,method,accuracy,precision,recall,seconds` rows with a header.
pub fn write_metrics_csv<W: Write>(w: W, rows: &[MetricsRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

/// Writes `frame,label` rows.
pub fn write_labeling_csv<W: Write>(w: W, labeling: &Labeling) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["frame", "label"])?;
    for (f, l) in labeling.labels.iter().enumerate() {
        out.write_record([f.to_string(), l.clone()])?;
    }
    out.flush()?;
    Ok(())
}

/// Least-squares slope of `ln y` against `ln x`; `None` for fewer than two
/// distinct positive `x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (pts.len() >= 2 && sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests;
