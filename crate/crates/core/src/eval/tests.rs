use super::*;
use crate::coverage::{CoverageSet, Span};
use crate::geometry::{CurveParam, Subcurve};
use crate::pipeline::{cluster, Center, ClusteringConfig};
use crate::testutil::curve;

fn s(v: &[&str]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn repeat(label: &str, n: usize) -> Vec<String> {
    vec![label.to_owned(); n]
}

/// 100 vertices: frames 0..50 on a horizontal run, 50..100 climbing
/// vertically after a right-angle turn.
fn l_shape() -> crate::geometry::PolygonalCurve<f64> {
    let mut pts = Vec::new();
    for i in 0..50 {
        pts.push([i as f64, 0.0]);
    }
    for i in 1..=50 {
        pts.push([49.0, i as f64]);
    }
    curve(&pts)
}

#[test]
fn one_center_uniform_truth() {
    let c = curve(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 0.0]]);
    let r = cluster(&[c.clone()], &ClusteringConfig::new(0.3, 0.5, 3)).unwrap();
    assert_eq!(r.centers.len(), 1);
    let lab = assign_labels(&r, &c, &[0, 1, 2, 3], &repeat("walk", 4)).unwrap();
    assert_eq!(lab.labels, repeat("walk", 4));
}

#[test]
fn disjoint_and_overlapping_centers() {
    let c = l_shape();
    let r = cluster(&[c.clone()], &ClusteringConfig::new(0.3, 0.5, 1)).unwrap();
    assert_eq!(r.centers.len(), 2);
    let frames: Vec<usize> = (0..100).collect();
    let mut truth = repeat("walk", 50);
    truth.extend(repeat("jump", 50));
    let lab = assign_labels(&r, &c, &frames, &truth).unwrap();
    let mut labels = lab.center_labels.clone();
    labels.sort();
    assert_eq!(labels, ["jump", "walk"]);
    // the corner vertex belongs to both centers' ranges
    assert_eq!(lab.labels.iter().filter(|l| *l == TRANSITION).count(), 1);
    assert_eq!(lab.labels[49], TRANSITION);
    assert!(lab.labels[..49].iter().all(|l| l == "walk"));
    assert!(lab.labels[50..].iter().all(|l| l == "jump"));
}

#[test]
fn overlapping_block_is_transition() {
    // a straight 100-vertex run simplifies to one edge; two hand-set centers
    // cover frames 0..=60 and 40..=99
    let pts: Vec<[f64; 2]> = (0..100).map(|i| [i as f64, 0.0]).collect();
    let c = curve(&pts);
    let mut r = cluster(&[c.clone()], &ClusteringConfig::new(0.3, 0.5, 1)).unwrap();
    let s = r.simplifications[0].curve.clone();
    assert_eq!(s.num_edges(), 1);
    let at = |k: f64| CurveParam::from_position(k / 99.0, 1);
    let make = |a: f64, b: f64| Center {
        candidate: 0,
        subcurve: Subcurve::new(0, at(a), at(b)).unwrap(),
        curve: s.extract_subcurve(at(a), at(b)).unwrap(),
        coverage: CoverageSet::from_spans(vec![Span::new(0, &s, at(a), at(b))]),
    };
    r.centers = vec![make(0.0, 60.0), make(40.0, 99.0)];
    let mut truth = repeat("walk", 50);
    truth.extend(repeat("jump", 50));
    let frames: Vec<usize> = (0..100).collect();
    let lab = assign_labels(&r, &c, &frames, &truth).unwrap();
    assert_eq!(lab.center_labels, ["walk", "jump"]);
    for (f, l) in lab.labels.iter().enumerate() {
        let want = match f {
            0..=39 => "walk",
            40..=60 => TRANSITION,
            _ => "jump",
        };
        assert_eq!(l, want, "frame {f}");
    }
    let m = metrics(&lab.labels, &truth).unwrap();
    assert!((m.accuracy - 0.79).abs() < 1e-12);
}

#[test]
fn label_count_mismatch() {
    let c = l_shape();
    let r = cluster(&[c.clone()], &ClusteringConfig::new(0.3, 0.5, 1)).unwrap();
    assert!(assign_labels(&r, &c, &[0, 1, 2], &repeat("a", 2)).is_err());
    assert!(assign_labels(&r, &c, &[500], &repeat("a", 1)).is_err());
}

#[test]
fn majority_ties_go_to_smallest_label() {
    assert_eq!(majority(["b", "a", "b", "a"].into_iter()), Some("a"));
    assert_eq!(majority(["c", "b", "c"].into_iter()), Some("c"));
    assert_eq!(majority(std::iter::empty()), None);
}

#[test]
fn perfect_and_wrong_predictions() {
    let t = s(&["a", "a", "b", "b"]);
    let m = metrics(&t, &t).unwrap();
    assert_eq!((m.accuracy, m.macro_precision, m.macro_recall), (1.0, 1.0, 1.0));
    let m = metrics(&repeat("c", 4), &t).unwrap();
    assert_eq!(m.accuracy, 0.0);
    assert!(metrics(&t[..3], &t).is_err());
}

#[test]
fn hand_checked_confusion() {
    // 50 "a" and 50 "b"; 10 of each predicted as the other
    let mut truth = repeat("a", 50);
    truth.extend(repeat("b", 50));
    let mut pred = repeat("a", 40);
    pred.extend(repeat("b", 10));
    pred.extend(repeat("a", 10));
    pred.extend(repeat("b", 40));
    let m = metrics(&pred, &truth).unwrap();
    assert!((m.accuracy - 0.8).abs() < 1e-15);
    assert!((m.macro_precision - 0.8).abs() < 1e-15);
    assert!((m.macro_recall - 0.8).abs() < 1e-15);

    // unbalanced predictions: a is predicted 60 times (40 right)
    let mut pred = repeat("a", 50);
    pred.extend(repeat("a", 10));
    pred.extend(repeat("b", 40));
    let m = metrics(&pred, &truth).unwrap();
    assert!((m.accuracy - 0.9).abs() < 1e-15);
    let p = (50.0 / 60.0 + 1.0) / 2.0;
    let r = (1.0 + 40.0 / 50.0) / 2.0;
    assert!((m.macro_precision - p).abs() < 1e-15);
    assert!((m.macro_recall - r).abs() < 1e-15);

    // renaming labels leaves the macro scores unchanged
    let rename = |v: &[String]| {
        v.iter()
            .map(|l| if l == "a" { "z".into() } else { l.clone() })
            .collect::<Vec<_>>()
    };
    assert_eq!(metrics(&rename(&pred), &rename(&truth)).unwrap(), m);
    let conf = confusion(&pred, &truth).unwrap();
    let diag: usize = conf.iter().filter(|((t, p), _)| t == p).map(|(_, c)| c).sum();
    assert_eq!(diag as f64 / 100.0, m.accuracy);
}

#[test]
fn ratio_of_single_candidate_instance() {
    let c = curve(&[[0.0, 0.0], [2.0, 0.0]]);
    let r = cluster(&[c], &ClusteringConfig::new(0.3, 0.5, 1)).unwrap();
    let rep = approximation_report(&r).unwrap();
    assert_eq!((rep.solution_size, rep.lower_bound, rep.ratio), (1, 1, 1.0));
}

#[test]
fn csv_rows_and_slope() {
    let mut buf = Vec::new();
    let m = Metrics {
        accuracy: 1.0,
        macro_precision: 0.5,
        macro_recall: 0.25,
    };
    write_metrics_csv(&mut buf, &[MetricsRow::new("t1", "greedy", m, 0.5)]).unwrap();
    assert_eq!(
        String::from_utf8(buf).unwrap(),
        "trial,method,accuracy,precision,recall,seconds\nt1,greedy,1.0,0.5,0.25,0.5\n"
    );
    let pts: Vec<(f64, f64)> = [1e4, 3e4, 1e5].iter().map(|&n: &f64| (n, 2.0 * n.powf(1.3))).collect();
    assert!((loglog_slope(&pts).unwrap() - 1.3).abs() < 1e-12);
    assert_eq!(loglog_slope(&pts[..1]), None);
}
