use rand::Rng;

use super::*;
use crate::coverage::{CoverageEngine, CoverageSet};
use crate::freespace::build_free_space;
use crate::simplification::delta_good_simplify;
use crate::testutil::{curve, perturbed, random_walk, rng};

fn straight(n: usize) -> PolygonalCurve<f64> {
    let pts: Vec<[f64; 2]> = (0..=n).map(|i| [i as f64, 0.0]).collect();
    curve(&pts)
}

fn index_of(n: usize, positions: &[f64]) -> ExtremalCoordinateIndex<f64> {
    let coords = positions.iter().map(|&x| CurveParam::from_position(x, n)).collect();
    ExtremalCoordinateIndex::from_coords(vec![coords], &[n])
}

fn pairs_from_first(cands: &[Candidate<f64>]) -> Vec<(f64, f64)> {
    cands
        .iter()
        .filter(|c| c.subcurve.start == CurveParam::start())
        .map(|c| (c.subcurve.start.position(), c.subcurve.end.position()))
        .collect()
}

#[test]
fn power_of_two_counting_rule() {
    // coordinates e1..e10 at positions 0..9
    let c = straight(9);
    let idx = index_of(9, &(0..10).map(|i| i as f64).collect::<Vec<_>>());
    let cands = enumerate_candidates(&idx, &[c], 100, CandidateRule::PowerOfTwo);
    assert_eq!(
        pairs_from_first(&cands),
        vec![(0.0, 1.0), (0.0, 2.0), (0.0, 3.0), (0.0, 5.0), (0.0, 9.0)]
    );
}

#[test]
fn complexity_one_keeps_pairs_within_an_edge() {
    let c = straight(4);
    let idx = index_of(4, &[0.0, 0.3, 0.6, 1.0, 1.5, 2.0, 2.2, 3.0, 4.0]);
    let cands = enumerate_candidates(&idx, &[c], 1, CandidateRule::AllPairs);
    assert!(!cands.is_empty());
    for cand in &cands {
        assert_eq!(cand.complexity, 1);
        assert_eq!(cand.subcurve.start.edge(), cand.subcurve.end.end_form().0);
    }
}

#[test]
fn two_coordinates_give_one_candidate() {
    let c = straight(3);
    let idx = index_of(3, &[]);
    assert_eq!(idx.coords(0).len(), 2);
    let cands = enumerate_candidates(&idx, &[c], 3, CandidateRule::PowerOfTwo);
    assert_eq!(cands.len(), 1);
    assert_eq!(cands[0].complexity, 3);
}

#[test]
fn dedup_keeps_exact_ends() {
    let idx = index_of(2, &[0.0, 1e-13, 1.0, 1.0 + 5e-13, 2.0 - 1e-13, 2.0]);
    let pos: Vec<f64> = idx.coords(0).iter().map(|p| p.position()).collect();
    assert_eq!(pos, vec![0.0, 1.0, 2.0]);
}

#[test]
fn self_index_contains_vertices_next_to_free_cells() {
    let c = curve(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [3.0, 1.0]]);
    let curves = vec![c.clone()];
    let idx = ExtremalCoordinateIndex::build(&curves, 0.1);
    for k in 0..=3 {
        let v = c.param_at_vertex(k);
        assert!(idx.coords(0).contains(&v), "vertex {k} missing");
    }
}

#[test]
fn fast_index_matches_explicit_diagrams() {
    let mut r = rng(2);
    let base = random_walk(&mut r, 12, 1.0);
    let curves: Vec<_> = (0..3).map(|_| perturbed(&mut r, &base, 0.4)).collect();
    let delta = 0.5;
    let diags: Vec<_> = (0..3)
        .flat_map(|x| (0..3).map(move |y| (x, y)))
        .map(|(x, y)| (x, y, build_free_space(&curves[x], &curves[y], delta)))
        .collect();
    let counts: Vec<usize> = curves.iter().map(|c| c.num_edges()).collect();
    let slow = ExtremalCoordinateIndex::from_diagrams(&counts, diags.iter().map(|(x, y, d)| (*x, *y, d)));
    let fast = ExtremalCoordinateIndex::build(&curves, delta);
    assert_eq!(slow, fast);
}

#[test]
fn identical_curves_have_identical_indices() {
    let mut r = rng(8);
    let c = random_walk(&mut r, 10, 1.0);
    let idx = ExtremalCoordinateIndex::build(&[c.clone(), c], 0.3);
    assert_eq!(idx.coords(0), idx.coords(1));
}

#[test]
fn candidate_endpoints_are_extremal_coordinates() {
    let mut r = rng(12);
    let curves: Vec<_> = (0..3).map(|_| random_walk(&mut r, 20, 1.0)).collect();
    let idx = ExtremalCoordinateIndex::build(&curves, 0.8);
    let cands = enumerate_candidates(&idx, &curves, 4, CandidateRule::PowerOfTwo);
    for (k, c) in cands.iter().enumerate() {
        assert_eq!(c.id, k);
        assert!(c.complexity <= 4);
        let coords = idx.coords(c.subcurve.curve_id);
        assert!(coords.contains(&c.subcurve.start) && coords.contains(&c.subcurve.end));
    }
}

#[test]
fn candidate_count_is_near_linearithmic() {
    let mut r = rng(5);
    for _ in 0..5 {
        let c = random_walk(&mut r, 60, 1.0);
        let curves = vec![c];
        let idx = ExtremalCoordinateIndex::build(&curves, 1.0);
        let e = idx.len() as f64;
        let cands = enumerate_candidates(&idx, &curves, usize::MAX, CandidateRule::PowerOfTwo);
        assert!((cands.len() as f64) <= 2.0 * e * e.log2());
    }
}

/// Greedily picks candidates until `target` is covered; returns how many.
fn greedy_containment(target: &CoverageSet<f64>, covs: &[CoverageSet<f64>], limit: usize) -> Option<usize> {
    let mut rest = target.clone();
    for used in 0..=limit {
        if rest.union_length() <= 1e-9 {
            return Some(used);
        }
        let best = covs
            .iter()
            .map(|c| rest.intersect(c).union_length())
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())?;
        if best.1 <= 0.0 {
            return None;
        }
        rest = rest.subtract(&covs[best.0]);
    }
    None
}

#[test]
fn arbitrary_subcurves_are_covered_by_few_candidates() {
    let mut r = rng(31);
    let mut worst = 0;
    for _ in 0..12 {
        let base = random_walk(&mut r, 25, 1.0);
        let p = perturbed(&mut r, &base, 0.3);
        let q = delta_good_simplify(&perturbed(&mut r, &base, 0.3), 0.1).unwrap().curve;
        let delta = 0.6;
        // target P on the x-axis, centers on Q
        let curves = vec![q.clone(), p.clone()];
        let diag = build_free_space(&p, &q, delta);
        let counts = [q.num_edges(), p.num_edges()];
        let idx = ExtremalCoordinateIndex::from_diagrams(&counts, [(1, 0, &diag)]);
        let cands: Vec<_> = enumerate_candidates(&idx, &curves, q.num_edges(), CandidateRule::PowerOfTwo)
            .into_iter()
            .filter(|c| c.subcurve.curve_id == 0)
            .collect();
        let engine = CoverageEngine::new(&curves, delta);
        let only_p = |c: CoverageSet<f64>| CoverageSet::from_spans(c.on_curve(1).to_vec());
        let covs: Vec<_> = cands.iter().map(|c| only_p(engine.coverage(&c.subcurve))).collect();
        for _ in 0..8 {
            let n = q.num_edges() as f64;
            let s = r.random_range(0.0..n - 0.2);
            let t = r.random_range(s + 0.1..n);
            let sub = Subcurve::new(
                0,
                CurveParam::from_position(s, q.num_edges()),
                CurveParam::from_position(t, q.num_edges()),
            )
            .unwrap();
            let target = only_p(engine.coverage(&sub));
            let used = greedy_containment(&target, &covs, 16);
            assert!(used.is_some(), "subcurve [{s}, {t}] not covered by 16 candidates");
            worst = worst.max(used.unwrap());
        }
    }
    assert!(worst <= 16);
}
