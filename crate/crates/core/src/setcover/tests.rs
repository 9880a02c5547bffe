use proptest::prelude::*;
use rand::Rng;

use super::*;
use crate::testutil::{brute_force_min_cover, curve, rng};

fn unit() -> PolygonalCurve<f64> {
    curve(&[[0.0, 0.0], [1.0, 0.0]])
}

fn cov(c: &PolygonalCurve<f64>, curve_id: usize, ranges: &[(f64, f64)]) -> CoverageSet<f64> {
    let n = c.num_edges();
    CoverageSet::from_spans(
        ranges
            .iter()
            .map(|&(a, b)| {
                Span::new(
                    curve_id,
                    c,
                    CurveParam::from_fraction(a, n),
                    CurveParam::from_fraction(b, n),
                )
            })
            .collect(),
    )
}

/// Rescans every candidate each round.
fn naive_greedy(covs: &[CoverageSet<f64>], ground: &GroundSet<f64>) -> Vec<usize> {
    let mut acc = CoverageSet::new();
    let mut out = Vec::new();
    while ground.as_coverage().measure_minus(&acc) > LENGTH_SLACK {
        let mut best = (0.0, usize::MAX);
        for (i, c) in covs.iter().enumerate() {
            let g = marginal_gain(c, &acc);
            if g > best.0 {
                best = (g, i);
            }
        }
        if best.1 == usize::MAX || best.0 < LENGTH_SLACK {
            break;
        }
        acc = acc.union(&covs[best.1]);
        out.push(best.1);
    }
    out
}

#[test]
fn single_full_candidate() {
    let c = unit();
    let ground = GroundSet::new(&[c.clone()]);
    let covs = vec![cov(&c, 0, &[(0.0, 1.0)])];
    let sol = greedy_cover(&covs, &ground, &StopRule::full(), GainMeasure::ArcLength).unwrap();
    assert_eq!(sol.chosen, vec![0]);
    assert_eq!(sol.final_fraction(), 1.0);
    assert!(sol.residual.is_empty());
    assert_eq!(independent_set_lower_bound(&covs, &ground), 1);
}

#[test]
fn hand_simulated_greedy() {
    let c = unit();
    let ground = GroundSet::new(&[c.clone()]);
    let covs = vec![
        cov(&c, 0, &[(0.0, 0.6)]),
        cov(&c, 0, &[(0.4, 1.0)]),
        cov(&c, 0, &[(0.0, 0.5)]),
    ];
    let sol = greedy_cover(&covs, &ground, &StopRule::full(), GainMeasure::ArcLength).unwrap();
    assert_eq!(sol.chosen, vec![0, 1]);
    assert!((sol.gains[0] - 0.6).abs() < 1e-12 && (sol.gains[1] - 0.4).abs() < 1e-12);
    assert!((marginal_gain(&covs[0], &covs[1]) - 0.4).abs() < 1e-12);
    assert_eq!(marginal_gain(&covs[2], &covs[0]), 0.0);
}

#[test]
fn ties_go_to_smaller_id() {
    let c = unit();
    let ground = GroundSet::new(&[c.clone()]);
    let covs = vec![cov(&c, 0, &[(0.5, 1.0)]), cov(&c, 0, &[(0.0, 0.5)])];
    let sol = greedy_cover(&covs, &ground, &StopRule::full(), GainMeasure::ArcLength).unwrap();
    assert_eq!(sol.chosen, vec![0, 1]);
}

#[test]
fn uncoverable_ground_is_infeasible() {
    let c = unit();
    let ground = GroundSet::new(&[c.clone()]);
    let err = greedy_cover::<f64>(&[], &ground, &StopRule::full(), GainMeasure::ArcLength).unwrap_err();
    assert!(matches!(err, Error::Infeasible { curve: 0, .. }));
    let covs = vec![cov(&c, 0, &[(0.0, 0.7)])];
    let err = greedy_cover(&covs, &ground, &StopRule::full(), GainMeasure::ArcLength).unwrap_err();
    assert!(err.to_string().contains("curve 0"));
    // partial rules do not require coverability
    let stop = StopRule {
        fraction: Some(0.5),
        max_rounds: None,
    };
    let sol = greedy_cover(&covs, &ground, &stop, GainMeasure::ArcLength).unwrap();
    assert_eq!(sol.chosen, vec![0]);
}

#[test]
fn stop_rules() {
    let c = unit();
    let ground = GroundSet::new(&[c.clone()]);
    let covs: Vec<_> = (0..10)
        .map(|i| cov(&c, 0, &[(i as f64 / 10.0, (i + 1) as f64 / 10.0)]))
        .collect();
    let frac = StopRule {
        fraction: Some(0.45),
        max_rounds: None,
    };
    assert_eq!(
        greedy_cover(&covs, &ground, &frac, GainMeasure::ArcLength)
            .unwrap()
            .chosen
            .len(),
        5
    );
    let rounds = StopRule {
        fraction: None,
        max_rounds: Some(3),
    };
    assert_eq!(
        greedy_cover(&covs, &ground, &rounds, GainMeasure::ArcLength)
            .unwrap()
            .chosen
            .len(),
        3
    );
    let both = StopRule {
        fraction: Some(0.9),
        max_rounds: Some(2),
    };
    assert_eq!(
        greedy_cover(&covs, &ground, &both, GainMeasure::ArcLength)
            .unwrap()
            .chosen
            .len(),
        2
    );
}

#[test]
fn disjoint_curves_need_two() {
    let a = unit();
    let b = curve(&[[10.0, 0.0], [11.0, 0.0]]);
    let ground = GroundSet::new(&[a.clone(), b.clone()]);
    let covs = vec![cov(&a, 0, &[(0.0, 1.0)]), cov(&b, 1, &[(0.0, 1.0)])];
    assert!(independent_set_lower_bound(&covs, &ground) >= 2);
}

fn random_instance(seed: u64) -> (Vec<PolygonalCurve<f64>>, Vec<CoverageSet<f64>>) {
    let mut r = rng(seed);
    let curves = vec![unit(), curve(&[[0.0, 1.0], [2.0, 1.0], [2.0, 3.0]])];
    let mut covs = Vec::new();
    for _ in 0..r.random_range(6..=20) {
        let mut spans = Vec::new();
        for _ in 0..r.random_range(1..=2) {
            let ci = r.random_range(0..2);
            let a: f64 = r.random_range(0.0..0.9);
            let b = (a + r.random_range(0.05..0.5)).min(1.0);
            spans.extend(cov(&curves[ci], ci, &[(a, b)]).spans().iter().copied());
        }
        covs.push(CoverageSet::from_spans(spans));
    }
    // make the instance feasible
    covs.push(cov(&curves[0], 0, &[(0.0, 0.5)]));
    covs.push(cov(&curves[0], 0, &[(0.5, 1.0)]));
    covs.push(cov(&curves[1], 1, &[(0.0, 1.0)]));
    (curves, covs)
}

fn piece_masks(
    curves: &[PolygonalCurve<f64>],
    covs: &[CoverageSet<f64>],
    ground: &GroundSet<f64>,
) -> (Vec<u128>, u128, usize) {
    let pieces = arrangement_pieces(covs, ground);
    assert!(pieces.len() <= 128);
    let masks = covs
        .iter()
        .map(|c| {
            pieces.iter().enumerate().fold(0u128, |m, (k, p)| {
                let mid = CurveParam::from_position((p.1.position() + p.2.position()) / 2.0, curves[p.0].num_edges());
                if c.contains(p.0, mid) {
                    m | (1 << k)
                } else {
                    m
                }
            })
        })
        .collect();
    let full = if pieces.len() == 128 {
        u128::MAX
    } else {
        (1u128 << pieces.len()) - 1
    };
    (masks, full, pieces.len())
}

#[test]
fn greedy_within_log_factor_of_brute_force() {
    for seed in 0..30 {
        let (curves, covs) = random_instance(seed);
        let ground = GroundSet::new(&curves);
        let (masks, full, n) = piece_masks(&curves, &covs, &ground);
        let opt = brute_force_min_cover(&masks, full).unwrap();
        for measure in [GainMeasure::ArcLength, GainMeasure::ArrangementPieces] {
            let sol = greedy_cover(&covs, &ground, &StopRule::full(), measure).unwrap();
            assert!(sol.residual.union_length() <= 1e-9);
            assert!(sol.chosen.len() as f64 <= opt as f64 * ((n as f64).ln() + 1.0));
        }
        let lb = independent_set_lower_bound(&covs, &ground);
        assert!(lb >= 1 && lb <= opt, "seed {seed}: lb {lb} opt {opt}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn lazy_greedy_matches_full_rescan(seed in 0u64..1_000_000) {
        let (curves, covs) = random_instance(seed);
        let ground = GroundSet::new(&curves);
        let sol = greedy_cover(&covs, &ground, &StopRule::full(), GainMeasure::ArcLength).unwrap();
        prop_assert_eq!(&sol.chosen, &naive_greedy(&covs, &ground));
        for w in sol.gains.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12);
        }
        for w in sol.coverage_fraction.windows(2) {
            prop_assert!(w[1] >= w[0]);
        }
        prop_assert!((sol.final_fraction() - 1.0).abs() < 1e-9);
    }
}
