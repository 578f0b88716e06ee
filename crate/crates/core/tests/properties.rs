use nabfs_core::inference::{holm_adjust, wilcoxon_one_sided, wilcoxon_with_null, WsrNull};
use nabfs_core::learners::{fit, fit_importances, FeaturesPerSplit, LearnerSpec, PenalizedLogistic, Standardizer};
use nabfs_core::model::{ImportanceMatrix, NabfsConfig};
use nabfs_core::report::{FeatureReport, SelectionMethod, SelectionReport};
use nabfs_core::TaskKind;
use proptest::prelude::*;

/// Distinct nonzero magnitudes with random signs.
fn no_tie_diffs(len: usize) -> impl Strategy<Value = Vec<f64>> {
    (proptest::collection::btree_set(1u32..100_000, len), proptest::collection::vec(any::<bool>(), len)).prop_map(
        |(mags, signs)| mags.into_iter().zip(signs).map(|(m, s)| if s { m as f64 / 100.0 } else { -(m as f64) / 100.0 }).collect(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn negating_differences_reflects_t_plus(d in (1usize..30).prop_flat_map(no_tie_diffs)) {
        let m = d.len() as f64;
        let neg: Vec<f64> = d.iter().map(|x| -x).collect();
        let a = wilcoxon_one_sided(&d, 16).t_plus;
        let b = wilcoxon_one_sided(&neg, 16).t_plus;
        prop_assert_eq!(a + b, m * (m + 1.0) / 2.0);
    }

    #[test]
    fn t_plus_within_bounds(d in proptest::collection::vec(-5i32..5, 0..40)) {
        let d: Vec<f64> = d.into_iter().map(f64::from).collect();
        let r = wilcoxon_one_sided(&d, 16);
        let m = r.effective_pairs as f64;
        prop_assert!(r.t_plus >= 0.0 && r.t_plus <= m * (m + 1.0) / 2.0);
        prop_assert!((0.0..=1.0).contains(&r.p_value));
    }

    #[test]
    fn exact_and_normal_nulls_agree_at_fifteen_pairs(d in no_tie_diffs(15)) {
        let exact = wilcoxon_with_null(&d, WsrNull::Exact).p_value;
        let approx = wilcoxon_with_null(&d, WsrNull::Normal).p_value;
        prop_assert!((exact - approx).abs() <= 0.02, "exact {} approx {}", exact, approx);
    }

    #[test]
    fn holm_adjusted_dominates_raw(raw in proptest::collection::vec(0.0f64..=1.0, 1..50)) {
        let adj = holm_adjust(&raw).unwrap();
        for (r, a) in raw.iter().zip(&adj.adjusted) {
            prop_assert!(a >= r && *a <= 1.0);
        }
        // Monotone along the sorted order.
        for w in adj.order.windows(2) {
            prop_assert!(adj.adjusted[w[0]] <= adj.adjusted[w[1]]);
        }
    }

    #[test]
    fn lowering_a_p_value_never_shrinks_rejections(
        raw in proptest::collection::vec(0.0f64..=0.2, 2..30),
        pick in any::<prop::sample::Index>(),
        factor in 0.0f64..1.0,
        alpha in 0.001f64..0.2,
    ) {
        let before = holm_adjust(&raw).unwrap().rejections(alpha);
        let mut lowered = raw.clone();
        let i = pick.index(raw.len());
        lowered[i] *= factor;
        let after = holm_adjust(&lowered).unwrap().rejections(alpha);
        for (b, a) in before.iter().zip(&after) {
            prop_assert!(!b || *a);
        }
    }

    #[test]
    fn report_round_trips_through_json(
        values in proptest::collection::vec((0.0f64..1.0, -1.0f64..1.0, 0.0f64..1.0, any::<bool>()), 1..8),
        seed in any::<u64>(),
        naive in any::<bool>(),
    ) {
        let features = values
            .iter()
            .enumerate()
            .map(|(j, &(imp, margin, p, sel))| FeatureReport {
                name: format!("f{j}"),
                mean_importance: imp,
                mean_noise_margin: margin,
                t_plus: (!naive).then_some(imp * 100.0),
                effective_pairs: (!naive).then_some(j),
                p_value: (!naive).then_some(p),
                adjusted_p_value: (!naive).then_some((p * 2.0).min(1.0)),
                wsr_method: None,
                selected: sel,
            })
            .collect::<Vec<_>>();
        let report = SelectionReport {
            method: if naive { SelectionMethod::Naive } else { SelectionMethod::Nabfs },
            task: TaskKind::Regression,
            learner: "forest".into(),
            seed,
            n_rows: 10,
            n_features: features.len(),
            config: NabfsConfig { seed, learner: LearnerSpec::default_forest(), ..Default::default() },
            noise_names: vec!["noise_1".into()],
            selected: features.iter().filter(|f| f.selected).map(|f| f.name.clone()).collect(),
            features,
            elapsed_ms: Some(12),
        };
        let text = serde_json::to_string_pretty(&report).unwrap();
        let back: SelectionReport = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, report);
    }
}

fn gaussian_columns(n: usize, k: usize, seed: u64) -> Vec<Vec<f64>> {
    nabfs_core::noise::augment(
        &nabfs_core::Dataset::new(vec!["z".into()], vec![(0..n).map(|i| i as f64).collect()], (0..n).map(|i| (i % 2) as f64).collect(), TaskKind::BinaryClassification).unwrap(),
        k,
        0.0,
        1.0,
        seed,
    )
    .unwrap()
    .noise_columns()
    .to_vec()
}

fn labels_from(cols: &[Vec<f64>], weights: &[f64]) -> Vec<f64> {
    (0..cols[0].len())
        .map(|i| {
            let eta: f64 = cols.iter().zip(weights).map(|(c, w)| c[i] * w).sum();
            // Deterministic label noise from a second linear form.
            let jitter = (cols[0][i] * 7.3 + cols[cols.len() - 1][i] * 3.1).sin();
            if eta + jitter > 0.0 { 1.0 } else { 0.0 }
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn logistic_gradient_matches_finite_differences(seed in 0u64..1000, lambda in 0.0f64..3.0) {
        let cols = gaussian_columns(60, 3, seed);
        let y = labels_from(&cols, &[1.0, -0.5, 0.25]);
        prop_assume!(y.contains(&1.0) && y.contains(&0.0));
        let z = Standardizer::fit(&cols).transform_active(&cols);
        let problem = PenalizedLogistic::new(&z, &y, lambda);
        // Independent objective for the finite differences.
        let objective = |b: &[f64]| -> f64 {
            let n = y.len() as f64;
            let mut total = 0.0;
            for i in 0..y.len() {
                let eta = b[0] + (0..z.len()).map(|j| b[j + 1] * z[j][i]).sum::<f64>();
                let p = 1.0 / (1.0 + (-eta).exp());
                total -= y[i] * p.ln() + (1.0 - y[i]) * (1.0 - p).ln();
            }
            (total + 0.5 * lambda * b[1..].iter().map(|v| v * v).sum::<f64>()) / n
        };
        let beta = [0.3, -0.7, 0.2, 1.1];
        let g = problem.gradient(&beta);
        for k in 0..beta.len() {
            let h = 1e-5;
            let mut up = beta;
            let mut dn = beta;
            up[k] += h;
            dn[k] -= h;
            let fd = (objective(&up) - objective(&dn)) / (2.0 * h);
            prop_assert!((fd - g[k]).abs() <= 1e-4 * fd.abs().max(1e-3), "coord {}: fd {} analytic {}", k, fd, g[k]);
        }
        prop_assert!((problem.objective(&beta) - objective(&beta)).abs() < 1e-12);

        // At the reported optimum both gradients vanish.
        let spec = LearnerSpec::Logistic { l2_penalty: lambda.max(0.1), max_iter: 100, tol: 1e-8 };
        if let nabfs_core::learners::FittedModel::Logistic(m) = fit(&cols, &y, TaskKind::BinaryClassification, &spec, 0).unwrap() {
            prop_assert!(m.gradient_norm <= 1e-8);
            let opt = PenalizedLogistic::new(&z, &y, lambda.max(0.1));
            let mut b = vec![m.intercept];
            b.extend(m.coefficients.iter());
            let g = opt.gradient(&b);
            prop_assert!(g.iter().all(|v| v.abs() <= 1e-8));
        } else {
            unreachable!()
        }
    }

    #[test]
    fn forest_importance_is_permutation_equivariant(seed in 0u64..500, rot in 1usize..4) {
        let cols = gaussian_columns(80, 4, seed);
        let y = labels_from(&cols, &[1.0, 0.5, -1.0, 0.0]);
        prop_assume!(y.contains(&1.0) && y.contains(&0.0));
        let spec = LearnerSpec::Forest { n_trees: 15, max_depth: 4, min_leaf: 3, features_per_split: FeaturesPerSplit::Fraction(1.0) };
        let base = fit_importances(&cols, &y, TaskKind::BinaryClassification, &spec, seed).unwrap().into_values();
        let perm: Vec<usize> = (0..4).map(|j| (j + rot) % 4).collect();
        let permuted: Vec<Vec<f64>> = perm.iter().map(|&j| cols[j].clone()).collect();
        let moved = fit_importances(&permuted, &y, TaskKind::BinaryClassification, &spec, seed).unwrap().into_values();
        for (pos, &j) in perm.iter().enumerate() {
            prop_assert!((moved[pos] - base[j]).abs() < 1e-12, "{:?} vs {:?}", moved, base);
        }
    }

    #[test]
    fn fitting_is_deterministic(seed in 0u64..500) {
        let cols = gaussian_columns(50, 3, seed);
        let y: Vec<f64> = cols[0].iter().zip(&cols[1]).map(|(a, b)| a - b).collect();
        for spec in [LearnerSpec::default_linear(), LearnerSpec::Forest { n_trees: 5, max_depth: 3, min_leaf: 2, features_per_split: FeaturesPerSplit::Sqrt }] {
            let a = fit(&cols, &y, TaskKind::Regression, &spec, seed).unwrap();
            let b = fit(&cols, &y, TaskKind::Regression, &spec, seed).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}

#[test]
fn importance_matrix_rows_match_replicates() {
    let m = ImportanceMatrix::from_rows(vec![vec![0.1]; 5], vec![vec![0.2, 0.3]; 5]).unwrap();
    assert_eq!(m.replicate_count(), 5);
}
