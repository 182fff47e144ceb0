use asz::pointcount::*;
use asz::DEFAULT_CAP;

#[test]
fn exhaustive_histograms_equal_model() {
    for (p, n, r, d) in [(2, 1, 1, 2), (2, 1, 1, 3), (2, 1, 2, 4), (3, 1, 1, 3), (2, 1, 2, 5), (3, 1, 1, 5)] {
        let params = PointParams::new(p, n, d, r).unwrap();
        assert!(params.model_applicable());
        let hist = exact_distribution(params, DEFAULT_CAP).unwrap();
        assert_eq!(hist.total, params.family_size().unwrap());
        assert_eq!(hist.counts.values().sum::<u64>(), hist.total);
        let model = model_distribution(p, n, r, DEFAULT_CAP).unwrap();
        assert!(histogram_matches_model(&hist, &model), "p={p} n={n} r={r} d={d}: {:?}", hist.counts);
    }
}

#[test]
fn below_the_range_the_model_can_fail() {
    // d = 1 < q = 2: every x + c has exactly one zero, not Binomial(2, 1/2)
    let params = PointParams::new(2, 1, 1, 1).unwrap();
    assert!(!params.model_applicable());
    let hist = exact_distribution(params, DEFAULT_CAP).unwrap();
    let model = model_distribution(2, 1, 1, DEFAULT_CAP).unwrap();
    assert_eq!(hist.counts.len(), 1);
    assert!(!histogram_matches_model(&hist, &model));
}

#[test]
fn weil_bound_holds() {
    for (p, n, d, r) in [(3, 1, 4, 2), (3, 1, 5, 3), (2, 1, 5, 4), (5, 1, 3, 2), (3, 2, 4, 1)] {
        let hist = exact_distribution(PointParams::new(p, n, d, r).unwrap(), DEFAULT_CAP).unwrap();
        assert_eq!(hist.weil_violations, Some(0), "p={p} n={n} d={d} r={r}");
    }
}

#[test]
fn sampled_matches_exhaustive_per_bin() {
    let params = PointParams::new(3, 1, 7, 2).unwrap();
    let exact = exact_distribution(params, DEFAULT_CAP).unwrap();
    let sampled = sampled_distribution(params, 20_000, 5, DEFAULT_CAP).unwrap();
    assert_eq!(sampled.total, 20_000);
    for (&v, &c) in &exact.counts {
        let prob = c as f64 / exact.total as f64;
        let expect = prob * sampled.total as f64;
        let sigma = (sampled.total as f64 * prob * (1.0 - prob)).sqrt();
        assert!((sampled.frequency(v) as f64 - expect).abs() <= 5.0 * sigma.max(1.0), "value {v}");
    }
    assert!(sampled.counts.keys().all(|v| exact.counts.contains_key(v)));
}

#[test]
fn poisson_regime_small() {
    let rep = convergence_diagnostics(Regime::Poisson, PointParams::new(31, 1, 31, 1).unwrap(), 4000, 1, DEFAULT_CAP)
        .unwrap();
    assert!(matches!(rep.histogram.mode, HistMode::Sampled { seed: 1 }));
    assert!(rep.model_applicable);
    assert!(rep.chi_square.bins.iter().all(|b| b.expected >= 5.0));
    assert!(rep.chi_square.p_value > 1e-4, "{:?}", rep.chi_square);
    for m in &rep.moments {
        // the exact law is Binomial(31, 1/31), whose moments sit near the limit
        let model = m.model.unwrap();
        assert!((m.value - model).abs() <= 5.0 * m.stderr, "{m:?}");
        assert!((model - m.target).abs() < 0.25 * m.order as f64, "{m:?}");
    }
}

#[test]
fn exhaustive_supersedes_sampling() {
    let rep =
        convergence_diagnostics(Regime::GaussianFixedP, PointParams::new(2, 1, 8, 2).unwrap(), 100, 1, DEFAULT_CAP)
            .unwrap();
    assert_eq!(rep.histogram.mode, HistMode::Exhaustive);
    assert!(rep.moments.iter().all(|m| m.stderr == 0.0));
    // with the exact centering, the first moment is exactly zero under the model
    assert!(rep.moments[0].model.unwrap().abs() < 1e-12);
    assert!((rep.moments[0].value - rep.moments[0].model.unwrap()).abs() < 1e-12);
}

#[test]
fn fixed_p_skewness_decays() {
    // exact third moment of the standardized model for p = 3, r = 1 as n grows
    let mut prev = f64::INFINITY;
    for n in 2..=4 {
        let params = PointParams::new(3, n, 100, 1).unwrap();
        let st = standardization(Regime::GaussianFixedP, &params).unwrap();
        let model = model_distribution(3, n, 1, DEFAULT_CAP).unwrap();
        assert!((model.expect(|v| st.apply(v)).abs()) < 1e-9);
        assert!((model.expect(|v| st.apply(v).powi(2)) - 1.0).abs() < 1e-9);
        let skew = model.expect(|v| st.apply(v).powi(3)).abs();
        assert!(skew < prev, "n={n}: {skew}");
        prev = skew;
    }
}

#[test]
fn growing_p_variance_is_near_one() {
    for (p, n, r) in [(5, 2, 1), (7, 1, 2), (11, 1, 2)] {
        let params = PointParams::new(p, n, 1000, r).unwrap();
        let st = standardization(Regime::GaussianGrowingP, &params).unwrap();
        let model = model_distribution(p, n, r, DEFAULT_CAP).unwrap();
        let var = model.expect(|v| st.apply(v).powi(2));
        assert!((var - 1.0).abs() < 1.5 / p as f64 + 0.1, "p={p}: {var}");
    }
}
