use tailsum::domains::TestDistribution;
use tailsum::limit::{a_cov_closed, sigma_cov, DomainKind};
use tailsum::montecarlo::{
    adjudicate_covariance, evaluate_oracle, quadrature_oracle_a, run_experiment,
    run_experiment_with_threads, Centering, ExperimentConfig, QuadratureOracleConfig, Verdict,
};

#[test]
fn oracle_converges_under_grid_doubling() {
    let g = QuadratureOracleConfig { grid: 512, truncation: 60.0 };
    let g2 = QuadratureOracleConfig { grid: 1024, truncation: 60.0 };
    for r in 1..=7 {
        for rho in 1..=(8 - r) {
            let a = quadrature_oracle_a(r, rho, &g).unwrap();
            let b = quadrature_oracle_a(r, rho, &g2).unwrap();
            assert!((a - b).abs() < 1e-4, "({r},{rho}): {a} vs {b}");
        }
    }
}

#[test]
fn three_routes_agree_up_to_order_six() {
    let cfg = QuadratureOracleConfig::default();
    for r in 1..=6 {
        for rho in r..=6 {
            let closed = a_cov_closed(r, rho).unwrap() as f64;
            let quad = quadrature_oracle_a(r, rho, &cfg).unwrap();
            assert!((quad - closed).abs() <= 1e-3, "({r},{rho}) quad {quad}");
            assert_eq!(sigma_cov(r, rho, &DomainKind::Frechet { gamma: 1.0 }).unwrap(), closed);
        }
    }
}

#[test]
fn oracle_diagnostics_report_coarse_grid() {
    let ev = evaluate_oracle(2, 3, &QuadratureOracleConfig::default()).unwrap();
    assert_eq!(ev.closed_form, 10);
    assert_eq!(ev.coarse_grid, 512);
    assert!((ev.value - ev.coarse_value).abs() < 1e-4);
}

#[test]
fn adjudication_flags_published_errata() {
    let verdicts = adjudicate_covariance(4, &QuadratureOracleConfig { grid: 256, truncation: 60.0 }).unwrap();
    assert_eq!(verdicts.len(), 10);
    for v in &verdicts {
        let expected = match (v.r, v.rho) {
            (2, 3) | (2, 4) | (3, 4) => Verdict::PublishedTableDiscrepancy,
            _ => Verdict::Consistent,
        };
        assert_eq!(v.verdict, expected, "({},{})", v.r, v.rho);
    }
}

#[test]
fn clt_statistic_is_gaussian_shaped() {
    let cfg = ExperimentConfig {
        dist: TestDistribution::Pareto { gamma: 1.0 },
        n: 20_000,
        k: 400,
        l: 0,
        pmax: 1,
        reps: 5000,
        seed: 11,
        centering: Centering::FixedThreshold,
    };
    let report = run_experiment(&cfg).unwrap();
    let kurt = report.orders[0].kurtosis;
    assert!((kurt - 3.0).abs() <= 0.3, "kurtosis {kurt}");
}

#[test]
fn weibull_domain_variance() {
    let cfg = ExperimentConfig {
        dist: TestDistribution::PowerEndpoint { gamma: 1.0, x0: 2.0 },
        n: 100_000,
        k: 1000,
        l: 0,
        pmax: 1,
        reps: 2000,
        seed: 5,
        centering: Centering::FixedThreshold,
    };
    let report = run_experiment(&cfg).unwrap();
    let var = report.orders[0].variance;
    assert!((var - 4.0 / 3.0).abs() <= 0.15 * 4.0 / 3.0, "variance {var}");
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    let cfg = ExperimentConfig {
        dist: TestDistribution::StretchedTail,
        n: 5000,
        k: 100,
        l: 2,
        pmax: 3,
        reps: 64,
        seed: 1234,
        centering: Centering::RandomThreshold,
    };
    let a = run_experiment_with_threads(&cfg, 1).unwrap();
    let b = run_experiment_with_threads(&cfg, 3).unwrap();
    let c = run_experiment_with_threads(&cfg, 8).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);
}
