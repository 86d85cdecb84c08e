use nalgebra::DMatrix;
use tailsum::limit::{
    a_cov_closed, a_cov_recursive, c1, e_fn, sigma2, sigma_cov, CovarianceModel, DomainKind,
};

const DOMAINS: [DomainKind; 6] = [
    DomainKind::Frechet { gamma: 1.0 },
    DomainKind::Gumbel,
    DomainKind::Weibull { gamma: 0.5 },
    DomainKind::Weibull { gamma: 1.0 },
    DomainKind::Weibull { gamma: 2.0 },
    DomainKind::Weibull { gamma: 7.5 },
];

/// Exponential moments: for iid unit exponentials E, with W_r = E^r / r!,
/// `1 + Cov(W_r, W_rho) = (r + rho)! / (r! rho!)`.
fn exponential_moment_factor(r: usize, rho: usize) -> f64 {
    let fact = |m: usize| (1..=m).map(|i| i as f64).product::<f64>();
    // E[E^m] = m!
    let cross = fact(r + rho) / (fact(r) * fact(rho));
    let cov = cross - 1.0;
    1.0 + cov
}

#[test]
fn recursion_reproduces_binomial_factor() {
    for r in 1..=8 {
        for rho in 1..=8 {
            let rec = a_cov_recursive(r, rho).unwrap();
            assert_eq!(rec, a_cov_closed(r, rho).unwrap(), "({r},{rho})");
            assert_eq!(
                sigma_cov(r, rho, &DomainKind::Frechet { gamma: 3.0 }).unwrap(),
                rec as f64
            );
            let em = exponential_moment_factor(r, rho);
            assert!((em - rec as f64).abs() <= 1e-9 * em);
        }
    }
}

#[test]
fn frechet_variance_is_central_binomial() {
    let mut central = 1.0f64;
    for r in 1..=10 {
        // binomial(2r, r) = binomial(2r-2, r-1) * (2r)(2r-1) / r^2
        central = central * (2 * r) as f64 * (2 * r - 1) as f64 / (r * r) as f64;
        assert_eq!(sigma2(r, &DomainKind::Frechet { gamma: 0.3 }).unwrap(), central.round());
    }
}

#[test]
fn reduced_matrices_are_positive_semidefinite() {
    for dom in DOMAINS {
        for pmax in 1..=6 {
            let model = CovarianceModel::build(dom, pmax).unwrap();
            let red = model.reduced();
            let m = DMatrix::from_fn(pmax, pmax, |i, j| red[i][j]);
            let min = m.symmetric_eigen().eigenvalues.min();
            assert!(min >= -1e-9, "{dom:?} pmax={pmax}: {min}");
            let full = DMatrix::from_fn(pmax, pmax, |i, j| model.sigma[i][j]);
            assert!(full.symmetric_eigen().eigenvalues.min() >= -1e-9);
        }
    }
}

#[test]
fn weibull_constants_approach_the_infinite_gamma_limit() {
    let far = DomainKind::Weibull { gamma: 1e6 };
    for r in 1..=8 {
        assert!((c1(r, &far).unwrap() - 1.0).abs() < 1e-4);
        assert!((e_fn(r, &far) - 1.0).abs() < 1e-4);
    }
}

#[test]
fn covariance_is_symmetric() {
    for dom in DOMAINS {
        for r in 1..=6 {
            for rho in 1..=6 {
                assert_eq!(
                    sigma_cov(r, rho, &dom).unwrap(),
                    sigma_cov(rho, r, &dom).unwrap()
                );
            }
        }
    }
}
