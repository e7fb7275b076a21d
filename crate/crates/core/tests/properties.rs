use ecc_gof::distributions::{apply_transform, sample, DistributionSpec, TransformSpec};
use ecc_gof::ecc::{euler_curve, StepCurve};
use ecc_gof::experiments::{null_statistic_distribution, power_vs_n, spearman, Method, StudyConfig};
use ecc_gof::geometry::{alpha_filtration, cech_filtration_bruteforce, PointCloud, EPS_GEOM};
use ecc_gof::gof::{classical, ks_multivariate, one_sample_test, prepare_reference, two_sample_test};
use proptest::prelude::*;

fn spec(s: &str) -> DistributionSpec {
    s.parse().unwrap()
}

fn uniform_cdf(t: f64) -> f64 {
    t.clamp(0.0, 1.0)
}

fn close(a: &StepCurve, b: &StepCurve) -> bool {
    a.values() == b.values()
        && a.breakpoints().len() == b.breakpoints().len()
        && a.breakpoints().iter().zip(b.breakpoints()).all(|(x, y)| (x - y).abs() <= EPS_GEOM)
}

#[test]
fn univariate_samplers_match_their_cdfs() {
    let specs = [
        "normal(0,1)",
        "normal(-2,0.5)",
        "uniform(-1,3)",
        "beta(3,3)",
        "beta(0.5,2)",
        "cosine",
        "t(3)",
        "t(5)",
        "cauchy(1,2)",
        "laplace(0,1)",
        "logistic(0,1)",
        "mix(0.7:normal(0,1),0.3:normal(0,2))",
        "piecewise([0,1,2,3],[0.25,0.5,0.25])",
        "piecewise([0,2,3],[0.25,0.5])",
    ];
    for (i, s) in specs.iter().enumerate() {
        let d = spec(s);
        let x = sample(&d, 100_000, 900 + i as u64).unwrap();
        let r = classical::ks_one_sample_1d(&x, &|t| d.cdf(t).unwrap(), 0.001).unwrap();
        assert!(!r.reject, "{s}: D = {}, p = {}", r.statistic, r.p_value);
    }
}

#[test]
fn multivariate_marginals_match() {
    for (s, marginal) in [("iid(t(5),2)", "t(5)"), ("mg(3,0.5)", "normal(0,1)"), ("prod(beta(2,5),cauchy(0,1))", "")] {
        let d = spec(s);
        let x = sample(&d, 100_000, 77).unwrap();
        let margins = if marginal.is_empty() { d.marginals().unwrap() } else { vec![spec(marginal); d.dim()] };
        for (k, m) in margins.iter().enumerate() {
            let col = PointCloud::from_values(x.column(k)).unwrap();
            let r = classical::ks_one_sample_1d(&col, &|t| m.cdf(t).unwrap(), 0.001).unwrap();
            assert!(!r.reject, "{s} axis {k}: p = {}", r.p_value);
        }
    }
}

#[test]
fn copula_transform_gives_uniform_marginals() {
    let d = spec("prod(beta(2,5),cauchy(0,1),laplace(1,2))");
    let x = sample(&d, 100_000, 5).unwrap();
    let u = apply_transform(&TransformSpec::CopulaPit { marginals: d.marginals().unwrap() }, &x).unwrap();
    for k in 0..3 {
        let col = PointCloud::from_values(u.column(k)).unwrap();
        let r = classical::ks_one_sample_1d(&col, &uniform_cdf, 0.001).unwrap();
        assert!(!r.reject, "axis {k}: p = {}", r.p_value);
    }
}

#[test]
fn isometries_fool_the_curve_but_not_orthant_ks() {
    let null = spec("prod(beta(2,5),uniform(0,1))");
    let x = sample(&null, 100, 3).unwrap();
    let rotated = PointCloud::new(x.iter().map(|p| vec![-p[1], p[0]]).collect()).unwrap();
    assert_eq!(rotated.len(), 100);

    let model = prepare_reference(&null, 100, 200, 200, 0.05, 8).unwrap();
    let a = one_sample_test(&x, &model, 0.05).unwrap();
    let b = one_sample_test(&rotated, &model, 0.05).unwrap();
    assert!((a.statistic - b.statistic).abs() < 1e-9);
    assert_eq!(a.reject, b.reject);

    let ks = ks_multivariate(&rotated, &null, 200, 0.05, 8).unwrap();
    assert!(ks.reject);
    assert_eq!(ks.p_value, 0.0);
}

#[test]
fn one_sample_p_values_are_uniform_under_the_null() {
    let null = spec("normal(0,1)");
    let model = prepare_reference(&null, 50, 200, 1000, 0.05, 1).unwrap();
    let p: Vec<f64> =
        (0..300).map(|i| one_sample_test(&sample(&null, 50, 10_000 + i).unwrap(), &model, 0.05).unwrap().p_value).collect();
    let r = classical::ks_one_sample_1d(&PointCloud::from_values(p).unwrap(), &uniform_cdf, 0.001).unwrap();
    assert!(!r.reject, "D = {}", r.statistic);
}

#[test]
fn two_sample_p_values_are_uniform_under_the_null() {
    let null = spec("laplace(0,1)");
    let p: Vec<f64> = (0..150)
        .map(|i| {
            let x = sample(&null, 40, 2 * i).unwrap();
            let y = sample(&null, 60, 2 * i + 1).unwrap();
            two_sample_test(&x, &y, 400, 0.05, i).unwrap().p_value
        })
        .collect();
    let r = classical::ks_one_sample_1d(&PointCloud::from_values(p).unwrap(), &uniform_cdf, 0.001).unwrap();
    assert!(!r.reject, "D = {}", r.statistic);
}

#[test]
fn null_quantile_settles_with_n() {
    let d = null_statistic_distribution(&spec("normal(0,1)"), &[100, 250], 500, 4, None).unwrap();
    assert!(d.iter().all(|nd| nd.stats.iter().all(|&s| s >= 0.0)));
    let (q100, q250) = (d[0].quantile(0.95), d[1].quantile(0.95));
    assert!((q100 - q250).abs() / q250 < 0.25, "{q100} vs {q250}");
    assert_eq!(d, null_statistic_distribution(&spec("normal(0,1)"), &[100, 250], 500, 4, None).unwrap());
}

#[test]
fn power_grows_with_sample_size() {
    let ns = [50, 100, 250, 500];
    let cells = power_vs_n(&spec("normal(0,1)"), &spec("laplace(0,1)"), &ns, 200, 0.05, &[Method::Ks], 6, &StudyConfig::default())
        .unwrap();
    let p: Vec<f64> = cells.iter().map(|c| c.power).collect();
    let n: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    assert!(spearman(&n, &p) > 0.0, "{p:?}");
    assert!(power_vs_n(&spec("normal(0,1)"), &spec("t(5)"), &[100, 50], 10, 0.05, &[Method::Ks], 6, &StudyConfig::default())
        .is_err());
}

fn cloud_strategy() -> impl Strategy<Value = PointCloud> {
    (2usize..=3, 4usize..=7)
        .prop_flat_map(|(d, n)| prop::collection::vec(prop::collection::vec(-1.0f64..1.0, d), n))
        .prop_map(|pts| PointCloud::new(pts).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nerve_property(cloud in cloud_strategy()) {
        let a = euler_curve(&alpha_filtration(&cloud).unwrap());
        let c = euler_curve(&cech_filtration_bruteforce(&cloud).unwrap());
        prop_assert!(close(&a, &c), "alpha {:?}\ncech {:?}", a, c);
    }

    #[test]
    fn alpha_curve_is_rigid_motion_invariant(cloud in cloud_strategy(), shift in -5.0f64..5.0) {
        let moved = PointCloud::new(cloud.iter().map(|p| {
            let mut q: Vec<f64> = p.iter().map(|v| v + shift).collect();
            q.swap(0, 1);
            q
        }).collect()).unwrap();
        let a = euler_curve(&alpha_filtration(&cloud).unwrap());
        let b = euler_curve(&alpha_filtration(&moved).unwrap());
        prop_assert!(close(&a, &b));
    }

    #[test]
    fn grammar_round_trips(mu in -10.0f64..10.0, sigma in 0.01f64..10.0, nu in 1.0f64..30.0, w in 0.05f64..0.95) {
        let d = DistributionSpec::Mixture(vec![
            (w, DistributionSpec::Normal { mu, sigma }),
            (1.0 - w, DistributionSpec::StudentT { nu }),
        ]);
        let back: DistributionSpec = d.to_string().parse().unwrap();
        prop_assert_eq!(back, d);
    }
}
