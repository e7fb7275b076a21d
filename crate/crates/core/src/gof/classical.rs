//! Kolmogorov–Smirnov and Cramér–von Mises tests for univariate data.

use super::{check_alpha, TestReport};
use crate::error::{Error, Result};
use crate::geometry::PointCloud;

fn sorted_values(x: &PointCloud) -> Result<Vec<f64>> {
    if x.dim() != 1 {
        return Err(Error::NotUnivariate);
    }
    let mut v = x.coords().to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Evaluates `cdf` on sorted data, checking range, monotonicity and limits.
fn checked_cdf(sorted: &[f64], cdf: &dyn Fn(f64) -> f64) -> Result<Vec<f64>> {
    let lo = cdf(-f64::MAX);
    let hi = cdf(f64::MAX);
    if !(lo <= 1e-6 && hi >= 1.0 - 1e-6) {
        return Err(Error::InvalidCdf(format!("limits are {lo} and {hi}, expected 0 and 1")));
    }
    let f: Vec<f64> = sorted.iter().map(|&x| cdf(x)).collect();
    if let Some(bad) = f.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::InvalidCdf(format!("value {bad} outside [0, 1]")));
    }
    if f.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidCdf("not monotone".into()));
    }
    Ok(f)
}

/// Survival function of the Kolmogorov distribution,
/// `Q(λ) = 2 Σ_{k≥1} (-1)^(k-1) exp(-2k²λ²)`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi-transformed series, fast for small λ
        let c = std::f64::consts::PI * std::f64::consts::PI / (8.0 * lambda * lambda);
        let s: f64 = (1..=20).map(|k| (-((2 * k - 1) as f64).powi(2) * c).exp()).sum();
        return (1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s).clamp(0.0, 1.0);
    }
    let mut q = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        q += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * q).clamp(0.0, 1.0)
}

/// One-sample Kolmogorov–Smirnov test with the asymptotic p-value at
/// `λ = (√n + 0.12 + 0.11/√n) D`.
pub fn ks_one_sample_1d(x: &PointCloud, cdf: &dyn Fn(f64) -> f64, alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    let xs = sorted_values(x)?;
    let f = checked_cdf(&xs, cdf)?;
    let n = xs.len() as f64;
    let (mut d, mut at) = (0.0, xs[0]);
    for (i, (&fi, &xi)) in f.iter().zip(&xs).enumerate() {
        let gap = ((i + 1) as f64 / n - fi).max(fi - i as f64 / n);
        if gap > d {
            d = gap;
            at = xi;
        }
    }
    let en = n.sqrt();
    let p = kolmogorov_q((en + 0.12 + 0.11 / en) * d);
    let mut report = TestReport::new("ks", d, p, p <= alpha, alpha);
    report.argmax = Some(at);
    report.sizes = vec![xs.len()];
    report.approximate = true;
    Ok(report)
}

/// Two-sample Kolmogorov–Smirnov test, `λ = (e + 0.12 + 0.11/e) D` with
/// `e = √(nm/(n+m))`.
pub fn ks_two_sample_1d(x: &PointCloud, y: &PointCloud, alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    let (a, b) = (sorted_values(x)?, sorted_values(y)?);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let (mut d, mut at) = (0.0, a[0].min(b[0]));
    while i < a.len() && j < b.len() {
        let t = a[i].min(b[j]);
        while i < a.len() && a[i] == t {
            i += 1;
        }
        while j < b.len() && b[j] == t {
            j += 1;
        }
        let gap = (i as f64 / n - j as f64 / m).abs();
        if gap > d {
            d = gap;
            at = t;
        }
    }
    let en = (n * m / (n + m)).sqrt();
    let p = kolmogorov_q((en + 0.12 + 0.11 / en) * d);
    let mut report = TestReport::new("ks2", d, p, p <= alpha, alpha);
    report.argmax = Some(at);
    report.sizes = vec![a.len(), b.len()];
    report.approximate = true;
    Ok(report)
}

/// `e^{-q} K_{1/4}(q) = ∫_0^∞ exp(-q (1 + cosh t)) cosh(t/4) dt`.
fn scaled_bessel_k_quarter(q: f64) -> f64 {
    let upper = (1.0 + 60.0 / q).acosh();
    let steps = 2000;
    let h = upper / steps as f64;
    let g = |t: f64| (-q * (1.0 + t.cosh())).exp() * (t / 4.0).cosh();
    let mut s = g(0.0) + g(upper);
    for k in 1..steps {
        s += g(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Limiting distribution function of the Cramér–von Mises statistic
/// (Anderson and Darling's series).
pub fn cvm_asymptotic_cdf(w2: f64) -> f64 {
    if w2 <= 0.0 {
        return 0.0;
    }
    if w2 >= 10.0 {
        return 1.0;
    }
    let mut total = 0.0;
    let mut coef = 1.0; // Γ(j + 1/2) / (Γ(1/2) j!)
    for j in 0..60 {
        if j > 0 {
            coef *= (2 * j - 1) as f64 / (2 * j) as f64;
        }
        let a = (4 * j + 1) as f64;
        let q = a * a / (16.0 * w2);
        let term = coef * a.sqrt() * scaled_bessel_k_quarter(q);
        total += term;
        if term.abs() < 1e-16 {
            break;
        }
    }
    (total / (std::f64::consts::PI * w2.sqrt())).clamp(0.0, 1.0)
}

/// One-sample Cramér–von Mises test with an asymptotic p-value.
pub fn cvm_one_sample_1d(x: &PointCloud, cdf: &dyn Fn(f64) -> f64, alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    let xs = sorted_values(x)?;
    let f = checked_cdf(&xs, cdf)?;
    let n = xs.len() as f64;
    let w2 = 1.0 / (12.0 * n)
        + f.iter().enumerate().map(|(i, &fi)| (fi - (2 * i + 1) as f64 / (2.0 * n)).powi(2)).sum::<f64>();
    let p = 1.0 - cvm_asymptotic_cdf(w2);
    let mut report = TestReport::new("cvm", w2, p, p <= alpha, alpha);
    report.sizes = vec![xs.len()];
    report.approximate = true;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(x: f64) -> f64 {
        x.clamp(0.0, 1.0)
    }

    #[test]
    fn ks_statistic_by_enumeration() {
        let x = PointCloud::from_values(vec![0.9, 0.1, 0.5]).unwrap();
        let r = ks_one_sample_1d(&x, &uniform, 0.05).unwrap();
        assert!((r.statistic - 7.0 / 30.0).abs() < 1e-15);
        // the gap of 7/30 is attained at both 0.1 and 0.9
        assert!(r.argmax == Some(0.1) || r.argmax == Some(0.9));
        assert!(!r.reject);
    }

    #[test]
    fn ks_on_plotting_positions() {
        let n = 40;
        let x = PointCloud::from_values((1..=n).map(|i| i as f64 / (n + 1) as f64).collect()).unwrap();
        let r = ks_one_sample_1d(&x, &uniform, 0.05).unwrap();
        assert!(r.statistic <= 1.0 / n as f64 + 1.0 / (n + 1) as f64);
        assert!(r.p_value > 0.99);
    }

    #[test]
    fn invalid_cdfs() {
        let x = PointCloud::from_values(vec![0.2, 0.4]).unwrap();
        assert!(matches!(ks_one_sample_1d(&x, &|_| 0.5, 0.05), Err(Error::InvalidCdf(_))));
        assert!(matches!(ks_one_sample_1d(&x, &|v| 1.0 - uniform(v), 0.05), Err(Error::InvalidCdf(_))));
        let two_d = PointCloud::new(vec![vec![0.0, 1.0]]).unwrap();
        assert_eq!(cvm_one_sample_1d(&two_d, &uniform, 0.05), Err(Error::NotUnivariate));
    }

    #[test]
    fn kolmogorov_distribution_values() {
        // classical critical values: Q(1.3581) = 0.05, Q(1.2239) = 0.10, Q(1.6276) = 0.01
        assert!((kolmogorov_q(1.3581) - 0.05).abs() < 1e-4);
        assert!((kolmogorov_q(1.2239) - 0.10).abs() < 1e-4);
        assert!((kolmogorov_q(1.6276) - 0.01).abs() < 1e-4);
        // both series agree where they meet
        let c = std::f64::consts::PI.powi(2) / (8.0 * 1.18f64.powi(2));
        let small: f64 = 1.0 - (2.0 * std::f64::consts::PI).sqrt() / 1.18 * (1..=20).map(|k| (-((2 * k - 1) as f64).powi(2) * c).exp()).sum::<f64>();
        assert!((small - kolmogorov_q(1.18)).abs() < 1e-12);
    }

    #[test]
    fn cvm_statistic_examples() {
        let x = PointCloud::from_values(vec![0.1, 0.5, 0.9]).unwrap();
        let r = cvm_one_sample_1d(&x, &uniform, 0.05).unwrap();
        let expected = 1.0 / 36.0 + (0.1f64 - 1.0 / 6.0).powi(2) + (0.9f64 - 5.0 / 6.0).powi(2);
        assert!((r.statistic - expected).abs() < 1e-15);
        let one = PointCloud::from_values(vec![0.5]).unwrap();
        assert!((cvm_one_sample_1d(&one, &uniform, 0.05).unwrap().statistic - 1.0 / 12.0).abs() < 1e-15);
        let n = 8;
        let mid = PointCloud::from_values((0..n).map(|i| (2 * i + 1) as f64 / (2 * n) as f64).collect()).unwrap();
        assert!((cvm_one_sample_1d(&mid, &uniform, 0.05).unwrap().statistic - 1.0 / (12.0 * n as f64)).abs() < 1e-15);
    }

    #[test]
    fn cvm_asymptotic_critical_values() {
        // tabulated upper quantiles of the limiting distribution
        assert!((1.0 - cvm_asymptotic_cdf(0.46136) - 0.05).abs() < 5e-4);
        assert!((1.0 - cvm_asymptotic_cdf(0.34730) - 0.10).abs() < 5e-4);
        assert!((1.0 - cvm_asymptotic_cdf(0.74346) - 0.01).abs() < 5e-4);
        assert!((1.0 - cvm_asymptotic_cdf(1.16786) - 0.001).abs() < 1e-4);
        let mut last = 0.0;
        for k in 1..100 {
            let v = cvm_asymptotic_cdf(k as f64 * 0.02);
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn two_sample_ks() {
        let x = PointCloud::from_values(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let y = PointCloud::from_values(vec![3.5, 5.0, 6.0]).unwrap();
        let r = ks_two_sample_1d(&x, &y, 0.05).unwrap();
        // after 3.0 the x-ecdf is 3/4 and the y-ecdf is 0
        assert!((r.statistic - 0.75).abs() < 1e-15);
        assert_eq!(ks_two_sample_1d(&x, &x, 0.05).unwrap().statistic, 0.0);
    }
}
