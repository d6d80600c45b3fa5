//! Small numeric helpers shared across modules.

use statrs::distribution::{ContinuousCDF, FisherSnedecor, StudentsT};

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sum of squared deviations from the mean.
pub fn sum_sq_dev(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum()
}

/// Unbiased (N − 1) variance.
pub fn variance(x: &[f64]) -> f64 {
    sum_sq_dev(x) / (x.len() as f64 - 1.0)
}

pub fn std_dev(x: &[f64]) -> f64 {
    variance(x).sqrt()
}

/// Two-sided p-value of a t statistic.
pub fn t_test_p(t: f64, df: f64) -> f64 {
    if !t.is_finite() {
        return if t.is_nan() { f64::NAN } else { 0.0 };
    }
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    (2.0 * dist.sf(t.abs())).min(1.0)
}

/// Upper-tail p-value of an F statistic.
pub fn f_test_p(f: f64, df1: f64, df2: f64) -> f64 {
    if f.is_infinite() && f > 0.0 {
        return 0.0;
    }
    if !f.is_finite() {
        return f64::NAN;
    }
    let dist = FisherSnedecor::new(df1, df2).expect("positive degrees of freedom");
    dist.sf(f.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variance_is_unbiased() {
        assert_eq!(variance(&[1.0, 2.0, 3.0, 4.0]), 5.0 / 3.0);
    }

    #[test]
    fn p_values() {
        assert!((t_test_p(0.0, 10.0) - 1.0).abs() < 1e-12);
        // t = 2.228 at df 10 is the 97.5th percentile
        assert!((t_test_p(2.228_138_85, 10.0) - 0.05).abs() < 1e-6);
        assert!((f_test_p(0.0, 1.0, 10.0) - 1.0).abs() < 1e-12);
        assert_eq!(f_test_p(f64::INFINITY, 1.0, 10.0), 0.0);
    }
}
