//! Pearson and Spearman correlation with two-tailed Student-t significance.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 3 paired observations, got {0}")]
    TooFewSamples(usize),
    #[error("non-finite value at position {0}")]
    NonFinite(usize),
    #[error("correlation is undefined for a constant vector")]
    ConstantVector,
    #[error("degrees of freedom must be at least 1, got {0}")]
    InvalidDf(f64),
}

/// A coefficient in [-1, 1] with its two-tailed p-value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub coefficient: f64,
    pub p_value: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub pearson: Correlation,
    pub spearman: Correlation,
}

fn validate(x: &[f64], y: &[f64]) -> Result<(), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(StatsError::TooFewSamples(x.len()));
    }
    if let Some(i) = x.iter().zip(y).position(|(a, b)| !a.is_finite() || !b.is_finite()) {
        return Err(StatsError::NonFinite(i));
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample Pearson correlation.
///
/// ```
/// use faithcheck::stats::pearson;
///
/// let c = pearson(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
/// assert!((c.coefficient - 0.8).abs() < 1e-12);
/// ```
pub fn pearson(x: &[f64], y: &[f64]) -> Result<Correlation, StatsError> {
    validate(x, y)?;
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ConstantVector);
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    Ok(Correlation {
        coefficient: r,
        p_value: correlation_p_value(r, x.len()),
        n: x.len(),
    })
}

/// Two-tailed p-value of a correlation coefficient via
/// `t = r * sqrt((n - 2) / (1 - r^2))` with `n - 2` degrees of freedom.
pub fn correlation_p_value(r: f64, n: usize) -> f64 {
    let df = (n - 2) as f64;
    let denom = 1.0 - r * r;
    if denom <= 0.0 {
        return 0.0;
    }
    let t = r.abs() * (df / denom).sqrt();
    (2.0 * student_t_sf(t, df).expect("df >= 1")).clamp(0.0, 1.0)
}

/// 1-based ranks; tied values share the mean of the positions they occupy.
pub fn rank(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i..j (0-based) share rank mean((i+1)..=j)
        let shared = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = shared;
        }
        i = j;
    }
    ranks
}

/// Spearman's rho: Pearson on tie-averaged ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<Correlation, StatsError> {
    validate(x, y)?;
    pearson(&rank(x), &rank(y))
}

/// Exact two-tailed permutation p-value for Spearman's rho, enumerating every
/// ordering of `y`. Only offered for `n <= 10`; returns `None` above that.
pub fn spearman_permutation_p(x: &[f64], y: &[f64]) -> Result<Option<f64>, StatsError> {
    let observed = spearman(x, y)?.coefficient;
    let n = x.len();
    if n > 10 {
        return Ok(None);
    }
    let rx = rank(x);
    let mut ry = rank(y);
    ry.sort_by(f64::total_cmp);
    let mut perm: Vec<usize> = (0..n).collect();
    let (mut extreme, mut total) = (0u64, 0u64);
    let tol = 1e-12;
    loop {
        let permuted: Vec<f64> = perm.iter().map(|&i| ry[i]).collect();
        if let Ok(c) = pearson(&rx, &permuted) {
            if c.coefficient.abs() >= observed.abs() - tol {
                extreme += 1;
            }
        }
        total += 1;
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(Some(extreme as f64 / total as f64))
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("pivot exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Upper tail `P(T > t)` of Student's t with `df` degrees of freedom.
///
/// For `t >= 0` this is `I_x(df/2, 1/2) / 2` with `x = df / (df + t^2)`.
pub fn student_t_sf(t: f64, df: f64) -> Result<f64, StatsError> {
    if !(df >= 1.0) || !df.is_finite() {
        return Err(StatsError::InvalidDf(df));
    }
    if t.is_nan() {
        return Ok(f64::NAN);
    }
    if t.is_infinite() {
        return Ok(if t > 0.0 { 0.0 } else { 1.0 });
    }
    let x = df / (df + t * t);
    let half_tail = 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, x);
    Ok(if t >= 0.0 { half_tail } else { 1.0 - half_tail })
}

/// Natural log of the gamma function (Lanczos, g = 7, n = 9).
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized incomplete beta `I_x(a, b)` by Lentz's continued fraction.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b
    }
}

fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 500;
    const EPS: f64 = 1e-15;
    const TINY: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Significance marker: `**` below 0.001, `*` below 0.05.
pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.001 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

pub fn correlate(x: &[f64], y: &[f64]) -> Result<CorrelationReport, StatsError> {
    Ok(CorrelationReport {
        pearson: pearson(x, y)?,
        spearman: spearman(x, y)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pearson_examples() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap().coefficient - 1.0).abs() < 1e-12);
        assert!((pearson(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap().coefficient - 0.8).abs() < 1e-12);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap().coefficient + 1.0).abs() < 1e-12);
    }

    #[test]
    fn pearson_errors() {
        assert_eq!(pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(StatsError::ConstantVector));
        assert_eq!(pearson(&[1.0, 2.0], &[1.0, 2.0]), Err(StatsError::TooFewSamples(2)));
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0]), Err(StatsError::LengthMismatch(3, 2)));
        assert_eq!(pearson(&[1.0, f64::NAN, 3.0], &[1.0, 2.0, 3.0]), Err(StatsError::NonFinite(1)));
    }

    #[test]
    fn ranks_with_ties() {
        assert_eq!(rank(&[10.0, 20.0, 30.0]), [1.0, 2.0, 3.0]);
        assert_eq!(rank(&[1.0, 2.0, 2.0, 3.0]), [1.0, 2.5, 2.5, 4.0]);
        assert_eq!(rank(&[5.0, 5.0, 5.0]), [2.0, 2.0, 2.0]);
        assert_eq!(rank(&[3.0, 1.0, 2.0]), [3.0, 1.0, 2.0]);
    }

    #[test]
    fn spearman_examples() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| v.exp()).collect();
        assert!((spearman(&x, &y).unwrap().coefficient - 1.0).abs() < 1e-12);
        assert!((spearman(&[1.0, 2.0, 3.0], &[9.0, 4.0, 1.0]).unwrap().coefficient + 1.0).abs() < 1e-12);
    }

    #[test]
    fn t_tail_special_values() {
        for df in [1.0, 2.0, 7.0, 100.0] {
            assert!((student_t_sf(0.0, df).unwrap() - 0.5).abs() < 1e-12);
        }
        let cauchy = 0.5 - 1f64.atan() / std::f64::consts::PI;
        assert!((student_t_sf(1.0, 1.0).unwrap() - cauchy).abs() < 1e-10);
        assert!((student_t_sf(2.228, 10.0).unwrap() - 0.025).abs() < 1e-3);
        assert!((student_t_sf(-1.0, 1.0).unwrap() - (1.0 - cauchy)).abs() < 1e-10);
        assert!(matches!(student_t_sf(1.0, 0.5), Err(StatsError::InvalidDf(_))));
    }

    #[test]
    fn perfect_correlation_has_zero_p() {
        let c = pearson(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(c.coefficient, 1.0);
        assert!(c.p_value < 1e-12);
        assert_eq!(significance_stars(c.p_value), "**");
        assert_eq!(significance_stars(0.01), "*");
        assert_eq!(significance_stars(0.2), "");
    }

    #[test]
    fn permutation_p_value() {
        // rho = 1 for n = 4 is reached by 2 of 24 orderings (both signs).
        let p = spearman_permutation_p(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 4.0]).unwrap().unwrap();
        assert!((p - 2.0 / 24.0).abs() < 1e-12);
        let big: Vec<f64> = (0..11).map(f64::from).collect();
        assert_eq!(spearman_permutation_p(&big, &big).unwrap(), None);
    }

    #[test]
    fn incomplete_beta_matches_closed_forms() {
        // I_x(1, 1) = x and I_x(a, 1) = x^a.
        for x in [0.1, 0.5, 0.9] {
            assert!((regularized_incomplete_beta(1.0, 1.0, x) - x).abs() < 1e-12);
            assert!((regularized_incomplete_beta(3.0, 1.0, x) - x.powi(3)).abs() < 1e-12);
        }
        assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-12);
    }

    fn vector(n: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-100.0f64..100.0, n)
    }

    proptest! {
        #[test]
        fn pearson_affine_invariance(x in vector(8), y in vector(8), a in 0.1f64..10.0, b in -5.0f64..5.0) {
            if let Ok(c) = pearson(&x, &y) {
                let xs: Vec<f64> = x.iter().map(|v| a * v + b).collect();
                let c2 = pearson(&xs, &y).unwrap();
                prop_assert!((c.coefficient - c2.coefficient).abs() < 1e-9);
                let neg: Vec<f64> = x.iter().map(|v| -a * v).collect();
                let c3 = pearson(&neg, &y).unwrap();
                prop_assert!((c.coefficient + c3.coefficient).abs() < 1e-9);
                prop_assert!(c.coefficient.abs() <= 1.0);
                prop_assert!((0.0..=1.0).contains(&c.p_value));
            }
        }

        #[test]
        fn rank_sum_is_triangular(v in proptest::collection::vec(prop_oneof![Just(1.0), Just(2.0), -3.0f64..3.0], 0..20)) {
            let n = v.len() as f64;
            prop_assert!((rank(&v).iter().sum::<f64>() - n * (n + 1.0) / 2.0).abs() < 1e-9);
        }

        #[test]
        fn p_value_decreases_with_r(r1 in 0.0f64..0.99, r2 in 0.0f64..0.99, n in 3usize..500) {
            let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
            prop_assert!(correlation_p_value(hi, n) <= correlation_p_value(lo, n) + 1e-12);
        }
    }
}
