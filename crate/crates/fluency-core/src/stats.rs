//! Shared statistical machinery: descriptive moments, Pearson/Spearman
//! correlation, ordinary least squares, and Welch's two-sample t-test.
//!
//! Two-sided p-values come from the exact reference distributions
//! (normal, Student's t, Fisher's F).

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor, Normal, StudentsT};

use crate::error::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n-1 denominator); 0.0 when fewer than 2 values.
pub fn sample_sd(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

/// Mean and sample standard deviation of a set of values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub sd: f64,
}

impl Moments {
    pub fn of(xs: &[f64]) -> Self {
        Moments {
            mean: mean(xs),
            sd: sample_sd(xs),
        }
    }
}

/// Standardize to zero mean and unit sample variance.
pub fn standardize(xs: &[f64]) -> Result<Vec<f64>> {
    let sd = sample_sd(xs);
    if sd == 0.0 {
        return Err(Error::DegenerateFit(
            "cannot standardize a zero-variance variable".into(),
        ));
    }
    let m = mean(xs);
    Ok(xs.iter().map(|x| (x - m) / sd).collect())
}

fn check_paired(x: &[f64], y: &[f64], min_n: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "paired samples differ in length ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.len() < min_n {
        return Err(Error::invalid(format!(
            "need at least {min_n} paired observations, got {}",
            x.len()
        )));
    }
    Ok(())
}

/// Pearson correlation coefficient. Errors on length mismatch, n < 2, or a
/// zero-variance input.
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64> {
    check_paired(x, y, 2)?;
    let mx = mean(x);
    let my = mean(y);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateFit(
            "correlation undefined for zero-variance variable".into(),
        ));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// A correlation coefficient with its two-sided p-value and sample size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub r: f64,
    pub p: f64,
    pub n: usize,
}

/// Pearson correlation with a two-sided p-value from the t distribution on
/// n-2 degrees of freedom. Requires n >= 3.
pub fn pearson_test(x: &[f64], y: &[f64]) -> Result<Correlation> {
    check_paired(x, y, 3)?;
    let r = pearson_r(x, y)?;
    Ok(Correlation {
        r,
        p: correlation_p(r, x.len()),
        n: x.len(),
    })
}

fn correlation_p(r: f64, n: usize) -> f64 {
    let df = (n - 2) as f64;
    if (1.0 - r * r) <= f64::EPSILON {
        return 0.0;
    }
    let t = r * (df / (1.0 - r * r)).sqrt();
    t_two_sided_p(t, df)
}

/// Ranks with average ranks for ties (1-based).
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).expect("non-NaN values"));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        // ties share the mean of the ranks they span
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation (average ranks for ties) with a two-sided
/// p-value from the t approximation.
pub fn spearman_test(x: &[f64], y: &[f64]) -> Result<Correlation> {
    check_paired(x, y, 3)?;
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    let rho = pearson_r(&rx, &ry)?;
    Ok(Correlation {
        r: rho,
        p: correlation_p(rho, x.len()),
        n: x.len(),
    })
}

/// Welch's two-sample t statistic with Welch-Satterthwaite degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchT {
    pub t: f64,
    pub df: f64,
    pub p: f64,
}

pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<WelchT> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::invalid(format!(
            "Welch's t-test needs at least 2 samples per group, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let va = sample_sd(a).powi(2);
    let vb = sample_sd(b).powi(2);
    let na = a.len() as f64;
    let nb = b.len() as f64;
    let se2 = va / na + vb / nb;
    if se2 == 0.0 {
        return Err(Error::DegenerateFit(
            "Welch's t-test undefined for two zero-variance samples".into(),
        ));
    }
    let t = (mean(a) - mean(b)) / se2.sqrt();
    let df = se2 * se2 / ((va / na).powi(2) / (na - 1.0) + (vb / nb).powi(2) / (nb - 1.0));
    Ok(WelchT {
        t,
        df,
        p: t_two_sided_p(t, df),
    })
}

/// Least-squares line fit of y on x with the coefficient of determination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub n: usize,
}

pub fn simple_linear(x: &[f64], y: &[f64]) -> Result<LineFit> {
    check_paired(x, y, 2)?;
    let mx = mean(x);
    let my = mean(y);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateFit(
            "regressor has zero variance".into(),
        ));
    }
    if syy == 0.0 {
        return Err(Error::DegenerateFit(
            "response has zero variance".into(),
        ));
    }
    let slope = sxy / sxx;
    let r2 = (sxy * sxy) / (sxx * syy);
    Ok(LineFit {
        slope,
        intercept: my - slope * mx,
        r2,
        n: x.len(),
    })
}

/// Multiple OLS fit (with intercept). `coef[0]` is the intercept; the slope
/// order follows the input columns.
#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub coef: Vec<f64>,
    pub se: Vec<f64>,
    pub t: Vec<f64>,
    pub p: Vec<f64>,
    pub r2: f64,
    pub adj_r2: f64,
    pub f_stat: f64,
    pub f_p: f64,
    /// (model df, residual df)
    pub df: (usize, usize),
    pub n: usize,
}

/// Ordinary least squares of y on the given predictor columns, intercept
/// included. Errors when the normal equations are singular or when
/// n <= columns + 1.
pub fn ols(columns: &[Vec<f64>], y: &[f64]) -> Result<OlsFit> {
    let n = y.len();
    let k = columns.len();
    for c in columns {
        if c.len() != n {
            return Err(Error::invalid("OLS predictor column length mismatch".into()));
        }
    }
    if n <= k + 1 {
        return Err(Error::invalid(format!(
            "OLS needs more observations ({n}) than parameters ({})",
            k + 1
        )));
    }
    let p = k + 1;
    // design matrix row i: [1, x_1i, ..., x_ki]
    let design = |i: usize, j: usize| -> f64 {
        if j == 0 {
            1.0
        } else {
            columns[j - 1][i]
        }
    };
    let mut xtx = vec![vec![0.0; p]; p];
    let mut xty = vec![0.0; p];
    for i in 0..n {
        for a in 0..p {
            let da = design(i, a);
            xty[a] += da * y[i];
            for b in a..p {
                xtx[a][b] += da * design(i, b);
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            xtx[a][b] = xtx[b][a];
        }
    }
    let inv = invert(&xtx)?;
    let coef: Vec<f64> = (0..p)
        .map(|a| (0..p).map(|b| inv[a][b] * xty[b]).sum())
        .collect();

    let my = mean(y);
    let mut rss = 0.0;
    let mut tss = 0.0;
    for i in 0..n {
        let fitted: f64 = (0..p).map(|a| coef[a] * design(i, a)).sum();
        rss += (y[i] - fitted).powi(2);
        tss += (y[i] - my).powi(2);
    }
    if tss == 0.0 {
        return Err(Error::DegenerateFit("response has zero variance".into()));
    }
    let df_res = n - p;
    let sigma2 = rss / df_res as f64;
    let se: Vec<f64> = (0..p).map(|a| (sigma2 * inv[a][a]).max(0.0).sqrt()).collect();
    let t: Vec<f64> = coef
        .iter()
        .zip(&se)
        .map(|(c, s)| if *s > 0.0 { c / s } else { f64::INFINITY })
        .collect();
    let pvals: Vec<f64> = t.iter().map(|&tv| t_two_sided_p(tv, df_res as f64)).collect();
    let r2 = 1.0 - rss / tss;
    let adj_r2 = 1.0 - (1.0 - r2) * (n as f64 - 1.0) / df_res as f64;
    let (f_stat, f_p) = if k == 0 {
        (0.0, 1.0)
    } else {
        let f = ((tss - rss) / k as f64) / sigma2;
        (f, f_upper_p(f, k as f64, df_res as f64))
    };
    Ok(OlsFit {
        coef,
        se,
        t,
        p: pvals,
        r2,
        adj_r2,
        f_stat,
        f_p,
        df: (k, df_res),
        n,
    })
}

/// Gauss-Jordan inverse with partial pivoting; the matrices here are tiny
/// (at most 8x8 normal equations).
fn invert(m: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut inv = vec![vec![0.0; n]; n];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col].abs() < 1e-12 {
            return Err(Error::DegenerateFit("singular normal equations".into()));
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let d = a[col][col];
        for j in 0..n {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for i in 0..n {
            if i != col {
                let f = a[i][col];
                if f != 0.0 {
                    for j in 0..n {
                        a[i][j] -= f * a[col][j];
                        inv[i][j] -= f * inv[col][j];
                    }
                }
            }
        }
    }
    Ok(inv)
}

/// Two-sided standard-normal p-value.
pub fn normal_two_sided_p(z: f64) -> f64 {
    let n = Normal::new(0.0, 1.0).expect("unit normal");
    (2.0 * (1.0 - n.cdf(z.abs()))).clamp(0.0, 1.0)
}

/// Two-sided Student's t p-value.
pub fn t_two_sided_p(t: f64, df: f64) -> f64 {
    if !t.is_finite() {
        return 0.0;
    }
    let dist = StudentsT::new(0.0, 1.0, df).expect("valid t distribution");
    (2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0)
}

/// Upper-tail F p-value.
pub fn f_upper_p(f: f64, d1: f64, d2: f64) -> f64 {
    if f <= 0.0 {
        return 1.0;
    }
    let dist = FisherSnedecor::new(d1, d2).expect("valid F distribution");
    (1.0 - dist.cdf(f)).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pearson_perfect_and_sign() {
        let x = vec![1.0, 2.0, 3.0, 4.0];
        let y = vec![2.0, 4.0, 6.0, 8.0];
        assert!((pearson_r(&x, &y).unwrap() - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        assert!((pearson_r(&x, &neg).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn pearson_zero_variance_errors() {
        let x = vec![1.0, 1.0, 1.0];
        let y = vec![1.0, 2.0, 3.0];
        assert!(pearson_r(&x, &y).is_err());
    }

    // Hand-checked fixture: x = [1,2,3,4,5], y = [2,1,4,3,5].
    // r = 0.8, t = r*sqrt(3/(1-0.64)) = 2.3094, p(df=3) ~= 0.1041.
    #[test]
    fn pearson_test_fixture() {
        let x = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let y = vec![2.0, 1.0, 4.0, 3.0, 5.0];
        let c = pearson_test(&x, &y).unwrap();
        assert!((c.r - 0.8).abs() < 1e-12);
        assert!((c.p - 0.104088).abs() < 1e-4);
        assert_eq!(c.n, 5);
    }

    #[test]
    fn spearman_monotone_transform_invariant() {
        let x = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let y = vec![2.0, 1.0, 4.0, 3.0, 5.0];
        let base = spearman_test(&x, &y).unwrap();
        let cubed: Vec<f64> = x.iter().map(|v| v.powi(3) + 10.0).collect();
        let trans = spearman_test(&cubed, &y).unwrap();
        assert_eq!(base.r, trans.r);
    }

    #[test]
    fn average_ranks_handle_ties() {
        let r = average_ranks(&[1.0, 2.0, 2.0, 5.0]);
        assert_eq!(r, vec![1.0, 2.5, 2.5, 4.0]);
    }

    // Welch fixture checked against R: t.test(c(1,2,3,4), c(2,4,6,8))
    // t = -1.2649, df ~= 4.2353, p ~= 0.2724.
    #[test]
    fn welch_fixture() {
        let a = vec![1.0, 2.0, 3.0, 4.0];
        let b = vec![2.0, 4.0, 6.0, 8.0];
        let w = welch_t_test(&a, &b).unwrap();
        assert!((w.t + 1.264911).abs() < 1e-5);
        assert!((w.df - 4.235294).abs() < 1e-5);
        assert!((w.p - 0.272374).abs() < 1e-4);
    }

    #[test]
    fn welch_needs_two_per_group() {
        assert!(welch_t_test(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn simple_linear_exact_line() {
        let x: Vec<f64> = (1..=10).map(|v| v as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 2.0 * v).collect();
        let fit = simple_linear(&x, &y).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-12);
        assert!((fit.intercept - 3.0).abs() < 1e-12);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
    }

    // OLS fixture checked against R:
    //   x1 = 1:6, x2 = c(1,0,1,0,1,0), y = c(2.1,3.9,6.2,7.8,10.1,11.9)
    //   lm(y ~ x1 + x2): coef = (0.1467, 1.9829, 0.1733), R2 = 0.9995
    #[test]
    fn ols_fixture() {
        let x1: Vec<f64> = (1..=6).map(|v| v as f64).collect();
        let x2 = vec![1.0, 0.0, 1.0, 0.0, 1.0, 0.0];
        let y = vec![2.1, 3.9, 6.2, 7.8, 10.1, 11.9];
        let fit = ols(&[x1, x2], &y).unwrap();
        assert!((fit.coef[0] - 0.146667).abs() < 1e-5);
        assert!((fit.coef[1] - 1.982857).abs() < 1e-5);
        assert!((fit.coef[2] - 0.173333).abs() < 1e-5);
        assert!(fit.r2 > 0.999);
        assert_eq!(fit.df, (2, 3));
    }

    #[test]
    fn ols_singular_errors() {
        let x1 = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let x2 = x1.clone();
        let y = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        assert!(ols(&[x1, x2], &y).is_err());
    }

    #[test]
    fn p_value_tails() {
        assert!((normal_two_sided_p(0.0) - 1.0).abs() < 1e-12);
        assert!(normal_two_sided_p(5.0) < 1e-5);
        assert!((t_two_sided_p(0.0, 10.0) - 1.0).abs() < 1e-12);
        assert!(f_upper_p(0.0, 3.0, 100.0) == 1.0);
    }
}
