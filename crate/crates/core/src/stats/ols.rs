//! Ordinary least squares for the small designs used by the Granger test.
//!
//! The normal equations are solved by Cholesky factorisation. When the
//! factorisation fails or the estimated condition number of `X'X` is too
//! large, the fit falls back to Householder QR with column pivoting on `X`.

use crate::error::{Error, Result};

/// Estimated `cond(X'X)` above which the QR path is used.
const MAX_NORMAL_CONDITION: f64 = 1e8;
/// Relative pivot size below which a column is treated as dependent.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    pub rss: f64,
    pub n_obs: usize,
    /// Whether the pivoted-QR fallback produced the solution.
    pub used_qr: bool,
}

/// Least-squares fit of `y` on the rows of `x` (row-major, equal widths).
pub fn ols(x: &[Vec<f64>], y: &[f64]) -> Result<OlsFit> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::LengthMismatch { left: n, right: y.len() });
    }
    let p = x.first().map_or(0, Vec::len);
    if p == 0 || n < p {
        return Err(Error::InsufficientData(format!("{n} observations for {p} regressors")));
    }

    let (coefficients, used_qr) = match solve_normal(x, y, p) {
        Some(beta) => (beta, false),
        None => (solve_qr(x, y, p)?, true),
    };
    let rss = x
        .iter()
        .zip(y)
        .map(|(row, yi)| {
            let fitted: f64 = row.iter().zip(&coefficients).map(|(a, b)| a * b).sum();
            (yi - fitted) * (yi - fitted)
        })
        .sum();
    Ok(OlsFit {
        coefficients,
        rss,
        n_obs: n,
        used_qr,
    })
}

fn solve_normal(x: &[Vec<f64>], y: &[f64], p: usize) -> Option<Vec<f64>> {
    let mut xtx = vec![vec![0.0; p]; p];
    let mut xty = vec![0.0; p];
    for (row, yi) in x.iter().zip(y) {
        for i in 0..p {
            xty[i] += row[i] * yi;
            for j in 0..=i {
                xtx[i][j] += row[i] * row[j];
            }
        }
    }

    // lower-triangular L with L L' = X'X
    let mut l = vec![vec![0.0; p]; p];
    for i in 0..p {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = xtx[i][i] - s;
                if !(d > 0.0) {
                    return None;
                }
                l[i][i] = d.sqrt();
            } else {
                l[i][j] = (xtx[i][j] - s) / l[j][j];
            }
        }
    }
    let diag = (0..p).map(|i| l[i][i]);
    let (lo, hi) = diag.fold((f64::INFINITY, 0.0f64), |(lo, hi), d| (lo.min(d), hi.max(d)));
    if (hi / lo).powi(2) > MAX_NORMAL_CONDITION {
        return None;
    }

    let mut z = vec![0.0; p];
    for i in 0..p {
        let s: f64 = (0..i).map(|k| l[i][k] * z[k]).sum();
        z[i] = (xty[i] - s) / l[i][i];
    }
    let mut beta = vec![0.0; p];
    for i in (0..p).rev() {
        let s: f64 = (i + 1..p).map(|k| l[k][i] * beta[k]).sum();
        beta[i] = (z[i] - s) / l[i][i];
    }
    Some(beta)
}

fn solve_qr(x: &[Vec<f64>], y: &[f64], p: usize) -> Result<Vec<f64>> {
    let n = x.len();
    // column-major working copy
    let mut a: Vec<Vec<f64>> = (0..p).map(|j| x.iter().map(|r| r[j]).collect()).collect();
    let mut b = y.to_vec();
    let mut perm: Vec<usize> = (0..p).collect();
    let mut rdiag = vec![0.0; p];
    let mut first_norm = 0.0;

    for k in 0..p {
        let norm = |col: &Vec<f64>| col[k..].iter().map(|v| v * v).sum::<f64>();
        let pivot = (k..p)
            .max_by(|&i, &j| norm(&a[i]).total_cmp(&norm(&a[j])))
            .expect("non-empty range");
        a.swap(k, pivot);
        perm.swap(k, pivot);

        let alpha = norm(&a[k]).sqrt();
        if k == 0 {
            first_norm = alpha;
        }
        if alpha <= RANK_TOL * first_norm || alpha == 0.0 {
            return Err(Error::CollinearLags);
        }
        let alpha = if a[k][k] > 0.0 { -alpha } else { alpha };
        let mut v: Vec<f64> = a[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        rdiag[k] = alpha;
        if vnorm2 > 0.0 {
            let apply = |col: &mut [f64]| {
                let dot: f64 = v.iter().zip(col.iter()).map(|(a, b)| a * b).sum();
                let f = 2.0 * dot / vnorm2;
                for (c, vi) in col.iter_mut().zip(&v) {
                    *c -= f * vi;
                }
            };
            for col in a.iter_mut().skip(k + 1) {
                apply(&mut col[k..]);
            }
            apply(&mut b[k..n]);
        }
        a[k][k] = alpha;
    }

    let mut sol = vec![0.0; p];
    for i in (0..p).rev() {
        let s: f64 = (i + 1..p).map(|j| a[j][i] * sol[j]).sum();
        sol[i] = (b[i] - s) / rdiag[i];
    }
    let mut beta = vec![0.0; p];
    for (k, &orig) in perm.iter().enumerate() {
        beta[orig] = sol[k];
    }
    Ok(beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn design(xs: &[f64]) -> Vec<Vec<f64>> {
        xs.iter().map(|x| vec![1.0, *x, x * x]).collect()
    }

    #[test]
    fn exact_fit_recovers_coefficients() {
        let xs: Vec<f64> = (0..12).map(|i| i as f64 * 0.5 - 2.0).collect();
        let y: Vec<f64> = xs.iter().map(|x| 1.5 - 2.0 * x + 0.25 * x * x).collect();
        let fit = ols(&design(&xs), &y).unwrap();
        for (got, want) in fit.coefficients.iter().zip([1.5, -2.0, 0.25]) {
            assert!((got - want).abs() < 1e-10);
        }
        assert!(fit.rss < 1e-20);
        assert!(!fit.used_qr);
    }

    #[test]
    fn qr_matches_normal_equations() {
        let xs: Vec<f64> = (0..20).map(|i| ((i * 7919) % 23) as f64 / 5.0).collect();
        let y: Vec<f64> = xs.iter().enumerate().map(|(i, x)| x.sin() + i as f64 * 0.1).collect();
        let x = design(&xs);
        let normal = solve_normal(&x, &y, 3).unwrap();
        let qr = solve_qr(&x, &y, 3).unwrap();
        for (a, b) in normal.iter().zip(&qr) {
            assert!((a - b).abs() < 1e-9, "{normal:?} vs {qr:?}");
        }
    }

    #[test]
    fn collinear_columns_rejected() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![1.0, i as f64, 2.0 * i as f64]).collect();
        let y: Vec<f64> = (0..10).map(|i| i as f64).collect();
        assert!(matches!(ols(&x, &y), Err(Error::CollinearLags)));
    }

    #[test]
    fn too_few_rows() {
        let x = vec![vec![1.0, 2.0]];
        assert!(ols(&x, &[1.0]).is_err());
        assert!(ols(&[vec![1.0], vec![1.0]], &[1.0]).is_err());
    }
}
