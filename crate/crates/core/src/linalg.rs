//! Small dense and Krylov eigen-solvers for real symmetric operators.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Eigen-decomposition of a symmetric tridiagonal matrix by implicit QL with
/// Wilkinson shifts. `diag` has length `m`, `off` length `m - 1` (`off[i]`
/// couples rows `i` and `i + 1`). Returns eigenvalues ascending and the
/// matching unit eigenvectors as columns (`vectors[row][col]`).
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let m = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; m];
    e[..m.saturating_sub(1)].copy_from_slice(&off[..m.saturating_sub(1)]);
    let mut z: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut row = vec![0.0; m];
            row[i] = 1.0;
            row
        })
        .collect();

    for l in 0..m {
        let mut iterations = 0;
        loop {
            let mut split = l;
            while split + 1 < m {
                let dd = libm::fabs(d[split]) + libm::fabs(d[split + 1]);
                if libm::fabs(e[split]) <= f64::EPSILON * dd {
                    break;
                }
                split += 1;
            }
            if split == l {
                break;
            }
            iterations += 1;
            if iterations > 64 {
                return Err(Error::NonConvergence { residual: libm::fabs(e[l]), iterations });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = libm::hypot(g, 1.0);
            g = d[split] - d[l] + e[l] / (g + libm::copysign(r, g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = split;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = libm::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[split] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in z.iter_mut() {
                    let f = row[i + 1];
                    row[i + 1] = s * row[i] + c * f;
                    row[i] = c * row[i] - s * f;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[split] = 0.0;
        }
    }

    let mut idx: Vec<usize> = (0..m).collect();
    idx.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = idx.iter().map(|&i| d[i]).collect();
    let vectors = z.iter().map(|row| idx.iter().map(|&i| row[i]).collect()).collect();
    Ok((values, vectors))
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// Result of [`lowest_eigenpair`].
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    /// `‖A v − λ v‖` for the returned unit vector.
    pub residual: f64,
}

/// Algebraically lowest eigenpair of a symmetric operator by explicitly
/// restarted Lanczos with full reorthogonalisation.
///
/// `apply(x, y)` must write `A x` into `y`. Iteration stops once the true
/// residual is at most `tol`.
pub fn lowest_eigenpair<F>(n: usize, apply: F, start: Vec<f64>, tol: f64) -> Result<EigenPair>
where
    F: Fn(&[f64], &mut [f64]),
{
    const BASIS: usize = 32;
    const RESTARTS: usize = 500;

    let m_max = BASIS.min(n);
    let mut x = start;
    let nx = norm(&x);
    if !(nx > 0.0) {
        return Err(Error::InvalidArgument("zero start vector".into()));
    }
    x.iter_mut().for_each(|v| *v /= nx);

    let mut w = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for restart in 0..RESTARTS {
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m_max);
        let mut alpha = Vec::with_capacity(m_max);
        let mut beta: Vec<f64> = Vec::with_capacity(m_max);
        basis.push(x.clone());
        loop {
            let j = basis.len() - 1;
            apply(&basis[j], &mut w);
            let a = dot(&basis[j], &w);
            alpha.push(a);
            for _ in 0..2 {
                for v in &basis {
                    let h = dot(v, &w);
                    w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= h * vi);
                }
            }
            let b = norm(&w);
            if basis.len() == m_max || b <= 1e-12 * (1.0 + libm::fabs(a)) {
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|v| v / b).collect());
        }

        let (_, vectors) = tridiagonal_eigen(&alpha, &beta)?;
        x.iter_mut().for_each(|v| *v = 0.0);
        for (k, v) in basis.iter().enumerate() {
            let c = vectors[k][0];
            x.iter_mut().zip(v).for_each(|(xi, vi)| *xi += c * vi);
        }
        let nx = norm(&x);
        x.iter_mut().for_each(|v| *v /= nx);

        apply(&x, &mut w);
        let rayleigh = dot(&x, &w);
        residual = libm::sqrt(
            w.iter()
                .zip(&x)
                .map(|(wi, xi)| {
                    let r = wi - rayleigh * xi;
                    r * r
                })
                .sum(),
        );
        if residual <= tol {
            return Ok(EigenPair { value: rayleigh, vector: x, residual });
        }
        if restart + 1 == RESTARTS {
            break;
        }
    }
    Err(Error::NonConvergence { residual, iterations: RESTARTS })
}
