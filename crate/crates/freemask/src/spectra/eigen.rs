//! Dense symmetric eigensolver.
//!
//! Householder reduction to tridiagonal form followed by the implicit
//! shift QL iteration, the classic EISPACK tred2/tql2 pair. Eigenvalues
//! come back sorted ascending; the eigenvector matrix has the eigenvector
//! for the j-th eigenvalue in column j.

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// QL sweeps allowed per eigenvalue before giving up.
const MAX_QL_ITERS: usize = 60;

fn check_input(a: &Matrix) -> Result<usize> {
    if !a.is_square() {
        return Err(Error::domain(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if a.rows() == 0 {
        return Err(Error::domain("eigendecomposition of an empty matrix"));
    }
    if !a.data().iter().all(|v| v.is_finite()) {
        return Err(Error::numerical("matrix has a non-finite entry"));
    }
    let tol = 1e-10 * a.max_abs().max(1.0);
    let asym = a.max_asymmetry()?;
    if asym > tol {
        return Err(Error::numerical(format!(
            "matrix is not symmetric: max |a_ij - a_ji| = {asym:e}"
        )));
    }
    Ok(a.rows())
}

/// Householder reduction of the symmetric matrix stored in `v` (row
/// major, n x n) to tridiagonal form. On exit `d` holds the diagonal and
/// `e[1..]` the subdiagonal (`e[0] = 0`). With `vectors` set, `v` is
/// overwritten with the accumulated orthogonal transformation; otherwise
/// `v` holds scratch data.
fn tred2(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64], vectors: bool) {
    let at = |k: usize, j: usize| k * n + j;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut h = 0.0;
        let mut scale = 0.0;
        for item in d.iter().take(i) {
            scale += item.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for item in e.iter_mut().take(i) {
                *item = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[at(k, j)] * d[k];
                    e[k] += v[at(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[at(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    if vectors {
        // turn the stored Householder vectors into the orthogonal Q; row
        // n-1 serves as scratch holding the tridiagonal diagonal
        for i in 0..(n - 1) {
            v[at(n - 1, i)] = v[at(i, i)];
            v[at(i, i)] = 1.0;
            let h = d[i + 1];
            if h != 0.0 {
                for k in 0..=i {
                    d[k] = v[at(k, i + 1)] / h;
                }
                for j in 0..=i {
                    let mut g = 0.0;
                    for k in 0..=i {
                        g += v[at(k, i + 1)] * v[at(k, j)];
                    }
                    for k in 0..=i {
                        v[at(k, j)] -= g * d[k];
                    }
                }
            }
            for k in 0..=i {
                v[at(k, i + 1)] = 0.0;
            }
        }
        for j in 0..n {
            d[j] = v[at(n - 1, j)];
            v[at(n - 1, j)] = 0.0;
        }
        v[at(n - 1, n - 1)] = 1.0;
    } else {
        for j in 0..n {
            d[j] = v[at(j, j)];
        }
    }
    e[0] = 0.0;
}

/// Implicit shift QL on the tridiagonal matrix (d, e), rotating the
/// columns of `v` along when present. `e` is consumed as scratch.
fn tql2(n: usize, d: &mut [f64], e: &mut [f64], mut v: Option<&mut [f64]>) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0f64;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n && e[m].abs() > eps * tst1 {
            m += 1;
        }
        // e[n-1] is zero, so m never escapes the array
        if m > l {
            let mut iter = 0usize;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERS {
                    return Err(Error::numerical(format!(
                        "QL failed to converge at eigenvalue {l} after {MAX_QL_ITERS} sweeps"
                    )));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for item in d.iter_mut().take(n).skip(l + 2) {
                    *item -= h;
                }
                f += h;
                p = d[m];
                let mut c = 1.0f64;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0f64;
                let mut s2 = 0.0f64;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let gi = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * gi;
                    d[i + 1] = h + s * (c * gi + s * d[i]);
                    if let Some(vm) = v.as_deref_mut() {
                        for k in 0..n {
                            let hk = vm[k * n + i + 1];
                            vm[k * n + i + 1] = s * vm[k * n + i] + c * hk;
                            vm[k * n + i] = c * vm[k * n + i] - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

fn solve(a: &Matrix, vectors: bool) -> Result<(Vec<f64>, Option<Matrix>)> {
    let n = check_input(a)?;
    let mut v = a.data().to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(n, &mut v, &mut d, &mut e, vectors);
    tql2(n, &mut d, &mut e, if vectors { Some(&mut v) } else { None })?;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values: Vec<f64> = idx.iter().map(|&i| d[i]).collect();
    let q = if vectors {
        let mut q = Matrix::zeros(n, n);
        for (new_col, &old_col) in idx.iter().enumerate() {
            for k in 0..n {
                q.set(k, new_col, v[k * n + old_col]);
            }
        }
        Some(q)
    } else {
        None
    };
    Ok((values, q))
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn eigenvalues_symmetric(a: &Matrix) -> Result<Vec<f64>> {
    solve(a, false).map(|(d, _)| d)
}

/// Eigenvalues (ascending) and an orthogonal matrix whose column j is a
/// unit eigenvector for the j-th eigenvalue.
pub fn symmetric_eigen(a: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let (d, q) = solve(a, true)?;
    Ok((d, q.expect("vectors requested")))
}
