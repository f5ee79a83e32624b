//! Dense symmetric eigendecomposition.
//!
//! Householder reduction to tridiagonal form followed by the implicit QL
//! iteration with Wilkinson-style shifts (the classic `tred2`/`tql2` pair).
//! Results are sorted by non-increasing eigenvalue and every eigenvector is
//! sign-canonicalized so its largest-magnitude component (first one on ties)
//! is positive, making the output bit-deterministic for a given input.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{structural, Error};
use crate::math::sqrt;
use crate::{Matrix, Result};

const MAX_SWEEPS: usize = 64;

/// Eigenpairs of a real symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricEigen {
    /// Non-increasing.
    pub values: Vec<f64>,
    /// Column `i` is the unit eigenvector for `values[i]`.
    pub vectors: Matrix<f64>,
}

impl SymmetricEigen {
    /// Decomposes `a`, which must be square and symmetric.
    ///
    /// Each accepted pair satisfies `‖A·v − λ·v‖ ≤ tolerance·‖A‖_F`.
    pub fn new(a: &Matrix<f64>, tolerance: f64) -> Result<Self> {
        let n = a.rows();
        if a.cols() != n {
            return Err(structural!("eigendecomposition needs a square matrix, got {}x{}", n, a.cols()));
        }
        for i in 0..n {
            for j in 0..i {
                if a[(i, j)] != a[(j, i)] {
                    return Err(structural!("matrix is not symmetric at ({i}, {j})"));
                }
            }
        }
        if n == 0 {
            return Ok(Self {
                values: Vec::new(),
                vectors: Matrix::zeros(0, 0),
            });
        }

        let mut v = a.clone();
        let mut d = vec![0.0; n];
        let mut e = vec![0.0; n];
        tridiagonalize(&mut v, &mut d, &mut e);
        ql_implicit(&mut v, &mut d, &mut e)?;

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| d[j].total_cmp(&d[i]).then(i.cmp(&j)));
        let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
        let mut vectors = Matrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            let mut pivot = 0;
            for r in 0..n {
                if v[(r, src)].abs() > v[(pivot, src)].abs() {
                    pivot = r;
                }
            }
            let sign = if v[(pivot, src)] < 0.0 { -1.0 } else { 1.0 };
            for r in 0..n {
                vectors[(r, dst)] = sign * v[(r, src)];
            }
        }

        let out = Self { values, vectors };
        out.check_residuals(a, tolerance)?;
        Ok(out)
    }

    /// Largest `‖A·v − λ·v‖` over all pairs.
    pub fn max_residual(&self, a: &Matrix<f64>) -> f64 {
        let n = a.rows();
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let mut sq = 0.0;
            for r in 0..n {
                let av: f64 = (0..n).map(|c| a[(r, c)] * self.vectors[(c, k)]).sum();
                let diff = av - self.values[k] * self.vectors[(r, k)];
                sq += diff * diff;
            }
            worst = worst.max(sqrt(sq));
        }
        worst
    }

    fn check_residuals(&self, a: &Matrix<f64>, tolerance: f64) -> Result<()> {
        let bound = tolerance * a.frobenius_norm();
        let worst = self.max_residual(a);
        if worst > bound {
            return Err(Error::Numerical(alloc::format!(
                "eigenpair residual {worst:e} exceeds {bound:e}"
            )));
        }
        Ok(())
    }
}

/// Householder reduction; on return `v` holds the orthogonal transform, `d`
/// the diagonal and `e[1..]` the sub-diagonal.
fn tridiagonalize(v: &mut Matrix<f64>, d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = sqrt(h);
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for j in 0..i {
                e[j] = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in j + 1..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
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
                    v[(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    for i in 0..n - 1 {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    v[(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = 0.0;
    }
    v[(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

fn ql_implicit(v: &mut Matrix<f64>, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_SWEEPS {
                    return Err(Error::Numerical(alloc::format!(
                        "QL iteration did not converge for eigenvalue {l}"
                    )));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = libm::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = libm::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v[(k, i + 1)];
                        v[(k, i + 1)] = s * v[(k, i)] + c * h;
                        v[(k, i)] = c * v[(k, i)] - s * h;
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
