//! Small dense-vector helpers plus a CSR matrix with matrix-free iterative
//! solvers (Jacobi-preconditioned CG for SPD operators, BiCGStab for the
//! nonsymmetric case).

use std::fmt;

/// Failure of an iterative linear solve.
#[derive(Debug, Clone, PartialEq)]
pub enum SolverError {
    /// The iteration hit its budget without reaching the requested tolerance.
    NoConvergence {
        iterations: usize,
        residual: f64,
        tolerance: f64,
    },
    /// A scalar in the recurrence degenerated (lost positive definiteness or
    /// exact breakdown) while the residual was still above tolerance.
    Breakdown { residual: f64, tolerance: f64 },
    /// The operator is singular to working precision.
    SingularOperator,
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverError::NoConvergence {
                iterations,
                residual,
                tolerance,
            } => write!(
                f,
                "no convergence after {iterations} iterations (residual {residual:.3e}, tolerance {tolerance:.3e})"
            ),
            SolverError::Breakdown {
                residual,
                tolerance,
            } => write!(
                f,
                "solver breakdown at residual {residual:.3e} (tolerance {tolerance:.3e})"
            ),
            SolverError::SingularOperator => write!(f, "operator is singular"),
        }
    }
}

impl std::error::Error for SolverError {}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |acc, &x| acc.max(x.abs()))
}

/// y += alpha * x
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Sparse matrix in compressed-sparse-row layout.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Build from (row, col, value) triplets; duplicate entries are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut entries: Vec<(usize, usize, f64)> = triplets.to_vec();
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut prev: Option<(usize, usize)> = None;
        for &(r, c, v) in &entries {
            assert!(r < nrows && c < ncols, "triplet ({r},{c}) out of bounds");
            if prev == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                prev = Some((r, c));
            }
            row_ptr[r + 1] = col_idx.len();
        }
        // fill pointers of empty rows
        for r in 0..nrows {
            if row_ptr[r + 1] < row_ptr[r] {
                row_ptr[r + 1] = row_ptr[r];
            }
        }
        CsrMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// out = A * x
    pub fn mul_vec_into(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(out.len(), self.nrows);
        for r in 0..self.nrows {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            out[r] = acc;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.nrows];
        self.mul_vec_into(x, &mut out);
        out
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.nrows.min(self.ncols)];
        for r in 0..self.nrows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.col_idx[k] == r {
                    d[r] += self.values[k];
                }
            }
        }
        d
    }

    /// Iterate the stored entries as (row, col, value).
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.col_idx[k], self.values[k]))
        })
    }
}

/// Preconditioned conjugate gradient for SPD operators.
///
/// `apply` computes `out = A x`; `inv_diag` is the inverse of the operator
/// diagonal (Jacobi preconditioner). Converges when the 2-norm of the
/// residual drops below `rtol * |rhs|`.
pub fn pcg<F>(
    apply: F,
    inv_diag: &[f64],
    rhs: &[f64],
    x0: Vec<f64>,
    rtol: f64,
    max_iter: usize,
) -> Result<Vec<f64>, SolverError>
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = rhs.len();
    let b_norm = norm2(rhs);
    if b_norm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let tol = rtol * b_norm;

    let mut x = x0;
    let mut ax = vec![0.0; n];
    apply(&x, &mut ax);
    let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    if norm2(&r) <= tol {
        return Ok(x);
    }
    let mut z: Vec<f64> = r.iter().zip(inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];

    for _ in 0..max_iter {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 || !pap.is_finite() {
            let res = norm2(&r);
            return if res <= tol {
                Ok(x)
            } else {
                Err(SolverError::Breakdown {
                    residual: res,
                    tolerance: tol,
                })
            };
        }
        let alpha = rz / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        let res = norm2(&r);
        if res <= tol {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        rz = rz_new;
    }
    Err(SolverError::NoConvergence {
        iterations: max_iter,
        residual: norm2(&r),
        tolerance: tol,
    })
}

/// Jacobi-preconditioned BiCGStab for general (possibly nonsymmetric)
/// operators.
pub fn bicgstab<F>(
    apply: F,
    inv_diag: &[f64],
    rhs: &[f64],
    x0: Vec<f64>,
    rtol: f64,
    max_iter: usize,
) -> Result<Vec<f64>, SolverError>
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = rhs.len();
    let b_norm = norm2(rhs);
    if b_norm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let tol = rtol * b_norm;

    let mut x = x0;
    let mut ax = vec![0.0; n];
    apply(&x, &mut ax);
    let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    if norm2(&r) <= tol {
        return Ok(x);
    }
    let r_hat = r.clone();
    let mut rho = 1.0;
    let mut alpha = 1.0;
    let mut omega = 1.0;
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut p_hat = vec![0.0; n];
    let mut s_hat = vec![0.0; n];
    let mut t = vec![0.0; n];

    for _ in 0..max_iter {
        let rho_new = dot(&r_hat, &r);
        if rho_new.abs() < f64::MIN_POSITIVE {
            let res = norm2(&r);
            return if res <= tol {
                Ok(x)
            } else {
                Err(SolverError::Breakdown {
                    residual: res,
                    tolerance: tol,
                })
            };
        }
        let beta = (rho_new / rho) * (alpha / omega);
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        for i in 0..n {
            p_hat[i] = p[i] * inv_diag[i];
        }
        apply(&p_hat, &mut v);
        alpha = rho_new / dot(&r_hat, &v);
        // s = r - alpha v (reuse r)
        axpy(-alpha, &v, &mut r);
        if norm2(&r) <= tol {
            axpy(alpha, &p_hat, &mut x);
            return Ok(x);
        }
        for i in 0..n {
            s_hat[i] = r[i] * inv_diag[i];
        }
        apply(&s_hat, &mut t);
        let tt = dot(&t, &t);
        if tt == 0.0 {
            return Err(SolverError::Breakdown {
                residual: norm2(&r),
                tolerance: tol,
            });
        }
        omega = dot(&t, &r) / tt;
        axpy(alpha, &p_hat, &mut x);
        axpy(omega, &s_hat, &mut x);
        axpy(-omega, &t, &mut r);
        if norm2(&r) <= tol {
            return Ok(x);
        }
        if omega.abs() < f64::MIN_POSITIVE {
            return Err(SolverError::Breakdown {
                residual: norm2(&r),
                tolerance: tol,
            });
        }
        rho = rho_new;
    }
    Err(SolverError::NoConvergence {
        iterations: max_iter,
        residual: norm2(&r),
        tolerance: tol,
    })
}
