//! Reference implementations used only by tests. They share no code with the
//! library's structured Toeplitz / factorization path.
#![allow(dead_code)]

use sic_core::Complex64;

pub type Dense = Vec<Vec<Complex64>>;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `y_i = sum_j h_j x_{i-j}` for `i < len(x)`.
pub fn direct_convolution(x: &[Complex64], h: &[Complex64]) -> Vec<Complex64> {
    (0..x.len())
        .map(|i| {
            let mut acc = zero();
            for (j, hj) in h.iter().enumerate() {
                if i >= j {
                    acc += hj * x[i - j];
                }
            }
            acc
        })
        .collect()
}

/// Dense convolution matrix written out element by element.
pub fn dense_convolution_matrix(x: &[Complex64], k: usize) -> Dense {
    let mut m = vec![vec![zero(); k]; x.len()];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            if i >= j {
                *v = x[i - j];
            }
        }
    }
    m
}

pub fn adjoint(a: &Dense) -> Dense {
    let rows = a.len();
    let cols = a[0].len();
    (0..cols)
        .map(|c| (0..rows).map(|r| a[r][c].conj()).collect())
        .collect()
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let inner = b.len();
    let cols = b[0].len();
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|c| (0..inner).map(|p| row[p] * b[p][c]).sum())
                .collect()
        })
        .collect()
}

pub fn matvec(a: &Dense, v: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
#[allow(clippy::needless_range_loop)]
pub fn invert(a: &Dense) -> Dense {
    let n = a.len();
    let mut aug: Dense = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    zero()
                }
            }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&p, &q| aug[p][col].norm().total_cmp(&aug[q][col].norm()))
            .unwrap();
        aug.swap(col, pivot);
        let pv = aug[col][col];
        assert!(pv.norm() > 0.0, "oracle: singular matrix");
        for v in aug[col].iter_mut() {
            *v /= pv;
        }
        for r in 0..n {
            if r != col {
                let f = aug[r][col];
                if f != zero() {
                    for c in 0..2 * n {
                        let sub = f * aug[col][c];
                        aug[r][c] -= sub;
                    }
                }
            }
        }
    }
    aug.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// `(X^H X)^-1 X^H` by explicit inversion.
pub fn pseudoinverse(x: &Dense) -> Dense {
    let xh = adjoint(x);
    matmul(&invert(&matmul(&xh, x)), &xh)
}

pub fn trace_of_gram_inverse(x: &Dense) -> f64 {
    let inv = invert(&matmul(&adjoint(x), x));
    (0..inv.len()).map(|i| inv[i][i].re).sum()
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q).norm())
        .fold(0.0, f64::max)
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
