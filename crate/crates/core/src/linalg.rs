//! Dense Hermitian helpers for the small `K x K` Gram systems.

use num_complex::Complex64;

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SquareMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] = value;
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        (0..self.dim)
            .map(|c| (0..self.dim).map(|r| self.get(r, c).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Root-free Cholesky factorization `G = L D L^H` of a Hermitian positive
/// definite matrix, `L` unit lower triangular and `D` positive diagonal.
#[derive(Debug, Clone)]
pub(crate) struct Cholesky {
    l: SquareMatrix,
    d: Vec<f64>,
}

#[allow(clippy::needless_range_loop)]
impl Cholesky {
    /// Returns `None` when a pivot is not strictly positive or not finite.
    pub fn factor(g: &SquareMatrix) -> Option<Self> {
        let n = g.dim();
        let mut l = SquareMatrix::zeros(n);
        let mut d = vec![0.0; n];
        for j in 0..n {
            let mut dj = g.get(j, j).re;
            for p in 0..j {
                dj -= l.get(j, p).norm_sqr() * d[p];
            }
            if !(dj > 0.0 && dj.is_finite()) {
                return None;
            }
            d[j] = dj;
            l.set(j, j, Complex64::new(1.0, 0.0));
            for i in (j + 1)..n {
                let mut s = g.get(i, j);
                for p in 0..j {
                    s -= l.get(i, p) * l.get(j, p).conj() * d[p];
                }
                l.set(i, j, s / dj);
            }
        }
        Some(Self { l, d })
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }

    /// Solves `G x = b`.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        debug_assert_eq!(b.len(), n);
        let mut z = b.to_vec();
        for i in 0..n {
            for p in 0..i {
                let lz = self.l.get(i, p) * z[p];
                z[i] -= lz;
            }
        }
        for (zi, di) in z.iter_mut().zip(&self.d) {
            *zi /= *di;
        }
        for i in (0..n).rev() {
            for p in (i + 1)..n {
                let lz = self.l.get(p, i).conj() * z[p];
                z[i] -= lz;
            }
        }
        z
    }

    /// `Tr{G^-1} = sum_ij |(L^-1)_ij|^2 / d_i`, from forward substitution on
    /// the unit vectors.
    pub fn inverse_trace(&self) -> f64 {
        let n = self.dim();
        let mut total = 0.0;
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            // column j of L^-1 is zero above row j and one on the diagonal
            for i in j..n {
                let mut s = if i == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                for p in j..i {
                    s -= self.l.get(i, p) * col[p];
                }
                col[i] = s;
                total += s.norm_sqr() / self.d[i];
            }
        }
        total
    }
}
