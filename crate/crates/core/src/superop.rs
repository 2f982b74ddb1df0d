//! Linear maps on n x n matrices, stored as n^2 x n^2 matrices in the
//! eigenbasis of the state. Index `a * n + b` corresponds to the matrix unit
//! `E_ab`.

use crate::linalg::{frobenius, matrix_unit, max_abs, pair_index, CMat};
use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct SuperOperator {
    n: usize,
    mat: CMat,
}

impl SuperOperator {
    /// Wraps an n^2 x n^2 matrix. Panics on a size mismatch.
    pub fn from_matrix(n: usize, mat: CMat) -> Self {
        assert_eq!(mat.nrows(), n * n, "superoperator must be n^2 x n^2");
        assert_eq!(mat.ncols(), n * n, "superoperator must be n^2 x n^2");
        Self { n, mat }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_matrix(n, CMat::zeros(n * n, n * n))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_matrix(n, CMat::identity(n * n, n * n))
    }

    /// `X -> a X`.
    pub fn left(a: &CMat) -> Self {
        let n = a.nrows();
        let mut mat = CMat::zeros(n * n, n * n);
        for i in 0..n {
            for k in 0..n {
                let v = a[(i, k)];
                if v == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for b in 0..n {
                    mat[(pair_index(n, i, b), pair_index(n, k, b))] = v;
                }
            }
        }
        Self { n, mat }
    }

    /// `X -> X b`.
    pub fn right(b: &CMat) -> Self {
        let n = b.nrows();
        let mut mat = CMat::zeros(n * n, n * n);
        for l in 0..n {
            for j in 0..n {
                let v = b[(l, j)];
                if v == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for a in 0..n {
                    mat[(pair_index(n, a, j), pair_index(n, a, l))] = v;
                }
            }
        }
        Self { n, mat }
    }

    /// `X -> a X b`.
    pub fn sandwich(a: &CMat, b: &CMat) -> Self {
        let n = a.nrows();
        let mut mat = CMat::zeros(n * n, n * n);
        for i in 0..n {
            for k in 0..n {
                let av = a[(i, k)];
                if av == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for l in 0..n {
                    for j in 0..n {
                        mat[(pair_index(n, i, j), pair_index(n, k, l))] += av * b[(l, j)];
                    }
                }
            }
        }
        Self { n, mat }
    }

    /// Builds the matrix of a linear map from its images of the matrix units.
    pub fn from_fn<F: Fn(&CMat) -> CMat>(n: usize, f: F) -> Self {
        let mut mat = CMat::zeros(n * n, n * n);
        for a in 0..n {
            for b in 0..n {
                let image = f(&matrix_unit(n, a, b));
                let col = pair_index(n, a, b);
                for i in 0..n {
                    for j in 0..n {
                        mat[(pair_index(n, i, j), col)] = image[(i, j)];
                    }
                }
            }
        }
        Self { n, mat }
    }

    /// Side length of the matrices the operator acts on.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    pub fn entry(&self, out_a: usize, out_b: usize, in_a: usize, in_b: usize) -> Complex64 {
        self.mat[(pair_index(self.n, out_a, out_b), pair_index(self.n, in_a, in_b))]
    }

    /// Applies the map to an eigenbasis matrix.
    pub fn apply_eigen(&self, x: &CMat) -> CMat {
        let n = self.n;
        let mut out = CMat::zeros(n, n);
        for p in 0..n * n {
            let mut acc = Complex64::new(0.0, 0.0);
            for q in 0..n * n {
                acc += self.mat[(p, q)] * x[(q / n, q % n)];
            }
            out[(p / n, p % n)] = acc;
        }
        out
    }

    /// Hilbert-Schmidt adjoint.
    pub fn adjoint(&self) -> Self {
        Self {
            n: self.n,
            mat: self.mat.adjoint(),
        }
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            mat: &self.mat * &other.mat,
        }
    }

    /// `J K J` with `J X = X*`.
    pub fn j_conjugate(&self) -> Self {
        let n = self.n;
        let mut mat = CMat::zeros(n * n, n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        mat[(pair_index(n, a, b), pair_index(n, c, d))] =
                            self.mat[(pair_index(n, b, a), pair_index(n, d, c))].conj();
                    }
                }
            }
        }
        Self { n, mat }
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius(&self.mat)
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.mat)
    }

    /// `||K - K*||_F`.
    pub fn self_adjointness_residual(&self) -> f64 {
        frobenius(&(&self.mat - self.mat.adjoint()))
    }

    /// `||JKJ - K||_F`.
    pub fn j_reality_residual(&self) -> f64 {
        frobenius(&(self.j_conjugate().mat - &self.mat))
    }

    /// Multiplies entry `[(a,b),(c,d)]` by `w(a, b, c, d)`.
    pub fn map_entries<F: Fn(usize, usize, usize, usize) -> Complex64>(&self, w: F) -> Self {
        let n = self.n;
        let mut mat = self.mat.clone();
        for a in 0..n {
            for b in 0..n {
                let row = pair_index(n, a, b);
                for c in 0..n {
                    for d in 0..n {
                        mat[(row, pair_index(n, c, d))] *= w(a, b, c, d);
                    }
                }
            }
        }
        Self { n, mat }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            n: self.n,
            mat: &self.mat * s,
        }
    }
}

impl Add for &SuperOperator {
    type Output = SuperOperator;
    fn add(self, rhs: &SuperOperator) -> SuperOperator {
        SuperOperator {
            n: self.n,
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl Sub for &SuperOperator {
    type Output = SuperOperator;
    fn sub(self, rhs: &SuperOperator) -> SuperOperator {
        SuperOperator {
            n: self.n,
            mat: &self.mat - &rhs.mat,
        }
    }
}

impl Mul for &SuperOperator {
    type Output = SuperOperator;
    fn mul(self, rhs: &SuperOperator) -> SuperOperator {
        self.compose(rhs)
    }
}

impl Neg for &SuperOperator {
    type Output = SuperOperator;
    fn neg(self) -> SuperOperator {
        SuperOperator {
            n: self.n,
            mat: -&self.mat,
        }
    }
}
