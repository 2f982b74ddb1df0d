//! Dense complex linear algebra helpers shared by every module.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. Hermitian eigendecompositions
//! are canonicalized so that repeated runs on the same input produce the same
//! eigenvectors bit for bit:
//!
//! * eigenvalues are sorted in descending order;
//! * eigenvalues closer than [`CLUSTER_TOL`] (relative) form a cluster, are
//!   replaced by the cluster mean, and the cluster's eigenvectors are rebuilt
//!   by Gram-Schmidt on the projected standard basis vectors `P e_1, P e_2, ...`
//!   (so the basis only depends on the spectral projection, not on the solver);
//! * every eigenvector is rotated so that its first component with modulus
//!   above [`PHASE_TOL`] is real and positive.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

/// Relative width used to merge numerically degenerate eigenvalues.
pub const CLUSTER_TOL: f64 = 1e-10;
/// Components smaller than this are skipped when fixing eigenvector phases.
pub const PHASE_TOL: f64 = 1e-10;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(n: usize) -> CMat {
    CMat::zeros(n, n)
}

/// Matrix unit `e_{ij}` (zero-based indices).
pub fn matrix_unit(n: usize, i: usize, j: usize) -> CMat {
    let mut m = zeros(n);
    m[(i, j)] = cr(1.0);
    m
}

pub fn diag_real(values: &[f64]) -> CMat {
    let n = values.len();
    let mut m = zeros(n);
    for (i, v) in values.iter().enumerate() {
        m[(i, i)] = cr(*v);
    }
    m
}

/// Hilbert-Schmidt inner product `Tr(a* b)`, conjugate-linear in `a`.
pub fn hs_inner(a: &CMat, b: &CMat) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn trace(m: &CMat) -> Complex64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Largest entrywise deviation from Hermiticity.
pub fn hermiticity_residual(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * cr(0.5)
}

/// Canonical eigendecomposition of a Hermitian matrix (see module docs).
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Eigenvalues, descending.
    pub values: Vec<f64>,
    /// Unitary whose columns are the matching eigenvectors.
    pub vectors: CMat,
}

impl HermitianEigen {
    pub fn new(m: &CMat) -> Self {
        let n = m.nrows();
        assert_eq!(n, m.ncols(), "eigendecomposition needs a square matrix");
        if n == 0 {
            return Self {
                values: Vec::new(),
                vectors: zeros(0),
            };
        }
        let eig = hermitian_part(m).symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[b]
                .partial_cmp(&eig.eigenvalues[a])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vectors = CMat::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &eig.eigenvectors.column(src));
        }

        let scale = values.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && (values[end - 1] - values[end]).abs() <= CLUSTER_TOL * scale {
                end += 1;
            }
            if end - start > 1 {
                let mean = values[start..end].iter().sum::<f64>() / (end - start) as f64;
                for v in &mut values[start..end] {
                    *v = mean;
                }
                let block = vectors.columns(start, end - start).into_owned();
                let basis = canonical_cluster_basis(&block);
                for (k, col) in basis.into_iter().enumerate() {
                    vectors.set_column(start + k, &col);
                }
            }
            start = end;
        }

        for j in 0..n {
            let pivot = (0..n).map(|i| vectors[(i, j)]).find(|z| z.norm() > PHASE_TOL);
            if let Some(p) = pivot {
                let phase = p.conj() / p.norm();
                for i in 0..n {
                    vectors[(i, j)] *= phase;
                }
            }
        }
        Self { values, vectors }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V diag(f(λ)) V*`.
    pub fn map<F: Fn(f64) -> Complex64>(&self, f: F) -> CMat {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let w = f(self.values[j]);
            for i in 0..n {
                scaled[(i, j)] *= w;
            }
        }
        scaled * self.vectors.adjoint()
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

/// Orthonormal basis of the span of `block`'s columns, rebuilt from the
/// projections of the standard basis vectors in index order.
fn canonical_cluster_basis(block: &CMat) -> Vec<DVector<Complex64>> {
    let n = block.nrows();
    let k = block.ncols();
    let projector = block * block.adjoint();
    let mut basis: Vec<DVector<Complex64>> = Vec::with_capacity(k);
    // Prefer the standard basis vectors with the largest projections so the
    // Gram-Schmidt pivots stay well conditioned.
    let mut candidates: Vec<usize> = (0..n).collect();
    candidates.sort_by(|&a, &b| {
        projector[(b, b)]
            .re
            .partial_cmp(&projector[(a, a)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    for i in candidates {
        if basis.len() == k {
            break;
        }
        let mut v: DVector<Complex64> = projector.column(i).into_owned();
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dotc(&v);
                v -= b * proj;
            }
        }
        let norm = v.norm();
        if norm > 1e-6 {
            basis.push(v / cr(norm));
        }
    }
    // Sort the accepted vectors back into pivot-index order for stability.
    basis.sort_by_key(|v| (0..n).find(|&i| v[i].norm() > PHASE_TOL).unwrap_or(n));
    basis
}

/// Positive spectral part `m_+` of a Hermitian matrix.
pub fn positive_part(m: &CMat) -> CMat {
    HermitianEigen::new(m).map(|v| cr(v.max(0.0)))
}

pub fn min_eigenvalue(m: &CMat) -> f64 {
    HermitianEigen::new(m).min()
}

/// Principal square root of a positive semidefinite matrix.
pub fn psd_sqrt(m: &CMat) -> CMat {
    HermitianEigen::new(m).map(|v| cr(v.max(0.0).sqrt()))
}

/// Matrix exponential of a Hermitian matrix times a real scalar, `exp(s m)`.
pub fn hermitian_exp(m: &CMat, s: f64) -> CMat {
    HermitianEigen::new(m).map(|v| cr((s * v).exp()))
}

/// Row-major vectorization index of `E_{ab}`.
#[inline]
pub fn pair_index(n: usize, a: usize, b: usize) -> usize {
    a * n + b
}

pub fn vectorize(m: &CMat) -> DVector<Complex64> {
    let n = m.nrows();
    DVector::from_fn(n * n, |p, _| m[(p / n, p % n)])
}

pub fn unvectorize(v: &DVector<Complex64>, n: usize) -> CMat {
    CMat::from_fn(n, n, |a, b| v[pair_index(n, a, b)])
}

/// JSON layout of a matrix: rows of `[re, im]` pairs.
pub type MatrixRows = Vec<Vec<[f64; 2]>>;

pub fn to_rows(m: &CMat) -> MatrixRows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

/// Inverse of [`to_rows`]. `None` for ragged or empty input.
pub fn from_rows(rows: &MatrixRows) -> Option<CMat> {
    let r = rows.len();
    let k = rows.first()?.len();
    if k == 0 || rows.iter().any(|row| row.len() != k) {
        return None;
    }
    Some(CMat::from_fn(r, k, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_reconstructs_and_is_descending() {
        let m = CMat::from_row_slice(
            3,
            3,
            &[
                cr(2.0),
                c(0.5, 0.3),
                c(0.0, -1.0),
                c(0.5, -0.3),
                cr(1.0),
                cr(0.2),
                c(0.0, 1.0),
                cr(0.2),
                cr(-1.5),
            ],
        );
        let e = HermitianEigen::new(&m);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        let rec = e.map(cr);
        assert!(max_abs(&(rec - &m)) < 1e-12);
        let u = &e.vectors;
        assert!(max_abs(&(u.adjoint() * u - identity(3))) < 1e-12);
    }

    #[test]
    fn degenerate_cluster_is_canonical() {
        let u = {
            let h = CMat::from_row_slice(
                3,
                3,
                &[
                    cr(0.0),
                    c(1.0, 2.0),
                    cr(0.3),
                    c(1.0, -2.0),
                    cr(0.1),
                    c(0.0, 0.7),
                    cr(0.3),
                    c(0.0, -0.7),
                    cr(-0.4),
                ],
            );
            HermitianEigen::new(&h).vectors
        };
        let m = &u * diag_real(&[0.5, 0.25, 0.25]) * u.adjoint();
        let a = HermitianEigen::new(&m);
        let b = HermitianEigen::new(&m.clone());
        assert_eq!(a.vectors, b.vectors);
        assert_eq!(a.values[1], a.values[2]);
        assert!(max_abs(&(a.map(cr) - &m)) < 1e-12);
    }

    #[test]
    fn phase_convention_first_component_real_positive() {
        let m = CMat::from_row_slice(2, 2, &[cr(1.0), c(0.0, 1.0), c(0.0, -1.0), cr(1.0)]);
        let e = HermitianEigen::new(&m);
        for j in 0..2 {
            let first = e.vectors[(0, j)];
            assert!(first.re > 0.0 && first.im.abs() < 1e-15);
        }
    }

    #[test]
    fn vectorization_round_trip() {
        let m = CMat::from_fn(3, 3, |i, j| c(i as f64, j as f64));
        assert_eq!(unvectorize(&vectorize(&m), 3), m);
    }
}
