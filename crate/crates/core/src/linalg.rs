//! Dense complex matrix helpers shared by the rest of the crate.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Frobenius norm.
pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Hilbert-Schmidt inner product tr(a† b).
pub fn hs_inner(a: &CMat, b: &CMat) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn trace(m: &CMat) -> C64 {
    m.diagonal().iter().sum()
}

/// ‖M†M − 1‖_F, the distance of `m` from having orthonormal columns.
pub fn isometry_residual(m: &CMat) -> f64 {
    let gram = m.adjoint() * m;
    frobenius(&(gram - identity(m.ncols())))
}

/// Maximum entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Modified Gram-Schmidt (two passes) on the columns of `m`.
///
/// Columns that become numerically dependent are dropped, so the output may
/// have fewer columns than the input.
pub fn orthonormalize_columns(m: &CMat, tol: f64) -> CMat {
    let mut kept: Vec<nalgebra::DVector<C64>> = Vec::with_capacity(m.ncols());
    for j in 0..m.ncols() {
        let mut v = m.column(j).into_owned();
        for _ in 0..2 {
            for q in &kept {
                let proj = q.dotc(&v);
                v -= q * proj;
            }
        }
        let norm = v.norm();
        if norm > tol {
            kept.push(v / C64::new(norm, 0.0));
        }
    }
    if kept.is_empty() {
        return CMat::zeros(m.nrows(), 0);
    }
    CMat::from_columns(&kept)
}

/// Orthonormal basis (as columns) of the kernel of `a`.
///
/// Singular values below `tol` count as zero. The matrix is padded with zero
/// rows so the decomposition yields a full set of right singular vectors.
pub fn null_space(a: &CMat, tol: f64) -> CMat {
    let n = a.ncols();
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    let rows = a.nrows().max(n);
    let mut padded = CMat::zeros(rows, n);
    padded.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let kernel: Vec<_> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s < tol)
        .map(|(i, _)| v_t.row(i).adjoint())
        .collect();
    if kernel.is_empty() {
        return CMat::zeros(n, 0);
    }
    CMat::from_columns(&kernel)
}

/// exp(−iθH) for Hermitian `h`, by eigendecomposition.
pub fn exp_hermitian(h: &CMat, theta: f64) -> CMat {
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = CMat::from_diagonal(&eig.eigenvalues.map(|l| C64::from_polar(1.0, -theta * l)));
    v * phases * v.adjoint()
}

/// Block-diagonal matrix from square blocks, in order.
pub fn block_diag(blocks: &[CMat]) -> CMat {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(n, n);
    let mut offset = 0;
    for b in blocks {
        out.view_mut((offset, offset), (b.nrows(), b.ncols())).copy_from(b);
        offset += b.nrows();
    }
    out
}

/// Real sparse operator stored as (row, col, value) triplets.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOp {
    pub dim: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl SparseOp {
    pub fn new(dim: usize) -> Self {
        SparseOp {
            dim,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        if value != 0.0 {
            self.entries.push((row, col, value));
        }
    }

    pub fn transpose(&self) -> SparseOp {
        SparseOp {
            dim: self.dim,
            entries: self.entries.iter().map(|&(r, c, v)| (c, r, v)).collect(),
        }
    }

    pub fn to_dense(&self) -> CMat {
        let mut m = CMat::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += C64::new(v, 0.0);
        }
        m
    }

    /// Applies the operator to every column of `state`.
    pub fn apply(&self, state: &CMat) -> CMat {
        let mut out = CMat::zeros(self.dim, state.ncols());
        for &(r, c, v) in &self.entries {
            for k in 0..state.ncols() {
                out[(r, k)] += state[(c, k)] * v;
            }
        }
        out
    }
}

/// Applies a product of single-site operators to each column of `state`.
///
/// `state` lives on the tensor product with local dimensions `site_dims`
/// (row-major, site 0 most significant). Sites not listed get the identity.
pub fn apply_local(site_dims: &[usize], factors: &[(usize, &CMat)], state: &CMat) -> CMat {
    let mut current = state.clone();
    for &(site, op) in factors {
        let q = site_dims[site];
        debug_assert_eq!(op.nrows(), q);
        let right: usize = site_dims[site + 1..].iter().product();
        let left: usize = site_dims[..site].iter().product();
        let mut next = CMat::zeros(current.nrows(), current.ncols());
        for col in 0..current.ncols() {
            for l in 0..left {
                for r in 0..right {
                    for a in 0..q {
                        let mut acc = ZERO;
                        for b in 0..q {
                            let o = op[(a, b)];
                            if o != ZERO {
                                acc += o * current[((l * q + b) * right + r, col)];
                            }
                        }
                        next[((l * q + a) * right + r, col)] = acc;
                    }
                }
            }
        }
        current = next;
    }
    current
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_wide_matrix() {
        let a = CMat::from_row_slice(1, 3, &[ONE, ONE, ONE]);
        let k = null_space(&a, 1e-9);
        assert_eq!(k.ncols(), 2);
        assert!(frobenius(&(&a * &k)) < 1e-12);
        assert!(isometry_residual(&k) < 1e-12);
    }

    #[test]
    fn apply_local_matches_kronecker() {
        let x = CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let z3 = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![ONE, ZERO, -ONE]));
        let dims = [2, 3, 2];
        let full = kron(&kron(&x, &z3), &identity(2));
        let state = CMat::from_fn(12, 2, |i, j| c(i as f64 + 0.5 * j as f64, j as f64 - 0.1 * i as f64));
        let fast = apply_local(&dims, &[(0, &x), (1, &z3)], &state);
        assert!(frobenius(&(fast - full * state)) < 1e-12);
    }

    #[test]
    fn exp_hermitian_is_unitary() {
        let h = CMat::from_row_slice(2, 2, &[ONE, c(0.0, -1.0), c(0.0, 1.0), -ONE]);
        let u = exp_hermitian(&h, 0.7);
        assert!(isometry_residual(&u) < 1e-12);
    }
}
