//! Dense complex matrix helpers shared by the representation, calculus and
//! projector code.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn zeros(dim: usize) -> CMatrix {
    CMatrix::zeros(dim, dim)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Matrix product that skips exact zeros in both factors.
///
/// Every operator built here (generators, Casimirs, equivariant projectors)
/// is banded in the tensor basis, so this runs in `O(n * band^2)` instead of
/// `O(n^3)`. Dense inputs fall back to ordinary cost.
pub fn mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.ncols(), b.nrows(), "matrix product shape mismatch");
    let zero = Complex64::new(0.0, 0.0);
    let a_cols: Vec<Vec<(usize, Complex64)>> = a
        .column_iter()
        .map(|col| {
            col.iter()
                .enumerate()
                .filter(|(_, z)| **z != zero)
                .map(|(i, z)| (i, *z))
                .collect()
        })
        .collect();
    let mut out = CMatrix::zeros(a.nrows(), b.ncols());
    for (j, b_col) in b.column_iter().enumerate() {
        let mut out_col = out.column_mut(j);
        for (k, &bkj) in b_col.iter().enumerate() {
            if bkj == zero {
                continue;
            }
            for &(i, aik) in &a_cols[k] {
                out_col[i] += aik * bkj;
            }
        }
    }
    out
}

/// `[a, b] = ab - ba`
pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    mul(a, b) - mul(b, a)
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hilbert-Schmidt pairing `Tr(a^dagger b)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn hermiticity_gap(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Trace over the second tensor factor of a matrix laid out as
/// `kron(A, B)` with `B` of dimension `fiber_dim`.
pub fn partial_trace_fiber(m: &CMatrix, fiber_dim: usize) -> CMatrix {
    let base = m.nrows() / fiber_dim;
    CMatrix::from_fn(base, base, |i, j| {
        (0..fiber_dim)
            .map(|k| m[(i * fiber_dim + k, j * fiber_dim + k)])
            .sum()
    })
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), order.len(), |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// `exp(-i t H)` for Hermitian `H`, via its eigendecomposition.
pub fn unitary_exp(h: &CMatrix, t: f64) -> CMatrix {
    let eig = h.clone().symmetric_eigen();
    let phases = CMatrix::from_diagonal(&CVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| (-I * (t * l)).exp()),
    ));
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

/// Levi-Civita symbol on zero-based indices.
pub fn levi_civita(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// The index completing `(a, b)` to a permutation of `{0, 1, 2}`.
pub fn third_index(a: usize, b: usize) -> usize {
    3 - a - b
}
