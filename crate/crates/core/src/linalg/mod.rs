//! Numerical kernels: sparse storage, block eigensolvers, matrix exponentials.
//!
//! Decompositions run in `f64` through nalgebra regardless of the caller's
//! scalar type; results are cast back at the module boundary.

mod expm;
mod sparse;

pub use expm::{expm, expm_multiply, one_norm};
pub use sparse::{BlockSpectrum, Csr, SpectralBlock};

use nalgebra::DMatrix;
use num_complex::Complex;

pub type C64 = Complex<f64>;

/// Rank of `m` counting singular values above `rel_tol · σ_max`.
pub fn numerical_rank(m: DMatrix<C64>, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
pub fn eigh(m: DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = m.nrows();
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Groups sorted values into clusters whose neighbours differ by at most `tol`.
pub fn cluster_sorted(values: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize, f64)> = Vec::new();
    for &v in values {
        match out.last_mut() {
            Some((_, count, last)) if (v - *last).abs() <= tol => {
                *count += 1;
                *last = v;
            }
            _ => out.push((v, 1, v)),
        }
    }
    out.into_iter().map(|(first, n, _)| (first, n)).collect()
}
