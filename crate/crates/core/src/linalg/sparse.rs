use nalgebra::DMatrix;
use num_complex::Complex;

use super::{eigh, C64};
use crate::scalar::{Amp, Real};

/// Compressed sparse row matrix with complex entries.
#[derive(Clone, Debug)]
pub struct Csr<T: Real> {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<Amp<T>>,
}

impl<T: Real> Csr<T> {
    /// Builds from per-row entry lists; duplicate columns are summed and exact zeros dropped.
    pub fn from_rows(n: usize, rows: Vec<Vec<(usize, Amp<T>)>>) -> Self {
        assert_eq!(rows.len(), n);
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            let mut i = 0;
            while i < row.len() {
                let col = row[i].0;
                let mut acc = Complex::new(T::zero(), T::zero());
                while i < row.len() && row[i].0 == col {
                    acc += row[i].1;
                    i += 1;
                }
                if acc.re != T::zero() || acc.im != T::zero() {
                    indices.push(col);
                    values.push(acc);
                }
            }
            indptr.push(indices.len());
        }
        Csr {
            n,
            indptr,
            indices,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Amp<T>)> + '_ {
        let span = self.indptr[i]..self.indptr[i + 1];
        self.indices[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> Amp<T> {
        self.row(i)
            .find(|&(c, _)| c == j)
            .map_or(Complex::new(T::zero(), T::zero()), |(_, v)| v)
    }

    pub fn matvec(&self, v: &[Amp<T>]) -> Vec<Amp<T>> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| {
                self.row(i)
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (c, x)| acc + x * v[c])
            })
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut rows = vec![Vec::new(); self.n];
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                rows[j].push((i, v.conj()));
            }
        }
        Csr::from_rows(self.n, rows)
    }

    /// Largest `|A_ij - B_ij|` over the union of both patterns.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.n, other.n);
        let mut worst = T::zero();
        let mut acc: std::collections::HashMap<usize, Amp<T>> = std::collections::HashMap::new();
        for i in 0..self.n {
            acc.clear();
            for (j, v) in self.row(i) {
                *acc.entry(j).or_insert_with(|| Complex::new(T::zero(), T::zero())) += v;
            }
            for (j, v) in other.row(i) {
                *acc.entry(j).or_insert_with(|| Complex::new(T::zero(), T::zero())) -= v;
            }
            for v in acc.values() {
                worst = worst.max(v.norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    /// Largest `|A_ij - conj(A_ji)|`.
    pub fn hermiticity_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Connected components of the nonzero pattern (treated as undirected).
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for i in 0..self.n {
            for (j, _) in self.row(i) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut label = vec![usize::MAX; self.n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for i in 0..self.n {
            let r = find(&mut parent, i);
            if label[r] == usize::MAX {
                label[r] = out.len();
                out.push(Vec::new());
            }
            out[label[r]].push(i);
        }
        out
    }

    /// Dense `f64` copy of the principal submatrix on `indices`.
    pub fn dense_block(&self, indices: &[usize]) -> DMatrix<C64> {
        let mut pos = std::collections::HashMap::with_capacity(indices.len());
        for (p, &i) in indices.iter().enumerate() {
            pos.insert(i, p);
        }
        let mut m = DMatrix::from_element(indices.len(), indices.len(), C64::new(0.0, 0.0));
        for (p, &i) in indices.iter().enumerate() {
            for (j, v) in self.row(i) {
                if let Some(&q) = pos.get(&j) {
                    m[(p, q)] = C64::new(v.re.as_f64(), v.im.as_f64());
                }
            }
        }
        m
    }

    pub fn to_dense(&self) -> DMatrix<Amp<T>> {
        let mut m = DMatrix::from_element(self.n, self.n, Complex::new(T::zero(), T::zero()));
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }
}

/// Eigendecomposition of one invariant block.
#[derive(Clone, Debug)]
pub struct SpectralBlock {
    /// Basis indices spanned by the block, ascending.
    pub indices: Vec<usize>,
    /// Eigenvalues, ascending.
    pub values: Vec<f64>,
    /// Columns are eigenvectors in the local `indices` ordering.
    pub vectors: DMatrix<C64>,
}

/// Spectrum of a Hermitian sparse matrix assembled block by block.
#[derive(Clone, Debug)]
pub struct BlockSpectrum {
    pub blocks: Vec<SpectralBlock>,
    /// `(block, position inside block)` for every basis index.
    pub location: Vec<(usize, usize)>,
}

impl BlockSpectrum {
    pub fn new<T: Real>(h: &Csr<T>) -> Self {
        let mut location = vec![(0, 0); h.dim()];
        let blocks: Vec<SpectralBlock> = h
            .components()
            .into_iter()
            .enumerate()
            .map(|(b, indices)| {
                for (p, &i) in indices.iter().enumerate() {
                    location[i] = (b, p);
                }
                let (values, vectors) = eigh(h.dense_block(&indices));
                SpectralBlock {
                    indices,
                    values,
                    vectors,
                }
            })
            .collect();
        BlockSpectrum { blocks, location }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self.blocks.iter().flat_map(|b| b.values.iter().copied()).collect();
        all.sort_by(f64::total_cmp);
        all
    }

    pub fn largest_block(&self) -> usize {
        self.blocks.iter().map(|b| b.indices.len()).max().unwrap_or(0)
    }
}
