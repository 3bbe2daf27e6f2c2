//! Linear combinations of Pauli words on a fixed number of qudits.
//!
//! Every word is stored in normal order `X^a Z^b` under a compact exponent key
//! with the ω-phase folded into its complex coefficient. Normal-ordered words
//! are orthogonal under the Hilbert–Schmidt product, so coefficients are
//! exactly the expansion of the operator in that basis.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::gpauli::{DenseCap, DenseOperator, PauliWord};
use crate::linalg::Csr;
use crate::scalar::{root_of_unity, Amp, Real};

/// Exponents `[a_0 .. a_{n-1}, b_0 .. b_{n-1}]`.
pub type Key = Box<[u8]>;

#[derive(Clone, Debug)]
pub struct PauliSum<T: Real> {
    d: u32,
    n: usize,
    roots: Vec<Amp<T>>,
    terms: HashMap<Key, Amp<T>>,
}

fn zero<T: Real>() -> Amp<T> {
    Complex::new(T::zero(), T::zero())
}

impl<T: Real> PauliSum<T> {
    pub fn zero(d: u32, n: usize) -> Self {
        assert!((2..=255).contains(&d), "level count must fit the key encoding");
        PauliSum {
            d,
            n,
            roots: (0..d).map(|m| root_of_unity(d, m as i64)).collect(),
            terms: HashMap::new(),
        }
    }

    pub fn identity(d: u32, n: usize) -> Self {
        Self::scalar(d, n, Complex::new(T::one(), T::zero()))
    }

    pub fn scalar(d: u32, n: usize, c: Amp<T>) -> Self {
        let mut s = Self::zero(d, n);
        s.add_term(vec![0u8; 2 * n].into_boxed_slice(), c);
        s
    }

    pub fn from_word(w: &PauliWord, n: usize) -> Result<Self> {
        if w.span() > n {
            return Err(invalid(format!("word touches edge {} of {n}", w.span() - 1)));
        }
        let mut s = Self::zero(w.d(), n);
        let c = s.roots[w.phase() as usize];
        s.add_term(word_key(w, n), c);
        Ok(s)
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn edges(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Key, &Amp<T>)> {
        self.terms.iter()
    }

    pub fn coef(&self, key: &[u8]) -> Amp<T> {
        self.terms.get(key).copied().unwrap_or_else(zero)
    }

    pub fn identity_coef(&self) -> Amp<T> {
        self.coef(&vec![0u8; 2 * self.n])
    }

    /// Coefficient of a word, phase included (`w = ω^n W` has coefficient `ω^{-n} c_W`).
    pub fn word_coef(&self, w: &PauliWord) -> Amp<T> {
        self.coef(&word_key(w, self.n)) * self.roots[w.phase() as usize].conj()
    }

    pub fn add_term(&mut self, key: Key, c: Amp<T>) {
        debug_assert_eq!(key.len(), 2 * self.n);
        let slot = self.terms.entry(key).or_insert_with(zero);
        *slot += c;
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.d != other.d {
            return Err(Error::LevelMismatch(self.d, other.d));
        }
        if self.n != other.n {
            return Err(invalid(format!(
                "edge counts differ: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (k, &c) in &other.terms {
            out.add_term(k.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex::new(-T::one(), T::zero())))
    }

    pub fn scale(&self, c: Amp<T>) -> Self {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= c;
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let n = self.n;
        let d = self.d;
        let mut out = Self::zero(self.d, n);
        out.terms.reserve(self.terms.len() * other.terms.len());
        let mut key = vec![0u8; 2 * n];
        for (k1, &c1) in &self.terms {
            for (k2, &c2) in &other.terms {
                let mut phase = 0u32;
                for j in 0..n {
                    phase += k1[n + j] as u32 * k2[j] as u32;
                    key[j] = ((k1[j] as u32 + k2[j] as u32) % d) as u8;
                    key[n + j] = ((k1[n + j] as u32 + k2[n + j] as u32) % d) as u8;
                }
                let c = c1 * c2 * self.roots[(phase % d) as usize];
                out.add_term(key.clone().into_boxed_slice(), c);
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> Self {
        // (c X^a Z^b)† = conj(c) ω^{a·b} X^{-a} Z^{-b}
        let n = self.n;
        let d = self.d;
        let mut out = Self::zero(d, n);
        for (k, &c) in &self.terms {
            let mut ab = 0u32;
            let mut key = vec![0u8; 2 * n];
            for j in 0..n {
                ab += k[j] as u32 * k[n + j] as u32;
                key[j] = ((d - k[j] as u32) % d) as u8;
                key[n + j] = ((d - k[n + j] as u32) % d) as u8;
            }
            out.add_term(key.into_boxed_slice(), c.conj() * self.roots[(ab % d) as usize]);
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.add(&other.mul(self)?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::identity(self.d, self.n);
        for _ in 0..e {
            acc = acc.mul(self).expect("same shape");
        }
        acc
    }

    /// Drops coefficients with modulus at most `tol`.
    pub fn pruned(&self, tol: T) -> Self {
        let mut out = self.clone();
        out.terms.retain(|_, c| c.norm() > tol);
        out
    }

    pub fn max_coef(&self) -> T {
        self.terms.values().map(|c| c.norm()).fold(T::zero(), T::max)
    }

    /// Hilbert-space dimension `d^n` as a scalar.
    pub fn dim_scalar(&self) -> T {
        T::lit(self.d as f64).powi(self.n as i32)
    }

    pub fn trace(&self) -> Amp<T> {
        self.identity_coef() * self.dim_scalar()
    }

    /// `Tr(self† · other)`.
    pub fn hs_inner(&self, other: &Self) -> Result<Amp<T>> {
        self.check(other)?;
        let mut acc = zero::<T>();
        for (k, &c) in &self.terms {
            if let Some(&o) = other.terms.get(k) {
                acc += c.conj() * o;
            }
        }
        Ok(acc * self.dim_scalar())
    }

    pub fn dim(&self) -> Result<usize> {
        (self.d as usize)
            .checked_pow(self.n as u32)
            .ok_or_else(|| invalid("Hilbert dimension overflows usize"))
    }

    fn strides(&self) -> Vec<usize> {
        let d = self.d as usize;
        (0..self.n).map(|e| d.pow((self.n - 1 - e) as u32)).collect()
    }

    /// Image of basis state `index` under the normal-ordered word `key`.
    fn image(&self, key: &[u8], index: usize, strides: &[usize]) -> (usize, u32) {
        let d = self.d as usize;
        let mut out = 0usize;
        let mut phase = 0u32;
        for j in 0..self.n {
            let digit = (index / strides[j]) % d;
            phase += key[self.n + j] as u32 * digit as u32;
            out += ((digit + key[j] as usize) % d) * strides[j];
        }
        (out, phase % self.d)
    }

    /// Applies the operator to a state vector in the computational basis.
    pub fn apply(&self, psi: &[Amp<T>]) -> Result<Vec<Amp<T>>> {
        let dim = self.dim()?;
        if psi.len() != dim {
            return Err(invalid(format!("state has length {} but dim is {dim}", psi.len())));
        }
        let strides = self.strides();
        let mut out = vec![zero::<T>(); dim];
        for (k, &c) in &self.terms {
            for (i, &a) in psi.iter().enumerate() {
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let (o, ph) = self.image(k, i, &strides);
                out[o] += c * self.roots[ph as usize] * a;
            }
        }
        Ok(out)
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, psi: &[Amp<T>]) -> Result<Amp<T>> {
        let a = self.apply(psi)?;
        Ok(psi.iter().zip(&a).map(|(p, q)| p.conj() * q).sum())
    }

    /// Per-column entries `(row, value)` of the matrix realization.
    fn columns(&self) -> Result<Vec<Vec<(usize, Amp<T>)>>> {
        let dim = self.dim()?;
        let strides = self.strides();
        let mut cols = vec![Vec::with_capacity(self.terms.len()); dim];
        for (k, &c) in &self.terms {
            for (col, list) in cols.iter_mut().enumerate() {
                let (row, ph) = self.image(k, col, &strides);
                list.push((row, c * self.roots[ph as usize]));
            }
        }
        Ok(cols)
    }

    /// Largest modulus among matrix entries, computed without a dense matrix.
    pub fn max_abs_entry(&self) -> Result<T> {
        let dim = self.dim()?;
        let strides = self.strides();
        let terms: Vec<(&Key, Amp<T>)> = self.terms.iter().map(|(k, &c)| (k, c)).collect();
        let mut worst = T::zero();
        let mut col: Vec<(usize, Amp<T>)> = Vec::with_capacity(terms.len());
        for index in 0..dim {
            col.clear();
            for &(k, c) in &terms {
                let (row, ph) = self.image(k, index, &strides);
                col.push((row, c * self.roots[ph as usize]));
            }
            col.sort_by_key(|&(r, _)| r);
            let mut i = 0;
            while i < col.len() {
                let r = col[i].0;
                let mut acc = zero::<T>();
                while i < col.len() && col[i].0 == r {
                    acc += col[i].1;
                    i += 1;
                }
                worst = worst.max(acc.norm());
            }
        }
        Ok(worst)
    }

    pub fn to_csr(&self) -> Result<Csr<T>> {
        let dim = self.dim()?;
        let mut rows = vec![Vec::new(); dim];
        for (col, list) in self.columns()?.into_iter().enumerate() {
            for (row, v) in list {
                rows[row].push((col, v));
            }
        }
        Ok(Csr::from_rows(dim, rows))
    }

    pub fn to_dense(&self, cap: DenseCap) -> Result<DenseOperator<T>> {
        let dim = cap.check(self.d, self.n)?;
        let mut m = DMatrix::from_element(dim, dim, zero::<T>());
        for (col, list) in self.columns()?.into_iter().enumerate() {
            for (row, v) in list {
                m[(row, col)] += v;
            }
        }
        Ok(DenseOperator::new(m))
    }

    /// Words of the sum with their coefficients, phase kept in the coefficient.
    pub fn words(&self) -> Vec<(PauliWord, Amp<T>)> {
        self.terms
            .iter()
            .map(|(k, &c)| (key_word(self.d, k), c))
            .collect()
    }
}

pub fn word_key(w: &PauliWord, n: usize) -> Key {
    let mut key = vec![0u8; 2 * n];
    for (e, a) in w.x_exponents() {
        key[e] = a as u8;
    }
    for (e, b) in w.z_exponents() {
        key[n + e] = b as u8;
    }
    key.into_boxed_slice()
}

/// Phase-free word with the exponents of `key`.
pub fn key_word(d: u32, key: &[u8]) -> PauliWord {
    let n = key.len() / 2;
    PauliWord::from_parts(
        d,
        0,
        (0..n).map(|j| (j, key[j] as i64)),
        (0..n).map(|j| (j, key[n + j] as i64)),
    )
}
