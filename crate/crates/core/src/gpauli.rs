//! Generalized Pauli (Weyl–Heisenberg) algebra over Z_d.
//!
//! A [`PauliWord`] is the algebra element `ω^n ∏_j X_j^{a_j} Z_j^{b_j}` with
//! every exponent reduced mod `d`. On the computational basis `X|n⟩ = |n+1⟩`
//! and `Z|n⟩ = ω^n|n⟩`, hence `ZX = ωXZ`.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::linalg;
use crate::scalar::{root_of_unity, Amp, Real};

/// Default cap on the number of entries of a dense realization (`dim²`).
pub const DEFAULT_DENSE_ENTRY_CAP: u128 = 1 << 26;

/// Size limits for explicit matrix realizations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DenseCap {
    pub max_entries: u128,
    /// Longest state vector any routine may allocate.
    pub max_state: u128,
}

/// Default cap on the length of explicit state vectors.
pub const DEFAULT_STATE_CAP: u128 = 1 << 24;

impl Default for DenseCap {
    fn default() -> Self {
        DenseCap {
            max_entries: DEFAULT_DENSE_ENTRY_CAP,
            max_state: DEFAULT_STATE_CAP,
        }
    }
}

impl DenseCap {
    pub fn check(&self, d: u32, edges: usize) -> Result<usize> {
        let dim = (d as u128).checked_pow(edges as u32).unwrap_or(u128::MAX);
        let entries = dim.saturating_mul(dim);
        if entries > self.max_entries {
            return Err(Error::SizeCap {
                what: format!("dense realization of {edges} qudits (d={d})"),
                needed: entries,
                cap: self.max_entries,
                hint: "use the sparse or charge-sector routines instead".into(),
            });
        }
        Ok(dim as usize)
    }

    pub fn check_state(&self, d: u32, edges: usize) -> Result<usize> {
        let dim = (d as u128).checked_pow(edges as u32).unwrap_or(u128::MAX);
        if dim > self.max_state {
            return Err(Error::SizeCap {
                what: format!("state vector on {edges} qudits (d={d})"),
                needed: dim,
                cap: self.max_state,
                hint: "use the charge-sector engines (reduced or mc) instead".into(),
            });
        }
        Ok(dim as usize)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliWord {
    d: u32,
    phase: u32,
    xpow: BTreeMap<usize, u32>,
    zpow: BTreeMap<usize, u32>,
}

fn reduce(d: u32, e: i64) -> u32 {
    e.rem_euclid(d as i64) as u32
}

impl PauliWord {
    pub fn identity(d: u32) -> Self {
        assert!(d >= 2, "qudit dimension must be at least 2");
        PauliWord {
            d,
            phase: 0,
            xpow: BTreeMap::new(),
            zpow: BTreeMap::new(),
        }
    }

    pub fn x(d: u32, edge: usize, power: i64) -> Self {
        let mut w = Self::identity(d);
        w.set_x(edge, power);
        w
    }

    pub fn z(d: u32, edge: usize, power: i64) -> Self {
        let mut w = Self::identity(d);
        w.set_z(edge, power);
        w
    }

    /// Builds `ω^phase ∏ X^{a} Z^{b}` from raw (possibly unreduced) exponents.
    pub fn from_parts(
        d: u32,
        phase: i64,
        xs: impl IntoIterator<Item = (usize, i64)>,
        zs: impl IntoIterator<Item = (usize, i64)>,
    ) -> Self {
        let mut w = Self::identity(d);
        w.phase = reduce(d, phase);
        for (e, p) in xs {
            let cur = w.xpow(e) as i64;
            w.set_x(e, cur + p);
        }
        for (e, p) in zs {
            let cur = w.zpow(e) as i64;
            w.set_z(e, cur + p);
        }
        w
    }

    fn set_x(&mut self, edge: usize, power: i64) {
        let p = reduce(self.d, power);
        if p == 0 {
            self.xpow.remove(&edge);
        } else {
            self.xpow.insert(edge, p);
        }
    }

    fn set_z(&mut self, edge: usize, power: i64) {
        let p = reduce(self.d, power);
        if p == 0 {
            self.zpow.remove(&edge);
        } else {
            self.zpow.insert(edge, p);
        }
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn phase(&self) -> u32 {
        self.phase
    }

    pub fn xpow(&self, edge: usize) -> u32 {
        self.xpow.get(&edge).copied().unwrap_or(0)
    }

    pub fn zpow(&self, edge: usize) -> u32 {
        self.zpow.get(&edge).copied().unwrap_or(0)
    }

    pub fn x_exponents(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.xpow.iter().map(|(&e, &p)| (e, p))
    }

    pub fn z_exponents(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.zpow.iter().map(|(&e, &p)| (e, p))
    }

    /// Same operator with the global phase dropped.
    pub fn without_phase(&self) -> Self {
        let mut w = self.clone();
        w.phase = 0;
        w
    }

    pub fn with_phase(mut self, phase: i64) -> Self {
        self.phase = reduce(self.d, phase);
        self
    }

    pub fn is_identity(&self) -> bool {
        self.phase == 0 && self.is_scalar()
    }

    /// True when the word is `ω^n · 1`.
    pub fn is_scalar(&self) -> bool {
        self.xpow.is_empty() && self.zpow.is_empty()
    }

    /// One past the largest edge index touched.
    pub fn span(&self) -> usize {
        let mx = self.xpow.keys().next_back().copied();
        let mz = self.zpow.keys().next_back().copied();
        mx.max(mz).map_or(0, |e| e + 1)
    }

    pub fn weight(&self) -> usize {
        let mut support: Vec<usize> = self.xpow.keys().chain(self.zpow.keys()).copied().collect();
        support.sort_unstable();
        support.dedup();
        support.len()
    }

    pub fn adjoint(&self) -> Self {
        // (ω^n X^a Z^b)† = ω^{-n} Z^{-b} X^{-a} = ω^{-n + ab} X^{-a} Z^{-b}
        let mut ab: i64 = 0;
        for (e, &a) in &self.xpow {
            ab += a as i64 * self.zpow(*e) as i64;
        }
        PauliWord::from_parts(
            self.d,
            -(self.phase as i64) + ab,
            self.xpow.iter().map(|(&e, &a)| (e, -(a as i64))),
            self.zpow.iter().map(|(&e, &b)| (e, -(b as i64))),
        )
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = PauliWord::identity(self.d);
        for _ in 0..n {
            acc = word_mul(&acc, self).expect("same level");
        }
        acc
    }

    /// Image of a computational basis state: returns `(index', phase exponent)`.
    ///
    /// Basis indices are row-major with edge 0 as the most significant digit.
    pub fn apply_to_basis(&self, index: usize, edges: usize) -> (usize, u32) {
        let d = self.d as usize;
        let mut phase = self.phase as u64;
        let mut out = index;
        for (&e, &b) in &self.zpow {
            let stride = d.pow((edges - 1 - e) as u32);
            let digit = (index / stride) % d;
            phase += b as u64 * digit as u64;
        }
        for (&e, &a) in &self.xpow {
            let stride = d.pow((edges - 1 - e) as u32);
            let digit = (out / stride) % d;
            let new_digit = (digit + a as usize) % d;
            out = out - digit * stride + new_digit * stride;
        }
        (out, (phase % self.d as u64) as u32)
    }
}

impl fmt::Debug for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w^{}", self.phase)?;
        if self.is_scalar() {
            return write!(f, "·1");
        }
        for (e, p) in &self.xpow {
            write!(f, " X{e}^{p}")?;
        }
        for (e, p) in &self.zpow {
            write!(f, " Z{e}^{p}")?;
        }
        Ok(())
    }
}

/// Normal-ordered product `p·q`.
///
/// Moving every `Z^b` of `p` past the `X^{a'}` of `q` on the same edge
/// contributes `ω^{b a'}`.
pub fn word_mul(p: &PauliWord, q: &PauliWord) -> Result<PauliWord> {
    if p.d != q.d {
        return Err(Error::LevelMismatch(p.d, q.d));
    }
    let mut phase = p.phase as i64 + q.phase as i64;
    for (e, &b) in &p.zpow {
        phase += b as i64 * q.xpow(*e) as i64;
    }
    Ok(PauliWord::from_parts(
        p.d,
        phase,
        p.x_exponents().chain(q.x_exponents()).map(|(e, a)| (e, a as i64)),
        p.z_exponents().chain(q.z_exponents()).map(|(e, b)| (e, b as i64)),
    ))
}

/// Exponent `φ` with `p·q = ω^φ q·p`.
pub fn commutation_phase(p: &PauliWord, q: &PauliWord) -> Result<u32> {
    if p.d != q.d {
        return Err(Error::LevelMismatch(p.d, q.d));
    }
    let mut phi: i64 = 0;
    for (e, &b) in &p.zpow {
        phi += b as i64 * q.xpow(*e) as i64;
    }
    for (e, &a) in &p.xpow {
        phi -= a as i64 * q.zpow(*e) as i64;
    }
    Ok(reduce(p.d, phi))
}

/// Dense complex matrix acting on `(C^d)^{⊗N}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator<T: Real> {
    pub matrix: DMatrix<Amp<T>>,
}

impl<T: Real> DenseOperator<T> {
    pub fn new(matrix: DMatrix<Amp<T>>) -> Self {
        assert_eq!(matrix.nrows(), matrix.ncols(), "operators are square");
        DenseOperator { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(DMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.matrix.transpose().map(|z| z.conj()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(&self.matrix * &other.matrix)
    }

    pub fn trace(&self) -> Amp<T> {
        self.matrix.trace()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    pub fn max_abs(&self) -> T {
        self.matrix.iter().map(|a| a.norm()).fold(T::zero(), T::max)
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        let prod = self.mul(&self.adjoint());
        prod.max_abs_diff(&Self::identity(self.dim())) <= tol
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }
}

/// Tensor-product realization of a word on `edges` qudits.
pub fn dense_matrix<T: Real>(p: &PauliWord, edges: usize, cap: DenseCap) -> Result<DenseOperator<T>> {
    if p.span() > edges {
        return Err(invalid(format!(
            "word touches edge {} but only {edges} edges exist",
            p.span() - 1
        )));
    }
    let dim = cap.check(p.d, edges)?;
    let mut m = DMatrix::from_element(dim, dim, Complex::new(T::zero(), T::zero()));
    for col in 0..dim {
        let (row, ph) = p.apply_to_basis(col, edges);
        m[(row, col)] = root_of_unity(p.d, ph as i64);
    }
    Ok(DenseOperator::new(m))
}

/// Character norm `(1/d³) Σ_g |χ(g)|²` of the single-site computational representation.
pub fn character_inner_product<T: Real>(d: u32) -> T {
    assert!(d >= 2);
    let mut total = T::zero();
    for n in 0..d {
        for m in 0..d {
            for k in 0..d {
                let g = PauliWord::from_parts(d, n as i64, [(0, m as i64)], [(0, k as i64)]);
                let mat: DenseOperator<T> =
                    dense_matrix(&g, 1, DenseCap::default()).expect("single site fits");
                total += mat.trace().norm_sqr();
            }
        }
    }
    total / T::lit((d as f64).powi(3))
}

/// Dimension of the space of matrices commuting with every generator.
pub fn commutant_dimension<T: Real>(generators: &[DenseOperator<T>]) -> Result<usize> {
    let Some(first) = generators.first() else {
        return Err(invalid("at least one generator is required"));
    };
    let dim = first.dim();
    if let Some(g) = generators.iter().find(|g| g.dim() != dim) {
        return Err(invalid(format!(
            "generator dimensions differ: {dim} vs {}",
            g.dim()
        )));
    }
    let unknowns = dim * dim;
    let mut system = DMatrix::from_element(
        generators.len() * unknowns,
        unknowns,
        Complex::new(0.0f64, 0.0),
    );
    for (gi, g) in generators.iter().enumerate() {
        let base = gi * unknowns;
        for i in 0..dim {
            for j in 0..dim {
                let row = base + i * dim + j;
                for k in 0..dim {
                    let gik = g.matrix[(i, k)];
                    let gkj = g.matrix[(k, j)];
                    system[(row, k * dim + j)] += Complex::new(gik.re.as_f64(), gik.im.as_f64());
                    system[(row, i * dim + k)] -= Complex::new(gkj.re.as_f64(), gkj.im.as_f64());
                }
            }
        }
    }
    Ok(unknowns - linalg::numerical_rank(system, 1e-9))
}
