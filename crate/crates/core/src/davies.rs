//! Davies generators for the code coupled to a thermal bath.
//!
//! Each edge couples through Hermitian combinations `S = (σ^μ + σ^{-μ})/√2`
//! of the nontrivial powers of `X` and `Z` (`S = σ^{d/2}` when `2μ = d`).
//! The bath enters through its rates `R(ω)` on the Bohr components `S(ω)`,
//! where `S(ω)` lowers the system energy by `ω`.
//!
//! Two representations are kept. [`DaviesGenerator`] holds jumps as
//! [`PauliSum`]s built from charge bookkeeping and works at any size the
//! Pauli expansion tolerates. [`SparseDavies`] holds jumps as sparse matrices
//! obtained blindly from the Hamiltonian's eigendecomposition.

use std::collections::{HashMap, HashSet};

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::code::CodeInstance;
use crate::error::{invalid, Error, Result};
use crate::gpauli::{commutant_dimension, DenseOperator, PauliWord};
use crate::lattice::Sector;
use crate::linalg::{numerical_rank, BlockSpectrum, Csr, C64};
use crate::pauli_sum::{Key, PauliSum};
use crate::processes::{energy_groups, error_word, jump_catalog, projector};
use crate::scalar::{c, creal, Amp, Real};

/// Default tolerance for grouping Bohr frequencies.
pub const BOHR_TOL: f64 = 1e-9;

/// Bath rates with the negative side fixed by detailed balance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BathSpectrum<T: Real> {
    pub beta: T,
    /// `R(0)`.
    pub r_zero: T,
    /// `R(ω)` for every `ω > 0`.
    pub r_positive: T,
}

impl<T: Real> BathSpectrum<T> {
    pub fn new(beta: T, r_zero: T, r_positive: T) -> Result<Self> {
        if beta.is_nan() || beta < T::zero() {
            return Err(invalid(format!("beta must be non-negative, got {beta}")));
        }
        if !(r_zero >= T::zero() && r_positive >= T::zero()) {
            return Err(invalid("rates must be non-negative"));
        }
        Ok(BathSpectrum {
            beta,
            r_zero,
            r_positive,
        })
    }

    pub fn flat(beta: T, rate: T) -> Result<Self> {
        Self::new(beta, rate, rate)
    }

    /// `R(ω)`; `R(-ω) = e^{-βω} R(ω)` for `ω > 0`. `β = ∞` is allowed.
    pub fn rate(&self, omega: T) -> T {
        if omega.abs() <= T::lit(BOHR_TOL) {
            self.r_zero
        } else if omega > T::zero() {
            self.r_positive
        } else if self.r_positive == T::zero() {
            T::zero()
        } else {
            self.r_positive * (self.beta * omega).exp()
        }
    }
}

/// One Hermitian coupling `S` on an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Coupling {
    pub edge: usize,
    pub sector: Sector,
    /// `μ` with `1 ≤ μ ≤ d/2`.
    pub power: u32,
}

impl Coupling {
    /// `(power, weight)` terms of `S`.
    pub fn terms(&self, d: u32) -> Vec<(u32, f64)> {
        if 2 * self.power == d {
            vec![(self.power, 1.0)]
        } else {
            let w = std::f64::consts::FRAC_1_SQRT_2;
            vec![(self.power, w), (d - self.power, w)]
        }
    }

    pub fn operator<T: Real>(&self, d: u32, n: usize) -> Result<PauliSum<T>> {
        let mut acc = PauliSum::zero(d, n);
        for (m, w) in self.terms(d) {
            let s = PauliSum::from_word(&error_word(d, self.edge, m as i64, self.sector), n)?;
            acc = acc.add(&s.scale(c::<T>(w)))?;
        }
        Ok(acc)
    }
}

/// Couplings per edge: x-sector powers first, then z-sector.
pub fn interaction_operators(ci: &CodeInstance) -> Vec<Coupling> {
    let mut out = Vec::new();
    for edge in 0..ci.edges() {
        for sector in [Sector::X, Sector::Z] {
            for power in 1..=ci.d() / 2 {
                out.push(Coupling { edge, sector, power });
            }
        }
    }
    out
}

/// Bohr components `(ω, S(ω))` of a coupling from charge-energy bookkeeping, ascending in `ω`.
pub fn analytic_components<T: Real>(ci: &CodeInstance, coupling: &Coupling) -> Result<Vec<(f64, PauliSum<T>)>> {
    let d = ci.d();
    let n = ci.edges();
    let mut out: Vec<(f64, PauliSum<T>)> = Vec::new();
    for (m, w) in coupling.terms(d) {
        let sigma = PauliSum::from_word(&error_word(d, coupling.edge, m as i64, coupling.sector), n)?
            .scale(c::<T>(w));
        for (de, labels) in energy_groups(d, m) {
            let omega = -de;
            let mut part = PauliSum::zero(d, n);
            for label in labels {
                part = part.add(&projector::<T>(ci, label, coupling.edge, coupling.sector)?)?;
            }
            let term = sigma.mul(&part)?;
            match out.iter_mut().find(|(o, _)| (o - omega).abs() < BOHR_TOL) {
                Some((_, acc)) => *acc = acc.add(&term)?,
                None => out.push((omega, term)),
            }
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

/// Bohr components from the closed-form qubit/qutrit catalog.
pub fn catalog_components<T: Real>(ci: &CodeInstance, coupling: &Coupling) -> Result<Vec<(f64, PauliSum<T>)>> {
    let d = ci.d();
    let w = if d == 3 { std::f64::consts::FRAC_1_SQRT_2 } else { 1.0 };
    let mut out: Vec<(f64, PauliSum<T>)> = jump_catalog(ci, coupling.edge, coupling.sector)?
        .into_iter()
        .map(|j| {
            Ok((
                j.bohr,
                j.operator::<T>(ci)?.scale(c::<T>(w)),
            ))
        })
        .collect::<Result<_>>()?;
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

/// Which construction supplies the Bohr components.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JumpSource {
    /// Energy grouping of charge labels; any `d`.
    EnergyGroups,
    /// Closed-form catalog; `d ∈ {2, 3}`.
    Catalog,
}

/// A Lindblad jump `L = S(ω)` with rate `R(ω)`.
#[derive(Clone, Debug)]
pub struct Jump<T: Real> {
    pub coupling: Coupling,
    pub bohr: f64,
    pub rate: T,
    pub op: PauliSum<T>,
    adj: PauliSum<T>,
    /// `L†L`.
    damp: PauliSum<T>,
}

impl<T: Real> Jump<T> {
    fn new(coupling: Coupling, bohr: f64, rate: T, op: PauliSum<T>) -> Result<Self> {
        let adj = op.adjoint();
        let damp = adj.mul(&op)?;
        Ok(Jump {
            coupling,
            bohr,
            rate,
            op,
            adj,
            damp,
        })
    }

    pub fn adjoint(&self) -> &PauliSum<T> {
        &self.adj
    }
}

/// Lindblad picture used by [`DaviesGenerator::restricted_matrix`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Picture {
    Heisenberg,
    Schrodinger,
}

#[derive(Clone, Debug)]
pub struct DaviesGenerator<T: Real> {
    d: u32,
    n: usize,
    pub bath: BathSpectrum<T>,
    pub jumps: Vec<Jump<T>>,
    pub hamiltonian: PauliSum<T>,
}

fn half<T: Real>() -> Amp<T> {
    c::<T>(0.5)
}

fn imag<T: Real>(s: T) -> Amp<T> {
    Complex::new(T::zero(), s)
}

impl<T: Real> DaviesGenerator<T> {
    /// Assembles every coupling's components; refuses if `Σ_ω S(ω) ≠ S`.
    pub fn new(ci: &CodeInstance, bath: BathSpectrum<T>, source: JumpSource) -> Result<Self> {
        let d = ci.d();
        let n = ci.edges();
        let mut jumps = Vec::new();
        for coupling in interaction_operators(ci) {
            let comps = match source {
                JumpSource::EnergyGroups => analytic_components::<T>(ci, &coupling)?,
                JumpSource::Catalog => catalog_components::<T>(ci, &coupling)?,
            };
            let mut total = PauliSum::zero(d, n);
            for (_, s) in &comps {
                total = total.add(s)?;
            }
            let defect = total.sub(&coupling.operator::<T>(d, n)?)?.max_coef();
            if defect > T::lit(1e-10) {
                return Err(Error::Verification(format!(
                    "components of {coupling:?} do not sum to the coupling (defect {defect})"
                )));
            }
            for (omega, s) in comps {
                if s.max_coef() <= T::lit(1e-14) {
                    continue;
                }
                jumps.push(Jump::new(coupling, omega, bath.rate(T::lit(omega)), s)?);
            }
        }
        Ok(DaviesGenerator {
            d,
            n,
            bath,
            jumps,
            hamiltonian: ci.hamiltonian::<T>()?,
        })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn edges(&self) -> usize {
        self.n
    }

    fn active(&self, sector: Option<Sector>) -> impl Iterator<Item = &Jump<T>> {
        self.jumps
            .iter()
            .filter(move |j| j.rate != T::zero() && sector.is_none_or(|s| j.coupling.sector == s))
    }

    /// Dissipative part `ℒ(X) = Σ R (L†XL − ½{L†L, X})`, optionally one sector only.
    pub fn heisenberg_sector(&self, x: &PauliSum<T>, sector: Option<Sector>) -> Result<PauliSum<T>> {
        let mut acc = PauliSum::zero(self.d, self.n);
        for j in self.active(sector) {
            let sandwich = j.adj.mul(x)?.mul(&j.op)?;
            let anti = j.damp.anticommutator(x)?.scale(half());
            acc = acc.add(&sandwich.sub(&anti)?.scale(creal(j.rate)))?;
        }
        Ok(acc)
    }

    pub fn heisenberg(&self, x: &PauliSum<T>) -> Result<PauliSum<T>> {
        self.heisenberg_sector(x, None)
    }

    /// Dual dissipator `ℒ†(ρ) = Σ R (LρL† − ½{L†L, ρ})`.
    pub fn schrodinger(&self, rho: &PauliSum<T>) -> Result<PauliSum<T>> {
        let mut acc = PauliSum::zero(self.d, self.n);
        for j in self.active(None) {
            let sandwich = j.op.mul(rho)?.mul(&j.adj)?;
            let anti = j.damp.anticommutator(rho)?.scale(half());
            acc = acc.add(&sandwich.sub(&anti)?.scale(creal(j.rate)))?;
        }
        Ok(acc)
    }

    /// `δ(X) = [H, X]`.
    pub fn delta(&self, x: &PauliSum<T>) -> Result<PauliSum<T>> {
        self.hamiltonian.commutator(x)
    }

    /// `iδ(X) + ℒ(X)`.
    pub fn generator(&self, x: &PauliSum<T>) -> Result<PauliSum<T>> {
        self.heisenberg(x)?.add(&self.delta(x)?.scale(imag(T::one())))
    }

    /// `−i[H, ρ] + ℒ†(ρ)`.
    pub fn dual(&self, rho: &PauliSum<T>) -> Result<PauliSum<T>> {
        self.schrodinger(rho)?.add(&self.delta(rho)?.scale(imag(-T::one())))
    }

    /// Matrix of the generator on the span of the given phase-free words.
    ///
    /// Column `j` holds the expansion of the image of `basis[j]`. Fails if an
    /// image leaves the span.
    pub fn restricted_matrix(&self, basis: &[Key], picture: Picture, with_hamiltonian: bool) -> Result<DMatrix<C64>> {
        let index: HashMap<&[u8], usize> = basis.iter().enumerate().map(|(i, k)| (&k[..], i)).collect();
        let dim = basis.len();
        let mut m = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
        for (col, key) in basis.iter().enumerate() {
            let mut w = PauliSum::zero(self.d, self.n);
            w.add_term(key.clone(), Complex::new(T::one(), T::zero()));
            let image = match (picture, with_hamiltonian) {
                (Picture::Heisenberg, false) => self.heisenberg(&w)?,
                (Picture::Heisenberg, true) => self.generator(&w)?,
                (Picture::Schrodinger, false) => self.schrodinger(&w)?,
                (Picture::Schrodinger, true) => self.dual(&w)?,
            };
            for (k, c) in image.terms() {
                match index.get(&k[..]) {
                    Some(&row) => m[(row, col)] += C64::new(c.re.as_f64(), c.im.as_f64()),
                    None if c.norm() <= T::lit(1e-12) => {}
                    None => {
                        return Err(Error::Verification(
                            "generator image leaves the span of the basis".into(),
                        ))
                    }
                }
            }
        }
        Ok(m)
    }

    /// Sparse copies of the jumps.
    pub fn to_sparse(&self) -> Result<SparseDavies> {
        let jumps = self
            .jumps
            .iter()
            .map(|j| {
                let op = cast_csr(&j.op.to_csr()?);
                Ok(SparseJump {
                    coupling: j.coupling,
                    bohr: j.bohr,
                    rate: j.rate.as_f64(),
                    adj: op.adjoint(),
                    op,
                })
            })
            .collect::<Result<_>>()?;
        Ok(SparseDavies { jumps })
    }
}

fn cast_csr<T: Real>(a: &Csr<T>) -> Csr<f64> {
    let rows = (0..a.dim())
        .map(|i| a.row(i).map(|(j, v)| (j, C64::new(v.re.as_f64(), v.im.as_f64()))).collect())
        .collect();
    Csr::from_rows(a.dim(), rows)
}

/// Bohr components `ω ↦ S(ω) = Σ_{E'−E=ω} Π_E S Π_{E'}` from an eigendecomposition.
///
/// Frequencies within `tol` of each other are merged. Two groups closer
/// than `1000·tol` are reported as ungroupable.
pub fn fourier_components(s: &Csr<f64>, spec: &BlockSpectrum, tol: f64) -> Result<Vec<(f64, Csr<f64>)>> {
    let n = s.dim();
    if spec.location.len() != n {
        return Err(invalid("operator and spectrum dimensions differ"));
    }
    let scale = s.max_abs().max(f64::MIN_POSITIVE);
    let mut pairs: HashMap<(usize, usize), Vec<(usize, usize, C64)>> = HashMap::new();
    for r in 0..n {
        let (br, pr) = spec.location[r];
        for (c, v) in s.row(r) {
            let (bc, pc) = spec.location[c];
            pairs.entry((br, bc)).or_default().push((pr, pc, v));
        }
    }
    let mut keys: Vec<(usize, usize)> = pairs.keys().copied().collect();
    keys.sort_unstable();

    // Rotated blocks V_r† S V_c and the frequencies they carry.
    let mut rotated = Vec::with_capacity(keys.len());
    let mut freqs = Vec::new();
    for &(br, bc) in &keys {
        let (rb, cb) = (&spec.blocks[br], &spec.blocks[bc]);
        let mut blk = DMatrix::from_element(rb.indices.len(), cb.indices.len(), C64::new(0.0, 0.0));
        for &(p, q, v) in &pairs[&(br, bc)] {
            blk[(p, q)] += v;
        }
        let m = rb.vectors.adjoint() * blk * &cb.vectors;
        for p in 0..m.nrows() {
            for q in 0..m.ncols() {
                if m[(p, q)].norm() > 1e-12 * scale {
                    freqs.push(cb.values[q] - rb.values[p]);
                }
            }
        }
        rotated.push((br, bc, m));
    }
    freqs.sort_by(f64::total_cmp);
    let mut groups: Vec<(f64, f64)> = Vec::new();
    for &f in &freqs {
        match groups.last_mut() {
            Some((_, hi)) if f - *hi <= tol => *hi = f,
            _ => groups.push((f, f)),
        }
    }
    for w in groups.windows(2) {
        if w[1].0 - w[0].1 < 1000.0 * tol {
            return Err(Error::Numerical(format!(
                "Bohr frequencies {} and {} are closer than the grouping can resolve at tol {tol}",
                w[0].1, w[1].0
            )));
        }
    }
    let find = |f: f64| groups.iter().position(|&(lo, hi)| f >= lo - tol && f <= hi + tol);

    let mut rows: Vec<Vec<Vec<(usize, C64)>>> = vec![vec![Vec::new(); n]; groups.len()];
    for (br, bc, m) in rotated {
        let (rb, cb) = (&spec.blocks[br], &spec.blocks[bc]);
        let mut masks: HashMap<usize, DMatrix<C64>> = HashMap::new();
        for p in 0..m.nrows() {
            for q in 0..m.ncols() {
                if m[(p, q)].norm() <= 1e-12 * scale {
                    continue;
                }
                let g = find(cb.values[q] - rb.values[p]).expect("frequency was grouped");
                masks
                    .entry(g)
                    .or_insert_with(|| DMatrix::from_element(m.nrows(), m.ncols(), C64::new(0.0, 0.0)))[(p, q)] =
                    m[(p, q)];
            }
        }
        for (g, masked) in masks {
            let back = &rb.vectors * masked * cb.vectors.adjoint();
            for i in 0..back.nrows() {
                for j in 0..back.ncols() {
                    let v = back[(i, j)];
                    if v.norm() > 1e-14 * scale {
                        rows[g][rb.indices[i]].push((cb.indices[j], v));
                    }
                }
            }
        }
    }
    Ok(groups
        .iter()
        .zip(rows)
        .map(|(&(lo, hi), r)| (0.5 * (lo + hi), Csr::from_rows(n, r)))
        .collect())
}

#[derive(Clone, Debug)]
pub struct SparseJump {
    pub coupling: Coupling,
    pub bohr: f64,
    pub rate: f64,
    pub op: Csr<f64>,
    pub adj: Csr<f64>,
}

/// Davies dissipator with jumps stored as sparse matrices.
#[derive(Clone, Debug)]
pub struct SparseDavies {
    pub jumps: Vec<SparseJump>,
}

impl SparseDavies {
    /// Jumps from a blind eigendecomposition of the Hamiltonian.
    pub fn from_fourier(ci: &CodeInstance, bath: &BathSpectrum<f64>, tol: f64) -> Result<Self> {
        ci.cap().check_state(ci.d(), ci.edges())?;
        let spec = ci.exact_spectrum_blocks()?;
        let mut jumps = Vec::new();
        for coupling in interaction_operators(ci) {
            let s = coupling.operator::<f64>(ci.d(), ci.edges())?.to_csr()?;
            for (bohr, op) in fourier_components(&s, &spec, tol)? {
                jumps.push(SparseJump {
                    coupling,
                    bohr,
                    rate: bath.rate(bohr),
                    adj: op.adjoint(),
                    op,
                });
            }
        }
        Ok(SparseDavies { jumps })
    }

    /// `ℒ(X)ψ` for an operator given by its action, optionally one sector only.
    pub fn heisenberg_apply<F>(&self, x: F, psi: &[C64], sector: Option<Sector>) -> Vec<C64>
    where
        F: Fn(&[C64]) -> Vec<C64>,
    {
        let mut out = vec![C64::new(0.0, 0.0); psi.len()];
        let x_psi = x(psi);
        for j in &self.jumps {
            if j.rate == 0.0 || sector.is_some_and(|s| j.coupling.sector != s) {
                continue;
            }
            let l_psi = j.op.matvec(psi);
            let sandwich = j.adj.matvec(&x(&l_psi));
            let damp_x = j.adj.matvec(&j.op.matvec(&x_psi));
            let x_damp = x(&j.adj.matvec(&l_psi));
            for i in 0..psi.len() {
                out[i] += j.rate * (sandwich[i] - 0.5 * (damp_x[i] + x_damp[i]));
            }
        }
        out
    }

    /// `⟨ψ|ℒ(X)|ψ⟩`.
    pub fn heisenberg_expectation<F>(&self, x: F, psi: &[C64], sector: Option<Sector>) -> C64
    where
        F: Fn(&[C64]) -> Vec<C64>,
    {
        let image = self.heisenberg_apply(x, psi, sector);
        psi.iter().zip(&image).map(|(a, b)| a.conj() * b).sum()
    }
}

/// `e^{−βH}/Z` as a Pauli expansion; the stabilizer terms commute, so the
/// exponential factorizes over stabilizers.
pub fn gibbs_state<T: Real>(ci: &CodeInstance, beta: T) -> Result<PauliSum<T>> {
    if beta.is_nan() || beta < T::zero() {
        return Err(invalid(format!("beta must be non-negative, got {beta}")));
    }
    let d = ci.d();
    let mut rho = PauliSum::identity(d, ci.edges());
    for sector in [Sector::Z, Sector::X] {
        for g in ci.stabilizers(sector) {
            let mut factor = PauliSum::zero(d, ci.edges());
            for a in 0..d {
                let cos = (T::TAU() * T::lit(a as f64) / T::lit(d as f64)).cos();
                let weight = (beta * (cos - T::one())).exp();
                factor = factor.add(&ci.eigen_projector::<T>(g, a)?.scale(creal(weight)))?;
            }
            rho = rho.mul(&factor)?.pruned(T::lit(1e-300));
        }
    }
    let tr = rho.trace();
    Ok(rho.scale(tr.inv()))
}

/// Largest matrix entry of `−i[H, ρ_β] + ℒ†(ρ_β)`.
pub fn stationarity_residual<T: Real>(gen: &DaviesGenerator<T>, rho: &PauliSum<T>) -> Result<T> {
    gen.dual(rho)?.max_abs_entry()
}

/// Phase-free keys of the stabilizer group.
pub fn stabilizer_group(ci: &CodeInstance) -> Result<Vec<Key>> {
    let n = ci.edges();
    let d = ci.d();
    let gens: Vec<PauliWord> = ci
        .stabilizers(Sector::Z)
        .iter()
        .chain(ci.stabilizers(Sector::X))
        .cloned()
        .collect();
    let mut seen: HashSet<Key> = HashSet::new();
    let id = PauliSum::<f64>::identity(d, n);
    let mut frontier = vec![id];
    seen.insert(vec![0u8; 2 * n].into_boxed_slice());
    while let Some(w) = frontier.pop() {
        for g in &gens {
            let next = w.mul(&PauliSum::from_word(g, n)?)?;
            let key = next.terms().next().expect("single word").0.clone();
            if seen.insert(key.clone()) {
                let mut unit = PauliSum::zero(d, n);
                unit.add_term(key, Complex::new(1.0, 0.0));
                frontier.push(unit);
            }
        }
    }
    let mut out: Vec<Key> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

/// Keys of the coset `w·G`.
pub fn coset(group: &[Key], w: &[u8], d: u32) -> Vec<Key> {
    let n = w.len() / 2;
    let mut out: Vec<Key> = group
        .iter()
        .map(|g| (0..2 * n).map(|i| ((g[i] as u32 + w[i] as u32) % d) as u8).collect())
        .collect();
    out.sort();
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelReport {
    pub dimension: usize,
    pub cosets: usize,
    /// Cosets whose block has a nontrivial kernel, by smallest key.
    pub contributing: Vec<Key>,
}

/// Kernel dimension of the dual generator over the full operator space.
///
/// For qubits every jump is `σ` times a stabilizer polynomial, so the
/// generator preserves each coset of the stabilizer group and the kernel is
/// a sum over cosets. For `d ≥ 3` the couplings mix `σ` with `σ^{-1}`, cosets
/// are no longer invariant and the full space is out of reach.
pub fn dual_kernel_dimension<T: Real>(gen: &DaviesGenerator<T>, ci: &CodeInstance, rank_tol: f64) -> Result<KernelReport> {
    let d = ci.d();
    if d != 2 {
        return Err(Error::Unsupported(format!(
            "coset decomposition of the generator requires d=2 (d={d})"
        )));
    }
    let n = ci.edges();
    let total = 1usize
        .checked_shl(2 * n as u32)
        .filter(|&t| t <= 1 << 20)
        .ok_or_else(|| Error::SizeCap {
            what: "operator space".into(),
            needed: 4u128.saturating_pow(n as u32),
            cap: 1 << 20,
            hint: "kernel dimension is only computed on small lattices".into(),
        })?;
    let group = stabilizer_group(ci)?;
    let mut visited = vec![false; total];
    let to_index = |k: &[u8]| k.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
    let mut report = KernelReport {
        dimension: 0,
        cosets: 0,
        contributing: Vec::new(),
    };
    for start in 0..total {
        if visited[start] {
            continue;
        }
        let w: Key = (0..2 * n).map(|i| ((start >> (2 * n - 1 - i)) & 1) as u8).collect();
        let basis = coset(&group, &w, d);
        for k in &basis {
            visited[to_index(k)] = true;
        }
        let m = gen.restricted_matrix(&basis, Picture::Schrodinger, true)?;
        let nullity = basis.len() - numerical_rank(m, rank_tol);
        report.cosets += 1;
        if nullity > 0 {
            report.dimension += nullity;
            report.contributing.push(basis[0].clone());
        }
    }
    Ok(report)
}

/// Global charge conjugation `|n_1 … n_N⟩ ↦ |−n_1 … −n_N⟩` on a state vector.
///
/// It maps every `σ` to `σ^{-1}`, so it commutes with `H` and with every
/// Hermitian coupling.
pub fn charge_conjugation(d: u32, n: usize, psi: &[C64]) -> Vec<C64> {
    let d = d as usize;
    let mut out = vec![C64::new(0.0, 0.0); psi.len()];
    for (i, &a) in psi.iter().enumerate() {
        let mut rest = i;
        let mut j = 0usize;
        let mut stride = 1usize;
        for _ in 0..n {
            let digit = rest % d;
            rest /= d;
            j += ((d - digit) % d) * stride;
            stride *= d;
        }
        out[j] = a;
    }
    out
}

fn site_operator(d: u32, xpow: u32, zpow: u32) -> DenseOperator<f64> {
    let omega = |k: u32| Complex::from_polar(1.0, std::f64::consts::TAU * (k % d) as f64 / d as f64);
    let dim = d as usize;
    let mut m = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    // X^a Z^b |j⟩ = ω^{bj} |j + a⟩
    for j in 0..d {
        m[(((j + xpow) % d) as usize, j as usize)] = omega(zpow * j);
    }
    DenseOperator::new(m)
}

/// Commutant dimension of the single-site Hermitian couplings `σ^μ + σ^{-μ}`.
pub fn hermitian_coupling_commutant(d: u32) -> Result<usize> {
    let mut gens = Vec::new();
    for mu in 1..=d / 2 {
        for (xa, zb) in [(mu, 0), (0, mu)] {
            let a = site_operator(d, xa, zb);
            let b = site_operator(d, (d - xa) % d, (d - zb) % d);
            gens.push(DenseOperator::new(&a.matrix + &b.matrix));
        }
    }
    commutant_dimension(&gens)
}

/// Commutant dimension of all nontrivial single-site powers of `X` and `Z`.
pub fn power_coupling_commutant(d: u32) -> Result<usize> {
    let gens: Vec<_> = (1..d)
        .flat_map(|m| [site_operator(d, m, 0), site_operator(d, 0, m)])
        .collect();
    commutant_dimension(&gens)
}
