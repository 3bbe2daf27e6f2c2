//! Stabilizers, Hamiltonian and spectra of the Z_d toric code.
//!
//! `A_s = ∏_{j∈star(s)} X_j^{±1}` and `B_p = ∏_{j∈∂p} Z_j^{±1}` with the
//! orientation signs of [`OrientedLattice`]. The system Hamiltonian is
//! `H = -½ Σ_s (A_s + A_s†) - ½ Σ_p (B_p + B_p†)`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gpauli::{commutation_phase, word_mul, DenseCap, DenseOperator, PauliWord};
use crate::lattice::{EdgePath, OrientedLattice, Sector};
use crate::linalg::{cluster_sorted, BlockSpectrum};
use crate::pauli_sum::PauliSum;
use crate::scalar::{charge_energy, Amp, Real};

/// Eigenvalue tolerance used when grouping exact spectra.
pub const LEVEL_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct CodeInstance {
    d: u32,
    lat: OrientedLattice,
    a: Vec<PauliWord>,
    b: Vec<PauliWord>,
    loop_x: EdgePath,
    x_c: PauliWord,
    cap: DenseCap,
}

/// Exponents of the stabilizer eigenvalues: `A_s = ω^{alpha_s}`, `B_p = ω^{beta_p}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChargeConfig {
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
}

impl ChargeConfig {
    pub fn trivial(sites: usize) -> Self {
        ChargeConfig {
            alpha: vec![0; sites],
            beta: vec![0; sites],
        }
    }

    pub fn is_neutral(&self, d: u32) -> bool {
        self.alpha.iter().sum::<u32>() % d == 0 && self.beta.iter().sum::<u32>() % d == 0
    }

    pub fn charges(&self, sector: Sector) -> &[u32] {
        match sector {
            Sector::Z => &self.alpha,
            Sector::X => &self.beta,
        }
    }

    pub fn charges_mut(&mut self, sector: Sector) -> &mut Vec<u32> {
        match sector {
            Sector::Z => &mut self.alpha,
            Sector::X => &mut self.beta,
        }
    }
}

/// All length-`m` charge vectors over Z_d with total `0 mod d`, in lexicographic order.
pub fn neutral_sector(d: u32, m: usize) -> Vec<Vec<u32>> {
    assert!(m >= 1);
    let count = (d as usize).pow(m as u32 - 1);
    (0..count)
        .map(|mut idx| {
            let mut v = vec![0u32; m];
            for slot in v.iter_mut().take(m - 1).rev() {
                *slot = (idx % d as usize) as u32;
                idx /= d as usize;
            }
            let s: u32 = v.iter().sum();
            v[m - 1] = (d - s % d) % d;
            v
        })
        .collect()
}

/// `2(1 - cos 2π/d)`, the cheapest excitation of a single pair.
pub fn theoretical_gap<T: Real>(d: u32) -> T {
    T::lit(2.0) * (T::one() - (T::TAU() / T::lit(d as f64)).cos())
}

/// Excitation energy of an `ω^n / ω^{-n}` pair created from the vacuum.
pub fn pair_energy<T: Real>(d: u32, n: u32) -> T {
    T::lit(2.0) * (T::one() - (T::TAU() * T::lit(n as f64) / T::lit(d as f64)).cos())
}

#[derive(Clone, Debug)]
pub struct GroundState<T: Real> {
    pub vector: Vec<Amp<T>>,
    pub degeneracy: usize,
    /// Basis index the projector was applied to.
    pub reference: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct LogicalReport {
    pub commutes_with_stabilizers: bool,
    pub first_failure: Option<String>,
    pub commutes_with_hamiltonian: bool,
    pub preserves_ground_space: bool,
    pub nontrivial_on_ground_space: bool,
    /// `max |X_c v - P_gs X_c v|` over the ground-space basis.
    pub leakage: f64,
}

impl LogicalReport {
    pub fn passed(&self) -> bool {
        self.commutes_with_stabilizers
            && self.commutes_with_hamiltonian
            && self.preserves_ground_space
            && self.nontrivial_on_ground_space
    }
}

impl CodeInstance {
    pub fn new(d: u32, k: usize) -> Result<Self> {
        Self::with_loop(d, k, 1, 0)
    }

    /// Code whose logical `X_c` runs in `direction` at `offset`.
    pub fn with_loop(d: u32, k: usize, direction: u8, offset: usize) -> Result<Self> {
        if d < 2 {
            return Err(invalid(format!("d must be at least 2, got {d}")));
        }
        let lat = OrientedLattice::build_torus(k)?;
        let a = (0..lat.n_vertices())
            .map(|s| lat.star_word(d, s))
            .collect::<Result<Vec<_>>>()?;
        let b = (0..lat.n_plaquettes())
            .map(|p| lat.boundary_word(d, p))
            .collect::<Result<Vec<_>>>()?;
        let loop_x = lat.logical_loop(d, Sector::X, direction, offset)?;
        let x_c = loop_x.word(d);
        Ok(CodeInstance {
            d,
            lat,
            a,
            b,
            loop_x,
            x_c,
            cap: DenseCap::default(),
        })
    }

    pub fn with_cap(mut self, cap: DenseCap) -> Self {
        self.cap = cap;
        self
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn k(&self) -> usize {
        self.lat.k()
    }

    pub fn lattice(&self) -> &OrientedLattice {
        &self.lat
    }

    pub fn cap(&self) -> DenseCap {
        self.cap
    }

    pub fn edges(&self) -> usize {
        self.lat.n_edges()
    }

    pub fn sites(&self) -> usize {
        self.lat.n_vertices()
    }

    pub fn loop_x(&self) -> &EdgePath {
        &self.loop_x
    }

    pub fn x_c(&self) -> &PauliWord {
        &self.x_c
    }

    pub fn vertex_operator(&self, s: usize) -> Result<&PauliWord> {
        self.a
            .get(s)
            .ok_or_else(|| invalid(format!("vertex {s} out of range")))
    }

    pub fn plaquette_operator(&self, p: usize) -> Result<&PauliWord> {
        self.b
            .get(p)
            .ok_or_else(|| invalid(format!("plaquette {p} out of range")))
    }

    /// Stabilizers of one sector: vertices for `Z`, plaquettes for `X`.
    pub fn stabilizers(&self, sector: Sector) -> &[PauliWord] {
        match sector {
            Sector::Z => &self.a,
            Sector::X => &self.b,
        }
    }

    /// Star operator with every arrow treated as outgoing.
    pub fn unsigned_vertex_operator(&self, s: usize) -> Result<PauliWord> {
        let st = self.lat.star(s)?;
        Ok(PauliWord::from_parts(self.d, 0, st.map(|(e, _)| (e, 1)), []))
    }

    pub fn unsigned_plaquette_operator(&self, p: usize) -> Result<PauliWord> {
        let b = self.lat.boundary(p)?;
        Ok(PauliWord::from_parts(self.d, 0, [], b.map(|(e, _)| (e, 1))))
    }

    /// Logical `X` strings in both directions (offset 0).
    pub fn logical_x_pair(&self) -> Result<[PauliWord; 2]> {
        let l1 = self.lat.logical_loop(self.d, Sector::X, 1, 0)?;
        let l2 = self.lat.logical_loop(self.d, Sector::X, 2, 0)?;
        Ok([l1.word(self.d), l2.word(self.d)])
    }

    pub fn word<T: Real>(&self, w: &PauliWord) -> Result<PauliSum<T>> {
        PauliSum::from_word(w, self.edges())
    }

    pub fn hamiltonian<T: Real>(&self) -> Result<PauliSum<T>> {
        let n = self.edges();
        let mut h = PauliSum::zero(self.d, n);
        let half = Complex::new(-T::lit(0.5), T::zero());
        for w in self.a.iter().chain(&self.b) {
            let s = PauliSum::from_word(w, n)?;
            h = h.add(&s.add(&s.adjoint())?.scale(half))?;
        }
        Ok(h.pruned(T::zero()))
    }

    pub fn hamiltonian_dense<T: Real>(&self) -> Result<DenseOperator<T>> {
        self.hamiltonian::<T>()?.to_dense(self.cap)
    }

    /// Largest hopping-free state space the sparse diagonalizer accepts.
    fn check_sparse(&self) -> Result<usize> {
        self.cap.check_state(self.d, self.edges())
    }

    pub fn exact_spectrum_blocks(&self) -> Result<BlockSpectrum> {
        self.check_sparse()?;
        let h = self.hamiltonian::<f64>()?.to_csr()?;
        Ok(BlockSpectrum::new(&h))
    }

    /// Distinct energies with multiplicities from exact diagonalization.
    pub fn exact_spectrum(&self) -> Result<Vec<(f64, usize)>> {
        let spec = self.exact_spectrum_blocks()?;
        Ok(cluster_sorted(&spec.eigenvalues(), LEVEL_TOL))
    }

    /// First excitation energy above the ground level, from exact diagonalization.
    pub fn exact_gap(&self) -> Result<f64> {
        let levels = self.exact_spectrum()?;
        if levels.len() < 2 {
            return Err(Error::Numerical("spectrum has a single level".into()));
        }
        Ok(levels[1].0 - levels[0].0)
    }

    pub fn config_energy<T: Real>(&self, c: &ChargeConfig) -> Result<T> {
        let m = self.sites();
        if c.alpha.len() != m || c.beta.len() != m {
            return Err(invalid(format!("charge vectors must have length {m}")));
        }
        if !c.is_neutral(self.d) {
            return Err(invalid("charge configuration is not neutral"));
        }
        Ok(sector_energy::<T>(self.d, &c.alpha) + sector_energy::<T>(self.d, &c.beta))
    }

    /// Spectrum predicted by charge-sector enumeration: each neutral configuration has weight `d²`.
    pub fn charge_spectrum(&self) -> Vec<(f64, usize)> {
        let sector = neutral_sector(self.d, self.sites());
        let mut energies: Vec<f64> = sector.iter().map(|v| sector_energy::<f64>(self.d, v)).collect();
        energies.sort_by(f64::total_cmp);
        let single = cluster_sorted(&energies, LEVEL_TOL);
        let mut pairs: Vec<(f64, usize)> = Vec::new();
        for &(ea, na) in &single {
            for &(eb, nb) in &single {
                pairs.push((ea + eb, na * nb));
            }
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut out: Vec<(f64, usize)> = Vec::new();
        let logical = (self.d * self.d) as usize;
        for (e, n) in pairs {
            match out.last_mut() {
                Some(last) if (e - last.0).abs() <= LEVEL_TOL => last.1 += n * logical,
                _ => out.push((e, n * logical)),
            }
        }
        out
    }

    /// Group-averaging projector `∏_g (1/d) Σ_m g^m` over all stabilizers.
    pub fn ground_projector<T: Real>(&self) -> Result<PauliSum<T>> {
        let mut p = PauliSum::identity(self.d, self.edges());
        for w in self.a.iter().chain(&self.b) {
            p = p.mul(&self.averaging::<T>(w)?)?.pruned(T::lit(1e-12));
        }
        Ok(p)
    }

    /// `(1/d) Σ_m (ω^{-a} g)^m`, the projector onto `g = ω^a`.
    pub fn eigen_projector<T: Real>(&self, g: &PauliWord, a: u32) -> Result<PauliSum<T>> {
        let n = self.edges();
        let mut acc = PauliSum::zero(self.d, n);
        let inv_d = Complex::new(T::one() / T::lit(self.d as f64), T::zero());
        for m in 0..self.d {
            let w = g.pow(m).with_phase(g.pow(m).phase() as i64 - (a * m) as i64);
            acc = acc.add(&PauliSum::from_word(&w, n)?.scale(inv_d))?;
        }
        Ok(acc)
    }

    fn averaging<T: Real>(&self, g: &PauliWord) -> Result<PauliSum<T>> {
        self.eigen_projector(g, 0)
    }

    /// Applies `(1/d) Σ_m g^m` in place to a state vector.
    fn average_state<T: Real>(&self, g: &PauliWord, psi: &[Amp<T>]) -> Result<Vec<Amp<T>>> {
        self.averaging::<T>(g)?.apply(psi)
    }

    /// Ground-space dimension `Tr P` of the stabilizer projector.
    pub fn ground_degeneracy(&self) -> Result<usize> {
        let p = self.ground_projector::<f64>()?;
        Ok(p.trace().re.round() as usize)
    }

    pub fn ground_state<T: Real>(&self) -> Result<GroundState<T>> {
        let dim = self.check_sparse()?;
        let degeneracy = self.ground_degeneracy()?;
        for reference in 0..dim {
            let mut psi = vec![Complex::new(T::zero(), T::zero()); dim];
            psi[reference] = Complex::new(T::one(), T::zero());
            for w in self.a.iter().chain(&self.b) {
                psi = self.average_state(w, &psi)?;
            }
            let norm = psi.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
            if norm > T::lit(1e-6) {
                for z in &mut psi {
                    *z /= norm;
                }
                return Ok(GroundState {
                    vector: psi,
                    degeneracy,
                    reference,
                });
            }
        }
        Err(Error::Numerical("projector annihilates every basis state".into()))
    }

    /// Ground state with `⟨X_c⟩ = 1`: the `X_c`-averaged ground state.
    pub fn logical_eigenstate<T: Real>(&self) -> Result<Vec<Amp<T>>> {
        let gs = self.ground_state::<T>()?;
        let mut psi = self.average_state(&self.x_c, &gs.vector)?;
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if norm <= T::lit(1e-6) {
            return Err(Error::Numerical("X_c average annihilated the ground state".into()));
        }
        for z in &mut psi {
            *z /= norm;
        }
        Ok(psi)
    }

    /// Checks that `X_c` is a logical operator: commutes with the code and acts non-trivially.
    pub fn verify_logical(&self) -> Result<LogicalReport> {
        let mut first_failure = None;
        for (i, s) in self.a.iter().chain(&self.b).enumerate() {
            let phi = commutation_phase(s, &self.x_c)?;
            if phi != 0 {
                let name = if i < self.a.len() {
                    format!("A_{i}")
                } else {
                    format!("B_{}", i - self.a.len())
                };
                first_failure = Some(format!("{name} (phase exponent {phi})"));
                break;
            }
        }
        let h = self.hamiltonian::<f64>()?;
        let xc = self.word::<f64>(&self.x_c)?;
        let commutes_with_hamiltonian = h.commutator(&xc)?.max_coef() < 1e-12;

        // ground-space basis X_1^a X_2^b |GS_0⟩ with |GS_0⟩ the Z-logical +1 state
        let gs = self.ground_state::<f64>()?;
        let [l1, l2] = self.logical_x_pair()?;
        let mut basis = Vec::new();
        for a in 0..self.d {
            for b in 0..self.d {
                let w = word_mul(&l1.pow(a), &l2.pow(b))?;
                basis.push(self.word::<f64>(&w)?.apply(&gs.vector)?);
            }
        }
        let inner = |u: &[Amp<f64>], v: &[Amp<f64>]| -> Amp<f64> {
            u.iter().zip(v).map(|(x, y)| x.conj() * y).sum()
        };
        let n = basis.len();
        let mut gram_ok = true;
        for i in 0..n {
            for j in 0..n {
                let g = inner(&basis[i], &basis[j]);
                let expect = if i == j { 1.0 } else { 0.0 };
                gram_ok &= (g - Complex::new(expect, 0.0)).norm() < 1e-9;
            }
        }
        let mut leakage: f64 = 0.0;
        let mut restriction = vec![vec![Complex::new(0.0, 0.0); n]; n];
        for j in 0..n {
            let image = xc.apply(&basis[j])?;
            let mut resid = image.clone();
            for i in 0..n {
                let c = inner(&basis[i], &image);
                restriction[i][j] = c;
                for (r, b) in resid.iter_mut().zip(&basis[i]) {
                    *r -= c * b;
                }
            }
            leakage = leakage.max(resid.iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
        let lambda = restriction[0][0];
        let mut scalar = true;
        for (i, row) in restriction.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let expect = if i == j { lambda } else { Complex::new(0.0, 0.0) };
                scalar &= (v - expect).norm() < 1e-9;
            }
        }
        Ok(LogicalReport {
            commutes_with_stabilizers: first_failure.is_none(),
            first_failure,
            commutes_with_hamiltonian,
            preserves_ground_space: gram_ok && leakage < 1e-9,
            nontrivial_on_ground_space: !scalar,
            leakage,
        })
    }
}

pub fn sector_energy<T: Real>(d: u32, charges: &[u32]) -> T {
    charges.iter().map(|&a| charge_energy::<T>(d, a)).sum()
}
