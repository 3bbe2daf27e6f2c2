//! Phase-weighted classical generator over neutral charge configurations.
//!
//! Under the Davies dynamics, `X_c · f(charges)` evolves into an operator of
//! the same form when cross terms between `σ^m` and `σ^{m'}` (`m ≠ m'`) are
//! dropped; for qubits no such terms exist and the reduction is exact. The
//! function `f` evolves under
//! `(Gf)(c) = Σ_{j,m} w_m R(−ΔE) [ω^{−φ} f(T_{j,m} c) − f(c)]`,
//! where `w_m = 1/2` unless `2m ≡ 0 (mod d)`.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::code::{neutral_sector, sector_energy, ChargeConfig, CodeInstance};
use crate::davies::BathSpectrum;
use crate::error::{Error, Result};
use crate::lattice::Sector;
use crate::linalg::{eigh, expm_multiply, numerical_rank, one_norm, C64};
use crate::processes::{apply_error, process_energy};
use crate::scalar::root_of_unity;

/// Largest number of configurations per sector the reduced engine accepts.
pub const REDUCED_CAP: usize = 4096;

/// Weight of power `m` in its Hermitian coupling.
pub fn power_weight(d: u32, m: u32) -> f64 {
    if (2 * m).is_multiple_of(d) {
        1.0
    } else {
        0.5
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    pub edge: usize,
    pub power: u32,
    pub rate: f64,
    /// Energy change of the system.
    pub delta_e: f64,
    /// `φ` with `σ X_c σ^{-1} = ω^φ X_c`.
    pub phase: u32,
}

/// Chain on one charge sector.
#[derive(Clone, Debug)]
pub struct SectorChain {
    pub sector: Sector,
    pub states: Vec<Vec<u32>>,
    pub transitions: Vec<Transition>,
    d: u32,
}

fn config_with(ci: &CodeInstance, sector: Sector, charges: &[u32]) -> ChargeConfig {
    let mut c = ChargeConfig::trivial(ci.sites());
    c.charges_mut(sector).copy_from_slice(charges);
    c
}

impl SectorChain {
    pub fn new(ci: &CodeInstance, bath: &BathSpectrum<f64>, sector: Sector) -> Result<Self> {
        let d = ci.d();
        let m = ci.sites();
        let count = (d as u128).pow(m as u32 - 1);
        if count > REDUCED_CAP as u128 {
            return Err(Error::SizeCap {
                what: "reduced configurations per sector".into(),
                needed: count,
                cap: REDUCED_CAP as u128,
                hint: "use the Monte Carlo engine".into(),
            });
        }
        let states = neutral_sector(d, m);
        let index: HashMap<Vec<u32>, usize> = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let mut transitions = Vec::new();
        for (from, s) in states.iter().enumerate() {
            let c = config_with(ci, sector, s);
            for edge in 0..ci.edges() {
                for power in 1..d {
                    let (after, phase) = apply_error(ci, &c, edge, power as i64, sector)?;
                    let delta_e: f64 = process_energy(ci, &c, edge, power as i64, sector)?;
                    let rate = power_weight(d, power) * bath.rate(-delta_e);
                    if rate == 0.0 {
                        continue;
                    }
                    transitions.push(Transition {
                        from,
                        to: index[after.charges(sector)],
                        edge,
                        power,
                        rate,
                        delta_e,
                        phase,
                    });
                }
            }
        }
        Ok(SectorChain {
            sector,
            states,
            transitions,
            d,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Generator acting on functions, with phase weights `ω^{−φ}`.
    pub fn function_matrix(&self) -> DMatrix<C64> {
        let n = self.len();
        let mut g = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
        for t in &self.transitions {
            g[(t.from, t.to)] += root_of_unity::<f64>(self.d, -(t.phase as i64)) * t.rate;
            g[(t.from, t.from)] -= t.rate;
        }
        g
    }

    /// Phase-free generator on probability vectors: `Q[to, from]`, columns sum to zero.
    pub fn classical_matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut q = DMatrix::zeros(n, n);
        for t in &self.transitions {
            q[(t.to, t.from)] += t.rate;
            q[(t.from, t.from)] -= t.rate;
        }
        q
    }

    pub fn energies(&self) -> Vec<f64> {
        self.states.iter().map(|s| sector_energy::<f64>(self.d, s)).collect()
    }

    /// Largest `|π(a)Q[b,a] − π(b)Q[a,b]|` for `π ∝ e^{−βE}`.
    pub fn detailed_balance_defect(&self, beta: f64) -> f64 {
        let q = self.classical_matrix();
        let e = self.energies();
        let e0 = e.iter().cloned().fold(f64::INFINITY, f64::min);
        let pi: Vec<f64> = e.iter().map(|&x| (-beta * (x - e0)).exp()).collect();
        let mut worst: f64 = 0.0;
        for a in 0..self.len() {
            for b in 0..self.len() {
                worst = worst.max((pi[a] * q[(b, a)] - pi[b] * q[(a, b)]).abs());
            }
        }
        worst
    }

    /// Relaxation rates `−λ` of the phase-free chain, ascending. Requires `β < ∞`.
    pub fn relaxation_rates(&self, beta: f64) -> Vec<f64> {
        let q = self.classical_matrix();
        let e = self.energies();
        let e0 = e.iter().cloned().fold(f64::INFINITY, f64::min);
        let s: Vec<f64> = e.iter().map(|&x| (-0.5 * beta * (x - e0)).exp()).collect();
        let n = self.len();
        // D^{-1/2} Q D^{1/2} is symmetric under detailed balance.
        let sym = DMatrix::from_fn(n, n, |i, j| C64::new(q[(i, j)] * s[j] / s[i], 0.0));
        let sym = (&sym + sym.adjoint()) * C64::new(0.5, 0.0);
        let (vals, _) = eigh(sym);
        let mut rates: Vec<f64> = vals.into_iter().map(|v| -v).collect();
        rates.sort_by(f64::total_cmp);
        rates
    }

    pub fn kernel_dimension(&self) -> usize {
        let q = self.classical_matrix().map(|x| C64::new(x, 0.0));
        self.len() - numerical_rank(q, 1e-10)
    }

    /// `(e^{Gt} 1)(trivial)` at each time.
    pub fn curve(&self, times: &[f64]) -> Vec<C64> {
        let g = self.function_matrix();
        let norm = one_norm(&g);
        let ones = DVector::from_element(self.len(), C64::new(1.0, 0.0));
        let start = self
            .states
            .iter()
            .position(|s| s.iter().all(|&a| a == 0))
            .expect("trivial configuration is enumerated");
        times
            .iter()
            .map(|&t| expm_multiply(|v| &g * v, norm, &ones, t)[start])
            .collect()
    }

    /// `(G 1)(trivial)`, the slope at `t = 0`.
    pub fn initial_derivative(&self) -> C64 {
        let start = self.states.iter().position(|s| s.iter().all(|&a| a == 0)).expect("trivial state");
        self.transitions
            .iter()
            .filter(|t| t.from == start)
            .map(|t| (root_of_unity::<f64>(self.d, -(t.phase as i64)) - Complex::new(1.0, 0.0)) * t.rate)
            .sum()
    }
}

/// Both sector chains. The curve factorizes: `f = f_z · f_x`.
#[derive(Clone, Debug)]
pub struct ReducedGenerator {
    pub z: SectorChain,
    pub x: SectorChain,
    pub bath: BathSpectrum<f64>,
}

impl ReducedGenerator {
    pub fn new(ci: &CodeInstance, bath: &BathSpectrum<f64>) -> Result<Self> {
        Ok(ReducedGenerator {
            z: SectorChain::new(ci, bath, Sector::Z)?,
            x: SectorChain::new(ci, bath, Sector::X)?,
            bath: *bath,
        })
    }

    pub fn chain(&self, sector: Sector) -> &SectorChain {
        match sector {
            Sector::Z => &self.z,
            Sector::X => &self.x,
        }
    }

    pub fn curve(&self, times: &[f64]) -> Vec<C64> {
        let fz = self.z.curve(times);
        let fx = self.x.curve(times);
        fz.into_iter().zip(fx).map(|(a, b)| a * b).collect()
    }

    pub fn initial_derivative(&self) -> C64 {
        self.z.initial_derivative() + self.x.initial_derivative()
    }
}
