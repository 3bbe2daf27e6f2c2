//! Rate extraction, closed-form rates and crossover temperatures.

use crate::code::{pair_energy, CodeInstance};
use crate::davies::{gibbs_state, BathSpectrum};
use crate::error::{Error, Result};
use crate::lattice::Sector;
use crate::scalar::Real;

use super::reduced::ReducedGenerator;
use super::DecayCurve;

/// The fit window ends once the curve drops below `1 − FIT_EPSILON`.
pub const FIT_EPSILON: f64 = 0.05;

const PLANCK: f64 = 6.626_070_15e-34;
const BOLTZMANN: f64 = 1.380_649e-23;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fit {
    pub rate: f64,
    pub uncertainty: f64,
    pub points: usize,
    pub t_max: f64,
}

/// Weighted fit of `log y = −Γt + a t²` with `(t, log y, weight)` points.
fn fit_points(pts: &[(f64, f64, f64)]) -> Option<(f64, f64)> {
    let (mut s22, mut s23, mut s33, mut s2y, mut s3y) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(t, y, w) in pts {
        let (a, b) = (-t, t * t);
        s22 += w * a * a;
        s23 += w * a * b;
        s33 += w * b * b;
        s2y += w * a * y;
        s3y += w * b * y;
    }
    let det = s22 * s33 - s23 * s23;
    if !(det.abs() > 0.0) {
        return None;
    }
    let gamma = (s33 * s2y - s23 * s3y) / det;
    // Var(Γ) = σ² (AᵀWA)^{-1}_{00}
    let n = pts.len() as f64;
    let curv = (s22 * s3y - s23 * s2y) / det;
    let rss: f64 = pts
        .iter()
        .map(|&(t, y, w)| w * (y - (-gamma * t + curv * t * t)).powi(2))
        .sum();
    let var = if n > 2.0 { rss / (n - 2.0) * s33 / det } else { 0.0 };
    Some((gamma, var.max(0.0).sqrt()))
}

/// Initial decay rate from the real part of a curve.
///
/// Uses points with `t > 0` until the curve falls below `1 − ε`; Monte Carlo
/// curves are weighted by their standard errors, and their uncertainty comes
/// from refitting each batch.
pub fn fit_initial_rate(curve: &DecayCurve) -> Result<Fit> {
    let mut idx = Vec::new();
    for (i, (&t, v)) in curve.times.iter().zip(&curve.values).enumerate() {
        if t <= 0.0 {
            continue;
        }
        if v.re < 1.0 - FIT_EPSILON || v.re <= 0.0 {
            break;
        }
        idx.push(i);
    }
    if idx.len() < 4 {
        return Err(Error::Numerical(format!(
            "only {} points inside the fit window; sample earlier times",
            idx.len()
        )));
    }
    let weights: Vec<f64> = match &curve.stderr {
        Some(se) => {
            let floor = idx.iter().map(|&i| se[i]).fold(0.0, f64::max) * 1e-2;
            idx.iter()
                .map(|&i| {
                    let s = se[i].max(floor).max(f64::MIN_POSITIVE) / curve.values[i].re;
                    1.0 / (s * s)
                })
                .collect()
        }
        None => vec![1.0; idx.len()],
    };
    let pts: Vec<(f64, f64, f64)> = idx
        .iter()
        .zip(&weights)
        .map(|(&i, &w)| (curve.times[i], curve.values[i].re.ln(), w))
        .collect();
    let (rate, mut uncertainty) = fit_points(&pts).ok_or_else(|| Error::Numerical("degenerate fit".into()))?;
    if curve.batches.len() >= 2 {
        let rates: Vec<f64> = curve
            .batches
            .iter()
            .filter_map(|b| {
                let bp: Option<Vec<_>> = idx
                    .iter()
                    .zip(&weights)
                    .map(|(&i, &w)| (b[i] > 0.0).then(|| (curve.times[i], b[i].ln(), w)))
                    .collect();
                fit_points(&bp?).map(|f| f.0)
            })
            .collect();
        if rates.len() >= 2 {
            let m = rates.len() as f64;
            let mean = rates.iter().sum::<f64>() / m;
            let var = rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (m - 1.0);
            uncertainty = (var / m).sqrt();
        }
    }
    Ok(Fit {
        rate,
        uncertainty,
        points: idx.len(),
        t_max: curve.times[*idx.last().expect("non-empty window")],
    })
}

/// `Γ_d = Σ_{n=1}^{⌊d/2⌋} (Δ_n/2) |c| R(Δ_n) e^{−Δ_n β}`.
pub fn gamma_closed_form<T: Real>(d: u32, bath: &BathSpectrum<T>, loop_len: usize) -> T {
    let c = T::lit(loop_len as f64);
    (1..=d / 2)
        .map(|n| {
            let delta = pair_energy::<T>(d, n);
            delta / T::lit(2.0) * c * bath.rate(delta) * (-delta * bath.beta).exp()
        })
        .sum()
}

/// Highest temperature (`J = 1` units) where `Γ_a = Γ_b` under equal flat rates.
pub fn crossover_between(a: u32, b: u32) -> Option<f64> {
    let gap = |beta: f64| {
        let bath = BathSpectrum::flat(beta, 1.0).expect("valid bath");
        gamma_closed_form(a, &bath, 1).ln() - gamma_closed_form(b, &bath, 1).ln()
    };
    let grid: Vec<f64> = (0..=4000).map(|i| 1e-6 * (60.0f64 / 1e-6).powf(i as f64 / 4000.0)).collect();
    let mut prev = (grid[0], gap(grid[0]));
    for &beta in &grid[1..] {
        let g = gap(beta);
        if g == 0.0 {
            return Some(1.0 / beta);
        }
        if g.signum() != prev.1.signum() {
            let (mut lo, mut hi) = (prev.0, beta);
            let glo = prev.1;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if gap(mid).signum() == glo.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(2.0 / (lo + hi));
        }
        prev = (beta, g);
    }
    None
}

/// `T_c` with `Γ_d(T_c) = Γ_2(T_c)`, in units of `E_0/k_B`.
pub fn crossover_temperature(d: u32) -> Option<f64> {
    if d < 3 {
        return None;
    }
    crossover_between(d, 2)
}

/// `T_c` in kelvin for `E_0 = h·f` with `f` in hertz.
pub fn crossover_kelvin(d: u32, e0_hz: f64) -> Option<f64> {
    crossover_temperature(d).map(|t| t * PLANCK * e0_hz / BOLTZMANN)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LongTimeReport {
    /// `Tr[X_c ρ_β]`.
    pub trace_xc_gibbs: f64,
    /// Slowest nonzero relaxation rate of the phase-free vertex-sector chain.
    pub relaxation_gap: f64,
    /// Kernel dimension of the phase-free vertex-sector chain.
    pub kernel_dimension: usize,
}

pub fn long_time_limit(ci: &CodeInstance, bath: &BathSpectrum<f64>) -> Result<LongTimeReport> {
    let rho = gibbs_state::<f64>(ci, bath.beta)?;
    let xc = ci.word::<f64>(ci.x_c())?;
    let trace_xc_gibbs = xc.mul(&rho)?.trace().norm();
    let gen = ReducedGenerator::new(ci, bath)?;
    let chain = gen.chain(Sector::Z);
    let rates = chain.relaxation_rates(bath.beta);
    let relaxation_gap = rates.iter().copied().find(|&r| r > 1e-10).unwrap_or(0.0);
    Ok(LongTimeReport {
        trace_xc_gibbs,
        relaxation_gap,
        kernel_dimension: chain.kernel_dimension(),
    })
}
