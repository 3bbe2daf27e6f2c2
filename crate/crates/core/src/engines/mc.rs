//! Continuous-time Monte Carlo of the phase-weighted charge chain.
//!
//! Each trajectory runs the phase-free chain from the trivial configuration
//! in both sectors and carries the weight `ω^{−Σφ}`. Trials draw from
//! independent ChaCha streams keyed by `(seed, trial)`, so results do not
//! depend on scheduling; partial sums are reduced in chunk order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::code::CodeInstance;
use crate::davies::BathSpectrum;
use crate::error::{invalid, Result};
use crate::gpauli::commutation_phase;
use crate::lattice::Sector;
use crate::linalg::C64;
use crate::processes::{adjacent, error_word};
use crate::scalar::{charge_energy, root_of_unity};

use super::reduced::power_weight;

/// Trials per reduction chunk; also the batch granularity for fit errors.
const CHUNK: usize = 1024;
/// Number of batches reported for batch-means error estimates.
pub const BATCHES: usize = 16;

/// Local transition data for one sector.
#[derive(Clone, Debug)]
pub struct LocalRates {
    d: u32,
    sector: Sector,
    /// `(first, second)` stabilizers per edge.
    adjacent: Vec<(usize, usize)>,
    /// `φ` of a unit error per edge.
    unit_phase: Vec<u32>,
    /// `rate[m][a][b]` for labels `(a, b)` under power `m`.
    rate: Vec<Vec<Vec<f64>>>,
}

impl LocalRates {
    pub fn new(ci: &CodeInstance, bath: &BathSpectrum<f64>, sector: Sector) -> Result<Self> {
        let d = ci.d();
        let adjacent = (0..ci.edges()).map(|e| adjacent(ci.lattice(), e, sector)).collect();
        let unit_phase = (0..ci.edges())
            .map(|e| commutation_phase(&error_word(d, e, 1, sector), ci.x_c()))
            .collect::<Result<_>>()?;
        let en = |a: u32| charge_energy::<f64>(d, a % d);
        let rate = (0..d)
            .map(|m| {
                (0..d)
                    .map(|a| {
                        (0..d)
                            .map(|b| {
                                if m == 0 {
                                    return 0.0;
                                }
                                let de = en(a + d - m) + en(b + m) - en(a) - en(b);
                                power_weight(d, m) * bath.rate(-de)
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(LocalRates {
            d,
            sector,
            adjacent,
            unit_phase,
            rate,
        })
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    /// Rate and phase of `σ_edge^m` from the given charges.
    pub fn transition(&self, charges: &[u32], edge: usize, m: u32) -> (f64, u32) {
        let (s1, s2) = self.adjacent[edge];
        (
            self.rate[m as usize][charges[s1] as usize][charges[s2] as usize],
            (self.unit_phase[edge] * m) % self.d,
        )
    }

    /// Applies `σ_edge^m` to the charges.
    pub fn apply(&self, charges: &mut [u32], edge: usize, m: u32) {
        let d = self.d;
        let (s1, s2) = self.adjacent[edge];
        charges[s1] = (charges[s1] + d - m) % d;
        charges[s2] = (charges[s2] + m) % d;
    }
}

/// Accumulated loop phase at each requested time for one trajectory.
fn trajectory(sectors: &[LocalRates; 2], sites: usize, edges: usize, times: &[f64], rng: &mut ChaCha8Rng) -> Vec<u32> {
    let d = sectors[0].d;
    let mut charges = [vec![0u32; sites], vec![0u32; sites]];
    let mut phase = 0u32;
    let mut now = 0.0;
    let mut out = Vec::with_capacity(times.len());
    let mut rates: Vec<f64> = Vec::with_capacity(2 * edges * d as usize);
    let mut next_time = 0usize;
    loop {
        rates.clear();
        let mut total = 0.0;
        for (s, local) in sectors.iter().enumerate() {
            for e in 0..edges {
                for m in 1..d {
                    let (r, _) = local.transition(&charges[s], e, m);
                    total += r;
                    rates.push(r);
                }
            }
        }
        let wait = if total > 0.0 {
            -(1.0 - rng.gen::<f64>()).ln() / total
        } else {
            f64::INFINITY
        };
        let jump_at = now + wait;
        while next_time < times.len() && times[next_time] < jump_at {
            out.push(phase);
            next_time += 1;
        }
        if next_time == times.len() {
            return out;
        }
        now = jump_at;
        let mut pick = rng.gen::<f64>() * total;
        let mut chosen = rates.len() - 1;
        for (i, &r) in rates.iter().enumerate() {
            if pick < r {
                chosen = i;
                break;
            }
            pick -= r;
        }
        let per_sector = edges * (d as usize - 1);
        let s = chosen / per_sector;
        let e = (chosen % per_sector) / (d as usize - 1);
        let m = (chosen % (d as usize - 1)) as u32 + 1;
        let (_, ph) = sectors[s].transition(&charges[s], e, m);
        sectors[s].apply(&mut charges[s], e, m);
        phase = (phase + ph) % d;
    }
}

/// Sums over a chunk of trials: `Σ w`, `Σ (Re w)²`, `Σ (Im w)²` per time.
#[derive(Clone, Debug)]
struct Partial {
    sum: Vec<C64>,
    sq_re: Vec<f64>,
    sq_im: Vec<f64>,
    count: usize,
}

/// Estimates of `⟨X_c(t)⟩` with standard errors and per-batch means of the real part.
#[derive(Clone, Debug)]
pub struct McEstimate {
    pub values: Vec<C64>,
    pub stderr_re: Vec<f64>,
    pub stderr_im: Vec<f64>,
    pub batches: Vec<Vec<f64>>,
}

pub fn mc_estimate(
    ci: &CodeInstance,
    bath: &BathSpectrum<f64>,
    times: &[f64],
    trials: usize,
    seed: u64,
) -> Result<McEstimate> {
    if trials == 0 {
        return Err(invalid("at least one trial is required"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) || times.iter().any(|&t| !(t >= 0.0)) {
        return Err(invalid("times must be non-negative and ascending"));
    }
    let d = ci.d();
    let sectors = [
        LocalRates::new(ci, bath, Sector::Z)?,
        LocalRates::new(ci, bath, Sector::X)?,
    ];
    let roots: Vec<C64> = (0..d).map(|m| root_of_unity::<f64>(d, -(m as i64))).collect();
    let (sites, edges) = (ci.sites(), ci.edges());
    let chunks = trials.div_ceil(CHUNK);
    let partials: Vec<Partial> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(trials);
            let mut p = Partial {
                sum: vec![C64::new(0.0, 0.0); times.len()],
                sq_re: vec![0.0; times.len()],
                sq_im: vec![0.0; times.len()],
                count: hi - lo,
            };
            for trial in lo..hi {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(trial as u64);
                for (i, ph) in trajectory(&sectors, sites, edges, times, &mut rng).into_iter().enumerate() {
                    let w = roots[ph as usize];
                    p.sum[i] += w;
                    p.sq_re[i] += w.re * w.re;
                    p.sq_im[i] += w.im * w.im;
                }
            }
            p
        })
        .collect();

    let nt = times.len();
    let n = trials as f64;
    let mut sum = vec![C64::new(0.0, 0.0); nt];
    let mut sq_re = vec![0.0; nt];
    let mut sq_im = vec![0.0; nt];
    for p in &partials {
        for i in 0..nt {
            sum[i] += p.sum[i];
            sq_re[i] += p.sq_re[i];
            sq_im[i] += p.sq_im[i];
        }
    }
    let values: Vec<C64> = sum.iter().map(|s| s / n).collect();
    let err = |sq: f64, mean: f64| {
        if trials < 2 {
            return 0.0;
        }
        let var = ((sq - n * mean * mean) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    };
    let stderr_re = (0..nt).map(|i| err(sq_re[i], values[i].re)).collect();
    let stderr_im = (0..nt).map(|i| err(sq_im[i], values[i].im)).collect();

    // Batches are contiguous runs of chunks, so they are fixed by (trials, seed).
    let nb = BATCHES.min(chunks);
    let mut batches = Vec::new();
    if nb >= 2 {
        for b in 0..nb {
            let lo = b * chunks / nb;
            let hi = (b + 1) * chunks / nb;
            let count: usize = partials[lo..hi].iter().map(|p| p.count).sum();
            batches.push(
                (0..nt)
                    .map(|i| partials[lo..hi].iter().map(|p| p.sum[i].re).sum::<f64>() / count as f64)
                    .collect(),
            );
        }
    }
    Ok(McEstimate {
        values,
        stderr_re,
        stderr_im,
        batches,
    })
}
