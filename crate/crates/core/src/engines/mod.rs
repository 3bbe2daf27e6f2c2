//! Decay of `⟨X_c(t)⟩` and the rates derived from it.

mod analysis;
mod exact;
mod mc;
mod reduced;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::code::CodeInstance;
use crate::davies::BathSpectrum;
use crate::error::Result;
use crate::linalg::C64;

pub use analysis::{
    crossover_between, crossover_kelvin, crossover_temperature, fit_initial_rate, gamma_closed_form,
    long_time_limit, Fit, LongTimeReport, FIT_EPSILON,
};
pub use exact::{exact_run, ExactRun};
pub use mc::{mc_estimate, LocalRates, McEstimate, BATCHES};
pub use reduced::{power_weight, ReducedGenerator, SectorChain, Transition, REDUCED_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Exact,
    Reduced,
    Mc,
}

impl std::fmt::Display for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Engine::Exact => "exact",
            Engine::Reduced => "reduced",
            Engine::Mc => "mc",
        })
    }
}

impl std::str::FromStr for Engine {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Engine::Exact),
            "reduced" => Ok(Engine::Reduced),
            "mc" => Ok(Engine::Mc),
            other => Err(crate::error::invalid(format!("unknown engine {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveMeta {
    pub d: u32,
    pub k: usize,
    pub beta: f64,
    pub r_zero: f64,
    pub r_positive: f64,
    pub seed: Option<u64>,
    pub engine: Engine,
    pub trials: Option<usize>,
    pub loop_len: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayCurve {
    pub times: Vec<f64>,
    pub values: Vec<C64>,
    /// Standard error of the real part (Monte Carlo only).
    pub stderr: Option<Vec<f64>>,
    /// Per-batch means of the real part (Monte Carlo only).
    pub batches: Vec<Vec<f64>>,
    pub meta: CurveMeta,
}

fn meta(ci: &CodeInstance, bath: &BathSpectrum<f64>, engine: Engine, seed: Option<u64>, trials: Option<usize>) -> CurveMeta {
    CurveMeta {
        d: ci.d(),
        k: ci.k(),
        beta: bath.beta,
        r_zero: bath.r_zero,
        r_positive: bath.r_positive,
        seed,
        engine,
        trials,
        loop_len: ci.loop_x().len(),
    }
}

impl DecayCurve {
    /// Writes `t,re_mean,im_mean,stderr` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,re_mean,im_mean,stderr")?;
        for (i, (t, v)) in self.times.iter().zip(&self.values).enumerate() {
            let se = self.stderr.as_ref().map_or(0.0, |s| s[i]);
            writeln!(w, "{t:.16e},{:.16e},{:.16e},{se:.16e}", v.re, v.im)?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ASCII output")
    }

    /// Largest imaginary part along the curve.
    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }
}

pub fn reduced_curve(ci: &CodeInstance, bath: &BathSpectrum<f64>, times: &[f64]) -> Result<DecayCurve> {
    let gen = ReducedGenerator::new(ci, bath)?;
    Ok(DecayCurve {
        times: times.to_vec(),
        values: gen.curve(times),
        stderr: None,
        batches: Vec::new(),
        meta: meta(ci, bath, Engine::Reduced, None, None),
    })
}

pub fn exact_curve(ci: &CodeInstance, bath: &BathSpectrum<f64>, times: &[f64]) -> Result<DecayCurve> {
    let run = exact_run(ci, bath, times)?;
    Ok(DecayCurve {
        times: times.to_vec(),
        values: run.values,
        stderr: None,
        batches: Vec::new(),
        meta: meta(ci, bath, Engine::Exact, None, None),
    })
}

pub fn mc_curve(ci: &CodeInstance, bath: &BathSpectrum<f64>, times: &[f64], trials: usize, seed: u64) -> Result<DecayCurve> {
    let est = mc_estimate(ci, bath, times, trials, seed)?;
    Ok(DecayCurve {
        times: times.to_vec(),
        values: est.values,
        stderr: Some(est.stderr_re),
        batches: est.batches,
        meta: meta(ci, bath, Engine::Mc, Some(seed), Some(trials)),
    })
}
