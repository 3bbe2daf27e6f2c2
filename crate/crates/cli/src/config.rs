//! Run configuration: JSON file, command-line overrides, validation.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use qtoric::engines::{gamma_closed_form, Engine};
use qtoric::BathSpectrum;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    #[serde(rename = "0")]
    pub zero: f64,
    pub positive: f64,
}

impl Default for Rates {
    fn default() -> Self {
        Rates {
            zero: 1.0,
            positive: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Times {
    pub start: f64,
    /// Defaults to `min(0.06/Γ_d, 0.1/max(R0, R+))`, inside the fit window and
    /// short against anyon hopping.
    pub stop: Option<f64>,
    pub count: usize,
    pub spacing: Spacing,
}

impl Default for Times {
    fn default() -> Self {
        Times {
            start: 0.0,
            stop: None,
            count: 25,
            spacing: Spacing::Linear,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopSpec {
    pub sector: String,
    pub direction: u8,
    pub offset: usize,
}

impl Default for LoopSpec {
    fn default() -> Self {
        LoopSpec {
            sector: "x".into(),
            direction: 1,
            offset: 0,
        }
    }
}

/// Every field except `d`, `k` and `beta` has a default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub d: Option<u32>,
    pub k: Option<usize>,
    pub beta: Option<f64>,
    #[serde(default)]
    pub rates: Rates,
    #[serde(default = "default_engine")]
    pub engine: Engine,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub times: Times,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, rename = "loop")]
    pub loop_spec: LoopSpec,
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,
}

fn default_engine() -> Engine {
    Engine::Reduced
}

fn default_trials() -> usize {
    100_000
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            d: None,
            k: None,
            beta: None,
            rates: Rates::default(),
            engine: default_engine(),
            trials: default_trials(),
            times: Times::default(),
            seed: 0,
            loop_spec: LoopSpec::default(),
            output_dir: default_out(),
        }
    }
}

/// Validated configuration with every field resolved.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Resolved {
    pub d: u32,
    pub k: usize,
    pub beta: f64,
    pub rates: Rates,
    pub engine: Engine,
    pub trials: usize,
    pub times: Times,
    pub seed: u64,
    #[serde(rename = "loop")]
    pub loop_spec: LoopSpec,
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let need = |what: &str| CliError::Config(format!("{what} is required (flag or config file)"));
        let d = self.d.ok_or_else(|| need("d"))?;
        let k = self.k.ok_or_else(|| need("k"))?;
        let beta = self.beta.ok_or_else(|| need("beta"))?;
        if !(2..=255).contains(&d) {
            return Err(CliError::Config(format!("d must be in 2..=255, got {d}")));
        }
        if k < 2 {
            return Err(CliError::Config(format!("k must be at least 2, got {k}")));
        }
        if beta.is_nan() || beta < 0.0 {
            return Err(CliError::Config(format!("beta must be non-negative, got {beta}")));
        }
        if !(self.rates.zero >= 0.0 && self.rates.positive >= 0.0) {
            return Err(CliError::Config("rates must be non-negative".into()));
        }
        if self.trials == 0 {
            return Err(CliError::Config("trials must be at least 1".into()));
        }
        if self.loop_spec.sector != "x" {
            return Err(CliError::Config("only the x-type loop operator is tracked (sector \"x\")".into()));
        }
        if !(1..=2).contains(&self.loop_spec.direction) {
            return Err(CliError::Config("loop direction must be 1 or 2".into()));
        }
        let t = self.times;
        if t.count < 2 {
            return Err(CliError::Config("times.count must be at least 2".into()));
        }
        if !(t.start >= 0.0) || t.stop.is_some_and(|s| !(s > t.start)) {
            return Err(CliError::Config("times need 0 <= start < stop".into()));
        }
        if t.spacing == Spacing::Log && t.start <= 0.0 {
            return Err(CliError::Config("log spacing needs start > 0".into()));
        }
        let mut times = t;
        if times.stop.is_none() {
            let bath = BathSpectrum::new(beta, self.rates.zero, self.rates.positive)
                .map_err(|e| CliError::Config(e.to_string()))?;
            let g = gamma_closed_form(d, &bath, k);
            let fastest = self.rates.zero.max(self.rates.positive);
            let mut stop = if g > 0.0 { 0.06 / g } else { 1.0 };
            if fastest > 0.0 {
                stop = stop.min(0.1 / fastest);
            }
            times.stop = Some(stop);
        }
        Ok(Resolved {
            d,
            k,
            beta,
            rates: self.rates,
            engine: self.engine,
            trials: self.trials,
            times,
            seed: self.seed,
            loop_spec: self.loop_spec.clone(),
            output_dir: self.output_dir.clone(),
        })
    }
}

impl Resolved {
    pub fn bath(&self) -> BathSpectrum {
        BathSpectrum::new(self.beta, self.rates.zero, self.rates.positive).expect("validated")
    }

    pub fn time_grid(&self) -> Vec<f64> {
        let t = self.times;
        let stop = t.stop.expect("resolved");
        let n = t.count - 1;
        (0..=n)
            .map(|i| {
                let f = i as f64 / n as f64;
                match t.spacing {
                    Spacing::Linear => t.start + (stop - t.start) * f,
                    Spacing::Log => t.start * (stop / t.start).powf(f),
                }
            })
            .collect()
    }
}
