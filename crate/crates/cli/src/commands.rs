use std::fmt::Write as _;

use qtoric::code::theoretical_gap;
use qtoric::engines::{
    crossover_between, crossover_kelvin, exact_curve, fit_initial_rate, gamma_closed_form, mc_curve, reduced_curve,
    Engine,
};
use qtoric::gpauli::{character_inner_product, commutant_dimension, dense_matrix};
use qtoric::processes::energy_groups;
use qtoric::{CodeInstance, DecayCurve, DenseCap, PauliWord};

use crate::config::{Resolved, RunConfig, Spacing};
use crate::output::{artifact_paths, timestamp, write_atomic, Manifest, GIT_DESCRIBE};
use crate::{Axis, CliError, RunArgs};

pub fn gap(d: u32, k: usize) -> Result<(), CliError> {
    let ci = CodeInstance::new(d, k)?;
    println!("theoretical_gap {}", theoretical_gap::<f64>(d));
    println!("exact_gap {}", ci.exact_gap()?);
    Ok(())
}

pub fn spectrum(d: u32, k: usize) -> Result<(), CliError> {
    let ci = CodeInstance::new(d, k)?;
    println!("energy,multiplicity");
    for (e, m) in ci.exact_spectrum()? {
        println!("{e},{m}");
    }
    Ok(())
}

pub fn processes(d: u32, k: usize) -> Result<(), CliError> {
    // Energies depend only on the local labels; the instance validates d and k.
    CodeInstance::new(d, k)?;
    println!("power,bohr,labels");
    for power in 1..d {
        for (omega, labels) in energy_groups(d, power) {
            let names: Vec<String> = labels.iter().map(|(a, b)| format!("{a}-{b}")).collect();
            println!("{power},{omega},{}", names.join(" "));
        }
    }
    Ok(())
}

pub fn algebra(d_max: u32) -> Result<(), CliError> {
    if d_max < 2 {
        return Err(CliError::Config("d-max must be at least 2".into()));
    }
    println!("d,character_inner_product,commutant_dimension");
    for d in 2..=d_max {
        let chi = character_inner_product::<f64>(d);
        let gens = [PauliWord::x(d, 0, 1), PauliWord::z(d, 0, 1)]
            .iter()
            .map(|w| dense_matrix::<f64>(w, 1, DenseCap::default()))
            .collect::<qtoric::Result<Vec<_>>>()?;
        println!("{d},{chi},{}", commutant_dimension(&gens)?);
    }
    Ok(())
}

fn to_config(args: &RunArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if args.d.is_some() {
        cfg.d = args.d;
    }
    if args.k.is_some() {
        cfg.k = args.k;
    }
    if args.beta.is_some() {
        cfg.beta = args.beta;
    }
    if let Some(r) = args.r0 {
        cfg.rates.zero = r;
    }
    if let Some(r) = args.rate {
        cfg.rates.positive = r;
    }
    if let Some(e) = args.engine {
        cfg.engine = e;
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(o) = &args.out {
        cfg.output_dir = o.clone();
    }
    if let Some(t) = args.t_start {
        cfg.times.start = t;
    }
    if args.t_stop.is_some() {
        cfg.times.stop = args.t_stop;
    }
    if let Some(n) = args.t_count {
        cfg.times.count = n;
    }
    if args.log_times {
        cfg.times.spacing = Spacing::Log;
    }
    if let Some(dir) = args.loop_direction {
        cfg.loop_spec.direction = dir;
    }
    if let Some(off) = args.loop_offset {
        cfg.loop_spec.offset = off;
    }
    Ok(cfg)
}

pub fn run_engine(cfg: &Resolved) -> Result<DecayCurve, CliError> {
    let ci = CodeInstance::with_loop(cfg.d, cfg.k, cfg.loop_spec.direction, cfg.loop_spec.offset)?;
    let bath = cfg.bath();
    let times = cfg.time_grid();
    let curve = match cfg.engine {
        Engine::Exact => exact_curve(&ci, &bath, &times)?,
        Engine::Reduced => reduced_curve(&ci, &bath, &times)?,
        Engine::Mc => mc_curve(&ci, &bath, &times, cfg.trials, cfg.seed)?,
    };
    Ok(curve)
}

fn manifest_json(cfg: &Resolved, loop_len: usize, csv: &std::path::Path) -> Result<Vec<u8>, CliError> {
    let m = Manifest {
        d: cfg.d,
        k: cfg.k,
        beta: cfg.beta,
        rates: cfg.rates,
        seed: cfg.seed,
        engine: cfg.engine.to_string(),
        trials: (cfg.engine == Engine::Mc).then_some(cfg.trials),
        loop_len,
        git_describe: GIT_DESCRIBE,
        timestamp: timestamp(),
        config: cfg,
        csv: csv.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
    };
    let mut bytes = serde_json::to_vec_pretty(&m).map_err(|e| CliError::Other(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn decay(args: &RunArgs) -> Result<(), CliError> {
    let cfg = to_config(args)?.resolve()?;
    let curve = run_engine(&cfg)?;
    let stem = format!("decay_d{}_k{}_{}", cfg.d, cfg.k, cfg.engine);
    let (csv_path, json_path) = artifact_paths(&cfg, &stem);
    write_atomic(&csv_path, curve.to_csv().as_bytes())?;
    write_atomic(&json_path, &manifest_json(&cfg, curve.meta.loop_len, &csv_path)?)?;
    let closed = gamma_closed_form(cfg.d, &cfg.bath(), curve.meta.loop_len);
    println!("csv {}", csv_path.display());
    println!("manifest {}", json_path.display());
    println!("gamma_closed {closed}");
    match fit_initial_rate(&curve) {
        Ok(fit) => {
            println!("gamma_fit {} +- {}", fit.rate, fit.uncertainty);
            println!("ratio {}", fit.rate / closed);
        }
        Err(e) => println!("gamma_fit unavailable ({e})"),
    }
    Ok(())
}

pub fn sweep(args: &RunArgs, axis: Axis, values: &[f64]) -> Result<(), CliError> {
    let base = to_config(args)?;
    let with_value = |v: f64| -> Result<RunConfig, CliError> {
        let mut c = base.clone();
        match axis {
            Axis::Beta => c.beta = Some(v),
            Axis::D => c.d = Some(as_integer(v, "d")? as u32),
            Axis::K => c.k = Some(as_integer(v, "k")? as usize),
        }
        Ok(c)
    };
    let first = with_value(*values.first().ok_or_else(|| CliError::Config("no sweep values".into()))?)?.resolve()?;
    let name = match axis {
        Axis::Beta => "beta",
        Axis::D => "d",
        Axis::K => "k",
    };
    let mut csv = format!("{name},gamma_fit,gamma_closed,stderr,error\n");
    for &v in values {
        let row = with_value(v).and_then(|c| c.resolve()).and_then(|cfg| {
            let curve = run_engine(&cfg)?;
            let closed = gamma_closed_form(cfg.d, &cfg.bath(), curve.meta.loop_len);
            let fit = fit_initial_rate(&curve)?;
            Ok((fit, closed))
        });
        match row {
            Ok((fit, closed)) => {
                writeln!(csv, "{v},{:.16e},{:.16e},{:.16e},", fit.rate, closed, fit.uncertainty).unwrap();
            }
            Err(e) => {
                let msg = e.to_string().replace([',', '\n'], ";");
                writeln!(csv, "{v},,,,{msg}").unwrap();
            }
        }
    }
    let (csv_path, json_path) = artifact_paths(&first, &format!("sweep_{name}"));
    write_atomic(&csv_path, csv.as_bytes())?;
    let loop_len = first.k;
    write_atomic(&json_path, &manifest_json(&first, loop_len, &csv_path)?)?;
    print!("{csv}");
    Ok(())
}

fn as_integer(v: f64, what: &str) -> Result<u64, CliError> {
    if v.fract() != 0.0 || v < 0.0 {
        return Err(CliError::Config(format!("{what} values must be non-negative integers, got {v}")));
    }
    Ok(v as u64)
}

pub fn crossover(d: u32, versus: u32, e0_hz: Option<f64>) -> Result<(), CliError> {
    if d < 2 || versus < 2 {
        return Err(CliError::Config("levels must be at least 2".into()));
    }
    if let Some(f) = e0_hz {
        if !(f > 0.0) {
            return Err(CliError::Config("e0-hz must be positive".into()));
        }
    }
    match crossover_between(d, versus) {
        None => println!("no crossover between d={d} and d={versus}"),
        Some(t) => {
            println!("T_c {t} (units of E0/k_B)");
            if let Some(f) = e0_hz {
                let kelvin = if versus == 2 { crossover_kelvin(d, f) } else { None };
                // E0 = h·f.
                let kelvin = kelvin.unwrap_or(t * 6.626_070_15e-34 * f / 1.380_649e-23);
                println!("T_c_kelvin {kelvin}");
            }
        }
    }
    Ok(())
}
