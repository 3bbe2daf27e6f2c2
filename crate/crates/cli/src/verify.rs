//! `qtoric verify`: internal consistency checks, one JSON line each.

use num_complex::Complex;
use serde::Serialize;

use qtoric::code::{neutral_sector, theoretical_gap};
use qtoric::davies::{
    gibbs_state, power_coupling_commutant, stationarity_residual, JumpSource, SparseDavies, BOHR_TOL,
};
use qtoric::engines::{exact_run, gamma_closed_form, mc_curve, reduced_curve, ReducedGenerator};
use qtoric::gpauli::{character_inner_product, dense_matrix};
use qtoric::processes::{apply_error, braiding_phase, jump_catalog, process_energy, Orientation};
use qtoric::{
    commutation_phase, word_mul, BathSpectrum, ChargeConfig, CodeInstance, DaviesGenerator, DenseCap, PauliSum,
    PauliWord, Sector,
};

use crate::{CliError, Suite};

#[derive(Serialize)]
struct Check {
    check: String,
    passed: bool,
    residual: f64,
    tolerance: f64,
}

struct Report {
    failed: usize,
}

impl Report {
    fn record(&mut self, check: impl Into<String>, residual: f64, tolerance: f64) {
        let passed = residual <= tolerance;
        let c = Check {
            check: check.into(),
            passed,
            residual,
            tolerance,
        };
        println!("{}", serde_json::to_string(&c).expect("plain struct"));
        if !passed {
            self.failed += 1;
        }
    }

    fn record_result(&mut self, check: &str, tolerance: f64, f: impl FnOnce() -> qtoric::Result<f64>) {
        match f() {
            Ok(r) => self.record(check, r, tolerance),
            Err(e) => {
                eprintln!("{check}: {e}");
                self.record(check, f64::INFINITY, tolerance);
            }
        }
    }
}

pub fn run(suite: Suite) -> Result<(), CliError> {
    let mut rep = Report { failed: 0 };
    let all = suite == Suite::All;
    if all || suite == Suite::Algebra {
        algebra(&mut rep);
    }
    if all || suite == Suite::Code {
        code(&mut rep);
    }
    if all || suite == Suite::Processes {
        processes(&mut rep);
    }
    if all || suite == Suite::Davies {
        davies(&mut rep);
    }
    if all || suite == Suite::Engines {
        engines(&mut rep);
    }
    if rep.failed > 0 {
        return Err(CliError::Verification(format!("{} checks failed", rep.failed)));
    }
    Ok(())
}

/// Small deterministic word generator for sampled identities.
fn sample_word(d: u32, edges: usize, seed: &mut u64) -> PauliWord {
    let mut next = || {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (*seed >> 33) as u32 % d
    };
    let x: Vec<(usize, i64)> = (0..edges).map(|e| (e, next() as i64)).collect();
    let z: Vec<(usize, i64)> = (0..edges).map(|e| (e, next() as i64)).collect();
    let phase = next() as i64;
    PauliWord::from_parts(d, phase, x, z)
}

fn algebra(rep: &mut Report) {
    for d in 2..=12 {
        rep.record(format!("algebra.character_d{d}"), (character_inner_product::<f64>(d) - 1.0).abs(), 1e-10);
    }
    for d in 2..=8 {
        rep.record_result(&format!("algebra.commutant_d{d}"), 0.0, || {
            Ok(power_coupling_commutant(d)? as f64 - 1.0)
        });
    }
    let mut seed = 7u64;
    for d in 2..=5 {
        rep.record_result(&format!("algebra.homomorphism_d{d}"), 1e-12, || {
            let mut worst = 0.0f64;
            for _ in 0..20 {
                let p = sample_word(d, 2, &mut seed);
                let q = sample_word(d, 2, &mut seed);
                let cap = DenseCap::default();
                let pq = dense_matrix::<f64>(&word_mul(&p, &q)?, 2, cap)?;
                let prod = dense_matrix::<f64>(&p, 2, cap)?.mul(&dense_matrix::<f64>(&q, 2, cap)?);
                worst = worst.max(pq.max_abs_diff(&prod));
                let a = commutation_phase(&p, &q)?;
                let b = commutation_phase(&q, &p)?;
                if (a + b) % d != 0 {
                    worst = f64::INFINITY;
                }
            }
            Ok(worst)
        });
    }
}

fn code(rep: &mut Report) {
    for d in [2, 3] {
        rep.record_result(&format!("code.gap_d{d}"), 1e-9, || {
            let ci = CodeInstance::new(d, 2)?;
            Ok((ci.exact_gap()? - theoretical_gap::<f64>(d)).abs())
        });
        rep.record_result(&format!("code.degeneracy_d{d}"), 0.0, || {
            let ci = CodeInstance::new(d, 2)?;
            Ok((ci.ground_degeneracy()? as f64 - (d * d) as f64).abs())
        });
        rep.record_result(&format!("code.logical_d{d}"), 1e-10, || {
            let r = CodeInstance::new(d, 2)?.verify_logical()?;
            Ok(if r.passed() { r.leakage } else { f64::INFINITY })
        });
        rep.record_result(&format!("code.charge_spectrum_d{d}"), 1e-9, || {
            let ci = CodeInstance::new(d, 2)?;
            let exact = ci.exact_spectrum()?;
            let charges = ci.charge_spectrum();
            if exact.len() != charges.len() {
                return Ok(f64::INFINITY);
            }
            Ok(exact
                .iter()
                .zip(&charges)
                .map(|(a, b)| if a.1 == b.1 { (a.0 - b.0).abs() } else { f64::INFINITY })
                .fold(0.0, f64::max))
        });
    }
}

fn processes(rep: &mut Report) {
    for d in [2, 3] {
        // Every neutral configuration, edge, power and sector: the catalog
        // entry holding the (power, label) pair has Bohr frequency −ΔE.
        rep.record_result(&format!("processes.energy_vs_catalog_d{d}"), 1e-12, || {
            let ci = CodeInstance::new(d, 2)?;
            let sites = ci.sites();
            let mut worst = 0.0f64;
            for sector in [Sector::X, Sector::Z] {
                for edge in 0..ci.edges() {
                    let catalog = jump_catalog(&ci, edge, sector)?;
                    for charges in neutral_sector(d, sites) {
                        let mut c = ChargeConfig::trivial(sites);
                        *c.charges_mut(sector) = charges;
                        let label = qtoric::processes::local_label(&ci, &c, edge, sector);
                        for power in 1..d {
                            let de = process_energy::<f64>(&ci, &c, edge, power as i64, sector)?;
                            let entry = catalog.iter().find(|j| j.terms.contains(&(power, label)));
                            worst = worst.max(match entry {
                                Some(j) => (j.bohr + de).abs(),
                                None => f64::INFINITY,
                            });
                        }
                    }
                }
            }
            Ok(worst)
        });
    }
    rep.record_result("processes.creation_energy_d3", 1e-12, || {
        let ci = CodeInstance::new(3, 2)?;
        let c = ChargeConfig::trivial(ci.sites());
        Ok((process_energy::<f64>(&ci, &c, 0, 1, Sector::Z)? - 3.0).abs())
    });
    rep.record_result("processes.loop_phase_d3", 0.0, || {
        let ci = CodeInstance::new(3, 2)?;
        let c = ChargeConfig::trivial(ci.sites());
        let edge = ci.loop_x().edges[0].0;
        let (_, phase) = apply_error(&ci, &c, edge, 1, Sector::Z)?;
        Ok(if phase == 0 { 1.0 } else { 0.0 })
    });
    rep.record_result("processes.completeness_d3", 1e-10, || {
        let ci = CodeInstance::new(3, 2)?;
        let n = ci.edges();
        let mut worst = 0.0f64;
        for sector in [Sector::X, Sector::Z] {
            let mut acc = PauliSum::zero(3, n);
            for j in jump_catalog(&ci, 0, sector)? {
                acc = acc.add(&j.operator::<f64>(&ci)?)?;
            }
            let word = |p: i64| match sector {
                Sector::X => PauliWord::x(3, 0, p),
                Sector::Z => PauliWord::z(3, 0, p),
            };
            let target = PauliSum::from_word(&word(1), n)?.add(&PauliSum::from_word(&word(-1), n)?)?;
            worst = worst.max(acc.sub(&target)?.max_coef());
        }
        Ok(worst)
    });
    for d in [2u32, 3] {
        rep.record_result(&format!("processes.braiding_d{d}"), 0.0, || {
            let ccw = braiding_phase(Sector::X, Sector::Z, Orientation::CounterClockwise, d)?;
            let cw = braiding_phase(Sector::X, Sector::Z, Orientation::Clockwise, d)?;
            Ok(if ccw != 0 && (ccw + cw) % d == 0 { 0.0 } else { 1.0 })
        });
    }
}

fn davies(rep: &mut Report) {
    for d in [2, 3] {
        rep.record_result(&format!("davies.unital_d{d}"), 1e-12, || {
            let ci = CodeInstance::new(d, 2)?;
            let gen = DaviesGenerator::new(&ci, BathSpectrum::flat(0.9, 1.0)?, JumpSource::EnergyGroups)?;
            Ok(gen.generator(&PauliSum::identity(d, ci.edges()))?.max_coef())
        });
    }
    for (d, beta) in [(2, 1.0), (3, 0.7)] {
        rep.record_result(&format!("davies.gibbs_stationary_d{d}"), 1e-10, || {
            let ci = CodeInstance::new(d, 2)?;
            let gen = DaviesGenerator::new(&ci, BathSpectrum::flat(beta, 1.0)?, JumpSource::EnergyGroups)?;
            stationarity_residual(&gen, &gibbs_state::<f64>(&ci, beta)?)
        });
    }
    rep.record_result("davies.loop_derivative_d3", 1e-10, || {
        let ci = CodeInstance::new(3, 2)?;
        let beta = 0.7;
        let bath = BathSpectrum::new(beta, 0.5, 1.0)?;
        let sparse = SparseDavies::from_fourier(&ci, &bath, BOHR_TOL)?;
        let gs = ci.logical_eigenstate::<f64>()?;
        let x = ci.word::<f64>(ci.x_c())?;
        let got = sparse.heisenberg_expectation(|v| x.apply(v).expect("sized"), &gs, None);
        let want = -1.5 * (-3.0 * beta).exp() * ci.loop_x().len() as f64;
        Ok((got - Complex::new(want, 0.0)).norm())
    });
}

fn engines(rep: &mut Report) {
    for d in 2..=5 {
        rep.record_result(&format!("engines.derivative_d{d}"), 1e-9, || {
            let ci = CodeInstance::new(d, 2)?;
            let bath = BathSpectrum::new(0.8, 0.3, 1.0)?;
            let g = ReducedGenerator::new(&ci, &bath)?;
            let closed = gamma_closed_form(d, &bath, ci.loop_x().len());
            Ok((g.initial_derivative().re + closed).abs() / closed)
        });
    }
    rep.record_result("engines.exact_vs_reduced_d2", 1e-8, || {
        let ci = CodeInstance::new(2, 2)?;
        let bath = BathSpectrum::flat(0.6, 1.0)?;
        let times: Vec<f64> = (0..6).map(|i| i as f64 * 0.2).collect();
        let exact = exact_run(&ci, &bath, &times)?;
        let reduced = reduced_curve(&ci, &bath, &times)?;
        let diff = exact
            .values
            .iter()
            .zip(&reduced.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        Ok(diff.max(exact.picture_defect).max(exact.transformed_defect))
    });
    rep.record_result("engines.mc_vs_reduced_d3_sigma", 4.0, || {
        let ci = CodeInstance::new(3, 2)?;
        let bath = BathSpectrum::flat(1.0, 1.0)?;
        let times: Vec<f64> = (0..5).map(|i| i as f64 * 0.5).collect();
        let mc = mc_curve(&ci, &bath, &times, 20_000, 11)?;
        let reduced = reduced_curve(&ci, &bath, &times)?;
        let err = mc.stderr.clone().unwrap_or_default();
        let mut worst = 0.0f64;
        for i in 1..times.len() {
            worst = worst.max((mc.values[i].re - reduced.values[i].re).abs() / err[i].max(1e-12));
        }
        Ok(worst)
    });
    rep.record_result("engines.crossover_d3", 1e-9, || {
        let t = qtoric::engines::crossover_temperature(3).ok_or_else(|| qtoric::Error::Numerical("no root".into()))?;
        Ok((t - 1.0 / (4.0f64 / 3.0).ln()).abs())
    });
}
