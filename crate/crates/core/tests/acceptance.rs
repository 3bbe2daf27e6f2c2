//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! A failing criterion is reported, not raised, so the rest still run.

use std::time::Instant;

use num_complex::Complex;

use qtoric::code::{neutral_sector, theoretical_gap};
use qtoric::davies::{
    analytic_components, charge_conjugation, dual_kernel_dimension, fourier_components, gibbs_state,
    interaction_operators, power_coupling_commutant, stationarity_residual, JumpSource, SparseDavies, BOHR_TOL,
};
use qtoric::engines::{
    crossover_between, crossover_temperature, exact_curve, exact_run, fit_initial_rate, gamma_closed_form,
    long_time_limit, mc_curve, reduced_curve, ReducedGenerator,
};
use qtoric::gpauli::character_inner_product;
use qtoric::linalg::C64;
use qtoric::processes::{
    braiding_phase, classify, jump_catalog, local_label, process_energy, projector_matrix, Orientation, ProcessClass,
};
use qtoric::{BathSpectrum, ChargeConfig, CodeInstance, DaviesGenerator, PauliSum, Sector};

type Outcome = Result<(bool, String), String>;

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn gap_formula() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for d in [2, 3, 4] {
        let exact = CodeInstance::new(d, 2).map_err(e)?.exact_gap().map_err(e)?;
        let want = 2.0 * (1.0 - (2.0 * std::f64::consts::PI / d as f64).cos());
        let dev = (exact - want).abs().max((theoretical_gap::<f64>(d) - want).abs());
        ok &= dev <= 1e-9;
        notes.push(format!("d={d} gap={exact:.12}"));
    }
    Ok((ok, notes.join(", ")))
}

fn energy_ledger() -> Outcome {
    let ci = CodeInstance::new(3, 2).map_err(e)?;
    let vacuum = ChargeConfig::trivial(ci.sites());
    let edge = 0;
    let create: f64 = process_energy(&ci, &vacuum, edge, 1, Sector::Z).map_err(e)?;
    // Scan for a configuration where the edge moves a charge, and one where it fuses two.
    let mut moved = None;
    let mut fused = None;
    let sites = ci.sites();
    for charges in neutral_sector(3, sites) {
        let mut c = ChargeConfig::trivial(sites);
        *c.charges_mut(Sector::Z) = charges;
        for power in [1i64, 2] {
            let m = power as u32;
            let label = local_label(&ci, &c, edge, Sector::Z);
            let de: f64 = process_energy(&ci, &c, edge, power, Sector::Z).map_err(e)?;
            // Move: one endpoint neutral, the other carrying exactly what the error removes.
            if label == (m, 0) && moved.is_none() {
                moved = Some(de);
            }
            if label == (m, m) && fused.is_none() {
                fused = Some(de);
            }
        }
    }
    let moved = moved.ok_or("no move configuration")?;
    let fused = fused.ok_or("no fusion configuration")?;
    let mut ok = create == 3.0 && moved == 0.0 && (fused + 1.5).abs() < 1e-15;

    let mut cases = 0usize;
    let mut mismatches = 0usize;
    let configs = neutral_sector(3, sites);
    for sector in [Sector::Z, Sector::X] {
        for edge in 0..ci.edges() {
            let catalog = jump_catalog(&ci, edge, sector).map_err(e)?;
            for zc in &configs {
                for xc in &configs {
                    let mut c = ChargeConfig::trivial(sites);
                    *c.charges_mut(Sector::Z) = zc.clone();
                    *c.charges_mut(Sector::X) = xc.clone();
                    let label = local_label(&ci, &c, edge, sector);
                    let class = classify(&ci, &c, edge, sector).map_err(e)?;
                    for power in [1u32, 2] {
                        cases += 1;
                        let de: f64 = process_energy(&ci, &c, edge, power as i64, sector).map_err(e)?;
                        let entry = catalog.iter().find(|j| j.terms.contains(&(power, label)));
                        let good = class.label == label && entry.is_some_and(|j| (j.bohr + de).abs() < 1e-12);
                        if !good {
                            mismatches += 1;
                        }
                    }
                }
            }
        }
    }
    ok &= mismatches == 0;
    Ok((
        ok,
        format!("create={create} move={moved} fuse={fused}; {cases} cases, {mismatches} mismatches"),
    ))
}

fn braiding() -> Outcome {
    use Orientation::*;
    let xz = braiding_phase(Sector::X, Sector::Z, CounterClockwise, 3).map_err(e)?;
    let zx = braiding_phase(Sector::Z, Sector::X, CounterClockwise, 3).map_err(e)?;
    let mut qubit = Vec::new();
    for (m, a) in [(Sector::X, Sector::Z), (Sector::Z, Sector::X)] {
        for o in [CounterClockwise, Clockwise] {
            qubit.push(braiding_phase(m, a, o, 2).map_err(e)?);
        }
    }
    let ok = xz == 2 && zx == 1 && qubit.iter().all(|&p| p == 1);
    Ok((ok, format!("d=3: x around z {xz}, z around x {zx}; d=2: {qubit:?}")))
}

fn short_time_rate() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    let beta = 0.9;
    let bath = BathSpectrum::new(beta, 0.4, 1.3).map_err(e)?;
    for d in [2u32, 3] {
        let ci = CodeInstance::new(d, 2).map_err(e)?;
        let delta = theoretical_gap::<f64>(d);
        let want = -(delta / 2.0) * ci.loop_x().len() as f64 * bath.rate(delta) * (-beta * delta).exp();
        let got = ReducedGenerator::new(&ci, &bath).map_err(e)?.initial_derivative();
        let dev = (got - Complex::new(want, 0.0)).norm();
        ok &= dev <= 1e-10;
        notes.push(format!("d={d} deviation {dev:.1e}"));
    }
    let ci = CodeInstance::new(2, 4).map_err(e)?;
    let bath = BathSpectrum::flat(0.5, 1.0).map_err(e)?;
    let times: Vec<f64> = (0..=25).map(|i| 0.05 * i as f64 / 25.0).collect();
    let curve = mc_curve(&ci, &bath, &times, 100_000, 2024).map_err(e)?;
    let fit = fit_initial_rate(&curve).map_err(e)?;
    let closed = gamma_closed_form(2, &bath, ci.loop_x().len());
    let z = (fit.rate - closed).abs() / fit.uncertainty;
    ok &= z <= 3.0;
    notes.push(format!(
        "mc k=4: fit {:.4} +- {:.4} vs {closed:.4} ({z:.2} sigma)",
        fit.rate, fit.uncertainty
    ));
    Ok((ok, notes.join(", ")))
}

fn gamma_sum() -> Outcome {
    let bath = BathSpectrum::new(0.8, 0.3, 1.0).map_err(e)?;
    let mut worst = 0.0f64;
    for d in [3u32, 4, 5] {
        let ci = CodeInstance::new(d, 2).map_err(e)?;
        let got = ReducedGenerator::new(&ci, &bath).map_err(e)?.initial_derivative();
        let closed = gamma_closed_form(d, &bath, ci.loop_x().len());
        worst = worst.max((got + Complex::new(closed, 0.0)).norm());
    }
    Ok((worst <= 1e-9, format!("max deviation {worst:.1e}")))
}

fn crossover() -> Outcome {
    let t = crossover_temperature(3).ok_or("no qutrit crossover")?;
    let want = 1.0 / (4.0f64 / 3.0).ln();
    let mut ok = (t - want).abs() <= 1e-10;
    let none: Vec<u32> = (4..=8).filter(|&d| crossover_temperature(d).is_some()).collect();
    ok &= none.is_empty();
    let mut pairs = Vec::new();
    for d in [3u32, 5, 7] {
        let c = crossover_between(d, d - 1);
        ok &= c.is_some();
        pairs.push(format!("({d},{}):{:.4}", d - 1, c.unwrap_or(f64::NAN)));
    }
    Ok((
        ok,
        format!("T_c={t:.12}, crossings vs d=2 for d=4..8: {none:?}, odd/even {}", pairs.join(" ")),
    ))
}

fn gibbs_relaxation() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (d, beta) in [(2u32, 1.0), (3, 0.7)] {
        let ci = CodeInstance::new(d, 2).map_err(e)?;
        let gen = DaviesGenerator::new(&ci, BathSpectrum::flat(beta, 1.0).map_err(e)?, JumpSource::EnergyGroups)
            .map_err(e)?;
        let rho = gibbs_state::<f64>(&ci, beta).map_err(e)?;
        let r = stationarity_residual(&gen, &rho).map_err(e)?;
        let report = long_time_limit(&ci, &BathSpectrum::flat(beta, 1.0).map_err(e)?).map_err(e)?;
        ok &= r <= 1e-10 && report.trace_xc_gibbs <= 1e-12;
        notes.push(format!("d={d} residual {r:.1e} Tr[X_c rho] {:.1e}", report.trace_xc_gibbs));
    }
    // Kernel: exact for qubits.
    let ci = CodeInstance::new(2, 2).map_err(e)?;
    let bath = BathSpectrum::flat(1.0, 1.0).map_err(e)?;
    let gen = DaviesGenerator::new(&ci, bath, JumpSource::EnergyGroups).map_err(e)?;
    let kernel = dual_kernel_dimension(&gen, &ci, 1e-9).map_err(e)?;
    ok &= kernel.dimension == 1;
    notes.push(format!("d=2 kernel {}", kernel.dimension));
    // Qutrits: charge conjugation commutes with every jump, so rho·C is
    // stationary too and the kernel has dimension at least 2.
    let q = CodeInstance::new(3, 2).map_err(e)?;
    let qgen = DaviesGenerator::new(&q, BathSpectrum::flat(0.7, 1.0).map_err(e)?, JumpSource::EnergyGroups)
        .map_err(e)?;
    let sparse = qgen.to_sparse().map_err(e)?;
    let n = q.edges();
    let psi: Vec<C64> = (0..3usize.pow(n as u32))
        .map(|i| Complex::new(((i * 7919) % 101) as f64 - 50.0, ((i * 104729) % 89) as f64 - 44.0))
        .collect();
    let image = sparse.heisenberg_apply(|v| charge_conjugation(3, n, v), &psi, None);
    let scale = psi.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let lc = image.iter().map(|a| a.norm()).fold(0.0, f64::max) / scale;
    let conserved = lc < 1e-10;
    ok &= !conserved;
    notes.push(format!(
        "d=3 |L(C)|/|C| = {lc:.1e}{}",
        if conserved { ", so rho C is stationary and the kernel is >= 2" } else { "" }
    ));
    // Late-time loop expectation.
    for d in [2u32, 3] {
        let ci = CodeInstance::new(d, 2).map_err(e)?;
        let bath = BathSpectrum::flat(1.0, 1.0).map_err(e)?;
        let t = 20.0 / gamma_closed_form(d, &bath, ci.loop_x().len());
        let curve = if d == 2 {
            exact_curve(&ci, &bath, &[t]).map_err(e)?
        } else {
            reduced_curve(&ci, &bath, &[t]).map_err(e)?
        };
        let v = curve.values[0].norm();
        ok &= v < 1e-3;
        notes.push(format!("d={d} |<X_c(20/G)>| {v:.1e}"));
    }
    Ok((ok, notes.join(", ")))
}

fn loop_derivative_oracle() -> Outcome {
    let ci = CodeInstance::new(3, 2).map_err(e)?;
    let beta = 0.7;
    let bath = BathSpectrum::new(beta, 0.5, 0.8).map_err(e)?;
    let sparse = SparseDavies::from_fourier(&ci, &bath, BOHR_TOL).map_err(e)?;
    let gs = ci.logical_eigenstate::<f64>().map_err(e)?;
    let x = ci.word::<f64>(ci.x_c()).map_err(e)?;
    let apply = |v: &[C64]| x.apply(v).expect("sized");
    let xv = apply(&gs);
    let xc: C64 = gs.iter().zip(&xv).map(|(a, b)| a.conj() * b).sum();
    let want = xc * (-1.5 * bath.rate(3.0) * (-3.0 * beta).exp() * ci.loop_x().len() as f64);
    let got = sparse.heisenberg_expectation(apply, &gs, None);
    let x_part = sparse.heisenberg_expectation(apply, &gs, Some(Sector::X)).norm();
    let dev = (got - want).norm();
    Ok((dev <= 1e-10 && x_part <= 1e-12, format!("deviation {dev:.1e}, x part {x_part:.1e}")))
}

fn characters_and_commutant() -> Outcome {
    let chi = (2..=12)
        .map(|d| (character_inner_product::<f64>(d) - 1.0).abs())
        .fold(0.0, f64::max);
    let mut dims = Vec::new();
    for d in 2..=8 {
        dims.push(power_coupling_commutant(d).map_err(e)?);
    }
    Ok((
        chi <= 1e-10 && dims.iter().all(|&k| k == 1),
        format!("character deviation {chi:.1e}, commutants {dims:?}"),
    ))
}

fn structural_identities() -> Outcome {
    let ci = CodeInstance::new(3, 2).map_err(e)?;
    let n = ci.edges();
    let mut worst = 0.0f64;
    for sector in [Sector::Z, Sector::X] {
        let mut acc = PauliSum::zero(3, n);
        for j in jump_catalog(&ci, 0, sector).map_err(e)? {
            acc = acc.add(&j.operator::<f64>(&ci).map_err(e)?).map_err(e)?;
        }
        let sigma = |p: i64| match sector {
            Sector::X => qtoric::PauliWord::x(3, 0, p),
            Sector::Z => qtoric::PauliWord::z(3, 0, p),
        };
        let target = PauliSum::from_word(&sigma(1), n)
            .map_err(e)?
            .add(&PauliSum::from_word(&sigma(-1), n).map_err(e)?)
            .map_err(e)?;
        worst = worst.max(acc.sub(&target).map_err(e)?.max_coef());
    }
    let completeness = worst;

    let mut proj = 0.0f64;
    for sector in [Sector::Z, Sector::X] {
        let ps: Vec<PauliSum> = ProcessClass::qutrit_classes()
            .iter()
            .map(|c| projector_matrix(c, 0, &ci, sector))
            .collect::<qtoric::Result<_>>()
            .map_err(e)?;
        let mut total = PauliSum::zero(3, n);
        for (i, p) in ps.iter().enumerate() {
            total = total.add(p).map_err(e)?;
            proj = proj.max(p.sub(&p.adjoint()).map_err(e)?.max_abs_entry().map_err(e)?);
            proj = proj.max(p.mul(p).map_err(e)?.sub(p).map_err(e)?.max_abs_entry().map_err(e)?);
            for q in &ps[i + 1..] {
                proj = proj.max(p.mul(q).map_err(e)?.max_abs_entry().map_err(e)?);
            }
        }
        let id = PauliSum::identity(3, n);
        proj = proj.max(total.sub(&id).map_err(e)?.max_abs_entry().map_err(e)?);
    }

    let h = ci.hamiltonian::<f64>().map_err(e)?;
    let mut eig = 0.0f64;
    for c in interaction_operators(&ci).iter().filter(|c| c.edge == 0) {
        for (w, s) in analytic_components::<f64>(&ci, c).map_err(e)? {
            let lhs = h.commutator(&s).map_err(e)?;
            eig = eig.max(lhs.add(&s.scale(Complex::new(w, 0.0))).map_err(e)?.max_coef());
        }
    }

    let spec = ci.exact_spectrum_blocks().map_err(e)?;
    let coupling = interaction_operators(&ci)
        .into_iter()
        .find(|c| c.sector == Sector::Z)
        .ok_or("no coupling")?;
    let s = coupling.operator::<f64>(3, n).map_err(e)?.to_csr().map_err(e)?;
    let freqs: Vec<f64> = fourier_components(&s, &spec, BOHR_TOL).map_err(e)?.iter().map(|b| b.0).collect();
    let expect = [-3.0, -1.5, 0.0, 1.5, 3.0];
    let bohr_ok = freqs.len() == expect.len() && freqs.iter().zip(expect).all(|(f, x)| (f - x).abs() < 1e-9);

    let ok = completeness <= 1e-10 && proj <= 1e-10 && eig <= 1e-10 && bohr_ok;
    Ok((
        ok,
        format!("completeness {completeness:.1e}, projectors {proj:.1e}, eigenoperators {eig:.1e}, Bohr set {freqs:?}"),
    ))
}

fn engine_triangle() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    let ci = CodeInstance::new(2, 2).map_err(e)?;
    let bath = BathSpectrum::flat(0.6, 1.0).map_err(e)?;
    let times: Vec<f64> = (0..=10).map(|i| 0.3 * i as f64).collect();
    let exact = exact_run(&ci, &bath, &times).map_err(e)?;
    let reduced = reduced_curve(&ci, &bath, &times).map_err(e)?;
    let diff = exact
        .values
        .iter()
        .zip(&reduced.values)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    ok &= diff <= 1e-8;
    notes.push(format!("exact vs reduced {diff:.1e}"));

    let q = CodeInstance::new(3, 2).map_err(e)?;
    for beta in [0.5, 1.0, 2.0] {
        let bath = BathSpectrum::flat(beta, 1.0).map_err(e)?;
        let tau = 1.0 / gamma_closed_form(3, &bath, q.loop_x().len());
        let times: Vec<f64> = (0..=5).map(|i| 0.2 * tau * i as f64).collect();
        let mc = mc_curve(&q, &bath, &times, 100_000, 77).map_err(e)?;
        let red = reduced_curve(&q, &bath, &times).map_err(e)?;
        let err = mc.stderr.clone().ok_or("mc curve without stderr")?;
        let mut worst = 0.0f64;
        for i in 1..times.len() {
            worst = worst.max((mc.values[i].re - red.values[i].re).abs() / err[i]);
        }
        ok &= worst <= 3.0;
        notes.push(format!("beta={beta}: {worst:.2} stderr"));
    }
    Ok((ok, notes.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("gap formula", gap_formula),
        ("energy ledger", energy_ledger),
        ("braiding", braiding),
        ("short-time rate", short_time_rate),
        ("gamma_d sum", gamma_sum),
        ("crossover", crossover),
        ("gibbs relaxation", gibbs_relaxation),
        ("loop derivative oracle", loop_derivative_oracle),
        ("characters and commutant", characters_and_commutant),
        ("structural identities", structural_identities),
        ("engine triangle", engine_triangle),
    ];
    let mut passed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = match f() {
            Ok(r) => r,
            Err(msg) => (false, format!("error: {msg}")),
        };
        passed += ok as usize;
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name}: {detail} [{:.1}s]", i + 1, start.elapsed().as_secs_f64());
    }
    println!("{passed}/{} criteria passed", criteria.len());
}
