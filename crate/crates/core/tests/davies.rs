use num_complex::Complex;
use qtoric::davies::{
    analytic_components, catalog_components, charge_conjugation, dual_kernel_dimension, fourier_components,
    gibbs_state, hermitian_coupling_commutant, interaction_operators, power_coupling_commutant,
    stationarity_residual, BathSpectrum, DaviesGenerator, JumpSource, SparseDavies, BOHR_TOL,
};
use qtoric::linalg::C64;
use qtoric::{CodeInstance, PauliSum, Sector};

fn one() -> C64 {
    Complex::new(1.0, 0.0)
}

#[test]
fn detailed_balance_of_rates() {
    let bath = BathSpectrum::new(0.8, 0.3, 1.7).unwrap();
    for w in [0.5f64, 1.5, 3.0, 4.0] {
        let ratio = bath.rate(-w) / bath.rate(w);
        assert!((ratio - (-0.8 * w).exp()).abs() < 1e-15);
    }
    assert_eq!(bath.rate(0.0), 0.3);
    assert!(BathSpectrum::new(-1.0, 1.0, 1.0).is_err());
    let frozen = BathSpectrum::flat(f64::INFINITY, 1.0).unwrap();
    assert_eq!(frozen.rate(-3.0), 0.0);
}

#[test]
fn couplings_per_edge() {
    for (d, per_edge) in [(2, 2), (3, 2), (4, 4), (5, 4)] {
        let ci = CodeInstance::new(d, 2).unwrap();
        let cs = interaction_operators(&ci);
        assert_eq!(cs.len(), per_edge * ci.edges(), "d={d}");
        for c in cs.iter().take(per_edge) {
            let s = c.operator::<f64>(d, ci.edges()).unwrap();
            assert!(s.sub(&s.adjoint()).unwrap().max_coef() < 1e-14);
        }
    }
}

#[test]
fn unital_and_hermiticity_preserving() {
    for d in [2, 3] {
        let ci = CodeInstance::new(d, 2).unwrap();
        let gen = DaviesGenerator::new(&ci, BathSpectrum::flat(0.9, 1.0).unwrap(), JumpSource::EnergyGroups).unwrap();
        let id = PauliSum::identity(d, ci.edges());
        assert!(gen.generator(&id).unwrap().max_coef() < 1e-12, "d={d}");
        let x = ci.word::<f64>(ci.x_c()).unwrap();
        let lhs = gen.heisenberg(&x.adjoint()).unwrap();
        let rhs = gen.heisenberg(&x).unwrap().adjoint();
        assert!(lhs.sub(&rhs).unwrap().max_coef() < 1e-12, "d={d}");
        for j in &gen.jumps {
            assert!(j.rate >= 0.0);
        }
    }
}

#[test]
fn components_are_eigenoperators() {
    for d in [2, 3, 4, 5] {
        let ci = CodeInstance::new(d, 2).unwrap();
        let h = ci.hamiltonian::<f64>().unwrap();
        for c in interaction_operators(&ci).iter().filter(|c| c.edge == 3) {
            let comps = analytic_components::<f64>(&ci, c).unwrap();
            let mut total = PauliSum::zero(d, ci.edges());
            for (w, s) in &comps {
                let lhs = h.commutator(s).unwrap();
                let rhs = s.scale(Complex::new(-w, 0.0));
                assert!(lhs.sub(&rhs).unwrap().max_coef() < 1e-10, "d={d} ω={w}");
                total = total.add(s).unwrap();
            }
            let s = c.operator::<f64>(d, ci.edges()).unwrap();
            assert!(total.sub(&s).unwrap().max_coef() < 1e-12);
        }
    }
}

#[test]
fn catalog_matches_energy_grouping() {
    for d in [2, 3] {
        let ci = CodeInstance::new(d, 2).unwrap();
        for c in interaction_operators(&ci).iter().filter(|c| c.edge < 2) {
            let a = analytic_components::<f64>(&ci, c).unwrap();
            let b = catalog_components::<f64>(&ci, c).unwrap();
            assert_eq!(a.len(), b.len());
            for ((wa, sa), (wb, sb)) in a.iter().zip(&b) {
                assert!((wa - wb).abs() < 1e-12);
                assert!(sa.sub(sb).unwrap().max_coef() < 1e-12, "d={d} ω={wa}");
            }
        }
    }
}

#[test]
fn blind_fourier_matches_analytic_qubits() {
    let ci = CodeInstance::new(2, 2).unwrap();
    let spec = ci.exact_spectrum_blocks().unwrap();
    for c in interaction_operators(&ci) {
        let s = c.operator::<f64>(2, ci.edges()).unwrap().to_csr().unwrap();
        let blind = fourier_components(&s, &spec, BOHR_TOL).unwrap();
        let analytic = analytic_components::<f64>(&ci, &c).unwrap();
        let freqs: Vec<f64> = blind.iter().map(|b| b.0).collect();
        assert_eq!(freqs.len(), 3);
        for ((wb, sb), (wa, sa)) in blind.iter().zip(&analytic) {
            assert!((wb - wa).abs() < 1e-9);
            assert!(sb.max_abs_diff(&sa.to_csr().unwrap()) < 1e-10);
        }
    }
}

#[test]
fn blind_fourier_qutrit_bohr_set() {
    let ci = CodeInstance::new(3, 2).unwrap();
    let spec = ci.exact_spectrum_blocks().unwrap();
    let n = ci.edges();
    let c = interaction_operators(&ci)
        .into_iter()
        .find(|c| c.edge == 5 && c.sector == Sector::Z)
        .unwrap();
    let s = c.operator::<f64>(3, n).unwrap().to_csr().unwrap();
    let blind = fourier_components(&s, &spec, BOHR_TOL).unwrap();
    let freqs: Vec<f64> = blind.iter().map(|b| b.0).collect();
    let expect = [-3.0, -1.5, 0.0, 1.5, 3.0];
    assert_eq!(freqs.len(), expect.len());
    for (f, e) in freqs.iter().zip(expect) {
        assert!((f - e).abs() < 1e-9);
    }
    for ((_, sb), (_, sa)) in blind.iter().zip(analytic_components::<f64>(&ci, &c).unwrap()) {
        assert!(sb.max_abs_diff(&sa.to_csr().unwrap()) < 1e-10);
    }
    assert!(fourier_components(&s, &spec, 1e-18).is_err());
}

#[test]
fn commuting_operator_has_single_component() {
    let ci = CodeInstance::new(2, 2).unwrap();
    let spec = ci.exact_spectrum_blocks().unwrap();
    let a = ci.word::<f64>(ci.vertex_operator(0).unwrap()).unwrap().to_csr().unwrap();
    let comps = fourier_components(&a, &spec, BOHR_TOL).unwrap();
    assert_eq!(comps.len(), 1);
    assert!(comps[0].0.abs() < 1e-9);
    assert!(comps[0].1.max_abs_diff(&a) < 1e-12);
}

/// Direct qubit transcription with jump operators written out from the
/// stabilizers next to each edge.
fn qubit_literal(ci: &CodeInstance, bath: &BathSpectrum<f64>, x: &PauliSum) -> PauliSum {
    let n = ci.edges();
    let id = PauliSum::identity(2, n);
    let lat = ci.lattice();
    let h = |v: f64| Complex::new(v, 0.0);
    let mut out = PauliSum::zero(2, n);
    for j in 0..n {
        for sector in [Sector::Z, Sector::X] {
            let (s1, s2, sigma) = match sector {
                Sector::Z => {
                    let (t, hd) = lat.endpoints(j);
                    (
                        ci.word::<f64>(ci.vertex_operator(t).unwrap()).unwrap(),
                        ci.word::<f64>(ci.vertex_operator(hd).unwrap()).unwrap(),
                        ci.word::<f64>(&qtoric::PauliWord::z(2, j, 1)).unwrap(),
                    )
                }
                Sector::X => {
                    let (p, m) = lat.faces(j);
                    (
                        ci.word::<f64>(ci.plaquette_operator(p).unwrap()).unwrap(),
                        ci.word::<f64>(ci.plaquette_operator(m).unwrap()).unwrap(),
                        ci.word::<f64>(&qtoric::PauliWord::x(2, j, 1)).unwrap(),
                    )
                }
            };
            let p_plus = id.sub(&s1).unwrap().mul(&id.sub(&s2).unwrap()).unwrap().scale(h(0.25));
            let p_minus = id.add(&s1).unwrap().mul(&id.add(&s2).unwrap()).unwrap().scale(h(0.25));
            let p_zero = id.sub(&s1.mul(&s2).unwrap()).unwrap().scale(h(0.5));
            let a = sigma.mul(&p_plus).unwrap();
            let ad = a.adjoint();
            let a0 = sigma.mul(&p_zero).unwrap();
            assert!(ad.sub(&sigma.mul(&p_minus).unwrap()).unwrap().max_coef() < 1e-12);
            let r = bath.rate(4.0);
            let kms = (-4.0 * bath.beta).exp();
            let down = ad
                .mul(&a)
                .unwrap()
                .anticommutator(x)
                .unwrap()
                .scale(h(-1.0))
                .add(&ad.mul(x).unwrap().mul(&a).unwrap().scale(h(2.0)))
                .unwrap();
            let up = a
                .mul(&ad)
                .unwrap()
                .anticommutator(x)
                .unwrap()
                .scale(h(-1.0))
                .add(&a.mul(x).unwrap().mul(&ad).unwrap().scale(h(2.0)))
                .unwrap();
            let dephase = a0.commutator(&a0.commutator(x).unwrap()).unwrap();
            out = out
                .add(&down.add(&up.scale(h(kms))).unwrap().scale(h(0.5 * r)))
                .unwrap()
                .sub(&dephase.scale(h(0.5 * bath.rate(0.0))))
                .unwrap();
        }
    }
    out
}

#[test]
fn qubit_generator_matches_literal_form() {
    let ci = CodeInstance::new(2, 2).unwrap();
    let bath = BathSpectrum::new(0.6, 0.4, 1.3).unwrap();
    let gen = DaviesGenerator::new(&ci, bath, JumpSource::Catalog).unwrap();
    let mut probes = vec![ci.word::<f64>(ci.x_c()).unwrap()];
    probes.push(ci.word::<f64>(&qtoric::PauliWord::from_parts(2, 0, [(0, 1), (5, 1)], [(2, 1), (5, 1)])).unwrap());
    probes.push(ci.hamiltonian::<f64>().unwrap());
    for x in probes {
        let lhs = gen.heisenberg(&x).unwrap();
        let rhs = qubit_literal(&ci, &bath, &x);
        assert!(lhs.sub(&rhs).unwrap().to_csr().unwrap().max_abs() < 1e-10);
    }
}

#[test]
fn gibbs_state_basics() {
    for d in [2, 3] {
        let ci = CodeInstance::new(d, 2).unwrap();
        let rho = gibbs_state::<f64>(&ci, 1.1).unwrap();
        assert!((rho.trace() - one()).norm() < 1e-14);
        let x = ci.word::<f64>(ci.x_c()).unwrap();
        assert!(rho.mul(&x).unwrap().trace().norm() < 1e-12);
        let cold = gibbs_state::<f64>(&ci, 50.0).unwrap();
        let p = ci.ground_projector::<f64>().unwrap();
        assert!((cold.mul(&p).unwrap().trace() - one()).norm() < 1e-12);
    }
    let ci = CodeInstance::new(2, 2).unwrap();
    assert!(gibbs_state::<f64>(&ci, -0.1).is_err());
}

#[test]
fn gibbs_state_is_stationary_for_qubits() {
    let ci = CodeInstance::new(2, 2).unwrap();
    let gen = DaviesGenerator::new(&ci, BathSpectrum::flat(1.0, 1.0).unwrap(), JumpSource::EnergyGroups).unwrap();
    let rho = gibbs_state::<f64>(&ci, 1.0).unwrap();
    assert!(stationarity_residual(&gen, &rho).unwrap() <= 1e-10);
    let hot = DaviesGenerator::new(&ci, BathSpectrum::flat(0.0, 1.0).unwrap(), JumpSource::EnergyGroups).unwrap();
    let mixed = PauliSum::identity(2, ci.edges()).scale(Complex::new(1.0 / 256.0, 0.0));
    assert!(stationarity_residual(&hot, &mixed).unwrap() <= 1e-14);
}

#[test]
fn qubit_stationary_state_is_unique() {
    let ci = CodeInstance::new(2, 2).unwrap();
    let gen = DaviesGenerator::new(&ci, BathSpectrum::flat(1.0, 1.0).unwrap(), JumpSource::EnergyGroups).unwrap();
    let report = dual_kernel_dimension(&gen, &ci, 1e-9).unwrap();
    assert_eq!(report.cosets, 1024);
    assert_eq!(report.dimension, 1);
    let q = CodeInstance::new(3, 2).unwrap();
    let g3 = DaviesGenerator::new(&q, BathSpectrum::flat(1.0, 1.0).unwrap(), JumpSource::EnergyGroups).unwrap();
    assert!(dual_kernel_dimension(&g3, &q, 1e-9).is_err());
}

#[test]
fn loop_derivative_on_qutrit_ground_state() {
    let ci = CodeInstance::new(3, 2).unwrap();
    let beta = 0.7;
    let bath = BathSpectrum::new(beta, 0.5, 1.0).unwrap();
    let sparse = SparseDavies::from_fourier(&ci, &bath, BOHR_TOL).unwrap();
    let gs: Vec<C64> = ci.logical_eigenstate::<f64>().unwrap();
    let x = ci.word::<f64>(ci.x_c()).unwrap();
    let apply = |v: &[C64]| x.apply(v).unwrap();
    let want = -1.5 * (-3.0 * beta).exp() * ci.loop_x().len() as f64;
    let got = sparse.heisenberg_expectation(apply, &gs, None);
    assert!((got - Complex::new(want, 0.0)).norm() < 1e-10, "{got} vs {want}");
    let x_part = sparse.heisenberg_expectation(apply, &gs, Some(Sector::X));
    assert!(x_part.norm() < 1e-12);
}

#[test]
fn charge_conjugation_is_conserved_for_qutrits() {
    let ci = CodeInstance::new(3, 2).unwrap();
    let bath = BathSpectrum::flat(0.7, 1.0).unwrap();
    let gen = DaviesGenerator::new(&ci, bath, JumpSource::EnergyGroups).unwrap();
    let sparse = gen.to_sparse().unwrap();
    let n = ci.edges();
    let dim = 3usize.pow(n as u32);
    let psi: Vec<C64> = (0..dim)
        .map(|i| Complex::new(((i * 7919) % 101) as f64 - 50.0, ((i * 104729) % 89) as f64 - 44.0))
        .collect();
    let image = sparse.heisenberg_apply(|v| charge_conjugation(3, n, v), &psi, None);
    let scale: f64 = psi.iter().map(|a| a.norm()).fold(0.0, f64::max);
    assert!(image.iter().all(|a| a.norm() < 1e-10 * scale));

    assert_eq!(hermitian_coupling_commutant(2).unwrap(), 1);
    for d in 3..=6 {
        assert_eq!(hermitian_coupling_commutant(d).unwrap(), 2, "d={d}");
        assert_eq!(power_coupling_commutant(d).unwrap(), 1, "d={d}");
    }
}
