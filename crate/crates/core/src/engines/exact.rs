//! Lindblad propagation of the loop operator on small qubit codes.
//!
//! The qubit generator preserves every coset of the stabilizer group, so
//! `X_c(t)` stays in the span of `X_c · G` and the initial state's Pauli
//! expansion splits over a handful of cosets. Both pictures are propagated
//! on those spans with a dense matrix exponential.

use std::collections::BTreeSet;

use nalgebra::DVector;
use num_complex::Complex;

use crate::code::CodeInstance;
use crate::davies::{coset, stabilizer_group, BathSpectrum, DaviesGenerator, JumpSource, Picture};
use crate::error::{Error, Result};
use crate::linalg::{expm, C64};
use crate::pauli_sum::{key_word, word_key, Key, PauliSum};

/// Outcome of an exact run with its internal consistency checks.
#[derive(Clone, Debug)]
pub struct ExactRun {
    pub values: Vec<C64>,
    /// Largest entry of `δ` restricted to the `X_c · G` span in the Heisenberg picture.
    pub delta_defect: f64,
    /// Largest gap between the Heisenberg curve and the Schrödinger curve.
    pub picture_defect: f64,
    /// Largest gap between Schrödinger curves with and without `δ`.
    pub transformed_defect: f64,
}

fn require_qubits(ci: &CodeInstance) -> Result<()> {
    if ci.d() != 2 {
        return Err(Error::Unsupported(format!(
            "the exact engine needs invariant stabilizer cosets, which only qubits have (d={}); use the reduced or Monte Carlo engine",
            ci.d()
        )));
    }
    let space = 4u128.saturating_pow(ci.edges() as u32);
    if space > 1 << 20 {
        return Err(Error::SizeCap {
            what: "operator space".into(),
            needed: space,
            cap: 1 << 20,
            hint: "use the reduced or Monte Carlo engine".into(),
        });
    }
    Ok(())
}

fn propagate(m: &nalgebra::DMatrix<C64>, v0: &DVector<C64>, t: f64) -> DVector<C64> {
    expm(&(m * C64::new(t, 0.0))) * v0
}

/// `⟨X_c(t)⟩` from the prepared `X_c` eigenstate.
pub fn exact_run(ci: &CodeInstance, bath: &BathSpectrum<f64>, times: &[f64]) -> Result<ExactRun> {
    require_qubits(ci)?;
    let n = ci.edges();
    let gen = DaviesGenerator::new(ci, *bath, JumpSource::EnergyGroups)?;
    let group = stabilizer_group(ci)?;
    let gs = ci.logical_eigenstate::<f64>()?;
    let xc = ci.word::<f64>(ci.x_c())?;

    // Heisenberg picture on X_c·G.
    let xkey = word_key(ci.x_c(), n);
    let xphase = xc.coef(&xkey);
    let basis = coset(&group, &xkey, 2);
    let with_h = gen.restricted_matrix(&basis, Picture::Heisenberg, true)?;
    let without = gen.restricted_matrix(&basis, Picture::Heisenberg, false)?;
    let delta_defect = (&with_h - &without).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let expect: Vec<C64> = basis
        .iter()
        .map(|k| PauliSum::<f64>::from_word(&key_word(2, k), n)?.expectation(&gs))
        .collect::<Result<_>>()?;
    let mut v0 = DVector::from_element(basis.len(), C64::new(0.0, 0.0));
    v0[basis.iter().position(|k| *k == xkey).expect("X_c in its coset")] = xphase;
    let heis: Vec<C64> = times
        .iter()
        .map(|&t| {
            let v = propagate(&with_h, &v0, t);
            v.iter().zip(&expect).map(|(a, b)| a * b).sum()
        })
        .collect();

    // Schrödinger picture on the cosets spanned by |GS⟩⟨GS|.
    let rho0 = density_expansion(ci, &gs)?;
    let mut reps: BTreeSet<Key> = BTreeSet::new();
    for (k, _) in rho0.terms() {
        reps.insert(coset(&group, k, 2)[0].clone());
    }
    let mut sbasis: Vec<Key> = Vec::new();
    for r in &reps {
        sbasis.extend(coset(&group, r, 2));
    }
    let s_with = gen.restricted_matrix(&sbasis, Picture::Schrodinger, true)?;
    let s_without = gen.restricted_matrix(&sbasis, Picture::Schrodinger, false)?;
    let r0 = DVector::from_iterator(sbasis.len(), sbasis.iter().map(|k| rho0.coef(k)));
    let trace_xc = |r: &DVector<C64>| -> Result<C64> {
        let mut rho = PauliSum::zero(2, n);
        for (k, &c) in sbasis.iter().zip(r.iter()) {
            rho.add_term(k.clone(), c);
        }
        Ok(xc.mul(&rho)?.trace())
    };
    let mut picture_defect: f64 = 0.0;
    let mut transformed_defect: f64 = 0.0;
    for (i, &t) in times.iter().enumerate() {
        let a = trace_xc(&propagate(&s_with, &r0, t))?;
        let b = trace_xc(&propagate(&s_without, &r0, t))?;
        picture_defect = picture_defect.max((a - heis[i]).norm());
        transformed_defect = transformed_defect.max((a - b).norm());
    }
    Ok(ExactRun {
        values: heis,
        delta_defect,
        picture_defect,
        transformed_defect,
    })
}

/// Pauli expansion of `|ψ⟩⟨ψ|`: coefficient of `W` is `⟨ψ|W†|ψ⟩ / D`.
fn density_expansion(ci: &CodeInstance, psi: &[C64]) -> Result<PauliSum<f64>> {
    let n = ci.edges();
    let dim = psi.len() as f64;
    let mut rho = PauliSum::zero(2, n);
    for code in 0..(1usize << (2 * n)) {
        let key: Key = (0..2 * n).map(|i| ((code >> i) & 1) as u8).collect();
        let w = PauliSum::<f64>::from_word(&key_word(2, &key), n)?;
        let c = w.adjoint().expectation(psi)? / dim;
        if c.norm() > 1e-14 {
            rho.add_term(key, c);
        }
    }
    let norm = rho.trace();
    if (norm - Complex::new(1.0, 0.0)).norm() > 1e-10 {
        return Err(Error::Numerical(format!("density expansion has trace {norm}")));
    }
    Ok(rho)
}
