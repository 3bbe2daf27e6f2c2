use num_complex::Complex;
use qtoric::gpauli::{DenseCap, PauliWord};
use qtoric::gpauli::{dense_matrix, word_mul};
use qtoric::pauli_sum::*;
use qtoric::scalar::{root_of_unity, Amp};

fn one() -> Amp<f64> {
    Complex::new(1.0, 0.0)
}

#[test]
fn product_matches_word_algebra() {
    let p = PauliWord::from_parts(3, 1, [(0, 1), (2, 2)], [(0, 2), (1, 1)]);
    let q = PauliWord::from_parts(3, 2, [(0, 2), (1, 1)], [(2, 1)]);
    let sp = PauliSum::<f64>::from_word(&p, 3).unwrap();
    let sq = PauliSum::<f64>::from_word(&q, 3).unwrap();
    let prod = sp.mul(&sq).unwrap();
    let w = word_mul(&p, &q).unwrap();
    let expect = PauliSum::<f64>::from_word(&w, 3).unwrap();
    let diff = prod.sub(&expect).unwrap();
    assert!(diff.max_coef() < 1e-14);
}

#[test]
fn realizations_agree_with_dense_words() {
    let p = PauliWord::from_parts(3, 1, [(0, 1), (1, 2)], [(1, 1)]);
    let s = PauliSum::<f64>::from_word(&p, 2).unwrap();
    let dense = dense_matrix::<f64>(&p, 2, DenseCap::default()).unwrap();
    assert!(s.to_dense(DenseCap::default()).unwrap().max_abs_diff(&dense) < 1e-14);
    let adj = s.adjoint().to_dense(DenseCap::default()).unwrap();
    assert!(adj.max_abs_diff(&dense.adjoint()) < 1e-14);
    let csr = s.to_csr().unwrap();
    assert!((csr.get(0, 0) - dense.matrix[(0, 0)]).norm() < 1e-14);
    let psi: Vec<Amp<f64>> = (0..9).map(|i| Complex::new(i as f64, 1.0)).collect();
    let a = s.apply(&psi).unwrap();
    let b = &dense.matrix * nalgebra::DVector::from_vec(psi.clone());
    for (x, y) in a.iter().zip(b.iter()) {
        assert!((x - y).norm() < 1e-12);
    }
}

#[test]
fn trace_and_max_entry() {
    let mut s = PauliSum::<f64>::identity(2, 2);
    s.add_term(word_key(&PauliWord::z(2, 0, 1), 2), one());
    assert_eq!(s.trace(), Complex::new(4.0, 0.0));
    // 1 + Z_0 has diagonal (2, 2, 0, 0)
    assert!((s.max_abs_entry().unwrap() - 2.0).abs() < 1e-14);
    let hs = s.hs_inner(&s).unwrap();
    assert!((hs.re - 8.0).abs() < 1e-14);
}

#[test]
fn phase_on_words_is_in_coefficient() {
    let w = PauliWord::x(3, 0, 1).with_phase(2);
    let s = PauliSum::<f64>::from_word(&w, 1).unwrap();
    let c = s.coef(&word_key(&w, 1));
    assert!((c - root_of_unity::<f64>(3, 2)).norm() < 1e-15);
    assert!((s.word_coef(&w) - one()).norm() < 1e-15);
}

#[test]
fn shape_mismatch_errors() {
    let a = PauliSum::<f64>::identity(2, 2);
    let b = PauliSum::<f64>::identity(3, 2);
    let c = PauliSum::<f64>::identity(2, 3);
    assert!(a.mul(&b).is_err());
    assert!(a.add(&c).is_err());
}
