use nalgebra::{DMatrix, DVector};

use super::C64;

/// Maximum absolute column sum.
pub fn one_norm(a: &DMatrix<C64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Dense matrix exponential by Taylor expansion with scaling and squaring.
pub fn expm(a: &DMatrix<C64>) -> DMatrix<C64> {
    let n = a.nrows();
    let norm = one_norm(a);
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a * C64::new(0.5f64.powi(s), 0.0);
    let mut result = DMatrix::<C64>::identity(n, n);
    let mut term = DMatrix::<C64>::identity(n, n);
    for k in 1..=30 {
        term = &term * &scaled * C64::new(1.0 / k as f64, 0.0);
        result += &term;
        if one_norm(&term) <= f64::EPSILON * one_norm(&result) {
            break;
        }
    }
    for _ in 0..s {
        result = &result * &result;
    }
    result
}

/// `exp(t A) v` for an operator given only through its action.
///
/// The interval is split so that each substep has `‖tA‖/steps ≤ 1`, and each
/// substep is summed as a Taylor series until the terms stop contributing.
pub fn expm_multiply<F>(apply: F, norm_bound: f64, v: &DVector<C64>, t: f64) -> DVector<C64>
where
    F: Fn(&DVector<C64>) -> DVector<C64>,
{
    let steps = (norm_bound * t.abs()).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let mut out = v.clone();
    for _ in 0..steps {
        let mut term = out.clone();
        let mut acc = out.clone();
        for k in 1..=60 {
            term = apply(&term) * C64::new(h / k as f64, 0.0);
            acc += &term;
            if term.norm() <= 1e-17 * acc.norm().max(1e-300) {
                break;
            }
        }
        out = acc;
    }
    out
}
