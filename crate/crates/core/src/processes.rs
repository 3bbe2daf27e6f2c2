//! Anyon bookkeeping: charge updates, process classes, jump catalogs, braiding.
//!
//! A power-`m` error `σ_j^m` (σ = Z in the z-sector, X in the x-sector)
//! shifts the charge of every stabilizer it fails to commute with. The two
//! stabilizers next to edge `j` are ordered as `(first, second)` where the
//! first loses `m` and the second gains `m`; labels such as `ω²—ω` list the
//! charges in that order.

use num_complex::Complex;
use serde::Serialize;

use crate::code::{sector_energy, ChargeConfig, CodeInstance};
use crate::error::{invalid, Error, Result};
use crate::gpauli::{commutation_phase, PauliWord};
use crate::lattice::{OrientedLattice, Sector};
use crate::pauli_sum::PauliSum;
use crate::scalar::{root_of_unity, Real};

/// Row of the qutrit projector table a label belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum BohrGroup {
    Plus,
    Zero,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ProcessClass {
    /// `(first, second)` charge exponents.
    pub label: (u32, u32),
    pub bohr_group: BohrGroup,
}

const QUTRIT_TABLE: [((u32, u32), BohrGroup, &str); 9] = [
    ((0, 0), BohrGroup::Plus, "P_{++}"),
    ((1, 0), BohrGroup::Plus, "P_{+(1)}"),
    ((0, 1), BohrGroup::Plus, "P_{+(2)}"),
    ((2, 0), BohrGroup::Zero, "P_{0(1)}"),
    ((0, 2), BohrGroup::Zero, "P_{0(2)}"),
    ((1, 1), BohrGroup::Zero, "P_{0(3)}"),
    ((2, 1), BohrGroup::Minus, "P_{-(1)}"),
    ((1, 2), BohrGroup::Minus, "P_{-(2)}"),
    ((2, 2), BohrGroup::Minus, "P_{--}"),
];

fn charge_name(a: u32) -> &'static str {
    match a {
        0 => "1",
        1 => "ω",
        _ => "ω²",
    }
}

impl ProcessClass {
    /// The nine qutrit classes in table order.
    pub fn qutrit_classes() -> Vec<ProcessClass> {
        QUTRIT_TABLE
            .iter()
            .map(|&(label, bohr_group, _)| ProcessClass { label, bohr_group })
            .collect()
    }

    pub fn from_label(label: (u32, u32)) -> Result<ProcessClass> {
        QUTRIT_TABLE
            .iter()
            .find(|row| row.0 == label)
            .map(|&(label, bohr_group, _)| ProcessClass { label, bohr_group })
            .ok_or_else(|| invalid(format!("no qutrit class for charges {label:?}")))
    }

    pub fn name(&self) -> String {
        format!("{}—{}", charge_name(self.label.0), charge_name(self.label.1))
    }

    pub fn projector_name(&self) -> &'static str {
        QUTRIT_TABLE
            .iter()
            .find(|row| row.0 == self.label)
            .map(|row| row.2)
            .unwrap_or("?")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum JumpKind {
    Create,
    Annihilate,
    Split,
    Fuse,
    Move,
}

/// One catalog entry `Σ_terms σ_j^{power} P_label`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JumpOperator {
    pub edge: usize,
    pub sector: Sector,
    pub kind: JumpKind,
    /// `(power, label)` pairs; each term is `σ^power` applied after the label projector.
    pub terms: Vec<(u32, (u32, u32))>,
    /// Energy handed to the bath; the operator lowers the system energy by this amount.
    pub bohr: f64,
}

type CatalogRow = (JumpKind, f64, &'static [(u32, (u32, u32))]);

const QUTRIT_CATALOG: [CatalogRow; 5] = [
    (JumpKind::Create, -3.0, &[(1, (0, 0)), (2, (0, 0))]),
    (JumpKind::Annihilate, 3.0, &[(2, (2, 1)), (1, (1, 2))]),
    (
        JumpKind::Split,
        -1.5,
        &[(2, (1, 0)), (1, (0, 1)), (1, (2, 0)), (2, (0, 2))],
    ),
    (
        JumpKind::Fuse,
        1.5,
        &[(2, (1, 1)), (1, (1, 1)), (1, (2, 2)), (2, (2, 2))],
    ),
    (
        JumpKind::Move,
        0.0,
        &[
            (1, (1, 0)),
            (2, (0, 1)),
            (1, (0, 2)),
            (2, (2, 0)),
            (1, (2, 1)),
            (2, (1, 2)),
        ],
    ),
];

const QUBIT_CATALOG: [CatalogRow; 3] = [
    (JumpKind::Annihilate, 4.0, &[(1, (1, 1))]),
    (JumpKind::Create, -4.0, &[(1, (0, 0))]),
    (JumpKind::Move, 0.0, &[(1, (1, 0)), (1, (0, 1))]),
];

/// `(first, second)` stabilizers adjacent to an edge.
pub fn adjacent(lat: &OrientedLattice, edge: usize, sector: Sector) -> (usize, usize) {
    match sector {
        Sector::Z => lat.endpoints(edge),
        Sector::X => {
            let (plus, minus) = lat.faces(edge);
            (minus, plus)
        }
    }
}

/// `σ_j^m` for the sector.
pub fn error_word(d: u32, edge: usize, power: i64, sector: Sector) -> PauliWord {
    match sector {
        Sector::Z => PauliWord::z(d, edge, power),
        Sector::X => PauliWord::x(d, edge, power),
    }
}

fn check_edge(ci: &CodeInstance, edge: usize) -> Result<()> {
    if edge >= ci.edges() {
        return Err(invalid(format!("edge {edge} out of range")));
    }
    Ok(())
}

/// Applies `σ_j^m` to a charge configuration.
///
/// Returns the new configuration and the exponent `φ` with
/// `σ X_c σ^{-1} = ω^φ X_c`.
pub fn apply_error(
    ci: &CodeInstance,
    c: &ChargeConfig,
    edge: usize,
    power: i64,
    sector: Sector,
) -> Result<(ChargeConfig, u32)> {
    let d = ci.d();
    check_edge(ci, edge)?;
    if power.rem_euclid(d as i64) == 0 {
        return Err(invalid("error power must be nonzero mod d"));
    }
    if !c.is_neutral(d) {
        return Err(invalid("charge configuration is not neutral"));
    }
    let e = error_word(d, edge, power, sector);
    let mut out = c.clone();
    for (q, s) in out.charges_mut(sector).iter_mut().zip(ci.stabilizers(sector)) {
        *q = (*q + commutation_phase(s, &e)?) % d;
    }
    let loop_phase = commutation_phase(&e, ci.x_c())?;
    Ok((out, loop_phase))
}

pub fn process_energy<T: Real>(
    ci: &CodeInstance,
    c: &ChargeConfig,
    edge: usize,
    power: i64,
    sector: Sector,
) -> Result<T> {
    let (after, _) = apply_error(ci, c, edge, power, sector)?;
    let d = ci.d();
    let before = sector_energy::<T>(d, c.charges(sector));
    Ok(sector_energy::<T>(d, after.charges(sector)) - before)
}

/// Charges on the two stabilizers adjacent to the edge.
pub fn local_label(ci: &CodeInstance, c: &ChargeConfig, edge: usize, sector: Sector) -> (u32, u32) {
    let (s1, s2) = adjacent(ci.lattice(), edge, sector);
    let q = c.charges(sector);
    (q[s1], q[s2])
}

pub fn classify(ci: &CodeInstance, c: &ChargeConfig, edge: usize, sector: Sector) -> Result<ProcessClass> {
    if ci.d() != 3 {
        return Err(Error::Unsupported(format!(
            "the projector table is qutrit-only (d={}); classify by energy instead",
            ci.d()
        )));
    }
    check_edge(ci, edge)?;
    ProcessClass::from_label(local_label(ci, c, edge, sector))
}

/// Spectral projector onto the joint eigenspace `(first, second) = label` next to `edge`.
pub fn projector<T: Real>(ci: &CodeInstance, label: (u32, u32), edge: usize, sector: Sector) -> Result<PauliSum<T>> {
    check_edge(ci, edge)?;
    let (s1, s2) = adjacent(ci.lattice(), edge, sector);
    let st = ci.stabilizers(sector);
    ci.eigen_projector::<T>(&st[s1], label.0)?
        .mul(&ci.eigen_projector::<T>(&st[s2], label.1)?)
}

pub fn projector_matrix<T: Real>(
    class: &ProcessClass,
    edge: usize,
    ci: &CodeInstance,
    sector: Sector,
) -> Result<PauliSum<T>> {
    if ci.d() != 3 {
        return Err(Error::Unsupported("the projector table is qutrit-only".into()));
    }
    projector(ci, class.label, edge, sector)
}

/// The table's closed-form product of `(1 - ω^α A)` factors for a qutrit class.
pub fn printed_projector<T: Real>(
    class: &ProcessClass,
    edge: usize,
    ci: &CodeInstance,
    sector: Sector,
) -> Result<PauliSum<T>> {
    if ci.d() != 3 {
        return Err(Error::Unsupported("the projector table is qutrit-only".into()));
    }
    check_edge(ci, edge)?;
    let n = ci.edges();
    let (s1, s2) = adjacent(ci.lattice(), edge, sector);
    let st = ci.stabilizers(sector);
    let a = PauliSum::<T>::from_word(&st[s1], n)?;
    let b = PauliSum::<T>::from_word(&st[s2], n)?;
    let one = PauliSum::<T>::identity(3, n);
    let w = |alpha: i64| root_of_unity::<T>(3, alpha);
    let f1 = |x: &PauliSum<T>, alpha: i64| one.sub(&x.scale(w(alpha))).expect("shape");
    let ab = a.mul(&b)?;
    let f2 = |alpha: i64| one.sub(&ab.scale(w(alpha))).expect("shape");
    let delta = f1(&b, 0).sub(&f1(&a, 0))?;
    let delta_dag = delta.adjoint();
    let prod = |parts: Vec<PauliSum<T>>| -> Result<PauliSum<T>> {
        let mut acc = one.clone();
        for p in parts {
            acc = acc.mul(&p)?;
        }
        Ok(acc)
    };
    let scale = |p: PauliSum<T>, s: f64| p.scale(Complex::new(T::lit(s), T::zero()));
    let out = match class.label {
        (0, 0) => scale(prod(vec![f1(&a, 1), f1(&a, -1), f1(&b, 1), f1(&b, -1)])?, 4.0),
        (1, 0) => scale(
            prod(vec![f2(0), f2(1), delta.clone(), delta_dag.clone(), f1(&a, -1), f1(&a, -1).adjoint()])?,
            8.0,
        ),
        (0, 1) => scale(
            prod(vec![f2(0), f2(1), delta.clone(), delta_dag.clone(), f1(&a, -1), f1(&b, -1).adjoint()])?,
            8.0,
        ),
        (2, 0) => scale(
            prod(vec![f2(0), f2(-1), delta.clone(), delta_dag.clone(), f1(&b, 1), f1(&b, 1).adjoint()])?,
            8.0,
        ),
        (0, 2) => scale(
            prod(vec![f2(0), f2(-1), delta.clone(), delta_dag.clone(), f1(&a, 1), f1(&a, 1).adjoint()])?,
            8.0,
        ),
        (1, 1) => scale(
            prod(vec![f2(0), f2(-1), f1(&a, 1), f1(&a, 1).adjoint(), f1(&b, 1), f1(&b, 1).adjoint()])?,
            8.0,
        ),
        (2, 1) => scale(
            prod(vec![f2(1), f2(-1), delta.clone(), delta_dag.clone(), f1(&b, 1), f1(&b, 1).adjoint()])?,
            8.0,
        ),
        (1, 2) => scale(
            prod(vec![f2(1), f2(-1), delta.clone(), delta_dag.clone(), f1(&a, 1), f1(&a, 1).adjoint()])?,
            8.0,
        ),
        (2, 2) => scale(
            prod(vec![f2(0), f2(1), f1(&a, -1), f1(&a, -1).adjoint(), f1(&b, -1), f1(&b, -1).adjoint()])?,
            8.0,
        ),
        other => return Err(invalid(format!("no qutrit class for charges {other:?}"))),
    };
    Ok(out.pruned(T::lit(1e-12)))
}

/// Comparison of a closed-form table entry with the spectral projector.
#[derive(Clone, Debug, Serialize)]
pub struct PrintedComparison {
    pub class: String,
    /// Best `λ` in `printed ≈ λ · spectral`.
    pub scalar: f64,
    /// `max |printed - λ spectral|` over matrix entries.
    pub residual: f64,
    /// Class whose spectral projector the printed entry is a nonzero multiple of, if any.
    pub proportional_to: Option<String>,
}

pub fn compare_printed(ci: &CodeInstance, class: &ProcessClass, edge: usize, sector: Sector) -> Result<PrintedComparison> {
    let printed = printed_projector::<f64>(class, edge, ci, sector)?;
    let spectral = projector_matrix::<f64>(class, edge, ci, sector)?;
    let norm = spectral.hs_inner(&spectral)?;
    let lambda = spectral.hs_inner(&printed)? / norm;
    let residual = printed.sub(&spectral.scale(lambda))?.max_abs_entry()?;
    let mut proportional_to = None;
    for other in ProcessClass::qutrit_classes() {
        let p = projector_matrix::<f64>(&other, edge, ci, sector)?;
        let mu = p.hs_inner(&printed)? / p.hs_inner(&p)?;
        if mu.norm() > 1e-9 && printed.sub(&p.scale(mu))?.max_abs_entry()? < 1e-9 {
            proportional_to = Some(other.name());
        }
    }
    Ok(PrintedComparison {
        class: class.name(),
        scalar: lambda.re,
        residual,
        proportional_to,
    })
}

impl JumpOperator {
    /// `Σ σ^m P_label` as an operator.
    pub fn operator<T: Real>(&self, ci: &CodeInstance) -> Result<PauliSum<T>> {
        let n = ci.edges();
        let mut acc = PauliSum::zero(ci.d(), n);
        for &(power, label) in &self.terms {
            let sigma = PauliSum::from_word(&error_word(ci.d(), self.edge, power as i64, self.sector), n)?;
            acc = acc.add(&sigma.mul(&projector::<T>(ci, label, self.edge, self.sector)?)?)?;
        }
        Ok(acc)
    }
}

/// Closed-form jump operators on one edge (qubits and qutrits).
pub fn jump_catalog(ci: &CodeInstance, edge: usize, sector: Sector) -> Result<Vec<JumpOperator>> {
    check_edge(ci, edge)?;
    let rows: &[CatalogRow] = match ci.d() {
        2 => &QUBIT_CATALOG,
        3 => &QUTRIT_CATALOG,
        d => {
            return Err(Error::Unsupported(format!(
                "closed-form catalog exists for d=2,3 only (d={d}); derive jumps by energy grouping"
            )))
        }
    };
    Ok(rows
        .iter()
        .map(|&(kind, bohr, terms)| JumpOperator {
            edge,
            sector,
            kind,
            terms: terms.to_vec(),
            bohr,
        })
        .collect())
}

/// `(power, label)` pairs grouped by the energy change `ΔE` they cause, any `d`.
///
/// Groups are returned with ascending `ΔE`; each `ΔE` is computed from the
/// local charge energies of the two adjacent stabilizers.
pub fn energy_groups(d: u32, power: u32) -> Vec<(f64, Vec<(u32, u32)>)> {
    let e = |a: u32| -(std::f64::consts::TAU * a as f64 / d as f64).cos();
    let mut out: Vec<(f64, Vec<(u32, u32)>)> = Vec::new();
    for a in 0..d {
        for b in 0..d {
            let a2 = (a + d - power % d) % d;
            let b2 = (b + power) % d;
            let de = e(a2) + e(b2) - e(a) - e(b);
            match out.iter_mut().find(|g| (g.0 - de).abs() < 1e-9) {
                Some(g) => g.1.push((a, b)),
                None => out.push((de, vec![(a, b)])),
            }
        }
    }
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Orientation {
    Clockwise,
    CounterClockwise,
}

/// Phase exponent picked up when an anyon of type `moving` encircles one of type `around`.
///
/// The enclosed anyon is the one left by a unit-power error on the edge the
/// loop crosses with positive orientation; the counter-clockwise loop is the
/// stabilizer word itself and the clockwise loop its inverse.
pub fn braiding_phase(moving: Sector, around: Sector, orientation: Orientation, d: u32) -> Result<u32> {
    if moving == around {
        return Err(invalid("same-sector loops braid trivially"));
    }
    let lat = OrientedLattice::build_torus(3)?;
    let centre = lat.site(1, 1);
    let (loop_word, edge) = match moving {
        Sector::X => (lat.star_word(d, centre)?, lat.star(centre)?[0].0),
        Sector::Z => (lat.boundary_word(d, centre)?, lat.boundary(centre)?[0].0),
    };
    let loop_word = match orientation {
        Orientation::CounterClockwise => loop_word,
        Orientation::Clockwise => loop_word.adjoint(),
    };
    let string = error_word(d, edge, 1, around);
    commutation_phase(&loop_word, &string)
}
