//! Qudit toric codes on a torus coupled to a thermal bath.
//!
//! The crate is layered bottom-up: [`gpauli`] (Z_d Pauli algebra),
//! [`lattice`] (oriented torus), [`code`] (stabilizers and spectrum),
//! [`processes`] (anyon bookkeeping and jump catalogs), [`davies`]
//! (thermal generators) and [`engines`] (decay of the logical loop).
//!
//! Numerical routines are generic over [`Real`]; the aliases below pin the
//! common double-precision instantiations.

pub mod code;
pub mod davies;
pub mod engines;
pub mod error;
pub mod gpauli;
pub mod lattice;
pub mod linalg;
pub mod pauli_sum;
pub mod processes;
pub mod scalar;

pub use code::{ChargeConfig, CodeInstance};
pub use error::{Error, Result};
pub use gpauli::{commutation_phase, word_mul, DenseCap, PauliWord};

pub use lattice::{EdgePath, OrientedLattice, Placement, Sector};
pub use scalar::{root_of_unity, Amp, Real};

pub type DenseOperator = gpauli::DenseOperator<f64>;
pub type PauliSum = pauli_sum::PauliSum<f64>;
pub type BathSpectrum = davies::BathSpectrum<f64>;
pub type DaviesGenerator = davies::DaviesGenerator<f64>;
pub use engines::{DecayCurve, ReducedGenerator};
