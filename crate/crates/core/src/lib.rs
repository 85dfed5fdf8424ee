//! Spectral potentials of weighted shift operators and t-entropy on finite
//! measurable dynamical systems.
//!
//! On a finite atom set with a self-map `α` and base measure `m`, the weighted
//! shift `f ↦ e^φ · (f ∘ α)` acts on `L¹(m)`. This crate computes the logarithm
//! of its spectral radius `λ(φ)`, the t-entropy `τ(μ)` both from its defining
//! inf-sup and as the Legendre conjugate of `λ`, and checks the duality
//! identities, lemmas and the entropy-statistic estimate that connect them.
//!
//! Everything is generic over [`Scalar`]; `f64` aliases are exported at the
//! crate root.

pub mod entstat;
pub mod error;
pub mod fixtures;
pub mod io;
mod linalg;
pub mod lp;
pub mod random;
pub mod scalar;
pub mod solver;
pub mod spectral;
pub mod system;
pub mod tentropy;
pub mod varprin;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use system::{CycleDecomposition, FiniteSystem, Functional, Mode, PartitionOfUnity, Potential};

pub type System = FiniteSystem<f64>;
pub type PotentialF64 = Potential<f64>;
pub type FunctionalF64 = Functional<f64>;
pub type PartitionF64 = PartitionOfUnity<f64>;
pub type L1VectorF64 = spectral::L1Vector<f64>;
pub type SpectralResultF64 = spectral::SpectralResult<f64>;
pub type TauResultF64 = tentropy::TauResult<f64>;

pub type SystemF32 = FiniteSystem<f32>;
pub type PotentialF32 = Potential<f32>;
pub type FunctionalF32 = Functional<f32>;
