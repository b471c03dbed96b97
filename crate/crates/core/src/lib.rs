//! Exact steady states of the generalized driven-dissipative Kerr resonator.
//!
//! The model is a single bosonic mode with Hamiltonian
//!
//! ```text
//! H = K/2 a†a†aa - Δ a†a + (Λ1 a† + Λ2/2 a†a† + Λ3 a†a†a + h.c.)
//! ```
//!
//! and one- and two-photon loss at rates κ1, κ2. The coherent quantum absorber
//! construction turns the mixed steady state into a pure "dark" state of a
//! collective mode, whose Segal-Bargmann wavefunction is known in closed form.
//!
//! Modules, bottom-up:
//! * [`hyperfun`]: complex Pochhammer symbols and generalized hypergeometric series.
//! * [`model`]: parameter validation, derived constants, phase classification.
//! * [`cqa`]: dark states, Fock amplitudes, density matrices, moments.
//! * [`phase_space`]: Wigner and Husimi functions on grids.
//! * [`oracle`]: brute-force truncated-Fock Lindbladian used for cross-checks.
//! * [`analysis`]: scans and reports built on the above.
//! * [`cli`]: the `kerrcqa` batch front end.
//!
//! The special functions and the parameter layer are generic over the real
//! scalar ([`Real`], implemented for `f32` and `f64`); everything that solves
//! linear systems runs in `f64`. The aliases below name the `f64` instances.

pub mod analysis;
pub mod cli;
pub mod cqa;
pub mod density;
pub mod error;
pub mod fock;
pub mod hyperfun;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod phase_space;

pub use error::{KerrError, Result};

/// Real scalar usable by the generic layers.
pub trait Real:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + std::fmt::Debug
    + std::fmt::Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Convert an `f64` literal into this scalar.
    fn lit(x: f64) -> Self {
        <Self as num_traits::FromPrimitive>::from_f64(x).expect("finite literal")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex double used throughout the numerical layers.
pub type C64 = num_complex::Complex64;

/// Physical constants in double precision.
pub type PhysicalParams = model::Params<f64>;
/// Derived complex constants in double precision.
pub type DerivedParams = model::Derived<f64>;
/// Single-precision parameter set (useful for quick sweeps).
pub type PhysicalParamsF32 = model::Params<f32>;
/// Single-precision derived constants.
pub type DerivedParamsF32 = model::Derived<f32>;

pub use cqa::{AmplitudeCache, DarkState, StateForm};
pub use density::TruncatedDensityMatrix;
pub use model::{PhaseClass, PhaseKind};
pub use oracle::{ClassicalFixedPoints, SpectrumReport};
pub use phase_space::PhaseGrid;
