//! Entanglement protection of two V-type qutrits in independent Lorentzian
//! reservoirs.
//!
//! The crate evaluates the closed-form single-excitation propagators of `N`
//! degenerate V-type atoms sharing one zero-temperature reservoir, turns them
//! into a three-operator Kraus channel, tracks the negativity of a two-qutrit
//! state under two copies of that channel, and solves for the negative-energy
//! bound state of the atom–reservoir Hamiltonian. A brute-force discretized
//! bath integrator ([`oracle`]) reproduces the propagators independently.
//!
//! All rates and energies are in units of the transition frequency `ω₀`.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundstate;
pub mod channel;
pub mod cli;
pub mod entanglement;
mod error;
pub mod oracle;
mod params;
pub mod propagator;
pub mod quadrature;
pub mod sampling;
pub mod sweep;

pub use error::{Error, Result};
pub use params::SystemParams;

pub use num_complex::Complex64 as C64;
