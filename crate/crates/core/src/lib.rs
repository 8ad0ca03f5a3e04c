//! Exact dynamics of a qubit coupled to a detuned Lorentzian cavity mode in
//! the single-excitation sector, together with the quantities built on top of
//! it: the time-dependent decay rate, the trace-distance back-flow measure of
//! non-Markovianity, and relative-purity quantum-speed-limit times.
//!
//! Everything factors through the survival amplitude `k(t)` of the excited
//! state, which is known in closed form for this channel. The [`oracle`]
//! module provides independent brute-force integrators (a fourth-order
//! master-equation integrator and a discretized memory-kernel march) used to
//! cross-check the closed forms.
//!
//! Units: the coupling rate γ sets the time scale. All rates (λ, δ) are
//! naturally expressed in units of γ and times in units of 1/γ.

pub mod dynamics;
pub mod error;
pub mod model;
pub mod nonmarkov;
pub mod numerics;
pub mod oracle;
pub mod qsl;

pub use error::Error;
pub use num_complex::Complex64;

pub type Result<T> = std::result::Result<T, Error>;
