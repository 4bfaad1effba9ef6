//! Simulation of two-photon interference in a lossy birefringent waveguide
//! coupler.
//!
//! The device under study is a polarization-maintaining waveguide in which the
//! two polarization modes H and V accumulate different propagation phases
//! (birefringence Δβ) *and* different loss rates (dichroism Δγ), the loss being
//! engineered by evanescently coupling the guide to auxiliary waveguide arrays
//! that act as one-way drains. The crate models that system at three levels:
//!
//! * [`polarization`] — single-photon Jones calculus: the non-unitary diagonal
//!   propagator of the lossy coupler, the half-wave-plate measurement basis,
//!   and the H/V/D/A state vectors.
//! * [`lattice`] — the microscopic loss mechanism: a tight-binding chain of
//!   sink waveguides coupled to the target guide, propagated exactly, from
//!   which the effective polarization loss rates are extracted.
//! * [`biphoton`] — two-photon states built on the single-photon propagator:
//!   evolution of indistinguishable (Fock) and distinguishable (labelled)
//!   photon pairs, coincidence detection behind a rotatable half-wave plate
//!   and polarizing beam splitter, and the interference visibility.
//! * [`homtrace`] — finite-bandwidth photons: mapping the ideal visibility to
//!   a coincidence-vs-delay trace through a Gaussian overlap model.
//! * [`characterize`] — classical crossed-polarizer calibration of the
//!   accumulated birefringent phase.
//! * [`scan`] — parameter sweeps (visibility over a θ × phase grid, families
//!   of delay traces), data-parallel when the `parallel` feature is enabled.
//!
//! Distances are measured in cm, rates in cm⁻¹, angles in radians, and delays
//! in fs throughout.

pub mod biphoton;
pub mod characterize;
pub mod error;
mod exec;
pub mod homtrace;
pub mod lattice;
pub mod polarization;
pub mod scan;

pub use error::{Error, Result};
