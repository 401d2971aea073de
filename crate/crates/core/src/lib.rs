//! Structure-preserving integrators for degenerate Lagrangian systems
//! L = theta(q) . qdot - H(q).
//!
//! The Lagrangian is linear in the velocities, so the fibre derivative
//! pins the momenta to the Dirac constraint p = theta(q) and the
//! phase-space formulation is an index-2 differential-algebraic system.
//! This crate provides:
//!
//! - variational partitioned Runge-Kutta one-step maps (Gauss-Legendre,
//!   Lobatto pairings with the null-space d-vector, SRK3) and Radau IIA
//!   applied to the constrained form ([`integrators`]),
//! - four projections onto the constraint submanifold: standard,
//!   symmetric, symplectic, and midpoint ([`projections`]),
//! - benchmark systems: a linear rotator, a Lotka-Volterra model,
//!   planar point vortices with position-dependent circulation, and
//!   guiding-centre dynamics in two field geometries ([`systems`]),
//! - diagnostics: energy / constraint / momentum error series, drift
//!   estimation, convergence-order fits, and first and second Poincare
//!   integral invariants over advected loops and surfaces
//!   ([`diagnostics`]),
//! - a configuration-driven experiment runner behind the `vprk` binary
//!   ([`config`], [`runner`]).
//!
//! See the examples directory for one runnable program per capability.

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod integrators;
pub mod nlsolve;
pub mod projections;
pub mod runner;
pub mod systems;
pub mod tableaux;

pub use error::{Error, Result};
