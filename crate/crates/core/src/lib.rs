//! Numerical laboratory for very weak solutions of 1-D wave equations
//! `u_tt - a(t) u_xx + lower order = f` whose time-dependent coefficients are
//! distributions.
//!
//! Coefficients are regularised by mollifier nets ([`coeffs`]), the
//! frequency-side energy system is integrated with a quasi-symmetriser energy
//! ([`qsym`], [`freq_energy`]), and the regularised PDE is solved with a
//! Lax–Friedrichs scheme ([`fd_solver`]) and compared against closed-form
//! oracles ([`exact`]) in the studies of [`experiments`].

pub mod coeffs;
pub mod config;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod fd_solver;
pub mod freq_energy;
pub mod qsym;
pub mod quad;

pub use error::{Error, Result};
