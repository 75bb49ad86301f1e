//! Steady-state Gaussian properties of a driven three-mode
//! cavity-magnomechanical system whose cavity either amplifies (gain, the
//! PT-symmetric regime) or dissipates (the conventional regime).
//!
//! The pipeline for a single parameter point is
//! [`model::SystemParams`] → [`steady_state::working_point`] →
//! [`dynamics::quadrature_drift`] / [`dynamics::diffusion_matrix`] →
//! [`dynamics::stability`] → [`measures::solve_lyapunov`] →
//! [`measures::pair_measures`]. [`sweep`] runs that pipeline over grids and
//! ships the figure presets; [`cli`] is the command-line front end.

pub mod cli;
pub mod config;
mod dd;
pub mod dynamics;
pub mod error;
pub mod measures;
pub mod model;
pub mod steady_state;
pub mod sweep;

pub use error::{Error, Result};
