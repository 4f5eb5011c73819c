//! Moving-window Fourier spectral solver for the linear Schrödinger equation
//! `i u_t + Δu = V u` on `R^d` (`d = 1, 2`) with compactly supported `V`.
//!
//! The whole-space problem is truncated with a smooth cutoff to the torus
//! `[-L, L]^d`, discretized by trigonometric polynomials of degree `N` per
//! axis and advanced by the exponential Euler method. When the solution
//! reaches the edge of the window, the window is doubled and the solution
//! zero-extended onto it.
//!
//! ```no_run
//! use movewin::{evolve, SimConfig, Silent};
//!
//! let cfg = SimConfig::free(40.0, 1600, 1e-3, 2.0);
//! let out = evolve(&cfg, &mut Silent).unwrap();
//! println!("final norm {}", out.state.field().l2_norm());
//! ```

pub mod config;
pub mod cutoff;
pub mod error;
pub mod field;
pub mod grid;
pub mod harness;
pub mod io;
pub mod physics;
pub mod product;
pub mod scalar;
pub mod stepper;
pub mod transform;
pub mod window;

pub use config::SimConfig;
pub use cutoff::{bump, transition, CutoffSpec};
pub use error::{Error, Result};
pub use field::Field;
pub use grid::Grid;
pub use harness::{
    error_vs_exact, error_vs_reference, fit_slope, projection_rate_check, sweep_space, sweep_time,
    ConvergenceRow, ConvergenceTable, Coupling, ReferenceSolution, SlopeFit,
};
pub use physics::{exact_free_solution, GaussianPacket, InitialData, Potential, Regularity};
pub use product::{multiply_collocated, multiply_dealiased, ProductMode};
pub use scalar::{ScalarFn, SpaceTimeFn};
pub use stepper::{evolve, free_propagate, phi1, Observer, RunOutcome, Silent, StepperState};
pub use transform::{forward, inverse};
pub use window::{boundary_indicator, maybe_extend, ExtensionEvent, WindowPolicy};
