//! Multi-rate spectral deferred correction (MRSDC) time integration.
//!
//! The library integrates semi-discrete systems of the form
//!
//! ```text
//! M dT/dt = f_slow(T) + f_fast(T, t) + g(t)
//! ```
//!
//! where `f_slow` is a stiff linear operator treated implicitly over large
//! node spacings, `f_fast` is a cheap but rapidly varying affine coupling
//! treated explicitly over embedded sub-steps, and `g` is a state-independent
//! source. Deferred correction sweeps raise the formal order by one per
//! iteration up to the order of the underlying quadrature rules, so the same
//! machinery provides first-order IMEX Euler, single-rate SDC and multi-rate
//! SDC of arbitrary order.
//!
//! The crate ships a verification problem ([`heat2d`]): a rectangular plate
//! discretized with bilinear quadrilateral finite elements, heated through a
//! strip on the top boundary that slides along the plate. The [`study`]
//! module and the `mrsdc` binary drive residual-decay, convergence-order and
//! work-precision studies on that problem and write CSV reports.

pub mod config;
pub mod heat2d;
pub mod linalg;
pub mod quadrature;
pub mod steppers;
pub mod study;
pub mod system;

pub use quadrature::{CollocationTableau, MultiRateTableau};
pub use steppers::{Method, StepperConfig};
pub use system::{SplitSystem, StateVector};
