//! Hong-Ou-Mandel interference of signal fields emitted by two remote
//! atomic-ensemble quantum memories.
//!
//! * [`angular_momentum`]: exact Clebsch-Gordan algebra, `cos^2 theta`,
//!   `cos^2 eta` and the parametric coupling `chi`.
//! * [`fock`]: truncated multi-mode Fock-space engine with squeezers,
//!   beamsplitters, polarization rotations, loss and threshold detection.
//! * [`analytic`]: closed-form two-fold and four-fold coincidence rates.
//! * [`sampler`]: Monte Carlo trial counting with the blocked-source benchmark.
//! * [`cli`]: configuration parsing and the CSV/report pipeline.

pub mod analytic;
pub mod angular_momentum;
pub mod cli;
pub mod error;
pub mod fock;
pub mod sampler;

pub use error::{Error, Result};
