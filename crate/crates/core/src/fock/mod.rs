//! Truncated multi-mode Fock-space engine: squeezers, beamsplitters,
//! polarization rotations, loss and threshold detection.
//!
//! Beamsplitter convention: `a_1 -> sqrt(T) a_1 + sqrt(R) a_2`,
//! `a_2 -> sqrt(R) a_1 - sqrt(T) a_2` (real, symmetric, orthogonal).

pub mod basis;
pub mod circuit;
pub mod detection;
pub mod dump;
pub mod experiment;
pub mod mixed;
pub mod registry;
pub mod state;

pub use circuit::{Element, OpticalCircuit};
pub use detection::{ClickDistribution, Detector};
pub use experiment::{
    build_experiment_state, experiment_circuit, experiment_clicks, experiment_clicks_mixed, experiment_detectors,
    experiment_registry, DEFAULT_CUTOFF,
};
pub use mixed::MixedState;
pub use registry::{ModeLabel, ModeRegistry, Polarization};
pub use state::FockState;
