//! Angular-momentum algebra of the Raman write process.
//!
//! Clebsch-Gordan coefficients are evaluated exactly (`±sqrt(p/q)`), so the
//! atomic-structure ratios `cos^2 theta` and `cos^2 eta` come out as exact
//! rationals. Half-integers are carried as doubled integers.

mod cg;
pub mod constants;
mod exact;
mod half;
mod scheme;

pub use cg::{clebsch_gordan, clebsch_gordan_f64};
pub use exact::{ratio_to_f64, SignedSqrt};
pub use half::Half;
pub use scheme::{branching_angle, coupling_chi, mixing_angle, x_coefficient, CouplingInputs, LevelScheme};
