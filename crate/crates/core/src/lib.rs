//! Decoherence of a charge qubit coupled to a bath of harmonic oscillators
//! through a `σ_z ⊗ b†b` interaction.
//!
//! The reduced dynamics use a symmetric split of the system and interaction
//! propagators, with the bath trace evaluated in closed form. The
//! [`oracle`] module holds independent reference computations.

pub mod bath;
pub mod cli;
pub mod config;
pub mod error;
pub mod mat2;
pub mod measure;
pub mod oracle;
pub mod propagation;
pub mod qubit;
pub mod units;

pub use config::ScenarioConfig;
pub use bath::{BathGrid, BathMode, BathSpec, CutoffSign, OhmicSpec};
pub use error::{Error, Result};
pub use mat2::Mat2;
pub use measure::{d_of_t, low_decoherence_time, norm_at, DeviationReport, SearchPolicy};
pub use propagation::{PropagationContext, SplitStep};
pub use qubit::{DensityMatrix2, Eigensystem2, PureState2, QubitParams};
pub use units::FrequencyConvention;
