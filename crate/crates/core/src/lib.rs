//! Inner variations of the Allen-Cahn and area functionals.

pub mod deformation;
pub mod error;
pub mod field;
pub mod geometry;
pub mod lab;
pub mod numerics;
pub mod phase_field;
pub mod sharp;

pub use error::{Error, Result};
pub use field::{AmbientVectorField, FieldJet, PolynomialField, ScalarPolynomial};
pub use geometry::{Hypersurface, SurfaceFrame, SurfaceKind};
pub use deformation::{DeformationFlow, FDEstimate};
pub use lab::{ExperimentConfig, ExperimentKind, ExperimentReport};
pub use phase_field::{Layer, PhaseField};
pub use sharp::{SpectrumReport, VariationReport};
