//! Fixed scenarios shared by the benchmarks.

use acvar_core::field::AmbientVectorField;
use acvar_core::geometry::{Hypersurface, Resolution, SurfaceKind};
use acvar_core::phase_field::PhaseField;
use acvar_core::Result;

/// Circle of radius 0.5 with default resolution.
pub fn circle() -> Result<Hypersurface<2>> {
    Hypersurface::circle(0.5, [0.0; 2])
}

/// Sphere of radius 0.5 on a 40 by 80 grid.
pub fn sphere() -> Result<Hypersurface<3>> {
    Hypersurface::with_resolution(SurfaceKind::Sphere { radius: 0.5, center: [0.0; 3] }, Resolution::spatial(40, 80))
}

/// Single-layer phase field on `surface` at `eps`.
pub fn single_layer<const N: usize>(surface: &Hypersurface<N>, eps: f64) -> Result<PhaseField<N>> {
    PhaseField::single(surface, eps)
}

/// The dilation `x`, the deformation used by the headline experiment.
pub fn dilation<const N: usize>() -> AmbientVectorField<N> {
    AmbientVectorField::dilation()
}
