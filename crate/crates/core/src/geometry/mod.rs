//! Closed parametric hypersurfaces in the plane and in space.
//!
//! Every built-in shape carries an analytic chart with closed-form first and
//! second derivatives, so frames and curvatures are exact up to rounding.
//! Integrals over the surface use a periodic trapezoid rule in periodic
//! directions and Gauss-Legendre in the polar angle of the sphere.

mod distance;
mod extension;
mod frame;
mod tube;

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{compensated_sum, gauss_legendre, periodic_trapezoid, vector_from, Vector};

pub use extension::{normal_extension, NormalExtension, ScalarOnSurface, SurfaceValue};
pub use frame::SurfaceFrame;
pub use tube::{tube_integral, tube_integral_terms, NormalRule, TubePoint, TubeQuadrature};

/// Parameter tuple of a chart. Only the first `N - 1` entries are meaningful.
pub type Params = [f64; 2];

/// The analytic shape families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SurfaceKind {
    Circle { radius: f64, center: [f64; 2] },
    /// Semi-axes along x and y.
    Ellipse { semi_axes: [f64; 2], center: [f64; 2] },
    Sphere { radius: f64, center: [f64; 3] },
    Torus { r_major: f64, r_minor: f64, center: [f64; 3] },
}

impl SurfaceKind {
    pub fn ambient_dimension(&self) -> usize {
        match self {
            SurfaceKind::Circle { .. } | SurfaceKind::Ellipse { .. } => 2,
            SurfaceKind::Sphere { .. } | SurfaceKind::Torus { .. } => 3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SurfaceKind::Circle { .. } => "circle",
            SurfaceKind::Ellipse { .. } => "ellipse",
            SurfaceKind::Sphere { .. } => "sphere",
            SurfaceKind::Torus { .. } => "torus",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, what: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Configuration(format!("{what} must be positive and finite, got {v}")))
            }
        };
        match *self {
            SurfaceKind::Circle { radius, .. } | SurfaceKind::Sphere { radius, .. } => positive(radius, "radius"),
            SurfaceKind::Ellipse { semi_axes, .. } => {
                positive(semi_axes[0], "semi_axes[0]")?;
                positive(semi_axes[1], "semi_axes[1]")
            }
            SurfaceKind::Torus { r_major, r_minor, .. } => {
                positive(r_minor, "r_minor")?;
                positive(r_major, "r_major")?;
                if r_major <= r_minor {
                    return Err(Error::Configuration(format!(
                        "torus needs r_major > r_minor (got {r_major} <= {r_minor})"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Largest tube half-width on which the nearest-point projection is unique.
    pub fn reach(&self) -> f64 {
        match *self {
            SurfaceKind::Circle { radius, .. } | SurfaceKind::Sphere { radius, .. } => radius,
            SurfaceKind::Ellipse { semi_axes: [a, b], .. } => {
                let (major, minor) = if a >= b { (a, b) } else { (b, a) };
                minor * minor / major
            }
            SurfaceKind::Torus { r_major, r_minor, .. } => r_minor.min(r_major - r_minor),
        }
    }

    /// Closed-form `H^{N-1}` measure where one exists (not for the ellipse).
    pub fn closed_form_measure(&self) -> Option<f64> {
        match *self {
            SurfaceKind::Circle { radius, .. } => Some(2.0 * PI * radius),
            SurfaceKind::Sphere { radius, .. } => Some(4.0 * PI * radius * radius),
            SurfaceKind::Torus { r_major, r_minor, .. } => Some(4.0 * PI * PI * r_major * r_minor),
            SurfaceKind::Ellipse { .. } => None,
        }
    }

    fn center(&self) -> [f64; 3] {
        match *self {
            SurfaceKind::Circle { center, .. } | SurfaceKind::Ellipse { center, .. } => [center[0], center[1], 0.0],
            SurfaceKind::Sphere { center, .. } | SurfaceKind::Torus { center, .. } => center,
        }
    }
}

/// Node counts of the surface rule.
///
/// `nodes_theta` is the angle of a curve, the polar angle of the sphere or
/// the major angle of the torus; `nodes_phi` is the second direction in 3D.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub nodes_theta: usize,
    pub nodes_phi: usize,
}

impl Resolution {
    pub const PLANAR_DEFAULT: Resolution = Resolution { nodes_theta: 2048, nodes_phi: 1 };
    pub const SPATIAL_DEFAULT: Resolution = Resolution { nodes_theta: 48, nodes_phi: 96 };

    pub fn planar(nodes_theta: usize) -> Self {
        Resolution { nodes_theta, nodes_phi: 1 }
    }

    pub fn spatial(nodes_theta: usize, nodes_phi: usize) -> Self {
        Resolution { nodes_theta, nodes_phi }
    }

    pub fn default_for(dimension: usize) -> Self {
        if dimension == 2 {
            Self::PLANAR_DEFAULT
        } else {
            Self::SPATIAL_DEFAULT
        }
    }
}

/// Second-order jet of a chart, stored in 3D arrays (unused entries are zero).
#[derive(Debug, Clone, Copy)]
pub(crate) struct ChartJet {
    pub point: [f64; 3],
    pub d1: [[f64; 3]; 2],
    pub d2: [[[f64; 3]; 2]; 2],
}

/// One node of the surface rule: a frame and its weights.
#[derive(Debug, Clone)]
pub struct SurfaceNode<const N: usize> {
    pub frame: SurfaceFrame<N>,
    /// Weight in parameter space; these sum to the parameter-domain measure.
    pub param_weight: f64,
    /// `param_weight` times the area element.
    pub measure_weight: f64,
}

/// A closed `C^2` hypersurface of `R^N` given by an analytic chart.
#[derive(Debug, Clone)]
pub struct Hypersurface<const N: usize> {
    kind: SurfaceKind,
    resolution: Resolution,
    nodes: OnceLock<Arc<[SurfaceNode<N>]>>,
}

impl Hypersurface<2> {
    pub fn circle(radius: f64, center: [f64; 2]) -> Result<Self> {
        Self::new(SurfaceKind::Circle { radius, center })
    }

    pub fn ellipse(a: f64, b: f64, center: [f64; 2]) -> Result<Self> {
        Self::new(SurfaceKind::Ellipse { semi_axes: [a, b], center })
    }
}

impl Hypersurface<3> {
    pub fn sphere(radius: f64, center: [f64; 3]) -> Result<Self> {
        Self::new(SurfaceKind::Sphere { radius, center })
    }

    pub fn torus(r_major: f64, r_minor: f64, center: [f64; 3]) -> Result<Self> {
        Self::new(SurfaceKind::Torus { r_major, r_minor, center })
    }
}

impl<const N: usize> Hypersurface<N> {
    /// Builds a surface with the default resolution for its dimension.
    pub fn new(kind: SurfaceKind) -> Result<Self> {
        Self::with_resolution(kind, Resolution::default_for(N))
    }

    pub fn with_resolution(kind: SurfaceKind, resolution: Resolution) -> Result<Self> {
        if kind.ambient_dimension() != N {
            return Err(Error::Configuration(format!(
                "a {} lives in R^{}, not R^{N}",
                kind.name(),
                kind.ambient_dimension()
            )));
        }
        kind.validate()?;
        if resolution.nodes_theta < 4 || (N == 3 && resolution.nodes_phi < 4) {
            return Err(Error::Configuration(format!("surface resolution too coarse: {resolution:?}")));
        }
        Ok(Hypersurface { kind, resolution, nodes: OnceLock::new() })
    }

    /// Same shape, different node counts.
    pub fn resampled(&self, resolution: Resolution) -> Result<Self> {
        Self::with_resolution(self.kind.clone(), resolution)
    }

    pub fn kind(&self) -> &SurfaceKind {
        &self.kind
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    pub fn reach(&self) -> f64 {
        self.kind.reach()
    }

    /// Measure of the parameter box.
    pub fn parameter_measure(&self) -> f64 {
        match self.kind {
            SurfaceKind::Circle { .. } | SurfaceKind::Ellipse { .. } => 2.0 * PI,
            SurfaceKind::Sphere { .. } => 2.0 * PI * PI,
            SurfaceKind::Torus { .. } => 4.0 * PI * PI,
        }
    }

    pub(crate) fn jet(&self, params: &Params) -> ChartJet {
        let [cx, cy, cz] = self.kind.center();
        match self.kind {
            SurfaceKind::Circle { radius: r, .. } => {
                let (s, c) = params[0].sin_cos();
                ChartJet {
                    point: [cx + r * c, cy + r * s, 0.0],
                    d1: [[-r * s, r * c, 0.0], [0.0; 3]],
                    d2: [[[-r * c, -r * s, 0.0], [0.0; 3]], [[0.0; 3]; 2]],
                }
            }
            SurfaceKind::Ellipse { semi_axes: [a, b], .. } => {
                let (s, c) = params[0].sin_cos();
                ChartJet {
                    point: [cx + a * c, cy + b * s, 0.0],
                    d1: [[-a * s, b * c, 0.0], [0.0; 3]],
                    d2: [[[-a * c, -b * s, 0.0], [0.0; 3]], [[0.0; 3]; 2]],
                }
            }
            SurfaceKind::Sphere { radius: r, .. } => {
                let (st, ct) = params[0].sin_cos();
                let (sp, cp) = params[1].sin_cos();
                ChartJet {
                    point: [cx + r * st * cp, cy + r * st * sp, cz + r * ct],
                    d1: [[r * ct * cp, r * ct * sp, -r * st], [-r * st * sp, r * st * cp, 0.0]],
                    d2: [
                        [[-r * st * cp, -r * st * sp, -r * ct], [-r * ct * sp, r * ct * cp, 0.0]],
                        [[-r * ct * sp, r * ct * cp, 0.0], [-r * st * cp, -r * st * sp, 0.0]],
                    ],
                }
            }
            SurfaceKind::Torus { r_major, r_minor: r, .. } => {
                let (su, cu) = params[0].sin_cos();
                let (sv, cv) = params[1].sin_cos();
                let rho = r_major + r * cv;
                ChartJet {
                    point: [cx + rho * cu, cy + rho * su, cz + r * sv],
                    d1: [[-rho * su, rho * cu, 0.0], [-r * sv * cu, -r * sv * su, r * cv]],
                    d2: [
                        [[-rho * cu, -rho * su, 0.0], [r * sv * su, -r * sv * cu, 0.0]],
                        [[r * sv * su, -r * sv * cu, 0.0], [-r * cv * cu, -r * cv * su, -r * sv]],
                    ],
                }
            }
        }
    }

    /// Chart point at `params`.
    pub fn chart_point(&self, params: &Params) -> Vector<N> {
        vector_from(&self.jet(params).point)
    }

    /// Orthonormal frame, curvature data and area element at `params`.
    pub fn frame_at(&self, params: &Params) -> Result<SurfaceFrame<N>> {
        SurfaceFrame::from_jet(*params, &self.jet(params))
    }

    /// Quadrature nodes of the surface rule, built once and shared by clones.
    pub fn nodes(&self) -> &Arc<[SurfaceNode<N>]> {
        self.nodes.get_or_init(|| self.build_nodes())
    }

    fn build_nodes(&self) -> Arc<[SurfaceNode<N>]> {
        let (first, second) = match self.kind {
            SurfaceKind::Circle { .. } | SurfaceKind::Ellipse { .. } => {
                (periodic_trapezoid(self.resolution.nodes_theta, 0.0, 2.0 * PI), None)
            }
            SurfaceKind::Sphere { .. } => (
                gauss_legendre(self.resolution.nodes_theta, 0.0, PI),
                Some(periodic_trapezoid(self.resolution.nodes_phi, 0.0, 2.0 * PI)),
            ),
            SurfaceKind::Torus { .. } => (
                periodic_trapezoid(self.resolution.nodes_theta, 0.0, 2.0 * PI),
                Some(periodic_trapezoid(self.resolution.nodes_phi, 0.0, 2.0 * PI)),
            ),
        };
        let mut out = Vec::with_capacity(first.len() * second.as_ref().map_or(1, |r| r.len()));
        let mut push = |params: Params, w: f64| {
            let frame = self
                .frame_at(&params)
                .expect("surface rule nodes avoid chart singularities");
            let measure_weight = w * frame.area_element;
            out.push(SurfaceNode { frame, param_weight: w, measure_weight });
        };
        match second {
            None => first.iter().for_each(|(t, w)| push([t, 0.0], w)),
            Some(second) => {
                for (t, wt) in first.iter() {
                    for (p, wp) in second.iter() {
                        push([t, p], wt * wp);
                    }
                }
            }
        }
        out.into()
    }

    /// `∫_Γ integrand dH^{N-1}` with the surface rule.
    pub fn surface_integral(&self, integrand: impl Fn(&SurfaceFrame<N>) -> f64) -> f64 {
        compensated_sum(self.nodes().iter().map(|node| node.measure_weight * integrand(&node.frame)))
    }

    /// `H^{N-1}(Γ)` by quadrature.
    pub fn measure(&self) -> f64 {
        self.surface_integral(|_| 1.0)
    }

    /// Signed distance (positive outside) and foot-point parameters.
    pub fn signed_distance(&self, point: &Vector<N>) -> Result<(f64, Params)> {
        distance::signed_distance(self, point)
    }
}
