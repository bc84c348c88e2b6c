use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Hypersurface, SurfaceFrame, SurfaceNode};
use crate::error::{Error, Result};
use crate::numerics::{closed_trapezoid, gauss_legendre, CompensatedSum, Rule1d, Vector};

/// Rule used across the tube, in the signed-distance direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalRule {
    /// Closed trapezoid. Converges geometrically for integrands that decay
    /// to zero at `±s_max`, such as transition layers.
    #[default]
    Trapezoid,
    /// Gauss-Legendre; the better choice for integrands that do not decay.
    GaussLegendre,
}

/// Product rule on `Γ × [-s_max, s_max]` in normal coordinates
/// `x = y + s n(y)`.
#[derive(Debug, Clone)]
pub struct TubeQuadrature<const N: usize> {
    surface_nodes: Arc<[SurfaceNode<N>]>,
    normal: Rule1d,
    s_max: f64,
}

/// A quadrature point of the tube.
#[derive(Debug, Clone, Copy)]
pub struct TubePoint<'a, const N: usize> {
    pub frame: &'a SurfaceFrame<N>,
    pub s: f64,
    pub x: Vector<N>,
}

impl<const N: usize> TubeQuadrature<N> {
    pub const DEFAULT_NORMAL_NODES: usize = 129;

    pub fn new(surface: &Hypersurface<N>, s_max: f64, normal_nodes: usize, rule: NormalRule) -> Result<Self> {
        if !(s_max > 0.0) || !(s_max < surface.reach()) {
            return Err(Error::Configuration(format!(
                "tube half-width {s_max} must lie in (0, reach = {})",
                surface.reach()
            )));
        }
        let normal = match rule {
            NormalRule::Trapezoid => {
                if normal_nodes < 2 {
                    return Err(Error::Configuration("trapezoid rule needs at least 2 normal nodes".into()));
                }
                closed_trapezoid(normal_nodes, -s_max, s_max)
            }
            NormalRule::GaussLegendre => {
                if normal_nodes < 1 {
                    return Err(Error::Configuration("need at least one normal node".into()));
                }
                gauss_legendre(normal_nodes, -s_max, s_max)
            }
        };
        Ok(TubeQuadrature { surface_nodes: surface.nodes().clone(), normal, s_max })
    }

    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    pub fn surface_nodes(&self) -> &[SurfaceNode<N>] {
        &self.surface_nodes
    }

    pub fn normal_nodes(&self) -> &Rule1d {
        &self.normal
    }

    pub fn len(&self) -> usize {
        self.surface_nodes.len() * self.normal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Visits every node with its full weight (surface weight, normal weight
    /// and the tube Jacobian `∏(1 + s κ_i)`).
    pub fn for_each(&self, mut visit: impl FnMut(&TubePoint<'_, N>, f64)) {
        for node in self.surface_nodes.iter() {
            let frame = &node.frame;
            for (s, ws) in self.normal.iter() {
                let point = TubePoint { frame, s, x: frame.point + frame.normal * s };
                visit(&point, node.measure_weight * ws * frame.tube_jacobian(s));
            }
        }
    }

    /// Ambient positions of a sparse subset of nodes (both faces and the
    /// mid-surface, at most `max_surface` surface nodes).
    pub fn sample_points(&self, max_surface: usize) -> Vec<Vector<N>> {
        let stride = self.surface_nodes.len().div_ceil(max_surface.max(1)).max(1);
        let mut out = Vec::new();
        for node in self.surface_nodes.iter().step_by(stride) {
            for s in [-self.s_max, 0.0, self.s_max] {
                out.push(node.frame.point + node.frame.normal * s);
            }
        }
        out
    }
}

/// `∫_tube integrand dx` in normal coordinates.
pub fn tube_integral<const N: usize>(
    quad: &TubeQuadrature<N>,
    integrand: impl Fn(&TubePoint<'_, N>) -> f64,
) -> f64 {
    let mut acc = CompensatedSum::new();
    quad.for_each(|p, w| acc.add(w * integrand(p)));
    acc.value()
}

/// Several tube integrals evaluated in one sweep.
pub fn tube_integral_terms<const N: usize, const K: usize>(
    quad: &TubeQuadrature<N>,
    integrand: impl Fn(&TubePoint<'_, N>) -> [f64; K],
) -> [f64; K] {
    let mut acc = [CompensatedSum::new(); K];
    quad.for_each(|p, w| {
        let values = integrand(p);
        for (a, v) in acc.iter_mut().zip(values) {
            a.add(w * v);
        }
    });
    acc.map(|a| a.value())
}
