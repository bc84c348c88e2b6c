//! Layered phase fields `u^ε` built from the optimal profile composed with
//! the signed distance, and the Allen-Cahn energy with its inner variations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::AmbientVectorField;
use crate::geometry::{tube_integral, tube_integral_terms, Hypersurface, NormalRule, TubePoint, TubeQuadrature};
use crate::numerics::{Matrix, Vector};
use crate::sharp::VariationReport;

/// `tanh(s)` and its derivative `1 - tanh²(s)`.
#[inline]
pub fn optimal_profile(s: f64) -> (f64, f64) {
    let q = s.tanh();
    (q, 1.0 - q * q)
}

/// `W(u) = ½(1 - u²)²`.
#[inline]
pub fn double_well(u: f64) -> f64 {
    let a = 1.0 - u * u;
    0.5 * a * a
}

/// One transition layer at signed distance `offset` with orientation `sign`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layer {
    pub offset: f64,
    pub sign: i8,
}

/// Width of the tube in units of `ε`, beyond the outermost layer.
pub const DEFAULT_TUBE_WIDTH_OVER_EPS: f64 = 12.0;

/// Separation constant `c` of the layer offsets `a_j = (j - (m-1)/2) c √ε`.
pub const LAYER_SEPARATION: f64 = 2.0;

/// Quadrature options for the tube carrying a phase field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TubeOptions {
    pub normal_nodes: usize,
    pub rule: NormalRule,
    pub width_over_eps: f64,
}

impl Default for TubeOptions {
    fn default() -> Self {
        TubeOptions {
            normal_nodes: TubeQuadrature::<2>::DEFAULT_NORMAL_NODES,
            rule: NormalRule::Trapezoid,
            width_over_eps: DEFAULT_TUBE_WIDTH_OVER_EPS,
        }
    }
}

/// The two parts of the Allen-Cahn energy density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyDensity {
    /// `ε|∇u|²/2`.
    pub gradient_part: f64,
    /// `W(u)/ε`.
    pub potential_part: f64,
}

impl EnergyDensity {
    pub fn total(&self) -> f64 {
        self.gradient_part + self.potential_part
    }
}

/// Field value and normal derivative `∂u/∂s` at a tube point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileValue {
    pub u: f64,
    pub du_ds: f64,
}

/// `u(x) = Σ_j s_j q((d(x) - a_j)/ε) - c`, with the parity constant `c`
/// making `u` equal to `±1` away from `Γ`.
#[derive(Debug, Clone)]
pub struct PhaseField<const N: usize> {
    surface: Hypersurface<N>,
    epsilon: f64,
    layers: Vec<Layer>,
    shift: f64,
    inner_value: f64,
    outer_value: f64,
    quadrature: TubeQuadrature<N>,
}

impl<const N: usize> PhaseField<N> {
    pub fn layered(surface: &Hypersurface<N>, epsilon: f64, layers: Vec<Layer>, options: TubeOptions) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Configuration(format!("epsilon must be positive, got {epsilon}")));
        }
        if !(options.width_over_eps > 0.0) {
            return Err(Error::Configuration("tube width must be positive".into()));
        }
        let reach = surface.reach();
        for (j, layer) in layers.iter().enumerate() {
            if layer.sign != 1 && layer.sign != -1 {
                return Err(Error::Configuration(format!("layer {j} has sign {}, expected ±1", layer.sign)));
            }
            if !(layer.offset.abs() + DEFAULT_TUBE_WIDTH_OVER_EPS * epsilon < reach) {
                return Err(Error::Configuration(format!(
                    "layer {j} at offset {} with ε = {epsilon} does not fit inside the reach {reach}",
                    layer.offset
                )));
            }
            if j > 0 {
                let prev = layers[j - 1];
                if !(layer.offset > prev.offset) {
                    return Err(Error::Configuration("layer offsets must be strictly increasing".into()));
                }
                if layer.sign == prev.sign {
                    return Err(Error::Configuration("layer orientations must alternate".into()));
                }
            }
        }
        let sum: f64 = layers.iter().map(|l| l.sign as f64).sum();
        let shift = if layers.len().is_multiple_of(2) && !layers.is_empty() { layers[0].sign as f64 } else { 0.0 };
        let (inner_value, outer_value) = if layers.is_empty() { (1.0, 1.0) } else { (-sum - shift, sum - shift) };
        let max_offset = layers.iter().map(|l| l.offset.abs()).fold(0.0, f64::max);
        let s_max = (options.width_over_eps * epsilon + max_offset).min(0.9 * reach);
        let quadrature = TubeQuadrature::new(surface, s_max, options.normal_nodes, options.rule)?;
        Ok(PhaseField {
            surface: surface.clone(),
            epsilon,
            layers,
            shift,
            inner_value,
            outer_value,
            quadrature,
        })
    }

    /// A single layer on `Γ`, positive outside.
    pub fn single(surface: &Hypersurface<N>, epsilon: f64) -> Result<Self> {
        Self::with_multiplicity(surface, epsilon, 1, TubeOptions::default())
    }

    /// `m` alternating layers at offsets `(j - (m-1)/2) · 2√ε`.
    pub fn with_multiplicity(surface: &Hypersurface<N>, epsilon: f64, m: usize, options: TubeOptions) -> Result<Self> {
        if m == 0 {
            return Self::uniform(surface, epsilon, options);
        }
        let spacing = LAYER_SEPARATION * epsilon.sqrt();
        let layers = (0..m)
            .map(|j| Layer {
                offset: (j as f64 - (m as f64 - 1.0) / 2.0) * spacing,
                sign: if j % 2 == 0 { 1 } else { -1 },
            })
            .collect();
        Self::layered(surface, epsilon, layers, options)
    }

    /// The constant field `u ≡ 1`.
    pub fn uniform(surface: &Hypersurface<N>, epsilon: f64, options: TubeOptions) -> Result<Self> {
        Self::layered(surface, epsilon, Vec::new(), options)
    }

    pub fn surface(&self) -> &Hypersurface<N> {
        &self.surface
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn multiplicity(&self) -> usize {
        self.layers.len()
    }

    /// Values of `u` on the enclosed side and on the outside, away from `Γ`.
    pub fn far_values(&self) -> (f64, f64) {
        (self.inner_value, self.outer_value)
    }

    pub fn quadrature(&self) -> &TubeQuadrature<N> {
        &self.quadrature
    }

    /// `u` and `∂u/∂s` at signed distance `s`.
    #[inline]
    pub fn profile_at(&self, s: f64) -> ProfileValue {
        let mut u = -self.shift;
        let mut du = 0.0;
        for layer in &self.layers {
            let (q, dq) = optimal_profile((s - layer.offset) / self.epsilon);
            let sign = layer.sign as f64;
            u += sign * q;
            du += sign * dq / self.epsilon;
        }
        if self.layers.is_empty() {
            u = 1.0;
        }
        ProfileValue { u, du_ds: du }
    }

    /// `∇u = (∂u/∂s) n` at a tube point.
    #[inline]
    pub fn gradient_in_tube(&self, p: &TubePoint<'_, N>) -> Vector<N> {
        p.frame.normal * self.profile_at(p.s).du_ds
    }

    pub fn density_at(&self, s: f64) -> EnergyDensity {
        let pv = self.profile_at(s);
        EnergyDensity {
            gradient_part: 0.5 * self.epsilon * pv.du_ds * pv.du_ds,
            potential_part: double_well(pv.u) / self.epsilon,
        }
    }

    /// `u(x)` and `∇u(x)` at an ambient point; the far value outside the tube.
    pub fn eval(&self, x: &Vector<N>) -> (f64, Vector<N>) {
        let far = |s: f64| if s > 0.0 { self.outer_value } else { self.inner_value };
        match self.surface.signed_distance(x) {
            Ok((s, params)) if s.abs() <= self.quadrature.s_max() => match self.surface.frame_at(&params) {
                Ok(frame) => {
                    let pv = self.profile_at(s);
                    (pv.u, frame.normal * pv.du_ds)
                }
                Err(_) => (far(s), Vector::zeros()),
            },
            Ok((s, _)) => (far(s), Vector::zeros()),
            Err(Error::OutOfTube { signed_distance, .. }) => (far(signed_distance), Vector::zeros()),
            Err(_) => (far(1.0), Vector::zeros()),
        }
    }

    pub fn value(&self, x: &Vector<N>) -> f64 {
        self.eval(x).0
    }

    pub fn gradient(&self, x: &Vector<N>) -> Vector<N> {
        self.eval(x).1
    }
}

/// `E_ε(u) = ∫ ε|∇u|²/2 + W(u)/ε`.
pub fn ac_energy<const N: usize>(field: &PhaseField<N>) -> f64 {
    tube_integral(field.quadrature(), |p| field.density_at(p.s).total())
}

/// `∫ e(u) div η - ε (∇u, ∇u·∇η)`.
pub fn ac_first_inner_variation<const N: usize>(field: &PhaseField<N>, eta: &AmbientVectorField<N>) -> f64 {
    let eps = field.epsilon();
    tube_integral(field.quadrature(), |p| {
        let jet = eta.jet_in_tube(p);
        let pv = field.profile_at(p.s);
        let e = 0.5 * eps * pv.du_ds * pv.du_ds + double_well(pv.u) / eps;
        let n = &p.frame.normal;
        e * jet.divergence() - eps * pv.du_ds * pv.du_ds * n.dot(&(jet.jacobian * n))
    })
}

pub const DIFFUSE_TERMS: [&str; 6] = [
    "density_div_zeta",
    "density_div_eta_squared_minus_trace",
    "stretch_squared",
    "jacobian_squared",
    "zeta_stretch",
    "stretch_div_eta",
];

/// The six pointwise integrands of the second inner variation for gradient
/// `g = ∇u`, density `e`, `M = ∇η` and `Z = ∇ζ`.
#[inline]
pub fn second_variation_integrand<const N: usize>(
    eps: f64,
    density: f64,
    g: &Vector<N>,
    m: &Matrix<N>,
    z: &Matrix<N>,
) -> [f64; 6] {
    let div = m.trace();
    let mg = m * g;
    let stretch = g.dot(&mg);
    [
        density * z.trace(),
        density * (div * div - (m * m).trace()),
        eps * (m.transpose() * g).norm_squared(),
        2.0 * eps * g.dot(&(m * mg)),
        -eps * g.dot(&(z * g)),
        -2.0 * eps * stretch * div,
    ]
}

/// Second inner variation `d²/dt² E_ε(u∘Φ_t^{-1})` at `t = 0`.
pub fn ac_second_inner_variation<const N: usize>(
    field: &PhaseField<N>,
    eta: &AmbientVectorField<N>,
    zeta: &AmbientVectorField<N>,
) -> VariationReport {
    let eps = field.epsilon();
    let values = tube_integral_terms(field.quadrature(), |p| {
        let m = eta.jet_in_tube(p).jacobian;
        let z = zeta.jet_in_tube(p).jacobian;
        let g = field.gradient_in_tube(p);
        second_variation_integrand(eps, field.density_at(p.s).total(), &g, &m, &z)
    });
    VariationReport::from_terms(&DIFFUSE_TERMS, &values)
}

/// `∫ e(u) φ`, whose limit is `2mσ ∫_Γ φ`.
pub fn energy_measure_pairing<const N: usize>(field: &PhaseField<N>, phi: impl Fn(&Vector<N>) -> f64) -> f64 {
    tube_integral(field.quadrature(), |p| field.density_at(p.s).total() * phi(&p.x))
}

/// `∫ ε (∇u, ∇u·∇η)`, whose limit is `2mσ ∫_Γ (n, n·∇η)`.
pub fn stress_pairing<const N: usize>(field: &PhaseField<N>, eta: &AmbientVectorField<N>) -> f64 {
    let eps = field.epsilon();
    tube_integral(field.quadrature(), |p| {
        let g = field.gradient_in_tube(p);
        eps * g.dot(&(eta.jet_in_tube(p).jacobian * g))
    })
}

/// `∫ |ε|∇u|²/2 - W(u)/ε|`.
pub fn equipartition_defect<const N: usize>(field: &PhaseField<N>) -> f64 {
    tube_integral(field.quadrature(), |p| {
        let d = field.density_at(p.s);
        (d.gradient_part - d.potential_part).abs()
    })
}
