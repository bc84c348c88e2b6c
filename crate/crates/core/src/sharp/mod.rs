//! The area functional `E(Γ) = 2σ H^{N-1}(Γ)`, its inner variations, the
//! discrepancy term and Jacobi forms.

mod identities;
mod spectrum;

pub use identities::{frame_identity_residuals, IdentityResidual};
pub use spectrum::{jacobi_spectrum, rayleigh_quotient, EigenCluster, SpectrumKind, SpectrumReport};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{AmbientVectorField, FieldJet};
use crate::geometry::{Hypersurface, ScalarOnSurface, SurfaceFrame, TubePoint};
use crate::numerics::{compensated_sum, Matrix, Vector};

/// `σ = ∫_{-1}^{1} √(W(s)/2) ds` for `W(s) = ½(1 - s²)²`.
pub const SIGMA: f64 = 2.0 / 3.0;

/// Surface tension `2σ` multiplying the interface measure.
pub const SURFACE_TENSION: f64 = 2.0 * SIGMA;

/// A variation value with its named partial integrals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariationReport {
    pub value: f64,
    pub breakdown: Vec<(String, f64)>,
}

impl VariationReport {
    pub fn from_terms(names: &[&str], values: &[f64]) -> Self {
        debug_assert_eq!(names.len(), values.len());
        VariationReport {
            value: compensated_sum(values.iter().copied()),
            breakdown: names.iter().zip(values).map(|(n, v)| (n.to_string(), *v)).collect(),
        }
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.breakdown.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    /// Difference between `value` and the sum of the breakdown entries.
    pub fn consistency_residual(&self) -> f64 {
        (self.value - compensated_sum(self.breakdown.iter().map(|(_, v)| *v))).abs()
    }
}

/// Jet of an ambient field at a point of `Γ`.
pub fn jet_on_surface<const N: usize>(field: &AmbientVectorField<N>, frame: &SurfaceFrame<N>) -> FieldJet<N> {
    field.jet_in_tube(&TubePoint { frame, s: 0.0, x: frame.point })
}

/// `(n, n·∇η) = nᵀ (∇η) n`.
#[inline]
pub fn normal_stretch<const N: usize>(normal: &Vector<N>, jac: &Matrix<N>) -> f64 {
    normal.dot(&(jac * normal))
}

/// `div^Γ η = div η - (n, n·∇η)`.
#[inline]
pub fn tangential_divergence<const N: usize>(normal: &Vector<N>, jac: &Matrix<N>) -> f64 {
    jac.trace() - normal_stretch(normal, jac)
}

pub fn area_energy<const N: usize>(surface: &Hypersurface<N>) -> f64 {
    SURFACE_TENSION * surface.measure()
}

/// `2σ ∫_Γ div η - (n, n·∇η)`.
pub fn first_inner_variation<const N: usize>(surface: &Hypersurface<N>, eta: &AmbientVectorField<N>) -> f64 {
    SURFACE_TENSION
        * surface.surface_integral(|frame| {
            let jet = jet_on_surface(eta, frame);
            tangential_divergence(&frame.normal, &jet.jacobian)
        })
}

pub const SHARP_TERMS: [&str; 4] =
    ["div_tangential_zeta", "div_tangential_eta_squared", "normal_part", "tangential_cross"];

/// The four pointwise integrands of the second variation of area.
pub fn second_variation_integrand<const N: usize>(
    frame: &SurfaceFrame<N>,
    eta_jac: &Matrix<N>,
    zeta_jac: &Matrix<N>,
) -> [f64; 4] {
    let n = &frame.normal;
    let div_zeta = tangential_divergence(n, zeta_jac);
    let div_eta = tangential_divergence(n, eta_jac);
    let d_tau: Vec<Vector<N>> = frame.tangents.iter().map(|t| eta_jac * t).collect();
    let mut normal_part = 0.0;
    let mut cross = 0.0;
    for (i, di) in d_tau.iter().enumerate() {
        let mut perp = *di;
        for tj in &frame.tangents {
            perp -= tj * tj.dot(di);
        }
        normal_part += perp.norm_squared();
        for (j, dj) in d_tau.iter().enumerate() {
            cross += frame.tangents[i].dot(dj) * frame.tangents[j].dot(di);
        }
    }
    [div_zeta, div_eta * div_eta, normal_part, -cross]
}

/// Second inner variation of the area functional along
/// `Φ_t = x + tη + ½t²ζ`.
pub fn second_inner_variation<const N: usize>(
    surface: &Hypersurface<N>,
    eta: &AmbientVectorField<N>,
    zeta: &AmbientVectorField<N>,
) -> VariationReport {
    let mut acc = [0.0f64; 4].map(|_| crate::numerics::CompensatedSum::new());
    for node in surface.nodes().iter() {
        let frame = &node.frame;
        let ej = jet_on_surface(eta, frame).jacobian;
        let zj = jet_on_surface(zeta, frame).jacobian;
        for (a, v) in acc.iter_mut().zip(second_variation_integrand(frame, &ej, &zj)) {
            a.add(node.measure_weight * v);
        }
    }
    let values = acc.map(|a| SURFACE_TENSION * a.value());
    VariationReport::from_terms(&SHARP_TERMS, &values)
}

/// `2σ ∫_Γ (n, n·∇η)²`, the amount by which the diffuse second variations
/// overshoot the sharp one in the limit.
pub fn discrepancy<const N: usize>(surface: &Hypersurface<N>, eta: &AmbientVectorField<N>) -> f64 {
    SURFACE_TENSION
        * surface.surface_integral(|frame| {
            let a = normal_stretch(&frame.normal, &jet_on_surface(eta, frame).jacobian);
            a * a
        })
}

/// `m δ²E(Γ, η, ζ) + 2mσ ∫_Γ (n, n·∇η)²`.
pub fn predicted_limit<const N: usize>(
    surface: &Hypersurface<N>,
    eta: &AmbientVectorField<N>,
    zeta: &AmbientVectorField<N>,
    multiplicity: u32,
) -> Result<f64> {
    if multiplicity < 1 {
        return Err(Error::Domain("multiplicity must be at least 1".into()));
    }
    let m = multiplicity as f64;
    Ok(m * (second_inner_variation(surface, eta, zeta).value + discrepancy(surface, eta)))
}

/// Which gradient enters the Jacobi form.
#[derive(Debug, Clone)]
pub enum JacobiMode<const N: usize> {
    /// `|∇^Γ f|²`.
    Tangential,
    /// `|∇f|² = |∇^Γ f|² + (∂f/∂n)²` for an ambient extension whose normal
    /// derivative on `Γ` is given.
    Full(ScalarOnSurface<N>),
}

/// `scale · ∫_Γ |grad f|² - |A|² f²`.
pub fn jacobi_form<const N: usize>(
    surface: &Hypersurface<N>,
    f: &ScalarOnSurface<N>,
    mode: &JacobiMode<N>,
    scale: f64,
) -> f64 {
    scale
        * surface.surface_integral(|frame| {
            let fv = f.eval(frame);
            let mut grad_sq = frame.tangential_gradient(&fv.param_gradient).norm_squared();
            if let JacobiMode::Full(dn) = mode {
                grad_sq += dn.value(frame).powi(2);
            }
            grad_sq - frame.second_fundamental_norm_sq() * fv.value * fv.value
        })
}

/// Polarization of the tangential Jacobi form,
/// `scale · ∫_Γ ∇^Γf·∇^Γg - |A|² f g`.
pub fn jacobi_bilinear<const N: usize>(
    surface: &Hypersurface<N>,
    f: &ScalarOnSurface<N>,
    g: &ScalarOnSurface<N>,
    scale: f64,
) -> f64 {
    scale
        * surface.surface_integral(|frame| {
            let (fv, gv) = (f.eval(frame), g.eval(frame));
            let grad = frame.tangential_gradient(&fv.param_gradient).dot(&frame.tangential_gradient(&gv.param_gradient));
            grad - frame.second_fundamental_norm_sq() * fv.value * gv.value
        })
}

/// Second inner variation of area along the normal extensions of `f` and
/// `g` with zero acceleration, in polarized form:
/// `2σ ∫_Γ ∇^Γf·∇^Γg + (H² - |A|²) f g`.
///
/// On a minimal surface (`H = 0`) this reduces to `jacobi_bilinear` with
/// scale `2σ`.
pub fn normal_variation_bilinear<const N: usize>(
    surface: &Hypersurface<N>,
    f: &ScalarOnSurface<N>,
    g: &ScalarOnSurface<N>,
) -> f64 {
    SURFACE_TENSION
        * surface.surface_integral(|frame| {
            let (fv, gv) = (f.eval(frame), g.eval(frame));
            let grad = frame.tangential_gradient(&fv.param_gradient).dot(&frame.tangential_gradient(&gv.param_gradient));
            let h = frame.mean_curvature();
            grad + (h * h - frame.second_fundamental_norm_sq()) * fv.value * gv.value
        })
}
