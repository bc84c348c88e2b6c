//! Flows `Φ_t(x) = x + tη(x) + ½t²ζ(x)`, their inverses, change-of-variables
//! energies, finite-difference oracles and the polarization constructions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{AmbientVectorField, FieldJet};
use crate::geometry::{Hypersurface, TubeQuadrature};
use crate::numerics::{determinant, inverse, log_log_slope, solve, CompensatedSum, Matrix, Vector};
use crate::phase_field::{ac_second_inner_variation, double_well, PhaseField};
use crate::sharp::{jet_on_surface, second_inner_variation, SURFACE_TENSION};

/// Upper bound for `t_max`.
pub const T_MAX_CAP: f64 = 0.5;

/// Lower bound on `det ∇Φ_t` over the guarded range.
pub const MIN_DETERMINANT: f64 = 0.5;

/// Surface nodes sampled (per tube face) when bounding `t_max`.
const T_MAX_SURFACE_SAMPLES: usize = 96;

/// Newton tolerance and iteration cap for `Φ_t^{-1}`.
pub const INVERSION_TOLERANCE: f64 = 1e-13;
pub const INVERSION_MAX_ITERATIONS: usize = 25;

/// `I + tM + ½t²Z`.
#[inline]
pub fn flow_jacobian_from<const N: usize>(eta: &FieldJet<N>, zeta: &FieldJet<N>, t: f64) -> Matrix<N> {
    Matrix::<N>::identity() + eta.jacobian * t + zeta.jacobian * (0.5 * t * t)
}

/// The flow of a velocity `η` and acceleration `ζ` together with a range of
/// `t` on which `det ∇Φ_t >= ½` at the sampled points.
#[derive(Debug, Clone)]
pub struct DeformationFlow<const N: usize> {
    eta: AmbientVectorField<N>,
    zeta: AmbientVectorField<N>,
    t_max: f64,
}

impl<const N: usize> DeformationFlow<N> {
    /// Bisects for the largest `t_max <= 0.5` such that the determinant bound
    /// holds at every sample for `t' = ±t_max·k/8`, `k = 1..8`.
    pub fn new(eta: AmbientVectorField<N>, zeta: AmbientVectorField<N>, samples: &[Vector<N>]) -> Result<Self> {
        let jets: Vec<(FieldJet<N>, FieldJet<N>)> = samples.iter().map(|x| (eta.jet_at(x), zeta.jet_at(x))).collect();
        let admissible = |t: f64| {
            (1..=8).all(|k| {
                let tk = t * k as f64 / 8.0;
                jets.iter().all(|(e, z)| {
                    determinant(&flow_jacobian_from(e, z, tk)) >= MIN_DETERMINANT
                        && determinant(&flow_jacobian_from(e, z, -tk)) >= MIN_DETERMINANT
                })
            })
        };
        let t_max = if admissible(T_MAX_CAP) {
            T_MAX_CAP
        } else {
            let (mut lo, mut hi) = (0.0, T_MAX_CAP);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if admissible(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        if !(t_max > 0.0) {
            return Err(Error::Domain("no admissible deformation range".into()));
        }
        Ok(DeformationFlow { eta, zeta, t_max })
    }

    /// Flow guarded at the nodes of a tube rule.
    pub fn for_tube(eta: AmbientVectorField<N>, zeta: AmbientVectorField<N>, quad: &TubeQuadrature<N>) -> Result<Self> {
        Self::new(eta, zeta, &quad.sample_points(T_MAX_SURFACE_SAMPLES))
    }

    /// Flow guarded on a surface.
    pub fn for_surface(eta: AmbientVectorField<N>, zeta: AmbientVectorField<N>, surface: &Hypersurface<N>) -> Result<Self> {
        let nodes = surface.nodes();
        let stride = nodes.len().div_ceil(T_MAX_SURFACE_SAMPLES).max(1);
        let samples: Vec<_> = nodes.iter().step_by(stride).map(|n| n.frame.point).collect();
        Self::new(eta, zeta, &samples)
    }

    pub fn eta(&self) -> &AmbientVectorField<N> {
        &self.eta
    }

    pub fn zeta(&self) -> &AmbientVectorField<N> {
        &self.zeta
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    fn check_t(&self, t: f64) -> Result<()> {
        if t.abs() <= self.t_max * (1.0 + 1e-12) {
            Ok(())
        } else {
            Err(Error::Domain(format!("|t| = {} exceeds t_max = {}", t.abs(), self.t_max)))
        }
    }

    /// `Φ_t(x)`.
    pub fn apply(&self, t: f64, x: &Vector<N>) -> Vector<N> {
        x + self.eta.value(x) * t + self.zeta.value(x) * (0.5 * t * t)
    }

    /// `∇Φ_t(x)`.
    pub fn jacobian(&self, t: f64, x: &Vector<N>) -> Matrix<N> {
        flow_jacobian_from(&self.eta.jet_at(x), &self.zeta.jet_at(x), t)
    }

    /// `Φ_t^{-1}(y)` by Newton's method started at `y`.
    pub fn invert(&self, t: f64, y: &Vector<N>) -> Result<Vector<N>> {
        self.check_t(t)?;
        let tol = INVERSION_TOLERANCE * y.norm().max(1.0);
        let mut x = *y;
        let mut residual = f64::INFINITY;
        for _ in 0..INVERSION_MAX_ITERATIONS {
            let (e, z) = (self.eta.jet_at(&x), self.zeta.jet_at(&x));
            let r = x + e.value * t + z.value * (0.5 * t * t) - y;
            residual = r.norm();
            if residual <= tol {
                return Ok(x);
            }
            let step = solve(&flow_jacobian_from(&e, &z, t), &r)
                .ok_or_else(|| Error::Domain("singular flow Jacobian".into()))?;
            x -= step;
            if !x.iter().all(|v| v.is_finite()) {
                return Err(Error::NonFinite("flow inversion"));
            }
        }
        let r = self.apply(t, &x) - y;
        residual = residual.min(r.norm());
        if r.norm() <= tol {
            return Ok(x);
        }
        Err(Error::Inversion { iterations: INVERSION_MAX_ITERATIONS, residual })
    }
}

pub fn flow_apply<const N: usize>(flow: &DeformationFlow<N>, t: f64, x: &Vector<N>) -> Vector<N> {
    flow.apply(t, x)
}

pub fn flow_invert<const N: usize>(flow: &DeformationFlow<N>, t: f64, y: &Vector<N>) -> Result<Vector<N>> {
    flow.invert(t, y)
}

/// `|det(I + tA + ½t²B) - (1 + t trA + ½t²[trB + (trA)² - tr A²])|`.
pub fn det_expansion_residual<const N: usize>(a: &Matrix<N>, b: &Matrix<N>, t: f64) -> f64 {
    let exact = determinant(&(Matrix::<N>::identity() + a * t + b * (0.5 * t * t)));
    let tr = a.trace();
    let expansion = 1.0 + t * tr + 0.5 * t * t * (b.trace() + tr * tr - (a * a).trace());
    (exact - expansion).abs()
}

/// Frobenius norm of `(I + tM + ½t²Z)^{-1} - (I - tM - ½t²Z + t²M²)` at `x`.
pub fn jacobian_inverse_residual<const N: usize>(flow: &DeformationFlow<N>, x: &Vector<N>, t: f64) -> Result<f64> {
    flow.check_t(t)?;
    let (e, z) = (flow.eta.jet_at(x), flow.zeta.jet_at(x));
    inverse_expansion_residual(&e.jacobian, &z.jacobian, t)
}

/// The same residual for explicit matrices.
pub fn inverse_expansion_residual<const N: usize>(m: &Matrix<N>, z: &Matrix<N>, t: f64) -> Result<f64> {
    let f = Matrix::<N>::identity() + m * t + z * (0.5 * t * t);
    let inv = inverse(&f).ok_or_else(|| Error::Domain("singular flow Jacobian".into()))?;
    let expansion = Matrix::<N>::identity() - m * t - z * (0.5 * t * t) + m * m * (t * t);
    Ok((inv - expansion).norm())
}

/// The default step sweep `t ∈ {1e-1, 5e-2, ..., 1e-4}` for expansion checks.
pub fn expansion_steps() -> Vec<f64> {
    let mut out = Vec::new();
    let mut t = 1e-1;
    while t >= 1e-4 * (1.0 - 1e-12) {
        out.push(t);
        out.push(t / 2.0);
        t /= 10.0;
    }
    out.retain(|&t| t >= 1e-4 * (1.0 - 1e-12));
    out
}

/// Least-squares slope of `log residual` against `log t`; steps whose
/// residual has reached rounding level are discarded.
pub fn expansion_slope(mut residual: impl FnMut(f64) -> f64, steps: &[f64]) -> Option<f64> {
    let points: Vec<(f64, f64)> = steps
        .iter()
        .map(|&t| (t, residual(t)))
        .filter(|&(_, r)| r > 1e3 * f64::EPSILON)
        .collect();
    if points.len() < 3 {
        return None;
    }
    log_log_slope(&points)
}

/// `E_ε(u∘Φ_t^{-1})` written in undeformed coordinates:
/// `∫ [ε|∇Φ_t^{-T}∇u|²/2 + W(u)/ε] det ∇Φ_t`.
pub fn deformed_ac_energy<const N: usize>(field: &PhaseField<N>, flow: &DeformationFlow<N>, t: f64) -> Result<f64> {
    flow.check_t(t)?;
    let eps = field.epsilon();
    let mut acc = CompensatedSum::new();
    let mut failure = None;
    field.quadrature().for_each(|p, w| {
        if failure.is_some() {
            return;
        }
        let f = flow_jacobian_from(&flow.eta.jet_in_tube(p), &flow.zeta.jet_in_tube(p), t);
        let det = determinant(&f);
        let pv = field.profile_at(p.s);
        if pv.du_ds == 0.0 && pv.u.abs() == 1.0 {
            return;
        }
        let g = p.frame.normal * pv.du_ds;
        match solve(&f.transpose(), &g) {
            Some(pulled) => {
                let density = 0.5 * eps * pulled.norm_squared() + double_well(pv.u) / eps;
                acc.add(w * density * det.abs());
            }
            None => failure = Some(Error::Domain("singular flow Jacobian".into())),
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(acc.value()),
    }
}

/// `2σ H^{N-1}(Φ_t(Γ))` from the Gram determinant of the pushed-forward
/// tangent vectors.
pub fn deformed_area_energy<const N: usize>(surface: &Hypersurface<N>, flow: &DeformationFlow<N>, t: f64) -> Result<f64> {
    flow.check_t(t)?;
    let mut acc = CompensatedSum::new();
    for node in surface.nodes().iter() {
        let frame = &node.frame;
        let f = flow_jacobian_from(&jet_on_surface(&flow.eta, frame), &jet_on_surface(&flow.zeta, frame), t);
        let pushed: Vec<Vector<N>> = frame.tangents.iter().map(|tau| f * tau).collect();
        let k = pushed.len();
        let gram_det = match k {
            1 => pushed[0].norm_squared(),
            2 => {
                let (a, b, c) = (pushed[0].norm_squared(), pushed[0].dot(&pushed[1]), pushed[1].norm_squared());
                a * c - b * b
            }
            _ => unreachable!("hypersurfaces of R^2 and R^3 only"),
        };
        acc.add(node.measure_weight * gram_det.max(0.0).sqrt());
    }
    Ok(SURFACE_TENSION * acc.value())
}

/// Derivative order for `fd_derivative`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FdOrder {
    First,
    Second,
}

impl FdOrder {
    fn power(self) -> i32 {
        match self {
            FdOrder::First => 1,
            FdOrder::Second => 2,
        }
    }
}

/// A finite-difference derivative estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FDEstimate {
    /// Richardson-extrapolated value from steps `h`, `h/2`, `h/4`.
    pub value: f64,
    /// Base step `h`.
    pub step: f64,
    /// Plain central differences at `h`, `h/2`, `h/4`.
    pub differences: [f64; 3],
    /// Observed convergence order of the plain central differences, or
    /// `None` when their changes are at rounding level.
    pub order_estimate: Option<f64>,
}

/// Default base step as a fraction of `t_max`.
pub const FD_STEP_FRACTION: f64 = 0.1;

/// Central first or second difference with two Richardson levels.
pub fn fd_derivative(g: impl Fn(f64) -> Result<f64>, order: FdOrder, base_step: f64) -> Result<FDEstimate> {
    if !(base_step > 0.0 && base_step.is_finite()) {
        return Err(Error::Domain(format!("finite-difference step must be positive, got {base_step}")));
    }
    let finite = |v: f64| if v.is_finite() { Ok(v) } else { Err(Error::NonFinite("finite-difference sample")) };
    let g0 = finite(g(0.0)?)?;
    let mut scale = g0.abs();
    let mut diffs = [0.0; 3];
    for (k, d) in diffs.iter_mut().enumerate() {
        let h = base_step / f64::powi(2.0, k as i32);
        let (gp, gm) = (finite(g(h)?)?, finite(g(-h)?)?);
        scale = scale.max(gp.abs()).max(gm.abs());
        *d = match order {
            FdOrder::First => (gp - gm) / (2.0 * h),
            FdOrder::Second => (gp - 2.0 * g0 + gm) / (h * h),
        };
    }
    let r1 = [(4.0 * diffs[1] - diffs[0]) / 3.0, (4.0 * diffs[2] - diffs[1]) / 3.0];
    let value = (16.0 * r1[1] - r1[0]) / 15.0;
    let (d01, d12) = ((diffs[0] - diffs[1]).abs(), (diffs[1] - diffs[2]).abs());
    let noise = 1e3 * f64::EPSILON * scale.max(f64::MIN_POSITIVE) / (base_step / 4.0).powi(order.power());
    let order_estimate = if d01.max(d12) <= noise || d12 == 0.0 { None } else { Some((d01 / d12).log2()) };
    Ok(FDEstimate { value, step: base_step, differences: diffs, order_estimate })
}

/// `x ↦ -∇u(x)·V(x)`, the velocity of `u∘(id + tV)^{-1}` at `t = 0`.
pub fn material_velocity<'a, const N: usize>(
    field: &'a PhaseField<N>,
    v: &'a AmbientVectorField<N>,
) -> impl Fn(&Vector<N>) -> f64 + 'a {
    move |x| -field.gradient(x).dot(&v.value(x))
}

/// `ε ∫ (∇u·V)²`, whose limit for `V = f n` is `2σ ∫_Γ f²`.
pub fn injectivity_pairing<const N: usize>(field: &PhaseField<N>, v: &AmbientVectorField<N>) -> f64 {
    let eps = field.epsilon();
    crate::geometry::tube_integral(field.quadrature(), |p| {
        let c = field.gradient_in_tube(p).dot(&v.jet_in_tube(p).value);
        eps * c * c
    })
}

/// `[Q_ε(V+W) - Q_ε(V-W)]/4` with `Q_ε(V) = δ²E_ε(u, V, 0)`.
pub fn polarized_form<const N: usize>(field: &PhaseField<N>, v: &AmbientVectorField<N>, w: &AmbientVectorField<N>) -> f64 {
    let zero = AmbientVectorField::Zero;
    let plus = ac_second_inner_variation(field, &AmbientVectorField::sum(v, w), &zero).value;
    let minus = ac_second_inner_variation(field, &AmbientVectorField::difference(v, w), &zero).value;
    0.25 * (plus - minus)
}

/// `[Q(V+W) - Q(V-W)]/4` with `Q(V) = δ²E(Γ, V, 0)`.
pub fn sharp_polarized_form<const N: usize>(
    surface: &Hypersurface<N>,
    v: &AmbientVectorField<N>,
    w: &AmbientVectorField<N>,
) -> f64 {
    let zero = AmbientVectorField::Zero;
    let plus = second_inner_variation(surface, &AmbientVectorField::sum(v, w), &zero).value;
    let minus = second_inner_variation(surface, &AmbientVectorField::difference(v, w), &zero).value;
    0.25 * (plus - minus)
}
