use std::fmt;
use std::sync::Arc;

use super::{Hypersurface, Params, SurfaceFrame};
use crate::field::{AmbientVectorField, FieldJet};
use crate::numerics::{Matrix, Vector};

/// Value and parameter gradient of a scalar function on a surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceValue {
    pub value: f64,
    pub param_gradient: Params,
}

type SurfaceFn<const N: usize> = dyn Fn(&SurfaceFrame<N>) -> SurfaceValue + Send + Sync;

/// A `C^1` scalar function on a hypersurface, evaluated from a frame.
#[derive(Clone)]
pub struct ScalarOnSurface<const N: usize> {
    eval: Arc<SurfaceFn<N>>,
}

impl<const N: usize> fmt::Debug for ScalarOnSurface<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ScalarOnSurface")
    }
}

impl<const N: usize> ScalarOnSurface<N> {
    pub fn new(eval: impl Fn(&SurfaceFrame<N>) -> SurfaceValue + Send + Sync + 'static) -> Self {
        ScalarOnSurface { eval: Arc::new(eval) }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| SurfaceValue { value: c, param_gradient: [0.0; 2] })
    }

    /// `cos(k p_0)` in the first chart parameter.
    pub fn cos_mode(k: u32) -> Self {
        let k = k as f64;
        Self::new(move |f| {
            let (s, c) = (k * f.params[0]).sin_cos();
            SurfaceValue { value: c, param_gradient: [-k * s, 0.0] }
        })
    }

    /// `sin(k p_0)` in the first chart parameter.
    pub fn sin_mode(k: u32) -> Self {
        let k = k as f64;
        Self::new(move |f| {
            let (s, c) = (k * f.params[0]).sin_cos();
            SurfaceValue { value: s, param_gradient: [k * c, 0.0] }
        })
    }

    pub fn eval(&self, frame: &SurfaceFrame<N>) -> SurfaceValue {
        (self.eval)(frame)
    }

    pub fn value(&self, frame: &SurfaceFrame<N>) -> f64 {
        self.eval(frame).value
    }

    /// Tangential gradient `∇^Γ f` as an ambient vector.
    pub fn tangential_gradient(&self, frame: &SurfaceFrame<N>) -> Vector<N> {
        frame.tangential_gradient(&self.eval(frame).param_gradient)
    }

    /// `a f + b g`.
    pub fn combine(a: f64, f: &Self, b: f64, g: &Self) -> Self {
        let (f, g) = (f.clone(), g.clone());
        Self::new(move |frame| {
            let u = f.eval(frame);
            let v = g.eval(frame);
            SurfaceValue {
                value: a * u.value + b * v.value,
                param_gradient: [
                    a * u.param_gradient[0] + b * v.param_gradient[0],
                    a * u.param_gradient[1] + b * v.param_gradient[1],
                ],
            }
        })
    }
}

/// The field `χ(s) f(y) n(y)` at `x = y + s n(y)`: constant along normals
/// inside `|s| <= 0.9 reach`, cut off by a quintic smoothstep before the reach.
#[derive(Debug, Clone)]
pub struct NormalExtension<const N: usize> {
    surface: Hypersurface<N>,
    profile: ScalarOnSurface<N>,
    inner: f64,
    outer: f64,
}

impl<const N: usize> NormalExtension<N> {
    pub const INNER_FRACTION: f64 = 0.9;
    pub const OUTER_FRACTION: f64 = 0.98;

    pub fn new(surface: &Hypersurface<N>, profile: ScalarOnSurface<N>) -> Self {
        let reach = surface.reach();
        NormalExtension {
            surface: surface.clone(),
            profile,
            inner: Self::INNER_FRACTION * reach,
            outer: Self::OUTER_FRACTION * reach,
        }
    }

    pub fn profile(&self) -> &ScalarOnSurface<N> {
        &self.profile
    }

    pub fn surface(&self) -> &Hypersurface<N> {
        &self.surface
    }

    /// Cutoff `χ(s)` and its derivative.
    pub fn cutoff(&self, s: f64) -> (f64, f64) {
        let a = s.abs();
        if a <= self.inner {
            return (1.0, 0.0);
        }
        if a >= self.outer {
            return (0.0, 0.0);
        }
        let width = self.outer - self.inner;
        let t = (a - self.inner) / width;
        let step = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
        let dstep = 30.0 * t * t * (1.0 - t) * (1.0 - t);
        (1.0 - step, -dstep / width * s.signum())
    }

    /// Jet at `y + s n(y)` given the foot frame.
    pub fn jet_in_tube(&self, frame: &SurfaceFrame<N>, s: f64) -> FieldJet<N> {
        let (chi, dchi) = self.cutoff(s);
        if chi == 0.0 && dchi == 0.0 {
            return FieldJet::zero();
        }
        let sv = self.profile.eval(frame);
        let f = sv.value;
        let grad_gamma = frame.tangential_gradient(&sv.param_gradient);
        let n = frame.normal;
        // ∇h for h = χ(s) f(π(x)), and ∇n in the principal basis.
        let mut grad_h = n * (dchi * f);
        let mut grad_n = Matrix::<N>::zeros();
        for (e, &k) in frame.tangents.iter().zip(&frame.principal_curvatures) {
            let c = 1.0 / (1.0 + s * k);
            grad_h += e * (chi * grad_gamma.dot(e) * c);
            grad_n += e * e.transpose() * (k * c);
        }
        FieldJet {
            value: n * (chi * f),
            jacobian: n * grad_h.transpose() + grad_n * (chi * f),
        }
    }

    /// Jet at an arbitrary ambient point; zero where the projection is undefined
    /// (such points lie outside the cutoff support).
    pub fn jet_at(&self, x: &Vector<N>) -> FieldJet<N> {
        match self.surface.signed_distance(x) {
            Ok((s, params)) if s.abs() < self.outer => match self.surface.frame_at(&params) {
                Ok(frame) => self.jet_in_tube(&frame, s),
                Err(_) => FieldJet::zero(),
            },
            _ => FieldJet::zero(),
        }
    }
}

/// Extension `η̃` of `f n` off the surface with `(n, n·∇η̃) = 0` in the inner tube.
pub fn normal_extension<const N: usize>(surface: &Hypersurface<N>, f: ScalarOnSurface<N>) -> AmbientVectorField<N> {
    AmbientVectorField::NormalExtension(NormalExtension::new(surface, f))
}
