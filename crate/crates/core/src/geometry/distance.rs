use std::f64::consts::PI;

use super::{Hypersurface, Params, SurfaceKind};
use crate::error::{Error, Result};
use crate::numerics::Vector;

const SCAN_SAMPLES: usize = 512;
const MAX_NEWTON: usize = 50;
const NEWTON_TOL: f64 = 1e-12;

pub(super) fn signed_distance<const N: usize>(surface: &Hypersurface<N>, point: &Vector<N>) -> Result<(f64, Params)> {
    let reach = surface.reach();
    let c = surface.kind.center();
    let q: Vec<f64> = (0..N).map(|i| point[i] - c[i]).collect();
    let (s, params) = match surface.kind {
        SurfaceKind::Circle { radius, .. } => {
            let r = q[0].hypot(q[1]);
            (r - radius, [wrap_angle(q[1].atan2(q[0])), 0.0])
        }
        SurfaceKind::Sphere { radius, .. } => {
            let r = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2]).sqrt();
            let theta = if r > 0.0 { (q[2] / r).clamp(-1.0, 1.0).acos() } else { 0.0 };
            (r - radius, [theta, wrap_angle(q[1].atan2(q[0]))])
        }
        SurfaceKind::Torus { r_major, r_minor, .. } => {
            let rho = q[0].hypot(q[1]);
            let d = (rho - r_major).hypot(q[2]);
            (d - r_minor, [wrap_angle(q[1].atan2(q[0])), wrap_angle(q[2].atan2(rho - r_major))])
        }
        SurfaceKind::Ellipse { semi_axes: [a, b], .. } => {
            let theta = ellipse_closest(a, b, q[0], q[1])?;
            let params = [theta, 0.0];
            let frame = surface.frame_at(&params)?;
            ((point - frame.point).dot(&frame.normal), params)
        }
    };
    if !(s.abs() < reach) {
        return Err(Error::OutOfTube { signed_distance: s, reach });
    }
    Ok((s, params))
}

fn wrap_angle(t: f64) -> f64 {
    if t < 0.0 {
        t + 2.0 * PI
    } else {
        t
    }
}

/// Foot parameter of the closest point on `(a cos θ, b sin θ)` to `(px, py)`.
///
/// Dense scan for the starting value, then Newton on
/// `F(θ) = x'(θ)·(x(θ) - p)`.
fn ellipse_closest(a: f64, b: f64, px: f64, py: f64) -> Result<f64> {
    let dist2 = |t: f64| (a * t.cos() - px).powi(2) + (b * t.sin() - py).powi(2);
    let mut theta = (0..SCAN_SAMPLES)
        .map(|k| 2.0 * PI * k as f64 / SCAN_SAMPLES as f64)
        .min_by(|&s, &t| dist2(s).total_cmp(&dist2(t)))
        .unwrap_or(0.0);
    for _ in 0..MAX_NEWTON {
        let (s, c) = theta.sin_cos();
        let (dx, dy) = (-a * s, b * c);
        let (ex, ey) = (a * c - px, b * s - py);
        let f = dx * ex + dy * ey;
        let df = dx * dx + dy * dy + (-a * c) * ex + (-b * s) * ey;
        if !(df > 0.0) {
            break;
        }
        let step = f / df;
        theta -= step;
        if step.abs() < NEWTON_TOL {
            return Ok(wrap_angle(theta.rem_euclid(2.0 * PI)));
        }
    }
    Err(Error::ClosestPoint { iterations: MAX_NEWTON })
}
