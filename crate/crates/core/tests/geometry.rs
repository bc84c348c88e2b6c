use std::f64::consts::PI;

use acvar_core::field::AmbientVectorField;
use acvar_core::geometry::{
    normal_extension, tube_integral, Hypersurface, NormalRule, Resolution, ScalarOnSurface, SurfaceKind,
    TubeQuadrature,
};
use acvar_core::numerics::Vector;
use acvar_core::Error;

/// Ellipse perimeters `4a E(1 - b²/a²)`, frozen from a 30-digit evaluation
/// that agrees with direct adaptive quadrature of the arc length.
const ELLIPSE_2_1_PERIMETER: f64 = 9.688_448_220_547_676;
const ELLIPSE_06_04_PERIMETER: f64 = 3.173_087_917_858_118;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn unit_circle_frame() {
    let c = Hypersurface::circle(1.0, [0.0; 2]).unwrap();
    let f = c.frame_at(&[0.0, 0.0]).unwrap();
    assert!(close(f.point[0], 1.0, 1e-15) && close(f.point[1], 0.0, 1e-15));
    assert!(close(f.normal[0], 1.0, 1e-15) && close(f.normal[1], 0.0, 1e-15));
    assert!(close(f.tangents[0][1].abs(), 1.0, 1e-15));
    assert!(close(f.principal_curvatures[0].abs(), 1.0, 1e-15));
    assert!(close(f.area_element, 1.0, 1e-15));
}

#[test]
fn sphere_shape_operator() {
    let s = Hypersurface::sphere(0.5, [0.0; 3]).unwrap();
    let f = s.frame_at(&[1.1, 0.7]).unwrap();
    assert!(close(f.normal.norm(), 1.0, 1e-14));
    let a = f.shape_operator();
    assert!(close(a[(0, 0)], 2.0, 1e-10) && close(a[(1, 1)], 2.0, 1e-10) && a[(0, 1)].abs() < 1e-10);
}

#[test]
fn ellipse_curvature_closed_form() {
    let e = Hypersurface::ellipse(2.0, 1.0, [0.0; 2]).unwrap();
    for theta in [0.0, 0.4, 1.3, 2.9] {
        let f = e.frame_at(&[theta, 0.0]).unwrap();
        let (s, c) = f64::sin_cos(theta);
        let kappa = 2.0 / (4.0 * s * s + c * c).powf(1.5);
        assert!(close(f.principal_curvatures[0], kappa, 1e-12), "{theta}");
    }
    assert!(close(e.frame_at(&[0.0, 0.0]).unwrap().principal_curvatures[0], 2.0, 1e-14));
}

#[test]
fn surface_integrals() {
    let c = Hypersurface::circle(0.5, [0.0; 2]).unwrap();
    assert!(close(c.surface_integral(|_| 1.0), PI, 1e-12));
    assert!(c.surface_integral(|f| f.point[0]).abs() < 1e-12);
    let s = Hypersurface::sphere(0.5, [0.0; 3]).unwrap();
    assert!(close(s.surface_integral(|_| 1.0), PI, 1e-10));
}

#[test]
fn closed_form_measures() {
    let shapes: Vec<(Box<dyn Fn() -> f64>, f64)> = vec![
        (Box::new(|| Hypersurface::circle(0.7, [0.1, -0.2]).unwrap().measure()), 2.0 * PI * 0.7),
        (Box::new(|| Hypersurface::sphere(0.8, [0.0, 0.3, 0.0]).unwrap().measure()), 4.0 * PI * 0.64),
        (Box::new(|| Hypersurface::torus(1.0, 0.3, [0.0; 3]).unwrap().measure()), 4.0 * PI * PI * 0.3),
        (Box::new(|| Hypersurface::ellipse(2.0, 1.0, [0.0; 2]).unwrap().measure()), ELLIPSE_2_1_PERIMETER),
        (Box::new(|| Hypersurface::ellipse(0.6, 0.4, [0.0; 2]).unwrap().measure()), ELLIPSE_06_04_PERIMETER),
    ];
    for (measure, exact) in shapes {
        assert!(((measure() - exact) / exact).abs() < 1e-8, "{} vs {exact}", measure());
    }
}

#[test]
fn reach_values() {
    assert_eq!(Hypersurface::circle(0.5, [0.0; 2]).unwrap().reach(), 0.5);
    assert_eq!(Hypersurface::sphere(0.3, [0.0; 3]).unwrap().reach(), 0.3);
    assert_eq!(Hypersurface::ellipse(2.0, 1.0, [0.0; 2]).unwrap().reach(), 0.5);
    assert_eq!(Hypersurface::torus(1.0, 0.25, [0.0; 3]).unwrap().reach(), 0.25);
}

#[test]
fn signed_distance_examples() {
    let c = Hypersurface::circle(0.5, [0.0; 2]).unwrap();
    let (s, foot) = c.signed_distance(&Vector::<2>::new(0.6, 0.0)).unwrap();
    assert!(close(s, 0.1, 1e-14));
    let p = c.chart_point(&foot);
    assert!(close(p[0], 0.5, 1e-14) && p[1].abs() < 1e-14);

    let sp = Hypersurface::sphere(0.5, [0.0; 3]).unwrap();
    let (s, _) = sp.signed_distance(&Vector::<3>::new(0.0, 0.0, 0.45)).unwrap();
    assert!(close(s, -0.05, 1e-14));

    let e = Hypersurface::ellipse(2.0, 1.0, [0.0; 2]).unwrap();
    let (s, foot) = e.signed_distance(&Vector::<2>::new(2.2, 0.0)).unwrap();
    assert!(close(s, 0.2, 1e-12));
    let p = e.chart_point(&foot);
    assert!(close(p[0], 2.0, 1e-12) && p[1].abs() < 1e-12);
}

#[test]
fn ellipse_distance_matches_dense_scan() {
    let e = Hypersurface::ellipse(2.0, 1.0, [0.0; 2]).unwrap();
    for x in [Vector::<2>::new(1.2, 0.95), Vector::<2>::new(-0.4, -1.2), Vector::<2>::new(1.9, -0.3)] {
        let (s, _) = e.signed_distance(&x).unwrap();
        let n = 200_000;
        let scan = (0..n)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64;
                (Vector::<2>::new(2.0 * t.cos(), t.sin()) - x).norm()
            })
            .fold(f64::INFINITY, f64::min);
        assert!(close(s.abs(), scan, 1e-9), "{s} vs {scan}");
    }
}

#[test]
fn outside_tube_is_rejected() {
    let c = Hypersurface::circle(0.5, [0.0; 2]).unwrap();
    assert!(matches!(c.signed_distance(&Vector::<2>::new(0.0, 0.0)), Err(Error::OutOfTube { .. })));
    assert!(c.signed_distance(&Vector::<2>::new(1.2, 0.0)).is_err());
}

#[test]
fn annulus_area_and_jacobian_cancellation() {
    let c = Hypersurface::circle(0.5, [0.0; 2]).unwrap();
    let q = TubeQuadrature::new(&c, 0.1, 129, NormalRule::GaussLegendre).unwrap();
    assert!(close(tube_integral(&q, |_| 1.0), 0.2 * PI, 1e-10));
    assert!(close(tube_integral(&q, |p| 1.0 / p.frame.tube_jacobian(p.s)), 0.2 * PI, 1e-10));
    assert!(tube_integral(&q, |p| p.s.powi(3) / p.frame.tube_jacobian(p.s)).abs() < 1e-12);
    assert!(TubeQuadrature::new(&c, 0.5, 33, NormalRule::Trapezoid).is_err());
}

#[test]
fn tube_integrals_factor_on_constant_curvature() {
    let s = Hypersurface::with_resolution(SurfaceKind::Sphere { radius: 0.5, center: [0.0; 3] }, Resolution::spatial(32, 64))
        .unwrap();
    let q = TubeQuadrature::new(&s, 0.2, 129, NormalRule::GaussLegendre).unwrap();
    let g = |t: f64| (-t * t * 30.0).exp();
    let h = |p: &Vector<3>| 1.0 + p[2] * p[2];
    let full = tube_integral(&q, |p| g(p.s) * h(&p.frame.point));
    let moment: f64 = q.normal_nodes().iter().map(|(t, w)| w * g(t) * (1.0 + 2.0 * t).powi(2)).sum();
    let surface = s.surface_integral(|f| h(&f.point));
    assert!(((full - moment * surface) / full).abs() < 1e-12);
}

#[test]
fn normal_extension_examples() {
    let c = Hypersurface::circle(0.5, [0.0; 2]).unwrap();
    let one = normal_extension(&c, ScalarOnSurface::constant(1.0));
    let x = Vector::<2>::new(0.55, 0.0);
    let jet = one.jet_at(&x);
    assert!(close(jet.value[0], 1.0, 1e-12) && jet.value[1].abs() < 1e-12);
    let n = Vector::<2>::new(1.0, 0.0);
    assert!(n.dot(&(jet.jacobian * n)).abs() < 1e-10);
    let on_gamma = one.jet_at(&Vector::<2>::new(0.0, 0.5));
    assert!(close(on_gamma.divergence(), 2.0, 1e-10));

    let cos = normal_extension(&c, ScalarOnSurface::cos_mode(1));
    let v = cos.value(&Vector::<2>::new(0.5, 0.0));
    assert!(close(v[0], 1.0, 1e-12) && v[1].abs() < 1e-12);
}

#[test]
fn normal_extension_has_no_normal_stretch_in_the_inner_tube() {
    let t = Hypersurface::torus(1.0, 0.3, [0.0; 3]).unwrap();
    let f = ScalarOnSurface::new(|fr| {
        let (s, c) = fr.params[1].sin_cos();
        acvar_core::geometry::SurfaceValue { value: 1.0 + 0.5 * c, param_gradient: [0.0, -0.5 * s] }
    });
    let ext = normal_extension(&t, f);
    let AmbientVectorField::NormalExtension(inner) = &ext else { panic!("family") };
    for (k, node) in t.nodes().iter().enumerate().step_by(97).take(40) {
        let s = 0.9 * t.reach() * ((k % 7) as f64 / 3.0 - 1.0);
        let jet = inner.jet_in_tube(&node.frame, s);
        let n = node.frame.normal;
        assert!(n.dot(&(jet.jacobian * n)).abs() < 1e-10);
        let x = node.frame.point + n * s;
        let ambient = ext.jet_at(&x);
        assert!((ambient.jacobian - jet.jacobian).norm() < 1e-8);
    }
}
