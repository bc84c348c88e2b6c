use acvar_core::deformation::{material_velocity, polarized_form};
use acvar_core::field::{AmbientVectorField, PolynomialField};
use acvar_core::geometry::{normal_extension, Hypersurface, ScalarOnSurface};
use acvar_core::numerics::Vector;
use acvar_core::phase_field::PhaseField;
use acvar_core::sharp::{discrepancy, predicted_limit, second_inner_variation};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::sync::OnceLock;

fn circle() -> &'static Hypersurface<2> {
    static C: OnceLock<Hypersurface<2>> = OnceLock::new();
    C.get_or_init(|| Hypersurface::circle(0.5, [0.0; 2]).unwrap())
}

fn ellipse() -> &'static Hypersurface<2> {
    static E: OnceLock<Hypersurface<2>> = OnceLock::new();
    E.get_or_init(|| Hypersurface::ellipse(0.6, 0.4, [0.1, -0.2]).unwrap())
}

fn torus() -> &'static Hypersurface<3> {
    static T: OnceLock<Hypersurface<3>> = OnceLock::new();
    T.get_or_init(|| Hypersurface::torus(1.0, 0.3, [0.0; 3]).unwrap())
}

fn sphere() -> &'static Hypersurface<3> {
    static S: OnceLock<Hypersurface<3>> = OnceLock::new();
    S.get_or_init(|| Hypersurface::sphere(0.5, [0.0, 0.2, 0.0]).unwrap())
}

fn single_layer() -> &'static PhaseField<2> {
    static F: OnceLock<PhaseField<2>> = OnceLock::new();
    F.get_or_init(|| PhaseField::single(circle(), 0.02).unwrap())
}

fn poly2(seed: u64) -> AmbientVectorField<2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    AmbientVectorField::Polynomial(PolynomialField::<2>::random(3, 1.0, &mut rng).unwrap())
}

fn poly3(seed: u64) -> AmbientVectorField<3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    AmbientVectorField::Polynomial(PolynomialField::<3>::random(3, 1.0, &mut rng).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn frames_are_orthonormal(u in 0.0..2.0 * PI, v in 0.0..2.0 * PI, theta in 0.01..PI - 0.01) {
        let planar = [ellipse().frame_at(&[u, 0.0]).unwrap(), circle().frame_at(&[u, 0.0]).unwrap()];
        for f in &planar {
            prop_assert!(f.orthonormality_residual() < 1e-12);
        }
        let spatial = [torus().frame_at(&[u, v]).unwrap(), sphere().frame_at(&[theta, v]).unwrap()];
        for f in &spatial {
            prop_assert!(f.orthonormality_residual() < 1e-12);
            let a = f.shape_operator();
            prop_assert!((&a - a.transpose()).norm() < 1e-12);
        }
    }

    #[test]
    fn signed_distance_round_trips(u in 0.0..2.0 * PI, v in 0.0..2.0 * PI, frac in -0.9..0.9f64) {
        let e = ellipse();
        let f = e.frame_at(&[u, 0.0]).unwrap();
        let s = frac * e.reach();
        let (d, foot) = e.signed_distance(&(f.point + f.normal * s)).unwrap();
        prop_assert!((d - s).abs() < 1e-9);
        prop_assert!((e.chart_point(&foot) - f.point).norm() < 1e-9);

        let t = torus();
        let f = t.frame_at(&[u, v]).unwrap();
        let s = frac * t.reach();
        let (d, foot) = t.signed_distance(&(f.point + f.normal * s)).unwrap();
        prop_assert!((d - s).abs() < 1e-9);
        prop_assert!((t.chart_point(&foot) - f.point).norm() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn discrepancy_is_nonnegative(seed in any::<u64>()) {
        prop_assert!(discrepancy(ellipse(), &poly2(seed)) >= -1e-12);
        prop_assert!(discrepancy(sphere(), &poly3(seed)) >= -1e-12);
    }

    #[test]
    fn predicted_limit_is_linear_in_multiplicity(seed in any::<u64>(), m in 1u32..6) {
        let (eta, zeta) = (poly2(seed), poly2(seed.wrapping_add(1)));
        let one = predicted_limit(ellipse(), &eta, &zeta, 1).unwrap();
        let many = predicted_limit(ellipse(), &eta, &zeta, m).unwrap();
        prop_assert!((many - m as f64 * one).abs() < 1e-12 * one.abs().max(1.0) * m as f64);
    }

    #[test]
    fn second_variation_is_affine_in_zeta(seed in any::<u64>()) {
        let (eta, z1, z2) = (poly2(seed), poly2(seed ^ 1), poly2(seed ^ 2));
        let e = ellipse();
        let zero = AmbientVectorField::Zero;
        let both = second_inner_variation(e, &eta, &AmbientVectorField::sum(&z1, &z2)).value;
        let split = second_inner_variation(e, &eta, &z1).value + second_inner_variation(e, &eta, &z2).value
            - second_inner_variation(e, &eta, &zero).value;
        prop_assert!((both - split).abs() < 1e-10 * both.abs().max(1.0));
    }

    #[test]
    fn material_velocity_is_linear(seed in any::<u64>(), a in -2.0..2.0f64, b in -2.0..2.0f64,
                                   x0 in -0.6..0.6f64, x1 in -0.6..0.6f64) {
        let field = single_layer();
        let (v, w) = (poly2(seed), poly2(seed ^ 7));
        let combined = AmbientVectorField::Combination(vec![(a, v.clone()), (b, w.clone())]);
        let x = Vector::<2>::new(x0, x1);
        let lhs = material_velocity(field, &combined)(&x);
        let rhs = a * material_velocity(field, &v)(&x) + b * material_velocity(field, &w)(&x);
        prop_assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn polarized_form_is_bilinear(k1 in 0u32..4, k2 in 0u32..4, k3 in 1u32..4, a in -2.0..2.0f64) {
        let c = circle();
        let field = single_layer();
        let ext = |f: ScalarOnSurface<2>| normal_extension(c, f);
        let v = ext(ScalarOnSurface::cos_mode(k1));
        let w1 = ext(ScalarOnSurface::cos_mode(k2));
        let w2 = ext(ScalarOnSurface::sin_mode(k3));
        let combined = AmbientVectorField::Combination(vec![(a, w1.clone()), (1.0, w2.clone())]);
        let lhs = polarized_form(field, &v, &combined);
        let rhs = a * polarized_form(field, &v, &w1) + polarized_form(field, &v, &w2);
        prop_assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0), "{} vs {}", lhs, rhs);
        prop_assert!((polarized_form(field, &v, &w1) - polarized_form(field, &w1, &v)).abs() < 1e-10);
    }
}
