use std::f64::consts::PI;

use acvar_core::field::{AmbientVectorField, PolynomialField};
use acvar_core::geometry::{normal_extension, Hypersurface, Resolution, ScalarOnSurface, SurfaceKind};
use acvar_core::numerics::{closed_trapezoid, Vector};
use acvar_core::phase_field::{
    ac_energy, ac_first_inner_variation, ac_second_inner_variation, double_well, energy_measure_pairing,
    equipartition_defect, optimal_profile, stress_pairing, Layer, PhaseField, TubeOptions, DIFFUSE_TERMS,
};
use acvar_core::sharp::{predicted_limit, second_inner_variation, discrepancy};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FOUR_PI_THIRDS: f64 = 4.0 * PI / 3.0;

fn circle() -> Hypersurface<2> {
    Hypersurface::circle(0.5, [0.0; 2]).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn optimal_profile_examples() {
    assert_eq!(optimal_profile(0.0), (0.0, 1.0));
    assert_eq!(optimal_profile(50.0), (1.0, 0.0));
    assert_eq!(optimal_profile(-50.0), (-1.0, 0.0));
    let (q, dq) = optimal_profile(0.7);
    assert!((dq - (2.0 * double_well(q)).sqrt()).abs() < 1e-15);
    let rule = closed_trapezoid(4001, -20.0, 20.0);
    let integral: f64 = rule.iter().map(|(s, w)| w * optimal_profile(s).1.powi(2)).sum();
    assert!((integral - 4.0 / 3.0).abs() < 1e-12);
}

#[test]
fn single_layer_values() {
    let f = PhaseField::single(&circle(), 0.02).unwrap();
    assert!(f.value(&Vector::<2>::new(0.5, 0.0)).abs() < 1e-15);
    assert!((f.value(&Vector::<2>::new(0.6, 0.0)) - 5.0f64.tanh()).abs() < 1e-14);
    assert_eq!(f.far_values(), (-1.0, 1.0));
    assert_eq!(f.value(&Vector::<2>::new(2.0, 0.0)), 1.0);
    assert_eq!(f.gradient(&Vector::<2>::new(0.0, 0.0)), Vector::<2>::zeros());
}

#[test]
fn two_layer_values() {
    let eps: f64 = 0.005;
    let f = PhaseField::with_multiplicity(&circle(), eps, 2, TubeOptions::default()).unwrap();
    let a = eps.sqrt();
    assert_eq!(f.layers(), &[Layer { offset: -a, sign: 1 }, Layer { offset: a, sign: -1 }]);
    let on_gamma = f.value(&Vector::<2>::new(0.5, 0.0));
    assert!((on_gamma - (2.0 * (a / eps).tanh() - 1.0)).abs() < 1e-14);
    assert_eq!(f.far_values(), (-1.0, -1.0));
}

#[test]
fn offset_layer_zero_set_is_parallel() {
    let c = circle();
    let f = PhaseField::layered(&c, 0.01, vec![Layer { offset: 0.03, sign: 1 }], TubeOptions::default()).unwrap();
    for theta in [0.0f64, 1.0, 2.5] {
        let x = Vector::<2>::new(theta.cos(), theta.sin()) * 0.53;
        assert!(f.value(&x).abs() < 1e-14);
    }
}

#[test]
fn invalid_layers_are_rejected() {
    let c = circle();
    let o = TubeOptions::default();
    assert!(PhaseField::layered(&c, 0.01, vec![Layer { offset: 0.1, sign: 1 }, Layer { offset: 0.0, sign: -1 }], o).is_err());
    assert!(PhaseField::layered(&c, 0.01, vec![Layer { offset: 0.0, sign: 1 }, Layer { offset: 0.1, sign: 1 }], o).is_err());
    assert!(PhaseField::layered(&c, 0.01, vec![Layer { offset: 0.0, sign: 2 }], o).is_err());
    assert!(PhaseField::layered(&c, 0.05, vec![Layer { offset: 0.0, sign: 1 }], o).is_err());
    assert!(PhaseField::single(&c, -0.01).is_err());
}

#[test]
fn energy_examples() {
    let c = circle();
    assert!((ac_energy(&PhaseField::single(&c, 0.01).unwrap()) - FOUR_PI_THIRDS).abs() < 0.01);
    assert_eq!(ac_energy(&PhaseField::uniform(&c, 0.01, TubeOptions::default()).unwrap()), 0.0);
    let two = PhaseField::with_multiplicity(&c, 0.005, 2, TubeOptions::default()).unwrap();
    assert!(rel(ac_energy(&two), 2.0 * FOUR_PI_THIRDS) < 0.02);
}

#[test]
fn energy_rate_on_sphere() {
    let s = Hypersurface::<3>::with_resolution(SurfaceKind::Sphere { radius: 0.5, center: [0.0; 3] }, Resolution::spatial(32, 64))
        .unwrap();
    let errors: Vec<f64> = [0.04, 0.02, 0.01]
        .iter()
        .map(|&e| (ac_energy(&PhaseField::single(&s, e).unwrap()) - FOUR_PI_THIRDS).abs())
        .collect();
    for w in errors.windows(2) {
        assert!((w[0] / w[1]).log2() >= 1.0);
    }
}

#[test]
fn first_variation_examples() {
    let c = circle();
    let f = PhaseField::single(&c, 0.01).unwrap();
    assert!(rel(ac_first_inner_variation(&f, &AmbientVectorField::dilation()), FOUR_PI_THIRDS) < 0.01);
    assert!(ac_first_inner_variation(&f, &AmbientVectorField::Constant(Vector::<2>::new(0.4, -0.9))).abs() < 1e-10);
    assert!(ac_first_inner_variation(&f, &AmbientVectorField::planar_rotation(1.3)).abs() < 1e-10);
}

#[test]
fn second_variation_examples() {
    let c = circle();
    let f = PhaseField::single(&c, 0.005).unwrap();
    let x = AmbientVectorField::dilation();
    let zero = AmbientVectorField::Zero;
    let r = ac_second_inner_variation(&f, &x, &zero);
    assert!(rel(r.value, FOUR_PI_THIRDS) < 0.02);
    assert_eq!(r.breakdown.len(), DIFFUSE_TERMS.len());
    assert!(r.consistency_residual() < 1e-12);
    let constant = AmbientVectorField::Constant(Vector::<2>::new(1.0, 0.5));
    assert!(ac_second_inner_variation(&f, &constant, &zero).value.abs() < 1e-10);
    assert!(rel(ac_second_inner_variation(&f, &zero, &x).value, FOUR_PI_THIRDS) < 0.02);
}

#[test]
fn measure_pairing_examples() {
    let c = circle();
    let f = PhaseField::single(&c, 0.01).unwrap();
    assert!((energy_measure_pairing(&f, |_| 1.0) - ac_energy(&f)).abs() < 1e-13);
    assert!(energy_measure_pairing(&f, |x| x[0]).abs() < 1e-8);
    assert!(rel(energy_measure_pairing(&f, |x| x[0] * x[0]), PI / 6.0) < 0.01);
}

#[test]
fn stress_pairing_examples() {
    let c = circle();
    let f = PhaseField::single(&c, 0.01).unwrap();
    assert!(rel(stress_pairing(&f, &AmbientVectorField::dilation()), FOUR_PI_THIRDS) < 0.01);
    assert!(stress_pairing(&f, &AmbientVectorField::planar_rotation(2.0)).abs() < 1e-8);
    let ext = normal_extension(&c, ScalarOnSurface::constant(1.0));
    let sweep: Vec<f64> =
        [0.04, 0.02, 0.01].iter().map(|&e| stress_pairing(&PhaseField::single(&c, e).unwrap(), &ext).abs()).collect();
    assert!(sweep.windows(2).all(|w| w[1] <= w[0] || w[1] < 1e-12), "{sweep:?}");
    assert!(sweep[2] < 1e-8);
}

#[test]
fn equipartition_examples() {
    let c = circle();
    assert!(equipartition_defect(&PhaseField::single(&c, 0.01).unwrap()) < 1e-10);
    assert_eq!(equipartition_defect(&PhaseField::uniform(&c, 0.01, TubeOptions::default()).unwrap()), 0.0);
    let defects: Vec<f64> = [0.02, 0.01, 0.005]
        .iter()
        .map(|&e| equipartition_defect(&PhaseField::with_multiplicity(&c, e, 2, TubeOptions::default()).unwrap()))
        .collect();
    assert!(defects[2] < 1e-3);
    assert!(defects.windows(2).all(|w| w[1] < w[0]), "{defects:?}");
}

#[test]
fn second_variation_tracks_predicted_limit() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let c = circle();
    let pairs = [
        (AmbientVectorField::dilation(), AmbientVectorField::Zero),
        (
            AmbientVectorField::Polynomial(PolynomialField::<2>::random(3, 1.0, &mut rng).unwrap()),
            AmbientVectorField::Polynomial(PolynomialField::<2>::random(2, 1.0, &mut rng).unwrap()),
        ),
        (normal_extension(&c, ScalarOnSurface::cos_mode(2)), AmbientVectorField::dilation()),
    ];
    for (eta, zeta) in &pairs {
        let reference = predicted_limit(&c, eta, zeta, 1).unwrap();
        let errors: Vec<f64> = [0.04, 0.02, 0.01, 0.005]
            .iter()
            .map(|&e| (ac_second_inner_variation(&PhaseField::single(&c, e).unwrap(), eta, zeta).value - reference).abs())
            .collect();
        let scale = reference.abs().max(1.0);
        assert!(errors[3] < 0.02 * scale, "{errors:?}");
        assert!(errors.windows(2).all(|w| w[1] <= w[0] || w[1] < 1e-12 * scale), "{errors:?}");
    }
}

#[test]
fn each_diffuse_term_converges() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let c = circle();
    let eta = AmbientVectorField::Polynomial(PolynomialField::<2>::random(3, 1.0, &mut rng).unwrap());
    let zeta = AmbientVectorField::Polynomial(PolynomialField::<2>::random(3, 1.0, &mut rng).unwrap());
    let reports: Vec<_> = [0.04, 0.02, 0.01, 0.005]
        .iter()
        .map(|&e| ac_second_inner_variation(&PhaseField::single(&c, e).unwrap(), &eta, &zeta))
        .collect();
    for name in DIFFUSE_TERMS {
        let values: Vec<f64> = reports.iter().map(|r| r.term(name).unwrap()).collect();
        let steps: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        assert!(steps.windows(2).all(|w| w[1] < 0.75 * w[0] || w[1] < 1e-12), "{name}: {values:?}");
    }
}

#[test]
fn gap_from_sharp_second_variation() {
    let c = circle();
    let eta = AmbientVectorField::dilation();
    let sharp = second_inner_variation(&c, &eta, &AmbientVectorField::Zero).value;
    let disc = discrepancy(&c, &eta);
    let f = PhaseField::single(&c, 0.0025).unwrap();
    let measured = ac_second_inner_variation(&f, &eta, &AmbientVectorField::Zero).value;
    assert!((measured - sharp).abs() > 0.5 * disc);
}
