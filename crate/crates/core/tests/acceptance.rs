//! Acceptance criteria. Each criterion prints one `PASS` or `FAIL` line and
//! the process exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use acvar_core::deformation::{injectivity_pairing, polarized_form};
use acvar_core::field::AmbientVectorField;
use acvar_core::geometry::{normal_extension, Hypersurface, ScalarOnSurface};
use acvar_core::lab::config::{PLANAR_SCHEDULE, SPATIAL_SCHEDULE};
use acvar_core::lab::config::SurfaceSpec;
use acvar_core::lab::oracle::eta_families;
use acvar_core::lab::{
    algebraic_suites, fit_rate, oracle_matrix, run_experiment, ConvergenceTable, ExperimentConfig, ExperimentKind,
    OracleOptions, RateFit,
};
use acvar_core::phase_field::{
    ac_energy, ac_first_inner_variation, ac_second_inner_variation, equipartition_defect, PhaseField, TubeOptions,
};
use acvar_core::sharp::{
    area_energy, discrepancy, first_inner_variation, jacobi_spectrum, normal_variation_bilinear, predicted_limit,
    second_inner_variation, SpectrumKind, SIGMA, SURFACE_TENSION,
};
use acvar_core::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FOUR_PI_THIRDS: f64 = 4.0 * PI / 3.0;

type Criterion = fn() -> Result<Outcome>;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { passed, detail: detail.into() })
}

fn circle() -> Result<Hypersurface<2>> {
    Hypersurface::circle(0.5, [0.0; 2])
}

fn sphere() -> Result<Hypersurface<3>> {
    Hypersurface::sphere(0.5, [0.0; 3])
}

fn monotone_decreasing(errors: &[f64], floor: f64) -> bool {
    errors.windows(2).all(|w| w[1] <= w[0] || w[1] < floor)
}

fn fmt_list(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.3e}")).collect::<Vec<_>>().join(", ")
}

fn discrepancy_theorem() -> Result<Outcome> {
    let start = Instant::now();
    let c = circle()?;
    let eta = AmbientVectorField::dilation();
    let zero = AmbientVectorField::Zero;
    let reference = predicted_limit(&c, &eta, &zero, 1)?;
    let mut errors = Vec::new();
    for eps in PLANAR_SCHEDULE {
        let measured = ac_second_inner_variation(&PhaseField::single(&c, eps)?, &eta, &zero).value;
        errors.push(((measured - reference) / reference).abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    let reference_ok = (reference - FOUR_PI_THIRDS).abs() < 1e-12;
    let last = *errors.last().unwrap();
    outcome(
        reference_ok && last < 0.02 && monotone_decreasing(&errors, 0.0) && elapsed < 10.0,
        format!("limit {reference:.6}, relative errors [{}], {elapsed:.2} s", fmt_list(&errors)),
    )
}

fn gap_from_sharp_variation() -> Result<Outcome> {
    let c = circle()?;
    let eta = AmbientVectorField::dilation();
    let zero = AmbientVectorField::Zero;
    let sharp = second_inner_variation(&c, &eta, &zero).value;
    let disc = discrepancy(&c, &eta);
    let mut gaps = Vec::new();
    for eps in PLANAR_SCHEDULE {
        let measured = ac_second_inner_variation(&PhaseField::single(&c, eps)?, &eta, &zero).value;
        gaps.push((measured - sharp).abs());
    }
    outcome(
        gaps.iter().all(|&g| g > 0.5 * disc),
        format!("discrepancy {disc:.6}, gaps [{}]", fmt_list(&gaps)),
    )
}

/// Relative error at the final `ε` and fitted rate for energy and first
/// variations with every η family; zero references are measured relative
/// to the energy.
fn energy_and_first_variation_on<const N: usize>(
    surface: &Hypersurface<N>,
    schedule: &[f64],
    rng: &mut ChaCha8Rng,
) -> Result<(bool, String)> {
    let families = eta_families::<N>(rng)?;
    let area = area_energy(surface);
    let mut tables = vec![ConvergenceTable::new("energy", area)];
    tables.extend(families.iter().map(|eta| ConvergenceTable::new(eta.family(), area)));
    for &eps in schedule {
        let field = PhaseField::single(surface, eps)?;
        tables[0].push(eps, ac_energy(&field), area);
        for (table, eta) in tables[1..].iter_mut().zip(&families) {
            table.push(eps, ac_first_inner_variation(&field, eta), first_inner_variation(surface, eta));
        }
    }
    let mut ok = true;
    let mut parts = Vec::new();
    for table in &tables {
        let last = table.last().unwrap();
        let rel = last.abs_err / last.reference.abs().max(if last.reference == 0.0 { area } else { 0.0 });
        let rate = fit_rate(table);
        let rate_ok = match rate {
            RateFit::Rate(r) => r >= 1.0,
            RateFit::Saturated => true,
            RateFit::Insufficient => false,
        };
        ok &= rel < 0.01 && rate_ok;
        let rate_text = rate.value().map_or("exact".to_string(), |r| format!("{r:.2}"));
        parts.push(format!("{} {rel:.1e}/{rate_text}", table.quantity));
    }
    Ok((ok, parts.join(", ")))
}

fn energy_and_first_variation() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (ok2, text2) = energy_and_first_variation_on(&circle()?, &PLANAR_SCHEDULE[..4], &mut rng)?;
    let (ok3, text3) = energy_and_first_variation_on(&sphere()?, &SPATIAL_SCHEDULE, &mut rng)?;
    outcome(ok2 && ok3, format!("circle at 0.01: {text2}; sphere at 0.005: {text3}"))
}

fn fd_oracle() -> Result<Outcome> {
    let rows = oracle_matrix(&OracleOptions::default())?;
    let failures = rows.iter().filter(|r| !r.passed()).count();
    let worst = rows.iter().map(|r| r.rel_err / r.tolerance).fold(0.0, f64::max);
    outcome(failures == 0, format!("{} rows, {failures} failed, worst error/tolerance {worst:.2e}", rows.len()))
}

fn algebraic() -> Result<Outcome> {
    let suites = algebraic_suites(0)?;
    let e2 = &suites.expansions_2d;
    let e3 = &suites.expansions_3d;
    let elapsed = suites.elapsed.as_secs_f64();
    outcome(
        suites.passed() && elapsed < 1.0,
        format!(
            "identity residual max {:.1e}; det slope min {:.3} (2D) / {:.3} (3D) with {} + {} inputs below 2.9; \
             inverse slope min {:.3} / {:.3}; {elapsed:.3} s",
            suites.identities_2d.max_residual().max(suites.identities_3d.max_residual()),
            e2.det_min_slope,
            e3.det_min_slope,
            e2.det_below,
            e3.det_below,
            e2.inverse_min_slope,
            e3.inverse_min_slope,
        ),
    )
}

fn measure_limits() -> Result<Outcome> {
    let mut parts = Vec::new();
    let mut ok = true;
    for spec in [SurfaceSpec::circle(0.5), SurfaceSpec::sphere(0.5)] {
        for kind in [ExperimentKind::Measure, ExperimentKind::Stress] {
            let report = run_experiment(kind, &ExperimentConfig::new(spec.clone()))?;
            let monotone = report.tables.iter().all(|t| {
                let errors: Vec<f64> = t.rows.iter().map(|r| r.abs_err).collect();
                monotone_decreasing(&errors, t.noise_floor())
            });
            let worst = report.tables.iter().filter_map(|t| t.last()).map(|r| r.rel_err).fold(0.0, f64::max);
            ok &= report.passed() && monotone && report.tables.len() >= 10;
            parts.push(format!("{} {}: {} tables, final max rel {worst:.1e}", report.surface, kind.as_str(), report.tables.len()));
        }
    }
    let c = circle()?;
    let single = equipartition_defect(&PhaseField::single(&c, 0.0025)?);
    let double: Vec<f64> = PLANAR_SCHEDULE[1..]
        .iter()
        .map(|&eps| Ok(equipartition_defect(&PhaseField::with_multiplicity(&c, eps, 2, TubeOptions::default())?)))
        .collect::<Result<_>>()?;
    ok &= single < 1e-10 && double.windows(2).all(|w| w[1] < w[0]);
    parts.push(format!("equipartition single {single:.1e}, double [{}]", fmt_list(&double)));
    outcome(ok, parts.join("; "))
}

fn multiplicity_two() -> Result<Outcome> {
    let c = circle()?;
    let eps = 0.0025;
    let field = PhaseField::with_multiplicity(&c, eps, 2, TubeOptions::default())?;
    let ratio = ac_energy(&field) / area_energy(&c);
    let eta = AmbientVectorField::dilation();
    let zero = AmbientVectorField::Zero;
    let limit = predicted_limit(&c, &eta, &zero, 2)?;
    let measured = ac_second_inner_variation(&field, &eta, &zero).value;
    let rel = ((measured - limit) / limit).abs();
    outcome(
        (1.98..=2.02).contains(&ratio) && rel < 0.03 && (limit - 2.0 * FOUR_PI_THIRDS).abs() < 1e-12,
        format!("energy ratio {ratio:.5}, second variation {measured:.5} vs {limit:.5} (rel {rel:.2e})"),
    )
}

fn spectra() -> Result<Outcome> {
    let circle = jacobi_spectrum(SpectrumKind::Circle { radius: 1.0 }, 2)?;
    let sphere = jacobi_spectrum(SpectrumKind::Sphere { radius: 1.0 }, 2)?;
    let expected_circle = [-1.0, 0.0, 0.0, 3.0, 3.0];
    let expected_sphere = [-2.0, 0.0, 0.0, 0.0, 4.0, 4.0, 4.0, 4.0, 4.0];
    let max_dev = |got: &[f64], want: &[f64]| {
        if got.len() != want.len() {
            return f64::INFINITY;
        }
        got.iter().zip(want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max)
    };
    let dc = max_dev(&circle.eigenvalues, &expected_circle);
    let ds = max_dev(&sphere.eigenvalues, &expected_sphere);
    outcome(
        dc < 1e-8 && ds < 1e-8 && (circle.morse_index, circle.nullity) == (1, 2) && (sphere.morse_index, sphere.nullity) == (1, 3),
        format!(
            "circle deviation {dc:.1e} index {} nullity {}; sphere deviation {ds:.1e} index {} nullity {}",
            circle.morse_index, circle.nullity, sphere.morse_index, sphere.nullity
        ),
    )
}

fn polarization() -> Result<Outcome> {
    let c = circle()?;
    let profiles = [ScalarOnSurface::constant(1.0), ScalarOnSurface::cos_mode(1), ScalarOnSurface::sin_mode(1)];
    let fields: Vec<_> = profiles.iter().map(|f| normal_extension(&c, f.clone())).collect();
    let worst_error = |eps: f64| -> Result<f64> {
        let field = PhaseField::single(&c, eps)?;
        let mut worst: f64 = 0.0;
        for (i, v) in fields.iter().enumerate() {
            for (j, w) in fields.iter().enumerate() {
                let sharp = normal_variation_bilinear(&c, &profiles[i], &profiles[j]);
                worst = worst.max((polarized_form(&field, v, w) - sharp).abs());
            }
        }
        Ok(worst)
    };
    let (coarse, fine) = (worst_error(0.01)?, worst_error(0.005)?);
    outcome(fine < 2e-2 && fine < coarse, format!("max entry error {coarse:.3e} at 0.01, {fine:.3e} at 0.005"))
}

fn injectivity() -> Result<Outcome> {
    let c = circle()?;
    let one = ScalarOnSurface::constant(1.0);
    let length = c.surface_integral(|f| one.value(f).powi(2));
    let v = normal_extension(&c, one);
    let measured = injectivity_pairing(&PhaseField::single(&c, 0.005)?, &v);
    let (lower, limit) = (SIGMA * length, SURFACE_TENSION * length);
    let rel = ((measured - limit) / limit).abs();
    outcome(
        measured > lower && rel < 0.02,
        format!("pairing {measured:.6}, lower bound {lower:.6}, limit {limit:.6} (rel {rel:.2e})"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 10] = [
        ("discrepancy theorem", discrepancy_theorem),
        ("gap from the sharp second variation", gap_from_sharp_variation),
        ("energy and first variation limits", energy_and_first_variation),
        ("finite-difference oracle", fd_oracle),
        ("algebraic suites", algebraic),
        ("measure limits", measure_limits),
        ("multiplicity two", multiplicity_two),
        ("jacobi spectra", spectra),
        ("polarization", polarization),
        ("injectivity", injectivity),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (passed, detail) = match run() {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failures += 1;
        }
        let verdict = if passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict} {name} ({:.1} s): {detail}", k + 1, start.elapsed().as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
