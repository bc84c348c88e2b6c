//! The ε-sweep driver: one experiment kind per limit statement.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{ExperimentConfig, ExperimentKind, SurfaceSpec};
use super::table::{Check, ConvergenceTable};
use crate::error::Result;
use crate::geometry::Hypersurface;
use crate::phase_field::{
    ac_energy, ac_first_inner_variation, ac_second_inner_variation, energy_measure_pairing, equipartition_defect,
    stress_pairing, PhaseField,
};
use crate::sharp::{
    area_energy, discrepancy, first_inner_variation, jet_on_surface, normal_stretch, predicted_limit,
    second_inner_variation, SURFACE_TENSION,
};

/// Outcome of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub surface: String,
    pub multiplicity: usize,
    pub tables: Vec<ConvergenceTable>,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.tables.iter().all(|t| t.passed())
    }

    pub fn table(&self, quantity: &str) -> Option<&ConvergenceTable> {
        self.tables.iter().find(|t| t.quantity == quantity)
    }
}

/// Runs the sweep for `kind`. Configuration problems are reported before any
/// computation; numerical failures at one `ε` are recorded in that row.
pub fn run_experiment(kind: ExperimentKind, config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate(kind)?;
    match config.surface.dimension() {
        2 => run::<2>(kind, config),
        _ => run::<3>(kind, config),
    }
}

/// A quantity measured on each phase field together with its limit.
type RowFn<'a, const N: usize> = Box<dyn Fn(&PhaseField<N>) -> Result<(f64, f64)> + 'a>;

fn run<const N: usize>(kind: ExperimentKind, config: &ExperimentConfig) -> Result<ExperimentReport> {
    let surface: Hypersurface<N> = config.surface.build()?;
    let schedule = config.schedule(kind)?;
    let tol = config.tolerance.resolve(kind, N);
    let m = config.multiplicity(kind);
    let mf = m as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let eta = config.eta.build(&surface, &mut rng)?;
    let zeta = config.zeta.build(&surface, &mut rng)?;
    let area = area_energy(&surface);
    let energy_scale = mf.max(1.0) * area;

    let mut specs: Vec<(ConvergenceTable, RowFn<'_, N>)> = Vec::new();
    match kind {
        ExperimentKind::Energy => {
            let reference = mf * area;
            specs.push((ConvergenceTable::new("energy", 0.0), Box::new(move |f| Ok((ac_energy(f), reference)))));
        }
        ExperimentKind::FirstVar => {
            let reference = mf * first_inner_variation(&surface, &eta);
            let eta = eta.clone();
            specs.push((
                ConvergenceTable::new("first_variation", energy_scale),
                Box::new(move |f| Ok((ac_first_inner_variation(f, &eta), reference))),
            ));
        }
        ExperimentKind::SecondVar | ExperimentKind::Discrepancy => {
            let reference = if m == 0 { 0.0 } else { predicted_limit(&surface, &eta, &zeta, m as u32)? };
            let (eta, zeta) = (eta.clone(), zeta.clone());
            specs.push((
                ConvergenceTable::new("second_variation", energy_scale),
                Box::new(move |f| Ok((ac_second_inner_variation(f, &eta, &zeta).value, reference))),
            ));
        }
        ExperimentKind::Measure => {
            let phis = config.test_functions.scalar_functions::<N>(&mut rng)?;
            for (k, phi) in phis.into_iter().enumerate() {
                let integral = surface.surface_integral(|fr| phi.value(&fr.point));
                let magnitude = surface.surface_integral(|fr| phi.value(&fr.point).abs());
                let reference = mf * SURFACE_TENSION * integral;
                specs.push((
                    ConvergenceTable::new(format!("phi_{k}"), mf * SURFACE_TENSION * magnitude),
                    Box::new(move |f| Ok((energy_measure_pairing(f, |x| phi.value(x)), reference))),
                ));
            }
        }
        ExperimentKind::Stress => {
            let mut fields = vec![("eta".to_string(), eta.clone())];
            for (k, v) in config.test_functions.vector_fields::<N>(&mut rng)?.into_iter().enumerate() {
                fields.push((format!("field_{k}"), v));
            }
            for (name, v) in fields {
                let reference = mf
                    * SURFACE_TENSION
                    * surface.surface_integral(|fr| normal_stretch(&fr.normal, &jet_on_surface(&v, fr).jacobian));
                let magnitude = surface.surface_integral(|fr| jet_on_surface(&v, fr).jacobian.norm());
                specs.push((
                    ConvergenceTable::new(name, mf.max(1.0) * SURFACE_TENSION * magnitude),
                    Box::new(move |f| Ok((stress_pairing(f, &v), reference))),
                ));
            }
        }
        ExperimentKind::Equipartition => {
            specs.push((
                ConvergenceTable::new("equipartition_defect", energy_scale),
                Box::new(|f| Ok((equipartition_defect(f), 0.0))),
            ));
        }
        ExperimentKind::Multiplicity => {
            let reference = predicted_limit(&surface, &eta, &zeta, m as u32)?;
            specs.push((
                ConvergenceTable::new("energy_ratio", 0.0),
                Box::new(move |f| Ok((ac_energy(f) / area, mf))),
            ));
            let (eta, zeta) = (eta.clone(), zeta.clone());
            specs.push((
                ConvergenceTable::new("second_variation", energy_scale),
                Box::new(move |f| Ok((ac_second_inner_variation(f, &eta, &zeta).value, reference))),
            ));
        }
    }

    for &eps in &schedule {
        let field = config.phase_field(kind, &surface, eps);
        for (table, row) in specs.iter_mut() {
            match field.as_ref().map_err(|e| e.to_string()).and_then(|f| row(f).map_err(|e| e.to_string())) {
                Ok((measured, reference)) if measured.is_finite() => table.push(eps, measured, reference),
                Ok(_) => table.push_failure(eps, "non-finite measurement".into()),
                Err(message) => table.push_failure(eps, message),
            }
        }
    }

    let mut tables: Vec<ConvergenceTable> = specs.into_iter().map(|(t, _)| t).collect();
    for table in tables.iter_mut() {
        match kind {
            ExperimentKind::Equipartition if m <= 1 => table.check_all_below(tol.abs),
            ExperimentKind::Multiplicity if table.quantity == "second_variation" => {
                table.check_final(tol.rel_second, tol.abs)
            }
            _ => table.check_final(tol.rel_final, tol.abs),
        }
        if let Some(min) = tol.min_rate {
            table.check_rate(min);
        }
        if tol.monotone {
            table.check_monotone();
        }
    }
    if let Some(factor) = tol.gap_factor {
        if matches!(kind, ExperimentKind::SecondVar | ExperimentKind::Discrepancy) {
            let sharp = mf * second_inner_variation(&surface, &eta, &zeta).value;
            let disc = mf * discrepancy(&surface, &eta);
            let table = &mut tables[0];
            table.checks.push(gap_check(table, sharp, disc, factor));
        }
    }

    Ok(ExperimentReport { kind, seed: config.seed, surface: surface_label(&config.surface), multiplicity: m, tables })
}

/// `|measured - m δ²E| > factor · m · discrepancy` on every row.
fn gap_check(table: &ConvergenceTable, sharp: f64, disc: f64, factor: f64) -> Check {
    if disc <= 0.0 {
        return Check::new("gap", true, "discrepancy vanishes; gap not assessed");
    }
    let gaps: Vec<f64> = table.rows.iter().map(|r| (r.measured - sharp).abs()).collect();
    let min_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let ok = !gaps.is_empty() && gaps.iter().all(|g| *g > factor * disc);
    Check::new(
        "gap",
        ok,
        format!("min |measured - sharp| = {min_gap:.6e}, required > {:.6e} (sharp {sharp:.6e})", factor * disc),
    )
}

fn surface_label(spec: &SurfaceSpec) -> String {
    match spec.surface_kind() {
        Ok(kind) => kind.name().to_string(),
        Err(_) => "invalid".into(),
    }
}
