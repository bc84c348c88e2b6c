//! Finite-difference oracle matrix: analytic first and second inner
//! variations against central differences of the deformed energies.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::deformation::{
    deformed_ac_energy, deformed_area_energy, fd_derivative, DeformationFlow, FdOrder, FD_STEP_FRACTION,
};
use crate::error::Result;
use crate::field::{AmbientVectorField, PolynomialField};
use crate::geometry::{Hypersurface, Resolution, SurfaceKind};
use crate::numerics::{Matrix, Vector};
use crate::phase_field::{ac_energy, ac_first_inner_variation, ac_second_inner_variation, PhaseField};
use crate::sharp::{area_energy, first_inner_variation, second_inner_variation};

/// Relative tolerance for second-order comparisons.
pub const SECOND_ORDER_TOLERANCE: f64 = 1e-5;
/// Relative tolerance for first-order comparisons.
pub const FIRST_ORDER_TOLERANCE: f64 = 1e-6;
/// Accepted window for the observed order of the central differences.
pub const ORDER_WINDOW: (f64, f64) = (1.8, 2.2);

#[derive(Debug, Clone)]
pub struct OracleOptions {
    pub epsilons: Vec<f64>,
    pub seed: u64,
    pub sphere_resolution: Resolution,
    pub include_first_order: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            epsilons: vec![0.02, 0.01],
            seed: 7,
            sphere_resolution: Resolution::spatial(40, 80),
            include_first_order: true,
        }
    }
}

/// One analytic-versus-FD comparison.
#[derive(Debug, Clone, Serialize)]
pub struct OracleRow {
    /// `surface/model/order/eta/zeta[/eps]`, e.g. `circle/diffuse/second/dilation/zero/eps=0.02`.
    pub quantity: String,
    pub analytic: f64,
    pub fd_value: f64,
    /// `None` when the differences are at rounding level (exactly polynomial in `t`).
    pub fd_order: Option<f64>,
    /// `|fd - analytic| / max(|analytic|, energy)`.
    pub rel_err: f64,
    pub tolerance: f64,
}

impl OracleRow {
    pub fn order_ok(&self) -> bool {
        self.fd_order.is_none_or(|p| (ORDER_WINDOW.0..=ORDER_WINDOW.1).contains(&p))
    }

    pub fn passed(&self) -> bool {
        self.rel_err.is_finite() && self.rel_err <= self.tolerance && self.order_ok()
    }
}

/// The four deformation families used by the matrix, in a fixed order:
/// dilation, constant, rotation and a seeded random cubic polynomial.
pub fn eta_families<const N: usize>(rng: &mut ChaCha8Rng) -> Result<Vec<AmbientVectorField<N>>> {
    let constant = Vector::<N>::from_fn(|i, _| [0.3, -0.2, 0.1][i % 3]);
    let mut generator = Matrix::<N>::zeros();
    let rates = [1.0, 0.2, 0.5];
    for (k, (i, j)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
        if j < N {
            generator[(i, j)] = -rates[k];
            generator[(j, i)] = rates[k];
        }
    }
    Ok(vec![
        AmbientVectorField::dilation(),
        AmbientVectorField::Constant(constant),
        AmbientVectorField::rotation(generator, Vector::zeros())?,
        AmbientVectorField::Polynomial(PolynomialField::random(3, 1.0, rng)?),
    ])
}

/// The two ζ families: zero and a seeded random cubic polynomial.
pub fn zeta_families<const N: usize>(rng: &mut ChaCha8Rng) -> Result<Vec<AmbientVectorField<N>>> {
    Ok(vec![AmbientVectorField::Zero, AmbientVectorField::Polynomial(PolynomialField::random(3, 1.0, rng)?)])
}

fn compare(quantity: String, analytic: f64, scale: f64, order: FdOrder, g: impl Fn(f64) -> Result<f64>, t_max: f64) -> Result<OracleRow> {
    let fd = fd_derivative(g, order, FD_STEP_FRACTION * t_max)?;
    let tolerance = match order {
        FdOrder::First => FIRST_ORDER_TOLERANCE,
        FdOrder::Second => SECOND_ORDER_TOLERANCE,
    };
    Ok(OracleRow {
        quantity,
        analytic,
        fd_value: fd.value,
        fd_order: fd.order_estimate,
        rel_err: (fd.value - analytic).abs() / analytic.abs().max(scale),
        tolerance,
    })
}

/// Runs the matrix on one surface.
pub fn oracle_rows<const N: usize>(surface: &Hypersurface<N>, options: &OracleOptions) -> Result<Vec<OracleRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let etas = eta_families::<N>(&mut rng)?;
    let zetas = zeta_families::<N>(&mut rng)?;
    let name = surface.kind().name();
    let mut rows = Vec::new();
    let area = area_energy(surface);

    for eta in &etas {
        if options.include_first_order {
            let flow = DeformationFlow::for_surface(eta.clone(), AmbientVectorField::Zero, surface)?;
            rows.push(compare(
                format!("{name}/sharp/first/{}/zero", eta.family()),
                first_inner_variation(surface, eta),
                area,
                FdOrder::First,
                |t| deformed_area_energy(surface, &flow, t),
                flow.t_max(),
            )?);
        }
        for zeta in &zetas {
            let flow = DeformationFlow::for_surface(eta.clone(), zeta.clone(), surface)?;
            rows.push(compare(
                format!("{name}/sharp/second/{}/{}", eta.family(), zeta.family()),
                second_inner_variation(surface, eta, zeta).value,
                area,
                FdOrder::Second,
                |t| deformed_area_energy(surface, &flow, t),
                flow.t_max(),
            )?);
        }
    }

    for &eps in &options.epsilons {
        let field = PhaseField::single(surface, eps)?;
        let energy = ac_energy(&field);
        for eta in &etas {
            if options.include_first_order {
                let flow = DeformationFlow::for_tube(eta.clone(), AmbientVectorField::Zero, field.quadrature())?;
                rows.push(compare(
                    format!("{name}/diffuse/first/{}/zero/eps={eps}", eta.family()),
                    ac_first_inner_variation(&field, eta),
                    energy,
                    FdOrder::First,
                    |t| deformed_ac_energy(&field, &flow, t),
                    flow.t_max(),
                )?);
            }
            for zeta in &zetas {
                let flow = DeformationFlow::for_tube(eta.clone(), zeta.clone(), field.quadrature())?;
                rows.push(compare(
                    format!("{name}/diffuse/second/{}/{}/eps={eps}", eta.family(), zeta.family()),
                    ac_second_inner_variation(&field, eta, zeta).value,
                    energy,
                    FdOrder::Second,
                    |t| deformed_ac_energy(&field, &flow, t),
                    flow.t_max(),
                )?);
            }
        }
    }
    Ok(rows)
}

/// The full matrix: circle `R = 0.5` and sphere `R = 0.5`.
pub fn oracle_matrix(options: &OracleOptions) -> Result<Vec<OracleRow>> {
    let circle = Hypersurface::<2>::circle(0.5, [0.0; 2])?;
    let sphere = Hypersurface::<3>::with_resolution(
        SurfaceKind::Sphere { radius: 0.5, center: [0.0; 3] },
        options.sphere_resolution,
    )?;
    let mut rows = oracle_rows(&circle, options)?;
    rows.extend(oracle_rows(&sphere, options)?);
    Ok(rows)
}
