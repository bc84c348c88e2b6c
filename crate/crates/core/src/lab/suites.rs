//! Randomized algebraic suites: the frame identities and the determinant
//! and inverse expansions.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::deformation::{det_expansion_residual, expansion_slope, expansion_steps, inverse_expansion_residual};
use crate::error::Result;
use crate::geometry::SurfaceFrame;
use crate::numerics::{Matrix, Vector};
use crate::sharp::frame_identity_residuals;

/// Largest admissible identity residual.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;
/// Smallest admissible log-log slope of an expansion residual.
pub const MIN_EXPANSION_SLOPE: f64 = 2.9;

fn random_vector<const N: usize>(rng: &mut impl Rng) -> Vector<N> {
    Vector::<N>::from_fn(|_, _| rng.random_range(-1.0..1.0))
}

/// A random matrix with entries uniform in `[-1, 1]`.
pub fn random_matrix<const N: usize>(rng: &mut impl Rng) -> Matrix<N> {
    Matrix::<N>::from_fn(|_, _| rng.random_range(-1.0..1.0))
}

/// A uniformly oriented orthonormal frame built by Gram-Schmidt.
pub fn random_frame<const N: usize>(rng: &mut impl Rng) -> SurfaceFrame<N> {
    let mut basis: Vec<Vector<N>> = Vec::with_capacity(N);
    while basis.len() < N {
        let mut v = random_vector::<N>(rng);
        for b in &basis {
            v -= b * b.dot(&v);
        }
        let norm = v.norm();
        if norm > 1e-3 {
            basis.push(v / norm);
        }
    }
    let normal = basis.pop().expect("N >= 1");
    SurfaceFrame::from_orthonormal(random_vector::<N>(rng), normal, basis)
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentitySuite {
    pub samples: usize,
    /// Largest residual per identity label, in label order.
    pub max_residuals: Vec<(&'static str, f64)>,
}

impl IdentitySuite {
    pub fn max_residual(&self) -> f64 {
        self.max_residuals.iter().map(|(_, r)| *r).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max_residual() < IDENTITY_TOLERANCE
    }
}

/// Evaluates every identity on `samples` random frame/Jacobian pairs.
pub fn identity_suite<const N: usize>(samples: usize, seed: u64) -> IdentitySuite {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_residuals: Vec<(&'static str, f64)> = Vec::new();
    for _ in 0..samples {
        let frame = random_frame::<N>(&mut rng);
        let jac = random_matrix::<N>(&mut rng);
        for r in frame_identity_residuals(&frame, &jac) {
            match max_residuals.iter_mut().find(|(l, _)| *l == r.label) {
                Some(entry) => entry.1 = entry.1.max(r.residual),
                None => max_residuals.push((r.label, r.residual)),
            }
        }
    }
    IdentitySuite { samples, max_residuals }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpansionSuite {
    pub samples: usize,
    /// Smallest fitted slope of the determinant residual.
    pub det_min_slope: f64,
    /// Smallest fitted slope of the inverse residual.
    pub inverse_min_slope: f64,
    /// Number of inputs whose determinant slope is below the threshold.
    pub det_below: usize,
    /// Number of inputs whose inverse slope is below the threshold.
    pub inverse_below: usize,
    /// Number of inputs whose residual never rose above rounding level.
    pub exact_inputs: usize,
}

impl ExpansionSuite {
    pub fn passed(&self) -> bool {
        self.det_min_slope >= MIN_EXPANSION_SLOPE && self.inverse_min_slope >= MIN_EXPANSION_SLOPE
    }
}

/// Fits the residual slopes of both expansions on `samples` random `(A, B)`.
///
/// An input whose residual stays at rounding level over the whole sweep has
/// no slope; it is counted in `exact_inputs` and does not lower the minimum.
pub fn expansion_suite<const N: usize>(samples: usize, seed: u64) -> Result<ExpansionSuite> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let steps = expansion_steps();
    let (mut det_min, mut inv_min, mut exact) = (f64::INFINITY, f64::INFINITY, 0);
    let (mut det_below, mut inverse_below) = (0, 0);
    for _ in 0..samples {
        let a = random_matrix::<N>(&mut rng);
        let b = random_matrix::<N>(&mut rng);
        match expansion_slope(|t| det_expansion_residual(&a, &b, t), &steps) {
            Some(s) => {
                det_min = det_min.min(s);
                det_below += usize::from(s < MIN_EXPANSION_SLOPE);
            }
            None => exact += 1,
        }
        let mut inverse_failure = None;
        let slope = expansion_slope(
            |t| match inverse_expansion_residual(&a, &b, t) {
                Ok(r) => r,
                Err(e) => {
                    inverse_failure = Some(e);
                    f64::NAN
                }
            },
            &steps,
        );
        if let Some(e) = inverse_failure {
            return Err(e);
        }
        match slope {
            Some(s) => {
                inv_min = inv_min.min(s);
                inverse_below += usize::from(s < MIN_EXPANSION_SLOPE);
            }
            None => exact += 1,
        }
    }
    Ok(ExpansionSuite { samples, det_min_slope: det_min, inverse_min_slope: inv_min, det_below, inverse_below, exact_inputs: exact })
}

/// Both suites in two and three dimensions.
#[derive(Debug, Clone, Serialize)]
pub struct AlgebraicSuites {
    pub identities_2d: IdentitySuite,
    pub identities_3d: IdentitySuite,
    pub expansions_2d: ExpansionSuite,
    pub expansions_3d: ExpansionSuite,
    pub elapsed: Duration,
}

impl AlgebraicSuites {
    pub fn passed(&self) -> bool {
        self.identities_2d.passed()
            && self.identities_3d.passed()
            && self.expansions_2d.passed()
            && self.expansions_3d.passed()
    }
}

/// 100 identity samples and 50 expansion samples per dimension.
pub fn algebraic_suites(seed: u64) -> Result<AlgebraicSuites> {
    let start = Instant::now();
    let identities_2d = identity_suite::<2>(100, seed);
    let identities_3d = identity_suite::<3>(100, seed.wrapping_add(1));
    let expansions_2d = expansion_suite::<2>(50, seed.wrapping_add(2))?;
    let expansions_3d = expansion_suite::<3>(50, seed.wrapping_add(3))?;
    Ok(AlgebraicSuites { identities_2d, identities_3d, expansions_2d, expansions_3d, elapsed: start.elapsed() })
}
