//! Galerkin spectra of the Jacobi operator `-Δ_Γ - |A|²` on round circles
//! and spheres.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{jacobi_form, JacobiMode};
use crate::error::{Error, Result};
use crate::geometry::{Hypersurface, Resolution, ScalarOnSurface};
use crate::numerics::gauss_legendre;

/// Eigenvalues with `|λ|` below this are counted as zero.
pub const NULLITY_THRESHOLD: f64 = 1e-9;

/// Eigenvalues closer than this (relative to `max(1, |λ|)`) form one cluster.
const CLUSTER_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumKind {
    Circle { radius: f64 },
    Sphere { radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenCluster {
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    /// All retained eigenvalues in non-decreasing order.
    pub eigenvalues: Vec<f64>,
    pub clusters: Vec<EigenCluster>,
    pub morse_index: usize,
    pub nullity: usize,
    pub positivity_count: usize,
}

impl SpectrumReport {
    fn from_eigenvalues(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        let mut clusters: Vec<(f64, usize)> = Vec::new();
        for &l in &eigenvalues {
            match clusters.last_mut() {
                Some((sum, count)) if (l - *sum / *count as f64).abs() <= CLUSTER_TOLERANCE * l.abs().max(1.0) => {
                    *sum += l;
                    *count += 1;
                }
                _ => clusters.push((l, 1)),
            }
        }
        let morse_index = eigenvalues.iter().filter(|l| **l <= -NULLITY_THRESHOLD).count();
        let nullity = eigenvalues.iter().filter(|l| l.abs() < NULLITY_THRESHOLD).count();
        SpectrumReport {
            positivity_count: eigenvalues.len() - morse_index - nullity,
            clusters: clusters
                .into_iter()
                .map(|(sum, count)| EigenCluster { value: sum / count as f64, multiplicity: count })
                .collect(),
            eigenvalues,
            morse_index,
            nullity,
        }
    }

    pub fn mode_count(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Closed-form Jacobi eigenvalues for the same kind and truncation.
    pub fn closed_form(kind: SpectrumKind, max_mode: usize) -> Vec<EigenCluster> {
        match kind {
            SpectrumKind::Circle { radius } => (0..=max_mode)
                .map(|k| EigenCluster {
                    value: ((k * k) as f64 - 1.0) / (radius * radius),
                    multiplicity: if k == 0 { 1 } else { 2 },
                })
                .collect(),
            SpectrumKind::Sphere { radius } => (0..=max_mode)
                .map(|l| EigenCluster {
                    value: ((l * (l + 1)) as f64 - 2.0) / (radius * radius),
                    multiplicity: 2 * l + 1,
                })
                .collect(),
        }
    }
}

/// `λ` for `K v = λ M v` with `M` symmetric positive definite.
fn generalized_eigenvalues(k: DMatrix<f64>, m: DMatrix<f64>) -> Result<Vec<f64>> {
    let chol = m.cholesky().ok_or_else(|| Error::Domain("Galerkin mass matrix is not positive definite".into()))?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Domain("singular Cholesky factor".into()))?;
    let c = &linv * k * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    Ok(SymmetricEigen::new(c).eigenvalues.iter().copied().collect())
}

/// Jacobi spectrum by Galerkin projection onto Fourier modes `k <= max_mode`
/// (circle) or spherical harmonics of degree `l <= max_mode` (sphere).
pub fn jacobi_spectrum(kind: SpectrumKind, max_mode: usize) -> Result<SpectrumReport> {
    if max_mode < 2 {
        return Err(Error::Domain("max_mode must be at least 2".into()));
    }
    match kind {
        SpectrumKind::Circle { radius } => circle_spectrum(radius, max_mode),
        SpectrumKind::Sphere { radius } => sphere_spectrum(radius, max_mode),
    }
}

fn check_radius(radius: f64) -> Result<()> {
    if radius.is_finite() && radius > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("radius must be positive, got {radius}")))
    }
}

fn circle_spectrum(radius: f64, max_mode: usize) -> Result<SpectrumReport> {
    check_radius(radius)?;
    let surface = Hypersurface::with_resolution(
        crate::geometry::SurfaceKind::Circle { radius, center: [0.0; 2] },
        Resolution::planar(4 * max_mode + 16),
    )?;
    let mut basis = vec![ScalarOnSurface::<2>::constant(1.0)];
    for k in 1..=max_mode as u32 {
        basis.push(ScalarOnSurface::cos_mode(k));
        basis.push(ScalarOnSurface::sin_mode(k));
    }
    let dim = basis.len();
    let mut k = DMatrix::zeros(dim, dim);
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let kij = super::jacobi_bilinear(&surface, &basis[i], &basis[j], 1.0);
            let mij = surface.surface_integral(|f| basis[i].value(f) * basis[j].value(f));
            k[(i, j)] = kij;
            k[(j, i)] = kij;
            m[(i, j)] = mij;
            m[(j, i)] = mij;
        }
    }
    Ok(SpectrumReport::from_eigenvalues(generalized_eigenvalues(k, m)?))
}

/// Fully normalized associated Legendre functions `P̄_l^m(x)` for
/// `l = m..=max_l` and their `x`-derivatives.
fn associated_legendre(m: usize, max_l: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    let s2 = 1.0 - x * x;
    let mut pmm = (1.0 / (4.0 * std::f64::consts::PI)).sqrt();
    for k in 1..=m {
        pmm *= ((2 * k + 1) as f64 / (2 * k) as f64).sqrt();
    }
    // P̄_m^m = c (1 - x²)^{m/2}; d/dx = -c m x (1 - x²)^{m/2 - 1}.
    let p0 = pmm * s2.powf(m as f64 / 2.0);
    let d0 = if m == 0 { 0.0 } else { -pmm * m as f64 * x * s2.powf(m as f64 / 2.0 - 1.0) };
    let mut p = vec![p0];
    let mut d = vec![d0];
    if max_l > m {
        let a = ((2 * m + 3) as f64).sqrt();
        p.push(a * x * p0);
        d.push(a * (p0 + x * d0));
    }
    for l in (m + 2)..=max_l {
        let (lf, mf) = (l as f64, m as f64);
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
        let i = l - m;
        p.push(a * (x * p[i - 1] - b * p[i - 2]));
        d.push(a * (p[i - 1] + x * d[i - 1] - b * d[i - 2]));
    }
    (p, d)
}

/// For a sphere the Galerkin matrices split into blocks of fixed azimuthal
/// order `m`; within a block the azimuthal factor `cos mφ` or `sin mφ` only
/// contributes the common factor `∫ cos² mφ dφ`, which cancels, so each
/// block reduces to integrals in `x = cos θ`:
///
/// `K = ∫ (1 - x²) ψ'_a ψ'_b + m² ψ_a ψ_b / (1 - x²) - 2 ψ_a ψ_b dx`,
/// `M = R² ∫ ψ_a ψ_b dx`.
fn sphere_spectrum(radius: f64, max_mode: usize) -> Result<SpectrumReport> {
    check_radius(radius)?;
    let rule = gauss_legendre(max_mode + 24, -1.0, 1.0);
    let tables: Vec<Vec<(Vec<f64>, Vec<f64>)>> =
        (0..=max_mode).map(|m| rule.nodes.iter().map(|&x| associated_legendre(m, max_mode, x)).collect()).collect();
    let mut eigenvalues = Vec::new();
    for (m, table) in tables.iter().enumerate() {
        let dim = max_mode + 1 - m;
        let mut k = DMatrix::zeros(dim, dim);
        let mut mass = DMatrix::zeros(dim, dim);
        for ((&x, &w), (p, d)) in rule.nodes.iter().zip(&rule.weights).zip(table) {
            let s2 = 1.0 - x * x;
            for a in 0..dim {
                for b in a..dim {
                    let pp = p[a] * p[b];
                    let azimuthal = if m == 0 { 0.0 } else { (m * m) as f64 * pp / s2 };
                    k[(a, b)] += w * (s2 * d[a] * d[b] + azimuthal - 2.0 * pp);
                    mass[(a, b)] += w * radius * radius * pp;
                }
            }
        }
        for a in 0..dim {
            for b in 0..a {
                k[(a, b)] = k[(b, a)];
                mass[(a, b)] = mass[(b, a)];
            }
        }
        let block = generalized_eigenvalues(k, mass)?;
        let copies = if m == 0 { 1 } else { 2 };
        for _ in 0..copies {
            eigenvalues.extend_from_slice(&block);
        }
    }
    Ok(SpectrumReport::from_eigenvalues(eigenvalues))
}

/// `∫_Γ |∇^Γ f|² - |A|² f²` divided by `∫_Γ f²`.
pub fn rayleigh_quotient<const N: usize>(surface: &Hypersurface<N>, f: &ScalarOnSurface<N>) -> Result<f64> {
    let norm = surface.surface_integral(|frame| f.value(frame).powi(2));
    if norm <= 0.0 {
        return Err(Error::Domain("Rayleigh quotient of the zero function".into()));
    }
    Ok(jacobi_form(surface, f, &JacobiMode::Tangential, 1.0) / norm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_normalization() {
        let rule = gauss_legendre(40, -1.0, 1.0);
        for m in 0..4 {
            let vals: Vec<_> = rule.nodes.iter().map(|&x| associated_legendre(m, 6, x).0).collect();
            for a in 0..(7 - m) {
                for b in 0..(7 - m) {
                    let g: f64 = vals.iter().zip(&rule.weights).map(|(p, w)| w * p[a] * p[b]).sum();
                    let expect = if a == b { 1.0 / (2.0 * std::f64::consts::PI) } else { 0.0 };
                    assert!((g - expect).abs() < 1e-13, "m={m} a={a} b={b} g={g}");
                }
            }
        }
    }

    #[test]
    fn legendre_derivative_matches_differences() {
        let h = 1e-6;
        for m in 0..4 {
            let x = 0.37;
            let (_, d) = associated_legendre(m, 8, x);
            let (pp, _) = associated_legendre(m, 8, x + h);
            let (pm, _) = associated_legendre(m, 8, x - h);
            for i in 0..d.len() {
                assert!((d[i] - (pp[i] - pm[i]) / (2.0 * h)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn circle_unit() {
        let r = jacobi_spectrum(SpectrumKind::Circle { radius: 1.0 }, 3).unwrap();
        assert_eq!(r.mode_count(), 7);
        assert_eq!((r.morse_index, r.nullity, r.positivity_count), (1, 2, 4));
    }

    #[test]
    fn matches_closed_forms() {
        for (kind, max_mode) in [(SpectrumKind::Circle { radius: 0.7 }, 6), (SpectrumKind::Sphere { radius: 1.3 }, 6)] {
            let r = jacobi_spectrum(kind, max_mode).unwrap();
            let expected = SpectrumReport::closed_form(kind, max_mode);
            assert_eq!(r.clusters.len(), expected.len());
            for (c, e) in r.clusters.iter().zip(&expected) {
                assert_eq!(c.multiplicity, e.multiplicity);
                assert!((c.value - e.value).abs() < 1e-10, "{} vs {}", c.value, e.value);
            }
        }
    }

    #[test]
    fn rejects_small_truncation() {
        assert!(jacobi_spectrum(SpectrumKind::Sphere { radius: 1.0 }, 1).is_err());
    }
}
