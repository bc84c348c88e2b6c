use nalgebra::DMatrix;

use super::{ChartJet, Params};
use crate::error::{Error, Result};
use crate::numerics::{vector_from, Matrix, Vector};

/// Orthonormal frame and curvature data at one point of a hypersurface.
///
/// `tangents` are principal directions, so the shape operator is diagonal in
/// this basis with entries `principal_curvatures`. Curvatures are taken with
/// respect to the outward normal: positive for convex shapes (`1/R` on a
/// sphere of radius `R`).
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceFrame<const N: usize> {
    pub params: Params,
    pub point: Vector<N>,
    pub normal: Vector<N>,
    pub tangents: Vec<Vector<N>>,
    pub principal_curvatures: Vec<f64>,
    pub area_element: f64,
    /// Dual basis of the chart tangents `∂x/∂p_a`; `Σ_a ∂_a f · dual[a]` is
    /// the tangential gradient of `f`.
    pub(crate) dual: Vec<Vector<N>>,
}

impl<const N: usize> SurfaceFrame<N> {
    pub(crate) fn from_jet(params: Params, jet: &ChartJet) -> Result<Self> {
        let k = N - 1;
        let x: Vec<Vector<N>> = (0..k).map(|a| vector_from(&jet.d1[a])).collect();
        let mut g = [[0.0; 2]; 2];
        for a in 0..k {
            for b in 0..k {
                g[a][b] = x[a].dot(&x[b]);
            }
        }
        let det_g = if k == 1 { g[0][0] } else { g[0][0] * g[1][1] - g[0][1] * g[1][0] };
        let scale = (0..k).map(|a| g[a][a]).product::<f64>();
        if !(det_g > 1e-12 * scale) || !(scale > 1e-300) {
            return Err(Error::ChartDegeneracy { params });
        }

        let normal = if N == 2 {
            let t = &x[0];
            vector_from::<N>(&[t[1], -t[0]]).normalize()
        } else {
            let a = &x[0];
            let b = &x[1];
            vector_from::<N>(&[
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            ])
            .normalize()
        };

        let mut h = [[0.0; 2]; 2];
        for a in 0..k {
            for b in 0..k {
                h[a][b] = -normal.dot(&vector_from(&jet.d2[a][b]));
            }
        }

        // Gram-Schmidt basis and the upper-triangular change of basis
        // x_a = Σ_i t[i][a] τ_i.
        let l1 = x[0].norm();
        let tau1 = x[0] / l1;
        let (tangents, curvatures) = if k == 1 {
            (vec![tau1], vec![h[0][0] / (l1 * l1)])
        } else {
            let proj = x[1].dot(&tau1);
            let w = x[1] - tau1 * proj;
            let l2 = w.norm();
            let tau2 = w / l2;
            // inverse of [[l1, proj], [0, l2]]
            let e = [[1.0 / l1, -proj / (l1 * l2)], [0.0, 1.0 / l2]];
            let mut a = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    let mut acc = 0.0;
                    for p in 0..2 {
                        for q in 0..2 {
                            acc += e[p][i] * h[p][q] * e[q][j];
                        }
                    }
                    a[i][j] = acc;
                }
            }
            let off = 0.5 * (a[0][1] + a[1][0]);
            let (p, r) = (a[0][0], a[1][1]);
            if off.abs() <= 1e-14 * (p.abs() + r.abs() + f64::MIN_POSITIVE) {
                (vec![tau1, tau2], vec![p, r])
            } else {
                let angle = 0.5 * (2.0 * off).atan2(p - r);
                let (s, c) = angle.sin_cos();
                let k1 = p * c * c + 2.0 * off * s * c + r * s * s;
                let k2 = p * s * s - 2.0 * off * s * c + r * c * c;
                (vec![tau1 * c + tau2 * s, tau2 * c - tau1 * s], vec![k1, k2])
            }
        };

        let dual = if k == 1 {
            vec![x[0] / g[0][0]]
        } else {
            let inv = [[g[1][1] / det_g, -g[0][1] / det_g], [-g[1][0] / det_g, g[0][0] / det_g]];
            (0..2).map(|a| x[0] * inv[0][a] + x[1] * inv[1][a]).collect()
        };

        Ok(SurfaceFrame {
            params,
            point: vector_from(&jet.point),
            normal,
            tangents,
            principal_curvatures: curvatures,
            area_element: det_g.sqrt(),
            dual,
        })
    }

    /// A bare frame with zero curvature and unit area element.
    ///
    /// Used for the pointwise algebraic identities, which only need the basis.
    pub fn from_orthonormal(point: Vector<N>, normal: Vector<N>, tangents: Vec<Vector<N>>) -> Self {
        assert_eq!(tangents.len(), N - 1, "need N-1 tangents");
        let dual = tangents.clone();
        SurfaceFrame {
            params: [0.0; 2],
            point,
            normal,
            principal_curvatures: vec![0.0; N - 1],
            tangents,
            area_element: 1.0,
            dual,
        }
    }

    /// Shape operator in the `tangents` basis.
    pub fn shape_operator(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.principal_curvatures.clone()))
    }

    /// Sum of principal curvatures.
    pub fn mean_curvature(&self) -> f64 {
        self.principal_curvatures.iter().sum()
    }

    /// `|A|^2`, the sum of squared principal curvatures.
    pub fn second_fundamental_norm_sq(&self) -> f64 {
        self.principal_curvatures.iter().map(|k| k * k).sum()
    }

    /// Ratio of the area element of the parallel surface at distance `s` to
    /// the area element of the surface.
    #[inline]
    pub fn tube_jacobian(&self, s: f64) -> f64 {
        self.principal_curvatures.iter().map(|k| 1.0 + s * k).product()
    }

    /// Ambient vector of the tangential gradient of a function with the given
    /// parameter gradient.
    pub fn tangential_gradient(&self, param_gradient: &Params) -> Vector<N> {
        let mut g = Vector::<N>::zeros();
        for (a, d) in self.dual.iter().enumerate() {
            g += d * param_gradient[a];
        }
        g
    }

    /// Orthogonal matrix whose first `N - 1` columns are the tangents and whose
    /// last column is the normal.
    pub fn rotation(&self) -> Matrix<N> {
        Matrix::<N>::from_fn(|i, j| if j + 1 < N { self.tangents[j][i] } else { self.normal[i] })
    }

    /// Largest deviation from orthonormality among `{τ_i, n}`.
    pub fn orthonormality_residual(&self) -> f64 {
        let q = self.rotation();
        (q.transpose() * q - Matrix::<N>::identity()).abs().max()
    }
}
