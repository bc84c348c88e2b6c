//! Pointwise identities between frame-free expressions in `∇η` and their
//! counterparts in adapted coordinates where `n = e_N` and `τ_i = e_i`.

use serde::Serialize;

use crate::geometry::SurfaceFrame;
use crate::numerics::Matrix;

/// Absolute difference between the two sides of one identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResidual {
    pub label: &'static str,
    pub residual: f64,
}

/// Evaluates the identities (i) to (xii) for the Jacobian `jac` at `frame`.
///
/// The left side of each identity is evaluated with the ambient frame
/// vectors and the right side with the rotated matrix `M' = Qᵀ M Q`.
pub fn frame_identity_residuals<const N: usize>(frame: &SurfaceFrame<N>, jac: &Matrix<N>) -> Vec<IdentityResidual> {
    let q = frame.rotation();
    let m = jac;
    let mr = q.transpose() * m * q;
    let n = &frame.normal;
    let tau = &frame.tangents;
    let last = N - 1;
    let m2 = m * m;

    let a = n.dot(&(m * n));
    let nm = m.transpose() * n;
    let nm_sq = nm.norm_squared();
    let tr_m2 = m2.trace();

    // Coordinate expressions.
    let tr_m2_coord: f64 = (0..N).flat_map(|i| (0..N).map(move |k| (i, k))).map(|(i, k)| mr[(i, k)] * mr[(k, i)]).sum();
    let nn_m2_coord: f64 = (0..N).map(|k| mr[(last, k)] * mr[(k, last)]).sum();
    let row_sq: f64 = (0..N).map(|i| mr[(last, i)].powi(2)).sum();
    let row_sq_tangential: f64 = (0..last).map(|i| mr[(last, i)].powi(2)).sum();
    let cross_coord: f64 =
        (0..last).flat_map(|i| (0..last).map(move |j| (i, j))).map(|(i, j)| mr[(i, j)] * mr[(j, i)]).sum();

    // Normal parts of the directional derivatives.
    let d_tau: Vec<_> = tau.iter().map(|t| m * t).collect();
    let mut perp_residual = 0.0f64;
    let mut perp_sq = 0.0;
    for (i, di) in d_tau.iter().enumerate() {
        let mut perp = *di;
        for tj in tau {
            perp -= tj * tj.dot(di);
        }
        perp_sq += perp.norm_squared();
        let coord = n * mr[(last, i)];
        perp_residual = perp_residual.max((perp - coord).amax());
    }
    let mut tau_dot_residual = 0.0f64;
    let mut cross = 0.0;
    for i in 0..last {
        for j in 0..last {
            let tij = tau[i].dot(&d_tau[j]);
            tau_dot_residual = tau_dot_residual.max((tij - mr[(i, j)]).abs());
            cross += tij * tau[j].dot(&d_tau[i]);
        }
    }

    let lhs_xii = -tr_m2 + nm_sq + 2.0 * n.dot(&(m2 * n)) - a * a;
    let rhs_xii = perp_sq + (mr[(last, last)].powi(2) - cross_coord);

    vec![
        IdentityResidual { label: "i", residual: (q * mr * q.transpose() - m).amax() },
        IdentityResidual { label: "ii", residual: (q.transpose() * m2 * q - mr * mr).amax() },
        IdentityResidual { label: "iii", residual: (tr_m2 - tr_m2_coord).abs() },
        IdentityResidual { label: "iv", residual: (2.0 * n.dot(&(m2 * n)) - 2.0 * nn_m2_coord).abs() },
        IdentityResidual { label: "v", residual: (a * a - mr[(last, last)].powi(2)).abs() },
        IdentityResidual { label: "vi", residual: (nm_sq - row_sq).abs() },
        IdentityResidual { label: "vii", residual: (nm_sq - a * a - row_sq_tangential).abs() },
        IdentityResidual { label: "viii", residual: perp_residual },
        IdentityResidual { label: "ix", residual: (perp_sq - row_sq_tangential).abs() },
        IdentityResidual { label: "x", residual: tau_dot_residual },
        IdentityResidual { label: "xi", residual: (cross - cross_coord).abs() },
        IdentityResidual { label: "xii", residual: (lhs_xii - rhs_xii).abs() },
    ]
}
