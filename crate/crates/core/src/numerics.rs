//! Small numerical building blocks shared by the rest of the crate: vector
//! aliases, compensated summation, 1D quadrature rules and log-log fits.

use std::f64::consts::PI;

use nalgebra::{SMatrix, SVector};

pub type Vector<const N: usize> = SVector<f64, N>;
pub type Matrix<const N: usize> = SMatrix<f64, N, N>;

/// Neumaier's variant of Kahan summation.
///
/// Reductions over quadrature nodes go through this so that results depend
/// only on node order, not on magnitude cancellation luck.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Compensated sum of an iterator of values.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().collect::<CompensatedSum>().value()
}

/// A one-dimensional quadrature rule as parallel node/weight vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule1d {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1d {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        compensated_sum(self.iter().map(|(x, w)| w * f(x)))
    }
}

/// Gauss-Legendre rule with `n` nodes on `[a, b]`.
///
/// Nodes come from Newton iteration on the three-term Legendre recurrence,
/// started from the usual Chebyshev-like asymptotic guess.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Rule1d {
    assert!(n > 0, "Gauss-Legendre needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = mid - half * x;
        nodes[n - 1 - i] = mid + half * x;
        weights[i] = half * w;
        weights[n - 1 - i] = half * w;
    }
    Rule1d { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Periodic trapezoid rule with `n` equispaced nodes on `[a, a + period)`.
pub fn periodic_trapezoid(n: usize, a: f64, period: f64) -> Rule1d {
    assert!(n > 0, "periodic trapezoid needs at least one node");
    let h = period / n as f64;
    Rule1d {
        nodes: (0..n).map(|k| a + h * k as f64).collect(),
        weights: vec![h; n],
    }
}

/// Closed composite trapezoid rule with `n >= 2` nodes on `[a, b]`.
pub fn closed_trapezoid(n: usize, a: f64, b: f64) -> Rule1d {
    assert!(n >= 2, "closed trapezoid needs at least two nodes");
    let h = (b - a) / (n - 1) as f64;
    let mut weights = vec![h; n];
    weights[0] = 0.5 * h;
    weights[n - 1] = 0.5 * h;
    Rule1d {
        nodes: (0..n).map(|k| a + h * k as f64).collect(),
        weights,
    }
}

/// Least-squares slope of `ln y` against `ln x`.
///
/// Returns `None` for fewer than two points or a degenerate abscissa.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    slope.is_finite().then_some(slope)
}

/// Builds a [`Vector`] from the first `N` entries of a slice.
pub(crate) fn vector_from<const N: usize>(c: &[f64]) -> Vector<N> {
    Vector::<N>::from_fn(|i, _| c[i])
}

/// LU factorization with partial pivoting of a small square matrix.
/// Returns the packed factors, the row permutation and the permutation sign,
/// or `None` when a pivot vanishes.
fn lu_factor<const N: usize>(a: &Matrix<N>) -> Option<(Matrix<N>, [usize; N], f64)> {
    let mut lu = *a;
    let mut perm = [0usize; N];
    for (i, p) in perm.iter_mut().enumerate() {
        *p = i;
    }
    let mut sign = 1.0;
    for k in 0..N {
        let (mut piv, mut best) = (k, lu[(k, k)].abs());
        for i in (k + 1)..N {
            if lu[(i, k)].abs() > best {
                piv = i;
                best = lu[(i, k)].abs();
            }
        }
        if best == 0.0 {
            return None;
        }
        if piv != k {
            lu.swap_rows(k, piv);
            perm.swap(k, piv);
            sign = -sign;
        }
        for i in (k + 1)..N {
            let f = lu[(i, k)] / lu[(k, k)];
            lu[(i, k)] = f;
            for j in (k + 1)..N {
                lu[(i, j)] -= f * lu[(k, j)];
            }
        }
    }
    Some((lu, perm, sign))
}

/// Determinant of a small square matrix.
pub fn determinant<const N: usize>(a: &Matrix<N>) -> f64 {
    match N {
        1 => a[(0, 0)],
        2 => a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)],
        3 => {
            a[(0, 0)] * (a[(1, 1)] * a[(2, 2)] - a[(1, 2)] * a[(2, 1)])
                - a[(0, 1)] * (a[(1, 0)] * a[(2, 2)] - a[(1, 2)] * a[(2, 0)])
                + a[(0, 2)] * (a[(1, 0)] * a[(2, 1)] - a[(1, 1)] * a[(2, 0)])
        }
        _ => match lu_factor(a) {
            Some((lu, _, sign)) => (0..N).fold(sign, |d, i| d * lu[(i, i)]),
            None => 0.0,
        },
    }
}

/// Solves `a x = b`; `None` for a singular matrix.
pub fn solve<const N: usize>(a: &Matrix<N>, b: &Vector<N>) -> Option<Vector<N>> {
    let (lu, perm, _) = lu_factor(a)?;
    let mut x = Vector::<N>::from_fn(|i, _| b[perm[i]]);
    for i in 0..N {
        for j in 0..i {
            x[i] -= lu[(i, j)] * x[j];
        }
    }
    for i in (0..N).rev() {
        for j in (i + 1)..N {
            x[i] -= lu[(i, j)] * x[j];
        }
        x[i] /= lu[(i, i)];
    }
    Some(x)
}

/// Inverse of a small square matrix; `None` when singular.
pub fn inverse<const N: usize>(a: &Matrix<N>) -> Option<Matrix<N>> {
    let mut out = Matrix::<N>::zeros();
    for j in 0..N {
        let mut e = Vector::<N>::zeros();
        e[j] = 1.0;
        out.set_column(j, &solve(a, &e)?);
    }
    Some(out)
}
