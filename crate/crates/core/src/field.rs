//! Ambient vector fields η, ζ used as deformation velocities and
//! accelerations, with analytic Jacobians `(∇η)_{ij} = ∂η^i/∂x_j`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{NormalExtension, TubePoint};
use crate::numerics::{Matrix, Vector};

/// Value and Jacobian of a vector field at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldJet<const N: usize> {
    pub value: Vector<N>,
    pub jacobian: Matrix<N>,
}

impl<const N: usize> FieldJet<N> {
    pub fn zero() -> Self {
        FieldJet { value: Vector::zeros(), jacobian: Matrix::zeros() }
    }

    pub fn divergence(&self) -> f64 {
        self.jacobian.trace()
    }
}

/// One monomial `coeff · x^powers` in component `component`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyTerm<const N: usize> {
    pub component: usize,
    #[serde(with = "powers_serde")]
    pub powers: [u8; N],
    pub coeff: f64,
}

mod powers_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer, const N: usize>(p: &[u8; N], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(p.iter())
    }

    pub fn deserialize<'de, D: Deserializer<'de>, const N: usize>(d: D) -> Result<[u8; N], D::Error> {
        let v = Vec::<u8>::deserialize(d)?;
        v.try_into()
            .map_err(|v: Vec<u8>| serde::de::Error::custom(format!("expected {N} powers, got {}", v.len())))
    }
}

/// Vector field with polynomial components of total degree at most 3.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PolynomialField<const N: usize> {
    terms: Vec<PolyTerm<N>>,
}

pub const MAX_POLY_DEGREE: u8 = 3;

/// All exponent tuples of total degree `<= degree`, graded lexicographically.
pub fn monomials<const N: usize>(degree: u8) -> Vec<[u8; N]> {
    let mut out = Vec::new();
    let mut cur = [0u8; N];
    fn rec<const N: usize>(i: usize, left: u8, cur: &mut [u8; N], out: &mut Vec<[u8; N]>) {
        if i == N {
            out.push(*cur);
            return;
        }
        for p in 0..=left {
            cur[i] = p;
            rec(i + 1, left - p, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, degree, &mut cur, &mut out);
    out.sort_by_key(|m| (m.iter().map(|&p| p as u32).sum::<u32>(), std::cmp::Reverse(*m)));
    out
}

#[inline]
fn power_table<const N: usize>(x: &Vector<N>) -> [[f64; 4]; N] {
    let mut t = [[1.0; 4]; N];
    for i in 0..N {
        t[i][1] = x[i];
        t[i][2] = x[i] * x[i];
        t[i][3] = t[i][2] * x[i];
    }
    t
}

#[inline]
fn monomial_with_gradient<const N: usize>(powers: &[u8; N], table: &[[f64; 4]; N]) -> (f64, Vector<N>) {
    let mut value = 1.0;
    for i in 0..N {
        value *= table[i][powers[i] as usize];
    }
    let mut grad = Vector::<N>::zeros();
    for j in 0..N {
        let pj = powers[j] as usize;
        if pj == 0 {
            continue;
        }
        let mut d = pj as f64 * table[j][pj - 1];
        for i in 0..N {
            if i != j {
                d *= table[i][powers[i] as usize];
            }
        }
        grad[j] = d;
    }
    (value, grad)
}

impl<const N: usize> PolynomialField<N> {
    pub fn new(terms: Vec<PolyTerm<N>>) -> Result<Self> {
        for t in &terms {
            if t.component >= N {
                return Err(Error::Configuration(format!("component {} out of range for R^{N}", t.component)));
            }
            let deg: u32 = t.powers.iter().map(|&p| p as u32).sum();
            if deg > MAX_POLY_DEGREE as u32 {
                return Err(Error::Configuration(format!("monomial degree {deg} exceeds {MAX_POLY_DEGREE}")));
            }
            if !t.coeff.is_finite() {
                return Err(Error::Configuration("non-finite polynomial coefficient".into()));
            }
        }
        Ok(PolynomialField { terms })
    }

    /// Every monomial of degree `<= degree` in every component, with
    /// coefficients uniform in `[-scale, scale]`.
    pub fn random(degree: u8, scale: f64, rng: &mut impl Rng) -> Result<Self> {
        if degree > MAX_POLY_DEGREE {
            return Err(Error::Configuration(format!("degree {degree} exceeds {MAX_POLY_DEGREE}")));
        }
        let mut terms = Vec::new();
        for component in 0..N {
            for powers in monomials::<N>(degree) {
                terms.push(PolyTerm { component, powers, coeff: rng.random_range(-scale..=scale) });
            }
        }
        Self::new(terms)
    }

    pub fn terms(&self) -> &[PolyTerm<N>] {
        &self.terms
    }

    pub fn jet_at(&self, x: &Vector<N>) -> FieldJet<N> {
        let table = power_table(x);
        let mut jet = FieldJet::zero();
        for t in &self.terms {
            let (v, g) = monomial_with_gradient(&t.powers, &table);
            jet.value[t.component] += t.coeff * v;
            for j in 0..N {
                jet.jacobian[(t.component, j)] += t.coeff * g[j];
            }
        }
        jet
    }
}

/// Scalar polynomial of degree at most 3, used as a test function.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScalarPolynomial<const N: usize> {
    terms: Vec<([u8; N], f64)>,
}

impl<const N: usize> ScalarPolynomial<N> {
    pub fn new(terms: Vec<([u8; N], f64)>) -> Result<Self> {
        for (p, c) in &terms {
            if p.iter().map(|&q| q as u32).sum::<u32>() > MAX_POLY_DEGREE as u32 || !c.is_finite() {
                return Err(Error::Configuration("invalid scalar polynomial term".into()));
            }
        }
        Ok(ScalarPolynomial { terms })
    }

    pub fn random(degree: u8, scale: f64, rng: &mut impl Rng) -> Result<Self> {
        if degree > MAX_POLY_DEGREE {
            return Err(Error::Configuration(format!("degree {degree} exceeds {MAX_POLY_DEGREE}")));
        }
        Self::new(monomials::<N>(degree).into_iter().map(|p| (p, rng.random_range(-scale..=scale))).collect())
    }

    pub fn value(&self, x: &Vector<N>) -> f64 {
        let table = power_table(x);
        self.terms
            .iter()
            .map(|(p, c)| {
                let mut v = *c;
                for i in 0..N {
                    v *= table[i][p[i] as usize];
                }
                v
            })
            .sum()
    }
}

/// The vector-field families available for deformations.
#[derive(Debug, Clone)]
pub enum AmbientVectorField<const N: usize> {
    Zero,
    Constant(Vector<N>),
    /// `G (x - c)` with `G` antisymmetric (an infinitesimal rotation).
    Rotation { generator: Matrix<N>, center: Vector<N> },
    /// `x - c`.
    Dilation { center: Vector<N> },
    Polynomial(PolynomialField<N>),
    NormalExtension(NormalExtension<N>),
    /// `Σ a_k η_k`.
    Combination(Vec<(f64, AmbientVectorField<N>)>),
}

impl<const N: usize> AmbientVectorField<N> {
    pub fn dilation() -> Self {
        AmbientVectorField::Dilation { center: Vector::zeros() }
    }

    /// Rotation with an arbitrary generator; rejects non-antisymmetric input.
    pub fn rotation(generator: Matrix<N>, center: Vector<N>) -> Result<Self> {
        if (generator + generator.transpose()).abs().max() > 1e-14 * (1.0 + generator.abs().max()) {
            return Err(Error::Configuration("rotation generator must be antisymmetric".into()));
        }
        Ok(AmbientVectorField::Rotation { generator, center })
    }

    pub fn sum(a: &Self, b: &Self) -> Self {
        AmbientVectorField::Combination(vec![(1.0, a.clone()), (1.0, b.clone())])
    }

    pub fn difference(a: &Self, b: &Self) -> Self {
        AmbientVectorField::Combination(vec![(1.0, a.clone()), (-1.0, b.clone())])
    }

    pub fn family(&self) -> &'static str {
        match self {
            AmbientVectorField::Zero => "zero",
            AmbientVectorField::Constant(_) => "constant",
            AmbientVectorField::Rotation { .. } => "rotation",
            AmbientVectorField::Dilation { .. } => "dilation",
            AmbientVectorField::Polynomial(_) => "polynomial",
            AmbientVectorField::NormalExtension(_) => "normal_extension",
            AmbientVectorField::Combination(_) => "combination",
        }
    }

    pub fn jet_at(&self, x: &Vector<N>) -> FieldJet<N> {
        match self {
            AmbientVectorField::NormalExtension(ext) => ext.jet_at(x),
            AmbientVectorField::Combination(parts) => combine(parts, |f| f.jet_at(x)),
            other => other.jet_closed_form(x),
        }
    }

    /// Jet at a tube node; normal extensions reuse the known foot frame.
    pub fn jet_in_tube(&self, p: &TubePoint<'_, N>) -> FieldJet<N> {
        match self {
            AmbientVectorField::NormalExtension(ext) => ext.jet_in_tube(p.frame, p.s),
            AmbientVectorField::Combination(parts) => combine(parts, |f| f.jet_in_tube(p)),
            other => other.jet_closed_form(&p.x),
        }
    }

    fn jet_closed_form(&self, x: &Vector<N>) -> FieldJet<N> {
        match self {
            AmbientVectorField::Zero => FieldJet::zero(),
            AmbientVectorField::Constant(v) => FieldJet { value: *v, jacobian: Matrix::zeros() },
            AmbientVectorField::Rotation { generator, center } => {
                FieldJet { value: generator * (x - center), jacobian: *generator }
            }
            AmbientVectorField::Dilation { center } => FieldJet { value: x - center, jacobian: Matrix::identity() },
            AmbientVectorField::Polynomial(p) => p.jet_at(x),
            AmbientVectorField::NormalExtension(_) | AmbientVectorField::Combination(_) => {
                unreachable!("handled by the caller")
            }
        }
    }

    pub fn value(&self, x: &Vector<N>) -> Vector<N> {
        self.jet_at(x).value
    }

    pub fn jacobian(&self, x: &Vector<N>) -> Matrix<N> {
        self.jet_at(x).jacobian
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, AmbientVectorField::Zero)
    }
}

fn combine<const N: usize>(
    parts: &[(f64, AmbientVectorField<N>)],
    jet: impl Fn(&AmbientVectorField<N>) -> FieldJet<N>,
) -> FieldJet<N> {
    let mut out = FieldJet::zero();
    for (a, f) in parts {
        let j = jet(f);
        out.value += j.value * *a;
        out.jacobian += j.jacobian * *a;
    }
    out
}

impl AmbientVectorField<2> {
    /// `rate · (-(x_2 - c_2), x_1 - c_1)`.
    pub fn planar_rotation(rate: f64) -> Self {
        AmbientVectorField::Rotation {
            generator: Matrix::<2>::new(0.0, -rate, rate, 0.0),
            center: Vector::zeros(),
        }
    }
}

impl AmbientVectorField<3> {
    /// `ω × x`.
    pub fn spatial_rotation(axis: [f64; 3]) -> Self {
        let [a, b, c] = axis;
        AmbientVectorField::Rotation {
            generator: Matrix::<3>::new(0.0, -c, b, c, 0.0, -a, -b, a, 0.0),
            center: Vector::zeros(),
        }
    }
}
