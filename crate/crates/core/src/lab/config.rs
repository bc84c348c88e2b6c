//! Strict TOML configuration for the experiment driver.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{AmbientVectorField, PolyTerm, PolynomialField, ScalarPolynomial};
use crate::geometry::{normal_extension, Hypersurface, NormalRule, Resolution, ScalarOnSurface, SurfaceKind};
use crate::numerics::{vector_from, Matrix};
use crate::phase_field::{Layer, PhaseField, TubeOptions, DEFAULT_TUBE_WIDTH_OVER_EPS, LAYER_SEPARATION};

/// The experiment kinds, one per limit statement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// `E_ε(u^ε) → 2mσ H^{N-1}(Γ)`.
    Energy,
    /// `δE_ε(u^ε, η) → m δE(Γ, η)`.
    FirstVar,
    /// `δ²E_ε(u^ε, η, ζ) → m δ²E(Γ, η, ζ) + 2mσ ∫_Γ (n, n·∇η)²`.
    SecondVar,
    /// `e_ε(u^ε) dx ⇀ 2mσ H^{N-1}⌊Γ`.
    Measure,
    /// `ε ∇u^ε ⊗ ∇u^ε dx ⇀ 2mσ n ⊗ n H^{N-1}⌊Γ`.
    Stress,
    /// `|ε|∇u^ε|²/2 - W(u^ε)/ε| dx ⇀ 0`.
    Equipartition,
    /// The second-variation limit together with the gap to `δ²E` alone.
    Discrepancy,
    /// Energy ratio and second-variation limit for several layers.
    Multiplicity,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::Energy,
        ExperimentKind::FirstVar,
        ExperimentKind::SecondVar,
        ExperimentKind::Measure,
        ExperimentKind::Stress,
        ExperimentKind::Equipartition,
        ExperimentKind::Discrepancy,
        ExperimentKind::Multiplicity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Energy => "energy",
            ExperimentKind::FirstVar => "first-var",
            ExperimentKind::SecondVar => "second-var",
            ExperimentKind::Measure => "measure",
            ExperimentKind::Stress => "stress",
            ExperimentKind::Equipartition => "equipartition",
            ExperimentKind::Discrepancy => "discrepancy",
            ExperimentKind::Multiplicity => "multiplicity",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Configuration(format!("unknown experiment kind '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeName {
    Circle,
    Ellipse,
    Sphere,
    Torus,
}

/// Surface fragment of the configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    pub kind: ShapeName,
    pub radius: Option<f64>,
    pub semi_axes: Option<[f64; 2]>,
    pub r_major: Option<f64>,
    pub r_minor: Option<f64>,
    pub center: Option<Vec<f64>>,
    pub nodes_theta: Option<usize>,
    pub nodes_phi: Option<usize>,
    pub nodes_normal: Option<usize>,
    pub normal_rule: Option<NormalRule>,
    pub s_max_over_eps: Option<f64>,
}

impl SurfaceSpec {
    pub fn circle(radius: f64) -> Self {
        SurfaceSpec {
            kind: ShapeName::Circle,
            radius: Some(radius),
            semi_axes: None,
            r_major: None,
            r_minor: None,
            center: None,
            nodes_theta: None,
            nodes_phi: None,
            nodes_normal: None,
            normal_rule: None,
            s_max_over_eps: None,
        }
    }

    pub fn sphere(radius: f64) -> Self {
        SurfaceSpec { kind: ShapeName::Sphere, ..Self::circle(radius) }
    }

    pub fn dimension(&self) -> usize {
        match self.kind {
            ShapeName::Circle | ShapeName::Ellipse => 2,
            ShapeName::Sphere | ShapeName::Torus => 3,
        }
    }

    fn required(value: Option<f64>, key: &str, shape: &str) -> Result<f64> {
        value.ok_or_else(|| Error::Configuration(format!("surface kind '{shape}' requires key '{key}'")))
    }

    fn center<const D: usize>(&self) -> Result<[f64; D]> {
        match &self.center {
            None => Ok([0.0; D]),
            Some(c) => c
                .as_slice()
                .try_into()
                .map_err(|_| Error::Configuration(format!("center must have {D} entries, got {}", c.len()))),
        }
    }

    pub fn surface_kind(&self) -> Result<SurfaceKind> {
        let kind = match self.kind {
            ShapeName::Circle => SurfaceKind::Circle {
                radius: Self::required(self.radius, "radius", "circle")?,
                center: self.center()?,
            },
            ShapeName::Ellipse => SurfaceKind::Ellipse {
                semi_axes: self
                    .semi_axes
                    .ok_or_else(|| Error::Configuration("surface kind 'ellipse' requires key 'semi_axes'".into()))?,
                center: self.center()?,
            },
            ShapeName::Sphere => SurfaceKind::Sphere {
                radius: Self::required(self.radius, "radius", "sphere")?,
                center: self.center()?,
            },
            ShapeName::Torus => SurfaceKind::Torus {
                r_major: Self::required(self.r_major, "r_major", "torus")?,
                r_minor: Self::required(self.r_minor, "r_minor", "torus")?,
                center: self.center()?,
            },
        };
        kind.validate()?;
        Ok(kind)
    }

    pub fn resolution(&self) -> Resolution {
        let d = Resolution::default_for(self.dimension());
        Resolution {
            nodes_theta: self.nodes_theta.unwrap_or(d.nodes_theta),
            nodes_phi: self.nodes_phi.unwrap_or(d.nodes_phi),
        }
    }

    pub fn build<const N: usize>(&self) -> Result<Hypersurface<N>> {
        Hypersurface::with_resolution(self.surface_kind()?, self.resolution())
    }

    pub fn tube_options(&self) -> Result<TubeOptions> {
        let d = TubeOptions::default();
        let options = TubeOptions {
            normal_nodes: self.nodes_normal.unwrap_or(d.normal_nodes),
            rule: self.normal_rule.unwrap_or(d.rule),
            width_over_eps: self.s_max_over_eps.unwrap_or(DEFAULT_TUBE_WIDTH_OVER_EPS),
        };
        if !(options.width_over_eps > 0.0) {
            return Err(Error::Configuration("s_max_over_eps must be positive".into()));
        }
        Ok(options)
    }
}

/// Profile `f` of a normal extension `f n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    Constant {
        #[serde(default = "one")]
        value: f64,
    },
    /// `amplitude · cos(k p)` in the first chart parameter.
    Cos {
        k: u32,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `amplitude · sin(k p)` in the first chart parameter.
    Sin {
        k: u32,
        #[serde(default = "one")]
        amplitude: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl ProfileSpec {
    pub fn build<const N: usize>(&self) -> ScalarOnSurface<N> {
        let zero = ScalarOnSurface::constant(0.0);
        match *self {
            ProfileSpec::Constant { value } => ScalarOnSurface::constant(value),
            ProfileSpec::Cos { k, amplitude } => ScalarOnSurface::combine(amplitude, &ScalarOnSurface::cos_mode(k), 0.0, &zero),
            ProfileSpec::Sin { k, amplitude } => ScalarOnSurface::combine(amplitude, &ScalarOnSurface::sin_mode(k), 0.0, &zero),
        }
    }
}

/// Explicit polynomial monomial in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub component: usize,
    pub powers: Vec<u8>,
    pub coeff: f64,
}

/// Vector-field fragment (`[eta]`, `[zeta]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    Zero,
    Constant {
        value: Vec<f64>,
    },
    /// Planar rotation with angular `rate`, or `axis × x` in space.
    Rotation {
        rate: Option<f64>,
        axis: Option<[f64; 3]>,
    },
    Dilation,
    /// Explicit `terms`, or random coefficients in `[-scale, scale]` for
    /// every monomial of degree `<= degree` drawn from the seeded generator.
    Polynomial {
        degree: Option<u8>,
        scale: Option<f64>,
        terms: Option<Vec<TermSpec>>,
    },
    NormalExtension {
        profile: ProfileSpec,
    },
}

impl FieldSpec {
    pub fn label(&self) -> &'static str {
        match self {
            FieldSpec::Zero => "zero",
            FieldSpec::Constant { .. } => "constant",
            FieldSpec::Rotation { .. } => "rotation",
            FieldSpec::Dilation => "dilation",
            FieldSpec::Polynomial { .. } => "polynomial",
            FieldSpec::NormalExtension { .. } => "normal_extension",
        }
    }

    pub fn build<const N: usize>(&self, surface: &Hypersurface<N>, rng: &mut impl Rng) -> Result<AmbientVectorField<N>> {
        Ok(match self {
            FieldSpec::Zero => AmbientVectorField::Zero,
            FieldSpec::Constant { value } => {
                if value.len() != N {
                    return Err(Error::Configuration(format!("constant field needs {N} entries, got {}", value.len())));
                }
                AmbientVectorField::Constant(vector_from(value))
            }
            FieldSpec::Rotation { rate, axis } => match (N, rate, axis) {
                (2, Some(rate), None) => {
                    AmbientVectorField::rotation(Matrix::<N>::from_fn(|i, j| rate * [[0.0, -1.0], [1.0, 0.0]][i][j]), vector_from(&[0.0; N]))?
                }
                (3, None, Some([a, b, c])) => {
                    let g = [[0.0, -c, *b], [*c, 0.0, -a], [-b, *a, 0.0]];
                    AmbientVectorField::rotation(Matrix::<N>::from_fn(|i, j| g[i][j]), vector_from(&[0.0; N]))?
                }
                (2, _, _) => return Err(Error::Configuration("planar rotation requires 'rate' only".into())),
                _ => return Err(Error::Configuration("spatial rotation requires 'axis' only".into())),
            },
            FieldSpec::Dilation => AmbientVectorField::dilation(),
            FieldSpec::Polynomial { degree, scale, terms } => match terms {
                Some(terms) => {
                    if degree.is_some() || scale.is_some() {
                        return Err(Error::Configuration(
                            "explicit polynomial terms exclude 'degree' and 'scale'".into(),
                        ));
                    }
                    let terms = terms
                        .iter()
                        .map(|t| {
                            let powers: [u8; N] = t.powers.as_slice().try_into().map_err(|_| {
                                Error::Configuration(format!("monomial needs {N} powers, got {}", t.powers.len()))
                            })?;
                            Ok(PolyTerm { component: t.component, powers, coeff: t.coeff })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    AmbientVectorField::Polynomial(PolynomialField::new(terms)?)
                }
                None => AmbientVectorField::Polynomial(PolynomialField::random(
                    degree.unwrap_or(3),
                    scale.unwrap_or(1.0),
                    rng,
                )?),
            },
            FieldSpec::NormalExtension { profile } => normal_extension(surface, profile.build()),
        })
    }
}

/// Seeded family of test functions and test fields for the pairings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestFunctionSpec {
    #[serde(default = "default_test_count")]
    pub count: usize,
    #[serde(default = "default_test_degree")]
    pub degree: u8,
    #[serde(default = "one")]
    pub scale: f64,
}

fn default_test_count() -> usize {
    10
}

fn default_test_degree() -> u8 {
    2
}

impl Default for TestFunctionSpec {
    fn default() -> Self {
        TestFunctionSpec { count: default_test_count(), degree: default_test_degree(), scale: 1.0 }
    }
}

impl TestFunctionSpec {
    pub fn scalar_functions<const N: usize>(&self, rng: &mut impl Rng) -> Result<Vec<ScalarPolynomial<N>>> {
        (0..self.count).map(|_| ScalarPolynomial::random(self.degree, self.scale, rng)).collect()
    }

    pub fn vector_fields<const N: usize>(&self, rng: &mut impl Rng) -> Result<Vec<AmbientVectorField<N>>> {
        (0..self.count)
            .map(|_| Ok(AmbientVectorField::Polynomial(PolynomialField::random(self.degree, self.scale, rng)?)))
            .collect()
    }
}

/// Phase-field fragment.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseSpec {
    /// A single `ε` instead of a schedule.
    pub epsilon: Option<f64>,
    /// Number of layers placed automatically at `(j - (m-1)/2)·2√ε`.
    pub multiplicity: Option<usize>,
    /// Explicit layers with absolute offsets, used for every `ε`.
    pub layers: Option<Vec<Layer>>,
}

/// Per-kind tolerances; unset entries take the defaults of the kind.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    /// Relative error allowed at the smallest `ε`.
    pub rel_final: Option<f64>,
    /// Relative error allowed for the second-variation part of a
    /// multiplicity experiment.
    pub rel_second: Option<f64>,
    /// Absolute error allowed for quantities that vanish identically.
    pub abs: Option<f64>,
    /// Minimal fitted convergence rate.
    pub min_rate: Option<f64>,
    /// Require the error to decrease along the schedule.
    pub monotone: Option<bool>,
    /// Required gap `|δ²E_ε - mδ²E| > gap_factor · m · discrepancy`.
    pub gap_factor: Option<f64>,
}

/// Resolved tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub rel_final: f64,
    pub rel_second: f64,
    pub abs: f64,
    pub min_rate: Option<f64>,
    pub monotone: bool,
    pub gap_factor: Option<f64>,
}

impl ToleranceSpec {
    /// Defaults per kind and ambient dimension, overridden by any field set
    /// in the file.
    ///
    /// Layers stacked at spacing `2√ε` around a curved surface in `R^3` sit
    /// on parallel surfaces of area `(1 ± √ε/R)^2` times the original, so the
    /// multiplicity energy ratio carries an `O(ε)` bias there and its default
    /// tolerance matches the second-variation one.
    pub fn resolve(&self, kind: ExperimentKind, dimension: usize) -> Tolerances {
        use ExperimentKind::*;
        let (rel, rate, monotone, gap) = match kind {
            Energy | FirstVar => (0.01, Some(1.0), false, None),
            SecondVar => (0.02, Some(1.0), false, None),
            Discrepancy => (0.02, None, true, Some(0.5)),
            Measure | Stress => (0.01, None, true, None),
            Equipartition => (1e-3, None, true, None),
            Multiplicity if dimension == 3 => (0.03, None, false, None),
            Multiplicity => (0.01, None, false, None),
        };
        Tolerances {
            rel_final: self.rel_final.unwrap_or(rel),
            rel_second: self.rel_second.unwrap_or(0.03),
            abs: self.abs.unwrap_or(1e-10),
            min_rate: self.min_rate.or(rate),
            monotone: self.monotone.unwrap_or(monotone),
            gap_factor: self.gap_factor.or(gap),
        }
    }
}

/// The full experiment configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Optional; the command line may supply the kind instead.
    pub kind: Option<ExperimentKind>,
    pub surface: SurfaceSpec,
    #[serde(default)]
    pub phase: PhaseSpec,
    #[serde(default = "default_eta")]
    pub eta: FieldSpec,
    #[serde(default = "default_zeta")]
    pub zeta: FieldSpec,
    #[serde(default)]
    pub test_functions: TestFunctionSpec,
    pub epsilon_schedule: Option<Vec<f64>>,
    #[serde(default)]
    pub tolerance: ToleranceSpec,
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

fn default_eta() -> FieldSpec {
    FieldSpec::Dilation
}

fn default_zeta() -> FieldSpec {
    FieldSpec::Zero
}

/// Default halving schedule in the plane.
pub const PLANAR_SCHEDULE: [f64; 5] = [0.04, 0.02, 0.01, 0.005, 0.0025];

/// Default halving schedule in space.
pub const SPATIAL_SCHEDULE: [f64; 4] = [0.04, 0.02, 0.01, 0.005];

impl ExperimentConfig {
    pub fn new(surface: SurfaceSpec) -> Self {
        ExperimentConfig {
            kind: None,
            surface,
            phase: PhaseSpec::default(),
            eta: default_eta(),
            zeta: default_zeta(),
            test_functions: TestFunctionSpec::default(),
            epsilon_schedule: None,
            tolerance: ToleranceSpec::default(),
            output: None,
            seed: 0,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse { path: PathBuf::from("<string>"), message: e.to_string() })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        toml::from_str(&text).map_err(|e| Error::Parse { path: path.to_path_buf(), message: e.message().to_string() })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Configuration(e.to_string()))
    }

    /// Number of layers used for a kind; multiplicity experiments default to 2.
    pub fn multiplicity(&self, kind: ExperimentKind) -> usize {
        if let Some(layers) = &self.phase.layers {
            return layers.len();
        }
        self.phase.multiplicity.unwrap_or(if kind == ExperimentKind::Multiplicity { 2 } else { 1 })
    }

    /// Largest `|a_j|` for a given `ε`.
    fn max_offset(&self, kind: ExperimentKind, eps: f64) -> f64 {
        match &self.phase.layers {
            Some(layers) => layers.iter().map(|l| l.offset.abs()).fold(0.0, f64::max),
            None => {
                let m = self.multiplicity(kind);
                if m == 0 {
                    0.0
                } else {
                    (m as f64 - 1.0) / 2.0 * LAYER_SEPARATION * eps.sqrt()
                }
            }
        }
    }

    fn fits(&self, kind: ExperimentKind, reach: f64, eps: f64) -> bool {
        self.max_offset(kind, eps) + DEFAULT_TUBE_WIDTH_OVER_EPS * eps < reach
    }

    /// The validated `ε` schedule. The default schedule drops entries whose
    /// layers would not fit inside the reach; an explicit one must fit as given.
    pub fn schedule(&self, kind: ExperimentKind) -> Result<Vec<f64>> {
        let reach = self.surface.surface_kind()?.reach();
        let explicit = match (&self.epsilon_schedule, self.phase.epsilon) {
            (Some(_), Some(_)) => {
                return Err(Error::Configuration("give either 'epsilon_schedule' or 'phase.epsilon', not both".into()))
            }
            (Some(s), None) => Some(s.clone()),
            (None, Some(e)) => Some(vec![e]),
            (None, None) => None,
        };
        let schedule = match explicit {
            Some(s) => {
                if s.is_empty() {
                    return Err(Error::Configuration("epsilon schedule is empty".into()));
                }
                for (i, &e) in s.iter().enumerate() {
                    if !(e > 0.0 && e.is_finite()) {
                        return Err(Error::Configuration(format!("epsilon {e} must be positive")));
                    }
                    if i > 0 && !(e < s[i - 1]) {
                        return Err(Error::Configuration("epsilon schedule must be strictly decreasing".into()));
                    }
                    if !self.fits(kind, reach, e) {
                        return Err(Error::Configuration(format!(
                            "epsilon {e} violates the tube constraint max|a_j| + 12ε < reach = {reach}"
                        )));
                    }
                }
                s
            }
            None => {
                let base: &[f64] = if self.surface.dimension() == 2 { &PLANAR_SCHEDULE } else { &SPATIAL_SCHEDULE };
                let s: Vec<f64> = base.iter().copied().filter(|&e| self.fits(kind, reach, e)).collect();
                if s.is_empty() {
                    return Err(Error::Configuration("no default epsilon fits inside the reach".into()));
                }
                s
            }
        };
        Ok(schedule)
    }

    /// Checks everything that can be checked before computing.
    pub fn validate(&self, kind: ExperimentKind) -> Result<()> {
        self.surface.surface_kind()?;
        self.surface.tube_options()?;
        self.schedule(kind)?;
        if self.phase.layers.is_some() && self.phase.multiplicity.is_some() {
            return Err(Error::Configuration("give either 'phase.layers' or 'phase.multiplicity', not both".into()));
        }
        if kind == ExperimentKind::Multiplicity && self.multiplicity(kind) < 1 {
            return Err(Error::Configuration("multiplicity experiments need at least one layer".into()));
        }
        let check_field = |spec: &FieldSpec| -> Result<()> {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
            match self.surface.dimension() {
                2 => spec.build::<2>(&self.surface.build()?, &mut rng).map(|_| ()),
                _ => spec.build::<3>(&self.surface.build()?, &mut rng).map(|_| ()),
            }
        };
        check_field(&self.eta)?;
        check_field(&self.zeta)?;
        if self.test_functions.degree > crate::field::MAX_POLY_DEGREE {
            return Err(Error::Configuration("test function degree exceeds 3".into()));
        }
        Ok(())
    }

    /// Phase field for one `ε`.
    pub fn phase_field<const N: usize>(&self, kind: ExperimentKind, surface: &Hypersurface<N>, eps: f64) -> Result<PhaseField<N>> {
        let options = self.surface.tube_options()?;
        match &self.phase.layers {
            Some(layers) => PhaseField::layered(surface, eps, layers.clone(), options),
            None => PhaseField::with_multiplicity(surface, eps, self.multiplicity(kind), options),
        }
    }
}
