//! Model curvature tensors of generalized complex and generalized Sasakian
//! space forms, the named constant families, and cross-validation of the
//! models against numerically differentiated charts.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curvature::{riemann_at, ChartMetric, CurvatureForm};
use crate::error::{check_dim, Error, Result};
use crate::framecore::{InnerProduct, StructureKind, StructureOperator};

/// Default acceptance threshold of [`validate_against_chart`].
pub const VALIDATION_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceFormKind {
    GeneralizedComplex,
    GeneralizedSasakian,
}

/// Constants and structure tensors of a generalized space form at a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceFormSpec {
    pub kind: SpaceFormKind,
    pub c1: f64,
    pub c2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c3: Option<f64>,
    pub structure: StructureOperator,
    pub dim: usize,
}

impl SpaceFormSpec {
    pub fn generalized_complex(c1: f64, c2: f64, j: StructureOperator) -> Result<Self> {
        let spec = Self {
            kind: SpaceFormKind::GeneralizedComplex,
            c1,
            c2,
            c3: None,
            dim: j.dim(),
            structure: j,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn generalized_sasakian(c1: f64, c2: f64, c3: f64, phi: StructureOperator) -> Result<Self> {
        let spec = Self {
            kind: SpaceFormKind::GeneralizedSasakian,
            c1,
            c2,
            c3: Some(c3),
            dim: phi.dim(),
            structure: phi,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks the type invariants; also run after deserialization.
    pub fn validate(&self) -> Result<()> {
        check_dim(self.dim, self.structure.dim())?;
        match (self.kind, self.structure.kind()) {
            (SpaceFormKind::GeneralizedComplex, StructureKind::AlmostComplex) => {
                if !self.dim.is_multiple_of(2) {
                    return Err(Error::InvalidInput(
                        "generalized complex space forms need even dimension".into(),
                    ));
                }
                if self.c3.is_some() {
                    return Err(Error::InvalidInput(
                        "c3 is not defined for generalized complex space forms".into(),
                    ));
                }
            }
            (SpaceFormKind::GeneralizedSasakian, StructureKind::AlmostContact { .. }) => {
                if self.dim % 2 != 1 {
                    return Err(Error::InvalidInput(
                        "generalized Sasakian space forms need odd dimension".into(),
                    ));
                }
                if self.c3.is_none() {
                    return Err(Error::InvalidInput(
                        "c3 is required for generalized Sasakian space forms".into(),
                    ));
                }
            }
            _ => {
                return Err(Error::InvalidInput(
                    "structure operator kind does not match space form kind".into(),
                ))
            }
        }
        // Re-run the algebraic identities: deserialized specs bypass the constructors.
        let m = self.structure.matrix().clone();
        match self.structure.kind() {
            StructureKind::AlmostComplex => StructureOperator::almost_complex(m).map(|_| ()),
            StructureKind::AlmostContact { xi, eta } => {
                StructureOperator::almost_contact(m, xi.clone(), eta.clone()).map(|_| ())
            }
        }
    }

    pub fn c3_or_zero(&self) -> f64 {
        self.c3.unwrap_or(0.0)
    }
}

/// `R(Z₁,Z₂)Z₃` for the model tensor of `spec`.
pub fn model_curvature(
    spec: &SpaceFormSpec,
    z1: &DVector<f64>,
    z2: &DVector<f64>,
    z3: &DVector<f64>,
    inner: &InnerProduct,
) -> Result<DVector<f64>> {
    for z in [z1, z2, z3] {
        check_dim(spec.dim, z.len())?;
    }
    check_dim(spec.dim, inner.dim())?;
    let g = |a: &DVector<f64>, b: &DVector<f64>| inner.dot(a, b);
    let op = &spec.structure;
    let (j1, j2, j3) = (op.apply(z1), op.apply(z2), op.apply(z3));

    let mut out = (z1 * g(z2, z3) - z2 * g(z1, z3)) * spec.c1;
    out += (&j2 * g(z1, &j3) - &j1 * g(z2, &j3) + &j3 * (2.0 * g(z1, &j2))) * spec.c2;
    if let (Some(c3), StructureKind::AlmostContact { xi, eta }) = (spec.c3, op.kind()) {
        let (e1, e2, e3) = (eta.dot(z1), eta.dot(z2), eta.dot(z3));
        out += (z2 * (e1 * e3) - z1 * (e2 * e3) + xi * (g(z1, z3) * e2 - g(z2, z3) * e1)) * c3;
    }
    Ok(out)
}

/// A space-form model paired with the metric at the point, as a curvature form.
#[derive(Debug, Clone)]
pub struct ModelCurvature {
    pub spec: SpaceFormSpec,
    pub inner: InnerProduct,
}

impl ModelCurvature {
    pub fn new(spec: SpaceFormSpec, inner: InnerProduct) -> Result<Self> {
        check_dim(spec.dim, inner.dim())?;
        Ok(Self { spec, inner })
    }
}

impl CurvatureForm for ModelCurvature {
    fn dim(&self) -> usize {
        self.spec.dim
    }

    /// `⟨R(x,y)z, w⟩` contracted term by term, without building `R(x,y)z`.
    fn form(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>, w: &DVector<f64>) -> f64 {
        let n = self.spec.dim;
        if [x, y, z, w].iter().any(|v| v.len() != n) {
            return f64::NAN;
        }
        let g = |a: &DVector<f64>, b: &DVector<f64>| self.inner.dot(a, b);
        let op = &self.spec.structure;
        let (jx, jy, jz) = (op.apply(x), op.apply(y), op.apply(z));
        let (gxw, gyw, gxz, gyz) = (g(x, w), g(y, w), g(x, z), g(y, z));
        let mut out = self.spec.c1 * (gxw * gyz - gyw * gxz);
        out += self.spec.c2 * (g(&jy, w) * g(x, &jz) - g(&jx, w) * g(y, &jz) + 2.0 * g(&jz, w) * g(x, &jy));
        if let (Some(c3), StructureKind::AlmostContact { xi, eta }) = (self.spec.c3, op.kind()) {
            let (ex, ey, ez) = (eta.dot(x), eta.dot(y), eta.dot(z));
            out += c3 * (gyw * ex * ez - gxw * ey * ez + g(xi, w) * (gxz * ey - gyz * ex));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyName {
    #[serde(rename = "real")]
    Real,
    #[serde(rename = "complex")]
    Complex,
    #[serde(rename = "real-kahler")]
    RealKahler,
    #[serde(rename = "sasakian")]
    Sasakian,
    #[serde(rename = "kenmotsu")]
    Kenmotsu,
    #[serde(rename = "cosymplectic")]
    Cosymplectic,
    #[serde(rename = "almost-C-alpha")]
    AlmostCAlpha,
}

impl FamilyName {
    pub const ALL: [FamilyName; 7] = [
        FamilyName::Real,
        FamilyName::Complex,
        FamilyName::RealKahler,
        FamilyName::Sasakian,
        FamilyName::Kenmotsu,
        FamilyName::Cosymplectic,
        FamilyName::AlmostCAlpha,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FamilyName::Real => "real",
            FamilyName::Complex => "complex",
            FamilyName::RealKahler => "real-kahler",
            FamilyName::Sasakian => "sasakian",
            FamilyName::Kenmotsu => "kenmotsu",
            FamilyName::Cosymplectic => "cosymplectic",
            FamilyName::AlmostCAlpha => "almost-C-alpha",
        }
    }

    /// Families that specialize a generalized complex space form.
    pub fn is_complex_side(self) -> bool {
        matches!(self, FamilyName::Real | FamilyName::Complex | FamilyName::RealKahler)
    }

    pub fn takes_alpha(self) -> bool {
        matches!(self, FamilyName::RealKahler | FamilyName::AlmostCAlpha)
    }
}

/// A named family of space forms with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NamedFamily {
    pub name: FamilyName,
    pub c: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

impl NamedFamily {
    pub fn new(name: FamilyName, c: f64) -> Self {
        Self { name, c, alpha: None }
    }

    pub fn with_alpha(name: FamilyName, c: f64, alpha: f64) -> Self {
        Self {
            name,
            c,
            alpha: Some(alpha),
        }
    }
}

/// `(c₁, c₂, c₃)` of a named family; `c₃` is `None` for complex-side families
/// other than `real`, which reports `Some(0.0)`.
pub fn family_constants(fam: &NamedFamily) -> (f64, f64, Option<f64>) {
    let c = fam.c;
    let a = fam.alpha.unwrap_or(0.0);
    match fam.name {
        FamilyName::Real => (c, 0.0, Some(0.0)),
        FamilyName::Complex => (c / 4.0, c / 4.0, None),
        FamilyName::RealKahler => ((c + 3.0 * a) / 4.0, (c - a) / 4.0, None),
        FamilyName::Sasakian => ((c + 3.0) / 4.0, (c - 1.0) / 4.0, Some((c - 1.0) / 4.0)),
        FamilyName::Kenmotsu => ((c - 3.0) / 4.0, (c + 1.0) / 4.0, Some((c + 1.0) / 4.0)),
        FamilyName::Cosymplectic => (c / 4.0, c / 4.0, Some(c / 4.0)),
        FamilyName::AlmostCAlpha => {
            let a2 = a * a;
            ((c + 3.0 * a2) / 4.0, (c - a2) / 4.0, Some((c - a2) / 4.0))
        }
    }
}

/// Outcome of a chart-versus-model comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationSummary {
    pub max_residual: f64,
    pub worst_point: Vec<f64>,
    pub points: usize,
    pub triples_per_point: usize,
}

/// Compares the numerically differentiated curvature of `chart` with the model
/// tensor given pointwise by `spec_at`, over random unit triples.
pub fn validate_against_chart<F>(
    chart: &ChartMetric,
    spec_at: F,
    points: &[Vec<f64>],
    triples_per_point: usize,
    seed: u64,
) -> Result<ValidationSummary>
where
    F: Fn(&[f64]) -> Result<SpaceFormSpec>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut summary = ValidationSummary {
        max_residual: 0.0,
        worst_point: Vec::new(),
        points: points.len(),
        triples_per_point,
    };
    for p in points {
        let spec = spec_at(p)?;
        check_dim(chart.dim(), spec.dim)?;
        let numeric = riemann_at(chart, p)?;
        let inner = chart.inner_at(p)?;
        for _ in 0..triples_per_point {
            let mut unit = || {
                let v = DVector::from_fn(chart.dim(), |_, _| rng.gen_range(-1.0..1.0));
                let n = inner.norm(&v);
                v / n
            };
            let (z1, z2, z3) = (unit(), unit(), unit());
            let model = model_curvature(&spec, &z1, &z2, &z3, &inner)?;
            let diff = numeric.operator(&z1, &z2, &z3) - &model;
            let residual = inner.norm(&diff) / (1.0 + inner.norm(&model));
            if residual > summary.max_residual || summary.worst_point.is_empty() {
                summary.max_residual = residual.max(summary.max_residual);
                summary.worst_point = p.clone();
            }
        }
    }
    if summary.max_residual > VALIDATION_TOL {
        return Err(Error::ValidationFailed {
            residual: summary.max_residual,
            point: summary.worst_point,
        });
    }
    Ok(summary)
}
