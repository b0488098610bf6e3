//! Theorem registry and verification engine.
//!
//! Every inequality has the shape `lhs ≤ δ + model term`, where `lhs` is the
//! normalized scalar curvature of the side bounded above, `δ` is `δ_C(r−1)`
//! or `δ̂_C(r−1)` of the relevant fundamental form, and the model term is
//! either the normalized scalar curvature of the other side (general
//! theorems) or a closed expression in the space-form constants.
//!
//! The space-form model always describes the manifold carrying the
//! structure: the target for maps, the source for submersions.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::casorati::{delta_casorati_with, diagnose_equality, CasoratiReport, EqualityDiagnosis, OptimizerConfig};
use crate::catalog::{CatalogEntry, EntryKind, Quantity, SideModel};
use crate::curvature::{riemann_at, scalar_on_vectors, CurvatureTensor};
use crate::error::{Error, Result};
use crate::framecore::{gram_schmidt, structure_norm_squared, Frame, InnerProduct, StructureOperator};
use crate::rmaps::{
    gauss_gap, gauss_map_scalars, gauss_submersion_horizontal, gauss_submersion_vertical, oneill_a_from, oneill_t_from,
    second_fundamental_form_from, FormCoefficients, FormRole, MapAtPoint, PointJets, ScalarCurvaturePair,
};
use crate::spaceforms::{family_constants, FamilyName, ModelCurvature, NamedFamily, SpaceFormKind, SpaceFormSpec};

/// Absolute tolerance for ξ branch detection and invariance defects.
pub const BRANCH_TOL: f64 = 1e-8;

/// `holds ⇔ residual ≥ −HOLD_TOL · (1 + |rhs|)`.
pub const HOLD_TOL: f64 = 1e-8;

/// Which pair of spaces an inequality compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Setting {
    /// Horizontal space of a Riemannian map against its range.
    Map,
    /// Fibers of a submersion against the ambient vertical space.
    Vertical,
    /// Base of a submersion against the ambient horizontal space.
    Horizontal,
}

impl Setting {
    pub fn role(self) -> FormRole {
        match self {
            Setting::Map => FormRole::BMap,
            Setting::Vertical => FormRole::TSubmersion,
            Setting::Horizontal => FormRole::ASubmersion,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelClass {
    General,
    GeneralizedComplex,
    GeneralizedSasakian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InvarianceKind {
    Invariant,
    AntiInvariant,
    Generic,
}

/// The fixed theorem registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TheoremId {
    #[serde(rename = "map-general")]
    MapGeneral,
    #[serde(rename = "map-gcsf")]
    MapGcsf,
    #[serde(rename = "map-gcsf-invariant")]
    MapGcsfInvariant,
    #[serde(rename = "map-gcsf-antiinvariant")]
    MapGcsfAntiInvariant,
    #[serde(rename = "map-gssf")]
    MapGssf,
    #[serde(rename = "map-gssf-invariant")]
    MapGssfInvariant,
    #[serde(rename = "map-gssf-antiinvariant")]
    MapGssfAntiInvariant,
    #[serde(rename = "sub-vert-general")]
    SubVertGeneral,
    #[serde(rename = "sub-vert-gcsf")]
    SubVertGcsf,
    #[serde(rename = "sub-vert-gcsf-inv")]
    SubVertGcsfInv,
    #[serde(rename = "sub-vert-gcsf-anti")]
    SubVertGcsfAnti,
    /// `r` is the fiber dimension here; comparisons that count the vertical
    /// space as `(r+1)`-dimensional shift the constants accordingly and are
    /// not encoded.
    #[serde(rename = "sub-vert-gssf")]
    SubVertGssf,
    #[serde(rename = "sub-vert-gssf-inv")]
    SubVertGssfInv,
    #[serde(rename = "sub-vert-gssf-anti")]
    SubVertGssfAnti,
    #[serde(rename = "sub-hor-general")]
    SubHorGeneral,
    #[serde(rename = "sub-hor-gcsf")]
    SubHorGcsf,
    #[serde(rename = "sub-hor-gssf")]
    SubHorGssf,
}

impl TheoremId {
    pub const ALL: [TheoremId; 17] = [
        TheoremId::MapGeneral,
        TheoremId::MapGcsf,
        TheoremId::MapGcsfInvariant,
        TheoremId::MapGcsfAntiInvariant,
        TheoremId::MapGssf,
        TheoremId::MapGssfInvariant,
        TheoremId::MapGssfAntiInvariant,
        TheoremId::SubVertGeneral,
        TheoremId::SubVertGcsf,
        TheoremId::SubVertGcsfInv,
        TheoremId::SubVertGcsfAnti,
        TheoremId::SubVertGssf,
        TheoremId::SubVertGssfInv,
        TheoremId::SubVertGssfAnti,
        TheoremId::SubHorGeneral,
        TheoremId::SubHorGcsf,
        TheoremId::SubHorGssf,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::MapGeneral => "map-general",
            TheoremId::MapGcsf => "map-gcsf",
            TheoremId::MapGcsfInvariant => "map-gcsf-invariant",
            TheoremId::MapGcsfAntiInvariant => "map-gcsf-antiinvariant",
            TheoremId::MapGssf => "map-gssf",
            TheoremId::MapGssfInvariant => "map-gssf-invariant",
            TheoremId::MapGssfAntiInvariant => "map-gssf-antiinvariant",
            TheoremId::SubVertGeneral => "sub-vert-general",
            TheoremId::SubVertGcsf => "sub-vert-gcsf",
            TheoremId::SubVertGcsfInv => "sub-vert-gcsf-inv",
            TheoremId::SubVertGcsfAnti => "sub-vert-gcsf-anti",
            TheoremId::SubVertGssf => "sub-vert-gssf",
            TheoremId::SubVertGssfInv => "sub-vert-gssf-inv",
            TheoremId::SubVertGssfAnti => "sub-vert-gssf-anti",
            TheoremId::SubHorGeneral => "sub-hor-general",
            TheoremId::SubHorGcsf => "sub-hor-gcsf",
            TheoremId::SubHorGssf => "sub-hor-gssf",
        }
    }

    pub fn setting(self) -> Setting {
        use TheoremId::*;
        match self {
            MapGeneral | MapGcsf | MapGcsfInvariant | MapGcsfAntiInvariant | MapGssf | MapGssfInvariant
            | MapGssfAntiInvariant => Setting::Map,
            SubVertGeneral | SubVertGcsf | SubVertGcsfInv | SubVertGcsfAnti | SubVertGssf | SubVertGssfInv
            | SubVertGssfAnti => Setting::Vertical,
            SubHorGeneral | SubHorGcsf | SubHorGssf => Setting::Horizontal,
        }
    }

    pub fn model(self) -> ModelClass {
        use TheoremId::*;
        match self {
            MapGeneral | SubVertGeneral | SubHorGeneral => ModelClass::General,
            MapGcsf | MapGcsfInvariant | MapGcsfAntiInvariant | SubVertGcsf | SubVertGcsfInv | SubVertGcsfAnti
            | SubHorGcsf => ModelClass::GeneralizedComplex,
            _ => ModelClass::GeneralizedSasakian,
        }
    }

    /// The invariance class the theorem assumes; `Generic` means no assumption.
    pub fn class(self) -> InvarianceKind {
        use TheoremId::*;
        match self {
            MapGcsfInvariant | MapGssfInvariant | SubVertGcsfInv | SubVertGssfInv => InvarianceKind::Invariant,
            MapGcsfAntiInvariant | MapGssfAntiInvariant | SubVertGcsfAnti | SubVertGssfAnti => {
                InvarianceKind::AntiInvariant
            }
            _ => InvarianceKind::Generic,
        }
    }

    pub fn role(self) -> FormRole {
        self.setting().role()
    }

    /// The inequality in symbols, for listings.
    pub fn statement(self) -> &'static str {
        use TheoremId::*;
        match self {
            MapGeneral => "ρ^H ≤ δ_C(r−1) + ρ^R",
            MapGcsf => "ρ^H ≤ δ_C(r−1) + c₁ + 3c₂‖P‖²/(r(r−1))",
            MapGcsfInvariant => "ρ^H ≤ δ_C(r−1) + c₁ + 3c₂/(r−1)",
            MapGcsfAntiInvariant => "ρ^H ≤ δ_C(r−1) + c₁",
            MapGssf => "ρ^H ≤ δ_C(r−1) + c₁ + 3c₂‖P‖²/(r(r−1)) − (2/r)c₃·[ξ ∈ range F∗]",
            MapGssfInvariant => "ρ^H ≤ δ_C(r−1) + c₁ + 3c₂/(r−1), ξ ⊥ range F∗",
            MapGssfAntiInvariant => "ρ^H ≤ δ_C(r−1) + c₁ − (2/r)c₃·[ξ ∈ range F∗]",
            SubVertGeneral => "ρ^V ≤ δ_C(r−1) + ρ^V_M",
            SubVertGcsf => "ρ^V ≤ δ_C(r−1) + c₁ + 3c₂‖P‖²/(r(r−1))",
            SubVertGcsfInv => "ρ^V ≤ δ_C(r−1) + c₁ + 3c₂/(r−1)",
            SubVertGcsfAnti => "ρ^V ≤ δ_C(r−1) + c₁",
            SubVertGssf => "ρ^V ≤ δ_C(r−1) + c₁ + 3c₂‖P‖²/(r(r−1)) − (2/r)c₃·[ξ ∈ ker F∗]",
            SubVertGssfInv => "ρ^V ≤ δ_C(r−1) + c₁ + 3c₂/(r−1), ξ ⊥ ker F∗",
            SubVertGssfAnti => "ρ^V ≤ δ_C(r−1) + c₁ − (2/r)c₃·[ξ ∈ ker F∗]",
            SubHorGeneral => "ρ^H_H ≤ δ_C(r−1) + ρ^H",
            SubHorGcsf => "ρ^H_H ≤ δ_C(r−1) + c₁ + 3c₂‖P‖²/(r(r−1))",
            SubHorGssf => "ρ^H_H ≤ δ_C(r−1) + c₁ + 3c₂‖P‖²/(r(r−1)) − (2/r)c₃·[ξ ∈ (ker F∗)⊥]",
        }
    }

    /// Named families whose corollaries specialize this theorem.
    pub fn families(self) -> &'static [FamilyName] {
        match self.model() {
            ModelClass::General => &[],
            ModelClass::GeneralizedComplex => &[FamilyName::Real, FamilyName::Complex, FamilyName::RealKahler],
            ModelClass::GeneralizedSasakian => &[
                FamilyName::Real,
                FamilyName::Sasakian,
                FamilyName::Kenmotsu,
                FamilyName::Cosymplectic,
                FamilyName::AlmostCAlpha,
            ],
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .iter()
            .copied()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown theorem id `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Delta,
    DeltaHat,
}

impl Variant {
    pub const BOTH: [Variant; 2] = [Variant::Delta, Variant::DeltaHat];

    pub fn pick(self, report: &CasoratiReport) -> f64 {
        match self {
            Variant::Delta => report.delta_c,
            Variant::DeltaHat => report.delta_hat_c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum XiBranch {
    Tangent,
    Normal,
}

/// Position of `ξ` relative to the subspace a theorem is about.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XiPosition {
    pub position: XiBranch,
    pub projection_defect: f64,
}

/// Classifies `ξ` against the span of `frame`; oblique positions have no formula.
pub fn xi_position(frame: &Frame, xi: &DVector<f64>) -> Result<XiPosition> {
    let norm = frame.inner().norm(xi);
    if !(norm > 0.0) {
        return Err(Error::InvalidInput("ξ vanishes".into()));
    }
    let along = frame.project(xi);
    let normal_defect = frame.inner().norm(&along) / norm;
    let tangent_defect = frame.inner().norm(&(xi - &along)) / norm;
    if tangent_defect <= BRANCH_TOL {
        Ok(XiPosition {
            position: XiBranch::Tangent,
            projection_defect: tangent_defect,
        })
    } else if normal_defect <= BRANCH_TOL {
        Ok(XiPosition {
            position: XiBranch::Normal,
            projection_defect: normal_defect,
        })
    } else {
        Err(Error::BranchUndetermined {
            tangent_defect,
            normal_defect,
        })
    }
}

/// Invariance class of a subspace under a structure operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub kind: InvarianceKind,
    /// `max ‖(op e_i)^⊥‖`: zero when `op` maps the subspace into itself.
    pub invariant_defect: f64,
    /// `max ‖(op e_i)^⊤‖`: zero when `op` maps the subspace into its complement.
    pub anti_invariant_defect: f64,
    pub pnorm2: f64,
}

/// Invariant means `op(S) = S`; for `φ` this also needs `‖P‖² = r`, which
/// fails whenever `ξ ∈ S` because `φξ = 0`.
pub fn classify_invariance(frame: &Frame, op: &StructureOperator) -> Result<InvarianceReport> {
    let pnorm2 = structure_norm_squared(frame, op)?;
    let mut inv: f64 = 0.0;
    let mut anti: f64 = 0.0;
    for e in frame.vectors() {
        let image = op.apply(e);
        let along = frame.project(&image);
        anti = anti.max(frame.inner().norm(&along));
        inv = inv.max(frame.inner().norm(&(image - along)));
    }
    let r = frame.len() as f64;
    let kind = if inv <= BRANCH_TOL && (pnorm2 - r).abs() <= 1e-6 {
        InvarianceKind::Invariant
    } else if anti <= BRANCH_TOL {
        InvarianceKind::AntiInvariant
    } else {
        InvarianceKind::Generic
    };
    Ok(InvarianceReport {
        kind,
        invariant_defect: inv,
        anti_invariant_defect: anti,
        pnorm2,
    })
}

/// Constants of a space-form model as used by the right-hand sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConstants {
    pub kind: SpaceFormKind,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl ModelConstants {
    pub fn from_spec(spec: &SpaceFormSpec) -> Self {
        Self {
            kind: spec.kind,
            c1: spec.c1,
            c2: spec.c2,
            c3: spec.c3_or_zero(),
        }
    }

    pub fn from_family(fam: &NamedFamily, kind: SpaceFormKind) -> Self {
        let (c1, c2, c3) = family_constants(fam);
        Self {
            kind,
            c1,
            c2,
            c3: c3.unwrap_or(0.0),
        }
    }
}

/// Everything a right-hand side may need.
#[derive(Debug, Clone, Copy)]
pub struct RhsInputs<'a> {
    pub r: usize,
    pub casorati: &'a CasoratiReport,
    /// Normalized scalar curvature of the right side (general theorems).
    pub rho_right: Option<f64>,
    pub model: Option<ModelConstants>,
    pub pnorm2: Option<f64>,
    pub xi: Option<XiPosition>,
}

fn need<T>(value: Option<T>, what: &str, theorem: TheoremId) -> Result<T> {
    value.ok_or_else(|| Error::HypothesisViolated(format!("{theorem} needs {what}")))
}

/// The right-hand side of `theorem` in the given variant.
pub fn rhs_for(theorem: TheoremId, variant: Variant, inputs: &RhsInputs<'_>) -> Result<f64> {
    let r = inputs.r;
    if r < 3 {
        return Err(Error::HypothesisViolated(format!("{theorem} needs r ≥ 3, got r = {r}")));
    }
    let rf = r as f64;
    let delta = variant.pick(inputs.casorati);
    let model = match theorem.model() {
        ModelClass::General => return Ok(delta + need(inputs.rho_right, "the right-side scalar curvature", theorem)?),
        ModelClass::GeneralizedComplex => {
            let m = need(inputs.model, "generalized complex space-form constants", theorem)?;
            if m.kind != SpaceFormKind::GeneralizedComplex {
                return Err(Error::HypothesisViolated(format!(
                    "{theorem} needs a generalized complex space form"
                )));
            }
            m
        }
        ModelClass::GeneralizedSasakian => {
            let m = need(inputs.model, "generalized Sasakian space-form constants", theorem)?;
            if m.kind != SpaceFormKind::GeneralizedSasakian {
                return Err(Error::HypothesisViolated(format!(
                    "{theorem} needs a generalized Sasakian space form"
                )));
            }
            m
        }
    };
    let structure_term = match theorem.class() {
        InvarianceKind::Generic => {
            let p = need(inputs.pnorm2, "‖P‖²", theorem)?;
            3.0 * model.c2 * p / (rf * (rf - 1.0))
        }
        InvarianceKind::Invariant => 3.0 * model.c2 / (rf - 1.0),
        InvarianceKind::AntiInvariant => 0.0,
    };
    let xi_term = if theorem.model() == ModelClass::GeneralizedSasakian {
        let xi = need(inputs.xi, "the position of ξ", theorem)?;
        match (xi.position, theorem.class()) {
            (XiBranch::Tangent, InvarianceKind::Invariant) => {
                return Err(Error::HypothesisViolated(format!(
                    "{theorem}: a φ-invariant subspace cannot contain ξ"
                )))
            }
            (XiBranch::Tangent, _) => -2.0 * model.c3 / rf,
            (XiBranch::Normal, _) => 0.0,
        }
    } else {
        0.0
    };
    Ok(delta + model.c1 + structure_term + xi_term)
}

/// The corollary of `theorem` for a named family, with the family's constants
/// written out rather than routed through [`family_constants`].
pub fn corollary_rhs(
    theorem: TheoremId,
    variant: Variant,
    family: &NamedFamily,
    inputs: &RhsInputs<'_>,
) -> Result<f64> {
    if !theorem.families().contains(&family.name) {
        return Err(Error::HypothesisViolated(format!(
            "no {} corollary of {theorem}",
            family.name.as_str()
        )));
    }
    let r = inputs.r;
    if r < 3 {
        return Err(Error::HypothesisViolated(format!("{theorem} needs r ≥ 3, got r = {r}")));
    }
    let rf = r as f64;
    let p = match theorem.class() {
        InvarianceKind::Generic => need(inputs.pnorm2, "‖P‖²", theorem)?,
        InvarianceKind::Invariant => rf,
        InvarianceKind::AntiInvariant => 0.0,
    };
    let tangent = if theorem.model() == ModelClass::GeneralizedSasakian {
        let xi = need(inputs.xi, "the position of ξ", theorem)?;
        if xi.position == XiBranch::Tangent && theorem.class() == InvarianceKind::Invariant {
            return Err(Error::HypothesisViolated(format!(
                "{theorem}: a φ-invariant subspace cannot contain ξ"
            )));
        }
        if xi.position == XiBranch::Tangent {
            1.0
        } else {
            0.0
        }
    } else {
        0.0
    };
    let c = family.c;
    let a = family.alpha.unwrap_or(0.0);
    let q = p / (rf * (rf - 1.0));
    let delta = variant.pick(inputs.casorati);
    let model = match family.name {
        FamilyName::Real => c,
        FamilyName::Complex => c / 4.0 + 3.0 * c / 4.0 * q,
        FamilyName::RealKahler => (c + 3.0 * a) / 4.0 + 3.0 * (c - a) / 4.0 * q,
        FamilyName::Sasakian => (c + 3.0) / 4.0 + 3.0 * (c - 1.0) / 4.0 * q - tangent * (c - 1.0) / (2.0 * rf),
        FamilyName::Kenmotsu => (c - 3.0) / 4.0 + 3.0 * (c + 1.0) / 4.0 * q - tangent * (c + 1.0) / (2.0 * rf),
        FamilyName::Cosymplectic => c / 4.0 + 3.0 * c / 4.0 * q - tangent * c / (2.0 * rf),
        FamilyName::AlmostCAlpha => {
            let a2 = a * a;
            (c + 3.0 * a2) / 4.0 + 3.0 * (c - a2) / 4.0 * q - tangent * (c - a2) / (2.0 * rf)
        }
    };
    Ok(delta + model)
}

/// `|corollary − generic theorem with the family's constants|`.
pub fn specialization_deviation(
    theorem: TheoremId,
    variant: Variant,
    family: &NamedFamily,
    inputs: &RhsInputs<'_>,
) -> Result<f64> {
    let kind = match theorem.model() {
        ModelClass::GeneralizedComplex => SpaceFormKind::GeneralizedComplex,
        ModelClass::GeneralizedSasakian => SpaceFormKind::GeneralizedSasakian,
        ModelClass::General => return Err(Error::HypothesisViolated(format!("{theorem} has no corollaries"))),
    };
    let generic_inputs = RhsInputs {
        model: Some(ModelConstants::from_family(family, kind)),
        ..*inputs
    };
    let generic = rhs_for(theorem, variant, &generic_inputs)?;
    Ok((generic - corollary_rhs(theorem, variant, family, inputs)?).abs())
}

/// Where a report's data came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PointTag {
    Coordinates { geometry: String, coordinates: Vec<f64> },
    Synthetic { seed: u64, trial: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum XiTag {
    Tangent,
    Normal,
    Absent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchInfo {
    pub xi: XiTag,
    pub invariance: Option<InvarianceKind>,
    pub pnorm2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub theorem: TheoremId,
    pub variant: Variant,
    pub r: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub holds: bool,
    pub branch: BranchInfo,
    pub equality: EqualityDiagnosis,
    pub certified: bool,
    pub point: PointTag,
}

pub fn holds(residual: f64, rhs: f64) -> bool {
    holds_within(residual, rhs, HOLD_TOL)
}

/// [`holds`] with a caller-chosen relative tolerance.
pub fn holds_within(residual: f64, rhs: f64, tol: f64) -> bool {
    residual >= -tol * (1.0 + rhs.abs())
}

/// Everything needed to evaluate one theorem at one point or trial.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub coeffs: FormCoefficients,
    pub casorati: CasoratiReport,
    /// `2scal` of the side bounded above.
    pub left_2scal: f64,
    pub right_2scal: f64,
    pub model: Option<ModelConstants>,
    pub invariance: Option<InvarianceReport>,
    pub xi: Option<XiPosition>,
}

impl Evaluation {
    pub fn inputs(&self) -> RhsInputs<'_> {
        let r = self.coeffs.r;
        RhsInputs {
            r,
            casorati: &self.casorati,
            rho_right: Some(crate::curvature::normalized(self.right_2scal, r)),
            model: self.model,
            pnorm2: self.invariance.map(|i| i.pnorm2),
            xi: self.xi,
        }
    }

    fn check_class(&self, theorem: TheoremId) -> Result<()> {
        let wanted = theorem.class();
        if wanted == InvarianceKind::Generic {
            return Ok(());
        }
        let found = self
            .invariance
            .ok_or_else(|| Error::HypothesisViolated(format!("{theorem} needs a structure operator")))?;
        if found.kind != wanted {
            return Err(Error::HypothesisViolated(format!(
                "{theorem} assumes a {wanted:?} subspace, found {:?} (defects {:.3e} / {:.3e})",
                found.kind, found.invariant_defect, found.anti_invariant_defect
            )));
        }
        Ok(())
    }

    /// Both variants of `theorem`, after checking its hypotheses.
    pub fn reports(&self, theorem: TheoremId, point: PointTag) -> Result<Vec<InequalityReport>> {
        if self.coeffs.role != theorem.role() {
            return Err(Error::HypothesisViolated(format!(
                "{theorem} needs {:?} coefficients",
                theorem.role()
            )));
        }
        self.check_class(theorem)?;
        let inputs = self.inputs();
        let r = self.coeffs.r;
        let lhs = crate::curvature::normalized(self.left_2scal, r);
        let equality = diagnose_equality(&self.coeffs);
        let branch = BranchInfo {
            xi: match self.xi {
                Some(XiPosition {
                    position: XiBranch::Tangent,
                    ..
                }) => XiTag::Tangent,
                Some(_) => XiTag::Normal,
                None => XiTag::Absent,
            },
            invariance: self.invariance.map(|i| i.kind),
            pnorm2: self.invariance.map(|i| i.pnorm2),
        };
        Variant::BOTH
            .iter()
            .map(|&variant| {
                let rhs = rhs_for(theorem, variant, &inputs)?;
                let residual = rhs - lhs;
                Ok(InequalityReport {
                    theorem,
                    variant,
                    r,
                    lhs,
                    rhs,
                    residual,
                    holds: holds(residual, rhs),
                    branch,
                    equality: equality.clone(),
                    certified: self.casorati.optimizer.certified,
                    point: point.clone(),
                })
            })
            .collect()
    }
}

/// How synthetic coefficients are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SyntheticMode {
    Random,
    /// `(a, …, a, 2a)` diagonal in a random shared basis; `A ≡ 0` for the horizontal setting.
    EqualityShape,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub trials: u64,
    pub seed: u64,
    pub mode: SyntheticMode,
    pub r_min: usize,
    pub r_max: usize,
    pub max_normals: usize,
    /// Relative tolerance of the holds test, [`HOLD_TOL`] unless overridden.
    pub hold_tol: f64,
}

impl SyntheticConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            mode: SyntheticMode::Random,
            r_min: 3,
            r_max: 6,
            max_normals: 3,
            hold_tol: HOLD_TOL,
        }
    }

    pub fn with_mode(mut self, mode: SyntheticMode) -> Self {
        self.mode = mode;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSummary {
    pub theorem: TheoremId,
    pub trials: u64,
    /// Trials in which some variant failed.
    pub failures: u64,
    /// Trials whose delta-variant residual exceeds the tolerance.
    pub strict: u64,
    pub min_residual: f64,
    /// Trials diagnosed as equality shape with a vanishing delta-variant residual.
    pub equality_hits: u64,
    pub uncertified: u64,
    pub max_specialization_deviation: f64,
    pub first_counterexample: Option<InequalityReport>,
}

impl SyntheticSummary {
    fn empty(theorem: TheoremId) -> Self {
        Self {
            theorem,
            trials: 0,
            failures: 0,
            strict: 0,
            min_residual: f64::INFINITY,
            equality_hits: 0,
            uncertified: 0,
            max_specialization_deviation: 0.0,
            first_counterexample: None,
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.trials += other.trials;
        self.failures += other.failures;
        self.strict += other.strict;
        self.min_residual = self.min_residual.min(other.min_residual);
        self.equality_hits += other.equality_hits;
        self.uncertified += other.uncertified;
        self.max_specialization_deviation = self
            .max_specialization_deviation
            .max(other.max_specialization_deviation);
        self.first_counterexample = match (self.first_counterexample, other.first_counterexample) {
            (Some(a), Some(b)) => Some(if trial_of(&a) <= trial_of(&b) { a } else { b }),
            (a, b) => a.or(b),
        };
        self
    }
}

fn trial_of(report: &InequalityReport) -> u64 {
    match report.point {
        PointTag::Synthetic { trial, .. } => trial,
        PointTag::Coordinates { .. } => u64::MAX,
    }
}

/// Per-trial generator: the stream id separates trials of one seed.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn random_orthogonal(rng: &mut ChaCha8Rng, r: usize) -> DMatrix<f64> {
    loop {
        let m = DMatrix::from_fn(r, r, |_, _| rng.gen_range(-1.0..1.0));
        let qr = m.qr();
        if qr.r().diagonal().iter().all(|d: &f64| d.abs() > 1e-3) {
            return qr.q();
        }
    }
}

/// Random coefficients of the role, or an equality-shape instance.
pub fn synthetic_coefficients(
    rng: &mut ChaCha8Rng,
    role: FormRole,
    r: usize,
    normals: usize,
    mode: SyntheticMode,
) -> FormCoefficients {
    let scale = 10f64.powf(rng.gen_range(-1.0..0.5));
    let coeffs = match (mode, role) {
        (SyntheticMode::EqualityShape, FormRole::ASubmersion) => vec![DMatrix::zeros(r, r); normals],
        (SyntheticMode::EqualityShape, _) => {
            let q = random_orthogonal(rng, r);
            (0..normals)
                .map(|_| {
                    let a = rng.gen_range(-1.0..1.0) * scale;
                    let mut d = DVector::from_element(r, a);
                    d[r - 1] = 2.0 * a;
                    &q * DMatrix::from_diagonal(&d) * q.transpose()
                })
                .collect()
        }
        (SyntheticMode::Random, _) => {
            let sign = if role.is_antisymmetric() { -1.0 } else { 1.0 };
            (0..normals)
                .map(|_| {
                    let m = DMatrix::from_fn(r, r, |_, _| rng.gen_range(-1.0..1.0) * scale);
                    (&m + m.transpose() * sign) * 0.5
                })
                .collect()
        }
    };
    let mut out = FormCoefficients::zeros(role, r, normals);
    out.coeffs = coeffs;
    out
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))
}

/// Orthonormal `r`-frame of the requested class in a Euclidean space carrying `op`.
/// `xi` (when given) is included as the first vector or kept orthogonal to the frame.
fn synthetic_frame(
    rng: &mut ChaCha8Rng,
    op: &StructureOperator,
    r: usize,
    class: InvarianceKind,
    xi: Option<(&DVector<f64>, XiBranch)>,
) -> Result<Frame> {
    let n = op.dim();
    let inner = InnerProduct::euclidean(n);
    let mut raw: Vec<DVector<f64>> = Vec::with_capacity(r);
    let mut avoid: Vec<DVector<f64>> = Vec::new();
    if let Some((x, branch)) = xi {
        match branch {
            XiBranch::Tangent => raw.push(x.clone()),
            XiBranch::Normal => avoid.push(x.clone()),
        }
    }
    let orthogonalize = |v: &mut DVector<f64>, against: &[DVector<f64>]| {
        for _ in 0..2 {
            for e in against {
                let norm = e.norm();
                // φξ = 0 contributes nothing
                if norm > 1e-12 {
                    let c = e.dot(v) / (norm * norm);
                    v.axpy(-c, e, 1.0);
                }
            }
        }
    };
    while raw.len() < r {
        let mut v = random_vector(rng, n);
        let mut against: Vec<DVector<f64>> = raw.iter().chain(&avoid).cloned().collect();
        match class {
            InvarianceKind::AntiInvariant => against.extend(raw.iter().map(|e| op.apply(e))),
            InvarianceKind::Invariant | InvarianceKind::Generic => {}
        }
        orthogonalize(&mut v, &against);
        if v.norm() < 1e-6 {
            continue;
        }
        let v = v.normalize();
        if class == InvarianceKind::Invariant {
            let mut w = op.apply(&v);
            orthogonalize(&mut w, &against);
            raw.push(v);
            raw.push(w.normalize());
        } else {
            raw.push(v);
        }
    }
    gram_schmidt(&raw, &inner)
}

/// The relevant structure and frame for a synthetic trial.
struct SyntheticModel {
    spec: SpaceFormSpec,
    frame: Frame,
    xi: Option<XiPosition>,
}

fn standard_structure(m: usize, contact: bool) -> Result<StructureOperator> {
    if contact {
        crate::models::flat_contact_structure(m)
    } else {
        crate::models::complex_structure(m)
    }
}

fn synthetic_model(rng: &mut ChaCha8Rng, theorem: TheoremId, r: usize) -> Result<SyntheticModel> {
    let contact = theorem.model() == ModelClass::GeneralizedSasakian;
    let class = match theorem.class() {
        // generic theorems see every class, including the extremes
        InvarianceKind::Generic => match rng.gen_range(0..4) {
            0 if r.is_multiple_of(2) => InvarianceKind::Invariant,
            1 => InvarianceKind::AntiInvariant,
            _ => InvarianceKind::Generic,
        },
        k => k,
    };
    let branch = if contact {
        if class == InvarianceKind::Invariant || rng.gen_bool(0.5) {
            Some(XiBranch::Normal)
        } else {
            Some(XiBranch::Tangent)
        }
    } else {
        None
    };
    // m = r leaves room for r totally real directions orthogonal to ξ
    let op = standard_structure(r, contact)?;
    let c1 = rng.gen_range(-2.0..2.0);
    let c2 = rng.gen_range(-2.0..2.0);
    let spec = if contact {
        SpaceFormSpec::generalized_sasakian(c1, c2, rng.gen_range(-2.0..2.0), op.clone())?
    } else {
        SpaceFormSpec::generalized_complex(c1, c2, op.clone())?
    };
    let xi_vec = op.xi().cloned();
    let frame = synthetic_frame(rng, &op, r, class, xi_vec.as_ref().zip(branch))?;
    let xi = match xi_vec {
        Some(x) => Some(xi_position(&frame, &x)?),
        None => None,
    };
    Ok(SyntheticModel { spec, frame, xi })
}

/// Builds one synthetic evaluation: random coefficients, a model and a frame
/// on the structured side, the right curvature from the model tensor and the
/// left curvature through the traced Gauss identity of the setting.
pub fn synthetic_evaluation(theorem: TheoremId, cfg: &SyntheticConfig, trial: u64) -> Result<Evaluation> {
    let mut rng = trial_rng(cfg.seed, trial);
    let class = theorem.class();
    let r = if class == InvarianceKind::Invariant {
        // J- and φ-invariant subspaces are even-dimensional
        let lo = cfg.r_min.max(4).div_ceil(2);
        let hi = (cfg.r_max / 2).max(lo);
        2 * rng.gen_range(lo..=hi)
    } else {
        rng.gen_range(cfg.r_min..=cfg.r_max)
    };
    let normals = rng.gen_range(1..=cfg.max_normals.max(1));
    let coeffs = synthetic_coefficients(&mut rng, theorem.role(), r, normals, cfg.mode);
    let model = synthetic_model(&mut rng, theorem, r)?;
    let inner = model.frame.inner().clone();
    let curvature = ModelCurvature::new(model.spec.clone(), inner)?;
    let right_2scal = scalar_on_vectors(&curvature, model.frame.vectors())?;
    let left_2scal = right_2scal - gauss_gap(theorem.role(), &coeffs);
    let invariance = classify_invariance(&model.frame, &model.spec.structure)?;
    let casorati = delta_casorati_with(
        &coeffs,
        &OptimizerConfig {
            seed: cfg.seed ^ trial,
            ..OptimizerConfig::default()
        },
    )?;
    Ok(Evaluation {
        coeffs,
        casorati,
        left_2scal,
        right_2scal,
        model: match theorem.model() {
            ModelClass::General => None,
            _ => Some(ModelConstants::from_spec(&model.spec)),
        },
        invariance: Some(invariance),
        xi: model.xi,
    })
}

fn random_family(rng: &mut ChaCha8Rng, name: FamilyName) -> NamedFamily {
    let c = rng.gen_range(-4.0..4.0);
    if name.takes_alpha() {
        NamedFamily::with_alpha(name, c, rng.gen_range(-2.0..2.0))
    } else {
        NamedFamily::new(name, c)
    }
}

fn run_trial(theorem: TheoremId, cfg: &SyntheticConfig, trial: u64) -> SyntheticSummary {
    let mut summary = SyntheticSummary::empty(theorem);
    summary.trials = 1;
    let eval =
        synthetic_evaluation(theorem, cfg, trial).expect("synthetic data satisfies the hypotheses by construction");
    let point = PointTag::Synthetic { seed: cfg.seed, trial };
    let mut reports = eval.reports(theorem, point).expect("synthetic hypotheses hold");
    for rep in &mut reports {
        rep.holds = holds_within(rep.residual, rep.rhs, cfg.hold_tol);
    }
    if !eval.casorati.optimizer.certified {
        summary.uncertified = 1;
    }
    for rep in &reports {
        let scaled = rep.residual / (1.0 + rep.rhs.abs());
        summary.min_residual = summary.min_residual.min(scaled);
        if !rep.holds && summary.first_counterexample.is_none() {
            summary.first_counterexample = Some(rep.clone());
        }
    }
    if reports.iter().any(|r| !r.holds) {
        summary.failures = 1;
    }
    let delta = &reports[0];
    if delta.residual > cfg.hold_tol * (1.0 + delta.rhs.abs()) {
        summary.strict = 1;
    }
    if delta.equality.is_equality_shape && delta.residual.abs() <= 1e-7 * (1.0 + delta.rhs.abs()) {
        summary.equality_hits = 1;
    }
    let mut rng = trial_rng(cfg.seed ^ 0x5eed, trial);
    let inputs = eval.inputs();
    for &name in theorem.families() {
        let fam = random_family(&mut rng, name);
        for variant in Variant::BOTH {
            let dev = specialization_deviation(theorem, variant, &fam, &inputs).expect("corollary applies");
            summary.max_specialization_deviation = summary.max_specialization_deviation.max(dev);
        }
    }
    summary
}

/// Fuzzes `theorem` over `cfg.trials` synthetic instances in parallel.
pub fn verify_synthetic(theorem: TheoremId, cfg: &SyntheticConfig) -> SyntheticSummary {
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(theorem, cfg, t))
        .reduce(|| SyntheticSummary::empty(theorem), SyntheticSummary::merge)
}

/// Derivative and curvature data of a catalog entry at one point, shared by
/// the three settings.
pub struct GeometryPoint<'a> {
    pub entry: &'a CatalogEntry,
    pub jets: PointJets,
    source_curvature: CurvatureTensor,
    target_curvature: CurvatureTensor,
}

/// One setting evaluated at a catalog point.
#[derive(Debug, Clone)]
pub struct SettingAtPoint {
    pub setting: Setting,
    pub coeffs: FormCoefficients,
    pub scalars: ScalarCurvaturePair,
    /// The subspace a structure operator is tested on: range, vertical or horizontal space.
    pub frame: Frame,
    pub structure: Option<StructureOperator>,
    pub model: Option<ModelConstants>,
}

impl<'a> GeometryPoint<'a> {
    pub fn compute(entry: &'a CatalogEntry, p: &[f64]) -> Result<Self> {
        let jets = PointJets::compute(&entry.data, p)?;
        let source_curvature = riemann_at(entry.data.source(), p)?;
        let target_curvature = riemann_at(entry.data.target(), &jets.map.image)?;
        Ok(Self {
            entry,
            jets,
            source_curvature,
            target_curvature,
        })
    }

    pub fn setting(&self, setting: Setting) -> Result<SettingAtPoint> {
        let map = &self.jets.map;
        let (coeffs, scalars, frame, side_point) = match setting {
            Setting::Map => {
                let b = second_fundamental_form_from(&self.jets);
                let pair = gauss_map_scalars(map, &b, &self.source_curvature, &self.target_curvature)?;
                (b, pair, map.range.clone(), &map.image)
            }
            Setting::Vertical => {
                let t = oneill_t_from(&self.jets)?;
                let pair = gauss_submersion_vertical(&self.entry.data, map, &t, &self.source_curvature)?;
                (t, pair, map.vertical.clone(), &map.point)
            }
            Setting::Horizontal => {
                let a = oneill_a_from(&self.jets)?;
                let pair = gauss_submersion_horizontal(map, &a, &self.source_curvature, &self.target_curvature)?;
                (a, pair, map.horizontal.clone(), &map.point)
            }
        };
        let side = self.entry.model_for(setting);
        Ok(SettingAtPoint {
            setting,
            coeffs,
            scalars,
            frame,
            structure: side.map(|m| m.structure_at(side_point)).transpose()?,
            model: side.map(SideModel::constants),
        })
    }
}

impl SettingAtPoint {
    pub fn invariance(&self) -> Result<Option<InvarianceReport>> {
        self.structure
            .as_ref()
            .map(|op| classify_invariance(&self.frame, op))
            .transpose()
    }

    pub fn xi(&self) -> Option<Result<XiPosition>> {
        let xi = self.structure.as_ref()?.xi()?;
        Some(xi_position(&self.frame, xi))
    }

    /// The evaluation feeding `theorem`. An oblique `ξ` is an error only for
    /// theorems whose right side depends on its position.
    pub fn evaluation(&self, theorem: TheoremId, seed: u64) -> Result<Evaluation> {
        let xi = match self.xi() {
            None => None,
            Some(Ok(x)) => Some(x),
            Some(Err(e)) if theorem.model() == ModelClass::GeneralizedSasakian => return Err(e),
            Some(Err(_)) => None,
        };
        let casorati = delta_casorati_with(
            &self.coeffs,
            &OptimizerConfig {
                seed,
                ..OptimizerConfig::default()
            },
        )?;
        Ok(Evaluation {
            coeffs: self.coeffs.clone(),
            casorati,
            left_2scal: self.scalars.left_2scal,
            right_2scal: self.scalars.right_2scal,
            model: self.model,
            invariance: self.invariance()?,
            xi,
        })
    }
}

/// Hypotheses that can be read off the entry without evaluating it.
fn check_entry(theorem: TheoremId, entry: &CatalogEntry) -> Result<()> {
    let setting = theorem.setting();
    if setting != Setting::Map && entry.kind != EntryKind::RiemannianSubmersion {
        return Err(Error::HypothesisViolated(format!(
            "{theorem} needs a Riemannian submersion, {} is a Riemannian map",
            entry.id
        )));
    }
    let r = entry.r_for(setting);
    if r < 3 {
        return Err(Error::HypothesisViolated(format!(
            "{theorem} needs r ≥ 3, {} has r = {r}",
            entry.id
        )));
    }
    Ok(())
}

/// Both variants of `theorem` at each of `points` of a catalog geometry.
pub fn verify_geometry(
    theorem: TheoremId,
    entry: &CatalogEntry,
    points: &[Vec<f64>],
    seed: u64,
) -> Result<Vec<InequalityReport>> {
    check_entry(theorem, entry)?;
    if entry.computation_only {
        return Err(Error::HypothesisViolated(format!(
            "{} is tagged computation-only",
            entry.id
        )));
    }
    if !entry.tags.contains(&theorem) {
        return Err(Error::HypothesisViolated(format!(
            "{} is not declared to satisfy the hypotheses of {theorem}",
            entry.id
        )));
    }
    let per_point: Vec<Vec<InequalityReport>> = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let at = GeometryPoint::compute(entry, p)?.setting(theorem.setting())?;
            let point = PointTag::Coordinates {
                geometry: entry.id.clone(),
                coordinates: p.clone(),
            };
            at.evaluation(theorem, seed ^ i as u64)?.reports(theorem, point)
        })
        .collect::<Result<_>>()?;
    Ok(per_point.into_iter().flatten().collect())
}

/// Theorems whose hypotheses the entry meets at its base point.
pub fn derive_tags(entry: &CatalogEntry) -> Result<Vec<TheoremId>> {
    let point = GeometryPoint::compute(entry, &entry.base_point)?;
    let mut settings: Vec<(Setting, Option<SettingAtPoint>)> = Vec::new();
    let mut tags = Vec::new();
    for theorem in TheoremId::ALL {
        if check_entry(theorem, entry).is_err() {
            continue;
        }
        let setting = theorem.setting();
        if !settings.iter().any(|(s, _)| *s == setting) {
            settings.push((setting, point.setting(setting).ok()));
        }
        let Some((_, Some(at))) = settings.iter().find(|(s, _)| *s == setting) else {
            continue;
        };
        let tag = PointTag::Coordinates {
            geometry: entry.id.clone(),
            coordinates: entry.base_point.clone(),
        };
        if at.evaluation(theorem, 0).and_then(|e| e.reports(theorem, tag)).is_ok() {
            tags.push(theorem);
        }
    }
    Ok(tags)
}

/// Structure data of the space-form side of a setting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureSummary {
    pub family: NamedFamily,
    pub constants: ModelConstants,
    pub invariance: InvarianceReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<XiPosition>,
    /// Why `ξ` has no branch, when it is oblique.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi_error: Option<String>,
}

/// All invariants of one setting at a point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectionReport {
    pub setting: Setting,
    pub r: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<FormCoefficients>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm_squared: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_norm_squared: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scalars: Option<ScalarCurvaturePair>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_left: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_right: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub casorati: Option<CasoratiReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equality: Option<EqualityDiagnosis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub structure: Option<StructureSummary>,
    /// Failure of this setting at the point, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SectionReport {
    fn failed(setting: Setting, r: usize, e: &Error) -> Self {
        Self {
            setting,
            r,
            coefficients: None,
            norm_squared: None,
            trace_norm_squared: None,
            scalars: None,
            rho_left: None,
            rho_right: None,
            casorati: None,
            equality: None,
            structure: None,
            error: Some(e.to_string()),
        }
    }

    pub fn quantity(&self, q: Quantity) -> Option<f64> {
        match q {
            Quantity::RhoLeft => self.rho_left,
            Quantity::RhoRight => self.rho_right,
            Quantity::TwoScalLeft => self.scalars.map(|s| s.left_2scal),
            Quantity::TwoScalRight => self.scalars.map(|s| s.right_2scal),
            Quantity::Casorati => self.casorati.as_ref().map(|c| c.c),
            Quantity::DeltaC => self.casorati.as_ref().map(|c| c.delta_c),
            Quantity::NormSquared => self.norm_squared,
        }
    }
}

/// Everything computable at one point of a catalog geometry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantsReport {
    pub geometry: String,
    pub map: MapAtPoint,
    pub sections: Vec<SectionReport>,
}

impl InvariantsReport {
    pub fn section(&self, setting: Setting) -> Option<&SectionReport> {
        self.sections.iter().find(|s| s.setting == setting)
    }
}

fn section_report(point: &GeometryPoint<'_>, setting: Setting, seed: u64) -> SectionReport {
    let r = point.entry.r_for(setting);
    let at = match point.setting(setting) {
        Ok(at) => at,
        Err(e) => return SectionReport::failed(setting, r, &e),
    };
    let structure = match (point.entry.model_for(setting), at.invariance()) {
        (Some(side), Ok(Some(invariance))) => {
            let (xi, xi_error) = match at.xi() {
                None => (None, None),
                Some(Ok(x)) => (Some(x), None),
                Some(Err(e)) => (None, Some(e.to_string())),
            };
            Some(StructureSummary {
                family: side.family,
                constants: side.constants(),
                invariance,
                xi,
                xi_error,
            })
        }
        (_, Err(e)) => return SectionReport::failed(setting, r, &e),
        _ => None,
    };
    // δ-Casorati curvatures only exist from r = 3 on
    let casorati = (at.coeffs.r >= 3)
        .then(|| {
            delta_casorati_with(
                &at.coeffs,
                &OptimizerConfig {
                    seed,
                    ..OptimizerConfig::default()
                },
            )
        })
        .transpose();
    let casorati = match casorati {
        Ok(c) => c,
        Err(e) => return SectionReport::failed(setting, r, &e),
    };
    let rho = |two: f64| (at.scalars.r >= 2).then(|| crate::curvature::normalized(two, at.scalars.r));
    SectionReport {
        setting,
        r: at.coeffs.r,
        norm_squared: Some(at.coeffs.norm_squared()),
        trace_norm_squared: Some(at.coeffs.trace_norm_squared()),
        rho_left: rho(at.scalars.left_2scal),
        rho_right: rho(at.scalars.right_2scal),
        scalars: Some(at.scalars),
        casorati,
        equality: Some(diagnose_equality(&at.coeffs)),
        structure,
        coefficients: Some(at.coeffs),
        error: None,
    }
}

/// Frames, fundamental forms, Casorati data, scalar curvatures and structure
/// data of every setting the entry supports.
pub fn invariants(entry: &CatalogEntry, p: &[f64], seed: u64) -> Result<InvariantsReport> {
    let point = GeometryPoint::compute(entry, p)?;
    let mut settings = vec![Setting::Map];
    if point.jets.map.is_submersion() {
        settings.extend([Setting::Vertical, Setting::Horizontal]);
    }
    let sections = settings.into_iter().map(|s| section_report(&point, s, seed)).collect();
    Ok(InvariantsReport {
        geometry: entry.id.clone(),
        map: point.jets.map.clone(),
        sections,
    })
}
