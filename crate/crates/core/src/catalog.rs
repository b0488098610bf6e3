//! Built-in geometries: explicit maps between charts, the structure tensors
//! of their space-form sides, and the theorem hypotheses each one meets.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curvature::ChartMetric;
use crate::error::{Error, Result};
use crate::framecore::StructureOperator;
use crate::models;
use crate::rmaps::MapChartData;
use crate::spaceforms::{FamilyName, NamedFamily, SpaceFormKind, SpaceFormSpec};
use crate::verify::{ModelConstants, Setting, TheoremId};

/// Structure operator of one side, as a function of that side's coordinates.
pub type StructureFn = Arc<dyn Fn(&[f64]) -> Result<StructureOperator> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntryKind {
    RiemannianMap,
    RiemannianSubmersion,
}

/// A space-form declaration for one side of an entry.
#[derive(Clone)]
pub struct SideModel {
    pub family: NamedFamily,
    pub kind: SpaceFormKind,
    structure: StructureFn,
}

impl fmt::Debug for SideModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SideModel")
            .field("family", &self.family)
            .field("kind", &self.kind)
            .finish()
    }
}

impl SideModel {
    pub fn new<F>(family: NamedFamily, kind: SpaceFormKind, structure: F) -> Self
    where
        F: Fn(&[f64]) -> Result<StructureOperator> + Send + Sync + 'static,
    {
        Self {
            family,
            kind,
            structure: Arc::new(structure),
        }
    }

    pub fn constants(&self) -> ModelConstants {
        ModelConstants::from_family(&self.family, self.kind)
    }

    pub fn structure_at(&self, p: &[f64]) -> Result<StructureOperator> {
        (self.structure)(p)
    }

    pub fn spec_at(&self, p: &[f64]) -> Result<SpaceFormSpec> {
        let m = self.constants();
        let op = self.structure_at(p)?;
        match self.kind {
            SpaceFormKind::GeneralizedComplex => SpaceFormSpec::generalized_complex(m.c1, m.c2, op),
            SpaceFormKind::GeneralizedSasakian => SpaceFormSpec::generalized_sasakian(m.c1, m.c2, m.c3, op),
        }
    }
}

/// Quantities with known values at every point of an entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    /// Normalized scalar curvature of the side bounded above.
    RhoLeft,
    RhoRight,
    TwoScalLeft,
    TwoScalRight,
    Casorati,
    DeltaC,
    NormSquared,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceValue {
    pub setting: Setting,
    pub quantity: Quantity,
    pub value: f64,
    pub tolerance: f64,
}

const fn reference(setting: Setting, quantity: Quantity, value: f64, tolerance: f64) -> ReferenceValue {
    ReferenceValue {
        setting,
        quantity,
        value,
        tolerance,
    }
}

/// One geometry of the catalog.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub id: String,
    pub kind: EntryKind,
    pub description: String,
    pub data: MapChartData,
    pub source_model: Option<SideModel>,
    pub target_model: Option<SideModel>,
    pub base_point: Vec<f64>,
    /// Box the sample points are drawn from; a zero-width interval pins a coordinate.
    pub sample_box: Vec<(f64, f64)>,
    pub tags: Vec<TheoremId>,
    /// Entries whose `r` is below the threshold of every inequality.
    pub computation_only: bool,
    pub reference_values: Vec<ReferenceValue>,
}

impl CatalogEntry {
    pub fn source_dim(&self) -> usize {
        self.data.source().dim()
    }

    pub fn target_dim(&self) -> usize {
        self.data.target().dim()
    }

    pub fn rank(&self) -> usize {
        self.data.rank()
    }

    /// `r` of a setting: the horizontal dimension for maps and the base,
    /// the fiber dimension for the vertical setting.
    pub fn r_for(&self, setting: Setting) -> usize {
        match setting {
            Setting::Map | Setting::Horizontal => self.rank(),
            Setting::Vertical => self.source_dim() - self.rank(),
        }
    }

    /// The space form a setting's constants refer to: the target for maps,
    /// the source for submersions.
    pub fn model_for(&self, setting: Setting) -> Option<&SideModel> {
        match setting {
            Setting::Map => self.target_model.as_ref(),
            Setting::Vertical | Setting::Horizontal => self.source_model.as_ref(),
        }
    }

    pub fn summary(&self) -> EntrySummary {
        EntrySummary {
            id: self.id.clone(),
            kind: self.kind,
            description: self.description.clone(),
            source_chart: self.data.source().name().to_string(),
            target_chart: self.data.target().name().to_string(),
            source_dim: self.source_dim(),
            target_dim: self.target_dim(),
            r: self.rank(),
            vertical_r: self.source_dim() - self.rank(),
            source_model: self.source_model.as_ref().map(|m| m.family),
            target_model: self.target_model.as_ref().map(|m| m.family),
            tags: self.tags.clone(),
            computation_only: self.computation_only,
            base_point: self.base_point.clone(),
            reference_values: self.reference_values.clone(),
        }
    }
}

/// Serializable view of an entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntrySummary {
    pub id: String,
    pub kind: EntryKind,
    pub description: String,
    pub source_chart: String,
    pub target_chart: String,
    pub source_dim: usize,
    pub target_dim: usize,
    /// Rank of the map, the dimension of its horizontal space.
    pub r: usize,
    pub vertical_r: usize,
    pub source_model: Option<NamedFamily>,
    pub target_model: Option<NamedFamily>,
    pub tags: Vec<TheoremId>,
    pub computation_only: bool,
    pub base_point: Vec<f64>,
    pub reference_values: Vec<ReferenceValue>,
}

fn flat_complex(n: usize) -> SideModel {
    SideModel::new(
        NamedFamily::new(FamilyName::Real, 0.0),
        SpaceFormKind::GeneralizedComplex,
        move |_| models::complex_structure(n),
    )
}

fn flat_cosymplectic(m: usize) -> SideModel {
    SideModel::new(
        NamedFamily::new(FamilyName::Cosymplectic, 0.0),
        SpaceFormKind::GeneralizedSasakian,
        move |_| models::flat_contact_structure(m),
    )
}

fn complex_projective(n: usize) -> SideModel {
    SideModel::new(
        NamedFamily::new(FamilyName::Complex, 4.0),
        SpaceFormKind::GeneralizedComplex,
        move |_| models::complex_structure(n),
    )
}

fn line_times_complex_projective(n: usize) -> SideModel {
    SideModel::new(
        NamedFamily::new(FamilyName::Cosymplectic, 4.0),
        SpaceFormKind::GeneralizedSasakian,
        move |_| models::line_times_complex_structure(n),
    )
}

fn sasakian_heisenberg(n: usize) -> SideModel {
    SideModel::new(
        NamedFamily::new(FamilyName::Sasakian, -3.0),
        SpaceFormKind::GeneralizedSasakian,
        move |p| models::sasakian_structure(n, p),
    )
}

fn sasakian_sphere(j: DMatrix<f64>) -> SideModel {
    SideModel::new(
        NamedFamily::new(FamilyName::Sasakian, 1.0),
        SpaceFormKind::GeneralizedSasakian,
        move |u| models::sphere_sasakian_structure(u, &j),
    )
}

fn scaled_euclidean(name: &str, n: usize, scale: f64, extent: f64) -> ChartMetric {
    ChartMetric::new(name, vec![(-extent, extent); n], move |_| {
        DMatrix::identity(n, n) * scale
    })
}

/// Orthogonal projection of `ℝ^n` onto the coordinates in `keep`.
fn projection(
    id: &str,
    n: usize,
    keep: Vec<usize>,
    source_model: Option<SideModel>,
    tags: Vec<TheoremId>,
) -> CatalogEntry {
    let k = keep.len();
    let dropped: Vec<usize> = (0..n).filter(|i| !keep.contains(i)).collect();
    let map_keep = keep.clone();
    let data = MapChartData::new(
        ChartMetric::euclidean(n, 2.0),
        ChartMetric::euclidean(k, 2.0),
        k,
        move |p| map_keep.iter().map(|&i| p[i]).collect(),
    )
    .with_fiber(move |p, w| {
        let mut q = p.to_vec();
        for (slot, &i) in dropped.iter().enumerate() {
            q[i] += w[slot];
        }
        q
    });
    CatalogEntry {
        id: id.into(),
        kind: EntryKind::RiemannianSubmersion,
        description: format!("projection of R^{n} onto the coordinates {keep:?}"),
        data,
        source_model,
        target_model: None,
        base_point: (0..n).map(|i| 0.3 - 0.15 * i as f64).collect(),
        sample_box: vec![(-1.0, 1.0); n],
        tags,
        computation_only: false,
        reference_values: [Setting::Vertical, Setting::Horizontal]
            .into_iter()
            .flat_map(|s| {
                [
                    reference(s, Quantity::NormSquared, 0.0, 1e-9),
                    reference(s, Quantity::TwoScalLeft, 0.0, 1e-9),
                ]
            })
            .collect(),
    }
}

fn sphere_immersion() -> CatalogEntry {
    let data = MapChartData::new(
        models::hyperspherical_sphere(3),
        ChartMetric::euclidean(4, 3.0),
        3,
        models::hyperspherical_embedding,
    );
    CatalogEntry {
        id: "sphere-immersion-S3".into(),
        kind: EntryKind::RiemannianMap,
        description: "unit sphere S^3 in R^4 = C^2, hyperspherical angles".into(),
        data,
        source_model: None,
        target_model: Some(flat_complex(2)),
        base_point: vec![1.1, 1.3, 0.4],
        sample_box: vec![(0.6, 2.5), (0.6, 2.5), (-2.5, 2.5)],
        tags: vec![TheoremId::MapGeneral, TheoremId::MapGcsf],
        computation_only: false,
        reference_values: vec![
            reference(Setting::Map, Quantity::RhoLeft, 1.0, 1e-6),
            reference(Setting::Map, Quantity::RhoRight, 0.0, 1e-6),
            reference(Setting::Map, Quantity::Casorati, 1.0, 1e-6),
            reference(Setting::Map, Quantity::DeltaC, 7.0 / 6.0, 1e-6),
        ],
    }
}

/// Totally geodesic `CP^k ⊂ CP^n` as `z ↦ (z, 0)`.
fn fubini_study_slice(id: &str, k: usize, n: usize, tags: Vec<TheoremId>) -> CatalogEntry {
    let data = MapChartData::new(
        models::fubini_study(k, 3.0),
        models::fubini_study(n, 3.0),
        2 * k,
        move |p| {
            let mut q = p.to_vec();
            q.resize(2 * n, 0.0);
            q
        },
    );
    let rho = 4.0 * k as f64 * (k as f64 + 1.0) / (2.0 * k as f64 * (2.0 * k as f64 - 1.0));
    CatalogEntry {
        id: id.into(),
        kind: EntryKind::RiemannianMap,
        description: format!("totally geodesic CP^{k} in CP^{n}, Fubini-Study metrics of holomorphic curvature 4"),
        data,
        source_model: None,
        target_model: Some(complex_projective(n)),
        base_point: (0..2 * k).map(|i| 0.3 - 0.2 * i as f64).collect(),
        sample_box: vec![(-1.0, 1.0); 2 * k],
        computation_only: 2 * k < 3,
        tags,
        reference_values: vec![
            reference(Setting::Map, Quantity::RhoLeft, rho, 1e-5),
            reference(Setting::Map, Quantity::NormSquared, 0.0, 1e-8),
        ],
    }
}

fn product_projection() -> CatalogEntry {
    let data = MapChartData::new(
        models::line_times_fubini_study(2, 3.0),
        models::fubini_study(2, 3.0),
        4,
        |p| p[1..].to_vec(),
    )
    .with_fiber(|p, w| {
        let mut q = p.to_vec();
        q[0] += w[0];
        q
    });
    CatalogEntry {
        id: "product-projection-R1xCP2".into(),
        kind: EntryKind::RiemannianSubmersion,
        description: "projection R x CP^2 -> CP^2 off the cosymplectic product".into(),
        data,
        source_model: Some(line_times_complex_projective(2)),
        target_model: Some(complex_projective(2)),
        base_point: vec![0.2, 0.3, -0.1, 0.25, 0.4],
        sample_box: vec![(-1.0, 1.0); 5],
        tags: vec![
            TheoremId::MapGeneral,
            TheoremId::MapGcsf,
            TheoremId::MapGcsfInvariant,
            TheoremId::SubHorGeneral,
            TheoremId::SubHorGssf,
        ],
        computation_only: false,
        reference_values: vec![
            reference(Setting::Map, Quantity::RhoLeft, 2.0, 1e-5),
            reference(Setting::Horizontal, Quantity::RhoLeft, 2.0, 1e-5),
            reference(Setting::Horizontal, Quantity::NormSquared, 0.0, 1e-8),
        ],
    }
}

fn fubini_study_in_product() -> CatalogEntry {
    let data = MapChartData::new(
        models::fubini_study(2, 3.0),
        models::line_times_fubini_study(2, 3.0),
        4,
        |p| {
            let mut q = vec![0.0];
            q.extend_from_slice(p);
            q
        },
    );
    CatalogEntry {
        id: "fubini-study-slice-CP2-R1xCP2".into(),
        kind: EntryKind::RiemannianMap,
        description: "slice {0} x CP^2 of the cosymplectic product R x CP^2".into(),
        data,
        source_model: None,
        target_model: Some(line_times_complex_projective(2)),
        base_point: vec![0.3, -0.1, 0.25, 0.4],
        sample_box: vec![(-1.0, 1.0); 4],
        tags: vec![TheoremId::MapGeneral, TheoremId::MapGssf, TheoremId::MapGssfInvariant],
        computation_only: false,
        reference_values: vec![
            reference(Setting::Map, Quantity::RhoLeft, 2.0, 1e-5),
            reference(Setting::Map, Quantity::NormSquared, 0.0, 1e-8),
        ],
    }
}

fn real_slice() -> CatalogEntry {
    let data = MapChartData::new(ChartMetric::euclidean(3, 2.0), ChartMetric::euclidean(6, 2.0), 3, |p| {
        vec![p[0], 0.0, p[1], 0.0, p[2], 0.0]
    });
    CatalogEntry {
        id: "real-slice-R3-C3".into(),
        kind: EntryKind::RiemannianMap,
        description: "totally real R^3 in C^3".into(),
        data,
        source_model: None,
        target_model: Some(flat_complex(3)),
        base_point: vec![0.3, -0.2, 0.5],
        sample_box: vec![(-1.0, 1.0); 3],
        tags: vec![
            TheoremId::MapGeneral,
            TheoremId::MapGcsf,
            TheoremId::MapGcsfAntiInvariant,
        ],
        computation_only: false,
        reference_values: vec![reference(Setting::Map, Quantity::NormSquared, 0.0, 1e-9)],
    }
}

fn heisenberg_slice() -> CatalogEntry {
    let data = MapChartData::new(models::sasakian_space(1, 2.0), models::sasakian_space(2, 2.0), 3, |p| {
        vec![p[0], 0.0, p[1], 0.0, p[2]]
    });
    CatalogEntry {
        id: "heisenberg-H3-in-R5".into(),
        kind: EntryKind::RiemannianMap,
        description: "Sasakian R^3 as the slice x2 = y2 = 0 of the Sasakian R^5, xi tangent".into(),
        data,
        source_model: Some(sasakian_heisenberg(1)),
        target_model: Some(sasakian_heisenberg(2)),
        base_point: vec![0.3, -0.4, 0.2],
        sample_box: vec![(-1.0, 1.0); 3],
        tags: vec![TheoremId::MapGeneral, TheoremId::MapGssf],
        computation_only: false,
        reference_values: vec![
            reference(Setting::Map, Quantity::RhoLeft, -1.0 / 3.0, 1e-5),
            reference(Setting::Map, Quantity::NormSquared, 0.0, 1e-8),
        ],
    }
}

fn legendre_slice() -> CatalogEntry {
    let data = MapChartData::new(
        scaled_euclidean("quarter-euclidean-R3", 3, 0.25, 2.0),
        models::sasakian_space(3, 2.0),
        3,
        |p| vec![p[0], p[1], p[2], 0.0, 0.0, 0.0, 0.0],
    );
    CatalogEntry {
        id: "legendre-R3-in-R7".into(),
        kind: EntryKind::RiemannianMap,
        description: "Legendrian slice y = 0, z = 0 of the Sasakian R^7, xi normal".into(),
        data,
        source_model: None,
        target_model: Some(sasakian_heisenberg(3)),
        base_point: vec![0.3, -0.4, 0.2],
        sample_box: vec![(-1.0, 1.0); 3],
        tags: vec![
            TheoremId::MapGeneral,
            TheoremId::MapGssf,
            TheoremId::MapGssfAntiInvariant,
        ],
        computation_only: false,
        reference_values: vec![
            reference(Setting::Map, Quantity::RhoLeft, 0.0, 1e-6),
            reference(Setting::Map, Quantity::NormSquared, 0.0, 1e-8),
        ],
    }
}

fn warped_product() -> CatalogEntry {
    let data = MapChartData::new(
        models::exponential_warped(3, 2.0),
        ChartMetric::euclidean(1, 2.0),
        1,
        |p| vec![p[0]],
    )
    .with_fiber(|p, w| vec![p[0], p[1] + w[0], p[2] + w[1], p[3] + w[2]]);
    CatalogEntry {
        id: "warped-product-R-x-R3".into(),
        kind: EntryKind::RiemannianSubmersion,
        description: "hyperbolic space as R x_{e^t} R^3 onto the t-line, horosphere fibers".into(),
        data,
        source_model: Some(SideModel::new(
            NamedFamily::new(FamilyName::Real, -1.0),
            SpaceFormKind::GeneralizedComplex,
            models::warped_complex_structure,
        )),
        target_model: None,
        base_point: vec![0.0, 0.2, -0.1, 0.3],
        sample_box: vec![(-1.0, 1.0); 4],
        tags: vec![TheoremId::SubVertGeneral, TheoremId::SubVertGcsf],
        computation_only: false,
        reference_values: vec![
            reference(Setting::Vertical, Quantity::TwoScalLeft, 0.0, 1e-4),
            reference(Setting::Vertical, Quantity::TwoScalRight, -6.0, 1e-4),
            reference(Setting::Vertical, Quantity::NormSquared, 3.0, 1e-5),
            reference(Setting::Vertical, Quantity::Casorati, 1.0, 1e-5),
        ],
    }
}

fn quaternionic_hopf() -> CatalogEntry {
    let data = MapChartData::new(
        models::stereographic_sphere(7, 1.0, 0.6),
        models::stereographic_sphere(4, 0.5, 2.0),
        4,
        models::quaternionic_hopf,
    )
    .with_fiber(models::quaternionic_hopf_fiber);
    CatalogEntry {
        id: "quaternionic-hopf-S7-S4".into(),
        kind: EntryKind::RiemannianSubmersion,
        description: "quaternionic Hopf fibration S^7 -> S^4(1/2), stereographic charts".into(),
        data,
        source_model: Some(sasakian_sphere(models::quaternionic_right_i())),
        target_model: None,
        base_point: vec![0.1, -0.05, 0.2, 0.0, 0.15, -0.1, 0.05],
        sample_box: vec![(-0.3, 0.3); 7],
        tags: vec![
            TheoremId::SubVertGeneral,
            TheoremId::SubVertGssf,
            TheoremId::SubHorGeneral,
            TheoremId::SubHorGssf,
        ],
        computation_only: false,
        reference_values: vec![
            reference(Setting::Vertical, Quantity::NormSquared, 0.0, 1e-6),
            reference(Setting::Vertical, Quantity::TwoScalLeft, 6.0, 1e-3),
            reference(Setting::Horizontal, Quantity::RhoLeft, 4.0, 1e-3),
            reference(Setting::Horizontal, Quantity::NormSquared, 12.0, 1e-2),
        ],
    }
}

fn complex_hopf() -> CatalogEntry {
    let data = MapChartData::new(
        models::stereographic_sphere(3, 1.0, 0.6),
        models::stereographic_sphere(2, 0.5, 2.0),
        2,
        models::complex_hopf,
    )
    .with_fiber(models::complex_hopf_fiber);
    CatalogEntry {
        id: "complex-hopf-S3-S2".into(),
        kind: EntryKind::RiemannianSubmersion,
        description: "Hopf fibration S^3 -> S^2(1/2); r = 2 horizontally, 1 vertically".into(),
        data,
        source_model: Some(sasakian_sphere(models::standard_complex_structure(2))),
        target_model: None,
        base_point: vec![0.1, -0.2, 0.15],
        sample_box: vec![(-0.3, 0.3); 3],
        tags: vec![],
        computation_only: true,
        reference_values: vec![
            reference(Setting::Horizontal, Quantity::TwoScalLeft, 8.0, 1e-3),
            reference(Setting::Horizontal, Quantity::NormSquared, 2.0, 1e-3),
        ],
    }
}

/// `(x₁, x₂, y₁, y₂, z) ↦ (x₁, y₁)` onto `(ℝ², ¼δ)`; the fibers contain `ξ`.
fn sasakian_vertical_xi() -> CatalogEntry {
    let data = MapChartData::new(
        models::sasakian_space(2, 2.0),
        scaled_euclidean("quarter-euclidean-R2", 2, 0.25, 2.0),
        2,
        |p| vec![p[0], p[2]],
    )
    .with_fiber(|p, w| vec![p[0], p[1] + w[0], p[2], p[3] + w[1], p[4] + w[2]]);
    CatalogEntry {
        id: "sasakian-R5-model".into(),
        kind: EntryKind::RiemannianSubmersion,
        description: "Sasakian R^5 onto the (x1, y1) plane; xi vertical".into(),
        data,
        source_model: Some(sasakian_heisenberg(2)),
        target_model: None,
        base_point: vec![0.2, -0.3, 0.1, 0.4, 0.25],
        sample_box: vec![(-1.0, 1.0); 5],
        tags: vec![TheoremId::SubVertGeneral, TheoremId::SubVertGssf],
        computation_only: false,
        reference_values: vec![reference(Setting::Vertical, Quantity::RhoLeft, -1.0 / 3.0, 1e-4)],
    }
}

/// Quotient of the Sasakian `ℝ⁵` by the isometric ℝ²-action generated by
/// `∂_{x₂}` and `∂_{y₁} + x₁∂_z`. On the locus `x₁ = y₂ = 0` the vertical
/// space is orthogonal to `ξ`; elsewhere `ξ` is oblique.
fn sasakian_horizontal_xi() -> CatalogEntry {
    let target = ChartMetric::new("heisenberg-quotient-R3", vec![(-3.0, 3.0); 3], |q| {
        let mut g = DMatrix::identity(3, 3) * 0.25;
        g[(2, 2)] = 0.25 / (1.0 + q[0] * q[0] + q[1] * q[1]);
        g
    });
    let data = MapChartData::new(models::sasakian_space(2, 2.0), target, 3, |p| {
        vec![p[0], p[3], p[4] - p[0] * p[2]]
    })
    .with_fiber(|p, w| vec![p[0], p[1] + w[0], p[2] + w[1], p[3], p[4] + w[1] * p[0]]);
    CatalogEntry {
        id: "sasakian-R5-model-xi-horizontal".into(),
        kind: EntryKind::RiemannianSubmersion,
        description: "Sasakian R^5 modulo an isometric R^2-action; xi horizontal on x1 = y2 = 0".into(),
        data,
        source_model: Some(sasakian_heisenberg(2)),
        target_model: None,
        base_point: vec![0.0, 0.2, -0.3, 0.0, 0.25],
        sample_box: vec![(0.0, 0.0), (-1.0, 1.0), (-1.0, 1.0), (0.0, 0.0), (-1.0, 1.0)],
        tags: vec![TheoremId::SubHorGeneral, TheoremId::SubHorGssf],
        computation_only: false,
        reference_values: vec![],
    }
}

fn build() -> Vec<CatalogEntry> {
    use TheoremId::*;
    vec![
        projection(
            "euclidean-projection-5-2",
            5,
            vec![0, 1],
            Some(flat_cosymplectic(2)),
            vec![SubVertGeneral, SubVertGssf],
        ),
        projection(
            "euclidean-projection-6-2",
            6,
            vec![0, 1],
            Some(flat_complex(3)),
            vec![SubVertGeneral, SubVertGcsf, SubVertGcsfInv],
        ),
        projection(
            "euclidean-projection-6-3",
            6,
            vec![1, 3, 5],
            Some(flat_complex(3)),
            vec![
                MapGeneral,
                SubVertGeneral,
                SubVertGcsf,
                SubVertGcsfAnti,
                SubHorGeneral,
                SubHorGcsf,
            ],
        ),
        projection(
            "euclidean-projection-7-3",
            7,
            vec![0, 1, 6],
            Some(flat_cosymplectic(3)),
            vec![
                MapGeneral,
                SubVertGeneral,
                SubVertGssf,
                SubVertGssfInv,
                SubHorGeneral,
                SubHorGssf,
            ],
        ),
        projection(
            "euclidean-projection-7-3-real",
            7,
            vec![1, 3, 5],
            Some(flat_cosymplectic(3)),
            vec![
                MapGeneral,
                SubVertGeneral,
                SubVertGssf,
                SubVertGssfAnti,
                SubHorGeneral,
                SubHorGssf,
            ],
        ),
        sphere_immersion(),
        fubini_study_slice("fubini-study-line-CP1-CP2", 1, 2, vec![]),
        fubini_study_slice(
            "fubini-study-plane-CP2-CP3",
            2,
            3,
            vec![MapGeneral, MapGcsf, MapGcsfInvariant],
        ),
        product_projection(),
        fubini_study_in_product(),
        real_slice(),
        heisenberg_slice(),
        legendre_slice(),
        warped_product(),
        quaternionic_hopf(),
        complex_hopf(),
        sasakian_vertical_xi(),
        sasakian_horizontal_xi(),
    ]
}

/// All built-in entries in their fixed order.
pub fn entries() -> Vec<CatalogEntry> {
    build()
}

pub fn list_entries() -> Vec<EntrySummary> {
    build().iter().map(CatalogEntry::summary).collect()
}

pub fn ids() -> Vec<String> {
    build().into_iter().map(|e| e.id).collect()
}

pub fn get(id: &str) -> Result<CatalogEntry> {
    build()
        .into_iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::Unknown(format!("geometry {id}")))
}

/// `n` points drawn uniformly from the entry's sample box.
pub fn sample_points(entry: &CatalogEntry, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            entry
                .sample_box
                .iter()
                .map(|&(lo, hi)| if hi > lo { rng.gen_range(lo..hi) } else { lo })
                .collect()
        })
        .collect()
}

/// Flat structure carried by the source of a file-defined projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlatStructure {
    #[default]
    None,
    /// `J` pairing coordinates `(0, 1), (2, 3), …`; needs even dimension.
    Complex,
    /// `φ = J ⊕ 0` with `ξ` the last coordinate; needs odd dimension.
    Cosymplectic,
}

/// A builtin chart family with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builtin", content = "params", rename_all = "kebab-case")]
pub enum Builtin {
    /// A catalog entry, possibly with a different base point or sample box.
    Catalog { id: String },
    EuclideanProjection {
        dim: usize,
        keep: Vec<usize>,
        #[serde(default)]
        structure: FlatStructure,
    },
    /// Totally geodesic `CP^k ⊂ CP^n`.
    FubiniStudySlice { k: usize, n: usize },
}

/// A geometry description read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryFile {
    pub id: String,
    #[serde(default)]
    pub description: Option<String>,
    #[serde(flatten)]
    pub builtin: Builtin,
    #[serde(default)]
    pub base_point: Option<Vec<f64>>,
    #[serde(default)]
    pub sample_box: Option<Vec<(f64, f64)>>,
    /// Theorems the geometry is claimed to feed; derived from the data when absent.
    #[serde(default)]
    pub tags: Option<Vec<TheoremId>>,
}

impl GeometryFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("geometry file: {e}")))
    }

    /// Builds the entry. Tags are kept as given; [`crate::verify::derive_tags`]
    /// fills them in when the file has none.
    pub fn instantiate(&self) -> Result<CatalogEntry> {
        let mut entry = match &self.builtin {
            Builtin::Catalog { id } => get(id)?,
            Builtin::EuclideanProjection { dim, keep, structure } => {
                let n = *dim;
                if keep.is_empty() || keep.len() >= n || keep.iter().any(|&i| i >= n) {
                    return Err(Error::InvalidInput(format!(
                        "cannot keep {keep:?} out of {n} coordinates"
                    )));
                }
                let mut sorted = keep.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != keep.len() {
                    return Err(Error::InvalidInput(format!("repeated coordinates in {keep:?}")));
                }
                let model = match structure {
                    FlatStructure::None => None,
                    FlatStructure::Complex if n % 2 == 0 => Some(flat_complex(n / 2)),
                    FlatStructure::Cosymplectic if n % 2 == 1 => Some(flat_cosymplectic(n / 2)),
                    _ => {
                        return Err(Error::InvalidInput(format!(
                            "structure {structure:?} does not fit dimension {n}"
                        )))
                    }
                };
                projection(&self.id, n, keep.clone(), model, vec![])
            }
            Builtin::FubiniStudySlice { k, n } => {
                if *k == 0 || k >= n {
                    return Err(Error::InvalidInput(format!("need 0 < k < n, got k = {k}, n = {n}")));
                }
                fubini_study_slice(&self.id, *k, *n, vec![])
            }
        };
        entry.id = self.id.clone();
        if let Some(d) = &self.description {
            entry.description = d.clone();
        }
        if let Some(p) = &self.base_point {
            if p.len() != entry.source_dim() {
                return Err(Error::DimensionMismatch {
                    expected: entry.source_dim(),
                    found: p.len(),
                });
            }
            entry.base_point = p.clone();
        }
        if let Some(b) = &self.sample_box {
            if b.len() != entry.source_dim() || b.iter().any(|&(lo, hi)| !(lo <= hi)) {
                return Err(Error::InvalidInput(
                    "sample box must give one ordered interval per coordinate".into(),
                ));
            }
            entry.sample_box = b.clone();
        }
        if let Some(t) = &self.tags {
            entry.tags = t.clone();
        }
        Ok(entry)
    }
}
