//! Riemannian maps and submersions at a point.
//!
//! A map is given by a coordinate function between two charts. At a point we
//! split the source tangent space into vertical (kernel) and horizontal parts,
//! the target tangent space into range and range complement, and evaluate the
//! second fundamental form `(∇F∗)`, the O'Neill tensors `T` and `A`, and the
//! three traced Gauss identities tying them to scalar curvatures.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::curvature::{christoffel, metric_first_jet, riemann_at, ChartMetric, Christoffel, CurvatureForm};
use crate::diff::{self, DiffConfig};
use crate::error::{check_dim, Error, Result};
use crate::framecore::{gram_schmidt, Frame, InnerProduct};

pub type MapFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// `ψ(p, w)`: the fiber through `p` parametrized by `w ∈ ℝ^r`, with `ψ(p, 0) = p`.
pub type FiberParam = Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>;

/// Largest horizontal isometry defect accepted as a Riemannian map.
pub const ISOMETRY_TOL: f64 = 1e-7;

/// Relative tolerance of the traced Gauss identities.
pub const GAUSS_TOL: f64 = 1e-5;

/// Relative singular-value threshold for kernel extraction.
pub const RANK_THRESHOLD: f64 = 1e-8;

/// A smooth map between two charts with its declared rank.
#[derive(Clone)]
pub struct MapChartData {
    source: ChartMetric,
    target: ChartMetric,
    map: MapFn,
    rank: usize,
    diff: DiffConfig,
    fiber: Option<FiberParam>,
}

impl fmt::Debug for MapChartData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MapChartData")
            .field("source", &self.source)
            .field("target", &self.target)
            .field("rank", &self.rank)
            .field("diff", &self.diff)
            .field("fiber", &self.fiber.is_some())
            .finish()
    }
}

impl MapChartData {
    pub fn new<F>(source: ChartMetric, target: ChartMetric, rank: usize, map: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self {
            source,
            target,
            map: Arc::new(map),
            rank,
            diff: DiffConfig::richardson(1e-3),
            fiber: None,
        }
    }

    pub fn with_diff(mut self, diff: DiffConfig) -> Self {
        self.diff = diff;
        self
    }

    /// Attaches a fiber parametrization, needed for the intrinsic fiber curvature.
    pub fn with_fiber<F>(mut self, fiber: F) -> Self
    where
        F: Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        self.fiber = Some(Arc::new(fiber));
        self
    }

    pub fn source(&self) -> &ChartMetric {
        &self.source
    }

    pub fn target(&self) -> &ChartMetric {
        &self.target
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn has_fiber(&self) -> bool {
        self.fiber.is_some()
    }

    pub fn apply(&self, p: &[f64]) -> Vec<f64> {
        (self.map)(p)
    }

    /// `m2 × m1` coordinate derivative.
    pub fn jacobian(&self, p: &[f64]) -> DMatrix<f64> {
        let cols = diff::partials(&*self.map, p, self.diff);
        let m2 = cols.first().map_or(0, Vec::len);
        DMatrix::from_fn(m2, p.len(), |g, a| cols[a][g])
    }

    /// `hess[γ][(a, b)] = ∂_a ∂_b F^γ`, symmetrized.
    pub fn hessian(&self, p: &[f64]) -> Vec<DMatrix<f64>> {
        let m1 = p.len();
        let flat = |x: &[f64]| self.jacobian(x).as_slice().to_vec();
        let outer = diff::partials(&flat, p, self.diff);
        let m2 = outer.first().map_or(0, |v| v.len() / m1.max(1));
        (0..m2)
            .map(|g| {
                // column-major jacobian: entry (g, a) sits at a * m2 + g
                let raw = DMatrix::from_fn(m1, m1, |a, b| outer[a][b * m2 + g]);
                (&raw + raw.transpose()) * 0.5
            })
            .collect()
    }

    fn check_source_point(&self, p: &[f64]) -> Result<()> {
        self.source.check_point(p, 4.0)?;
        for (index, (&value, &(low, high))) in p.iter().zip(self.source.domain()).enumerate() {
            let margin = 2.0 * self.diff.reach(value);
            if value - margin < low || value + margin > high {
                return Err(Error::OutOfDomain {
                    index,
                    value,
                    low,
                    high,
                    margin,
                });
            }
        }
        Ok(())
    }
}

/// Frames and derivative of a Riemannian map at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapAtPoint {
    pub point: Vec<f64>,
    pub image: Vec<f64>,
    pub source_dim: usize,
    pub target_dim: usize,
    pub rank: usize,
    #[serde(with = "crate::serde_util::matrix")]
    pub derivative: DMatrix<f64>,
    pub source_inner: InnerProduct,
    pub target_inner: InnerProduct,
    pub vertical: Frame,
    pub horizontal: Frame,
    pub range: Frame,
    pub range_perp: Frame,
    /// `max |⟨F∗e_i, F∗e_j⟩ − δ_ij|` over the horizontal frame.
    pub isometry_defect: f64,
    /// `max ‖F∗ v‖` over the vertical frame.
    pub kernel_defect: f64,
}

impl MapAtPoint {
    pub fn is_submersion(&self) -> bool {
        self.range_perp.is_empty()
    }

    /// `F∗e_i` for the horizontal frame.
    pub fn pushed_horizontal(&self) -> Vec<DVector<f64>> {
        self.horizontal.vectors().iter().map(|e| &self.derivative * e).collect()
    }
}

/// Numerical rank and an orthonormal (Euclidean) kernel basis of `d`.
fn rank_and_kernel(d: &DMatrix<f64>) -> (usize, Vec<DVector<f64>>) {
    let (m2, m1) = d.shape();
    let mut padded = DMatrix::zeros(m2.max(m1), m1);
    padded.view_mut((0, 0), (m2, m1)).copy_from(d);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested right singular vectors");
    let sigma = svd.singular_values;
    let smax = sigma.max();
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));
    let rank = order.iter().filter(|&&k| sigma[k] > RANK_THRESHOLD * smax).count();
    let kernel = order[rank..].iter().map(|&k| vt.row(k).transpose()).collect();
    (rank, kernel)
}

/// Evaluates the map at `p` and builds all four frames.
pub fn map_at_point(data: &MapChartData, p: &[f64]) -> Result<MapAtPoint> {
    check_dim(data.source.dim(), p.len())?;
    data.check_source_point(p)?;
    let image = data.apply(p);
    check_dim(data.target.dim(), image.len())?;
    data.target.check_point(&image, 4.0)?;
    let source_inner = data.source.inner_at(p)?;
    let target_inner = data.target.inner_at(&image)?;
    let derivative = data.jacobian(p);

    let (numerical, kernel) = rank_and_kernel(&derivative);
    if numerical != data.rank {
        return Err(Error::RankDrop {
            declared: data.rank,
            numerical,
        });
    }
    let vertical = if kernel.is_empty() {
        Frame::empty(source_inner.clone())
    } else {
        gram_schmidt(&kernel, &source_inner)?
    };
    let horizontal = vertical.complement()?;
    let pushed: Vec<DVector<f64>> = horizontal.vectors().iter().map(|e| &derivative * e).collect();
    let range = gram_schmidt(&pushed, &target_inner)?;
    let range_perp = range.complement()?;

    let mut isometry_defect: f64 = 0.0;
    for (i, a) in pushed.iter().enumerate() {
        for (j, b) in pushed.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            isometry_defect = isometry_defect.max((target_inner.dot(a, b) - target).abs());
        }
    }
    if isometry_defect > ISOMETRY_TOL {
        return Err(Error::NotRiemannian {
            defect: isometry_defect,
        });
    }
    let kernel_defect = vertical
        .vectors()
        .iter()
        .map(|v| (&derivative * v).norm())
        .fold(0.0, f64::max);

    Ok(MapAtPoint {
        point: p.to_vec(),
        image,
        source_dim: data.source.dim(),
        target_dim: data.target.dim(),
        rank: data.rank,
        derivative,
        source_inner,
        target_inner,
        vertical,
        horizontal,
        range,
        range_perp,
        isometry_defect,
        kernel_defect,
    })
}

/// Which fundamental form a coefficient array holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormRole {
    BMap,
    TSubmersion,
    ASubmersion,
}

impl FormRole {
    pub fn is_antisymmetric(self) -> bool {
        self == FormRole::ASubmersion
    }
}

/// `coeffs[α][(i, j)]` for `α < normal_count` and `i, j < r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormCoefficients {
    pub role: FormRole,
    pub r: usize,
    pub normal_count: usize,
    #[serde(with = "crate::serde_util::matrices")]
    pub coeffs: Vec<DMatrix<f64>>,
    /// Largest (anti)symmetry violation before the coefficients were projected.
    #[serde(default)]
    pub symmetry_defect: f64,
    /// Relative size of the component of `(∇F∗)` along the range (maps only).
    #[serde(default)]
    pub range_leak: f64,
}

/// Symmetry tolerance for coefficients supplied directly.
pub const SYMMETRY_TOL: f64 = 1e-9;

impl FormCoefficients {
    /// Validates shape and (anti)symmetry of supplied coefficients.
    pub fn new(role: FormRole, r: usize, coeffs: Vec<DMatrix<f64>>) -> Result<Self> {
        for m in &coeffs {
            check_dim(r, m.nrows())?;
            check_dim(r, m.ncols())?;
        }
        let out = Self {
            role,
            r,
            normal_count: coeffs.len(),
            coeffs,
            symmetry_defect: 0.0,
            range_leak: 0.0,
        };
        let defect = out.raw_symmetry_defect();
        if defect > SYMMETRY_TOL * (1.0 + out.max_abs()) {
            return Err(Error::InvalidInput(format!(
                "{role:?} coefficients violate their symmetry (defect {defect:.3e})"
            )));
        }
        Ok(Self {
            symmetry_defect: defect,
            ..out
        })
    }

    /// Projects numerically computed coefficients onto the (anti)symmetric part,
    /// recording the removed defect.
    fn from_numeric(role: FormRole, r: usize, raw: Vec<DMatrix<f64>>, range_leak: f64) -> Self {
        let mut out = Self {
            role,
            r,
            normal_count: raw.len(),
            coeffs: raw,
            symmetry_defect: 0.0,
            range_leak,
        };
        out.symmetry_defect = out.raw_symmetry_defect();
        let sign = if role.is_antisymmetric() { -1.0 } else { 1.0 };
        for m in &mut out.coeffs {
            *m = (&*m + m.transpose() * sign) * 0.5;
        }
        out
    }

    fn raw_symmetry_defect(&self) -> f64 {
        let sign = if self.role.is_antisymmetric() { -1.0 } else { 1.0 };
        self.coeffs
            .iter()
            .map(|m| (m - m.transpose() * sign).amax())
            .fold(0.0, f64::max)
    }

    pub fn zeros(role: FormRole, r: usize, normal_count: usize) -> Self {
        Self {
            role,
            r,
            normal_count,
            coeffs: vec![DMatrix::zeros(r, r); normal_count],
            symmetry_defect: 0.0,
            range_leak: 0.0,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|m| m.amax()).fold(0.0, f64::max)
    }

    /// `Σ_{α,i,j} coeffs²`.
    pub fn norm_squared(&self) -> f64 {
        self.coeffs.iter().map(|m| m.norm_squared()).sum()
    }

    /// `‖trace‖² = Σ_α (Σ_i coeffs[α][(i, i)])²`.
    pub fn trace_norm_squared(&self) -> f64 {
        self.coeffs.iter().map(|m| m.trace().powi(2)).sum()
    }

    /// Re-expresses the tangential basis through an orthogonal `q` (columns = new basis).
    pub fn reframed(&self, q: &DMatrix<f64>) -> Self {
        let coeffs = self.coeffs.iter().map(|m| q.transpose() * m * q).collect();
        Self { coeffs, ..self.clone() }
    }

    /// Re-mixes the normal index through an orthogonal `o`.
    pub fn remixed(&self, o: &DMatrix<f64>) -> Self {
        let coeffs = (0..self.normal_count)
            .map(|a| {
                let mut m = DMatrix::zeros(self.r, self.r);
                for b in 0..self.normal_count {
                    m += &self.coeffs[b] * o[(a, b)];
                }
                m
            })
            .collect();
        Self { coeffs, ..self.clone() }
    }
}

/// Derivatives gathered once per point for all three forms.
#[derive(Debug, Clone)]
pub struct PointJets {
    pub map: MapAtPoint,
    pub hessian: Vec<DMatrix<f64>>,
    pub gamma_source: Christoffel,
    pub gamma_target: Christoffel,
    pub dg_source: Vec<DMatrix<f64>>,
}

impl PointJets {
    pub fn compute(data: &MapChartData, p: &[f64]) -> Result<Self> {
        let map = map_at_point(data, p)?;
        let (_, ginv, dg_source) = metric_first_jet(&data.source, p)?;
        let gamma_source = Christoffel::from_first_jet(&ginv, &dg_source);
        let gamma_target = christoffel(&data.target, &map.image)?;
        let hessian = data.hessian(p);
        Ok(Self {
            map,
            hessian,
            gamma_source,
            gamma_target,
            dg_source,
        })
    }

    /// `(∂_u D)`: derivative of the Jacobian along `u`.
    fn d_jacobian(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let (m2, m1) = self.map.derivative.shape();
        DMatrix::from_fn(m2, m1, |g, c| (0..m1).map(|a| u[a] * self.hessian[g][(a, c)]).sum())
    }

    /// `Σ_ab H^γ_ab x^a y^b − D Γ₁(x, y) + Γ₂(Dx, Dy)`.
    pub fn second_fundamental_vector(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let d = &self.map.derivative;
        let hess = DVector::from_fn(d.nrows(), |g, _| (x.transpose() * &self.hessian[g] * y)[(0, 0)]);
        hess - d * self.gamma_source.contract(x, y) + self.gamma_target.contract(&(d * x), &(d * y))
    }

    /// `(∂_u P_hor)` where `P_hor = G⁻¹Dᵀ(DG⁻¹Dᵀ)⁻¹D` is the metric projector onto the horizontal space.
    pub fn d_horizontal_projector(&self, u: &DVector<f64>) -> Result<DMatrix<f64>> {
        let d = &self.map.derivative;
        let g = self.map.source_inner.gram();
        let ginv = g.clone().try_inverse().ok_or(Error::NearSingularMetric {
            condition: f64::INFINITY,
        })?;
        let m = d * &ginv * d.transpose();
        let minv = m.try_inverse().ok_or(Error::NotASubmersion {
            rank: self.map.rank,
            target_dim: self.map.target_dim,
        })?;
        let mut dg = DMatrix::zeros(g.nrows(), g.ncols());
        for (a, da) in self.dg_source.iter().enumerate() {
            dg += da * u[a];
        }
        let dd = self.d_jacobian(u);
        let dginv = -(&ginv * dg * &ginv);
        let dm = &dd * &ginv * d.transpose() + d * &dginv * d.transpose() + d * &ginv * dd.transpose();
        let dminv = -(&minv * dm * &minv);
        Ok(&dginv * d.transpose() * &minv * d
            + &ginv * dd.transpose() * &minv * d
            + &ginv * d.transpose() * dminv * d
            + &ginv * d.transpose() * &minv * dd)
    }
}

/// `B^α_ij = ⟨(∇F∗)(e_i, e_j), V_α⟩` on the horizontal frame.
pub fn second_fundamental_form_from(jets: &PointJets) -> FormCoefficients {
    let map = &jets.map;
    let r = map.horizontal.len();
    let normals = map.range_perp.vectors();
    let mut raw = vec![DMatrix::zeros(r, r); normals.len()];
    let mut leak: f64 = 0.0;
    for i in 0..r {
        for j in 0..r {
            let v = jets.second_fundamental_vector(map.horizontal.vector(i), map.horizontal.vector(j));
            let along_range = map.range.coordinates(&v).amax();
            leak = leak.max(along_range / (1.0 + map.target_inner.norm(&v)));
            for (a, n) in normals.iter().enumerate() {
                raw[a][(i, j)] = map.target_inner.dot(&v, n);
            }
        }
    }
    FormCoefficients::from_numeric(FormRole::BMap, r, raw, leak)
}

pub fn second_fundamental_form(data: &MapChartData, p: &[f64]) -> Result<FormCoefficients> {
    Ok(second_fundamental_form_from(&PointJets::compute(data, p)?))
}

fn require_submersion(map: &MapAtPoint) -> Result<()> {
    if !map.is_submersion() {
        return Err(Error::NotASubmersion {
            rank: map.rank,
            target_dim: map.target_dim,
        });
    }
    Ok(())
}

/// `⟨(∂_{e_i}P)e_j + Γ₁(e_i, e_j), n_α⟩` over a tangential frame and a normal frame.
fn oneill_coefficients(
    jets: &PointJets,
    role: FormRole,
    tangential: &Frame,
    normal: &Frame,
    sign: f64,
) -> Result<FormCoefficients> {
    let r = tangential.len();
    let mut raw = vec![DMatrix::zeros(r, r); normal.len()];
    for i in 0..r {
        let ei = tangential.vector(i);
        let dp = jets.d_horizontal_projector(ei)? * sign;
        for j in 0..r {
            let ej = tangential.vector(j);
            let w = &dp * ej + jets.gamma_source.contract(ei, ej);
            for (a, n) in normal.vectors().iter().enumerate() {
                raw[a][(i, j)] = jets.map.source_inner.dot(&w, n);
            }
        }
    }
    Ok(FormCoefficients::from_numeric(role, r, raw, 0.0))
}

/// `T^α_ij = ⟨T_{e_i}e_j, e_α⟩`, vertical `e_i, e_j`, horizontal `e_α`.
pub fn oneill_t_from(jets: &PointJets) -> Result<FormCoefficients> {
    require_submersion(&jets.map)?;
    // P_vert = I − P_hor, so ∂P_vert = −∂P_hor.
    oneill_coefficients(
        jets,
        FormRole::TSubmersion,
        &jets.map.vertical,
        &jets.map.horizontal,
        -1.0,
    )
}

/// `A^α_ij = ⟨A_{e_i}e_j, e_α⟩`, horizontal `e_i, e_j`, vertical `e_α`.
pub fn oneill_a_from(jets: &PointJets) -> Result<FormCoefficients> {
    require_submersion(&jets.map)?;
    oneill_coefficients(
        jets,
        FormRole::ASubmersion,
        &jets.map.horizontal,
        &jets.map.vertical,
        1.0,
    )
}

pub fn oneill_t(data: &MapChartData, p: &[f64]) -> Result<FormCoefficients> {
    oneill_t_from(&PointJets::compute(data, p)?)
}

pub fn oneill_a(data: &MapChartData, p: &[f64]) -> Result<FormCoefficients> {
    oneill_a_from(&PointJets::compute(data, p)?)
}

/// Twice the scalar curvatures on the two sides of a traced Gauss identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarCurvaturePair {
    /// The side bounded above by the inequalities.
    pub left_2scal: f64,
    pub right_2scal: f64,
    pub r: usize,
    /// Signed residual of the traced identity.
    pub identity_residual: f64,
}

impl ScalarCurvaturePair {
    pub fn left_normalized(&self) -> f64 {
        crate::curvature::normalized(self.left_2scal, self.r)
    }

    pub fn right_normalized(&self) -> f64 {
        crate::curvature::normalized(self.right_2scal, self.r)
    }

    /// `right − left`, the curvature gap entering the proof polynomials.
    pub fn gap(&self) -> f64 {
        self.right_2scal - self.left_2scal
    }

    /// Whether `r` meets the `r ≥ 3` hypothesis of the inequalities.
    pub fn theorem_eligible(&self) -> bool {
        self.r >= 3
    }

    fn checked(self, scale: f64) -> Result<Self> {
        let tolerance = GAUSS_TOL * (1.0 + scale);
        if !(self.identity_residual.abs() <= tolerance) {
            return Err(Error::GaussResidualExceeded {
                residual: self.identity_residual,
                tolerance,
            });
        }
        Ok(self)
    }
}

/// Curvature gap `right − left` predicted by each traced identity from the coefficients alone.
pub fn gauss_gap(role: FormRole, coeffs: &FormCoefficients) -> f64 {
    let norm2 = coeffs.norm_squared();
    let tr2 = coeffs.trace_norm_squared();
    match role {
        // 2scal^H = 2scal^R + ‖tr B‖² − ‖B‖²
        FormRole::BMap => norm2 - tr2,
        // 2scal_{M₁}^V = 2scal^V − ‖tr T‖² + ‖T‖²
        FormRole::TSubmersion => norm2 - tr2,
        // 2scal_H^H = 2scal^H + 3‖A‖² + ‖tr A‖²
        FormRole::ASubmersion => -3.0 * norm2 - tr2,
    }
}

/// `2scal^H` from the source curvature on the horizontal frame and `2scal^R`
/// from the target curvature on its image.
pub fn gauss_map_scalars<S, T>(
    map: &MapAtPoint,
    b: &FormCoefficients,
    source: &S,
    target: &T,
) -> Result<ScalarCurvaturePair>
where
    S: CurvatureForm + ?Sized,
    T: CurvatureForm + ?Sized,
{
    if b.role != FormRole::BMap {
        return Err(Error::InvalidInput("gauss_map_scalars needs B-map coefficients".into()));
    }
    check_dim(map.horizontal.len(), b.r)?;
    let left = crate::curvature::scalar_on_subspace(source, &map.horizontal)?;
    let right = crate::curvature::scalar_on_vectors(target, &map.pushed_horizontal())?;
    let pair = ScalarCurvaturePair {
        left_2scal: left,
        right_2scal: right,
        r: b.r,
        identity_residual: (right - left) - gauss_gap(FormRole::BMap, b),
    };
    pair.checked(left.abs().max(right.abs()).max(b.norm_squared()))
}

/// Intrinsic `2scal` of the fiber through the point, from the fiber parametrization.
pub fn fiber_scalar(data: &MapChartData, map: &MapAtPoint) -> Result<f64> {
    let fiber = data
        .fiber
        .clone()
        .ok_or_else(|| Error::InvalidInput("fiber parametrization required".into()))?;
    let r = map.vertical.len();
    if r < 2 {
        return Ok(0.0);
    }
    let base = map.point.clone();
    let source = data.source.clone();
    let pdiff = data.diff;
    let chart = ChartMetric::new("fiber", vec![(-0.5, 0.5); r], move |w| {
        let psi = |x: &[f64]| fiber(&base, x);
        let cols = diff::partials(&psi, w, pdiff);
        let m1 = cols[0].len();
        let j = DMatrix::from_fn(m1, w.len(), |a, k| cols[k][a]);
        let g = source.eval(&psi(w));
        let induced = j.transpose() * g * &j;
        (&induced + induced.transpose()) * 0.5
    })
    .with_diff(DiffConfig::richardson(2e-3));
    let origin = vec![0.0; r];
    let tensor = riemann_at(&chart, &origin)?;
    let inner = chart.inner_at(&origin)?;
    let basis: Vec<DVector<f64>> = (0..r)
        .map(|k| DVector::from_fn(r, |i, _| if i == k { 1.0 } else { 0.0 }))
        .collect();
    let frame = gram_schmidt(&basis, &inner)?;
    crate::curvature::scalar_on_subspace(&tensor, &frame)
}

/// `(2scal^V, 2scal_{M₁}^V)`: intrinsic fiber curvature and the ambient
/// curvature restricted to the vertical space.
pub fn gauss_submersion_vertical<S>(
    data: &MapChartData,
    map: &MapAtPoint,
    t: &FormCoefficients,
    source: &S,
) -> Result<ScalarCurvaturePair>
where
    S: CurvatureForm + ?Sized,
{
    require_submersion(map)?;
    if t.role != FormRole::TSubmersion {
        return Err(Error::InvalidInput(
            "vertical Gauss identity needs T coefficients".into(),
        ));
    }
    check_dim(map.vertical.len(), t.r)?;
    let left = fiber_scalar(data, map)?;
    let right = crate::curvature::scalar_on_subspace(source, &map.vertical)?;
    let pair = ScalarCurvaturePair {
        left_2scal: left,
        right_2scal: right,
        r: t.r,
        identity_residual: (right - left) - gauss_gap(FormRole::TSubmersion, t),
    };
    pair.checked(left.abs().max(right.abs()).max(t.norm_squared()))
}

/// `(2scal_H^H, 2scal^H)`: base curvature on `F∗e_i` and the ambient curvature
/// restricted to the horizontal space.
pub fn gauss_submersion_horizontal<S, T>(
    map: &MapAtPoint,
    a: &FormCoefficients,
    source: &S,
    target: &T,
) -> Result<ScalarCurvaturePair>
where
    S: CurvatureForm + ?Sized,
    T: CurvatureForm + ?Sized,
{
    require_submersion(map)?;
    if a.role != FormRole::ASubmersion {
        return Err(Error::InvalidInput(
            "horizontal Gauss identity needs A coefficients".into(),
        ));
    }
    check_dim(map.horizontal.len(), a.r)?;
    let trace = a.trace_norm_squared();
    if trace > 1e-10 * (1.0 + a.norm_squared()) {
        return Err(Error::InvalidInput(format!("A has a nonzero trace ({trace:.3e})")));
    }
    let left = crate::curvature::scalar_on_vectors(target, &map.pushed_horizontal())?;
    let right = crate::curvature::scalar_on_subspace(source, &map.horizontal)?;
    let pair = ScalarCurvaturePair {
        left_2scal: left,
        right_2scal: right,
        r: a.r,
        identity_residual: (right - left) - gauss_gap(FormRole::ASubmersion, a),
    };
    pair.checked(left.abs().max(right.abs()).max(a.norm_squared()))
}
