//! Christoffel symbols and the Riemann tensor of a coordinate chart by
//! numerical differentiation of the metric.
//!
//! Conventions: `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]}Z` and
//! `R_{ijkl} = ⟨R(∂_i,∂_j)∂_k, ∂_l⟩`, so the unit sphere has
//! `⟨R(X,Y)Y,X⟩ = +1` on orthonormal pairs.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::diff::{self, DiffConfig};
use crate::error::{check_dim, Error, Result};
use crate::framecore::{Frame, InnerProduct};

pub type MetricFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// Condition number above which a metric is rejected.
pub const MAX_CONDITION: f64 = 1e8;

/// A chart with a smooth metric-component function and a validity box.
#[derive(Clone)]
pub struct ChartMetric {
    name: String,
    dim: usize,
    domain: Vec<(f64, f64)>,
    metric_fn: MetricFn,
    diff: DiffConfig,
}

impl fmt::Debug for ChartMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChartMetric")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("domain", &self.domain)
            .field("diff", &self.diff)
            .finish()
    }
}

impl ChartMetric {
    pub fn new<F>(name: impl Into<String>, domain: Vec<(f64, f64)>, metric_fn: F) -> Self
    where
        F: Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            dim: domain.len(),
            domain,
            metric_fn: Arc::new(metric_fn),
            diff: DiffConfig::default(),
        }
    }

    /// Flat metric on the box `[-extent, extent]^dim`.
    pub fn euclidean(dim: usize, extent: f64) -> Self {
        Self::new(format!("euclidean-{dim}"), vec![(-extent, extent); dim], move |_| {
            DMatrix::identity(dim, dim)
        })
    }

    pub fn with_diff(mut self, diff: DiffConfig) -> Self {
        self.diff = diff;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    pub fn diff(&self) -> DiffConfig {
        self.diff
    }

    /// Raw metric components without domain checks.
    pub fn eval(&self, p: &[f64]) -> DMatrix<f64> {
        (self.metric_fn)(p)
    }

    /// Fails unless every coordinate lies inside the box by at least `margin_steps` reaches.
    pub fn check_point(&self, p: &[f64], margin_steps: f64) -> Result<()> {
        check_dim(self.dim, p.len())?;
        for (index, (&value, &(low, high))) in p.iter().zip(&self.domain).enumerate() {
            let margin = margin_steps * self.diff.reach(value);
            if !value.is_finite() || value - margin < low || value + margin > high {
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

    /// Validated metric at an interior point.
    pub fn metric_at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        self.check_point(p, 0.0)?;
        let g = self.eval(p);
        check_dim(self.dim, g.nrows())?;
        check_condition(&g)?;
        Ok(g)
    }

    pub fn inner_at(&self, p: &[f64]) -> Result<InnerProduct> {
        InnerProduct::new(self.metric_at(p)?)
    }
}

fn check_condition(g: &DMatrix<f64>) -> Result<()> {
    let eig = g.clone().symmetric_eigen().eigenvalues;
    let lo = eig.min();
    let hi = eig.max();
    if !(lo > 0.0) || hi / lo > MAX_CONDITION {
        return Err(Error::NearSingularMetric {
            condition: if lo > 0.0 { hi / lo } else { f64::INFINITY },
        });
    }
    Ok(())
}

fn flatten(m: &DMatrix<f64>) -> Vec<f64> {
    m.as_slice().to_vec()
}

fn unflatten(n: usize, v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_column_slice(n, n, v)
}

/// The metric with its first and second coordinate derivatives at a point.
#[derive(Debug, Clone)]
pub struct MetricJet {
    pub g: DMatrix<f64>,
    pub ginv: DMatrix<f64>,
    /// `dg[a] = ∂_a g`.
    pub dg: Vec<DMatrix<f64>>,
    /// `ddg[a][b] = ∂_a ∂_b g`, symmetrized in `(a, b)`.
    pub ddg: Vec<Vec<DMatrix<f64>>>,
}

fn first_derivatives(chart: &ChartMetric, p: &[f64]) -> Vec<DMatrix<f64>> {
    let n = chart.dim;
    let f = |x: &[f64]| flatten(&chart.eval(x));
    diff::partials(&f, p, chart.diff)
        .into_iter()
        .map(|v| unflatten(n, &v))
        .collect()
}

/// Metric, inverse and first derivatives only.
pub fn metric_first_jet(chart: &ChartMetric, p: &[f64]) -> Result<(DMatrix<f64>, DMatrix<f64>, Vec<DMatrix<f64>>)> {
    chart.check_point(p, 1.0)?;
    let g = chart.metric_at(p)?;
    let ginv = g.clone().try_inverse().ok_or(Error::NearSingularMetric {
        condition: f64::INFINITY,
    })?;
    Ok((g, ginv, first_derivatives(chart, p)))
}

pub fn metric_jet(chart: &ChartMetric, p: &[f64]) -> Result<MetricJet> {
    chart.check_point(p, 2.0)?;
    let (g, ginv, dg) = metric_first_jet(chart, p)?;
    let n = chart.dim;
    let inner = |x: &[f64]| {
        first_derivatives(chart, x)
            .iter()
            .flat_map(flatten)
            .collect::<Vec<f64>>()
    };
    let outer = diff::partials(&inner, p, chart.diff);
    let mut ddg = vec![vec![DMatrix::zeros(n, n); n]; n];
    for a in 0..n {
        for b in 0..n {
            let ab = unflatten(n, &outer[a][b * n * n..(b + 1) * n * n]);
            let ba = unflatten(n, &outer[b][a * n * n..(a + 1) * n * n]);
            ddg[a][b] = (ab + ba) * 0.5;
        }
    }
    Ok(MetricJet { g, ginv, dg, ddg })
}

/// `Γ^k_{ij}` stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn idx(&self, k: usize, i: usize, j: usize) -> usize {
        (k * self.dim + i) * self.dim + j
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[self.idx(k, i, j)]
    }

    /// `Γ(x, y)^k = Γ^k_{ij} x^i y^j`.
    pub fn contract(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let n = self.dim;
        DVector::from_fn(n, |k, _| {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += self.get(k, i, j) * x[i] * y[j];
                }
            }
            s
        })
    }

    pub fn from_first_jet(ginv: &DMatrix<f64>, dg: &[DMatrix<f64>]) -> Self {
        let n = ginv.nrows();
        let mut out = Self::zeros(n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for l in 0..n {
                        s += ginv[(k, l)] * (dg[i][(l, j)] + dg[j][(l, i)] - dg[l][(i, j)]);
                    }
                    let idx = out.idx(k, i, j);
                    out.data[idx] = 0.5 * s;
                }
            }
        }
        out
    }
}

pub fn christoffel(chart: &ChartMetric, p: &[f64]) -> Result<Christoffel> {
    chart.check_point(p, 2.0)?;
    let (_, ginv, dg) = metric_first_jet(chart, p)?;
    Ok(Christoffel::from_first_jet(&ginv, &dg))
}

/// Anything that evaluates `⟨R(x,y)z, w⟩`.
pub trait CurvatureForm {
    fn dim(&self) -> usize;
    fn form(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>, w: &DVector<f64>) -> f64;
}

/// Dense `R_{ijkl}` at one point, with the metric there for index raising.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensor {
    dim: usize,
    data: Vec<f64>,
    metric: DMatrix<f64>,
}

/// Largest violations of the algebraic curvature identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryDefects {
    pub antisym_first: f64,
    pub antisym_last: f64,
    pub pair: f64,
    pub bianchi: f64,
    pub max_abs: f64,
}

impl CurvatureTensor {
    pub fn zeros(metric: DMatrix<f64>) -> Self {
        let dim = metric.nrows();
        Self {
            dim,
            data: vec![0.0; dim.pow(4)],
            metric,
        }
    }

    /// Tabulates any curvature form on coordinate vectors.
    pub fn from_form<C: CurvatureForm + ?Sized>(form: &C, metric: DMatrix<f64>) -> Self {
        let mut out = Self::zeros(metric);
        let n = out.dim;
        let basis: Vec<DVector<f64>> = (0..n)
            .map(|i| DVector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 }))
            .collect();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let idx = out.idx(i, j, k, l);
                        out.data[idx] = form.form(&basis[i], &basis[j], &basis[k], &basis[l]);
                    }
                }
            }
        }
        out
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.dim + j) * self.dim + k) * self.dim + l
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.idx(i, j, k, l)]
    }

    pub fn metric(&self) -> &DMatrix<f64> {
        &self.metric
    }

    /// `R(x,y)z` as a coordinate vector.
    pub fn operator(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        let n = self.dim;
        let lowered = DVector::from_fn(n, |l, _| {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        s += self.get(i, j, k, l) * x[i] * y[j] * z[k];
                    }
                }
            }
            s
        });
        self.metric
            .clone()
            .lu()
            .solve(&lowered)
            .unwrap_or_else(|| DVector::zeros(n))
    }

    /// Sectional curvature of the plane spanned by `x, y`.
    pub fn sectional(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let g = &self.metric;
        let xx = (x.transpose() * g * x)[(0, 0)];
        let yy = (y.transpose() * g * y)[(0, 0)];
        let xy = (x.transpose() * g * y)[(0, 0)];
        self.form(x, y, y, x) / (xx * yy - xy * xy)
    }

    pub fn symmetry_defects(&self) -> SymmetryDefects {
        let n = self.dim;
        let mut d = SymmetryDefects {
            antisym_first: 0.0,
            antisym_last: 0.0,
            pair: 0.0,
            bianchi: 0.0,
            max_abs: 0.0,
        };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = self.get(i, j, k, l);
                        d.max_abs = d.max_abs.max(v.abs());
                        d.antisym_first = d.antisym_first.max((v + self.get(j, i, k, l)).abs());
                        d.antisym_last = d.antisym_last.max((v + self.get(i, j, l, k)).abs());
                        d.pair = d.pair.max((v - self.get(k, l, i, j)).abs());
                        let cyc = v + self.get(j, k, i, l) + self.get(k, i, j, l);
                        d.bianchi = d.bianchi.max(cyc.abs());
                    }
                }
            }
        }
        d
    }
}

impl CurvatureForm for CurvatureTensor {
    fn dim(&self) -> usize {
        self.dim
    }

    fn form(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>, w: &DVector<f64>) -> f64 {
        let n = self.dim;
        let mut s = 0.0;
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let xy = x[i] * y[j];
                if xy == 0.0 {
                    continue;
                }
                for k in 0..n {
                    let xyz = xy * z[k];
                    if xyz == 0.0 {
                        continue;
                    }
                    let base = self.idx(i, j, k, 0);
                    for l in 0..n {
                        s += self.data[base + l] * xyz * w[l];
                    }
                }
            }
        }
        s
    }
}

/// Riemann tensor from a metric jet.
pub fn riemann_from_jet(jet: &MetricJet) -> CurvatureTensor {
    let n = jet.g.nrows();
    let gamma = Christoffel::from_first_jet(&jet.ginv, &jet.dg);
    // ∂_i g^{-1} = −g^{-1} (∂_i g) g^{-1}
    let dginv: Vec<DMatrix<f64>> = jet.dg.iter().map(|d| -(&jet.ginv * d * &jet.ginv)).collect();
    // S_{l;jk} = ∂_j g_{lk} + ∂_k g_{lj} − ∂_l g_{jk}, and its derivatives.
    let s = |l: usize, j: usize, k: usize| jet.dg[j][(l, k)] + jet.dg[k][(l, j)] - jet.dg[l][(j, k)];
    let ds =
        |i: usize, l: usize, j: usize, k: usize| jet.ddg[i][j][(l, k)] + jet.ddg[i][k][(l, j)] - jet.ddg[i][l][(j, k)];
    // dgamma[i][m][j][k] = ∂_i Γ^m_{jk}
    let mut dgamma = vec![0.0; n * n * n * n];
    let di = |i: usize, m: usize, j: usize, k: usize| ((i * n + m) * n + j) * n + k;
    for i in 0..n {
        for m in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut acc = 0.0;
                    for l in 0..n {
                        acc += dginv[i][(m, l)] * s(l, j, k) + jet.ginv[(m, l)] * ds(i, l, j, k);
                    }
                    dgamma[di(i, m, j, k)] = 0.5 * acc;
                }
            }
        }
    }
    let mut out = CurvatureTensor::zeros(jet.g.clone());
    let mut up = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for (m, slot) in up.iter_mut().enumerate() {
                    let mut v = dgamma[di(i, m, j, k)] - dgamma[di(j, m, i, k)];
                    for p in 0..n {
                        v += gamma.get(p, j, k) * gamma.get(m, i, p) - gamma.get(p, i, k) * gamma.get(m, j, p);
                    }
                    *slot = v;
                }
                for l in 0..n {
                    let mut v = 0.0;
                    for (m, u) in up.iter().enumerate() {
                        v += jet.g[(m, l)] * u;
                    }
                    let idx = out.idx(i, j, k, l);
                    out.data[idx] = v;
                }
            }
        }
    }
    out
}

pub fn riemann_at(chart: &ChartMetric, p: &[f64]) -> Result<CurvatureTensor> {
    chart.check_point(p, 4.0)?;
    Ok(riemann_from_jet(&metric_jet(chart, p)?))
}

/// Twice the scalar curvature of the span of `frame`: `Σ_{i,j} R(e_i,e_j,e_j,e_i)`.
pub fn scalar_on_subspace<C: CurvatureForm + ?Sized>(r: &C, frame: &Frame) -> Result<f64> {
    check_dim(r.dim(), frame.ambient_dim())?;
    scalar_on_vectors(r, frame.vectors())
}

/// As [`scalar_on_subspace`] for vectors assumed orthonormal by the caller.
pub fn scalar_on_vectors<C: CurvatureForm + ?Sized>(r: &C, vectors: &[DVector<f64>]) -> Result<f64> {
    let mut total = 0.0;
    for (i, ei) in vectors.iter().enumerate() {
        check_dim(r.dim(), ei.len())?;
        for (j, ej) in vectors.iter().enumerate() {
            if i != j {
                total += r.form(ei, ej, ej, ei);
            }
        }
    }
    Ok(total)
}

/// Normalized scalar curvature `2scal / (r(r−1))`.
pub fn normalized(two_scal: f64, r: usize) -> f64 {
    two_scal / (r * (r - 1)) as f64
}
