//! Frame-level linear algebra.
//!
//! Orthonormalization against an arbitrary inner product, restriction of
//! bilinear forms to hyperplanes, and the structure-operator norm
//! `‖P‖² = Σ ⟨e_i, op e_j⟩²`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Largest ambient dimension accepted by frame constructors.
pub const MAX_DIM: usize = 32;

/// Orthonormality tolerance used by [`Frame`] validation.
pub const ORTHO_TOL: f64 = 1e-9;

/// A positive-definite Gram matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InnerProduct {
    #[serde(with = "crate::serde_util::matrix")]
    gram: DMatrix<f64>,
    /// Set when the Gram matrix is exactly the identity.
    #[serde(skip)]
    identity: bool,
}

impl PartialEq for InnerProduct {
    fn eq(&self, other: &Self) -> bool {
        self.gram == other.gram
    }
}

impl InnerProduct {
    pub fn new(gram: DMatrix<f64>) -> Result<Self> {
        let n = gram.nrows();
        check_dim(n, gram.ncols())?;
        if n == 0 || n > MAX_DIM {
            return Err(Error::InvalidInput(format!("inner product dimension {n}")));
        }
        let scale = gram.amax().max(1.0);
        for i in 0..n {
            for j in 0..i {
                if (gram[(i, j)] - gram[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidInput(format!("gram matrix not symmetric at ({i}, {j})")));
                }
            }
        }
        if gram.clone().cholesky().is_none() {
            return Err(Error::InvalidInput("gram matrix not positive definite".into()));
        }
        let identity = gram == DMatrix::identity(n, n);
        Ok(Self { gram, identity })
    }

    pub fn euclidean(n: usize) -> Self {
        Self {
            gram: DMatrix::identity(n, n),
            identity: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn dot(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        if self.identity {
            return u.dot(v);
        }
        self.gram
            .column_iter()
            .zip(v.iter())
            .map(|(col, vj)| col.dot(u) * vj)
            .sum()
    }

    pub fn norm(&self, u: &DVector<f64>) -> f64 {
        self.dot(u, u).max(0.0).sqrt()
    }
}

/// An orthonormal list of vectors with respect to an [`InnerProduct`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    #[serde(with = "crate::serde_util::vectors")]
    vectors: Vec<DVector<f64>>,
    inner: InnerProduct,
}

impl Frame {
    /// Wraps vectors that are already orthonormal.
    pub fn new(vectors: Vec<DVector<f64>>, inner: InnerProduct) -> Result<Self> {
        for v in &vectors {
            check_dim(inner.dim(), v.len())?;
        }
        let frame = Self { vectors, inner };
        let defect = frame.orthonormality_defect();
        if defect > ORTHO_TOL {
            return Err(Error::InvalidInput(format!(
                "frame is not orthonormal (defect {defect:.3e})"
            )));
        }
        Ok(frame)
    }

    /// The empty frame (spans the zero subspace).
    pub fn empty(inner: InnerProduct) -> Self {
        Self {
            vectors: Vec::new(),
            inner,
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn vectors(&self) -> &[DVector<f64>] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> &DVector<f64> {
        &self.vectors[i]
    }

    pub fn inner(&self) -> &InnerProduct {
        &self.inner
    }

    /// Columns are the frame vectors.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.ambient_dim();
        DMatrix::from_fn(n, self.len(), |i, j| self.vectors[j][i])
    }

    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, u) in self.vectors.iter().enumerate() {
            for (j, v) in self.vectors.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.inner.dot(u, v) - target).abs());
            }
        }
        worst
    }

    /// Coefficients `⟨e_i, v⟩` of `v` against the frame.
    pub fn coordinates(&self, v: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.len(), self.vectors.iter().map(|e| self.inner.dot(e, v)))
    }

    /// Orthogonal projection onto the span of the frame.
    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.ambient_dim());
        for e in &self.vectors {
            out += e * self.inner.dot(e, v);
        }
        out
    }

    /// Re-expresses the frame in the basis `Σ_j q[(j, i)] e_j` for an orthogonal `q`.
    pub fn rotated(&self, q: &DMatrix<f64>) -> Result<Self> {
        check_dim(self.len(), q.nrows())?;
        let vectors = (0..q.ncols())
            .map(|i| {
                let mut v = DVector::zeros(self.ambient_dim());
                for j in 0..self.len() {
                    v += &self.vectors[j] * q[(j, i)];
                }
                v
            })
            .collect();
        Self::new(vectors, self.inner.clone())
    }

    /// An orthonormal basis of the orthogonal complement of the span.
    pub fn complement(&self) -> Result<Frame> {
        let n = self.ambient_dim();
        let mut vectors = self.vectors.clone();
        for k in 0..n {
            if vectors.len() == n {
                break;
            }
            let mut candidate = DVector::zeros(n);
            candidate[k] = 1.0;
            let start = self.inner.norm(&candidate);
            for _ in 0..2 {
                for e in &vectors {
                    let c = self.inner.dot(e, &candidate);
                    candidate -= e * c;
                }
            }
            let norm = self.inner.norm(&candidate);
            if norm > 1e-6 * start {
                vectors.push(candidate / norm);
            }
        }
        if vectors.len() != n {
            return Err(Error::DegenerateInput("complement construction failed".into()));
        }
        Frame::new(vectors.split_off(self.len()), self.inner.clone())
    }
}

/// Modified Gram–Schmidt with one re-orthogonalization pass.
pub fn gram_schmidt(raw: &[DVector<f64>], inner: &InnerProduct) -> Result<Frame> {
    for v in raw {
        check_dim(inner.dim(), v.len())?;
    }
    // Gram determinant of the normalized inputs detects near dependence.
    let k = raw.len();
    if k > 0 {
        let norms: Vec<f64> = raw.iter().map(|v| inner.norm(v)).collect();
        if norms.iter().any(|&n| n == 0.0 || !n.is_finite()) {
            return Err(Error::DegenerateInput("zero or non-finite vector".into()));
        }
        let g = DMatrix::from_fn(k, k, |i, j| inner.dot(&raw[i], &raw[j]) / (norms[i] * norms[j]));
        if g.determinant() <= 1e-12 {
            return Err(Error::DegenerateInput("vectors are linearly dependent".into()));
        }
    }
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(k);
    for v in raw {
        let mut w = v.clone();
        for _ in 0..2 {
            for e in &out {
                let c = inner.dot(e, &w);
                w -= e * c;
            }
        }
        let n = inner.norm(&w);
        out.push(w / n);
    }
    Frame::new(out, inner.clone())
}

/// Whether a structure operator is an almost-complex `J` or an almost-contact `φ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StructureKind {
    AlmostComplex,
    AlmostContact {
        #[serde(with = "crate::serde_util::vector")]
        xi: DVector<f64>,
        #[serde(with = "crate::serde_util::vector")]
        eta: DVector<f64>,
    },
}

/// `J` with `J² = −I`, or `φ` with `φ²Z = −Z + η(Z)ξ`, as a coordinate matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureOperator {
    #[serde(with = "crate::serde_util::matrix")]
    matrix: DMatrix<f64>,
    #[serde(flatten)]
    kind: StructureKind,
}

impl StructureOperator {
    pub fn almost_complex(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        check_dim(n, matrix.ncols())?;
        let defect = (&matrix * &matrix + DMatrix::<f64>::identity(n, n)).amax();
        if defect > 1e-9 {
            return Err(Error::InvalidInput(format!("J² ≠ −I (defect {defect:.3e})")));
        }
        Ok(Self {
            matrix,
            kind: StructureKind::AlmostComplex,
        })
    }

    /// `eta` holds the covector components, so `η(Z) = eta · Z`.
    pub fn almost_contact(matrix: DMatrix<f64>, xi: DVector<f64>, eta: DVector<f64>) -> Result<Self> {
        let n = matrix.nrows();
        check_dim(n, matrix.ncols())?;
        check_dim(n, xi.len())?;
        check_dim(n, eta.len())?;
        let target = -DMatrix::<f64>::identity(n, n) + &xi * eta.transpose();
        let defects = [
            (&matrix * &matrix - target).amax(),
            (eta.dot(&xi) - 1.0).abs(),
            (&matrix * &xi).amax(),
            (matrix.transpose() * &eta).amax(),
        ];
        let worst = defects.iter().cloned().fold(0.0, f64::max);
        if worst > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "almost-contact identities fail (defect {worst:.3e})"
            )));
        }
        Ok(Self {
            matrix,
            kind: StructureKind::AlmostContact { xi, eta },
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn kind(&self) -> &StructureKind {
        &self.kind
    }

    pub fn xi(&self) -> Option<&DVector<f64>> {
        match &self.kind {
            StructureKind::AlmostContact { xi, .. } => Some(xi),
            StructureKind::AlmostComplex => None,
        }
    }

    pub fn eta(&self) -> Option<&DVector<f64>> {
        match &self.kind {
            StructureKind::AlmostContact { eta, .. } => Some(eta),
            StructureKind::AlmostComplex => None,
        }
    }

    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.matrix * v
    }

    /// Largest violation of `g(op X, op Y) = g(X, Y) − η(X)η(Y)` over coordinate vectors.
    pub fn compatibility_defect(&self, inner: &InnerProduct) -> Result<f64> {
        check_dim(self.dim(), inner.dim())?;
        let g = inner.gram();
        let mut target = g.clone();
        if let Some(eta) = self.eta() {
            // η is the metric dual of ξ for a compatible structure.
            target -= eta * eta.transpose();
        }
        Ok((self.matrix.transpose() * g * &self.matrix - target).amax())
    }
}

/// `Σ_{i,j} ⟨e_i, op e_j⟩²` over an orthonormal frame.
pub fn structure_norm_squared(frame: &Frame, op: &StructureOperator) -> Result<f64> {
    check_dim(frame.ambient_dim(), op.dim())?;
    let images: Vec<DVector<f64>> = frame.vectors().iter().map(|e| op.apply(e)).collect();
    let mut total = 0.0;
    for e in frame.vectors() {
        for img in &images {
            total += frame.inner().dot(e, img).powi(2);
        }
    }
    Ok(total)
}

/// A hyperplane of an `r`-dimensional orthonormal coefficient space, given by
/// its unit normal (identified up to sign).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    #[serde(with = "crate::serde_util::vector")]
    normal: DVector<f64>,
}

impl Hyperplane {
    /// Normalizes `normal`; requires `r ≥ 3`.
    pub fn new(normal: DVector<f64>) -> Result<Self> {
        if normal.len() < 3 {
            return Err(Error::InvalidInput(format!(
                "hyperplanes need r ≥ 3, got {}",
                normal.len()
            )));
        }
        let n = normal.norm();
        if !(n > 1e-300) || !n.is_finite() {
            return Err(Error::DegenerateInput("zero hyperplane normal".into()));
        }
        Ok(Self { normal: normal / n })
    }

    /// Coordinate hyperplane orthogonal to `e_k`.
    pub fn coordinate(r: usize, k: usize) -> Result<Self> {
        Self::new(DVector::from_fn(r, |i, _| if i == k { 1.0 } else { 0.0 }))
    }

    pub fn r(&self) -> usize {
        self.normal.len()
    }

    pub fn normal(&self) -> &DVector<f64> {
        &self.normal
    }

    /// `r × (r−1)` matrix whose columns are an orthonormal basis of the hyperplane.
    pub fn basis(&self) -> DMatrix<f64> {
        let r = self.r();
        let n = &self.normal;
        // Householder reflection sending e_k to ±n, with k the largest component of n.
        let k = n.iamax();
        let mut v = n.clone();
        let s = if n[k] >= 0.0 { 1.0 } else { -1.0 };
        v[k] += s;
        let vv = v.norm_squared();
        let h = DMatrix::<f64>::identity(r, r) - (&v * v.transpose()) * (2.0 / vv);
        let cols: Vec<usize> = (0..r).filter(|&c| c != k).collect();
        DMatrix::from_fn(r, r - 1, |i, j| h[(i, cols[j])])
    }
}

/// Restriction of a bilinear form to an orthonormal basis of `hp`.
pub fn project_onto_hyperplane(coeffs: &DMatrix<f64>, hp: &Hyperplane) -> Result<DMatrix<f64>> {
    check_dim(hp.r(), coeffs.nrows())?;
    check_dim(hp.r(), coeffs.ncols())?;
    let q = hp.basis();
    Ok(q.transpose() * coeffs * q)
}

/// Restriction of a bilinear form to the span of orthonormal columns `basis`.
pub fn restrict_to_subspace(coeffs: &DMatrix<f64>, basis: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_dim(coeffs.nrows(), basis.nrows())?;
    check_dim(coeffs.ncols(), basis.nrows())?;
    let defect = (basis.transpose() * basis - DMatrix::<f64>::identity(basis.ncols(), basis.ncols())).amax();
    if defect > ORTHO_TOL {
        return Err(Error::InvalidInput(format!(
            "subspace basis is not orthonormal (defect {defect:.3e})"
        )));
    }
    Ok(basis.transpose() * coeffs * basis)
}
