//! Explicit charts, structure tensors and maps used by the catalog and by
//! chart cross-validation of the space-form models.

use nalgebra::{DMatrix, DVector};

use crate::curvature::ChartMetric;
use crate::error::Result;
use crate::framecore::StructureOperator;

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Round sphere `S^n(radius)` in stereographic coordinates:
/// `g = 4 radius² / (1 + |u|²)² δ`.
pub fn stereographic_sphere(n: usize, radius: f64, extent: f64) -> ChartMetric {
    ChartMetric::new(format!("stereographic-S{n}"), vec![(-extent, extent); n], move |u| {
        let f = 4.0 * radius * radius / (1.0 + norm2(u)).powi(2);
        DMatrix::identity(n, n) * f
    })
}

/// Point of the unit sphere in `ℝ^{n+1}` with stereographic coordinates `u`
/// (projection from the pole `e_{n+1}`).
pub fn stereographic_inverse(u: &[f64]) -> Vec<f64> {
    let s = norm2(u);
    let mut x: Vec<f64> = u.iter().map(|v| 2.0 * v / (1.0 + s)).collect();
    x.push((s - 1.0) / (1.0 + s));
    x
}

/// Stereographic coordinates of a unit vector `x` of `ℝ^{n+1}`.
pub fn stereographic_forward(x: &[f64]) -> Vec<f64> {
    let n = x.len() - 1;
    let d = 1.0 - x[n];
    x[..n].iter().map(|v| v / d).collect()
}

/// `∂X/∂u` of [`stereographic_inverse`], an `(n+1) × n` matrix.
pub fn stereographic_jacobian(u: &[f64]) -> DMatrix<f64> {
    let n = u.len();
    let s = norm2(u);
    let d = 1.0 + s;
    DMatrix::from_fn(n + 1, n, |k, a| {
        if k == n {
            4.0 * u[a] / (d * d)
        } else {
            let delta = if k == a { 2.0 / d } else { 0.0 };
            delta - 4.0 * u[k] * u[a] / (d * d)
        }
    })
}

/// Right multiplication by `i` on `ℍ² = ℝ⁸`.
pub fn quaternionic_right_i() -> DMatrix<f64> {
    let mut j = DMatrix::zeros(8, 8);
    for h in 0..2 {
        let o = 4 * h;
        // (a + bi + cj + dk) i = −b + ai + dj − ck
        j[(o, o + 1)] = -1.0;
        j[(o + 1, o)] = 1.0;
        j[(o + 2, o + 3)] = 1.0;
        j[(o + 3, o + 2)] = -1.0;
    }
    j
}

/// Standard Sasakian structure of the unit sphere induced by the complex
/// structure `j` of the ambient space, in stereographic coordinates:
/// `ξ = −JN`, `η = ⟨·, ξ⟩`, `φ = tangential part of J`.
pub fn sphere_sasakian_structure(u: &[f64], j: &DMatrix<f64>) -> Result<StructureOperator> {
    let e = stereographic_jacobian(u);
    let x = DVector::from_vec(stereographic_inverse(u));
    let g = e.transpose() * &e;
    let ginv = g.try_inverse().expect("stereographic metric is conformal");
    let xi_amb = -(j * &x);
    let phi = &ginv * e.transpose() * j * &e;
    let xi = &ginv * e.transpose() * &xi_amb;
    let eta = e.transpose() * xi_amb;
    StructureOperator::almost_contact(phi, xi, eta)
}

/// Almost complex structure of the warped metric `dt² + e^{2t} Σ dx_i²` on
/// `ℝ × ℝ³`: `J∂_t = e^{−t}∂_{x₁}`, `J∂_{x₂} = ∂_{x₃}`.
pub fn warped_complex_structure(p: &[f64]) -> Result<StructureOperator> {
    let mut j = DMatrix::zeros(4, 4);
    j[(1, 0)] = (-p[0]).exp();
    j[(0, 1)] = -p[0].exp();
    j[(3, 2)] = 1.0;
    j[(2, 3)] = -1.0;
    StructureOperator::almost_complex(j)
}

/// Round unit sphere `S^n` in hyperspherical angles `(χ₁, …, χ_n)`.
pub fn hyperspherical_sphere(n: usize) -> ChartMetric {
    let mut domain = vec![(0.0, std::f64::consts::PI); n];
    domain[n - 1] = (-std::f64::consts::PI, std::f64::consts::PI);
    ChartMetric::new(format!("hyperspherical-S{n}"), domain, move |chi| {
        let mut g = DMatrix::zeros(n, n);
        let mut w = 1.0;
        for k in 0..n {
            g[(k, k)] = w;
            w *= chi[k].sin().powi(2);
        }
        g
    })
}

/// Embedding of the hyperspherical chart into `ℝ^{n+1}`.
pub fn hyperspherical_embedding(chi: &[f64]) -> Vec<f64> {
    let n = chi.len();
    let mut x = Vec::with_capacity(n + 1);
    let mut s = 1.0;
    for c in chi {
        x.push(s * c.cos());
        s *= c.sin();
    }
    x.push(s);
    x
}

/// Fubini–Study metric of `CP^n` (holomorphic sectional curvature 4) in the
/// affine chart, real coordinates interleaved as `(x₁, y₁, …, x_n, y_n)`.
pub fn fubini_study(n: usize, extent: f64) -> ChartMetric {
    ChartMetric::new(
        format!("fubini-study-CP{n}"),
        vec![(-extent, extent); 2 * n],
        move |p| fubini_study_metric(n, p),
    )
}

pub fn fubini_study_metric(n: usize, p: &[f64]) -> DMatrix<f64> {
    let s = 1.0 + norm2(p);
    // h_{ab̄} = (δ_ab s − z̄_a z_b) / s², g(U, V) = Re Σ h_{ab̄} U_a conj(V_b)
    let z = |a: usize| (p[2 * a], p[2 * a + 1]);
    let mut g = DMatrix::zeros(2 * n, 2 * n);
    for a in 0..n {
        for b in 0..n {
            let (xa, ya) = z(a);
            let (xb, yb) = z(b);
            // z̄_a z_b = (xa − i ya)(xb + i yb)
            let re = xa * xb + ya * yb;
            let im = xa * yb - ya * xb;
            let delta = if a == b { s } else { 0.0 };
            let h_re = (delta - re) / (s * s);
            let h_im = -im / (s * s);
            g[(2 * a, 2 * b)] = h_re;
            g[(2 * a + 1, 2 * b + 1)] = h_re;
            g[(2 * a, 2 * b + 1)] = h_im;
            g[(2 * a + 1, 2 * b)] = -h_im;
        }
    }
    g
}

/// Standard complex structure on interleaved coordinates: `J∂x = ∂y`, `J∂y = −∂x`.
pub fn standard_complex_structure(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for a in 0..n {
        j[(2 * a + 1, 2 * a)] = 1.0;
        j[(2 * a, 2 * a + 1)] = -1.0;
    }
    j
}

pub fn complex_structure(n: usize) -> Result<StructureOperator> {
    StructureOperator::almost_complex(standard_complex_structure(n))
}

/// Flat almost contact structure `φ = J ⊕ 0`, `ξ = η = e_{2m+1}` on `ℝ^{2m+1}`
/// (cosymplectic, all space-form constants zero).
pub fn flat_contact_structure(m: usize) -> Result<StructureOperator> {
    let n = 2 * m + 1;
    let mut phi = DMatrix::zeros(n, n);
    phi.view_mut((0, 0), (2 * m, 2 * m))
        .copy_from(&standard_complex_structure(m));
    let mut xi = DVector::zeros(n);
    xi[n - 1] = 1.0;
    StructureOperator::almost_contact(phi, xi.clone(), xi)
}

/// Cosymplectic structure of `ℝ × CP^n`: `φ = 0 ⊕ J`, `ξ = ∂_s`, `η = ds`.
pub fn line_times_complex_structure(n: usize) -> Result<StructureOperator> {
    let d = 2 * n + 1;
    let mut phi = DMatrix::zeros(d, d);
    phi.view_mut((1, 1), (2 * n, 2 * n))
        .copy_from(&standard_complex_structure(n));
    let mut xi = DVector::zeros(d);
    xi[0] = 1.0;
    StructureOperator::almost_contact(phi, xi.clone(), xi)
}

/// `ℝ × CP^n` with the product metric `ds² + g_FS`.
pub fn line_times_fubini_study(n: usize, extent: f64) -> ChartMetric {
    let d = 2 * n + 1;
    ChartMetric::new(format!("line-x-CP{n}"), vec![(-extent, extent); d], move |p| {
        let mut g = DMatrix::zeros(d, d);
        g[(0, 0)] = 1.0;
        g.view_mut((1, 1), (2 * n, 2 * n))
            .copy_from(&fubini_study_metric(n, &p[1..]));
        g
    })
}

/// Warped product `dt² + e^{2t} Σ dx_i²` on `ℝ × ℝ^m` (hyperbolic space of curvature −1).
pub fn exponential_warped(m: usize, extent: f64) -> ChartMetric {
    ChartMetric::new(format!("warped-R-x-R{m}"), vec![(-extent, extent); m + 1], move |p| {
        let mut g = DMatrix::identity(m + 1, m + 1) * (2.0 * p[0]).exp();
        g[(0, 0)] = 1.0;
        g
    })
}

/// Contact form `η = ½(dz − Σ y_i dx_i)` on `ℝ^{2n+1}` with coordinates
/// `(x₁, …, x_n, y₁, …, y_n, z)`.
pub fn sasakian_eta(n: usize, p: &[f64]) -> DVector<f64> {
    let mut eta = DVector::zeros(2 * n + 1);
    for i in 0..n {
        eta[i] = -0.5 * p[n + i];
    }
    eta[2 * n] = 0.5;
    eta
}

/// `g = η ⊗ η + ¼ Σ (dx_i² + dy_i²)`.
pub fn sasakian_metric(n: usize, p: &[f64]) -> DMatrix<f64> {
    let eta = sasakian_eta(n, p);
    let mut g = &eta * eta.transpose();
    for i in 0..2 * n {
        g[(i, i)] += 0.25;
    }
    g
}

/// Standard Sasakian structure of `ℝ^{2n+1}` (φ-sectional curvature −3).
pub fn sasakian_space(n: usize, extent: f64) -> ChartMetric {
    ChartMetric::new(
        format!("sasakian-R{}", 2 * n + 1),
        vec![(-extent, extent); 2 * n + 1],
        move |p| sasakian_metric(n, p),
    )
}

/// `φ(X∂x + Y∂y + Z∂z) = Y∂x − X∂y + (Σ Y_i y_i)∂z`, `ξ = 2∂z`.
pub fn sasakian_structure(n: usize, p: &[f64]) -> Result<StructureOperator> {
    let d = 2 * n + 1;
    let mut phi = DMatrix::zeros(d, d);
    for i in 0..n {
        phi[(i, n + i)] = 1.0;
        phi[(n + i, i)] = -1.0;
        phi[(2 * n, n + i)] = p[n + i];
    }
    let mut xi = DVector::zeros(d);
    xi[2 * n] = 2.0;
    StructureOperator::almost_contact(phi, xi, sasakian_eta(n, p))
}

pub type Quaternion = [f64; 4];

pub fn qmul(a: Quaternion, b: Quaternion) -> Quaternion {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

pub fn qconj(a: Quaternion) -> Quaternion {
    [a[0], -a[1], -a[2], -a[3]]
}

fn quat(x: &[f64]) -> Quaternion {
    [x[0], x[1], x[2], x[3]]
}

/// Unit quaternion with stereographic parameter `w ∈ ℝ³`, equal to 1 at `w = 0`.
pub fn unit_quaternion(w: &[f64]) -> Quaternion {
    let s = norm2(w);
    let d = 1.0 + s;
    [(1.0 - s) / d, 2.0 * w[0] / d, 2.0 * w[1] / d, 2.0 * w[2] / d]
}

/// `(q₁, q₂) ↦ (2 q₁ q̄₂, |q₁|² − |q₂|²)`, unit `S⁷ → S⁴`.
pub fn quaternionic_hopf_point(x: &[f64]) -> Vec<f64> {
    let (q1, q2) = (quat(&x[..4]), quat(&x[4..]));
    let p = qmul(q1, qconj(q2));
    let h = norm2(&q1) - norm2(&q2);
    vec![2.0 * p[0], 2.0 * p[1], 2.0 * p[2], 2.0 * p[3], h]
}

/// Quaternionic Hopf fibration in stereographic charts, onto `S⁴(1/2)`.
pub fn quaternionic_hopf(u: &[f64]) -> Vec<f64> {
    stereographic_forward(&quaternionic_hopf_point(&stereographic_inverse(u)))
}

/// The Hopf fiber through the chart point `u`, parametrized by `w ∈ ℝ³` with `w = 0 ↦ u`.
pub fn quaternionic_hopf_fiber(u: &[f64], w: &[f64]) -> Vec<f64> {
    let x = stereographic_inverse(u);
    let g = unit_quaternion(w);
    let a = qmul(quat(&x[..4]), g);
    let b = qmul(quat(&x[4..]), g);
    stereographic_forward(&[a[0], a[1], a[2], a[3], b[0], b[1], b[2], b[3]])
}

/// `(z₁, z₂) ↦ (2 z₁ z̄₂, |z₁|² − |z₂|²)`, unit `S³ → S²`, in stereographic charts onto `S²(1/2)`.
pub fn complex_hopf(u: &[f64]) -> Vec<f64> {
    let x = stereographic_inverse(u);
    let (a, b, c, d) = (x[0], x[1], x[2], x[3]);
    // z₁ z̄₂ = (a + ib)(c − id)
    let re = a * c + b * d;
    let im = b * c - a * d;
    let h = a * a + b * b - c * c - d * d;
    stereographic_forward(&[2.0 * re, 2.0 * im, h])
}

/// The circle fiber of [`complex_hopf`] through `u`, parametrized by `w ∈ ℝ` with `w = 0 ↦ u`.
pub fn complex_hopf_fiber(u: &[f64], w: &[f64]) -> Vec<f64> {
    let x = stereographic_inverse(u);
    let s = w[0] * w[0];
    let (c, si) = ((1.0 - s) / (1.0 + s), 2.0 * w[0] / (1.0 + s));
    // (a + ib)(c + i si), (e + if)(c + i si)
    let rot = |re: f64, im: f64| (re * c - im * si, re * si + im * c);
    let (a, b) = rot(x[0], x[1]);
    let (e, f) = rot(x[2], x[3]);
    stereographic_forward(&[a, b, e, f])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stereographic_round_trip() {
        let u = [0.2, -0.1, 0.4];
        let back = stereographic_forward(&stereographic_inverse(&u));
        for (a, b) in u.iter().zip(&back) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn hopf_image_lies_on_the_sphere() {
        let x = stereographic_inverse(&[0.1, 0.2, -0.3, 0.05, 0.0, 0.1, -0.2]);
        let w = quaternionic_hopf_point(&x);
        assert!((norm2(&w) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hopf_is_constant_on_fibers() {
        let u = [0.1, 0.2, -0.3, 0.05, 0.0, 0.1, -0.2];
        let a = quaternionic_hopf(&u);
        let b = quaternionic_hopf(&quaternionic_hopf_fiber(&u, &[0.3, -0.2, 0.1]));
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn sasakian_structure_is_metric_compatible() {
        let p = [0.3, -0.2, 0.5, 0.1, 0.7];
        let phi = sasakian_structure(2, &p).unwrap();
        let g = crate::framecore::InnerProduct::new(sasakian_metric(2, &p)).unwrap();
        assert!(phi.compatibility_defect(&g).unwrap() < 1e-14);
        // η is the metric dual of ξ.
        let xi = phi.xi().unwrap();
        let eta = phi.eta().unwrap();
        assert!((g.gram() * xi - eta).amax() < 1e-14);
    }

    #[test]
    fn fubini_study_is_hermitian() {
        let p = [0.3, -0.2, 0.5, 0.1];
        let g = fubini_study_metric(2, &p);
        let j = standard_complex_structure(2);
        assert!((j.transpose() * &g * &j - &g).amax() < 1e-14);
        assert!((g.transpose() - &g).amax() < 1e-15);
    }

    #[test]
    fn stereographic_jacobian_matches_differences() {
        let u = [0.2, -0.3, 0.1];
        let e = stereographic_jacobian(&u);
        for a in 0..3 {
            let mut up = u;
            let mut um = u;
            up[a] += 1e-6;
            um[a] -= 1e-6;
            let (xp, xm) = (stereographic_inverse(&up), stereographic_inverse(&um));
            for k in 0..4 {
                assert!(((xp[k] - xm[k]) / 2e-6 - e[(k, a)]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn sphere_sasakian_structure_is_compatible() {
        let u = [0.1, 0.2, -0.3, 0.05, 0.0, 0.1, -0.2];
        let phi = sphere_sasakian_structure(&u, &quaternionic_right_i()).unwrap();
        let g = stereographic_sphere(7, 1.0, 1.0).inner_at(&u).unwrap();
        assert!(phi.compatibility_defect(&g).unwrap() < 1e-12);
    }

    #[test]
    fn warped_structure_is_compatible() {
        let p = [0.3, 0.1, -0.2, 0.4];
        let j = warped_complex_structure(&p).unwrap();
        let g = exponential_warped(3, 1.0).inner_at(&p).unwrap();
        assert!(j.compatibility_defect(&g).unwrap() < 1e-12);
    }
}
