//! Test-only oracles. Nothing here calls into the optimizer or the
//! projected-norm formula of the library.
#![allow(dead_code)]

use casorati_core::rmaps::{FormCoefficients, FormRole};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// `Σ_α ‖(I − nnᵀ) M_α (I − nnᵀ)‖²`, `n` unit, summing the squared entries
/// of the projected matrix `M − n(Mᵀn)ᵀ − (Mn)nᵀ + (nᵀMn)nnᵀ`.
pub fn projected_norm(mats: &[DMatrix<f64>], n: &DVector<f64>) -> f64 {
    let r = n.len();
    let mut total = 0.0;
    for m in mats {
        let mn = m * n;
        let mtn = m.tr_mul(n);
        let s = n.dot(&mn);
        for i in 0..r {
            for j in 0..r {
                let e = m[(i, j)] - n[i] * mtn[j] - mn[i] * n[j] + s * n[i] * n[j];
                total += e * e;
            }
        }
    }
    total
}

/// Unit vector from `r − 1` hyperspherical angles.
pub fn from_angles(angles: &[f64]) -> DVector<f64> {
    let r = angles.len() + 1;
    let mut v = DVector::zeros(r);
    let mut s = 1.0;
    for (k, &a) in angles.iter().enumerate() {
        v[k] = s * a.cos();
        s *= a.sin();
    }
    v[r - 1] = s;
    v
}

fn grid_points_per_angle(r: usize) -> usize {
    match r {
        0..=3 => 48,
        4 => 20,
        5 => 12,
        _ => 8,
    }
}

/// Hemisphere grid in angle space: every angle in `[0, π]` except the last in `[0, 2π)`,
/// which covers the sphere; `h` is even so doubling is harmless.
fn grid(r: usize) -> Vec<Vec<f64>> {
    let k = grid_points_per_angle(r);
    let dims = r - 1;
    let mut out = Vec::new();
    let mut idx = vec![0usize; dims];
    loop {
        let angles: Vec<f64> = idx
            .iter()
            .enumerate()
            .map(|(d, &i)| {
                if d + 1 == dims {
                    2.0 * std::f64::consts::PI * i as f64 / k as f64
                } else {
                    std::f64::consts::PI * (i as f64 + 0.5) / k as f64
                }
            })
            .collect();
        out.push(angles);
        let mut d = 0;
        loop {
            if d == dims {
                return out;
            }
            idx[d] += 1;
            if idx[d] < k {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Compass search in angle space from `start`, minimizing `sign · h`.
fn polish(mats: &[DMatrix<f64>], start: &[f64], sign: f64, step0: f64) -> f64 {
    let mut x = start.to_vec();
    let f = |a: &[f64]| sign * projected_norm(mats, &from_angles(a));
    let mut fx = f(&x);
    let mut step = step0;
    while step > 1e-9 {
        let mut improved = false;
        for d in 0..x.len() {
            for dir in [1.0, -1.0] {
                let mut y = x.clone();
                y[d] += dir * step;
                let fy = f(&y);
                if fy < fx {
                    x = y;
                    fx = fy;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    sign * fx
}

/// `(inf h, sup h)` over unit normals: grid scan, then compass polish of the
/// best few grid cells.
pub fn grid_extrema(mats: &[DMatrix<f64>]) -> (f64, f64) {
    let r = mats[0].nrows();
    let pts = grid(r);
    let mut vals: Vec<(f64, usize)> = pts
        .iter()
        .enumerate()
        .map(|(i, a)| (projected_norm(mats, &from_angles(a)), i))
        .collect();
    vals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let step = std::f64::consts::PI / grid_points_per_angle(r) as f64;
    let keep = 64.min(vals.len());
    let lo = vals[..keep]
        .iter()
        .map(|&(_, i)| polish(mats, &pts[i], 1.0, step))
        .fold(f64::INFINITY, f64::min);
    let hi = vals[vals.len() - keep..]
        .iter()
        .map(|&(_, i)| polish(mats, &pts[i], -1.0, step))
        .fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, r: usize, role: FormRole) -> DMatrix<f64> {
    let m = DMatrix::from_fn(r, r, |_, _| rng.gen_range(-1.0..1.0));
    if role.is_antisymmetric() {
        (&m - m.transpose()) * 0.5
    } else {
        (&m + m.transpose()) * 0.5
    }
}

pub fn random_coeffs(rng: &mut ChaCha8Rng, role: FormRole, r: usize, normals: usize) -> FormCoefficients {
    let mats = (0..normals).map(|_| random_matrix(rng, r, role)).collect();
    FormCoefficients::new(role, r, mats).unwrap()
}

pub fn random_unit(rng: &mut ChaCha8Rng, r: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(r, |_, _| rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 {
            return v / n;
        }
    }
}

pub fn random_orthogonal(rng: &mut ChaCha8Rng, r: usize) -> DMatrix<f64> {
    loop {
        let m = DMatrix::from_fn(r, r, |_, _| rng.gen_range(-1.0..1.0));
        let qr = m.qr();
        if qr.r().diagonal().iter().all(|d: &f64| d.abs() > 1e-3) {
            return qr.q();
        }
    }
}

/// `Q diag(a, …, a, 2a) Qᵀ` for each `a` in `scales`, one shared `Q`.
pub fn equality_shape(q: &DMatrix<f64>, scales: &[f64]) -> Vec<DMatrix<f64>> {
    let r = q.nrows();
    scales
        .iter()
        .map(|&a| {
            let mut d = DMatrix::from_diagonal_element(r, r, a);
            d[(r - 1, r - 1)] = 2.0 * a;
            q * d * q.transpose()
        })
        .collect()
}

/// `Σ_α (trace M_α)²` and `Σ_α ‖M_α‖²` by direct summation.
pub fn trace_and_norm(mats: &[DMatrix<f64>]) -> (f64, f64) {
    let tr2 = mats.iter().map(|m| m.trace().powi(2)).sum();
    let n2 = mats.iter().map(|m| m.iter().map(|x| x * x).sum::<f64>()).sum();
    (tr2, n2)
}

/// `right − left` of each traced Gauss identity, written out from the
/// curvature relations: `2scal^H = 2scal^R + ‖tr B‖² − ‖B‖²` for maps,
/// `2scal_{M₁}^V = 2scal^V − ‖tr T‖² + ‖T‖²` for fibers and
/// `2scal_H^H = 2scal^H + 3‖A‖²` for the base.
pub fn traced_gap(role: FormRole, mats: &[DMatrix<f64>]) -> f64 {
    let (tr2, n2) = trace_and_norm(mats);
    match role {
        FormRole::BMap | FormRole::TSubmersion => n2 - tr2,
        FormRole::ASubmersion => -3.0 * n2 - tr2,
    }
}
