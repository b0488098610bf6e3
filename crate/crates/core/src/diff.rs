//! Central finite differences with optional Richardson extrapolation.

use serde::{Deserialize, Serialize};

/// Step policy: `h = step · (1 + |x|)` per coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffConfig {
    pub step: f64,
    pub richardson: bool,
}

/// Fourth-order differences: nested second derivatives keep roughly ten
/// digits, against seven for plain central differences at `h = 1e-4`.
impl Default for DiffConfig {
    fn default() -> Self {
        Self::richardson(1e-3)
    }
}

impl DiffConfig {
    pub const fn central(step: f64) -> Self {
        Self {
            step,
            richardson: false,
        }
    }

    pub const fn richardson(step: f64) -> Self {
        Self { step, richardson: true }
    }

    pub fn step_at(&self, x: f64) -> f64 {
        self.step * (1.0 + x.abs())
    }

    /// Farthest offset from the base point touched by one derivative.
    pub fn reach(&self, x: f64) -> f64 {
        if self.richardson {
            2.0 * self.step_at(x)
        } else {
            self.step_at(x)
        }
    }
}

fn shifted(p: &[f64], dir: &[f64], t: f64) -> Vec<f64> {
    p.iter().zip(dir).map(|(a, d)| a + t * d).collect()
}

fn combine(terms: &[(f64, &[f64])], scale: f64) -> Vec<f64> {
    let n = terms[0].1.len();
    (0..n)
        .map(|i| terms.iter().map(|(w, v)| w * v[i]).sum::<f64>() * scale)
        .collect()
}

/// Derivative of `f` at `p` along `dir` with step `h`.
pub fn directional<F>(f: &F, p: &[f64], dir: &[f64], h: f64, richardson: bool) -> Vec<f64>
where
    F: Fn(&[f64]) -> Vec<f64> + ?Sized,
{
    let fp = f(&shifted(p, dir, h));
    let fm = f(&shifted(p, dir, -h));
    if !richardson {
        return combine(&[(1.0, &fp), (-1.0, &fm)], 1.0 / (2.0 * h));
    }
    let fpp = f(&shifted(p, dir, 2.0 * h));
    let fmm = f(&shifted(p, dir, -2.0 * h));
    combine(&[(-1.0, &fpp), (8.0, &fp), (-8.0, &fm), (1.0, &fmm)], 1.0 / (12.0 * h))
}

/// All coordinate partials: `out[a] = ∂_a f(p)`.
pub fn partials<F>(f: &F, p: &[f64], cfg: DiffConfig) -> Vec<Vec<f64>>
where
    F: Fn(&[f64]) -> Vec<f64> + ?Sized,
{
    (0..p.len())
        .map(|a| {
            let mut e = vec![0.0; p.len()];
            e[a] = 1.0;
            directional(f, p, &e, cfg.step_at(p[a]), cfg.richardson)
        })
        .collect()
}
