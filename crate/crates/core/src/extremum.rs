//! The constrained quadratic extremum problem
//! `min λ₁ Σ_{i<r} z_i² + λ₂ z_r² − 2 Σ_{i<j} z_i z_j` subject to `Σ z_i = k`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the `λ₂ = (r−1)/(λ₁ − r + 2)` proviso.
pub const PROVISO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremumProblem {
    pub r: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    pub k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremumSolution {
    pub minimizer: Vec<f64>,
    pub f_min: f64,
}

impl ExtremumProblem {
    /// A problem with `λ₂` derived from the proviso.
    pub fn with_proviso(r: usize, lambda1: f64, k: f64) -> Result<Self> {
        if r < 3 {
            return Err(Error::InvalidInput(format!("r must be at least 3, got {r}")));
        }
        if !(lambda1 > r as f64 - 2.0) {
            return Err(Error::ProvisoViolated(format!(
                "λ₁ = {lambda1} must exceed r − 2 = {}",
                r - 2
            )));
        }
        Ok(Self {
            r,
            lambda1,
            lambda2: (r - 1) as f64 / (lambda1 - r as f64 + 2.0),
            k,
        })
    }

    /// The quadratic form `f` as a symmetric matrix `A` with `f(z) = zᵀAz`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let r = self.r;
        DMatrix::from_fn(r, r, |i, j| match (i == j, i == r - 1) {
            (true, false) => self.lambda1,
            (true, true) => self.lambda2,
            (false, _) => -1.0,
        })
    }

    pub fn objective(&self, z: &[f64]) -> f64 {
        let r = self.r;
        let mut f = self.lambda2 * z[r - 1] * z[r - 1];
        for i in 0..r - 1 {
            f += self.lambda1 * z[i] * z[i];
        }
        for i in 0..r {
            for j in i + 1..r {
                f -= 2.0 * z[i] * z[j];
            }
        }
        f
    }

    pub fn check_proviso(&self) -> Result<()> {
        let r = self.r as f64;
        if self.r < 3 {
            return Err(Error::InvalidInput(format!("r must be at least 3, got {}", self.r)));
        }
        if !(self.lambda1 > r - 2.0) || !(self.lambda2 > 0.0) {
            return Err(Error::ProvisoViolated(format!(
                "need λ₁ > r − 2 and λ₂ > 0, got λ₁ = {}, λ₂ = {}",
                self.lambda1, self.lambda2
            )));
        }
        let expected = (r - 1.0) / (self.lambda1 - r + 2.0);
        if (self.lambda2 - expected).abs() > PROVISO_TOL * (1.0 + expected.abs()) {
            return Err(Error::ProvisoViolated(format!(
                "λ₂ = {} but (r−1)/(λ₁−r+2) = {expected}",
                self.lambda2
            )));
        }
        Ok(())
    }
}

/// The three expressions for `z_r`; they coincide under the proviso.
pub fn last_component_forms(prob: &ExtremumProblem) -> [f64; 3] {
    let (l1, l2, k, r) = (prob.lambda1, prob.lambda2, prob.k, prob.r as f64);
    [
        k / (l2 + 1.0),
        k * (r - 1.0) / ((l1 + 1.0) * l2),
        k * (l1 - r + 2.0) / (l1 + 1.0),
    ]
}

/// `z_i = k/(λ₁+1)` for `i < r` and `z_r = k/(λ₂+1)`.
pub fn solve_closed_form(prob: &ExtremumProblem) -> Result<ExtremumSolution> {
    prob.check_proviso()?;
    let forms = last_component_forms(prob);
    let spread = forms.iter().cloned().fold(f64::MIN, f64::max) - forms.iter().cloned().fold(f64::MAX, f64::min);
    if spread > 1e-10 * (1.0 + prob.k.abs()) {
        return Err(Error::ProvisoViolated(format!(
            "z_r expressions disagree by {spread:e}"
        )));
    }
    let mut z = vec![prob.k / (prob.lambda1 + 1.0); prob.r];
    z[prob.r - 1] = forms[0];
    let f_min = prob.objective(&z);
    Ok(ExtremumSolution { minimizer: z, f_min })
}

/// Minimum eigenvalue of the form restricted to `Σ z_i = 0`.
pub fn restricted_min_eigenvalue(prob: &ExtremumProblem) -> f64 {
    let r = prob.r;
    let ones = DVector::from_element(r, 1.0 / (r as f64).sqrt());
    let hp = crate::framecore::Hyperplane::new(ones).expect("r ≥ 3");
    let q = hp.basis();
    (q.transpose() * prob.matrix() * q).symmetric_eigen().eigenvalues.min()
}

/// Direct solve of the Lagrangian stationarity system
/// `[2A 1; 1ᵀ 0] [z; μ] = [0; k]`, valid without the proviso.
pub fn solve_oracle(prob: &ExtremumProblem) -> Result<ExtremumSolution> {
    let r = prob.r;
    if r < 2 {
        return Err(Error::InvalidInput("need r ≥ 2".into()));
    }
    let min_eig = restricted_min_eigenvalue(prob);
    if min_eig < -1e-10 {
        return Err(Error::IndefiniteRestriction {
            min_eigenvalue: min_eig,
        });
    }
    let a = prob.matrix();
    let mut kkt = DMatrix::zeros(r + 1, r + 1);
    kkt.view_mut((0, 0), (r, r)).copy_from(&(a * 2.0));
    for i in 0..r {
        kkt[(i, r)] = 1.0;
        kkt[(r, i)] = 1.0;
    }
    let mut rhs = DVector::zeros(r + 1);
    rhs[r] = prob.k;
    let sol = kkt
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::DegenerateInput("singular KKT system".into()))?;
    let z: Vec<f64> = sol.iter().take(r).copied().collect();
    let f_min = prob.objective(&z);
    Ok(ExtremumSolution { minimizer: z, f_min })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_from_the_map_inequality() {
        let prob = ExtremumProblem {
            r: 3,
            lambda1: 3.0,
            lambda2: 1.0,
            k: 4.0,
        };
        let sol = solve_closed_form(&prob).unwrap();
        assert_eq!(sol.minimizer, vec![1.0, 1.0, 2.0]);
        assert_eq!(sol.f_min, 0.0);
    }

    #[test]
    fn proviso_is_enforced() {
        let prob = ExtremumProblem {
            r: 3,
            lambda1: 3.0,
            lambda2: 2.0,
            k: 1.0,
        };
        assert!(matches!(solve_closed_form(&prob), Err(Error::ProvisoViolated(_))));
        assert!(matches!(
            ExtremumProblem::with_proviso(4, 2.0, 1.0),
            Err(Error::ProvisoViolated(_))
        ));
    }
}
