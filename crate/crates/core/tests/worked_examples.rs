//! Small hand-checked cases, each against a closed form written out here.

use std::f64::consts::PI;

use casorati_core::casorati::{
    casorati_c, casorati_on_hyperplane, delta_casorati, diagnose_equality, proof_polynomial_p, proof_polynomial_q,
};
use casorati_core::curvature::{christoffel, normalized, riemann_at, scalar_on_subspace, ChartMetric, CurvatureForm};
use casorati_core::extremum::{solve_closed_form, solve_oracle, ExtremumProblem};
use casorati_core::framecore::{
    gram_schmidt, project_onto_hyperplane, structure_norm_squared, Frame, Hyperplane, InnerProduct,
};
use casorati_core::models;
use casorati_core::rmaps::{FormCoefficients, FormRole};
use casorati_core::spaceforms::{
    family_constants, validate_against_chart, FamilyName, ModelCurvature, NamedFamily, SpaceFormSpec,
};
use casorati_core::Error;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn diag(d: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_row_slice(d))
}

fn single(m: DMatrix<f64>) -> FormCoefficients {
    let r = m.nrows();
    FormCoefficients::new(FormRole::BMap, r, vec![m]).unwrap()
}

fn e(n: usize, k: usize) -> DVector<f64> {
    DVector::from_fn(n, |i, _| if i == k { 1.0 } else { 0.0 })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn gram_schmidt_keeps_an_orthonormal_basis_and_orthonormalizes_spd() {
    let basis: Vec<_> = (0..3).map(|k| e(3, k)).collect();
    let f = gram_schmidt(&basis, &InnerProduct::euclidean(3)).unwrap();
    assert!((f.matrix() - DMatrix::identity(3, 3)).amax() < 1e-15);

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let a = DMatrix::from_fn(3, 3, |_, _| rng.gen_range(-1.0..1.0));
    let g = &a * a.transpose() + DMatrix::identity(3, 3);
    let raw: Vec<_> = (0..3)
        .map(|_| DVector::from_fn(3, |_, _| rng.gen_range(-1.0..1.0)))
        .collect();
    let q = gram_schmidt(&raw, &InnerProduct::new(g.clone()).unwrap())
        .unwrap()
        .matrix();
    assert!((q.transpose() * g * q - DMatrix::identity(3, 3)).amax() < 1e-9);
}

#[test]
fn structure_norm_on_invariant_anti_invariant_and_random_frames() {
    let j = models::complex_structure(2).unwrap();
    let inner = InnerProduct::euclidean(4);
    let all = Frame::new((0..4).map(|k| e(4, k)).collect(), inner.clone()).unwrap();
    assert!(close(structure_norm_squared(&all, &j).unwrap(), 4.0, 1e-12));
    // J e₀ = e₁ and J e₂ = e₃, so {e₀, e₂} is anti-invariant
    let anti = Frame::new(vec![e(4, 0), e(4, 2)], inner.clone()).unwrap();
    assert!(structure_norm_squared(&anti, &j).unwrap().abs() < 1e-12);

    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let raw: Vec<_> = (0..3)
        .map(|_| DVector::from_fn(4, |_, _| rng.gen_range(-1.0..1.0)))
        .collect();
    let frame = gram_schmidt(&raw, &inner).unwrap();
    let jm = j.matrix();
    let mut brute = 0.0;
    for u in frame.vectors() {
        for v in frame.vectors() {
            brute += (jm * u).dot(v).powi(2);
        }
    }
    assert!(close(structure_norm_squared(&frame, &j).unwrap(), brute, 1e-12));
}

#[test]
fn hyperplane_restrictions() {
    let m = diag(&[1.0, 1.0, 2.0]);
    let p = project_onto_hyperplane(&m, &Hyperplane::coordinate(3, 2).unwrap()).unwrap();
    assert!(close(p.norm_squared(), 2.0, 1e-14));
    let s = 0.5f64.sqrt();
    let hp = Hyperplane::new(DVector::from_row_slice(&[0.0, s, s])).unwrap();
    let p = project_onto_hyperplane(&m, &hp).unwrap();
    // (I − nnᵀ)B(I − nnᵀ) = [[1, 0, 0], [0, ¾, −¾], [0, −¾, ¾]]
    let n = hp.normal();
    let proj = DMatrix::identity(3, 3) - n * n.transpose();
    let full = &proj * &m * &proj;
    let want = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 0.75, -0.75, 0.0, -0.75, 0.75]);
    assert!((&full - &want).amax() < 1e-12, "{full}");
    assert_eq!(p.shape(), (2, 2));
    assert!(close(p.norm_squared(), 3.25, 1e-12));
}

#[test]
fn round_sphere_and_warped_christoffels() {
    let theta = PI / 3.0;
    let g = christoffel(&models::hyperspherical_sphere(2), &[theta, 0.0]).unwrap();
    assert!(close(g.get(0, 1, 1), -theta.sin() * theta.cos(), 1e-8));
    assert!(close(g.get(0, 1, 1), -(3.0f64.sqrt() / 4.0), 1e-8));

    let warped = ChartMetric::new("warped", vec![(-1.0, 1.0); 2], |p| diag(&[1.0, (2.0 * p[0]).exp()]));
    let g = christoffel(&warped, &[0.0, 0.3]).unwrap();
    assert!(close(g.get(0, 1, 1), -1.0, 1e-8));
    assert!(close(g.get(1, 0, 1), 1.0, 1e-8));

    let flat = christoffel(&ChartMetric::euclidean(3, 1.0), &[0.1, 0.2, 0.3]).unwrap();
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(flat.get(k, i, j), 0.0);
            }
        }
    }
}

#[test]
fn sectional_curvature_of_sphere_and_fubini_study() {
    let r = riemann_at(&models::hyperspherical_sphere(2), &[1.0, 0.4]).unwrap();
    assert!(close(r.sectional(&e(2, 0), &e(2, 1)), 1.0, 1e-4));
    let fs = riemann_at(&models::fubini_study(1, 2.0), &[0.3, -0.2]).unwrap();
    assert!(close(fs.sectional(&e(2, 0), &e(2, 1)), 4.0, 1e-4));
}

#[test]
fn scalar_curvature_of_unit_three_sphere() {
    let chart = models::hyperspherical_sphere(3);
    let p = [1.1, 0.8, 0.2];
    let r = riemann_at(&chart, &p).unwrap();
    let g = chart.metric_at(&p).unwrap();
    let vectors = (0..3).map(|k| e(3, k) / g[(k, k)].sqrt()).collect();
    let frame = Frame::new(vectors, InnerProduct::new(g).unwrap()).unwrap();
    let two_scal = scalar_on_subspace(&r, &frame).unwrap();
    assert!(close(two_scal, 6.0, 1e-4));
    assert!(close(normalized(two_scal, 3), 1.0, 1e-4));
}

#[test]
fn model_sectional_curvatures() {
    let inner = InnerProduct::euclidean(4);
    let (c1, c2) = (0.7, -0.4);
    let spec = SpaceFormSpec::generalized_complex(c1, c2, models::complex_structure(2).unwrap()).unwrap();
    let model = ModelCurvature::new(spec, inner.clone()).unwrap();
    // holomorphic plane {e₀, Je₀ = e₁}: c₁ + 3c₂; totally real plane {e₀, e₂}: c₁
    let k = |x: &DVector<f64>, y: &DVector<f64>| model.form(x, y, y, x);
    assert!(close(k(&e(4, 0), &e(4, 1)), c1 + 3.0 * c2, 1e-14));
    assert!(close(k(&e(4, 0), &e(4, 2)), c1, 1e-14));

    let frame = Frame::new((0..4).map(|i| e(4, i)).collect(), inner).unwrap();
    let no_c2 = SpaceFormSpec::generalized_complex(c1, 0.0, models::complex_structure(2).unwrap()).unwrap();
    let flat_part = ModelCurvature::new(no_c2, InnerProduct::euclidean(4)).unwrap();
    assert!(close(scalar_on_subspace(&flat_part, &frame).unwrap(), 12.0 * c1, 1e-13));

    let c3 = 0.25;
    let spec = SpaceFormSpec::generalized_sasakian(c1, c2, c3, models::flat_contact_structure(2).unwrap()).unwrap();
    let model = ModelCurvature::new(spec, InnerProduct::euclidean(5)).unwrap();
    let xi = e(5, 4);
    assert!(close(model.form(&e(5, 0), &xi, &xi, &e(5, 0)), c1 - c3, 1e-14));
}

#[test]
fn named_family_constants() {
    let c = 2.5;
    let (c1, c2, c3) = family_constants(&NamedFamily::new(FamilyName::Sasakian, c));
    assert_eq!((c1, c2, c3), ((c + 3.0) / 4.0, (c - 1.0) / 4.0, Some((c - 1.0) / 4.0)));
    assert_eq!(
        family_constants(&NamedFamily::new(FamilyName::Real, c)),
        (c, 0.0, Some(0.0))
    );
    let a = 0.6;
    let (c1, c2, c3) = family_constants(&NamedFamily::with_alpha(FamilyName::AlmostCAlpha, c, a));
    assert!(close(c1, (c + 3.0 * a * a) / 4.0, 1e-15));
    assert!(close(c2, (c - a * a) / 4.0, 1e-15));
    assert!(close(c3.unwrap(), (c - a * a) / 4.0, 1e-15));
}

#[test]
fn flat_chart_validates_against_the_zero_model() {
    let chart = ChartMetric::euclidean(4, 1.0);
    let pts = vec![vec![0.1, 0.2, -0.3, 0.0], vec![-0.5, 0.4, 0.2, 0.1]];
    let summary = validate_against_chart(
        &chart,
        |_| SpaceFormSpec::generalized_complex(0.0, 0.0, models::complex_structure(2)?),
        &pts,
        5,
        1,
    )
    .unwrap();
    assert!(summary.max_residual < 1e-6);

    // a unit sphere is not flat
    let sphere = models::hyperspherical_sphere(4);
    let err = validate_against_chart(
        &sphere,
        |_| SpaceFormSpec::generalized_complex(0.0, 0.0, models::complex_structure(2)?),
        &[vec![1.0, 1.2, 0.9, 0.3]],
        5,
        1,
    )
    .unwrap_err();
    assert!(matches!(err, Error::ValidationFailed { .. }));
}

#[test]
fn casorati_values() {
    assert_eq!(casorati_c(&FormCoefficients::zeros(FormRole::BMap, 3, 2)), 0.0);
    assert!(close(casorati_c(&single(DMatrix::identity(3, 3))), 1.0, 1e-15));
    let b = single(diag(&[1.0, 1.0, 2.0]));
    assert!(close(casorati_c(&b), 2.0, 1e-15));
    assert!(close(
        casorati_on_hyperplane(&b, &Hyperplane::coordinate(3, 2).unwrap()).unwrap(),
        1.0,
        1e-14
    ));
    let s = 0.5f64.sqrt();
    let hp = Hyperplane::new(DVector::from_row_slice(&[0.0, s, s])).unwrap();
    assert!(close(casorati_on_hyperplane(&b, &hp).unwrap(), 3.25 / 2.0, 1e-12));
    let id = single(DMatrix::identity(3, 3));
    assert!(close(casorati_on_hyperplane(&id, &hp).unwrap(), 1.0, 1e-12));
}

#[test]
fn delta_casorati_values() {
    let zero = delta_casorati(&FormCoefficients::zeros(FormRole::BMap, 3, 1)).unwrap();
    assert_eq!((zero.c, zero.delta_c, zero.delta_hat_c), (0.0, 0.0, 0.0));

    // diag(1,1,2): h(n) = 5 − 4t + t² with t = n₃², so C^L ∈ [1, 5/2]
    let rep = delta_casorati(&single(diag(&[1.0, 1.0, 2.0]))).unwrap();
    assert!(close(rep.c_l_inf, 1.0, 1e-9) && close(rep.c_l_sup, 2.5, 1e-9));
    assert!(close(rep.delta_c, 5.0 / 3.0, 1e-9));
    assert!(close(rep.delta_hat_c, 4.0 - 5.0 / 6.0 * 2.5, 1e-9));
    assert!(rep.optimizer.certified);

    let rep = delta_casorati(&single(DMatrix::identity(3, 3))).unwrap();
    assert!(close(rep.delta_c, 7.0 / 6.0, 1e-9));
}

#[test]
fn proof_polynomials_vanish_on_the_equality_shape() {
    let zero = FormCoefficients::zeros(FormRole::BMap, 3, 1);
    let hp = Hyperplane::coordinate(3, 2).unwrap();
    assert_eq!(proof_polynomial_p(&zero, &hp, 0.0).unwrap(), 0.0);
    assert_eq!(proof_polynomial_q(&zero, &hp, 0.0).unwrap(), 0.0);
    let b = single(diag(&[1.0, 1.0, 2.0]));
    // rC − ‖tr B‖² = 6 − 16
    assert!(proof_polynomial_p(&b, &hp, -10.0).unwrap().abs() < 1e-12);
}

#[test]
fn equality_diagnosis() {
    assert!(diagnose_equality(&FormCoefficients::zeros(FormRole::BMap, 3, 2)).is_equality_shape);
    let d = diagnose_equality(&single(diag(&[1.0, 1.0, 2.0])));
    assert!(d.is_equality_shape && d.max_offdiag < 1e-12 && d.max_umbilic_defect < 1e-12);
    let d = diagnose_equality(&single(DMatrix::identity(3, 3)));
    assert!(!d.is_equality_shape);
    assert!(close(d.max_umbilic_defect, 1.0, 1e-12));
}

#[test]
fn extremum_instances() {
    let check = |r: usize, l1: f64, k: f64, want: &[f64]| {
        let prob = ExtremumProblem::with_proviso(r, l1, k).unwrap();
        let sol = solve_closed_form(&prob).unwrap();
        let oracle = solve_oracle(&prob).unwrap();
        for ((a, b), w) in sol.minimizer.iter().zip(&oracle.minimizer).zip(want) {
            assert!(close(*a, *w, 1e-12) && close(*b, *w, 1e-8), "{sol:?} {oracle:?}");
        }
        assert!(sol.f_min.abs() < 1e-8 && oracle.f_min.abs() < 1e-8);
        // f written out directly
        let z = &sol.minimizer;
        let mut f = prob.lambda2 * z[r - 1].powi(2);
        for zi in &z[..r - 1] {
            f += l1 * zi * zi;
        }
        for i in 0..r {
            for j in i + 1..r {
                f -= 2.0 * z[i] * z[j];
            }
        }
        assert!(f.abs() < 1e-9);
    };
    check(3, 3.0, 4.0, &[1.0, 1.0, 2.0]);
    check(4, 4.0, 7.0, &[1.4, 1.4, 1.4, 2.8]);
    check(5, 6.0, 0.0, &[0.0; 5]);
    let prob = ExtremumProblem::with_proviso(3, 100.0, 1.0).unwrap();
    assert!(close(prob.lambda2, 2.0 / 99.0, 1e-15));
    assert!(solve_closed_form(&prob).unwrap().f_min.abs() < 1e-8);
    assert!(solve_oracle(&prob).unwrap().f_min.abs() < 1e-8);
    assert!(matches!(
        ExtremumProblem::with_proviso(4, 2.0, 1.0),
        Err(Error::ProvisoViolated(_))
    ));
}
