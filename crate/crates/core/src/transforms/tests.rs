use super::*;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

fn a2_scenario() -> AnisotropyMatrix {
    AnisotropyMatrix::from_rotation_scaling(&[FRAC_PI_4], &[0.2, 0.8]).unwrap()
}

fn t1(family: IsotropicFamily, a1: AnisotropyMatrix, a2: AnisotropyMatrix, b1: f64, b2: f64) -> CovarianceModel {
    CovarianceModel::new(ModelKind::T1 { family, a1, a2, b1, b2 }).unwrap()
}

fn wave_t3() -> CovarianceModel {
    CovarianceModel::new(ModelKind::T3 {
        phi1: Component::Family(IsotropicFamily::CardinalSine),
        phi2: IsotropicFamily::CardinalSine,
        a1: 1.0,
        a2: 1.0,
        b1: 1.0,
        b2: 2.0,
        u: vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2],
    })
    .unwrap()
}

#[test]
fn t1_cancels_with_equal_terms() {
    let i2 = AnisotropyMatrix::identity(2);
    let m = t1(IsotropicFamily::matern(1.5), i2.clone(), i2, 1.3, 1.3);
    for h in [[0.0, 0.0], [0.3, -2.0], [5.0, 1.0]] {
        assert_eq!(m.eval(&h).unwrap(), 0.0);
    }
}

#[test]
fn t1_isotropic_matches_nested() {
    let f = IsotropicFamily::cauchy(1.0);
    let m = t1(
        f,
        AnisotropyMatrix::scaled_identity(2, 0.8).unwrap(),
        AnisotropyMatrix::scaled_identity(2, 0.4).unwrap(),
        2.0,
        1.0,
    );
    for h in [[0.5f64, 0.1], [-3.0, 2.0], [0.0, 7.0]] {
        let r = (h[0] * h[0] + h[1] * h[1]).sqrt();
        let nested = 2.0 * f.phi(0.8f64.sqrt() * r).unwrap() - f.phi(0.4f64.sqrt() * r).unwrap();
        assert!((m.eval(&h).unwrap() - nested).abs() < 1e-14);
    }
}

#[test]
fn t2_limits() {
    let f = IsotropicFamily::matern(1.5);
    let make = |eta: Vec<f64>| {
        CovarianceModel::new(ModelKind::T2 { family: f, a1: 0.8, a2: 0.4, b1: 2.0, b2: 1.0, eta }).unwrap()
    };
    let zero = make(vec![0.0, 0.0]);
    let far = make(vec![1e6, 0.0]);
    for h in [[0.4f64, 0.2], [2.0, -1.0]] {
        let r = (h[0] * h[0] + h[1] * h[1]).sqrt();
        let nested = 2.0 * f.phi(0.8f64.sqrt() * r).unwrap() - f.phi(0.4f64.sqrt() * r).unwrap();
        assert!((zero.eval(&h).unwrap() - nested).abs() < 1e-14);
        let lone = 2.0 * f.phi(0.8f64.sqrt() * r).unwrap();
        assert!((far.eval(&h).unwrap() - lone).abs() < 1e-8);
    }
    let m = make(vec![1.0, 1.0]);
    let expect = 2.0 - f.phi(0.4f64.sqrt() * 2f64.sqrt()).unwrap();
    assert!((m.variance().unwrap() - expect).abs() < 1e-15);
}

#[test]
fn t3_wave_origin_value() {
    let m = wave_t3();
    assert!((m.variance().unwrap() - (1.0 + 2.0 / 3.0)).abs() < 1e-15);
    assert_eq!(m.certificate().status, Status::Proved);
    let n = m.normalized().unwrap();
    assert!((n.variance().unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn axis_product_model_one() {
    let m = CovarianceModel::new(ModelKind::AxisProduct {
        phi1: IsotropicFamily::matern(0.5),
        phi2: IsotropicFamily::CardinalSine,
        axis: 1,
        a1: 0.3,
        a2: 2.0,
        sigma2: 4.5,
    })
    .unwrap();
    assert_eq!(m.dim(), 2);
    assert_eq!(m.variance().unwrap(), 4.5);
    let h = [1.0, 0.7];
    let r = (1.0f64 + 0.49).sqrt();
    let expect = 4.5 * (-0.3 * r).exp() * (1.4f64).sin() / 1.4;
    assert!((m.eval(&h).unwrap() - expect).abs() < 1e-14);
    assert_eq!(m.certificate().status, Status::Proved);
}

#[test]
fn evenness() {
    let models = vec![
        t1(IsotropicFamily::matern(1.5), AnisotropyMatrix::identity(2), a2_scenario(), 2.5, 1.0),
        CovarianceModel::new(ModelKind::T2 {
            family: IsotropicFamily::cauchy(1.0),
            a1: 0.8,
            a2: 0.4,
            b1: 2.0,
            b2: 1.0,
            eta: vec![1.0, 1.0],
        })
        .unwrap(),
        wave_t3(),
    ];
    for m in &models {
        for h in [[0.3, 1.1], [-2.0, 0.5], [4.0, 4.0]] {
            let neg = [-h[0], -h[1]];
            assert_eq!(m.eval(&h).unwrap(), m.eval(&neg).unwrap());
        }
    }
}

#[test]
fn scenario_one_certificates() {
    let f = IsotropicFamily::matern(1.5);
    let ok = check_t1_general(&f, &AnisotropyMatrix::identity(2), &a2_scenario(), 2.5, 1.0, 2, DEFAULT_OMEGA_BUDGET);
    assert_eq!(ok.status, Status::Proved);
    assert_eq!(ok.inequality.as_ref().unwrap().text, "2.5·0.4 ≥ 1");
    let bad = check_t1_general(&f, &AnisotropyMatrix::identity(2), &a2_scenario(), 2.4, 1.0, 2, DEFAULT_OMEGA_BUDGET);
    assert_eq!(bad.status, Status::Failed, "{bad}");
    let q = bad.inequality.unwrap();
    assert!((q.lhs - 0.96).abs() < 1e-12 && (q.rhs - 1.0).abs() < 1e-6);
}

#[test]
fn isotropic_condition() {
    let g = IsotropicFamily::Gaussian;
    let a = |s: f64| AnisotropyMatrix::scaled_identity(2, s).unwrap();
    let c = check_t1_general(&g, &a(0.8), &a(0.4), 2.0, 1.0, 2, DEFAULT_OMEGA_BUDGET);
    assert_eq!(c.status, Status::Proved);
    let c = check_t1_general(&g, &a(0.8), &a(0.4), 1.8, 1.0, 2, DEFAULT_OMEGA_BUDGET);
    assert_eq!(c.status, Status::Failed);
    // d = 3 needs b1 >= 2^{3/2}
    let a3 = |s: f64| AnisotropyMatrix::scaled_identity(3, s).unwrap();
    let c = check_t1_general(&g, &a3(0.8), &a3(0.4), 2.0, 1.0, 3, DEFAULT_OMEGA_BUDGET);
    assert_eq!(c.status, Status::Failed);
    let c = check_t1_general(&g, &a3(0.8), &a3(0.4), 2.83, 1.0, 3, DEFAULT_OMEGA_BUDGET);
    assert_eq!(c.status, Status::Proved);
}

#[test]
fn unordered_gaussian_matrices_fail() {
    // the ratio of Gaussian densities grows without bound along the axis
    // where A2 is larger than A1
    let g = IsotropicFamily::Gaussian;
    let a1 = AnisotropyMatrix::diagonal(&[1.0, 0.2]).unwrap();
    let a2 = AnisotropyMatrix::diagonal(&[0.5, 0.5]).unwrap();
    let c = check_t1_general(&g, &a1, &a2, 100.0, 1.0, 2, DEFAULT_OMEGA_BUDGET);
    assert_eq!(c.status, Status::Failed, "{c}");
}

#[test]
fn unordered_matern_numeric_supremum() {
    // Matern ratio stays bounded; the supremum is the limit of
    // (q1/q2)^{2ν+d} along the worst direction: λ_max(A1^{-1}A2)^{ν+d/2}
    let f = IsotropicFamily::matern(1.5);
    let a1 = AnisotropyMatrix::diagonal(&[1.0, 0.5]).unwrap();
    let a2 = AnisotropyMatrix::diagonal(&[0.6, 0.6]).unwrap();
    let sup = 1.2f64.powf(2.5);
    let need = sup * (0.5f64 / 0.36).sqrt();
    let c = check_t1_general(&f, &a1, &a2, need * 1.01, 1.0, 2, DEFAULT_OMEGA_BUDGET);
    assert!(c.status.is_valid(), "{c}");
    let c = check_t1_general(&f, &a1, &a2, need * 0.99, 1.0, 2, DEFAULT_OMEGA_BUDGET);
    assert_eq!(c.status, Status::Failed, "{c}");
}

#[test]
fn t2_certificates() {
    let m = IsotropicFamily::matern(1.5);
    let c = check_t2(&m, 0.8, 0.4, 2.0, 1.0, 2);
    assert_eq!(c.status, Status::Proved);
    assert_eq!(c.inequality.unwrap().text, "2 ≥ 1·2");
    let c = check_t2(&IsotropicFamily::CardinalSine, 0.8, 0.4, 5.0, 1.0, 2);
    assert_eq!(c.status, Status::Unchecked, "{c}");
    assert_eq!(check_t2(&IsotropicFamily::CardinalSine, 0.8, 0.4, 5.0, 0.0, 2).status, Status::Proved);
    // a1 < a2: the sufficient condition does not apply; the radial bound
    // needs b1 >= b2 (a2/a1)^{ν} with the Matern tail ratio
    let c = check_t2(&m, 0.4, 0.8, 3.0, 1.0, 2);
    assert_eq!(c.status, Status::Numeric, "{c}");
    let c = check_t2(&m, 0.4, 0.8, 1.0, 1.0, 2);
    assert_eq!(c.status, Status::Unchecked, "{c}");
    let c = check_t2(&m, 0.8, 0.4, 1.9, 1.0, 2);
    assert_eq!(c.status, Status::Unchecked, "{c}");
}

#[test]
fn t3_certificates() {
    let m15 = IsotropicFamily::matern(1.5);
    assert_eq!(check_t3(&Component::Family(m15), &m15, 2).status, Status::Proved);
    let c = check_t3(&Component::Family(m15), &IsotropicFamily::matern(0.5), 2);
    assert_eq!(c.status, Status::Failed);
    let c = check_t3(&Component::Family(IsotropicFamily::matern(0.5)), &IsotropicFamily::CardinalSine, 2);
    assert_eq!(c.status, Status::Proved);
    let c = check_t3(&Component::Family(m15), &IsotropicFamily::CardinalSine, 4);
    assert_eq!(c.status, Status::Failed);
}

#[test]
fn bracket_special_directions() {
    let f = IsotropicFamily::matern(2.5);
    let u = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];
    let a2: f64 = 0.7;
    let h = [1.2, 1.2];
    let r = a2.sqrt() * 1.2 * 2f64.sqrt();
    let b = derivative_bracket(&f, a2, &u, &h).unwrap();
    assert!((b - f.phi_d2(r).unwrap()).abs() < 1e-15);
    let h = [1.2, -1.2];
    let b = derivative_bracket(&f, a2, &u, &h).unwrap();
    assert!((b - f.phi_d1(r).unwrap() / r).abs() < 1e-14);
    assert_eq!(derivative_bracket(&f, a2, &u, &[0.0, 0.0]).unwrap(), f.phi_d2(0.0).unwrap());
    assert!(derivative_bracket(&IsotropicFamily::matern(0.9), a2, &u, &h).is_err());
}

#[test]
fn gram_basics() {
    let m = wave_t3();
    let g = gram_matrix(&m, &[vec![0.3, 0.2]]).unwrap();
    assert_eq!(g.shape(), (1, 1));
    assert_eq!(g[(0, 0)], m.variance().unwrap());
    let pts: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64 * 0.3, (i * i) as f64 * 0.1]).collect();
    let g = gram_matrix(&m, &pts).unwrap();
    assert_eq!(g, g.transpose());
    assert!(gram_matrix(&m, &[vec![0.0]]).is_err());
}

#[test]
fn serde_roundtrip_recertifies() {
    let doc = r#"{
        "kind": "t1",
        "family": {"family": "matern", "nu": 1.5},
        "a1": [[1, 0], [0, 1]],
        "a2": [[0.5, -0.3], [-0.3, 0.5]],
        "b1": 2.5,
        "b2": 1
    }"#;
    let m: CovarianceModel = serde_json::from_str(doc).unwrap();
    assert_eq!(m.dim(), 2);
    assert_eq!(m.certificate().status, Status::Proved);
    let back: CovarianceModel = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
    assert_eq!(back, m);

    let nested = r#"{
        "kind": "scaled", "sigma2": 0.75,
        "base": {
            "kind": "t3", "a1": 1, "a2": 2.0, "b1": 1, "b2": 1, "u": [0, 1],
            "phi2": {"family": "cardinal_sine"},
            "phi1": {"kind": "axis_product", "phi1": {"family": "matern", "nu": 0.5},
                     "phi2": {"family": "cardinal_sine"}, "axis": 1, "a1": 0.2, "a2": 1.5, "sigma2": 1}
        }
    }"#;
    let m: CovarianceModel = serde_json::from_str(nested).unwrap();
    assert_eq!(m.certificate().status, Status::Proved);
    assert!((m.variance().unwrap() - 0.75 * (1.0 + 1.0 / 3.0)).abs() < 1e-15);
    assert!(serde_json::from_str::<CovarianceModel>(r#"{"kind": "t2", "family": {"family": "gaussian"}, "a1": -1, "a2": 1, "b1": 1, "b2": 0, "eta": [0, 0]}"#).is_err());
}

#[test]
fn hypergeometric_profiles_are_normalized_in_models() {
    let h = IsotropicFamily::gauss_hypergeometric(3.0, 3.5, 6.0, 0);
    let m = CovarianceModel::new(ModelKind::T2 { family: h, a1: 0.8, a2: 0.4, b1: 2.0, b2: 1.0, eta: vec![0.0, 0.0] })
        .unwrap();
    assert!((m.variance().unwrap() - 1.0).abs() < 1e-14);
    assert_eq!(m.certificate().status, Status::Proved);
}

#[test]
fn number_rendering() {
    assert_eq!(fmt_num(2.5), "2.5");
    assert_eq!(fmt_num(0.399_999_999_999_999_97), "0.4");
    assert_eq!(fmt_num(1.0), "1");
    assert_eq!(fmt_num(std::f64::consts::FRAC_1_SQRT_2), "0.707107");
    assert_eq!(fmt_num(1234.5678), "1234.57");
}

#[test]
fn grid_layout_and_symmetry() {
    let m = CovarianceModel::new(ModelKind::AxisProduct {
        phi1: IsotropicFamily::matern(0.5),
        phi2: IsotropicFamily::CardinalSine,
        axis: 1,
        a1: 0.5,
        a2: 5.0,
        sigma2: 2.0,
    })
    .unwrap();
    let g = covariance_grid(&m, [-2.0, 2.0, -1.0, 1.0], 5, 3, true).unwrap();
    assert_eq!(g.h1, vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
    assert_eq!(g.h2, vec![-1.0, 0.0, 1.0]);
    assert_eq!(g.value(2, 1), 1.0);
    assert_eq!(g.max(), 1.0);
    for j in 0..3 {
        for i in 0..5 {
            assert_eq!(g.value(i, j), g.value(4 - i, 2 - j));
            assert!((g.value(i, j) - m.eval(&[g.h1[i], g.h2[j]]).unwrap() / 2.0).abs() < 1e-15);
        }
    }
    assert!(covariance_grid(&m, [0.0, 1.0, 0.0, 1.0], 1, 3, false).is_err());
}
